"""``neuroeda`` command line.

    neuroeda run experiments/hiff64.yaml --trials 3 --jobs 2
    neuroeda grid experiments/hiff64.yaml
    neuroeda analyze cov runs/x/models/NADE_trial0.npz --groups rr:4:4 --samples 10000
    neuroeda analyze diversity samples.csv --k 5
    neuroeda analyze clamp runs/x/models/NADE_trial0.npz --clamp 0-3=1 --samples 10000
    neuroeda sample runs/x/models/NADE_trial0.npz 1000

Failures print one JSON line ``{"error": ..., "type": ...}`` to stderr and exit nonzero.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from ..core import as_bits
from ..errors import ConfigError, NeuroEdaError, ParseError
from ..models import load_checkpoint
from ..problems import make_problem
from .analysis import analyze_covariance, analyze_diversity, clamp_study, rr_linkage_groups
from .config import OUTPUT_ENV, load_spec
from .experiment import fmt, grid_search, run_experiment, write_csv

log = logging.getLogger("neuroeda")

EXIT_CONFIG, EXIT_DATA, EXIT_RUNTIME = 2, 3, 4


def _override(text: str):
    if "=" not in text:
        raise ConfigError(f"override {text!r} must look like key=value")
    key, value = text.split("=", 1)
    return key.strip(), yaml.safe_load(value)


def _overrides(args) -> dict:
    out = dict(_override(s) for s in args.set or [])
    if args.trials is not None:
        out["trials"] = args.trials
    if args.seed is not None:
        out["base_seed"] = args.seed
    if args.output is not None:
        out["output"] = str(Path(args.output).resolve())
    return out


def parse_groups(text: str, D: int) -> list[list[int]]:
    """``rr:K:N`` for linkage halves, ``blocks:B`` for consecutive blocks, else ``0-3,4-7``."""
    if text.startswith("rr:"):
        _, k, n = text.split(":")
        return rr_linkage_groups(int(k), int(n))
    if text.startswith("blocks:"):
        b = int(text.split(":")[1])
        return [list(range(s, min(s + b, D))) for s in range(0, D, b)]
    groups = []
    for part in text.split(","):
        lo, _, hi = part.partition("-")
        groups.append(list(range(int(lo), int(hi or lo) + 1)))
    return groups


def parse_clamp(text: str | None) -> dict[int, int]:
    """``0-3=1,10=0``; positions are problem-space indices."""
    clamp: dict[int, int] = {}
    for part in (text or "").split(","):
        if not part:
            continue
        span, _, bits = part.partition("=")
        lo, _, hi = span.partition("-")
        lo_i, hi_i = int(lo), int(hi or lo)
        bits = bits.strip()
        if len(bits) == 1:
            bits = bits * (hi_i - lo_i + 1)
        if len(bits) != hi_i - lo_i + 1:
            raise ConfigError(f"clamp {part!r}: need one bit or one bit per position")
        for pos, b in zip(range(lo_i, hi_i + 1), bits):
            clamp[pos] = int(b)
    return clamp


def read_samples(path: Path):
    """Samples CSV as written by ``sample``: a ``genotype`` column, optional ``fitness``."""
    import csv
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "genotype" not in rows[0]:
        raise ParseError(f"{path}: expected a 'genotype' column", line=1)
    X = np.stack([as_bits(r["genotype"]) for r in rows])
    fit = None
    if "fitness" in rows[0] and all(r["fitness"] not in ("", "nan") for r in rows):
        fit = np.array([float(r["fitness"]) for r in rows])
    return X, fit


def _model_samples(args):
    """Samples in problem space from a checkpoint, plus the checkpoint meta."""
    model, meta = load_checkpoint(args.source)
    mask = meta.get("mask")
    study = clamp_study(model, parse_clamp(getattr(args, "clamp", None)), args.samples,
                        np.random.default_rng(args.seed), mask=mask)
    return study["samples"], meta, model, mask


def _problem_from_meta(meta):
    if "problem" not in meta:
        return None
    return make_problem(meta["problem"], meta.get("problem_params") or {})


def cmd_run(args):
    spec = load_spec(args.spec, _overrides(args))
    result = run_experiment(spec, jobs=args.jobs)
    for row in result.summary:
        print(f"{row.algorithm}: best {fmt(row.mean_best)} +/- {fmt(row.sd_best)}, "
              f"evals {fmt(row.mean_evals)}, success {fmt(row.success_pct)}%")
    print(f"wrote {result.output}")


def cmd_grid(args):
    spec = load_spec(args.spec, _overrides(args))
    winners = grid_search(spec, args.algorithm or None, jobs=args.jobs)
    for label, cfg in winners.items():
        print(f"{label}: {json.dumps(cfg.to_dict(), sort_keys=True)}")
    print(f"wrote {spec.output / 'grid.csv'}")


def _output_dir(args) -> Path:
    if args.output:
        return Path(args.output)
    return Path(os.environ.get(OUTPUT_ENV, "runs")) / "analysis"


def cmd_analyze(args):
    out = _output_dir(args)
    if args.kind == "diversity":
        if str(args.source).endswith(".npz"):
            X, meta, _, _ = _model_samples(args)
            problem = _problem_from_meta(meta)
            fit = problem.evaluate(X) if problem is not None else None
        else:
            X, fit = read_samples(Path(args.source))
        res = analyze_diversity(X, args.k, fit)
        rows = [{"sample": i, "knn_mean": d, "fitness": float("nan") if fit is None else fit[i]}
                for i, d in enumerate(res["knn_mean"])]
        path = write_csv(out / "analysis_diversity.csv", ["sample", "knn_mean", "fitness"], rows)
        counts, edges = res["distance_hist"]
        write_csv(out / "analysis_diversity_hist.csv", ["lo", "hi", "count"],
                  ({"lo": edges[i], "hi": edges[i + 1], "count": int(c)} for i, c in enumerate(counts)))
        print(f"mean knn distance {fmt(res['knn_mean'].mean())}; wrote {path}")
        return
    X, meta, model, mask = _model_samples(args)
    D = X.shape[1]
    groups = parse_groups(args.groups, D) if args.groups else None
    if args.kind == "cov":
        if not groups:
            raise ConfigError("analyze cov needs --groups")
        cov = analyze_covariance(X, groups, args.predicate)
        G = len(groups)
        rows = [{"i": i, "j": j, "cov": cov[i, j]} for i in range(G) for j in range(G)]
        path = write_csv(out / "analysis_cov.csv", ["i", "j", "cov"], rows)
        print(np.array2string(cov, precision=4, suppress_small=True))
    else:
        study = clamp_study(model, parse_clamp(args.clamp), args.samples,
                            np.random.default_rng(args.seed), groups, args.predicate, mask)
        rows = [{"locus": i, "p_one": p} for i, p in enumerate(study["locus_means"])]
        path = write_csv(out / "analysis_clamp.csv", ["locus", "p_one"], rows)
        if groups:
            write_csv(out / "analysis_clamp_groups.csv", ["group", "freq"],
                      ({"group": g, "freq": f} for g, f in enumerate(study["group_freq"])))
        print(" ".join(fmt(round(p, 3)) for p in study["locus_means"]))
    print(f"wrote {path}")


def cmd_sample(args):
    model, meta = load_checkpoint(args.checkpoint)
    study = clamp_study(model, parse_clamp(args.clamp), args.n, np.random.default_rng(args.seed),
                        mask=meta.get("mask"))
    X = study["samples"]
    problem = _problem_from_meta(meta)
    fit = problem.evaluate(X) if problem is not None else np.full(len(X), np.nan)
    out = Path(args.output) if args.output else Path(args.checkpoint).with_suffix(".samples.csv")
    rows = ({"genotype": "".join(map(str, x)), "fitness": f} for x, f in zip(X, fit))
    write_csv(out, ["genotype", "fitness"], rows)
    print(f"wrote {out}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="neuroeda", description="Neural and classic EDAs on bit-string benchmarks")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def experiment_args(p):
        p.add_argument("spec", type=Path, help="experiment YAML file")
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int, help="override base_seed")
        p.add_argument("--output", help="output directory")
        p.add_argument("--jobs", type=int, default=1, help="parallel trial workers")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="dotted override, e.g. algorithms.dA.P=50")

    p = sub.add_parser("run", help="run every algorithm in an experiment file")
    experiment_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("grid", help="grid search over the file's grid ranges")
    experiment_args(p)
    p.add_argument("--algorithm", action="append", help="restrict to these labels")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("analyze", help="introspection analyses")
    p.add_argument("kind", choices=["cov", "diversity", "clamp"])
    p.add_argument("source", help="model checkpoint (.npz) or, for diversity, a samples CSV")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--groups", help="rr:K:N, blocks:B or ranges like 0-3,4-7")
    p.add_argument("--predicate", default="all_ones", choices=["all_ones", "all_zeros", "uniform"])
    p.add_argument("--clamp", help="positions to fix, e.g. 0-3=1,8=0")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="output directory")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sample", help="draw genotypes from a saved model")
    p.add_argument("checkpoint")
    p.add_argument("n", type=int)
    p.add_argument("--clamp")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="CSV path")
    p.set_defaults(func=cmd_sample)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ConfigError, ParseError) as e:
        return _fail(e, EXIT_CONFIG)
    except (OSError, ValueError) as e:
        return _fail(e, EXIT_DATA)
    except (NeuroEdaError, RuntimeError, FloatingPointError, MemoryError) as e:
        return _fail(e, EXIT_RUNTIME)
    return 0


def _fail(e: Exception, code: int) -> int:
    print(json.dumps({"error": str(e), "type": type(e).__name__, "exit": code}), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
