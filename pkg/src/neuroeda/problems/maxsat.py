"""DIMACS CNF reading/writing and the MaxSat objective."""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Union

import numpy as np

from ..core import as_bits
from ..errors import DimensionError, ParseError
from .base import Problem


@dataclass
class CnfFormula:
    num_vars: int
    clauses: list[tuple[int, ...]] = field(default_factory=list)

    def __post_init__(self):
        self.clauses = [tuple(int(l) for l in c) for c in self.clauses]
        for c in self.clauses:
            if not c:
                raise ValueError("empty clause")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range 1..{self.num_vars}")

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


def parse_dimacs(text: Union[str, bytes]) -> CnfFormula:
    """Read a DIMACS CNF document.

    Comment lines start with ``c``.  A line starting with ``%`` ends the
    clause section (SATLIB files carry this trailer).  Clauses may span
    lines; each one is terminated by ``0``.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii")
    header = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        last_line = lineno
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if header is not None:
                raise ParseError("duplicate problem line", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"malformed header {line!r}", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"malformed header {line!r}", lineno) from None
            if header[0] < 0 or header[1] < 0:
                raise ParseError("negative counts in header", lineno)
            continue
        if header is None:
            raise ParseError("clause before 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                if not current:
                    raise ParseError("empty clause", lineno)
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > header[0]:
                raise ParseError(f"literal {lit} out of range 1..{header[0]}", lineno)
            else:
                current.append(lit)
    if header is None:
        raise ParseError("missing 'p cnf' header", last_line or None)
    if current:
        raise ParseError("last clause is not terminated by 0", last_line)
    if len(clauses) != header[1]:
        raise ParseError(f"header declares {header[1]} clauses, found {len(clauses)}", last_line)
    return CnfFormula(header[0], clauses)


def serialize_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.num_vars} {f.num_clauses}"]
    lines += [" ".join(str(l) for l in c) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"


def load_dimacs(path) -> CnfFormula:
    return parse_dimacs(Path(path).read_bytes())


def bundled_instance(name: str) -> CnfFormula:
    """Load one of the SATLIB instances shipped with the package, e.g. ``"uf20-01"``."""
    ref = resources.files("neuroeda.problems") / "data" / f"{name}.cnf"
    return parse_dimacs(ref.read_bytes())


class MaxSat(Problem):
    name = "maxsat"

    def __init__(self, formula: CnfFormula, optimum=None):
        super().__init__(formula.num_vars)
        self.formula = formula
        # uniform random 3-SAT from SATLIB is satisfiable, so all clauses is the default target
        self.optimum = float(formula.num_clauses) if optimum is None else optimum
        width = max((len(c) for c in formula.clauses), default=1)
        C = formula.num_clauses
        self._var = np.zeros((C, width), dtype=np.intp)
        self._want = np.zeros((C, width), dtype=np.uint8)
        self._valid = np.zeros((C, width), dtype=bool)
        for i, c in enumerate(formula.clauses):
            for j, lit in enumerate(c):
                self._var[i, j] = abs(lit) - 1
                self._want[i, j] = lit > 0
                self._valid[i, j] = True

    def _evaluate(self, X):
        if self.formula.num_clauses == 0:
            return np.zeros(X.shape[0])
        vals = X[:, self._var]
        sat = (vals == self._want) & self._valid
        return sat.any(axis=2).sum(axis=1).astype(float)


def maxsat(x, f: CnfFormula):
    X = as_bits(x)
    if X.shape[-1] != f.num_vars:
        raise DimensionError(f"assignment length {X.shape[-1]} != {f.num_vars} variables")
    return MaxSat(f).evaluate(X)
