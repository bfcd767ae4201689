from .checkpoint import load_checkpoint, save_checkpoint
from .da import (
    DaModel, corrupt, da_forward, da_loss_and_grad, da_sample, da_train,
    da_train_minibatch, sigmoid,
)
from .nade import (
    NadeModel, all_bitstrings, nade_conditionals, nade_exact_distribution,
    nade_log_likelihood, nade_nll_and_grad, nade_sample, nade_train,
    nade_train_minibatch,
)

__all__ = [
    "DaModel", "NadeModel", "all_bitstrings", "corrupt", "da_forward", "da_loss_and_grad",
    "da_sample", "da_train", "da_train_minibatch", "load_checkpoint",
    "nade_conditionals", "nade_exact_distribution", "nade_log_likelihood",
    "nade_nll_and_grad", "nade_sample", "nade_train", "nade_train_minibatch",
    "save_checkpoint", "sigmoid",
]
