"""Bayesian gene set analysis.

Thin Python layer over the C++ core. Arrays are genes x samples; labels are
0 (control) / 1 (treatment); gene sets are lists of 0-based row indices.
"""

from ._core import (
    BgsaError,
    DomainError,
    InputError,
    __version__,
    auc,
    baseline,
    fit,
    gene_zscores,
    ks_signed,
    load,
    maxmean,
    mean_abs_z,
    mean_z,
    prior_correlation_demo,
    simulate,
)

__all__ = [
    "BgsaError",
    "DomainError",
    "InputError",
    "__version__",
    "auc",
    "baseline",
    "fit",
    "fit_files",
    "gene_zscores",
    "ks_signed",
    "load",
    "maxmean",
    "mean_abs_z",
    "mean_z",
    "prior_correlation_demo",
    "simulate",
]


def fit_files(matrix, labels, gmt, **kwargs):
    """Load a matrix/labels/GMT triple and fit the model; kwargs go to fit()."""
    data = load(str(matrix), str(labels), str(gmt))
    return fit(
        data["values"],
        data["labels"],
        data["sets"],
        set_names=data["set_names"],
        gene_ids=data["gene_ids"],
        **kwargs,
    )
