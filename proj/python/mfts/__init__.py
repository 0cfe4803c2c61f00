"""Factor models for nonstationary matrix-valued time series (mPCA / mPANIC)."""

try:
    from ._mfts import *  # noqa: F401,F403  (installed package layout)
except ImportError:  # build-tree layout: _mfts.so sits on PYTHONPATH
    from _mfts import *  # noqa: F401,F403

__all__ = [
    "simulate",
    "fit_mpca",
    "fit_mpanic",
    "fit_vectorized",
    "ratio_criterion",
    "projection_distance",
    "factor_space_distance",
    "common_components",
    "MftsError",
]
