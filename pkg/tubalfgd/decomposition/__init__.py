from tubalfgd.decomposition.factors import (
    DEFAULT_RANK_TOL,
    SpectrumStats,
    TEigFactors,
    TSvdFactors,
    condition_number,
    is_tpsd,
    project_psd_rank_r,
    psd_factor,
    spectral_singular_values,
    t_eig,
    t_svd,
    truncate_t_svd,
    tubal_rank,
)

__all__ = [
    "DEFAULT_RANK_TOL",
    "TSvdFactors",
    "TEigFactors",
    "SpectrumStats",
    "t_svd",
    "t_eig",
    "truncate_t_svd",
    "tubal_rank",
    "psd_factor",
    "project_psd_rank_r",
    "condition_number",
    "is_tpsd",
    "spectral_singular_values",
]
