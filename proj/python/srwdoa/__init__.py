# SPDX-License-Identifier: Apache-2.0
"""Gridless super-resolution wideband DOA estimation toolkit."""

from ._core import (
    pswf_basis,
    recover_doas,
    rmse,
    run_config_text,
    select_bins,
    success_probability,
    version,
    virtual_grid,
)

__version__ = version()

__all__ = [
    "pswf_basis",
    "recover_doas",
    "rmse",
    "run_config_text",
    "select_bins",
    "success_probability",
    "virtual_grid",
    "__version__",
]
