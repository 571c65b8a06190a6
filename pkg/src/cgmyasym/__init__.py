"""Short-maturity call price and implied-volatility expansions for CGMY models."""

from .bs import BsQuote, ImpliedVolError, bs_call, bs_char_fn, implied_vol
from .expansions import (
    ExpansionCoeffs,
    coeffs_for,
    d32_half_normal_mc,
    d32_pure_mc,
    d32_pure_quad,
    iv_expansion,
    iv_expansion_mixed,
    iv_expansion_pure,
    mixed_coeffs,
    price_expansion,
    price_expansion_se,
    pure_jump_coeffs,
)
from .ift import IftConvergenceError, QuadratureConfig, ift_price
from .model import (
    PRESETS,
    CgmyParams,
    MoneynessSchedule,
    ParameterError,
    char_fn,
    kappa_at,
    load_config,
    parse_config,
    schedule_for,
    validate_params,
)
from .montecarlo import McConfig, McEstimate, mc_price, mc_price_grid, mc_weight_identity_check
from .stable import (
    OneSidedStableLaw,
    SymStableLaw,
    e_z_plus,
    pdf_sym,
    sample_one_sided,
    sample_z_pair,
    sf_sym,
)

__version__ = "0.1.0"
