"""Explicit lower-bound instances for eps-nets and exact certificates for them."""

from .construction import (
    DigitString,
    Family,
    Rect,
    build_family,
    build_rect,
    chain_blowup,
    dual_space,
    eval_fraction,
    is_r_independent,
    max_independent_bound,
    primal_space,
    theorem1_parameters,
)
from .rangespace import RangeSpace, from_incidences, heavy_ranges, is_epsilon_net, vc_dimension
from .solver import OptResult, exact_min_hitting_set, greedy_hitting_set, max_r_independent, min_epsilon_net

__version__ = "0.1.0"
