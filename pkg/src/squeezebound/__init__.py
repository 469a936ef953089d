"""Kobayashi metric estimates and squeezing-function bounds near finite-type boundary points."""
from .discs import AnalyticDisc, DiscSearchConfig, circle_average, disc_admissible, lemma10_disc
from .domain import DomainError, DomainSpec, builtin, custom
from .hermitian import HermitianPolynomial
from .jet import Jet
from .kobayashi import (MetricEstimate, ball_exact, diag_lower_certificate, grid_oracle,
                        indicatrix_radii, kobayashi_upper)
from .normal_form import NormalFormResult, reduce_to_normal_form
from .squeezing import (SqueezingBound, exponent_composition, no_linear_map_check,
                        obstruction_epsilon, squeezing_upper)

__all__ = [
    "AnalyticDisc", "DiscSearchConfig", "DomainError", "DomainSpec", "HermitianPolynomial", "Jet",
    "MetricEstimate", "NormalFormResult", "SqueezingBound", "ball_exact", "builtin",
    "circle_average", "custom", "diag_lower_certificate", "disc_admissible",
    "exponent_composition", "grid_oracle", "indicatrix_radii", "kobayashi_upper",
    "lemma10_disc", "no_linear_map_check", "obstruction_epsilon", "reduce_to_normal_form",
    "squeezing_upper",
]
