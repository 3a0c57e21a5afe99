"""Fifth-order nonlinear dispersion equations: similarity shocks, blow-up
families, compactons and smooth-data evolution."""

from .errors import *  # noqa: F403
from .models import NdeKind, Profile, SimilarityParams, parse_number
from .ode_core import IvpSpec, integrate
from .shooting import shoot_blowup, shoot_shock, shoot_time5, sweep_family
from .bvp import blowup_profile, polish_shock, solve_bvp, solve_global, uniform_profile
from .asymptotics import char_exponents, fit_oscillatory_tail, poly_roots
from .analysis import delta_entropy_test, extend_profile, l1_rate, residual, rh_speed, tv_growth
from .compactons import explicit_compacton, oscillatory_compacton, robustness_probe
from .evolution import evolve, mollify, shock_indicator

__version__ = "0.1.0"
