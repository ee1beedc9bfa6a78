"""Verification lab for mathematical instanton bundles on P^3 through their monad tensors."""

__version__ = "0.1.0"

from .tensors import ATensor, STensor, gamma, dgamma, xi, rho, rk_S  # noqa: E402
from .monads import certify, generate_newton, generate_slice, group_act, h0_plane  # noqa: E402
from .planes import unstable_plane_test, w_dimension_probe, w_line_probe, quadric_fit  # noqa: E402
from .pencils import classify_S, lemma21_solve  # noqa: E402
from .audit import audit, synth_unsmooth_pair, theorem_tracer  # noqa: E402

__all__ = [
    "ATensor", "STensor", "gamma", "dgamma", "xi", "rho", "rk_S",
    "certify", "generate_newton", "generate_slice", "group_act", "h0_plane",
    "unstable_plane_test", "w_dimension_probe", "w_line_probe", "quadric_fit",
    "classify_S", "lemma21_solve",
    "audit", "synth_unsmooth_pair", "theorem_tracer",
]
