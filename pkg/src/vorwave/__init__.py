"""Shear flows, rotational dispersion relations and bifurcation wavelengths
for steady water waves with vorticity."""

__version__ = "0.1.0"

from .errors import VorwaveError
from .stream import Branch, build_stream_solution, critical_values, depth_sequences
from .vorticity import VorticitySpec, compute_s0, make_spec
from .dispersion import find_roots, sigma_eval
from .linear_wave import first_order_field, solve_kernel, trace_tau_curve

__all__ = [
    "Branch", "VorticitySpec", "VorwaveError", "build_stream_solution", "compute_s0",
    "critical_values", "depth_sequences", "find_roots", "first_order_field", "make_spec",
    "sigma_eval", "solve_kernel", "trace_tau_curve",
]
