"""Localized averages, covers and enstrophy-cascade diagnostics."""

import json
import math

from . import _core
from ._core import IoError, ValidationError, coherence, parse_scales, run_cli

__all__ = [
    "IoError",
    "ValidationError",
    "coherence",
    "cover",
    "demo_sweep",
    "diagnostics",
    "parse_scales",
    "run_cli",
]


def cover(R0, R, dim, K1=0, K2=0, kind="uniform", seed=1):
    """Cover of B(0, R0) by balls of radius R with its validity report.

    K1 or K2 of 0 selects the dimension default.
    """
    return json.loads(_core.cover_json(R0, R, dim, K1, K2, kind, seed))


def demo_sweep(scales, R0=10.0, budget=4, threshold=0.1):
    """Min, uniform and max ensemble averages of the 1D demo density."""
    return json.loads(_core.demo_sweep_json(list(scales), R0, budget, threshold))


def diagnostics(omega, T, lengths=(2 * math.pi,) * 3, rho=0.75, R0=1.0):
    """E0, P0, sigma0 and B_T of vorticity snapshots shaped (steps, n0, n1, n2, 3)."""
    return json.loads(_core.diagnostics_json(omega, T, list(lengths), rho, R0))
