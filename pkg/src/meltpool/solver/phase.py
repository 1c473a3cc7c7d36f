"""Liquid fraction and mushy-zone damping closures.

The melt state is tracked by a smoothed liquid fraction

    phi = e^xi / (e^xi + e^-xi) = (1 + tanh(xi)) / 2,
    xi  = lambda * (T - T_m) / (T_l - T_s),

centered on the melting midpoint T_m = (T_s + T_l)/2. In reduced variables
xi = (lambda / Tc) * (T_tilde - T_tilde_melt). The sharpness lambda is a
per-case knob (useful range about 0.1 .. 1.0).

Flow resistance in partially solid cells follows the Kozeny-Carman form
K(phi) = (1 - phi)^2 / (phi^3 + delta) with a small floor delta keeping the
fully solid limit finite.
"""

from __future__ import annotations

import numpy as np

from ..dimensionless import DimensionlessSet


def liquid_fraction(T_tilde, numbers: DimensionlessSet,
                    mushy_lambda: float) -> np.ndarray:
    """Liquid fraction of a reduced temperature field (vectorizes)."""
    slope = mushy_lambda / numbers.Tc
    xi = slope * (np.asarray(T_tilde) - numbers.T_tilde_melt)
    return 0.5 * (1.0 + np.tanh(xi))


def kozeny_carman(phi, porosity_floor: float) -> np.ndarray:
    """Darcy damping factor K(phi); ~1/delta when solid, 0 when liquid."""
    phi = np.asarray(phi)
    one_minus = 1.0 - phi
    return one_minus * one_minus / (phi * phi * phi + porosity_floor)
