"""Reduction of a process case to its dimensionless group set.

All solver physics is driven by the numbers computed here. Scales: length
``l_p``, velocity ``v_p``, time ``l_p/v_p``, temperature
``T_tilde = (T - T_inf)/(T_l - T_inf)``, pressure ``rho*v_p^2``.

Group definitions (alpha = k/(rho c), nu = mu/rho, dT_ref = T_l - T_inf):

==========  =====================================================
Pr          nu / alpha
Gr          g l_p^3 beta dT_ref / nu^2
Ra          Gr * Pr
Da          kappa / d_phi^2
Ma          |dgamma_dT| l_p dT_ref / (mu alpha)   (sign kept aside)
Pe          l_p v_p / alpha
Ste         c (T_l - T_s) / L
Q           P / (rho c dT_ref v_p l_p^2)
E           P / (k dT_ref l_p)                    (== Pe * Q)
Bi          h l_p / k
rad         sigma_SB dT_ref^3 / (rho c v_p)
Tc          (T_l - T_s) / dT_ref
==========  =====================================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .alloys import AlloyProperties, ProcessCase, GRAVITY, SIGMA_SB
from .errors import ValidationError


@dataclass(frozen=True)
class DimensionlessSet:
    """Complete dimensionless description of one (alloy, case) pair."""

    Pr: float
    Gr: float
    Ra: float
    Da: float
    Ma: float            # magnitude; the shear direction uses sign_dgamma
    Pe: float
    Ste: float
    Q: float
    E: float
    Bi: float
    rad: float           # linearized radiation measure
    Tc: float
    sign_dgamma: float   # sign of dgamma_dT (-1 for all builtin alloys)
    dT_ref: float        # T_l - T_inf [K]
    t_p: float           # time scale l_p / v_p [s]
    r_tilde: float       # spot radius r_p / l_p
    l_tilde: float = 1.0 # depth scale of the source in l_p units
    # reduced temperatures (0 = ambient, 1 = liquidus)
    T_tilde_solidus: float = field(default=0.0)
    T_tilde_preheat: float = field(default=0.0)

    @property
    def Tc_over_Ste(self) -> float:
        return self.Tc / self.Ste

    @property
    def Bi_over_Pe(self) -> float:
        return self.Bi / self.Pe

    @property
    def inv_Pe(self) -> float:
        return 1.0 / self.Pe

    @property
    def T_tilde_liquidus(self) -> float:
        return 1.0

    @property
    def T_tilde_melt(self) -> float:
        """Reduced melting midpoint (T_s + T_l)/2."""
        return 0.5 * (self.T_tilde_solidus + 1.0)

    # coefficients as they appear in the reduced equations
    @property
    def energy_diffusion(self) -> float:
        return 1.0 / self.Pe

    @property
    def latent_coefficient(self) -> float:
        return self.Tc / self.Ste

    @property
    def surface_loss(self) -> float:
        """Top-boundary linearized loss coefficient Bi/Pe + radiation measure."""
        return self.Bi / self.Pe + self.rad

    @property
    def momentum_viscous(self) -> float:
        return self.Pr / self.Pe

    @property
    def momentum_buoyancy(self) -> float:
        return self.Ra * self.Pr / self.Pe ** 2

    @property
    def momentum_damping(self) -> float:
        return self.Pr / (self.Da * self.Pe)

    @property
    def marangoni_shear(self) -> float:
        """Surface velocity-gradient scale Ma/Pe (magnitude)."""
        return self.Ma / self.Pe

    def as_dict(self) -> dict[str, float]:
        keys = ["Pr", "Gr", "Ra", "Da", "Ma", "Pe", "Ste", "Q", "E", "Bi",
                "rad", "Tc", "sign_dgamma", "dT_ref", "t_p", "r_tilde",
                "l_tilde", "T_tilde_solidus", "T_tilde_preheat"]
        return {k: getattr(self, k) for k in keys}


def compute_numbers(alloy: AlloyProperties, case: ProcessCase) -> DimensionlessSet:
    """Evaluate the full group set for one alloy/process pairing.

    Raises ValidationError when the pairing is inconsistent (wrong alloy
    name, preheat at or above the solidus).
    """
    case.validate_against(alloy)
    alpha = alloy.alpha_th
    nu = alloy.nu_kin
    dT_ref = alloy.T_l - case.T_inf
    if dT_ref <= 0.0:
        raise ValidationError(
            f"case {case.id}: ambient {case.T_inf} K at or above liquidus")
    l_p, v_p = case.l_p, case.v_p
    d_phi = case.damping_length

    Pr = nu / alpha
    Gr = GRAVITY * l_p ** 3 * alloy.beta * dT_ref / nu ** 2
    Da = alloy.kappa / d_phi ** 2
    Ma = abs(alloy.dgamma_dT) * l_p * dT_ref / (alloy.mu * alpha)
    Pe = l_p * v_p / alpha
    Ste = alloy.c * (alloy.T_l - alloy.T_s) / alloy.L
    Q = case.P / (alloy.rho * alloy.c * dT_ref * v_p * l_p ** 2)
    E = case.P / (alloy.k * dT_ref * l_p)
    Bi = case.h_conv * l_p / alloy.k
    rad = SIGMA_SB * dT_ref ** 3 / (alloy.rho * alloy.c * v_p)
    Tc = (alloy.T_l - alloy.T_s) / dT_ref

    return DimensionlessSet(
        Pr=Pr, Gr=Gr, Ra=Gr * Pr, Da=Da, Ma=Ma, Pe=Pe, Ste=Ste, Q=Q, E=E,
        Bi=Bi, rad=rad, Tc=Tc,
        sign_dgamma=math.copysign(1.0, alloy.dgamma_dT),
        dT_ref=dT_ref, t_p=l_p / v_p, r_tilde=case.r_p / l_p,
        T_tilde_solidus=(alloy.T_s - case.T_inf) / dT_ref,
        T_tilde_preheat=(case.T_b - case.T_inf) / dT_ref,
    )


def temperature_to_tilde(T, T_inf: float, dT_ref: float):
    """Map absolute temperature [K] to the reduced scale."""
    return (T - T_inf) / dT_ref


def temperature_from_tilde(T_tilde, T_inf: float, dT_ref: float):
    """Inverse of :func:`temperature_to_tilde`."""
    return T_inf + dT_ref * T_tilde


@dataclass(frozen=True)
class UhatCoefficients:
    """Coefficients of the fitted peak-temperature surface a0 + a1*E + a2*Pe."""

    a0: float = 0.8146
    a1: float = 0.0082
    a2: float = -0.1654


def u_hat(E, Pe, coeffs: UhatCoefficients = UhatCoefficients()):
    """Predicted reduced peak temperature for given E and Pe (vectorizes)."""
    return coeffs.a0 + coeffs.a1 * E + coeffs.a2 * Pe


def ma_u_hat(numbers: DimensionlessSet, uhat: float) -> float:
    """Advection-strength pairing Ma * u_hat."""
    return numbers.Ma * uhat


def ste_u_hat_over_tc(numbers: DimensionlessSet, uhat: float) -> float:
    """Melt-capacity pairing Ste * u_hat / Tc."""
    return numbers.Ste * uhat / numbers.Tc


def pe_v_max(numbers: DimensionlessSet, v_max_tilde: float) -> float:
    """Observed advection strength Pe * max reduced speed."""
    return numbers.Pe * v_max_tilde
