"""Alloy property sets and laser process conditions.

Thermophysical data for the five build alloys plus the scan-parameter grid
used by the sweep (12 power/speed pairs per alloy). Properties are stored in
SI units; everything downstream works in the reduced (dimensionless) system,
so the catalog is the only place dimensional material data lives.

CSV interchange formats:

``alloys.csv``  header ``name,rho,c,k,mu,dgamma_dT,beta,kappa,L,T_s,T_l``
``cases.csv``   header ``alloy,P_W,v_p_m_s`` plus optional override columns
                ``l_p_m,r_p_m,f,a_abs,T_b_K,T_inf_K,h,d_phi_m,lambda``

Lines starting with ``#`` are ignored in both files.
"""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError

# environment / geometry defaults shared by all cases
DEFAULT_L_P = 2.0e-5          # track length scale [m]
DEFAULT_R_P = 1.0e-4          # beam spot radius [m]
DEFAULT_F = 2.0               # Gaussian distribution factor [-]
DEFAULT_A_ABS = 1.0           # absorptivity [-]; catalog powers are treated
                              # as absorbed power unless a case overrides it
DEFAULT_T_B = 353.0           # build-plate preheat [K]
DEFAULT_T_INF = 301.15        # ambient [K]
DEFAULT_H_CONV = 10.0         # convective loss coefficient [W/m^2/K]
DEFAULT_MUSHY_LAMBDA = 1.0    # liquid-fraction sharpness [-]
DEFAULT_POROSITY_FLOOR = 1.0e-5
DEFAULT_DOMAIN = (3.0e-3, 5.0e-4, 5.0e-4)  # (x, y, z) extent [m]
SIGMA_SB = 5.67e-8            # Stefan-Boltzmann [W/m^2/K^4]
GRAVITY = 9.81                # [m/s^2]


@dataclass(frozen=True)
class AlloyProperties:
    """Constant thermophysical properties of one alloy (SI units)."""

    name: str
    rho: float          # density [kg/m^3]
    c: float            # specific heat [J/kg/K]
    k: float            # thermal conductivity [W/m/K]
    mu: float           # dynamic viscosity [Pa s]
    dgamma_dT: float    # surface-tension temperature coefficient [N/m/K]
    beta: float         # volumetric thermal expansion [1/K]
    kappa: float        # mushy-zone permeability scale [m^2]
    L: float            # latent heat of fusion [J/kg]
    T_s: float          # solidus [K]
    T_l: float          # liquidus [K]

    def __post_init__(self):
        if not self.name:
            raise ValidationError("alloy name must be non-empty")
        for field in ("rho", "c", "k", "mu", "beta", "kappa", "L", "T_s", "T_l"):
            value = getattr(self, field)
            if not value > 0.0:
                raise ValidationError(
                    f"alloy {self.name!r}: {field} must be > 0, got {value!r}")
        if not self.T_l > self.T_s:
            raise ValidationError(
                f"alloy {self.name!r}: T_l ({self.T_l}) must exceed T_s ({self.T_s})")

    @property
    def alpha_th(self) -> float:
        """Thermal diffusivity k/(rho*c) [m^2/s]."""
        return self.k / (self.rho * self.c)

    @property
    def nu_kin(self) -> float:
        """Kinematic viscosity mu/rho [m^2/s]."""
        return self.mu / self.rho


@dataclass(frozen=True)
class ProcessCase:
    """One laser scan condition: an alloy plus power, speed, and environment."""

    alloy: str
    P: float                    # beam power [W]
    v_p: float                  # scan speed [m/s]
    l_p: float = DEFAULT_L_P    # length scale [m]
    r_p: float = DEFAULT_R_P    # spot radius [m]
    f: float = DEFAULT_F        # distribution factor [-]
    a_abs: float = DEFAULT_A_ABS
    T_b: float = DEFAULT_T_B    # preheat [K]
    T_inf: float = DEFAULT_T_INF
    h_conv: float = DEFAULT_H_CONV
    d_phi: float | None = None  # damping length [m]; defaults to l_p
    mushy_lambda: float = DEFAULT_MUSHY_LAMBDA
    porosity_floor: float = DEFAULT_POROSITY_FLOOR
    domain_extent: tuple[float, float, float] = DEFAULT_DOMAIN
    case_id: str | None = None

    def __post_init__(self):
        for field in ("v_p", "l_p", "r_p", "f", "a_abs", "h_conv",
                      "mushy_lambda", "porosity_floor"):
            value = getattr(self, field)
            if not value > 0.0:
                raise ValidationError(
                    f"case {self.case_id or self.alloy}: {field} must be > 0, "
                    f"got {value!r}")
        if self.P < 0.0:
            raise ValidationError(
                f"case {self.case_id or self.alloy}: P must be >= 0, "
                f"got {self.P!r}")
        if self.d_phi is not None and not self.d_phi > 0.0:
            raise ValidationError("d_phi must be > 0 when given")
        if not (0.0 < self.a_abs <= 1.0):
            raise ValidationError(f"a_abs must lie in (0, 1], got {self.a_abs}")
        if not self.T_inf < self.T_b:
            raise ValidationError(
                f"need T_inf < T_b, got {self.T_inf} >= {self.T_b}")
        if len(self.domain_extent) != 3 or any(e <= 0 for e in self.domain_extent):
            raise ValidationError("domain_extent must be three positive lengths")

    @property
    def damping_length(self) -> float:
        return self.l_p if self.d_phi is None else self.d_phi

    @property
    def id(self) -> str:
        if self.case_id is not None:
            return self.case_id
        return f"{self.alloy}_P{self.P:g}W_v{self.v_p:g}"

    def validate_against(self, alloy: AlloyProperties) -> None:
        """Check cross-constraints with the referenced alloy."""
        if alloy.name != self.alloy:
            raise ValidationError(
                f"case {self.id}: alloy mismatch ({alloy.name} != {self.alloy})")
        if not self.T_b < alloy.T_s:
            raise ValidationError(
                f"case {self.id}: preheat T_b={self.T_b} must stay below the "
                f"solidus T_s={alloy.T_s} of {alloy.name}")


_BUILTIN = [
    #              rho     c      k      mu       dgamma_dT  beta      kappa     L       T_s    T_l
    ("SS316",      7800.0, 490.0, 36.5,  7.0e-3, -4.00e-4,   5.85e-5,  5.56e-13, 2.72e5, 1693.0, 1733.0),
    ("Ti6Al4V",    4000.0, 570.0, 7.3,   4.0e-3, -2.63e-3,   2.50e-5,  5.56e-13, 2.84e5, 1878.0, 1928.0),
    ("IN718",      8100.0, 435.0, 11.4,  5.0e-3, -3.70e-3,   4.80e-5,  5.56e-13, 2.09e5, 1533.0, 1609.0),
    ("AlSi10Mg",   2670.0, 890.0, 173.0, 1.3e-3, -3.50e-4,   2.40e-5,  5.56e-13, 4.23e5, 831.0,  867.0),
    ("AZ91D",      1675.0, 1122.0, 77.5, 3.0e-3, -2.13e-4,   9.54e-5,  5.56e-13, 3.73e5, 743.0,  868.0),
]

BUILTIN_ALLOYS: dict[str, AlloyProperties] = {
    row[0]: AlloyProperties(*row) for row in _BUILTIN
}

# (P [W], v_p [m/s]) scan grid, 12 conditions per alloy. The AZ91D list
# intentionally repeats two pairs; positional ids keep the records distinct.
_BUILTIN_CONDITIONS: dict[str, list[tuple[float, float]]] = {
    "SS316": [(70, 0.3), (80, 0.4), (90, 0.5), (100, 0.6), (110, 0.7),
              (110, 0.8), (110, 0.9), (110, 1.0), (65, 0.5), (75, 0.5),
              (85, 0.5), (95, 0.5)],
    "Ti6Al4V": [(15, 0.2), (25, 0.5), (35, 0.7), (45, 0.9), (40, 0.6),
                (40, 0.7), (40, 0.8), (40, 1.0), (35, 0.9), (40, 0.9),
                (45, 0.9), (50, 0.9)],
    "IN718": [(20, 0.15), (30, 0.25), (40, 0.45), (50, 0.75), (45, 0.80),
              (45, 0.90), (45, 1.0), (45, 1.1), (53, 0.95), (55, 0.95),
              (58, 0.95), (60, 0.95)],
    "AlSi10Mg": [(75, 0.35), (85, 0.45), (95, 0.55), (105, 0.65), (100, 0.6),
                 (100, 0.7), (100, 0.8), (100, 0.9), (90, 1.1), (95, 1.1),
                 (100, 1.1), (110, 1.1)],
    "AZ91D": [(35, 0.25), (40, 0.30), (45, 0.35), (50, 0.45), (40, 0.30),
              (40, 0.40), (40, 0.50), (40, 0.60), (40, 0.60), (50, 0.60),
              (60, 0.60), (70, 0.60)],
}


def get_alloy(name: str, catalog: dict[str, AlloyProperties] | None = None
              ) -> AlloyProperties:
    """Look up one alloy by name; raises ValidationError on unknown names."""
    table = BUILTIN_ALLOYS if catalog is None else catalog
    try:
        return table[name]
    except KeyError:
        known = ", ".join(sorted(table))
        raise ValidationError(f"unknown alloy {name!r} (known: {known})") from None


def list_alloys(catalog: dict[str, AlloyProperties] | None = None) -> list[str]:
    return sorted(BUILTIN_ALLOYS if catalog is None else catalog)


def builtin_cases() -> list[ProcessCase]:
    """The full 60-condition scan grid with positional case ids."""
    cases = []
    for alloy, pairs in _BUILTIN_CONDITIONS.items():
        for i, (P, v) in enumerate(pairs, start=1):
            cases.append(ProcessCase(alloy=alloy, P=float(P), v_p=float(v),
                                     case_id=f"{alloy}-{i:02d}"))
    return cases


# ---------------------------------------------------------------- CSV I/O

ALLOY_FIELDS = ["name", "rho", "c", "k", "mu", "dgamma_dT", "beta", "kappa",
                "L", "T_s", "T_l"]
CASE_REQUIRED = ["alloy", "P_W", "v_p_m_s"]
CASE_OPTIONAL = ["l_p_m", "r_p_m", "f", "a_abs", "T_b_K", "T_inf_K", "h",
                 "d_phi_m", "lambda"]
_CASE_COLUMN_TO_FIELD = {
    "l_p_m": "l_p", "r_p_m": "r_p", "f": "f", "a_abs": "a_abs",
    "T_b_K": "T_b", "T_inf_K": "T_inf", "h": "h_conv", "d_phi_m": "d_phi",
    "lambda": "mushy_lambda",
}


def _open_rows(path: str | Path):
    with open(path, newline="") as fh:
        filtered = (line for line in fh if not line.lstrip().startswith("#"))
        yield from csv.DictReader(filtered)


def load_alloys_csv(path: str | Path) -> dict[str, AlloyProperties]:
    """Read an alloy table; returns name -> properties in file order."""
    out: dict[str, AlloyProperties] = {}
    for i, row in enumerate(_open_rows(path), start=2):
        missing = [c for c in ALLOY_FIELDS if row.get(c) in (None, "")]
        if missing:
            raise ValidationError(
                f"{path}: line {i}: missing column(s) {', '.join(missing)}")
        try:
            values = {c: float(row[c]) for c in ALLOY_FIELDS if c != "name"}
        except ValueError as exc:
            raise ValidationError(f"{path}: line {i}: {exc}") from None
        alloy = AlloyProperties(name=row["name"], **values)
        if alloy.name in out:
            raise ValidationError(f"{path}: duplicate alloy {alloy.name!r}")
        out[alloy.name] = alloy
    if not out:
        raise ValidationError(f"{path}: no alloy rows found")
    return out


def write_alloys_csv(path: str | Path,
                     alloys: dict[str, AlloyProperties]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ALLOY_FIELDS)
        for alloy in alloys.values():
            writer.writerow([alloy.name] + [repr(getattr(alloy, c))
                                            for c in ALLOY_FIELDS[1:]])


def load_cases_csv(path: str | Path,
                   catalog: dict[str, AlloyProperties] | None = None
                   ) -> list[ProcessCase]:
    """Read process conditions; optional columns override the defaults."""
    cases: list[ProcessCase] = []
    counter: dict[str, int] = {}
    for i, row in enumerate(_open_rows(path), start=2):
        missing = [c for c in CASE_REQUIRED if row.get(c) in (None, "")]
        if missing:
            raise ValidationError(
                f"{path}: line {i}: missing column(s) {', '.join(missing)}")
        alloy_name = row["alloy"]
        alloy = get_alloy(alloy_name, catalog)
        kwargs = {}
        for column, field in _CASE_COLUMN_TO_FIELD.items():
            raw = row.get(column)
            if raw not in (None, ""):
                try:
                    kwargs[field] = float(raw)
                except ValueError:
                    raise ValidationError(
                        f"{path}: line {i}: bad value for {column}: {raw!r}"
                    ) from None
        counter[alloy_name] = counter.get(alloy_name, 0) + 1
        case = ProcessCase(
            alloy=alloy_name, P=float(row["P_W"]), v_p=float(row["v_p_m_s"]),
            case_id=f"{alloy_name}-{counter[alloy_name]:02d}", **kwargs)
        case.validate_against(alloy)
        cases.append(case)
    if not cases:
        raise ValidationError(f"{path}: no case rows found")
    return cases


def write_cases_csv(path: str | Path, cases: list[ProcessCase]) -> None:
    header = CASE_REQUIRED + CASE_OPTIONAL
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for case in cases:
            row = [case.alloy, repr(case.P), repr(case.v_p)]
            for column in CASE_OPTIONAL:
                field = _CASE_COLUMN_TO_FIELD[column]
                value = getattr(case, field)
                row.append("" if value is None else repr(value))
            writer.writerow(row)


def case_to_dict(case: ProcessCase) -> dict:
    d = dataclasses.asdict(case)
    d["domain_extent"] = list(case.domain_extent)
    return d
