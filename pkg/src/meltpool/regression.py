"""Least-squares fitting with full diagnostics, the three fixed feature
sets fitted against peak reduced temperature, and per-alloy correlation
series for the morphology pairings.

Fits go through a QR factorization after rows are put into a canonical
sort order, which makes every reported number invariant under permutation
of the input rows (identical rows are interchangeable, so ties are
harmless). The condition number is taken from the singular values of the
raw design matrix, intercept included and nothing standardized, so
collinear feature sets show the huge values they deserve. Tail
probabilities come from the local incomplete-beta implementation, keeping
the fit path free of statistics packages.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from .dimensionless import UhatCoefficients, u_hat
from .errors import ValidationError
from .stats import f_sf, t_two_sided_p

ATTEMPT_FEATURES = {
    1: ("Q", "inv_Pe", "Tc_over_Ste", "Bi_over_Pe", "rad"),
    2: ("E", "Pe", "Tc_over_Ste"),
    3: ("E", "Pe"),
}

_DERIVED = {
    "inv_Pe": lambda row: 1.0 / row["Pe"],
    "Tc_over_Ste": lambda row: row["Tc"] / row["Ste"],
    "Bi_over_Pe": lambda row: row["Bi"] / row["Pe"],
}


@dataclass(frozen=True)
class DesignMatrix:
    """Feature matrix with leading intercept column and response vector."""

    names: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise ValidationError("design matrix and response shapes disagree")
        if len(self.names) != X.shape[1]:
            raise ValidationError("one name per design column required")
        if X.shape[0] <= X.shape[1]:
            raise ValidationError(
                f"need more rows than parameters, got {X.shape[0]} rows "
                f"for {X.shape[1]} parameters")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise ValidationError("design contains non-finite entries")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class RegressionReport:
    label: str
    feature_names: tuple[str, ...]
    coefficients: np.ndarray
    std_errors: np.ndarray
    t_stats: np.ndarray
    p_values: np.ndarray
    significant: np.ndarray
    r_squared: float
    adj_r_squared: float
    f_stat: float
    f_p_value: float
    condition_number: float
    n_obs: int
    n_params: int
    alpha: float

    def summary(self) -> str:
        lines = [f"[{self.label}] n={self.n_obs} features="
                 f"{','.join(self.feature_names[1:]) or '(intercept only)'}"]
        for i, name in enumerate(self.feature_names):
            star = " *" if self.significant[i] else ""
            lines.append(
                f"  {name:<14} {self.coefficients[i]: .6g}"
                f"  se={self.std_errors[i]:.4g}"
                f"  t={self.t_stats[i]: .4g}"
                f"  p={self.p_values[i]:.4g}{star}")
        lines.append(
            f"  R2={self.r_squared:.6g}  adjR2={self.adj_r_squared:.6g}"
            f"  F={self.f_stat:.6g}  p(F)={self.f_p_value:.4g}"
            f"  cond={self.condition_number:.6g}")
        return "\n".join(lines)


def build_design(rows: list[dict], features: tuple[str, ...],
                 response_key: str = "response",
                 names: tuple[str, ...] | None = None) -> DesignMatrix:
    """Intercept-plus-features matrix from flat row dictionaries."""

    def value(row, key):
        if key in row:
            return float(row[key])
        if key in _DERIVED:
            return float(_DERIVED[key](row))
        raise ValidationError(f"row is missing feature {key!r}")

    X = np.array([[1.0] + [value(r, k) for k in features] for r in rows])
    y = np.array([float(r[response_key]) for r in rows])
    return DesignMatrix(names=("intercept", *(names or features)), X=X, y=y)


def ols_fit(design: DesignMatrix, label: str = "ols",
            alpha: float = 0.05) -> RegressionReport:
    """Fit, with coefficient tests, fit statistics, and conditioning."""
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must be in (0, 1), got {alpha}")
    n, p = design.X.shape
    order = np.lexsort(np.column_stack([design.X, design.y]).T[::-1])
    X = design.X[order]
    y = design.y[order]

    _, R_piv, piv = scipy.linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R_piv))
    tol = max(n, p) * np.finfo(float).eps * (diag[0] if diag.size else 0.0)
    rank = int((diag > tol).sum())
    if rank < p:
        dependent = [design.names[j] for j in sorted(piv[rank:])]
        raise ValidationError(
            "rank-deficient design: columns "
            + ", ".join(dependent) + " are linearly dependent on the rest")

    Q, R = np.linalg.qr(X)
    beta = scipy.linalg.solve_triangular(R, Q.T @ y)
    resid = y - X @ beta
    ssr = float(resid @ resid)
    sst = float(((y - y.mean()) ** 2).sum())
    if sst == 0.0:
        raise ValidationError("response has zero variance")
    r2 = 1.0 - ssr / sst
    dof = n - p
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / dof

    sigma2 = ssr / dof
    R_inv = scipy.linalg.solve_triangular(R, np.eye(p))
    cov = sigma2 * (R_inv @ R_inv.T)
    se = np.sqrt(np.diag(cov))
    t_stats = np.empty(p)
    for i in range(p):
        if se[i] > 0.0:
            t_stats[i] = beta[i] / se[i]
        else:
            t_stats[i] = math.copysign(math.inf, beta[i]) if beta[i] != 0.0 else 0.0
    p_values = np.array([t_two_sided_p(abs(t), dof) for t in t_stats])

    if p >= 2:
        msr = (sst - ssr) / (p - 1)
        mse = ssr / dof
        f_stat = math.inf if mse == 0.0 else msr / mse
        f_p = f_sf(f_stat, p - 1, dof)
    else:
        f_stat = math.nan
        f_p = math.nan

    singular = np.linalg.svd(X, compute_uv=False)
    cond = float(singular[0] / singular[-1])

    return RegressionReport(
        label=label, feature_names=design.names, coefficients=beta,
        std_errors=se, t_stats=t_stats, p_values=p_values,
        significant=p_values < alpha, r_squared=r2, adj_r_squared=adj_r2,
        f_stat=f_stat, f_p_value=f_p, condition_number=cond,
        n_obs=n, n_params=p, alpha=alpha)


def attempt_fit(rows: list[dict], attempt: int,
                response_key: str = "response",
                alpha: float = 0.05) -> RegressionReport:
    if attempt not in ATTEMPT_FEATURES:
        raise ValidationError(f"attempt must be one of "
                              f"{sorted(ATTEMPT_FEATURES)}, got {attempt}")
    design = build_design(rows, ATTEMPT_FEATURES[attempt], response_key)
    return ols_fit(design, label=f"attempt{attempt}", alpha=alpha)


def attempt1(rows, **kw):
    return attempt_fit(rows, 1, **kw)


def attempt2(rows, **kw):
    return attempt_fit(rows, 2, **kw)


def attempt3(rows, **kw):
    return attempt_fit(rows, 3, **kw)


CORRELATION_PAIRS = (
    # slug, x key builder inputs, y key, transform
    ("pe_vmax_vs_ma_uhat", "ma_uhat", "pe_vmax", "log10"),
    ("aspect_vs_ma_uhat", "ma_uhat", "aspect", "log10"),
    ("volume_vs_ste_uhat_tc", "ste_uhat_tc", "volume", "log10"),
    ("gmax_vs_uhat", "uhat", "Gmax_tilde", "linear"),
    ("coolrate_vs_uhat", "uhat", "coolrate_K_per_s", "linear"),
)


@dataclass
class CorrelationSeries:
    pair: str
    alloy: str
    x_name: str
    y_name: str
    transform: str
    x: np.ndarray = field(default_factory=lambda: np.empty(0))
    y: np.ndarray = field(default_factory=lambda: np.empty(0))
    slope: float = math.nan
    intercept: float = math.nan
    pearson_r: float = math.nan
    n_dropped: int = 0
    skipped: str | None = None


def _pair_values(row: dict, coeffs: UhatCoefficients):
    """Derived pairing variables for one dataset row."""
    uhat = float(u_hat(row["E"], row["Pe"], coeffs))
    return {
        "uhat": uhat,
        "ma_uhat": row["Ma"] * uhat,
        "ste_uhat_tc": row["Ste"] * uhat / row["Tc"],
        "pe_vmax": row["Pe"] * row["vmax_t"],
        "aspect": row.get("aspect", math.nan),
        "volume": row.get("volume", math.nan),
        "Gmax_tilde": row.get("Gmax_t", math.nan),
        "coolrate_K_per_s": row.get("coolrate_K_per_s", math.nan),
    }


def correlation_tables(rows: list[dict],
                       coeffs: UhatCoefficients | None = None,
                       min_points: int = 3) -> list[CorrelationSeries]:
    """Per-alloy (x, y) series with trend-line fit and Pearson correlation.

    Rows with undefined or, for log pairings, non-positive values are
    dropped per series; series left with fewer than ``min_points`` rows,
    or with no variance on either side, are flagged and skipped.
    """
    coeffs = coeffs or UhatCoefficients()
    alloys = sorted({r["alloy"] for r in rows})
    out: list[CorrelationSeries] = []
    for alloy in alloys:
        sub = [r for r in rows if r["alloy"] == alloy]
        values = [_pair_values(r, coeffs) for r in sub]
        for slug, x_key, y_key, transform in CORRELATION_PAIRS:
            series = CorrelationSeries(pair=slug, alloy=alloy, x_name=x_key,
                                       y_name=y_key, transform=transform)
            xs, ys = [], []
            for val in values:
                x = float(val[x_key])
                y = float(val[y_key])
                usable = math.isfinite(x) and math.isfinite(y)
                if usable and transform == "log10":
                    usable = x > 0.0 and y > 0.0
                if usable:
                    xs.append(x)
                    ys.append(y)
            series.n_dropped = len(values) - len(xs)
            series.x = np.array(xs)
            series.y = np.array(ys)
            if len(xs) < min_points:
                series.skipped = f"only {len(xs)} usable points"
                warnings.warn(f"{slug}/{alloy}: {series.skipped}",
                              RuntimeWarning, stacklevel=2)
                out.append(series)
                continue
            tx = np.log10(series.x) if transform == "log10" else series.x
            ty = np.log10(series.y) if transform == "log10" else series.y
            if np.ptp(tx) == 0.0 or np.ptp(ty) == 0.0:
                series.skipped = "degenerate (constant) series"
                warnings.warn(f"{slug}/{alloy}: {series.skipped}",
                              RuntimeWarning, stacklevel=2)
                out.append(series)
                continue
            series.slope, series.intercept = np.polyfit(tx, ty, 1)
            series.pearson_r = float(np.corrcoef(tx, ty)[0, 1])
            out.append(series)
    return out


def write_correlations(series_list: list[CorrelationSeries],
                       out_dir: str | Path) -> list[Path]:
    """One plot-ready CSV per (pair, alloy), trend parameters in comments."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for s in series_list:
        path = out / f"{s.pair}_{s.alloy}.csv"
        with open(path, "w", newline="") as fh:
            fh.write(f"# pair={s.pair} alloy={s.alloy} transform={s.transform}\n")
            fh.write(f"# slope={s.slope:.9g} intercept={s.intercept:.9g} "
                     f"pearson_r={s.pearson_r:.9g} n={len(s.x)} "
                     f"dropped={s.n_dropped}\n")
            if s.skipped:
                fh.write(f"# skipped: {s.skipped}\n")
            writer = csv.writer(fh)
            writer.writerow([s.x_name, s.y_name])
            for x, y in zip(s.x, s.y):
                writer.writerow([f"{x:.9g}", f"{y:.9g}"])
        paths.append(path)
    return paths


def write_regression_reports(reports: list[RegressionReport],
                             out_dir: str | Path,
                             stem: str = "regression_report") -> list[Path]:
    """Text and CSV renderings of one or more labeled fits."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    txt_path = out / f"{stem}.txt"
    txt_path.write_text("\n\n".join(r.summary() for r in reports) + "\n")
    csv_path = out / f"{stem}.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "feature", "coefficient", "std_error",
                         "t_stat", "p_value", "significant", "r_squared",
                         "adj_r_squared", "f_stat", "f_p_value",
                         "condition_number", "n_obs"])
        for r in reports:
            for i, name in enumerate(r.feature_names):
                writer.writerow([
                    r.label, name, f"{r.coefficients[i]:.12g}",
                    f"{r.std_errors[i]:.12g}", f"{r.t_stats[i]:.12g}",
                    f"{r.p_values[i]:.12g}", int(r.significant[i]),
                    f"{r.r_squared:.12g}", f"{r.adj_r_squared:.12g}",
                    f"{r.f_stat:.12g}", f"{r.f_p_value:.12g}",
                    f"{r.condition_number:.12g}", r.n_obs])
    return [txt_path, csv_path]
