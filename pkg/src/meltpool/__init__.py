"""Reduced-unit meltpool simulator and regression laboratory for laser
powder-bed melting: alloy/process catalog, dimensionless groups, a
staggered-grid thermo-fluid solver with phase change and a moving beam,
morphology metrics, a resumable sweep harness, and least-squares fitting
with full diagnostics."""

from .alloys import (AlloyProperties, BUILTIN_ALLOYS, ProcessCase,
                     builtin_cases, get_alloy, list_alloys, load_alloys_csv,
                     load_cases_csv, write_alloys_csv, write_cases_csv)
from .config import SolverConfig, build_config, config_hash
from .dimensionless import (DimensionlessSet, UhatCoefficients,
                            compute_numbers, ma_u_hat, pe_v_max,
                            ste_u_hat_over_tc, temperature_from_tilde,
                            temperature_to_tilde, u_hat)
from .errors import SolverError, ValidationError
from .metrics import (MeltpoolMetrics, cooling_rate, extract, gradient_max,
                      meltpool_extent, sdas, write_metrics_csv)
from .regression import (ATTEMPT_FEATURES, CorrelationSeries, DesignMatrix,
                         RegressionReport, attempt1, attempt2, attempt3,
                         attempt_fit, build_design, correlation_tables,
                         ols_fit, write_correlations,
                         write_regression_reports)
from .solver import Grid, ProbeSeries, RunResult, SimState, run_case
from .sweep import (assemble_dataset, catalog_pairs, load_dataset_csv,
                    load_records, run_single, run_sweep, write_dataset_csv)
from .validate import (CheckResult, conservation_check, divergence_check,
                       flux_similarity_check, mms_convergence, run_all,
                       shear_response_check)

__version__ = "0.1.0"

__all__ = [
    "ATTEMPT_FEATURES",
    "AlloyProperties",
    "BUILTIN_ALLOYS",
    "CheckResult",
    "CorrelationSeries",
    "DesignMatrix",
    "DimensionlessSet",
    "Grid",
    "MeltpoolMetrics",
    "ProbeSeries",
    "ProcessCase",
    "RegressionReport",
    "RunResult",
    "SimState",
    "SolverConfig",
    "SolverError",
    "UhatCoefficients",
    "ValidationError",
    "assemble_dataset",
    "attempt1",
    "attempt2",
    "attempt3",
    "attempt_fit",
    "build_config",
    "build_design",
    "builtin_cases",
    "catalog_pairs",
    "compute_numbers",
    "config_hash",
    "conservation_check",
    "cooling_rate",
    "correlation_tables",
    "divergence_check",
    "extract",
    "flux_similarity_check",
    "get_alloy",
    "gradient_max",
    "list_alloys",
    "load_alloys_csv",
    "load_cases_csv",
    "load_dataset_csv",
    "load_records",
    "ma_u_hat",
    "meltpool_extent",
    "mms_convergence",
    "ols_fit",
    "pe_v_max",
    "run_all",
    "run_case",
    "run_single",
    "run_sweep",
    "sdas",
    "shear_response_check",
    "ste_u_hat_over_tc",
    "temperature_from_tilde",
    "temperature_to_tilde",
    "u_hat",
    "write_alloys_csv",
    "write_cases_csv",
    "write_correlations",
    "write_dataset_csv",
    "write_metrics_csv",
    "write_regression_reports",
]
