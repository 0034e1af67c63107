from .estimators import (HittingTime, QuantileCurve, aggregate_set_probability, estimate_success_probability,
                         first_hitting_time, log_time_grid, max_first_hitting_time, par_score, quantile_curves,
                         success_curve, success_indicator)
from .registry import ReferenceEntry, ReferenceRegistry, reference_optimum
from .tables import (DEFAULT_ALPHAS, HittingRow, SuccessRow, curve_table, curves_csv, hitting_csv,
                     hitting_time_table, success_csv, success_table)
from .wilcoxon import WilcoxonResult, significance_matrix, wilcoxon_signed_rank

__all__ = [
    "HittingTime", "QuantileCurve", "aggregate_set_probability", "estimate_success_probability",
    "first_hitting_time", "log_time_grid", "max_first_hitting_time", "par_score", "quantile_curves",
    "success_curve", "success_indicator", "ReferenceEntry", "ReferenceRegistry", "reference_optimum",
    "DEFAULT_ALPHAS", "HittingRow", "SuccessRow", "curve_table", "curves_csv", "hitting_csv",
    "hitting_time_table", "success_csv", "success_table", "WilcoxonResult", "significance_matrix",
    "wilcoxon_signed_rank",
]
