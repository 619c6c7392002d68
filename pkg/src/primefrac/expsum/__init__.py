"""Exponential-sum objects: exact lemma checkers, the von Mangoldt decomposition, S(X), Type I/II sums."""

from .decomposition import (BilinearPiece, DecompParams, Decomposition, decompose_lambda_sum,
                            direct_lambda_sum, evaluate_pieces)
from .lemmas import (GeometricCheck, KernelCheck, MinSumDiagnostic, assert_geometric_trials,
                     geometric_bound_check, kernel, kernel_inequality_check, kernel_integral_bound,
                     kernel_integral_closed_form, kernel_integral_numeric, min_sum_diagnostic,
                     periodized_kernel)
from .monitors import COLUMNS, MonitorLedger, MonitorRow, expsum_monitors, read_csv
from .sums import (CrtV, SReport, Thresholds, TypeSumSpec, S_of_X, c_from_cup, coeff_arrays,
                   crt_grid_check, crt_reduced_V, prime_divisor_weights, select_convergent,
                   threshold_exponents, thresholds, type_sums_brute)

__all__ = [
    "BilinearPiece", "DecompParams", "Decomposition", "decompose_lambda_sum", "direct_lambda_sum",
    "evaluate_pieces", "GeometricCheck", "KernelCheck", "MinSumDiagnostic", "assert_geometric_trials",
    "geometric_bound_check", "kernel", "kernel_inequality_check", "kernel_integral_bound",
    "kernel_integral_closed_form", "kernel_integral_numeric", "min_sum_diagnostic", "periodized_kernel",
    "COLUMNS", "MonitorLedger", "MonitorRow", "expsum_monitors", "read_csv", "CrtV", "SReport",
    "Thresholds", "TypeSumSpec", "S_of_X", "c_from_cup", "coeff_arrays", "crt_grid_check",
    "crt_reduced_V", "prime_divisor_weights", "select_convergent", "threshold_exponents",
    "thresholds", "type_sums_brute",
]
