"""Frequency-hopping schemes: correlation, throughput, cover-free codes,
Reed-Solomon and keyed Latin-square constructions, and an adaptive jammer."""

from .constructions import (LatinSquare, MdsCode, SrlsFamily, construct_mds_scheme, construct_rs_cfc,
                            cyclic_latin_square, generate_srls_scheme, mitigation_report,
                            ternary_oa9_scheme, verify_min_distance, verify_orthogonal_array)
from .core import (FrequencyLibrary, Scheme, correlation_summary, hamming_correlation,
                   lempel_greenberger_bound_1, lempel_greenberger_bound_2, m_measure,
                   max_autocorrelation, max_crosscorrelation, peng_fan_bound)
from .coverfree import CfcMethod, CfcVerdict, is_cover_free, table2_row
from .errors import ArgumentError, BudgetExceeded, DimensionError, FhsError, NotApplicable
from .jammer import JammerConfig, SessionConfig, estimate_gamma, run_session
from .metrics import Mode, group_correlation, jammed_throughput, throughput
from .slotkey import SlotKeySource, slot_key

__version__ = "0.1.0"

__all__ = [
    "ArgumentError", "BudgetExceeded", "CfcMethod", "CfcVerdict", "DimensionError", "FhsError",
    "FrequencyLibrary", "JammerConfig", "LatinSquare", "MdsCode", "Mode", "NotApplicable", "Scheme",
    "SessionConfig", "SlotKeySource", "SrlsFamily", "construct_mds_scheme", "construct_rs_cfc",
    "correlation_summary", "cyclic_latin_square", "estimate_gamma", "generate_srls_scheme",
    "group_correlation", "hamming_correlation", "is_cover_free", "jammed_throughput",
    "lempel_greenberger_bound_1", "lempel_greenberger_bound_2", "m_measure", "max_autocorrelation",
    "max_crosscorrelation", "mitigation_report", "peng_fan_bound", "run_session", "slot_key",
    "table2_row", "ternary_oa9_scheme", "throughput", "verify_min_distance", "verify_orthogonal_array",
]
