from .config import (RESTRICTION_NOTE, THEOREMS, HypothesisError, TrialConfig, builtin_config,
                     check_hypotheses, load_config)
from .report import report_csv, report_json, ratios_dat, write_report
from .trials import Report, TrialRecord, domination_field_check, ensemble_report, run_trial

__all__ = [
    "RESTRICTION_NOTE", "THEOREMS", "HypothesisError", "TrialConfig", "builtin_config",
    "check_hypotheses", "load_config", "report_csv", "report_json", "ratios_dat",
    "write_report", "Report", "TrialRecord", "domination_field_check", "ensemble_report",
    "run_trial",
]
