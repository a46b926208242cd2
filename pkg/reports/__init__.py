"""
Reports package initialization
"""

from reports.evaluation import (
    EvalReport,
    LengthBreakdown,
    match_positions,
    evaluate,
    report_frame,
    write_eval_report,
    load_eval_pairs
)

__all__ = [
    'EvalReport',
    'LengthBreakdown',
    'match_positions',
    'evaluate',
    'report_frame',
    'write_eval_report',
    'load_eval_pairs'
]
