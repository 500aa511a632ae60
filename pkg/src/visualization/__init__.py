"""Figures for evaluation and bias reports."""

from .report_figures import plot_recovery_curve, plot_error_type_breakdown, plot_bias_by_bucket

__all__ = [
    'plot_recovery_curve',
    'plot_error_type_breakdown',
    'plot_bias_by_bucket',
]
