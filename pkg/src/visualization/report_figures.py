"""
Report figures.

1. RR@k curve for the debugging benchmark
2. RR / RR@k / DA per error type
3. Mean Q/Q* per CR bucket for the bias bench
"""

import logging
import os
from typing import Dict, List

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ..bias import BiasReport
from ..evaluation import MetricsTable

logger = logging.getLogger(__name__)


def plot_recovery_curve(table: MetricsTable, output_dir: str, name: str = "recovery") -> str:
    """RR@k against k, with the overall RR as a reference line."""
    os.makedirs(output_dir, exist_ok=True)
    ks = sorted(table.rr_at_k)
    values = [table.rr_at_k[k] for k in ks]

    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(ks, values, marker='o', linewidth=2, markersize=8, color='#2E86AB', label='RR@k')
    ax.axhline(y=table.rr, color='#A23B72', linestyle='--', alpha=0.7, label='RR')
    ax.set_xlabel('Step budget k', fontsize=12)
    ax.set_ylabel('Recovered instances (%)', fontsize=12)
    ax.set_title('Recovery rate by step budget', fontsize=13, fontweight='bold')
    ax.set_ylim(0, 105)
    ax.set_xticks(ks)
    ax.grid(True, alpha=0.3)
    ax.legend()

    output_path = os.path.join(output_dir, f"{name}_rr_at_k.png")
    plt.savefig(output_path, dpi=150, bbox_inches='tight')
    plt.close(fig)
    logger.info("RR@k curve saved to %s", output_path)
    return output_path


def plot_error_type_breakdown(table: MetricsTable, output_dir: str,
                              name: str = "recovery") -> str:
    """Grouped bars of RR, RR@k (largest k) and DA per error type."""
    os.makedirs(output_dir, exist_ok=True)
    types = list(table.per_error_type)
    k = max(table.rr_at_k) if table.rr_at_k else 0
    series: Dict[str, List[float]] = {
        'RR': [table.per_error_type[t].rr for t in types],
        f'RR@{k}': [table.per_error_type[t].rr_at_k.get(k, 0.0) for t in types],
        'DA': [table.per_error_type[t].da_mean for t in types],
    }
    colors = ['#2E86AB', '#F18F01', '#C73E1D']
    width = 0.25

    fig, ax = plt.subplots(figsize=(12, 5))
    for i, ((label, values), color) in enumerate(zip(series.items(), colors)):
        positions = [j + (i - 1) * width for j in range(len(types))]
        ax.bar(positions, values, width=width, label=label, color=color, alpha=0.8)
    ax.set_xticks(range(len(types)))
    ax.set_xticklabels([f"Type {t}" for t in types])
    ax.set_ylabel('Percent', fontsize=12)
    ax.set_ylim(0, 105)
    ax.set_title('Results by error type', fontsize=13, fontweight='bold')
    ax.grid(True, axis='y', alpha=0.3)
    ax.legend()

    output_path = os.path.join(output_dir, f"{name}_by_type.png")
    plt.savefig(output_path, dpi=150, bbox_inches='tight')
    plt.close(fig)
    logger.info("Error-type breakdown saved to %s", output_path)
    return output_path


def plot_bias_by_bucket(report: BiasReport, output_dir: str, name: str = "bias") -> str:
    """Mean Q/Q* per CR bucket; 1.0 marks unbiased ordering."""
    os.makedirs(output_dir, exist_ok=True)
    buckets = [b for b, v in report.per_cr_bucket.items() if v is not None]
    values = [report.per_cr_bucket[b] for b in buckets]

    fig, ax = plt.subplots(figsize=(8, 5))
    ax.bar(buckets, values, color='#457B9D', alpha=0.8)
    ax.axhline(y=1.0, color='green', linestyle='--', alpha=0.6, label='Q = Q*')
    ax.set_xlabel('Critical ratio bucket', fontsize=12)
    ax.set_ylabel('Mean Q / Q*', fontsize=12)
    ax.set_title(f'Order ratio by CR bucket (Bias Diff {report.bias_diff:.1f}%)',
                 fontsize=13, fontweight='bold')
    ax.grid(True, axis='y', alpha=0.3)
    ax.legend()

    output_path = os.path.join(output_dir, f"{name}_by_cr_bucket.png")
    plt.savefig(output_path, dpi=150, bbox_inches='tight')
    plt.close(fig)
    logger.info("CR bucket figure saved to %s", output_path)
    return output_path
