"""
Evaluation: the multi-attempt protocol, benchmark metrics, stratified
sampling, PRM step labels and SFT filtering.
"""

from .records import EpisodeRecord, write_records, read_records
from .protocol import EvalConfig, run_episode, run_episodes
from .metrics import DEFAULT_K, MetricsTable, compute_metrics, format_table
from .sampling import (TYPE_TIERS, TIER_PRESET, TYPE_PRESET, PRESETS, STRATUM_KEYS,
                       stratified_sample, parse_strata)
from .prm import (LabelBranch, BRANCH_VALUES, label_branch, prm_branches, prm_label, prm_rows,
                  write_prm_labels, filter_sft_trajectories)

__all__ = [
    'EpisodeRecord', 'write_records', 'read_records',
    'EvalConfig', 'run_episode', 'run_episodes',
    'DEFAULT_K', 'MetricsTable', 'compute_metrics', 'format_table',
    'TYPE_TIERS', 'TIER_PRESET', 'TYPE_PRESET', 'PRESETS', 'STRATUM_KEYS',
    'stratified_sample', 'parse_strata',
    'LabelBranch', 'BRANCH_VALUES', 'label_branch', 'prm_branches', 'prm_label', 'prm_rows',
    'write_prm_labels', 'filter_sft_trajectories',
]
