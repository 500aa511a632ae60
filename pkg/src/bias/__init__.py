"""
Newsvendor bias bench: scenario generation, the closed-form and
Monte-Carlo oracles, ID/OOD splits, curriculum presets and bias metrics.
"""

from .normal import inv_norm_cdf
from .scenario import (CrRange, LEVEL_CR_RANGES, DISTRACTOR_TEMPLATES, IQR_CONSTANT,
                       NewsvendorScenario, critical_ratio, optimal_q, demand_percentiles,
                       infer_params_from_percentiles, sample_cr, generate_scenario, undecorated,
                       render_prompt, dump_scenario)
from .oracle import expected_profit, MonteCarloOracle
from .splits import (CR_BUCKETS, CURRICULUM_STAGES, CURRICULUM_PRESETS, OOD_CR_LIMIT, BiasConfig,
                     BiasDataset, cr_bucket, level_buckets, build_level, build_splits,
                     build_curriculum, write_scenarios, read_scenarios)
from .metrics import (Decision, BiasReport, POLICIES, parse_decision, read_decisions,
                      write_decisions, oracle_policy, mean_policy, bias_diff, evaluate_bias,
                      format_bias_report)

__all__ = [
    'inv_norm_cdf',
    'CrRange', 'LEVEL_CR_RANGES', 'DISTRACTOR_TEMPLATES', 'IQR_CONSTANT',
    'NewsvendorScenario', 'critical_ratio', 'optimal_q', 'demand_percentiles',
    'infer_params_from_percentiles', 'sample_cr', 'generate_scenario', 'undecorated',
    'render_prompt', 'dump_scenario',
    'expected_profit', 'MonteCarloOracle',
    'CR_BUCKETS', 'CURRICULUM_STAGES', 'CURRICULUM_PRESETS', 'OOD_CR_LIMIT', 'BiasConfig',
    'BiasDataset', 'cr_bucket', 'level_buckets', 'build_level', 'build_splits',
    'build_curriculum', 'write_scenarios', 'read_scenarios',
    'Decision', 'BiasReport', 'POLICIES', 'parse_decision', 'read_decisions',
    'write_decisions', 'oracle_policy', 'mean_policy', 'bias_diff', 'evaluate_bias',
    'format_bias_report',
]
