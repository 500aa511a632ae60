"""
Saboteur: seed-model pool, error injection for types A-I, four-fold
validation and benchmark generation.
"""

from .error_types import Difficulty, ErrorType, ErrorTypeInfo, ERROR_TYPES, difficulty_for
from .instance import (SabotageConfig, GroundTruth, BenchmarkInstance, dump_instance,
                       write_benchmark, read_benchmark)
from .pool import FAMILIES, generate_pool, write_pool, read_pool
from .injectors import InjectionResult, inject, anonymize_constraints
from .validation import ValidationReport, FourFoldValidator, CrossCheckValidator, validate, validate_all
from .benchmark import assign_difficulty, generate_benchmark, generation_stats, parse_counts

__all__ = [
    'Difficulty', 'ErrorType', 'ErrorTypeInfo', 'ERROR_TYPES', 'difficulty_for',
    'SabotageConfig', 'GroundTruth', 'BenchmarkInstance', 'dump_instance',
    'write_benchmark', 'read_benchmark',
    'FAMILIES', 'generate_pool', 'write_pool', 'read_pool',
    'InjectionResult', 'inject', 'anonymize_constraints',
    'ValidationReport', 'FourFoldValidator', 'CrossCheckValidator', 'validate', 'validate_all',
    'assign_difficulty', 'generate_benchmark', 'generation_stats', 'parse_counts',
]
