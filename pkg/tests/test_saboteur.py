"""
Tests for the saboteur: seed pool, error injection, four-fold validation
and benchmark generation.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import json
import re
from dataclasses import replace

import numpy as np
import pytest

from src.exceptions import PoolExhausted, SchemaError, SolverFailure
from src.lp import EditKind, ModelEdit, apply_edit, apply_edits
from src.saboteur import (CrossCheckValidator, Difficulty, ErrorType, FourFoldValidator,
                          SabotageConfig, difficulty_for, dump_instance, generate_benchmark,
                          generation_stats, inject, parse_counts, read_benchmark, read_pool,
                          validate, validate_all, write_benchmark, write_pool)
from src.evaluation.sampling import TYPE_TIERS
from src.solver import SolveStatus, compute_iis, is_feasible, solve
from src.solver.pulp_bridge import cbc_available

from tests.conftest import TEST_CONFIG

OPAQUE_NAME = re.compile(r"^c_[0-9a-f]{6}_(ub|lb|eq)$")


def test_pool_cycles_families(pool):
    """Test that the pool cycles production, transport, network and inventory models"""
    assert len(pool) == 9
    assert pool[0].has_constraint("c_total")
    assert pool[1].has_constraint("ship_total")
    assert pool[2].has_constraint("throughput")
    assert pool[3].has_constraint("flow_0")
    assert pool[4].has_constraint("c_total")
    for model in pool:
        assert solve(model).status is SolveStatus.OPTIMAL
        assert model.description


def test_pool_round_trip(pool, tmp_path):
    """Test pool file write/read"""
    path = str(tmp_path / "pool.jsonl")
    write_pool(path, pool)
    assert read_pool(path) == pool


def test_benchmark_covers_every_type(bench):
    """Test one validated instance per error type"""
    assert [inst.error_type for inst in bench] == list(ErrorType)
    assert [inst.id for inst in bench] == [f"{t.value}_0000" for t in ErrorType]
    for inst in bench:
        report = validate(inst)
        assert report.passed, str(report)


def test_four_fold_properties(bench):
    """Test the four validation phases directly on each instance"""
    for inst in bench:
        assert solve(inst.original).status is SolveStatus.OPTIMAL
        assert solve(inst.sabotaged).status is SolveStatus.INFEASIBLE
        iis = compute_iis(inst.sabotaged)
        assert iis.size > 0
        for key in inst.ground_truth.key_constraints:
            assert key in iis
        repaired = solve(apply_edits(inst.sabotaged, inst.all_fixes()))
        assert repaired.status is SolveStatus.OPTIMAL
        assert inst.sabotaged != inst.original


def test_iis_size_within_target_range(bench):
    """Test that every generated instance's IIS size lies in its type's target range"""
    for inst in bench:
        lo, hi = inst.error_type.info.target_iis_range
        assert lo <= inst.ground_truth.iis_gt.size <= hi, (inst.id, inst.ground_truth.iis_gt.size)


def test_difficulty_follows_type_tier(bench):
    """Test that calibrated instances land in their type's evaluation tier"""
    for inst in bench:
        assert inst.difficulty is inst.error_type.info.tier
        assert TYPE_TIERS[inst.error_type] == inst.difficulty.value


def test_medium_label_maps_to_easy_tier():
    """Test the taxonomy label to tier mapping"""
    assert ErrorType.B.info.difficulty is Difficulty.MEDIUM
    assert ErrorType.B.info.tier is Difficulty.EASY
    assert {t.info.tier for t in ErrorType} == {Difficulty.EASY, Difficulty.HARD, Difficulty.EXPERT}
    assert [t.value for t in ErrorType if t.info.tier is Difficulty.EXPERT] == ["H", "I"]


def without_rows(model, names):
    expanded = model.expand_bounds()
    dropped = set(names)
    return expanded.with_constraints(c for c in expanded.constraints if c.name not in dropped)


def test_dropping_iis_members_restores_feasibility(bench):
    """Test that dropping every recorded IIS row, cascade included, leaves a feasible model"""
    for inst in bench:
        members = set(inst.ground_truth.iis_gt.members)
        if inst.cascade is not None:
            members |= set(inst.cascade.iis_gt.members)
        assert is_feasible(without_rows(inst.sabotaged, members)) is True, inst.id


def test_inventory_shortage_spans_earlier_periods(pool):
    """Test that a shortage in period 2 involves every capacity and balance row up to it"""
    model = pool[3]
    shocked = apply_edit(model, ModelEdit.set_rhs("flow_2", model.constraint("flow_2").rhs + 1000.0))
    iis = compute_iis(shocked)
    assert set(iis.members) == {"cap_0", "cap_1", "cap_2", "flow_0", "flow_1", "flow_2",
                                "stock_2__lb"}


def test_expert_types_on_inventory_model(pool):
    """Test that H and I reach their IIS targets on a multi-period model"""
    model = pool[3]
    results = {t: inject(model, t, SabotageConfig(), np.random.default_rng(0))
               for t in (ErrorType.H, ErrorType.I)}
    for error_type, result in results.items():
        lo, hi = error_type.info.target_iis_range
        assert lo <= result.ground_truth.iis_gt.size <= hi
        assert result.ground_truth.key_constraints[0] in result.ground_truth.iis_gt
    composite = results[ErrorType.I]
    assert composite.details["raised_bound"] in composite.ground_truth.iis_gt
    assert len(composite.ground_truth.alternative_fixes) >= 2


def test_difficulty_matches_iis_size(bench):
    """Test that the recorded tier follows the ground-truth IIS size"""
    for inst in bench:
        assert inst.difficulty is difficulty_for(inst.ground_truth.iis_gt.size, inst.error_type)


def test_anonymized_types_use_opaque_names(bench):
    """Test opaque constraint ids for types G, H and I"""
    for inst in bench:
        if not inst.error_type.anonymized:
            continue
        for con in inst.sabotaged.constraints:
            assert OPAQUE_NAME.match(con.name), con.name
        for key in inst.ground_truth.key_constraints:
            assert OPAQUE_NAME.match(key) or key.endswith(("__lb", "__ub"))


def test_named_types_keep_readable_names(bench):
    """Test that types A-F keep the seed model's constraint names"""
    for inst in bench:
        if inst.error_type.anonymized:
            continue
        assert not any(OPAQUE_NAME.match(c.name) for c in inst.original.constraints)


def test_type_specific_ground_truth(bench):
    """Test per-type ground-truth shape"""
    by_type = {inst.error_type: inst for inst in bench}

    flip = by_type[ErrorType.A]
    key = flip.ground_truth.key_constraints[0]
    assert flip.ground_truth.fix == (ModelEdit.flip(key),)
    assert flip.sabotaged.constraint(key).sense is flip.original.constraint(key).sense.flipped()

    over = by_type[ErrorType.E]
    assert over.ground_truth.fix[0].kind is EditKind.RELAX
    assert over.ground_truth.fix[0].delta < 0.0
    assert 1.2 <= over.metadata["alpha"] <= 1.5

    capacity = by_type[ErrorType.F]
    assert capacity.root_cause.endswith("__ub")

    flow = by_type[ErrorType.G]
    assert flow.cascade is not None
    assert flow.cascade.key_constraints[0] not in flow.ground_truth.iis_gt
    after_primary = apply_edits(flow.sabotaged, flow.ground_truth.fix)
    assert solve(after_primary).status is SolveStatus.INFEASIBLE

    composite = by_type[ErrorType.I]
    assert len(composite.ground_truth.alternative_fixes) >= 2
    for alternative in composite.ground_truth.alternative_fixes:
        assert solve(apply_edits(composite.sabotaged, alternative)).status is SolveStatus.OPTIMAL


def test_fixed_alpha(pool):
    """Test that a configured alpha scales the requirement exactly"""
    model = pool[0]
    result = inject(model, ErrorType.E, SabotageConfig(alpha=1.4), np.random.default_rng(0))
    key = result.ground_truth.key_constraints[0]
    assert result.sabotaged.constraint(key).rhs == pytest.approx(1.4 * model.constraint(key).rhs)
    assert result.details["alpha"] == 1.4
    assert apply_edit(result.sabotaged, result.ground_truth.fix[0]).constraint(key).rhs == \
        pytest.approx(model.constraint(key).rhs)


def test_inject_requires_feasible_model(bench):
    """Test that an infeasible input model is rejected"""
    with pytest.raises(SolverFailure):
        inject(bench[0].sabotaged, ErrorType.B, SabotageConfig(), np.random.default_rng(0))


def test_generation_is_deterministic(pool):
    """Test byte-identical output for equal seeds and any worker count"""
    counts = parse_counts("A=1,E=1,H=1")
    first = generate_benchmark(pool, counts, TEST_CONFIG)
    second = generate_benchmark(pool, counts, TEST_CONFIG, workers=3)
    assert [dump_instance(i) for i in first] == [dump_instance(i) for i in second]


def test_empty_pool_raises():
    """Test PoolExhausted with the per-type shortfall"""
    with pytest.raises(PoolExhausted) as exc_info:
        generate_benchmark([], {ErrorType.A: 2, ErrorType.B: 1})
    assert exc_info.value.shortfall == {"A": 2, "B": 1}


def test_parse_counts():
    """Test the count-spec parser"""
    assert parse_counts("A=2, b=3") == {ErrorType.A: 2, ErrorType.B: 3}
    assert parse_counts("") == {}


def test_difficulty_for():
    """Test tier thresholds including the Hard/Expert overlap"""
    assert difficulty_for(3, ErrorType.A) is Difficulty.EASY
    assert difficulty_for(4, ErrorType.B) is Difficulty.EASY
    assert difficulty_for(5, ErrorType.B) is Difficulty.EASY
    assert difficulty_for(8, ErrorType.A) is Difficulty.HARD
    assert difficulty_for(12, ErrorType.H) is Difficulty.EXPERT
    assert difficulty_for(6, ErrorType.E) is Difficulty.HARD
    assert difficulty_for(9, ErrorType.G) is Difficulty.HARD
    assert difficulty_for(9, ErrorType.H) is Difficulty.EXPERT
    assert difficulty_for(12, ErrorType.E) is Difficulty.EXPERT


def test_generation_stats(bench):
    """Test the statistics block written into the run manifest"""
    stats = generation_stats(bench)
    assert stats["instances"] == 9
    assert 0.0 <= stats["first_try_rate"] <= 1.0
    assert sum(stats["difficulty"].values()) == 9
    assert set(stats["mean_attempts"]) == {t.value for t in ErrorType}


def test_benchmark_file_round_trip(bench, tmp_path):
    """Test that read(write(bench)) reproduces every instance byte for byte"""
    path = str(tmp_path / "bench.jsonl")
    assert write_benchmark(path, bench) == len(bench)
    loaded = read_benchmark(path)
    assert [dump_instance(i) for i in loaded] == [dump_instance(i) for i in bench]
    assert all(report.passed for report in validate_all(loaded))


def test_read_benchmark_rejects_bad_schema(bench, tmp_path):
    """Test SchemaError on an unknown schema_version"""
    data = bench[0].to_dict()
    data["schema_version"] = 99
    path = tmp_path / "bad.jsonl"
    path.write_text(json.dumps(data) + "\n")
    with pytest.raises(SchemaError):
        read_benchmark(str(path))


def test_validator_reports_failures(bench):
    """Test that a broken instance fails with the phase that caught it"""
    inst = bench[0]
    broken = replace(inst, sabotaged=inst.original)
    report = FourFoldValidator().check(broken)
    assert not report.passed
    assert report.failed_phase == 2
    assert "✗ FAILED" in str(report)


@pytest.mark.skipif(not cbc_available(), reason="CBC not available")
def test_cross_check_with_cbc(bench):
    """Test status agreement with CBC"""
    validator = CrossCheckValidator()
    for inst in bench:
        assert validator.check(inst).passed
