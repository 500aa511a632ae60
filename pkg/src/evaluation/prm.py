"""
Process-reward labels for trajectory steps and SFT trajectory filtering.

Each step gets the value of the first rule that matches:

    next state OPTIMAL                         1.0  solved
    IIS shrank (not on the first step)         1.0  iis_shrank
    diagnosis overlaps the ground-truth IIS    0.5  correct_diagnosis
    diagnostic action                          0.2  information_gathering
    anything else                              0.0  no_progress
"""

import logging
from enum import Enum
from typing import Iterable, List, Mapping, Sequence

from ..env import DIAGNOSTIC_KINDS, Transition
from ..lp import SCHEMA_VERSION, dumps_canonical
from ..saboteur import GroundTruth
from ..solver import SolveStatus
from .records import EpisodeRecord

logger = logging.getLogger(__name__)

SFT_MAX_STEPS = 5
SFT_MIN_DA = 0.5


class LabelBranch(str, Enum):
    SOLVED = "solved"
    IIS_SHRANK = "iis_shrank"
    CORRECT_DIAGNOSIS = "correct_diagnosis"
    INFORMATION_GATHERING = "information_gathering"
    NO_PROGRESS = "no_progress"

    @property
    def value_label(self) -> float:
        return BRANCH_VALUES[self]


BRANCH_VALUES = {
    LabelBranch.SOLVED: 1.0,
    LabelBranch.IIS_SHRANK: 1.0,
    LabelBranch.CORRECT_DIAGNOSIS: 0.5,
    LabelBranch.INFORMATION_GATHERING: 0.2,
    LabelBranch.NO_PROGRESS: 0.0,
}


def label_branch(t: int, step: Transition, gt: GroundTruth) -> LabelBranch:
    if step.status is SolveStatus.OPTIMAL:
        return LabelBranch.SOLVED
    if (t > 0 and step.status is SolveStatus.INFEASIBLE
            and step.iis_size_after < step.iis_size_before):
        return LabelBranch.IIS_SHRANK
    if set(step.action.diagnosis) & set(gt.iis_gt.members):
        return LabelBranch.CORRECT_DIAGNOSIS
    if step.action.kind in DIAGNOSTIC_KINDS:
        return LabelBranch.INFORMATION_GATHERING
    return LabelBranch.NO_PROGRESS


def prm_branches(trajectory: Sequence[Transition], gt: GroundTruth) -> List[LabelBranch]:
    return [label_branch(t, step, gt) for t, step in enumerate(trajectory)]


def prm_label(trajectory: Sequence[Transition], gt: GroundTruth) -> List[float]:
    """
    Label value per trajectory step.

    Branches are checked in order: solved or IIS shrank (1.0), a diagnosis
    naming a ground-truth IIS row (0.5), information gathering (0.2),
    otherwise 0.0. Information gathering counts every diagnostic action,
    CHECK_BOUND included alongside GET_IIS and CHECK_SLACK.
    """
    return [branch.value_label for branch in prm_branches(trajectory, gt)]


def prm_rows(record: EpisodeRecord, gt: GroundTruth) -> List[dict]:
    rows = []
    for t, (step, branch) in enumerate(zip(record.trajectory, prm_branches(record.trajectory, gt))):
        rows.append({
            "schema_version": SCHEMA_VERSION,
            "instance_id": record.instance_id,
            "attempt_index": record.attempt_index,
            "t": t,
            "state_digest": step.state_digest,
            "action": step.action.to_dict(),
            "label": branch.value_label,
            "branch": branch.value,
        })
    return rows


def write_prm_labels(path: str, records: Iterable[EpisodeRecord],
                     truths: Mapping[str, GroundTruth]) -> int:
    """One JSON line per labelled step; returns the number of lines."""
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            for row in prm_rows(record, truths[record.instance_id]):
                fh.write(dumps_canonical(row) + "\n")
                count += 1
    logger.info("wrote %d PRM labels to %s", count, path)
    return count


def filter_sft_trajectories(records: Iterable[EpisodeRecord],
                            max_steps: int = SFT_MAX_STEPS,
                            min_da: float = SFT_MIN_DA) -> List[EpisodeRecord]:
    """Records with success, at most max_steps steps and DA >= min_da."""
    return [r for r in records if r.success and r.total_steps <= max_steps and r.da >= min_da]
