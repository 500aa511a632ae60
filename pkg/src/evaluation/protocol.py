"""
Multi-attempt evaluation protocol.

Every instance is attempted K times. Each attempt is an independent
episode with its own agent instance and its own RNG stream, so records do
not depend on the number of workers.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Sequence, Tuple

from ..agents import DEFAULT_TIMEOUT, Agent, EpisodeContext
from ..env import DebugEnv, EnvConfig, EpisodeState, OutcomeClass, Transition, classify_outcome
from ..env.reward import diagnostic_accuracy
from ..exceptions import AgentProtocolError, InvariantError
from ..saboteur import BenchmarkInstance
from ..seeding import stream_rng
from .records import EpisodeRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalConfig:
    """
    k: attempts per instance.
    workers: episodes run in parallel threads.
    """
    k: int = 5
    max_steps: int = 50
    workers: int = 1
    agent_timeout: float = DEFAULT_TIMEOUT
    per_solve_timeout: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise InvariantError("k must be >= 1", k=self.k)
        if self.workers < 1:
            raise InvariantError("workers must be >= 1", workers=self.workers)
        if self.agent_timeout <= 0:
            raise InvariantError("agent_timeout must be positive")

    @property
    def env_config(self) -> EnvConfig:
        return EnvConfig(max_steps=self.max_steps, per_solve_timeout=self.per_solve_timeout)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "max_steps": self.max_steps,
            "workers": self.workers,
            "agent_timeout": self.agent_timeout,
            "per_solve_timeout": self.per_solve_timeout,
            "seed": self.seed,
        }


def run_episode(env: DebugEnv, agent: Agent, attempt: int, seed: int) -> EpisodeRecord:
    """
    Play one episode to the end and summarize it.

    A protocol failure (spawn, timeout, malformed reply) ends the episode
    and is recorded as a Failure with the protocol_error flag set.
    """
    instance = env.instance
    context = EpisodeContext(
        instance=instance,
        episode_id=f"{instance.id}#{attempt}",
        attempt=attempt,
        rng=stream_rng(seed, f"agents:{instance.id}", attempt),
    )
    state: EpisodeState = env.reset()
    trajectory: List[Transition] = []
    repair_steps = 0
    error = None
    try:
        agent.start(context)
        while not state.done:
            action = agent.act(state)
            nxt, reward, _ = env.step(state, action)
            trajectory.append(Transition(state.digest(), action, reward, nxt.status,
                                         len(state.iis_log), len(nxt.iis_log), nxt.step))
            if action.kind.is_repair and nxt.last_error is None:
                repair_steps += 1
            state = nxt
    except AgentProtocolError as exc:
        logger.warning("protocol failure in %s: %s", context.episode_id, exc)
        error = str(exc)
    finally:
        agent.finish(state)

    gt = instance.ground_truth
    if error is None:
        outcome, op = classify_outcome(state, gt)
    else:
        outcome, op = OutcomeClass.FAILURE, 0.0
    success = outcome is not OutcomeClass.FAILURE
    return EpisodeRecord(
        instance_id=instance.id,
        attempt_index=attempt,
        error_type=instance.error_type.value,
        difficulty=instance.difficulty.value,
        success=success,
        first_success_step=state.step if success else None,
        da=diagnostic_accuracy(state.diagnosed, gt.iis_gt.members),
        op=op,
        repair_steps=repair_steps,
        total_steps=state.step,
        outcome=outcome,
        final_status=state.status,
        protocol_error=error is not None,
        error=error,
        trajectory=tuple(trajectory),
    )


def run_episodes(agent_factory: Callable[[], Agent], instances: Sequence[BenchmarkInstance],
                 cfg: EvalConfig = EvalConfig()) -> List[EpisodeRecord]:
    """
    K attempts per instance, ordered by instance then attempt.

    agent_factory is called once per episode; the agent is closed when its
    episode is over.
    """
    env_config = cfg.env_config
    envs = {inst.id: DebugEnv(inst, env_config) for inst in instances}
    tasks: List[Tuple[str, int]] = [(inst.id, attempt) for inst in instances
                                    for attempt in range(cfg.k)]

    def play(task: Tuple[str, int]) -> EpisodeRecord:
        instance_id, attempt = task
        agent = agent_factory()
        try:
            return run_episode(envs[instance_id], agent, attempt, cfg.seed)
        finally:
            agent.close()

    logger.info("running %d episodes (%d instances x %d attempts, %d workers)",
                len(tasks), len(instances), cfg.k, cfg.workers)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
            return list(executor.map(play, tasks))
    return [play(task) for task in tasks]
