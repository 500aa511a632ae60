"""
Subprocess agent speaking line-delimited JSON over stdio.

For every state the environment writes one line

    {"type": "state", "episode_id": ..., "sequence_no": n,
     "state": {...}, "allowed_actions": [...]}

and reads back exactly one line holding an action object, either bare
({"kind": "RELAX", ...}) or wrapped ({"action": {...}}). When the episode
ends a final {"type": "end", ...} line is written; no reply is expected.
"""

import json
import logging
import queue
import shlex
import subprocess
import threading
from typing import List, Optional, Union

from ..exceptions import AgentProtocolError, ParseError, SchemaError, SpawnError, AgentTimeoutError
from ..env import Action, EpisodeState
from ..lp import dumps_canonical
from .base import ALLOWED_ACTIONS, Agent, EpisodeContext

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 120.0
_EOF = None


def parse_reply(line: str) -> Action:
    """
    Decode one agent reply line.

    Raises:
        ParseError: not JSON, not an object, or not a valid action
    """
    try:
        data = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON ({exc.msg})", line)
    if not isinstance(data, dict):
        raise ParseError("reply must be a JSON object", line)
    if "action" in data:
        data = data["action"]
    try:
        return Action.from_dict(data)
    except SchemaError as exc:
        raise ParseError(exc.base_message, line)


class ExternalAgent(Agent):
    """
    One child process per episode; reads are bounded by `timeout`.

    stdout is drained by a reader thread into a queue so that a silent
    agent can never block the evaluation loop.
    """

    name = "external"

    def __init__(self, command: Union[str, List[str]], timeout: float = DEFAULT_TIMEOUT):
        super().__init__()
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self._proc: Optional[subprocess.Popen] = None
        self._lines: "queue.Queue[Optional[str]]" = queue.Queue()
        self._sequence_no = 0

    def start(self, context: EpisodeContext) -> None:
        super().start(context)
        self._stop()
        self._lines = queue.Queue()
        self._sequence_no = 0
        logger.debug("Spawning agent: %s", " ".join(self.command))
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except (OSError, ValueError) as exc:
            raise SpawnError(self.command, str(exc))
        reader = threading.Thread(target=self._drain, args=(self._proc, self._lines), daemon=True)
        reader.start()

    @staticmethod
    def _drain(proc: subprocess.Popen, lines: "queue.Queue[Optional[str]]") -> None:
        try:
            for line in proc.stdout:
                lines.put(line)
        except (OSError, ValueError):
            # stdout closed under us by _stop
            pass
        lines.put(_EOF)

    def _send(self, message) -> None:
        try:
            self._proc.stdin.write(dumps_canonical(message) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError, ValueError) as exc:
            raise AgentProtocolError("Agent closed its input", reason=str(exc),
                                     sequence_no=self._sequence_no)

    def act(self, state: EpisodeState) -> Action:
        if self._proc is None:
            raise AgentProtocolError("Agent process not started")
        self._send({
            "type": "state",
            "episode_id": self.context.episode_id,
            "sequence_no": self._sequence_no,
            "state": state.to_agent_dict(),
            "allowed_actions": ALLOWED_ACTIONS,
        })
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            logger.warning("Agent timed out after %gs (episode %s, message %d)",
                           self.timeout, self.context.episode_id, self._sequence_no)
            raise AgentTimeoutError(self.timeout, self._sequence_no)
        if line is _EOF:
            raise ParseError("agent closed its output")
        self._sequence_no += 1
        return parse_reply(line.strip())

    def finish(self, state: EpisodeState) -> None:
        if self._proc is not None and self._proc.poll() is None:
            try:
                self._send({"type": "end", "episode_id": self.context.episode_id,
                            "status": state.status.value})
            except AgentProtocolError:
                pass
        self._stop()

    def _stop(self) -> None:
        proc, self._proc = self._proc, None
        if proc is None:
            return
        try:
            try:
                proc.stdin.close()
            except OSError:
                pass
            try:
                proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()
        finally:
            for stream in (proc.stdin, proc.stdout):
                if stream is not None and not stream.closed:
                    try:
                        stream.close()
                    except OSError:
                        pass

    def close(self) -> None:
        self._stop()
