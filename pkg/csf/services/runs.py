"""In-memory storage of completed flow runs."""

import logging
from collections import OrderedDict
from datetime import datetime
from uuid import uuid4

from pydantic import BaseModel, ConfigDict

from csf.models.experiment import Outcome
from csf.models.family import FamilySpec
from csf.models.flow import SolverConfig, Trajectory
from csf.services.experiment import classify, default_shrink_eps
from csf.services.families import build_curve
from csf.services.solver import evolve

logger = logging.getLogger(__name__)


class RunNotFoundError(Exception):
    """Raised when a run id is unknown."""

    pass


class RunRecord(BaseModel):
    """A finished run with its classification."""

    model_config = ConfigDict(frozen=True)

    id: str
    family: FamilySpec
    solver: SolverConfig
    expected_n: int
    trajectory: Trajectory
    outcome: Outcome
    created_at: datetime


class RunStore:
    """Bounded in-memory run storage; the oldest run is evicted first."""

    def __init__(self, capacity: int = 32) -> None:
        """Initialize empty storage."""
        self._runs: OrderedDict[str, RunRecord] = OrderedDict()
        self._capacity = capacity

    def create_run(
        self,
        family: FamilySpec,
        solver: SolverConfig,
        expected_n: int,
        shrink_eps: float | None = None,
    ) -> RunRecord:
        """Evolve the family's curve, classify the result and store it."""
        initial = build_curve(family)
        trajectory = evolve(initial, solver, label=str(family.family))
        outcome = classify(trajectory, expected_n, shrink_eps or default_shrink_eps(initial))
        record = RunRecord(
            id=uuid4().hex[:12],
            family=family,
            solver=solver,
            expected_n=expected_n,
            trajectory=trajectory,
            outcome=outcome,
            created_at=datetime.now(),
        )
        self._runs[record.id] = record
        while len(self._runs) > self._capacity:
            evicted, _ = self._runs.popitem(last=False)
            logger.info("evicted run %s", evicted)
        return record

    def get_run(self, run_id: str) -> RunRecord:
        """Get a run by id."""
        if run_id not in self._runs:
            raise RunNotFoundError(f"Run {run_id} not found")
        return self._runs[run_id]

    def list_runs(self) -> list[RunRecord]:
        return list(self._runs.values())

    def delete_run(self, run_id: str) -> None:
        if run_id not in self._runs:
            raise RunNotFoundError(f"Run {run_id} not found")
        del self._runs[run_id]

    def run_count(self) -> int:
        return len(self._runs)
