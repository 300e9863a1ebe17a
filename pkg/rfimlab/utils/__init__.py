import logging
import time
from abc import ABC, abstractmethod
from typing import Dict, List, NamedTuple, Optional, Sequence

from rfimlab.models import (
    Diagnostic,
    ExperimentKind,
    ExperimentRecord,
    GroupSummary,
    RunConfig,
    RunSummary,
)
from rfimlab.physics.disagreement import (
    DisagreementSet,
    LabelGrid,
    audit_labels,
    disagreement_set,
    labels,
)
from rfimlab.physics.disorder import FieldSample, sample_field
from rfimlab.physics.lattice import Region
from rfimlab.solvers.maxflow import DinicSolver, create_flow_solver
from rfimlab.utils.pool import flatten, ordered_map
from rfimlab.utils.records import RecordWriter

logger = logging.getLogger(__name__)


class Task(NamedTuple):
    epsilon: float
    N: int
    index: int


def eps_key(epsilon: float) -> str:
    return f"{epsilon:g}"


class BaseExperiment(ABC):
    """
    A Monte Carlo experiment over independent samples.

    Subclasses turn one ``Task`` into records (``sample``) and records into a
    summary (``summarize``). Every ground state solved through
    ``label_grid`` is audited for the monotone coupling and the stability
    inequality before it is used.
    """

    kind: ExperimentKind
    title: str = ""

    def __init__(self, run: RunConfig, solver: Optional[DinicSolver] = None):
        self.run_config = run
        self.solver = solver or create_flow_solver()

    @property
    def enforcing(self) -> bool:
        """Per-sample invariant checks apply only to genuine disagreement sets."""
        return self.run_config.diagnostic is Diagnostic.NONE

    @property
    def shifting(self) -> bool:
        return self.run_config.diagnostic is not Diagnostic.NO_SHIFT

    def tasks(self) -> List[Task]:
        r = self.run_config
        return [Task(eps, n, i) for eps in r.epsilon for n in r.N for i in range(r.samples)]

    @abstractmethod
    def sample(self, task: Task) -> List[ExperimentRecord]:
        """Records for one task."""

    @abstractmethod
    def summarize(self, records: Sequence[ExperimentRecord]) -> RunSummary:
        """Summary of the records of every task."""

    def execute(self, task: Task) -> List[ExperimentRecord]:
        start = time.perf_counter()
        records = self.sample(task)
        share = (time.perf_counter() - start) / max(1, len(records))
        return [r.model_copy(update={"wall_time": share}) for r in records]

    def run(self, writer: Optional[RecordWriter] = None) -> RunSummary:
        r = self.run_config
        tasks = self.tasks()
        logger.info("%s: %d tasks on %d workers", self.kind.value, len(tasks), r.workers)
        records: List[ExperimentRecord] = []
        for record in flatten(ordered_map(self.execute, tasks, r.workers)):
            records.append(record)
            if writer is not None:
                writer.write(record)
        return self.summarize(records)

    # sample helpers

    def field(self, task: Task, region: Region) -> FieldSample:
        return sample_field(region, task.epsilon, self.run_config.master_seed, task.index)

    def label_grid(self, field: FieldSample, region: Region) -> LabelGrid:
        lg = labels(field, region, solver=self.solver)
        audit_labels(field, lg)
        return lg

    def members(self, lg: LabelGrid) -> DisagreementSet:
        if self.run_config.diagnostic is Diagnostic.FULL:
            return DisagreementSet.of(lg.region, lg.region.mask())
        return disagreement_set(lg)

    def record(
        self,
        task: Task,
        n: Optional[int] = None,
        scalars: Optional[Dict[str, Optional[float]]] = None,
        flags: Optional[Dict[str, bool]] = None,
        tie: bool = False,
    ) -> ExperimentRecord:
        return ExperimentRecord(
            kind=self.kind,
            N=task.N if n is None else n,
            epsilon=task.epsilon,
            master_seed=self.run_config.master_seed,
            sample_index=task.index,
            scalars=scalars or {},
            flags=flags or {},
            tie_flag=tie,
        )

    # summary helpers

    def groups(self, records: Sequence[ExperimentRecord]) -> Dict[tuple, List[ExperimentRecord]]:
        """Records keyed by ``(epsilon, N)`` in configuration order, each list in record order."""
        r = self.run_config
        keyed: Dict[tuple, List[ExperimentRecord]] = {
            (eps, n): [] for eps in r.epsilon for n in sorted(set(r.N))
        }
        for rec in records:
            keyed.setdefault((rec.epsilon, rec.N), []).append(rec)
        return keyed

    def group_summary(self, n: int, epsilon: float, records: Sequence[ExperimentRecord]) -> GroupSummary:
        return GroupSummary(
            N=n,
            epsilon=epsilon,
            samples=len(records),
            ties=sum(1 for rec in records if rec.tie_flag),
        )

    def summary(self, groups: List[GroupSummary], **extra) -> RunSummary:
        return RunSummary(kind=self.kind, parameters=self.run_config.fingerprint(), groups=groups, **extra)
