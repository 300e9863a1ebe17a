"""
Star percolation experiment

Adds keyed nonnegative shifts to the field and checks that every site of
the common disagreement set is joined, inside that set, to a site next to
the outer boundary of the box. The unshifted set is checked the same way.
A failure on a sample whose solves reported a fixed-point tie is recorded
and logged instead of raised.
"""

import logging
from typing import List, Sequence

import numpy as np

from rfimlab.exceptions import InvariantViolation
from rfimlab.models import ExperimentKind, ExperimentRecord, RunSummary
from rfimlab.physics.disagreement import DisagreementSet, check_field_monotone, common_disagreement
from rfimlab.physics.disorder import RandomShift, perturb
from rfimlab.physics.lattice import SiteSet, box
from rfimlab.utils import BaseExperiment, Task
from rfimlab.utils.stats import mean, wald

logger = logging.getLogger(__name__)


def unanchored_count(cset: DisagreementSet, anchor: SiteSet) -> int:
    """Sites of ``cset`` whose component does not meet ``anchor``."""
    if not cset:
        return 0
    touching = np.unique(cset.components[anchor.reframe(cset.region.window).mask])
    sizes = cset.component_sizes()
    loose = np.ones(cset.count, dtype=bool)
    loose[touching[touching > 0] - 1] = False
    return int(sizes[loose].sum())


class StarExperiment(BaseExperiment):
    kind = ExperimentKind.STAR
    title = "percolation of the common disagreement set to the boundary"

    def sample(self, task: Task) -> List[ExperimentRecord]:
        n = task.N
        region = box(n)
        field = self.field(task, region)
        lg = self.label_grid(field, region)
        c = self.members(lg)
        if self.shifting:
            shifted = perturb(field, RandomShift(amplitude=self.run_config.shift_amplitude))
            lg_t = self.label_grid(shifted, region)
            check_field_monotone(lg, lg_t)
            c_t = self.members(lg_t)
        else:
            lg_t, c_t = lg, c
        cstar = common_disagreement(c, c_t)

        ring = region.ring()
        violations = unanchored_count(cstar, ring)
        base_violations = unanchored_count(c, ring)
        tie = lg.tie or lg_t.tie
        excused = False
        if violations or base_violations:
            if tie:
                excused = True
                logger.warning(
                    "star check failed on a tied sample (N=%d eps=%g sample=%d): %d sites",
                    n, task.epsilon, task.index, violations + base_violations,
                )
            elif self.enforcing:
                raise InvariantViolation(
                    "star-percolation",
                    "a disagreement site is cut off from the boundary ring",
                    N=n,
                    epsilon=task.epsilon,
                    sample_index=task.index,
                    violations=violations,
                    base_violations=base_violations,
                )
        return [
            self.record(
                task,
                scalars={
                    "violations": violations,
                    "base_violations": base_violations,
                    "cstar_size": len(cstar),
                },
                flags={"cstar_nonempty": bool(cstar), "excused": excused},
                tie=tie,
            )
        ]

    def summarize(self, records: Sequence[ExperimentRecord]) -> RunSummary:
        groups = []
        for (eps, n), rs in self.groups(records).items():
            g = self.group_summary(n, eps, rs)
            g.counts = {
                "violations": int(sum(rec.scalars["violations"] for rec in rs)),
                "base_violations": int(sum(rec.scalars["base_violations"] for rec in rs)),
                "excused_samples": sum(1 for rec in rs if rec.flags["excused"]),
            }
            g.probabilities["cstar_nonempty"] = wald(sum(1 for rec in rs if rec.flags["cstar_nonempty"]), len(rs))
            g.means["cstar_size"] = mean([rec.scalars["cstar_size"] for rec in rs])
            groups.append(g)
        checks = {}
        if self.enforcing:
            checks["anchored"] = not any(
                (rec.scalars["violations"] or rec.scalars["base_violations"]) and not rec.flags["excused"]
                for rec in records
            )
        return self.summary(groups, checks=checks)
