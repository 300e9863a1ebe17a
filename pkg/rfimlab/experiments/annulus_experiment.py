"""
Annulus shift experiment

Raises the field on the annulus between radii N/8 and N/4 and estimates how
often the origin stays in the common disagreement set, next to how often the
common set reaches the outer boundary of the box of radius 3N/16. The origin
event implies the ring event on every sample.
"""

import logging
from typing import List, Sequence

from rfimlab.exceptions import InvariantViolation
from rfimlab.models import ExperimentKind, ExperimentRecord, RunSummary
from rfimlab.physics.disagreement import check_field_monotone, common_disagreement
from rfimlab.physics.disorder import AnnulusShift, annulus_delta, perturb
from rfimlab.physics.lattice import ORIGIN, SiteSet, annulus, box, outer_boundary
from rfimlab.utils import BaseExperiment, Task
from rfimlab.utils.stats import wald

logger = logging.getLogger(__name__)

FLAGS = ("origin_in_cstar", "ring_hit", "origin_zero")


class AnnulusExperiment(BaseExperiment):
    kind = ExperimentKind.ANNULUS
    title = "origin and ring events under an annulus shift"

    def delta(self, n: int) -> float:
        r = self.run_config
        return r.delta if r.delta is not None else annulus_delta(n, r.alpha, r.alpha_prime)

    def sample(self, task: Task) -> List[ExperimentRecord]:
        n = task.N
        region = box(n)
        field = self.field(task, region)
        lg = self.label_grid(field, region)
        c = self.members(lg)
        delta = self.delta(n)
        if self.shifting:
            spec = AnnulusShift(delta=delta, annulus=annulus(n // 4, n // 8))
            lg_t = self.label_grid(perturb(field, spec), region)
            check_field_monotone(lg, lg_t)
            c_t = self.members(lg_t)
        else:
            lg_t, c_t = lg, c
        cstar = common_disagreement(c, c_t)

        ring = SiteSet.of(outer_boundary(box(3 * n // 16)))
        origin = ORIGIN in cstar
        ring_hit = bool(cstar.members & ring)
        tie = lg.tie or lg_t.tie
        if origin and not ring_hit:
            if tie:
                logger.warning("origin without ring on a tied sample (N=%d sample=%d)", n, task.index)
            elif self.enforcing:
                raise InvariantViolation(
                    "origin-ring",
                    "origin is in the common set but the ring is not reached",
                    N=n,
                    epsilon=task.epsilon,
                    sample_index=task.index,
                )
        return [
            self.record(
                task,
                scalars={"delta": delta, "cstar_size": len(cstar)},
                flags={"origin_in_cstar": origin, "ring_hit": ring_hit, "origin_zero": ORIGIN in c},
                tie=tie,
            )
        ]

    def summarize(self, records: Sequence[ExperimentRecord]) -> RunSummary:
        groups = []
        for (eps, n), rs in self.groups(records).items():
            g = self.group_summary(n, eps, rs)
            for name in FLAGS:
                g.probabilities[name] = wald(sum(1 for rec in rs if rec.flags[name]), len(rs))
            if rs:
                g.values["delta"] = rs[0].scalars["delta"]
            groups.append(g)
        checks = {
            "origin_below_ring": all(
                (g.probabilities["origin_in_cstar"].value or 0.0) <= (g.probabilities["ring_hit"].value or 0.0)
                for g in groups
            )
        }
        return self.summary(groups, checks=checks)
