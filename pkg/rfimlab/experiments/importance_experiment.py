"""
Change-of-measure check

Compares direct estimates of two statistics of the disagreement set with
estimates computed on the shifted field and reweighted by the Gaussian
density ratio. The shifted sample reuses the base field plus the shift, so
the comparison runs on paired differences.

The shift is applied on the box of radius N/4 by default. The density ratio
is exact for any support, and a small support keeps the weight variance
``exp(delta^2 |support| / eps^2) - 1`` moderate; ``shift_region="full"``
shifts the whole box instead.
"""

from typing import List, Sequence

from rfimlab.models import ExperimentKind, ExperimentRecord, RunSummary
from rfimlab.physics.disagreement import check_field_monotone
from rfimlab.physics.disorder import BoxShift, perturb, rn_derivative
from rfimlab.physics.lattice import ORIGIN, box
from rfimlab.utils import BaseExperiment, Task
from rfimlab.utils.stats import mean

DEFAULT_DELTA = 0.25
STATISTICS = ("origin", "inner_size")


class ImportanceExperiment(BaseExperiment):
    kind = ExperimentKind.ISCHECK
    title = "change-of-measure identity"

    @property
    def delta(self) -> float:
        return self.run_config.delta if self.run_config.delta is not None else DEFAULT_DELTA

    def support(self, n: int):
        return box(n // 4) if self.run_config.shift_region == "quarter" else box(n)

    def sample(self, task: Task) -> List[ExperimentRecord]:
        n = task.N
        region = box(n)
        inner = box(n // 4).sites()
        support = self.support(n)
        field = self.field(task, region)
        lg = self.label_grid(field, region)
        shifted = perturb(field, BoxShift(delta=self.delta, box=support))
        lg_t = self.label_grid(shifted, region)
        check_field_monotone(lg, lg_t)
        c, c_t = self.members(lg), self.members(lg_t)
        weight = rn_derivative(shifted, self.delta, support, task.epsilon)
        return [
            self.record(
                task,
                scalars={
                    "origin": float(ORIGIN in c),
                    "inner_size": float(len(c.members & inner)),
                    "origin_tilde": float(ORIGIN in c_t),
                    "inner_size_tilde": float(len(c_t.members & inner)),
                    "weight": weight,
                },
                tie=lg.tie or lg_t.tie,
            )
        ]

    def summarize(self, records: Sequence[ExperimentRecord]) -> RunSummary:
        groups = []
        checks = {}
        for (eps, n), rs in self.groups(records).items():
            g = self.group_summary(n, eps, rs)
            weights = [rec.scalars["weight"] for rec in rs]
            g.means["weight"] = mean(weights)
            agree = True
            for name in STATISTICS:
                direct = [rec.scalars[name] for rec in rs]
                reweighted = [rec.scalars[f"{name}_tilde"] * w for rec, w in zip(rs, weights)]
                diff = mean([a - b for a, b in zip(direct, reweighted)])
                g.means[name] = mean(direct)
                g.means[f"{name}_reweighted"] = mean(reweighted)
                g.means[f"{name}_difference"] = diff
                if diff.value is not None:
                    agree = agree and abs(diff.value) <= 3 * (diff.stderr or 0.0)
            w = g.means["weight"]
            normalized = w.value is not None and abs(w.value - 1.0) <= 3 * (w.stderr or 0.0)
            g.values["delta"] = self.delta
            checks[f"agree_N{n}_eps{eps:g}"] = agree
            checks[f"weight_N{n}_eps{eps:g}"] = normalized
            groups.append(g)
        return self.summary(groups, checks=checks)
