"""
Origin decay experiment

Estimates m_N, the probability that the origin is zero-labeled in the box of
radius N, for several nested N on one keyed field per sample, and fits the
exponential decay rate. Nested boxes share their disorder, so the inclusion
of the larger box's disagreement set in the smaller one's is asserted on
every sample.
"""

from itertools import combinations
from typing import List, Sequence

from rfimlab.models import ExperimentKind, ExperimentRecord, RunSummary
from rfimlab.physics.disagreement import check_domain_monotone
from rfimlab.physics.lattice import ORIGIN, box
from rfimlab.utils import BaseExperiment, Task, eps_key
from rfimlab.utils.stats import fit_decay, mean, wald


class MNExperiment(BaseExperiment):
    kind = ExperimentKind.MN
    title = "zero label at the origin"

    def tasks(self) -> List[Task]:
        r = self.run_config
        top = max(r.N)
        return [Task(eps, top, i) for eps in r.epsilon for i in range(r.samples)]

    def sample(self, task: Task) -> List[ExperimentRecord]:
        ns = sorted(set(self.run_config.N))
        field = self.field(task, box(ns[-1]))
        sets = {}
        records = []
        for n in ns:
            lg = self.label_grid(field, box(n))
            c = self.members(lg)
            sets[n] = c
            records.append(
                self.record(
                    task,
                    n=n,
                    scalars={"zero_count": len(c), "components": c.count},
                    flags={"origin_zero": ORIGIN in c},
                    tie=lg.tie,
                )
            )
        for small, big in combinations(ns, 2):
            check_domain_monotone(sets[big], sets[small])
        return records

    def summarize(self, records: Sequence[ExperimentRecord]) -> RunSummary:
        groups = []
        decay = {}
        for eps in self.run_config.epsilon:
            counts = {}
            for (g_eps, n), rs in self.groups(records).items():
                if g_eps != eps:
                    continue
                hits = sum(1 for rec in rs if rec.flags["origin_zero"])
                counts[n] = (hits, len(rs))
                g = self.group_summary(n, eps, rs)
                g.probabilities["origin_zero"] = wald(hits, len(rs))
                g.means["zero_count"] = mean([rec.scalars["zero_count"] for rec in rs])
                groups.append(g)
            decay[eps_key(eps)] = fit_decay(counts)

        checks = {}
        if len(set(self.run_config.N)) > 1:
            checks["strictly_decreasing"] = all(fit.strictly_decreasing for fit in decay.values())
            checks["rate_positive"] = all(
                fit.rate is not None and fit.rate.low is not None and fit.rate.low > 0
                for fit in decay.values()
            )
        return self.summary(groups, decay=decay, checks=checks)
