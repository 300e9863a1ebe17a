"""
Geodesic experiment

Measures D_N, the induced graph distance through the disagreement set of the
box of radius N between the outer boundaries of the boxes of radius N/4 and
N/2, and estimates its growth exponent. Samples without a crossing are
counted but kept out of the regression.
"""

import math
from typing import List, Sequence

from rfimlab.exceptions import InvariantViolation
from rfimlab.models import ExperimentKind, ExperimentRecord, RunSummary
from rfimlab.physics.lattice import box, outer_boundary
from rfimlab.physics.percolation import induced_distance
from rfimlab.utils import BaseExperiment, Task, eps_key
from rfimlab.utils.stats import estimate_exponent, mean, wald


class GeodesicExperiment(BaseExperiment):
    kind = ExperimentKind.GEODESIC
    title = "geodesic length through the disagreement set"

    def sample(self, task: Task) -> List[ExperimentRecord]:
        n = task.N
        region = box(n)
        field = self.field(task, region)
        lg = self.label_grid(field, region)
        c = self.members(lg)
        d = induced_distance(c.members, outer_boundary(box(n // 4)), outer_boundary(box(n // 2)))
        finite = not math.isinf(d)
        if finite and d < n / 4:
            raise InvariantViolation(
                "geodesic-bound",
                f"distance {d} below the l1 bound {n / 4}",
                N=n,
                epsilon=task.epsilon,
                sample_index=task.index,
            )
        return [
            self.record(
                task,
                scalars={"distance": float(d) if finite else None, "zero_count": len(c)},
                flags={"finite": finite},
                tie=lg.tie,
            )
        ]

    def summarize(self, records: Sequence[ExperimentRecord]) -> RunSummary:
        r = self.run_config
        groups = []
        exponent = {}
        for eps in r.epsilon:
            distances = {}
            for (g_eps, n), rs in self.groups(records).items():
                if g_eps != eps:
                    continue
                ds = [rec.scalars["distance"] for rec in rs]
                distances[n] = ds
                g = self.group_summary(n, eps, rs)
                g.probabilities["finite"] = wald(sum(d is not None for d in ds), len(ds))
                g.means["distance"] = mean([d for d in ds if d is not None])
                g.values["min_distance"] = min((d for d in ds if d is not None), default=None)
                groups.append(g)
            exponent[eps_key(eps)] = estimate_exponent(distances, r.exponent_grid, seed=r.master_seed)

        checks = {
            "geodesic_bound": all(
                g.values["min_distance"] is None or g.values["min_distance"] >= g.N / 4 for g in groups
            )
        }
        return self.summary(groups, exponent=exponent, checks=checks)
