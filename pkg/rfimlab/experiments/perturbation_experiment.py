"""
Perturbation exclusion experiment

Raises the field of the box of radius N by a global shift, intersects the
disagreement sets before and after, and checks that the two exclusive
conditions on the common set never hold together: (a) its sites are at
induced distance at least K between the boundaries of the boxes of radius
N/4 and N/2, and (b) its mass inside the inner box outweighs 8/K times its
mass in the annulus between radii N/4 and N/2.
"""

import math
from typing import List, Sequence

from rfimlab.exceptions import InvariantViolation
from rfimlab.models import ExperimentKind, ExperimentRecord, PerturbationMode, RunSummary
from rfimlab.physics.disagreement import check_field_monotone, common_disagreement
from rfimlab.physics.disorder import GlobalShift, PerturbationParams, perturb
from rfimlab.physics.lattice import ORIGIN, annulus, box, outer_boundary
from rfimlab.physics.percolation import induced_distance
from rfimlab.utils import BaseExperiment, Task
from rfimlab.utils.stats import wald

OUTCOMES = ("neither", "only_a", "only_b", "both")


def outcome(cond_a: bool, cond_b: bool) -> str:
    return OUTCOMES[int(cond_a) + 2 * int(cond_b)]


class PerturbationExperiment(BaseExperiment):
    kind = ExperimentKind.PERTURB
    title = "perturbation exclusion"

    def params(self, n: int) -> PerturbationParams:
        r = self.run_config
        if r.mode is PerturbationMode.GEODESIC_SCALE:
            p = PerturbationParams.geodesic_scale(n, r.alpha, r.alpha_prime)
        else:
            p = PerturbationParams.box_scale(n, r.gamma, alpha=r.alpha, alpha_prime=r.alpha_prime)
        overrides = {k: getattr(r, k) for k in ("K", "delta") if getattr(r, k) is not None}
        return p.model_copy(update=overrides) if overrides else p

    def sample(self, task: Task) -> List[ExperimentRecord]:
        n = task.N
        region = box(n)
        p = self.params(n)
        field = self.field(task, region)
        lg = self.label_grid(field, region)
        c = self.members(lg)

        transitions = None
        if not self.shifting:
            lg_t, c_t = lg, c
        else:
            lg_t = self.label_grid(perturb(field, GlobalShift(delta=p.delta)), region)
            transitions = check_field_monotone(lg, lg_t)
            c_t = self.members(lg_t)
        cstar = common_disagreement(c, c_t)

        d = induced_distance(cstar.members, outer_boundary(box(n // 4)), outer_boundary(box(n // 2)))
        inner = len(cstar.members & box(n // 4).sites())
        shell = len(cstar.members & annulus(n // 2, n // 4).sites())
        cond_a = d >= p.K
        cond_b = inner * p.delta > (8.0 / p.K) * shell
        if cond_a and cond_b and self.enforcing:
            raise InvariantViolation(
                "perturbation-exclusion",
                "conditions (a) and (b) hold together",
                N=n,
                epsilon=task.epsilon,
                sample_index=task.index,
                distance=d,
                inner=inner,
                shell=shell,
            )

        scalars = {
            "distance": None if math.isinf(d) else float(d),
            "inner": inner,
            "shell": shell,
            "K": p.K,
            "delta": p.delta,
        }
        if transitions is not None:
            scalars.update(
                zero_to_plus=int(transitions[1, 2]),
                minus_to_zero=int(transitions[0, 1]),
                minus_to_plus=int(transitions[0, 2]),
            )
        flags = {
            "cond_a": cond_a,
            "cond_b": cond_b,
            "origin_in_cstar": ORIGIN in cstar,
            "cstar_misses_inner": not (cstar.members & box(n // 8).sites()),
        }
        return [self.record(task, scalars=scalars, flags=flags, tie=lg.tie or lg_t.tie)]

    def summarize(self, records: Sequence[ExperimentRecord]) -> RunSummary:
        groups = []
        for (eps, n), rs in self.groups(records).items():
            g = self.group_summary(n, eps, rs)
            g.counts = {name: 0 for name in OUTCOMES}
            for rec in rs:
                g.counts[outcome(rec.flags["cond_a"], rec.flags["cond_b"])] += 1
            for name in ("origin_in_cstar", "cstar_misses_inner"):
                g.probabilities[name] = wald(sum(1 for rec in rs if rec.flags[name]), len(rs))
            if rs:
                g.values["K"] = rs[0].scalars["K"]
                g.values["delta"] = rs[0].scalars["delta"]
            groups.append(g)
        checks = {}
        if self.enforcing:
            checks["exclusion"] = all(g.counts["both"] == 0 for g in groups)
        return self.summary(groups, checks=checks)
