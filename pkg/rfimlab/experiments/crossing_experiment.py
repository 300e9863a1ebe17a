"""
Crossing experiment

Estimates the probabilities that the disagreement set of the box of radius N
crosses the annulus between radii N/32 and N/8 the easy way (a radial path)
and the hard way (a separating circuit), and the probability that it crosses
a thin rectangle lengthwise when solved on the rectangle's companion box.
"""

from typing import List, Sequence, Tuple

from rfimlab.exceptions import InvariantViolation
from rfimlab.models import ExperimentKind, ExperimentRecord, RunSummary
from rfimlab.physics.lattice import ORIGIN, RectRegion, annulus, box, scaled_box
from rfimlab.physics.percolation import cross, cross_easy, cross_hard, dual_consistent
from rfimlab.utils import BaseExperiment, Task
from rfimlab.utils.stats import wald

FLAGS = ("hard", "easy", "rect_long_x", "rect_long_y")


class CrossingExperiment(BaseExperiment):
    kind = ExperimentKind.CROSSING
    title = "annulus and rectangle crossings"

    def rectangles(self, n: int) -> Tuple[RectRegion, RectRegion]:
        """Rectangle of aspect ``aspect`` whose companion box is the box of radius N, and its rotation."""
        r = self.run_config
        long_side = max(1, (2 * n) // r.factor)
        short_side = max(1, long_side // r.aspect)
        rect = RectRegion.centered(ORIGIN, long_side, short_side)
        return rect, rect.rotated()

    def sample(self, task: Task) -> List[ExperimentRecord]:
        n = task.N
        region = box(n)
        rects = self.rectangles(n)
        companions = [scaled_box(rect, self.run_config.factor) for rect in rects]
        field = self.field(task, box(max([n] + [b.radius for b in companions])))

        lg = self.label_grid(field, region)
        c = self.members(lg)
        ring = annulus(n // 8, n // 32)
        flags = {"hard": cross_hard(ring, c.members), "easy": cross_easy(ring, c.members)}
        if not dual_consistent(ring, c.members):
            raise InvariantViolation(
                "duality",
                "hard crossing coexists with an easy crossing of the complement",
                N=n,
                epsilon=task.epsilon,
                sample_index=task.index,
            )
        tie = lg.tie

        solved = {region: c}
        for name, rect, big in zip(("rect_long_x", "rect_long_y"), rects, companions):
            if big not in solved:
                big_lg = self.label_grid(field, big)
                tie = tie or big_lg.tie
                solved[big] = self.members(big_lg)
            flags[name] = cross(rect, solved[big].members)
        return [self.record(task, flags=flags, tie=tie)]

    def summarize(self, records: Sequence[ExperimentRecord]) -> RunSummary:
        groups = []
        for (eps, n), rs in self.groups(records).items():
            g = self.group_summary(n, eps, rs)
            for name in FLAGS:
                g.probabilities[name] = wald(sum(1 for rec in rs if rec.flags[name]), len(rs))
            hard, easy = g.probabilities["hard"], g.probabilities["easy"]
            smaller = hard if (hard.value or 0.0) <= (easy.value or 0.0) else easy
            g.values["p_min"] = smaller.value
            g.values["delta_low"] = None if smaller.high is None else 1.0 - smaller.high
            groups.append(g)
        checks = {
            "crossing_bounded": all(
                g.values["delta_low"] is not None and g.values["delta_low"] > 0 for g in groups
            )
        }
        return self.summary(groups, checks=checks)
