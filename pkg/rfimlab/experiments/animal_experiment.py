"""
Coarse percolation experiment

Tiles the box of radius N into squares of side 2N', calls a tile open when
the disagreement set of its doubled companion box meets it, and records the
largest open lattice animal. Two tiles far enough apart for their companion
boxes to be disjoint are tracked to test that their openness is independent.
"""

import math
from typing import List, Sequence

from rfimlab.models import Diagnostic, ExperimentKind, ExperimentRecord, RunSummary
from rfimlab.physics.lattice import box, scaled_box
from rfimlab.physics.percolation import coarse_grid, max_open_animal
from rfimlab.utils import BaseExperiment, Task
from rfimlab.utils.stats import correlation, mean, wald

COMPANION_FACTOR = 2
PAIR_MIN_TILES = 4


def animal_threshold(n: int, n_prime: int) -> int:
    return math.ceil(n / (16 * n_prime))


def enhancement_bound(n: int, n_prime: int) -> float:
    """``(N/N')^2 2^-k`` at the animal threshold ``k``."""
    return (n / n_prime) ** 2 * 2.0 ** (-animal_threshold(n, n_prime))


class AnimalExperiment(BaseExperiment):
    kind = ExperimentKind.ANIMAL
    title = "open lattice animals on the coarse grid"

    def sample(self, task: Task) -> List[ExperimentRecord]:
        n, n_prime = task.N, self.run_config.N_prime
        grid = coarse_grid(n, n_prime)
        field = self.field(task, box(n + 2 * n_prime + 2))
        flags, tie = [], False
        for tile in grid.tiles:
            if self.run_config.diagnostic is Diagnostic.FULL:
                flags.append(True)
                continue
            lg = self.label_grid(field, scaled_box(tile, COMPANION_FACTOR))
            tie = tie or lg.tie
            flags.append(bool(self.members(lg).members & tile.sites()))
        grid = grid.with_open(flags)
        animal = max_open_animal(grid)
        threshold = animal_threshold(n, n_prime)

        record_flags = {"large_animal": animal >= threshold}
        if grid.k >= PAIR_MIN_TILES:
            record_flags["pair_a"] = bool(grid.open[0, 0])
            record_flags["pair_b"] = bool(grid.open[0, grid.k - 1])
        return [
            self.record(
                task,
                scalars={"animal": animal, "open_count": grid.open_count(), "threshold": threshold},
                flags=record_flags,
                tie=tie,
            )
        ]

    def summarize(self, records: Sequence[ExperimentRecord]) -> RunSummary:
        n_prime = self.run_config.N_prime
        groups = []
        independent = True
        for (eps, n), rs in self.groups(records).items():
            g = self.group_summary(n, eps, rs)
            for rec in rs:
                key = f"animal={int(rec.scalars['animal'])}"
                g.counts[key] = g.counts.get(key, 0) + 1
            g.counts = dict(sorted(g.counts.items(), key=lambda kv: int(kv[0].split("=")[1])))
            g.probabilities["large_animal"] = wald(sum(1 for rec in rs if rec.flags["large_animal"]), len(rs))
            g.means["animal"] = mean([rec.scalars["animal"] for rec in rs])
            g.means["open_fraction"] = mean(
                [rec.scalars["open_count"] / (n // n_prime) ** 2 for rec in rs]
            )
            g.values["threshold"] = float(animal_threshold(n, n_prime))
            g.values["enhancement_bound"] = enhancement_bound(n, n_prime)
            if rs and "pair_a" in rs[0].flags:
                r, se = correlation(
                    [float(rec.flags["pair_a"]) for rec in rs], [float(rec.flags["pair_b"]) for rec in rs]
                )
                g.values["pair_correlation"] = r
                g.values["pair_correlation_se"] = se
                if r is not None and self.enforcing:
                    independent = independent and abs(r) <= 3 * se
            groups.append(g)
        return self.summary(groups, checks={"pair_independent": independent})
