import math
import pickle

import numpy as np
import pytest
from scipy.special import erf

from rfimlab.exceptions import InvariantViolation
from rfimlab.experiments import crossing_experiment
from rfimlab.experiments.animal_experiment import animal_threshold, enhancement_bound
from rfimlab.experiments.perturbation_experiment import OUTCOMES, outcome
from rfimlab.experiments.star_experiment import unanchored_count
from rfimlab.models import Diagnostic, ExperimentKind, RunConfig
from rfimlab.physics.disagreement import DisagreementSet
from rfimlab.physics.disorder import region_sum, sample_field
from rfimlab.physics.lattice import box
from rfimlab.utils import BaseExperiment, Task
from rfimlab.utils.registry import get_experiment, list_experiments


def experiment(kind, **params):
    params.setdefault("master_seed", 20190615)
    params.setdefault("workers", 1)
    return get_experiment(RunConfig(kind=kind, **params))


def test_registry_lists_every_kind():
    kinds = [item["kind"] for item in list_experiments()]
    assert kinds == [k.value for k in ExperimentKind]
    assert all(item["title"] for item in list_experiments())


def test_experiments_must_implement_sample_and_summarize():
    run = RunConfig(kind=ExperimentKind.MN, N=[0], epsilon=[1.0], samples=100)
    with pytest.raises(TypeError):
        BaseExperiment(run)

    class SampleOnly(BaseExperiment):
        kind = ExperimentKind.MN

        def sample(self, task):
            return []

    with pytest.raises(TypeError):
        SampleOnly(run)
    assert get_experiment(run).run_config is run


def test_origin_probability_is_nonincreasing_in_n():
    exp = experiment(ExperimentKind.MN, N=[0, 1, 2], epsilon=[1.0], samples=100)
    records = exp.sample(Task(1.0, 2, 0))
    assert [r.N for r in records] == [0, 1, 2]
    summary = exp.run()
    hits = [summary.group(n, 1.0).probabilities["origin_zero"].value for n in (0, 1, 2)]
    assert hits[0] >= hits[1] >= hits[2]
    assert "1" in summary.decay


def test_single_site_matches_closed_form():
    summary = experiment(ExperimentKind.MN, N=[0], epsilon=[4.0], samples=2000).run()
    est = summary.group(0, 4.0).probabilities["origin_zero"]
    target = float(erf(1.0 / math.sqrt(2.0)))
    assert abs(est.value - target) <= 4 * est.stderr
    assert summary.checks == {}


def test_geodesic_through_full_box():
    exp = experiment(
        ExperimentKind.GEODESIC, N=[16, 32], epsilon=[1.0], samples=1, diagnostic=Diagnostic.FULL
    )
    summary = exp.run()
    assert summary.group(16, 1.0).values["min_distance"] == 4.0
    assert summary.group(32, 1.0).values["min_distance"] == 8.0
    assert summary.exponent["1"].alpha_hat == pytest.approx(1.0)
    assert summary.checks["geodesic_bound"]


def test_full_set_crosses_everything():
    summary = experiment(
        ExperimentKind.CROSSING, N=[32], epsilon=[1.0], samples=1, diagnostic=Diagnostic.FULL
    ).run()
    g = summary.group(32, 1.0)
    for name in ("hard", "easy", "rect_long_x", "rect_long_y"):
        assert g.probabilities[name].value == 1.0


def test_strong_disorder_rarely_crosses():
    summary = experiment(ExperimentKind.CROSSING, N=[32], epsilon=[100.0], samples=5).run()
    g = summary.group(32, 100.0)
    assert g.probabilities["hard"].value == 0.0
    assert g.probabilities["easy"].value <= 0.2


def test_crossing_rejects_an_inconsistent_dual_pair(monkeypatch):
    monkeypatch.setattr(crossing_experiment, "dual_consistent", lambda ann, c: False)
    exp = experiment(ExperimentKind.CROSSING, N=[32], epsilon=[1.0], samples=1)
    with pytest.raises(InvariantViolation) as err:
        exp.sample(Task(1.0, 32, 0))
    assert err.value.check == "duality"
    assert err.value.details["N"] == 32


def test_outcome_mapping():
    assert outcome(False, False) == "neither"
    assert outcome(True, False) == "only_a"
    assert outcome(False, True) == "only_b"
    assert outcome(True, True) == "both"
    assert len(OUTCOMES) == 4


def test_perturbation_never_meets_both_conditions():
    summary = experiment(ExperimentKind.PERTURB, N=[8], epsilon=[1.0], samples=4).run()
    g = summary.group(8, 1.0)
    assert sum(g.counts.values()) == 4
    assert g.counts["both"] == 0
    assert g.values["K"] == 2.0 and g.values["delta"] == 12.5
    assert summary.checks["exclusion"]


def test_star_sets_reach_the_boundary():
    summary = experiment(ExperimentKind.STAR, N=[4], epsilon=[1.0], samples=4).run()
    assert summary.checks["anchored"]
    assert summary.group(4, 1.0).counts["violations"] == 0


def test_unanchored_count():
    region = box(2)
    center = np.zeros((5, 5), dtype=bool)
    center[2, 2] = True
    assert unanchored_count(DisagreementSet.of(region, center), region.ring()) == 1
    assert unanchored_count(DisagreementSet.of(region, np.ones((5, 5), dtype=bool)), region.ring()) == 0
    assert unanchored_count(DisagreementSet.of(region, np.zeros((5, 5), dtype=bool)), region.ring()) == 0


def test_annulus_without_shift_reduces_to_origin_event():
    exp = experiment(
        ExperimentKind.ANNULUS, N=[32], epsilon=[1.0], samples=2, diagnostic=Diagnostic.NO_SHIFT
    )
    for index in range(2):
        rec = exp.sample(Task(1.0, 32, index))[0]
        assert rec.flags["origin_in_cstar"] == rec.flags["origin_zero"]


def test_full_grid_is_one_animal():
    summary = experiment(
        ExperimentKind.ANIMAL, N=[4], epsilon=[1.0], samples=1, N_prime=1, diagnostic=Diagnostic.FULL
    ).run()
    g = summary.group(4, 1.0)
    assert g.means["animal"].value == 16
    assert g.counts == {"animal=16": 1}


def test_animal_threshold_and_bound():
    assert animal_threshold(64, 1) == 4
    assert animal_threshold(8, 1) == 1
    assert enhancement_bound(64, 1) == 256.0


def test_tiny_shift_leaves_the_estimates_unchanged():
    summary = experiment(ExperimentKind.ISCHECK, N=[8], epsilon=[1.0], samples=20, delta=1e-9).run()
    g = summary.group(8, 1.0)
    assert abs(g.means["origin_difference"].value) < 1e-6
    assert g.means["weight"].value == pytest.approx(1.0, abs=1e-6)
    assert g.values["delta"] == 1e-9


def test_full_box_shift_reweights_over_every_site():
    full = experiment(ExperimentKind.ISCHECK, N=[8], epsilon=[1.0], samples=10, delta=0.25, shift_region="full")
    quarter = experiment(ExperimentKind.ISCHECK, N=[8], epsilon=[1.0], samples=10, delta=0.25)
    rec = full.sample(Task(1.0, 8, 0))[0]
    field = sample_field(box(8), 1.0, 20190615, 0)
    expected = math.exp(-0.25 * region_sum(field, box(8)) - 0.25**2 * box(8).size / 2)
    assert rec.scalars["weight"] == pytest.approx(expected, rel=1e-9)
    assert rec.scalars["weight"] != quarter.sample(Task(1.0, 8, 0))[0].scalars["weight"]

    g = full.run().group(8, 1.0)
    assert g.samples == 10
    assert g.values["delta"] == 0.25
    assert g.means["weight"].value > 0.0


def test_summary_does_not_depend_on_worker_count():
    dumps = [
        experiment(ExperimentKind.MN, N=[0, 2], epsilon=[1.0], samples=100, workers=w).run().model_dump_json()
        for w in (1, 8)
    ]
    assert dumps[0] == dumps[1]


def test_invariant_violation_survives_pickling():
    err = InvariantViolation("domain-monotone", "not nested", sites=3)
    back = pickle.loads(pickle.dumps(err))
    assert back.check == "domain-monotone"
    assert back.details == {"sites": 3}
    assert str(back) == str(err)
