"""
Experiment registry for the laboratory
"""

from typing import Dict, List, Optional, Type

from rfimlab.experiments.animal_experiment import AnimalExperiment
from rfimlab.experiments.annulus_experiment import AnnulusExperiment
from rfimlab.experiments.crossing_experiment import CrossingExperiment
from rfimlab.experiments.geodesic_experiment import GeodesicExperiment
from rfimlab.experiments.importance_experiment import ImportanceExperiment
from rfimlab.experiments.mn_experiment import MNExperiment
from rfimlab.experiments.perturbation_experiment import PerturbationExperiment
from rfimlab.experiments.star_experiment import StarExperiment
from rfimlab.models import ExperimentKind, RunConfig
from rfimlab.solvers.maxflow import DinicSolver
from rfimlab.utils import BaseExperiment

EXPERIMENTS: Dict[ExperimentKind, Type[BaseExperiment]] = {
    cls.kind: cls
    for cls in (
        MNExperiment,
        GeodesicExperiment,
        CrossingExperiment,
        PerturbationExperiment,
        StarExperiment,
        AnnulusExperiment,
        AnimalExperiment,
        ImportanceExperiment,
    )
}


def get_experiment(run: RunConfig, solver: Optional[DinicSolver] = None) -> BaseExperiment:
    """Instantiate the experiment class registered for ``run.kind``."""
    return EXPERIMENTS[run.kind](run, solver=solver)


def list_experiments() -> List[Dict[str, str]]:
    """List every registered experiment with its title."""
    return [{"kind": kind.value, "title": cls.title} for kind, cls in EXPERIMENTS.items()]
