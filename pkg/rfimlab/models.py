import json
from enum import Enum
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from rfimlab.config import config, validate_epsilon, validate_power_of_two, validate_samples
from rfimlab.exceptions import ParameterError, RecordIOError
from rfimlab.physics.lattice import SCALE_FACTORS


class Boundary(str, Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> int:
        return 1 if self is Boundary.PLUS else -1


class Extremality(str, Enum):
    MINIMAL_PLUS = "minimal_plus"
    MAXIMAL_PLUS = "maximal_plus"

    @classmethod
    def for_boundary(cls, boundary: Boundary) -> "Extremality":
        return cls.MAXIMAL_PLUS if boundary is Boundary.PLUS else cls.MINIMAL_PLUS


class Label(str, Enum):
    PLUS = "plus"
    MINUS = "minus"
    ZERO = "zero"

    @property
    def code(self) -> int:
        return {"plus": 1, "minus": -1, "zero": 0}[self.value]

    @property
    def glyph(self) -> str:
        return {"plus": "+", "minus": "-", "zero": "0"}[self.value]


class ExperimentKind(str, Enum):
    MN = "mn"
    GEODESIC = "geodesic"
    CROSSING = "crossing"
    PERTURB = "perturb"
    STAR = "star"
    ANNULUS = "annulus"
    ANIMAL = "animal"
    ISCHECK = "ischeck"


class Diagnostic(str, Enum):
    """Replacement of the disagreement set used to sanity-check estimators."""

    NONE = "none"
    FULL = "full"
    NO_SHIFT = "no_shift"


class PerturbationMode(str, Enum):
    BOX_SCALE = "box_scale"
    GEODESIC_SCALE = "geodesic_scale"


class ExperimentRecord(BaseModel):
    """One Monte Carlo observation, persisted as one line."""

    kind: ExperimentKind
    N: int
    epsilon: float
    master_seed: int
    sample_index: int
    scalars: Dict[str, Optional[float]] = Field(default_factory=dict)
    flags: Dict[str, bool] = Field(default_factory=dict)
    tie_flag: bool = False
    wall_time: Optional[float] = None


class Estimate(BaseModel):
    """A point estimate with its standard error and confidence interval."""

    value: Optional[float]
    stderr: Optional[float] = None
    low: Optional[float] = None
    high: Optional[float] = None
    n: int = 0


class DecayFit(BaseModel):
    """
    Exponential-decay fit of the zero-label probability at the origin.

    Attributes:
        estimates (Dict[int, Estimate]): m_N estimate per N.
        rate (Optional[Estimate]): Fitted rate c (log m_N ~ intercept - c N).
        intercept (Optional[float]): Intercept of the weighted fit.
        residuals (Dict[int, float]): Weighted-fit residuals per included N.
        included (List[int]): N values with enough positive counts to enter the fit.
        power (Optional[Estimate]): Exponent p of the power-law fit log m_N ~ b - p log N.
        strictly_decreasing (bool): Whether the estimates decrease strictly in N.
    """

    estimates: Dict[int, Estimate]
    rate: Optional[Estimate] = None
    intercept: Optional[float] = None
    residuals: Dict[int, float] = Field(default_factory=dict)
    included: List[int] = Field(default_factory=list)
    power: Optional[Estimate] = None
    strictly_decreasing: bool = False


class ExponentEstimate(BaseModel):
    """
    Empirical geodesic length exponent.

    Attributes:
        alpha_hat (Optional[float]): Slope of log median(D_N) against log N.
        confidence_low, confidence_high (Optional[float]): Bootstrap interval.
        sample_sizes (Dict[int, int]): Finite samples per N.
        infinite_counts (Dict[int, int]): Samples with no crossing per N.
        quantiles (Dict[int, Dict[str, float]]): Quantiles of D_N per N.
        tail_probabilities (Dict[int, Dict[str, float]]): P(D_N <= N^a) per N and a.
        excluded (List[int]): N values without any finite sample.
    """

    alpha_hat: Optional[float] = None
    confidence_low: Optional[float] = None
    confidence_high: Optional[float] = None
    sample_sizes: Dict[int, int] = Field(default_factory=dict)
    infinite_counts: Dict[int, int] = Field(default_factory=dict)
    quantiles: Dict[int, Dict[str, float]] = Field(default_factory=dict)
    tail_probabilities: Dict[int, Dict[str, float]] = Field(default_factory=dict)
    excluded: List[int] = Field(default_factory=list)


class GroupSummary(BaseModel):
    """Aggregates of the records sharing one ``(N, epsilon)``."""

    N: int
    epsilon: float
    samples: int
    ties: int = 0
    probabilities: Dict[str, Estimate] = Field(default_factory=dict)
    means: Dict[str, Estimate] = Field(default_factory=dict)
    counts: Dict[str, int] = Field(default_factory=dict)
    values: Dict[str, Optional[float]] = Field(default_factory=dict)


class RunSummary(BaseModel):
    kind: ExperimentKind
    parameters: Dict[str, Any]
    groups: List[GroupSummary]
    decay: Dict[str, DecayFit] = Field(default_factory=dict)
    exponent: Dict[str, ExponentEstimate] = Field(default_factory=dict)
    checks: Dict[str, bool] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def group(self, n: int, epsilon: float) -> GroupSummary:
        for g in self.groups:
            if g.N == n and g.epsilon == epsilon:
                return g
        raise KeyError((n, epsilon))


class SuiteResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""


# Minimum N per experiment (0 allowed only for the origin-decay run)
_MIN_N = {
    ExperimentKind.MN: 0,
    ExperimentKind.GEODESIC: 16,
    ExperimentKind.CROSSING: 32,
    ExperimentKind.PERTURB: 8,
    ExperimentKind.STAR: 1,
    ExperimentKind.ANNULUS: 32,
    ExperimentKind.ANIMAL: 1,
    ExperimentKind.ISCHECK: 4,
}


class RunConfig(BaseModel):
    """
    Validated parameters of one experiment run.

    Environment defaults fill ``master_seed``, ``workers`` and ``output_dir``
    when neither the config file nor the command line sets them.
    """

    model_config = ConfigDict(extra="forbid")

    kind: ExperimentKind
    N: List[int] = Field(min_length=1)
    epsilon: List[float] = Field(min_length=1)
    samples: int
    master_seed: int = Field(default_factory=lambda: config.seed, ge=0, lt=2**64)
    workers: int = Field(default_factory=lambda: config.workers, ge=1)
    output_dir: str = Field(default_factory=lambda: config.output_dir)

    gamma: float = Field(default=config.gamma, gt=0)
    alpha: float = Field(default=config.alpha, gt=1)
    alpha_prime: float = config.alpha_prime
    delta: Optional[float] = Field(default=None, gt=0)
    K: Optional[float] = Field(default=None, gt=0)
    mode: PerturbationMode = PerturbationMode.BOX_SCALE

    aspect: int = Field(default=config.aspect, ge=1)
    factor: int = config.factor
    N_prime: Optional[int] = None
    shift_amplitude: float = Field(default=1.0, gt=0)
    shift_region: Literal["quarter", "full"] = "quarter"
    exponent_grid: List[float] = Field(default_factory=lambda: [1.0, 1.25, 1.5, 2.0])
    diagnostic: Diagnostic = Diagnostic.NONE

    @model_validator(mode="after")
    def _check_preconditions(self) -> "RunConfig":
        validate_samples(self.samples, 100 if self.kind is ExperimentKind.MN else 1)
        for eps in self.epsilon:
            validate_epsilon(eps)
        minimum = _MIN_N[self.kind]
        for n in self.N:
            if n == 0 and minimum == 0:
                continue
            validate_power_of_two("N", n, max(minimum, 1))
        if self.factor not in SCALE_FACTORS:
            raise ParameterError(f"factor must be one of {sorted(SCALE_FACTORS)}, got {self.factor}")
        if self.kind is ExperimentKind.ANIMAL:
            if self.N_prime is None:
                raise ParameterError("the animal experiment needs N_prime")
            validate_power_of_two("N_prime", self.N_prime)
            if any(self.N_prime > n for n in self.N):
                raise ParameterError(f"N_prime={self.N_prime} exceeds some N in {self.N}")
        low = (1.0 / self.alpha) ** 0.5
        if not low < self.alpha_prime < 1:
            raise ParameterError(f"alpha_prime must lie in ({low:.6f}, 1), got {self.alpha_prime}")
        return self

    @classmethod
    def load(
        cls, kind: ExperimentKind, path: Optional[str] = None, **overrides: Any
    ) -> "RunConfig":
        """File values first, then every override that is not ``None``."""
        data: Dict[str, Any] = {}
        if path:
            try:
                with open(path, "r", encoding="utf-8") as f:
                    data = json.load(f)
            except OSError as e:
                raise RecordIOError(f"cannot read config file {path}: {e}") from e
            except json.JSONDecodeError as e:
                raise ParameterError(f"config file {path} is not valid JSON: {e}") from e
        data.update({k: v for k, v in overrides.items() if v is not None})
        data["kind"] = kind
        return cls.model_validate(data)

    def fingerprint(self) -> Dict[str, Any]:
        """Parameters that determine the records (worker count and paths excluded)."""
        return self.model_dump(mode="json", exclude={"workers", "output_dir"})
