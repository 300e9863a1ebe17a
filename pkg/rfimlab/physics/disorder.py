"""
Quenched Gaussian disorder.

Values are produced by a counter-based keyed generator: the standard normal at
vertex ``v`` of replica ``sample_index`` depends only on
``(master_seed, sample_index, v)``, never on the region being sampled. The
same disorder can therefore be viewed through nested or shifted windows and
replicas can be generated in any order by any number of workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from rfimlab.config import config
from rfimlab.exceptions import ParameterError, PreconditionError, RegionMismatchError
from rfimlab.physics.lattice import AnnulusRegion, BoxRegion, Region, SiteLike, Window, as_sites

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_LOW32 = np.uint64(0xFFFFFFFF)
_TWO_POW_M53 = 2.0**-53

BASE_STREAM = 0
SHIFT_STREAM = 1


def _mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer on a uint64 array (wrapping arithmetic)."""
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _key(master_seed: int, sample_index: int, stream: int) -> np.ndarray:
    k = _mix64(np.array([(master_seed + _GOLDEN * (stream + 1)) & _MASK64], dtype=np.uint64))
    return _mix64(k ^ np.array([sample_index & _MASK64], dtype=np.uint64))


def keyed_bits(
    master_seed: int, sample_index: int, xs: np.ndarray, ys: np.ndarray, word: int, stream: int = BASE_STREAM
) -> np.ndarray:
    """64 random bits per coordinate pair, keyed by seed, replica, stream and word."""
    ux = np.asarray(xs, dtype=np.int64).astype(np.uint64) & _LOW32
    uy = np.asarray(ys, dtype=np.int64).astype(np.uint64) & _LOW32
    counter = (ux << np.uint64(32)) | uy
    key = _key(master_seed, sample_index, stream)
    offset = np.array([(_GOLDEN * (word + 1)) & _MASK64], dtype=np.uint64)
    return _mix64(_mix64(counter ^ key) + offset)


def keyed_uniform(
    master_seed: int, sample_index: int, xs: np.ndarray, ys: np.ndarray, word: int = 0, stream: int = BASE_STREAM
) -> np.ndarray:
    """Uniforms on (0, 1] with 53 bits of resolution."""
    bits = keyed_bits(master_seed, sample_index, xs, ys, word, stream)
    return ((bits >> np.uint64(11)).astype(np.float64) + 1.0) * _TWO_POW_M53


def base_gaussian(master_seed: int, sample_index: int, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Standard normals by Box-Muller from two keyed uniforms; the second normal is discarded."""
    u1 = keyed_uniform(master_seed, sample_index, xs, ys, word=0)
    u2 = keyed_uniform(master_seed, sample_index, xs, ys, word=1)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


@dataclass(frozen=True, eq=False)
class FieldSample:
    """
    One realization of the field over a region.

    Attributes:
        region (Region): Vertices carrying values.
        epsilon (float): Standard deviation of each h_v.
        master_seed (int): Run seed.
        sample_index (int): Monte Carlo replica number.
        base (np.ndarray): Keyed standard normals over ``region.window`` (0 off-region).
        shift (np.ndarray): Nonnegative additive shifts over ``region.window``.
    """

    region: Region
    epsilon: float
    master_seed: int
    sample_index: int
    base: np.ndarray
    shift: np.ndarray

    @classmethod
    def from_values(cls, region: Region, values: np.ndarray, epsilon: float = 1.0) -> "FieldSample":
        """Wrap explicit field values laid out on ``region.window`` (hand-built instances)."""
        values = np.asarray(values, dtype=np.float64)
        if values.shape != region.window.shape:
            raise RegionMismatchError(
                f"values of shape {values.shape} do not match window shape {region.window.shape}"
            )
        return cls(
            region=region,
            epsilon=float(epsilon),
            master_seed=0,
            sample_index=0,
            base=np.where(region.mask(), values / epsilon, 0.0),
            shift=np.zeros(region.window.shape, dtype=np.float64),
        )

    @property
    def window(self) -> Window:
        return self.region.window

    @property
    def mask(self) -> np.ndarray:
        return self.region.mask()

    @property
    def values(self) -> np.ndarray:
        return np.where(self.mask, self.base * self.epsilon + self.shift, 0.0)

    def value(self, v) -> float:
        if not self.region.contains(v):
            raise RegionMismatchError(f"vertex {tuple(v)} outside the sampled region")
        idx = self.window.index(v)
        return float(self.base[idx] * self.epsilon + self.shift[idx])

    def quantized(self, scale: int) -> np.ndarray:
        """Fixed-point values ``rint(eps*z*scale) + rint(shift*scale)`` (round half even)."""
        q = np.rint(self.base * self.epsilon * scale) + np.rint(self.shift * scale)
        return np.where(self.mask, q, 0.0).astype(np.int64)

    def covers(self, sub: SiteLike) -> bool:
        sites = as_sites(sub)
        return sites.issubset(self.region.sites())

    def restrict(self, sub: Region) -> "FieldSample":
        """The same disorder seen on a sub-region (arrays are sliced, not regenerated)."""
        if not self.covers(sub):
            raise RegionMismatchError("sub-region is not contained in the sampled region")
        sl = self.window.slices_of(sub.window)
        return replace(self, region=sub, base=self.base[sl].copy(), shift=self.shift[sl].copy())

    def with_shift(self, extra: np.ndarray) -> "FieldSample":
        return replace(self, shift=self.shift + extra)

    def dump(self) -> str:
        """Text records ``x y value``, one per vertex, row-major."""
        vals = self.values
        lines = []
        for v in self.region.vertices():
            lines.append(f"{v.x} {v.y} {float(vals[self.window.index(v)])!r}")
        return "\n".join(lines) + "\n"


def sample_field(region: Region, epsilon: float, master_seed: int, sample_index: int) -> FieldSample:
    """Draw the keyed Gaussian field on ``region``."""
    if not epsilon > 0:
        raise PreconditionError(f"epsilon must be positive, got {epsilon}")
    xs, ys = region.window.coordinates()
    base = np.where(region.mask(), base_gaussian(master_seed, sample_index, xs, ys), 0.0)
    return FieldSample(
        region=region,
        epsilon=float(epsilon),
        master_seed=int(master_seed),
        sample_index=int(sample_index),
        base=base,
        shift=np.zeros(region.window.shape, dtype=np.float64),
    )


class GlobalShift(BaseModel):
    """Raise every value of the region by ``delta``."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["global"] = "global"
    delta: float = Field(gt=0)


class AnnulusShift(BaseModel):
    """Raise values inside ``annulus`` by ``delta``; leave the rest untouched."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["annulus"] = "annulus"
    delta: float = Field(gt=0)
    annulus: AnnulusRegion


class BoxShift(BaseModel):
    """Raise values inside ``box`` by ``delta``; leave the rest untouched."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["box"] = "box"
    delta: float = Field(gt=0)
    box: BoxRegion


class RandomShift(BaseModel):
    """Keyed nonnegative shifts ``x_v`` uniform on ``[0, amplitude)``."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["random"] = "random"
    amplitude: float = Field(gt=0)
    stream: int = SHIFT_STREAM


PerturbationSpec = Annotated[
    Union[GlobalShift, AnnulusShift, BoxShift, RandomShift], Field(discriminator="kind")
]


def shift_array(field: FieldSample, spec: PerturbationSpec) -> np.ndarray:
    mask = field.mask
    if isinstance(spec, GlobalShift):
        return np.where(mask, spec.delta, 0.0)
    if isinstance(spec, (AnnulusShift, BoxShift)):
        support = (spec.annulus if isinstance(spec, AnnulusShift) else spec.box).sites()
        if not support.issubset(field.region.sites()):
            raise RegionMismatchError("support of the perturbation is not inside the field region")
        return np.where(support.reframe(field.window).mask & mask, spec.delta, 0.0)
    xs, ys = field.window.coordinates()
    u = keyed_uniform(field.master_seed, field.sample_index, xs, ys, stream=spec.stream)
    # (0, 1] -> [0, 1)
    return np.where(mask, spec.amplitude * (1.0 - u), 0.0)


def perturb(field: FieldSample, spec: PerturbationSpec) -> FieldSample:
    """Add the shift described by ``spec``; base Gaussian values are untouched."""
    return field.with_shift(shift_array(field, spec))


def unperturb(field: FieldSample, spec: PerturbationSpec) -> FieldSample:
    """Exact inverse of :func:`perturb` for the same ``spec``."""
    return field.with_shift(-shift_array(field, spec))


def region_sum(field: FieldSample, subregion: SiteLike) -> float:
    """Compensated sum ``h_A`` of the field over ``subregion``."""
    sites = as_sites(subregion)
    if not sites:
        return 0.0
    if not field.covers(sites):
        raise RegionMismatchError("summation region is not contained in the sampled region")
    vals = field.values
    picked = sites.reframe(field.window).mask
    return math.fsum(vals[picked].tolist())


def rn_derivative(field_tilde: FieldSample, delta: float, region: SiteLike, epsilon: float) -> float:
    """
    Density dP/dP~ of the unshifted law against the law shifted up by ``delta``.

    Evaluated at the shifted sample ``field_tilde`` over ``region``, in log space.
    """
    if not delta > 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    sites = as_sites(region)
    n = len(sites)
    h_tilde = region_sum(field_tilde, sites)
    eps2 = epsilon * epsilon
    log_w = -delta * (h_tilde - delta * n) / eps2 - delta * delta * n / (2.0 * eps2)
    return math.exp(log_w)


class PerturbationParams(BaseModel):
    """
    Scale parameters of a perturbation experiment.

    Attributes:
        gamma (float): Constant in ``delta = gamma / N`` for box-scale runs.
        K (float): Distance threshold of condition (a).
        delta (float): Size of the global shift.
        alpha (float): Geodesic length exponent assumed by geodesic-scale runs.
        alpha_prime (float): Exponent in ``(sqrt(1/alpha), 1)``.
    """

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(default=config.gamma, gt=0)
    K: float = Field(gt=0)
    delta: float = Field(gt=0)
    alpha: float = Field(default=config.alpha, gt=1)
    alpha_prime: float = config.alpha_prime

    @model_validator(mode="after")
    def _check_alpha_prime(self) -> "PerturbationParams":
        low = math.sqrt(1.0 / self.alpha)
        if not low < self.alpha_prime < 1:
            raise ParameterError(f"alpha_prime must lie in ({low:.6f}, 1), got {self.alpha_prime}")
        return self

    @classmethod
    def box_scale(cls, n: int, gamma: float = config.gamma, **kwargs) -> "PerturbationParams":
        """K = N/4 and delta = gamma/N."""
        return cls(gamma=gamma, K=n / 4.0, delta=gamma / n, **kwargs)

    @classmethod
    def geodesic_scale(
        cls, n_star: int, alpha: float = config.alpha, alpha_prime: float = config.alpha_prime
    ) -> "PerturbationParams":
        """K = (N*)^(alpha alpha') and delta = (N*)^(-alpha alpha'^2)."""
        return cls(
            K=n_star ** (alpha * alpha_prime),
            delta=n_star ** (-alpha * alpha_prime**2),
            alpha=alpha,
            alpha_prime=alpha_prime,
        )


def annulus_delta(n: int, alpha: float, alpha_prime: float) -> float:
    """Shift ``(N/16)^(-alpha alpha'^2)`` applied on the annulus of the m* experiment."""
    return (n / 16.0) ** (-alpha * alpha_prime**2)
