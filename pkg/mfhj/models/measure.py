"""
Symmetric, compactly supported single-spin measures.

Every measure is stored as a finite set of nodes with positive weights: the
atoms of a discrete measure, or the Gauss-Legendre nodes of a tabulated
density on [-L/2, L/2]. Tilted expectations are then log-sum-exp reductions,
which keeps all exponents non-positive for any tilt.
"""
import math
from collections.abc import Callable, Sequence
from enum import Enum
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr
from scipy.special import logsumexp

from mfhj.config import QUADRATURE_NODES, SYMMETRY_TOL
from mfhj.exceptions import DomainError
from mfhj.schemas import (
    AtomsMeasureSpec,
    DensityMeasureSpec,
    EquallySpacedMeasureSpec,
    SimpleMeasureSpec,
    TiltedState,
)


class MeasureKind(str, Enum):
    DISCRETE = "discrete"
    TABULATED = "tabulated"


class SpinMeasure(BaseModel):
    """
    Immutable symmetric probability measure on [-L/2, L/2].

    Build instances through the module's builders; they enforce symmetry,
    normalization and the support bound.
    """
    kind: MeasureKind = Field(..., description="Discrete atoms or tabulated density")
    support_half_width: float = Field(..., ge=0, description="L/2")
    values: tuple[float, ...] = Field(..., description="Atoms or quadrature nodes")
    weights: tuple[float, ...] = Field(..., description="Normalized positive weights")
    label: str = Field("custom", description="Human-readable name")
    quadrature_nodes: int | None = Field(None, description="Gauss-Legendre nodes for densities")

    model_config = ConfigDict(frozen=True)

    _values: np.ndarray = PrivateAttr()
    _log_weights: np.ndarray = PrivateAttr()

    def model_post_init(self, __context) -> None:
        self._values = np.asarray(self.values, dtype=float)
        self._log_weights = np.log(np.asarray(self.weights, dtype=float))

    @property
    def atom_count(self) -> int:
        return len(self.values)

    @property
    def is_discrete(self) -> bool:
        return self.kind is MeasureKind.DISCRETE

    @property
    def support_width(self) -> float:
        """The full width L."""
        return 2.0 * self.support_half_width

    def _log_terms(self, x: np.ndarray) -> np.ndarray:
        return self._log_weights + x[..., None] * self._values

    def log_mgf(self, x):
        """Lambda(x) = log E[exp(x sigma)], scalar or array."""
        arr = _finite_array(x)
        result = logsumexp(self._log_terms(arr), axis=-1)
        return float(result) if np.ndim(x) == 0 else result

    def tilted_mean(self, tilt):
        """Lambda'(tilt), scalar or array."""
        mean, _ = self._moments(_finite_array(tilt))
        return float(mean) if np.ndim(tilt) == 0 else mean

    def tilted_variance(self, tilt):
        """Lambda''(tilt), scalar or array."""
        _, variance = self._moments(_finite_array(tilt))
        return float(variance) if np.ndim(tilt) == 0 else variance

    def _moments(self, tilt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        terms = self._log_terms(tilt)
        probabilities = np.exp(terms - logsumexp(terms, axis=-1, keepdims=True))
        mean = probabilities @ self._values
        centered = self._values - mean[..., None]
        variance = np.einsum("...k,...k->...", probabilities, centered * centered)

        # Near zero tilt the mean is a difference of nearly equal terms; the
        # symmetric form sum w v sinh(xv) / sum w cosh(xv) has no cancellation.
        small = np.abs(tilt) * self.support_half_width <= 1.0
        if np.any(small):
            weights = np.exp(self._log_weights)
            arg = np.where(small, tilt, 0.0)[..., None] * self._values
            cosh = np.cosh(arg)
            den = cosh @ weights
            near_mean = (np.sinh(arg) * self._values) @ weights / den
            second = (cosh * self._values ** 2) @ weights / den
            mean = np.where(small, near_mean, mean)
            variance = np.where(small, second - near_mean ** 2, variance)
        return mean, np.maximum(variance, 0.0)

    def tilted(self, tilt: float) -> TiltedState:
        mean, variance = self._moments(_finite_array(tilt))
        return TiltedState(tilt=float(tilt), mean=float(mean), variance=float(variance),
                           log_mgf=self.log_mgf(tilt))

    @property
    def variance(self) -> float:
        return self.tilted_variance(0.0)


def _finite_array(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("tilt must be finite", value=str(x))
    return arr


def log_mgf(measure: SpinMeasure, x: float) -> float:
    return measure.log_mgf(x)


def tilted(measure: SpinMeasure, tilt: float) -> TiltedState:
    return measure.tilted(tilt)


def variance(measure: SpinMeasure) -> float:
    return measure.variance


def counting_offset(measure: SpinMeasure) -> float:
    """
    log K for a K-atom measure: the constant separating a normalized expectation
    from the unnormalized sum over spin values. Zero for densities.
    """
    return math.log(measure.atom_count) if measure.is_discrete else 0.0


# Builders

def _merge_atoms(values: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(values, kind="stable")
    values, weights = values[order], weights[order]
    merged_v: list[float] = []
    merged_w: list[float] = []
    for v, w in zip(values, weights):
        if merged_v and abs(v - merged_v[-1]) <= SYMMETRY_TOL:
            merged_w[-1] += w
        else:
            merged_v.append(float(v))
            merged_w.append(float(w))
    return np.array(merged_v), np.array(merged_w)


def _is_symmetric(values: np.ndarray, weights: np.ndarray) -> bool:
    return (np.allclose(values, -values[::-1], rtol=0, atol=SYMMETRY_TOL)
            and np.allclose(weights, weights[::-1], rtol=0, atol=SYMMETRY_TOL))


def _mirror(values: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return (np.concatenate([values, -values]),
            np.concatenate([weights, weights]) / 2.0)


def custom_atoms(atoms: Sequence[tuple[float, float]], *, half_width: float | None = None,
                 symmetrize: bool = False, label: str = "atoms") -> SpinMeasure:
    """
    Discrete measure from (value, weight) pairs. Weights are normalized; an
    asymmetric input is rejected unless ``symmetrize`` averages it with its mirror.
    """
    if not atoms:
        raise DomainError("at least one atom is required")
    values = np.array([float(v) for v, _ in atoms])
    weights = np.array([float(w) for _, w in atoms])
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(weights))):
        raise DomainError("atoms must be finite")
    if np.any(weights < 0):
        raise DomainError("atom weights must be nonnegative", weights=weights.tolist())
    total = weights.sum()
    if total <= 0:
        raise DomainError("atom weights must not all vanish")
    keep = weights > 0
    values, weights = values[keep], weights[keep] / total

    bound = float(np.max(np.abs(values))) if half_width is None else float(half_width)
    if bound < 0 or np.any(np.abs(values) > bound + SYMMETRY_TOL):
        raise DomainError("atoms outside the declared support",
                          half_width=bound, values=values.tolist())

    if symmetrize:
        values, weights = _mirror(values, weights)
    values, weights = _merge_atoms(values, weights)
    if not _is_symmetric(values, weights):
        raise DomainError("measure is not symmetric; pass symmetrize to average it with its mirror",
                          values=values.tolist(), weights=weights.tolist())
    # Pair up mirrored atoms exactly so that odd moments vanish to rounding.
    values = (values - values[::-1]) / 2.0
    weights = (weights + weights[::-1]) / 2.0
    weights = weights / weights.sum()
    return SpinMeasure(kind=MeasureKind.DISCRETE, support_half_width=bound,
                       values=tuple(values.tolist()), weights=tuple(weights.tolist()),
                       label=label)


def dichotomic() -> SpinMeasure:
    """sigma = +-1 with probability 1/2 each."""
    return custom_atoms([(-1.0, 0.5), (1.0, 0.5)], label="dichotomic")


def equally_spaced_atoms(k: int, L: float) -> SpinMeasure:
    """k equally weighted atoms spread evenly over [-L/2, L/2]."""
    if k < 2:
        raise DomainError("equally spaced measures need k >= 2", k=k)
    if not L > 0:
        raise DomainError("support width must be positive", L=L)
    values = np.linspace(-L / 2.0, L / 2.0, k)
    return custom_atoms([(v, 1.0 / k) for v in values], half_width=L / 2.0,
                        label=f"equally_spaced_{k}")


@lru_cache(maxsize=16)
def gauss_legendre(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    return leggauss(nodes)


def custom_density(density: Sequence[tuple[float, float]] | Callable[[np.ndarray], np.ndarray], *,
                   half_width: float | None = None, nodes: int = QUADRATURE_NODES,
                   symmetrize: bool = False, label: str = "density") -> SpinMeasure:
    """
    Measure with a density on [-L/2, L/2], integrated by Gauss-Legendre quadrature.

    ``density`` is either a table of (sigma, value) samples, linearly
    interpolated and zero outside the table, or a vectorized callable.
    """
    if nodes < 2:
        raise DomainError("quadrature needs at least two nodes", nodes=nodes)

    if callable(density):
        if half_width is None or not half_width > 0:
            raise DomainError("a callable density needs a positive half_width")
        func = density
        samples = None
    else:
        table = np.asarray(density, dtype=float)
        if table.ndim != 2 or table.shape[1] != 2 or len(table) < 2:
            raise DomainError("density table must be a list of (sigma, value) pairs")
        xs, ds = table[:, 0], table[:, 1]
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ds))):
            raise DomainError("density table must be finite")
        if np.any(np.diff(xs) <= 0):
            raise DomainError("density table abscissae must be strictly increasing")
        if np.any(ds < 0):
            raise DomainError("density must be nonnegative")
        if half_width is None:
            half_width = float(np.max(np.abs(xs[ds > 0]))) if np.any(ds > 0) else 0.0
        if np.any((np.abs(xs) > half_width + SYMMETRY_TOL) & (ds > 0)):
            raise DomainError("density is nonzero outside the declared support",
                              half_width=half_width)

        def func(s: np.ndarray) -> np.ndarray:
            return np.interp(s, xs, ds, left=0.0, right=0.0)

        samples = xs
    if not half_width > 0:
        raise DomainError("density support must have positive width")

    if not symmetrize:
        sample_points = samples if samples is not None else gauss_legendre(nodes)[0] * half_width
        direct, mirrored = func(sample_points), func(-sample_points)
        scale = max(1.0, float(np.max(np.abs(direct))))
        if np.max(np.abs(direct - mirrored)) > SYMMETRY_TOL * scale:
            raise DomainError("density is not symmetric; pass symmetrize to average it with its mirror")

    x, w = gauss_legendre(nodes)
    points = x * half_width
    values = np.asarray(func(points), dtype=float)
    if symmetrize:
        values = (values + values[::-1]) / 2.0
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        raise DomainError("density must be finite and nonnegative at the quadrature nodes")
    weights = w * half_width * values
    total = weights.sum()
    if total <= 0:
        raise DomainError("density integrates to zero")
    keep = weights > 0
    points, weights = points[keep], weights[keep] / total
    return SpinMeasure(kind=MeasureKind.TABULATED, support_half_width=float(half_width),
                       values=tuple(points.tolist()), weights=tuple(weights.tolist()),
                       label=label, quadrature_nodes=nodes)


def uniform(L: float, nodes: int = QUADRATURE_NODES) -> SpinMeasure:
    """Uniform density 1/L on [-L/2, L/2]."""
    if not L > 0:
        raise DomainError("support width must be positive", L=L)
    return custom_density(lambda s: np.full_like(s, 1.0 / L), half_width=L / 2.0,
                          nodes=nodes, label=f"uniform_{L:g}")


def measure_from_config(spec: SimpleMeasureSpec | AtomsMeasureSpec | EquallySpacedMeasureSpec
                        | DensityMeasureSpec, *, symmetrize: bool = False) -> SpinMeasure:
    """Builds the measure described by a run-config ``measure`` block."""
    match spec:
        case SimpleMeasureSpec(type="dichotomic"):
            return dichotomic()
        case SimpleMeasureSpec(type="uniform", L=L):
            return uniform(L)
        case EquallySpacedMeasureSpec(k=k, L=L):
            return equally_spaced_atoms(k, L)
        case AtomsMeasureSpec(atoms=atoms, L=L):
            return custom_atoms(atoms, half_width=None if L is None else L / 2.0,
                                symmetrize=symmetrize)
        case DensityMeasureSpec(L=L, table=table, quadrature_nodes=nodes):
            return custom_density(table, half_width=L / 2.0, symmetrize=symmetrize,
                                  nodes=nodes or QUADRATURE_NODES)
    raise DomainError("unknown measure type", spec=str(spec))
