import math
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class TiltedState(BaseModel):
    """
    Moments of the spin measure tilted by exp(tilt * sigma).
    """
    tilt: float = Field(..., description="Exponent argument x + tM")
    mean: float = Field(..., description="Tilted mean, the derivative of the log-MGF")
    variance: float = Field(..., ge=0, description="Tilted variance, the second derivative of the log-MGF")
    log_mgf: float = Field(..., description="log E[exp(tilt * sigma)]")

    model_config = ConfigDict(frozen=True)


class ModelPoint(BaseModel):
    """
    Mechanical coordinates: x is the external field h, t the inverse temperature beta.
    """
    x: float = Field(..., description="Space coordinate / external field h")
    t: float = Field(..., ge=0, description="Time coordinate / inverse temperature beta")

    model_config = ConfigDict(frozen=True)

    @field_validator("x", "t")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("coordinates must be finite")
        return value

    @property
    def h(self) -> float:
        return self.x

    @property
    def beta(self) -> float:
        return self.t


class SinglePartySolution(BaseModel):
    """
    Thermodynamic-limit solution of the one-party model at a ModelPoint.
    """
    x: float = Field(..., description="Field coordinate")
    t: float = Field(..., description="Time coordinate")
    minimizer_y: float = Field(..., description="Hopf-Lax minimizer, equal to x + t*M")
    action_phi: float = Field(..., description="Mechanical action phi(x, t)")
    pressure_A: float = Field(..., description="Pressure A = -phi")
    magnetization_M: float = Field(..., description="Magnetization on the primary branch")
    free_energy_f: float = Field(..., description="Free energy phi / t")
    branch_count: int = Field(..., ge=1, le=2, description="2 only on the shock line")
    residual: float = Field(..., ge=0, description="|M - tilted_mean(x + tM)|")
    branches: list[float] = Field(default_factory=list,
                                  description="Magnetizations of all global-minimum branches")

    model_config = ConfigDict(frozen=True)


class CriticalReport(BaseModel):
    """
    Critical time of a measure under the characteristic-crossing definition,
    with the quantities it is usually confused with.
    """
    t_c: float = Field(..., gt=0, description="inf over x0 > 0 of x0 / tilted_mean(x0)")
    inverse_variance: float = Field(..., gt=0, description="1 / Lambda''(0)")
    sup_ratio: float = Field(..., ge=0, description="sup over x0 of tilted_mean(x0) / x0 = 1 / t_c")
    support_bound: float = Field(..., ge=0, description="L^2 with L the full support width")
    concave_velocity: bool = Field(..., description="True when t_c equals 1 / Lambda''(0)")


class SweepRow(BaseModel):
    beta: float
    h: float
    M: float
    A: float
    f: float
    branch_count: int
    residual: float


class SweepGrid(BaseModel):
    """
    Rectangular (beta, h) grid with per-point solutions, row-major in beta.
    """
    betas: list[float] = Field(..., min_length=1)
    hs: list[float] = Field(..., min_length=1)
    rows: list[SweepRow] = Field(default_factory=list)

    @model_validator(mode="after")
    def _shape(self) -> "SweepGrid":
        if self.rows and len(self.rows) != len(self.betas) * len(self.hs):
            raise ValueError("rows do not cover the grid")
        return self


class ConvergenceReport(BaseModel):
    """
    Finite-size errors of the Cole-Hopf solutions against the Hopf-Lax limit.
    """
    x: float
    t: float
    n_values: list[int] = Field(..., min_length=4)
    phi_values: list[float]
    u_values: list[float]
    phi_limit: float
    magnetization_limit: float
    errors_phi: list[float]
    errors_u: list[float]
    scaled_errors_phi: list[float] = Field(..., description="N * |phi_N - phi|")
    scaled_errors_u: list[float] = Field(..., description="sqrt(N) * |u_N + M|")
    fitted_slope_phi: float
    fitted_slope_u: float
    lemma1_margins: list[float | None] = Field(
        ..., description="Bound minus |phi_N + A_N|; None when not enumerable")

    @model_validator(mode="after")
    def _equal_lengths(self) -> "ConvergenceReport":
        size = len(self.n_values)
        lists = (self.phi_values, self.u_values, self.errors_phi, self.errors_u,
                 self.scaled_errors_phi, self.scaled_errors_u, self.lemma1_margins)
        if any(len(items) != size for items in lists):
            raise ValueError("report columns must have equal length")
        return self


class Characteristic(BaseModel):
    """Straight characteristic of the inviscid Burgers problem."""
    x0: float = Field(..., description="Foot point")
    slope: float = Field(..., description="Velocity, -tilted_mean(x0)")
    crossing_time: float = Field(..., description="Time the line reaches x = 0, or +inf")


class ShockReport(BaseModel):
    t_c: float
    times: list[float] = Field(default_factory=list, description="Times above t_c")
    m_plus: list[float] = Field(default_factory=list)
    m_minus: list[float] = Field(default_factory=list)
    rh_residuals: list[float] = Field(default_factory=list, description="|M+ + M-|")
    subcritical_times: list[float] = Field(default_factory=list)
    subcritical_m_plus: list[float] = Field(default_factory=list)
    subcritical_m_minus: list[float] = Field(default_factory=list)
    subcritical_jumps: list[float] = Field(default_factory=list, description="M+ - M-, zero below t_c")
    entropy_violations: int = Field(0, ge=0)


class BipartiteSolution(BaseModel):
    beta: float
    alpha: float
    h1: float
    h2: float
    m_tilde: float = Field(..., description="Sigma-party magnetization")
    n_tilde: float = Field(..., description="Tau-party magnetization")
    d: float = Field(..., description="Order parameter m_tilde - alpha * n_tilde")
    pressure_A: float
    free_energy_f: float
    residuals: tuple[float, float]
    branch_count: int = Field(..., ge=1)
    cross_order_gap: float | None = Field(
        None, description="max-min minus min-max value, when the cross order was evaluated")


class BoundaryEquivalenceReport(BaseModel):
    """
    Gap between Cole-Hopf actions built on the finite-size and on the limiting
    bipartite boundary data.
    """
    x: float
    t: float
    n_values: list[int]
    gaps: list[float]
    scaled_gaps: list[float] = Field(..., description="N1 * gap")


class BipartiteSweepRow(BaseModel):
    beta: float
    alpha: float
    m_tilde: float
    n_tilde: float
    d: float
    A: float
    f: float
    branch_count: int


class BipartiteConvergenceRow(BaseModel):
    n1: int
    n2: int
    exact_pressure: float
    limit_pressure: float
    gap: float
    scaled_gap: float


# Run configuration

class AtomsMeasureSpec(BaseModel):
    type: Literal["atoms"]
    atoms: list[tuple[float, float]] = Field(..., min_length=1)
    L: float | None = Field(None, gt=0, description="Declared full support width")


class SimpleMeasureSpec(BaseModel):
    type: Literal["dichotomic", "uniform"]
    L: float = Field(2.0, gt=0)


class EquallySpacedMeasureSpec(BaseModel):
    type: Literal["equally_spaced"]
    k: int = Field(..., ge=2)
    L: float = Field(2.0, gt=0)


class DensityMeasureSpec(BaseModel):
    type: Literal["density"]
    L: float = Field(..., gt=0)
    table: list[tuple[float, float]] = Field(..., min_length=2)
    quadrature_nodes: int | None = Field(None, ge=2)


MeasureSpec = Annotated[
    AtomsMeasureSpec | SimpleMeasureSpec | EquallySpacedMeasureSpec | DensityMeasureSpec,
    Field(discriminator="type"),
]


# Sweeps over the classic model need no measure flags.
SWEEP_DEFAULT_MEASURES: dict[str, tuple[str, ...]] = {
    "sweep": ("measure",),
    "bipartite-sweep": ("measure_sigma", "measure_tau"),
}


class RunConfig(BaseModel):
    """
    Validated configuration of one CLI invocation.
    """
    command: Literal["solve", "sweep", "critical", "shock", "finiten", "bipartite",
                     "bipartite-sweep", "bipartite-finiten", "check"]
    measure: MeasureSpec | None = None
    measure_sigma: MeasureSpec | None = None
    measure_tau: MeasureSpec | None = None
    beta: list[float] = Field(default_factory=list, description="Inverse temperatures")
    h: list[float] = Field(default_factory=list, description="Fields")
    x: float | None = None
    t: list[float] = Field(default_factory=list, description="Times")
    n: list[int] = Field(default_factory=list, description="System sizes")
    n1: list[int] = Field(default_factory=list)
    alpha: list[float] = Field(default_factory=list)
    h1: float = 0.0
    h2: float = 0.0
    symmetrize: bool = False
    counting: bool = False
    field_units: Literal["mechanical", "thermodynamic"] = "mechanical"
    tolerance: float = Field(1e-12, gt=0)
    quick: bool = False
    output: str | None = None
    workers: int = Field(1, ge=1)

    model_config = ConfigDict(extra="forbid")

    @field_validator("beta", "t", "alpha", "h")
    @classmethod
    def _finite_values(cls, values: list[float]) -> list[float]:
        if any(not math.isfinite(v) for v in values):
            raise ValueError("values must be finite")
        return values

    @field_validator("beta")
    @classmethod
    def _positive_beta(cls, values: list[float]) -> list[float]:
        if any(v <= 0 for v in values):
            raise ValueError("beta must be positive")
        return values

    @field_validator("n", "n1")
    @classmethod
    def _positive_sizes(cls, values: list[int]) -> list[int]:
        if any(v < 1 for v in values):
            raise ValueError("system sizes must be positive")
        return values

    @model_validator(mode="after")
    def _required_inputs(self) -> "RunConfig":
        for name in SWEEP_DEFAULT_MEASURES.get(self.command, ()):
            if getattr(self, name) is None:
                setattr(self, name, SimpleMeasureSpec(type="dichotomic"))
        required: dict[str, tuple[str, ...]] = {
            "solve": ("measure", "beta", "h"),
            "sweep": ("measure", "beta", "h"),
            "critical": ("measure",),
            "shock": ("measure", "t"),
            "finiten": ("measure", "x", "t", "n"),
            "bipartite": ("measure_sigma", "measure_tau", "beta", "alpha"),
            "bipartite-sweep": ("measure_sigma", "measure_tau", "beta", "alpha"),
            "bipartite-finiten": ("measure_sigma", "measure_tau", "beta", "alpha", "n1"),
            "check": (),
        }
        missing = [name for name in required[self.command]
                   if getattr(self, name) in (None, [])]
        if missing:
            raise ValueError("missing required option(s): "
                             + ", ".join("--" + name.replace("_", "-") for name in missing))
        if self.command == "finiten" and len(self.n) < 4:
            raise ValueError("--n needs at least 4 system sizes")
        return self


class ResultRecord(BaseModel):
    """
    Flat record of inputs and outputs; run metadata lives in the sidecar.
    """
    command: str
    values: dict[str, float | int | str | bool | list[float] | None] = Field(
        ..., description="Finite numbers only; a quantity that does not exist, such as t_c "
                         "of a measure without a transition, is null")

    @field_validator("values")
    @classmethod
    def _finite_numbers(cls, values: dict) -> dict:
        for key, value in values.items():
            numbers = value if isinstance(value, list) else [value]
            if any(isinstance(v, float) and not math.isfinite(v) for v in numbers):
                raise ValueError(f"field {key} is not finite")
        return values



class CheckResult(BaseModel):
    """Outcome of one invariant of the `check` suite."""
    name: str
    passed: bool
    worst: float | None = Field(None, description="Worst observed value of the checked quantity")
    limit: float | None = Field(None, description="Threshold the worst value is compared with")
    detail: str = ""
