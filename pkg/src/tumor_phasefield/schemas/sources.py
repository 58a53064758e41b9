import math
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from tumor_phasefield.schemas.potential import SimplexPoint

Pair = tuple[float, float]


# source models
class LinearGrowth(BaseModel):
    """Proliferation fed by the nutrient, apoptosis into the necrotic phase and lysis.

    Realizes M = [[-lambda_A, 0], [lambda_A, -lambda_L]] and
    Sigma = (lambda_M g(n), 0) with g(n) = max(n_c, min(n, 1)).
    """

    # model configuration
    model_config = ConfigDict(extra="forbid", frozen=True)

    # fields
    kind: Literal["linear_growth"] = "linear_growth"
    lambda_M: Annotated[float, Field(gt=0.0, description="Proliferation rate.")] = 0.1
    lambda_A: Annotated[float, Field(gt=0.0, description="Apoptosis rate.")] = 0.5
    lambda_L: Annotated[float, Field(gt=0.0, description="Lysis rate of necrotic cells.")] = 0.5
    n_c: Annotated[
        float,
        Field(gt=0.0, lt=1.0, description="Nutrient floor of the growth function g."),
    ] = 0.05
    g_mean: Annotated[
        float | None,
        Field(
            ge=0.0,
            le=1.0,
            description=(
                "Nominal mean of g(n) used by the inward-pointing check. "
                "Null checks the full bound box of Sigma."
            ),
        ),
    ] = None


class CenteredDecay(BaseModel):
    """Relaxation towards the simplex center with a bounded nutrient-driven perturbation.

    Realizes M = -rate * I and Sigma = (rate/3, rate/3) + Sigma0(n), where
    Sigma0(n) = bound * tanh(gain * (n - 1/2)) * weights.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["centered_decay"] = "centered_decay"
    rate: Annotated[float, Field(gt=0.0, description="Decay rate lambda.")] = 3.0
    bound: Annotated[
        float, Field(ge=0.0, description="Componentwise bound K of the perturbation.")
    ] = 0.0
    gain: Annotated[
        float, Field(description="Steepness of the perturbation in the nutrient.")
    ] = 1.0
    weights: Annotated[
        Pair, Field(description="Per-species weights of the perturbation, each in [-1, 1].")
    ] = (1.0, -1.0)

    @model_validator(mode="after")
    def validate_weights(self) -> "CenteredDecay":
        if any(abs(w) > 1.0 for w in self.weights):
            raise ValueError(f"weights must lie in [-1, 1], got {self.weights}.")
        return self


class CustomSource(BaseModel):
    """User-supplied matrix with Sigma = base + slope * T(n)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["custom"] = "custom"
    matrix: Annotated[
        tuple[Pair, Pair], Field(description="Rows of the 2x2 matrix M.")
    ] = ((0.0, 0.0), (0.0, 0.0))
    sigma_base: Annotated[Pair, Field(description="Sigma at zero nutrient.")] = (0.0, 0.0)
    sigma_slope: Annotated[
        Pair, Field(description="Increment of Sigma between zero and full nutrient.")
    ] = (0.0, 0.0)
    k_bounds: Annotated[
        tuple[float, float, float, float],
        Field(description="Declared bounds (K_p-, K_p+, K_d-, K_d+) of Sigma."),
    ] = (0.0, 0.0, 0.0, 0.0)

    @model_validator(mode="after")
    def validate_bounds(self) -> "CustomSource":
        kpm, kpp, kdm, kdp = self.k_bounds
        for name, lo, hi, base, slope in (
            ("p", kpm, kpp, self.sigma_base[0], self.sigma_slope[0]),
            ("d", kdm, kdp, self.sigma_base[1], self.sigma_slope[1]),
        ):
            if lo > hi:
                raise ValueError(f"k_bounds for '{name}' are reversed: {lo} > {hi}.")
            values = (base, base + slope)
            if min(values) < lo or max(values) > hi:
                raise ValueError(
                    f"Sigma_{name} ranges over [{min(values)}, {max(values)}], "
                    f"outside the declared bounds [{lo}, {hi}]."
                )
        return self


SourceModel = Annotated[
    LinearGrowth | CenteredDecay | CustomSource, Field(discriminator="kind")
]


# admissible regions
class Disk(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["disk"] = "disk"
    center: Annotated[SimplexPoint, Field(description="Center of the disk.")] = (
        SimplexPoint(s=0.2, r=0.2)
    )
    radius: Annotated[float, Field(gt=0.0, description="Radius of the disk.")] = 0.05


class ShrunkenSimplex(BaseModel):
    """The set {s >= m, r >= m, s + r <= 1 - m} with circular arcs at the vertices."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["shrunken_simplex"] = "shrunken_simplex"
    margin: Annotated[
        float,
        Field(gt=0.0, lt=1.0 / 3.0, description="Distance of the straight edges from the simplex edges."),
    ] = 0.1
    corner_rounding: Annotated[
        float | None,
        Field(gt=0.0, description="Radius of the vertex arcs. Null means margin / 2."),
    ] = None

    @property
    def rounding(self) -> float:
        return self.corner_rounding if self.corner_rounding is not None else 0.5 * self.margin

    @model_validator(mode="after")
    def validate_core(self) -> "ShrunkenSimplex":
        # the triangle left after pulling every edge in by the rounding radius
        rho = self.rounding
        if 1.0 - 3.0 * self.margin - rho * (2.0 + math.sqrt(2.0)) <= 0.0:
            raise ValueError(
                f"corner_rounding={rho} is too large for margin={self.margin}: "
                "the rounded region degenerates."
            )
        return self


AdmissibleRegion = Annotated[Disk | ShrunkenSimplex, Field(discriminator="kind")]


# verdicts and mean dynamics
class InwardVerdict(BaseModel):
    """Outcome of the inward-pointing check on the boundary of a region."""

    model_config = ConfigDict(frozen=True)

    holds: Annotated[bool, Field(description="Whether every sampled margin is negative.")]
    worst_margin: Annotated[
        float, Field(description="Largest sampled value of (M y + x) . normal.")
    ]
    witness: Annotated[SimplexPoint, Field(description="Boundary point attaining the worst margin.")]
    witness_normal: Annotated[Pair, Field(description="Outer normal at the witness.")]
    witness_sigma: Annotated[Pair, Field(description="Sigma corner attaining the worst margin.")]
    n_samples: Annotated[int, Field(ge=1, description="Number of sampled boundary points.")]


class MeanState(BaseModel):
    """Spatial means of the two phase fields at time t."""

    model_config = ConfigDict(frozen=True)

    y_p: float
    y_d: float
    t: float = 0.0

    def as_tuple(self) -> Pair:
        return (self.y_p, self.y_d)


class MeanTrajectory(BaseModel):
    states: Annotated[list[MeanState], Field(description="Recorded states, in time order.")]
    worst_signed_distance: Annotated[
        float,
        Field(description="Largest signed distance to the admissible region along the trajectory."),
    ]
    scheme: Literal["rk4", "euler"] = "rk4"

    @property
    def final(self) -> MeanState:
        return self.states[-1]
