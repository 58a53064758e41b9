from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field


class PotentialSpec(BaseModel):
    """Parameters of the regularized configuration potential."""

    # model configuration
    model_config = ConfigDict(extra="forbid", frozen=True)

    # fields
    epsilon: Annotated[
        float,
        Field(gt=0.0, lt=1.0, description="Moreau-Yosida parameter in (0, 1)."),
    ] = 0.1
    chi: Annotated[
        float,
        Field(ge=0.0, description="Interfacial coefficient of the smooth perturbation."),
    ] = 1.0
    offset_log3: Annotated[
        bool,
        Field(description="Add log 3 to the logarithmic potential so that it is nonnegative."),
    ] = True


class SimplexPoint(BaseModel):
    """A pair of volume fractions (proliferating, necrotic). The host fraction is 1 - s - r."""

    model_config = ConfigDict(frozen=True)

    s: Annotated[float, Field(description="Proliferating fraction.")]
    r: Annotated[float, Field(description="Necrotic fraction.")]

    @property
    def host(self) -> float:
        return 1.0 - self.s - self.r

    def in_closed_simplex(self) -> bool:
        return self.s >= 0.0 and self.r >= 0.0 and self.s + self.r <= 1.0

    def in_open_simplex(self) -> bool:
        return self.s > 0.0 and self.r > 0.0 and self.s + self.r < 1.0

    def as_tuple(self) -> tuple[float, float]:
        return (self.s, self.r)


class ProxResult(BaseModel):
    """Result of the pointwise proximal solve."""

    point: Annotated[SimplexPoint, Field(description="The minimizer.")]
    log_host: Annotated[
        float, Field(description="Logarithm of the host fraction at the minimizer.")
    ]
    newton_iters: Annotated[int, Field(ge=0, description="Newton iterations used.")]
    residual: Annotated[
        float, Field(ge=0.0, description="Scaled optimality residual at the minimizer.")
    ]
