"""Gauss-Hermite rule settings."""

from pydantic import BaseModel, ConfigDict, Field


class QuadratureSpec(BaseModel):
    """Gauss-Hermite rule order plus the convergence target used for refinement checks."""

    model_config = ConfigDict(frozen=True)

    rule_order: int = Field(default=64, ge=1, description="Number of Gauss-Hermite nodes")
    abs_tolerance: float = Field(
        default=1e-12, ge=0.0, description="Absolute change allowed when the rule is doubled"
    )

    def refined(self) -> "QuadratureSpec":
        """Return the same spec with the rule order doubled."""
        return self.model_copy(update={"rule_order": 2 * self.rule_order})

    def exact_degree(self) -> int:
        """Highest polynomial degree integrated exactly against e^{-u^2}."""
        return 2 * self.rule_order - 1
