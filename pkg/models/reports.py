from pydantic import BaseModel, Field


class RoundRecord(BaseModel):
    """One line of the structured run log."""

    round: int = Field(..., ge=1)
    tree_size: int = Field(..., ge=1)
    extend_count: int = Field(..., ge=0)
    reds: int = Field(..., ge=0)
    minimized: bool = Field(True)
    basis_complete: bool = Field(...)
    hypothesis_states: int | None = Field(None)
    refit: bool = Field(False)
    empirical_error: float | None = Field(None, ge=0.0)
    counterexample: list[int] | None = Field(None)
    stale_counterexample: bool = Field(False)
    clipped: int = Field(0, ge=0)
    overshoot: int = Field(0, ge=0)
    max_residual: float = Field(..., ge=0.0)
    hash_before: str = Field(...)
    hash_after: str = Field(...)
    max_merge_score: float = Field(0.0, ge=0.0)
    rescreened: int = Field(0, ge=0)
    queries: int = Field(..., ge=0)


class RunSummary(BaseModel):
    stop_reason: str = Field(...)
    rounds: int = Field(..., ge=0)
    queries: int = Field(..., ge=0)
    cache_hits: int = Field(..., ge=0)
    hypothesis_states: int = Field(..., ge=1)
    counterexamples: list[list[int]] = Field(default_factory=list)


class EvalReport(BaseModel):
    mse: float = Field(..., ge=0.0)
    max_abs_err: float = Field(..., ge=0.0)
    n_strings: int = Field(..., ge=0)
    n_invalid: int = Field(0, ge=0)
    hypothesis_states: int = Field(..., ge=1)
