"""Messages of the line-delimited JSON teacher protocol (one object per line)."""

from typing import Literal

from pydantic import BaseModel, Field


class HelloRequest(BaseModel):
    type: Literal["hello"] = "hello"


class HelloResponse(BaseModel):
    type: Literal["hello"] = "hello"
    alphabet_size: int = Field(..., ge=0)


class StringProbRequest(BaseModel):
    id: int = Field(..., ge=0)
    type: Literal["string_prob"] = "string_prob"
    tokens: list[int] = Field(default_factory=list)

    model_config = {
        "json_schema_extra": {
            "example": {"id": 1, "type": "string_prob", "tokens": [2, 0, 1]},
        }
    }


class StringProbResponse(BaseModel):
    id: int
    p: float


class ErrorResponse(BaseModel):
    id: int | None = None
    type: Literal["error"] = "error"
    message: str = Field(...)
