from pydantic import BaseModel, Field


class EdgeDocument(BaseModel):
    token: str = Field(..., min_length=1)
    to: int = Field(..., ge=0)
    p: float = Field(..., ge=0.0, le=1.0)


class StateDocument(BaseModel):
    id: int = Field(..., ge=0)
    stop: float = Field(..., ge=0.0, le=1.0)
    edges: list[EdgeDocument] = Field(default_factory=list)


class PdfaDocument(BaseModel):
    alphabet: list[str] = Field(default_factory=list)
    initial: int = Field(0, ge=0)
    states: list[StateDocument] = Field(..., min_length=1)

    model_config = {
        "json_schema_extra": {
            "example": {
                "alphabet": ["a", "b"],
                "initial": 0,
                "states": [
                    {
                        "id": 0,
                        "stop": 0.1,
                        "edges": [
                            {"token": "a", "to": 0, "p": 0.3},
                            {"token": "b", "to": 1, "p": 0.6},
                        ],
                    },
                    {"id": 1, "stop": 1.0, "edges": []},
                ],
            }
        }
    }
