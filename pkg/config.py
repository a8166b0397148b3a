import os
from dataclasses import dataclass, field

from dotenv import load_dotenv

from core.errors import ConfigError


DEFAULT_MU = 1e-4
DEFAULT_MAX_EXTENDS = 6
DEFAULT_CLIP_EPSILON = 1e-6
DEFAULT_EQ_SAMPLES = 10_000
DEFAULT_P_CONTINUE = 0.9
DEFAULT_MAX_LENGTH = 50
DEFAULT_TEACHER_TIMEOUT_S = 30.0
DEFAULT_TEACHER_ATTEMPTS = 3

LOG_LEVELS = ("error", "warning", "info", "debug")
CONSISTENCY_RULES = ("lookahead", "estimate")


@dataclass(frozen=True)
class EquivalenceConfig:
    n_samples: int = DEFAULT_EQ_SAMPLES
    p_continue: float = DEFAULT_P_CONTINUE
    max_length: int = DEFAULT_MAX_LENGTH
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ConfigError(f"n_samples must be at least 1, got {self.n_samples}")
        if not 0.0 < self.p_continue < 1.0:
            raise ConfigError(f"p_continue must lie in (0, 1), got {self.p_continue}")
        if self.max_length < 1:
            raise ConfigError(f"max_length must be at least 1, got {self.max_length}")


@dataclass(frozen=True)
class LearnerConfig:
    mu: float = DEFAULT_MU
    max_extends: int = DEFAULT_MAX_EXTENDS
    clip_epsilon: float = DEFAULT_CLIP_EPSILON
    equivalence: EquivalenceConfig = field(default_factory=EquivalenceConfig)
    seed: int = 0
    exclude_final_edge: bool = False
    # "estimate" compares tree estimates, "lookahead" compares one-step teacher answers
    consistency: str = "lookahead"
    # solve hypothesis parameters from the merged structure instead of reading estimates
    refit: bool = True
    # False: extend instead of clipping while any stop estimate exceeds 1
    clip_stop: bool = True

    def __post_init__(self):
        if not 0.0 <= self.mu < 1.0:
            raise ConfigError(f"mu must lie in [0, 1), got {self.mu}")
        if self.max_extends < 1:
            raise ConfigError(f"max_extends must be at least 1, got {self.max_extends}")
        if not 0.0 < self.clip_epsilon < 1.0:
            raise ConfigError(f"clip_epsilon must lie in (0, 1), got {self.clip_epsilon}")
        if self.consistency not in CONSISTENCY_RULES:
            raise ConfigError(
                f"Unsupported consistency rule {self.consistency!r}. "
                f"Supported: {', '.join(CONSISTENCY_RULES)}."
            )


@dataclass
class Config:
    log_level: str = "info"
    teacher_timeout_s: float = DEFAULT_TEACHER_TIMEOUT_S
    teacher_attempts: int = DEFAULT_TEACHER_ATTEMPTS

    @classmethod
    def from_env(cls) -> "Config":
        load_dotenv(override=True)

        log_level = os.getenv("PDFA_DISTILL_LOG", "info").lower().strip()
        if log_level not in LOG_LEVELS:
            raise ConfigError(
                f"Unsupported PDFA_DISTILL_LOG={log_level!r}. Supported: {', '.join(LOG_LEVELS)}."
            )

        raw_timeout = os.getenv("PDFA_DISTILL_TEACHER_TIMEOUT", str(DEFAULT_TEACHER_TIMEOUT_S))
        try:
            teacher_timeout_s = float(raw_timeout)
        except ValueError:
            raise ConfigError(
                f"PDFA_DISTILL_TEACHER_TIMEOUT must be a number of seconds, got {raw_timeout!r}"
            ) from None
        if teacher_timeout_s <= 0:
            raise ConfigError("PDFA_DISTILL_TEACHER_TIMEOUT must be positive")

        raw_attempts = os.getenv("PDFA_DISTILL_TEACHER_ATTEMPTS", str(DEFAULT_TEACHER_ATTEMPTS))
        try:
            teacher_attempts = int(raw_attempts)
        except ValueError:
            raise ConfigError(
                f"PDFA_DISTILL_TEACHER_ATTEMPTS must be an integer, got {raw_attempts!r}"
            ) from None
        if teacher_attempts < 1:
            raise ConfigError("PDFA_DISTILL_TEACHER_ATTEMPTS must be at least 1")

        return cls(
            log_level=log_level,
            teacher_timeout_s=teacher_timeout_s,
            teacher_attempts=teacher_attempts,
        )
