import pytest

from config import (
    DEFAULT_EQ_SAMPLES,
    DEFAULT_MAX_EXTENDS,
    DEFAULT_MU,
    Config,
    EquivalenceConfig,
    LearnerConfig,
)
from core.errors import ConfigError


def test_config_defaults(config):
    assert config.log_level == "info"
    assert config.teacher_timeout_s == 30.0
    assert config.teacher_attempts == 3


def test_config_reads_environment(monkeypatch):
    monkeypatch.setattr("config.load_dotenv", lambda **kwargs: False)
    monkeypatch.setenv("PDFA_DISTILL_LOG", "DEBUG")
    monkeypatch.setenv("PDFA_DISTILL_TEACHER_TIMEOUT", "2.5")
    monkeypatch.setenv("PDFA_DISTILL_TEACHER_ATTEMPTS", "1")

    config = Config.from_env()

    assert config.log_level == "debug"
    assert config.teacher_timeout_s == 2.5
    assert config.teacher_attempts == 1


@pytest.mark.parametrize(
    ("variable", "value", "message"),
    [
        ("PDFA_DISTILL_LOG", "verbose", "PDFA_DISTILL_LOG"),
        ("PDFA_DISTILL_TEACHER_TIMEOUT", "soon", "PDFA_DISTILL_TEACHER_TIMEOUT"),
        ("PDFA_DISTILL_TEACHER_TIMEOUT", "0", "must be positive"),
        ("PDFA_DISTILL_TEACHER_ATTEMPTS", "two", "PDFA_DISTILL_TEACHER_ATTEMPTS"),
        ("PDFA_DISTILL_TEACHER_ATTEMPTS", "0", "at least 1"),
    ],
)
def test_config_rejects_bad_environment(monkeypatch, variable, value, message):
    monkeypatch.setattr("config.load_dotenv", lambda **kwargs: False)
    monkeypatch.setenv(variable, value)

    with pytest.raises(ConfigError) as exc_info:
        Config.from_env()
    assert message in str(exc_info.value)


class TestLearnerConfig:
    def test_defaults(self):
        config = LearnerConfig()
        assert config.mu == DEFAULT_MU == 1e-4
        assert config.max_extends == DEFAULT_MAX_EXTENDS == 6
        assert config.clip_epsilon == 1e-6
        assert config.equivalence.n_samples == DEFAULT_EQ_SAMPLES == 10_000
        assert config.exclude_final_edge is False
        assert config.consistency == "lookahead"
        assert config.refit is True
        assert config.clip_stop is True

    def test_unknown_consistency_rule(self):
        with pytest.raises(ConfigError, match="Unsupported consistency rule 'exact'"):
            LearnerConfig(consistency="exact")

    def test_mu_zero_allowed(self):
        assert LearnerConfig(mu=0.0).mu == 0.0

    @pytest.mark.parametrize("mu", [-0.1, 1.0, 1.5])
    def test_mu_out_of_range(self, mu):
        with pytest.raises(ConfigError, match="mu"):
            LearnerConfig(mu=mu)

    def test_max_extends_positive(self):
        with pytest.raises(ConfigError, match="max_extends"):
            LearnerConfig(max_extends=0)

    @pytest.mark.parametrize("epsilon", [0.0, 1.0])
    def test_clip_epsilon_open_interval(self, epsilon):
        with pytest.raises(ConfigError, match="clip_epsilon"):
            LearnerConfig(clip_epsilon=epsilon)

    def test_config_error_is_value_error(self):
        with pytest.raises(ValueError):
            LearnerConfig(mu=2.0)


class TestEquivalenceConfig:
    def test_defaults(self):
        config = EquivalenceConfig()
        assert config.p_continue == 0.9
        assert config.max_length == 50

    def test_zero_samples_rejected(self):
        with pytest.raises(ConfigError, match="n_samples"):
            EquivalenceConfig(n_samples=0)

    @pytest.mark.parametrize("p_continue", [0.0, 1.0])
    def test_p_continue_open_interval(self, p_continue):
        with pytest.raises(ConfigError, match="p_continue"):
            EquivalenceConfig(p_continue=p_continue)

    def test_max_length_positive(self):
        with pytest.raises(ConfigError, match="max_length"):
            EquivalenceConfig(max_length=0)
