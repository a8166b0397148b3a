from unittest.mock import patch

import pytest
from typer.testing import CliRunner

from config import Config
from core.serialization import to_json
from tests.conftest import make_one_state


@pytest.fixture
def runner():
    test_config = Config(log_level="warning", teacher_timeout_s=5.0, teacher_attempts=1)
    with (
        patch("cli.main.get_config", return_value=test_config),
        patch("cli.dependencies.get_config", return_value=test_config),
    ):
        yield CliRunner()


@pytest.fixture
def unary_file(tmp_path):
    path = tmp_path / "unary.json"
    path.write_text(to_json(make_one_state((0.5,), 0.5)), encoding="utf-8")
    return path
