import io
import json

import pytest

from tools.mock_teacher import Corruption, answer, serve


def _query(tokens, request_id=1):
    return json.dumps({"id": request_id, "type": "string_prob", "tokens": tokens})


class TestAnswer:
    def test_hello(self, ladder):
        assert json.loads(answer(ladder, '{"type": "hello"}')) == {"type": "hello", "alphabet_size": 2}

    def test_string_prob(self, ladder):
        response = json.loads(answer(ladder, _query([1, 1], request_id=7)))
        assert response["id"] == 7
        assert response["p"] == pytest.approx(0.03)

    def test_invalid_token_is_error(self, ladder):
        response = json.loads(answer(ladder, _query([5], request_id=3)))
        assert response["type"] == "error"
        assert response["id"] == 3
        assert "outside the alphabet" in response["message"]

    def test_unknown_type(self, ladder):
        response = json.loads(answer(ladder, '{"id": 2, "type": "prefix_prob"}'))
        assert response == {"id": 2, "type": "error", "message": "unknown type 'prefix_prob'"}

    @pytest.mark.parametrize(
        "line",
        [
            "not json",
            "[1, 2]",
            '{"id": "x", "type": "string_prob", "tokens": [0]}',
            '{"id": 4, "type": "string_prob", "tokens": "ab"}',
        ],
    )
    def test_malformed_requests_get_error(self, ladder, line):
        response = json.loads(answer(ladder, line))
        assert response["type"] == "error"
        assert response["id"] in (None, 4)

    def test_silent_still_greets(self, ladder):
        assert answer(ladder, '{"type": "hello"}', silent=True) is not None
        assert answer(ladder, _query([0]), silent=True) is None

    def test_corruptions(self, ladder):
        assert answer(ladder, _query([0]), Corruption.GARBAGE) == "this is not json"
        assert json.loads(answer(ladder, _query([0]), Corruption.RANGE))["p"] == 1.5


class TestServe:
    def test_answers_each_line(self, ladder):
        stdin = io.StringIO('{"type": "hello"}\n\n' + _query([]) + "\n" + _query([0], 2) + "\n")
        stdout = io.StringIO()
        assert serve(ladder, stdin, stdout) == 3
        lines = stdout.getvalue().splitlines()
        assert len(lines) == 3
        assert json.loads(lines[1])["p"] == pytest.approx(0.1)
        assert json.loads(lines[2])["id"] == 2

    def test_silent_writes_only_greeting(self, ladder):
        stdin = io.StringIO('{"type": "hello"}\n' + _query([0]) + "\n")
        stdout = io.StringIO()
        serve(ladder, stdin, stdout, silent=True)
        assert len(stdout.getvalue().splitlines()) == 1
