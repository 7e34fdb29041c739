from __future__ import annotations

import os
import random
import subprocess
import sys

import pytest

from medico.correction._kernels import HAS_NUMBA
from medico.correction.editdist import levenshtein, preservation
from medico.errors import EmptyOriginal

BACKENDS = ["numpy"] + (["numba"] if HAS_NUMBA else [])

ALPHABET = "abcdefgh ABΓΔ絵文字éüßñ🙂🚀"


def dp_levenshtein(a: str, b: str) -> int:
    """Independent full-matrix dynamic-programming oracle."""
    rows, cols = len(a) + 1, len(b) + 1
    table = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        table[i][0] = i
    for j in range(cols):
        table[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            table[i][j] = min(
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
                table[i - 1][j - 1] + cost,
            )
    return table[-1][-1]


def random_string(rng: random.Random, max_len: int = 20) -> str:
    return "".join(rng.choice(ALPHABET) for _ in range(rng.randrange(0, max_len + 1)))


@pytest.mark.parametrize("backend", BACKENDS)
class TestLevenshtein:
    def test_identity(self, backend):
        assert levenshtein("abc", "abc", backend=backend) == 0

    def test_insert_only(self, backend):
        assert levenshtein("", "abc", backend=backend) == 3
        assert levenshtein("abc", "", backend=backend) == 3

    def test_kitten_sitting(self, backend):
        assert dp_levenshtein("kitten", "sitting") == 3
        assert levenshtein("kitten", "sitting", backend=backend) == 3

    def test_unicode_codepoints(self, backend):
        assert levenshtein("café", "cafe", backend=backend) == 1
        assert levenshtein("🙂🙂", "🙂🚀", backend=backend) == 1

    def test_matches_oracle_on_random_pairs(self, backend):
        rng = random.Random(2024)
        for _ in range(300):
            a, b = random_string(rng), random_string(rng)
            assert levenshtein(a, b, backend=backend) == dp_levenshtein(a, b)

    def test_metric_properties(self, backend):
        rng = random.Random(31)
        strings = [random_string(rng, 12) for _ in range(12)]
        for a in strings:
            for b in strings:
                d_ab = levenshtein(a, b, backend=backend)
                assert d_ab >= 0
                assert (d_ab == 0) == (a == b)
                assert d_ab == levenshtein(b, a, backend=backend)
        for a, b, c in zip(strings, strings[1:], strings[2:]):
            assert levenshtein(a, c, backend=backend) <= (
                levenshtein(a, b, backend=backend) + levenshtein(b, c, backend=backend)
            )


def test_backends_agree():
    if not HAS_NUMBA:
        pytest.skip("numba unavailable")
    rng = random.Random(64)
    for _ in range(100):
        a, b = random_string(rng), random_string(rng)
        assert levenshtein(a, b, backend="numba") == levenshtein(a, b, backend="numpy")


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        levenshtein("a", "b", backend="gpu")


def test_disable_flag_selects_numpy_path():
    env = {**os.environ, "MEDICO_DISABLE_NUMBA": "1"}
    code = (
        "from medico.correction._kernels import HAS_NUMBA, active_backend\n"
        "from medico.correction.editdist import levenshtein\n"
        "assert not HAS_NUMBA\n"
        "assert active_backend() == 'numpy'\n"
        "assert levenshtein('kitten', 'sitting') == 3\n"
    )
    subprocess.run([sys.executable, "-c", code], env=env, check=True, timeout=120)


# -- preservation -----------------------------------------------------------


def test_preservation_identity():
    assert preservation("abc", "abc") == 1.0


def test_preservation_clamps_to_zero():
    # Lev("abc", "xyzxyz") = 6 > len("abc") = 3
    assert preservation("abc", "xyzxyz") == 0.0


def test_preservation_kitten_sitting():
    # 1 - 3/6 via the DP oracle
    assert dp_levenshtein("kitten", "sitting") == 3
    assert preservation("kitten", "sitting") == pytest.approx(0.5)


def test_preservation_empty_original_rejected():
    with pytest.raises(EmptyOriginal):
        preservation("", "anything")


def test_preservation_in_unit_interval():
    rng = random.Random(17)
    for _ in range(200):
        o = random_string(rng) or "x"
        o2 = random_string(rng)
        assert 0.0 <= preservation(o, o2) <= 1.0


def test_preservation_non_increasing_along_edit_path():
    # appending one extra character at a time walks preservation downward
    o = "a correct answer about facts"
    candidate = o
    last = preservation(o, candidate)
    for ch in "xyzquvw":
        candidate += ch
        current = preservation(o, candidate)
        assert current <= last
        last = current
