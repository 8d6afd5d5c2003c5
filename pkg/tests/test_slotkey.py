import re
from pathlib import Path

import numpy as np
import pytest

import oracles
from fhs.slotkey import (SlotKeySource, hmac_sha256_prf, mixer_prf, parse_key, slot_key)

DOC = Path(__file__).resolve().parent.parent / "docs" / "slot_key_prf.md"


def published_vectors():
    rows = []
    for line in DOC.read_text().splitlines():
        m = re.match(r"\| ([0-9a-f]{32}) \| (\d+) \| (\d+) \| (\d+) \| ([0-9a-f]{16}) \|\s*(\d*)\s*\|", line)
        if m:
            key, s, t, c, out, xt = m.groups()
            rows.append((bytes.fromhex(key), int(s), int(t), int(c), int(out, 16), int(xt) if xt else None))
    return rows


class TestPublishedVectors:
    def test_ten_vectors(self):
        assert len(published_vectors()) == 10

    @pytest.mark.parametrize("vector", published_vectors(), ids=lambda v: f"s{v[1]}-t{v[2]}-c{v[3]}")
    def test_vector(self, vector):
        key, s, t, c, out, xt = vector
        assert mixer_prf(key, s, t, c) == out
        assert oracles.mixer_np(key, s, t, c) == out
        if xt is not None:
            assert slot_key(SlotKeySource(key, s, 23), t) == xt


class TestSlotKey:
    def test_deterministic_and_range(self):
        src = SlotKeySource(bytes(range(16)), 3, 23)
        assert [slot_key(src, t) for t in range(50)] == [slot_key(src, t) for t in range(50)]
        assert all(0 <= slot_key(src, t) < 23 for t in range(200))
        assert all(slot_key(SlotKeySource(bytes(16), 0, 1), t) == 0 for t in range(10))

    def test_rejection_skips_biased_draws(self):
        # first draw lands in the rejected tail, second is accepted
        draws = {0: 2 ** 64 - 1, 1: 40}
        src = SlotKeySource(bytes(16), 0, 23, prf=lambda k, s, t, c: draws[c])
        assert slot_key(src, 0) == 40 % 23

    def test_uniformity_chi_square(self):
        src = SlotKeySource(bytes.fromhex("0f" * 16), 0, 23)
        n = 10 ** 5
        counts = np.bincount([slot_key(src, t) for t in range(n)], minlength=23)
        chi2 = float(((counts - n / 23) ** 2 / (n / 23)).sum())
        # 0.999 quantile of chi-square with 22 degrees of freedom
        assert chi2 < 48.27

    def test_hmac_alternative(self):
        src = SlotKeySource(bytes(range(16)), 0, 23, prf=hmac_sha256_prf)
        assert 0 <= slot_key(src, 5) < 23
        assert hmac_sha256_prf(bytes(16), 0, 0, 0) != mixer_prf(bytes(16), 0, 0, 0)

    def test_key_hidden_in_repr(self):
        src = SlotKeySource(bytes(range(16)), 0, 23)
        assert "0001020304" not in repr(src)

    def test_parse_key(self):
        assert parse_key("00010203 04050607 08090a0b 0c0d0e0f\n") == bytes(range(16))
        assert parse_key(bytes(range(16))) == bytes(range(16))
        with pytest.raises(ValueError):
            parse_key("abcd")
        with pytest.raises(ValueError):
            SlotKeySource(bytes(8), 0, 5)
