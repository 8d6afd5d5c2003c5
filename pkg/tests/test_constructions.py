from fractions import Fraction

import pytest

import oracles
from fhs.constructions import (LatinSquare, MdsCode, PrimeField, SrlsFamily, construct_mds_scheme,
                               construct_rs_cfc, cyclic_latin_square, generate_srls_scheme,
                               latin_shift, mitigation_report, recover_slot_keys, rs_cfc_dimension,
                               ternary_oa9_scheme, verify_min_distance, verify_orthogonal_array,
                               weight_one_scheme)
from fhs.core import Scheme, check_slot_uniformity
from fhs.errors import ArgumentError, BudgetExceeded
from fhs.metrics import group_correlation
from fhs.slotkey import SlotKeySource


class TestPrimeField:
    def test_arithmetic(self):
        f = PrimeField(7)
        for a in range(1, 7):
            assert f.mul(a, f.inv(a)) == 1
        assert f.evaluate([1, 2, 3], 2) == (1 + 4 + 12) % 7
        roots = [1, 3]
        poly = f.poly_from_roots(roots)
        assert all(f.evaluate(poly, r) == 0 for r in roots)

    def test_rejects_composite(self):
        with pytest.raises(ArgumentError):
            PrimeField(9)


class TestMds:
    def test_small_examples(self):
        s = construct_mds_scheme(3, 2, 3)
        assert s.k == 9
        assert {(0, 0, 0), (0, 1, 2), (1, 1, 1)} <= set(s.sequences)
        assert set(construct_mds_scheme(3, 1, 3).sequences) == {(0, 0, 0), (1, 1, 1), (2, 2, 2)}

    def test_matches_independent_encoder(self):
        for v, t, p in [(3, 2, 3), (5, 3, 5), (4, 2, 7), (7, 3, 7), (2, 2, 2)]:
            assert list(construct_mds_scheme(v, t, p).sequences) == oracles.rs_codewords(v, t, p)

    def test_index_round_trip(self):
        code = MdsCode(5, 3, 7)
        for i in (0, 1, 48, 200, code.k - 1):
            assert code.index_of(code.coefficients(i)) == i
            assert code.codeword(i) == oracles.rs_codewords(5, 3, 7)[i]

    def test_large_code_stays_virtual(self):
        code = MdsCode(23, 3, 23)
        assert code.k == 12167 and code.min_distance == 21
        a, b = code.distance_witness()
        assert sum(x != y for x, y in zip(code.codeword(a), code.codeword(b))) == 21

    def test_parameter_errors(self):
        with pytest.raises(ArgumentError):
            construct_mds_scheme(5, 2, 4)
        with pytest.raises(ArgumentError):
            construct_mds_scheme(6, 2, 5)
        with pytest.raises(ArgumentError):
            construct_mds_scheme(3, 4, 5)

    def test_rs_cfc(self):
        assert rs_cfc_dimension(9, 2) == 3
        s = construct_rs_cfc(9, 2, 11)
        d = s.metadata["min_distance"]
        assert d == 7 and d * 4 > 9 * 3
        assert rs_cfc_dimension(16, 4) == 1
        s = construct_rs_cfc(16, 4, 17)
        assert all(len(set(x)) == 1 for x in s) and s.metadata["min_distance"] == 16
        assert rs_cfc_dimension(23, 3) == 3


class TestDistance:
    def test_brute_force(self):
        r = verify_min_distance(construct_mds_scheme(3, 2, 3))
        assert r.d == 2 and r.method == "exhaustive"
        i, j = r.witness
        s = construct_mds_scheme(3, 2, 3)
        assert sum(a != b for a, b in zip(s[i], s[j])) == 2

    def test_duplicates(self):
        r = verify_min_distance(Scheme(((0, 1), (1, 0), (0, 1)), 2))
        assert r.d == 0 and sorted(r.witness) == [0, 2]

    def test_certificate_with_sampling(self):
        s = construct_mds_scheme(23, 3, 23)
        r = verify_min_distance(s, budget=10 ** 6, samples=10 ** 5)
        assert r.d == 21 and r.sampled_pairs == 10 ** 5 and r.sampled_min >= 21

    def test_refusal_without_certificate(self):
        s = construct_mds_scheme(7, 3, 7)
        bare = Scheme(s.sequences, s.m)
        with pytest.raises(BudgetExceeded):
            verify_min_distance(bare, budget=100)


class TestOrthogonalArray:
    def test_passes(self):
        assert verify_orthogonal_array(ternary_oa9_scheme(), 2, 1).passed
        assert verify_orthogonal_array(construct_mds_scheme(3, 2, 3), 2, 1).passed

    def test_fails_with_witness(self):
        s = Scheme(((0, 1), (0, 1), (1, 0), (1, 1)), 2)
        r = verify_orthogonal_array(s, 2, 1)
        assert not r.passed and r.columns == (0, 1) and r.tuple_ is not None
        r = verify_orthogonal_array(s, 2, 2)
        assert not r.passed and "k" in r.reason

    def test_oa_implies_mds_at_desk_scale(self):
        # every index-1 OA of these tiny shapes, not just the RS ones
        for m, v, t in [(2, 3, 2), (3, 3, 2), (3, 4, 2), (2, 4, 3), (2, 3, 3)]:
            oas = oracles.all_index1_oas(m, v, t)
            assert oas and all(oracles.is_oa(rows, m, t, 1) for rows in oas)
            for rows in oas:
                s = Scheme(tuple(rows), m)
                assert verify_orthogonal_array(s, t, 1).passed
                assert verify_min_distance(s).d == oracles.min_distance(rows) == v - t + 1
        # no binary strength-2 index-1 OA has four columns
        assert oracles.all_index1_oas(2, 4, 2) == []


class TestLatin:
    def test_cyclic(self):
        assert cyclic_latin_square(3).grid == ((0, 1, 2), (1, 2, 0), (2, 0, 1))
        assert cyclic_latin_square(1).grid == ((0,),)
        sq = cyclic_latin_square(23)
        assert sq.order == 23

    def test_validation(self):
        with pytest.raises(ArgumentError):
            LatinSquare(((0, 1), (0, 1)))

    def test_shift(self):
        sq = cyclic_latin_square(3)
        assert latin_shift(sq, 1).grid == ((1, 2, 0), (2, 0, 1), (0, 1, 2))
        assert latin_shift(sq, 0) == sq
        assert latin_shift(latin_shift(sq, 2), 1) == sq


def fixed_keys(keys):
    # a PRF whose counter-0 draw reduces to the requested slot key
    return lambda key, s, t, c: keys[t]


class TestSrls:
    def test_hand_example(self):
        src = SlotKeySource(bytes(16), 0, 3, prf=fixed_keys([1, 0, 2]))
        s = generate_srls_scheme(cyclic_latin_square(3), src)
        assert s.sequences == ((1, 1, 1), (2, 2, 2), (0, 0, 0))
        assert all(check_slot_uniformity(s))

    def test_zero_keys_reproduce_square(self):
        sq = cyclic_latin_square(5)
        s = generate_srls_scheme(sq, SlotKeySource(bytes(16), 0, 5, prf=fixed_keys([0] * 5)))
        assert s.sequences == sq.grid

    def test_permutation_columns_and_key_recovery(self):
        fam = SrlsFamily(cyclic_latin_square(11), bytes(range(16)))
        for session in range(25):
            s = fam.session(session)
            for t in range(s.v):
                assert sorted(x[t] for x in s) == list(range(11))
            assert all(len(keys) == 1 for keys in recover_slot_keys(s, fam.square))
            for i in range(s.k):
                assert group_correlation(s[i], [s[j] for j in range(s.k) if j != i]).blocked_slots == 0

    def test_key_never_serialised(self):
        fam = SrlsFamily(cyclic_latin_square(5), bytes(range(16)))
        assert bytes(range(16)).hex() not in repr(fam)
        assert "key" not in fam.session(0).metadata


class TestMitigation:
    def test_demo_scheme(self):
        r = mitigation_report(ternary_oa9_scheme(), Fraction(2, 3))
        assert r.passed and r.active_count == 6
        assert not mitigation_report(ternary_oa9_scheme(), 1).m1_partial_use

    def test_non_uniform(self):
        r = mitigation_report(Scheme(((0, 0), (0, 1), (1, 1)), 2), Fraction(1, 2))
        assert not r.m2_slot_uniform and r.m2_failing_slots == [0, 1]

    def test_weight_one(self):
        s = weight_one_scheme(3, 2)
        assert s.k == 3 and all(sum(1 for c in x if c) == 1 for x in s)
