"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line and the lines are repeated in the
pytest terminal summary. Reference values come from the slow helpers in
``oracles`` wherever an independent computation is possible.
"""

import itertools
import json
import os
import random
import time
from fractions import Fraction

import oracles
from acceptance_log import criterion
from fhs import cli
from fhs import io as fio
from fhs.constructions import (SrlsFamily, construct_mds_scheme, cyclic_latin_square, generate_srls_scheme,
                               ternary_oa9_scheme, verify_min_distance, verify_orthogonal_array)
from fhs.core import Scheme, correlation_summary, lempel_greenberger_bound_1, max_autocorrelation, peng_fan_bound
from fhs.coverfree import CfcMethod, CfcVerdict, TABLE2_EXPECTED, alpha_matches, is_cover_free, table2_row
from fhs.jammer import (JammerConfig, Outcome, SessionConfig, Strategy, TieBreak, estimate_gamma,
                        luck_schedule_analysis, predicted_search_size, replay_luck_schedule, run_session)
from fhs.metrics import worst_case_throughput_of_scheme
from fhs.slotkey import SlotKeySource

WORKERS = os.cpu_count() or 1
KEY = bytes(range(16))


def run_cli(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out


class TestRsParameterTable:
    def test_all_rows_at_certificate_level(self, capsys):
        with criterion(1, "RS parameter table reproduced (w, alpha, gamma_v) in under 5 s") as rec:
            start = time.perf_counter()
            for v, m, tprime, w, alpha, gamma_v in TABLE2_EXPECTED:
                row = table2_row(v, m, tprime, w)
                assert row.d == v - tprime + 1 and row.d * w * w > v * (w * w - 1)
                assert w + 1 <= (m - 1) ** tprime
                assert (row.w, row.gamma_v) == (w, gamma_v) and alpha_matches(alpha, row.alpha)
                assert row.alpha_4dp == alpha.ljust(6, "0")[:6]
            code, out = run_cli(capsys, "table2", "--threads", WORKERS)
            elapsed = time.perf_counter() - start
            report = json.loads(out)
            assert code == cli.EXIT_OK and report["passed"] and not report["diffs"]
            assert len(report["rows"]) == 12
            checked = [r for r in report["rows"] if "spot_check" in r]
            assert checked and all(r["spot_check"]["passed"] for r in checked)
            assert elapsed < 5
            rec.note(f"12/12 rows, {len(checked)} simulated spot checks")


class TestIdentificationNeedsTprimeSlots:
    def test_minimum_identification_slot(self):
        with criterion(2, "MaxProbability jammer needs at least t' = 2 slots, in under 60 s") as rec:
            start = time.perf_counter()
            small = estimate_gamma(construct_mds_scheme(3, 2, 3), 3, JammerConfig(), 10 ** 4, seed=1,
                                   workers=WORKERS)
            assert small.trials == 10 ** 4
            assert small.min_identification_slot is not None and small.min_identification_slot >= 2
            rec.note(f"mds(3,2,3) w+1=4: min slot {small.min_identification_slot}")
            big = construct_mds_scheme(23, 2, 23)
            assert big.k == 529
            for active in (6, 22, 22 ** 2):
                summ = estimate_gamma(big, active - 1, JammerConfig(), 2000, seed=active, workers=WORKERS)
                assert summ.min_identification_slot is None or summ.min_identification_slot >= 2
                rec.note(f"mds(23,2,23) w+1={active}: min slot {summ.min_identification_slot}")
            assert time.perf_counter() - start < 60


class TestDemoSchemeTrace:
    def test_scripted_identification_and_unlucky_replay(self, capsys, tmp_path):
        with criterion(3, "demonstration scheme: one unlucky slot identifies, sizes 9, 6, 4") as rec:
            demo = ternary_oa9_scheme()
            cfg = JammerConfig(strategy=Strategy.SCRIPTED, script=((2,),), tie_break=TieBreak.LOWEST_CHANNEL)
            tr = run_session(SessionConfig(demo, range(6), 0), cfg)
            first = tr.records[0]
            assert first.eavesdropped == (2,) and first.lucky is False
            assert first.size_before == 9 and first.size_after == 6
            assert tr.identification_slot == 1 and tr.outcome == Outcome.SEARCH_SPACE_AT_MOST_ACTIVE
            assert replay_luck_schedule(demo, [False, False]) == [9, 6, 4]
            # the same run through the CLI, channel 3 in the file's 1-based numbering
            path = tmp_path / "demo.json"
            run_cli(capsys, "construct", "oa9", "--out", path)
            code, out = run_cli(capsys, "simulate", path, "--active", "0,1,2,3,4,5", "--scripted", "3",
                                "--tie-break", "LowestChannel")
            trace = json.loads(out)["trace"]
            assert code == 0 and trace["identification_slot"] == 1
            assert trace["records"][0]["size_after"] == 6
            rec.note("|S*_1| = 6, identified at slot 1; unlucky replay [9, 6, 4]")


class TestSearchSpaceLaw:
    def test_every_luck_schedule(self):
        with criterion(4, "search-space size (m-1)^B m^(t'-t) for every luck schedule") as rec:
            total = 0
            for m, tprime in [(3, 2), (5, 2), (3, 3)]:
                s = construct_mds_scheme(m, tprime, m)
                assert verify_orthogonal_array(s, tprime, 1).passed
                for schedule in itertools.product([True, False], repeat=tprime):
                    for active in (0, s.k // 2, s.k - 1):
                        sizes = replay_luck_schedule(s, list(schedule), active_index=active)
                        assert len(sizes) == tprime + 1
                        for t, size in enumerate(sizes):
                            unlucky = schedule[:t].count(False)
                            assert size == predicted_search_size(m, tprime, t, unlucky)
                            assert size == (m - 1) ** unlucky * m ** (tprime - t)
                    assert luck_schedule_analysis(s, tprime, tprime, schedule.count(False), replay=True).predicted \
                        == (m - 1) ** schedule.count(False)
                    total += 1
            rec.note(f"{total} schedules over (3,2), (5,2), (3,3)")


def random_scheme(rng):
    v, m, k = rng.randint(2, 6), rng.randint(2, 4), rng.randint(2, 8)
    return Scheme(tuple(tuple(rng.randrange(m) for _ in range(v)) for _ in range(k)), m)


def alpha_grid(boundary, v):
    grid = [Fraction(0), Fraction(1, 5), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(5, 6),
            Fraction(9, 10), Fraction(1, 2 * v)]
    near = [boundary, boundary - Fraction(1, 2 * v), boundary + Fraction(1, 2 * v)]
    chosen = [a for a in near if 0 <= a < 1]
    for a in grid:
        if len(chosen) == 8:
            break
        if a not in chosen:
            chosen.append(a)
    return chosen


class TestCoverFreeEquivalence:
    def test_random_schemes(self):
        with criterion(5, "exhaustive cover-free check agrees with worst-case throughput > alpha") as rec:
            rng = random.Random(2024)
            checks = boundary_hits = 0
            for _ in range(500):
                s = random_scheme(rng)
                seqs = list(s)
                for w in range(1, min(3, s.k - 1) + 1):
                    rho = oracles.scheme_worst(seqs, w)
                    assert worst_case_throughput_of_scheme(s, w).value == rho
                    alphas = alpha_grid(rho, s.v)
                    assert len(alphas) == 8
                    for alpha in alphas:
                        cert = is_cover_free(s, w, alpha, CfcMethod.EXHAUSTIVE)
                        assert cert.verdict in (CfcVerdict.PROVEN_CFC, CfcVerdict.PROVEN_NOT_CFC)
                        assert (cert.verdict == CfcVerdict.PROVEN_CFC) == (rho > alpha) == oracles.is_cfc(seqs, w, alpha)
                        boundary_hits += alpha == rho
                        checks += 1
            assert boundary_hits > 0
            rec.note(f"{checks} (scheme, w, alpha) checks, {boundary_hits} exactly at the boundary")


class TestMdsIsOrthogonalArray:
    def test_small_prime_fields(self):
        with criterion(6, "RS schemes with p <= 7 are index-1 OAs with distance v - t' + 1") as rec:
            count = 0
            for p in (2, 3, 5, 7):
                for v in range(2, p + 1):
                    for tprime in range(1, min(3, v) + 1):
                        s = construct_mds_scheme(v, tprime, p)
                        assert s.k == p ** tprime
                        assert verify_orthogonal_array(s, tprime, 1).passed
                        assert oracles.is_oa(list(s), p, tprime, 1)
                        d = oracles.min_distance(list(s)) if s.k > 1 else None
                        assert d == v - tprime + 1
                        assert verify_min_distance(Scheme(s.sequences, s.m)).d == d
                        count += 1
            rec.note(f"{count} parameter sets (v = 1 is outside the builder's domain)")


class TestBoundSoundness:
    def test_random_sequences_and_schemes(self):
        with criterion(7, "bounds are sound on 10^4 random inputs; worked values exact") as rec:
            rng = random.Random(7)
            for _ in range(5000):
                v, m = rng.randint(2, 12), rng.randint(1, 6)
                x = [rng.randrange(m) for _ in range(v)]
                lg = lempel_greenberger_bound_1(v, m)
                assert lg.raw_value == oracles.lg1(v, m)
                assert lg.integer_bound == oracles.ceil_clamped(oracles.lg1(v, m))
                assert oracles.auto_max(x) >= lg.integer_bound
                assert max_autocorrelation(x) == oracles.auto_max(x)
            for _ in range(5000):
                v, m, k = rng.randint(2, 8), rng.randint(2, 5), rng.randint(1, 5)
                seqs = [tuple(rng.randrange(m) for _ in range(v)) for _ in range(k)]
                pf = peng_fan_bound(v, k, m)
                assert pf.raw_value == oracles.pf(v, k, m)
                measured = oracles.set_max(seqs)
                assert measured >= oracles.ceil_clamped(pf.raw_value) == pf.integer_bound
                assert correlation_summary(Scheme(tuple(seqs), m)).overall == measured
            assert lempel_greenberger_bound_1(8, 4).raw_value == Fraction(8, 7)
            assert peng_fan_bound(3, 9, 3).integer_bound == 1
            assert peng_fan_bound(23, 23, 23).integer_bound == 1
            rec.note("LG1(8,4) = 8/7, Peng-Fan (3,9,3) and (23,23,23) = 1")


class TestKeyedLatinSquare:
    def test_permutation_columns_and_session_ended(self):
        with criterion(8, "keyed Latin square: throughput 1 for all w; 10^3 sessions all end unidentified") as rec:
            for v in range(2, 8):
                fam = SrlsFamily(cyclic_latin_square(v), KEY)
                for session in range(5):
                    s = fam.session(session)
                    for t in range(v):
                        assert sorted(x[t] for x in s) == list(range(v))
                    for w in range(1, v):
                        assert worst_case_throughput_of_scheme(s, w).value == 1
            hand = generate_srls_scheme(cyclic_latin_square(5), SlotKeySource(KEY, 9, 5))
            assert oracles.scheme_worst(list(hand), 4) == 1
            v = 23
            summ = estimate_gamma(SrlsFamily(cyclic_latin_square(v), KEY), 5, JammerConfig(), 1000, seed=23,
                                  workers=WORKERS)
            assert summ.trials == 1000 and summ.session_ended_fraction == 1 and summ.min_gamma_v == v
            assert summ.misidentified == 0
            target = 1 - 1 / v
            gap = abs(float(summ.mean_victim_throughput) - target)
            assert summ.victim_throughput_se > 0 and gap <= 3 * summ.victim_throughput_se
            rec.note(f"mean {float(summ.mean_victim_throughput):.4f} vs {target:.4f}, "
                     f"{gap / summ.victim_throughput_se:.2f} standard errors")


class TestDeterminism:
    def test_reports_identical_across_thread_counts(self, capsys, tmp_path, monkeypatch):
        with criterion(9, "simulate and analyze reports byte-identical at 1 and N threads") as rec:
            monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
            monkeypatch.setenv(cli.KEY_ENV, KEY.hex())
            mds = tmp_path / "mds.json"
            srls = tmp_path / "srls.json"
            run_cli(capsys, "construct", "mds", "--v", 5, "--tprime", 2, "--p", 5, "--out", mds)
            run_cli(capsys, "construct", "srls", "--v", 11, "--out", srls)
            runs = [
                ["simulate", mds, "--active-count", 5, "--trials", 600, "--seed", 99],
                ["simulate", srls, "--active-count", 4, "--trials", 300, "--seed", 5],
                ["simulate", mds, "--active", "1,7,12", "--seed", 3],
                ["analyze", mds, "--correlation", "--bounds", "--throughput", "--w", 2, "--mode", "montecarlo",
                 "--samples", 800, "--seed", 8],
                ["analyze", mds, "--cfc", "--w", 2, "--alpha", "1/5", "--cfc-method", "sampled", "--seed", 8],
            ]
            n_threads = max(4, WORKERS)
            for i, argv in enumerate(runs):
                outputs = []
                for threads in (1, n_threads, 1):
                    out = tmp_path / f"run{i}_{threads}_{len(outputs)}.json"
                    assert run_cli(capsys, *argv, "--threads", threads, "--out", out)[0] == 0
                    outputs.append(out.read_bytes())
                    manifest = json.loads(fio.manifest_path(out).read_text())
                    assert manifest["seed"] == argv[argv.index("--seed") + 1]
                assert outputs[0] == outputs[1] == outputs[2]
            rec.note(f"{len(runs)} commands at 1 and {n_threads} threads")
