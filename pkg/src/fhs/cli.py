"""Command-line front end: ``fhs construct | analyze | simulate | table2``.

Exit codes: 0 success, 2 invalid input, 3 a computation was refused because
it exceeds ``--budget``, 4 a reproduced value did not match its reference.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import constructions as cons
from . import coverfree as cf
from . import io as fio
from . import jammer as jm
from .core import (Scheme, correlation_summary, is_prime, lempel_greenberger_bound_1,
                   lempel_greenberger_bound_2, peng_fan_bound)
from .errors import ArgumentError, BudgetExceeded, DimensionError, NotApplicable
from .metrics import (DEFAULT_BUDGET, DEFAULT_SAMPLES, Mode, average_throughput_of_scheme,
                      worst_case_throughput_of_scheme)
from .slotkey import SlotKeySource, hmac_sha256_prf, mixer_prf, parse_key

EXIT_OK, EXIT_INVALID, EXIT_REFUSED, EXIT_MISMATCH = 0, 2, 3, 4
KEY_ENV = "FHS_SRLS_KEY"
SPOT_CHECK_MAX_K = 10 ** 4


def _seed(text: str) -> int:
    val = int(text, 0)
    if not 0 <= val < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return val


def _positive(text: str) -> int:
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return val


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text}") from exc


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=_seed, default=0, help="master seed (unsigned 64-bit)")
    p.add_argument("--threads", type=_positive, default=os.cpu_count() or 1,
                   help="worker processes for simulations (results do not depend on it)")
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET,
                   help="largest enumeration attempted before refusing")
    p.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fhs", allow_abbrev=False, description="Frequency-hopping scheme toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    con = sub.add_parser("construct", allow_abbrev=False, help="build a scheme file")
    kinds = con.add_subparsers(dest="kind", required=True)
    p = kinds.add_parser("mds", allow_abbrev=False, help="Reed-Solomon scheme over GF(p)")
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--tprime", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    _common(p)
    p = kinds.add_parser("rs-cfc", allow_abbrev=False, help="Reed-Solomon scheme sized for w interferers")
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    _common(p)
    p = kinds.add_parser("latin", allow_abbrev=False, help="cyclic Latin square as a scheme")
    p.add_argument("--v", type=int, required=True)
    _common(p)
    p = kinds.add_parser("srls", allow_abbrev=False, help="one session of the keyed Latin-square scheme")
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--session", type=_seed, default=0)
    p.add_argument("--key-file", type=Path, default=None,
                   help=f"file holding the 32-hex-digit key (else ${KEY_ENV})")
    p.add_argument("--prf", choices=["mixer", "hmac-sha256"], default="mixer")
    _common(p)
    p = kinds.add_parser("oa9", allow_abbrev=False, help="bundled ternary nine-sequence demonstration scheme")
    _common(p)

    an = sub.add_parser("analyze", allow_abbrev=False, help="analyse a scheme file")
    an.add_argument("scheme", type=Path)
    for name in ("correlation", "bounds", "throughput", "cfc", "oa", "mitigation"):
        an.add_argument(f"--{name}", action="store_true")
    an.add_argument("--w", type=int, default=None)
    an.add_argument("--alpha", type=_fraction, default=None)
    an.add_argument("--tprime", type=int, default=None)
    an.add_argument("--lambda", dest="lam", type=int, default=1)
    an.add_argument("--mode", choices=["exact", "montecarlo"], default="exact")
    an.add_argument("--samples", type=_positive, default=DEFAULT_SAMPLES)
    an.add_argument("--cfc-method", choices=["auto", "exhaustive", "distance", "sampled"], default="auto")
    an.add_argument("--usage-fraction", type=_fraction, default=Fraction(1, 2))
    an.add_argument("--csv", type=Path, default=None, help="also write throughput rows as CSV")
    _common(an)

    sim = sub.add_parser("simulate", allow_abbrev=False, help="run the adaptive jammer against a scheme file")
    sim.add_argument("scheme", type=Path)
    grp = sim.add_mutually_exclusive_group(required=True)
    grp.add_argument("--active-count", type=_positive, help="w+1; draw active sets at random per trial")
    grp.add_argument("--active", type=_int_list, help="fixed active sequence indices (0-based), one session")
    sim.add_argument("--victim", type=int, default=None, help="victim index (default: lowest active)")
    sim.add_argument("--trials", type=_positive, default=1000)
    sim.add_argument("--strategy", choices=[s.value for s in jm.Strategy], default=None)
    sim.add_argument("--scripted", default=None,
                     help="eavesdrop channels per slot in the file's channel numbering, e.g. '3' or '3;1,2'")
    sim.add_argument("--fixed-channel", type=int, default=None, help="channel for FixedChannel (file numbering)")
    sim.add_argument("--tie-break", choices=[t.value for t in jm.TieBreak], default=jm.TieBreak.SEEDED_RANDOM.value)
    sim.add_argument("--eavesdrop-count", type=int, default=1)
    sim.add_argument("--jam-count", type=int, default=1)
    sim.add_argument("--view", choices=["explicit", "product"], default=None)
    sim.add_argument("--key-file", type=Path, default=None,
                     help=f"key for fresh keyed Latin-square sessions per trial (else ${KEY_ENV})")
    sim.add_argument("--trace", type=Path, default=None, help="slot records as JSON lines (single session)")
    _common(sim)

    t2 = sub.add_parser("table2", allow_abbrev=False, help="recompute the RS parameter table and compare with the reference")
    t2.add_argument("--trials", type=_positive, default=200, help="simulated sessions per spot-checked row")
    t2.add_argument("--no-simulate", action="store_true", help="certificate-level check only")
    _common(t2)
    return parser


# -- construct ----------------------------------------------------------------

def _read_key(key_file: Optional[Path], required: bool = True) -> Optional[bytes]:
    if key_file is not None:
        return parse_key(Path(key_file).read_text(encoding="ascii"))
    text = os.environ.get(KEY_ENV)
    if text:
        return parse_key(text)
    if required:
        raise ArgumentError(f"no key: set {KEY_ENV} or pass --key-file")
    return None


def cmd_construct(args) -> int:
    if args.kind == "mds":
        scheme = cons.construct_mds_scheme(args.v, args.tprime, args.p)
    elif args.kind == "rs-cfc":
        scheme = cons.construct_rs_cfc(args.v, args.w, args.p)
    elif args.kind == "latin":
        square = cons.cyclic_latin_square(args.v)
        scheme = Scheme(square.grid, args.v, f"cyclic latin square v={args.v}",
                        {"construction": {"kind": "latin", "v": args.v}})
    elif args.kind == "srls":
        key = _read_key(args.key_file)
        prf = hmac_sha256_prf if args.prf == "hmac-sha256" else mixer_prf
        source = SlotKeySource(key, args.session, args.v, prf)
        scheme = cons.generate_srls_scheme(cons.cyclic_latin_square(args.v), source)
        scheme.metadata["construction"]["prf"] = args.prf
    else:
        scheme = cons.ternary_oa9_scheme()
    fio.write_json(fio.scheme_to_document(scheme), args.out)
    config = {k: v for k, v in vars(args).items() if k not in ("out", "key_file", "func", "threads")}
    _manifest("construct", config, args)
    return EXIT_OK


def _manifest(name: str, config: dict, args) -> None:
    if args.out is None:
        return
    clean = {k: (str(v) if isinstance(v, Path) else v) for k, v in config.items() if k != "func"}
    fio.write_json(fio.make_manifest(name, clean, args.seed), fio.manifest_path(args.out))


# -- analyze ------------------------------------------------------------------

def _refused(exc: BudgetExceeded) -> dict:
    return {"status": "refused", "needed": exc.needed, "budget": exc.budget, "reason": str(exc)}


def _lg2_inputs(v: int, m: int) -> Optional[tuple[int, int, int]]:
    """(p, n, i) with v = p^n - 1 and m = p^i, if any."""
    for n in range(1, (v + 1).bit_length() + 1):
        p = round((v + 1) ** (1 / n))
        for cand in (p - 1, p, p + 1):
            if cand >= 2 and cand ** n == v + 1 and is_prime(cand):
                i = round(math.log(m, cand)) if m > 1 else 0
                if 1 <= i <= n and cand ** i == m:
                    return cand, n, i
    return None


def _analyze_correlation(scheme, args) -> dict:
    work = scheme.k * scheme.k * scheme.v
    if work > args.budget:
        raise BudgetExceeded(work, args.budget, "pairwise correlation profiles")
    s = correlation_summary(scheme)
    return {"mode": Mode.EXACT, "summary": s}


def _analyze_bounds(scheme, measured: Optional[int]) -> dict:
    out = {"mode": "Exact"}
    lg1 = lempel_greenberger_bound_1(scheme.v, scheme.m) if scheme.v >= 2 else None
    out["LempelGreenberger1"] = lg1 if lg1 else {"status": "not_applicable", "reason": "v < 2"}
    pqi = _lg2_inputs(scheme.v, scheme.m)
    out["LempelGreenberger2"] = (lempel_greenberger_bound_2(*pqi) if pqi else
                                 {"status": "not_applicable", "reason": "v + 1 and m are not powers of one prime"})
    pf = peng_fan_bound(scheme.v, scheme.k, scheme.m)
    out["PengFan"] = pf.compared_with(measured) if measured is not None else pf
    return out


def _analyze_throughput(scheme, args) -> dict:
    if args.w is None:
        raise ArgumentError("--throughput needs --w")
    mode = Mode.MONTE_CARLO if args.mode == "montecarlo" else Mode.EXACT
    kw = dict(mode=mode, budget=args.budget, samples=args.samples, seed=args.seed)
    out = {}
    for name, fn in (("average_scheme", average_throughput_of_scheme),
                     ("worst_scheme", worst_case_throughput_of_scheme)):
        try:
            out[name] = fn(scheme, args.w, **kw)
        except BudgetExceeded as exc:
            out[name] = _refused(exc)
    return out


CFC_METHODS = {"exhaustive": cf.CfcMethod.EXHAUSTIVE, "distance": cf.CfcMethod.DISTANCE_CERTIFICATE,
               "sampled": cf.CfcMethod.SAMPLED}


def _analyze_cfc(scheme, args) -> dict:
    if args.w is None or args.alpha is None:
        raise ArgumentError("--cfc needs --w and --alpha")
    common = dict(budget=args.budget, trials=args.samples, seed=args.seed)
    if args.cfc_method != "auto":
        method = CFC_METHODS[args.cfc_method]
        return {"certificate": cf.is_cover_free(scheme, args.w, args.alpha, method, **common)}
    notes = []
    try:
        return {"certificate": cf.is_cover_free(scheme, args.w, args.alpha, cf.CfcMethod.EXHAUSTIVE, **common)}
    except BudgetExceeded as exc:
        notes.append(f"exhaustive refused: {exc}")
    try:
        cert = cf.is_cover_free(scheme, args.w, args.alpha, cf.CfcMethod.DISTANCE_CERTIFICATE, **common)
        if cert.verdict != cf.CfcVerdict.UNAVAILABLE:
            return {"certificate": cert, "notes": notes}
        notes.append("distance certificate unavailable")
    except (NotApplicable, BudgetExceeded) as exc:
        notes.append(f"distance certificate not applicable: {exc}")
    return {"certificate": cf.is_cover_free(scheme, args.w, args.alpha, cf.CfcMethod.SAMPLED, **common),
            "notes": notes}


def _analyze_oa(scheme, args) -> dict:
    if args.tprime is None:
        raise ArgumentError("--oa needs --tprime")
    return {"mode": "Exact", "result": cons.verify_orthogonal_array(scheme, args.tprime, args.lam)}


def _throughput_rows(report: dict) -> list[dict]:
    rows = []
    for name, rep in (report.get("throughput") or {}).items():
        if isinstance(rep, dict):
            rows.append({"measure": name, "status": "refused"})
            continue
        rows.append({"measure": name, "w": rep.w, "mode": rep.mode, "value": rep.value,
                     "decimal": f"{float(rep.value):.6f}", "standard_error": rep.standard_error,
                     "sample_count": rep.sample_count, "estimate_from_above": rep.estimate_from_above})
    return rows


def cmd_analyze(args) -> int:
    scheme = fio.load_scheme(args.scheme)
    chosen = [n for n in ("correlation", "bounds", "throughput", "cfc", "oa", "mitigation") if getattr(args, n)]
    if not chosen:
        chosen = ["correlation", "bounds"]
    report = {"scheme": {"label": scheme.label, "v": scheme.v, "k": scheme.k, "m": scheme.m}}
    refused = False
    measured = None
    for name in chosen:
        try:
            if name == "correlation":
                report[name] = _analyze_correlation(scheme, args)
                measured = report[name]["summary"].overall
            elif name == "bounds":
                report[name] = _analyze_bounds(scheme, measured)
            elif name == "throughput":
                report[name] = _analyze_throughput(scheme, args)
                refused |= any(isinstance(r, dict) for r in report[name].values())
            elif name == "cfc":
                report[name] = _analyze_cfc(scheme, args)
            elif name == "oa":
                report[name] = _analyze_oa(scheme, args)
            else:
                mit = cons.mitigation_report(scheme, args.usage_fraction)
                report[name] = {"mode": "Exact", "result": mit, "passed": mit.passed}
        except BudgetExceeded as exc:
            report[name] = _refused(exc)
            refused = True
    fio.write_json(report, args.out)
    if args.csv is not None:
        fio.write_csv(_throughput_rows(report), args.csv)
    _manifest("analyze", {k: v for k, v in vars(args).items() if k not in ("out", "threads")}, args)
    return EXIT_REFUSED if refused else EXIT_OK


# -- simulate -----------------------------------------------------------------

def _jammer_config(args, base: int) -> jm.JammerConfig:
    script = ()
    if args.scripted:
        script = tuple(tuple(int(c) - base for c in part.split(",") if c.strip())
                       for part in args.scripted.split(";"))
    strategy = args.strategy or (jm.Strategy.SCRIPTED.value if script else jm.Strategy.MAX_PROBABILITY.value)
    fixed = None if args.fixed_channel is None else args.fixed_channel - base
    return jm.JammerConfig(eavesdrop_count=args.eavesdrop_count, jam_count=args.jam_count,
                           strategy=jm.Strategy(strategy), fixed_channel=fixed, script=script,
                           tie_break=jm.TieBreak(args.tie_break), rng_seed=args.seed)


def cmd_simulate(args) -> int:
    scheme = fio.load_scheme(args.scheme)
    base = fio.channel_base(scheme)
    jammer = _jammer_config(args, base)
    jammer.validate(scheme.m)
    if args.active is not None:
        victim = args.victim if args.victim is not None else min(args.active)
        session = jm.SessionConfig(scheme, tuple(args.active), victim, args.seed, view=args.view)
        trace = jm.run_session(session, jammer)
        if args.trace is not None:
            fio.write_trace(trace, args.trace)
        fio.write_json({"scheme": scheme.label, "channel_base": base, "trace": trace}, args.out)
    else:
        model = scheme
        kind = (scheme.metadata.get("construction") or {}).get("kind")
        if kind == "srls":
            key = _read_key(args.key_file, required=False)
            if key is not None:
                square = cons.LatinSquare(tuple(tuple(r) for r in scheme.metadata["latin_square"]))
                prf = hmac_sha256_prf if scheme.metadata["construction"].get("prf") == "hmac-sha256" else mixer_prf
                model = cons.SrlsFamily(square, key, prf)
        summary = jm.estimate_gamma(model, args.active_count - 1, jammer, args.trials, args.seed,
                                    workers=args.threads, view=args.view)
        fio.write_json({"scheme": scheme.label, "fresh_sessions": model is not scheme, "summary": summary},
                       args.out)
    config = {k: v for k, v in vars(args).items() if k not in ("out", "threads", "key_file")}
    _manifest("simulate", config, args)
    return EXIT_OK


# -- table2 -------------------------------------------------------------------

def table2_report(simulate: bool = True, trials: int = 200, seed: int = 0, workers: int = 1) -> dict:
    rows, diffs = [], []
    for v, m, tprime, w, alpha_str, gamma_v in cf.TABLE2_EXPECTED:
        row = cf.table2_row(v, m, tprime, w)
        cells = {
            "w": (w, row.w),
            "alpha": (alpha_str, row.alpha_4dp),
            "gamma_v": (gamma_v, row.gamma_v),
        }
        ok_alpha = cf.alpha_matches(alpha_str, row.alpha)
        entry = {"v": v, "m": m, "tprime": tprime, "k": row.k, "d": row.d, "w": row.w,
                 "alpha": row.alpha, "alpha_4dp": row.alpha_4dp, "gamma_v": row.gamma_v,
                 "expected": {"w": w, "alpha": alpha_str, "gamma_v": gamma_v},
                 "diagnostics": row.diagnostics}
        for name, (want, got) in cells.items():
            good = ok_alpha if name == "alpha" else want == got
            if not good:
                diffs.append({"row": f"({v}, {m}^{tprime}, {m})", "cell": name, "expected": want, "got": got})
        if simulate and row.k <= SPOT_CHECK_MAX_K:
            scheme = cons.construct_mds_scheme(v, tprime, m)
            summ = jm.estimate_gamma(scheme, w, jm.JammerConfig(), trials, seed, workers=workers)
            slots = summ.min_identification_slot
            passed = slots is None or slots >= tprime
            entry["spot_check"] = {"trials": trials, "min_identification_slot": slots,
                                   "min_gamma_v": summ.min_gamma_v, "passed": passed}
            if not passed:
                diffs.append({"row": f"({v}, {m}^{tprime}, {m})", "cell": "simulated_gamma_v",
                              "expected": f">= {tprime}", "got": slots})
        rows.append(entry)
    return {"rows": rows, "diffs": diffs, "passed": not diffs}


def cmd_table2(args) -> int:
    report = table2_report(not args.no_simulate, args.trials, args.seed, args.threads)
    fio.write_json(report, args.out)
    _manifest("table2", {k: v for k, v in vars(args).items() if k not in ("out", "threads")}, args)
    if not report["passed"]:
        for d in report["diffs"]:
            print(f"mismatch {d['row']} {d['cell']}: expected {d['expected']}, got {d['got']}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


COMMANDS = {"construct": cmd_construct, "analyze": cmd_analyze, "simulate": cmd_simulate, "table2": cmd_table2}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (ArgumentError, DimensionError, NotApplicable, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
