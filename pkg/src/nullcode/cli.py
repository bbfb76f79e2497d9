"""Batch experiment driver.

Raw results go to JSON-lines files, summaries to CSV; every run is
deterministic given --seed.  Exit codes: 0 success, 1 assertion/check
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import glob as glob_mod
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import codes, configs, hashing, instances, proto, qsim, tbnc
from .codes import CodeSpec, DecoderParams
from .errors import NullcodeError, ParseError
from .gf import FieldCtx


def _load_spec(args) -> CodeSpec:
    if getattr(args, "toy", False):
        return configs.toy_selfdual_spec()
    if getattr(args, "t", None) is not None:
        return codes.preset(args.t)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
        return CodeSpec.from_json(data.get("code", data))
    raise SystemExit("one of --t, --config, or --toy is required")


def _parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def _write_jsonl(path, records) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True))
            fh.write("\n")


def _emit(records, out) -> None:
    if out:
        _write_jsonl(out, records)
    else:
        for rec in records:
            print(json.dumps(rec, sort_keys=True))


# -- code subcommands ------------------------------------------------------------


def cmd_code_preset(args) -> int:
    spec = codes.preset(args.t)
    print(
        f"n={spec.n} q={spec.field.q} N={spec.N} m={spec.m} k={spec.k} "
        f"|C|={spec.size}"
    )
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(spec.to_json(), fh, sort_keys=True)
            fh.write("\n")
    return 0


def cmd_code_dual(args) -> int:
    spec = _load_spec(args)
    d = codes.dual(spec)
    print(json.dumps(d.to_json(), sort_keys=True))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(d.to_json(), fh, sort_keys=True)
            fh.write("\n")
    return 0


def cmd_code_decode(args) -> int:
    spec = _load_spec(args)
    params = DecoderParams.for_spec(spec, _parse_fraction(args.p))
    rng = np.random.default_rng(args.seed)
    dual_spec = codes.dual(spec)
    records = []
    failures = 0
    for trial in range(args.trials):
        msg = [int(rng.integers(spec.field.q)) for _ in range(dual_spec.dim)]
        x = codes.encode(dual_spec, msg)
        xu = codes.unfold(dual_spec, x)
        err = np.zeros(spec.N, dtype=np.int64)
        weight = int(rng.integers(params.radius_unfolded + 1))
        pos = rng.choice(spec.N, size=weight, replace=False)
        for pidx in pos:
            err[pidx] = int(rng.integers(1, spec.field.q))
        z = codes.fold(spec, (xu ^ err).tolist())
        got = codes.dual_decode(spec, params, z)
        ok = got == x
        failures += not ok
        records.append({"trial": trial, "weight": weight, "decoded": bool(ok)})
    _emit(records, args.out)
    print(f"decode: {args.trials - failures}/{args.trials} ok")
    return 1 if failures else 0


def cmd_code_listrec(args) -> int:
    spec = _load_spec(args)
    rng = np.random.default_rng(args.seed)
    records = []
    for trial in range(args.trials):
        S = [
            set(
                int(x)
                for x in rng.choice(spec.sigma_size, size=args.ell, replace=False)
            )
            for _ in range(spec.n)
        ]
        count = codes.list_recover_count(spec, S, args.zeta)
        records.append({"trial": trial, "count": count})
    _emit(records, args.out)
    return 0


def cmd_code_lrcheck(args) -> int:
    out = codes.lr_param_check(
        args.N, args.m, args.k, args.ell, args.s, args.r, args.zeta, args.q
    )
    print(json.dumps(out, sort_keys=True))
    return 0 if out["ineq1"] and out["ineq2"] else 1


# -- instance subcommands -----------------------------------------------------------


def cmd_instance_gen(args) -> int:
    spec = _load_spec(args)
    inst = instances.sample_instance(spec, _parse_fraction(args.p), args.seed)
    if args.out:
        instances.save_instance(inst, args.out)
        print(f"wrote {args.out}")
    else:
        print(json.dumps(instances.instance_to_json(inst), sort_keys=True))
    return 0


def cmd_instance_verify(args) -> int:
    inst = instances.load_instance(args.infile)
    word = _parse_word(inst.spec, args.x)
    ok = instances.verify(inst, word)
    print("valid" if ok else "invalid")
    return 0 if ok else 1


def cmd_instance_solve(args) -> int:
    inst = instances.load_instance(args.infile)
    sols = instances.brute_solve(inst, jobs=args.jobs)
    records = [{"solution": [list(sym) for sym in s]} for s in sols]
    _emit(records, args.out)
    print(f"{len(sols)} solutions")
    return 0


def _parse_word(spec: CodeSpec, text: str):
    ranks = [int(tok) for tok in text.replace(",", " ").split()]
    if len(ranks) != spec.n:
        raise SystemExit(f"expected {spec.n} symbol ranks")
    return tuple(spec.rank_symbol(r) for r in ranks)


# -- qsim subcommands ------------------------------------------------------------


def cmd_qsim_qft(args) -> int:
    ctx = FieldCtx(args.s)
    mat = qsim.qft_matrix(ctx)
    residual = float(np.abs(mat @ mat.T - np.eye(ctx.q)).max())
    print(f"q={ctx.q} unitarity residual {residual:.2e}")
    return 0 if residual <= 1e-12 else 1


def _toy_run_config(args):
    spec = _load_spec(args)
    p = _parse_fraction(args.p)
    params = DecoderParams.for_spec(spec, p)
    return spec, p, params


def cmd_qsim_lemma51(args) -> int:
    spec, p, params = _toy_run_config(args)
    records = []
    failures = 0
    seed = args.seed
    produced = 0
    while produced < args.trials:
        inst = instances.sample_instance(spec, p, seed)
        seed += 1
        try:
            out = qsim.add_decode_pipeline(spec, inst, params)
        except NullcodeError as exc:
            records.append(
                {
                    "seed": seed - 1,
                    "skipped": str(exc),
                    "epsilon": None,
                    "delta": None,
                    "l2_distance": None,
                    "success_probability": None,
                }
            )
            continue
        produced += 1
        ok = out["l2_distance"] <= out["bound"]
        failures += not ok
        records.append(
            {
                "seed": seed - 1,
                "skipped": None,
                "epsilon": out["epsilon"],
                "delta": out["delta"],
                "l2_distance": out["l2_distance"],
                "success_probability": out["success_probability"],
            }
        )
    _emit(records, args.out)
    print(f"lemma51: {produced - failures}/{produced} within bound")
    return 1 if failures else 0


def cmd_qsim_alg1(args) -> int:
    spec, p, params = _toy_run_config(args)
    records = []
    seed = args.seed
    produced = 0
    while produced < args.trials:
        inst = instances.sample_instance(spec, p, seed)
        seed += 1
        try:
            out = qsim.run_smp_protocol(spec, inst, params)
        except NullcodeError as exc:
            records.append(
                {
                    "seed": seed - 1,
                    "skipped": str(exc),
                    "epsilon": None,
                    "delta": None,
                    "l2_distance": None,
                    "success_probability": None,
                }
            )
            continue
        produced += 1
        records.append(
            {
                "seed": seed - 1,
                "skipped": None,
                "epsilon": out["epsilon"],
                "delta": out["delta"],
                "l2_distance": out["l2_distance"],
                "success_probability": out["success_probability"],
            }
        )
    _emit(records, args.out)
    return 0


def cmd_qsim_claim66(args) -> int:
    ctx = FieldCtx(1)
    m = int(math.log2(args.sigma))
    if 1 << m != args.sigma:
        raise SystemExit("--sigma must be a power of two")
    stats = qsim.table_fourier_stats(
        ctx, m, _parse_fraction(args.p), trials=args.trials, seed=args.seed
    )
    printable = {k: v for k, v in stats.items() if not k.endswith("_exact")}
    print(json.dumps(printable, sort_keys=True))
    if args.out:
        _write_jsonl(args.out, [printable])
    return 0


# -- proto subcommands -------------------------------------------------------------


def cmd_proto_drp(args) -> int:
    from .density import (
        density_restoring_partition,
        expected_codimension,
        min_entropy,
        validate_partition,
    )

    rng = np.random.default_rng(args.seed)
    records = []
    for trial in range(args.trials):
        universe = 1 << args.n_bits
        size = int(rng.integers(2, universe + 1))
        X = rng.choice(universe, size=size, replace=False)
        parts = density_restoring_partition(X, args.gamma, tuple(range(args.n_bits)))
        validate_partition(X, parts, args.gamma, tuple(range(args.n_bits)))
        records.append(
            {
                "trial": trial,
                "set_size": size,
                "parts": len(parts),
                "expected_codim": expected_codimension(parts),
                "gap_reference": args.n_bits - min_entropy(X, tuple(range(args.n_bits))),
            }
        )
    _emit(records, args.out)
    return 0


def cmd_proto_transform(args) -> int:
    rng = np.random.default_rng(args.seed)
    records = []
    failures = 0
    for trial in range(args.trials):
        tree = proto.random_onebit_tree(
            rng, args.n_bits, args.n_bits, args.depth, labels=list(range(4))
        )
        out = proto.subcube_like_transform(tree, args.gamma)
        nodes = proto.validate_subcube_like(out, args.gamma)
        pairs = [
            (int(rng.integers(1 << args.n_bits)), int(rng.integers(1 << args.n_bits)))
            for _ in range(args.pairs)
        ]
        same = proto.outputs_agree(tree, out, pairs)
        failures += not same
        stats = proto.transcript_stats(out)
        records.append(
            {
                "trial": trial,
                "nodes": nodes,
                "outputs_match": bool(same),
                "entropy": stats["entropy"],
                "cost": out.cost(),
                "orig_cost": tree.cost(),
            }
        )
    _emit(records, args.out)
    return 1 if failures else 0


def cmd_proto_cleanup(args) -> int:
    rng = np.random.default_rng(args.seed)
    records = []
    failures = 0
    for trial in range(args.trials):
        labels = list(range(3))
        tree = proto.random_onebit_tree(
            rng, args.n_bits, args.n_bits, args.depth, labels=labels
        )
        valid_a = lambda label, x: (x >> (label % args.n_bits)) & 1 == 0
        valid_b = lambda label, y: (y >> (label % args.n_bits)) & 1 == 0
        err = proto.measure_error(tree, valid_a, valid_b)
        cleaned = proto.cleanup(tree, err, valid_a, valid_b)
        ok = proto.never_wrong(cleaned, valid_a, valid_b)
        bot = proto.bottom_probability(cleaned)
        failures += not (ok and bot <= 2 * err + 1e-12)
        records.append({"trial": trial, "error": err, "bot": bot, "sound": bool(ok)})
    _emit(records, args.out)
    return 1 if failures else 0


def cmd_proto_run(args) -> int:
    rng = np.random.default_rng(args.seed)
    tree = proto.random_onebit_tree(
        rng, args.n_bits, args.n_bits, args.depth, labels=list(range(4))
    )
    stats = proto.transcript_stats(tree)
    print(json.dumps(stats, sort_keys=True))
    return 0


def cmd_proto_danger(args) -> int:
    spec = configs.toy_repetition_spec(n=args.n, s=args.s)
    insts = [
        instances.sample_instance(spec, _parse_fraction(args.p), args.seed + i)
        for i in range(args.trials)
    ]

    def label_for(x_bits, y_bits):
        tables = _tables_from_bits(spec, x_bits, y_bits)
        inst = instances.with_tables(insts[0], tables)
        sols = instances.brute_solve(inst)
        return sols[0] if sols else proto.BOT

    half_bits = spec.n * spec.sigma_size // 2
    tree = proto.reveal_tree(label_for, half_bits, half_bits)
    out = proto.danger_track(tree, spec, insts)
    if args.out:
        rows = [("seed", "cost", "output", "correct")]
        for inst, ledger in zip(insts, out["ledgers"]):
            transcript, label = proto.run(
                tree, *(proto._bits_to_int(b) for b in instances.split_bits(inst))
            )
            correct = label is not proto.BOT and instances.verify(inst, label)
            rows.append(
                (
                    str(inst.seed),
                    str(len(transcript)),
                    "bot" if label is proto.BOT else str(label),
                    str(bool(correct)).lower(),
                )
            )
        with open(args.out, "w", newline="") as fh:
            csv.writer(fh).writerows(rows)
    print(
        json.dumps(
            {
                "runs": len(out["ledgers"]),
                "danger_events": out["danger_events"],
                "danger_to_solution_rate": out["danger_to_solution_rate"],
            },
            sort_keys=True,
        )
    )
    return 0


def _tables_from_bits(spec, x_bits: int, y_bits: int) -> np.ndarray:
    sp = instances.Split(spec.n, spec.sigma_size)
    tables = np.zeros((spec.n, spec.sigma_size), dtype=np.uint8)
    for i in range(spec.n):
        for e in range(spec.sigma_size):
            flat = sp.flat_index(i + 1, e)
            side = x_bits if sp.side(i + 1) == "A" else y_bits
            tables[i, e] = (side >> flat) & 1
    return tables


# -- hash subcommands ------------------------------------------------------------


def cmd_hash_check(args) -> int:
    family = hashing.HashFamily(
        key_field=FieldCtx(args.r),
        lam=args.lam,
        n=args.n,
        sigma_size=args.sigma,
    )
    pts = []
    j = 0
    while len(pts) < args.lam:
        pts.append((j % args.sigma, (j // args.sigma) % args.n + 1))
        j += 1
    ok = hashing.independence_check(family, pts)
    print("independent" if ok else "NOT independent")
    return 0 if ok else 1


def cmd_hash_attack(args) -> int:
    spec = configs.toy_repetition_spec(n=args.n, s=args.s)
    family = configs.toy_family(spec)
    failures = 0
    records = []
    for trial in range(args.trials):
        tb = tbnc.make_tbnc(spec, family, 1, args.seed + trial)
        key = hashing.attack_solve(family, spec, tb.copies[0])
        if key is None:
            failures += 1
            records.append({"trial": trial, "solved": False, "verified": False})
            continue
        word = codes.fold(spec, codes.codeword_matrix(spec)[1])
        ok = tbnc.tbnc_verify(tb, key, [word])
        failures += not ok
        records.append({"trial": trial, "solved": True, "verified": bool(ok)})
    _emit(records, args.out)
    print(f"attack: {args.trials - failures}/{args.trials} verified")
    return 1 if failures else 0


# -- tbnc subcommands ------------------------------------------------------------


def cmd_tbnc_gen(args) -> int:
    spec = configs.toy_repetition_spec(n=args.n, s=args.s)
    family = configs.toy_family(spec)
    tb = tbnc.make_tbnc(spec, family, args.t, args.seed)
    payload = {
        "t": tb.t,
        "family": family.to_json(),
        "code": spec.to_json(),
        "copies": [instances.instance_to_json(c) for c in tb.copies],
    }
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, sort_keys=True)
            fh.write("\n")
        print(f"wrote {args.out}")
    else:
        print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_tbnc_verify(args) -> int:
    with open(args.infile) as fh:
        payload = json.load(fh)
    spec = CodeSpec.from_json(payload["code"])
    family = hashing.HashFamily.from_json(payload["family"])
    copies = tuple(instances.instance_from_json(c) for c in payload["copies"])
    tb = tbnc.TbncInstance(t=payload["t"], spec=spec, family=family, copies=copies)
    key = hashing.HashKey(tuple(int(c) for c in args.key.split(",")))
    sols = [
        _parse_word(spec, chunk) for chunk in args.solutions.split(";")
    ]
    ok = tbnc.tbnc_verify(tb, key, sols)
    print("valid" if ok else "invalid")
    return 0 if ok else 1


def cmd_tbnc_alg2(args) -> int:
    spec = configs.toy_selfdual_spec()
    family = configs.toy_family(spec)
    params = DecoderParams.for_spec(spec, Fraction(1, 64))
    records = []
    successes = 0
    for trial in range(args.trials):
        tb = tbnc.make_tbnc(spec, family, args.t, args.seed + trial)
        try:
            out = tbnc.run_keyed_smp(tb, params, seed=args.seed + trial)
        except NullcodeError as exc:
            records.append(
                {"trial": trial, "skipped": str(exc), "success": False, "retries": None}
            )
            continue
        successes += out["success"]
        records.append(
            {
                "trial": trial,
                "skipped": None,
                "success": bool(out["success"]),
                "retries": out["retries"],
            }
        )
    _emit(records, args.out)
    print(f"alg2: {successes}/{args.trials} succeeded")
    return 0


def cmd_tbnc_totality(args) -> int:
    spec = configs.toy_repetition_spec(n=args.n, s=args.s)
    family = configs.toy_family(spec, lam=args.lam)
    out = tbnc.totality_scan(
        spec, family, args.t, args.samples, args.keys, args.seed
    )
    print(json.dumps(out, sort_keys=True))
    if args.out:
        _write_jsonl(args.out, [out])
    return 0


# -- report ---------------------------------------------------------------------


def cmd_report(args) -> int:
    paths = sorted(glob_mod.glob(args.glob))
    rows = []
    for path in paths:
        schema = None
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(path, lineno, str(exc)) from exc
                if not isinstance(rec, dict):
                    raise ParseError(path, lineno, "record is not an object")
                if schema is None:
                    schema = set(rec)
                elif set(rec) != schema:
                    raise ParseError(path, lineno, "record schema changed mid-file")
                rows.append((path, rec))
    summary = {}
    for path, rec in rows:
        for key, val in rec.items():
            if isinstance(val, bool):
                val = float(val)
            if isinstance(val, (int, float)):
                summary.setdefault((path, key), []).append(float(val))
    lines = [("file", "field", "count", "mean", "std")]
    for (path, key), vals in sorted(summary.items()):
        arr = np.array(vals)
        lines.append(
            (path, key, str(len(vals)), f"{arr.mean():.6g}", f"{arr.std():.6g}")
        )
    if args.out:
        with open(args.out, "w", newline="") as fh:
            csv.writer(fh).writerows(lines)
        print(f"wrote {args.out}")
    else:
        for row in lines:
            print(",".join(row))
    return 0


# -- wiring ----------------------------------------------------------------------


def _add_common(p, trials=100):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nullcode")
    sub = ap.add_subparsers(dest="group", required=True)

    code = sub.add_parser("code").add_subparsers(dest="cmd", required=True)
    p = code.add_parser("preset")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_code_preset)
    p = code.add_parser("dual")
    p.add_argument("--t", type=int)
    p.add_argument("--config")
    p.add_argument("--toy", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_code_dual)
    p = code.add_parser("decode")
    p.add_argument("--t", type=int)
    p.add_argument("--config")
    p.add_argument("--toy", action="store_true")
    p.add_argument("--p", default="1/64")
    _add_common(p)
    p.set_defaults(fn=cmd_code_decode)
    p = code.add_parser("listrec")
    p.add_argument("--t", type=int)
    p.add_argument("--config")
    p.add_argument("--toy", action="store_true")
    p.add_argument("--zeta", type=float, default=0.4)
    p.add_argument("--ell", type=int, default=1)
    _add_common(p, trials=10)
    p.set_defaults(fn=cmd_code_listrec)
    p = code.add_parser("lrcheck")
    for name, typ in (
        ("N", float), ("m", float), ("k", float), ("ell", float),
        ("s", float), ("r", float), ("zeta", float), ("q", float),
    ):
        p.add_argument(f"--{name}", type=typ, required=True)
    p.set_defaults(fn=cmd_code_lrcheck)

    inst = sub.add_parser("instance").add_subparsers(dest="cmd", required=True)
    p = inst.add_parser("gen")
    p.add_argument("--t", type=int)
    p.add_argument("--config")
    p.add_argument("--toy", action="store_true")
    p.add_argument("--p", default="1/64")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_instance_gen)
    p = inst.add_parser("verify")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--x", required=True, help="space-separated symbol ranks")
    p.set_defaults(fn=cmd_instance_verify)
    p = inst.add_parser("solve")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_instance_solve)

    qs = sub.add_parser("qsim").add_subparsers(dest="cmd", required=True)
    p = qs.add_parser("qft")
    p.add_argument("--s", type=int, default=2)
    p.set_defaults(fn=cmd_qsim_qft)
    p = qs.add_parser("lemma51")
    p.add_argument("--t", type=int)
    p.add_argument("--config")
    p.add_argument("--toy", action="store_true")
    p.add_argument("--p", default="1/16")
    _add_common(p)
    p.set_defaults(fn=cmd_qsim_lemma51)
    p = qs.add_parser("alg1")
    p.add_argument("--t", type=int)
    p.add_argument("--config")
    p.add_argument("--toy", action="store_true")
    p.add_argument("--p", default="1/16")
    _add_common(p)
    p.set_defaults(fn=cmd_qsim_alg1)
    p = qs.add_parser("claim66")
    p.add_argument("--sigma", type=int, default=4)
    p.add_argument("--p", default="1/4")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_qsim_claim66)

    pr = sub.add_parser("proto").add_subparsers(dest="cmd", required=True)
    p = pr.add_parser("drp")
    p.add_argument("--n-bits", type=int, default=12)
    p.add_argument("--gamma", type=float, default=0.8)
    _add_common(p, trials=50)
    p.set_defaults(fn=cmd_proto_drp)
    p = pr.add_parser("transform")
    p.add_argument("--n-bits", type=int, default=10)
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--gamma", type=float, default=0.8)
    p.add_argument("--pairs", type=int, default=1000)
    _add_common(p, trials=20)
    p.set_defaults(fn=cmd_proto_transform)
    p = pr.add_parser("cleanup")
    p.add_argument("--n-bits", type=int, default=6)
    p.add_argument("--depth", type=int, default=4)
    _add_common(p, trials=20)
    p.set_defaults(fn=cmd_proto_cleanup)
    p = pr.add_parser("run")
    p.add_argument("--n-bits", type=int, default=8)
    p.add_argument("--depth", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_proto_run)
    p = pr.add_parser("danger")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--p", default="1/4")
    _add_common(p, trials=50)
    p.set_defaults(fn=cmd_proto_danger)

    ha = sub.add_parser("hash").add_subparsers(dest="cmd", required=True)
    p = ha.add_parser("check")
    p.add_argument("--lam", type=int, default=2)
    p.add_argument("--r", type=int, default=4)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--sigma", type=int, default=4)
    p.set_defaults(fn=cmd_hash_check)
    p = ha.add_parser("attack")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--s", type=int, default=2)
    _add_common(p, trials=20)
    p.set_defaults(fn=cmd_hash_attack)

    tb = sub.add_parser("tbnc").add_subparsers(dest="cmd", required=True)
    p = tb.add_parser("gen")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--t", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_tbnc_gen)
    p = tb.add_parser("verify")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--key", required=True, help="comma-separated coefficients")
    p.add_argument("--solutions", required=True, help="';'-separated rank words")
    p.set_defaults(fn=cmd_tbnc_verify)
    p = tb.add_parser("alg2")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--t", type=int, default=2)
    _add_common(p, trials=20)
    p.set_defaults(fn=cmd_tbnc_alg2)
    p = tb.add_parser("totality")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--lam", type=int, default=4)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--keys", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_tbnc_totality)

    p = sub.add_parser("report")
    p.add_argument("--glob", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_report)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except NullcodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
