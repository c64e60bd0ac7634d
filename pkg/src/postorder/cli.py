"""``postorder`` command-line interface.

Every subcommand prints one JSON report on stdout.  Exit status is 0 on
success, 1 for a domain error (invalid object, failed check) and 2 for a
usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
import numpy as np

from . import __version__
from . import classical, poset, postproc, quantum
from . import serialize as ser
from .errors import PostorderError, ValidationError
from .exact import Q, format_rational


class UsageError(Exception):
    pass


def _load(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from None


def _threads() -> int:
    raw = os.environ.get("POSTORDER_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"POSTORDER_THREADS must be an integer, got {raw!r}") from None


def _pmap(fn, items):
    threads = _threads()
    if threads == 1:
        return list(map(fn, items))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _write_dot(path, p):
    if path:
        with open(path, "w") as fh:
            fh.write(poset.to_dot(p))


def _check_space(args, evms):
    if getattr(args, "space", None):
        kind, d = ser.parse_space(args.space)
        if kind != "classical":
            raise UsageError("this command takes classical EVMs; use qcompare for quantum:d")
        for m in evms:
            if m.space.d != d:
                raise ValidationError(f"EVM lives on classical:{m.space.d}, expected classical:{d}")


def _evm_list(obj):
    items = obj["evms"] if isinstance(obj, dict) else obj
    labels = obj.get("labels") if isinstance(obj, dict) else None
    return [ser.evm_from_json(x) for x in items], labels


# --- subcommands -----------------------------------------------------------

def cmd_compare(args):
    m, n = ser.evm_from_json(_load(args.m)), ser.evm_from_json(_load(args.n))
    _check_space(args, [m, n])
    return ser.verdict_to_json(postproc.compare(m, n))


def cmd_pg(args):
    e, m = ser.ensemble_from_json(_load(args.ensemble)), ser.evm_from_json(_load(args.evm))
    return {"pg": format_rational(postproc.pg(e, m))}


def cmd_quotient(args):
    evms, _ = _evm_list(_load(args.evms))
    _check_space(args, evms)
    return {"classes": postproc.quotient(evms)}


def cmd_dim(args):
    p = ser.poset_from_json(_load(args.poset))
    res = poset.order_dimension(p, args.max_k)
    _write_dot(args.dot, p)
    return {"dimension": res.k, "realizer": res.realizer.to_json()}


def cmd_monotones(args):
    p = ser.poset_from_json(_load(args.poset))
    if args.indicator:
        fam = poset.indicator_family(p)
        return {"family": "indicator", "size": len(fam.functions), "monotones": fam.to_json(),
                "characterizes": poset.characterizes(p, fam)}
    k, fam = poset.order_monotone_dimension(p, args.max_k)
    return {"family": "rank", "dimension": k, "monotones": fam.to_json(),
            "characterizes": poset.characterizes(p, fam)}


def cmd_standard_example(args):
    if args.n < 2:
        raise UsageError("standard-example needs n >= 2")
    p = poset.standard_example(args.n)
    _write_dot(args.dot, p)
    return {"poset": p.to_json()}


def main1_report(n: int, dot: str | None = None) -> dict:
    evms, S = poset.main1_embedding(n)
    labels = list(S.labels)
    idx = [(i, j) for i in range(len(evms)) for j in range(i + 1, len(evms))]
    verdicts = _pmap(lambda ij: postproc.compare(evms[ij[0]], evms[ij[1]]), idx)
    table = dict(zip(idx, verdicts))

    def lookup(i, j):
        return table[(i, j)] if i < j else table[(j, i)].relation.flipped()

    failures = poset.embedding_failures({lab: i for i, lab in enumerate(labels)}, S, lookup)
    if failures:
        x, y = failures[0]
        raise PostorderError(f"induced order disagrees with S_{n} at the pair ({x}, {y})")
    induced, _ = poset.induced_poset(list(range(len(evms))), lookup, labels=labels)
    if induced.labels != S.labels or induced.rel != S.rel:
        raise PostorderError(f"induced poset is not S_{n}")
    res = poset.order_dimension(induced)
    if res.k != n:
        raise PostorderError(f"induced poset has dimension {res.k}, expected {n}")
    _write_dot(dot, induced)
    return {
        "n": n,
        "s": [format_rational(x) for x in poset.parabola_parameters(n)],
        "evms": {lab: m.to_json() for lab, m in zip(labels, evms)},
        "comparisons": len(idx),
        "pairs": [{"x": labels[i], "y": labels[j], "verdict": v.relation.value}
                  for (i, j), v in table.items()],
        "isomorphic_to_standard_example": True,
        "poset": induced.to_json(),
        "hasse": [list(e) for e in poset.hasse_edges(induced)],
        "dimension": res.k,
        "realizer": res.realizer.to_json(),
    }


def cmd_main1(args):
    if args.n < 3:
        raise UsageError("main1 needs n >= 3")
    if args.n > args.max_n:
        raise UsageError(f"n={args.n} exceeds the guard --max-n {args.max_n}")
    return main1_report(args.n, args.dot)


def cmd_induced_poset(args):
    evms, labels = _evm_list(_load(args.evms))
    p, classes = poset.induced_poset(evms, postproc.compare, labels=labels, map_fn=_pmap)
    _write_dot(args.dot, p)
    return {"poset": p.to_json(), "classes": classes}


def cmd_embed_check(args):
    p = ser.poset_from_json(_load(args.poset))
    raw = _load(args.map)
    f = {str(k): ser.evm_from_json(v) for k, v in raw.items()}
    missing = [x for x in p.labels if x not in f]
    if missing:
        raise ValidationError(f"map is undefined on {missing}")
    bad = poset.embedding_failures(f, p, postproc.compare)
    return {"embedding": not bad, "failures": [list(b) for b in bad]}


def cmd_enumerate(args):
    kind, d = ser.parse_space(args.space)
    if kind != "classical":
        raise UsageError("enumerate supports classical spaces only")
    ens = postproc.enumerate_ensembles(d, args.max_members, args.max_den)
    out = {"count": len(ens)}
    if not args.count_only:
        out["ensembles"] = [e.to_json()["members"] for e in ens]
    return out


def cmd_cbit_map(args):
    kind, d = ser.parse_space(args.space)
    if kind != "classical":
        raise UsageError("cbit-map targets classical spaces")
    raw = _load(args.a0)
    a0 = raw["a0"] if isinstance(raw, dict) else raw
    psi = classical.cbit_embedding([Q(x) for x in a0], d)
    out = {"map": psi.to_json()}
    if args.evm:
        out["image"] = classical.apply_map(psi, ser.evm_from_json(_load(args.evm))).to_json()
    return out


def cmd_qcompare(args):
    m, n = ser.povm_from_json(_load(args.m)), ser.povm_from_json(_load(args.n))
    return ser.verdict_to_json(quantum.qcompare(m, n))


def cmd_qpg(args):
    e, m = ser.qensemble_from_json(_load(args.ensemble)), ser.povm_from_json(_load(args.povm))
    out = {"pg": format_rational(quantum.qpg(e, m))}
    if len(e) == 2:
        out["helstrom"] = quantum.helstrom_binary(e)
    return out


def cmd_qc_channel(args):
    m = ser.povm_from_json(_load(args.povm))
    s = quantum.qc_channel(m)
    return {"superoperator": s.to_json(), "cp": quantum.is_cp(s, args.tol),
            "unital": quantum.is_unital(s, args.tol)}


def _complex_matrix(obj):
    if isinstance(obj, dict):
        return np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj.get("im", 0.0), dtype=float)
    return np.asarray(obj, dtype=complex)


def cmd_phi(args):
    if args.mt:
        raw = _load(args.mt)
        mt = [_complex_matrix(x) for x in (raw["effects"] if isinstance(raw, dict) else raw)]
        source = None
    else:
        if args.seed is None:
            raise UsageError("phi needs an effects file or --seed for a random channel")
        rng = np.random.default_rng(args.seed)
        psi = quantum.random_channel(args.dim, args.dim, rng)
        mt = quantum.block_povm_from_channel(psi)
        source = psi
    phi = quantum.phi_from_blocks(mt, args.dim, args.tol)
    out = {"superoperator": phi.to_json(), "cp": quantum.is_cp(phi, args.tol),
           "unital": quantum.is_unital(phi, args.tol),
           "choi_min_eigenvalue": quantum.choi_min_eigenvalue(phi)}
    if source is not None:
        out["max_deviation_from_source"] = quantum.max_abs_difference(phi, source)
    return out


def cmd_verify_factorization(args):
    g = ser.superop_from_json(_load(args.gamma))
    lam = ser.superop_from_json(_load(args.lam))
    phi = ser.superop_from_json(_load(args.phi))
    ok = quantum.verify_factorization(g, lam, phi, args.tol)
    return {"factorization": ok, "max_deviation": quantum.max_abs_difference(quantum.compose(lam, phi), g)}


def cmd_verify(args):
    """Re-check a previously printed report; never runs a solver."""
    report = _load(args.report)
    command = report.get("command")
    inputs = [_load(p) for p in args.inputs]
    if command in ("compare", "qcompare"):
        if len(inputs) != 2:
            raise UsageError(f"verifying a {command} report needs the two input files")
        if command == "compare":
            m, n = (ser.evm_from_json(x) for x in inputs)
            ok = postproc.verify_verdict(ser.verdict_from_json(report), m, n)
        else:
            m, n = (ser.povm_from_json(x) for x in inputs)
            ok = quantum.verify_qverdict(ser.verdict_from_json(report, quantum=True), m, n)
    elif command == "dim":
        if len(inputs) != 1:
            raise UsageError("verifying a dim report needs the poset file")
        p = ser.poset_from_json(inputs[0])
        ok = len(report["realizer"]) == report["dimension"] and poset.realizes(p, report["realizer"])
    elif command == "monotones":
        if len(inputs) != 1:
            raise UsageError("verifying a monotones report needs the poset file")
        p = ser.poset_from_json(inputs[0])
        fam = [{k: Q(v) for k, v in f.items()} for f in report["monotones"]]
        ok = poset.characterizes(p, fam) and all(poset.is_monotone(p, f) for f in fam)
    elif command == "pg":
        e, m = ser.ensemble_from_json(inputs[0]), ser.evm_from_json(inputs[1])
        ok = postproc.pg(e, m) == Q(report["pg"])
    else:
        raise UsageError(f"cannot verify reports of command {command!r}")
    if not ok:
        raise PostorderError(f"{command} report failed verification")
    return {"verified": True, "checked": command}


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="postorder", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"postorder {__version__}")
    parser.add_argument("--timing", action="store_true", help="add a timing_s field to the report")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--timing", action="store_true", default=argparse.SUPPRESS,
                        help="add a timing_s field to the report")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        p = sub.add_parser(name, help=help, parents=[common])
        p.set_defaults(fn=fn)
        return p

    p = add("compare", cmd_compare, "decide the post-processing order between two EVMs")
    p.add_argument("--space", help="classical:d (checked against the inputs)")
    p.add_argument("m")
    p.add_argument("n")

    p = add("pg", cmd_pg, "state discrimination probability")
    p.add_argument("ensemble")
    p.add_argument("evm")

    p = add("quotient", cmd_quotient, "post-processing equivalence classes")
    p.add_argument("--space")
    p.add_argument("evms")

    p = add("dim", cmd_dim, "exact order dimension of a poset")
    p.add_argument("poset")
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--dot", help="write the Hasse diagram here")

    p = add("monotones", cmd_monotones, "characterizing monotone family")
    p.add_argument("poset")
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--indicator", action="store_true", help="indicator family instead of rank functions")

    p = add("standard-example", cmd_standard_example, "the standard example S_n")
    p.add_argument("n", type=int)
    p.add_argument("--dot")

    p = add("main1", cmd_main1, "build the EVM family for S_n and verify it end to end")
    p.add_argument("n", type=int)
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--dot")

    p = add("induced-poset", cmd_induced_poset, "poset of equivalence classes of EVMs")
    p.add_argument("evms")
    p.add_argument("--dot")

    p = add("embed-check", cmd_embed_check, "check an element -> EVM map is an order embedding")
    p.add_argument("poset")
    p.add_argument("map")

    p = add("enumerate", cmd_enumerate, "rational ensembles with bounded size and denominator")
    p.add_argument("--space", required=True)
    p.add_argument("--max-members", type=int, required=True)
    p.add_argument("--max-den", type=int, required=True)
    p.add_argument("--count-only", action="store_true")

    p = add("cbit-map", cmd_cbit_map, "embedding of bit EVMs into a classical space")
    p.add_argument("--space", required=True)
    p.add_argument("a0")
    p.add_argument("evm", nargs="?")

    p = add("qcompare", cmd_qcompare, "post-processing order between two POVMs")
    p.add_argument("m")
    p.add_argument("n")

    p = add("qpg", cmd_qpg, "exact quantum state discrimination with a fixed POVM")
    p.add_argument("ensemble")
    p.add_argument("povm")

    p = add("qc-channel", cmd_qc_channel, "quantum-classical channel of a POVM")
    p.add_argument("povm")
    p.add_argument("--tol", type=float, default=1e-9)

    p = add("phi", cmd_phi, "assemble the channel Phi from a block POVM")
    p.add_argument("mt", nargs="?")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=None, help="build the block POVM from a random channel")
    p.add_argument("--tol", type=float, default=1e-9)

    p = add("verify-factorization", cmd_verify_factorization, "check gamma = lambda o phi")
    p.add_argument("gamma")
    p.add_argument("lam", metavar="lambda")
    p.add_argument("phi")
    p.add_argument("--tol", type=float, default=1e-9)

    p = add("verify", cmd_verify, "re-check a printed report against its inputs")
    p.add_argument("report")
    p.add_argument("inputs", nargs="*")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        body = args.fn(args)
    except UsageError as exc:
        print(f"postorder {args.command}: {exc}", file=stderr)
        return 2
    except (PostorderError, ValueError) as exc:
        print(f"postorder {args.command}: {exc}", file=stderr)
        stdout.write(ser.dumps({"command": args.command, "version": __version__,
                                "error": {"type": type(exc).__name__, "message": str(exc)}}))
        return 1
    report = {"command": args.command, "version": __version__, **body}
    if args.timing:
        report["timing_s"] = round(time.perf_counter() - start, 6)
    stdout.write(ser.dumps(report))
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
