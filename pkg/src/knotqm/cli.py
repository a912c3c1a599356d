"""``knotqm`` command line.

Exit status is 0 on success, 1 for domain errors (degenerate parameters,
zero-probability outcomes, inconsistent diagrams) and 2 for malformed input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
import time
from typing import Sequence

import numpy as np

from .bracket import bracket_of_braid_closure, jones_polynomial, kauffman_bracket, state_sum
from .diagram import BraidWord, PDParseError, TangleDiagram
from .entangle import (
    Connectome,
    check_inequalities,
    connectome_class,
    random_connectome,
    reduced_density,
    schmidt_decompose,
    slocc_class,
    surgery_reduce,
    von_neumann_entropy,
)
from .hilbert import (
    DegenerateParamsError,
    PartyState,
    degeneracy_warning,
    expand_exact_qubits,
    expand_in_computational_basis,
    gram_matrix,
    qudit_basis,
)
from .poly import DEFAULT_K, NumericParams, format_poly
from .protocols import BELL_LABELS, densecode_braided, densecode_simple, teleport
from .rmatrix import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    braid_matrix_numeric,
    braid_representation,
    markov_trace,
    markov_trace_numeric,
)


class InputError(ValueError):
    """Malformed command-line input (exit status 2)."""


def _read(source: str) -> str:
    if os.path.isfile(source):
        with open(source, encoding="utf-8") as fh:
            return fh.read()
    return source


def _params(args) -> NumericParams:
    if getattr(args, "theta", None) is not None:
        return NumericParams.from_theta(args.theta)
    k = args.k if getattr(args, "k", None) is not None else DEFAULT_K
    if k <= 0:
        raise InputError("--k must be positive")
    return NumericParams.from_k(k)


def _warn(n_points: int, params: NumericParams) -> None:
    msg = degeneracy_warning(n_points, params)
    if msg:
        print(msg, file=sys.stderr)


def _braid(args) -> BraidWord:
    try:
        return BraidWord.parse(_read(args.braid).strip())
    except PDParseError as exc:
        raise InputError(str(exc)) from exc


def _pd(args) -> TangleDiagram:
    try:
        return TangleDiagram.parse(_read(args.pd))
    except PDParseError as exc:
        raise InputError(str(exc)) from exc


def _state(args):
    try:
        obj = json.loads(_read(args.state))
    except json.JSONDecodeError as exc:
        raise InputError(f"state is not valid JSON: {exc}") from exc
    try:
        if "pairing" in obj:
            return Connectome.from_json(obj)
        return PartyState.from_json(obj)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed state: {exc}") from exc


def _one_source(args, *names: str) -> str:
    given = [n for n in names if getattr(args, n, None) is not None]
    if len(given) != 1:
        raise InputError("give exactly one of " + ", ".join("--" + n for n in names))
    return given[0]


def _cplx(v: complex) -> list[float]:
    return [float(np.real(v)), float(np.imag(v))]


def _emit(args, payload, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_bracket(args) -> None:
    src = _one_source(args, "braid", "pd")
    if src == "braid":
        res = bracket_of_braid_closure(_braid(args), args.closure, memo=not args.plain)
    else:
        t = _pd(args)
        if not t.is_closed:
            raise InputError("bracket needs a closed diagram")
        res = kauffman_bracket(t, memo=not args.plain)
    print(json.dumps(res.to_json(), sort_keys=True))


def cmd_jones(args) -> None:
    src = _one_source(args, "braid", "pd")
    if src == "braid":
        res = bracket_of_braid_closure(_braid(args), args.closure)
    else:
        res = kauffman_bracket(_pd(args))
    j = jones_polynomial(res)
    _emit(args, {"variable": j.variable, "terms": j.poly.to_json(), "text": j.text}, j.text)


def cmd_trace(args) -> None:
    w = _braid(args)
    try:
        value = markov_trace(braid_representation(w, args.budget), w.strands)
    except BudgetExceeded:
        params = _params(args)
        v = markov_trace_numeric(braid_matrix_numeric(w, params), w.strands, params)
        _emit(args, {"numeric": _cplx(v), "k": params.k}, f"{v.real:.12g}{v.imag:+.12g}j")
        return
    _emit(args, {"trace": value.to_json()}, format_poly(value, "A"))


def cmd_gram(args) -> None:
    params = _params(args)
    _warn(args.points, params)
    g = gram_matrix(args.points, params)
    det = g.determinant()
    payload = {
        "points": args.points,
        "matchings": [list(m.partners) for m in g.matchings],
        "gram": g.gram.to_json(),
        "determinant": det.to_json(),
        "numeric_rank": g.numeric_rank,
        "signature": list(g.signature),
    }
    rows = "\n".join("  ".join(format_poly(x, "A") for x in row) for row in g.gram.entries)
    _emit(args, payload, f"{rows}\ndet = {format_poly(det, 'A')}\nnumeric rank = {g.numeric_rank}")


def _party_state(obj) -> PartyState:
    return obj.to_state() if isinstance(obj, Connectome) else obj


def cmd_expand(args) -> None:
    params = _params(args)
    st = _party_state(_state(args))
    for p in st.parties:
        _warn(len(p), params)
    c = expand_in_computational_basis(st, params)
    payload = {"shape": list(c.shape), "coefficients": [_cplx(v) for v in c.ravel()]}
    lines = []
    for idx in np.ndindex(c.shape):
        if abs(c[idx]) > 1e-12:
            lines.append(f"|{''.join(map(str, idx))}> {c[idx].real:.12g}{c[idx].imag:+.12g}j")
    if st.exact and all(len(p) == 4 for p in st.parties):
        ex = expand_exact_qubits(st)
        exact = {}
        for idx in np.ndindex(c.shape):
            if sum(idx) % 2 == 0:
                exact["".join(map(str, idx))] = ex.rational(idx).to_json()
        payload["exact_even"] = exact
    _emit(args, payload, "\n".join(lines) or "0")


def cmd_entropy(args) -> None:
    params = _params(args)
    obj = _state(args)
    st = _party_state(obj)
    for p in st.parties:
        _warn(len(p), params)
    party = args.party if args.party is not None else st.names[0]
    rho = reduced_density(st, party, params)
    s = von_neumann_entropy(rho)
    _emit(args, {"party": party, "entropy": s, "k": params.k}, f"{s:.12f}")


def cmd_slocc(args) -> None:
    params = _params(args)
    obj = _state(args)
    if isinstance(obj, Connectome):
        reduced, _ = surgery_reduce(obj)
        cls = connectome_class(obj)
        payload = {"class": cls}
        if len(reduced.parties) == 2:
            payload["rank"] = slocc_class(obj, params)
        _emit(args, payload, json.dumps(payload, sort_keys=True))
        return
    bases = None
    if args.qudit is not None:
        qb = qudit_basis(args.qudit, params)
        bases = [qb.states] * len(obj.parties)
    res = schmidt_decompose(obj, params, bases)
    _emit(args, {"rank": res.rank, "schmidt": [float(x) for x in res.coefficients]}, str(res.rank))


def cmd_ineq(args) -> None:
    if args.state is not None:
        obj = _state(args)
        if not isinstance(obj, Connectome):
            raise InputError("ineq expects a connectome state")
        samples = [obj]
    else:
        rng = random.Random(args.seed)
        samples = [random_connectome(rng.randint(3, args.max_parties), 4, rng) for _ in range(args.samples)]
    failures = 0
    for c in samples:
        if not check_inequalities(c)["ok"]:
            failures += 1
    payload = {"checked": len(samples), "failures": failures}
    _emit(args, payload, f"checked {len(samples)} connectomes, {failures} failures")
    if failures:
        raise ArithmeticError("entropy inequality violated")


def _parse_psi(text: str) -> np.ndarray:
    try:
        parts = [complex(p.strip().replace(" ", "")) for p in text.split(",")]
    except ValueError as exc:
        raise InputError(f"cannot parse --psi {text!r}") from exc
    if len(parts) != 2:
        raise InputError("--psi needs two amplitudes")
    v = np.array(parts, dtype=complex)
    n = np.linalg.norm(v)
    if n == 0:
        raise InputError("--psi is the zero vector")
    return v / n


def cmd_teleport(args) -> None:
    params = _params(args)
    if args.psi is not None:
        psi = _parse_psi(args.psi)
    else:
        rng = np.random.default_rng(args.seed)
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi = psi / np.linalg.norm(psi)
    measurement = _braid(args) if args.braid is not None else args.measure
    rec = teleport(psi, measurement, params)
    trace = []
    for step in rec.trace:
        step = dict(step)
        if "state" in step:
            step["state"] = [_cplx(v) for v in step["state"]]
        trace.append(step)
    payload = {
        "measurement": rec.measurement,
        "probability": rec.probability,
        "correction": [[_cplx(v) for v in row] for row in rec.correction],
        "fidelity": rec.fidelity,
        "trace": trace,
    }
    _emit(args, payload, f"{rec.measurement}: p = {rec.probability:.6f}, fidelity = {rec.fidelity:.12f}")


def cmd_densecode(args) -> None:
    params = _params(args)
    a, b = args.bits
    if args.braided:
        out = densecode_braided(a, b, params)
        payload = {"bits": [a, b], "outcome": list(out.labels), "matching": list(out.matching.partners),
                   "weight": _cplx(out.weight), "residue": out.residue}
        hat = "".join("01"[x] + "̂" for x in out.labels)
        _emit(args, payload, f"|{hat}>")
    else:
        dec = densecode_simple(a, b, params)
        label = next(k for k, v in BELL_LABELS.items() if v == dec)
        _emit(args, {"bits": [a, b], "outcome": label, "decoded": list(dec)}, f"{label} -> {dec[0]}{dec[1]}")


def _timed(fn):
    t0 = time.perf_counter()
    v = fn()
    return v, time.perf_counter() - t0


def bench_rows(family: str, max_m: int, samples: int = 50, seed: int = 0,
               letters: int = 8, budget: int = DEFAULT_BUDGET) -> list[dict]:
    """Time the plain state sum, the merged skein and the matrix trace.

    Every instance asserts that all three values agree before a row is kept.
    """
    words: list[tuple[str, BraidWord]] = []
    if family == "torus":
        words = [(f"b1^{m}", BraidWord(2, (1,) * m)) for m in range(1, max_m + 1)]
    elif family == "random":
        rng = random.Random(seed)
        for i in range(samples):
            w = tuple(rng.choice((1, -1)) * rng.randint(1, 2) for _ in range(letters))
            words.append((f"r{i}", BraidWord(3, w)))
    else:
        raise InputError(f"unknown family {family!r}")
    rows = []
    for name, w in words:
        t = TangleDiagram.from_braid(w, "trace")
        plain, t_plain = _timed(lambda: state_sum(t))
        memo, t_memo = _timed(lambda: bracket_of_braid_closure(w).raw)
        mat, t_mat = _timed(lambda: markov_trace(braid_representation(w, budget), w.strands))
        if not (plain == memo == mat):
            raise ArithmeticError(f"methods disagree on {name}")
        rows.append({"family": family, "instance": name, "strands": w.strands, "crossings": len(w.letters),
                     "skein_plain_s": t_plain, "skein_memo_s": t_memo, "matrix_s": t_mat, "agree": True})
    return rows


BENCH_FIELDS = ["family", "instance", "strands", "crossings", "skein_plain_s", "skein_memo_s", "matrix_s", "agree"]


def cmd_bench(args) -> None:
    rows = bench_rows(args.family, args.max_m, args.samples, args.seed, args.letters, args.budget)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: (f"{v:.6f}" if isinstance(v, float) else v) for k, v in r.items()})
    sys.stdout.write(buf.getvalue())


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--braid", help="braid word such as 'n=2: -1 -1 -1', or a file containing one")
    common.add_argument("--pd", help="PD code string or file")
    common.add_argument("--state", help="state JSON string or file")
    common.add_argument("--closure", choices=("trace", "plat"), default="trace")
    grp = common.add_mutually_exclusive_group()
    grp.add_argument("--k", type=float, default=None, help=f"level (default {DEFAULT_K}, non-integers allowed)")
    grp.add_argument("--theta", type=float, default=None, help="phase of A = exp(i theta)")
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="largest strand count for exact matrices")

    p = argparse.ArgumentParser(prog="knotqm", description="Knot invariants and diagrammatic quantum states.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("bracket", parents=[common], help="Kauffman bracket as JSON")
    s.add_argument("--plain", action="store_true", help="use the plain state sum")
    s.set_defaults(func=cmd_bracket)
    sub.add_parser("jones", parents=[common], help="Jones polynomial").set_defaults(func=cmd_jones)
    sub.add_parser("trace", parents=[common], help="Markov trace of the R-matrix image").set_defaults(func=cmd_trace)
    s = sub.add_parser("gram", parents=[common], help="Gram matrix of an n-point space")
    s.add_argument("--points", type=int, default=4)
    s.set_defaults(func=cmd_gram)
    sub.add_parser("expand", parents=[common], help="computational-basis coefficients").set_defaults(func=cmd_expand)
    s = sub.add_parser("entropy", parents=[common], help="entanglement entropy of one party")
    s.add_argument("--party", help="party name or index")
    s.set_defaults(func=cmd_entropy)
    s = sub.add_parser("slocc", parents=[common], help="Schmidt rank or connectome class")
    s.add_argument("--qudit", type=float, help="spin j of the party basis (default: qubit)")
    s.set_defaults(func=cmd_slocc)
    s = sub.add_parser("ineq", parents=[common], help="check entropy inequalities on connectomes")
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--max-parties", type=int, default=5)
    s.set_defaults(func=cmd_ineq)
    s = sub.add_parser("teleport", parents=[common], help="teleport one qubit")
    s.add_argument("--psi", help="two amplitudes, e.g. '0.6,0.8j' (default: random from --seed)")
    s.add_argument("--measure", choices=sorted(BELL_LABELS), default="Phi+")
    s.set_defaults(func=cmd_teleport)
    s = sub.add_parser("densecode", parents=[common], help="dense coding of two bits")
    s.add_argument("--bits", type=int, nargs=2, choices=(0, 1), default=(0, 0), metavar=("A", "B"))
    s.add_argument("--braided", action="store_true", help="run the eight-point braided variant")
    s.set_defaults(func=cmd_densecode)
    s = sub.add_parser("bench", parents=[common], help="timing CSV for skein and matrix evaluation")
    s.add_argument("--family", choices=("torus", "random"), default="torus")
    s.add_argument("--max-m", type=int, default=12)
    s.add_argument("--samples", type=int, default=50)
    s.add_argument("--letters", type=int, default=8)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (InputError, PDParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateParamsError, BudgetExceeded, ArithmeticError, ValueError, KeyError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
