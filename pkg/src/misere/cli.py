"""Command line interface: ``misere <verb> [options]``.

Exit codes: 0 success, 1 negative verdict (not valid, not a quotient, not
isomorphic, not almost tame), 2 partial or capped run, 64 usage error,
65 bad input data.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import tempfile

from . import classifier, games, transition
from .canonical import canonical_key, isomorphic
from .catalog import GrundyLabeledBM, classify_p2, make_R, make_Tn, tame_power
from .monoid import BipartiteMonoid, check_axioms, from_json_obj, kernel, reduce, to_json_obj

EX_OK, EX_NO, EX_PARTIAL, EX_USAGE, EX_DATAERR = 0, 1, 2, 64, 65
MAX_DEFAULT_ORDER = 14


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# input and output helpers


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON: {exc}") from None


def _named_monoid(name: str) -> BipartiteMonoid | None:
    m = re.fullmatch(r"([tr])(\d+)", name.lower())
    if not m:
        return None
    k = int(m.group(2))
    if m.group(1) == "t":
        return make_Tn(k).bm
    n = (k - 4).bit_length() - 1 if k > 4 else -1
    if n < 2 or 2 ** n + 4 != k:
        raise UsageError(f"no R monoid of order {k}")
    return make_R(n).bm


def load_monoid(spec: str) -> BipartiteMonoid:
    """A JSON monoid file, or a catalog name: t<n> for T_n, r<order> for R."""
    if not os.path.exists(spec):
        b = _named_monoid(spec)
        if b is not None:
            return b
    obj = _read_json(spec)
    try:
        b = from_json_obj(obj)
    except (ValueError, TypeError, IndexError) as exc:
        raise DataError(f"{spec}: {exc}") from None
    bad = check_axioms(b)
    if bad:
        raise DataError(f"{spec}: not a bipartite monoid: {bad[0].kind}: {bad[0].detail}")
    return b


def write_json_atomic(path: str, obj) -> None:
    text = json.dumps(obj, sort_keys=True, indent=1) + "\n"
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text_lines, obj) -> None:
    if args.format == "json":
        sys.stdout.write(json.dumps(obj, sort_keys=True, indent=1) + "\n")
    else:
        for line in text_lines:
            print(line)


def _artifact(args, obj, summary: list[str]) -> None:
    """Write ``obj`` to --out, or print it when there is no --out."""
    if args.out:
        write_json_atomic(args.out, obj)
        _emit(args, summary, {"out": args.out, "summary": summary})
    else:
        sys.stdout.write(json.dumps(obj, sort_keys=True, indent=1) + "\n")


def _set_text(mask_or_set, b: BipartiteMonoid) -> str:
    return "{" + ",".join(b.name(x) for x in sorted(mask_or_set)) + "}"


# ---------------------------------------------------------------------------
# verbs


def cmd_enumerate(args) -> int:
    n = args.max_order
    if n > MAX_DEFAULT_ORDER and not args.deep:
        raise UsageError(f"orders above {MAX_DEFAULT_ORDER} need --deep")
    ckpt = args.checkpoint
    if args.deep and ckpt is None:
        ckpt = (args.out or f"census-{n}.json") + ".ckpt"
    census = classifier.enumerate_quotients(
        n, jobs=args.jobs, max_schemes=args.max_schemes, time_limit=args.time_limit, checkpoint=ckpt
    )
    obj = census.to_json_obj()
    if args.out:
        write_json_atomic(args.out, obj)
    lines = []
    for order, c in census.counts.items():
        lines.append(f"order {order}: {c} {'class' if c == 1 else 'classes'}")
    if not census.complete:
        lines.append("census incomplete: search was capped")
    if args.format == "json" and not args.out:
        _emit(args, lines, obj)
    else:
        _emit(args, lines, {"counts": obj["counts"], "complete": census.complete})
    return EX_OK if census.complete else EX_PARTIAL


def cmd_verify_table(args) -> int:
    obj = _read_json(args.input)
    try:
        alg = transition.algebra_from_json_obj(obj)
    except (ValueError, TypeError, IndexError) as exc:
        raise DataError(f"{args.input}: {exc}") from None
    bad = check_axioms(alg.base)
    if bad:
        raise DataError(f"{args.input}: not a bipartite monoid: {bad[0].detail}")
    rep = transition.validate(alg)
    b = alg.base

    def mark(ok):
        return "ok" if ok else "FAIL"

    lines = [
        f"pairs: {len(alg.pairs)}",
        f"parity: {mark(rep.parity_ok)}",
        f"completeness: {mark(rep.completeness_ok)}",
        f"closure: {mark(rep.closure_ok)}",
        f"well-founded: {mark(rep.wellfounded_ok)}",
    ]
    if rep.wellfounded_ok:
        lines.append("rank: " + " ".join(f"{b.name(x)}={r}" for x, r in sorted(rep.rank.items())))
    for c in rep.counterexamples:
        lines.append(f"counterexample: {c}")
    lines.append("valid" if rep.valid else "not valid")
    out = {
        "pairs": len(alg.pairs),
        "parity": rep.parity_ok,
        "completeness": rep.completeness_ok,
        "closure": rep.closure_ok,
        "wellfounded": rep.wellfounded_ok,
        "rank": {str(x): r for x, r in sorted(rep.rank.items())},
        "counterexamples": [list(map(_jsonable, c)) for c in rep.counterexamples],
        "valid": rep.valid,
    }
    _emit(args, lines, out)
    return EX_OK if rep.valid else EX_NO


def _jsonable(v):
    if isinstance(v, (tuple, list)):
        return [_jsonable(x) for x in v]
    return v


def cmd_is_quotient(args) -> int:
    b = load_monoid(args.input)
    w = classifier.is_quotient(b)
    if w.ok:
        seq = " ".join(b.name(x) for x in w.sequence)
        lines = [f"misere quotient: yes (construction sequence: {seq or 'empty'})"]
    else:
        lines = [f"misere quotient: no ({w.reason})"]
    _emit(args, lines, {"quotient": w.ok, "sequence": list(w.sequence), "reason": w.reason})
    return EX_OK if w.ok else EX_NO


def cmd_reduce(args) -> int:
    b = load_monoid(args.input)
    red, proj = reduce(b)
    obj = {"monoid": to_json_obj(red), "projection": list(proj)}
    _artifact(args, obj, [f"reduced order {b.size} to {red.size}"])
    return EX_OK


def cmd_tame(args) -> int:
    if args.steps < 0:
        raise UsageError("--steps must be non-negative")
    b = load_monoid(args.base)
    t = tame_power(b, args.steps)
    summary = [f"order {t.size}, kernel size {len(kernel(t).kernel)}"]
    _artifact(args, to_json_obj(t), summary)
    return EX_OK


def cmd_classify(args) -> int:
    b = load_monoid(args.input)
    label = classify_p2(b)
    _emit(args, [str(label)], {"family": label.family, "n": label.index, "label": str(label)})
    return EX_OK


def cmd_realize(args) -> int:
    obj = _read_json(args.input)
    try:
        alg = transition.algebra_from_json_obj(obj)
    except (ValueError, TypeError, IndexError) as exc:
        raise DataError(f"{args.input}: {exc}") from None
    rep = transition.validate(alg)
    if not rep.valid:
        raise DataError(f"{args.input}: transition algebra is not valid")
    try:
        pair_games, witness = transition.realize_games(alg, rep)
    except ValueError as exc:
        raise DataError(f"{args.input}: {exc}") from None
    gobj, ids = games.games_to_json_obj(list(pair_games.values()) + list(witness.values()))
    gobj["pairs"] = [
        {"x": p.value, "E": sorted(p.options), "game": ids[g]} for p, g in pair_games.items()
    ]
    gobj["elements"] = {str(x): ids[g] for x, g in sorted(witness.items())}
    summary = [f"realized {len(pair_games)} pairs with {len(gobj['games'])} games"]
    _artifact(args, gobj, summary)
    return EX_OK


def cmd_outcome(args) -> int:
    gobj = _read_json(args.games)
    try:
        store = games.games_from_json_obj(gobj)
        pos = games.parse_position(args.position, store)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    play = "normal" if args.normal else "misere"
    res = games.outcome_normal(pos) if args.normal else games.outcome_misere(pos)
    _emit(args, [res], {"outcome": res, "play": play, "position": args.position})
    return EX_OK


def _parse_code(text: str) -> games.OctalCode:
    try:
        return games.OctalCode.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_grundy(args) -> int:
    if args.to < 0:
        raise UsageError("--to must be non-negative")
    code = _parse_code(args.code)
    seq = games.grundy_sequence(code, args.to)
    _emit(args, [f"{code}: " + " ".join(map(str, seq))], {"code": str(code), "grundy": seq})
    return EX_OK


def _load_phi(path: str, b: BipartiteMonoid) -> games.PretendingFunction:
    obj = _read_json(path)
    try:
        M = int(obj["M"])
        values = {int(k): int(v) for k, v in obj["values"].items()}
    except (KeyError, TypeError, ValueError, AttributeError):
        raise DataError(f"{path}: expected {{\"M\": int, \"values\": {{\"1\": index, ...}}}}") from None
    for n, x in values.items():
        if n < 1 or n > M:
            raise DataError(f"{path}: heap {n} outside 1..{M}")
        if not 0 <= x < b.size:
            raise DataError(f"{path}: heap {n} maps to unknown element {x}")
    return games.PretendingFunction(GrundyLabeledBM(b), values)


def cmd_almost_tame(args) -> int:
    code = _parse_code(args.code)
    if args.n0 < 1:
        raise UsageError("--n0 must be at least 1")
    b = load_monoid(args.quotient)
    phi = _load_phi(args.phi, b)
    rep = games.almost_tame_check(code, args.n0, GrundyLabeledBM(b), phi, args.parity_components)
    lines = [rep.verdict]
    for n, x, inside in rep.window:
        lines.append(f"heap {n} -> {b.name(x)} {'in' if inside else 'outside'} kernel")
    for f in rep.failures:
        lines.append(f"failed: {f[0]}: {f[1]}")
    out = {
        "applicable": rep.applicable,
        "verdict": rep.verdict,
        "window": [list(w) for w in rep.window],
        "failures": [[f[0], str(f[1])] for f in rep.failures],
    }
    _emit(args, lines, out)
    return EX_OK if rep.applicable else EX_NO


def cmd_iso(args) -> int:
    b1 = load_monoid(args.first)
    b2 = load_monoid(args.second)
    m = isomorphic(b1, b2)
    k1, k2 = canonical_key(b1).hex(), canonical_key(b2).hex()
    if m is None:
        lines = ["not isomorphic"]
    else:
        lines = ["isomorphic: " + " ".join(f"{b1.name(x)}->{b2.name(y)}" for x, y in sorted(m.items()))]
    _emit(args, lines, {"isomorphic": m is not None, "map": {str(x): y for x, y in sorted((m or {}).items())}, "keys": [k1, k2]})
    return EX_OK if m is not None else EX_NO


# ---------------------------------------------------------------------------
# parser


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text", help="output format (default text)")

    p = _Parser(prog="misere", description="Misere quotients: enumeration, verification and realization.")
    sub = p.add_subparsers(dest="verb", metavar="verb", parser_class=_Parser)
    sub.required = True

    def verb(name, func, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        sp.set_defaults(func=func)
        return sp

    sp = verb("enumerate", cmd_enumerate, "enumerate all misere quotients up to an order")
    sp.add_argument("--max-order", type=_positive_int, required=True)
    sp.add_argument("--jobs", type=_positive_int, default=None,
                    help=f"worker processes (default: ${classifier.JOBS_ENV} or 1)")
    sp.add_argument("--deep", action="store_true", help=f"allow orders above {MAX_DEFAULT_ORDER}; checkpoints by default")
    sp.add_argument("--checkpoint", help="checkpoint file for resumable runs")
    sp.add_argument("--max-schemes", type=_positive_int, help="cap kept schemes per subtree (partial census)")
    sp.add_argument("--time-limit", type=float, help="stop after this many seconds (partial census)")
    sp.add_argument("--out", help="write census JSON here")

    sp = verb("verify-table", cmd_verify_table, "check a transition table for validity")
    sp.add_argument("--input", required=True)

    sp = verb("is-quotient", cmd_is_quotient, "decide whether a bipartite monoid is a misere quotient")
    sp.add_argument("--input", required=True, help="monoid JSON or a catalog name such as t2, r8")

    sp = verb("reduce", cmd_reduce, "reduce a bipartite monoid")
    sp.add_argument("--input", required=True)
    sp.add_argument("--out")

    sp = verb("tame", cmd_tame, "iterate the tame extension")
    sp.add_argument("--base", required=True, help="t2, r8 (any t<n> or r<order>) or a monoid JSON file")
    sp.add_argument("--steps", type=_nonneg_int, required=True)
    sp.add_argument("--out")

    sp = verb("classify", cmd_classify, "place a |P| = 2 quotient in the T or R family")
    sp.add_argument("--input", required=True)

    sp = verb("realize", cmd_realize, "realize a valid transition table by games")
    sp.add_argument("--input", required=True)
    sp.add_argument("--out")

    sp = verb("outcome", cmd_outcome, "outcome of a sum of stored games")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--misere", action="store_true", help="misere play (default)")
    mode.add_argument("--normal", action="store_true", help="normal play")
    sp.add_argument("--position", required=True, help='sum such as "2*g3+g7"')
    sp.add_argument("--games", required=True)

    sp = verb("grundy", cmd_grundy, "Grundy values of an octal or hexadecimal heap game")
    sp.add_argument("--code", required=True, help="such as 0.77")
    sp.add_argument("--to", type=_nonneg_int, required=True, help="last heap size")

    sp = verb("almost-tame", cmd_almost_tame, "check the almost-tameness hypotheses")
    sp.add_argument("--code", required=True)
    sp.add_argument("--n0", type=int, required=True)
    sp.add_argument("--quotient", required=True)
    sp.add_argument("--phi", required=True)
    sp.add_argument("--parity-components", type=_nonneg_int, default=3,
                    help="oracle check on sums of up to this many heaps (0 disables)")

    sp = verb("iso", cmd_iso, "test two bipartite monoids for isomorphism")
    sp.add_argument("first")
    sp.add_argument("second")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"misere {args.verb}: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except DataError as exc:
        print(f"misere {args.verb}: bad input: {exc}", file=sys.stderr)
        return EX_DATAERR


if __name__ == "__main__":
    sys.exit(main())
