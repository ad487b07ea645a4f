"""Command-line interface.

Exit status is 0 on success, 1 when the input is well formed but the
operation fails (zero exponent, invalid chain, cap exceeded, I/O error) and
2 on usage errors.  Numbers may be written in decimal, ``0x`` hex or ``0b``
binary.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import bench as benchmod
from .asa import best_cwm_asa_params, cwm_asa, cwm_asa_stats
from .chain import (
    AdditionChain,
    ChainFormatError,
    emit_chain,
    exponentiate_with_chain,
    parse_chain,
    parse_natural,
    validate_chain,
)
from .classic import bm, bm_star, wm
from .cwm import CwmParams, best_cwm_params, cwm, cwm_stats, extract_windows
from .oracle import DEFAULT_CAP, FULL_CAP, OracleTable, gap_stats, shortest_length, table_upto
from .sptm import DEFAULT_M, best_sptm_m, sptm

METHOD_NAMES = ("bm", "bm-star", "wm", "sptm", "cwm", "cwm-asa")


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


# -- argument types ------------------------------------------------------------

def _natural(text: str) -> int:
    try:
        return parse_natural(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_range(text: str) -> tuple[int, ...]:
    """``a..b`` (inclusive), a single value, or a comma list of either."""
    values: list[int] = []
    try:
        for part in text.split(","):
            if ".." in part:
                lo, hi = (int(x) for x in part.split("..", 1))
                if lo > hi:
                    raise ValueError
                values.extend(range(lo, hi + 1))
            else:
                values.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; expected a..b") from None
    return tuple(sorted(set(values)))


def _odd_range(text: str) -> tuple[int, ...]:
    values = tuple(v for v in _int_range(text) if v % 2 == 1 and v > 0)
    if not values:
        raise argparse.ArgumentTypeError(f"range {text!r} holds no positive odd values")
    return values


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


# -- method selection ------------------------------------------------------------

def _select(args) -> tuple[dict, str]:
    """Resolve method parameters from flags; returns (params, method)."""
    method = args.method
    best = args.best
    given = {name: getattr(args, name) for name in ("k", "s", "m") if getattr(args, name) is not None}
    allowed = {"bm": (), "bm-star": (), "wm": ("k",), "sptm": ("m",), "cwm": ("k", "s"), "cwm-asa": ("k", "s")}[method]
    extra = sorted(set(given) - set(allowed))
    if extra:
        raise UsageError(f"--{extra[0]} does not apply to {method}")
    if best and method in ("bm", "bm-star"):
        raise UsageError(f"--best does not apply to {method}")
    if best and given:
        raise UsageError("--best conflicts with explicit parameters")
    if not best:
        for name in ("k_range", "s_range", "m_range"):
            if getattr(args, name) is not None:
                raise UsageError(f"--{name.replace('_', '-')} needs --best")
        missing = [name for name in allowed if name not in given]
        if missing:
            raise UsageError(f"{method} needs --{' --'.join(missing)} or --best")
    return given, method


def _build(method: str, params: dict, e: int, args) -> tuple[AdditionChain, dict]:
    """Build the chain; ``info`` carries the chosen parameters and accounting."""
    if e < 1:
        raise DomainError("exponent must be positive")
    info: dict = {}
    if method == "bm":
        return bm(e), info
    if method == "bm-star":
        return bm_star(e), info
    best = getattr(args, "best", False)
    if method == "wm":
        if best:
            ks = args.k_range or tuple(range(1, 21))
            k = min(ks, key=lambda k: (cwm_stats(CwmParams(k, 0), e).elements, k))
        else:
            k = params["k"]
        info["k"] = k
        return wm(k, e), info
    if method == "sptm":
        m = best_sptm_m(e, args.m_range or DEFAULT_M)[0] if best else params["m"]
        info["m"] = m
        return sptm(m, e), info
    if best:
        ks = args.k_range or tuple(range(1, 11 if method == "cwm" else 21))
        ss = args.s_range or tuple(range(0, 11 if method == "cwm" else 21))
        finder = best_cwm_params if method == "cwm" else best_cwm_asa_params
        cp = finder(e, ks, ss)[0]
    else:
        cp = CwmParams(params["k"], params["s"])
    windows = extract_windows(e, cp)
    if method == "cwm":
        stats = cwm_stats(cp, e, windows)
        chain = cwm(cp, e)
    else:
        result = cwm_asa_stats(cp, e, windows)
        stats = result.stats
        info["asa_prefix"] = result.used_asa
        chain = cwm_asa(cp, e)
    info.update(
        k=cp.k, s=cp.s,
        windows=[[w, j] for j, w in windows.entries.items()],
        v=stats.v, u=stats.u, w0=stats.w0,
        formula=stats.formula(), formula_ok=stats.formula_holds,
        collisions=stats.collisions, overhang=stats.overhang,
    )
    return chain, info


# -- subcommands -------------------------------------------------------------------

def _cmd_chain(args) -> int:
    params, method = _select(args)
    chain, info = _build(method, params, args.e, args)
    report = validate_chain(chain)
    if not report.ok:
        raise DomainError(f"internal error, chain failed validation: {report.reason}")
    if args.format == "chainfile":
        sys.stdout.write(emit_chain(chain))
    elif args.format == "json":
        payload = {"e": args.e, "method": method, "r": chain.length, "element_count": len(chain)}
        payload.update(info)
        payload["elements"] = list(chain.elements)
        print(json.dumps(payload))
    else:
        print(" ".join(str(a) for a in chain.elements))
        print(f"r={chain.length} elements={len(chain)}")
        for key in ("k", "s", "m"):
            if key in info:
                print(f"{key}={info[key]}")
        if "windows" in info:
            print("windows " + " ".join(f"{w}@{j}" for w, j in info["windows"]))
            print(f"v={info['v']} u={info['u']} w0={info['w0']}")
            check = "holds" if info["formula_ok"] else "differs"
            print(f"formula u+n-n(w0)+v-1={info['formula']} {check}"
                  f" (collisions={info['collisions']} overhang={info['overhang']})")
    return 0


def _cmd_validate(args) -> int:
    try:
        with open(args.file) as fh:
            text = fh.read()
    except OSError as exc:
        raise DomainError(str(exc)) from None
    try:
        chain = parse_chain(text)
    except ChainFormatError as exc:
        print(f"invalid: {exc}")
        return 1
    report = validate_chain(chain)
    if not report.ok:
        print(f"invalid: {report.reason}")
        return 1
    print(f"ok r={chain.length}")
    return 0


def _cmd_oracle(args) -> int:
    cap = FULL_CAP if args.full else (args.cap or DEFAULT_CAP)
    if args.e is not None:
        if args.e < 1:
            raise DomainError("exponent must be positive")
        length, witness = shortest_length(args.e, cap)
        print(f"l({args.e})={length}")
        print(" ".join(str(a) for a in witness.elements))
        return 0
    table = table_upto(args.upto, cap, cache=args.cache)
    if args.cache is None:
        sys.stdout.write("e,l\n")
        for e, l in table.items():
            sys.stdout.write(f"{e},{l}\n")
    else:
        print(f"wrote l(e) for e <= {table.limit} to {args.cache}")
    return 0


def _corpus(args) -> list[benchmod.CorpusEntry]:
    entries = []
    for bits in args.bits:
        for p in args.p:
            seed = benchmod.cell_seed(args.seed, bits, p)
            spec = benchmod.CorpusSpec(bits, p, args.count, seed, args.kind)
            if args.kind == "random":
                values = benchmod.gen_random(spec)
            else:
                values = benchmod.gen_sptm_favorable(spec, anchor_top=not args.no_anchor)
            entries.extend(benchmod.CorpusEntry(e, bits, p) for e in values)
    return entries


def _cmd_gen(args) -> int:
    lines = [f"{entry.bits},{entry.p},{entry.e:#x}" for entry in _corpus(args)]
    text = "bits,p,e_hex\n" + "".join(line + "\n" for line in lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_bench(args) -> int:
    ranges = benchmod.SweepRanges(
        **{name: value for name, value in (
            ("wm_k", args.wm_k), ("sptm_m", args.sptm_m), ("cwm_k", args.cwm_k),
            ("cwm_s", args.cwm_s), ("asa_k", args.asa_k), ("asa_s", args.asa_s),
        ) if value is not None}
    )
    if args.upto is not None:
        corpus = list(range(1, args.upto + 1))
    else:
        corpus = _corpus(args)
    records = benchmod.run_sweep(corpus, args.methods, ranges, timing=args.timing)
    csv_path = json_path = None
    if args.out:
        csv_path, json_path = args.out + ".csv", args.out + ".json"
    csv_text, json_text = benchmod.emit_report(records, csv_path, json_path)
    if args.oracle_cache:
        table = OracleTable.load(args.oracle_cache)
        gaps = {}
        for method in args.methods:
            pairs = [(r.e, r.r) for r in records if r.method == method]
            if all(e in table for e, _ in pairs):
                gaps[method] = gap_stats(pairs, table).to_json()
        payload = json.loads(json_text)
        payload["summary"]["oracle_gaps"] = gaps
        json_text = json.dumps(payload, indent=2) + "\n"
        if json_path:
            with open(json_path, "w") as fh:
                fh.write(json_text)
    if args.out:
        print(f"wrote {len(records)} records to {csv_path} and {json_path}")
    else:
        sys.stdout.write(csv_text)
    return 0


def _cmd_modexp(args) -> int:
    params, method = _select(args)
    if args.mod < 2:
        raise DomainError("modulus must be at least 2")
    chain, _ = _build(method, params, args.e, args)
    print(exponentiate_with_chain(args.base, chain, args.mod))
    return 0


# -- parser ------------------------------------------------------------------------

def _method_flags(p: argparse.ArgumentParser, default_method: Optional[str] = None) -> None:
    p.add_argument("--method", choices=METHOD_NAMES, default=default_method, required=default_method is None)
    p.add_argument("--e", type=_natural, required=True, help="exponent (decimal, 0x, 0b)")
    p.add_argument("--k", type=int, help="window length")
    p.add_argument("--s", type=int, help="gap length")
    p.add_argument("--m", type=int, help="SPTM offset (odd)")
    p.add_argument("--best", action="store_true", help="search the parameter ranges")
    p.add_argument("--k-range", type=_int_range, metavar="A..B")
    p.add_argument("--s-range", type=_int_range, metavar="A..B")
    p.add_argument("--m-range", type=_odd_range, metavar="A..B", help="odd values in A..B")


def _corpus_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bits", type=lambda t: tuple(int(x) for x in t.split(",")),
                   default=benchmod.DEFAULT_BITS, help="comma list of bit-lengths")
    p.add_argument("--p", type=_float_list, default=benchmod.DEFAULT_P, help="comma list of densities")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", choices=("random", "sptm-favorable"), default="random")
    p.add_argument("--no-anchor", action="store_true",
                   help="place the first window copy at a random position too")
    p.add_argument("--out", help="output path (bench: prefix for .csv/.json)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="addchains", description="Short addition chains for large integers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chain", help="build a chain")
    _method_flags(p)
    p.add_argument("--format", choices=("text", "json", "chainfile"), default="text")
    p.set_defaults(func=_cmd_chain)

    p = sub.add_parser("validate", help="check a chain file")
    p.add_argument("file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("oracle", help="exact shortest chain lengths")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--e", type=_natural)
    g.add_argument("--upto", type=_natural)
    p.add_argument("--cache", help="CSV table to reuse and extend")
    p.add_argument("--cap", type=_natural, help=f"largest e searched (default {DEFAULT_CAP})")
    p.add_argument("--full", action="store_true", help=f"allow the long run up to {FULL_CAP}")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("gen", help="generate a corpus")
    _corpus_flags(p)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", help="run the method sweep and write reports")
    _corpus_flags(p)
    p.add_argument("--upto", type=_natural, help="use 1..N instead of a random corpus")
    p.add_argument("--methods", type=lambda t: tuple(t.split(",")), default=benchmod.PAPER_METHODS)
    p.add_argument("--wm-k", type=_int_range)
    p.add_argument("--sptm-m", type=_odd_range)
    p.add_argument("--cwm-k", type=_int_range)
    p.add_argument("--cwm-s", type=_int_range)
    p.add_argument("--asa-k", type=_int_range)
    p.add_argument("--asa-s", type=_int_range)
    p.add_argument("--timing", action="store_true", help="record runtime_ms (reports stop being byte-stable)")
    p.add_argument("--oracle-cache", help="oracle CSV; adds gap statistics to the JSON summary")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("modexp", help="modular exponentiation driven by a chain")
    _method_flags(p, default_method="bm")
    p.add_argument("--base", type=_natural, required=True)
    p.add_argument("--mod", type=_natural, required=True)
    p.set_defaults(func=_cmd_modexp)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"addchains: error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ValueError, OSError) as exc:
        print(f"addchains: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
