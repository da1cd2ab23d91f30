"""Command-line interface: ``ncomm eval | verify | escort | bench | docs``.

Exit codes: 0 success, 1 a check failed or strategies disagreed, 2 usage or
parse error.  ``--json`` output follows ``schemas/report.schema.json``.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .diffop import DiffOp, potential
from .grading import escort_of, support_tuples
from .identities import REGISTRY, VECT, VECT0, CheckReport, SampleSpec, random_field, run_check
from .parse import ParseError, parse_field, parse_op
from .skewsum import ArityError, EvalStrategy, ProductMode, s_k

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_SEED = 1
SCHEMA_PATH = Path(__file__).with_name("schemas") / "report.schema.json"

STRATEGY_ALIASES = {
    "naive": EvalStrategy.NAIVE,
    "naive-permutations": EvalStrategy.NAIVE,
    "subset-dp": EvalStrategy.SUBSET_DP,
    "dp": EvalStrategy.SUBSET_DP,
    "cup": EvalStrategy.CUP_SPLIT,
    "cup-split": EvalStrategy.CUP_SPLIT,
    "rsym": EvalStrategy.RSYM_RECURSION,
    "rsym-recursion": EvalStrategy.RSYM_RECURSION,
}
MODE_ALIASES = {
    "composition": ProductMode.COMPOSITION,
    "rsym": ProductMode.RSYM,
    "rsym-left-normed": ProductMode.RSYM,
}

# check -> its counterpart on another domain
DOMAIN_VARIANTS = {
    ("s5-well-defined", VECT): "s5-well-defined-vect",
    ("s5-rsym", VECT): "s5-rsym-vect",
    ("s6-zero-vect0", VECT): "s6-nonzero-vect",
    ("s6-nonzero-vect", VECT0): "s6-zero-vect0",
}

NATURAL_DOMAIN = {
    **{name: (VECT0 if dom == VECT else VECT) for name, dom in DOMAIN_VARIANTS},
    **{alt: dom for (_name, dom), alt in DOMAIN_VARIANTS.items()},
}

_VARIANT_LOOKUP = {
    **DOMAIN_VARIANTS,
    **{(alt, NATURAL_DOMAIN[name]): name for (name, _dom), alt in DOMAIN_VARIANTS.items()},
}

# naive enumeration above this arity is refused by bench
NAIVE_MAX_K = 9


class UsageError(Exception):
    pass


def _emit(doc: dict) -> None:
    print(json.dumps(doc, indent=2, sort_keys=False))


def _envelope(command: str, seed: Optional[int], ok: bool, **payload) -> dict:
    return {"tool": "ncomm", "command": command, "seed": seed, "ok": ok, **payload}


# -- eval ----------------------------------------------------------------------

def cmd_eval(args: argparse.Namespace) -> int:
    fields = list(args.fields)
    k = args.k if args.k is not None else len(fields)
    if k != len(fields):
        raise UsageError(f"--k {k} given but {len(fields)} operators supplied")
    if k < 1:
        raise UsageError("need at least one operator")
    dim = args.n or 0
    if not dim:
        probe = [parse_op(t) for t in fields]
        dim = max(X.dim for X in probe)
    ops = [parse_op(t, dim) for t in fields]
    mode = MODE_ALIASES[args.mode]
    strategy = STRATEGY_ALIASES[args.strategy]
    if strategy is EvalStrategy.RSYM_RECURSION:
        mode = ProductMode.RSYM
    start = time.perf_counter()
    if args.formula != "none":
        value = _eval_formula(args.formula, ops)
    else:
        try:
            value = s_k(ops, mode=mode, strategy=strategy)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    millis = (time.perf_counter() - start) * 1000
    if args.json:
        _emit(_envelope(
            "eval", None, True,
            k=k, n=dim, mode=mode.value, strategy=strategy.value, formula=args.formula,
            inputs=[str(X) for X in ops], value=str(value),
            orders=value.orders(), millis=round(millis, 3),
        ))
    else:
        print(value)
    return EXIT_OK


def _eval_formula(which: str, ops: Sequence[DiffOp]) -> DiffOp:
    from . import formulas

    try:
        fields = [parse_field(str(X), X.dim) for X in ops]
        if which == "closed":
            if len(fields) == 5:
                return formulas.s5_closed(*[potential(X) for X in fields])
            if len(fields) == 6:
                return formulas.s6_closed(*fields)
            raise UsageError("closed formulas exist for k = 5 (divergence-free) and k = 6")
        if which == "pr2":
            return formulas.pr2_closed(*fields)
        if which == "div":
            return formulas.s6_div_decomposition(*fields)
    except ParseError as exc:
        raise UsageError(f"formula {which!r} needs vector fields: {exc.reason}") from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown formula {which!r}")


# -- verify ------------------------------------------------------------------------

def _resolve_checks(args: argparse.Namespace) -> List[str]:
    if args.all:
        if args.domain:
            raise UsageError("--domain selects a variant of a named --check; it cannot be combined with --all")
        return [name for name, d in REGISTRY.items() if args.slow or not d.slow]
    if not args.check:
        raise UsageError("give --check NAME (repeatable) or --all")
    names = []
    for name in args.check:
        if name not in REGISTRY:
            raise UsageError(f"unknown check {name!r}; see `ncomm verify --list`")
        if args.domain:
            home = NATURAL_DOMAIN.get(name)
            if home is None:
                raise UsageError(f"check {name!r} has a fixed domain")
            if args.domain != home:
                name = _VARIANT_LOOKUP[(name, args.domain)]
        names.append(name)
    return names


def _run_named(name: str, spec: SampleSpec) -> CheckReport:
    return run_check(name, spec)


def _run_all(names: Sequence[str], spec: SampleSpec, jobs: int) -> List[CheckReport]:
    if jobs <= 1 or len(names) <= 1:
        return [_run_named(n, spec) for n in names]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_run_named, n, spec) for n in names]
        return [f.result() for f in futures]


def _short(cx: Optional[dict], width: int = 100) -> str:
    if not cx:
        return ""
    v = str(cx.get("value", ""))
    return v if len(v) <= width else v[: width - 3] + "..."


def cmd_verify(args: argparse.Namespace) -> int:
    if args.list:
        for name, d in REGISTRY.items():
            tag = "expect-fail" if d.expected == "fail" else "expect-pass"
            slow = " (slow)" if d.slow else ""
            print(f"{name:30s} {tag:12s} {d.description}{slow}")
        return EXIT_OK
    if args.n != 2:
        raise UsageError("the registered checks are stated for n = 2 (the n = 3 scan is the check conjecture-n3)")
    names = _resolve_checks(args)
    spec = SampleSpec(n=args.n, deg=args.deg, terms=args.terms, samples=args.samples, seed=args.seed,
                      exhaustive=not args.no_sweep)
    start = time.perf_counter()
    reports = _run_all(names, spec, args.jobs)
    total = (time.perf_counter() - start) * 1000
    ok = all(r.ok for r in reports)
    if args.json:
        _emit(_envelope(
            "verify", args.seed, ok,
            params={"n": args.n, "samples": args.samples, "deg": args.deg, "terms": args.terms,
                    "jobs": args.jobs, "sweep": not args.no_sweep},
            reports=[r.to_json() for r in reports], millis=round(total, 3),
        ))
    else:
        print(f"# ncomm verify  seed={args.seed}  n={args.n}  samples={args.samples}  deg={args.deg}  "
              f"terms={args.terms}  jobs={args.jobs}")
        for r in reports:
            print(f"{r.name:30s} {r.status:24s} samples={r.samples:<5d} {r.millis:10.1f} ms")
            if r.counterexample and (not r.ok or args.verbose or r.expected == "fail"):
                print(f"    counterexample: {_short(r.counterexample)}")
                if r.counterexample.get("inputs"):
                    print(f"    inputs: {', '.join(r.counterexample['inputs'])}")
        bad = sum(not r.ok for r in reports)
        print(f"# {len(reports) - bad}/{len(reports)} checks as expected in {total / 1000:.1f} s")
    return EXIT_OK if ok else EXIT_FAIL


# -- escort ----------------------------------------------------------------------------

def cmd_escort(args: argparse.Namespace) -> int:
    tuples = support_tuples(args.k, args.n, args.divfree, True)
    if len(tuples) > args.budget:
        raise UsageError(
            f"escort support has {len(tuples)} tuples, above the budget of {args.budget}; raise --budget to run it"
        )
    mode = MODE_ALIASES[args.mode]
    table = escort_of(lambda t: s_k(t, mode=mode), args.k, args.n, args.divfree)
    doc = table.to_json()
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    if args.json:
        _emit(_envelope("escort", None, True, mode=mode.value, table=doc))
    else:
        dom = "divergence-free" if args.divfree else "all"
        print(f"# escort of s{args.k}  n={args.n}  fields={dom}  mode={mode.value}  "
              f"support={table.swept}  nonzero={len(table)}")
        for ent in doc["entries"]:
            print(f"s{args.k}({', '.join(ent['key'])}) = {ent['value']}")
    return EXIT_OK


# -- bench -------------------------------------------------------------------------------

def _bench_tuple(args: argparse.Namespace) -> List[DiffOp]:
    if args.source == "support":
        tuples = support_tuples(args.k, args.n, False, True)
        if not tuples:
            raise UsageError(f"no support tuples for k={args.k}, n={args.n}")
        return [b.field for b in tuples[args.index % len(tuples)]]
    import random

    rng = random.Random(f"bench:{args.seed}:{args.k}:{args.n}")
    return [random_field(rng, args.n, args.deg, args.terms, VECT) for _ in range(args.k)]


def cmd_bench(args: argparse.Namespace) -> int:
    names = [s.strip() for s in args.strategies.split(",") if s.strip()]
    strategies = []
    for s in names:
        if s not in STRATEGY_ALIASES:
            raise UsageError(f"unknown strategy {s!r}")
        st = STRATEGY_ALIASES[s]
        if st is EvalStrategy.RSYM_RECURSION:
            raise UsageError("bench compares composition strategies; rsym evaluates a different product")
        if st not in strategies:
            strategies.append(st)
    ops = _bench_tuple(args)
    rows: List[Dict[str, object]] = []
    values: Dict[str, DiffOp] = {}
    for st in strategies:
        if st is EvalStrategy.NAIVE and args.k > NAIVE_MAX_K:
            rows.append({"strategy": st.value, "skipped": f"k! too large for k = {args.k}"})
            continue
        times = []
        value = None
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            value = s_k(ops, strategy=st)
            times.append((time.perf_counter() - t0) * 1000)
        values[st.value] = value
        rows.append({
            "strategy": st.value,
            "best_ms": round(min(times), 3),
            "mean_ms": round(statistics.fmean(times), 3),
            "terms": len(value),
            "orders": value.orders(),
        })
    ref = next(iter(values.values()), None)
    agree = all(v == ref for v in values.values())
    if args.json:
        _emit(_envelope(
            "bench", args.seed, agree,
            k=args.k, n=args.n, repeat=args.repeat, source=args.source,
            inputs=[str(X) for X in ops], agree=agree,
            value=str(ref) if ref is not None else None, rows=rows,
        ))
    else:
        print(f"# ncomm bench  seed={args.seed}  k={args.k}  n={args.n}  repeat={args.repeat}  source={args.source}")
        print(f"{'strategy':22s} {'best ms':>12s} {'mean ms':>12s} {'terms':>6s}")
        for r in rows:
            if "skipped" in r:
                print(f"{r['strategy']:22s} skipped: {r['skipped']}")
            else:
                print(f"{r['strategy']:22s} {r['best_ms']:12.3f} {r['mean_ms']:12.3f} {r['terms']:6d}")
        print(f"# strategies agree: {'yes' if agree else 'NO'}")
        if ref is not None:
            print(f"# value: {_short({'value': str(ref)}, 200)}")
    return EXIT_OK if agree else EXIT_FAIL


# -- docs -----------------------------------------------------------------------------------

def cmd_docs(args: argparse.Namespace) -> int:
    from .diffop import d12, divergence
    from .formulas import render_s6_blocks
    from .identities import adjoint_operator_table, gl2_basis

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "s6_blocks.md").write_text(
        "# Determinant blocks of the 6-commutator\n\n"
        "Each row is `weight * det(M) d_direction`, where the columns of the 6x6 matrix `M`\n"
        "are the six fields and the rows are listed below (`u_.j` is the `j`-th component).\n"
        "The d2 blocks are the d1 blocks with indices 1 and 2 exchanged everywhere.\n\n"
        + render_s6_blocks()
    )
    ops = gl2_basis()
    table = adjoint_operator_table(ops, 3)
    lines = [
        "# s6 of the adjoints of the gl2 basis\n",
        "`F(X) = (X) s6(ad d1, ad d2, ad x1*d1, ad x2*d1, ad x1*d2, ad x2*d2)`, computed directly.\n",
        "On every monomial field of degree at most 3 it equals `-6*D12(Div X)`; for",
        "`X = u1*d1 + u2*d2` that is `6*(d2(d1 u1 + d2 u2))*d1 - 6*(d1(d1 u1 + d2 u2))*d2`.\n",
        "| X | F(X) | -6*D12(Div X) |",
        "|---|------|---------------|",
    ]
    from .parse import parse_field as _pf

    for k, v in table.items():
        X = _pf(k, 2)
        lines.append(f"| `{k}` | `{v}` | `{d12(divergence(X)).scale(-6)}` |")
    (out / "adjoint_s6.md").write_text("\n".join(lines) + "\n")
    print(f"wrote {out / 's6_blocks.md'} and {out / 'adjoint_s6.md'}")
    return EXIT_OK


# -- parser ------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ncomm", description="N-commutators of vector fields: evaluation and checks.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="evaluate s_k on operators given as text")
    e.add_argument("fields", nargs="+", metavar="OP", help="operators such as 'x1^2*d1 - 2*x1*x2*d2'")
    e.add_argument("--k", type=int, help="arity (defaults to the number of operators)")
    e.add_argument("--n", type=int, help="number of variables (defaults to the largest index used)")
    e.add_argument("--mode", choices=sorted(MODE_ALIASES), default="composition")
    e.add_argument("--strategy", choices=sorted(STRATEGY_ALIASES), default="subset-dp")
    e.add_argument("--formula", choices=["none", "closed", "pr2", "div"], default="none",
                   help="use a closed formula instead of the alternating sum")
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_eval)

    v = sub.add_parser("verify", help="run identity checks")
    v.add_argument("--check", action="append", metavar="NAME")
    v.add_argument("--all", action="store_true")
    v.add_argument("--slow", action="store_true", help="include slow checks with --all")
    v.add_argument("--list", action="store_true", help="list registered checks")
    v.add_argument("--domain", choices=[VECT, VECT0])
    v.add_argument("--n", type=int, default=2)
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--samples", type=int, default=50)
    v.add_argument("--deg", type=int, default=4)
    v.add_argument("--terms", type=int, default=3)
    v.add_argument("--no-sweep", action="store_true", help="skip the exhaustive basis sweep")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--verbose", action="store_true")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("escort", help="dump the escort table of s_k")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--divfree", action="store_true")
    s.add_argument("--mode", choices=sorted(MODE_ALIASES), default="composition")
    s.add_argument("--budget", type=int, default=5000, help="largest support size to evaluate")
    s.add_argument("--out", help="also write the table JSON to this file")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_escort)

    b = sub.add_parser("bench", help="time evaluation strategies on one tuple")
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--n", type=int, default=2)
    b.add_argument("--strategies", default="naive,subset-dp,cup")
    b.add_argument("--repeat", type=int, default=3)
    b.add_argument("--seed", type=int, default=DEFAULT_SEED)
    b.add_argument("--deg", type=int, default=3)
    b.add_argument("--terms", type=int, default=3)
    b.add_argument("--source", choices=["random", "support"], default="random")
    b.add_argument("--index", type=int, default=0, help="which support tuple with --source support")
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_bench)

    d = sub.add_parser("docs", help="write generated formula documents")
    d.add_argument("--out", default="docs")
    d.set_defaults(func=cmd_docs)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"ncomm: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ArityError) as exc:
        print(f"ncomm: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
