"""Command-line interface.

Exit codes: 0 success (affirmative verdict where one applies), 1 sound
negative verdict, 2 usage or input error, 3 partial result.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from typing import Optional, Sequence

from . import __version__
from .batch import PRUNE_CHOICES
from .certificates import MajorizationZero, SupportCycle, ZeroEntry, certificate_to_json
from .constructions import NAMED, named_example
from .engine import (
    eta,
    explicit_power,
    family_at,
    gamma,
    mask_to_set,
    power_entry,
    zero_witness,
)
from .io import FormatError, read_tensor, write_tensor
from .nested import all_equal_tree, nested_to_json
from .screening import FILTER_FIELDS, filter_report
from .tensor import SizeGuardError, majorization

OK, NEGATIVE, USAGE, PARTIAL = 0, 1, 2, 3

log = logging.getLogger("tensorprim")


def _verdict(result, name: str) -> str:
    return f"{name}: degree {result.degree}" if result.holds else f"{name}: no"


def _entry_hint(path: str, t, cert) -> Optional[str]:
    """An ``entry`` command line that re-checks a zero certificate."""
    if isinstance(cert, SupportCycle):
        cert = cert.witness
    if isinstance(cert, MajorizationZero):
        cert = ZeroEntry(cert.k, cert.row, all_equal_tree(cert.column, t.order - 1, cert.k))
    if not isinstance(cert, ZeroEntry):
        return None
    if (t.order - 1) ** cert.k > 4096:
        return None  # the flattened index would be unreadably long
    idx = json.dumps(nested_to_json(cert.index), separators=(",", ":"))
    return f"tensorprim entry {path} -k {cert.k} -i {cert.row} --index '{idx}'"


def cmd_check(args) -> int:
    t = read_tensor(args.file)
    g, e = gamma(t), eta(t)
    out = {
        "primitive": g.degree,
        "strongly_primitive": e.degree,
        "filters": filter_report(t).as_dict(),
        "certificates": {},
    }
    if g.certificate is not None:
        out["certificates"]["primitive"] = certificate_to_json(g.certificate)
    if e.certificate is not None:
        out["certificates"]["strongly_primitive"] = certificate_to_json(e.certificate)
    if args.json:
        print(json.dumps(out, indent=2))
    else:
        print(f"{_verdict(g, 'primitive')}; {_verdict(e, 'strongly primitive')}")
        rep = filter_report(t)
        for name in FILTER_FIELDS:
            print(f"  {name}: {getattr(rep, name)}")
        print(f"  cannot_be_primitive: {rep.cannot_be_primitive}")
        print(f"  cannot_be_strongly_primitive: {rep.cannot_be_strongly_primitive}")
        for label, cert in out["certificates"].items():
            print(f"certificate ({label}): {json.dumps(cert, separators=(',', ':'))}")
        for cert in (g.certificate, e.certificate):
            hint = _entry_hint(args.file, t, cert) if cert is not None else None
            if hint:
                print(f"recheck: {hint}")
    return OK if g.holds and e.holds else NEGATIVE


def cmd_majorize(args) -> int:
    t = read_tensor(args.file)
    m = majorization(t)
    if args.output:
        write_tensor(m, args.output)
    for row in m.array:
        print("".join("1" if x else "0" for x in row))
    return OK


def cmd_power(args) -> int:
    t = read_tensor(args.file)
    if args.explicit:
        p = explicit_power(t, args.k)
        if args.output:
            write_tensor(p, args.output, dense=True)
        else:
            print(json.dumps({"order": p.order, "dim": p.dim, "dense": p.to_dense()}))
        return OK if p.is_all_ones() else NEGATIVE
    fam = family_at(t, args.k)
    full = fam.is_full(t.dim)
    print(f"level {args.k}: {len(fam.members)} distinct column supports")
    for mask in sorted(fam.members):
        print("  {" + ",".join(str(i) for i in sorted(mask_to_set(mask))) + "}")
    print(f"A^{args.k} positive: {'yes' if full else 'no'}")
    if not full:
        row, idx = zero_witness(t, args.k)
        print("zero entry: " + json.dumps({"row": row, "index": nested_to_json(idx)}, separators=(",", ":")))
    return OK if full else NEGATIVE


def _parse_index(text: str):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        try:
            # top-level blocks may be given without the outer brackets
            obj = json.loads(f"[{text}]")
        except json.JSONDecodeError:
            raise FormatError(f"cannot parse nested index {text!r}") from None
    if not isinstance(obj, list):
        raise FormatError("nested index must be a bracketed array")
    return obj


def cmd_entry(args) -> int:
    t = read_tensor(args.file)
    idx = _parse_index(args.index)
    print(1 if power_entry(t, args.k, args.row, idx) else 0)
    return OK


def cmd_construct(args) -> int:
    params = {p: getattr(args, p) for p in ("m", "n", "k", "i", "j")}
    t = named_example(args.name, **params)
    if args.output and args.output != "-":
        write_tensor(t, args.output, dense=args.dense)
    else:
        from .io import tensor_to_json

        print(json.dumps(tensor_to_json(t, args.dense)))
    return OK


def _spec_from_args(args):
    from .search import EnumSpec

    if args.random is not None and args.seed is None:
        raise FormatError("random sampling needs an explicit --seed")
    if args.random is not None:
        mode, extra = "random", {"samples": args.random, "seed": args.seed}
    elif args.low_zero is not None:
        mode, extra = "low-zero", {"max_zeros": args.low_zero}
    else:
        mode, extra = "exhaustive", {}
    return EnumSpec(
        args.m,
        args.n,
        mode,
        canonicalize=args.canonicalize,
        prune=tuple(args.prune or ()),
        max_patterns=args.max_patterns,
        max_seconds=args.max_seconds,
        allow_large=args.allow_large,
        **extra,
    )


@contextlib.contextmanager
def _open_out(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def cmd_enumerate(args) -> int:
    from .search import classify_all

    spec = _spec_from_args(args)
    res = classify_all(spec, args.threads)
    with _open_out(args.csv) as fh:
        res.write_csv(fh)
    print(json.dumps(res.summary()), file=sys.stderr)
    return PARTIAL if res.partial else OK


def cmd_verify(args) -> int:
    from . import search

    if args.what == "majorization-criterion":
        rep = search.verify_majorization_criterion(args.m, samples=args.samples, seed=args.seed, workers=args.threads)
        ok = not rep["counterexamples"]
    elif args.what == "dim2":
        rep = search.verify_dim2_characterization(args.m, workers=args.threads)
        ok = rep["equal"] and (rep["max_eta"] or 0) <= 2
    else:
        rep = search.verify_shifted_wielandt()
        ok = not rep["failures"]
        rep = {k: v for k, v in rep.items() if k != "rows"}
    res = rep.pop("result", None)
    if res is not None and args.csv:
        with _open_out(args.csv) as fh:
            res.write_csv(fh)
    print(json.dumps(rep, indent=2))
    return OK if ok else NEGATIVE


def cmd_search(args) -> int:
    from . import search

    if args.exhaustive:
        spec = search.EnumSpec(
            args.m, args.n, "exhaustive", canonicalize=args.canonicalize,
            prune=tuple(args.prune or ()), max_seconds=args.max_seconds, allow_large=True,
        )
        if not args.checkpoint:
            raise FormatError("the exhaustive sweep needs --checkpoint FILE")
        rep = search.sweep_with_checkpoint(spec, args.checkpoint, args.threads)
        print(json.dumps(rep, indent=2))
        bound = (args.n - 1) ** 2 + 1
        if rep["max_eta"] is not None and rep["max_eta"] >= bound:
            return NEGATIVE
        return OK if rep["complete"] else PARTIAL
    specs = []
    if args.low_zero is not None:
        specs.append(search.EnumSpec(args.m, args.n, "low-zero", max_zeros=args.low_zero, prune=tuple(args.prune or ())))
    if args.random is not None:
        if args.seed is None:
            raise FormatError("random sampling needs an explicit --seed")
        specs.append(
            search.EnumSpec(args.m, args.n, "random", samples=args.random, seed=args.seed,
                            prune=tuple(args.prune or ()), max_seconds=args.max_seconds)
        )
    if not specs:
        raise FormatError("choose --low-zero, --random or --exhaustive")
    rep = search.max_eta_search(specs, args.threads)
    if args.csv:
        with _open_out(args.csv) as fh:
            for res in rep.results:
                res.write_csv(fh)
    print(json.dumps(rep.as_dict(), indent=2))
    if rep.counterexamples:
        return NEGATIVE
    return PARTIAL if rep.partial else OK


def _add_enum_options(p: argparse.ArgumentParser, need_mn: bool = True) -> None:
    p.add_argument("--m", type=int, required=need_mn, help="tensor order")
    p.add_argument("--n", type=int, required=need_mn, help="dimension")
    p.add_argument("--random", type=int, metavar="SAMPLES", help="sample this many random patterns")
    p.add_argument("--seed", type=int, help="seed; required with --random")
    p.add_argument("--low-zero", type=int, metavar="Z", help="every pattern with at most Z zeros")
    p.add_argument("--prune", nargs="*", choices=PRUNE_CHOICES, help="screening filters to skip work with")
    p.add_argument("--max-seconds", type=float)
    p.add_argument("--csv", help="CSV destination ('-' for standard output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tensorprim", description="Primitivity of Boolean tensor zero patterns.")
    parser.add_argument("--version", action="version", version=f"tensorprim {__version__}")
    parser.add_argument("--threads", type=int, default=1, help="worker processes (output does not depend on it)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="primitive and strongly primitive degrees with certificates")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("majorize", help="print the majorization matrix")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_majorize)

    p = sub.add_parser("power", help="support family of A^k, or A^k itself with --explicit")
    p.add_argument("file")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--explicit", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("entry", help="one entry of A^k")
    p.add_argument("file")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-i", "--row", type=int, required=True)
    p.add_argument("--index", required=True, help="nested bracketed column index")
    p.set_defaults(func=cmd_entry)

    p = sub.add_parser("construct", help="write a named tensor family member")
    p.add_argument("name", choices=sorted(NAMED))
    for name in ("m", "n", "k", "i", "j"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--dense", action="store_true", help="write the dense form")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("enumerate", help="classify many patterns into a CSV")
    _add_enum_options(p)
    p.add_argument("--canonicalize", action="store_true")
    p.add_argument("--max-patterns", type=int)
    p.add_argument("--allow-large", action="store_true")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="exhaustive checks of the n = 2 theorems and the shifted Wielandt family")
    p.add_argument("what", choices=("majorization-criterion", "dim2", "shifted-wielandt"))
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="largest strongly primitive degree over a pattern set")
    _add_enum_options(p)
    p.add_argument("--exhaustive", action="store_true", help="opt-in full sweep; needs --checkpoint")
    p.add_argument("--canonicalize", action="store_true")
    p.add_argument("--checkpoint")
    p.set_defaults(func=cmd_search)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except SizeGuardError as exc:
        print(f"error: size guard exceeded: {exc}", file=sys.stderr)
        return USAGE
    except (FormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
