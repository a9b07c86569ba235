"""``uniformity-forge`` command line: verify, construct, shadow, catalog.

Exit codes: 0 success or pass, 1 verification failure (or a construction whose
preconditions do not hold), 2 malformed input. Party and column numbers on the
command line and in reports are 1-based.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from . import constructions as C
from . import states as S
from .arrays import (
    MixedArray,
    certify,
    delete_columns,
    min_hamming_distance,
    split_column,
    trivial_oa,
    verify_strength,
)
from .catalog import Catalog, CatalogEntry, Provenance, describe_file
from .constructions import DifferenceScheme
from .errors import ConstructionError, ContractError, ForgeError, InputError
from .formats import detect_kind, format_ds, format_moa, format_qst, read_ds, read_moa, read_qst
from .shadow import ame_excluded, format_dims, scan_nonexistence
from .shipped import SHIPPED, shipped_path

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
SUFFIX = {"array": ".moa", "scheme": ".ds", "state": ".qst"}


def _emit(args: argparse.Namespace, payload: dict, lines: Sequence[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, default=str))
    else:
        for line in lines:
            print(line)


def _one_based(idx: Sequence[int] | None) -> list[int] | None:
    return None if idx is None else [i + 1 for i in idx]


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"expected comma separated integers, got {text!r}") from None


# ---------------------------------------------------------------------------
# sources: either a file or a generator string like ``hadamard:4``


class Source:
    """A resolved input object plus the catalog id it came from."""

    def __init__(self, obj, entry_id: str):
        self.obj = obj
        self.entry_id = entry_id


def _generated(text: str):
    name, _, rest = text.partition(":")
    params = _ints(rest)
    makers = {
        "trivial": (1, lambda d: trivial_oa(d)),
        "linear": (2, lambda d, n: C.linear_oa(d, n)),
        "even": (1, _even_weight),
        "hadamard": (1, lambda m: C.hadamard(m)),
        "ghm": (2, lambda d, lam: C.generalized_hadamard(d, lam)),
        "ghz": (2, lambda d, n: S.ghz(d, n)),
    }
    if name not in makers:
        return None
    arity, make = makers[name]
    if len(params) != arity:
        raise InputError(f"{name}: expects {arity} integer parameter(s)")
    return make(*params)


def _even_weight(n: int) -> MixedArray:
    """All even-weight binary words of length n: an OA(2^(n-1), 2^n, n-1)."""
    if n < 2:
        raise InputError("even: needs n >= 2")
    rows = [w for w in itertools.product((0, 1), repeat=n) if sum(w) % 2 == 0]
    return MixedArray(np.array(rows), (2,) * n, n - 1)


def _store(catalog: Catalog, obj, text: str, out: Path | None, k: int | None, prov: Provenance,
           verify: bool = True) -> tuple[CatalogEntry, Path]:
    """Write ``text`` and record it; returns the catalog entry and the path written.

    When identical content is already catalogued the earlier entry is returned.
    """
    kind = _kind_of(obj)
    if out is None:
        objects = catalog.root / "objects"
        objects.mkdir(exist_ok=True)
        out = objects / ("tmp" + SUFFIX[kind])
        out.write_text(text)
        entry = describe_file(out, k, verify=verify)
        final = objects / (entry.id + SUFFIX[kind])
        out.replace(final)
        out = final
        entry.path = str(final.resolve())
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        entry = describe_file(out, k, verify=verify)
    entry.provenance = prov
    return catalog.add(entry), out


def _kind_of(obj) -> str:
    if isinstance(obj, MixedArray):
        return "array"
    if isinstance(obj, DifferenceScheme):
        return "scheme"
    return "state"


def _text_of(obj) -> str:
    return {"array": format_moa, "scheme": format_ds, "state": format_qst}[_kind_of(obj)](obj)


def resolve(catalog: Catalog, text: str, *, pm: bool = False) -> Source:
    if text.startswith("builtin:"):
        name = text.split(":", 1)[1]
        path = shipped_path(name)
        entry = catalog.add(describe_file(path, SHIPPED[name][1]))
        return Source(_read(path, pm), entry.id)
    if text.startswith("catalog:"):
        entry = catalog.get(text.split(":", 1)[1])
        return Source(_read(Path(entry.path), pm), entry.id)
    obj = _generated(text)
    if obj is not None:
        k = getattr(obj, "strength", None)
        entry, _ = _store(catalog, obj, _text_of(obj), None, k, Provenance("builtin", name=text))
        return Source(obj, entry.id)
    path = Path(text)
    if not path.exists():
        raise InputError(f"no such file or source: {text}")
    obj = _read(path, pm)
    if isinstance(obj, DifferenceScheme) and pm:
        # store the normalised 0/1 form so the catalog copy reads back without --pm
        prov = Provenance("imported", name=str(path))
        entry, _ = _store(catalog, obj, format_ds(obj), None, obj.strength, prov)
        return Source(obj, entry.id)
    existing = catalog.find_by_path(path)
    entry = existing or catalog.add(describe_file(path, getattr(obj, "strength", None)))
    return Source(obj, entry.id)


def _read(path: Path, pm: bool):
    kind = detect_kind(path)
    if kind == "array":
        return read_moa(path)
    if kind == "scheme":
        return read_ds(path, pm=pm)
    return read_qst(path)


def _need(obj, kind: str, what: str):
    if _kind_of(obj) != kind:
        raise InputError(f"{what} must be a{'n' if kind == 'array' else ''} {kind}, got a {_kind_of(obj)}")
    return obj


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args: argparse.Namespace) -> int:
    path = Path(args.path)
    obj = _read(path, args.pm)
    kind = _kind_of(obj)
    payload: dict = {"path": str(path), "kind": kind}
    if args.uniform is not None:
        if kind == "scheme":
            raise InputError("--uniform needs an array or a state")
        state = S.superposition(obj.rows, obj.levels) if kind == "array" else obj
        v = S.verify_k_uniform(state, args.uniform)
        payload.update(
            check=f"{args.uniform}-uniform", passed=v.passed, max_deviation=v.max_deviation,
            worst_subset=_one_based(v.worst_subset), witness=_one_based(v.witness),
            subsets_checked=v.subsets_checked,
        )
        lines = [f"{args.uniform}-uniform: {'PASS' if v.passed else 'FAIL'}",
                 f"max deviation {v.max_deviation:.3e} over {v.subsets_checked} subsets"]
        witness = v.witness
    elif args.scheme or kind == "scheme":
        D = _need(obj, "scheme", "--scheme input")
        t = args.strength if args.strength is not None else D.strength
        v = C.verify_difference_scheme(D, t)
        payload.update(check=f"difference scheme strength {t}", passed=v.passed,
                       witness=_one_based(v.witness), reason=v.reason)
        lines = [f"{D.describe()} strength {t}: {'PASS' if v.passed else 'FAIL'}"]
        witness = v.witness
    else:
        M = _need(obj, "array", "--strength input")
        k = args.strength if args.strength is not None else M.strength
        v = verify_strength(M, k)
        md = min_hamming_distance(M) if M.r > 1 else None
        payload.update(check=f"strength {k}", passed=v.passed, witness=_one_based(v.witness),
                       reason=v.reason, md=md, irredundant=None if md is None else md >= k + 1)
        lines = [f"{M.describe()} strength {k}: {'PASS' if v.passed else 'FAIL'}", f"MD {md}"]
        witness = v.witness
    _emit(args, payload, lines)
    if not payload["passed"]:
        detail = f"witness {{{','.join(map(str, _one_based(witness)))}}}" if witness else "failed"
        reason = payload.get("reason")
        print(f"{detail}{': ' + reason if reason else ''}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------
# construct


def _parents(*sources: Source | None) -> list[str]:
    return sorted({s.entry_id for s in sources if s is not None})


def cmd_construct(args: argparse.Namespace) -> int:
    catalog = Catalog()
    op = args.op
    verify = not args.no_verify
    out = Path(args.out) if args.out else None
    k: int | None = None
    parents: list[Source] = []

    if op == "replace":
        a1, a2 = resolve(catalog, args.a1), resolve(catalog, args.a2)
        parents = [a1, a2]
        result = C.expansive_replace(_certified(a1.obj, 2), args.col - 1, _certified(a2.obj, 2))
        k = 2
    elif op == "kron":
        a1, g = resolve(catalog, args.a1), resolve(catalog, args.ghm, pm=args.pm)
        parents = [a1, g]
        A1 = _certified(a1.obj, 2)
        G = _need(g.obj, "scheme", "--ghm")
        result = C.kron_extend(A1, G) if G.is_square else C.scheme_extend(A1, G)
        k = 2
    elif op == "strength3":
        a, h = resolve(catalog, args.a), resolve(catalog, args.h, pm=args.pm)
        d = resolve(catalog, args.d, pm=args.pm) if args.d else None
        parents = [a, h, d]
        M = _need(a.obj, "array", "--a")
        binary = [j for j, lv in enumerate(M.levels) if lv == 2]
        other = [j for j, lv in enumerate(M.levels) if lv != 2]
        A1 = M.rows[:, other] if other else None
        result = C.strength3_extend(A1, M.rows[:, binary], d.obj if d else None,
                                    _need(h.obj, "scheme", "--h"))
        k = 3
    elif op in ("split", "delete"):
        src = resolve(catalog, args.input)
        parents = [src]
        M = _need(src.obj, "array", "--in")
        if op == "split":
            result = split_column(M, args.col - 1, args.d1, args.d2)
        else:
            result = delete_columns(M, [c - 1 for c in _ints(args.cols)])
        k = result.strength
    elif op == "state":
        src = resolve(catalog, args.input)
        parents = [src]
        result = S.state_from_irmoa(_certified(_need(src.obj, "array", "--in"), args.k), args.k)
        k = args.k
    elif op == "basis":
        return _construct_basis(args, catalog)
    elif op == "reduce":
        src = resolve(catalog, args.input)
        parents = [src]
        s = _need(src.obj, "state", "--in")
        result = S.project_reduce(s, args.party - 1, args.outcome)
        k = None if args.k is None else args.k - 1
    elif op == "merge":
        src = resolve(catalog, args.input)
        parents = [src]
        s = _need(src.obj, "state", "--in")
        result = S.coarse_grain(s, args.i - 1, args.j - 1)
        k = None if args.k is None else args.k - 1
    elif op == "tensor":
        a, b = resolve(catalog, args.a), resolve(catalog, args.b)
        parents = [a, b]
        result = S.tensor_parties(_need(a.obj, "state", "--a"), _need(b.obj, "state", "--b"))
        k = args.k
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown construction {op}")

    prov = Provenance("constructed", operation=op, parents=_parents(*parents))
    entry, written = _store(catalog, result, _text_of(result), out, k if k else None, prov, verify)
    payload = {"operation": op, "path": str(written), "entry": entry.to_json()}
    lines = [f"{op}: wrote {written}", f"id {entry.id}  {entry.signature}  {_metric(entry)}",
             f"verification: {entry.verification.status}"]
    _emit(args, payload, lines)
    return EXIT_FAIL if entry.verification.status == "failed" else EXIT_OK


def _certified(M, k: int) -> MixedArray:
    M = _need(M, "array", "input")
    try:
        return certify(M, min(k, M.n_columns))
    except ContractError as exc:
        raise ContractError(f"{M.describe()}: {exc}") from None


def _construct_basis(args: argparse.Namespace, catalog: Catalog) -> int:
    src = resolve(catalog, args.input)
    s = _need(src.obj, "state", "--in")
    basis = S.generate_basis(s, args.k)
    out_dir = Path(args.out_dir) if args.out_dir else None
    prov = Provenance("constructed", operation="basis", parents=[src.entry_id])
    entries = []
    for idx, b in enumerate(basis):
        target = out_dir / f"basis_{idx:04d}.qst" if out_dir else None
        entries.append(_store(catalog, b, format_qst(b), target, args.k, prov, not args.no_verify)[0])
    overlap = S.max_overlap(basis)
    dense_ok = s.total_dim <= S.MAX_DENSE
    completeness = (
        float(np.abs(S.projector_sum(basis) - np.eye(s.total_dim)).max()) if dense_ok else None
    )
    failed = sum(e.verification.status == "failed" for e in entries)
    payload = {"operation": "basis", "count": len(basis), "max_overlap": overlap,
               "completeness_error": completeness, "failed": failed,
               "entries": [e.id for e in entries]}
    lines = [f"basis: {len(basis)} states", f"max |<i|j>| = {overlap:.3e}"]
    if completeness is not None:
        lines.append(f"max |sum of projectors - I| = {completeness:.3e}")
    lines.append(f"{len(basis) - failed} of {len(basis)} states pass {args.k}-uniformity")
    _emit(args, payload, lines)
    return EXIT_FAIL if failed or overlap > 1e-10 else EXIT_OK


def _metric(entry: CatalogEntry) -> str:
    return " ".join(f"{key}={value}" for key, value in entry.metric.items())


# ---------------------------------------------------------------------------
# shadow


def cmd_shadow(args: argparse.Namespace) -> int:
    if args.scan:
        n, max_dim = args.scan
        entries = scan_nonexistence(n, max_dim)
        payload = {"n": n, "max_dim": max_dim, "excluded": [
            {"dims": list(e.dims), "first_violation": e.first_violation, "value": str(e.value)}
            for e in entries]}
        lines = [f"{len(entries)} dimension vectors with {n} parties (dims <= {max_dim}) excluded"]
        lines += [f"{format_dims(e.dims):<24} S_{e.first_violation} = {e.value}" for e in entries]
        _emit(args, payload, lines)
        return EXIT_OK
    if not args.dims:
        raise InputError("give local dimensions or --scan N MAXDIM")
    v = ame_excluded(args.dims)
    verdict = "EXCLUDED" if v.excluded else "NOT-EXCLUDED"
    payload = {"dims": list(v.dims), "values": [str(x) for x in v.values], "verdict": verdict,
               "first_violation": v.first_violation}
    lines = [f"dims {format_dims(v.dims)}"]
    lines += [f"S_{j} = {x}" for j, x in enumerate(v.values)]
    lines.append(f"verdict {verdict}")
    _emit(args, payload, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# catalog


def cmd_catalog(args: argparse.Namespace) -> int:
    catalog = Catalog()
    if args.action == "list":
        entries = list(catalog.entries.values())
        payload = {"root": str(catalog.root), "entries": [e.to_json() for e in entries]}
        lines = [f"{'id':<12}  {'kind':<6}  {'source':<11}  {'status':<10}  signature"]
        for e in entries:
            origin = e.provenance.operation or e.provenance.name or ""
            chain = f" <- {','.join(e.provenance.parents)}" if e.provenance.parents else ""
            lines.append(f"{e.id}  {e.kind:<6}  {e.provenance.source:<11}  "
                         f"{e.verification.status:<10}  {e.signature}  [{origin}{chain}]")
        _emit(args, payload, lines)
    elif args.action == "show":
        if not args.id:
            raise InputError("catalog show needs an id")
        e = catalog.get(args.id)
        chain = catalog.ancestry(e.id)
        payload = {"entry": e.to_json(), "ancestry": chain}
        lines = [json.dumps(e.to_json(), indent=2), f"ancestry: {' '.join(chain) or '(none)'}"]
        _emit(args, payload, lines)
    else:
        removed = catalog.gc()
        _emit(args, {"removed": removed}, [f"removed {len(removed)} entries"] + removed)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine readable output")

    parser = argparse.ArgumentParser(prog="uniformity-forge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="check a .moa, .ds or .qst file")
    p.add_argument("path")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--uniform", type=int, metavar="K")
    mode.add_argument("--scheme", action="store_true")
    p.add_argument("--strength", type=int, metavar="K")
    p.add_argument("--pm", action="store_true", help="scheme file uses +-1 entries")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("construct", parents=[common], help="build a new array or state")
    ops = p.add_subparsers(dest="op", required=True)
    shared = argparse.ArgumentParser(add_help=False, parents=[common])
    shared.add_argument("--out", help="output file (default: catalog object store)")
    shared.add_argument("--no-verify", action="store_true")
    shared.add_argument("--pm", action="store_true", help="scheme files use +-1 entries")

    q = ops.add_parser("replace", parents=[shared], help="expansive replacement")
    q.add_argument("--a1", required=True)
    q.add_argument("--col", type=int, required=True)
    q.add_argument("--a2", required=True)
    q = ops.add_parser("kron", parents=[shared], help="extend an OA by a difference scheme")
    q.add_argument("--a1", required=True)
    q.add_argument("--ghm", required=True)
    q = ops.add_parser("strength3", parents=[shared], help="strength-3 extension")
    q.add_argument("--a", required=True, help="strength-3 MOA; its 2-level columns form A2")
    q.add_argument("--d", help="D_3 difference scheme for the non-binary columns")
    q.add_argument("--h", required=True, help="Hadamard matrix")
    q = ops.add_parser("split", parents=[shared], help="split a composite-level column")
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("--col", type=int, required=True)
    q.add_argument("--d1", type=int, required=True)
    q.add_argument("--d2", type=int, required=True)
    q = ops.add_parser("delete", parents=[shared], help="delete columns")
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("--cols", required=True, help="comma separated, 1-based")
    q = ops.add_parser("state", parents=[shared], help="k-uniform state of an irredundant MOA")
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("-k", type=int, required=True)
    q = ops.add_parser("basis", parents=[shared], help="Pauli orbit basis of a state")
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("-k", type=int, required=True)
    q.add_argument("--out-dir")
    q = ops.add_parser("reduce", parents=[shared], help="measure one party")
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("--party", type=int, required=True)
    q.add_argument("--outcome", type=int, required=True)
    q.add_argument("-k", type=int, help="uniformity of the input; output checked at k-1")
    q = ops.add_parser("merge", parents=[shared], help="coarse-grain two parties")
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("--i", type=int, required=True)
    q.add_argument("--j", type=int, required=True)
    q.add_argument("-k", type=int, help="uniformity of the input; output checked at k-1")
    q = ops.add_parser("tensor", parents=[shared], help="party-wise tensor product")
    q.add_argument("--a", required=True)
    q.add_argument("--b", required=True)
    q.add_argument("-k", type=int, help="uniformity to check on the product")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("shadow", parents=[common], help="AME shadow inequalities")
    p.add_argument("dims", nargs="*", type=int)
    p.add_argument("--scan", nargs=2, type=int, metavar=("N", "MAXDIM"))
    p.set_defaults(func=cmd_shadow)

    p = sub.add_parser("catalog", parents=[common], help="inspect the catalog")
    p.add_argument("action", choices=["list", "show", "gc"])
    p.add_argument("id", nargs="?")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ContractError, ConstructionError) as exc:
        where = f"construct {args.op}" if args.command == "construct" else args.command
        print(f"{where}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ForgeError as exc:  # pragma: no cover - every subclass is handled above
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BrokenPipeError:
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
