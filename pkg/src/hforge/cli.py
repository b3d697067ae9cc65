"""Command-line interface.

Exit codes: 0 success, 1 domain failure (verification false, nothing found),
2 usage or parse errors (argparse's own convention).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .catalog import (
    BUILTIN_CATALOGS,
    CatalogEntry,
    ClassifyConfig,
    STAGES,
    STATUS_CONSTRUCTED,
    classify,
    read_catalog,
    save_records,
    stage_counts,
    write_catalog,
)
from .checks import (
    VerificationError,
    d_for_order,
    dillon_excluded,
    subset_indices,
    turyn_excluded,
    verify_hadamard,
)
from .finalgroups import fixture_set_for
from .groups import (
    AbelianGroup,
    FiniteGroup,
    cyclic,
    dihedral,
    generalized_quaternion,
    modular,
    quaternion8,
    semidihedral,
    semidirect_cyclic,
)
from .ring import RingElement
from .sigsets import abelian_signature_set

_BUILDERS = {
    "cyclic": cyclic,
    "dihedral": dihedral,
    "modular": modular,
    "semidihedral": semidihedral,
    "generalized_quaternion": generalized_quaternion,
    "quaternion8": quaternion8,
    "semidirect_cyclic": semidirect_cyclic,
}

_ALIASES = {
    "M64": lambda: modular(64),
    "SmallGroup(256,536)": lambda: semidirect_cyclic(64, 4, 47),
}

_EXPR_RE = re.compile(r"^([a-z_0-9]+)\((\s*\d+\s*(?:,\s*\d+\s*)*)?\)$")
_ABELIAN_RE = re.compile(r"^C\d+(xC\d+)*$")


def group_from_expr(expr: str, catalog: Optional[Sequence[CatalogEntry]] = None) -> FiniteGroup:
    expr = expr.strip()
    if catalog:
        for e in catalog:
            if e.id == expr:
                return e.group
    if expr in _ALIASES:
        return _ALIASES[expr]()
    for e in BUILTIN_CATALOGS["builtin:16"]():
        if e.id == expr:
            return e.group
    if _ABELIAN_RE.match(expr):
        orders = [int(p[1:]) for p in expr.split("x")]
        return AbelianGroup(orders).to_group()
    m = _EXPR_RE.match(expr)
    if m:
        name = m.group(1)
        if name not in _BUILDERS:
            raise ValueError(f"unknown builder {name!r}")
        args = [int(a) for a in m.group(2).split(",")] if m.group(2) else []
        return _BUILDERS[name](*args)
    raise ValueError(f"cannot interpret group spec {expr!r}")


def _load_catalog_arg(spec: str) -> list[CatalogEntry]:
    if spec in BUILTIN_CATALOGS:
        return BUILTIN_CATALOGS[spec]()
    return read_catalog(spec)


def _read_set_file(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _cmd_classify(args) -> int:
    entries = _load_catalog_arg(args.catalog)
    if args.order:
        entries = [e for e in entries if e.order == args.order]
    if not entries:
        print("no catalog entries selected", file=sys.stderr)
        return 1
    stages = tuple(args.stages.split(",")) if args.stages else STAGES
    jobs = int(os.environ.get("HFORGE_JOBS", args.jobs))
    cfg = ClassifyConfig(stages=stages, jobs=jobs)
    records = classify(entries, cfg)
    if args.out:
        save_records(records, cfg, args.out)
    counts = stage_counts(records)
    for r in records:
        line = f"{r.group_id}\t{r.status}"
        if r.method:
            line += f"\t{r.method}"
        print(line)
    print(json.dumps({"counts": counts}, sort_keys=True))
    return 0


def _cmd_verify_ds(args) -> int:
    group = group_from_expr(args.group)
    data = _read_set_file(args.set)
    if "indices" in data:
        elt = RingElement.pm1_from_subset(group, data["indices"])
    elif "coeffs" in data:
        elt = RingElement(group, np.asarray(data["coeffs"], dtype=np.int64))
    else:
        print("set file needs an 'indices' or 'coeffs' field", file=sys.stderr)
        return 2
    verdict = verify_hadamard(group, elt)
    print(
        json.dumps(
            {
                "valid": verdict.valid,
                "params": list(verdict.params) if verdict.params else None,
                "failure_reason": verdict.failure_reason,
            },
            sort_keys=True,
        )
    )
    return 0 if verdict.valid else 1


def _cmd_sigset(args) -> int:
    orders = [int(o) for o in args.orders.split(",")]
    try:
        sig = abelian_signature_set(args.d, orders)
    except (ValueError, VerificationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for u in sorted(sig.polys):
        bits = "".join(map(str, u))
        print(f"A[{bits}] = {sig.polys[u]}")
    if args.emit:
        sig.save(args.emit)
    return 0


def _cmd_exclude(args) -> int:
    entries = _load_catalog_arg(args.catalog)
    for e in entries:
        if turyn_excluded(e.group):
            print(f"{e.id}\texcluded-turyn")
        elif dillon_excluded(e.group):
            print(f"{e.id}\texcluded-dillon")
    return 0


def _cmd_construct(args) -> int:
    group = group_from_expr(args.group)
    cfg = ClassifyConfig()
    elt = None
    method = args.method
    try:
        if method == "auto":
            from .catalog import classify_entry

            rec = classify_entry(CatalogEntry(args.group, group), cfg)
            print(json.dumps(rec.to_json_dict(), sort_keys=True))
            return 0 if rec.status == STATUS_CONSTRUCTED else 1
        if method == "trivial-drisko":
            from .groups import find_normal_abelian_subgroup
            from .sigsets import trivial_signature_set
            from .assembly import assemble_from_signature_set

            d = d_for_order(group.order)
            hit = find_normal_abelian_subgroup(group, [2] * (d + 1))
            if hit is not None:
                sig = trivial_signature_set(d + 1)
                elt = assemble_from_signature_set(group, hit[1], sig)
        elif method == "main-theorem":
            from .catalog import _try_main_stage

            elt = _try_main_stage(group, d_for_order(group.order))
        elif method == "quaternion":
            elt = _construct_quaternion_route(group)
        elif method == "pta-sig":
            from .catalog import _try_pta_sig_stage

            elt = _try_pta_sig_stage(group, cfg.pta_sig_budget)
        elif method == "pta-product":
            from .assembly import pta_product_search

            res = pta_product_search(group, node_budget=cfg.pta_product_budget)
            elt = res[1] if res else None
        elif method == "fixture":
            fix = fixture_set_for(group)
            elt = fix[1] if fix else None
        elif method in ("original-final", "mod-sig"):
            elt = _construct_final_group_route(group, method)
        else:
            print(f"unknown method {method!r}", file=sys.stderr)
            return 2
    except (ValueError, VerificationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if elt is None:
        print(json.dumps({"constructed": False, "method": method}))
        return 1
    verdict = verify_hadamard(group, elt)
    print(
        json.dumps(
            {
                "constructed": True,
                "method": method,
                "params": list(verdict.params),
                "set": subset_indices(elt),
            },
            sort_keys=True,
        )
    )
    return 0


def _construct_final_group_route(group: FiniteGroup, method: str):
    """Run the stored final-group pieces through one of the two assembly
    routes: the split form D0(1+g) + D1(1-g), or the modified signature sum."""
    from .assembly import modified_signature_assemble
    from .finalgroups import (
        build_final_set,
        final_embedding,
        m64_parts,
        match_presentation,
        sg256_parts,
    )

    if group.order == 64:
        gm = match_presentation(group, 32, 2, 17)
        parts = m64_parts(group, int(gm.images[2]), int(gm.images[1])) if gm else None
    elif group.order == 256:
        gm = match_presentation(group, 64, 4, 47)
        parts = sg256_parts(group, int(gm.images[4]), int(gm.images[1])) if gm else None
    else:
        parts = None
    if parts is None:
        return None
    if method == "original-final":
        return build_final_set(parts)
    return modified_signature_assemble(group, final_embedding(parts), parts["blocks"])


def _construct_quaternion_route(group: FiniteGroup):
    """Index-2 quaternion subgroup route (order-16 groups containing Q8)."""
    from .assembly import cor_pta_ss_assemble
    from .groups import index2_subgroups, subgroup_as_group
    from .sigsets import quaternion_signature_set, SignatureSet
    from .ring import RingElement as RE

    sigq = quaternion_signature_set()
    for k_set in index2_subgroups(group):
        if len(k_set) != 8:
            continue
        k_sub, incl = subgroup_as_group(group, k_set)
        orders = k_sub.element_orders()
        if sorted(int(o) for o in orders) != sorted(
            int(o) for o in quaternion8().element_orders()
        ):
            continue
        xs = [h for h in range(1, 8) if orders[h] == 4]
        hit = None
        for x in xs:
            for y in xs:
                if y == x:
                    continue
                if k_sub.op(x, x) == k_sub.op(y, y) and k_sub.conjugate(y, x) == k_sub.inverse(x):
                    if len({0, x, y, k_sub.op(x, y)}) == 4:
                        hit = (x, y)
                        break
            if hit:
                break
        if hit is None:
            continue
        x, y = hit
        a = RE.from_support(k_sub, {0: 1, x: -1, y: -1, k_sub.op(x, y): -1})
        from .groups import ElemAbelianEmbedding

        emb = ElemAbelianEmbedding(k_sub, (k_sub.op(x, x),))
        sig = SignatureSet(k_sub, emb, {(0,): a, (1,): a})
        g_inv = int(incl.images[k_sub.op(x, x)])
        if g_inv not in set(group.center()):
            continue
        return cor_pta_ss_assemble(group, k_set, g_inv, sig, incl)
    return None


def _cmd_catalog(args) -> int:
    if args.which == "gen16":
        entries = BUILTIN_CATALOGS["builtin:16"]()
        if args.out:
            write_catalog(entries, args.out)
            print(f"wrote {len(entries)} groups to {args.out}")
        else:
            import io

            buf = io.StringIO()
            for e in entries:
                rec = {
                    "id": e.id,
                    "order": e.order,
                    "table": [int(v) for v in e.group.mul.ravel()],
                }
                if e.group.labels is not None:
                    rec["labels"] = e.group.labels
                buf.write(json.dumps(rec, sort_keys=True) + "\n")
            sys.stdout.write(buf.getvalue())
        return 0
    print(f"unknown catalog action {args.which!r}", file=sys.stderr)
    return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hforge",
        description="Hadamard difference sets in 2-groups: construct, verify, classify.",
    )
    parser.add_argument("--version", action="version", version=f"hforge {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("classify", help="run the staged pipeline over a catalog")
    p.add_argument("--catalog", required=True, help="catalog path or builtin:<name>")
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--out", default=None, help="record file to write")
    p.add_argument("--stages", default=None, help="comma list, e.g. exclude,main")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_classify)

    p = subs.add_parser("verify-ds", help="verify a stored difference set")
    p.add_argument("--group", required=True, help="catalog id or builder expression")
    p.add_argument("--set", required=True, help="JSON file with indices or coeffs")
    p.set_defaults(func=_cmd_verify_ds)

    p = subs.add_parser("sigset", help="build an abelian signature set")
    p.add_argument("--orders", required=True, help="comma list, e.g. 4,4")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--emit", default=None, help="write the set to a JSON file")
    p.set_defaults(func=_cmd_sigset)

    p = subs.add_parser("exclude", help="list groups hit by the nonexistence tests")
    p.add_argument("--catalog", required=True)
    p.set_defaults(func=_cmd_exclude)

    p = subs.add_parser("construct", help="construct a set in one group")
    p.add_argument("--group", required=True)
    p.add_argument("--method", default="auto")
    p.set_defaults(func=_cmd_construct)

    p = subs.add_parser("catalog", help="catalog utilities")
    p.add_argument("which", choices=["gen16"])
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_catalog)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, VerificationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
