"""Group catalogs, the staged classification pipeline, and record persistence.

The pipeline mirrors the streamlined order of attack: exclusion tests first,
then normal-abelian-subgroup signature sets, then the PTA-derived routes on
index-2 subgroups, then direct PTA products, then the stored final-group
constructions. Anything left is recorded as unresolved.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .assembly import (
    assemble_from_signature_set,
    cor_pta_ss_assemble,
    pta_product_search,
)
from .checks import (
    VerificationError,
    d_for_order,
    dillon_excluded,
    is_hadamard_ds,
    subset_indices,
    turyn_excluded,
)
from .finalgroups import fixture_set_for
from .groups import (
    AbelianGroup,
    FiniteGroup,
    GroupAxiomError,
    GroupMap,
    cyclic,
    dihedral,
    direct_product,
    find_normal_abelian_subgroup,
    generalized_quaternion,
    index2_subgroups,
    modular,
    quaternion8,
    semidihedral,
    semidirect_cyclic,
    semidirect_product,
    subgroup_as_group,
)
from .ring import RingElement
from .sigsets import (
    abelian_signature_set,
    hds_times_c2_signature_set,
    pta_search_for_signature,
    valid_abelian_tuples,
)

STAGES = ("exclude", "main", "pta-sig", "hds-c2", "pta-product", "fixture")

STATUS_EXCLUDED_TURYN = "excluded-turyn"
STATUS_EXCLUDED_DILLON = "excluded-dillon"
STATUS_CONSTRUCTED = "constructed"
STATUS_UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    group: FiniteGroup

    @property
    def order(self) -> int:
        return self.group.order


@dataclass(frozen=True)
class ClassifyConfig:
    stages: tuple[str, ...] = STAGES
    pta_sig_budget: Optional[int] = 2_000_000
    pta_product_budget: Optional[int] = 2_000_000
    jobs: int = 1

    def __post_init__(self):
        for s in self.stages:
            if s not in STAGES:
                raise ValueError(f"unknown stage {s!r}; known: {', '.join(STAGES)}")

    def hash(self) -> str:
        payload = {
            "stages": [s for s in STAGES if s in self.stages],
            "pta_sig_budget": self.pta_sig_budget,
            "pta_product_budget": self.pta_product_budget,
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


@dataclass(frozen=True)
class ConstructionRecord:
    group_id: str
    order: int
    status: str
    method: Optional[str]
    set: Optional[tuple[int, ...]]
    params: Optional[tuple[int, int, int]]
    checksum: str = ""

    def __post_init__(self):
        if self.status == STATUS_CONSTRUCTED and self.set is None:
            raise ValueError("constructed records must carry the set")
        if self.status.startswith("excluded") and self.set is not None:
            raise ValueError("excluded records must not carry a set")
        if not self.checksum:
            object.__setattr__(self, "checksum", self.compute_checksum())

    def compute_checksum(self) -> str:
        payload = {
            "group_id": self.group_id,
            "order": self.order,
            "status": self.status,
            "method": self.method,
            "set": list(self.set) if self.set is not None else None,
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()

    def to_json_dict(self) -> dict:
        return {
            "kind": "record",
            "group_id": self.group_id,
            "order": self.order,
            "status": self.status,
            "method": self.method,
            "set": list(self.set) if self.set is not None else None,
            "params": list(self.params) if self.params is not None else None,
            "checksum": self.checksum,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ConstructionRecord":
        return cls(
            group_id=data["group_id"],
            order=int(data["order"]),
            status=data["status"],
            method=data.get("method"),
            set=tuple(data["set"]) if data.get("set") is not None else None,
            params=tuple(data["params"]) if data.get("params") is not None else None,
            checksum=data.get("checksum", ""),
        )


# -- catalog I/O -------------------------------------------------------------------


def import_catalog(path) -> list["CatalogEntry"]:
    """Alias for read_catalog: ingest and validate a catalog file."""
    return read_catalog(path)


def write_catalog(entries: Iterable[CatalogEntry], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in entries:
            rec = {
                "id": e.id,
                "order": e.order,
                "table": [int(v) for v in e.group.mul.ravel()],
            }
            if e.group.labels is not None:
                rec["labels"] = e.group.labels
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_catalog(path) -> list[CatalogEntry]:
    entries: list[CatalogEntry] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
            gid = str(rec["id"])
            if gid in seen:
                raise ValueError(f"{path}:{lineno}: duplicate group id {gid!r}")
            seen.add(gid)
            order = int(rec["order"])
            table = rec["table"]
            if len(table) != order * order:
                raise ValueError(
                    f"{path}:{lineno}: table has {len(table)} entries, expected {order * order}"
                )
            mul = np.asarray(table, dtype=np.int32).reshape(order, order)
            try:
                group = FiniteGroup(mul, name=gid, labels=rec.get("labels"))
            except GroupAxiomError as exc:
                raise ValueError(f"{path}:{lineno}: group {gid!r}: {exc}") from exc
            entries.append(CatalogEntry(gid, group))
    return entries


# -- built-in catalogs ----------------------------------------------------------------


def _abelian_entry(orders: Sequence[int], gid: Optional[str] = None) -> CatalogEntry:
    grp = AbelianGroup(orders).to_group()
    return CatalogEntry(gid or grp.name, grp)


def _c4xc2_semidirect() -> FiniteGroup:
    """(C4 x C2) x| C2 with the twist a -> ab, b -> b."""
    n = AbelianGroup([4, 2]).to_group()
    ident = list(range(8))
    twist = [AbelianGroup([4, 2]).index_of((e1, (e1 + e2) % 2)) for e1 in range(4) for e2 in range(2)]
    g = semidirect_product(n, cyclic(2), [ident, twist])
    g.name = "C4xC2:C2"
    return g


def _pauli_group() -> FiniteGroup:
    """Central product D8 * C4 (identify the two central involutions)."""
    from .groups import quotient, subgroup_generated

    big = direct_product(dihedral(8), cyclic(4))
    r2z2 = 4 * 4 + 2  # (r^2, z^2)
    n = subgroup_generated(big, [r2z2])
    g, _ = quotient(big, n)
    g.name = "D8*C4"
    return g


def builtin_catalog_16() -> list[CatalogEntry]:
    """The 14 groups of order 16, from presentations."""
    q8 = quaternion8()
    entries = [
        CatalogEntry("C16", cyclic(16)),
        _abelian_entry([4, 4], "C4xC4"),
        _abelian_entry([8, 2], "C8xC2"),
        _abelian_entry([4, 2, 2], "C4xC2xC2"),
        _abelian_entry([2, 2, 2, 2], "C2^4"),
        CatalogEntry("C4:C4", semidirect_cyclic(4, 4, 3)),
        CatalogEntry("C4xC2:C2", _c4xc2_semidirect()),
        CatalogEntry("M16", modular(16)),
        CatalogEntry("D16", dihedral(16)),
        CatalogEntry("SD16", semidihedral(16)),
        CatalogEntry("Q16", generalized_quaternion(16)),
        CatalogEntry("D8xC2", direct_product(dihedral(8), cyclic(2))),
        CatalogEntry("Q8xC2", direct_product(q8, cyclic(2))),
        CatalogEntry("D8*C4", _pauli_group()),
    ]
    return entries


def builtin_abelian_catalog(order: int) -> list[CatalogEntry]:
    """All abelian groups of the given 2-power order."""

    def partitions(total: int, high: int) -> list[tuple[int, ...]]:
        if total == 0:
            return [()]
        out = []
        for a in range(min(high, total), 0, -1):
            for rest in partitions(total - a, a):
                out.append((a,) + rest)
        return out

    e = order.bit_length() - 1
    if order != 1 << e:
        raise ValueError("order must be a power of 2")
    return [_abelian_entry([1 << a for a in part]) for part in partitions(e, e)]


def builtin_spot_catalog_64() -> list[CatalogEntry]:
    """A spot-check sample of order-64 groups built from presentations."""
    entries = list(builtin_abelian_catalog(64))
    entries += [
        CatalogEntry("M64", modular(64)),
        CatalogEntry("D64", dihedral(64)),
        CatalogEntry("SD64", semidihedral(64)),
        CatalogEntry("Q64", generalized_quaternion(64)),
        CatalogEntry("Q8xC2^3", direct_product(quaternion8(), AbelianGroup([2, 2, 2]).to_group())),
        CatalogEntry("D8xD8", direct_product(dihedral(8), dihedral(8))),
        CatalogEntry("Q8xQ8", direct_product(quaternion8(), quaternion8())),
        CatalogEntry("M32xC2", direct_product(modular(32), cyclic(2))),
        CatalogEntry("C16:C4", semidirect_cyclic(16, 4, 3)),
    ]
    return entries


def builtin_spot_catalog_256() -> list[CatalogEntry]:
    g = semidirect_cyclic(64, 4, 47)
    g.name = "C64:47:C4"
    return [
        CatalogEntry("SmallGroup(256,536)", g),
        _abelian_entry([16, 16], "C16xC16"),
        _abelian_entry([8, 8, 2, 2], "C8xC8xC2xC2"),
    ]


BUILTIN_CATALOGS = {
    "builtin:16": builtin_catalog_16,
    "builtin:abelian64": lambda: builtin_abelian_catalog(64),
    "builtin:spot64": builtin_spot_catalog_64,
    "builtin:spot256": builtin_spot_catalog_256,
}


# -- the pipeline ------------------------------------------------------------------


def theorem_main_tuples(d: int) -> list[list[int]]:
    """Invariant-factor lists to try at the normal-abelian stage, largest rank
    first (cheapest searches first)."""
    tuples = sorted(valid_abelian_tuples(d), key=lambda t: (-len(t), t))
    return [[1 << a for a in t] for t in tuples]


def _try_main_stage(group: FiniteGroup, d: int) -> Optional[RingElement]:
    for orders in theorem_main_tuples(d):
        hit = find_normal_abelian_subgroup(group, orders)
        if hit is None:
            continue
        _, emb_map = hit
        sig = abelian_signature_set(d, orders)
        return assemble_from_signature_set(group, emb_map, sig)
    return None


def _index2_with_central(group: FiniteGroup):
    central = [g for g in group.central_involutions()]
    for k_set in index2_subgroups(group):
        inside = [g for g in central if g in k_set]
        if inside:
            yield k_set, inside


def _try_pta_sig_stage(
    group: FiniteGroup, budget: Optional[int]
) -> Optional[RingElement]:
    for k_set, central in _index2_with_central(group):
        k_sub, incl = subgroup_as_group(group, k_set)
        pos = {int(v): i for i, v in enumerate(incl.images)}
        for g_inv in central:
            sig = pta_search_for_signature(k_sub, pos[g_inv], node_budget=budget)
            if sig is not None:
                return cor_pta_ss_assemble(group, k_set, g_inv, sig, incl)
    return None


def _try_hds_c2_stage(
    group: FiniteGroup, cfg: "ClassifyConfig", depth: int
) -> Optional[RingElement]:
    if depth > 3:
        return None
    for k_set, central in _index2_with_central(group):
        k_sub, incl = subgroup_as_group(group, k_set)
        pos = {int(v): i for i, v in enumerate(incl.images)}
        for g_inv in central:
            g_in_k = pos[g_inv]
            for h_set in index2_subgroups(k_sub):
                if g_in_k in h_set:
                    continue
                h_sub, h_incl = subgroup_as_group(k_sub, h_set)
                d_h = construct_difference_set(h_sub, cfg, depth=depth + 1)
                if d_h is None:
                    continue
                sig = hds_times_c2_signature_set(h_sub, d_h)
                # map H x C2 onto K inside G: (h, e) -> incl(h) * g^e
                images = np.empty(sig.group.order, dtype=np.int32)
                for h_idx in range(h_sub.order):
                    h_in_g = int(incl.images[int(h_incl.images[h_idx])])
                    images[2 * h_idx] = h_in_g
                    images[2 * h_idx + 1] = group.op(h_in_g, g_inv)
                carrier_map = GroupMap(sig.group, group, images)
                if not carrier_map.is_injective():
                    continue
                return cor_pta_ss_assemble(group, k_set, g_inv, sig, carrier_map)
    return None


def construct_difference_set(
    group: FiniteGroup, cfg: ClassifyConfig, depth: int = 0
) -> Optional[RingElement]:
    """Run the construction stages (no exclusion) and return a verified set."""
    d = d_for_order(group.order)
    if d == 0:
        cand = RingElement.pm1_from_subset(group, [0])
        return cand if is_hadamard_ds(group, cand) else None
    if "main" in cfg.stages:
        hit = _try_main_stage(group, d)
        if hit is not None:
            return hit
    if "pta-sig" in cfg.stages:
        hit = _try_pta_sig_stage(group, cfg.pta_sig_budget)
        if hit is not None:
            return hit
    if "hds-c2" in cfg.stages:
        hit = _try_hds_c2_stage(group, cfg, depth)
        if hit is not None:
            return hit
    if "pta-product" in cfg.stages:
        res = pta_product_search(group, node_budget=cfg.pta_product_budget)
        if res is not None:
            return res[1]
    return None


def classify_entry(entry: CatalogEntry, cfg: ClassifyConfig) -> ConstructionRecord:
    group = entry.group
    d = d_for_order(group.order)

    def record(status, method=None, elt: Optional[RingElement] = None):
        params = None
        sset = None
        if elt is not None:
            if not is_hadamard_ds(group, elt):
                raise VerificationError(f"unverified set for {entry.id}")
            sset = tuple(subset_indices(elt))
            k = len(sset)
            params = (group.order, k, k - group.order // 4)
        return ConstructionRecord(
            group_id=entry.id,
            order=group.order,
            status=status,
            method=method,
            set=sset,
            params=params,
        )

    if "exclude" in cfg.stages:
        if turyn_excluded(group):
            return record(STATUS_EXCLUDED_TURYN)
        if dillon_excluded(group):
            return record(STATUS_EXCLUDED_DILLON)
    if d == 0:
        elt = RingElement.pm1_from_subset(group, [0])
        return record(STATUS_CONSTRUCTED, "trivial-drisko", elt)
    if "main" in cfg.stages:
        hit = _try_main_stage(group, d)
        if hit is not None:
            return record(STATUS_CONSTRUCTED, "main-theorem", hit)
    if "pta-sig" in cfg.stages:
        hit = _try_pta_sig_stage(group, cfg.pta_sig_budget)
        if hit is not None:
            return record(STATUS_CONSTRUCTED, "pta-sig", hit)
    if "hds-c2" in cfg.stages:
        hit = _try_hds_c2_stage(group, cfg, 0)
        if hit is not None:
            return record(STATUS_CONSTRUCTED, "hds-c2", hit)
    if "pta-product" in cfg.stages:
        res = pta_product_search(group, node_budget=cfg.pta_product_budget)
        if res is not None:
            return record(STATUS_CONSTRUCTED, "pta-product", res[1])
    if "fixture" in cfg.stages:
        fix = fixture_set_for(group)
        if fix is not None:
            return record(STATUS_CONSTRUCTED, "fixture", fix[1])
    return record(STATUS_UNRESOLVED)


def _classify_worker(payload) -> dict:
    gid, order, table, labels, cfg_kwargs = payload
    mul = np.asarray(table, dtype=np.int32).reshape(order, order)
    entry = CatalogEntry(gid, FiniteGroup(mul, name=gid, labels=labels))
    cfg = ClassifyConfig(**cfg_kwargs)
    return classify_entry(entry, cfg).to_json_dict()


def classify(
    entries: Sequence[CatalogEntry], cfg: Optional[ClassifyConfig] = None
) -> list[ConstructionRecord]:
    cfg = cfg or ClassifyConfig()
    if cfg.jobs <= 1 or len(entries) <= 1:
        return [classify_entry(e, cfg) for e in entries]
    cfg_kwargs = {
        "stages": cfg.stages,
        "pta_sig_budget": cfg.pta_sig_budget,
        "pta_product_budget": cfg.pta_product_budget,
        "jobs": 1,
    }
    payloads = [
        (e.id, e.order, e.group.mul.ravel().tolist(), e.group.labels, cfg_kwargs)
        for e in entries
    ]
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        dicts = list(pool.map(_classify_worker, payloads))
    return [ConstructionRecord.from_json_dict(d) for d in dicts]


def stage_counts(records: Iterable[ConstructionRecord]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for r in records:
        key = r.method if r.status == STATUS_CONSTRUCTED else r.status
        counts[key] = counts.get(key, 0) + 1
    return counts


# -- record persistence ----------------------------------------------------------------


def save_records(records: Sequence[ConstructionRecord], cfg: ClassifyConfig, path) -> None:
    header = {
        "kind": "header",
        "format": 1,
        "tool": "hforge",
        "version": __version__,
        "config_hash": cfg.hash(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for r in records:
            fh.write(json.dumps(r.to_json_dict(), sort_keys=True) + "\n")


def load_records(
    path, entries: Optional[Sequence[CatalogEntry]] = None
) -> list[ConstructionRecord]:
    """Load records; when catalog entries are given, re-verify every
    constructed set (checksum plus the group-ring identity)."""
    by_id = {e.id: e for e in entries} if entries is not None else None
    out: list[ConstructionRecord] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            data = json.loads(line)
            if data.get("kind") == "header":
                continue
            rec = ConstructionRecord.from_json_dict(data)
            if rec.checksum != rec.compute_checksum():
                raise VerificationError(f"{path}:{lineno}: checksum mismatch for {rec.group_id}")
            if by_id is not None and rec.status == STATUS_CONSTRUCTED:
                entry = by_id.get(rec.group_id)
                if entry is None:
                    raise VerificationError(
                        f"{path}:{lineno}: record {rec.group_id} has no catalog group"
                    )
                elt = RingElement.pm1_from_subset(entry.group, rec.set)
                if not is_hadamard_ds(entry.group, elt):
                    raise VerificationError(
                        f"{path}:{lineno}: stored set for {rec.group_id} fails verification"
                    )
            out.append(rec)
    return out
