"""Stored difference-set data for the two hard cyclic-extension groups.

The order-64 modular group and the order-256 group C_64 x|_47 C_4 are the
groups their orders' classifications came down to; their sets are shipped as
data (the search that found them is far outside desk scale) and re-verified
on every use, both through the split assembly D = D_0(1+g) + D_1(1-g) and
through the modified signature identity.
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources
from typing import Optional

import numpy as np

from .checks import VerificationError
from .groups import ElemAbelianEmbedding, FiniteGroup, GroupMap, modular, semidirect_cyclic, subgroup_generated
from .ring import RingElement

M64_ID = "M64"
SG256_ID = "SmallGroup(256,536)"


def m64_group() -> FiniteGroup:
    return modular(64)


def sg256_536_group() -> FiniteGroup:
    g = semidirect_cyclic(64, 4, 47)
    g.name = "C64:47:C4"
    return g


def _xp(g: FiniteGroup, x: int, k: int, c: int = 1) -> RingElement:
    return RingElement.basis(g, g.power(x, k), c)


def m64_parts(g: Optional[FiniteGroup] = None, x: int = 2, y: int = 1):
    """The four ternary pieces A_ij plus D_0, D_1 in the modular group of
    order 64, written against generators x (order 32) and y (order 2)."""
    g = g or m64_group()
    one = RingElement.one(g)
    x8p = one + _xp(g, x, 8)           # 1 + x^8
    x8m = one - _xp(g, x, 8)           # 1 - x^8
    a00 = -_xp(g, x, 7) * x8p + x8m
    a01 = _xp(g, x, 1) * x8p + _xp(g, x, 4) * x8m
    a10 = (_xp(g, x, 6) - _xp(g, x, 5)) * x8m
    a11 = (_xp(g, x, 2) + _xp(g, x, 3)) * x8p
    yp = one + RingElement.basis(g, y)
    ym = one - RingElement.basis(g, y)
    d0 = a00 * yp + a01 * ym
    d1 = a10 * yp + a11 * ym
    blocks = {(0, 0): a00, (0, 1): a01, (1, 0): a10, (1, 1): a11}
    return {
        "group": g,
        "x": x,
        "y": y,
        "g_central": g.power(x, 16),
        "e_basis": (g.power(x, 16), y),
        "blocks": blocks,
        "d0": d0,
        "d1": d1,
    }


def sg256_parts(g: Optional[FiniteGroup] = None, x: int = 4, y: int = 1):
    """The stored ternary pieces in C_64 x|_47 C_4, generators x (order 64),
    y (order 4)."""
    g = g or sg256_536_group()
    one = RingElement.one(g)
    ye = RingElement.basis(g, y)
    x8p = one + _xp(g, x, 8)
    x8m = one - _xp(g, x, 8)
    x16p = one + _xp(g, x, 16)
    x16m = one - _xp(g, x, 16)
    a00 = (x8m - _xp(g, x, 2) * x8p) * x16p + (
        _xp(g, x, 5) + _xp(g, x, 6) * ye
    ) * x8p * x16m
    a01 = (x8m - _xp(g, x, 5) * x8p) * ye * x16p + (
        -_xp(g, x, 3) * x8m * ye + _xp(g, x, 3) * x8p
    ) * x16m
    a10 = -(
        (_xp(g, x, 1) + _xp(g, x, 4) + _xp(g, x, 9) + _xp(g, x, 12) + _xp(g, x, 14))
        * x16p
        + (_xp(g, x, 6) + _xp(g, x, 7) - _xp(g, x, 15)) * x16m
    )
    a11 = (
        -(
            (_xp(g, x, 1) - _xp(g, x, 9) + _xp(g, x, 10)) * x16p
            + (
                _xp(g, x, 2)
                + _xp(g, x, 4)
                - _xp(g, x, 7)
                + _xp(g, x, 12)
                - _xp(g, x, 15)
            )
            * x16m
        )
        * ye
    )
    y2 = g.op(y, y)
    y2p = one + RingElement.basis(g, y2)
    y2m = one - RingElement.basis(g, y2)
    d0 = a00 * y2p + a01 * y2m
    d1 = a10 * y2p + a11 * y2m
    blocks = {(0, 0): a00, (0, 1): a01, (1, 0): a10, (1, 1): a11}
    return {
        "group": g,
        "x": x,
        "y": y,
        "g_central": g.power(x, 32),
        "e_basis": (g.power(x, 32), y2),
        "blocks": blocks,
        "d0": d0,
        "d1": d1,
    }


def build_final_set(parts) -> RingElement:
    """Assemble and verify D = D_0(1+g) + D_1(1-g) from a parts bundle."""
    from .assembly import original_final_assemble

    return original_final_assemble(
        parts["group"], parts["g_central"], parts["d0"], parts["d1"]
    )


def final_embedding(parts) -> ElemAbelianEmbedding:
    return ElemAbelianEmbedding(parts["group"], parts["e_basis"])


# -- canonical-form matching against catalog copies ---------------------------


def match_presentation(
    g: FiniteGroup, x_order: int, y_order: int, twist: int
) -> Optional[GroupMap]:
    """Find generators realizing <x, y : x^m = y^n = 1, yxy^-1 = x^twist> in g,
    returned as a map from the standard semidirect model onto g."""
    m, n = x_order, y_order
    if g.order != m * n:
        return None
    model = semidirect_cyclic(m, n, twist)
    orders = g.element_orders()
    xs = [h for h in range(1, g.order) if orders[h] == m]
    for x in xs:
        xspan = subgroup_generated(g, [x])
        xt = g.power(x, twist)
        for y in range(1, g.order):
            if orders[y] != n or y in xspan:
                continue
            if g.conjugate(y, x) != xt:
                continue
            images = np.empty(g.order, dtype=np.int32)
            for i in range(m):
                xi = g.power(x, i)
                for j in range(n):
                    images[i * n + j] = g.op(xi, g.power(y, j))
            if len(set(images.tolist())) != g.order:
                continue
            try:
                return GroupMap(model, g, images)
            except ValueError:
                continue
    return None


def fixture_set_for(g: FiniteGroup) -> Optional[tuple[str, RingElement]]:
    """Build and verify a stored set inside g if g matches a fixture group."""
    if g.order == 64:
        gm = match_presentation(g, 32, 2, 17)
        if gm is None:
            return None
        x, y = int(gm.images[2]), int(gm.images[1])
        parts = m64_parts(g, x, y)
        return M64_ID, build_final_set(parts)
    if g.order == 256:
        gm = match_presentation(g, 64, 4, 47)
        if gm is None:
            return None
        x, y = int(gm.images[4]), int(gm.images[1])
        parts = sg256_parts(g, x, y)
        return SG256_ID, build_final_set(parts)
    return None


# -- versioned fixture files ----------------------------------------------------


def _fixture_payload(name: str, d: RingElement) -> dict:
    indices = [int(i) for i in np.flatnonzero(d.coeffs == -1)]
    digest = hashlib.sha256(
        json.dumps({"name": name, "indices": indices}, sort_keys=True).encode()
    ).hexdigest()
    return {"format": 1, "name": name, "minus_one_indices": indices, "sha256": digest}


def load_fixture(name: str) -> dict:
    text = resources.files("hforge.data").joinpath(f"{name}.json").read_text()
    data = json.loads(text)
    expect = hashlib.sha256(
        json.dumps(
            {"name": data["name"], "indices": data["minus_one_indices"]},
            sort_keys=True,
        ).encode()
    ).hexdigest()
    if data["sha256"] != expect:
        raise VerificationError(f"fixture {name} fails its checksum")
    return data


def fixture_element(name: str, group: FiniteGroup) -> RingElement:
    data = load_fixture(name)
    return RingElement.pm1_from_subset(group, data["minus_one_indices"])
