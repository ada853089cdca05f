"""Divisor extraction by one multiplication pass over a double superposition.

The working layout holds three n-bit subspaces: "0" carries one operand x,
"1" and "2" both carry the other operand y (the copy in "2" survives the
pipeline).  One application of the lifted multiplier rewrites every term to
the wide product xy across subspaces "0"+"1" with y still in "2"; projecting
onto product = Z and reading subspace "2" then yields every divisor of Z.

Two multiplier routes are provided: the faithful route runs the NAND
multiplier netlist on each blade and relabels the product places back into
the layout, the fast route permutes blades directly with host-integer
multiplication.  They are interchangeable (and tested equal); the fast route
just scales further.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable

from .circuit import (
    MemoryBlade,
    Netlist,
    build_nand_multiplier,
    linear_extend,
    relabel_and_discard,
    run_netlist,
)
from .core import Multivector, ResourceCapError
from .encoding import SubspaceLayout, decode, decode_wide, encode, encode_wide

FAITHFUL_MAX_N = 10
FAST_MAX_N = 12

ROUTES = ("faithful", "fast")


class FactoringLayout:
    """Three n-bit subspaces plus the ancilla region used by the netlist route."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("operand width must be at least 1")
        self.n = n
        self.layout = SubspaceLayout([("0", n), ("1", n), ("2", n)])

    @property
    def dimension(self) -> int:
        return self.layout.total_dim

    def multiplier_netlist(self) -> Netlist:
        """NAND multiplier reading operands from subspaces "0" and "2"."""
        return _multiplier_for(self.n)


@lru_cache(maxsize=None)
def _multiplier_for(n: int) -> Netlist:
    a = list(range(n))
    b = list(range(2 * n, 3 * n))
    return build_nand_multiplier(n, a_places=a, b_places=b, first_free=3 * n)


def build_factoring_superposition(
    fl: FactoringLayout,
    xs: Iterable[int] | None = None,
    ys: Iterable[int] | None = None,
    max_n: int = FAST_MAX_N,
) -> Multivector:
    """Sum of ``coded0(x) coded1(y) coded2(y)`` over all operand pairs.

    Defaults to the full ranges x, y in [0, 2^n), i.e. 4^n terms with unit
    coefficients; restricted ranges give the corresponding sub-superposition.
    """
    n = fl.n
    if n > max_n:
        raise ResourceCapError(
            f"width {n} exceeds the configured cap {max_n} (4^n terms)"
        )
    xs = range(1 << n) if xs is None else list(xs)
    ys = range(1 << n) if ys is None else list(ys)
    terms = {}
    for y in ys:
        y_part = encode(y, "1", fl.layout) | encode(y, "2", fl.layout)
        for x in xs:
            terms[encode(x, "0", fl.layout) | y_part] = 1
    return Multivector(fl.dimension, terms)


def _fast_multiply_op(fl: FactoringLayout):
    layout = fl.layout
    keep = layout["2"].mask
    dim = fl.dimension

    def op(mask: int) -> Multivector:
        x = decode(mask, "0", layout)
        y = decode(mask, "2", layout)
        return Multivector.blade(dim, encode_wide(x * y, "0", "1", layout) | (mask & keep))

    return op


def _faithful_multiply(fl: FactoringLayout, state: Multivector) -> Multivector:
    netlist = fl.multiplier_netlist()
    dim = netlist.place_count()

    def op(mask: int) -> Multivector:
        # The reorder sign accumulated by the gate writes is semantically
        # inert for bit contents; the route drops it so that legitimate term
        # merges in the relabel step stay all-positive.
        final = run_netlist(netlist, MemoryBlade(mask))
        return Multivector.blade(dim, final.mask)

    product_places = netlist.output_groups[0]
    place_map = {src: k for k, src in enumerate(product_places)}
    for place in range(2 * fl.n, 3 * fl.n):  # subspace "2" stays put
        place_map[place] = place
    discard = set(range(dim)) - set(place_map)
    wide = linear_extend(op)(state)
    return relabel_and_discard(wide, place_map, discard, dimension=fl.dimension)


def multiply_all(fl: FactoringLayout, state: Multivector, route: str = "fast") -> Multivector:
    """One lifted multiplication pass: every term becomes wide-product form."""
    if route == "fast":
        return linear_extend(_fast_multiply_op(fl))(state)
    if route == "faithful":
        return _faithful_multiply(fl, state)
    raise ValueError(f"unknown route {route!r}; expected one of {ROUTES}")


def project_product(fl: FactoringLayout, state: Multivector, z: int) -> Multivector:
    """Keep exactly the terms whose subspaces "0"+"1" decode to the product z."""
    if not 1 <= z < (1 << fl.n):
        raise ValueError(f"target {z} outside [1, 2^{fl.n})")
    layout = fl.layout
    return state.project(lambda mask: decode_wide(mask, "0", "1", layout) == z)


def read_divisors(fl: FactoringLayout, state: Multivector) -> set[int]:
    """Decode subspace "2" of every term, deduplicated."""
    layout = fl.layout
    return {decode(mask, "2", layout) for mask in state.masks()}


def factor_pipeline(
    z: int,
    n: int,
    route: str = "fast",
    max_n: int | None = None,
    keep_state: bool = False,
) -> dict:
    """Full pipeline for one target; returns divisors plus stage statistics."""
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}; expected one of {ROUTES}")
    if max_n is None:
        max_n = FAITHFUL_MAX_N if route == "faithful" else FAST_MAX_N
    if z < 1:
        raise ValueError("target must be at least 1")
    if z >= 1 << n:
        raise ValueError(
            f"width n={n} cannot represent every divisor of {z}; need 2^n > z"
        )
    fl = FactoringLayout(n)
    state = build_factoring_superposition(fl, max_n=max_n)
    terms_before = len(state)
    multiplied = multiply_all(fl, state, route=route)
    projected = project_product(fl, multiplied, z)
    out = {
        "z": z,
        "n": n,
        "route": route,
        "divisors": sorted(read_divisors(fl, projected)),
        "terms_before": terms_before,
        "terms_after": len(projected),
        "multiply_passes": 1,
    }
    if keep_state:
        out["state"] = projected
    return out
