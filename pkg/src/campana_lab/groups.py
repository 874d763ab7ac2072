"""Finite groups of order d in regular representation.

Elements are the indices 0..d-1; the group acts on itself by left
multiplication, which is the free and transitive action the orbit
combinatorics needs.  Multisets of elements are canonicalised as sorted
index tuples throughout.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import NotAGroup, UnknownName

MAX_ORDER = 12


@dataclass(frozen=True)
class GroupTable:
    """Validated Cayley table with derived identity and inverses.

    ``cayley[g][h]`` is the index of g*h.  Rows and columns are
    permutations of 0..d-1 and associativity holds for all triples.
    """

    order: int
    cayley: tuple[tuple[int, ...], ...]
    identity: int
    inverse: tuple[int, ...]
    name: str = field(default="", compare=False)

    def mul(self, g: int, h: int) -> int:
        return self.cayley[g][h]

    def element_order(self, g: int) -> int:
        n, x = 1, g
        while x != self.identity:
            x = self.cayley[x][g]
            n += 1
        return n

    def __str__(self) -> str:
        return self.name or f"group of order {self.order}"


def group_from_cayley(table: Sequence[Sequence[int]], name: str = "") -> GroupTable:
    """Validate a Cayley table and derive identity and inverses.

    Raises NotAGroup with the first violating entry or triple.
    """
    d = len(table)
    if d == 0:
        raise NotAGroup("empty table")
    if d > MAX_ORDER:
        raise NotAGroup(f"order {d} exceeds supported maximum {MAX_ORDER}")
    rows = []
    for i, row in enumerate(table):
        if len(row) != d:
            raise NotAGroup(f"row {i} has length {len(row)}, expected {d}")
        r = tuple(int(x) for x in row)
        for x in r:
            if not 0 <= x < d:
                raise NotAGroup(f"entry {x} in row {i} out of range 0..{d - 1}")
        rows.append(r)
    cayley = tuple(rows)

    ident = set(range(d))
    for i in range(d):
        if set(cayley[i]) != ident:
            raise NotAGroup(f"row {i} is not a permutation (not a Latin square)")
        if {cayley[g][i] for g in range(d)} != ident:
            raise NotAGroup(f"column {i} is not a permutation (not a Latin square)")

    identity = None
    for e in range(d):
        if all(cayley[e][h] == h for h in range(d)) and all(
            cayley[g][e] == g for g in range(d)
        ):
            identity = e
            break
    if identity is None:
        raise NotAGroup("no two-sided identity element")

    for g in range(d):
        for h in range(d):
            for k in range(d):
                if cayley[cayley[g][h]][k] != cayley[g][cayley[h][k]]:
                    raise NotAGroup(
                        f"associativity fails at triple ({g}, {h}, {k})"
                    )

    inverse = []
    for g in range(d):
        inv = next(h for h in range(d) if cayley[g][h] == identity)
        if cayley[inv][g] != identity:
            raise NotAGroup(f"element {g} has no two-sided inverse")
        inverse.append(inv)

    return GroupTable(d, cayley, identity, tuple(inverse), name=name)


def group_from_json(path: str | Path) -> GroupTable:
    """Load a Cayley table from a JSON array-of-arrays file."""
    p = Path(path)
    data = json.loads(p.read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise NotAGroup(f"{p}: expected a JSON array of arrays")
    return group_from_cayley(data, name=p.stem)


def cyclic(d: int) -> GroupTable:
    """Cyclic group: element i is i, composition is addition mod d."""
    if d < 1 or d > MAX_ORDER:
        raise UnknownName(f"cyclic order must be in 1..{MAX_ORDER}, got {d}")
    table = [[(i + j) % d for j in range(d)] for i in range(d)]
    return group_from_cayley(table, name=f"cyclic({d})")


def klein4() -> GroupTable:
    """Klein four-group: elements 0..3 composed by XOR of the index bits."""
    table = [[i ^ j for j in range(4)] for i in range(4)]
    return group_from_cayley(table, name="klein4")


_SYM3_PERMS = [
    (0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0),
]


def sym3() -> GroupTable:
    """Symmetric group on 3 letters.

    Element k is the permutation with one-line notation _SYM3_PERMS[k]
    (lexicographic order); composition is (s*t)(x) = s(t(x)).
    """
    idx = {p: k for k, p in enumerate(_SYM3_PERMS)}
    table = []
    for s in _SYM3_PERMS:
        row = []
        for t in _SYM3_PERMS:
            comp = tuple(s[t[x]] for x in range(3))
            row.append(idx[comp])
        table.append(row)
    return group_from_cayley(table, name="sym3")


_CYCLIC_RE = re.compile(r"^(?:cyclic|c)\(?(\d+)\)?$")


def builtin_group(name: str) -> GroupTable:
    """Resolve a builtin group name: cyclic(d) (aliases cN/cyclicN), klein4, sym3."""
    s = name.strip().lower().replace(" ", "")
    if s == "klein4":
        return klein4()
    if s in ("sym3", "s3"):
        return sym3()
    m = _CYCLIC_RE.match(s)
    if m:
        return cyclic(int(m.group(1)))
    raise UnknownName(f"unknown builtin group {name!r}")


def builtin_groups_of_order(d: int) -> list[GroupTable]:
    """All builtin groups of a given order (cyclic always, plus klein4/sym3)."""
    out = [cyclic(d)]
    if d == 4:
        out.append(klein4())
    if d == 6:
        out.append(sym3())
    return out


def right_translate(
    G: GroupTable, multiset: Sequence[int], g: int
) -> tuple[int, ...]:
    """Translate every member of a multiset on the right by g; sorted result."""
    return tuple(sorted(G.cayley[h][g] for h in multiset))
