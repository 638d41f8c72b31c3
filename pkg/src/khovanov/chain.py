"""Bigraded free chain complexes with sparse exact differentials.

Differentials are stored with integer coefficients; the ring decides how
to interpret them (exactly over Z via Smith normal form, or over Q / F_p
by elimination).  The differential raises gr_h by one and preserves gr_q —
except for *filtered* complexes (Lee, Bar-Natan) where the stored gr_q is
a filtration grading the differential may raise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Tuple

from .laurent import LaurentPoly
from .linalg import Field, EchelonBasis, field_rank, smith_normal_form


class NotAComplex(Exception):
    def __init__(self, src, dst, coeff):
        super().__init__(f"d^2 != 0: d^2({src!r}) has coefficient {coeff} at {dst!r}")
        self.witness = (src, dst, coeff)


class NotChainMap(Exception):
    pass


@dataclass(frozen=True)
class Ring:
    kind: str          # "Z" | "Q" | "Fp"
    p: Optional[int] = None

    def field(self) -> Field:
        if self.kind == "Z":
            raise ValueError("Z is not a field")
        return Field(self.p)

    def __str__(self):
        return {"Z": "Z", "Q": "Q"}.get(self.kind, f"F{self.p}")


ZZ = Ring("Z")
QQ = Ring("Q")
GF2 = Ring("Fp", 2)


def ring_from_name(name: str) -> Ring:
    name = name.strip().upper()
    if name == "Z":
        return ZZ
    if name == "Q":
        return QQ
    if name.startswith("F"):
        return Ring("Fp", int(name[1:]))
    raise ValueError(f"unknown ring {name!r}")


GenId = Hashable


class BigradedComplex:
    def __init__(self, ring: Ring,
                 generators: Dict[GenId, Tuple[int, int]],
                 diff: Dict[GenId, Dict[GenId, int]],
                 filtered: bool = False,
                 jump: int = 0):
        self.ring = ring
        self.generators = dict(generators)
        self.diff = {s: {t: c for t, c in row.items() if c}
                     for s, row in diff.items() if any(row.values())}
        self.filtered = filtered
        self.jump = jump
        for s, row in self.diff.items():
            hs, qs = self.generators[s]
            for t in row:
                ht, qt = self.generators[t]
                if ht != hs + 1:
                    raise ValueError(f"entry {s!r}->{t!r} is not homological degree 1")
                if not filtered and qt != qs:
                    raise ValueError(f"entry {s!r}->{t!r} does not preserve gr_q")
                if filtered and (qt < qs or (jump and (qt - qs) % jump)):
                    raise ValueError(
                        f"filtered entry {s!r}->{t!r} drops filtration or offgrid")

    # -- views

    @property
    def total_dim(self) -> int:
        return len(self.generators)

    def gens_at_h(self) -> Dict[int, List[GenId]]:
        out: Dict[int, List[GenId]] = {}
        for g, (h, _) in sorted(self.generators.items(), key=lambda kv: repr(kv[0])):
            out.setdefault(h, []).append(g)
        return out

    def gens_at(self) -> Dict[Tuple[int, int], List[GenId]]:
        out: Dict[Tuple[int, int], List[GenId]] = {}
        for g, hq in sorted(self.generators.items(), key=lambda kv: repr(kv[0])):
            out.setdefault(hq, []).append(g)
        return out

    def coeff_in_ring(self, c: int):
        if self.ring.kind == "Fp":
            return c % self.ring.p
        return c

    # -- operations

    def verify_d_squared(self) -> bool:
        acc: Dict[Tuple[GenId, GenId], int] = {}
        for s, row in self.diff.items():
            for m, c1 in row.items():
                for t, c2 in self.diff.get(m, {}).items():
                    key = (s, t)
                    acc[key] = acc.get(key, 0) + c1 * c2
        for (s, t), c in acc.items():
            c = self.coeff_in_ring(c)
            if c:
                raise NotAComplex(s, t, c)
        return True

    def shift(self, n: int, m: int) -> "BigradedComplex":
        gens = {g: (h + n, q + m) for g, (h, q) in self.generators.items()}
        return BigradedComplex(self.ring, gens, self.diff, self.filtered, self.jump)

    def graded_euler_char(self) -> LaurentPoly:
        acc: Dict[int, int] = {}
        for _, (h, q) in self.generators.items():
            acc[q] = acc.get(q, 0) + (-1) ** h
        return LaurentPoly(acc)

    def matrix_block(self, src_ids: List[GenId], dst_ids: List[GenId]):
        """Sparse (row, col) -> int block of the differential."""
        index = {g: k for k, g in enumerate(dst_ids)}
        entries: Dict[Tuple[int, int], int] = {}
        for col, s in enumerate(src_ids):
            for t, c in self.diff.get(s, {}).items():
                r = index.get(t)
                if r is not None:
                    entries[(r, col)] = c
        return entries

    def homology(self) -> "BigradedGroup":
        self.verify_d_squared()
        if self.filtered:
            raise ValueError("filtered complexes are graded by gr_h only; "
                             "use homology_by_h()")
        by_j: Dict[int, Dict[int, List[GenId]]] = {}
        for g, (h, q) in sorted(self.generators.items(), key=lambda kv: repr(kv[0])):
            by_j.setdefault(q, {}).setdefault(h, []).append(g)
        groups: Dict[Tuple[int, int], Tuple[int, Tuple[int, ...]]] = {}
        for j, layers in by_j.items():
            hs = sorted(layers)
            ranks: Dict[int, int] = {}
            torsions: Dict[int, Tuple[int, ...]] = {}
            for h in hs:
                src = layers[h]
                dst = layers.get(h + 1, [])
                if not dst:
                    ranks[h] = 0
                    torsions[h + 1] = ()
                    continue
                entries = self.matrix_block(src, dst)
                if self.ring.kind == "Z":
                    factors, rank = smith_normal_form(entries, len(dst), len(src))
                    ranks[h] = rank
                    torsions[h + 1] = tuple(f for f in factors if f > 1)
                else:
                    fld = self.ring.field()
                    cols = []
                    for col in range(len(src)):
                        vec = {r: v for (r, c), v in entries.items() if c == col}
                        cols.append(vec)
                    ranks[h] = field_rank(cols, fld)
                    torsions[h + 1] = ()
            for h in hs:
                dim = len(layers[h])
                rank_out = ranks.get(h, 0)
                rank_in = ranks.get(h - 1, 0)
                free = dim - rank_out - rank_in
                tors = torsions.get(h, ())
                if free or tors:
                    groups[(h, j)] = (free, tors)
        return BigradedGroup(self.ring, groups)

    def homology_by_h(self) -> Dict[int, int]:
        """Field homology dims per homological degree, ignoring gr_q."""
        if self.ring.kind == "Z":
            raise ValueError("per-degree homology without gr_q needs a field")
        self.verify_d_squared()
        fld = self.ring.field()
        layers = self.gens_at_h()
        ranks: Dict[int, int] = {}
        for h, src in layers.items():
            dst = layers.get(h + 1, [])
            if not dst:
                ranks[h] = 0
                continue
            entries = self.matrix_block(src, dst)
            cols = []
            for col in range(len(src)):
                cols.append({r: v for (r, c), v in entries.items() if c == col})
            ranks[h] = field_rank(cols, fld)
        dims = {}
        for h, gens in layers.items():
            betti = len(gens) - ranks.get(h, 0) - ranks.get(h - 1, 0)
            if betti:
                dims[h] = betti
        return dims


@dataclass(frozen=True)
class BigradedGroup:
    """Homology groups per bigrading: free rank and invariant-factor torsion."""
    ring: Ring
    groups: Dict[Tuple[int, int], Tuple[int, Tuple[int, ...]]]

    def rank(self, i: int, j: int) -> int:
        return self.groups.get((i, j), (0, ()))[0]

    def torsion(self, i: int, j: int) -> Tuple[int, ...]:
        return self.groups.get((i, j), (0, ()))[1]

    @property
    def support(self):
        return sorted(self.groups)

    @property
    def total_rank(self) -> int:
        return sum(r for r, _ in self.groups.values())

    def total_dim(self) -> int:
        """Dimension over a field; counts torsion as 0 (fields report none)."""
        return self.total_rank

    def poincare_poly(self) -> LaurentPoly:
        acc: Dict[int, int] = {}
        for (h, q), (r, _) in self.groups.items():
            acc[q] = acc.get(q, 0) + (-1) ** h * r
        return LaurentPoly(acc)

    def to_json_dict(self) -> dict:
        return {
            "ring": str(self.ring),
            "groups": [
                {"i": i, "j": j, "rank": r, "torsion": list(t)}
                for (i, j), (r, t) in sorted(self.groups.items(),
                                             key=lambda kv: (kv[0][1], kv[0][0]))
            ],
        }

    def __eq__(self, other):
        if not isinstance(other, BigradedGroup):
            return NotImplemented
        return self.groups == other.groups

    def __str__(self):
        parts = []
        for (i, j), (r, t) in sorted(self.groups.items(),
                                     key=lambda kv: (kv[0][1], kv[0][0])):
            name = []
            if r:
                base = {"Z": "Z", "Q": "Q"}.get(self.ring.kind, f"F{self.ring.p}")
                name.append(base + (f"^{r}" if r > 1 else ""))
            name.extend(f"Z/{m}" for m in t)
            parts.append(f"({i},{j}): " + " + ".join(name))
        return "; ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# Mapping cones
# ---------------------------------------------------------------------------

ChainMap = Dict[GenId, Dict[GenId, int]]


@dataclass
class Cone:
    complex: BigradedComplex
    inclusion: ChainMap   # B -> cone
    projection: ChainMap  # cone -> A[-1]


def mapping_cone(f: ChainMap, a: BigradedComplex, b: BigradedComplex) -> Cone:
    """Cone of a degree-(0,0) chain map; the A differential is negated and
    A sits one homological degree lower."""
    if a.ring != b.ring:
        raise NotChainMap("chain map must connect complexes over one ring")
    # verify f d_A = d_B f  and degree (0,0)
    for s, row in f.items():
        hs, qs = a.generators[s]
        for t, c in row.items():
            ht, qt = b.generators[t]
            if (ht, qt) != (hs, qs):
                raise NotChainMap(f"f({s!r}) -> {t!r} is not degree (0,0)")
    acc: Dict[Tuple[GenId, GenId], int] = {}
    for s, row in f.items():
        for m, c1 in row.items():
            for t, c2 in b.diff.get(m, {}).items():
                acc[(s, t)] = acc.get((s, t), 0) + c1 * c2
    for s, row in a.diff.items():
        for m, c1 in row.items():
            for t, c2 in f.get(m, {}).items():
                acc[(s, t)] = acc.get((s, t), 0) - c1 * c2
    for key, c in acc.items():
        if a.coeff_in_ring(c):
            raise NotChainMap(f"not a chain map: defect {c} at {key!r}")

    gens: Dict[GenId, Tuple[int, int]] = {}
    for g, (h, q) in a.generators.items():
        gens[("A", g)] = (h - 1, q)
    for g, (h, q) in b.generators.items():
        gens[("B", g)] = (h, q)
    diff: Dict[GenId, Dict[GenId, int]] = {}
    for s, row in a.diff.items():
        diff[("A", s)] = {("A", t): -c for t, c in row.items()}
    for s, row in f.items():
        diff.setdefault(("A", s), {}).update({("B", t): c for t, c in row.items()})
    for s, row in b.diff.items():
        diff[("B", s)] = {("B", t): c for t, c in row.items()}
    cone = BigradedComplex(a.ring, gens, diff, a.filtered or b.filtered,
                           max(a.jump, b.jump))
    inclusion = {g: {("B", g): 1} for g in b.generators}
    projection = {("A", g): {g: 1} for g in a.generators}
    return Cone(cone, inclusion, projection)
