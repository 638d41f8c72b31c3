"""Exact sparse linear algebra over Z, Q and F_p.

Two workhorses live here:

* an integer Smith-normal-form routine with fewest-fill pivoting (the
  kernel behind integral homology and torsion), and
* incremental echelon bases over a field (rank / membership-in-image
  queries used by the filtration-level searches).

Python integers are arbitrary precision, so coefficient growth inside the
SNF sweep degrades speed but never correctness.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple


class Field:
    """Coefficient field tag: Q or F_p."""

    __slots__ = ("p",)

    def __init__(self, p: Optional[int] = None):
        if p is not None and p < 2:
            raise ValueError("field characteristic must be a prime >= 2")
        self.p = p

    @property
    def is_prime_field(self) -> bool:
        return self.p is not None

    def coerce(self, x) -> object:
        if self.p is None:
            return Fraction(x)
        return int(x) % self.p

    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p else a * b

    def inv(self, a):
        if self.p:
            return pow(a, -1, self.p)
        return Fraction(1) / a

    def neg(self, a):
        return (-a) % self.p if self.p else -a

    def is_zero(self, a) -> bool:
        return a == 0

    def __eq__(self, other):
        return isinstance(other, Field) and self.p == other.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "Q" if self.p is None else f"F{self.p}"


QQ = Field(None)
F2 = Field(2)


# ---------------------------------------------------------------------------
# Smith normal form over Z
# ---------------------------------------------------------------------------

SparseEntries = Dict[Tuple[int, int], int]


def _pick_pivot(rows: Dict[int, Dict[int, int]], cols: Dict[int, Dict[int, int]]):
    """Markowitz-style pivot: smallest |value| first, fewest fill to break ties."""
    best = None
    best_key = None
    for i, row in rows.items():
        for j, v in row.items():
            a = abs(v)
            fill = (len(row) - 1) * (len(cols[j]) - 1)
            key = (a != 1, a, fill, i, j)
            if best_key is None or key < best_key:
                best_key = key
                best = (i, j)
                if a == 1 and fill == 0:
                    return best
    return best


def smith_normal_form(entries, nrows: int, ncols: int) -> Tuple[List[int], int]:
    """Invariant factors d1 | d2 | ... and the rank of an integer matrix.

    ``entries`` is a mapping (row, col) -> int or an iterable of
    (row, col, value) triples.  Only nonzero factors are returned; rank is
    their count.
    """
    rows: Dict[int, Dict[int, int]] = {}
    cols: Dict[int, Dict[int, int]] = {}
    items = entries.items() if isinstance(entries, dict) else ((rc[:2], rc[2]) for rc in entries)
    for (i, j), v in items:
        if v == 0:
            continue
        if not (0 <= i < nrows and 0 <= j < ncols):
            raise ValueError(f"entry ({i},{j}) out of shape ({nrows},{ncols})")
        rows.setdefault(i, {})[j] = rows.get(i, {}).get(j, 0) + v
        if rows[i][j] == 0:
            del rows[i][j]
            if not rows[i]:
                del rows[i]
    for i, row in rows.items():
        for j, v in row.items():
            cols.setdefault(j, {})[i] = v

    def add_row(dst: int, src: int, mult: int):
        if mult == 0:
            return
        srow = rows.get(src, {})
        drow = rows.setdefault(dst, {})
        for j, v in list(srow.items()):
            nv = drow.get(j, 0) + mult * v
            if nv:
                drow[j] = nv
                cols.setdefault(j, {})[dst] = nv
            else:
                drow.pop(j, None)
                cols[j].pop(dst, None)
                if not cols[j]:
                    del cols[j]
        if not drow:
            del rows[dst]

    def add_col(dst: int, src: int, mult: int):
        if mult == 0:
            return
        scol = cols.get(src, {})
        dcol = cols.setdefault(dst, {})
        for i, v in list(scol.items()):
            nv = dcol.get(i, 0) + mult * v
            if nv:
                dcol[i] = nv
                rows.setdefault(i, {})[dst] = nv
            else:
                dcol.pop(i, None)
                rows[i].pop(dst, None)
                if not rows[i]:
                    del rows[i]
        if not dcol:
            del cols[dst]

    diagonal: List[int] = []
    while rows:
        pi, pj = _pick_pivot(rows, cols)
        # Reduce until the pivot divides everything in its row and column.
        while True:
            pv = rows[pi][pj]
            col = cols[pj]
            others = [i for i in col if i != pi]
            progressed = False
            for i in others:
                v = cols.get(pj, {}).get(i)
                if v is None:
                    continue
                q = v // pv
                add_row(i, pi, -q)
                if rows.get(i, {}).get(pj):
                    # remainder became new, smaller pivot
                    pi = i
                    progressed = True
                    break
            if progressed:
                continue
            row = rows[pi]
            others = [j for j in row if j != pj]
            progressed = False
            for j in others:
                v = rows.get(pi, {}).get(j)
                if v is None:
                    continue
                q = v // rows[pi][pj]
                add_col(j, pj, -q)
                if rows[pi].get(j):
                    pj = j
                    progressed = True
                    break
            if not progressed:
                break
        pv = rows[pi][pj]
        # Row and column are now zero except at the pivot.
        diagonal.append(abs(pv))
        del rows[pi]
        del cols[pj]

    # Enforce the divisibility chain d1 | d2 | ... with gcd/lcm swaps;
    # after clearing, the multiset of prime powers is what matters.
    import math

    diagonal.sort()
    changed = True
    while changed:
        changed = False
        for k in range(len(diagonal) - 1):
            a, b = diagonal[k], diagonal[k + 1]
            if b % a:
                g = math.gcd(a, b)
                diagonal[k], diagonal[k + 1] = g, a * b // g
                changed = True
        diagonal.sort()
    return diagonal, len(diagonal)


def in_integer_image(entries, nrows: int, ncols: int, vector: Dict[int, int]) -> bool:
    """Whether an integer vector lies in the integer column span of a matrix.

    Uses the lattice criterion: appending the vector as an extra column
    leaves both the rank and the invariant factors unchanged exactly when
    the vector already lies in the image.
    """
    base = dict(entries)
    factors, rank = smith_normal_form(base, nrows, ncols)
    aug = dict(base)
    for i, v in vector.items():
        if v:
            aug[(i, ncols)] = v
    factors2, rank2 = smith_normal_form(aug, nrows, ncols + 1)
    return rank2 == rank and factors2 == factors


# ---------------------------------------------------------------------------
# Echelon bases over a field
# ---------------------------------------------------------------------------

Vec = Dict[int, object]


class EchelonBasis:
    """Incrementally maintained reduced basis of a subspace of k^N.

    Vectors are sparse dicts index -> coefficient.  Supports rank queries
    and membership tests; reduction is full (reduced row echelon), so
    residues are canonical.
    """

    def __init__(self, field: Field):
        self.field = field
        self.pivots: Dict[int, Vec] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: Vec) -> Vec:
        f = self.field
        out = {i: f.coerce(c) for i, c in vec.items() if not f.is_zero(f.coerce(c))}
        while out:
            p = min(out)
            basis_vec = self.pivots.get(p)
            if basis_vec is None:
                return out
            coef = out[p]
            for i, c in basis_vec.items():
                nv = f.sub(out.get(i, f.coerce(0)), f.mul(coef, c))
                if f.is_zero(nv):
                    out.pop(i, None)
                else:
                    out[i] = nv
        return out

    def add(self, vec: Vec) -> bool:
        """Insert a vector; returns True if it enlarged the span."""
        res = self.reduce(vec)
        if not res:
            return False
        f = self.field
        p = min(res)
        inv = f.inv(res[p])
        res = {i: f.mul(inv, c) for i, c in res.items()}
        # Back-substitute into existing pivot rows for canonical residues.
        for q, bv in self.pivots.items():
            if p in bv:
                coef = bv[p]
                for i, c in res.items():
                    nv = f.sub(bv.get(i, f.coerce(0)), f.mul(coef, c))
                    if f.is_zero(nv):
                        bv.pop(i, None)
                    else:
                        bv[i] = nv
        self.pivots[p] = res
        return True

    def contains(self, vec: Vec) -> bool:
        return not self.reduce(vec)


def field_rank(columns: Sequence[Vec], field: Field) -> int:
    basis = EchelonBasis(field)
    for col in columns:
        basis.add(col)
    return basis.rank


def in_field_image(columns: Sequence[Vec], vector: Vec, field: Field) -> bool:
    basis = EchelonBasis(field)
    for col in columns:
        basis.add(col)
    return basis.contains(vector)


# ---------------------------------------------------------------------------
# F2 fast path: vectors as bitmasks
# ---------------------------------------------------------------------------

class BitBasis:
    """Echelon basis over F2 with int-as-bitset vectors."""

    def __init__(self):
        self.rows: Dict[int, int] = {}  # pivot bit position -> row mask

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, mask: int) -> int:
        while mask:
            p = mask.bit_length() - 1
            row = self.rows.get(p)
            if row is None:
                return mask
            mask ^= row
        return 0

    def add(self, mask: int) -> bool:
        res = self.reduce(mask)
        if not res:
            return False
        self.rows[res.bit_length() - 1] = res
        return True

    def contains(self, mask: int) -> bool:
        return self.reduce(mask) == 0
