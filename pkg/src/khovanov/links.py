"""Link presentations: braid words, PD codes, resolutions, planar faces.

Conventions (fixed once, used everywhere):

* A crossing is a PD tuple ``X(a, b, c, d)``: the four arc labels counter-
  clockwise, starting from the incoming under-strand ``a``.  The under
  strand runs a -> c.  The crossing is positive when the over strand runs
  d -> b, negative when it runs b -> d.
* Braid diagrams are drawn with strands flowing upward, letters stacked
  bottom to top, and the closure arcs wrapping around the right side of
  the braid axis.  With these choices the letter ``s<i>`` (sigma_i, strand
  i passing over strand i+1) yields the PD tuple
  ``(R_in, R_out, L_out, L_in)`` and ``S<i>`` (its inverse) yields
  ``(L_in, R_in, R_out, L_out)``.
* The 0-smoothing of any crossing joins slots (0,1) and (2,3); the
  1-smoothing joins (0,3) and (1,2).  For a positive crossing the
  0-smoothing is the orientation-preserving one.
* Faces are orbits of the dart map (ci, s) -> (other end of the arc,
  slot + 1 mod 4).  The face containing an arc's head dart lies to the
  LEFT of the arc (walking tail to head); the tail dart's face lies to
  the right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple


class MalformedInput(Exception):
    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"{message} (line {line}, col {col})")
        self.line = line
        self.col = col


class IndexOutOfRange(Exception):
    pass


class InconsistentOrientation(Exception):
    pass


class BitAlreadyOne(Exception):
    pass


class IllegalSite(Exception):
    pass


# ---------------------------------------------------------------------------
# Braid words
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: Tuple[Tuple[int, int], ...]  # (generator index, sign)

    def __post_init__(self):
        if self.strands < 1:
            raise MalformedInput("braid needs at least one strand")
        for idx, sign in self.letters:
            if not 1 <= idx <= self.strands - 1:
                raise IndexOutOfRange(
                    f"generator {idx} out of range for {self.strands} strands")
            if sign not in (1, -1):
                raise MalformedInput(f"letter sign must be +-1, got {sign}")

    @property
    def writhe(self) -> int:
        return sum(s for _, s in self.letters)

    def mirror(self) -> "BraidWord":
        return BraidWord(self.strands, tuple((i, -s) for i, s in self.letters))

    def reverse(self) -> "BraidWord":
        return BraidWord(self.strands, tuple(reversed(self.letters)))

    def conjugate(self, other: "BraidWord") -> "BraidWord":
        if other.strands != self.strands:
            raise IndexOutOfRange("conjugating braids must share the strand count")
        inv = tuple((i, -s) for i, s in reversed(other.letters))
        return BraidWord(self.strands, other.letters + self.letters + inv)

    def stabilize(self, sign: int = 1) -> "BraidWord":
        """Markov stabilization: add a strand and one crossing with it."""
        return BraidWord(self.strands + 1, self.letters + ((self.strands, sign),))

    def concat(self, other: "BraidWord") -> "BraidWord":
        """Connected sum of closures: place other's strands after ours,
        sharing one strand (the splice runs along the last strand)."""
        shift = self.strands - 1
        shifted = tuple((i + shift, s) for i, s in other.letters)
        return BraidWord(self.strands + other.strands - 1, self.letters + shifted)

    def permutation(self) -> List[int]:
        perm = list(range(self.strands))
        for i, _ in self.letters:
            perm[i - 1], perm[i] = perm[i], perm[i - 1]
        return perm

    def component_count(self) -> int:
        perm = self.permutation()
        seen = [False] * self.strands
        comps = 0
        for i in range(self.strands):
            if not seen[i]:
                comps += 1
                j = i
                while not seen[j]:
                    seen[j] = True
                    j = perm[j]
        return comps

    def __str__(self) -> str:
        body = " ".join(("s" if s > 0 else "S") + str(i) for i, s in self.letters)
        return f"b={self.strands};" + (f" {body}" if body else "")


_BRAID_RE = re.compile(r"^\s*b\s*=\s*(\d+)\s*;(.*)$", re.S)
_LETTER_RE = re.compile(r"([sS])(\d+)|(\S)")


def parse_braid(text: str) -> BraidWord:
    m = _BRAID_RE.match(text)
    if not m:
        raise MalformedInput("expected 'b=<int>;' header", 1, 1)
    strands = int(m.group(1))
    letters: List[Tuple[int, int]] = []
    body = m.group(2)
    offset = text.index(body) if body else len(text)
    for lm in _LETTER_RE.finditer(body):
        if lm.group(3) is not None:
            pos = offset + lm.start()
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            raise MalformedInput(f"unexpected token {lm.group(3)!r}", line, col)
        idx = int(lm.group(2))
        sign = 1 if lm.group(1) == "s" else -1
        if not 1 <= idx <= strands - 1:
            raise IndexOutOfRange(f"generator {idx} out of range for {strands} strands")
        letters.append((idx, sign))
    return BraidWord(strands, tuple(letters))


# ---------------------------------------------------------------------------
# Diagrams
# ---------------------------------------------------------------------------

Crossing = Tuple[int, int, int, int]


class Diagram:
    """An oriented link diagram given by PD tuples plus free circles.

    ``free_trivial`` counts crossingless components drawn away from any
    annular marking; ``free_essential`` lists the braid positions of
    crossingless closure strands (each winds the marking once).
    """

    def __init__(self, crossings: Sequence[Crossing], signs: Sequence[int],
                 free_trivial: int = 0,
                 free_essential: Tuple[int, ...] = (),
                 marking: Optional[tuple] = None,
                 basepoint: Optional[int] = None,
                 closure_arcs: Tuple[int, ...] = ()):
        self.crossings: Tuple[Crossing, ...] = tuple(tuple(c) for c in crossings)
        self.signs: Tuple[int, ...] = tuple(signs)
        if len(self.crossings) != len(self.signs):
            raise MalformedInput("one sign per crossing required")
        self.free_trivial = free_trivial
        self.free_essential = tuple(free_essential)
        self.marking = marking  # None | ("braid",) | ("face", face_id)
        self.basepoint = basepoint
        self.closure_arcs = tuple(closure_arcs)
        counts: Dict[int, int] = {}
        for c in self.crossings:
            for a in c:
                counts[a] = counts.get(a, 0) + 1
        bad = [a for a, k in counts.items() if k != 2]
        if bad:
            raise MalformedInput(f"arc labels must appear exactly twice: {sorted(bad)}")
        self.arcs: Tuple[int, ...] = tuple(sorted(counts))
        if basepoint is not None and self.arcs and basepoint not in counts:
            raise MalformedInput(f"basepoint arc {basepoint} not in diagram")

    # -- basic counts

    @property
    def n(self) -> int:
        return len(self.crossings)

    @property
    def n_pos(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    @property
    def n_neg(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    @property
    def writhe(self) -> int:
        return self.n_pos - self.n_neg

    @property
    def total_free(self) -> int:
        return self.free_trivial + len(self.free_essential)

    # -- arc direction bookkeeping

    @cached_property
    def arc_ends(self) -> Dict[int, List[Tuple[int, int]]]:
        ends: Dict[int, List[Tuple[int, int]]] = {a: [] for a in self.arcs}
        for ci, c in enumerate(self.crossings):
            for s, a in enumerate(c):
                ends[a].append((ci, s))
        return ends

    def _in_slots(self, ci: int) -> Tuple[int, int]:
        # slots where strands flow into crossing ci: under-in is 0;
        # over-in is 3 for positive crossings, 1 for negative.
        return (0, 3) if self.signs[ci] > 0 else (0, 1)

    @cached_property
    def arc_head(self) -> Dict[int, Tuple[int, int]]:
        """arc -> (crossing, slot) where the arc flows in."""
        heads: Dict[int, Tuple[int, int]] = {}
        for ci, c in enumerate(self.crossings):
            for s in self._in_slots(ci):
                a = c[s]
                if a in heads:
                    raise InconsistentOrientation(f"arc {a} flows into two crossings")
                heads[a] = (ci, s)
        if set(heads) != set(self.arcs):
            raise InconsistentOrientation("some arc never flows into a crossing")
        return heads

    @cached_property
    def arc_tail(self) -> Dict[int, Tuple[int, int]]:
        tails: Dict[int, Tuple[int, int]] = {}
        out_slots = {ci: tuple(s for s in range(4) if s not in self._in_slots(ci))
                     for ci in range(self.n)}
        for ci, c in enumerate(self.crossings):
            for s in out_slots[ci]:
                a = c[s]
                if a in tails:
                    raise InconsistentOrientation(f"arc {a} flows out of two crossings")
                tails[a] = (ci, s)
        return tails

    def next_arc(self, a: int) -> int:
        """Successor arc along the strand orientation."""
        ci, s = self.arc_head[a]
        c = self.crossings[ci]
        if s == 0:
            return c[2]
        # over strand
        return c[1] if self.signs[ci] > 0 else c[3]

    @cached_property
    def components(self) -> Tuple[Tuple[int, ...], ...]:
        """Cycles of PD arcs under next_arc (free circles not included)."""
        seen = set()
        comps = []
        for a in self.arcs:
            if a in seen:
                continue
            cyc = []
            x = a
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = self.next_arc(x)
            comps.append(tuple(cyc))
        return tuple(comps)

    @property
    def component_count(self) -> int:
        return len(self.components) + self.total_free

    def component_of(self, arc: int) -> int:
        for k, comp in enumerate(self.components):
            if arc in comp:
                return k
        raise KeyError(arc)

    # -- planar faces (rotation system)

    @cached_property
    def faces(self) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
        """Faces as dart orbits; darts are (crossing, slot) pairs.

        Orbits are listed in a canonical order (sorted by minimal dart),
        which is what `*face=<id>` markings refer to.
        """
        other: Dict[Tuple[int, int], Tuple[int, int]] = {}
        for a, ends in self.arc_ends.items():
            (c1, s1), (c2, s2) = ends
            other[(c1, s1)] = (c2, s2)
            other[(c2, s2)] = (c1, s1)
        seen = set()
        orbits = []
        for ci in range(self.n):
            for s in range(4):
                d = (ci, s)
                if d in seen:
                    continue
                orbit = []
                x = d
                while x not in seen:
                    seen.add(x)
                    orbit.append(x)
                    oc, os_ = other[x]
                    x = (oc, (os_ + 1) % 4)
                orbits.append(tuple(orbit))
        return tuple(sorted(orbits, key=lambda o: min(o)))

    @cached_property
    def dart_face(self) -> Dict[Tuple[int, int], int]:
        df = {}
        for fi, orbit in enumerate(self.faces):
            for d in orbit:
                df[d] = fi
        return df

    def left_face(self, arc: int) -> int:
        return self.dart_face[self.arc_head[arc]]

    def right_face(self, arc: int) -> int:
        return self.dart_face[self.arc_tail[arc]]

    def face_arcs(self, fi: int) -> FrozenSet[int]:
        return frozenset(self.crossings[ci][s] for ci, s in self.faces[fi])

    @cached_property
    def outer_face(self) -> Optional[int]:
        if self.n == 0:
            return None
        if self.marking == ("braid",) and self.closure_arcs:
            return self.left_face(self.closure_arcs[0])
        mk = self.marking[1] if self.marking and self.marking[0] == "face" else None
        if mk != 0:
            return 0
        return len(self.faces) - 1

    @cached_property
    def marking_face(self) -> Optional[int]:
        if self.marking is None:
            return None
        if self.marking[0] == "face":
            return self.marking[1]
        if self.closure_arcs:
            return self.right_face(self.closure_arcs[-1])
        return None

    @cached_property
    def winding_ray_arcs(self) -> FrozenSet[int]:
        """Arcs crossed by a path from the marking to infinity.

        A resolution circle is essential exactly when it contains an odd
        number of these arcs.
        """
        if self.marking is None:
            return frozenset()
        if self.marking == ("braid",):
            return frozenset(self.closure_arcs)
        src, dst = self.marking_face, self.outer_face
        if src is None or dst is None or src == dst:
            return frozenset()
        # BFS in the face adjacency graph, remembering one crossed arc per step.
        from collections import deque

        prev: Dict[int, Tuple[int, int]] = {src: (-1, -1)}
        queue = deque([src])
        while queue:
            f = queue.popleft()
            if f == dst:
                break
            for a in self.face_arcs(f):
                lf, rf = self.left_face(a), self.right_face(a)
                g = rf if lf == f else lf
                if g not in prev:
                    prev[g] = (f, a)
                    queue.append(g)
        if dst not in prev:
            raise InconsistentOrientation("marking face is not connected to infinity")
        path_arcs = []
        f = dst
        while f != src:
            f, a = prev[f]
            path_arcs.append(a)
        # An arc crossed twice by the path does not affect parity; keep the
        # odd-multiplicity ones (BFS path crosses each arc at most once).
        return frozenset(path_arcs)

    # -- structural edits

    def with_marking(self, marking) -> "Diagram":
        return Diagram(self.crossings, self.signs, self.free_trivial,
                       self.free_essential, marking, self.basepoint,
                       self.closure_arcs)

    def with_basepoint(self, arc: Optional[int]) -> "Diagram":
        return Diagram(self.crossings, self.signs, self.free_trivial,
                       self.free_essential, self.marking, arc,
                       self.closure_arcs)

    def mirror(self) -> "Diagram":
        """Switch every crossing (the mirror link's diagram)."""
        crossings = []
        for c, sg in zip(self.crossings, self.signs):
            if sg > 0:
                crossings.append((c[3], c[0], c[1], c[2]))
            else:
                crossings.append((c[1], c[2], c[3], c[0]))
        return Diagram(crossings, tuple(-s for s in self.signs),
                       self.free_trivial, self.free_essential, None,
                       self.basepoint, ())

    def relabeled(self, offset: int) -> "Diagram":
        crossings = [tuple(a + offset for a in c) for c in self.crossings]
        return Diagram(crossings, self.signs, self.free_trivial,
                       self.free_essential, None,
                       None if self.basepoint is None else self.basepoint + offset,
                       tuple(a + offset for a in self.closure_arcs))

    def disjoint_union(self, other: "Diagram") -> "Diagram":
        off = (max(self.arcs) if self.arcs else 0)
        o = other.relabeled(off)
        return Diagram(self.crossings + o.crossings, self.signs + o.signs,
                       self.free_trivial + o.free_trivial,
                       self.free_essential + o.free_essential,
                       None, self.basepoint, ())

    def connect_sum(self, other: "Diagram") -> "Diagram":
        """Splice at the highest-labeled arc of each factor."""
        if not self.arcs or not other.arcs:
            # connected sum with an unknot (free circle) leaves the link alone
            if not self.arcs and self.total_free == 1:
                return other
            if not other.arcs and other.total_free == 1:
                return self
            raise IllegalSite("connected sum needs a crossing-bearing arc in each factor")
        off = max(self.arcs)
        o = other.relabeled(off)
        a1 = max(self.arcs)
        a2 = max(o.arcs)
        h1 = self.arc_head[a1]
        h2 = o.arc_head[a2]
        crossings = [list(c) for c in self.crossings + o.crossings]
        # head slot of a1 now receives a2; head slot of a2 receives a1
        ci1, s1 = h1
        ci2, s2 = h2
        crossings[ci1][s1] = a2
        crossings[len(self.crossings) + ci2][s2] = a1
        return Diagram([tuple(c) for c in crossings], self.signs + o.signs,
                       self.free_trivial + o.free_trivial,
                       self.free_essential + o.free_essential,
                       None, self.basepoint, ())

    # -- canonical form / equality up to relabeling

    def canonical_key(self):
        """Canonical relabeling: traverse components in orientation order,
        starting from the component containing the smallest arc."""
        if not self.arcs:
            return ("empty", self.free_trivial, len(self.free_essential))
        relabel: Dict[int, int] = {}
        nxt = 1
        for comp in sorted(self.components, key=min):
            start = min(comp)
            k = comp.index(start)
            for a in comp[k:] + comp[:k]:
                relabel[a] = nxt
                nxt += 1
        crossings = sorted(
            tuple(relabel[a] for a in c) for c in self.crossings)
        return ("pd", tuple(crossings), self.free_trivial,
                len(self.free_essential))

    def is_isomorphic(self, other: "Diagram") -> bool:
        """Equality up to arc relabeling (orientation-respecting)."""
        if (self.n, self.signs.count(1)) != (other.n, other.signs.count(1)):
            return False
        if self.canonical_key() == other.canonical_key():
            return True
        # try all rotations of the other diagram's start component
        for comp in other.components:
            for start in comp:
                relabel: Dict[int, int] = {}
                nxt = 1
                order = [c for c in other.components]
                # traverse starting from `start`'s component first
                first = [c for c in order if start in c]
                rest = [c for c in order if start not in c]
                for cyc in first + rest:
                    s0 = start if start in cyc else min(cyc)
                    k = cyc.index(s0)
                    for a in cyc[k:] + cyc[:k]:
                        relabel[a] = nxt
                        nxt += 1
                crossings = sorted(tuple(relabel[a] for a in c)
                                   for c in other.crossings)
                if ("pd", tuple(crossings), other.free_trivial,
                        len(other.free_essential)) == self.canonical_key():
                    return True
        return False


# ---------------------------------------------------------------------------
# Braid closure
# ---------------------------------------------------------------------------

def braid_closure(word: BraidWord) -> Diagram:
    """Annularly marked closure; sigma_i letters give positive crossings."""
    b = word.strands
    used = sorted({i for i, _ in word.letters} | {i + 1 for i, _ in word.letters})
    free_positions = [p for p in range(1, b + 1) if p not in used]
    if not word.letters:
        return Diagram([], [], free_trivial=0,
                       free_essential=tuple(range(1, b + 1)),
                       marking=("braid",))

    # current arc occupying each strand position; seeded with closure arcs
    arc_of_pos: Dict[int, int] = {}
    next_arc = 1
    closure_arc_of_pos: Dict[int, int] = {}
    for p in used:
        arc_of_pos[p] = next_arc
        closure_arc_of_pos[p] = next_arc
        next_arc += 1

    crossings: List[Crossing] = []
    signs: List[int] = []
    for idx, sign in word.letters:
        l_in = arc_of_pos[idx]
        r_in = arc_of_pos[idx + 1]
        l_out = next_arc
        r_out = next_arc + 1
        next_arc += 2
        if sign > 0:
            crossings.append((r_in, r_out, l_out, l_in))
        else:
            crossings.append((l_in, r_in, r_out, l_out))
        signs.append(sign)
        arc_of_pos[idx] = l_out
        arc_of_pos[idx + 1] = r_out

    # close up: the top arc at each position is the closure arc again
    merge: Dict[int, int] = {}
    for p in used:
        top = arc_of_pos[p]
        if top != closure_arc_of_pos[p]:
            merge[top] = closure_arc_of_pos[p]
    crossings = [tuple(merge.get(a, a) for a in c) for c in crossings]

    closure_arcs = tuple(closure_arc_of_pos[p] for p in used)
    d = Diagram(crossings, signs, free_trivial=0,
                free_essential=tuple(free_positions),
                marking=("braid",), closure_arcs=closure_arcs)
    return d


# ---------------------------------------------------------------------------
# PD text form
# ---------------------------------------------------------------------------

_PD_TOKEN = re.compile(
    r"X\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)"
    r"|circles\s*=\s*(\d+)|\*face\s*=\s*(\d+)|@arc\s*=\s*(\d+)|(\S)")


def parse_pd(text: str) -> Diagram:
    """Parse PD lines ``X(a,b,c,d)`` with optional headers.

    Crossing signs are inferred: the under strand runs a -> c; the over
    strand direction is fixed by requiring every arc to flow out of
    exactly one crossing and into exactly one.  Components whose
    orientation is not pinned down this way (all-over circles) fall back
    to the increasing-label convention.
    """
    tuples: List[Crossing] = []
    free = 0
    marking = None
    basepoint = None
    for m in _PD_TOKEN.finditer(text):
        if m.group(8) is not None:
            pos = m.start()
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            raise MalformedInput(f"unexpected token {m.group(8)!r}", line, col)
        if m.group(1) is not None:
            tuples.append(tuple(int(m.group(k)) for k in (1, 2, 3, 4)))
        elif m.group(5) is not None:
            free = int(m.group(5))
        elif m.group(6) is not None:
            marking = ("face", int(m.group(6)))
        else:
            basepoint = int(m.group(7))

    if not tuples:
        return Diagram([], [], free_trivial=free, marking=marking,
                       basepoint=basepoint)

    counts: Dict[int, int] = {}
    for c in tuples:
        for a in c:
            counts[a] = counts.get(a, 0) + 1
    bad = sorted(a for a, k in counts.items() if k != 2)
    if bad:
        raise MalformedInput(f"arc labels must appear exactly twice: {bad}")

    # Determine over-strand direction per crossing.  sign[ci] = +1 means
    # over runs d->b.  Each arc needs one "in" role and one "out" role.
    # Under slots have fixed roles; over slots depend on the sign.
    # Build constraints: role(ci, slot1) == "out" iff sign>0, etc.
    appearances: Dict[int, List[Tuple[int, int]]] = {}
    for ci, c in enumerate(tuples):
        for s, a in enumerate(c):
            appearances.setdefault(a, []).append((ci, s))

    sign: List[Optional[int]] = [None] * len(tuples)

    def role(ci: int, s: int, sg: int) -> str:
        if s == 0:
            return "in"
        if s == 2:
            return "out"
        if s == 1:  # b: over-out if positive
            return "out" if sg > 0 else "in"
        return "in" if sg > 0 else "out"

    import collections
    # constraint propagation over crossings linked through over slots
    pending = collections.deque()

    def assign(ci: int, sg: int):
        if sign[ci] is not None:
            if sign[ci] != sg:
                raise InconsistentOrientation(
                    f"no consistent orientation at crossing {ci}")
            return
        sign[ci] = sg
        pending.append(ci)

    # seed: arcs linking an under slot (fixed role) to an over slot
    for a, apps in appearances.items():
        (c1, s1), (c2, s2) = apps
        if s1 in (0, 2) and s2 in (0, 2):
            if role(c1, s1, 1) == role(c2, s2, 1):
                raise InconsistentOrientation(
                    f"arc {a} has two {role(c1, s1, 1)} endpoints")
            continue
        if s1 in (0, 2) or s2 in (0, 2):
            (cu, su), (co, so) = ((c1, s1), (c2, s2)) if s1 in (0, 2) else ((c2, s2), (c1, s1))
            need = "out" if role(cu, su, 1) == "in" else "in"
            assign(co, 1 if role(co, so, 1) == need else -1)

    def propagate():
        while pending:
            ci = pending.popleft()
            for s in (1, 3):
                a = tuples[ci][s]
                for cj, sj in appearances[a]:
                    if (cj, sj) == (ci, s) or sj in (0, 2):
                        continue
                    need = "out" if role(ci, s, sign[ci]) == "in" else "in"
                    assign(cj, 1 if role(cj, sj, 1) == need else -1)

    propagate()
    # free groups (components passing only over): use increasing labels
    for ci in range(len(tuples)):
        if sign[ci] is None:
            a, b_, c_, d_ = tuples[ci]
            if b_ == d_ + 1:
                assign(ci, 1)
            elif d_ == b_ + 1:
                assign(ci, -1)
            else:
                assign(ci, 1 if d_ > b_ else -1)
            propagate()

    d = Diagram(tuples, [s for s in sign], free_trivial=free,
                marking=marking, basepoint=basepoint)
    # building arc_head validates global orientation consistency
    d.arc_head, d.arc_tail
    return d


def emit_pd(d: Diagram) -> str:
    parts = []
    if d.total_free:
        parts.append(f"circles={d.total_free}")
    if d.marking is not None and d.marking[0] == "face":
        parts.append(f"*face={d.marking[1]}")
    elif d.marking == ("braid",) and d.n:
        parts.append(f"*face={d.marking_face}")
    if d.basepoint is not None:
        parts.append(f"@arc={d.basepoint}")
    parts.extend(f"X({a},{b},{c},{e})" for a, b, c, e in d.crossings)
    return " ".join(parts)


# ---------------------------------------------------------------------------
# Resolutions
# ---------------------------------------------------------------------------

Bitstring = Tuple[int, ...]


def weight(u: Bitstring) -> int:
    return sum(u)


SMOOTH_PAIRS = {0: ((0, 1), (2, 3)), 1: ((0, 3), (1, 2))}


@dataclass(frozen=True)
class Resolution:
    """Circles of a complete resolution.

    Each circle is a frozenset of arc labels; free circles get singleton
    pseudo-labels ("free", k).  ``winding`` maps circle index to -1/0/+1.
    """
    circles: Tuple[FrozenSet, ...]
    winding: Tuple[int, ...]

    @property
    def circle_count(self) -> int:
        return len(self.circles)

    def circle_of(self, arc) -> int:
        for k, c in enumerate(self.circles):
            if arc in c:
                return k
        raise KeyError(arc)


class _DSU:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[rx] = ry


def resolve(d: Diagram, u: Bitstring) -> Resolution:
    if len(u) != d.n:
        raise MalformedInput(f"bitstring length {len(u)} != {d.n} crossings")
    dsu = _DSU(d.arcs)
    for ci, bit in enumerate(u):
        c = d.crossings[ci]
        for s1, s2 in SMOOTH_PAIRS[bit]:
            dsu.union(c[s1], c[s2])
    groups: Dict[int, List[int]] = {}
    for a in d.arcs:
        groups.setdefault(dsu.find(a), []).append(a)
    circles = [frozenset(g) for g in groups.values()]
    circles.sort(key=min)
    ray = d.winding_ray_arcs
    winding = []
    for circ in circles:
        k = len(circ & ray)
        winding.append(0 if k % 2 == 0 else _winding_sign(d, u, circ, ray))
    for j, pos in enumerate(d.free_essential):
        circles.append(frozenset({("free", "e", pos)}))
        winding.append(1 if d.marking is not None else 0)
    for k in range(d.free_trivial):
        circles.append(frozenset({("free", "t", k)}))
        winding.append(0)
    return Resolution(tuple(circles), tuple(winding))


def _circle_traversal(d: Diagram, u: Bitstring, circ: FrozenSet) -> List[Tuple[int, bool]]:
    """Walk a resolution circle; yields (arc, forward?) pairs.

    Starts from the minimal arc in its own orientation and follows the
    smoothings.
    """
    pair_at: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for ci, bit in enumerate(u):
        for s1, s2 in SMOOTH_PAIRS[bit]:
            pair_at[(ci, s1)] = (ci, s2)
            pair_at[(ci, s2)] = (ci, s1)
    other_end: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for a, ends in d.arc_ends.items():
        (c1, s1), (c2, s2) = ends
        other_end[(c1, s1)] = (c2, s2)
        other_end[(c2, s2)] = (c1, s1)

    start = min(circ)
    walk: List[Tuple[int, bool]] = []
    arc, forward = start, True
    while True:
        walk.append((arc, forward))
        end = d.arc_head[arc] if forward else d.arc_tail[arc]
        nxt_slot = pair_at[end]
        nxt_ci, nxt_s = nxt_slot
        nxt_arc = d.crossings[nxt_ci][nxt_s]
        # leaving via nxt_arc: moving away from this endpoint
        nxt_forward = d.arc_tail[nxt_arc] == (nxt_ci, nxt_s)
        arc, forward = nxt_arc, nxt_forward
        if (arc, forward) == (start, True):
            break
        if len(walk) > 4 * len(d.arcs) + 4:
            raise RuntimeError("circle traversal failed to close")
    return walk


def _winding_sign(d: Diagram, u: Bitstring, circ: FrozenSet, ray: FrozenSet) -> int:
    total = 0
    for arc, forward in _circle_traversal(d, u, circ):
        if arc in ray:
            total += 1 if forward else -1
    if total == 0:
        # odd crossing count cannot cancel exactly; normalize anyway
        return 1
    return 1 if total > 0 else -1


# ---------------------------------------------------------------------------
# Edge maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EdgeInfo:
    kind: str  # "merge" | "split"
    sign: int
    active_crossing: int
    source_circles: Tuple[int, ...]
    target_circles: Tuple[int, ...]


def edge_sign(u: Bitstring, i: int) -> int:
    return -1 if sum(u[:i]) % 2 else 1


def edge_info(d: Diagram, u: Bitstring, i: int) -> EdgeInfo:
    if u[i] != 0:
        raise BitAlreadyOne(f"bit {i} already set")
    v = tuple(1 if k == i else b for k, b in enumerate(u))
    ru, rv = resolve(d, u), resolve(d, v)
    c = d.crossings[i]
    touched = set(c)
    src = sorted({ru.circle_of(a) for a in touched})
    dst = sorted({rv.circle_of(a) for a in touched})
    if len(src) == 2 and len(dst) == 1:
        kind = "merge"
    elif len(src) == 1 and len(dst) == 2:
        kind = "split"
    else:
        raise RuntimeError("active circles do not merge or split")
    return EdgeInfo(kind, edge_sign(u, i), i, tuple(src), tuple(dst))


def oriented_resolution(d: Diagram, reversed_components: FrozenSet[int] = frozenset()
                        ) -> Tuple[Bitstring, Resolution]:
    u = []
    for ci in range(d.n):
        sg = d.signs[ci]
        comps = {d.component_of(d.crossings[ci][0])}
        over_in = 3 if sg > 0 else 1
        comps.add(d.component_of(d.crossings[ci][over_in]))
        flips = sum(1 for k in comps if k in reversed_components)
        if len(comps) == 2 and flips == 1:
            sg = -sg
        u.append(0 if sg > 0 else 1)
    return tuple(u), resolve(d, tuple(u))


# ---------------------------------------------------------------------------
# Checkerboard shading
# ---------------------------------------------------------------------------

def checkerboard(d: Diagram) -> Dict[int, bool]:
    """Proper 2-coloring of faces; the outer face is unshaded (False)."""
    if d.n == 0:
        return {}
    from collections import deque

    shade = {d.outer_face: False}
    queue = deque([d.outer_face])
    while queue:
        f = queue.popleft()
        for a in d.face_arcs(f):
            lf, rf = d.left_face(a), d.right_face(a)
            g = rf if lf == f else lf
            if g not in shade:
                shade[g] = not shade[f]
                queue.append(g)
            elif shade[g] == shade[f] and g != f:
                raise InconsistentOrientation("face graph is not checkerboard-colorable")
    for fi in range(len(d.faces)):
        shade.setdefault(fi, False)
    return shade


# ---------------------------------------------------------------------------
# Reidemeister moves
# ---------------------------------------------------------------------------

def _fresh_labels(d: Diagram, k: int) -> List[int]:
    base = max(d.arcs) if d.arcs else 0
    return [base + i + 1 for i in range(k)]


def apply_reidemeister(d: Diagram, move: str, site) -> Diagram:
    """R-move surgery on a diagram; the result represents the same link.

    Moves and sites:
      * "R1+" / "R1-"  site = ("arc", a) or ("circle",) — add a kink
      * "R1u"          site = ("crossing", ci) — undo a kink
      * "R2"           site = ("face", f, a1, a2) — poke a1 over a2
      * "R2u"          site = ("bigon", ci, cj) — undo a poke
      * "R3"           site = ("triangle", f) — slide across a triangle
    Annular markings do not survive surgery; the result is unmarked.
    """
    if move in ("R1+", "R1-"):
        return _r1_add(d, site, 1 if move == "R1+" else -1)
    if move == "R1u":
        return _r1_remove(d, site)
    if move == "R2":
        return _r2_add(d, site)
    if move == "R2u":
        return _r2_remove(d, site)
    if move == "R3":
        return _r3(d, site)
    raise IllegalSite(f"unknown move {move!r}")


def _strip(d: Diagram, crossings, signs, free_trivial=None) -> Diagram:
    return Diagram(crossings, signs,
                   d.free_trivial if free_trivial is None else free_trivial,
                   d.free_essential, None, None, ())


def _r1_add(d: Diagram, site, sign: int) -> Diagram:
    if site == ("circle",):
        if d.total_free == 0:
            raise IllegalSite("no free circle to kink")
        z, x = (1, 2) if not d.arcs else _fresh_labels(d, 2)
        tup = (z, z, x, x) if sign > 0 else (x, z, z, x)
        ft = d.free_trivial - 1 if d.free_trivial else d.free_trivial
        fe = d.free_essential if d.free_trivial else d.free_essential[:-1]
        return Diagram(list(d.crossings) + [tup], list(d.signs) + [sign],
                       ft, fe, None, None, ())
    kind, a = site
    if kind != "arc" or a not in set(d.arcs):
        raise IllegalSite(f"no arc {site!r}")
    y, z = _fresh_labels(d, 2)
    ci_h, s_h = d.arc_head[a]
    crossings = [list(c) for c in d.crossings]
    crossings[ci_h][s_h] = y
    tup = (z, z, y, a) if sign > 0 else (a, z, z, y)
    crossings.append(list(tup))
    return _strip(d, [tuple(c) for c in crossings], list(d.signs) + [sign])


def _kink_loop(d: Diagram, ci: int) -> Optional[int]:
    c = d.crossings[ci]
    if d.signs[ci] > 0 and c[0] == c[1]:
        return c[0]
    if d.signs[ci] < 0 and c[1] == c[2]:
        return c[1]
    return None


def _r1_remove(d: Diagram, site) -> Diagram:
    kind, ci = site
    if kind != "crossing" or not (0 <= ci < d.n):
        raise IllegalSite(f"no crossing {site!r}")
    z = _kink_loop(d, ci)
    if z is None:
        raise IllegalSite(f"crossing {ci} is not a kink")
    c = d.crossings[ci]
    x = c[3] if d.signs[ci] > 0 else c[0]
    y = c[2] if d.signs[ci] > 0 else c[3]
    crossings = [list(cc) for k, cc in enumerate(d.crossings) if k != ci]
    signs = [s for k, s in enumerate(d.signs) if k != ci]
    if x == y:
        # the kink was a 1-crossing unknot component
        return Diagram([tuple(c) for c in crossings], signs,
                       d.free_trivial + 1, d.free_essential, None, None, ())
    for cc in crossings:
        for s in range(4):
            if cc[s] == y:
                cc[s] = x
    return _strip(d, [tuple(c) for c in crossings], signs)


def _face_side(d: Diagram, arc: int, face: int) -> str:
    lf, rf = d.left_face(arc), d.right_face(arc)
    if rf == face:
        return "R"
    if lf == face:
        return "L"
    raise IllegalSite(f"arc {arc} does not bound face {face}")


def _r2_add(d: Diagram, site) -> Diagram:
    kind, f, a1, a2 = site
    if kind != "face" or a1 == a2:
        raise IllegalSite(f"bad R2 site {site!r}")
    side1 = _face_side(d, a1, f)
    side2 = _face_side(d, a2, f)
    m1, y1, m2, y2 = _fresh_labels(d, 4)
    crossings = [list(c) for c in d.crossings]
    ci1, s1 = d.arc_head[a1]
    ci2, s2 = d.arc_head[a2]
    crossings[ci1][s1] = y1
    crossings[ci2][s2] = y2
    x1, x2 = a1, a2
    if side1 == "R" and side2 == "L":
        k1, g1 = (x2, m1, m2, x1), 1
        k2, g2 = (m2, m1, y2, y1), -1
    elif side1 == "R" and side2 == "R":
        k1, g1 = (m2, x1, y2, m1), -1
        k2, g2 = (x2, y1, m2, m1), 1
    elif side1 == "L" and side2 == "R":
        k1, g1 = (x2, x1, m2, m1), -1
        k2, g2 = (m2, y1, y2, m1), 1
    else:  # L, L
        k1, g1 = (m2, m1, y2, x1), 1
        k2, g2 = (x2, m1, m2, y1), -1
    crossings.extend([list(k1), list(k2)])
    return _strip(d, [tuple(c) for c in crossings], list(d.signs) + [g1, g2])


def _r2_remove(d: Diagram, site) -> Diagram:
    kind, ci, cj = site
    if kind != "bigon" or ci == cj:
        raise IllegalSite(f"bad bigon site {site!r}")
    c1, c2 = d.crossings[ci], d.crossings[cj]
    shared = sorted(set(c1) & set(c2))
    if len(shared) < 2 or d.signs[ci] + d.signs[cj] != 0:
        raise IllegalSite("crossings do not bound a removable bigon")
    over1 = {c1[1], c1[3]}
    under1 = {c1[0], c1[2]}
    over2 = {c2[1], c2[3]}
    under2 = {c2[0], c2[2]}
    bigon = [a for a in shared
             if (a in over1 and a in over2) or (a in under1 and a in under2)]
    if len(bigon) < 2:
        raise IllegalSite("bigon arcs are not over/over and under/under")
    m_over = next(a for a in bigon if a in over1)
    m_under = next(a for a in bigon if a in under1)
    crossings = [list(cc) for k, cc in enumerate(d.crossings) if k not in (ci, cj)]
    signs = [s for k, s in enumerate(d.signs) if k not in (ci, cj)]
    free_extra = 0
    for m in (m_over, m_under):
        # the strand through m enters one removed crossing and leaves the other
        inc = None
        out = None
        for k in (ci, cj):
            cc = d.crossings[k]
            sg = d.signs[k]
            under_in, under_out = cc[0], cc[2]
            over_in = cc[3] if sg > 0 else cc[1]
            over_out = cc[1] if sg > 0 else cc[3]
            if m == under_out or m == over_out:
                inc = under_in if m == under_out else over_in
            if m == under_in or m == over_in:
                out = under_out if m == under_in else over_out
        if inc is None or out is None:
            raise IllegalSite("bigon strands are tangled with other crossings")
        if inc == m and out == m:
            free_extra += 1
            continue
        if inc == out and inc != m:
            # strand closes into a free circle through the two removed crossings?
            survives = any(inc in cc for cc in crossings)
            if not survives:
                free_extra += 1
                continue
        for cc in crossings:
            for s in range(4):
                if cc[s] == out:
                    cc[s] = inc
    return Diagram([tuple(c) for c in crossings], signs,
                   d.free_trivial + free_extra, d.free_essential, None, None, ())


def _r3(d: Diagram, site) -> Diagram:
    kind, f = site
    if kind != "triangle":
        raise IllegalSite(f"bad R3 site {site!r}")
    orbit = d.faces[f]
    if len(orbit) != 3:
        raise IllegalSite(f"face {f} is not a triangle")
    cs = sorted({ci for ci, _ in orbit})
    if len(cs) != 3:
        raise IllegalSite("triangle must touch three distinct crossings")
    side_arcs = list(d.face_arcs(f))
    if len(side_arcs) != 3:
        raise IllegalSite("triangle must have three distinct boundary arcs")
    # sides connect crossings pairwise; identify strands by their mid arc
    mids: Dict[FrozenSet[int], int] = {}
    for a in side_arcs:
        (e1, _), (e2, _) = d.arc_ends[a]
        if e1 == e2:
            raise IllegalSite("triangle side loops a single crossing")
        mids[frozenset((e1, e2))] = a

    def over_at(ci: int, arc: int) -> bool:
        c = d.crossings[ci]
        slots = [s for s in range(4) if c[s] == arc]
        return any(s in (1, 3) for s in slots)

    over_count: Dict[int, int] = {a: 0 for a in side_arcs}
    # each crossing carries exactly two of the three side strands
    strand_pairs: Dict[int, Tuple[int, int]] = {}
    for ci in cs:
        through = [a for a in side_arcs if ci in {e for e, _ in d.arc_ends[a]}]
        if len(through) != 2:
            raise IllegalSite("triangle sides do not pair up at a crossing")
        strand_pairs[ci] = (through[0], through[1])
        for a in through:
            if over_at(ci, a):
                over_count[a] += 1
    tops = [a for a in side_arcs if over_count[a] == 2]
    bots = [a for a in side_arcs if over_count[a] == 0]
    if len(tops) != 1 or len(bots) != 1:
        raise IllegalSite("triangle over/under pattern is cyclic; R3 illegal here")
    a_mid = tops[0]
    c_mid = bots[0]
    b_mid = next(a for a in side_arcs if a not in (a_mid, c_mid))
    # crossing AC: the one b_mid does not touch
    def touches(ci, arc):
        return ci in {e for e, _ in d.arc_ends[arc]}
    AC = next(ci for ci in cs if not touches(ci, b_mid))
    AB = next(ci for ci in cs if touches(ci, a_mid) and touches(ci, b_mid))
    BC = next(ci for ci in cs if touches(ci, c_mid) and touches(ci, b_mid) and ci != AB)

    def ext_arcs(ci: int, mid: int) -> Tuple[int, int]:
        """(incoming external, outgoing external) of mid's strand at ci."""
        c = d.crossings[ci]
        sg = d.signs[ci]
        under_in, under_out = c[0], c[2]
        over_in = c[3] if sg > 0 else c[1]
        over_out = c[1] if sg > 0 else c[3]
        if mid in (under_in, under_out):
            return under_in, under_out
        return over_in, over_out

    crossings = [list(c) for c in d.crossings]

    def subst(ci: int, old_arc: int, new_arc: int, want_in: bool):
        c = d.crossings[ci]
        sg = d.signs[ci]
        in_slots = (0, 3) if sg > 0 else (0, 1)
        for s in range(4):
            if c[s] == old_arc and ((s in in_slots) == want_in):
                crossings[ci][s] = new_arc
                return
        raise IllegalSite("triangle surgery slot not found")

    # strand A at AB: in was a_ext1, now a_mid; out was a_mid, now a_ext2
    ab_a_in, ab_a_out = ext_arcs(AB, a_mid)   # (a_ext1, a_mid) or (a_mid, a_ext1)
    ac_a_in, ac_a_out = ext_arcs(AC, a_mid)
    # orientation: does A meet AB before AC?
    a_first_AB = ab_a_out == a_mid
    if a_first_AB:
        a_e1, a_e2 = ab_a_in, ac_a_out
        subst(AB, a_e1, a_mid, True)
        subst(AB, a_mid, a_e2, False)
        subst(AC, a_mid, a_e1, True)
        subst(AC, a_e2, a_mid, False)
    else:
        a_e1, a_e2 = ac_a_in, ab_a_out
        subst(AC, a_e1, a_mid, True)
        subst(AC, a_mid, a_e2, False)
        subst(AB, a_mid, a_e1, True)
        subst(AB, a_e2, a_mid, False)

    bc_c_in, bc_c_out = ext_arcs(BC, c_mid)
    ac_c_in, ac_c_out = ext_arcs(AC, c_mid)
    c_first_BC = bc_c_out == c_mid
    if c_first_BC:
        c_e1, c_e2 = bc_c_in, ac_c_out
        subst(BC, c_e1, c_mid, True)
        subst(BC, c_mid, c_e2, False)
        subst(AC, c_mid, c_e1, True)
        subst(AC, c_e2, c_mid, False)
    else:
        c_e1, c_e2 = ac_c_in, bc_c_out
        subst(AC, c_e1, c_mid, True)
        subst(AC, c_mid, c_e2, False)
        subst(BC, c_mid, c_e1, True)
        subst(BC, c_e2, c_mid, False)

    ab_b_in, ab_b_out = ext_arcs(AB, b_mid)
    bc_b_in, bc_b_out = ext_arcs(BC, b_mid)
    b_first_AB = ab_b_out == b_mid
    if b_first_AB:
        b_e1, b_e2 = ab_b_in, bc_b_out
        # after the slide B meets BC first
        subst(BC, b_mid, b_e1, True)
        subst(BC, b_e2, b_mid, False)
        subst(AB, b_e1, b_mid, True)
        subst(AB, b_mid, b_e2, False)
    else:
        b_e1, b_e2 = bc_b_in, ab_b_out
        subst(AB, b_mid, b_e1, True)
        subst(AB, b_e2, b_mid, False)
        subst(BC, b_e1, b_mid, True)
        subst(BC, b_mid, b_e2, False)

    out = _strip(d, [tuple(c) for c in crossings], list(d.signs))
    # planarity sanity: Euler characteristic of the new rotation system
    if out.n and len(out.faces) != _expected_faces(out):
        raise IllegalSite("R3 surgery broke planarity")
    return out


def _expected_faces(d: Diagram) -> int:
    # V - E + F = 1 + #connected components of the 4-valent graph
    import collections
    adj = collections.defaultdict(set)
    for ci, c in enumerate(d.crossings):
        for a in c:
            adj[a].add(ci)
    seen = set()
    comps = 0
    for ci in range(d.n):
        if ci in seen:
            continue
        comps += 1
        stack = [ci]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            for a in d.crossings[x]:
                for y in adj[a]:
                    if y not in seen:
                        stack.append(y)
    return d.n + 1 + comps


# -- site enumeration helpers (used by the randomized invariance suite)

def r1_sites(d: Diagram):
    return [("arc", a) for a in d.arcs] + ([("circle",)] if d.total_free else [])


def r2_sites(d: Diagram):
    sites = []
    for f in range(len(d.faces)):
        arcs = sorted(d.face_arcs(f))
        for i in range(len(arcs)):
            for j in range(len(arcs)):
                if i != j:
                    sites.append(("face", f, arcs[i], arcs[j]))
    return sites


def r3_sites(d: Diagram):
    sites = []
    for f, orbit in enumerate(d.faces):
        if len(orbit) != 3:
            continue
        try:
            _r3(d, ("triangle", f))
        except IllegalSite:
            continue
        sites.append(("triangle", f))
    return sites
