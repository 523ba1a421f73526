"""Grid diagrams for knots: representation, moves, and a classical oracle.

A grid diagram of size ``n`` places one ``X`` and one ``O`` marking in every
row and every column of an ``n x n`` array so that no cell carries both
markings.  Joining ``X`` to ``O`` in every column and ``O`` to ``X`` in every
row (vertical segments crossing over horizontal ones) draws a closed oriented
rectilinear curve in the plane: the knot.  Rows are indexed bottom to top and
columns left to right, so ``xs[c]`` / ``os[c]`` is the row of the ``X`` / ``O``
in column ``c``.

All geometry in this package lives on a ten-fold scaled integer lattice: the
marking in column ``c``, row ``r`` becomes the puncture ``(10c+5, 10r+5)``,
and the curve runs along lines whose coordinates are ``5 mod 10``.  Every
later construction (intersection points of auxiliary curves, sub-cell
evaluation points for winding numbers) then has exact integer coordinates and
no floating point enters any computation.

Besides the moves generating grid equivalence (cyclic permutation,
commutation of adjacent parallel lines, stabilization and destabilization),
the module computes the Alexander polynomial from the matrix of winding
numbers, used throughout the test-suite as an independent oracle: with
``w(i, j)`` the winding number of the curve around the lattice point
``(i, j)``,

    det [ t^{w(i,j)} ]_{i,j = 0..n-1}  =  +- t^s (1-t)^{n-1} Delta(t)

where ``Delta`` is the symmetric Alexander polynomial normalized so that
``Delta(t) = Delta(1/t)`` and ``Delta(1) = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import (
    CoincidentDecorations,
    DegenerateDeterminant,
    EmptyWord,
    IllegalCastling,
    MultiComponent,
    MultiComponentClosure,
    NotPermutation,
    PointOnDiagram,
    TooSmall,
)

#: Lattice pitch of the scaled integer coordinates.
SCALE = 10
#: Offset of a cell-center puncture inside its scaled cell.
CENTER = 5

Point = tuple[int, int]


@dataclass(frozen=True)
class GridDiagram:
    """An ``n x n`` grid diagram; ``xs[c]``/``os[c]`` is the row of X/O in column ``c``."""

    xs: tuple[int, ...]
    os: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.xs)

    def x_row(self, c: int) -> int:
        return self.xs[c]

    def o_row(self, c: int) -> int:
        return self.os[c]

    def x_punctures(self) -> list[Point]:
        """Scaled centers of the X-marked cells."""
        return [(SCALE * c + CENTER, SCALE * r + CENTER) for c, r in enumerate(self.xs)]

    def o_punctures(self) -> list[Point]:
        """Scaled centers of the O-marked cells."""
        return [(SCALE * c + CENTER, SCALE * r + CENTER) for c, r in enumerate(self.os)]

    def punctures(self) -> list[Point]:
        return self.x_punctures() + self.o_punctures()


def validate(g: GridDiagram) -> None:
    """Raise unless ``g`` is a size >= 2 grid diagram of a one-component knot."""
    n = len(g.xs)
    if len(g.os) != n:
        raise NotPermutation("X and O data have different lengths")
    if n < 2:
        raise TooSmall(f"grid size {n} is below the minimum 2")
    if sorted(g.xs) != list(range(n)) or sorted(g.os) != list(range(n)):
        raise NotPermutation("rows of X/O markings must form permutations")
    for c in range(n):
        if g.xs[c] == g.os[c]:
            raise CoincidentDecorations(f"column {c} carries X and O in the same cell")
    k = component_count(g)
    if k != 1:
        raise MultiComponent(f"diagram traces {k} closed curves, expected 1")


def component_count(g: GridDiagram) -> int:
    """Number of closed curves traced by the diagram."""
    n = g.n
    x_col_of_row = [0] * n
    for c, r in enumerate(g.xs):
        x_col_of_row[r] = c
    seen = [False] * n
    count = 0
    for c0 in range(n):
        if seen[c0]:
            continue
        count += 1
        c = c0
        while not seen[c]:
            seen[c] = True
            c = x_col_of_row[g.os[c]]
    return count


# --------------------------------------------------------------------------
# The curve in scaled coordinates and winding numbers around off-curve points.


def vertical_segments(g: GridDiagram) -> list[tuple[int, int, int, bool]]:
    """Per column: ``(x, y_low, y_high, goes_down)`` oriented from X to O."""
    out = []
    for c in range(g.n):
        yx = SCALE * g.xs[c] + CENTER
        yo = SCALE * g.os[c] + CENTER
        out.append((SCALE * c + CENTER, min(yx, yo), max(yx, yo), yo < yx))
    return out


def horizontal_segments(g: GridDiagram) -> list[tuple[int, int, int, bool]]:
    """Per row: ``(y, x_low, x_high, goes_left)`` oriented from O to X."""
    xc = [0] * g.n
    oc = [0] * g.n
    for c in range(g.n):
        xc[g.xs[c]] = c
        oc[g.os[c]] = c
    out = []
    for r in range(g.n):
        xx = SCALE * xc[r] + CENTER
        xo = SCALE * oc[r] + CENTER
        out.append((SCALE * r + CENTER, min(xx, xo), max(xx, xo), xx < xo))
    return out


def winding_number(g: GridDiagram, point: Point) -> int:
    """Winding number of the oriented curve around a point off the curve.

    Counted by intersecting the horizontal ray running left from ``point``
    with the vertical segments of the curve: a downward segment crossing the
    ray contributes ``+1``, an upward one ``-1``.
    """
    px, py = point
    w = 0
    for x, ylo, yhi, down in vertical_segments(g):
        if x == px and ylo <= py <= yhi:
            raise PointOnDiagram(f"point {point} lies on a vertical segment")
        if x < px and ylo < py < yhi:
            w += 1 if down else -1
    for y, xlo, xhi, _left in horizontal_segments(g):
        if y == py and xlo <= px <= xhi:
            raise PointOnDiagram(f"point {point} lies on a horizontal segment")
    return w


def dominance_count(first: Iterable[Point], second: Iterable[Point]) -> int:
    """Number of pairs ``(p, q)`` with ``p`` strictly southwest of ``q``.

    Counts pairs from ``first x second`` with both coordinates strictly
    increasing; the bilinear building block of the combinatorial gradings.
    """
    qs = list(second)
    total = 0
    for ax, ay in first:
        for bx, by in qs:
            if ax < bx and ay < by:
                total += 1
    return total


def quadrant_winding_sum(g: GridDiagram, puncture: Point) -> int:
    """Sum of the winding numbers on the four regions meeting at a puncture.

    Sampled just off the puncture at offsets ``(+-2, +-2)``; these points are
    interior to the four adjacent complementary regions because all curve
    coordinates are ``5 mod 10``.
    """
    qx, qy = puncture
    total = 0
    for dx in (-2, 2):
        for dy in (-2, 2):
            total += winding_number(g, (qx + dx, qy + dy))
    return total


# --------------------------------------------------------------------------
# Laurent polynomials over the integers, and the Alexander polynomial oracle.


class LaurentPoly:
    """An integer Laurent polynomial, stored sparsely as exponent -> coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, int] | None = None):
        self.terms = {e: c for e, c in (terms or {}).items() if c != 0}

    @staticmethod
    def zero() -> "LaurentPoly":
        return LaurentPoly()

    @staticmethod
    def one() -> "LaurentPoly":
        return LaurentPoly({0: 1})

    @staticmethod
    def monomial(exp: int, coeff: int = 1) -> "LaurentPoly":
        return LaurentPoly({exp: coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> tuple[int, int]:
        """(lowest, highest) exponent; raises on the zero polynomial."""
        if not self.terms:
            raise ValueError("zero polynomial has empty support")
        return min(self.terms), max(self.terms)

    def coeff(self, exp: int) -> int:
        return self.terms.get(exp, 0)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) - c
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self.terms.items()})

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        out: dict[int, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly(out)

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            raise ValueError("negative power")
        result = LaurentPoly.one()
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def shifted(self, k: int) -> "LaurentPoly":
        """Multiply by ``t^k``."""
        return LaurentPoly({e + k: c for e, c in self.terms.items()})

    def inverse_t(self) -> "LaurentPoly":
        """Substitute ``t -> 1/t``."""
        return LaurentPoly({-e: c for e, c in self.terms.items()})

    def eval_at_unit(self, v: int) -> int:
        """Evaluate at ``t = v`` for ``v`` in ``{1, -1}``."""
        if v == 1:
            return sum(self.terms.values())
        if v == -1:
            return sum(c if e % 2 == 0 else -c for e, c in self.terms.items())
        raise ValueError("only evaluation at a unit is supported")

    def divexact(self, divisor: "LaurentPoly") -> "LaurentPoly":
        """Exact division; raises ``ValueError`` when the division leaves a remainder."""
        if divisor.is_zero():
            raise ValueError("division by zero polynomial")
        if self.is_zero():
            return LaurentPoly.zero()
        rem = dict(self.terms)
        dlo = min(divisor.terms)
        dc = divisor.terms[dlo]
        # The quotient's top exponent is bounded by the difference of the top
        # exponents; exceeding it means the division leaves a remainder.
        top = max(self.terms) - max(divisor.terms)
        out: dict[int, int] = {}
        while rem:
            rlo = min(rem)
            if rlo - dlo > top:
                raise ValueError("inexact polynomial division")
            q, r = divmod(rem[rlo], dc)
            if r != 0:
                raise ValueError("inexact polynomial division")
            out[rlo - dlo] = q
            for e, c in divisor.terms.items():
                e2 = e + rlo - dlo
                nc = rem.get(e2, 0) - q * c
                if nc:
                    rem[e2] = nc
                else:
                    rem.pop(e2, None)
        return LaurentPoly(out)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            if e == 0:
                bits.append(f"{c:+d}")
            elif e == 1:
                bits.append(f"{c:+d}*t")
            else:
                bits.append(f"{c:+d}*t^{e}")
        return "".join(bits)


def laurent_determinant(matrix: Sequence[Sequence[LaurentPoly]]) -> LaurentPoly:
    """Determinant by cofactor expansion memoized on the surviving column set."""
    n = len(matrix)
    memo: dict[int, LaurentPoly] = {}

    def det(row: int, mask: int) -> LaurentPoly:
        if row == n:
            return LaurentPoly.one()
        cached = memo.get(mask)
        if cached is not None:
            return cached
        total = LaurentPoly.zero()
        sign = 1
        for j in range(n):
            bit = 1 << j
            if not mask & bit:
                continue
            entry = matrix[row][j]
            if not entry.is_zero():
                term = entry * det(row + 1, mask & ~bit)
                total = total + term if sign > 0 else total - term
            sign = -sign
        memo[mask] = total
        return total

    return det(0, (1 << n) - 1)


def alexander_polynomial(g: GridDiagram) -> LaurentPoly:
    """The symmetric Alexander polynomial of the knot presented by ``g``.

    The determinant of the winding matrix ``[t^{w(i,j)}]`` equals
    ``+- t^s (1-t)^{n-1} Delta(t)``, so the raw determinant is divided
    exactly by ``(1-t)^{n-1}`` and the remaining unit is fixed by requiring
    ``Delta(t) = Delta(1/t)`` and ``Delta(1) = 1``.
    """
    n = g.n
    matrix = [
        [LaurentPoly.monomial(winding_number(g, (SCALE * i, SCALE * j))) for j in range(n)]
        for i in range(n)
    ]
    det = laurent_determinant(matrix)
    if det.is_zero():
        raise DegenerateDeterminant("winding matrix determinant vanished")
    try:
        quotient = det.divexact(LaurentPoly({0: 1, 1: -1}) ** (n - 1))
    except ValueError as exc:
        raise DegenerateDeterminant("determinant not divisible by (1-t)^(n-1)") from exc
    lo, hi = quotient.support()
    if (lo + hi) % 2 != 0:
        raise DegenerateDeterminant("determinant support cannot be centered")
    centered = quotient.shifted(-(lo + hi) // 2)
    unit = centered.eval_at_unit(1)
    if unit == -1:
        centered = -centered
    elif unit != 1:
        raise DegenerateDeterminant(f"normalized value at t=1 is {unit}, expected a unit")
    if centered != centered.inverse_t():
        raise DegenerateDeterminant("normalized polynomial is not symmetric")
    return centered


# --------------------------------------------------------------------------
# Moves generating grid equivalence.


def cyclic_row_shift(g: GridDiagram, k: int = 1) -> GridDiagram:
    """Move every marking up by ``k`` rows around the torus."""
    n = g.n
    k %= n
    return GridDiagram(
        tuple((r + k) % n for r in g.xs),
        tuple((r + k) % n for r in g.os),
    )


def cyclic_col_shift(g: GridDiagram, k: int = 1) -> GridDiagram:
    """Move every marking right by ``k`` columns around the torus."""
    n = g.n
    k %= n
    return GridDiagram(
        tuple(g.xs[(c - k) % n] for c in range(n)),
        tuple(g.os[(c - k) % n] for c in range(n)),
    )


def transpose(g: GridDiagram) -> GridDiagram:
    """Reflect across the main diagonal, exchanging the roles of rows and columns."""
    n = g.n
    xs = [0] * n
    os = [0] * n
    for c in range(n):
        xs[g.xs[c]] = c
        os[g.os[c]] = c
    return GridDiagram(tuple(xs), tuple(os))


def _span(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def castle_columns(g: GridDiagram, c: int) -> GridDiagram:
    """Exchange adjacent columns ``c`` and ``c+1``.

    Legal only when the two columns' marking intervals are disjoint or
    strictly nested with four distinct endpoints; interleaved intervals would
    change the knot and raise :class:`IllegalCastling`.
    """
    n = g.n
    if not 0 <= c <= n - 2:
        raise ValueError(f"column index {c} out of range for size {n}")
    a1, b1 = _span(g.xs[c], g.os[c])
    a2, b2 = _span(g.xs[c + 1], g.os[c + 1])
    if len({a1, b1, a2, b2}) < 4:
        raise IllegalCastling(f"columns {c},{c + 1} share a marking row")
    disjoint = b1 < a2 or b2 < a1
    nested = (a1 < a2 and b2 < b1) or (a2 < a1 and b1 < b2)
    if not (disjoint or nested):
        raise IllegalCastling(f"columns {c},{c + 1} have interleaved markings")
    xs = list(g.xs)
    os = list(g.os)
    xs[c], xs[c + 1] = xs[c + 1], xs[c]
    os[c], os[c + 1] = os[c + 1], os[c]
    return GridDiagram(tuple(xs), tuple(os))


def castle_rows(g: GridDiagram, r: int) -> GridDiagram:
    """Exchange adjacent rows ``r`` and ``r+1`` under the same legality rule."""
    return transpose(castle_columns(transpose(g), r))


def column_destabilization_sites(g: GridDiagram) -> list[int]:
    """Columns whose X and O sit in adjacent rows."""
    return [c for c in range(g.n) if abs(g.xs[c] - g.os[c]) == 1]


def row_destabilization_sites(g: GridDiagram) -> list[int]:
    """Rows whose X and O sit in adjacent columns."""
    n = g.n
    xc = [0] * n
    oc = [0] * n
    for c in range(n):
        xc[g.xs[c]] = c
        oc[g.os[c]] = c
    return [r for r in range(n) if abs(xc[r] - oc[r]) == 1]


def destabilize_column(g: GridDiagram, c: int) -> GridDiagram:
    """Delete column ``c`` (whose markings are vertically adjacent) and merge its two rows."""
    n = g.n
    if n <= 2:
        raise TooSmall("cannot destabilize a grid of size 2")
    if abs(g.xs[c] - g.os[c]) != 1:
        raise ValueError(f"column {c} is not a destabilization site")
    m = min(g.xs[c], g.os[c])

    def remap(r: int) -> int:
        if r > m + 1:
            return r - 1
        if r >= m:
            return m
        return r

    xs = tuple(remap(g.xs[d]) for d in range(n) if d != c)
    os = tuple(remap(g.os[d]) for d in range(n) if d != c)
    return GridDiagram(xs, os)


def destabilize_row(g: GridDiagram, r: int) -> GridDiagram:
    """Delete row ``r`` (whose markings are horizontally adjacent) and merge its two columns."""
    n = g.n
    xc = [0] * n
    oc = [0] * n
    for c in range(n):
        xc[g.xs[c]] = c
        oc[g.os[c]] = c
    if abs(xc[r] - oc[r]) != 1:
        raise ValueError(f"row {r} is not a destabilization site")
    return transpose(destabilize_column(transpose(g), r))


def stabilize(g: GridDiagram, r0: int, ci: int, kind: str = "XO") -> GridDiagram:
    """Split row ``r0`` into two rows and insert a fresh column at position ``ci``.

    ``kind`` chooses the markings of the fresh column bottom-to-top: ``"XO"``
    puts X at the lower new row (the old row's X moves to the upper one),
    ``"OX"`` the reverse.  Every insertion position yields the same knot; the
    new column is a destabilization site, inverting the move.
    """
    n = g.n
    if not 0 <= r0 < n:
        raise ValueError(f"row {r0} out of range")
    if not 0 <= ci <= n:
        raise ValueError(f"insertion position {ci} out of range")
    if kind not in ("XO", "OX"):
        raise ValueError(f"unknown stabilization kind {kind!r}")
    xs = []
    os = []
    for c in range(n):
        x = g.xs[c]
        o = g.os[c]
        if x > r0 or (x == r0 and kind == "XO"):
            x += 1
        if o > r0 or (o == r0 and kind == "OX"):
            o += 1
        xs.append(x)
        os.append(o)
    if kind == "XO":
        xs.insert(ci, r0)
        os.insert(ci, r0 + 1)
    else:
        xs.insert(ci, r0 + 1)
        os.insert(ci, r0)
    return GridDiagram(tuple(xs), tuple(os))


def canonical_key(g: GridDiagram) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Lexicographically least ``(xs, os)`` over all cyclic translates of ``g``.

    The least translate must have ``xs[0] == 0``, which fixes the row shift
    for each of the ``n`` column shifts; only those candidates are compared.
    """
    n = g.n
    xs2 = g.xs + g.xs
    os2 = g.os + g.os
    best: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    for dc in range(n):
        dr = -xs2[dc] % n
        xs = tuple((r + dr) % n for r in xs2[dc : dc + n])
        os = tuple((r + dr) % n for r in os2[dc : dc + n])
        cand = (xs, os)
        if best is None or cand < best:
            best = cand
    assert best is not None
    return best


def generalized_destabilizations(g: GridDiagram) -> list[GridDiagram]:
    """Destabilizations unlocked by sliding one line monotonically via castlings.

    Each returned diagram is the result of sliding a single column (or row)
    left/right (down/up) through legal castlings and destabilizing at a site
    that appears along the way.  Results are deduplicated by canonical key in
    a deterministic order.
    """
    seen: dict[tuple, GridDiagram] = {}

    def record(h: GridDiagram) -> None:
        if h.n <= 2:
            return
        for c in column_destabilization_sites(h):
            d = destabilize_column(h, c)
            seen.setdefault(canonical_key(d), d)
        for r in row_destabilization_sites(h):
            d = destabilize_row(h, r)
            seen.setdefault(canonical_key(d), d)

    n = g.n
    for castle in (castle_columns, castle_rows):
        for start in range(n):
            for step in (1, -1):
                h = g
                pos = start
                while 0 <= pos + step <= n - 1:
                    try:
                        h = castle(h, pos if step > 0 else pos - 1)
                    except IllegalCastling:
                        break
                    pos += step
                    record(h)
    return list(seen.values())


# --------------------------------------------------------------------------
# Braid words and the text format.


def parse_braid(letters: Iterable[int], peel: bool = True) -> GridDiagram:
    """Grid diagram of the closure of a braid word.

    Letters are nonzero integers: ``i`` is the positive generator crossing
    strands ``i`` and ``i+1``, ``-i`` its inverse.  The braid runs downward
    with every strand in its own column; at each crossing the strand passing
    underneath leaves its column, jogs horizontally past the overpassing
    column (crossings in a grid are always vertical over horizontal), and
    continues in a fresh column inserted next to it.  The closure arcs nest
    around the left side.  The raw diagram has size ``2k + len(word)`` for
    ``k`` strands and is then greedily destabilized.
    """
    word = list(letters)
    if not word:
        raise EmptyWord("braid word has no letters")
    for a in word:
        if not isinstance(a, int) or a == 0:
            raise ValueError(f"braid letters must be nonzero integers, got {a!r}")
    k = max(abs(a) for a in word) + 1
    ell = len(word)

    strand_at = list(range(k))
    for a in word:
        i = abs(a) - 1
        strand_at[i], strand_at[i + 1] = strand_at[i + 1], strand_at[i]
    if _cycle_count(strand_at) != 1:
        raise MultiComponentClosure(
            f"closure of the word has {_cycle_count(strand_at)} components"
        )

    # Vertical pieces: ids 0..k-1 enter at the top, id k+j is born at letter j,
    # ids k+ell+p are the nested closure arcs.  ``order`` tracks the left-to-
    # right arrangement of braid-zone columns; the order of the columns under
    # the active positions always matches the position order.
    top_row = {p: k + ell + p for p in range(k)}
    bot_row: dict[int, int] = {}
    order = list(range(k))
    cur = list(range(k))
    for j, a in enumerate(word):
        i = abs(a) - 1
        jog = k + ell - 1 - j
        fresh = k + j
        if a > 0:
            over, under = cur[i], cur[i + 1]
            order.insert(order.index(over), fresh)
            cur[i], cur[i + 1] = fresh, over
        else:
            over, under = cur[i + 1], cur[i]
            order.insert(order.index(over) + 1, fresh)
            cur[i], cur[i + 1] = over, fresh
        bot_row[under] = jog
        top_row[fresh] = jog
    for p in range(k):
        bot_row[cur[p]] = k - 1 - p

    full_order = [k + ell + p for p in range(k - 1, -1, -1)] + order
    n = 2 * k + ell
    xs = [0] * n
    os = [0] * n
    for col, pid in enumerate(full_order):
        if pid >= k + ell:
            p = pid - (k + ell)
            xs[col] = k - 1 - p
            os[col] = k + ell + p
        else:
            xs[col] = top_row[pid]
            os[col] = bot_row[pid]
    g = GridDiagram(tuple(xs), tuple(os))
    validate(g)
    return greedy_destabilize(g) if peel else g


def _cycle_count(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    count = 0
    for s in range(len(perm)):
        if seen[s]:
            continue
        count += 1
        t = s
        while not seen[t]:
            seen[t] = True
            t = perm[t]
    return count


def greedy_destabilize(g: GridDiagram) -> GridDiagram:
    """Destabilize repeatedly, using castling-assisted sites when no direct one exists."""
    while g.n > 2:
        sites = column_destabilization_sites(g)
        if sites:
            g = destabilize_column(g, sites[0])
            continue
        rows = row_destabilization_sites(g)
        if rows:
            g = destabilize_row(g, rows[0])
            continue
        assisted = generalized_destabilizations(g)
        if not assisted:
            break
        g = assisted[0]
    return g


def parse_grid_text(text: str) -> GridDiagram:
    """Parse the three-line grid format: size, then ``X:`` and ``O:`` row lists."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if len(lines) < 3:
        raise ValueError("grid text needs a size line plus X: and O: lines")
    n = int(lines[0])

    def marks(line: str, tag: str) -> tuple[int, ...]:
        head, sep, rest = line.partition(":")
        if not sep or head.strip().upper() != tag:
            raise ValueError(f"expected a line starting with {tag!r}, got {line!r}")
        vals = tuple(int(tok) for tok in rest.split())
        if len(vals) != n:
            raise ValueError(f"{tag} line has {len(vals)} entries, expected {n}")
        return vals

    g = GridDiagram(marks(lines[1], "X"), marks(lines[2], "O"))
    validate(g)
    return g


def format_grid_text(g: GridDiagram) -> str:
    """Inverse of :func:`parse_grid_text`."""
    return "{}\nX: {}\nO: {}\n".format(
        g.n,
        " ".join(str(r) for r in g.xs),
        " ".join(str(r) for r in g.os),
    )


def grids_related_by_moves(g: GridDiagram) -> Iterator[GridDiagram]:
    """All diagrams one move away: shifts, legal castlings, destabilizations."""
    n = g.n
    yield cyclic_row_shift(g, 1)
    yield cyclic_row_shift(g, n - 1)
    yield cyclic_col_shift(g, 1)
    yield cyclic_col_shift(g, n - 1)
    for c in range(n - 1):
        try:
            yield castle_columns(g, c)
        except IllegalCastling:
            pass
    for r in range(n - 1):
        try:
            yield castle_rows(g, r)
        except IllegalCastling:
            pass
    if n > 2:
        for c in column_destabilization_sites(g):
            yield destabilize_column(g, c)
        for r in row_destabilization_sites(g):
            yield destabilize_row(g, r)
