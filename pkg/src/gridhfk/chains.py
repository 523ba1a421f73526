"""Chain complexes over the grid: generators, gradings, boundary maps.

Two complexes are built from the same diagram:

* the **cell complex** (`mos_complex`): generators are the ``n!`` ways to
  place one point on each vertical and horizontal grid line, and the
  boundary counts empty rectangles on the torus;
* the **oval complex** (`long_complex`): generators place one point on each
  intersection of a vertical with a horizontal oval, and the boundary counts
  empty bigons (cap flips) and empty planar rectangles.

Both carry a Maslov grading (homological) and a doubled Alexander grading
``a2`` (stored doubled so that every value is an integer).  The Maslov
grading comes from a dominance-pair count against the O-markings; the
Alexander grading of oval generators comes from winding numbers, which
agrees with the dominance form on cell generators (asserted in tests).

`SparseComplex` is the shared container: a dict-of-dicts matrix with row
and column views, supporting unit-pivot cancellation, which is all the
reduction machinery needs.
"""

from __future__ import annotations

from bisect import bisect_left
from itertools import permutations, product

import numpy as np

from .errors import BoundarySquareNonzero, NonUnitPivot
from .gridkit import (
    CENTER,
    SCALE,
    GridDiagram,
    Point,
    dominance_count,
    quadrant_winding_sum,
    winding_number,
)
from .ovalgeo import OvalConfig, build_config

#: A generator: the sorted tuple of its points (scaled coordinates).
Gen = tuple[Point, ...]


# --------------------------------------------------------------------------
# gradings


def maslov(points: tuple[Point, ...], o_punct: tuple[Point, ...], shift: int) -> int:
    """Maslov grading from dominance counts against the O punctures.

    ``shift`` is +1 for cell generators and 0 for oval generators.
    """
    return (
        dominance_count(points, points)
        - dominance_count(points, o_punct)
        - dominance_count(o_punct, points)
        + dominance_count(o_punct, o_punct)
        + shift
    )


def alexander2_dominance(
    points: tuple[Point, ...],
    x_punct: tuple[Point, ...],
    o_punct: tuple[Point, ...],
    n: int,
) -> int:
    """Doubled Alexander grading of a cell generator, by dominance counts."""
    return (
        dominance_count(points, x_punct)
        + dominance_count(x_punct, points)
        - dominance_count(points, o_punct)
        - dominance_count(o_punct, points)
        - dominance_count(x_punct, x_punct)
        + dominance_count(o_punct, o_punct)
        - (n - 1)
    )


def winding_constant2(g: GridDiagram) -> int:
    """The diagram constant of the winding-number Alexander formula, doubled.

    ``a2(x) = -2 * sum of winding numbers over x  +  winding_constant2(g)``.
    """
    total = sum(quadrant_winding_sum(g, q) for q in g.punctures())
    if total % 4:
        raise AssertionError("quadrant winding sums do not average to quarters")
    return total // 4 - (g.n - 1)


def alexander2_winding(g: GridDiagram, points: tuple[Point, ...]) -> int:
    """Doubled Alexander grading from winding numbers (any generator kind)."""
    return -2 * sum(winding_number(g, p) for p in points) + winding_constant2(g)


# --------------------------------------------------------------------------
# sparse complexes


class SparseComplex:
    """A graded boundary matrix over Z or Z/2 with row and column views.

    ``rows[x][y]`` is the coefficient of ``y`` in the boundary of ``x``;
    ``cols`` is the transpose view kept in lockstep.  ``grading[x]`` is the
    pair ``(a2, maslov)``.
    """

    __slots__ = ("ring", "grading", "rows", "cols")

    def __init__(self, ring: str = "Z"):
        if ring not in ("Z", "Z2"):
            raise ValueError(f"unknown coefficient ring {ring!r}")
        self.ring = ring
        self.grading: dict[Gen, tuple[int, int]] = {}
        self.rows: dict[Gen, dict[Gen, int]] = {}
        self.cols: dict[Gen, dict[Gen, int]] = {}

    # -- construction

    def add_generator(self, gen: Gen, a2: int, m: int) -> None:
        if gen in self.grading:
            raise AssertionError(f"duplicate generator {gen}")
        self.grading[gen] = (a2, m)
        self.rows[gen] = {}
        self.cols[gen] = {}

    def add_entry(self, x: Gen, y: Gen, coeff: int) -> None:
        if self.ring == "Z2":
            coeff &= 1
        if not coeff:
            return
        row = self.rows[x]
        new = row.get(y, 0) + coeff
        if self.ring == "Z2":
            new &= 1
        if new:
            row[y] = new
            self.cols[y][x] = new
        else:
            row.pop(y, None)
            self.cols[y].pop(x, None)

    # -- inspection

    def entry(self, x: Gen, y: Gen) -> int:
        return self.rows[x].get(y, 0)

    @property
    def generator_count(self) -> int:
        return len(self.grading)

    @property
    def entry_count(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def generators(self) -> list[Gen]:
        return list(self.grading)

    def copy(self) -> "SparseComplex":
        other = SparseComplex(self.ring)
        other.grading = dict(self.grading)
        other.rows = {x: dict(r) for x, r in self.rows.items()}
        other.cols = {y: dict(c) for y, c in self.cols.items()}
        return other

    def assert_entries_unit(self) -> None:
        for x, row in self.rows.items():
            for y, c in row.items():
                if c not in (1, -1):
                    raise AssertionError(f"non-unit entry {c} at {x} -> {y}")

    def grading_violation(self):
        """Return an edge that fails (a2 preserved, maslov drops by 1)."""
        for x, row in self.rows.items():
            a2, m = self.grading[x]
            for y in row:
                b2, k = self.grading[y]
                if b2 != a2 or k != m - 1:
                    return (x, y)
        return None

    def d_squared_violation(self):
        """Return ``(x, z, coeff)`` witnessing a nonzero entry of the square."""
        mod2 = self.ring == "Z2"
        for x, row in self.rows.items():
            acc: dict[Gen, int] = {}
            for y, c in row.items():
                for z, d in self.rows[y].items():
                    acc[z] = acc.get(z, 0) + c * d
            for z, total in acc.items():
                if (total & 1) if mod2 else total:
                    return (x, z, total)
        return None

    def check_d_squared(self) -> None:
        bad = self.d_squared_violation()
        if bad is not None:
            raise BoundarySquareNonzero(
                f"d^2 has entry {bad[2]} from {bad[0]} to {bad[1]}"
            )

    # -- reduction primitive

    def cancel_pair(self, x: Gen, y: Gen) -> None:
        """Cancel the edge ``x -> y``; its coefficient must be a unit.

        All other incoming edges of ``y`` are pushed through the inverse:
        for ``u -> y`` and ``x -> v`` the entry ``u -> v`` gains
        ``-coeff(u,y) * coeff(x,y)^{-1} * coeff(x,v)``.
        """
        s = self.rows[x].get(y, 0)
        if self.ring == "Z2":
            if s != 1:
                raise NonUnitPivot(f"pivot {s} at {x} -> {y}")
            inv = 1
        else:
            if s not in (1, -1):
                raise NonUnitPivot(f"pivot {s} at {x} -> {y}")
            inv = s
        into_y = [(u, c) for u, c in self.cols[y].items() if u != x]
        from_x = [(v, c) for v, c in self.rows[x].items() if v != y]
        self._drop(x)
        self._drop(y)
        for u, cu in into_y:
            for v, cv in from_x:
                self.add_entry(u, v, -cu * inv * cv)

    def _drop(self, gen: Gen) -> None:
        for y in self.rows[gen]:
            del self.cols[y][gen]
        for u in self.cols[gen]:
            del self.rows[u][gen]
        del self.rows[gen]
        del self.cols[gen]
        del self.grading[gen]


# --------------------------------------------------------------------------
# signs


def _rect_sign(x: Gen, y: Gen) -> int:
    """Sign of a planar rectangle contribution from ``x`` to ``y``.

    Computed from the two departing points (lower-left ``(a, b)`` and
    upper-right ``(c, d)``) and dominance counts of ``x`` against two of its
    horizontal slices.  The parity correction triggers on the number of
    points of ``x`` below the rectangle, where the departing corner itself
    (at the bottom-left) does not count as "below".
    """
    moved = sorted(set(x) - set(y))
    (a, b), (c, d) = moved
    slice_d = [p for p in x if p[1] <= d]
    slice_bd = [p for p in x if b < p[1] <= d]
    below = sum(1 for p in x if a < p[0] <= c and p[1] <= b)
    e = dominance_count(x, tuple(slice_d))
    if below % 2:
        e += dominance_count(x, tuple(slice_bd)) + 1
    return -1 if e % 2 else 1


class _SpinSection:
    """Signs for torus rectangles via a double cover of the permutations.

    Each permutation is lifted to an element of the Clifford algebra on
    ``n`` anticommuting generators (``g_i * g_i = -1``), by peeling off the
    first descent: ``lift(p) = lift(p with first descent resolved) *
    (g_k - g_{k+1})``.  Swapping positions ``i < j`` of a permutation
    multiplies its lift by ``(g_i - g_j)`` up to a scalar ``+-2^k``; the
    sign of that scalar is the edge sign.  Multiplying the two edge signs
    around any square of transpositions gives ``-1``, which is exactly the
    anticommutation the boundary needs to square to zero.

    Elements are dicts mapping basis monomials (bitmasks of generator
    indices, factors in increasing order) to integer coefficients.
    """

    def __init__(self, n: int):
        self.n = n
        self._memo: dict[tuple[int, ...], dict[int, int]] = {
            tuple(range(n)): {0: 1}
        }

    @staticmethod
    def _times_gamma(elem: dict[int, int], t: int, out: dict[int, int], flip: int) -> None:
        """Accumulate ``elem * g_t`` (times ``flip``) into ``out``."""
        bit = 1 << t
        above = ~((bit << 1) - 1)
        for mask, coeff in elem.items():
            passes = (mask & above).bit_count()
            if mask & bit:
                sign = -flip if passes % 2 == 0 else flip
                key = mask & ~bit
            else:
                sign = flip if passes % 2 == 0 else -flip
                key = mask | bit
            val = out.get(key, 0) + sign * coeff
            if val:
                out[key] = val
            else:
                out.pop(key, None)

    def _times_diff(self, elem: dict[int, int], i: int, j: int) -> dict[int, int]:
        """Return ``elem * (g_i - g_j)``."""
        out: dict[int, int] = {}
        self._times_gamma(elem, i, out, 1)
        self._times_gamma(elem, j, out, -1)
        return out

    def lift(self, perm: tuple[int, ...]) -> dict[int, int]:
        memo = self._memo
        stack = []
        cur = perm
        while cur not in memo:
            stack.append(cur)
            k = next(k for k in range(self.n - 1) if cur[k] > cur[k + 1])
            nxt = list(cur)
            nxt[k], nxt[k + 1] = nxt[k + 1], nxt[k]
            cur = tuple(nxt)
        for p in reversed(stack):
            k = next(k for k in range(self.n - 1) if p[k] > p[k + 1])
            memo[p] = self._times_diff(memo[p[:k] + (p[k + 1], p[k]) + p[k + 2:]], k, k + 1)
        return memo[perm]

    def edge_sign(self, perm: tuple[int, ...], i: int, j: int) -> int:
        """Sign of the move swapping the entries at positions ``i < j``."""
        prod = self._times_diff(self.lift(perm), i, j)
        swapped = list(perm)
        swapped[i], swapped[j] = swapped[j], swapped[i]
        target = self.lift(tuple(swapped))
        if set(prod) != set(target):
            raise AssertionError("lift supports disagree along an edge")
        key = next(iter(target))
        a, b = prod[key], target[key]
        # the ratio of the two lifts is +-(a power of two), exactly
        hi, lo = (abs(a), abs(b)) if abs(a) >= abs(b) else (abs(b), abs(a))
        ratio = hi // lo
        if hi % lo or ratio & (ratio - 1):
            raise AssertionError("edge ratio is not a signed power of two")
        for m, c in prod.items():
            if c * b != target[m] * a:
                raise AssertionError("edge ratio differs between monomials")
        return 1 if (a > 0) == (b > 0) else -1


_SPIN_CACHE: dict[int, _SpinSection] = {}


def _spin_section(n: int) -> _SpinSection:
    sec = _SPIN_CACHE.get(n)
    if sec is None:
        sec = _SPIN_CACHE[n] = _SpinSection(n)
    return sec


# --------------------------------------------------------------------------
# cell (rectangle) complex


def _cyc_in(start: int, end: int, v: int) -> bool:
    """Whether ``v`` lies in the cyclic half-open interval ``[start, end)``."""
    if start < end:
        return start <= v < end
    return v >= start or v < end


def mos_generators(g: GridDiagram) -> list[Gen]:
    n = g.n
    return [
        tuple((SCALE * i, SCALE * perm[i]) for i in range(n))
        for perm in permutations(range(n))
    ]


def mos_complex(g: GridDiagram, ring: str = "Z") -> SparseComplex:
    """The rectangle complex of the diagram: ``n!`` generators."""
    n = g.n
    o_p = g.o_punctures()
    x_p = g.x_punctures()
    cells = [(c, g.xs[c]) for c in range(n)] + [(c, g.os[c]) for c in range(n)]
    cx = SparseComplex(ring)
    for x in mos_generators(g):
        cx.add_generator(
            x,
            alexander2_dominance(x, x_p, o_p, n),
            maslov(x, o_p, 1),
        )
    signed = ring == "Z"
    sec = _spin_section(n) if signed else None
    for x in cx.generators():
        sigma = tuple(p[1] // SCALE for p in x)
        for i in range(n):
            for j in range(i + 1, n):
                a, b = sigma[i], sigma[j]
                y = list(x)
                y[i] = (SCALE * i, SCALE * b)
                y[j] = (SCALE * j, SCALE * a)
                target = tuple(y)
                base = 0  # edge sign, computed once a rectangle survives
                for ci, cj, ra, rb in ((i, j, a, b), (j, i, b, a)):
                    if any(
                        _cyc_in(ci, cj, c) and _cyc_in(ra, rb, r) for c, r in cells
                    ):
                        continue
                    if any(
                        k != i
                        and k != j
                        and k != ci
                        and sigma[k] != ra
                        and _cyc_in(ci, cj, k)
                        and _cyc_in(ra, rb, sigma[k])
                        for k in range(n)
                    ):
                        continue
                    if not base:
                        base = sec.edge_sign(sigma, i, j) if signed else 1
                    # a rectangle whose column interval wraps the seam where
                    # the torus was cut open picks up an extra minus sign
                    coeff = -base if (signed and cj < ci) else base
                    cx.add_entry(x, target, coeff)
    if signed:
        cx.assert_entries_unit()
    return cx


# --------------------------------------------------------------------------
# oval complex


class _OvalFrame:
    """Per-configuration tables shared by generator and boundary builders."""

    def __init__(self, config: OvalConfig):
        self.config = config
        g = config.grid
        self.grid = g
        self.cols = config.kept_cols()
        self.rows = config.kept_rows()
        self.o_punct = g.o_punctures()
        self.punctures = g.punctures()
        self.const2 = winding_constant2(g)
        # every point contributes an even amount (-2w), so all generators
        # share the constant's parity; integral Alexander gradings force it
        if self.const2 % 2:
            raise AssertionError("odd doubled-Alexander constant")
        #: per-point doubled Alexander contribution
        self.a2_of: dict[Point, int] = {}
        for pts in config.points.values():
            for p in pts:
                self.a2_of[p] = -2 * winding_number(g, p)
        #: puncture rows per column and columns per row (scaled centers)
        self.col_punct: dict[int, tuple[int, ...]] = {
            c: (SCALE * g.xs[c] + CENTER, SCALE * g.os[c] + CENTER) for c in range(g.n)
        }
        row_of: dict[int, list[int]] = {r: [] for r in range(g.n)}
        for c in range(g.n):
            row_of[g.xs[c]].append(SCALE * c + CENTER)
            row_of[g.os[c]].append(SCALE * c + CENTER)
        self.row_punct = {r: tuple(sorted(v)) for r, v in row_of.items()}


def oval_generators(
    config: OvalConfig, keep_a2: set[int] | None = None
) -> list[tuple[Gen, int]]:
    """All (generator, a2) pairs of the configuration.

    A generator chooses a bijection from kept columns to kept rows and one
    intersection point of each matched oval pair.  When ``keep_a2`` is
    given, branches whose reachable a2 interval misses every kept value are
    pruned (the a2 grading is a sum of per-point contributions plus a
    diagram constant, so interval bounds are exact).
    """
    frame = _OvalFrame(config)
    cols, rows = frame.cols, frame.rows
    k = len(cols)
    choices: list[list[tuple[int, list[tuple[Point, int]]]]] = []
    for c in cols:
        per_row = []
        for ri, r in enumerate(rows):
            pts = config.points.get((c, r), ())
            if pts:
                per_row.append((ri, [(p, frame.a2_of[p]) for p in pts]))
        choices.append(per_row)

    # suffix bounds on the remaining a2 contribution, for pruning
    lo_rest = [0] * (k + 1)
    hi_rest = [0] * (k + 1)
    for i in range(k - 1, -1, -1):
        vals = [w for _, pts in choices[i] for _, w in pts]
        lo_rest[i] = lo_rest[i + 1] + min(vals)
        hi_rest[i] = hi_rest[i + 1] + max(vals)
    keep = None if keep_a2 is None else sorted(keep_a2)

    out: list[tuple[Gen, int]] = []
    picked: list[Point] = []

    def feasible(acc: int, depth: int) -> bool:
        if keep is None:
            return True
        lo = acc + lo_rest[depth] + frame.const2
        hi = acc + hi_rest[depth] + frame.const2
        i = bisect_left(keep, lo)
        return i < len(keep) and keep[i] <= hi

    def walk(depth: int, used: int, acc: int) -> None:
        if depth == k:
            out.append((tuple(sorted(picked)), acc + frame.const2))
            return
        for ri, pts in choices[depth]:
            if used & (1 << ri):
                continue
            for p, w in pts:
                if not feasible(acc + w, depth + 1):
                    continue
                picked.append(p)
                walk(depth + 1, used | (1 << ri), acc + w)
                picked.pop()

    walk(0, 0, 0)
    return out


def a2_range(config: OvalConfig) -> tuple[int, int]:
    """Closed interval certainly containing every generator's a2 grading.

    Sums the per-column extremes of the point contributions, ignoring the
    row-matching constraint, so the bounds may be loose but never exclude a
    realized value.  Both endpoints share the even parity of the gradings,
    letting callers scan candidate slices in steps of two.
    """
    frame = _OvalFrame(config)
    lo = hi = frame.const2
    for c in frame.cols:
        vals = [
            frame.a2_of[p]
            for r in frame.rows
            for p in config.points.get((c, r), ())
        ]
        lo += min(vals)
        hi += max(vals)
    return lo, hi


def _bigon_targets(frame: _OvalFrame, p: Point) -> list[tuple[Point, str, int]]:
    """Flip moves available to the single point ``p``.

    Returns ``(new_point, kind, oval_key)`` triples where ``kind`` names the
    cap swept over and ``oval_key`` identifies the oval whose cap it is
    (column index for vertical ovals, row index for horizontal ones).
    An entry appears only if the swept region contains no puncture.
    """
    cfg = frame.config
    px, py = p
    c, r = px // SCALE, py // SCALE
    vo = cfg.v_ovals[c]
    ho = cfg.h_ovals[r]
    out = []
    if px == vo.x1:  # left wall: may flip right across the top cap
        if all(not (py < q < vo.y2) for q in frame.col_punct[c]):
            out.append(((vo.x2, py), "top", c))
    else:  # right wall: may flip left across the bottom cap
        if all(not (vo.y1 < q < py) for q in frame.col_punct[c]):
            out.append(((vo.x1, py), "bottom", c))
    if py == ho.y1:  # bottom wall: may flip up across the right cap
        if all(not (px < q < ho.x2) for q in frame.row_punct[r]):
            out.append(((px, ho.y2), "right", r))
    else:  # top wall: may flip down across the left cap
        if all(not (ho.x1 < q < px) for q in frame.row_punct[r]):
            out.append(((px, ho.y1), "left", r))
    return out


def _bigon_sign(x: Gen, kind: str, key: int) -> int:
    """Sign of a flip: parity of internal dominance plus a positional count.

    Ovals are ordered vertical-by-column then horizontal-by-row; the count
    is over ovals strictly before the flipped one whose point of ``x`` sits
    on the positive wall (right wall of a vertical oval, top wall of a
    horizontal one).  Each oval carries exactly one point of ``x``.
    """
    e = dominance_count(x, x)
    if kind in ("top", "bottom"):  # flipping across vertical oval `key`
        for p in x:
            if p[0] // SCALE < key and p[0] % SCALE == 7:
                e += 1
    else:  # across horizontal oval `key`: all vertical ovals come first
        for p in x:
            if p[0] % SCALE == 7:
                e += 1
            if p[1] // SCALE < key and p[1] % SCALE == 6:
                e += 1
    return -1 if e % 2 else 1


class LongMoves:
    """On-demand rows of the full-height oval complex's differential.

    Enumerates the moves leaving one generator — cap flips and empty
    rectangles — without touching the rest of the complex, so path
    strategies can pull single rows lazily.
    """

    def __init__(self, config: OvalConfig, signed: bool = True):
        self.frame = _OvalFrame(config)
        self.point_set = {p for pts in config.points.values() for p in pts}
        self.signed = signed

    def gradings(self, x: Gen) -> tuple[int, int]:
        """(a2, maslov) of a generator whose points lie on this frame."""
        frame = self.frame
        a2 = sum(frame.a2_of[p] for p in x) + frame.const2
        return a2, maslov(x, frame.o_punct, 0)

    def row(self, x: Gen) -> dict[Gen, int]:
        """All boundary entries leaving ``x``, keyed by target generator."""
        frame = self.frame
        signed = self.signed
        xs = set(x)
        out: dict[Gen, int] = {}
        for idx, p in enumerate(x):
            for q, kind, key in _bigon_targets(frame, p):
                y = list(x)
                y[idx] = q
                target = tuple(sorted(y))
                out[target] = _bigon_sign(x, kind, key) if signed else 1
        for i in range(len(x)):
            for j in range(i + 1, len(x)):
                p, q = x[i], x[j]  # sorted: p left of q
                if (p[0] - q[0]) * (p[1] - q[1]) <= 0:
                    continue  # only rising pairs bound a rectangle from x
                x1, x2 = p[0], q[0]
                y1, y2 = p[1], q[1]
                if any(
                    x1 < u < x2 and y1 < v < y2 for u, v in frame.punctures
                ):
                    continue
                if any(
                    x1 < u < x2 and y1 < v < y2 for u, v in xs if (u, v) not in (p, q)
                ):
                    continue
                nw, se = (x1, y2), (x2, y1)
                if nw not in self.point_set or se not in self.point_set:
                    raise AssertionError("rectangle corner missing from config")
                y = list(x)
                y[i], y[j] = nw, se
                target = tuple(sorted(y))
                out[target] = _rect_sign(x, target) if signed else 1
        return out


def long_complex(
    g: GridDiagram,
    omit: tuple[int, int],
    ring: str = "Z",
    keep_a2: set[int] | None = None,
) -> SparseComplex:
    """The oval complex with full-height/width ovals, built directly.

    Boundary entries: empty cap flips (bigons) and empty planar rectangles
    spanned by a rising pair of points.  When ``keep_a2`` restricts the
    generators, the boundary preserves a2, so the restriction is a genuine
    subcomplex and no entries are lost.
    """
    config = build_config(g, omit, "long")
    moves = LongMoves(config, signed=ring == "Z")
    cx = SparseComplex(ring)
    gens = oval_generators(config, keep_a2)
    for x, a2 in gens:
        cx.add_generator(x, a2, maslov(x, moves.frame.o_punct, 0))
    for x, _ in gens:
        for target, coeff in moves.row(x).items():
            if target not in cx.grading:
                raise AssertionError("move target escapes the kept a2 slices")
            cx.add_entry(x, target, coeff)
    if ring == "Z":
        cx.assert_entries_unit()
    return cx


# --------------------------------------------------------------------------
# vectorized per-slice construction of the full-size oval complex


class SliceBuilder:
    """Builds the full-height oval complex one Alexander slice at a time.

    A generator is encoded as one small integer per kept column — the
    matched row index together with the two wall-side bits — and the whole
    tuple packs into a single integer, which is the key used by the
    per-slice complexes.  Gradings, emptiness tests, and signs are all
    evaluated with numpy over whole slices at once; the output agrees
    entrywise with `long_complex` (asserted on small grids in the tests).

    The boundary preserves the Alexander grading, so each slice is a
    genuine subcomplex and can be built, reduced, and discarded on its own.
    """

    def __init__(self, g: GridDiagram, omit: tuple[int, int]):
        self.grid = g
        self.omit = omit
        self.config = build_config(g, omit, "long")
        frame = _OvalFrame(self.config)
        self.frame = frame
        cols, rows = frame.cols, frame.rows
        k = len(cols)
        if len(rows) != k:
            raise AssertionError("full-oval configuration must be square")
        self.k = k
        self.ncodes = 4 * k
        self.powers = (4 * k) ** np.arange(k, dtype=np.int64)
        self.col_index = {c: ci for ci, c in enumerate(cols)}
        self.row_index = {r: ri for ri, r in enumerate(rows)}

        o_p = frame.o_punct
        self.xcoord = np.zeros((k, self.ncodes), np.int32)
        self.ycoord = np.zeros((k, self.ncodes), np.int32)
        self.w2 = np.zeros((k, self.ncodes), np.int32)
        self.mpoint = np.zeros((k, self.ncodes), np.int32)  # -I(p,O) - I(O,p)
        #: per kind (0: left->top, 1: right->bottom, 2: bottom->right,
        #: 3: top->left): whether the flip is empty, per (column, code)
        self.flip_ok = np.zeros((4, k, self.ncodes), bool)
        self.flip_delta = (2, -2, 1, -1)  # code change of each flip kind
        for ci, c in enumerate(cols):
            vo = self.config.v_ovals[c]
            colp = frame.col_punct[c]
            for ri, r in enumerate(rows):
                ho = self.config.h_ovals[r]
                rowp = frame.row_punct[r]
                for sx, wx in enumerate((vo.x1, vo.x2)):
                    for sy, wy in enumerate((ho.y1, ho.y2)):
                        code = 4 * ri + 2 * sx + sy
                        self.xcoord[ci, code] = wx
                        self.ycoord[ci, code] = wy
                        self.w2[ci, code] = -2 * winding_number(g, (wx, wy))
                        self.mpoint[ci, code] = -dominance_count(
                            [(wx, wy)], o_p
                        ) - dominance_count(o_p, [(wx, wy)])
                        if sx == 0:
                            self.flip_ok[0, ci, code] = max(colp) < wy
                        else:
                            self.flip_ok[1, ci, code] = min(colp) > wy
                        if sy == 0:
                            self.flip_ok[2, ci, code] = max(rowp) < wx
                        else:
                            self.flip_ok[3, ci, code] = min(rowp) > wx
        self.ioo = dominance_count(o_p, o_p)

        # puncture-freeness of the rectangle spanned by codes on a column pair
        px = np.array([p[0] for p in frame.punctures], np.int32)
        py = np.array([p[1] for p in frame.punctures], np.int32)
        self.rect_free = {}
        for i in range(k):
            for j in range(i + 1, k):
                xi = self.xcoord[i][:, None, None]
                yi = self.ycoord[i][:, None, None]
                xj = self.xcoord[j][None, :, None]
                yj = self.ycoord[j][None, :, None]
                inside = (xi < px) & (px < xj) & (yi < py) & (py < yj)
                self.rect_free[(i, j)] = ~inside.any(axis=2)

        self._slices: dict[int, tuple[np.ndarray, np.ndarray]] | None = None

    # -- enumeration

    def _enumerate(self) -> dict[int, tuple[np.ndarray, np.ndarray]]:
        if self._slices is not None:
            return self._slices
        k = self.k
        sides = np.array(list(product(range(4), repeat=k)), np.uint8)
        per_a2: dict[int, list[np.ndarray]] = {}
        for perm in permutations(range(k)):
            codes = 4 * np.array(perm, np.uint8) + sides
            a2 = np.zeros(len(codes), np.int64)
            for ci in range(k):
                a2 += self.w2[ci][codes[:, ci]]
            for val in np.unique(a2):
                per_a2.setdefault(int(val) + self.frame.const2, []).append(
                    codes[a2 == val]
                )
        slices: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        for a2, chunks in per_a2.items():
            codes = np.vstack(chunks)
            keys = codes.astype(np.int64) @ self.powers
            order = np.argsort(keys)
            slices[a2] = (keys[order], codes[order])
        self._slices = slices
        return slices

    @property
    def sizes(self) -> dict[int, int]:
        return {a2: len(keys) for a2, (keys, _) in sorted(self._enumerate().items())}

    def pack(self, gen: Gen) -> int:
        """The integer key of a generator given as a tuple of points."""
        key = 0
        for x, y in gen:
            ci = self.col_index[x // SCALE]
            code = 4 * self.row_index[y // SCALE] + 2 * (x % SCALE == 7) + (y % SCALE == 6)
            key += code * int(self.powers[ci])
        return key

    # -- per-slice gradings and boundary

    def _maslov(self, codes: np.ndarray) -> np.ndarray:
        ys = self._ys(codes)
        m = np.full(len(codes), self.ioo, np.int64)
        for l in range(self.k):
            m += self.mpoint[l][codes[:, l]]
            for h in range(l + 1, self.k):
                m += ys[:, l] < ys[:, h]
        return m

    def _ys(self, codes: np.ndarray) -> np.ndarray:
        return np.column_stack(
            [self.ycoord[ci][codes[:, ci]] for ci in range(self.k)]
        )

    def slice_edges(
        self, a2: int
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(keys, maslov, src_idx, dst_idx, coeff) of one Alexander slice."""
        keys, codes = self._enumerate()[a2]
        k = self.k
        ys = self._ys(codes)
        ixx = np.zeros(len(codes), np.int64)
        for l in range(k):
            for h in range(l + 1, k):
                ixx += ys[:, l] < ys[:, h]
        sx = (codes >> 1) & 1
        sy = codes & 1
        ri = codes >> 2
        src_parts, dst_parts, sign_parts = [], [], []

        def lookup(target_keys: np.ndarray) -> np.ndarray:
            idx = np.searchsorted(keys, target_keys)
            if not ((idx < len(keys)).all() and (keys[idx] == target_keys).all()):
                raise AssertionError("boundary target escaped its Alexander slice")
            return idx

        for kind in range(4):
            for ci in range(k):
                sel = np.flatnonzero(self.flip_ok[kind, ci][codes[:, ci]])
                if not len(sel):
                    continue
                tkeys = keys[sel] + self.flip_delta[kind] * self.powers[ci]
                e = ixx[sel].copy()
                if kind < 2:  # flip across the vertical oval at column ci
                    e += sx[sel, :ci].sum(axis=1, dtype=np.int64)
                else:  # across the horizontal oval carrying the point
                    e += sx[sel].sum(axis=1, dtype=np.int64)
                    flip_row = ri[sel, ci][:, None]
                    e += (sy[sel] & (ri[sel] < flip_row)).sum(axis=1, dtype=np.int64)
                src_parts.append(sel)
                dst_parts.append(lookup(tkeys))
                sign_parts.append(1 - 2 * (e & 1))

        for i in range(k):
            for j in range(i + 1, k):
                cand = (ys[:, i] < ys[:, j]) & self.rect_free[(i, j)][
                    codes[:, i], codes[:, j]
                ]
                for mid in range(i + 1, j):
                    cand &= ~((ys[:, i] < ys[:, mid]) & (ys[:, mid] < ys[:, j]))
                sel = np.flatnonzero(cand)
                if not len(sel):
                    continue
                b = ys[sel, i]
                d = ys[sel, j]
                e = np.zeros(len(sel), np.int64)
                below = np.zeros(len(sel), np.int64)
                for h in range(k):
                    yh = ys[sel, h]
                    hd = yh <= d
                    for l in range(h):
                        asc = ys[sel, l] < yh
                        e += asc & hd
                    if i < h <= j:
                        below += yh <= b
                ib = np.zeros(len(sel), np.int64)
                for h in range(k):
                    yh = ys[sel, h]
                    hbd = (b < yh) & (yh <= d)
                    for l in range(h):
                        ib += (ys[sel, l] < yh) & hbd
                e += (below & 1) * (ib + 1)
                ci_codes = codes[sel, i].astype(np.int64)
                cj_codes = codes[sel, j].astype(np.int64)
                nci = cj_codes - (cj_codes & 2) + (ci_codes & 2)
                ncj = ci_codes - (ci_codes & 2) + (cj_codes & 2)
                tkeys = (
                    keys[sel]
                    + (nci - ci_codes) * self.powers[i]
                    + (ncj - cj_codes) * self.powers[j]
                )
                src_parts.append(sel)
                dst_parts.append(lookup(tkeys))
                sign_parts.append(1 - 2 * (e & 1))

        if src_parts:
            src = np.concatenate(src_parts)
            dst = np.concatenate(dst_parts)
            coeff = np.concatenate(sign_parts)
        else:
            src = dst = coeff = np.zeros(0, np.int64)
        return keys, self._maslov(codes), src, dst, coeff

    def slice_complex(self, a2: int, ring: str = "Z") -> SparseComplex:
        """The slice as a `SparseComplex` keyed by packed integers."""
        keys, mas, src, dst, coeff = self.slice_edges(a2)
        cx = SparseComplex(ring)
        key_list = keys.tolist()
        for key, m in zip(key_list, mas.tolist()):
            cx.grading[key] = (a2, m)
            cx.rows[key] = {}
            cx.cols[key] = {}
        if ring == "Z2":
            coeff = np.abs(coeff)
        order = np.lexsort((dst, src))
        src_l = src[order].tolist()
        dst_l = dst[order].tolist()
        co_l = coeff[order].tolist()
        rows, cols = cx.rows, cx.cols
        for s, d, c in zip(src_l, dst_l, co_l):
            rows[key_list[s]][key_list[d]] = c
            cols[key_list[d]][key_list[s]] = c
        return cx

    def slice_euler(self, a2: int) -> int:
        """Signed generator count of the slice (no boundary needed)."""
        _, codes = self._enumerate()[a2]
        return int((1 - 2 * (self._maslov(codes) & 1)).sum())

    # -- faithful-reduction support

    def event_pairs(
        self, a2: int, events: list
    ) -> list[tuple[list[int], list[int]]]:
        """Per event, the (source, target) key pairs to cancel in this slice.

        A generator dies at the first event that kills one of its points;
        at that event it contains exactly one of the dying points, and its
        partner is the same generator with that point replaced by the other
        one.  Pairs are grouped by event in schedule order.
        """
        keys, codes = self._enumerate()[a2]
        death = np.full((self.k, self.ncodes), len(events), np.int32)
        pair_info = []
        for t, ev in enumerate(events):
            (x1, y1), (x2, y2) = ev.p1, ev.p2
            ci = self.col_index[x1 // SCALE]
            if self.col_index[x2 // SCALE] != ci:
                raise AssertionError("event pair spans two vertical ovals")
            code1 = 4 * self.row_index[y1 // SCALE] + 2 * (x1 % SCALE == 7) + (y1 % SCALE == 6)
            code2 = 4 * self.row_index[y2 // SCALE] + 2 * (x2 % SCALE == 7) + (y2 % SCALE == 6)
            if self.w2[ci, code1] != self.w2[ci, code2]:
                raise AssertionError("event pair changes the Alexander grading")
            for code in (code1, code2):
                if death[ci, code] != len(events):
                    raise AssertionError("a point dies twice in the schedule")
                death[ci, code] = t
            pair_info.append((ci, code1, code2))

        gen_death = np.full(len(keys), len(events), np.int32)
        for ci in range(self.k):
            np.minimum(gen_death, death[ci][codes[:, ci]], out=gen_death)
        out = []
        for t, (ci, code1, code2) in enumerate(pair_info):
            sel = np.flatnonzero((gen_death == t) & (codes[:, ci] == code1))
            src = keys[sel]
            dst = src + (code2 - code1) * self.powers[ci]
            out.append((src.tolist(), dst.tolist()))
        return out
