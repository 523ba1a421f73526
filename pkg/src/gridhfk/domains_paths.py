"""Domain existence tests and path-counted short differentials.

Two independent ways to probe a differential entry without building the
whole complex:

* `find_domain` solves — exactly, over the rationals — for the 2-chain in
  the oval arrangement whose corner behaviour matches a hypothetical
  contribution from one generator to another.  The solution is unique when
  it exists; a missing, negative, or fractional solution certifies that
  the differential entry is zero.  This is a one-sided test: a domain may
  exist while the signed count of contributions still cancels.

* `PathEngine` computes rows of the reduced (short-configuration)
  differential by expanding the pair-cancellation recursion lazily: each
  cancelled generator's reduced row is pulled on demand — following the
  retraction schedule's ordering — and cached, so only generators actually
  reachable from the queried row are ever visited.

Everything is exact integer/rational arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from heapq import heappop, heappush

from .chains import Gen, LongMoves, SparseComplex, oval_generators
from .errors import ScheduleAssertionFailed
from .gridkit import GridDiagram, Point
from .ovalgeo import Arrangement, retraction_schedule, select_best_config

Domain = dict[int, int]


class DomainSolver:
    """The corner-index linear system of one arrangement, solved once.

    Unknowns are the multiplicities of the pieces, with punctured pieces
    and the unbounded piece pinned to zero.  Row reduction of the corner
    constraint matrix is done a single time with the applied row operations
    recorded; each query then costs one sparse matrix-vector product.  The
    pinned system has a trivial kernel (each oval's interior is excluded by
    its two punctures, and the constant chain by the unbounded piece), so
    solutions are unique — asserted at construction.
    """

    def __init__(self, arr: Arrangement):
        self.arr = arr
        crossings = sorted(arr.config.all_points())
        self.row_of = {p: i for i, p in enumerate(crossings)}
        pinned = set(arr.puncture_pieces().values())
        pinned.add(arr.unbounded_piece())
        self.free = [k for k in range(arr.piece_count) if k not in pinned]
        col_of = {k: j for j, k in enumerate(self.free)}
        nrows = len(crossings)
        ncols = len(self.free)

        matrix = [[Fraction(0)] * ncols for _ in range(nrows)]
        for i, p in enumerate(crossings):
            ne, nw, sw, se = arr.corner_pieces(p)
            for piece, s in ((ne, 1), (sw, 1), (nw, -1), (se, -1)):
                j = col_of.get(piece)
                if j is not None:
                    matrix[i][j] += s
        # reduce [matrix | identity]; the identity columns record the row
        # operations, giving the transform applied to any right-hand side
        ops = [
            [Fraction(int(i == r)) for r in range(nrows)] for i in range(nrows)
        ]
        pivots: list[int] = []
        r = 0
        for c in range(ncols):
            pivot = next((i for i in range(r, nrows) if matrix[i][c]), None)
            if pivot is None:
                continue
            matrix[r], matrix[pivot] = matrix[pivot], matrix[r]
            ops[r], ops[pivot] = ops[pivot], ops[r]
            inv = 1 / matrix[r][c]
            matrix[r] = [v * inv for v in matrix[r]]
            ops[r] = [v * inv for v in ops[r]]
            for i in range(nrows):
                if i != r and matrix[i][c]:
                    f = matrix[i][c]
                    matrix[i] = [a - f * b for a, b in zip(matrix[i], matrix[r])]
                    ops[i] = [a - f * b for a, b in zip(ops[i], ops[r])]
            pivots.append(c)
            r += 1
        if len(pivots) != ncols:
            raise AssertionError(
                "domain system has a kernel: corner constraints do not pin "
                "the multiplicities"
            )
        self.rank = ncols
        self.pivots = pivots
        self.ops = ops
        self.nrows = nrows

    def solve(self, targets: dict[Point, int]) -> Domain | None:
        """The unique domain with the given corner indices, if one exists.

        ``targets`` assigns the required corner index to each crossing
        (omitted crossings require zero).  Returns None when the system is
        inconsistent or the solution fails nonnegativity or integrality.
        """
        cols = [(self.row_of[p], s) for p, s in targets.items() if s]
        transformed = [
            sum(s * row[j] for j, s in cols) for row in self.ops
        ]
        for i in range(self.rank, self.nrows):
            if transformed[i]:
                return None
        domain: Domain = {}
        for i in range(self.rank):
            val = transformed[i]
            if val < 0 or val.denominator != 1:
                return None
            if val:
                domain[self.free[self.pivots[i]]] = int(val)
        return domain


def find_domain(arr: Arrangement, x: Gen, y: Gen) -> Domain | None:
    """The unique domain joining two generators of one configuration.

    Corner index must be +1 at points of x∖y, −1 at points of y∖x, and 0
    at every other crossing; pieces containing punctures (and the
    unbounded piece) have multiplicity zero.  Returns the multiplicity map
    (zero entries omitted), or None when no nonnegative integral solution
    exists.  The zero chain is not a domain, so ``x == y`` yields None.
    """
    if set(x) == set(y):
        return None
    solver = getattr(arr, "_domain_solver", None)
    if solver is None:
        solver = DomainSolver(arr)
        arr._domain_solver = solver
    targets: dict[Point, int] = {}
    for p in set(x) - set(y):
        targets[p] = 1
    for p in set(y) - set(x):
        targets[p] = -1
    return solver.solve(targets)


class PathEngine:
    """Rows of the short differential by lazy cancellation paths.

    The retraction schedule orders the cancelled pairs (by event, then by
    the source generator); eliminating them all transforms the long
    differential into the short one.  A queried row folds in the reduced
    rows of cancelled generators only as their targets actually appear,
    depth-first with caching, so the complex is never materialized.  The
    result is exactly the faithful reduction's output: eliminating an
    invertible block yields the same complement in any order.
    """

    def __init__(
        self,
        g: GridDiagram,
        omit: tuple[int, int] | None = None,
        prefilter: bool = True,
    ):
        if omit is None:
            omit = select_best_config(g).omit
        self.grid = g
        self.omit = omit
        long_cfg, short_cfg, events = retraction_schedule(g, omit)
        self.short_cfg = short_cfg
        self.moves = LongMoves(long_cfg)
        self.event_count = len(events)
        #: dying point -> (event index, replacement point)
        self._flip: dict[Point, tuple[int, Point]] = {}
        for t, ev in enumerate(events):
            self._flip[ev.p1] = (t, ev.p2)
            self._flip[ev.p2] = (t, ev.p1)
        self._sources: dict[Point, bool] = {ev.p1: True for ev in events}
        self.prefilter = prefilter
        self._arr = Arrangement(short_cfg) if prefilter else None
        #: reduced row of each cancelled source at its elimination step
        self._rows: dict[Gen, dict[Gen, int]] = {}

    # -- schedule bookkeeping

    def _death(self, v: Gen):
        """(event, source) elimination key of ``v``; None for survivors.

        A generator dies at the first event killing one of its points; the
        pair's source is the generator holding the Maslov-raising point.
        """
        best = None
        for p in v:
            hit = self._flip.get(p)
            if hit is not None and (best is None or hit[0] < best[1][0]):
                best = (p, hit)
        if best is None:
            return None
        p, (t, q) = best
        if self._sources.get(p, False):
            return (t, v)
        source = tuple(sorted(q if point == p else point for point in v))
        return (t, source)

    # -- the cancellation recursion

    def _reduced_row(self, u: Gen, limit) -> dict[Gen, int]:
        """Row of ``u`` after eliminating every pair ordered before ``limit``.

        Entries to targets of earlier pairs fold in the source's reduced
        row (scaled through the unit pivot); entries to earlier sources
        simply disappear with their generator.  Newly created entries always
        die no earlier than the pair that created them, so a single heap
        pass suffices.
        """
        work = dict(self.moves.row(u))
        heap: list[tuple] = []
        for v in work:
            key = self._death(v)
            if key is not None and key < limit:
                heappush(heap, (key, v))
        while heap:
            (t, source), v = heappop(heap)
            coeff = work.pop(v, 0)
            if not coeff:
                continue
            if v == source:
                continue  # a dying source's column vanishes outright
            srow = self._source_row(source, (t, source))
            pivot = srow.get(v, 0)
            if pivot not in (1, -1):
                raise ScheduleAssertionFailed(
                    f"event {t}: path pivot {pivot} is not a unit"
                )
            factor = -coeff * pivot
            for w, cw in srow.items():
                if w == v:
                    continue
                old = work.get(w, 0)
                new = old + factor * cw
                if new:
                    if not old:
                        key = self._death(w)
                        if key is not None and key < limit:
                            heappush(heap, (key, w))
                    work[w] = new
                else:
                    work.pop(w, None)
        return {w: c for w, c in work.items() if c}

    def _source_row(self, source: Gen, key) -> dict[Gen, int]:
        row = self._rows.get(source)
        if row is None:
            row = self._reduced_row(source, key)
            self._rows[source] = row
        return row

    # -- public API

    def short_row(self, x: Gen) -> dict[Gen, int]:
        """The row of the short differential at a short-config generator."""
        row = self._reduced_row(x, (self.event_count,))
        for y in row:
            if self._death(y) is not None:
                raise AssertionError("short row reaches a cancelled generator")
        if self.prefilter:
            for y, c in row.items():
                if find_domain(self._arr, x, y) is None:
                    raise AssertionError(
                        f"nonzero entry {c} from {x} to {y} has no domain"
                    )
        return row

    def short_entry(self, x: Gen, y: Gen) -> int:
        """One entry, gated by the domain prefilter."""
        if self.prefilter and find_domain(self._arr, x, y) is None:
            return 0
        return self._reduced_row(x, (self.event_count,)).get(y, 0)

    def short_complex(self, ring: str = "Z", keep_a2=None) -> SparseComplex:
        """The short complex with its differential counted along paths."""
        cx = SparseComplex(ring)
        gens = oval_generators(self.short_cfg, keep_a2)
        for x, a2 in gens:
            cx.add_generator(x, a2, self.moves.gradings(x)[1])
        for x, _ in gens:
            for y, coeff in self.short_row(x).items():
                cx.add_entry(x, y, coeff)
        return cx
