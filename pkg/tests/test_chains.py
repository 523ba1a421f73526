"""Generators, gradings, and signed boundary maps of the two complexes."""

from __future__ import annotations

from collections import Counter
from math import factorial

import pytest

from conftest import BRAIDS, random_grid
from gridhfk.chains import (
    SparseComplex,
    _spin_section,
    alexander2_dominance,
    alexander2_winding,
    long_complex,
    maslov,
    mos_complex,
    mos_generators,
    oval_generators,
    winding_constant2,
)
from gridhfk.errors import BoundarySquareNonzero, NonUnitPivot
from gridhfk.gridkit import GridDiagram, LaurentPoly, alexander_polynomial, parse_braid
from gridhfk.ovalgeo import (
    build_config,
    generator_count,
    omission_candidates,
    select_best_config,
)

UNKNOT2 = GridDiagram((1, 0), (0, 1))
# Grids that historically exposed sign errors; pinned as regressions.
REGRESSION_CELL = GridDiagram((3, 1, 0, 2), (0, 3, 2, 1))
REGRESSION_OVAL = (GridDiagram((1, 3, 0, 2), (2, 1, 3, 0)), (0, 2))


def euler_by_a2(cx: SparseComplex) -> dict[int, int]:
    out: Counter[int] = Counter()
    for a2, m in cx.grading.values():
        out[a2] += 1 if m % 2 == 0 else -1
    return {k: v for k, v in out.items() if v}


def euler_poly(cx: SparseComplex) -> LaurentPoly:
    terms: dict[int, int] = {}
    for a2, v in euler_by_a2(cx).items():
        assert a2 % 2 == 0, "doubled Alexander grading of a knot must be even"
        terms[a2 // 2] = v
    return LaurentPoly(terms)


class TestGradings:
    def test_micro_cell_complex(self):
        cx = mos_complex(UNKNOT2, "Z")
        assert sorted(cx.grading.values()) == [(-2, -1), (0, 0)]
        assert cx.entry_count == 0

    def test_micro_oval_complex(self):
        cx = long_complex(UNKNOT2, (1, 1), "Z")
        by_point = {x[0]: v for x, v in cx.grading.items()}
        assert by_point == {
            (3, 4): (0, -1),
            (3, 6): (0, 0),
            (7, 4): (0, 0),
            (7, 6): (-2, -1),
        }
        entries = {(x[0], y[0]): c for x, row in cx.rows.items() for y, c in row.items()}
        assert entries == {((3, 6), (3, 4)): 1, ((7, 4), (3, 4)): 1}

    def test_dominance_equals_winding_on_cell_generators(self, rng):
        grids = [parse_braid(BRAIDS["trefoil"])]
        grids += [random_grid(n, rng) for n in (3, 4, 5)]
        for g in grids:
            x_p, o_p = g.x_punctures(), g.o_punctures()
            for x in mos_generators(g):
                assert alexander2_dominance(x, x_p, o_p, g.n) == alexander2_winding(g, x)

    def test_winding_constant_is_even(self, rng):
        for n in (3, 4, 5, 6):
            assert winding_constant2(random_grid(n, rng)) % 2 == 0

    def test_grading_discipline(self):
        g = parse_braid(BRAIDS["trefoil"])
        assert mos_complex(g, "Z").grading_violation() is None
        assert long_complex(g, omission_candidates(g)[0], "Z").grading_violation() is None


class TestSparseComplex:
    @staticmethod
    def build(ring, entries):
        cx = SparseComplex(ring)
        gens = sorted({g for e in entries for g in e[:2]})
        for i, g in enumerate(gens):
            cx.add_generator(g, 0, -i)
        for x, y, c in entries:
            cx.add_entry(x, y, c)
        return cx

    def test_rejects_unknown_ring(self):
        with pytest.raises(ValueError):
            SparseComplex("Q")

    def test_entries_accumulate_and_cancel(self):
        cx = self.build("Z", [("a", "b", 1), ("a", "b", -1)])
        assert cx.entry("a", "b") == 0 and cx.entry_count == 0
        assert cx.cols["b"] == {}

    def test_mod_two_ring(self):
        cx = self.build("Z2", [("a", "b", 1), ("a", "b", 1), ("a", "c", 3)])
        assert cx.entry("a", "b") == 0
        assert cx.entry("a", "c") == 1

    def test_cancel_pair_transfers_through_inverse(self):
        cx = self.build("Z", [("x", "y", -1), ("u", "y", 1), ("x", "v", 1)])
        cx.cancel_pair("x", "y")
        # u -> v gains -coeff(u,y) * coeff(x,y)^{-1} * coeff(x,v) = +1
        assert cx.generators() == ["u", "v"]
        assert cx.entry("u", "v") == 1
        assert cx.cols["v"] == {"u": 1}

    def test_cancel_pair_rejects_non_unit(self):
        cx = self.build("Z", [("x", "y", 1), ("x", "y", 1)])
        with pytest.raises(NonUnitPivot):
            cx.cancel_pair("x", "y")

    def test_square_violation_detected(self):
        cx = self.build("Z", [("a", "b", 1), ("b", "c", 1)])
        assert cx.d_squared_violation() == ("a", "c", 1)
        with pytest.raises(BoundarySquareNonzero):
            cx.check_d_squared()


class TestCellComplex:
    @pytest.mark.parametrize("n", [3, 4])
    def test_generator_count(self, rng, n):
        assert len(mos_generators(random_grid(n, rng))) == factorial(n)

    def test_square_zero_over_both_rings(self, rng):
        grids = [REGRESSION_CELL]
        grids += [random_grid(n, rng) for n in (3, 3, 4, 4, 5, 5, 6)]
        for g in grids:
            cz = mos_complex(g, "Z")
            cz.check_d_squared()
            cz.assert_entries_unit()
            c2 = mos_complex(g, "Z2")
            c2.check_d_squared()
            # forgetting signs mod 2 gives exactly the unsigned count
            assert all(set(cz.rows[x]) == set(c2.rows[x]) for x in cz.rows)
            assert cz.grading_violation() is None

    def test_euler_characteristic_is_alexander(self, rng):
        ring_drop = LaurentPoly({0: 1, -1: -1})
        grids = [parse_braid(BRAIDS["trefoil"]), parse_braid(BRAIDS["figure8"])]
        grids += [random_grid(n, rng) for n in (4, 5)]
        for g in grids:
            expected = alexander_polynomial(g) * ring_drop ** (g.n - 1)
            assert euler_poly(mos_complex(g, "Z2")) == expected


class TestSpinCover:
    @staticmethod
    def _swap(perm, i, j):
        out = list(perm)
        out[i], out[j] = out[j], out[i]
        return tuple(out)

    def test_disjoint_squares_anticommute(self, rng):
        for n in (4, 5):
            sec = _spin_section(n)
            for _ in range(40):
                perm = tuple(rng.sample(range(n), n))
                i, j, k, l = rng.sample(range(n), 4)
                i, j = min(i, j), max(i, j)
                k, l = min(k, l), max(k, l)
                one = sec.edge_sign(perm, i, j) * sec.edge_sign(self._swap(perm, i, j), k, l)
                two = sec.edge_sign(perm, k, l) * sec.edge_sign(self._swap(perm, k, l), i, j)
                assert one == -two

    def test_three_cycle_decompositions(self, rng):
        # A 3-cycle factors into two transpositions in exactly three ways;
        # their edge-sign products must pattern as {s, -s, -s} so that the
        # two factorizations realized by rectangle geometry can cancel.
        for n in (4, 5):
            sec = _spin_section(n)
            for _ in range(25):
                perm = tuple(rng.sample(range(n), n))
                i, j, k = sorted(rng.sample(range(n), 3))
                cycled = list(perm)
                cycled[i], cycled[j], cycled[k] = perm[j], perm[k], perm[i]
                target = tuple(cycled)
                products = []
                for a, b in ((i, j), (i, k), (j, k)):
                    mid = self._swap(perm, a, b)
                    for c, d in ((i, j), (i, k), (j, k)):
                        if self._swap(mid, c, d) == target:
                            products.append(
                                sec.edge_sign(perm, a, b) * sec.edge_sign(mid, c, d)
                            )
                assert len(products) == 3
                assert abs(sum(products)) == 1


class TestOvalComplex:
    def test_full_size_generator_count(self):
        g = parse_braid(BRAIDS["trefoil"])
        cx = mos_complex(g, "Z2")
        assert cx.generator_count == factorial(g.n)
        config = build_config(g, omission_candidates(g)[0], "long")
        gens = oval_generators(config)
        assert len(gens) == 4 ** (g.n - 1) * factorial(g.n - 1) == 6144
        assert len(gens) == generator_count(config)

    @pytest.mark.parametrize("name,count", [("trefoil", 48), ("figure8", 160)])
    def test_best_short_config_counts(self, name, count):
        config = select_best_config(parse_braid(BRAIDS[name]))
        gens = oval_generators(config)
        assert len(gens) == count == generator_count(config)

    def test_alexander_pruning_matches_filtered_enumeration(self):
        g = parse_braid(BRAIDS["trefoil"])
        for style in ("long", "short"):
            config = build_config(g, omission_candidates(g)[0], style)
            full = oval_generators(config)
            values = sorted({a2 for _, a2 in full})
            keep = set(values[::2])
            pruned = oval_generators(config, keep_a2=keep)
            assert sorted(pruned) == sorted((x, a) for x, a in full if a in keep)

    def test_square_zero_over_both_rings(self, rng):
        cases = [REGRESSION_OVAL]
        for n in (3, 3, 4, 4, 5):
            g = random_grid(n, rng)
            cases.append((g, rng.choice(omission_candidates(g))))
        for g, omit in cases:
            lz = long_complex(g, omit, "Z")
            lz.check_d_squared()
            lz.assert_entries_unit()
            l2 = long_complex(g, omit, "Z2")
            l2.check_d_squared()
            assert all(set(lz.rows[x]) == set(l2.rows[x]) for x in lz.rows)
            assert lz.grading_violation() is None

    def test_euler_characteristic_matches_cell_complex(self, rng):
        grids = [parse_braid(BRAIDS["trefoil"]), random_grid(4, rng), random_grid(5, rng)]
        for g in grids:
            cell = euler_by_a2(mos_complex(g, "Z2"))
            oval = euler_by_a2(long_complex(g, omission_candidates(g)[0], "Z2"))
            assert cell == oval

    def test_restriction_is_a_subcomplex(self):
        g = parse_braid(BRAIDS["trefoil"])
        omit = omission_candidates(g)[0]
        full = long_complex(g, omit, "Z")
        keep = {0, 2}
        sub = long_complex(g, omit, "Z", keep_a2=keep)
        assert set(sub.grading) == {x for x, (a2, _) in full.grading.items() if a2 in keep}
        for x in sub.rows:
            assert sub.rows[x] == full.rows[x]
