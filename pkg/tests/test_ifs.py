import math
from fractions import Fraction

import pytest

from minkpack import (
    CylinderWord,
    DiagonalMap,
    IntervalMap,
    SpongeSystem,
    ValidationError,
    check_osc_intervals,
    children,
    pillar,
    project_ifs,
    validate_coordinate_ordering,
    validate_neat_projection,
)
from conftest import interval


class TestIntervalMap:
    def test_image_and_apply(self):
        m = IntervalMap(Fraction(1, 3), Fraction(2, 3))
        assert m.image == (Fraction(2, 3), Fraction(1, 1))
        assert m(0) == Fraction(2, 3)
        assert m(1) == 1

    def test_orientation_reversing(self):
        m = IntervalMap(Fraction(1, 2), Fraction(0), orientation=-1)
        assert m(0) == Fraction(1, 2)
        assert m(1) == 0
        assert m.image == (0, Fraction(1, 2))

    def test_compose_matches_pointwise(self):
        f = IntervalMap(Fraction(1, 2), Fraction(1, 2), orientation=-1)
        g = IntervalMap(Fraction(1, 3), Fraction(1, 3))
        h = f.compose(g)
        for x in (Fraction(0), Fraction(1, 2), Fraction(1)):
            assert h(x) == f(g(x))

    @pytest.mark.parametrize(
        "ratio,offset",
        [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)), (Fraction(1, 2), Fraction(3, 4))],
    )
    def test_rejects_bad_parameters(self, ratio, offset):
        with pytest.raises(ValidationError):
            IntervalMap(ratio, offset)

    def test_rejects_bad_orientation(self):
        with pytest.raises(ValidationError):
            IntervalMap(Fraction(1, 2), Fraction(0), orientation=0)


class TestCoordinateOrdering:
    def test_strictly_decreasing_holds(self):
        d = DiagonalMap(0, (interval(1, 2), interval(1, 3)))
        sponge = SpongeSystem(dimension=2, digits=(d,))
        assert validate_coordinate_ordering(sponge)

    def test_equal_ratios_fail(self):
        d = DiagonalMap(0, (interval(1, 3), interval(1, 3)))
        sponge = SpongeSystem(dimension=2, digits=(d,))
        assert not validate_coordinate_ordering(sponge)

    def test_mcmullen_instance(self, mcmullen):
        assert validate_coordinate_ordering(mcmullen)


class TestProjectIfs:
    def test_mcmullen_first_level_collapses(self, mcmullen):
        assert len(project_ifs(mcmullen, 1)) == 2

    def test_full_prefix_counts_distinct_digits(self, mcmullen):
        assert len(project_ifs(mcmullen, 2)) == 3

    def test_single_digit(self):
        sponge = SpongeSystem(
            dimension=2, digits=(DiagonalMap(0, (interval(1, 2), interval(1, 3))),)
        )
        for j in (1, 2):
            assert len(project_ifs(sponge, j)) == 1

    def test_out_of_range(self, mcmullen):
        with pytest.raises(ValidationError):
            project_ifs(mcmullen, 3)

    def test_cardinality_bound(self, fullgrid):
        assert len(project_ifs(fullgrid, 2)) == len(fullgrid.digits)
        assert len(project_ifs(fullgrid, 1)) <= len(fullgrid.digits)


class TestNeatProjection:
    def test_mcmullen_holds(self, mcmullen):
        assert validate_neat_projection(mcmullen)

    def test_identical_maps_distinct_digits_fail(self):
        comps = (interval(1, 2), interval(1, 3))
        sponge = SpongeSystem(
            dimension=2, digits=(DiagonalMap("a", comps), DiagonalMap("b", comps))
        )
        assert not validate_neat_projection(sponge)

    def test_single_digit_holds(self):
        sponge = SpongeSystem(
            dimension=2, digits=(DiagonalMap(0, (interval(1, 2), interval(1, 3))),)
        )
        assert validate_neat_projection(sponge)

    def test_overlapping_columns_fail(self):
        digits = (
            DiagonalMap(0, (interval(1, 2, 0, 1), interval(1, 3))),
            DiagonalMap(1, (interval(1, 2, 1, 4), interval(1, 3, 2, 3))),
        )
        sponge = SpongeSystem(dimension=2, digits=digits)
        assert not validate_neat_projection(sponge)


class TestPillar:
    def test_empty_word_is_unit_cube(self, mcmullen):
        p = pillar(mcmullen, CylinderWord())
        assert p.box == ((0, 1), (0, 1))
        assert p.shortest_side == 1

    def test_rank_two_sides(self, mcmullen):
        p = pillar(mcmullen, [0, 1])
        assert p.side_lengths() == (Fraction(1, 4), Fraction(1, 9))
        assert p.shortest_side == Fraction(1, 9)

    def test_shortest_side_is_last_coordinate_under_ordering(self, mcmullen):
        for word in ([0], [1, 2], [2, 0, 1]):
            p = pillar(mcmullen, word)
            assert p.shortest_side == p.side_lengths()[-1]

    def test_uniform_ratio_shortest_side(self, cantor):
        p = pillar(cantor, [0, 1, 0, 1])
        assert p.shortest_side == Fraction(1, 81)

    def test_sides_match_ratio_products_with_floats(self):
        digits = (
            DiagonalMap(0, (IntervalMap(0.52, 0.0), IntervalMap(0.21, 0.3))),
            DiagonalMap(1, (IntervalMap(0.44, 0.55), IntervalMap(0.3, 0.65))),
        )
        sponge = SpongeSystem(dimension=2, digits=digits)
        word = [0, 1, 1, 0, 1]
        p = pillar(sponge, word)
        for i, side in enumerate(p.side_lengths()):
            expected = 1.0
            for letter in word:
                expected *= float(digits[letter].components[i].ratio)
            assert abs(side - expected) <= 2.0**-40 * expected

    def test_invalid_letter(self, cantor):
        with pytest.raises(ValidationError):
            pillar(cantor, [0, 7])


class TestChildren:
    def test_counts(self, mcmullen):
        root = CylinderWord()
        level1 = children(mcmullen, root)
        assert len(level1) == 3
        level2 = [w for c in level1 for w in children(mcmullen, c)]
        assert len(level2) == 9
        assert all(w.rank == 2 for w in level2)

    def test_child_box_nested_in_parent(self, mcmullen):
        parent = CylinderWord((1,))
        pbox = pillar(mcmullen, parent).box
        for child in children(mcmullen, parent):
            cbox = pillar(mcmullen, child).box
            for (clo, chi), (plo, phi) in zip(cbox, pbox):
                assert plo <= clo and chi <= phi


class TestOscIntervals:
    def test_cantor_maps_pass(self):
        maps = [interval(1, 3), interval(1, 3, 2, 3)]
        assert check_osc_intervals(maps)

    def test_irrational_overlap_fails(self):
        lam = math.sqrt(2) / 2
        maps = [
            IntervalMap(1 / 3, 0.0),
            IntervalMap(1 / 3, 1 / 3),
            IntervalMap(1 / 3, lam / 3),
        ]
        assert not check_osc_intervals(maps)

    def test_single_map_passes(self):
        assert check_osc_intervals([interval(1, 3)])

    def test_touching_intervals_pass_exactly(self):
        maps = [interval(1, 2, 0, 1), interval(1, 2, 1, 2)]
        assert check_osc_intervals(maps)


class TestSystemValidation:
    def test_duplicate_ids_rejected(self):
        d = DiagonalMap(0, (interval(1, 2), interval(1, 3)))
        with pytest.raises(ValidationError):
            SpongeSystem(dimension=2, digits=(d, d))

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            SpongeSystem(dimension=2, digits=(DiagonalMap(0, (interval(1, 2),)),))

    def test_r_star_and_r_upper(self, mcmullen):
        assert mcmullen.r_star == pytest.approx(1 / 3)
        assert mcmullen.r_upper == pytest.approx(1 / 2)
        assert mcmullen.r_star <= mcmullen.r_upper
