import itertools
import math
import unittest
from fractions import Fraction

import pytest

import canalyzing_fq
from canalyzing_fq import canalyzing, counting, function
from canalyzing_fq.canalyzing import FamilySpec
from canalyzing_fq.field import make_field


FULL = FamilySpec()
SMALL_GRID = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 1), (5, 1)]


class TestCountFormula(unittest.TestCase):
    def test_boolean_sequence(self):
        counts = [counting.count_formula(FULL, 2, n).formula for n in range(1, 5)]
        self.assertEqual(counts, [4, 14, 120, 3514])

    def test_small_families(self):
        examples = [
            ("i=1,a=0,b=0", 2, 1, 2),
            ("i=1,a=*,b=0", 2, 2, 7),
            ("i=*,a=0,b=0", 2, 2, 6),
            ("i=*,a=*,b=0", 2, 2, 9),
            ("i=1,a=*,b=*", 2, 2, 12),
            ("i=*,a=0,b=*", 2, 2, 12),
            ("i=1,a=0,b=*", 2, 2, 8),
        ]
        for text, q, n, expected in examples:
            with self.subTest(family=text):
                spec = FamilySpec.parse(text)
                self.assertEqual(counting.count_formula(spec, q, n).formula, expected)

    def test_theorem_names(self):
        names = {counting.count_formula(s, 2, 2).theorem for s in FamilySpec.shapes()}
        self.assertEqual(len(names), 8)
        labels = {
            "i=1,a=0,b=0": "Lemma 3.2",
            "i=1,a=*,b=0": "Thm 1",
            "i=1,a=0,b=*": "Cor. 1",
            "i=*,a=0,b=0": "Thm 2",
            "i=*,a=0,b=*": "Cor. 2",
            "i=*,a=*,b=0": "Thm 3",
            "i=1,a=*,b=*": "Thm 4",
            "i=*,a=*,b=*": "Thm 5",
        }
        for text, label in labels.items():
            with self.subTest(family=text):
                report = counting.count_formula(FamilySpec.parse(text), 2, 2)
                self.assertEqual(report.theorem, label)

    def test_errors(self):
        with self.assertRaises(canalyzing_fq.NotPrimePowerError):
            counting.count_formula(FULL, 6, 2)
        with self.assertRaises(ValueError):
            counting.count_formula(FULL, 2, 0)
        with self.assertRaises(canalyzing_fq.SizeLimitExceededError):
            counting.count_formula(FULL, 2, 30)
        with self.assertRaises(canalyzing_fq.DimensionMismatchError):
            counting.count_formula(FamilySpec(3, None, None), 2, 2)

    def test_large_formula_is_exact(self):
        count = counting.count_formula(FamilySpec(1, 0, 0), 7, 3).formula
        self.assertEqual(count, 7 ** (343 - 49))


class TestCountReport(unittest.TestCase):
    def test_agrees(self):
        report = counting.count_report(FULL, 2, 2, brute=True)
        self.assertEqual(report.brute, 14)
        self.assertTrue(report.agrees)
        self.assertTrue(counting.count_formula(FULL, 2, 2).agrees)
        self.assertFalse(report._replace(brute=13).agrees)

    def test_brute_force_only(self):
        report = counting.count_report(FULL, 2, 2, brute=True, formula=False)
        self.assertIsNone(report.formula)
        self.assertIsNone(report.theorem)
        self.assertEqual(report.brute, 14)
        self.assertTrue(report.agrees)
        self.assertIsNone(report.to_json()["formula"])
        with self.assertRaises(ValueError):
            counting.count_report(FULL, 2, 2, formula=False)

    def test_json_has_no_floats(self):
        record = counting.count_report(FULL, 2, 3, brute=True).to_json()
        self.assertEqual(record["formula"], "120")
        self.assertEqual(record["brute"], "120")
        self.assertEqual(record["family"], "i=*,a=*,b=*")
        self.assertEqual(record["name"], "C^*_{*,*}")
        self.assertFalse(any(isinstance(v, float) for v in record.values()))
        self.assertIsNone(counting.count_formula(FULL, 2, 3).to_json()["brute"])


class TestCountBrute(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(counting.count_brute(FULL, 2, 2), 14)
        self.assertEqual(counting.count_brute(FamilySpec(1, 0, 0), 3, 1), 9)
        self.assertEqual(counting.count_brute(FULL, 2, 3), 120)

    def test_chunking_does_not_matter(self):
        for chunk_size in (1, 7, 100):
            count = counting.count_brute(FULL, 2, 2, chunk_size=chunk_size)
            self.assertEqual(count, 14)

    def test_enumeration_limit(self):
        with self.assertRaises(canalyzing_fq.SizeLimitExceededError):
            counting.count_brute(FULL, 2, 6)

    def test_bad_workers(self):
        with self.assertRaises(ValueError):
            counting.count_brute(FULL, 2, 2, workers=0)


@pytest.mark.parametrize("workers", [1, 2, 8])
def test_worker_count_does_not_change_result(workers):
    for spec in FamilySpec.shapes():
        expected = counting.count_brute(spec, 2, 3)
        count = counting.count_brute(spec, 2, 3, workers=workers, chunk_size=32)
        assert count == expected


@pytest.mark.parametrize("q, n", SMALL_GRID)
def test_formulas_match_brute_force(q, n):
    for report in counting.verify_families(q, n):
        assert report.agrees, report


@pytest.mark.slow
def test_formulas_match_brute_force_boolean_n4():
    reports = counting.verify_families(2, 4, workers=2)
    assert all(report.agrees for report in reports)
    assert {r.formula for r in reports if r.spec == FULL} == {3514}


@pytest.mark.parametrize("q, n", SMALL_GRID)
def test_fixed_values_do_not_change_counts(q, n):
    for shape in FamilySpec.shapes():
        expected = counting.count_formula(shape, q, n).formula
        for spec in shape.instances(q, n):
            assert counting.count_brute(spec, q, n) == expected


@pytest.mark.parametrize("q, n", [(2, 2), (3, 1)])
def test_vectorised_count_matches_member(q, n):
    tables = list(function.iterate_tables(make_field(q), n))
    for spec in FamilySpec.shapes():
        expected = sum(canalyzing.member(t, spec) for t in tables)
        assert counting.count_brute(spec, q, n) == expected


@pytest.mark.parametrize("q, n", [(2, 2), (3, 2), (4, 2)])
def test_families_nest(q, n):
    chain = [FamilySpec(1, 0, 0), FamilySpec(1, 0, None), FamilySpec(1), FULL]
    counts = [counting.count_formula(spec, q, n).formula for spec in chain]
    assert counts == sorted(counts)
    other_chain = [
        FamilySpec(1, 0, 0),
        FamilySpec(None, 0, 0),
        FamilySpec(None, 0),
        FULL,
    ]
    other = [counting.count_formula(spec, q, n).formula for spec in other_chain]
    assert other == sorted(other)


def test_membership_nests():
    for t in function.iterate_tables(make_field(2), 2):
        if canalyzing.member(t, FamilySpec(1, 0, 0)):
            assert canalyzing.member(t, FamilySpec(1, 0, None))
        if canalyzing.member(t, FamilySpec(1, 0, None)):
            assert canalyzing.member(t, FamilySpec(1, None, None))
        if canalyzing.member(t, FamilySpec(1, None, None)):
            assert canalyzing.member(t, FULL)


class TestIntersections(unittest.TestCase):
    def test_inputs(self):
        self.assertEqual(counting.count_intersection_inputs(3, 1, 2), 3)
        self.assertEqual(counting.count_intersection_inputs(2, 2, 2), 1)
        self.assertEqual(counting.count_intersection_inputs(2, 2, 1), 4)
        with self.assertRaises(ValueError):
            counting.count_intersection_inputs(2, 2, 3)

    def test_vars(self):
        self.assertEqual(counting.count_intersection_vars(2, 2, 2), 2)
        self.assertEqual(counting.count_intersection_vars(2, 2, 1), 4)
        self.assertEqual(counting.count_intersection_vars(3, 2, 2), 81)
        with self.assertRaises(ValueError):
            counting.count_intersection_vars(2, 2, 0)

    def test_grid(self):
        self.assertEqual(counting.count_intersection_grid(2, 2, (1, 1)), 2)
        # both rows of x_1 forced to b leave only the constant
        self.assertEqual(counting.count_intersection_grid(2, 2, (2, 0)), 1)
        self.assertEqual(counting.count_intersection_grid(3, 2, (0, 0)), 3**9)
        with self.assertRaises(canalyzing_fq.DimensionMismatchError):
            counting.count_intersection_grid(2, 2, (1,))
        with self.assertRaises(ValueError):
            counting.count_intersection_grid(2, 2, (3, 0))

    def test_pairs(self):
        self.assertEqual(counting.count_intersection_pairs(2, 1, 2), 1)
        self.assertEqual(counting.count_intersection_pairs(3, 1, 2), 3)
        self.assertEqual(counting.count_intersection_pairs(2, 2, 1), 4)

    def test_grouped(self):
        self.assertEqual(counting.count_intersection_grouped(3, 1, (1, 1)), 3)
        self.assertEqual(counting.count_intersection_grouped(5, 1, (2, 2)), 5)
        self.assertEqual(counting.count_intersection_grouped(4, 2, (4,)), 1)
        with self.assertRaises(ValueError):
            counting.count_intersection_grouped(3, 1, (2, 2))
        with self.assertRaises(ValueError):
            counting.count_intersection_grouped(3, 1, ())
        with self.assertRaises(ValueError):
            counting.count_intersection_grouped(3, 1, (0, 1))

    def test_single_essential(self):
        self.assertEqual(counting.count_single_essential(2, 2), 2)
        self.assertEqual(counting.count_single_essential(2, 1), 1)
        self.assertEqual(counting.count_single_essential(3, 1), 8)


@pytest.mark.parametrize("q, n", [(2, 2), (2, 3), (3, 1), (3, 2), (5, 1)])
def test_intersections_match_brute_force(q, n):
    for k in range(1, q + 1):
        same_output = [(1, a, 0) for a in range(k)]
        assert counting.count_triples_brute(
            q, n, same_output
        ) == counting.count_intersection_inputs(q, n, k)
        own_outputs = [(1, a, (a + 1) % q) for a in range(k)]
        assert counting.count_triples_brute(
            q, n, own_outputs
        ) == counting.count_intersection_pairs(q, n, k)
    for k in range(1, n + 1):
        variables = [(i, q - 1, 1) for i in range(1, k + 1)]
        assert counting.count_triples_brute(
            q, n, variables
        ) == counting.count_intersection_vars(q, n, k)
    for parts in itertools.product(range(q + 1), repeat=n):
        grid = [(i + 1, a, 0) for i, k in enumerate(parts) for a in range(k)]
        assert counting.count_triples_brute(
            q, n, grid
        ) == counting.count_intersection_grid(q, n, parts)


def _group_sizes(q):
    for r in range(1, q + 1):
        for groups in itertools.product(range(1, q + 1), repeat=r):
            if sum(groups) <= q:
                yield groups


@pytest.mark.parametrize("q, n", [(2, 1), (2, 2), (3, 1), (3, 2), (4, 1), (5, 1)])
def test_grouped_intersection_matches_brute_force(q, n):
    for groups in _group_sizes(q):
        triples = []
        inputs = iter(range(q))
        for output, size in enumerate(groups):
            triples.extend((1, next(inputs), output) for _ in range(size))
        assert counting.count_triples_brute(
            q, n, triples
        ) == counting.count_intersection_grouped(q, n, groups), groups


@pytest.mark.parametrize("q, n", [(2, 1), (2, 2), (3, 1), (3, 2), (4, 1), (5, 1)])
def test_all_inputs_canalyzing_forces_constant(q, n):
    assert counting.count_intersection_inputs(q, n, q) == 1
    field = make_field(q)
    members = [
        t
        for t in function.iterate_tables(field, n)
        if all(canalyzing.is_canalyzing(t, 1, a, 1) for a in range(q))
    ]
    assert members == [function.constant_table(field, n, 1)]


class TestCompositions(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(
            list(counting.enumerate_bounded_compositions(2, 2, 2)),
            [(0, 2), (1, 1), (2, 0)],
        )
        self.assertEqual(
            sorted(counting.enumerate_bounded_compositions(1, 3, 1)),
            [(0, 0, 1), (0, 1, 0), (1, 0, 0)],
        )
        self.assertEqual(list(counting.enumerate_bounded_compositions(0, 0, 0)), [()])
        self.assertEqual(list(counting.enumerate_bounded_compositions(5, 2, 2)), [])

    def test_stars_and_bars(self):
        for k, parts, bound in itertools.product(range(7), range(1, 4), range(4)):
            expected = sum(
                (-1) ** j
                * math.comb(parts, j)
                * math.comb(k - j * (bound + 1) + parts - 1, parts - 1)
                for j in range(parts + 1)
                if k - j * (bound + 1) >= 0
            )
            found = list(counting.enumerate_bounded_compositions(k, parts, bound))
            self.assertEqual(len(found), expected)
            self.assertEqual(len(set(found)), len(found))

    def test_negative(self):
        with self.assertRaises(ValueError):
            list(counting.enumerate_bounded_compositions(-1, 2, 2))

    def test_multinomial_sum(self):
        self.assertEqual(counting.multinomial_sum(3, 4), 3**4)
        self.assertEqual(counting.multinomial_sum(2, 2, bound=1), 2)
        self.assertEqual(counting.multinomial_sum(2, 3, bound=0), 0)
        for parts, k in itertools.product(range(1, 5), range(1, 7)):
            for bound in [None, *range(k + 1)]:
                self.assertEqual(
                    counting.multinomial_sum(parts, k, bound),
                    counting.multinomial_sum_literal(parts, k, bound),
                )


@pytest.mark.parametrize("q, n", [(2, 1), (2, 3), (3, 2), (4, 2), (5, 1), (5, 3)])
def test_grouped_composition_sums_match_literal(q, n):
    for proper in (False, True):
        assert counting.composition_sums(q, n, proper) == counting.composition_sums(
            q, n, proper, literal=True
        )


def test_proper_composition_sums_vanish_at_one():
    assert counting.composition_sums(3, 2, proper=True)[1] == 0


class TestClosedForms(unittest.TestCase):
    def test_input_union_telescopes(self):
        for q, n in itertools.product([2, 3, 4, 5, 7, 8, 9], range(1, 4)):
            spec = FamilySpec(1, None, 0)
            self.assertEqual(
                counting.input_union_series(q, n),
                counting.count_formula(spec, q, n).formula,
            )

    def test_fixed_variable_forms(self):
        for q, n in itertools.product([2, 3, 4, 5, 7], range(1, 5)):
            expected = counting.count_formula(FamilySpec(1), q, n).formula
            self.assertEqual(counting.full_fixed_variable_closed_form(q, n), expected)
            self.assertEqual(
                counting.input_output_union_factorial_form(q, n), expected
            )
            multinomial_form = sum(
                (-1) ** (k - 1)
                * math.comb(q, k)
                * counting.multinomial_sum(q, k)
                * q ** ((q - k) * q ** (n - 1))
                for k in range(1, q + 1)
            )
            self.assertEqual(multinomial_form, expected)

    def test_large_field_at_one_variable(self):
        # every function of one variable is canalyzing
        for q in (128, 256, 1024):
            with self.subTest(q=q):
                self.assertEqual(
                    counting.count_formula(FamilySpec(1), q, 1).formula, q**q
                )
                self.assertEqual(counting.count_formula(FULL, q, 1).formula, q**q)


class TestBooleanCase(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(counting.boolean_specialization(1), 4)
        self.assertEqual(counting.boolean_specialization(3), 120)
        self.assertEqual(counting.boolean_specialization(4), 3514)

    def test_matches_general_formula(self):
        for n in range(1, 17):
            self.assertEqual(
                counting.boolean_specialization(n),
                counting.count_formula(FULL, 2, n).formula,
            )

    def test_identity_examples(self):
        self.assertEqual(counting.identity_sides(1), (0, 0))
        self.assertEqual(counting.identity_sides(2), (6, 6))
        self.assertEqual(counting.identity_sides(5), (8, 8))
        with self.assertRaises(ValueError):
            counting.identity_sides(0)

    def test_identity(self):
        for n in range(1, 65):
            lhs, rhs = counting.identity_sides(n)
            self.assertEqual(lhs, rhs, n)


class TestAsymptotes(unittest.TestCase):
    def test_exact_families(self):
        for q, n in [(2, 1), (2, 5), (3, 2), (5, 3)]:
            self.assertEqual(counting.asymptote_ratio(FamilySpec(1, 0, 0), q, n), 1)
            self.assertEqual(counting.asymptote_ratio(FamilySpec(1, 0, None), q, n), 1)

    def test_full_family(self):
        self.assertEqual(counting.asymptote(FULL, 2, 3), 192)
        self.assertEqual(counting.asymptote_ratio(FULL, 2, 3), Fraction(5, 8))

    def test_ratio_approaches_one(self):
        for spec in FamilySpec.shapes():
            gaps = [abs(counting.asymptote_ratio(spec, 2, n) - 1) for n in range(4, 13)]
            if spec.shape in ((True, True, True), (True, True, False)):
                self.assertEqual(set(gaps), {0})
                continue
            for before, after in zip(gaps, gaps[1:]):
                self.assertGreater(before, after, spec.name)

    def test_upper_bound(self):
        self.assertEqual(counting.upper_bound(2, 3), (120, 192))
        for q, n in [(2, 3), (2, 1), (3, 2), (4, 3)]:
            self.assertTrue(counting.upper_bound_check(q, n))


class TestDecimalString(unittest.TestCase):
    def test_rendering(self):
        self.assertEqual(counting.decimal_string(Fraction(5, 8)), "0.625000000000")
        self.assertEqual(counting.decimal_string(Fraction(1, 3), 4), "0.3333")
        self.assertEqual(counting.decimal_string(Fraction(1), 3), "1.000")
        self.assertEqual(counting.decimal_string(Fraction(7, 2), 0), "4")

    def test_half_to_even(self):
        self.assertEqual(counting.decimal_string(Fraction(1, 8), 2), "0.12")
        self.assertEqual(counting.decimal_string(Fraction(3, 8), 2), "0.38")
        self.assertEqual(counting.decimal_string(Fraction(5, 2), 0), "2")
        self.assertEqual(counting.decimal_string(Fraction(-1, 4), 1), "-0.2")

    def test_negative_digits(self):
        with self.assertRaises(ValueError):
            counting.decimal_string(Fraction(1, 2), -1)


@pytest.mark.parametrize("q, n", SMALL_GRID)
def test_free_output_multiplies_by_q(q, n):
    fixed = counting.count_formula(FamilySpec(None, 0, 0), q, n).formula
    free = counting.count_formula(FamilySpec(None, 0, None), q, n).formula
    assert free == q * fixed
