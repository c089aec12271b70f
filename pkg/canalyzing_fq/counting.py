import itertools
import logging
import math
import multiprocessing
import typing as T
from fractions import Fraction

import arrow
import numpy as np
from sympy import multinomial_coefficients

import canalyzing_fq
from canalyzing_fq.canalyzing import FamilySpec
from canalyzing_fq.field import make_field, prime_power
from canalyzing_fq.function import enumeration_size
from canalyzing_fq.util import chunk_ranges


__all__ = [
    "DEFAULT_CHUNK_SIZE",
    "FORMULA_BIT_LIMIT",
    "CountReport",
    "asymptote",
    "asymptote_ratio",
    "boolean_specialization",
    "composition_sums",
    "count_brute",
    "count_formula",
    "count_intersection_grid",
    "count_intersection_grouped",
    "count_intersection_inputs",
    "count_intersection_pairs",
    "count_intersection_vars",
    "count_report",
    "count_single_essential",
    "count_triples_brute",
    "decimal_string",
    "enumerate_bounded_compositions",
    "full_fixed_variable_closed_form",
    "identity_sides",
    "input_output_union_factorial_form",
    "input_union_series",
    "multinomial_sum",
    "multinomial_sum_literal",
    "upper_bound",
    "upper_bound_check",
    "verify_families",
]

logger = logging.getLogger(__name__)

#: Functions handed to one brute-force worker call.
DEFAULT_CHUNK_SIZE = 65536

#: Formulas refuse (q, n) whose q**(q**n) needs more bits than this.
FORMULA_BIT_LIMIT = 2**26


def _check_formula_size(q: int, n: int) -> None:
    prime_power(q)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, not {n!r}.")
    bits = q.bit_length()
    # q**n >= 2**(n * (bits - 1)) rejects huge n before q**n is formed
    if n * (bits - 1) > FORMULA_BIT_LIMIT.bit_length() or (
        q**n * bits > FORMULA_BIT_LIMIT
    ):
        raise canalyzing_fq.SizeLimitExceededError(
            f"q**(q**n) for q={q}, n={n} exceeds {FORMULA_BIT_LIMIT} bits."
        )


# Compositions and multinomial sums.


def enumerate_bounded_compositions(
    k: int, parts: int, bound: int
) -> T.Iterator[T.Tuple[int, ...]]:
    """Tuples of `parts` entries in [0, bound] summing to k, in lexicographic order."""
    if k < 0 or parts < 0 or bound < 0:
        raise ValueError("k, parts and bound must be nonnegative.")
    if parts == 0:
        if k == 0:
            yield ()
        return
    for first in range(max(0, k - bound * (parts - 1)), min(k, bound) + 1):
        for rest in enumerate_bounded_compositions(k - first, parts - 1, bound):
            yield (first, *rest)


def multinomial_sum(parts: int, k: int, bound: T.Optional[int] = None) -> int:
    """Sum of multinomial(k; k_1..k_parts) over compositions with every k_j <= bound."""
    if k < 0 or parts < 0:
        raise ValueError("k and parts must be nonnegative.")
    bound = k if bound is None else bound
    # row[j] = sum over compositions of j into the parts seen so far
    row = [1] + [0] * k
    for _ in range(parts):
        row = [
            sum(math.comb(j, i) * row[j - i] for i in range(min(j, bound) + 1))
            for j in range(k + 1)
        ]
    return row[k]


def multinomial_sum_literal(parts: int, k: int, bound: T.Optional[int] = None) -> int:
    """multinomial_sum, enumerating every composition through sympy."""
    if parts == 0:
        return int(k == 0)
    bound = k if bound is None else bound
    return sum(
        int(coeff)
        for composition, coeff in multinomial_coefficients(parts, k).items()
        if max(composition) <= bound
    )


def _multiplicity_vectors(total: int, bins: int) -> T.Iterator[T.Tuple[int, ...]]:
    if bins == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _multiplicity_vectors(total - first, bins - 1):
            yield (first, *rest)


def _composition_term(q: int, composition: T.Iterable[int]) -> int:
    product, exponent = 1, 1
    for part in composition:
        product *= math.comb(q, part)
        exponent *= q - part
    return product * q**exponent


def composition_sums(
    q: int, n: int, proper: bool = False, literal: bool = False
) -> T.Dict[int, int]:
    """Map k to the sum of prod_j C(q, k_j) * q**prod_j(q - k_j) over compositions of k.

    Compositions have n parts in [0, q]; `proper` keeps only those whose parts
    all stay below k. The default evaluation groups compositions by how often
    each part value occurs, `literal` walks every composition instead.

    """
    sums = {k: 0 for k in range(1, n * q + 1)}
    if literal:
        for k in sums:
            bound = min(k - 1, q) if proper else q
            sums[k] = sum(
                _composition_term(q, composition)
                for composition in enumerate_bounded_compositions(k, n, bound)
            )
        return sums
    for counts in _multiplicity_vectors(n, q + 1):
        k = sum(v * c for v, c in enumerate(counts))
        top = max(v for v, c in enumerate(counts) if c)
        if k == 0 or (proper and top >= k):
            continue
        arrangements = math.factorial(n)
        product, exponent = 1, 1
        for v, c in enumerate(counts):
            arrangements //= math.factorial(c)
            product *= math.comb(q, v) ** c
            exponent *= (q - v) ** c
        sums[k] += arrangements * product * q**exponent
    return sums


def _alternating(terms: T.Mapping[int, int]) -> int:
    return sum(value if k % 2 else -value for k, value in terms.items())


# Closed forms for the eight families.


def _single_triple(q: int, n: int) -> int:
    return q ** (q**n - q ** (n - 1))


def _output_union(q: int, n: int) -> int:
    return q ** (q**n - q ** (n - 1) + 1)


def _input_union(q: int, n: int) -> int:
    return q ** (q**n) - (q ** (q ** (n - 1)) - 1) ** q


def input_union_series(q: int, n: int) -> int:
    """Inclusion-exclusion over the q canalyzing inputs of one variable."""
    _check_formula_size(q, n)
    return _alternating(
        {k: math.comb(q, k) * q ** (q**n - k * q ** (n - 1)) for k in range(1, q + 1)}
    )


def _variable_union(q: int, n: int) -> int:
    return _alternating(
        {
            k: math.comb(n, k) * q ** ((q - 1) ** k * q ** (n - k))
            for k in range(1, n + 1)
        }
    )


def _variable_output_union(q: int, n: int) -> int:
    return q * _variable_union(q, n)


def _variable_input_union(q: int, n: int) -> int:
    return _alternating(composition_sums(q, n))


def _fixed_variable_terms(q: int, n: int) -> T.Dict[int, int]:
    # the multinomial sum over compositions of k into q parts is q**k
    return {
        k: math.comb(q, k) * q**k * q ** ((q - k) * q ** (n - 1))
        for k in range(1, q + 1)
    }


def _input_output_union(q: int, n: int) -> int:
    return _alternating(_fixed_variable_terms(q, n))


def full_fixed_variable_closed_form(q: int, n: int) -> int:
    """|C^i_{*,*}| with the inner multinomial sum collapsed to q**k."""
    _check_formula_size(q, n)
    return _input_output_union(q, n)


def input_output_union_factorial_form(q: int, n: int) -> int:
    """|C^i_{*,*}| summed term by term as q!/((q-k)! k_1!...k_q!) fractions."""
    _check_formula_size(q, n)
    total = Fraction(0)
    for k in range(1, q + 1):
        sign = 1 if k % 2 else -1
        power = q ** ((q - k) * q ** (n - 1))
        for composition in enumerate_bounded_compositions(k, q, k):
            denominator = math.factorial(q - k)
            for part in composition:
                denominator *= math.factorial(part)
            total += sign * Fraction(math.factorial(q) * power, denominator)
    if total.denominator != 1:
        raise AssertionError(f"Factorial form is not integral: {total}.")
    return total.numerator


def _full_union(q: int, n: int) -> int:
    single = {k: n * value for k, value in _fixed_variable_terms(q, n).items()}
    spread = {k: q * value for k, value in composition_sums(q, n, proper=True).items()}
    return _alternating(single) + _alternating(spread)


Shape = T.Tuple[bool, bool, bool]
Triple = T.Tuple[int, int, int]

_FORMULAS: T.Dict[Shape, T.Tuple[str, T.Callable[[int, int], int]]] = {
    (True, True, True): ("Lemma 3.2", _single_triple),
    (True, False, True): ("Thm 1", _input_union),
    (True, True, False): ("Cor. 1", _output_union),
    (False, True, True): ("Thm 2", _variable_union),
    (False, True, False): ("Cor. 2", _variable_output_union),
    (False, False, True): ("Thm 3", _variable_input_union),
    (True, False, False): ("Thm 4", _input_output_union),
    (False, False, False): ("Thm 5", _full_union),
}

#: Leading-term multiplier of q**((q - 1) * q**(n - 1)), as a function of (q, n).
_ASYMPTOTES: T.Dict[Shape, T.Callable[[int, int], int]] = {
    (True, True, True): lambda q, n: 1,
    (True, True, False): lambda q, n: q,
    (True, False, True): lambda q, n: q,
    (False, True, True): lambda q, n: n,
    (False, True, False): lambda q, n: n * q,
    (False, False, True): lambda q, n: n * q,
    (True, False, False): lambda q, n: q * q,
    (False, False, False): lambda q, n: n * q * q,
}


class CountReport(T.NamedTuple):
    spec: FamilySpec
    q: int
    n: int
    formula: T.Optional[int]
    theorem: T.Optional[str]
    brute: T.Optional[int] = None

    @property
    def agrees(self) -> bool:
        if self.formula is None or self.brute is None:
            return True
        return self.brute == self.formula

    def to_json(self) -> T.Dict[str, T.Any]:
        """A JSON-ready dict; counts are decimal strings."""
        return {
            "family": str(self.spec),
            "name": self.spec.name,
            "q": self.q,
            "n": self.n,
            "theorem": self.theorem,
            "formula": None if self.formula is None else str(self.formula),
            "brute": None if self.brute is None else str(self.brute),
            "agrees": self.agrees,
        }


def _formula_count(spec: FamilySpec, q: int, n: int) -> int:
    _check_formula_size(q, n)
    spec.validate(q, n)
    theorem, formula = _FORMULAS[spec.shape]
    logger.debug("Counting %s at q=%d, n=%d with %s", spec.name, q, n, theorem)
    return formula(q, n)


def count_formula(spec: FamilySpec, q: int, n: int) -> CountReport:
    """Exact |C| for the family shape of spec; fixed values do not matter."""
    count = _formula_count(spec, q, n)
    return CountReport(spec, q, n, count, _FORMULAS[spec.shape][0])


# Intersections.


def _check_count(name: str, k: int, low: int, high: int) -> None:
    if not low <= k <= high:
        raise ValueError(f"{name} must lie in [{low}, {high}], not {k}.")


def count_intersection_inputs(q: int, n: int, k: int) -> int:
    """Functions in C^i_{a_j,b} for k distinct inputs a_j and one output b."""
    _check_formula_size(q, n)
    _check_count("k", k, 1, q)
    return q ** (q**n - k * q ** (n - 1))


def count_intersection_vars(q: int, n: int, k: int) -> int:
    """Functions in C^{i_j}_{a,b} for k distinct variables."""
    _check_formula_size(q, n)
    _check_count("k", k, 1, n)
    return q ** ((q - 1) ** k * q ** (n - k))


def count_intersection_grid(q: int, n: int, parts: T.Sequence[int]) -> int:
    """Functions canalyzing to b on parts[i] distinct inputs of each x_(i+1)."""
    _check_formula_size(q, n)
    if len(parts) != n:
        raise canalyzing_fq.DimensionMismatchError(f"Need {n} parts, got {len(parts)}.")
    exponent = 1
    for part in parts:
        _check_count("parts", part, 0, q)
        exponent *= q - part
    return q**exponent


def count_intersection_pairs(q: int, n: int, k: int) -> int:
    """Functions in C^i_{a_j,b_j} for k distinct inputs with free outputs b_j."""
    _check_formula_size(q, n)
    _check_count("k", k, 1, q)
    return q ** ((q - k) * q ** (n - 1))


def count_intersection_grouped(q: int, n: int, groups: T.Sequence[int]) -> int:
    """Functions with r output groups of k_j inputs each, all inputs distinct."""
    _check_formula_size(q, n)
    if not groups or any(k < 1 for k in groups):
        raise ValueError(f"Groups must be positive sizes, not {tuple(groups)}.")
    _check_count("sum of groups", sum(groups), 1, q)
    return q ** ((q - sum(groups)) * q ** (n - 1))


def count_single_essential(q: int, n: int) -> int:
    """n * (q**(q - 1) - 1) single-essential-variable functions per canalyzed value."""
    _check_formula_size(q, n)
    return n * (q ** (q - 1) - 1)


# The Boolean case.


def identity_sides(n: int) -> T.Tuple[int, int]:
    """Both sides of the alternating binomial identity equal to 2((-1)**n + n)."""
    if n < 1:
        raise ValueError(f"n must be positive, not {n}.")
    lhs = 0
    for k in range(3, 2 * n + 1):
        inner = sum(
            math.comb(n, t) * math.comb(n - t, k - 2 * t) * 2 ** (k - 2 * t + 1)
            for t in range(1, k // 2 + 1)
        )
        lhs += inner if k % 2 else -inner
    return lhs, 2 * ((-1) ** n + n)


def boolean_specialization(n: int) -> int:
    """|C^*_{*,*}| at q = 2 from the reduced Boolean expression."""
    _check_formula_size(2, n)
    head = -4 * n + _alternating(
        {
            k: math.comb(n, k) * 2 ** (k + 1) * 2 ** (2 ** (n - k))
            for k in range(1, n + 1)
        }
    )
    lhs, _ = identity_sides(n)
    return head + lhs


# Asymptotes.


def asymptote(spec: FamilySpec, q: int, n: int) -> int:
    _check_formula_size(q, n)
    return _ASYMPTOTES[spec.shape](q, n) * q ** ((q - 1) * q ** (n - 1))


def asymptote_ratio(spec: FamilySpec, q: int, n: int) -> Fraction:
    """count_formula / asymptote as an exact reduced fraction."""
    return Fraction(_formula_count(spec, q, n), asymptote(spec, q, n))


def decimal_string(ratio: Fraction, digits: int = 12) -> str:
    """Render ratio with `digits` decimals, rounding half to even."""
    if digits < 0:
        raise ValueError(f"digits must be nonnegative, not {digits}.")
    sign = "-" if ratio < 0 else ""
    scaled = abs(ratio) * 10**digits
    whole, rest = divmod(scaled.numerator, scaled.denominator)
    twice = 2 * rest
    if twice > scaled.denominator or (twice == scaled.denominator and whole % 2):
        whole += 1
    if not digits:
        return f"{sign}{whole}"
    text = str(whole).rjust(digits + 1, "0")
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


def upper_bound(q: int, n: int) -> T.Tuple[int, int]:
    """(|C^*_{*,*}|, n * q**2 * q**((q - 1) * q**(n - 1)))."""
    full = FamilySpec()
    return _formula_count(full, q, n), asymptote(full, q, n)


def upper_bound_check(q: int, n: int) -> bool:
    count, bound = upper_bound(q, n)
    return count <= bound


# Brute force.


def _decode_chunk(q: int, n: int, start: int, stop: int) -> np.ndarray:
    """Tables ranked start..stop-1 as a (B, q, ..., q) array; x_i is axis 1 + n - i."""
    length = q**n
    powers = q ** np.arange(length - 1, -1, -1, dtype=np.int64)
    ranks = np.arange(start, stop, dtype=np.int64)
    digits = (ranks[:, None] // powers[None, :]) % q
    return digits.reshape((stop - start,) + (q,) * n)


def _constant_slices(
    cube: np.ndarray, n: int, i: int, a: int
) -> T.Tuple[np.ndarray, np.ndarray]:
    part = np.take(cube, a, axis=1 + n - i).reshape(cube.shape[0], -1)
    first = part[:, 0]
    return np.all(part == first[:, None], axis=1), first


def _family_chunk(task: T.Tuple[int, int, FamilySpec, int, int]) -> int:
    q, n, spec, start, stop = task
    cube = _decode_chunk(q, n, start, stop)
    hit = np.zeros(stop - start, dtype=bool)
    variables = [spec.var] if spec.var is not None else range(1, n + 1)
    inputs = [spec.input] if spec.input is not None else range(q)
    for i, a in itertools.product(variables, inputs):
        constant, value = _constant_slices(cube, n, i, a)
        if spec.output is not None:
            constant &= value == spec.output
        hit |= constant
    return int(hit.sum())


def _triples_chunk(task: T.Tuple[int, int, T.Tuple[Triple, ...], int, int]) -> int:
    q, n, triples, start, stop = task
    cube = _decode_chunk(q, n, start, stop)
    hit = np.ones(stop - start, dtype=bool)
    for i, a, b in triples:
        constant, value = _constant_slices(cube, n, i, a)
        hit &= constant & (value == b)
    return int(hit.sum())


def _run_chunks(
    worker: T.Callable[[T.Any], int], tasks: T.List[T.Any], workers: int
) -> int:
    if workers < 1:
        raise ValueError(f"workers must be at least 1, not {workers}.")
    logger.debug("Running %d chunks on %d worker(s)", len(tasks), workers)
    if workers == 1 or len(tasks) == 1:
        return sum(map(worker, tasks))
    with multiprocessing.Pool(workers) as pool:
        return sum(pool.imap(worker, tasks))


def count_brute(
    spec: FamilySpec,
    q: int,
    n: int,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> int:
    """Count members of the family among all q**(q**n) tables by exhaustion."""
    make_field(q)
    total = enumeration_size(q, n)
    spec.validate(q, n)
    start_time = arrow.utcnow()
    tasks = [
        (q, n, spec, start, stop) for start, stop in chunk_ranges(total, chunk_size)
    ]
    count = _run_chunks(_family_chunk, tasks, workers)
    logger.info(
        "Brute-forced %s at q=%d, n=%d over %d tables in %.3fs",
        spec.name,
        q,
        n,
        total,
        (arrow.utcnow() - start_time).total_seconds(),
    )
    return count


def count_triples_brute(
    q: int,
    n: int,
    triples: T.Sequence[Triple],
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> int:
    """Count tables lying in every listed C^i_{a,b}."""
    make_field(q)
    total = enumeration_size(q, n)
    checked = []
    for i, a, b in triples:
        FamilySpec(i, a, b).validate(q, n)
        checked.append((int(i), int(a), int(b)))
    tasks = [
        (q, n, tuple(checked), start, stop)
        for start, stop in chunk_ranges(total, chunk_size)
    ]
    return _run_chunks(_triples_chunk, tasks, workers)


def count_report(
    spec: FamilySpec,
    q: int,
    n: int,
    brute: bool = False,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    formula: bool = True,
) -> CountReport:
    """The formula count, with the brute-force count attached when asked.

    With `formula` off only the brute-force count is filled in.

    """
    if not formula:
        if not brute:
            raise ValueError("A count report needs a formula or a brute-force count.")
        return CountReport(
            spec, q, n, None, None, count_brute(spec, q, n, workers, chunk_size)
        )
    report = count_formula(spec, q, n)
    if brute:
        report = report._replace(brute=count_brute(spec, q, n, workers, chunk_size))
        if not report.agrees:
            logger.warning(
                "%s at q=%d, n=%d: formula %d != brute %d",
                spec.name,
                q,
                n,
                report.formula,
                report.brute,
            )
    return report


def verify_families(
    q: int, n: int, workers: int = 1, chunk_size: int = DEFAULT_CHUNK_SIZE
) -> T.List[CountReport]:
    """Formula against brute force for one family of each of the eight shapes."""
    return [
        count_report(spec, q, n, brute=True, workers=workers, chunk_size=chunk_size)
        for spec in FamilySpec.shapes()
    ]
