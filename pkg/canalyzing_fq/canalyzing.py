import itertools
import logging
import re
import typing as T

import numpy as np

import canalyzing_fq
from canalyzing_fq.field import FieldElement, FieldSpec
from canalyzing_fq.function import (
    ENUMERATION_LIMIT,
    AnfPolynomial,
    TruthTable,
    _check_variable,
    anf_to_table,
    degree_in_variable,
    essential_variables,
    restrict,
    table_size,
    table_to_anf,
)
from canalyzing_fq.util import seeded_codes


__all__ = [
    "CanalyzingTriple",
    "FamilySpec",
    "canalyzing_triples",
    "construct",
    "construct_grid",
    "construct_multi",
    "decompose",
    "is_canalyzing",
    "iterate_quotients",
    "member",
    "quotient_size",
    "sample",
    "single_essential_variable",
]

logger = logging.getLogger(__name__)


class CanalyzingTriple(T.NamedTuple):
    """Fixing x_i to a forces the output b."""

    i: int
    a: FieldElement
    b: FieldElement

    def to_record(self) -> T.Dict[str, int]:
        return {"i": self.i, "a": self.a, "b": self.b}


_FAMILY_GRAMMAR = re.compile(
    r"^\s*i\s*=\s*(\*|\d+)\s*,\s*a\s*=\s*(\*|\d+)\s*,\s*b\s*=\s*(\*|\d+)\s*$"
)


def _component(text: str) -> T.Optional[int]:
    return None if text == "*" else int(text)


def _symbol(value: T.Optional[int], wildcard: str = "*") -> str:
    return wildcard if value is None else str(value)


class FamilySpec(T.NamedTuple):
    """A canalyzing family; each of variable, input and output is fixed or None."""

    var: T.Optional[int] = None
    input: T.Optional[FieldElement] = None
    output: T.Optional[FieldElement] = None

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        """Parse the `i=<k|*>,a=<c|*>,b=<c|*>` grammar."""
        match = _FAMILY_GRAMMAR.match(text)
        if match is None:
            raise canalyzing_fq.FamilySpecError(
                f"Cannot parse family {text!r}; expected i=<k|*>,a=<c|*>,b=<c|*>."
            )
        spec = cls(*(_component(group) for group in match.groups()))
        if spec.var is not None and spec.var < 1:
            raise canalyzing_fq.FamilySpecError("Variable indices start at 1.")
        return spec

    def __str__(self):
        return f"i={_symbol(self.var)},a={_symbol(self.input)},b={_symbol(self.output)}"

    @property
    def shape(self) -> T.Tuple[bool, bool, bool]:
        """Which of (variable, input, output) are fixed."""
        return (self.var is not None, self.input is not None, self.output is not None)

    @property
    def name(self) -> str:
        var = "i" if self.var is not None else "*"
        a = "a" if self.input is not None else "*"
        b = "b" if self.output is not None else "*"
        return f"C^{var}_{{{a},{b}}}"

    @property
    def is_fully_fixed(self) -> bool:
        return all(self.shape)

    def validate(self, q: int, n: int) -> "FamilySpec":
        if self.var is not None and not 1 <= self.var <= n:
            raise canalyzing_fq.DimensionMismatchError(
                f"Family variable {self.var} is outside 1..{n}."
            )
        for code in (self.input, self.output):
            if code is not None and not 0 <= code < q:
                raise canalyzing_fq.DimensionMismatchError(
                    f"Family element {code} is not a code of GF({q})."
                )
        return self

    def instances(self, q: int, n: int) -> T.Iterator["FamilySpec"]:
        """Every concrete fixing of this family's fixed components."""
        var_choices = range(1, n + 1) if self.var is not None else [None]
        input_choices = range(q) if self.input is not None else [None]
        output_choices = range(q) if self.output is not None else [None]
        for choice in itertools.product(var_choices, input_choices, output_choices):
            yield FamilySpec(*choice)

    @classmethod
    def shapes(cls) -> T.List["FamilySpec"]:
        """One family per shape, fixing i=1, a=0, b=0 where a component is fixed."""
        return [
            cls(*(value if fixed else None for value, fixed in zip((1, 0, 0), shape)))
            for shape in itertools.product((True, False), repeat=3)
        ]


def is_canalyzing(f: TruthTable, i: int, a: FieldElement, b: FieldElement) -> bool:
    """True iff fixing x_i to a makes f the constant b."""
    b = f.field.check(b)
    return bool(np.all(restrict(f, i, a).values == b))


def _slices(f: TruthTable, i: int) -> np.ndarray:
    # row a holds the restriction x_i = a, flattened
    return np.moveaxis(f.cube(), i - 1, 0).reshape(f.q, -1)


def canalyzing_triples(f: TruthTable) -> T.List[CanalyzingTriple]:
    triples = []
    for i in range(1, f.n + 1):
        for a, row in enumerate(_slices(f, i)):
            if np.all(row == row[0]):
                triples.append(CanalyzingTriple(i, a, int(row[0])))
    return triples


def member(f: TruthTable, spec: FamilySpec) -> bool:
    """True iff f has a canalyzing triple matching every fixed component of spec."""
    spec.validate(f.q, f.n)
    variables = [spec.var] if spec.var is not None else range(1, f.n + 1)
    inputs = [spec.input] if spec.input is not None else range(f.q)
    for i in variables:
        slices = _slices(f, i)
        for a in inputs:
            row = slices[a]
            if (spec.output is None or row[0] == spec.output) and np.all(row == row[0]):
                return True
    return False


def single_essential_variable(f: TruthTable) -> T.Optional[int]:
    """The variable index if f has exactly one essential variable, else None."""
    essential = essential_variables(f)
    return essential[0] if len(essential) == 1 else None


def decompose(f: TruthTable, i: int, a: FieldElement, b: FieldElement) -> AnfPolynomial:
    """Return Q with (x_i - a) * Q + b equal to f and deg(Q)_i <= q - 2.

    Q comes from synthetic division of the ANF of f - b by (x_i - a) along axis i;
    a nonzero remainder means f is not <i:a:b> canalyzing.

    """
    field = f.field
    i = _check_variable(f.n, i)
    a, b = field.check(a), field.check(b)
    dividend = np.array(table_to_anf(f).cube())
    origin = (0,) * f.n
    dividend[origin] = field.sub(int(dividend[origin]), b)
    slices = np.moveaxis(dividend, i - 1, 0)
    quotient = np.zeros_like(slices)
    carry = np.zeros(slices.shape[1:], dtype=np.int64)
    for k in range(field.q - 1, 0, -1):
        carry = field.add_table[slices[k], field.mul_table[a, carry]]
        quotient[k - 1] = carry
    remainder = field.add_table[slices[0], field.mul_table[a, carry]]
    if np.any(remainder):
        raise canalyzing_fq.NotCanalyzingError(
            f"Function is not <{i}:{a}:{b}> canalyzing.",
            payload=np.asarray(remainder).reshape(-1, order="F").tolist(),
        )
    return AnfPolynomial.from_cube(field, np.moveaxis(quotient, 0, i - 1))


def _poly_mul(
    field: FieldSpec, left: T.Sequence[int], right: T.Sequence[int]
) -> T.List[int]:
    product = [0] * (len(left) + len(right) - 1)
    for j, x in enumerate(left):
        for k, y in enumerate(right):
            product[j + k] = field.add(product[j + k], field.mul(x, y))
    return product


def _linear(field: FieldSpec, a: FieldElement) -> T.List[int]:
    return [field.neg(a), 1]


def _mul_along_axis(
    field: FieldSpec, cube: np.ndarray, axis: int, poly: T.Sequence[int]
) -> np.ndarray:
    """cube * poly(x_axis), refusing products with an exponent of q or more."""
    q = field.q
    moved = np.moveaxis(cube, axis, 0)
    used = np.flatnonzero(moved.reshape(q, -1).any(axis=1))
    nonzero = [j for j, c in enumerate(poly) if c]
    if len(used) and nonzero and used[-1] + nonzero[-1] >= q:
        raise canalyzing_fq.DegreeBoundError(
            f"Q has degree {used[-1]} in x_{axis + 1}; the product needs at most "
            f"{q - 1 - nonzero[-1]}."
        )
    out = np.zeros_like(moved)
    for j in nonzero:
        for k in range(q - j):
            out[k + j] = field.add_table[out[k + j], field.mul_table[poly[j], moved[k]]]
    return np.moveaxis(out, 0, axis)


def _add_constant(field: FieldSpec, cube: np.ndarray, b: FieldElement) -> np.ndarray:
    origin = (0,) * cube.ndim
    cube[origin] = field.add(int(cube[origin]), b)
    return cube


def construct(Q: AnfPolynomial, i: int, a: FieldElement, b: FieldElement) -> TruthTable:
    """The table of (x_i - a) * Q + b; Q must have degree at most q - 2 in x_i."""
    field = Q.field
    i = _check_variable(Q.n, i)
    a, b = field.check(a), field.check(b)
    if degree_in_variable(Q, i) > field.q - 2:
        raise canalyzing_fq.DegreeBoundError(
            f"Q has degree {degree_in_variable(Q, i)} in x_{i}; at most {field.q - 2}."
        )
    cube = _mul_along_axis(field, Q.cube(), i - 1, _linear(field, a))
    return anf_to_table(AnfPolynomial.from_cube(field, _add_constant(field, cube, b)))


def quotient_size(q: int, n: int) -> int:
    """Number of free ANF coefficients of Q: (q - 1) * q**(n - 1)."""
    return (q - 1) * q ** (n - 1)


def _quotient_indices(q: int, n: int, i: int) -> np.ndarray:
    # exponent indices whose k_i stays below q - 1, in canonical order
    indices = np.arange(table_size(q, n))
    return indices[(indices // q ** (i - 1)) % q < q - 1]


def sample(field: FieldSpec, n: int, spec: FamilySpec, seed: int) -> TruthTable:
    """Uniform draw from C^i_{a,b}: coefficient t of Q is hash64(seed, t) mod q."""
    if not spec.is_fully_fixed:
        raise canalyzing_fq.FamilySpecError(
            f"Sampling needs i, a and b fixed, not {spec}."
        )
    spec.validate(field.q, n)
    indices = _quotient_indices(field.q, n, spec.var)
    coeffs = np.zeros(table_size(field.q, n), dtype=np.int64)
    coeffs[indices] = seeded_codes(seed, len(indices), field.q)
    return construct(AnfPolynomial(field, n, coeffs), spec.var, spec.input, spec.output)


def iterate_quotients(field: FieldSpec, n: int, i: int) -> T.Iterator[AnfPolynomial]:
    """Every Q with deg(Q)_i <= q - 2, lexicographic in its free coefficients."""
    i = _check_variable(n, i)
    indices = _quotient_indices(field.q, n, i)
    if len(indices) >= ENUMERATION_LIMIT.bit_length() or (
        field.q ** len(indices) > ENUMERATION_LIMIT
    ):
        raise canalyzing_fq.SizeLimitExceededError(
            f"{field.q}**{len(indices)} quotients exceed the limit {ENUMERATION_LIMIT}."
        )
    coeffs = np.zeros(table_size(field.q, n), dtype=np.int64)
    for choice in itertools.product(field.elements, repeat=len(indices)):
        coeffs[indices] = choice
        yield AnfPolynomial(field, n, coeffs)


def construct_multi(
    field: FieldSpec,
    n: int,
    i: int,
    pairs: T.Sequence[T.Tuple[FieldElement, FieldElement]],
    Q: T.Optional[AnfPolynomial] = None,
) -> TruthTable:
    """Build f in every C^i_{a_j,b_j} from Newton-form coefficients.

    f = Q * prod_j (x_i - a_j) + sum_t A_t * prod_{j<t} (x_i - a_j), where each
    A_t is solved from f(a_t) = b_t given A_0..A_{t-1}.

    """
    i = _check_variable(n, i)
    if not pairs:
        raise ValueError("At least one (input, output) pair is required.")
    if len(pairs) > field.q:
        raise canalyzing_fq.TooManyPairsError(
            f"{len(pairs)} pairs given but GF({field.q}) has only {field.q} inputs."
        )
    inputs = [field.check(a) for a, _ in pairs]
    outputs = [field.check(b) for _, b in pairs]
    if len(set(inputs)) != len(inputs):
        raise canalyzing_fq.DuplicateInputValuesError(
            f"Canalyzing inputs {inputs} are not pairwise distinct."
        )
    newton: T.List[int] = []
    for t, (a_t, b_t) in enumerate(zip(inputs, outputs)):
        partial, weight = 0, 1
        for s in range(t):
            partial = field.add(partial, field.mul(newton[s], weight))
            weight = field.mul(weight, field.sub(a_t, inputs[s]))
        newton.append(field.div(field.sub(b_t, partial), weight))
    interpolant = [0] * field.q
    basis = [1]
    for coeff, a_t in zip(newton, inputs):
        for k, c in enumerate(basis):
            interpolant[k] = field.add(interpolant[k], field.mul(coeff, c))
        basis = _poly_mul(field, basis, _linear(field, a_t))
    if Q is None:
        Q = AnfPolynomial(field, n, np.zeros(table_size(field.q, n), dtype=np.int64))
    elif Q.field != field or Q.n != n:
        raise canalyzing_fq.DimensionMismatchError(
            "Q must live over the same field and n."
        )
    cube = _mul_along_axis(field, Q.cube(), i - 1, basis)
    axis_point = [0] * n
    for k, c in enumerate(interpolant):
        axis_point[i - 1] = k
        cube[tuple(axis_point)] = field.add(int(cube[tuple(axis_point)]), c)
    return anf_to_table(AnfPolynomial.from_cube(field, cube))


def construct_grid(
    Q: AnfPolynomial,
    inputs: T.Sequence[T.Sequence[FieldElement]],
    b: FieldElement,
) -> TruthTable:
    """Q * prod_i prod_{a in inputs[i]} (x_i - a) + b, one input set per variable."""
    field = Q.field
    if len(inputs) != Q.n:
        raise canalyzing_fq.DimensionMismatchError(
            f"Need one input set per variable ({Q.n}), got {len(inputs)}."
        )
    cube = np.array(Q.cube())
    for axis, values in enumerate(inputs):
        codes = [field.check(a) for a in values]
        if len(set(codes)) != len(codes):
            raise canalyzing_fq.DuplicateInputValuesError(
                f"Inputs {codes} for x_{axis + 1} are not pairwise distinct."
            )
        poly = [1]
        for a in codes:
            poly = _poly_mul(field, poly, _linear(field, a))
        cube = _mul_along_axis(field, cube, axis, poly)
    cube = _add_constant(field, cube, field.check(b))
    return anf_to_table(AnfPolynomial.from_cube(field, cube))
