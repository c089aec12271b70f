import functools
import logging
import typing as T

import numpy as np

import canalyzing_fq
from canalyzing_fq.field import FieldElement, FieldSpec, make_field


__all__ = [
    "ENUMERATION_LIMIT",
    "TABLE_LIMIT",
    "AnfPolynomial",
    "TruthTable",
    "anf_to_table",
    "constant_table",
    "degree",
    "degree_in_variable",
    "enumeration_size",
    "essential_variables",
    "evaluate",
    "from_record",
    "is_constant",
    "is_essential",
    "iterate_tables",
    "point_coords",
    "point_index",
    "restrict",
    "table_at",
    "table_size",
    "table_to_anf",
    "to_record",
]

logger = logging.getLogger(__name__)

#: Largest q**n accepted by single-function operations.
TABLE_LIMIT = 2**24

#: Largest q**(q**n) accepted when enumerating every function.
ENUMERATION_LIMIT = 2**40


def table_size(q: int, n: int) -> int:
    """Return q**n, or raise SizeLimitExceededError beyond TABLE_LIMIT."""
    if n < 0:
        raise ValueError(f"Variable count must be nonnegative, not {n}.")
    if n * (q.bit_length() - 1) > TABLE_LIMIT.bit_length() or q**n > TABLE_LIMIT:
        raise canalyzing_fq.SizeLimitExceededError(
            f"A table of {q}**{n} values exceeds the limit {TABLE_LIMIT}."
        )
    return q**n


def enumeration_size(q: int, n: int) -> int:
    """Return q**(q**n), or raise SizeLimitExceededError beyond ENUMERATION_LIMIT."""
    # q >= 2, so q**(q**n) >= 2**(q**n) and the cheap checks run first.
    bits = ENUMERATION_LIMIT.bit_length()
    if n >= bits or q**n >= bits or q ** (q**n) > ENUMERATION_LIMIT:
        raise canalyzing_fq.SizeLimitExceededError(
            f"Enumerating {q}**({q}**{n}) functions exceeds "
            f"the limit {ENUMERATION_LIMIT}."
        )
    return q ** (q**n)


def point_index(q: int, coords: T.Sequence[int]) -> int:
    """Index of a point (or exponent tuple); the first coordinate varies fastest."""
    return sum(int(c) * q**i for i, c in enumerate(coords))


def point_coords(q: int, n: int, index: int) -> T.Tuple[int, ...]:
    return tuple((index // q**i) % q for i in range(n))


def _check_variable(n: int, i: int) -> int:
    if isinstance(i, bool) or not isinstance(i, (int, np.integer)) or not 1 <= i <= n:
        raise canalyzing_fq.IndexOutOfRangeError(
            f"Variable index {i!r} is outside 1..{n}."
        )
    return int(i)


def _as_codes(q: int, codes: T.Iterable[int]) -> np.ndarray:
    if isinstance(codes, np.ndarray):
        if codes.ndim != 1 or codes.dtype.kind not in "iu":
            raise ValueError(
                f"Codes must be a flat integer array, not {codes.dtype} {codes.shape}."
            )
        return codes.astype(np.int64)
    codes = list(codes)
    for code in codes:
        if isinstance(code, bool) or not isinstance(code, (int, np.integer)):
            raise ValueError(f"{code!r} is not an integer element code.")
        if not 0 <= code < q:
            raise ValueError(f"Codes must lie in [0, {q}), not {code}.")
    return np.array(codes, dtype=np.int64)


class _FieldArray:
    """q**n element codes stored little-endian in base q, first coordinate fastest."""

    def __init__(self, field: FieldSpec, n: int, codes: T.Iterable[int]):
        size = table_size(field.q, n)
        array = _as_codes(field.q, codes)
        if array.shape != (size,):
            raise canalyzing_fq.DimensionMismatchError(
                f"Expected {size} codes for q={field.q}, n={n}; got {array.size}."
            )
        if array.min() < 0 or array.max() >= field.q:
            raise ValueError(f"Codes must lie in [0, {field.q}).")
        array.flags.writeable = False
        self.field = field
        self.n = n
        self._codes = array

    @classmethod
    def from_cube(cls, field: FieldSpec, cube: np.ndarray):
        return cls(field, cube.ndim, np.asarray(cube).reshape(-1, order="F"))

    @property
    def q(self) -> int:
        return self.field.q

    def cube(self) -> np.ndarray:
        """View indexed as cube[x_1, ..., x_n]."""
        return self._codes.reshape((self.field.q,) * self.n, order="F")

    def tolist(self) -> T.List[int]:
        return self._codes.tolist()

    def __len__(self):
        return self._codes.size

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return (
            self.field == other.field
            and self.n == other.n
            and np.array_equal(self._codes, other._codes)
        )

    def __hash__(self):
        return hash((type(self).__name__, self.field, self.n, self._codes.tobytes()))


class TruthTable(_FieldArray):
    """A function F_q**n -> F_q as its value vector in canonical point order."""

    @property
    def values(self) -> np.ndarray:
        return self._codes

    def __repr__(self):
        return f"TruthTable(q={self.q}, n={self.n}, values={self.tolist()})"


class AnfPolynomial(_FieldArray):
    """Coefficients a_{k_1...k_n} indexed by exponent tuples with every k_i < q."""

    @property
    def coeffs(self) -> np.ndarray:
        return self._codes

    def terms(self) -> T.List[T.Tuple[FieldElement, T.Tuple[int, ...]]]:
        """Nonzero (coefficient, exponents) pairs in canonical index order."""
        return [
            (int(self._codes[index]), point_coords(self.q, self.n, int(index)))
            for index in np.flatnonzero(self._codes)
        ]

    def __str__(self):
        terms = sorted(self.terms(), key=lambda term: (-sum(term[1]), term[1][::-1]))
        if not terms:
            return "0"
        parts = []
        for coeff, exps in terms:
            factors = [
                f"x{i}" if k == 1 else f"x{i}^{k}"
                for i, k in enumerate(exps, start=1)
                if k
            ]
            if coeff != 1 or not factors:
                factors.insert(0, str(coeff))
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"AnfPolynomial(q={self.q}, n={self.n}, anf={self!s})"


def constant_table(field: FieldSpec, n: int, b: FieldElement) -> TruthTable:
    return TruthTable(field, n, np.full(table_size(field.q, n), field.check(b)))


def is_constant(f: TruthTable) -> bool:
    return bool(np.all(f.values == f.values[0]))


def evaluate(f: AnfPolynomial, x: T.Sequence[FieldElement]) -> FieldElement:
    """Sum of coeff * prod(x_i**k_i) over the nonzero terms, term by term."""
    if len(x) != f.n:
        raise canalyzing_fq.DimensionMismatchError(
            f"Point has {len(x)} coordinates, polynomial has {f.n} variables."
        )
    field = f.field
    point = [field.check(c) for c in x]
    total = 0
    for coeff, exps in f.terms():
        term = coeff
        for xi, k in zip(point, exps):
            term = field.mul(term, field.pow(xi, k))
        total = field.add(total, term)
    return total


def _transform_axis(
    field: FieldSpec, cube: np.ndarray, matrix: np.ndarray, axis: int
) -> np.ndarray:
    # out[..., k, ...] = sum_j matrix[k, j] * cube[..., j, ...]
    moved = np.moveaxis(cube, axis, 0)
    broadcast = (field.q,) + (1,) * (moved.ndim - 1)
    out = np.empty_like(moved)
    for k in range(field.q):
        out[k] = field.sum(field.mul_table[matrix[k].reshape(broadcast), moved], axis=0)
    return np.moveaxis(out, 0, axis)


def _transform(field: FieldSpec, cube: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    for axis in range(cube.ndim):
        cube = _transform_axis(field, cube, matrix, axis)
    return cube


@functools.lru_cache(maxsize=None)
def _inverse_vandermonde(field: FieldSpec) -> np.ndarray:
    """Inverse of V[j, k] = e_j**k, the one-variable interpolation matrix."""
    q = field.q
    matrix = np.array(field.pow_table, dtype=np.int64)
    inverse = np.eye(q, dtype=np.int64)
    for col in range(q):
        pivot = col + int(np.flatnonzero(matrix[col:, col])[0])
        matrix[[col, pivot]] = matrix[[pivot, col]]
        inverse[[col, pivot]] = inverse[[pivot, col]]
        scale = field.inv_table[matrix[col, col]]
        matrix[col] = field.mul_table[scale, matrix[col]]
        inverse[col] = field.mul_table[scale, inverse[col]]
        factors = field.neg_table[matrix[:, col]]
        factors[col] = 0
        column = factors[:, None]
        matrix = field.add_table[matrix, field.mul_table[column, matrix[col]]]
        inverse = field.add_table[inverse, field.mul_table[column, inverse[col]]]
    inverse.flags.writeable = False
    return inverse


def anf_to_table(f: AnfPolynomial) -> TruthTable:
    cube = _transform(f.field, f.cube(), f.field.pow_table)
    return TruthTable.from_cube(f.field, cube)


def table_to_anf(t: TruthTable) -> AnfPolynomial:
    """Interpolate one axis at a time with the inverse Vandermonde matrix."""
    matrix = _inverse_vandermonde(t.field)
    return AnfPolynomial.from_cube(t.field, _transform(t.field, t.cube(), matrix))


def _exponents(f: AnfPolynomial) -> np.ndarray:
    return np.argwhere(f.cube() != 0).reshape(-1, f.n)


def degree(f: AnfPolynomial) -> int:
    """Largest total degree of a nonzero term; -1 for the zero polynomial."""
    exps = _exponents(f)
    return int(exps.sum(axis=1).max()) if len(exps) else -1


def degree_in_variable(f: AnfPolynomial, i: int) -> int:
    i = _check_variable(f.n, i)
    exps = _exponents(f)
    return int(exps[:, i - 1].max()) if len(exps) else -1


def restrict(f: TruthTable, i: int, a: FieldElement) -> TruthTable:
    """The (n-1)-variable table of f with x_i fixed to a."""
    i = _check_variable(f.n, i)
    cube = np.take(f.cube(), f.field.check(a), axis=i - 1)
    return TruthTable.from_cube(f.field, cube)


def is_essential(f: TruthTable, i: int) -> bool:
    i = _check_variable(f.n, i)
    slices = np.moveaxis(f.cube(), i - 1, 0)
    return bool(np.any(slices != slices[0]))


def essential_variables(f: TruthTable) -> T.Tuple[int, ...]:
    return tuple(i for i in range(1, f.n + 1) if is_essential(f, i))


def table_at(field: FieldSpec, n: int, rank: int) -> TruthTable:
    """The `rank`-th table in lexicographic order of the value sequence."""
    length = table_size(field.q, n)
    q = field.q
    return TruthTable(
        field, n, [(rank // q ** (length - 1 - j)) % q for j in range(length)]
    )


def iterate_tables(
    field: FieldSpec, n: int, start: int = 0, stop: T.Optional[int] = None
) -> T.Iterator[TruthTable]:
    """Yield the tables ranked start..stop-1 in lexicographic order."""
    total = enumeration_size(field.q, n)
    stop = total if stop is None else min(stop, total)
    for rank in range(start, stop):
        yield table_at(field, n, rank)


def to_record(f: T.Union[TruthTable, AnfPolynomial]) -> T.Dict[str, T.Any]:
    record: T.Dict[str, T.Any] = {"q": f.q, "n": f.n}
    if isinstance(f, AnfPolynomial):
        record["anf"] = [{"coeff": c, "exps": list(e)} for c, e in f.terms()]
    else:
        record["table"] = f.tolist()
    return record


def _anf_from_terms(field: FieldSpec, n: int, terms) -> AnfPolynomial:
    coeffs = np.zeros(table_size(field.q, n), dtype=np.int64)
    for term in terms:
        exps = list(term["exps"])
        if len(exps) != n or any(
            isinstance(k, bool) or not isinstance(k, int) or not 0 <= k < field.q
            for k in exps
        ):
            raise ValueError(
                f"Exponents {exps} must be {n} integers in [0, {field.q})."
            )
        index = point_index(field.q, exps)
        coeffs[index] = field.add(int(coeffs[index]), field.check(term["coeff"]))
    return AnfPolynomial(field, n, coeffs)


def from_record(record: T.Mapping[str, T.Any]) -> T.Union[TruthTable, AnfPolynomial]:
    """Build a function from a {q, n, table} or {q, n, anf} record."""
    if not isinstance(record, T.Mapping):
        raise canalyzing_fq.FunctionFileError(
            f"A function record must be a table of fields, not {record!r}."
        )
    q, n = record.get("q"), record.get("n")
    if any(isinstance(v, bool) or not isinstance(v, int) for v in (q, n)):
        raise canalyzing_fq.FunctionFileError(
            "A function record needs integer fields q and n."
        )
    if ("table" in record) == ("anf" in record):
        raise canalyzing_fq.FunctionFileError(
            "A function record needs exactly one of 'table' or 'anf'."
        )
    if n < 1:
        raise canalyzing_fq.FunctionFileError(
            f"Variable count must be positive, not {n}."
        )
    field = make_field(q)
    try:
        if "table" in record:
            return TruthTable(field, n, record["table"])
        return _anf_from_terms(field, n, record["anf"])
    except (KeyError, TypeError, ValueError, canalyzing_fq.DimensionMismatchError) as e:
        raise canalyzing_fq.FunctionFileError(f"Malformed function record: {e}") from e
