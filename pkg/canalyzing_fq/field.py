import functools
import logging
import typing as T

import numpy as np
from sympy import factorint

import canalyzing_fq


__all__ = ["TABLE_THRESHOLD", "FieldElement", "FieldSpec", "make_field", "prime_power"]

logger = logging.getLogger(__name__)

#: Largest field order for which arithmetic tables are built.
TABLE_THRESHOLD = 256

#: Elements are handled as their canonical integer codes.
FieldElement = int


def prime_power(q: int) -> T.Tuple[int, int]:
    """Return (p, m) such that q = p**m, or raise NotPrimePowerError."""
    if isinstance(q, bool) or not isinstance(q, int) or q < 2:
        raise canalyzing_fq.NotPrimePowerError(f"{q!r} is not a prime power.")
    factors = factorint(q)
    if len(factors) != 1:
        raise canalyzing_fq.NotPrimePowerError(
            f"{q} is not a prime power.",
            payload={int(p): int(e) for p, e in factors.items()},
        )
    ((p, m),) = factors.items()
    return int(p), int(m)


def _digits(code: int, p: int, length: int) -> T.List[int]:
    return [(code // p**j) % p for j in range(length)]


def _remainder(
    dividend: T.Sequence[int], divisor: T.Sequence[int], p: int
) -> T.List[int]:
    # Coefficients are listed constant term first; divisor must be monic.
    rem = list(dividend)
    d = len(divisor) - 1
    for shift in range(len(rem) - 1 - d, -1, -1):
        lead = rem[shift + d]
        if lead:
            for j, c in enumerate(divisor):
                rem[shift + j] = (rem[shift + j] - lead * c) % p
    return rem[:d]


def _is_irreducible(poly: T.Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    m = len(poly) - 1
    for d in range(1, m // 2 + 1):
        for low in range(p**d):
            if not any(_remainder(poly, [*_digits(low, p, d), 1], p)):
                return False
    return True


def _find_modulus(p: int, m: int) -> T.Tuple[int, ...]:
    """Return the monic irreducible of degree m with the smallest base-p packing."""
    for low in range(p**m):
        candidate = (*_digits(low, p, m), 1)
        if _is_irreducible(candidate, p):
            return candidate
    raise AssertionError(f"No irreducible polynomial of degree {m} over F_{p}.")


def _build_tables(
    p: int, m: int, modulus: T.Optional[T.Sequence[int]]
) -> T.Tuple[np.ndarray, np.ndarray]:
    q = p**m
    weights = p ** np.arange(m, dtype=np.int64)
    digits = (np.arange(q, dtype=np.int64)[:, None] // weights) % p
    add_table = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
    if modulus is None:
        elements = np.arange(q, dtype=np.int64)
        return add_table, np.outer(elements, elements) % p
    # basis[j] holds the digits of a * x**j for every element a.
    low = np.array(modulus[:m], dtype=np.int64)
    basis = np.empty((m, q, m), dtype=np.int64)
    current = digits
    for j in range(m):
        basis[j] = current
        lead = current[:, m - 1]
        shifted = np.concatenate(
            [np.zeros((q, 1), dtype=np.int64), current[:, :-1]], axis=1
        )
        current = (shifted - lead[:, None] * low[None, :]) % p
    product = np.einsum("bj,jam->abm", digits, basis) % p
    return add_table, product @ weights


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array, dtype=np.int64)
    array.flags.writeable = False
    return array


class FieldSpec:
    """The finite field GF(p**m) with elements encoded as integers in [0, q).

    The element with polynomial representative sum(c_j x**j) has code
    sum(c_j p**j); for prime fields the code is the residue itself.

    """

    def __init__(self, p: int, m: int, modulus: T.Optional[T.Sequence[int]] = None):
        self.p = p
        self.m = m
        self.q = p**m
        if self.q > TABLE_THRESHOLD:
            raise canalyzing_fq.SizeLimitExceededError(
                f"Field order {self.q} exceeds the table threshold {TABLE_THRESHOLD}."
            )
        if m > 1:
            if modulus is None or len(modulus) != m + 1 or modulus[-1] != 1:
                raise ValueError(f"GF({self.q}) needs a monic modulus of degree {m}.")
            if not _is_irreducible(modulus, p):
                raise ValueError(f"Modulus {tuple(modulus)} is reducible over F_{p}.")
            self.modulus: T.Optional[T.Tuple[int, ...]] = tuple(modulus)
        else:
            self.modulus = None
        add_table, mul_table = _build_tables(p, m, self.modulus)
        self.add_table = _frozen(add_table)
        self.mul_table = _frozen(mul_table)
        self.neg_table = _frozen(np.argmax(add_table == 0, axis=1))
        inv_table = np.argmax(mul_table == 1, axis=1)
        inv_table[0] = 0
        self.inv_table = _frozen(inv_table)
        self.pow_table = _frozen(self._build_pow_table())

    def _build_pow_table(self) -> np.ndarray:
        # pow_table[x, k] = x**k for k < q, with 0**0 = 1.
        q = self.q
        table = np.empty((q, q), dtype=np.int64)
        table[:, 0] = 1
        elements = np.arange(q)
        for k in range(1, q):
            table[:, k] = self.mul_table[table[:, k - 1], elements]
        return table

    def __repr__(self):
        if self.modulus is None:
            return f"FieldSpec(GF({self.q}))"
        return f"FieldSpec(GF({self.q}), modulus={self.modulus})"

    def __eq__(self, other):
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    @property
    def elements(self) -> range:
        return range(self.q)

    def check(self, x: FieldElement) -> FieldElement:
        if isinstance(x, bool) or not isinstance(x, (int, np.integer)) or not (
            0 <= x < self.q
        ):
            raise ValueError(f"{x!r} is not an element code of GF({self.q}).")
        return int(x)

    def to_coefficients(self, x: FieldElement) -> T.Tuple[int, ...]:
        """Return the polynomial representative of `x`, constant term first."""
        return tuple(_digits(self.check(x), self.p, self.m))

    def from_coefficients(self, coefficients: T.Sequence[int]) -> FieldElement:
        if len(coefficients) > self.m or any(not 0 <= c < self.p for c in coefficients):
            raise ValueError(f"{tuple(coefficients)} does not represent an element.")
        return sum(c * self.p**j for j, c in enumerate(coefficients))

    def add(self, x: FieldElement, y: FieldElement) -> FieldElement:
        return int(self.add_table[self.check(x), self.check(y)])

    def neg(self, x: FieldElement) -> FieldElement:
        return int(self.neg_table[self.check(x)])

    def sub(self, x: FieldElement, y: FieldElement) -> FieldElement:
        return self.add(x, self.neg(y))

    def mul(self, x: FieldElement, y: FieldElement) -> FieldElement:
        return int(self.mul_table[self.check(x), self.check(y)])

    def inv(self, x: FieldElement) -> FieldElement:
        if self.check(x) == 0:
            raise canalyzing_fq.DivisionByZeroError(
                f"0 has no inverse in GF({self.q})."
            )
        return int(self.inv_table[x])

    def div(self, x: FieldElement, y: FieldElement) -> FieldElement:
        return self.mul(x, self.inv(y))

    def pow(self, x: FieldElement, e: int) -> FieldElement:
        """Square-and-multiply; pow(x, 0) is 1 for every x, including 0."""
        base = self.check(x)
        if e < 0:
            raise ValueError(f"Exponent must be nonnegative, not {e}.")
        result = 1
        while e:
            if e & 1:
                result = int(self.mul_table[result, base])
            base = int(self.mul_table[base, base])
            e >>= 1
        return result

    def sum(self, array: np.ndarray, axis: int = 0) -> np.ndarray:
        """Field sum of `array` along `axis`."""
        array = np.asarray(array, dtype=np.int64)
        if self.m == 1:
            return np.sum(array, axis=axis) % self.p
        if self.p == 2:
            # Codes of characteristic-2 fields are bit vectors; addition is xor.
            return np.bitwise_xor.reduce(array, axis=axis)
        array = np.moveaxis(array, axis, 0)
        total = np.zeros(array.shape[1:], dtype=np.int64)
        for part in array:
            total = self.add_table[total, part]
        return total


@functools.lru_cache(maxsize=None)
def make_field(q: int) -> FieldSpec:
    """Return GF(q); the same q always yields the same object."""
    p, m = prime_power(q)
    if q > TABLE_THRESHOLD:
        raise canalyzing_fq.SizeLimitExceededError(
            f"Field order {q} exceeds the table threshold {TABLE_THRESHOLD}."
        )
    modulus = _find_modulus(p, m) if m > 1 else None
    logger.debug("Building GF(%d) with modulus %s", q, modulus)
    return FieldSpec(p, m, modulus)
