"""
Exact truncated power series in one variable and I x I matrices over them
"""
import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from sympy import divisors, mobius

from app.config import DET_BOUND

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]


class TruncSeries:
    """
    Formal power series c_0 + c_1 t + ... + c_N t^N with integer coefficients.

    Values are immutable. Binary operations require equal order; use
    truncate() to re-truncate explicitly.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Iterable[Number], order: Optional[int] = None):
        values = [self._coerce(c) for c in coeffs]
        if order is None:
            order = len(values) - 1
        if order < 0:
            raise ValueError(f"order must be nonnegative, got {order}")
        if len(values) > order + 1:
            raise ValueError(
                f"{len(values)} coefficients do not fit order {order}; truncate explicitly"
            )
        values.extend([self._coerce(0)] * (order + 1 - len(values)))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", tuple(values))

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @staticmethod
    def _coerce(value: Number) -> Number:
        if isinstance(value, Fraction):
            if value.denominator != 1:
                raise ValueError(f"non-integer coefficient {value} in an integer series")
            return int(value)
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeError(f"integer coefficient expected, got {value!r}")
        return value

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, order: int):
        return cls([], order)

    @classmethod
    def one(cls, order: int):
        return cls([1], order)

    @classmethod
    def monomial(cls, power: int, coeff: Number, order: int):
        """coeff * t^power, dropped when power exceeds the order"""
        if power < 0:
            raise ValueError(f"negative power {power}")
        if power > order:
            return cls.zero(order)
        values = [0] * (power + 1)
        values[power] = coeff
        return cls(values, order)

    @classmethod
    def from_poly(cls, poly: Union[Dict[int, Number], Sequence[Number]], order: int):
        """Truncate a polynomial (dict power -> coeff, or coefficient list) to the order"""
        items = poly.items() if isinstance(poly, dict) else enumerate(poly)
        values = [0] * (order + 1)
        for power, coeff in items:
            if power < 0:
                raise ValueError(f"negative power {power}")
            if power <= order:
                values[power] += coeff
        return cls(values, order)

    # -- access ----------------------------------------------------------

    def __getitem__(self, k: int) -> Number:
        return self.coeffs[k]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, TruncSeries):
            return self.order == other.order and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        return NotImplemented

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.order, self.coeffs))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({list(self.coeffs)}, order={self.order})"

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                terms.append(f"{c}")
            elif k == 1:
                terms.append(f"{c}*t")
            else:
                terms.append(f"{c}*t^{k}")
        return " + ".join(terms) + f" + O(t^{self.order + 1})" if terms else f"O(t^{self.order + 1})"

    # -- arithmetic ------------------------------------------------------

    def _check(self, other: "TruncSeries") -> None:
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.order != self.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")

    def _lift(self, other) -> "TruncSeries":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return type(self)([other], self.order)
        return other

    def __add__(self, other):
        other = self._lift(other)
        self._check(other)
        return type(self)([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    __radd__ = __add__

    def __neg__(self):
        return type(self)([-a for a in self.coeffs], self.order)

    def __sub__(self, other):
        other = self._lift(other)
        self._check(other)
        return type(self)([a - b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return type(self)([a * other for a in self.coeffs], self.order)
        if not isinstance(other, TruncSeries):
            return NotImplemented
        self._check(other)
        return type(self)(_convolve(self.coeffs, other.coeffs, self.order), self.order)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = type(self).one(self.order)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def _unit_inverse(self, c0: Number) -> Number:
        if c0 not in (1, -1):
            raise ValueError(f"constant term {c0} is not invertible over integers")
        return c0

    def inverse(self):
        """Multiplicative inverse up to the truncation order"""
        a = self.coeffs
        u = self._unit_inverse(a[0])
        b = [u]
        for n in range(1, self.order + 1):
            acc = 0
            for k in range(1, n + 1):
                if a[k]:
                    acc += a[k] * b[n - k]
            b.append(-u * acc)
        return type(self)(b, self.order)

    def truncate(self, order: int):
        """Explicit re-truncation to a lower order"""
        if order > self.order:
            raise ValueError(f"cannot raise order {self.order} to {order}")
        return type(self)(self.coeffs[: order + 1], order)

    def substitute_power(self, s: int):
        return substitute_power(self, s)

    def to_json(self) -> Dict[str, object]:
        return {"order": self.order, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: Dict[str, object]):
        order = int(data["order"])
        coeffs = [_parse_number(c) for c in data["coeffs"]]
        if len(coeffs) != order + 1:
            raise ValueError(f"expected {order + 1} coefficients, got {len(coeffs)}")
        return cls(coeffs, order)


class RatSeries(TruncSeries):
    """Truncated series with exact rational coefficients"""

    __slots__ = ()

    @staticmethod
    def _coerce(value: Number) -> Fraction:
        if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            raise TypeError(f"rational coefficient expected, got {value!r}")
        return Fraction(value)

    def _unit_inverse(self, c0: Number) -> Fraction:
        if c0 == 0:
            raise ValueError("constant term 0 is not invertible")
        return 1 / Fraction(c0)


def _parse_number(value) -> Number:
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    frac = Fraction(str(value))
    return int(frac) if frac.denominator == 1 else frac


def _convolve(a: Sequence[Number], b: Sequence[Number], order: int) -> List[Number]:
    out = [0] * (order + 1)
    nonzero_b = [(j, y) for j, y in enumerate(b) if y]
    for i, x in enumerate(a):
        if not x:
            continue
        limit = order - i
        for j, y in nonzero_b:
            if j > limit:
                break
            out[i + j] += x * y
    return out


def first_difference(a: TruncSeries, b: TruncSeries) -> Optional[int]:
    """Index of the first differing coefficient, up to the smaller order"""
    for k in range(min(a.order, b.order) + 1):
        if a.coeffs[k] != b.coeffs[k]:
            return k
    return None


# ---------------------------------------------------------------------------
# Scalar operations
# ---------------------------------------------------------------------------

def series_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    return a * b


def series_inv(a: TruncSeries) -> TruncSeries:
    return a.inverse()


def substitute_power(a: TruncSeries, s: int) -> TruncSeries:
    """f(t) -> f(t^s), same truncation order"""
    if s <= 0:
        raise ValueError(f"substitution power must be positive, got {s}")
    if s == 1:
        return a
    values = [0] * (a.order + 1)
    for r, c in enumerate(a.coeffs):
        if r * s > a.order:
            break
        values[r * s] = c
    return type(a)(values, a.order)


def _log_derivative_terms(a: Sequence[Number], order: int) -> List[Number]:
    """c_m with sum_{r} c_r t^r / r = sum_r a_r log 1/(1-t^r)"""
    c = [0] * (order + 1)
    for d in range(1, order + 1):
        if a[d]:
            for m in range(d, order + 1, d):
                c[m] += d * a[d]
    return c


def sym_exp(f: TruncSeries) -> TruncSeries:
    """
    Plethystic exponential: prod_r (1 - t^r)^(-a_r) for f = sum a_r t^r.

    Negative a_r stand for odd generators and contribute positive powers
    of (1 - t^r).
    """
    if f.coeffs[0] != 0:
        raise ValueError("sym_exp needs a zero constant term")
    order = f.order
    c = _log_derivative_terms(f.coeffs, order)
    h: List[Number] = [1]
    rational = isinstance(f, RatSeries)
    for m in range(1, order + 1):
        acc = 0
        for k in range(1, m + 1):
            if c[k]:
                acc += c[k] * h[m - k]
        if rational:
            h.append(Fraction(acc, m))
        else:
            q, rem = divmod(acc, m)
            if rem:
                raise ArithmeticError(f"non-integral plethystic coefficient at t^{m}")
            h.append(q)
    return type(f)(h, order)


def sym_log(H: TruncSeries) -> TruncSeries:
    """Inverse of sym_exp; the result must have integer coefficients"""
    if H.coeffs[0] != 1:
        raise ValueError(f"sym_log needs constant term 1, got {H.coeffs[0]}")
    order = H.order
    h = [Fraction(x) for x in H.coeffs]
    c = [Fraction(0)] * (order + 1)
    for m in range(1, order + 1):
        acc = m * h[m]
        for k in range(1, m):
            acc -= c[k] * h[m - k]
        c[m] = acc
    a: List[int] = [0]
    for m in range(1, order + 1):
        value = sum(int(mobius(m // d)) * c[d] for d in divisors(m)) / m
        if value.denominator != 1:
            raise ValueError(
                f"input is not a plethystic exponential of an integer series (t^{m}: {value})"
            )
        a.append(int(value))
    return TruncSeries(a, order)


def power_product(exponents: Dict[int, int], order: int) -> TruncSeries:
    """prod_k (1 - t^k)^(e_k) for integer exponents e_k, k >= 1"""
    f = TruncSeries.from_poly({k: -e for k, e in exponents.items() if 1 <= k <= order}, order)
    return sym_exp(f)


# ---------------------------------------------------------------------------
# Matrix series
# ---------------------------------------------------------------------------

class MatSeries:
    """I x I matrix of TruncSeries sharing one truncation order"""

    __slots__ = ("dim", "order", "entries")

    def __init__(self, entries: Sequence[Sequence[TruncSeries]]):
        rows = tuple(tuple(row) for row in entries)
        dim = len(rows)
        if dim == 0:
            raise ValueError("empty matrix")
        if any(len(row) != dim for row in rows):
            raise ValueError("matrix series must be square")
        order = rows[0][0].order
        if any(e.order != order for row in rows for e in row):
            raise ValueError("all entries must share one order")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "entries", rows)

    def __setattr__(self, name, value):
        raise AttributeError("MatSeries is immutable")

    @classmethod
    def identity(cls, dim: int, order: int):
        return cls([[TruncSeries.one(order) if i == j else TruncSeries.zero(order)
                     for j in range(dim)] for i in range(dim)])

    @classmethod
    def zero(cls, dim: int, order: int):
        return cls([[TruncSeries.zero(order) for _ in range(dim)] for _ in range(dim)])

    @classmethod
    def from_int_matrix(cls, matrix: Sequence[Sequence[int]], order: int, power: int = 0):
        """t^power * matrix"""
        return cls([[TruncSeries.monomial(power, int(x), order) for x in row] for row in matrix])

    @classmethod
    def from_coefficients(cls, layers: Sequence[Sequence[Sequence[int]]], order: int):
        """sum_k t^k * layers[k], layers truncated to the order"""
        dim = len(layers[0]) if layers else 0
        return cls([[TruncSeries.from_poly([layer[i][j] for layer in layers], order)
                     for j in range(dim)] for i in range(dim)])

    def __getitem__(self, index: Tuple[int, int]) -> TruncSeries:
        i, j = index
        return self.entries[i][j]

    def coefficient_matrix(self, k: int) -> List[List[int]]:
        return [[self.entries[i][j].coeffs[k] for j in range(self.dim)] for i in range(self.dim)]

    def constant_term(self) -> List[List[int]]:
        return self.coefficient_matrix(0)

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatSeries):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        return f"MatSeries(dim={self.dim}, order={self.order}, entries={[[list(e.coeffs) for e in row] for row in self.entries]})"

    def _check(self, other: "MatSeries") -> None:
        if not isinstance(other, MatSeries):
            raise TypeError(f"MatSeries expected, got {type(other).__name__}")
        if other.dim != self.dim:
            raise ValueError(f"shape mismatch: {self.dim} vs {other.dim}")
        if other.order != self.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")

    def __add__(self, other):
        return mat_add(self, other)

    def __sub__(self, other):
        return mat_add(self, mat_neg(other))

    def __neg__(self):
        return mat_neg(self)

    def __mul__(self, other):
        if isinstance(other, (int, TruncSeries)) and not isinstance(other, bool):
            return MatSeries([[e * other for e in row] for row in self.entries])
        return mat_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, TruncSeries)) and not isinstance(other, bool):
            return MatSeries([[other * e for e in row] for row in self.entries])
        return NotImplemented

    def substitute_power(self, s: int):
        return MatSeries([[substitute_power(e, s) for e in row] for row in self.entries])

    def truncate(self, order: int):
        return MatSeries([[e.truncate(order) for e in row] for row in self.entries])

    def total(self) -> TruncSeries:
        """Sum of all entries"""
        total = TruncSeries.zero(self.order)
        for row in self.entries:
            for e in row:
                total = total + e
        return total

    def to_json(self) -> Dict[str, object]:
        return {
            "dim": self.dim,
            "order": self.order,
            "entries": [[[str(c) for c in e.coeffs] for e in row] for row in self.entries],
        }


def mat_add(a: MatSeries, b: MatSeries) -> MatSeries:
    a._check(b)
    return MatSeries([[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a.entries, b.entries)])


def mat_neg(a: MatSeries) -> MatSeries:
    return MatSeries([[-x for x in row] for row in a.entries])


def mat_mul(a: MatSeries, b: MatSeries) -> MatSeries:
    a._check(b)
    n, order = a.dim, a.order
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = [0] * (order + 1)
            for k in range(n):
                x, y = a.entries[i][k], b.entries[k][j]
                if x.is_zero() or y.is_zero():
                    continue
                for p, v in enumerate(_convolve(x.coeffs, y.coeffs, order)):
                    acc[p] += v
            row.append(TruncSeries(acc, order))
        rows.append(row)
    return MatSeries(rows)


def _int_matmul(x: List[List[int]], y: List[List[int]]) -> List[List[int]]:
    n = len(x)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        xi = x[i]
        oi = out[i]
        for k in range(n):
            v = xi[k]
            if v:
                yk = y[k]
                for j in range(n):
                    if yk[j]:
                        oi[j] += v * yk[j]
    return out


def mat_inv(a: MatSeries) -> MatSeries:
    """
    Inverse of a matrix series whose constant term is the identity.

    Equal to the Neumann series sum_k (1 - A)^k; computed through the
    coefficient recurrence B_0 = 1, B_m = -sum_{k=1..m} A_k B_{m-k}.
    """
    n, order = a.dim, a.order
    ident = [[int(i == j) for j in range(n)] for i in range(n)]
    if a.constant_term() != ident:
        raise ValueError("mat_inv requires constant term equal to the identity")
    layers = [a.coefficient_matrix(k) for k in range(order + 1)]
    active = [k for k in range(1, order + 1) if any(any(row) for row in layers[k])]
    blocks = [ident]
    for m in range(1, order + 1):
        acc = [[0] * n for _ in range(n)]
        for k in active:
            if k > m:
                break
            prod = _int_matmul(layers[k], blocks[m - k])
            for i in range(n):
                for j in range(n):
                    acc[i][j] -= prod[i][j]
        blocks.append(acc)
    return MatSeries([[TruncSeries([blocks[m][i][j] for m in range(order + 1)], order)
                       for j in range(n)] for i in range(n)])


def mat_det(a: MatSeries, bound: Optional[int] = None) -> TruncSeries:
    """Determinant by cofactor expansion, memoised on the set of used columns"""
    bound = DET_BOUND if bound is None else bound
    n, order = a.dim, a.order
    if n > bound:
        raise ValueError(f"matrix dimension {n} exceeds det bound {bound}; raise --det-bound")
    memo: Dict[int, TruncSeries] = {}
    full = (1 << n) - 1

    def minor(mask: int) -> TruncSeries:
        if mask == full:
            return TruncSeries.one(order)
        if mask in memo:
            return memo[mask]
        row = bin(mask).count("1")
        total = TruncSeries.zero(order)
        free_before = 0
        for j in range(n):
            if mask & (1 << j):
                continue
            entry = a.entries[row][j]
            if not entry.is_zero():
                sub = minor(mask | (1 << j))
                if not sub.is_zero():
                    term = entry * sub
                    total = total - term if free_before % 2 else total + term
            free_before += 1
        memo[mask] = total
        return total

    return minor(0)


def infinite_product_zeta(p: MatSeries, bound: Optional[int] = None) -> TruncSeries:
    """prod_{s >= 1} 1 / det P(t^s), truncated; P(0) must be the identity"""
    n, order = p.dim, p.order
    if p.constant_term() != [[int(i == j) for j in range(n)] for i in range(n)]:
        raise ValueError("infinite_product_zeta requires P(0) equal to the identity")
    det = mat_det(p, bound)
    result = TruncSeries.one(order)
    for s in range(1, order + 1):
        factor = substitute_power(det, s)
        if factor == 1:
            continue
        result = result * factor.inverse()
    return result
