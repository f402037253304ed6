"""Table-driven arithmetic in small finite fields GF(p^e), q <= 16.

Elements are plain integer indices ``0..q-1``.  An index encodes the
polynomial ``c0 + c1 x + ... `` over GF(p) as ``c0 + c1 p + c2 p^2 + ...``,
so for prime fields the index is the residue itself.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

MAX_ORDER = 16


class FieldError(ValueError):
    pass


class NotPrimePower(FieldError):
    pass


class FieldTooLarge(FieldError):
    pass


class MixedFields(FieldError):
    pass


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1))


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, e)`` with ``q == p**e``; raise NotPrimePower otherwise."""
    if q < 2:
        raise NotPrimePower(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            break
    if not _is_prime(p):
        raise NotPrimePower(f"{q} is not a prime power")
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    if r != 1:
        raise NotPrimePower(f"{q} is not a prime power")
    return p, e


# -- polynomials over GF(p), coefficient lists low degree first ------------

def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = a[:]
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < dm:
            break
        shift = len(a) - 1 - dm
        f = a[-1] * inv_lead % p
        for i, c in enumerate(m):
            a[i + shift] = (a[i + shift] - f * c) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def _monic_polys(deg: int, p: int):
    for low in product(range(p), repeat=deg):
        yield list(low) + [1]


def is_irreducible(poly: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for g in _monic_polys(d, p):
            if not _poly_mod(poly, g, p):
                return False
    return True


def smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree e (low degree first)."""
    for poly in _monic_polys(e, p):
        if is_irreducible(poly, p):
            return tuple(poly)
    raise FieldError(f"no irreducible polynomial of degree {e} over GF({p})")


class Field:
    """The finite field GF(q).  Use :func:`field_create` to obtain one."""

    def __init__(self, q: int):
        p, e = prime_power(q)
        if q > MAX_ORDER:
            raise FieldTooLarge(f"q={q} exceeds the supported maximum {MAX_ORDER}")
        self.p, self.e, self.q = p, e, q
        self.modulus = (0, 1) if e == 1 else smallest_irreducible(p, e)
        self._build_tables()

    # digits of an element index, low degree first
    def _digits(self, a: int) -> list[int]:
        return [(a // self.p ** i) % self.p for i in range(self.e)]

    def _undigits(self, ds) -> int:
        return sum(d * self.p ** i for i, d in enumerate(ds))

    def _poly_mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(da):
            for j, y in enumerate(db):
                prod[i + j] = (prod[i + j] + x * y) % self.p
        r = _poly_mod(prod, list(self.modulus), self.p)
        return self._undigits(r + [0] * (self.e - len(r)))

    def _build_tables(self) -> None:
        q, p = self.q, self.p
        add = [[self._undigits([(x + y) % p for x, y in zip(self._digits(a), self._digits(b))])
                for b in range(q)] for a in range(q)]
        mul = [[self._poly_mul(a, b) for b in range(q)] for a in range(q)]
        # log/antilog from the smallest generator of the multiplicative group
        for g in range(2, q) if q > 2 else [1]:
            powers, x = [], 1
            for _ in range(q - 1):
                powers.append(x)
                x = mul[x][g]
            if len(set(powers)) == q - 1:
                break
        self.generator = g
        self.antilog = tuple(powers)
        log = [-1] * q
        for k, x in enumerate(powers):
            log[x] = k
        self.log = tuple(log)
        self.add_table = tuple(tuple(r) for r in add)
        self.mul_table = tuple(tuple(r) for r in mul)
        self.neg_table = tuple(next(b for b in range(q) if add[a][b] == 0) for a in range(q))
        self.inv_table = (0,) + tuple(self.antilog[(-self.log[a]) % (q - 1)] for a in range(1, q))
        self.sub_table = tuple(tuple(add[a][self.neg_table[b]] for b in range(q)) for a in range(q))
        self.np_add = np.array(add, dtype=np.int64)
        self.np_mul = np.array(mul, dtype=np.int64)
        self.np_neg = np.array(self.neg_table, dtype=np.int64)
        self.np_inv = np.array(self.inv_table, dtype=np.int64)

    @property
    def is_prime(self) -> bool:
        return self.e == 1

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def __reduce__(self):
        return (field_create, (self.q,))

    def __call__(self, a: int) -> "Element":
        return Element(self, a)

    # -- scalar arithmetic on indices ------------------------------------
    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.sub_table[a][b]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.antilog[(self.log[a] + self.log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        return self.inv_table[a]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            return 0 if k > 0 else 1
        return self.antilog[(self.log[a] * k) % (self.q - 1)]

    def elements(self) -> range:
        return range(self.q)

    def nonzero(self) -> range:
        return range(1, self.q)

    # -- vectorised arithmetic on integer arrays -------------------------
    def vadd(self, a, b):
        if self.is_prime:
            return (np.asarray(a) + b) % self.p
        return self.np_add[a, b]

    def vsub(self, a, b):
        if self.is_prime:
            return (np.asarray(a) - b) % self.p
        return self.np_add[a, self.np_neg[b]]

    def vmul(self, a, b):
        if self.is_prime:
            return (np.asarray(a) * b) % self.p
        return self.np_mul[a, b]

    def vneg(self, a):
        return self.np_neg[a]

    def vinv(self, a):
        return self.np_inv[a]

    def matmul(self, a, b) -> np.ndarray:
        """Matrix product over the field (broadcasts like ``@``)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.is_prime:
            return (a @ b) % self.p
        a2 = a if a.ndim > 1 else a[None, :]
        b2 = b if b.ndim > 1 else b[:, None]
        out = np.zeros(np.broadcast_shapes(a2.shape[:-2], b2.shape[:-2])
                       + (a2.shape[-2], b2.shape[-1]), dtype=np.int64)
        for k in range(a2.shape[-1]):
            out = self.np_add[out, self.np_mul[a2[..., :, k, None], b2[..., None, k, :]]]
        if a.ndim == 1:
            out = out[..., 0, :]
        if b.ndim == 1:
            out = out[..., 0]
        return out


@lru_cache(maxsize=None)
def field_create(q: int) -> Field:
    """GF(q) for a prime power q <= 16; cached, so equal orders give the same object."""
    return Field(q)


class Element:
    """A field element bound to its field; arithmetic refuses to mix fields."""

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value: int):
        if not 0 <= value < field.q:
            raise FieldError(f"{value} is not an element of {field}")
        self.field = field
        self.value = value

    def _other(self, other) -> int:
        if isinstance(other, Element):
            if other.field is not self.field:
                raise MixedFields(f"cannot combine {self.field} and {other.field}")
            return other.value
        if isinstance(other, int) and 0 <= other < self.field.q:
            return other
        raise TypeError(f"cannot combine {self.field} element with {other!r}")

    def __add__(self, other):
        return Element(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Element(self.field, self.field.sub(self.value, self._other(other)))

    def __neg__(self):
        return Element(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        return Element(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Element(self.field, self.field.div(self.value, self._other(other)))

    def __pow__(self, k: int):
        if k < 0:
            return Element(self.field, self.field.pow(self.field.inv(self.value), -k))
        return Element(self.field, self.field.pow(self.value, k))

    def inverse(self) -> "Element":
        return Element(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.field is other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash((self.field.q, self.value))

    def __repr__(self):
        return f"{self.field}({self.value})"
