"""Exact scalar arithmetic: prime fields, binary extension fields, rationals.

Scalars are thin immutable wrappers around a canonical raw value (an ``int``
residue, a ``k``-bit polynomial bitmask, or a ``Fraction``).  Every field also
exposes vectorised raw operations so that ``exactla`` can run elimination on
numpy arrays without boxing each entry.

Truncated power series in an indeterminate ``o`` (``Jet``) and first-order
dual numbers (``Dual``) are built on top of any ring whose elements support
``+``, ``-`` and ``*``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

DEFAULT_PRIME = 2**31 - 1
DEFAULT_BINARY_DEGREE = 16
MAX_BINARY_DEGREE = 20


class Degenerate(ArithmeticError):
    """A quantity that must be nonzero for generic parameters vanished."""


class Unattainable(Exception):
    """No parameter in general position exists, or none was found within budget.

    Not a Degenerate: resampling from a fresh seed would not help.
    """


class NotInvertible(ZeroDivisionError):
    pass


class FieldSpecError(ValueError):
    pass


# ---------------------------------------------------------------------------
# number theory helpers


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def gf2_mul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[x] bitmasks."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def gf2_mod(a: int, f: int) -> int:
    df = f.bit_length() - 1
    while a and a.bit_length() - 1 >= df:
        a ^= f << (a.bit_length() - 1 - df)
    return a


def gf2_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, gf2_mod(a, b)
    return a


def gf2_is_irreducible(f: int) -> bool:
    """Ben-Or test: gcd(x^(2^i) - x, f) = 1 for 1 <= i <= deg(f)/2."""
    k = f.bit_length() - 1
    if k < 1:
        return False
    if k == 1:
        return True
    if not f & 1:
        return False
    x = 0b10
    h = x
    for _ in range(k // 2):
        h = gf2_mod(gf2_mul(h, h), f)
        if gf2_gcd(f, h ^ x) != 1:
            return False
    return True


def first_irreducible(k: int) -> int:
    """Smallest bitmask of an irreducible GF(2) polynomial of degree k."""
    f = (1 << k) | 1
    while not gf2_is_irreducible(f):
        f += 2
    return f


# ---------------------------------------------------------------------------
# field specifications


@dataclass(frozen=True)
class FieldSpec:
    kind: str  # "prime" | "binary" | "rational"
    modulus: int | None = None
    degree: int | None = None
    poly: int | None = None

    @classmethod
    def parse(cls, text: str) -> FieldSpec:
        text = text.strip()
        if text == "q":
            return cls("rational")
        m = re.fullmatch(r"p=(\d+)", text)
        if m:
            return cls("prime", modulus=int(m.group(1)))
        m = re.fullmatch(r"gf2=(\d+)", text)
        if m:
            return cls("binary", degree=int(m.group(1)))
        raise FieldSpecError(f"bad field spec {text!r}; expected p=<prime>, gf2=<k> or q")

    def __str__(self) -> str:
        if self.kind == "prime":
            return f"p={self.modulus}"
        if self.kind == "binary":
            return f"gf2={self.degree}"
        return "q"


# ---------------------------------------------------------------------------
# fields


class Field:
    """Base class.  Raw ops accept python scalars or numpy arrays."""

    kind: str
    characteristic: int
    dtype: object

    def __call__(self, value) -> Scalar:
        if isinstance(value, Scalar):
            if value.field is not self:
                raise TypeError("scalar from a different field")
            return value
        return Scalar(self, self.from_int(value))

    @property
    def size(self) -> int | None:
        """Number of elements, None when infinite."""
        if self.characteristic == 0:
            return None
        return self.p if hasattr(self, "p") else 2**self.k

    @property
    def zero(self) -> Scalar:
        return Scalar(self, self.from_int(0))

    @property
    def one(self) -> Scalar:
        return Scalar(self, self.from_int(1))

    def array(self, values, shape=None) -> np.ndarray:
        raw = [v.value if isinstance(v, Scalar) else v for v in values]
        arr = np.empty(len(raw), dtype=self.dtype)
        arr[:] = raw
        return arr if shape is None else arr.reshape(shape)

    def zeros(self, shape) -> np.ndarray:
        arr = np.empty(shape, dtype=self.dtype)
        arr[...] = self.from_int(0)
        return arr

    def eye(self, n: int) -> np.ndarray:
        arr = self.zeros((n, n))
        for i in range(n):
            arr[i, i] = self.from_int(1)
        return arr

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Exact matrix product over this field."""
        a = np.asarray(a)
        b = np.asarray(b)
        out = self.zeros((a.shape[0], b.shape[1]))
        for k in range(a.shape[1]):
            out = self.add(out, self.mul(a[:, k : k + 1], b[k : k + 1, :]))
        return out

    def scalars(self, arr) -> list[Scalar]:
        return [Scalar(self, self._box(v)) for v in np.asarray(arr).ravel()]

    def _box(self, v):
        return int(v)

    def random_nonzero(self, rng: np.random.Generator, count: int) -> list[Scalar]:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


class PrimeField(Field):
    kind = "prime"

    def __init__(self, p: int):
        if not is_prime(p):
            raise FieldSpecError(f"modulus {p} is not prime")
        if p >= 2**63:
            raise FieldSpecError("prime fields are limited to 64-bit moduli")
        self.p = p
        self.characteristic = p
        # products of two residues must fit in int64
        self.dtype = np.int64 if p < 3_037_000_499 else object

    def from_int(self, n) -> int:
        if isinstance(n, Fraction):
            return self.mul(n.numerator % self.p, self.inv(n.denominator % self.p))
        return int(n) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        a = int(a) % self.p
        if a == 0:
            raise NotInvertible("zero has no inverse")
        return pow(a, -1, self.p)

    def random_nonzero(self, rng, count):
        return [Scalar(self, int(v)) for v in rng.integers(1, self.p, size=count)]

    def describe(self):
        return {"spec": f"p={self.p}", "kind": "prime", "modulus": str(self.p)}

    def __repr__(self):
        return f"GF({self.p})"


class BinaryField(Field):
    """GF(2^k) with elements as k-bit polynomial bitmasks, via log/exp tables."""

    kind = "binary"
    characteristic = 2
    dtype = np.int64

    def __init__(self, k: int, poly: int | None = None):
        if not 1 <= k <= MAX_BINARY_DEGREE:
            raise FieldSpecError(f"binary degree must be in 1..{MAX_BINARY_DEGREE}")
        if poly is None:
            poly = first_irreducible(k)
        if poly.bit_length() - 1 != k or not gf2_is_irreducible(poly):
            raise FieldSpecError(f"polynomial {poly:#x} is not irreducible of degree {k}")
        self.k = k
        self.poly = poly
        self.order = 1 << k
        self._build_tables()

    def _build_tables(self):
        n = self.order - 1
        gen = self._find_generator()
        exp = np.zeros(2 * n + 1, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        x = 1
        for i in range(n):
            exp[i] = x
            log[x] = i
            x = gf2_mod(gf2_mul(x, gen), self.poly)
        exp[n : 2 * n] = exp[:n]
        self._exp, self._log = exp, log

    def _slow_pow(self, a: int, e: int) -> int:
        out = 1
        while e:
            if e & 1:
                out = gf2_mod(gf2_mul(out, a), self.poly)
            a = gf2_mod(gf2_mul(a, a), self.poly)
            e >>= 1
        return out

    def _find_generator(self) -> int:
        n = self.order - 1
        if n == 1:
            return 1
        factors = [q for q in range(2, n + 1) if n % q == 0 and is_prime(q)]
        for g in range(2, self.order):
            if all(self._slow_pow(g, n // q) != 1 for q in factors):
                return g
        raise AssertionError("multiplicative group has no generator")

    def from_int(self, n) -> int:
        if isinstance(n, Fraction):
            if n.denominator % 2 == 0:
                raise NotInvertible("even denominator in characteristic 2")
            n = n.numerator
        return int(n) & 1

    def add(self, a, b):
        return a ^ b

    sub = add

    def neg(self, a):
        return a

    def mul(self, a, b):
        if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
            a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
            out = self._exp[self._log[a] + self._log[b]]
            return np.where((a == 0) | (b == 0), 0, out)
        if a == 0 or b == 0:
            return 0
        return int(self._exp[self._log[a] + self._log[b]])

    def inv(self, a):
        a = int(a)
        if a == 0:
            raise NotInvertible("zero has no inverse")
        return int(self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)])

    def random_nonzero(self, rng, count):
        return [Scalar(self, int(v)) for v in rng.integers(1, self.order, size=count)]

    def describe(self):
        return {
            "spec": f"gf2={self.k}",
            "kind": "binary",
            "degree": self.k,
            "polynomial": f"{self.poly:#x}",
        }

    def __repr__(self):
        return f"GF(2^{self.k})"


class RationalField(Field):
    kind = "rational"
    characteristic = 0
    dtype = object
    sample_bound = 10**6

    def from_int(self, n) -> Fraction:
        return Fraction(n)

    def _box(self, v):
        return Fraction(v)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise NotInvertible("zero has no inverse")
        return 1 / Fraction(a)

    def random_nonzero(self, rng, count):
        out = []
        bound = self.sample_bound
        for _ in range(count):
            num = 0
            while num == 0:
                num = int(rng.integers(-bound, bound + 1))
            out.append(Scalar(self, Fraction(num, int(rng.integers(1, bound + 1)))))
        return out

    def describe(self):
        return {"spec": "q", "kind": "rational"}

    def __repr__(self):
        return "QQ"


_FIELD_CACHE: dict[FieldSpec, Field] = {}


def field_make(spec: FieldSpec | str) -> Field:
    """Build (and cache) a verified field from a spec or spec string."""
    if isinstance(spec, str):
        spec = FieldSpec.parse(spec)
    if spec in _FIELD_CACHE:
        return _FIELD_CACHE[spec]
    if spec.kind == "prime":
        field = PrimeField(spec.modulus)
    elif spec.kind == "binary":
        field = BinaryField(DEFAULT_BINARY_DEGREE if spec.degree is None else spec.degree, spec.poly)
    elif spec.kind == "rational":
        field = RationalField()
    else:
        raise FieldSpecError(f"unknown field kind {spec.kind!r}")
    _FIELD_CACHE[spec] = field
    return field


def sample_generic(field: Field, rng_seed, count: int) -> list[Scalar]:
    """Independent uniform nonzero samples, deterministic in the seed."""
    if count == 0:
        return []
    return field.random_nonzero(np.random.default_rng(rng_seed), count)


MAX_RETRIES = 32


class ResampleExhausted(Degenerate):
    pass


def attempt_rng(seed: int, attempt: int) -> np.random.Generator:
    # (seed, attempt) entropy keeps retries of trial s apart from trial s + 1
    return np.random.default_rng([int(seed) % 2**64, attempt])


def resample(build, seed: int, retries: int = MAX_RETRIES, log: list | None = None):
    """Call ``build(rng)`` until it does not raise Degenerate.

    Returns (result, attempts used).  Each degeneracy message is appended to
    ``log`` when given.  Raises ResampleExhausted after ``retries`` resamplings.
    """
    last = None
    for attempt in range(retries + 1):
        try:
            return build(attempt_rng(seed, attempt)), attempt + 1
        except Degenerate as exc:
            last = exc
            if log is not None:
                log.append(str(exc))
    raise ResampleExhausted(f"still degenerate after {retries} resamplings: {last}")


# ---------------------------------------------------------------------------
# scalars


class Scalar:
    __slots__ = ("field", "value")

    def __init__(self, field: Field, value):
        self.field = field
        self.value = value

    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other.field is not self.field:
                raise TypeError(f"cannot mix {self.field!r} and {other.field!r}")
            return other.value
        if isinstance(other, (int, Fraction)):
            return self.field.from_int(other)
        return None

    def __add__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return Scalar(self.field, self.field.add(self.value, v))

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return Scalar(self.field, self.field.sub(self.value, v))

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return Scalar(self.field, self.field.sub(v, self.value))

    def __mul__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return Scalar(self.field, self.field.mul(self.value, v))

    __rmul__ = __mul__

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.value))

    def inverse(self) -> Scalar:
        return Scalar(self.field, self.field.inv(self.value))

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return Scalar(self.field, self.field.mul(self.value, self.field.inv(v)))

    def __rtruediv__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return Scalar(self.field, self.field.mul(v, self.field.inv(self.value)))

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = self.field.one
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def is_zero(self) -> bool:
        return self.value == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return self.value == v

    def __hash__(self):
        return hash((id(self.field), self.value))

    def __repr__(self):
        return f"{self.value}"

    def to_json(self) -> str:
        return str(self.value)


def require_nonzero(*values, what: str = "subexpression"):
    """Raise Degenerate if any value is zero."""
    for v in values:
        if v == 0:
            raise Degenerate(f"{what} vanished")


# ---------------------------------------------------------------------------
# truncated power series in o, and dual numbers


class Jet:
    """Truncated power series c0 + c1 o + ... + c_{n-1} o^{n-1} over any ring."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        self.coeffs = tuple(coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @classmethod
    def const(cls, c, order: int) -> Jet:
        return cls((c,) + tuple(c * 0 for _ in range(order - 1)))

    def _lift(self, other):
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ValueError("jet orders differ")
            return other.coeffs
        zero = self.coeffs[0] * 0
        return (zero + other,) + (zero,) * (self.order - 1)

    def _new(self, coeffs):
        return type(self)(coeffs)

    def __add__(self, other):
        oc = self._lift(other)
        return self._new(a + b for a, b in zip(self.coeffs, oc))

    __radd__ = __add__

    def __sub__(self, other):
        oc = self._lift(other)
        return self._new(a - b for a, b in zip(self.coeffs, oc))

    def __rsub__(self, other):
        oc = self._lift(other)
        return self._new(b - a for a, b in zip(self.coeffs, oc))

    def __neg__(self):
        return self._new(-a for a in self.coeffs)

    def __mul__(self, other):
        oc = self._lift(other)
        n = self.order
        out = []
        for k in range(n):
            acc = self.coeffs[0] * oc[k]
            for i in range(1, k + 1):
                acc = acc + self.coeffs[i] * oc[k - i]
            out.append(acc)
        return self._new(out)

    __rmul__ = __mul__

    def shift_down(self, m: int) -> Jet:
        """Divide by o^m; the m lowest coefficients must vanish.  Order drops by m."""
        if any(c != 0 for c in self.coeffs[:m]):
            raise Degenerate(f"jet is not divisible by o^{m}")
        return Jet(self.coeffs[m:])

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Jet):
            return self.coeffs == other.coeffs
        return self.coeffs == tuple(self._lift(other))

    __hash__ = None

    def __repr__(self):
        return " + ".join(f"({c})o^{i}" for i, c in enumerate(self.coeffs))


class Dual(Jet):
    """a + b*o with o^2 = 0."""

    __slots__ = ()

    def __init__(self, a, b=None):
        if b is None:
            a, b = tuple(a)
        super().__init__((a, b))

    def _new(self, coeffs):
        return Dual(*tuple(coeffs))

    @property
    def a(self):
        return self.coeffs[0]

    @property
    def b(self):
        return self.coeffs[1]

    def inverse(self) -> Dual:
        return dual_invert(self)

    def __truediv__(self, other):
        if not isinstance(other, Dual):
            other = Dual(other, other * 0)
        return self * other.inverse()

    def __repr__(self):
        return f"{self.a} + {self.b}*o"


def dual_invert(d: Dual) -> Dual:
    """(a + b o)^-1 = a^-1 - a^-2 b o; requires a != 0."""
    if d.a == 0:
        raise NotInvertible("dual number with zero constant part")
    ainv = d.a.inverse()
    return Dual(ainv, -(ainv * ainv * d.b))


# ---------------------------------------------------------------------------
# characteristic-2 lift


class Lift4:
    """Element of the Galois ring (Z/4)[x]/(f~), a lift of GF(2^k).

    Used to evaluate integer polynomial identities in characteristic 2 when
    every term carries an overall factor of 2 over the integers.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: BinaryField, coeffs: Iterable[int]):
        self.field = field
        self.coeffs = tuple(c % 4 for c in coeffs)

    @classmethod
    def of(cls, x: Scalar) -> Lift4:
        k = x.field.k
        return cls(x.field, [(x.value >> i) & 1 for i in range(k)])

    @classmethod
    def integer(cls, field: BinaryField, n: int) -> Lift4:
        return cls(field, [n] + [0] * (field.k - 1))

    def _other(self, other):
        if isinstance(other, Lift4):
            return other.coeffs
        if isinstance(other, int):
            return (other % 4,) + (0,) * (self.field.k - 1)
        return None

    def __add__(self, other):
        oc = self._other(other)
        if oc is None:
            return NotImplemented
        return Lift4(self.field, (a + b for a, b in zip(self.coeffs, oc)))

    __radd__ = __add__

    def __sub__(self, other):
        oc = self._other(other)
        if oc is None:
            return NotImplemented
        return Lift4(self.field, (a - b for a, b in zip(self.coeffs, oc)))

    def __rsub__(self, other):
        oc = self._other(other)
        if oc is None:
            return NotImplemented
        return Lift4(self.field, (b - a for a, b in zip(self.coeffs, oc)))

    def __neg__(self):
        return Lift4(self.field, (-a for a in self.coeffs))

    def __mul__(self, other):
        oc = self._other(other)
        if oc is None:
            return NotImplemented
        k = self.field.k
        prod = [0] * (2 * k - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(oc):
                    if b:
                        prod[i + j] += a * b
        # x^k = -(f - x^k), the lifted reduction polynomial has 0/1 coefficients
        tail = [(self.field.poly >> i) & 1 for i in range(k)]
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[d] % 4
            if c:
                for i, t in enumerate(tail):
                    if t:
                        prod[d - k + i] -= c * t
        return Lift4(self.field, prod[:k])

    __rmul__ = __mul__

    def __eq__(self, other):
        oc = self._other(other)
        if oc is None:
            return NotImplemented
        return self.coeffs == tuple(oc)

    __hash__ = None

    def reduce(self) -> Scalar:
        """Reduction mod 2 to GF(2^k)."""
        return Scalar(self.field, sum((c & 1) << i for i, c in enumerate(self.coeffs)))

    def halve(self) -> Scalar:
        """(self / 2) mod 2; self must be divisible by 2."""
        if any(c & 1 for c in self.coeffs):
            raise ArithmeticError("lifted value is not divisible by 2")
        return Scalar(self.field, sum(((c >> 1) & 1) << i for i, c in enumerate(self.coeffs)))

    def __repr__(self):
        return f"Lift4{self.coeffs}"
