"""Exact arithmetic in finite fields F_q, q = p^k <= 2^20.

Elements are canonical integers in ``[0, q)``: the base-``p`` digits of the
integer are the polynomial coefficients (digit ``i`` <-> ``x^i``), so for
``p = 2`` the integer is simply the coefficient bit pattern.

Two arithmetic paths exist on purpose:

* scalar reference arithmetic (polynomial multiplication and reduction),
  used by :class:`FieldElem` and the module-level ``field_*`` functions;
* vectorized numpy arithmetic driven by discrete log/antilog tables, used by
  the graph constructions.

The test-suite checks one against the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, UsageError

__all__ = [
    "GF2_IRREDUCIBLE",
    "MAX_ORDER",
    "FieldSpec",
    "FieldElem",
    "field_add",
    "field_mul",
    "field_square_roots",
    "is_irreducible",
]

MAX_ORDER = 1 << 20
EXHAUSTIVE_SQRT_LIMIT = 1 << 10

# Fixed low-weight irreducible polynomials over GF(2), given as the exponents
# with nonzero coefficients.  Every entry is re-checked by the test-suite.
GF2_IRREDUCIBLE = {
    2: (2, 1, 0),
    3: (3, 1, 0),
    4: (4, 1, 0),
    5: (5, 2, 0),
    6: (6, 1, 0),
    7: (7, 1, 0),
    8: (8, 4, 3, 1, 0),
    9: (9, 4, 0),
    10: (10, 3, 0),
    11: (11, 2, 0),
    12: (12, 3, 0),
    13: (13, 4, 3, 1, 0),
    14: (14, 5, 0),
    15: (15, 1, 0),
    16: (16, 5, 3, 1, 0),
    17: (17, 3, 0),
    18: (18, 3, 0),
    19: (19, 5, 2, 1, 0),
    20: (20, 3, 0),
}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise ConfigurationError(f"field order must be >= 2, got {q}")
    p = 2
    while q % p:
        p += 1
    k, rest = 0, q
    while rest % p == 0:
        rest //= p
        k += 1
    if rest != 1:
        raise ConfigurationError(f"{q} is not a prime power")
    return p, k


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# --- polynomials over F_p as coefficient lists, lowest degree first ---------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim(list(a))
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def _pmulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _pmod(out, m, p)


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def is_irreducible(coeffs, p: int) -> bool:
    """Ben-Or irreducibility test for a polynomial over F_p (low-first coefficients)."""
    f = _trim(list(coeffs))
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    x = [0, 1]
    power = x
    for _ in range(k // 2):
        # power <- power^p mod f, i.e. x^(p^i)
        acc = [1]
        base, e = power, p
        while e:
            if e & 1:
                acc = _pmulmod(acc, base, f, p)
            base = _pmulmod(base, base, f, p)
            e >>= 1
        power = acc
        g = _pgcd(f, _psub(power, x, p), p)
        if len(g) > 1:
            return False
    return True


def _smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    # Monic degree-k polynomials in lexicographic order of the lower coefficients.
    for low in range(p**k):
        coeffs = [(low // p**i) % p for i in range(k)] + [1]
        if coeffs[0] == 0:
            continue
        if is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise ConfigurationError(f"no irreducible polynomial of degree {k} over F_{p}")


def _digits(v: int, p: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        v, d = divmod(v, p)
        out.append(d)
    return _trim(out)


def _undigits(d: list[int], p: int) -> int:
    v = 0
    for c in reversed(d):
        v = v * p + c
    return v


@dataclass(frozen=True)
class FieldSpec:
    """A finite field F_q with q = characteristic ** extension_degree.

    ``modulus`` lists the coefficients (lowest degree first, monic) of the
    fixed irreducible polynomial; it is empty for prime fields.  Use
    :meth:`of_order` rather than constructing directly.
    """

    characteristic: int
    extension_degree: int = 1
    modulus: tuple[int, ...] = ()

    def __post_init__(self):
        p, k = self.characteristic, self.extension_degree
        if not _is_prime(p):
            raise ConfigurationError(f"characteristic {p} is not prime")
        if k < 1:
            raise ConfigurationError("extension degree must be positive")
        if p**k > MAX_ORDER:
            raise ConfigurationError(f"q = {p}^{k} exceeds the supported maximum 2^20")
        if k == 1:
            if self.modulus:
                raise ConfigurationError("prime fields carry an empty modulus")
        elif len(self.modulus) != k + 1 or self.modulus[-1] != 1:
            raise ConfigurationError(f"modulus must be monic of degree {k}")

    @classmethod
    def of_order(cls, q: int) -> "FieldSpec":
        p, k = _prime_power(int(q))
        if k == 1:
            return cls(p, 1, ())
        if p == 2 and k in GF2_IRREDUCIBLE:
            exps = GF2_IRREDUCIBLE[k]
            mod = tuple(1 if i in exps else 0 for i in range(k + 1))
        else:
            mod = _smallest_irreducible(p, k)
        return cls(p, k, mod)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Inverse of :attr:`canonical` (``"p^k/modulus-hex"``)."""
        try:
            head, mod_hex = text.split("/")
            p_s, k_s = head.split("^")
            p, k = int(p_s), int(k_s)
        except ValueError as exc:
            raise ConfigurationError(f"malformed field string {text!r}") from exc
        if k == 1:
            return cls(p, 1, ())
        mod_int = int(mod_hex, 16)
        return cls(p, k, tuple((mod_int // p**i) % p for i in range(k + 1)))

    @property
    def q(self) -> int:
        return self.characteristic**self.extension_degree

    @property
    def canonical(self) -> str:
        mod_hex = ""
        if self.modulus:
            mod_hex = format(_undigits(list(self.modulus), self.characteristic), "x")
        return f"{self.characteristic}^{self.extension_degree}/{mod_hex}"

    def __str__(self) -> str:
        return self.canonical

    # -- element construction ------------------------------------------------

    def __call__(self, value: int) -> "FieldElem":
        return FieldElem(int(value), self)

    @property
    def zero(self) -> "FieldElem":
        return FieldElem(0, self)

    @property
    def one(self) -> "FieldElem":
        return FieldElem(1, self)

    def elements(self):
        return (FieldElem(v, self) for v in range(self.q))

    # -- scalar reference arithmetic on canonical ints ------------------------

    def _check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise UsageError(f"{a} is not a canonical element of F_{self.q}")
        return a

    def add(self, a: int, b: int) -> int:
        p, k = self.characteristic, self.extension_degree
        if p == 2:
            return a ^ b
        if k == 1:
            return (a + b) % p
        out, place = 0, 1
        for _ in range(k):
            a, da = divmod(a, p)
            b, db = divmod(b, p)
            out += ((da + db) % p) * place
            place *= p
        return out

    def neg(self, a: int) -> int:
        p, k = self.characteristic, self.extension_degree
        if p == 2:
            return a
        if k == 1:
            return (-a) % p
        out, place = 0, 1
        for _ in range(k):
            a, da = divmod(a, p)
            out += ((-da) % p) * place
            place *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        p, k = self.characteristic, self.extension_degree
        if k == 1:
            return a * b % p
        if p == 2:
            mod = _undigits(list(self.modulus), 2)
            r = 0
            while b:
                if b & 1:
                    r ^= a
                b >>= 1
                a <<= 1
                if (a >> k) & 1:
                    a ^= mod
            return r
        prod = _pmulmod(_digits(a, p, k), _digits(b, p, k), list(self.modulus), p)
        return _undigits(prod, p)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        acc = 1
        while e:
            if e & 1:
                acc = self.mul(acc, a)
            a = self.mul(a, a)
            e >>= 1
        return acc

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in a field")
        return self.pow(a, self.q - 2)

    # -- vectorized arithmetic -------------------------------------------------

    @cached_property
    def generator(self) -> int:
        """Smallest primitive element (generator of the multiplicative group)."""
        q = self.q
        if q == 2:
            return 1
        factors = _prime_factors(q - 1)
        for g in range(2, q):
            if all(self.pow(g, (q - 1) // f) != 1 for f in factors):
                return g
        raise ConfigurationError("no primitive element found")  # unreachable for a field

    @cached_property
    def _exp_log(self) -> tuple[np.ndarray, np.ndarray]:
        q = self.q
        g = self.generator
        exp = np.empty(2 * (q - 1), dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        v = 1
        for i in range(q - 1):
            exp[i] = v
            log[v] = i
            v = self.mul(v, g)
        exp[q - 1 :] = exp[: q - 1]
        return exp, log

    def add_arr(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        p, k = self.characteristic, self.extension_degree
        if p == 2:
            return a ^ b
        if k == 1:
            return (a + b) % p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        place = 1
        for _ in range(k):
            out += (((a // place) % p + (b // place) % p) % p) * place
            place *= p
        return out

    def neg_arr(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        p, k = self.characteristic, self.extension_degree
        if p == 2:
            return a.copy()
        if k == 1:
            return (-a) % p
        out = np.zeros_like(a)
        place = 1
        for _ in range(k):
            out += ((-((a // place) % p)) % p) * place
            place *= p
        return out

    def sub_arr(self, a, b) -> np.ndarray:
        return self.add_arr(a, self.neg_arr(b))

    def mul_arr(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.extension_degree == 1:
            return a * b % self.characteristic
        exp, log = self._exp_log
        out = exp[log[a] + log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def square_arr(self, a) -> np.ndarray:
        return self.mul_arr(a, a)


@dataclass(frozen=True)
class FieldElem:
    """An element of a :class:`FieldSpec`, stored in canonical integer form."""

    value: int
    spec: FieldSpec

    def __post_init__(self):
        if not 0 <= self.value < self.spec.q:
            raise UsageError(f"{self.value} is not a canonical element of F_{self.spec.q}")

    def _other(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.spec != self.spec:
                raise ConfigurationError(
                    f"mixed fields: {self.spec.canonical} vs {other.spec.canonical}"
                )
            return other.value
        if isinstance(other, int):
            return other % self.spec.characteristic if self.spec.extension_degree == 1 else self.spec._check(other)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return FieldElem(self.spec.add(self.value, o), self.spec)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return FieldElem(self.spec.sub(self.value, o), self.spec)

    def __rsub__(self, other):
        o = self._other(other)
        return FieldElem(self.spec.sub(o, self.value), self.spec)

    def __neg__(self):
        return FieldElem(self.spec.neg(self.value), self.spec)

    def __mul__(self, other):
        o = self._other(other)
        return FieldElem(self.spec.mul(self.value, o), self.spec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return FieldElem(self.spec.mul(self.value, self.spec.inv(o)), self.spec)

    def __pow__(self, e: int):
        return FieldElem(self.spec.pow(self.value, int(e)), self.spec)

    def inverse(self) -> "FieldElem":
        return FieldElem(self.spec.inv(self.value), self.spec)

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"FieldElem({self.value}, F_{self.spec.q})"


def field_add(a: FieldElem, b: FieldElem) -> FieldElem:
    return a + b


def field_mul(a: FieldElem, b: FieldElem) -> FieldElem:
    return a * b


def _tonelli_shanks(r: FieldElem) -> FieldElem | None:
    spec = r.spec
    q = spec.q
    if r.value == 0:
        return spec.zero
    if r ** ((q - 1) // 2) != spec.one:
        return None
    s, odd = 0, q - 1
    while odd % 2 == 0:
        odd //= 2
        s += 1
    z = next(spec(v) for v in range(2, q) if spec(v) ** ((q - 1) // 2) != spec.one)
    m, c, t, root = s, z**odd, r**odd, r ** ((odd + 1) // 2)
    while t != spec.one:
        i, t2 = 0, t
        while t2 != spec.one:
            t2 = t2 * t2
            i += 1
        b = c ** (1 << (m - i - 1))
        m, c = i, b * b
        t, root = t * c, root * b
    return root


def field_square_roots(r: FieldElem, method: str = "auto") -> set[FieldElem]:
    """All ``s`` with ``s * s == r``.

    ``method`` is ``"exhaustive"`` (scan the field), ``"tonelli"``
    (Tonelli-Shanks for odd q, Frobenius inverse for even q) or ``"auto"``,
    which scans when q <= 2^10.
    """
    spec = r.spec
    if method == "auto":
        method = "exhaustive" if spec.q <= EXHAUSTIVE_SQRT_LIMIT else "tonelli"
    if method == "exhaustive":
        return {s for s in spec.elements() if s * s == r}
    if method != "tonelli":
        raise UsageError(f"unknown square-root method {method!r}")
    if spec.characteristic == 2:
        # squaring is a bijection; its inverse is x -> x^(q/2)
        return {r ** (spec.q // 2)}
    root = _tonelli_shanks(r)
    if root is None:
        return set()
    return {root, -root}
