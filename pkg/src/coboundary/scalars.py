"""Exact scalars: rational functions in a formal real parameter ``q`` whose
coefficients live in a cyclotomic field Q(zeta_m).

Rational coefficients are stored as :class:`gmpy2.mpq`; an element that needs a
root of unity is a :class:`CycloRational`.  Every value is kept in a canonical
form so that equality is a plain comparison of representations.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Union

from gmpy2 import mpq

MPQ = type(mpq())

__all__ = [
    "CycloRational",
    "Scalar",
    "ScalarZeroDivisionError",
    "ScalarParseError",
    "scalar_arith",
    "conjugate",
    "epsilon_for",
    "zeta",
    "Q",
    "ZERO",
    "ONE",
    "parse_scalar",
    "scalar_to_str",
    "mpq",
]


class ScalarZeroDivisionError(ZeroDivisionError):
    pass


class ScalarParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# cyclotomic fields
# ---------------------------------------------------------------------------


def _normal_order(m: int) -> int:
    """Q(zeta_m) == Q(zeta_2m) for odd m; pick the even representative, and 1 for Q."""
    if m <= 0:
        raise ValueError(f"cyclotomic order must be positive, got {m}")
    if m in (1, 2):
        return 1
    return 2 * m if m % 2 else m


def _int_poly_divexact(a: list[int], b: list[int]) -> list[int]:
    # b monic, exact division
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = a[k + len(b) - 1]
        out[k] = c
        if c:
            for i, bi in enumerate(b):
                a[k + i] -= c * bi
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_m, lowest degree first."""
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num = _int_poly_divexact(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _phi(m: int) -> int:
    return len(cyclotomic_polynomial(m)) - 1


def _reduce_power_basis(m: int, coeffs: dict[int, MPQ] | list) -> list:
    """Reduce sum c_k zeta_m^k into the power basis 1..zeta^(phi-1)."""
    cyc = cyclotomic_polynomial(m)
    deg = len(cyc) - 1
    acc = [mpq(0)] * max(m, deg)
    items = coeffs.items() if isinstance(coeffs, dict) else enumerate(coeffs)
    for k, c in items:
        if c:
            acc[k % m] += c
    for k in range(len(acc) - 1, deg - 1, -1):
        c = acc[k]
        if c:
            base = k - deg
            for i in range(deg):
                if cyc[i]:
                    acc[base + i] -= c * cyc[i]
            acc[k] = mpq(0)
    return acc[:deg]


def _solve_rational(columns: list[list], target: list):
    """Solve sum x_k columns[k] == target over Q; None when inconsistent."""
    rows = len(target)
    ncol = len(columns)
    mat = [[columns[k][r] for k in range(ncol)] + [target[r]] for r in range(rows)]
    piv_cols = []
    r = 0
    for c in range(ncol):
        p = next((i for i in range(r, rows) if mat[i][c]), None)
        if p is None:
            continue
        mat[r], mat[p] = mat[p], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(rows):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        piv_cols.append(c)
        r += 1
    if any(mat[i][ncol] for i in range(r, rows)):
        return None
    sol = [mpq(0)] * ncol
    for i, c in enumerate(piv_cols):
        sol[c] = mat[i][ncol]
    return sol


class CycloRational:
    """Element of Q(zeta_m) in the power basis, reduced modulo Phi_m.

    Instances are always canonical: the order is the smallest admissible one
    whose field contains the value, and purely rational values are never
    wrapped (the constructors hand back an ``mpq`` instead).
    """

    __slots__ = ("order", "coeffs", "_hash")

    def __init__(self, order: int, coeffs: tuple):
        self.order = order
        self.coeffs = coeffs
        self._hash = None

    # construction -------------------------------------------------------

    @staticmethod
    def make(order: int, coeffs) -> Union["CycloRational", MPQ]:
        items = coeffs.items() if isinstance(coeffs, dict) else enumerate(coeffs)
        norm = _normal_order(order)
        if norm == 1:
            sign = -1 if order == 2 else 1
            return sum((mpq(c) * sign ** (k % 2) for k, c in items), mpq(0))
        if norm != order:
            items = [(k * (norm // order), c) for k, c in items]
        red = _reduce_power_basis(norm, dict(items))
        order = norm
        return CycloRational._lower(order, red)

    @staticmethod
    def root(m: int, k: int = 1) -> Union["CycloRational", MPQ]:
        """zeta_m ** k with zeta_m = exp(2 pi i / m)."""
        k %= m
        if m == 2:
            return mpq(1) if k == 0 else mpq(-1)
        if m % 2 == 1 and m > 1:
            # zeta_m = zeta_{2m}^2
            return CycloRational.make(2 * m, {2 * k: mpq(1)})
        return CycloRational.make(m, {k: mpq(1)})

    @staticmethod
    def _lower(order: int, red: list):
        if not any(red[1:]):
            return mpq(red[0]) if red else mpq(0)
        for d in _candidate_suborders(order):
            step = order // d
            basis = [_reduce_power_basis(order, {k * step: mpq(1)}) for k in range(_phi(d))]
            sol = _solve_rational(basis, red)
            if sol is not None:
                return CycloRational(d, tuple(sol))
        return CycloRational(order, tuple(red))

    # arithmetic ---------------------------------------------------------

    def _lift(self, order: int) -> list:
        step = order // self.order
        return _reduce_power_basis(order, {k * step: c for k, c in enumerate(self.coeffs)})

    @staticmethod
    def _pair(a, b):
        ma = a.order if isinstance(a, CycloRational) else 1
        mb = b.order if isinstance(b, CycloRational) else 1
        m = _normal_order(ma * mb // gcd(ma, mb))
        return m, _as_vector(a, m), _as_vector(b, m)

    def __add__(self, other):
        if not isinstance(other, (CycloRational, MPQ, int)):
            return NotImplemented
        m, x, y = CycloRational._pair(self, mpq(other) if isinstance(other, int) else other)
        return CycloRational.make(m, [a + b for a, b in zip(x, y)])

    __radd__ = __add__

    def __neg__(self):
        return CycloRational(self.order, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (MPQ, int)):
            if not other:
                return mpq(0)
            return CycloRational(self.order, tuple(c * other for c in self.coeffs))
        if not isinstance(other, CycloRational):
            return NotImplemented
        m, x, y = CycloRational._pair(self, other)
        prod: dict[int, MPQ] = {}
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        prod[i + j] = prod.get(i + j, mpq(0)) + a * b
        return CycloRational.make(m, prod)

    __rmul__ = __mul__

    def inverse(self):
        m = self.order
        # extended Euclid in Q[x]/(Phi_m)
        cyc = [mpq(c) for c in cyclotomic_polynomial(m)]
        a = list(self.coeffs)
        r0, r1 = _strip(cyc), _strip(a)
        s0, s1 = [], [mpq(1)]
        while len(r1) > 1:
            qt, rem = _divmod_q(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _strip(_sub_q(s0, _mul_q(qt, s1)))
        # r1 is a nonzero constant
        c = r1[0]
        return CycloRational.make(m, [x / c for x in s1])

    def __truediv__(self, other):
        if isinstance(other, (MPQ, int)):
            if not other:
                raise ScalarZeroDivisionError("division by zero")
            return CycloRational(self.order, tuple(c / other for c in self.coeffs))
        if not isinstance(other, CycloRational):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def conjugate(self):
        m = self.order
        return CycloRational.make(m, {(m - k) % m: c for k, c in enumerate(self.coeffs)})

    def __bool__(self):
        return True  # canonical instances are never zero

    def __eq__(self, other):
        if isinstance(other, CycloRational):
            return self.order == other.order and self.coeffs == other.coeffs
        return False

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.order, self.coeffs))
        return self._hash

    def __repr__(self):
        return f"CycloRational({_coeff_str(self)})"


@lru_cache(maxsize=None)
def _candidate_suborders(order: int) -> tuple[int, ...]:
    out = set()
    for d in range(2, order):
        if order % d == 0:
            nd = _normal_order(d)
            if nd != 1 and nd != order and order % nd == 0:
                out.add(nd)
    return tuple(sorted(out))


def _as_vector(x, m: int) -> list:
    if isinstance(x, CycloRational):
        return x._lift(m)
    vec = [mpq(0)] * _phi(m)
    vec[0] = mpq(x)
    return vec


def _strip(p: list) -> list:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def _sub_q(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]


def _mul_q(a, b):
    if not a or not b:
        return []
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _divmod_q(a, b):
    a = list(a)
    out = [mpq(0)] * max(len(a) - len(b) + 1, 1)
    lb = b[-1]
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] / lb
        out[k] = c
        if c:
            for i, y in enumerate(b):
                a[k + i] -= c * y
    return _strip(out), _strip(a[: len(b) - 1])


def _coeff_conj(c):
    return c.conjugate() if isinstance(c, CycloRational) else c


# ---------------------------------------------------------------------------
# univariate polynomials over the coefficient field, lowest degree first
# ---------------------------------------------------------------------------

_ONE_POLY = (mpq(1),)


def _p_trim(p: list) -> tuple:
    n = len(p)
    while n and not p[n - 1]:
        n -= 1
    return tuple(p[:n])


def _p_add_shifted(a: tuple, sa: int, b: tuple, sb: int) -> list:
    """q^sa a + q^sb b with sa, sb >= 0."""
    n = max(len(a) + sa, len(b) + sb)
    out = [mpq(0)] * n
    for i, c in enumerate(a):
        out[i + sa] = c
    for i, c in enumerate(b):
        out[i + sb] = out[i + sb] + c
    return out


def _p_mul(a: tuple, b: tuple) -> tuple:
    if not a or not b:
        return ()
    if len(a) == 1:
        c = a[0]
        return tuple(c * y for y in b)
    if len(b) == 1:
        c = b[0]
        return tuple(x * c for x in a)
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = out[i + j] + x * y
    return tuple(out)


def _p_scale(a: tuple, c) -> tuple:
    return tuple(x * c for x in a)


def _p_divmod(a: tuple, b: tuple) -> tuple[tuple, tuple]:
    if len(b) == 1:
        inv = 1 / b[0]
        return tuple(x * inv for x in a), ()
    a = list(a)
    if len(a) < len(b):
        return (), tuple(a)
    out = [mpq(0)] * (len(a) - len(b) + 1)
    inv_lead = 1 / b[-1]
    lb = len(b)
    for k in range(len(out) - 1, -1, -1):
        c = a[k + lb - 1]
        if c:
            c = c * inv_lead
            out[k] = c
            for i in range(lb):
                if b[i]:
                    a[k + i] = a[k + i] - c * b[i]
    return _p_trim(out), _p_trim(a[: lb - 1])


def _p_gcd(a: tuple, b: tuple) -> tuple:
    """Monic gcd."""
    while b:
        _, r = _p_divmod(a, b)
        a, b = b, r
    if not a:
        return ()
    inv = 1 / a[-1]
    return tuple(x * inv for x in a)


def _p_strip_q(p: tuple) -> tuple[int, tuple]:
    k = 0
    while k < len(p) and not p[k]:
        k += 1
    return k, p[k:]


# ---------------------------------------------------------------------------
# the scalar field Q(zeta)(q)
# ---------------------------------------------------------------------------


class Scalar:
    """Element of Q(zeta_m)(q), stored as ``q**v * num(q) / den(q)``.

    Canonical form: ``num`` and ``den`` have nonzero constant terms,
    ``den[0] == 1`` and ``gcd(num, den) == 1``.  Zero is ``v=0, num=()``.
    """

    __slots__ = ("v", "num", "den", "_hash")

    def __init__(self, v: int, num: tuple, den: tuple = _ONE_POLY):
        self.v = v
        self.num = num
        self.den = den
        self._hash = None

    # constructors -------------------------------------------------------

    @classmethod
    def coerce(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, (int, MPQ, Fraction)):
            c = mpq(x)
            return cls(0, (c,)) if c else ZERO
        if isinstance(x, CycloRational):
            return cls(0, (x,))
        if isinstance(x, str):
            return parse_scalar(x)
        raise TypeError(f"cannot convert {type(x).__name__} to Scalar")

    @classmethod
    def from_laurent(cls, coeffs: dict[int, object]) -> "Scalar":
        """Build sum c_k q^k from an exponent -> coefficient map."""
        coeffs = {k: c for k, c in coeffs.items() if c}
        if not coeffs:
            return ZERO
        lo, hi = min(coeffs), max(coeffs)
        num = [mpq(0)] * (hi - lo + 1)
        for k, c in coeffs.items():
            num[k - lo] = c if isinstance(c, CycloRational) else mpq(c)
        return cls(lo, tuple(num))

    @staticmethod
    def _normalize(v: int, num, den) -> "Scalar":
        num = _p_trim(list(num))
        if not num:
            return ZERO
        den = _p_trim(list(den))
        a, num = _p_strip_q(num)
        b, den = _p_strip_q(den)
        v += a - b
        if len(den) > 1 and len(num) > 1:
            g = _p_gcd(num, den)
            if len(g) > 1:
                num = _p_divmod(num, g)[0]
                den = _p_divmod(den, g)[0]
        c = den[0]
        if c != 1:
            inv = 1 / c
            num = _p_scale(num, inv)
            den = _p_scale(den, inv)
        return Scalar(v, num, den)

    # predicates -----------------------------------------------------------

    def __bool__(self):
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    def is_laurent(self) -> bool:
        return len(self.den) == 1

    def is_constant(self) -> bool:
        return self.v == 0 and len(self.num) <= 1 and len(self.den) == 1

    # arithmetic -------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        if not self.num:
            return other
        if not other.num:
            return self
        v = min(self.v, other.v)
        if self.den == other.den:
            n = _p_add_shifted(self.num, self.v - v, other.num, other.v - v)
            if len(self.den) == 1:
                n = _p_trim(n)
                if not n:
                    return ZERO
                a, n = _p_strip_q(n)
                return Scalar(v + a, n)
            return Scalar._normalize(v, n, self.den)
        n = _p_add_shifted(
            _p_mul(self.num, other.den), self.v - v, _p_mul(other.num, self.den), other.v - v
        )
        return Scalar._normalize(v, n, _p_mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        if not self.num:
            return self
        return Scalar(self.v, tuple(-c for c in self.num), self.den)

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Scalar.coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, (int, MPQ)):
                if not other or not self.num:
                    return ZERO
                return Scalar(self.v, _p_scale(self.num, other), self.den)
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        if not self.num or not other.num:
            return ZERO
        v = self.v + other.v
        if len(self.den) == 1 and len(other.den) == 1:
            return Scalar(v, _p_mul(self.num, other.num))
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        if len(d2) > 1 and len(n1) > 1:
            g = _p_gcd(n1, d2)
            if len(g) > 1:
                n1, d2 = _p_divmod(n1, g)[0], _p_divmod(d2, g)[0]
        if len(d1) > 1 and len(n2) > 1:
            g = _p_gcd(n2, d1)
            if len(g) > 1:
                n2, d1 = _p_divmod(n2, g)[0], _p_divmod(d1, g)[0]
        num = _p_mul(n1, n2)
        den = _p_mul(d1, d2)
        c = den[0]
        if c != 1:
            inv = 1 / c
            num, den = _p_scale(num, inv), _p_scale(den, inv)
        return Scalar(v, num, den)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self.num:
            raise ScalarZeroDivisionError("division by zero scalar")
        c = self.num[0]
        inv = 1 / c
        return Scalar(-self.v, _p_scale(self.den, inv), _p_scale(self.num, inv))

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "Scalar":
        return Scalar(
            self.v,
            tuple(_coeff_conj(c) for c in self.num),
            tuple(_coeff_conj(c) for c in self.den),
        )

    # specialization --------------------------------------------------------

    def at_q_one(self) -> "Scalar":
        """Value at q = 1 (used only for classical-limit sanity checks)."""
        n = sum(self.num, mpq(0))
        d = sum(self.den, mpq(0))
        if not d:
            raise ScalarZeroDivisionError(f"{self} has a pole at q = 1")
        return Scalar._normalize(0, (n,), (d,))

    # comparison --------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self.v == other.v and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.v, self.num, self.den))
        return self._hash

    # text ----------------------------------------------------------------

    def __str__(self):
        return scalar_to_str(self)

    def __repr__(self):
        return f"Scalar('{scalar_to_str(self)}')"


ZERO = Scalar(0, ())
ONE = Scalar(0, (mpq(1),))
Q = Scalar(1, (mpq(1),))


def zeta(m: int, k: int = 1) -> Scalar:
    """The root of unity exp(2 pi i k / m) as a Scalar."""
    return Scalar.coerce(CycloRational.root(m, k))


def scalar_arith(a, b, op: str) -> Scalar:
    a, b = Scalar.coerce(a), Scalar.coerce(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown scalar operation {op!r}")


def conjugate(a) -> Scalar:
    return Scalar.coerce(a).conjugate()


def epsilon_for(n: int) -> Scalar:
    """Root of unity with eps**n == (-1)**(n(n-1)/2), smallest argument first."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if (n * (n - 1) // 2) % 2 == 0:
        return ONE
    return zeta(2 * n)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _rat_str(c: MPQ) -> str:
    return str(c)


def _coeff_terms(c) -> list[tuple[MPQ, str]]:
    """Split a coefficient into (rational, root-symbol) pairs."""
    if isinstance(c, CycloRational):
        out = []
        for k, x in enumerate(c.coeffs):
            if x:
                sym = "" if k == 0 else (f"z{c.order}" if k == 1 else f"z{c.order}^{k}")
                out.append((x, sym))
        return out
    return [(c, "")]


def _coeff_str(c) -> str:
    parts = []
    for x, sym in _coeff_terms(c):
        mag = abs(x)
        if sym:
            body = sym if mag == 1 else f"{_rat_str(mag)}*{sym}"
        else:
            body = _rat_str(mag)
        parts.append(("-" if x < 0 else "+", body))
    return _join(parts)


def _join(parts: list[tuple[str, str]]) -> str:
    if not parts:
        return "0"
    sign, body = parts[0]
    s = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


def _poly_str(p: tuple, shift: int) -> str:
    parts = []
    for k, c in enumerate(p):
        if not c:
            continue
        e = k + shift
        qsym = "" if e == 0 else ("q" if e == 1 else f"q^{e}")
        terms = _coeff_terms(c)
        if len(terms) == 1:
            x, sym = terms[0]
            mag = abs(x)
            factors = [f for f in (None if (mag == 1 and (sym or qsym)) else _rat_str(mag), sym, qsym) if f]
            parts.append(("-" if x < 0 else "+", "*".join(factors)))
        else:
            body = "(" + _coeff_str(c) + ")"
            parts.append(("+", body + (f"*{qsym}" if qsym else "")))
    return _join(parts)


def scalar_to_str(s: Scalar) -> str:
    """Canonical text, e.g. ``(1 - q^2)/(q)`` or ``z4``."""
    if not s.num:
        return "0"
    num = _poly_str(s.num, max(s.v, 0))
    den_shift = max(-s.v, 0)
    if len(s.den) == 1 and den_shift == 0:
        return num
    den = _poly_str(s.den, den_shift)
    return f"({num})/({den})"


_TOKEN = re.compile(r"\s*(?:(\d+)|(q)|z(\d+)|([-+*/^()]))")


def parse_scalar(text: str) -> Scalar:
    """Parse the textual form produced by :func:`scalar_to_str` (and the usual
    arithmetic expressions in ``q`` and ``zN``)."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ScalarParseError(f"unexpected character at {pos} in {text!r}")
        pos = m.end()
        if m.group(1):
            tokens.append(("num", int(m.group(1))))
        elif m.group(2):
            tokens.append(("q", None))
        elif m.group(3):
            tokens.append(("z", int(m.group(3))))
        else:
            tokens.append((m.group(4), None))
    if not tokens:
        raise ScalarParseError("empty scalar expression")
    parser = _Parser(tokens, text)
    value = parser.expr()
    if parser.i != len(tokens):
        raise ScalarParseError(f"trailing input in {text!r}")
    return value


class _Parser:
    def __init__(self, tokens, text):
        self.t = tokens
        self.i = 0
        self.text = text

    def peek(self):
        return self.t[self.i][0] if self.i < len(self.t) else None

    def take(self, kind=None):
        if self.i >= len(self.t):
            raise ScalarParseError(f"unexpected end of {self.text!r}")
        tok = self.t[self.i]
        if kind is not None and tok[0] != kind:
            raise ScalarParseError(f"expected {kind!r} in {self.text!r}")
        self.i += 1
        return tok

    def expr(self):
        v = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def term(self):
        v = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()[0]
            rhs = self.unary()
            v = v * rhs if op == "*" else v / rhs
        return v

    def unary(self):
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            sign = 1
            if self.peek() in ("-", "+"):
                sign = -1 if self.take()[0] == "-" else 1
            exp = self.take("num")[1]
            return base ** (sign * exp)
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return Scalar.coerce(val)
        if kind == "q":
            return Q
        if kind == "z":
            return zeta(val)
        if kind == "(":
            v = self.expr()
            self.take(")")
            return v
        raise ScalarParseError(f"unexpected token {kind!r} in {self.text!r}")
