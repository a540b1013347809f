"""Classical side: r-matrices on gl(n), coboundary bivector fields and their identities.

Basis convention: ``E[i][j]`` is the elementary matrix with a one at row i,
column j, flattened to the index ``i * n + j``.  A bivector ``r`` stores
``c[a, b]`` with ``r = sum c[a, b] X_a (x) X_b`` and the wedge is taken
without a factor 1/2, ``x ^ y = x (x) y - y (x) x``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .linalg import Tensor, determinant, inverse, kron, matmul, total_permutation_matrix
from .report import FAIL, PASS, CheckReport, combine
from .scalars import ONE, ZERO, Scalar, epsilon_for, mpq

__all__ = [
    "LieBasis",
    "Bivector",
    "Trivector",
    "PointBivector",
    "CoordPoly",
    "InvarianceResult",
    "standard_r",
    "schouten_square",
    "is_ad_invariant",
    "pi_minus",
    "pi_plus",
    "rho",
    "g0_matrix",
    "random_invertible",
    "sample_points",
    "left_offset",
    "lie_basis",
    "coordinate_matrix",
    "bracket_tensor",
    "cyb_tensor",
    "check_multiplicativity",
    "check_antipode",
    "check_gauge_identity",
    "check_translation",
    "check_schouten_invariance",
    "poisson_bracket",
    "jacobi_check",
    "symbolic_multiplicativity",
    "symbolic_antipode",
]


class LieBasis:
    """Elementary-matrix basis of gl(n) with its structure constants."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        self.n = n
        self.dim = n * n
        self._brackets = {}
        for a, b in itertools.product(range(self.dim), repeat=2):
            self._brackets[a, b] = self._bracket_formula(a, b)
        self._verify()

    def pair(self, a: int) -> tuple[int, int]:
        return divmod(a, self.n)

    def index(self, i: int, j: int) -> int:
        return i * self.n + j

    def label(self, a: int) -> str:
        i, j = self.pair(a)
        return f"e{i + 1}^{j + 1}"

    def matrix(self, a: int) -> Tensor:
        t = Tensor.zeros(self.n, self.n)
        t[self.pair(a)] = ONE
        return t

    def _bracket_formula(self, a: int, b: int) -> tuple[tuple[int, int], ...]:
        i, j = self.pair(a)
        k, l = self.pair(b)
        out: dict[int, int] = {}
        if j == k:
            out[self.index(i, l)] = out.get(self.index(i, l), 0) + 1
        if l == i:
            out[self.index(k, j)] = out.get(self.index(k, j), 0) - 1
        return tuple((c, s) for c, s in sorted(out.items()) if s)

    def bracket(self, a: int, b: int) -> tuple[tuple[int, int], ...]:
        """[X_a, X_b] as ((index, integer coefficient), ...)."""
        return self._brackets[a, b]

    def _verify(self):
        for (a, b), terms in self._brackets.items():
            ma, mb = self.matrix(a), self.matrix(b)
            comm = matmul(ma, mb) - matmul(mb, ma)
            expect = Tensor.zeros(self.n, self.n)
            for c, s in terms:
                expect = expect + self.matrix(c).scale(Scalar.coerce(s))
            if comm != expect:
                raise AssertionError(f"structure constants wrong at {self.label(a)}, {self.label(b)}")


_BASES: dict[int, LieBasis] = {}


def lie_basis(n: int) -> LieBasis:
    if n not in _BASES:
        _BASES[n] = LieBasis(n)
    return _BASES[n]


class Bivector:
    """Antisymmetric element of gl(n) (x) gl(n)."""

    def __init__(self, basis: LieBasis, comps: Tensor):
        N = basis.dim
        if comps.shape != (N, N):
            raise ValueError(f"bivector components need shape {(N, N)}, got {comps.shape}")
        for a in range(N):
            if comps[a, a]:
                raise ValueError(f"diagonal component ({basis.label(a)}, {basis.label(a)}) is nonzero")
            for b in range(a + 1, N):
                if comps[a, b] != -comps[b, a]:
                    raise ValueError(f"components at ({basis.label(a)}, {basis.label(b)}) are not antisymmetric")
        self.basis = basis
        self.comps = comps

    @classmethod
    def from_wedges(cls, basis: LieBasis, wedges: Iterable[tuple[int, int, object]]) -> "Bivector":
        """Sum of ``coeff * X_a ^ X_b`` over the given triples."""
        N = basis.dim
        t = Tensor.zeros(N, N)
        for a, b, c in wedges:
            c = Scalar.coerce(c)
            t[a, b] = t[a, b] + c
            t[b, a] = t[b, a] - c
        return cls(basis, t)

    @classmethod
    def zero(cls, basis: LieBasis) -> "Bivector":
        return cls(basis, Tensor.zeros(basis.dim, basis.dim))

    @property
    def n(self) -> int:
        return self.basis.n

    def terms(self) -> list[tuple[int, int, Scalar]]:
        return [(a, b, c) for (a, b), c in self.comps.nonzero()]

    def scale(self, c) -> "Bivector":
        return Bivector(self.basis, self.comps.scale(Scalar.coerce(c)))

    def __add__(self, other: "Bivector") -> "Bivector":
        return Bivector(self.basis, self.comps + other.comps)

    def __sub__(self, other: "Bivector") -> "Bivector":
        return Bivector(self.basis, self.comps - other.comps)

    def __neg__(self) -> "Bivector":
        return Bivector(self.basis, -self.comps)

    def __eq__(self, other):
        return isinstance(other, Bivector) and self.basis.n == other.basis.n and self.comps == other.comps

    def conjugated(self, g: Tensor) -> "Bivector":
        """Adjoint action g X g^{-1} applied to both slots."""
        ginv = inverse(g)
        return Bivector(self.basis, _components_of(self, g, ginv, g, ginv))

    def as_matrix(self) -> Tensor:
        """sum c X_a (x) X_b as an n^2 x n^2 Kronecker matrix."""
        n = self.n
        out = Tensor.zeros(n * n, n * n)
        for a, b, c in self.terms():
            out = out + kron(self.basis.matrix(a), self.basis.matrix(b)).scale(c)
        return out


def _components_of(r: Bivector, l1: Tensor, r1: Tensor, l2: Tensor, r2: Tensor) -> Tensor:
    # coefficients of sum c (l1 X_a r1) (x) (l2 X_b r2) in the X_a (x) X_b basis
    n = r.n
    N = n * n
    out = Tensor.zeros(N, N)
    for a, b, c in r.terms():
        ma = matmul(matmul(l1, r.basis.matrix(a)), r1)
        mb = matmul(matmul(l2, r.basis.matrix(b)), r2)
        for (x, ca) in ma.nonzero():
            for (y, cb) in mb.nonzero():
                i = x[0] * n + x[1]
                j = y[0] * n + y[1]
                out[i, j] = out[i, j] + c * ca * cb
    return out


class Trivector:
    """Totally antisymmetric element of gl(n)^{(x)3}."""

    def __init__(self, basis: LieBasis, comps: Tensor):
        N = basis.dim
        if comps.shape != (N, N, N):
            raise ValueError(f"trivector components need shape {(N, N, N)}, got {comps.shape}")
        for (a, b, c), x in comps.nonzero():
            for perm, sign in _PERMS3:
                idx = tuple((a, b, c)[p] for p in perm)
                if comps[idx] != (x if sign > 0 else -x):
                    raise ValueError(f"components not antisymmetric at {idx}")
        self.basis = basis
        self.comps = comps

    @classmethod
    def wedge(cls, basis: LieBasis, a: int, b: int, c: int, coeff=1) -> "Trivector":
        N = basis.dim
        t = Tensor.zeros(N, N, N)
        coeff = Scalar.coerce(coeff)
        for perm, sign in _PERMS3:
            idx = tuple((a, b, c)[p] for p in perm)
            t[idx] = t[idx] + (coeff if sign > 0 else -coeff)
        return cls(basis, t)

    def is_zero(self) -> bool:
        return self.comps.is_zero()

    def scale(self, c) -> "Trivector":
        return Trivector(self.basis, self.comps.scale(Scalar.coerce(c)))

    def __eq__(self, other):
        return isinstance(other, Trivector) and self.comps == other.comps


def _perm_sign(p) -> int:
    s = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


_PERMS3 = [(p, _perm_sign(p)) for p in itertools.permutations(range(3))]


def standard_r(n: int) -> Bivector:
    """sum_{j<k} e_j^k ^ e_k^j on gl(n)."""
    if n < 2:
        raise ValueError(f"the standard r-matrix needs n >= 2, got {n}")
    b = lie_basis(n)
    return Bivector.from_wedges(b, [(b.index(j, k), b.index(k, j), 1) for j in range(n) for k in range(j + 1, n)])


def cyb_tensor(r: Bivector) -> Tensor:
    """[r12, r13] + [r12, r23] + [r13, r23] as a rank-3 component tensor."""
    basis = r.basis
    N = basis.dim
    out = Tensor.zeros(N, N, N)
    terms = r.terms()
    for (a, b, c1), (c, d, c2) in itertools.product(terms, repeat=2):
        k = c1 * c2
        for e, s in basis.bracket(a, c):  # [X_a, X_c] (x) X_b (x) X_d
            out[e, b, d] = out[e, b, d] + k * s
        for e, s in basis.bracket(b, c):  # X_a (x) [X_b, X_c] (x) X_d
            out[a, e, d] = out[a, e, d] + k * s
        for e, s in basis.bracket(b, d):  # X_a (x) X_c (x) [X_b, X_d]
            out[a, c, e] = out[a, c, e] + k * s
    return out


def schouten_square(r: Bivector) -> Trivector:
    """Schouten square of r, normalized as the totally antisymmetric part of the CYB sum."""
    t = cyb_tensor(r)
    N = r.basis.dim
    alt = Tensor.zeros(N, N, N)
    sixth = Scalar.coerce(mpq(1, 6))
    for idx, x in t.nonzero():
        for perm, sign in _PERMS3:
            j = tuple(idx[p] for p in perm)
            v = x * sixth
            alt[j] = alt[j] + (v if sign > 0 else -v)
    return Trivector(r.basis, alt)


@dataclass
class InvarianceResult:
    invariant: bool
    witness: dict | None = None

    def __bool__(self):
        return self.invariant


def is_ad_invariant(t: Trivector) -> InvarianceResult:
    """Test (ad_x (x) 1 (x) 1 + 1 (x) ad_x (x) 1 + 1 (x) 1 (x) ad_x) t = 0 for all basis x."""
    basis = t.basis
    N = basis.dim
    entries = list(t.comps.nonzero())
    for x in range(N):
        acc: dict[tuple[int, int, int], Scalar] = {}
        for (a, b, c), v in entries:
            for e, s in basis.bracket(x, a):
                acc[e, b, c] = acc.get((e, b, c), ZERO) + v * s
            for e, s in basis.bracket(x, b):
                acc[a, e, c] = acc.get((a, e, c), ZERO) + v * s
            for e, s in basis.bracket(x, c):
                acc[a, b, e] = acc.get((a, b, e), ZERO) + v * s
        for idx in sorted(acc):
            if acc[idx]:
                return InvarianceResult(False, {
                    "x": basis.label(x),
                    "component": [basis.label(i) for i in idx],
                    "value": acc[idx],
                })
    return InvarianceResult(True)


# ---------------------------------------------------------------------------
# bivector fields on GL(n)
# ---------------------------------------------------------------------------


class PointBivector:
    """Element of Mat(n) (x) Mat(n) attached to a base point.

    ``comps[s, t, u, v]`` is the coefficient of ``E_st (x) E_uv``.
    """

    def __init__(self, g: Tensor, comps: Tensor, check: bool = True):
        n = g.shape[0]
        if comps.shape != (n, n, n, n):
            raise ValueError(f"point bivector needs shape {(n,) * 4}, got {comps.shape}")
        self.g = g
        self.comps = comps
        if check and not self.is_antisymmetric():
            raise ValueError("point bivector is not antisymmetric under slot swap")

    @property
    def n(self) -> int:
        return self.g.shape[0]

    def is_antisymmetric(self) -> bool:
        return self.comps == -self.comps.permute_axes((2, 3, 0, 1))

    def as_kron(self) -> Tensor:
        """Matrix M[(s,u),(t,v)] so that a pure tensor A (x) B maps to kron(A, B)."""
        n = self.n
        return self.comps.permute_axes((0, 2, 1, 3)).reshape(n * n, n * n)

    @classmethod
    def from_kron(cls, g: Tensor, m: Tensor, check: bool = True) -> "PointBivector":
        n = g.shape[0]
        return cls(g, m.reshape(n, n, n, n).permute_axes((0, 2, 1, 3)), check)

    def translate(self, left: Tensor | None = None, right: Tensor | None = None) -> "PointBivector":
        """Apply V -> left V right to both slots; the base point moves the same way."""
        m = self.as_kron()
        g = self.g
        if left is not None:
            m = matmul(kron(left, left), m)
            g = matmul(left, g)
        if right is not None:
            m = matmul(m, kron(right, right))
            g = matmul(g, right)
        return PointBivector.from_kron(g, m, check=False)

    def __add__(self, other: "PointBivector") -> "PointBivector":
        return PointBivector(self.g, self.comps + other.comps, check=False)

    def __sub__(self, other: "PointBivector") -> "PointBivector":
        return PointBivector(self.g, self.comps - other.comps, check=False)

    def __neg__(self) -> "PointBivector":
        return PointBivector(self.g, -self.comps, check=False)

    def is_zero(self) -> bool:
        return self.comps.is_zero()

    def same_components(self, other: "PointBivector"):
        """First differing component as a witness dict, or None."""
        d = self.comps.first_difference(other.comps)
        if d is None:
            return None
        idx, a, b = d
        return {"component": "E{}{} (x) E{}{}".format(*(i + 1 for i in idx)), "lhs": a, "rhs": b}


def _slot_sum(r: Bivector, g: Tensor, left: bool, sign) -> Tensor:
    # components of sum c (X_a g) (x) (X_b g)  [left=False]  or  (g X_a) (x) (g X_b)  [left=True]
    n = r.n
    g_rows = g.rows()
    zero = g.data[0] * 0
    out = [zero] * n ** 4
    for a, b, c in r.terms():
        p, qq = r.basis.pair(a)
        s, t = r.basis.pair(b)
        coef = c if sign > 0 else -c
        if not left:
            # X_a g has row p equal to row qq of g; X_b g has row s equal to row t of g
            for j in range(n):
                x = g_rows[qq][j]
                if not x:
                    continue
                for l in range(n):
                    y = g_rows[t][l]
                    if y:
                        k = ((p * n + j) * n + s) * n + l
                        out[k] = out[k] + coef * x * y
        else:
            # g X_a has column qq equal to column p of g
            for i in range(n):
                x = g_rows[i][p]
                if not x:
                    continue
                for k2 in range(n):
                    y = g_rows[k2][s]
                    if y:
                        k = ((i * n + qq) * n + k2) * n + t
                        out[k] = out[k] + coef * x * y
    return Tensor((n,) * 4, out)


def _need_invertible(g: Tensor):
    if g.rank != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"base point must be square, got shape {g.shape}")
    if not determinant(g):
        raise ValueError("base point is singular")


def pi_minus(r: Bivector, g: Tensor) -> PointBivector:
    """pi(g) = r g - g r."""
    _need_invertible(g)
    return PointBivector(g, _slot_sum(r, g, False, 1) + _slot_sum(r, g, True, -1))


def pi_plus(r: Bivector, g: Tensor) -> PointBivector:
    """pi_+(g) = r g + g r."""
    _need_invertible(g)
    return PointBivector(g, _slot_sum(r, g, False, 1) + _slot_sum(r, g, True, 1))


def left_offset(a: Bivector, g: Tensor) -> PointBivector:
    """g A: the constant bivector A left-translated to g."""
    return PointBivector(g, _slot_sum(a, g, True, 1))


def rho(r: Bivector, offset: Bivector, g: Tensor) -> PointBivector:
    """rho(g) = pi(g) + g A."""
    return pi_minus(r, g) + left_offset(offset, g)


def g0_matrix(n: int) -> Tensor:
    """epsilon times the antidiagonal matrix."""
    return total_permutation_matrix(n).scale(epsilon_for(n))


def random_invertible(n: int, rng: random.Random, lo: int = -3, hi: int = 3) -> Tensor:
    while True:
        t = Tensor((n, n), [Scalar.coerce(rng.randint(lo, hi)) for _ in range(n * n)])
        if determinant(t):
            return t


def sample_points(n: int, seed: int, count: int, arity: int) -> list[tuple[Tensor, ...]]:
    rng = random.Random(seed)
    return [tuple(random_invertible(n, rng) for _ in range(arity)) for _ in range(count)]


def _matrix_json(g: Tensor) -> list[list[str]]:
    return [[str(x) for x in row] for row in g.rows()]


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def check_schouten_invariance(r: Bivector) -> CheckReport:
    sq = schouten_square(r)
    res = is_ad_invariant(sq)
    return CheckReport(
        "schouten-invariance",
        PASS if res else FAIL,
        {"n": r.n},
        res.witness,
        {"schouten_square_nonzero": not sq.is_zero()},
    )


def _sample_report(name, r, seed, points, evaluate: Callable[..., dict | None], extra=None) -> CheckReport:
    failures = []
    for k, pts in enumerate(points):
        w = evaluate(*pts)
        if w is not None:
            w = dict(w, sample=k, points=[_matrix_json(p) for p in pts])
            failures.append(w)
    params = {"n": r.n, "seed": seed, "samples": len(points)}
    if extra:
        params.update(extra)
    return CheckReport(name, FAIL if failures else PASS, params, failures[0] if failures else None,
                       {"failed_samples": len(failures)})


def check_multiplicativity(r: Bivector, samples: Sequence[tuple[Tensor, Tensor]], seed=None) -> CheckReport:
    """pi(gh) = pi(g) h + g pi(h) at each sample pair."""

    def one(g, h):
        lhs = pi_minus(r, matmul(g, h))
        rhs = pi_minus(r, g).translate(right=h) + pi_minus(r, h).translate(left=g)
        return lhs.same_components(rhs)

    return _sample_report("multiplicativity", r, seed, samples, one)


def check_antipode(r: Bivector, samples: Sequence[tuple[Tensor]], seed=None) -> CheckReport:
    """g^{-1} pi(g) g^{-1} (slotwise) equals -pi(g^{-1})."""

    def one(g):
        ginv = inverse(g)
        lhs = pi_minus(r, g).translate(left=ginv, right=ginv)
        rhs = -pi_minus(r, ginv)
        return lhs.same_components(rhs)

    return _sample_report("antipode", r, seed, samples, one)


def check_gauge_identity(r: Bivector, rho_offset: Bivector, samples: Sequence[tuple[Tensor, Tensor, Tensor]],
                         seed=None) -> CheckReport:
    """The three-point identity for rho and its two-point specializations.

    rho(xyz) = pi(x)yz + x rho(y) z - xy pi(z)      (three-point)
    rho(xy)  = pi(x)y + x rho(y)                     (z = e)
    rho(yz)  = rho(y)z - y pi(z)                     (x = e)
    """
    subs = {"three-point": [], "right-unit": [], "left-unit": []}

    def P(g):
        return pi_minus(r, g)

    def RHO(g):
        return rho(r, rho_offset, g)

    for k, (x, y, z) in enumerate(samples):
        xy = matmul(x, y)
        yz = matmul(y, z)
        xyz = matmul(xy, z)
        lhs = RHO(xyz)
        rhs = P(x).translate(right=yz) + RHO(y).translate(left=x, right=z) - P(z).translate(left=xy)
        w = lhs.same_components(rhs)
        if w:
            subs["three-point"].append(dict(w, sample=k))
        w = RHO(xy).same_components(P(x).translate(right=y) + RHO(y).translate(left=x))
        if w:
            subs["right-unit"].append(dict(w, sample=k))
        w = RHO(yz).same_components(RHO(y).translate(right=z) - P(z).translate(left=y))
        if w:
            subs["left-unit"].append(dict(w, sample=k))
    statuses = {name: FAIL if fails else PASS for name, fails in subs.items()}
    witness = None
    for name, fails in subs.items():
        if fails:
            witness = dict(fails[0], identity=name)
            break
    return CheckReport(
        "gauge-identity",
        combine(statuses.values()),
        {"n": r.n, "seed": seed, "samples": len(samples)},
        witness,
        {"identities": statuses},
    )


def check_translation(r: Bivector, g0: Tensor, samples: Sequence[tuple[Tensor]], seed=None) -> CheckReport:
    """g0 r g0^{-1} = -r,  pi_+(g0) = 0  and  pi(g g0) = pi_+(g) g0."""
    _need_invertible(g0)
    subs = {}
    witness = None
    conj = r.conjugated(g0)
    d = conj.comps.first_difference((-r).comps)
    subs["conjugation"] = PASS if d is None else FAIL
    if d is not None:
        witness = {"identity": "conjugation", "index": [r.basis.label(i) for i in d[0]], "lhs": d[1], "rhs": d[2]}
    pp = pi_plus(r, g0)
    subs["pi-plus-vanishes"] = PASS if pp.is_zero() else FAIL
    if witness is None and not pp.is_zero():
        witness = {"identity": "pi-plus-vanishes", **pp.same_components(PointBivector(g0, Tensor.zeros(*pp.comps.shape)))}
    bad = []
    for k, (g,) in enumerate(samples):
        w = pi_minus(r, matmul(g, g0)).same_components(pi_plus(r, g).translate(right=g0))
        if w:
            bad.append(dict(w, sample=k))
    subs["translated-field"] = FAIL if bad else PASS
    if witness is None and bad:
        witness = dict(bad[0], identity="translated-field")
    return CheckReport(
        "translation",
        combine(subs.values()),
        {"n": r.n, "seed": seed, "samples": len(samples), "g0": _matrix_json(g0)},
        witness,
        {"identities": subs},
    )


# ---------------------------------------------------------------------------
# commutative coordinate polynomials
# ---------------------------------------------------------------------------


class CoordPoly:
    """Commutative polynomial in ``nvars`` variables, exponent tuple -> Scalar."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms = {e: c for e, c in (terms or {}).items() if c}

    @classmethod
    def var(cls, nvars: int, k: int) -> "CoordPoly":
        e = [0] * nvars
        e[k] = 1
        return cls(nvars, {tuple(e): ONE})

    @classmethod
    def const(cls, nvars: int, c) -> "CoordPoly":
        return cls(nvars, {(0,) * nvars: Scalar.coerce(c)})

    def _lift(self, other) -> "CoordPoly":
        if isinstance(other, CoordPoly):
            return other
        return CoordPoly.const(self.nvars, other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, ZERO) + c
        return CoordPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return CoordPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, CoordPoly):
            c = Scalar.coerce(other)
            return CoordPoly(self.nvars, {e: c * x for e, x in self.terms.items()})
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, ZERO) + c1 * c2
        return CoordPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = CoordPoly.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def derivative(self, k: int) -> "CoordPoly":
        out: dict = {}
        for e, c in self.terms.items():
            if e[k]:
                e2 = list(e)
                e2[k] -= 1
                e2 = tuple(e2)
                out[e2] = out.get(e2, ZERO) + c * e[k]
        return CoordPoly(self.nvars, out)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, CoordPoly):
            other = self._lift(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            mono = "*".join(f"x{k}" + (f"^{p}" if p > 1 else "") for k, p in enumerate(e) if p)
            parts.append(f"({self.terms[e]})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def coordinate_matrix(n: int, offset: int = 0, nvars: int | None = None) -> Tensor:
    """Matrix whose (i, j) entry is the coordinate variable number offset + i*n + j."""
    nvars = nvars if nvars is not None else offset + n * n
    return Tensor((n, n), [CoordPoly.var(nvars, offset + k) for k in range(n * n)])


def bracket_tensor(r: Bivector) -> Tensor:
    """{x_ij, x_kl} as the (ij),(kl) component of pi at the generic point."""
    n = r.n
    g = coordinate_matrix(n)
    return _slot_sum(r, g, False, 1) + _slot_sum(r, g, True, -1)


def poisson_bracket(r: Bivector, f: CoordPoly, h: CoordPoly, table: Tensor | None = None) -> CoordPoly:
    n = r.n
    table = table if table is not None else bracket_tensor(r)
    N = n * n
    df = [f.derivative(k) for k in range(N)]
    dh = [h.derivative(k) for k in range(N)]
    out = CoordPoly(N)
    for a in range(N):
        if not df[a]:
            continue
        for b in range(N):
            if not dh[b]:
                continue
            i, j = divmod(a, n)
            k, l = divmod(b, n)
            c = table[i, j, k, l]
            if c:
                out = out + df[a] * dh[b] * c
    return out


def jacobi_check(r: Bivector, n: int | None = None, degree: int = 1) -> CheckReport:
    """Cyclic sum of double brackets over all triples of monomials of the given degree."""
    n = n or r.n
    if n != r.n:
        raise ValueError(f"r lives on gl({r.n}), not gl({n})")
    N = n * n
    table = bracket_tensor(r)
    monos = []
    for e in itertools.product(range(degree + 1), repeat=N):
        if sum(e) == degree:
            monos.append(CoordPoly(N, {e: ONE}))
    inner: dict = {}

    def br(j, k):
        if (j, k) not in inner:
            inner[j, k] = poisson_bracket(r, monos[j], monos[k], table)
        return inner[j, k]

    count = 0
    for i, j, k in itertools.product(range(len(monos)), repeat=3):
        count += 1
        s = (poisson_bracket(r, monos[i], br(j, k), table)
             + poisson_bracket(r, monos[j], br(k, i), table)
             + poisson_bracket(r, monos[k], br(i, j), table))
        if s:
            return CheckReport("jacobi", FAIL, {"n": n, "degree": degree},
                               {"triple": [repr(monos[i]), repr(monos[j]), repr(monos[k])], "sum": repr(s)})
    return CheckReport("jacobi", PASS, {"n": n, "degree": degree}, None, {"triples": count})


def _symbolic_pb(r: Bivector, g: Tensor) -> PointBivector:
    return PointBivector(g, _slot_sum(r, g, False, 1) + _slot_sum(r, g, True, -1), check=False)


def _adjugate2(g: Tensor) -> Tensor:
    a, b, c, d = g.data
    return Tensor((2, 2), [d, -b, -c, a])


def symbolic_multiplicativity(r: Bivector) -> CheckReport:
    """pi(gh) = pi(g)h + g pi(h) with fully symbolic g and h."""
    n = r.n
    g = coordinate_matrix(n, 0, 2 * n * n)
    h = coordinate_matrix(n, n * n, 2 * n * n)
    lhs = _symbolic_pb(r, matmul(g, h))
    rhs = _symbolic_pb(r, g).translate(right=h) + _symbolic_pb(r, h).translate(left=g)
    d = lhs.comps.first_difference(rhs.comps)
    return CheckReport("multiplicativity-symbolic", PASS if d is None else FAIL, {"n": n},
                       None if d is None else {"index": list(d[0])})


def symbolic_antipode(r: Bivector) -> CheckReport:
    """adj(g) pi(g) adj(g) = -det(g)^2 pi(adj(g)) for symbolic 2 x 2 g.

    This is the antipode identity multiplied through by det(g)^4.
    """
    if r.n != 2:
        raise ValueError("the symbolic antipode check is implemented for n = 2")
    g = coordinate_matrix(2)
    adj = _adjugate2(g)
    det = g.data[0] * g.data[3] - g.data[1] * g.data[2]
    lhs = _symbolic_pb(r, g).translate(left=adj, right=adj)
    rhs = _symbolic_pb(r, adj)
    rhs = PointBivector(adj, rhs.comps.map(lambda x: -(det * det) * x), check=False)
    d = lhs.comps.first_difference(rhs.comps)
    return CheckReport("antipode-symbolic", PASS if d is None else FAIL, {"n": 2},
                       None if d is None else {"index": list(d[0])})
