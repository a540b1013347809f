"""Dense exact tensors, permutation operators and exact linear solving."""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Any, Callable, Hashable, Iterable, Sequence

from .scalars import ONE, ZERO, Scalar, parse_scalar, scalar_to_str

__all__ = [
    "ShapeError",
    "Tensor",
    "PermutationOp",
    "LinearSolution",
    "SparseEchelon",
    "matmul",
    "kron",
    "transpose",
    "conj_transpose",
    "total_permutation_matrix",
    "factor_reversal_operator",
    "swap_operator",
    "solve_linear",
    "inverse",
    "determinant",
]


class ShapeError(ValueError):
    def __init__(self, op: str, *shapes):
        self.shapes = shapes
        super().__init__(f"{op}: incompatible shapes " + " and ".join(str(s) for s in shapes))


def _entry(x):
    # plain numbers and strings become Scalars; other ring elements pass through
    if isinstance(x, (int, str, Fraction)) or type(x).__name__ == "mpq":
        return Scalar.coerce(x)
    return x


def _zero_like(x):
    if isinstance(x, Scalar):
        return ZERO
    return x * 0


class Tensor:
    """Row-major multi-index array.

    Entries are normally :class:`Scalar`; any commutative ring element with
    ``+``, ``-`` and ``*`` also works, which the symbolic checks rely on.
    """

    __slots__ = ("shape", "data")

    def __init__(self, shape: Sequence[int], data: list | None = None):
        self.shape = tuple(int(s) for s in shape)
        size = prod(self.shape)
        if data is None:
            data = [ZERO] * size
        elif len(data) != size:
            raise ValueError(f"{len(data)} entries for shape {self.shape}")
        self.data = list(data)

    # construction -----------------------------------------------------------

    @classmethod
    def zeros(cls, *shape: int) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return cls(shape)

    @classmethod
    def identity(cls, n: int) -> "Tensor":
        t = cls((n, n))
        for i in range(n):
            t.data[i * n + i] = ONE
        return t

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Tensor":
        rows = [[_entry(x) for x in r] for r in rows]
        n = len(rows)
        m = len(rows[0]) if rows else 0
        if any(len(r) != m for r in rows):
            raise ValueError("ragged rows")
        return cls((n, m), [x for r in rows for x in r])

    @classmethod
    def vector(cls, entries: Sequence) -> "Tensor":
        return cls((len(entries),), [_entry(x) for x in entries])

    # indexing ----------------------------------------------------------------

    def _flat(self, idx) -> int:
        if isinstance(idx, int):
            idx = (idx,)
        if len(idx) != len(self.shape):
            raise IndexError(f"index {idx} for shape {self.shape}")
        f = 0
        for i, s in zip(idx, self.shape):
            if not 0 <= i < s:
                raise IndexError(f"index {idx} out of range for shape {self.shape}")
            f = f * s + i
        return f

    def __getitem__(self, idx):
        return self.data[self._flat(idx)]

    def __setitem__(self, idx, value):
        self.data[self._flat(idx)] = value

    @property
    def rank(self) -> int:
        return len(self.shape)

    def indices(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(*(range(s) for s in self.shape))

    def nonzero(self) -> Iterable[tuple[tuple[int, ...], Any]]:
        for idx, x in zip(self.indices(), self.data):
            if x:
                yield idx, x

    def rows(self) -> list[list]:
        self._need_matrix("rows")
        n, m = self.shape
        return [self.data[i * m : (i + 1) * m] for i in range(n)]

    def reshape(self, *shape: int) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        if prod(shape) != len(self.data):
            raise ShapeError("reshape", self.shape, tuple(shape))
        return Tensor(shape, self.data)

    def copy(self) -> "Tensor":
        return Tensor(self.shape, self.data)

    def map(self, fn: Callable) -> "Tensor":
        return Tensor(self.shape, [fn(x) for x in self.data])

    # arithmetic ------------------------------------------------------------

    def _need_matrix(self, op: str):
        if len(self.shape) != 2:
            raise ShapeError(op, self.shape)

    def __add__(self, other: "Tensor") -> "Tensor":
        if self.shape != other.shape:
            raise ShapeError("add", self.shape, other.shape)
        return Tensor(self.shape, [a + b for a, b in zip(self.data, other.data)])

    def __sub__(self, other: "Tensor") -> "Tensor":
        if self.shape != other.shape:
            raise ShapeError("sub", self.shape, other.shape)
        return Tensor(self.shape, [a - b for a, b in zip(self.data, other.data)])

    def __neg__(self) -> "Tensor":
        return Tensor(self.shape, [-a for a in self.data])

    def scale(self, c) -> "Tensor":
        return Tensor(self.shape, [c * a for a in self.data])

    def __mul__(self, c):
        if isinstance(c, Tensor):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other: "Tensor") -> "Tensor":
        return matmul(self, other)

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.shape == other.shape and all(a == b for a, b in zip(self.data, other.data))

    def is_zero(self) -> bool:
        return not any(self.data)

    def first_difference(self, other: "Tensor"):
        """Index and both values of the first differing entry, or None."""
        if self.shape != other.shape:
            raise ShapeError("compare", self.shape, other.shape)
        for idx, a, b in zip(self.indices(), self.data, other.data):
            if a != b:
                return idx, a, b
        return None

    def conj(self) -> "Tensor":
        return Tensor(self.shape, [a.conjugate() for a in self.data])

    def permute_axes(self, axes: Sequence[int]) -> "Tensor":
        """Generalized transpose: result axis k is input axis ``axes[k]``."""
        if sorted(axes) != list(range(self.rank)):
            raise ValueError(f"bad axis permutation {axes} for rank {self.rank}")
        new_shape = tuple(self.shape[a] for a in axes)
        out = Tensor(new_shape)
        strides = [prod(self.shape[k + 1 :]) for k in range(self.rank)]
        new_strides = [strides[a] for a in axes]
        for f, idx in enumerate(itertools.product(*(range(s) for s in new_shape))):
            out.data[f] = self.data[sum(i * s for i, s in zip(idx, new_strides))]
        return out

    # serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        return {"shape": list(self.shape), "entries": [scalar_to_str(x) for x in self.data]}

    @classmethod
    def from_json(cls, obj: dict) -> "Tensor":
        return cls(obj["shape"], [parse_scalar(s) for s in obj["entries"]])

    def __repr__(self):
        if self.rank == 2 and len(self.data) <= 64:
            body = "; ".join(", ".join(str(x) for x in r) for r in self.rows())
            return f"Tensor[{body}]"
        return f"Tensor(shape={self.shape})"


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.rank != 2 or b.rank != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError("matmul", a.shape, b.shape)
    n, k = a.shape
    m = b.shape[1]
    brows = [[(j, x) for j, x in enumerate(b.data[r * m : (r + 1) * m]) if x] for r in range(k)]
    zero = _zero_like(a.data[0]) if a.data else ZERO
    out = []
    for i in range(n):
        row = [None] * m
        for r, x in enumerate(a.data[i * k : (i + 1) * k]):
            if not x:
                continue
            for j, y in brows[r]:
                t = x * y
                row[j] = t if row[j] is None else row[j] + t
        out.extend(zero if v is None else v for v in row)
    return Tensor((n, m), out)


def kron(a: Tensor, b: Tensor) -> Tensor:
    """Kronecker product of matrices: entry ((i,k),(j,l)) is a[i,j] * b[k,l]."""
    if a.rank != 2 or b.rank != 2:
        raise ShapeError("kron", a.shape, b.shape)
    n1, m1 = a.shape
    n2, m2 = b.shape
    zero = _zero_like(a.data[0]) if a.data else ZERO
    out = [zero] * (n1 * n2 * m1 * m2)
    width = m1 * m2
    for i in range(n1):
        for j in range(m1):
            x = a.data[i * m1 + j]
            if not x:
                continue
            for k in range(n2):
                base = (i * n2 + k) * width + j * m2
                for l in range(m2):
                    y = b.data[k * m2 + l]
                    if y:
                        out[base + l] = x * y
    return Tensor((n1 * n2, m1 * m2), out)


def transpose(a: Tensor) -> Tensor:
    a._need_matrix("transpose")
    return a.permute_axes((1, 0))


def conj_transpose(a: Tensor) -> Tensor:
    return transpose(a).conj()


def determinant(a: Tensor):
    """Exact determinant by elimination over the scalar field."""
    a._need_matrix("determinant")
    n, m = a.shape
    if n != m:
        raise ShapeError("determinant", a.shape)
    rows = [list(r) for r in a.rows()]
    det = ONE
    for c in range(n):
        p = next((r for r in range(c, n) if rows[r][c]), None)
        if p is None:
            return ZERO
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            det = -det
        piv = rows[c][c]
        det = det * piv
        inv = piv.inverse()
        for r in range(c + 1, n):
            if rows[r][c]:
                f = rows[r][c] * inv
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
    return det


def inverse(a: Tensor) -> Tensor:
    """Exact matrix inverse; raises ZeroDivisionError for singular input."""
    a._need_matrix("inverse")
    n, m = a.shape
    if n != m:
        raise ShapeError("inverse", a.shape)
    rows = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(a.rows())]
    for c in range(n):
        p = next((r for r in range(c, n) if rows[r][c]), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        rows[c], rows[p] = rows[p], rows[c]
        inv = rows[c][c].inverse()
        rows[c] = [x * inv for x in rows[c]]
        for r in range(n):
            if r != c and rows[r][c]:
                f = rows[r][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
    return Tensor((n, n), [x for r in rows for x in r[n:]])


# ---------------------------------------------------------------------------
# permutations
# ---------------------------------------------------------------------------


def total_permutation_matrix(n: int) -> Tensor:
    """The antidiagonal n x n matrix sending e_j to e_{n+1-j}."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    t = Tensor((n, n))
    for i in range(n):
        t[i, n - 1 - i] = ONE
    return t


@dataclass(frozen=True)
class PermutationOp:
    """Permutation of tensor factors on (C^d)^{(x) n_factors}.

    The factor at position ``j`` is moved to position ``perm[j]``.
    """

    n_factors: int
    d: int
    perm: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(self.n_factors)):
            raise ValueError(f"{self.perm} is not a permutation of {self.n_factors} factors")

    def image(self, idx: Sequence[int]) -> tuple[int, ...]:
        out = [0] * self.n_factors
        for j, i in enumerate(idx):
            out[self.perm[j]] = i
        return tuple(out)

    def to_tensor(self) -> Tensor:
        d, k = self.d, self.n_factors
        size = d**k
        t = Tensor((size, size))
        for idx in itertools.product(range(d), repeat=k):
            src = _flat_index(idx, d)
            dst = _flat_index(self.image(idx), d)
            t.data[dst * size + src] = ONE
        return t

    def apply(self, v: Tensor) -> Tensor:
        """Act on a rank-``n_factors`` tensor with all dimensions ``d``."""
        if v.shape != (self.d,) * self.n_factors:
            raise ShapeError("permute", v.shape, (self.d,) * self.n_factors)
        out = Tensor(v.shape)
        for idx, x in zip(v.indices(), v.data):
            out[self.image(idx)] = x
        return out

    def inverse(self) -> "PermutationOp":
        inv = [0] * self.n_factors
        for j, p in enumerate(self.perm):
            inv[p] = j
        return PermutationOp(self.n_factors, self.d, tuple(inv))


def _flat_index(idx: Sequence[int], d: int) -> int:
    f = 0
    for i in idx:
        f = f * d + i
    return f


def factor_reversal_operator(n_factors: int, d: int) -> PermutationOp:
    if n_factors < 1 or d < 1:
        raise ValueError("n_factors and d must be >= 1")
    return PermutationOp(n_factors, d, tuple(range(n_factors - 1, -1, -1)))


def swap_operator(d: int) -> Tensor:
    """The flip P on C^d (x) C^d as a d^2 x d^2 matrix."""
    return factor_reversal_operator(2, d).to_tensor()


# ---------------------------------------------------------------------------
# linear systems
# ---------------------------------------------------------------------------


@dataclass
class LinearSolution:
    """Solution set of ``A x = b``: ``particular`` is None when inconsistent."""

    particular: list | None
    nullspace: list[list] = field(default_factory=list)
    pivots: tuple[int, ...] = ()

    @property
    def consistent(self) -> bool:
        return self.particular is not None


def solve_linear(a: Tensor, b: Tensor | Sequence) -> LinearSolution:
    """Gauss-Jordan elimination over the scalar field.

    The pivot in each column is the first nonzero entry at or below the
    current row, so results are reproducible.
    """
    a._need_matrix("solve_linear")
    n, m = a.shape
    bvec = list(b.data) if isinstance(b, Tensor) else [Scalar.coerce(x) for x in b]
    if len(bvec) != n:
        raise ShapeError("solve_linear", a.shape, (len(bvec),))
    rows = [list(a.data[i * m : (i + 1) * m]) + [bvec[i]] for i in range(n)]
    pivots: list[int] = []
    r = 0
    for c in range(m):
        p = next((i for i in range(r, n) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv if x else x for x in rows[r]]
        pr = rows[r]
        nz = [(j, y) for j, y in enumerate(pr) if y and j != c]
        for i in range(n):
            if i != r and rows[i][c]:
                f = rows[i][c]
                row = rows[i]
                row[c] = ZERO
                for j, y in nz:
                    row[j] = row[j] - f * y
        pivots.append(c)
        r += 1
        if r == n:
            break
    if any(rows[i][m] for i in range(r, n)):
        return LinearSolution(None, [], tuple(pivots))
    particular = [ZERO] * m
    for i, c in enumerate(pivots):
        particular[c] = rows[i][m]
    free = [c for c in range(m) if c not in set(pivots)]
    nullspace = []
    for fc in free:
        v = [ZERO] * m
        v[fc] = ONE
        for i, c in enumerate(pivots):
            if rows[i][fc]:
                v[c] = -rows[i][fc]
        nullspace.append(v)
    return LinearSolution(particular, nullspace, tuple(pivots))


class _Desc:
    """Heap key giving max-first order for comparable monomials."""

    __slots__ = ("k",)

    def __init__(self, k):
        self.k = k

    def __lt__(self, other):
        return self.k > other.k


class SparseEchelon:
    """Incremental row echelon form of sparse vectors (dicts monomial -> Scalar).

    Monomials must be mutually comparable; the pivot of a row is its largest
    monomial.  Each stored row remembers how it was produced, so any vector
    that reduces to zero can be rewritten as an exact combination of the
    labelled input vectors.
    """

    def __init__(self):
        self._rows: dict[Hashable, int] = {}  # lead monomial -> row id
        self._vecs: list[dict] = []
        self._labels: list[Hashable] = []
        self._history: list[list[tuple[int, Scalar]]] = []

    @property
    def rank(self) -> int:
        return len(self._vecs)

    def pivot_monomials(self) -> list:
        return list(self._rows)

    def _top_reduce(self, vec: dict, full: bool = False):
        vec = dict(vec)
        kept: dict = {}
        used: list[tuple[int, Scalar]] = []
        heap = [_Desc(k) for k in vec]
        heapq.heapify(heap)
        seen = set()
        while heap:
            lead = heapq.heappop(heap).k
            if lead in seen:
                continue
            seen.add(lead)
            c = vec.get(lead)
            if c is None:
                continue
            rid = self._rows.get(lead)
            if rid is None:
                if not full:
                    return vec, used, lead
                kept[lead] = vec.pop(lead)
                continue
            used.append((rid, c))
            for mono, y in self._vecs[rid].items():
                if mono == lead:
                    del vec[mono]
                    continue
                old = vec.get(mono)
                if old is None:
                    vec[mono] = -(c * y)
                    heapq.heappush(heap, _Desc(mono))
                    seen.discard(mono)
                else:
                    new = old - c * y
                    if new:
                        vec[mono] = new
                    else:
                        del vec[mono]
        if full:
            return kept, used, None
        return vec, used, None

    def add(self, vec: dict, label: Hashable) -> bool:
        """Insert a vector; returns True when it increased the rank."""
        vec = {k: v for k, v in vec.items() if v}
        rem, used, lead = self._top_reduce(vec)
        if lead is None:
            return False
        lc = rem[lead]
        inv = lc.inverse()
        row = {k: v * inv for k, v in rem.items()}
        rid = len(self._vecs)
        self._vecs.append(row)
        self._labels.append(label)
        # row = (input - sum c_k row_k) / lc
        self._history.append([(k, c) for k, c in used] + [(-1, lc)])
        self._rows[lead] = rid
        return True

    def reduce(self, vec: dict) -> tuple[dict, dict | None]:
        """Top-reduce ``vec``.  Returns (remainder, combination).

        When the remainder is empty the combination maps input labels to
        coefficients with ``vec == sum coeff * input[label]``; otherwise the
        combination is None.
        """
        vec = {k: v for k, v in vec.items() if v}
        rem, used, lead = self._top_reduce(vec)
        if lead is not None:
            return rem, None
        coef: dict[int, Scalar] = {}
        for rid, c in used:
            coef[rid] = coef.get(rid, ZERO) + c
        return {}, self._expand(coef)

    def normal_form(self, vec: dict) -> dict:
        """Fully reduced remainder: no monomial of the result is a pivot."""
        rem, _, _ = self._top_reduce({k: v for k, v in vec.items() if v}, full=True)
        return rem

    def _expand(self, coef: dict[int, Scalar]) -> dict:
        out: dict[Hashable, Scalar] = {}
        pending = dict(coef)
        for rid in range(len(self._vecs) - 1, -1, -1):
            a = pending.pop(rid, None)
            if a is None or not a:
                continue
            hist = self._history[rid]
            lc = hist[-1][1]
            s = a * lc.inverse()
            lab = self._labels[rid]
            out[lab] = out.get(lab, ZERO) + s
            for k, c in hist[:-1]:
                pending[k] = pending.get(k, ZERO) - s * c
        return {k: v for k, v in out.items() if v}
