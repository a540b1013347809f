"""Free *-algebras on matrix-entry generators and bounded-degree ideal membership.

Words are tuples of generator ids.  Generators in different tensor factors
commute, so every word is kept with its factor blocks in ascending factor
order; within a block the order is free.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .linalg import SparseEchelon, Tensor
from .scalars import ONE, ZERO, Scalar, parse_scalar, scalar_to_str

__all__ = [
    "Generator",
    "GeneratorSet",
    "NCPoly",
    "GeneratorMatrix",
    "RelationSet",
    "Certificate",
    "MembershipResult",
    "TruncatedIdeal",
    "DegreeOverflowError",
    "ClosureTooLargeError",
    "StarConsistencyError",
    "matrix_tensor_square",
    "matrix_compose_factors",
    "scalar_times_matrix",
    "matrix_times_scalar",
    "reduce_mod_ideal",
    "substitute",
]


class DegreeOverflowError(ValueError):
    def __init__(self, word: str, degree: int, bound: int):
        self.word = word
        super().__init__(f"word {word} has degree {degree} > max_degree {bound}")


class ClosureTooLargeError(RuntimeError):
    pass


class StarConsistencyError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    id: int
    family: str
    index: tuple[int, int]
    starred: bool
    factor: int

    @property
    def name(self) -> str:
        i, j = self.index
        return f"{self.family}{'*' if self.starred else ''}[{i + 1},{j + 1}]"


class GeneratorSet:
    """Matrix-entry generators grouped into families, each with star partners.

    Families must be added in nondecreasing factor order so that generator
    ids sort by factor first; within a factor, plain entries precede starred
    ones and entries follow row-major index order.
    """

    def __init__(self):
        self.gens: list[Generator] = []
        self.families: dict[str, tuple[int, int]] = {}  # name -> (n, first id)
        self._by_key: dict[tuple[str, int, int, bool], int] = {}
        self._by_name: dict[str, int] = {}
        self.factor_of: list[int] = []
        self.partner: list[int] = []

    def add_family(self, name: str, n: int, factor: int = 0) -> "GeneratorSet":
        if name in self.families:
            raise ValueError(f"family {name!r} already present")
        if self.gens and factor < self.gens[-1].factor:
            raise ValueError("families must be added in nondecreasing factor order")
        first = len(self.gens)
        self.families[name] = (n, first)
        for starred in (False, True):
            for i, j in itertools.product(range(n), repeat=2):
                g = Generator(len(self.gens), name, (i, j), starred, factor)
                self.gens.append(g)
                self._by_key[name, i, j, starred] = g.id
                self._by_name[g.name] = g.id
                self.factor_of.append(factor)
        for g in self.gens[first:]:
            self.partner.append(self._by_key[g.family, g.index[0], g.index[1], not g.starred])
        return self

    def __len__(self):
        return len(self.gens)

    def gen(self, family: str, i: int, j: int, starred: bool = False) -> int:
        return self._by_key[family, i, j, starred]

    def by_name(self, name: str) -> int:
        return self._by_name[name]

    def name(self, g: int) -> str:
        return self.gens[g].name

    def factor(self, family: str) -> int:
        return self.gens[self.families[family][1]].factor

    # words --------------------------------------------------------------

    def normalize(self, word: Sequence[int]) -> tuple[int, ...]:
        f = self.factor_of
        for a, b in zip(word, word[1:]):
            if f[a] > f[b]:
                return tuple(sorted(word, key=f.__getitem__))
        return tuple(word)

    def blocks(self, word: tuple[int, ...]) -> dict[int, tuple[int, int]]:
        """factor -> (start, end) slice of a normal-ordered word."""
        out: dict[int, tuple[int, int]] = {}
        f = self.factor_of
        for k, g in enumerate(word):
            s, e = out.get(f[g], (k, k))
            out[f[g]] = (s, k + 1)
        return out

    def block_bounds(self, word: tuple[int, ...], factor: int) -> tuple[int, int]:
        """Slice of the given factor's block; empty blocks sit where the factor would go."""
        f = self.factor_of
        start = 0
        while start < len(word) and f[word[start]] < factor:
            start += 1
        end = start
        while end < len(word) and f[word[end]] == factor:
            end += 1
        return start, end

    def star_word(self, word: tuple[int, ...]) -> tuple[int, ...]:
        out: list[int] = []
        f = self.factor_of
        k = 0
        while k < len(word):
            e = k
            while e < len(word) and f[word[e]] == f[word[k]]:
                e += 1
            out.extend(self.partner[g] for g in reversed(word[k:e]))
            k = e
        return tuple(out)

    def word_str(self, word: tuple[int, ...]) -> str:
        return " ".join(self.name(g) for g in word) if word else "1"

    def parse_word(self, names: Sequence[str]) -> tuple[int, ...]:
        return self.normalize([self._by_name[x] for x in names])


class NCPoly:
    """Noncommutative polynomial: normal-ordered word -> nonzero Scalar."""

    __slots__ = ("gens", "terms")

    def __init__(self, gens: GeneratorSet, terms: Mapping[tuple, Scalar] | None = None):
        self.gens = gens
        self.terms: dict[tuple, Scalar] = {}
        if terms:
            for w, c in terms.items():
                if c:
                    self.terms[w] = c

    @classmethod
    def gen(cls, gens: GeneratorSet, g: int, coeff=ONE) -> "NCPoly":
        return cls(gens, {(g,): Scalar.coerce(coeff)})

    @classmethod
    def const(cls, gens: GeneratorSet, c) -> "NCPoly":
        return cls(gens, {(): Scalar.coerce(c)})

    @classmethod
    def zero(cls, gens: GeneratorSet) -> "NCPoly":
        return cls(gens)

    def _lift(self, other) -> "NCPoly":
        if isinstance(other, NCPoly):
            return other
        return NCPoly.const(self.gens, other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            v = out.get(w)
            if v is None:
                out[w] = c
            else:
                v = v + c
                if v:
                    out[w] = v
                else:
                    del out[w]
        p = NCPoly(self.gens)
        p.terms = out
        return p

    __radd__ = __add__

    def __neg__(self):
        p = NCPoly(self.gens)
        p.terms = {w: -c for w, c in self.terms.items()}
        return p

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c) -> "NCPoly":
        c = Scalar.coerce(c)
        if not c:
            return NCPoly(self.gens)
        p = NCPoly(self.gens)
        p.terms = {w: c * x for w, x in self.terms.items()}
        return p

    def __mul__(self, other):
        if not isinstance(other, NCPoly):
            return self.scale(other)
        norm = self.gens.normalize
        out: dict[tuple, Scalar] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = norm(w1 + w2)
                v = out.get(w, ZERO) + c1 * c2
                if v:
                    out[w] = v
                else:
                    out.pop(w, None)
        p = NCPoly(self.gens)
        p.terms = out
        return p

    def __rmul__(self, c):
        return self.scale(c)

    def star(self) -> "NCPoly":
        p = NCPoly(self.gens)
        p.terms = {self.gens.star_word(w): c.conjugate() for w, c in self.terms.items()}
        return p

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_homogeneous(self) -> bool:
        return len({len(w) for w in self.terms}) <= 1

    def factors(self) -> set[int]:
        f = self.gens.factor_of
        return {f[g] for w in self.terms for g in w}

    def __eq__(self, other):
        if not isinstance(other, NCPoly):
            other = self._lift(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def sorted_terms(self) -> list[tuple[tuple, Scalar]]:
        return sorted(self.terms.items(), key=lambda t: (-len(t[0]), t[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms():
            parts.append(f"({c})" + ("" if not w else "*" + "*".join(self.gens.name(g) for g in w)))
        return " + ".join(parts)

    __repr__ = __str__

    def to_json(self) -> list:
        return [{"word": [self.gens.name(g) for g in w], "coeff": scalar_to_str(c)} for w, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, gens: GeneratorSet, data: list) -> "NCPoly":
        out = NCPoly(gens)
        for t in data:
            out = out + NCPoly(gens, {gens.parse_word(t["word"]): parse_scalar(t["coeff"])})
        return out


# ---------------------------------------------------------------------------
# generator matrices
# ---------------------------------------------------------------------------


class GeneratorMatrix:
    """n x n matrix of NCPoly entries, optionally tagged with its tensor factor."""

    def __init__(self, entries: Sequence[Sequence[NCPoly]], factor: int | None = None):
        self.entries = [list(r) for r in entries]
        self.n = len(self.entries)
        if any(len(r) != self.n for r in self.entries):
            raise ValueError("generator matrix must be square")
        self.factor = factor

    @classmethod
    def of_family(cls, gens: GeneratorSet, family: str) -> "GeneratorMatrix":
        n, _ = gens.families[family]
        return cls([[NCPoly.gen(gens, gens.gen(family, i, j)) for j in range(n)] for i in range(n)],
                   gens.factor(family))

    @classmethod
    def scalar(cls, gens: GeneratorSet, t: Tensor) -> "GeneratorMatrix":
        n = t.shape[0]
        return cls([[NCPoly.const(gens, t[i, j]) for j in range(n)] for i in range(n)], None)

    @classmethod
    def identity(cls, gens: GeneratorSet, n: int) -> "GeneratorMatrix":
        return cls.scalar(gens, Tensor.identity(n))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def star(self) -> "GeneratorMatrix":
        """Conjugate transpose: entry (i, j) is star of entry (j, i)."""
        return GeneratorMatrix([[self.entries[j][i].star() for j in range(self.n)] for i in range(self.n)],
                               self.factor)

    def __matmul__(self, other: "GeneratorMatrix") -> "GeneratorMatrix":
        n = self.n
        gens = self.entries[0][0].gens
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = NCPoly(gens)
                for k in range(n):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return GeneratorMatrix(out, None)

    def scale(self, c) -> "GeneratorMatrix":
        return GeneratorMatrix([[x.scale(c) for x in r] for r in self.entries], self.factor)

    def column_permuted(self, perm: Tensor) -> "GeneratorMatrix":
        """Right multiplication by a scalar matrix."""
        n = self.n
        gens = self.entries[0][0].gens
        out = [[NCPoly(gens) for _ in range(n)] for _ in range(n)]
        for i, k, j in itertools.product(range(n), repeat=3):
            c = perm[k, j]
            if c:
                out[i][j] = out[i][j] + self.entries[i][k].scale(c)
        return GeneratorMatrix(out, self.factor)


def matrix_tensor_square(m: GeneratorMatrix) -> list[list[NCPoly]]:
    """Woronowicz matrix tensor square: entry ((i,k),(j,l)) is m[i,j] * m[k,l]."""
    n = m.n
    out = [[None] * (n * n) for _ in range(n * n)]
    for i, j, k, l in itertools.product(range(n), repeat=4):
        out[i * n + k][j * n + l] = m.entries[i][j] * m.entries[k][l]
    return out


def matrix_compose_factors(ms: Sequence[GeneratorMatrix]) -> GeneratorMatrix:
    """Ordinary matrix product of matrices living in distinct, ascending tensor factors."""
    tags = [m.factor for m in ms if m.factor is not None]
    if len(set(tags)) != len(tags):
        raise ValueError(f"factor tag collision in {tags}")
    if tags != sorted(tags):
        raise ValueError(f"factor tags must ascend, got {tags}")
    out = ms[0]
    for m in ms[1:]:
        out = out @ m
    return out


def scalar_times_matrix(t: Tensor, x: list[list[NCPoly]]) -> list[list[NCPoly]]:
    n = len(x)
    gens = x[0][0].gens
    out = []
    for a in range(n):
        row = []
        for b in range(n):
            acc = NCPoly(gens)
            for c in range(n):
                s = t[a, c]
                if s and x[c][b]:
                    acc = acc + x[c][b].scale(s)
            row.append(acc)
        out.append(row)
    return out


def matrix_times_scalar(x: list[list[NCPoly]], t: Tensor) -> list[list[NCPoly]]:
    n = len(x)
    gens = x[0][0].gens
    out = []
    for a in range(n):
        row = []
        for b in range(n):
            acc = NCPoly(gens)
            for c in range(n):
                s = t[c, b]
                if s and x[a][c]:
                    acc = acc + x[a][c].scale(s)
            row.append(acc)
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# relation sets
# ---------------------------------------------------------------------------


def _mono_key(w: tuple) -> tuple:
    return (len(w), w)


def _poly_vector(p: NCPoly) -> dict:
    return {_mono_key(w): c for w, c in p.terms.items()}


class RelationSet:
    """Generators of a two-sided ideal; each relation lives in a single tensor factor."""

    def __init__(self, name: str, polys: Iterable[NCPoly], gens: GeneratorSet | None = None):
        self.name = name
        self.polys = [p for p in polys if p]
        self.gens = gens or (self.polys[0].gens if self.polys else None)
        for p in self.polys:
            if p.gens is not self.gens:
                raise ValueError(f"relation {p} uses a different generator set")
            if len(p.factors()) > 1:
                raise ValueError(f"relation {p} mixes tensor factors")

    def __len__(self):
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)

    def __add__(self, other: "RelationSet") -> "RelationSet":
        return RelationSet(f"{self.name}+{other.name}", self.polys + other.polys, self.gens or other.gens)

    @property
    def max_degree(self) -> int:
        return max((p.degree() for p in self.polys), default=0)

    @property
    def homogeneous(self) -> bool:
        return all(p.is_homogeneous() for p in self.polys)

    def independent(self) -> "RelationSet":
        """Drop relations linearly dependent on earlier ones."""
        ech = SparseEchelon()
        keep = [p for k, p in enumerate(self.polys) if ech.add(_poly_vector(p), k)]
        return RelationSet(self.name, keep, self.gens)

    def star_closed(self) -> "RelationSet":
        return RelationSet(self.name, self.polys + [p.star() for p in self.polys], self.gens).independent()

    def rank(self) -> int:
        ech = SparseEchelon()
        for k, p in enumerate(self.polys):
            ech.add(_poly_vector(p), k)
        return ech.rank

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "max_degree": self.max_degree,
            "homogeneous": self.homogeneous,
            "relations": [p.to_json() for p in self.polys],
        }


# ---------------------------------------------------------------------------
# bounded-degree ideal membership
# ---------------------------------------------------------------------------


@dataclass
class Certificate:
    """p == sum coeff * left * rels[index] * right."""

    terms: list[tuple[Scalar, tuple, int, tuple]]

    def replay(self, rels: RelationSet) -> NCPoly:
        gens = rels.gens
        out = NCPoly(gens)
        for c, left, k, right in self.terms:
            out = out + (NCPoly(gens, {left: ONE}) * rels.polys[k] * NCPoly(gens, {right: ONE})).scale(c)
        return out

    def __len__(self):
        return len(self.terms)

    def to_json(self, gens: GeneratorSet) -> list:
        return [{"coeff": scalar_to_str(c), "left": [gens.name(g) for g in l], "relation": k,
                 "right": [gens.name(g) for g in r]} for c, l, k, r in self.terms]


@dataclass
class MembershipResult:
    is_zero: bool
    degree: int
    certificate: Certificate | None = None
    remainder: NCPoly | None = None

    def __bool__(self):
        return self.is_zero


class TruncatedIdeal:
    """Span of {m r m' : deg(m r m') <= max_degree}, built lazily around queried monomials.

    The span splits along connected components of the graph linking each
    monomial to the ideal elements whose support contains it, so deciding
    whether p lies in the truncated span only needs the component of p's
    monomials.  Membership answers are therefore exact for the truncation.
    """

    def __init__(self, rels: RelationSet, max_degree: int, max_elements: int = 2_000_000):
        self.rels = rels
        self.gens = rels.gens
        self.max_degree = max_degree
        self.max_elements = max_elements
        self.echelon = SparseEchelon()
        self._seen_monos: set[tuple] = set()
        self._seen_elems: set[tuple] = set()
        # factor -> term length -> word -> [relation index]
        self._index: dict[int, dict[int, dict[tuple, list[int]]]] = {}
        self._empty: dict[int, list[int]] = {}
        for k, p in enumerate(rels.polys):
            fs = p.factors()
            if not fs:
                raise ValueError(f"relation {k} is a nonzero constant; the ideal is everything")
            (f,) = fs
            for w in p.terms:
                if w:
                    self._index.setdefault(f, {}).setdefault(len(w), {}).setdefault(w, []).append(k)
                else:
                    self._empty.setdefault(f, []).append(k)
        self._rel_deg = [p.degree() for p in rels.polys]

    @property
    def elements(self) -> int:
        return len(self._seen_elems)

    @property
    def monomials(self) -> int:
        return len(self._seen_monos)

    def _elements_touching(self, w: tuple):
        gens = self.gens
        D = self.max_degree
        L = len(w)
        for f, by_len in self._index.items():
            s0, e0 = gens.block_bounds(w, f)
            for tl, table in by_len.items():
                for s in range(s0, e0 - tl + 1):
                    hits = table.get(w[s:s + tl])
                    if hits:
                        for k in hits:
                            if L - tl + self._rel_deg[k] <= D:
                                yield (k, w[:s], w[s + tl:])
        for f, ks in self._empty.items():
            s0, e0 = gens.block_bounds(w, f)
            for k in ks:
                if L + self._rel_deg[k] > D:
                    continue
                for s in range(s0, e0 + 1):
                    yield (k, w[:s], w[s:])

    def extend(self, monomials: Iterable[tuple]):
        queue = deque(m for m in monomials if m not in self._seen_monos)
        self._seen_monos.update(queue)
        polys = self.rels.polys
        while queue:
            w = queue.popleft()
            for key in self._elements_touching(w):
                if key in self._seen_elems:
                    continue
                self._seen_elems.add(key)
                if len(self._seen_elems) > self.max_elements:
                    raise ClosureTooLargeError(
                        f"truncated ideal closure exceeded {self.max_elements} elements at degree {self.max_degree}")
                k, left, right = key
                vec = {}
                for t, c in polys[k].terms.items():
                    m = left + t + right
                    vec[_mono_key(m)] = c
                    if m not in self._seen_monos:
                        self._seen_monos.add(m)
                        queue.append(m)
                self.echelon.add(vec, key)

    def reduce(self, p: NCPoly) -> MembershipResult:
        for w in p.terms:
            if len(w) > self.max_degree:
                raise DegreeOverflowError(self.gens.word_str(w), len(w), self.max_degree)
        self.extend(p.terms)
        rem, comb = self.echelon.reduce(_poly_vector(p))
        if comb is None:
            rest = self.echelon.normal_form(rem)
            r = NCPoly(self.gens, {k[1]: c for k, c in rest.items()})
            return MembershipResult(False, self.max_degree, None, r)
        cert = Certificate(sorted(((c, l, k, r) for (k, l, r), c in comb.items()),
                                  key=lambda t: (t[2], _mono_key(t[1]), _mono_key(t[3]))))
        return MembershipResult(True, self.max_degree, cert, NCPoly(self.gens))

    def normal_form(self, p: NCPoly) -> NCPoly:
        """Fully reduced representative of p modulo the truncated span."""
        self.extend(p.terms)
        rest = self.echelon.normal_form(_poly_vector(p))
        return NCPoly(self.gens, {k[1]: c for k, c in rest.items()})

    def span_rank(self) -> int:
        return self.echelon.rank


def reduce_mod_ideal(p: NCPoly, rels: RelationSet, max_degree: int, min_degree: int | None = None,
                     star_close: bool = True) -> MembershipResult:
    """Decide p in the *-ideal of rels truncated at max_degree.

    Degrees are tried upward from ``min_degree`` (default deg p) so the
    reported degree is the smallest bound that certifies.
    """
    if p.degree() > max_degree:
        w = max(p.terms, key=len)
        raise DegreeOverflowError(p.gens.word_str(w), len(w), max_degree)
    if star_close:
        rels = rels.star_closed()
    start = max(p.degree(), 0) if min_degree is None else min_degree
    res = None
    for d in range(start, max_degree + 1):
        res = TruncatedIdeal(rels, d).reduce(p)
        if res.is_zero:
            return res
    return res if res is not None else TruncatedIdeal(rels, max_degree).reduce(p)


def substitute(p: NCPoly, images: Mapping[int, NCPoly], target: GeneratorSet | None = None) -> NCPoly:
    """Algebra homomorphism determined by generator images.

    Generators without an image map to themselves, which is only allowed
    when the target generator set is the source one.
    """
    gens = p.gens
    target = target or (next(iter(images.values())).gens if images else gens)
    for g, img in images.items():
        sg = gens.partner[g]
        if sg in images and images[sg] != img.star():
            raise StarConsistencyError(f"image of {gens.name(sg)} is not the star of the image of {gens.name(g)}")
    out = NCPoly(target)
    cache: dict[int, NCPoly] = {}

    def image(g):
        if g not in cache:
            if g in images:
                cache[g] = images[g]
            elif target is gens:
                cache[g] = NCPoly.gen(gens, g)
            else:
                raise KeyError(f"no image for generator {gens.name(g)}")
        return cache[g]

    for w, c in p.terms.items():
        term = NCPoly.const(target, c)
        for g in w:
            term = term * image(g)
        out = out + term
    return out
