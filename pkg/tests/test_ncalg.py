from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from coboundary.ncalg import (
    DegreeOverflowError,
    GeneratorMatrix,
    GeneratorSet,
    NCPoly,
    RelationSet,
    StarConsistencyError,
    TruncatedIdeal,
    matrix_compose_factors,
    matrix_tensor_square,
    reduce_mod_ideal,
    substitute,
)
from coboundary.quantum import relations_suq, suq_generators
from coboundary.scalars import ONE, Q, ZERO, Scalar, epsilon_for, zeta

seeds = st.integers(0, 10_000)


def two_factor_gens(n=2):
    return GeneratorSet().add_family("u", n, 0).add_family("w", n, 1)


def g(gens, fam, i, j, star=False):
    return NCPoly.gen(gens, gens.gen(fam, i, j, star))


def random_poly(gens, rng, max_len=3, terms=3, families=None):
    fams = families or list(gens.families)
    p = NCPoly.zero(gens)
    for _ in range(terms):
        t = NCPoly.const(gens, Scalar.coerce(rng.randint(-3, 3)) + rng.randint(0, 1) * zeta(4))
        for _ in range(rng.randint(0, max_len)):
            fam = rng.choice(fams)
            n, _ = gens.families[fam]
            t = t * g(gens, fam, rng.randrange(n), rng.randrange(n), rng.random() < 0.3)
        p = p + t
    return p


def test_generator_names_and_order():
    gens = two_factor_gens()
    assert gens.name(gens.gen("u", 0, 1)) == "u[1,2]"
    assert gens.name(gens.gen("u", 0, 1, True)) == "u*[1,2]"
    ids = [gens.gen("u", 0, 0), gens.gen("u", 1, 1), gens.gen("u", 0, 0, True), gens.gen("w", 0, 0)]
    assert ids == sorted(ids)
    with pytest.raises(ValueError):
        GeneratorSet().add_family("w", 2, 1).add_family("u", 2, 0)


def test_cross_factor_commutation():
    gens = two_factor_gens()
    a, b = g(gens, "u", 0, 1), g(gens, "w", 1, 0)
    assert a * b == b * a
    # within a factor the order matters
    c = g(gens, "u", 1, 0)
    assert a * c != c * a


@given(seeds)
def test_star_is_involutive_antihomomorphism(seed):
    rng = random.Random(seed)
    gens = two_factor_gens()
    p, r = random_poly(gens, rng), random_poly(gens, rng)
    assert p.star().star() == p
    assert (p * r).star() == r.star() * p.star()
    assert (p + r).star() == p.star() + r.star()


def test_star_conjugates_coefficients():
    gens = suq_generators(2)
    p = NCPoly.gen(gens, gens.gen("u", 0, 0), zeta(4) + Q)
    assert p.star() == NCPoly.gen(gens, gens.gen("u", 0, 0, True), -zeta(4) + Q)


def test_no_zero_coefficients():
    gens = suq_generators(2)
    a = g(gens, "u", 0, 0)
    assert (a - a).terms == {}
    assert not (a - a)


def test_json_round_trip():
    rng = random.Random(3)
    gens = two_factor_gens()
    p = random_poly(gens, rng)
    assert NCPoly.from_json(gens, p.to_json()) == p


def test_tensor_square_examples():
    gens = suq_generators(2)
    u = GeneratorMatrix.of_family(gens, "u")
    x = matrix_tensor_square(u)
    # row (i,k) = (1,1), column (j,l) = (1,2): u11 u12
    assert x[0][1] == g(gens, "u", 0, 0) * g(gens, "u", 0, 1)
    ident = matrix_tensor_square(GeneratorMatrix.identity(gens, 2))
    for a in range(4):
        for b in range(4):
            assert ident[a][b] == NCPoly.const(gens, ONE if a == b else ZERO)


def test_tensor_square_star_compatibility():
    gens = suq_generators(2)
    u = GeneratorMatrix.of_family(gens, "u")
    x = matrix_tensor_square(u)
    xs = matrix_tensor_square(u.star())
    # (u* T u*) at ((j,l),(i,k)) is u_ij^* u_kl^*: the star of the (i,k),(j,l) entry with factors reversed
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    entry = x[i * 2 + k][j * 2 + l]
                    assert entry.star() == g(gens, "u", k, l).star() * g(gens, "u", i, j).star()
                    assert xs[j * 2 + l][i * 2 + k] == g(gens, "u", i, j, True) * g(gens, "u", k, l, True)


def test_compose_factors_examples():
    gens = GeneratorSet().add_family("u", 2, 0).add_family("w", 2, 1).add_family("v", 2, 2)
    ident = GeneratorMatrix.identity(gens, 2)
    w = GeneratorMatrix.of_family(gens, "w")
    c = matrix_compose_factors([ident, w, ident])
    assert all(c[i, j] == w[i, j] for i in range(2) for j in range(2))
    u = GeneratorMatrix.of_family(gens, "u")
    v = GeneratorMatrix.of_family(gens, "v").star()
    c = matrix_compose_factors([u, w, v])
    expect = NCPoly.zero(gens)
    for k in range(2):
        for l in range(2):
            expect = expect + u[0, k] * w[k, l] * v[l, 0]
    assert c[0, 0] == expect


def test_compose_rank_one_reduces_to_one():
    gens = GeneratorSet().add_family("u", 1, 0).add_family("w", 1, 1)
    u = GeneratorMatrix.of_family(gens, "u")
    # u and u* live in the same algebra, so the middle identity leg is a plain product
    c = matrix_compose_factors([u, GeneratorMatrix.identity(gens, 1)])
    uu = (c @ u.star())[0, 0]
    unit = RelationSet("unit", [u[0, 0] * u.star()[0, 0] - NCPoly.const(gens, ONE)], gens)
    res = reduce_mod_ideal(uu - NCPoly.const(gens, ONE), unit, 2)
    assert res.is_zero


def test_relation_is_member_with_unit_certificate():
    rels = relations_suq(2)
    p = rels.polys[3]
    res = reduce_mod_ideal(p, rels, 2)
    assert res.is_zero
    assert res.certificate.replay(rels) == p


def test_quantum_plane_relation_certifies_at_degree_two():
    rels = relations_suq(2)
    gens = rels.gens
    p = g(gens, "u", 0, 0) * g(gens, "u", 0, 1) - g(gens, "u", 0, 1) * g(gens, "u", 0, 0).scale(Q)
    res = reduce_mod_ideal(p, rels, 2)
    assert res.is_zero and res.degree == 2
    assert res.certificate.replay(rels) == p


def test_generator_not_in_quadratic_truncation():
    rels = relations_suq(2)
    homog = RelationSet("homog", [p for p in rels.polys if p.is_homogeneous()], rels.gens)
    res = reduce_mod_ideal(g(rels.gens, "u", 0, 0), homog, 2)
    assert not res.is_zero
    assert res.remainder


def test_degree_overflow_names_word():
    rels = relations_suq(2)
    gens = rels.gens
    a = g(gens, "u", 0, 0)
    with pytest.raises(DegreeOverflowError, match=r"u\[1,1\]"):
        reduce_mod_ideal(a * a * a, rels, 2)


@given(seeds)
def test_certificates_replay(seed):
    rng = random.Random(seed)
    rels = relations_suq(2)
    gens = rels.gens
    # a random element of the ideal: sum of m r m'
    p = NCPoly.zero(gens)
    for _ in range(2):
        r = rng.choice(rels.polys)
        left = random_poly(gens, rng, max_len=1, terms=1)
        right = random_poly(gens, rng, max_len=1, terms=1)
        p = p + left * r * right
    if not p:
        return
    res = reduce_mod_ideal(p, rels, max(p.degree(), 2))
    assert res.is_zero
    assert res.certificate.replay(rels) == p
    star = reduce_mod_ideal(p.star(), rels, max(p.degree(), 2))
    assert star.is_zero


def test_span_monotone_in_degree():
    rels = relations_suq(2)
    words = [w for d in range(5) for w in itertools.product(range(len(rels.gens)), repeat=d)]
    ranks = []
    for d in (2, 3, 4):
        ideal = TruncatedIdeal(rels, d)
        ideal.extend(rels.gens.normalize(w) for w in words if len(w) <= d)
        ranks.append(ideal.span_rank())
    assert ranks == sorted(ranks)
    assert ranks[0] < ranks[-1]


def test_normal_form_canonical():
    rels = relations_suq(2)
    gens = rels.gens
    ideal = TruncatedIdeal(rels, 3)
    a = g(gens, "u", 0, 0) * g(gens, "u", 1, 1)
    b = a + rels.polys[0] * g(gens, "u", 1, 0)
    assert ideal.normal_form(a) == ideal.normal_form(b)


def test_substitute_identity_and_linearity():
    rng = random.Random(7)
    gens = suq_generators(2)
    p, r = random_poly(gens, rng), random_poly(gens, rng)
    assert substitute(p, {}) == p
    images = {gens.gen("u", 0, 0): g(gens, "u", 1, 1) * ONE + NCPoly.const(gens, ONE)}
    images[gens.gen("u", 0, 0, True)] = images[gens.gen("u", 0, 0)].star()
    assert substitute(p + r, images) == substitute(p, images) + substitute(r, images)


def test_substitute_column_reversal():
    src = suq_generators(2, "u")
    dst = suq_generators(2, "w")
    eps = epsilon_for(2)
    images = {}
    for i in range(2):
        for j in range(2):
            images[src.gen("u", i, j)] = NCPoly.gen(dst, dst.gen("w", i, 1 - j), eps)
            images[src.gen("u", i, j, True)] = NCPoly.gen(dst, dst.gen("w", i, 1 - j, True), eps.conjugate())
    assert substitute(g(src, "u", 0, 0), images) == NCPoly.gen(dst, dst.gen("w", 0, 1), eps)
    assert substitute(g(src, "u", 0, 1), images) == NCPoly.gen(dst, dst.gen("w", 0, 0), eps)


def test_substitute_rejects_star_inconsistent_images():
    gens = suq_generators(2)
    images = {gens.gen("u", 0, 0): g(gens, "u", 0, 1), gens.gen("u", 0, 0, True): g(gens, "u", 1, 1)}
    with pytest.raises(StarConsistencyError):
        substitute(g(gens, "u", 0, 0), images)


def test_relation_set_metadata():
    rels = relations_suq(2)
    assert not rels.homogeneous
    assert rels.max_degree == 2
    assert rels.star_closed().rank() == rels.rank()
    with pytest.raises(ValueError):
        RelationSet("mixed", [NCPoly.gen(two_factor_gens(), 0)], suq_generators(2))
