from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
import sympy

from coboundary.linalg import Tensor, matmul, swap_operator
from coboundary.ncalg import NCPoly, reduce_mod_ideal
from coboundary.quantum import (
    STANDARD_CONVENTION,
    RMatrixData,
    check_eq18_derivation,
    check_eq22,
    check_frt,
    check_isomorphism,
    check_qybe,
    check_quantum_gauge,
    check_volume_element,
    compute_t,
    convention_survey,
    r_matrix_candidates,
    relations_B,
    relations_frt,
    relations_suq,
    standard_R,
    suq_generators,
    volume_element,
)
from coboundary.ncalg import GeneratorMatrix
from coboundary.report import FAIL, NOT_DERIVABLE, PASS
from coboundary.scalars import ONE, Q, ZERO, epsilon_for

from _oracles import QSYM, fkron, fmatmul, to_sympy


def at_q(t: Tensor, value: Fraction) -> list[list[Fraction]]:
    """Evaluate a rank-2 Tensor of Laurent scalars at a rational q."""
    out = []
    for row in t.rows():
        r = []
        for x in row:
            v = sympy.nsimplify(to_sympy(x).subs(QSYM, sympy.Rational(value.numerator, value.denominator)))
            r.append(Fraction(int(v.p), int(v.q)))
        out.append(r)
    return out


def _ident(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def _perm_matrix(n, perm):
    """(C^n)^{(x)3} factor permutation, factor j moves to perm[j]."""
    size = n ** 3
    out = [[Fraction(0)] * size for _ in range(size)]
    for idx in itertools.product(range(n), repeat=3):
        img = [0] * 3
        for j, p in enumerate(perm):
            img[p] = idx[j]
        src = (idx[0] * n + idx[1]) * n + idx[2]
        dst = (img[0] * n + img[1]) * n + img[2]
        out[dst][src] = Fraction(1)
    return out


def qybe_oracle(r: list[list[Fraction]], n: int) -> bool:
    r12 = fkron(r, _ident(n))
    p23 = _perm_matrix(n, (0, 2, 1))
    p12 = _perm_matrix(n, (1, 0, 2))
    r13 = fmatmul(fmatmul(p23, r12), p23)
    r23 = fmatmul(fmatmul(p12, r13), p12)
    lhs = fmatmul(fmatmul(r12, r13), r23)
    rhs = fmatmul(fmatmul(r23, r13), r12)
    return lhs == rhs


def test_standard_R_shape_n2():
    R = standard_R(2)
    ybe = R.ybe_form
    assert [ybe[i, i] for i in range(4)] == [Q, ONE, ONE, Q]
    off = [(i, j) for i in range(4) for j in range(4) if i != j and ybe[i, j]]
    assert len(off) == 1
    assert ybe[off[0]] == Q - 1 / Q
    # the intertwiner itself is P times the Yang-Baxter form
    assert R.R == matmul(swap_operator(2), ybe)
    assert R.R == Tensor.from_rows([[Q, 0, 0, 0], [0, Q - 1 / Q, 1, 0], [0, 1, 0, 0], [0, 0, 0, Q]])


def test_classical_limit_of_standard_R():
    for n in (2, 3):
        assert standard_R(n).ybe_form.map(lambda x: x.at_q_one()) == Tensor.identity(n * n)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_qybe(n):
    assert check_qybe(n).status == PASS


@pytest.mark.parametrize("n", [2, 3])
def test_qybe_numeric_oracle(n):
    R = standard_R(n)
    for value in (Fraction(3, 2), Fraction(-2, 5)):
        assert qybe_oracle(at_q(R.ybe_form, value), n)


def test_constructor_rejects_non_solution():
    bad = Tensor.identity(4)
    bad[0, 1] = ONE
    with pytest.raises(ValueError):
        RMatrixData.from_intertwiner(2, bad, "bad")
    with pytest.raises(ValueError):
        RMatrixData.from_intertwiner(2, Tensor.zeros(4, 4), "zero")
    with pytest.raises(ValueError):
        standard_R(1)


def test_convention_survey_selects_standard():
    survey = convention_survey(2)
    assert set(survey) == set(r_matrix_candidates(2))
    winners = [name for name, row in survey.items() if all(v for v in row.values() if v is not None)]
    assert winners == [STANDARD_CONVENTION]
    # eq22 cannot tell the candidates apart
    assert all(row["eq22"] for row in survey.values())


def test_volume_element_values():
    v2 = volume_element(2)
    assert v2.E[0, 1] == ONE and v2.E[1, 0] == -Q
    assert v2.E[0, 0] == ZERO and v2.E[1, 1] == ZERO
    assert v2.E_tilde[0, 1] == -Q
    v3 = volume_element(3)
    assert v3.E[1, 0, 2] == -Q
    assert v3.E[2, 1, 0] == -(Q ** 3)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_volume_element_antisymmetry(n):
    assert check_volume_element(n).status == PASS


def _in_span(p, rels):
    return reduce_mod_ideal(p, rels, 2, star_close=False).is_zero


def test_suq_relations_examples():
    rels = relations_suq(2)
    gens = rels.gens
    u = lambda i, j, s=False: NCPoly.gen(gens, gens.gen("u", i, j, s))
    one = NCPoly.const(gens, ONE)
    det = u(0, 0) * u(1, 1) - (u(0, 1) * u(1, 0)).scale(Q) - one
    assert _in_span(det, rels)
    unit = u(0, 0) * u(0, 0, True) + u(0, 1) * u(0, 1, True) - one
    assert _in_span(unit, rels)


def test_B_relations_example():
    rels = relations_B(2)
    gens = rels.gens
    w = lambda i, j: NCPoly.gen(gens, gens.gen("w", i, j))
    rel = (w(0, 0) * w(1, 1)).scale(-Q) + w(0, 1) * w(1, 0) + NCPoly.const(gens, ONE)
    assert _in_span(rel, rels)


def test_frt_examples():
    gens = suq_generators(2)
    R = standard_R(2)
    assert len(relations_frt(R, GeneratorMatrix.identity(gens, 2), tilde_right=False)) == 0
    rep = check_frt(2)
    assert rep.status == PASS
    assert rep.details["frt_rank"] == rep.details["volume_homogeneous_rank"] == 6


def test_frt_rejects_other_conventions():
    for name in ("braid-upper",):
        R = standard_R(2, name)
        assert check_frt(2, R).status == FAIL


@pytest.mark.parametrize("n", [2, 3])
def test_eq22(n):
    assert check_eq22(n).status == PASS


def test_eq22_identity_control():
    rep = check_eq22(2, g0="identity")
    assert rep.status == FAIL
    assert rep.witness is not None


def test_gauge_n2():
    rep = check_quantum_gauge(2, 6)
    assert rep.status == PASS
    entries = rep.details["entries"]
    assert len(entries) == 16
    assert all(e["certified"] and e["replay"] for e in entries)


def test_gauge_untwisted_control():
    rep = check_quantum_gauge(2, 6, variant="untwisted")
    assert rep.status == NOT_DERIVABLE
    assert any(not e["certified"] for e in rep.details["entries"])


def test_gauge_degenerate_is_trivial():
    rep = check_quantum_gauge(2, 6, variant="degenerate")
    assert rep.status == PASS


def test_isomorphism_n2():
    rep = check_isomorphism(2)
    assert rep.status == PASS
    assert rep.details["directions"] == {"forward": PASS, "inverse": PASS}


def test_isomorphism_image_example():
    from coboundary.ncalg import substitute
    from coboundary.quantum import _iso_images

    src = suq_generators(2, "u")
    dst = suq_generators(2, "w")
    eps = epsilon_for(2)
    images = _iso_images(src, "u", dst, "w", eps)
    u = lambda i, j: NCPoly.gen(src, src.gen("u", i, j))
    w = lambda i, j: NCPoly.gen(dst, dst.gen("w", i, j))
    rel = u(0, 0) * u(1, 1) - (u(0, 1) * u(1, 0)).scale(Q) - NCPoly.const(src, ONE)
    image = substitute(rel, images, dst)
    expect = -(w(0, 1) * w(1, 0) - (w(0, 0) * w(1, 1)).scale(Q)) - NCPoly.const(dst, ONE)
    assert image == expect
    assert reduce_mod_ideal(image, relations_B(2), 2).is_zero


def test_isomorphism_n3():
    assert check_isomorphism(3).status == PASS


@pytest.mark.parametrize("n", [2, 3])
def test_t_scalar_records_normal_forms(n):
    rep = compute_t(n)
    # (u^-1)^(n) E~ reduces to E~ itself, which is not a scalar multiple of E
    assert rep.status == FAIL
    assert rep.details["t"] is None
    assert rep.details["column_equals_E_tilde"] is True
    assert rep.details["row_relation_holds"] is True
    forms = rep.details["normal_forms"]
    vol = volume_element(n)
    for key, poly in forms.items():
        idx = tuple(int(c) - 1 for c in key)
        assert poly == NCPoly.const(poly.gens, vol.E_tilde[idx])


def test_eq18_derivable_from_frt_and_unitarity():
    rep = check_eq18_derivation(2, 6)
    assert rep.status == PASS
    assert rep.details["degree_used"] <= 6
