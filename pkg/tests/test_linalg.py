from __future__ import annotations

import itertools
import random

import pytest
import sympy
from hypothesis import given, strategies as st

from coboundary.linalg import (
    PermutationOp,
    ShapeError,
    SparseEchelon,
    Tensor,
    conj_transpose,
    determinant,
    factor_reversal_operator,
    inverse,
    kron,
    matmul,
    solve_linear,
    swap_operator,
    total_permutation_matrix,
    transpose,
)
from coboundary.scalars import ONE, Q, ZERO, Scalar, mpq, zeta

from _oracles import fkron, fmat, fmatmul


def rational_matrix(rng, rows, cols, lo=-4, hi=4):
    return Tensor((rows, cols), [Scalar.coerce(rng.randint(lo, hi)) for _ in range(rows * cols)])


def sympy_matrix(t):
    return sympy.Matrix([[sympy.Rational(str(x).strip("()")) if x else 0 for x in row] for row in t.rows()])


matrix_seeds = st.integers(0, 10_000)


def test_identity_and_kron():
    assert kron(Tensor.identity(2), Tensor.identity(2)) == Tensor.identity(4)


def test_swap_is_involution():
    p = swap_operator(2)
    assert matmul(p, p) == Tensor.identity(4)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_total_permutation_matrix(n):
    p = total_permutation_matrix(n)
    for i, j in itertools.product(range(n), repeat=2):
        assert p[i, j] == (ONE if i + j == n - 1 else ZERO)
    assert matmul(p, p) == Tensor.identity(n)


def test_total_permutation_n2():
    assert total_permutation_matrix(2) == Tensor.from_rows([[0, 1], [1, 0]])


def test_factor_reversal_examples():
    assert factor_reversal_operator(2, 2).to_tensor() == swap_operator(2)
    assert factor_reversal_operator(1, 3).to_tensor() == Tensor.identity(3)
    op = factor_reversal_operator(3, 2)
    twice = matmul(op.to_tensor(), op.to_tensor())
    assert twice == Tensor.identity(8)
    for idx in itertools.product(range(2), repeat=3):
        assert op.image(op.image(idx)) == idx
        assert op.image(idx) == tuple(reversed(idx))


@given(st.permutations(range(4)), st.integers(2, 3))
def test_permutation_op_orthogonal(perm, d):
    op = PermutationOp(4, d, tuple(perm))
    t = op.to_tensor()
    assert matmul(transpose(t), t) == Tensor.identity(d ** 4)
    assert matmul(op.inverse().to_tensor(), t) == Tensor.identity(d ** 4)


def test_permutation_op_rejects_non_permutation():
    with pytest.raises(ValueError):
        PermutationOp(3, 2, (0, 0, 1))


def test_shape_errors():
    with pytest.raises(ShapeError):
        matmul(Tensor.zeros(2, 3), Tensor.zeros(2, 3))
    with pytest.raises(ShapeError):
        Tensor.zeros(2, 2) + Tensor.zeros(3, 3)
    with pytest.raises((ShapeError, ValueError)):
        Tensor((2, 2), [ONE] * 3)


@given(matrix_seeds)
def test_matmul_and_kron_against_fractions(seed):
    rng = random.Random(seed)
    a, b = rational_matrix(rng, 2, 3), rational_matrix(rng, 3, 2)
    assert fmat(matmul(a, b)) == fmatmul(fmat(a), fmat(b))
    c, d = rational_matrix(rng, 2, 2), rational_matrix(rng, 3, 3)
    assert fmat(kron(c, d)) == fkron(fmat(c), fmat(d))


@given(matrix_seeds)
def test_mixed_product_property(seed):
    rng = random.Random(seed)
    a, c = rational_matrix(rng, 2, 2), rational_matrix(rng, 2, 2)
    b, d = rational_matrix(rng, 3, 3), rational_matrix(rng, 3, 3)
    assert matmul(kron(a, b), kron(c, d)) == kron(matmul(a, c), matmul(b, d))
    e = rational_matrix(rng, 2, 2)
    assert kron(kron(a, b), e) == kron(a, kron(b, e))


@given(matrix_seeds)
def test_conj_transpose_involution(seed):
    rng = random.Random(seed)
    a = Tensor((2, 3), [Scalar.coerce(rng.randint(-3, 3)) * zeta(4, rng.randint(0, 3)) + Q * rng.randint(-2, 2)
                        for _ in range(6)])
    assert conj_transpose(conj_transpose(a)) == a
    assert conj_transpose(a)[1, 0] == a[0, 1].conjugate()


@given(matrix_seeds)
def test_determinant_and_inverse_against_sympy(seed):
    rng = random.Random(seed)
    a = rational_matrix(rng, 3, 3)
    det = determinant(a)
    assert sympy.Rational(str(det).strip("()")) == sympy_matrix(a).det()
    if det:
        assert matmul(a, inverse(a)) == Tensor.identity(3)
    else:
        with pytest.raises(ZeroDivisionError):
            inverse(a)


def test_solve_linear_examples():
    sol = solve_linear(Tensor.identity(3), [ONE, Q, Q * Q])
    assert sol.particular == [ONE, Q, Q * Q]
    assert sol.nullspace == []
    sol = solve_linear(Tensor.zeros(2, 2), [ZERO, ZERO])
    assert len(sol.nullspace) == 2
    assert not solve_linear(Tensor.zeros(2, 2), [ONE, ZERO]).consistent


@given(matrix_seeds)
def test_planted_solution_recovered(seed):
    rng = random.Random(seed)
    a = rational_matrix(rng, 6, 4)
    x0 = [Scalar.coerce(rng.randint(-5, 5)) for _ in range(4)]
    b = [sum((a[i, j] * x0[j] for j in range(4)), ZERO) for i in range(6)]
    sol = solve_linear(a, b)
    assert sol.consistent
    ax = [sum((a[i, j] * sol.particular[j] for j in range(4)), ZERO) for i in range(6)]
    assert ax == b
    for v in sol.nullspace:
        assert all(sum((a[i, j] * v[j] for j in range(4)), ZERO) == ZERO for i in range(6))
    assert len(sol.nullspace) == 4 - sympy_matrix(a).rank()


def test_solve_over_rational_functions():
    a = Tensor.from_rows([[Q, ONE], [ONE, Q]])
    sol = solve_linear(a, [ONE, ZERO])
    x, y = sol.particular
    assert Q * x + y == ONE and x + Q * y == ZERO
    assert x == Q / (Q * Q - 1)


def test_json_round_trip():
    t = Tensor.from_rows([[Q, zeta(6)], [mpq(1, 3), ZERO]])
    assert Tensor.from_json(t.to_json()) == t


@given(matrix_seeds)
def test_sparse_echelon_certificates(seed):
    rng = random.Random(seed)
    ech = SparseEchelon()
    vecs = []
    for k in range(5):
        v = {m: Scalar.coerce(rng.randint(-3, 3)) for m in rng.sample(range(8), 3)}
        v = {m: c for m, c in v.items() if c}
        vecs.append(v)
        ech.add(v, k)
    coeffs = [rng.randint(-2, 2) for _ in vecs]
    target: dict = {}
    for c, v in zip(coeffs, vecs):
        for m, x in v.items():
            target[m] = target.get(m, ZERO) + x * c
    target = {m: x for m, x in target.items() if x}
    rem, comb = ech.reduce(target)
    assert not rem
    rebuilt: dict = {}
    for label, c in comb.items():
        for m, x in vecs[label].items():
            rebuilt[m] = rebuilt.get(m, ZERO) + c * x
    assert {m: x for m, x in rebuilt.items() if x} == target


@given(matrix_seeds)
def test_normal_form_is_canonical(seed):
    rng = random.Random(seed)
    ech = SparseEchelon()
    basis = []
    for k in range(3):
        v = {m: Scalar.coerce(rng.randint(1, 3)) for m in rng.sample(range(6), 2)}
        basis.append(v)
        ech.add(v, k)
    p = {m: Scalar.coerce(rng.randint(-3, 3)) for m in range(6)}
    shifted = dict(p)
    for m, x in basis[rng.randrange(3)].items():
        shifted[m] = shifted.get(m, ZERO) + x * 5
    clean = lambda d: {m: x for m, x in d.items() if x}
    assert clean(ech.normal_form(clean(p))) == clean(ech.normal_form(clean(shifted)))
