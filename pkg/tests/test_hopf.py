from __future__ import annotations

import copy
import json

import pytest
from hypothesis import given, strategies as st

from coboundary.hopf import (
    CATALOG,
    AntipodeError,
    AssociativityError,
    CoassociativityError,
    CounitError,
    HopfAxiomError,
    MultiplicativityError,
    RElement,
    UnitError,
    catalog,
    check_coassoc_tilde,
    check_cocycle,
    check_counit_R,
    check_intertwiner,
    check_psi_morphism,
    check_unitarity,
    cocycle_sides,
    coassoc_witness,
    delta_tilde,
    find_R,
    full_ansatz,
    hopf_chain,
    load_hopf,
)
from coboundary.hopf import _affine_solve, _residual_linear
from coboundary.report import FAIL, PASS
from coboundary.scalars import ONE, mpq

HALF = mpq(1, 2)


def edited(name, edit):
    d = copy.deepcopy(catalog(name).to_json())
    edit(d)
    return d


def _coassoc_break(d):
    d["comul"].append({"i": 1, "j": 1, "k": 0, "coeff": "1"})


def _mult_break(d):
    # g - 1 primitive: a coassociative counital coproduct that is not an algebra map on Z/2
    d["comul"] = [{"i": 0, "j": 0, "k": 0, "coeff": "1"}, {"i": 1, "j": 1, "k": 0, "coeff": "1"},
                  {"i": 1, "j": 0, "k": 1, "coeff": "1"}, {"i": 1, "j": 0, "k": 0, "coeff": "-1"}]


BROKEN = [
    ("sweedler", lambda d: d["mul"].append({"i": "x", "j": "x", "k": "1", "coeff": "1"}), AssociativityError),
    ("Z2", lambda d: d.__setitem__("unit", []), UnitError),
    ("Z2", _coassoc_break, CoassociativityError),
    ("Z2", lambda d: d.__setitem__("counit", [{"i": 0, "coeff": "1"}]), CounitError),
    ("Z2", _mult_break, MultiplicativityError),
    ("Z2", lambda d: d.__setitem__("antipode", [{"i": 0, "j": 0, "coeff": "1"}, {"i": 1, "j": 0, "coeff": "1"}]),
     AntipodeError),
]


@pytest.mark.parametrize("name,edit,error", BROKEN, ids=[e[2].__name__ for e in BROKEN])
def test_broken_structure_names_axiom(name, edit, error):
    with pytest.raises(error) as info:
        load_hopf(edited(name, edit))
    assert isinstance(info.value, HopfAxiomError)
    assert info.value.where
    # each axiom has its own error type
    assert type(info.value) is error


def test_broken_structure_loads_without_validation():
    h = load_hopf(edited("Z2", BROKEN[1][1]), validate=False)
    assert h.d == 2


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_catalog_round_trip(name):
    h = catalog(name)
    again = load_hopf(json.dumps(h.to_json()))
    assert again.to_json() == h.to_json()


def test_load_from_path(tmp_path):
    path = tmp_path / "sweedler.json"
    path.write_text(json.dumps(catalog("sweedler").to_json()))
    assert load_hopf(str(path)).d == 4


def test_unknown_catalog_name():
    with pytest.raises(ValueError):
        catalog("Z7")


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_twist_by_unit_is_coproduct(name):
    h = catalog(name)
    r = RElement.identity(h)
    dt = delta_tilde(h, r)
    assert dt == [h.delta_of(i) for i in range(h.d)]
    assert check_cocycle(h, r).status == PASS
    assert check_counit_R(h, r).status == PASS
    assert check_coassoc_tilde(h, r).status == PASS


@pytest.mark.parametrize("name", ["Z2", "sweedler"])
def test_twisted_coproduct_of_unit_is_R(name):
    h = catalog(name)
    for fam in find_R(h):
        for r in fam.members():
            assert delta_tilde(h, r)[0] == r.coeffs


def test_unit_R_on_cocommutative_algebra():
    h = catalog("Z2")
    r = RElement.identity(h)
    assert check_intertwiner(h, r).status == PASS
    assert check_psi_morphism(h, r).status == PASS


def test_unit_R_on_sweedler_breaks_right_identity():
    # Delta^op differs from Delta, so I (x) I is not an intertwiner and the right-hand form fails
    h = catalog("sweedler")
    r = RElement.identity(h)
    assert check_intertwiner(h, r).status == FAIL
    rep = check_psi_morphism(h, r)
    assert rep.status == FAIL
    assert rep.details["identities"] == {"full": FAIL, "left": PASS, "right": FAIL}
    assert rep.witness["identity"] == "full"


def test_sweedler_g_tensor_g_fails_counit():
    h = catalog("sweedler")
    g = h.basis.index("g")
    rep = check_counit_R(h, RElement(h, {(g, g): ONE}))
    assert rep.status == FAIL
    assert rep.witness is not None


def test_find_R_z2_family():
    h = catalog("Z2")
    fams = find_R(h)
    assert len(fams) == 1 and fams[0].kind == "exact" and fams[0].dimension == 1
    fam = fams[0]
    assert fam.contains(RElement.identity(h))
    tri = RElement.from_vector(h, [HALF, HALF, HALF, -HALF])
    assert fam.contains(tri)
    assert not fam.contains(RElement.from_vector(h, [1, 1, 0, 0]))


def test_find_R_restricted_ansatz_returns_unit():
    h = catalog("Z2")
    fams = find_R(h, ansatz=(RElement.identity(h).vector(), []))
    members = [m for f in fams for m in f.members()]
    assert members == [RElement.identity(h)]


def test_find_R_sweedler_family():
    h = catalog("sweedler")
    fams = find_R(h)
    assert [f.kind for f in fams] == ["exact"]
    fam = fams[0]
    assert fam.dimension == 1
    gen = fam.generic_member()
    assert gen is not None
    for check in (check_intertwiner, check_cocycle, check_counit_R, check_coassoc_tilde, check_psi_morphism):
        assert check(h, gen).status == PASS, check.__name__
    # the identity is not in the family: Sweedler's algebra is not cocommutative
    assert not fam.contains(RElement.identity(h))


def test_exact_elimination_on_two_parameter_ansatz():
    h = catalog("Z3")
    base, dirs = _affine_solve(h, *full_ansatz(h), _residual_linear(h))
    fams = find_R(h, ansatz=(base, [dirs[1], dirs[2]]))
    assert {f.kind for f in fams} == {"points"}
    points = {tuple(str(x) for x in p) for f in fams for p in f.points}
    assert points == {("-1/4", "-1/4"), ("0", "0")}
    for f in fams:
        for r in f.members():
            assert check_cocycle(h, r).status == PASS
            assert check_intertwiner(h, r).status == PASS


def test_triangular_z2_R_is_unitary():
    h = catalog("Z2")
    tri = RElement.from_vector(h, [HALF, HALF, HALF, -HALF])
    rep = check_unitarity(h, tri)
    assert rep.status == PASS and rep.details["unitary"] is True
    # unitarity is reported, not enforced
    lop = RElement.from_vector(h, [2, 0, 0, 0])
    assert check_unitarity(h, lop).status == PASS
    assert check_unitarity(h, lop).details["unitary"] is False


def _candidate(h, fam, s, bumps):
    vec = fam.element([s]).vector()
    for m, c in bumps:
        vec[m % len(vec)] = vec[m % len(vec)] + c
    return RElement.from_vector(h, vec)


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4).map(lambda f: mpq(f.numerator, f.denominator))
bumps = st.lists(st.tuples(st.integers(0, 15), rationals), max_size=2)


@given(st.sampled_from(["Z2", "sweedler"]), rationals, bumps)
def test_coassociativity_iff_cocycle(name, s, bump):
    h = catalog(name)
    fam = find_R(h)[0]
    r = _candidate(h, fam, s, bump)
    left, right = cocycle_sides(h, r)
    assert (coassoc_witness(h, r) is None) == (left == right)


@given(st.sampled_from(["Z2", "sweedler"]), rationals, bumps)
def test_psi_specializations_consistent(name, s, bump):
    h = catalog(name)
    fam = find_R(h)[0]
    rep = check_psi_morphism(h, _candidate(h, fam, s, bump))
    d = rep.details
    assert d["full_at_c_unit_is_left"] and d["full_at_a_unit_is_right"]
    assert d["left_and_right_imply_full"] and d["full_implies_left_and_right"]


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_hopf_chain(name):
    rep = hopf_chain(catalog(name), seed=0)
    assert rep.status == PASS, rep.witness
    eq = rep.details["equivalence"]
    assert eq["candidates"] == eq["agree"] == 20
