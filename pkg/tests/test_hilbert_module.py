"""Frame coordinates for the transfer bimodule, the isometry U, and the
conjugation that turns compact operators into the balanced endomorphism."""

from fractions import Fraction

import pytest

from corealg.core_endo import CoreEndo
from corealg.graph import bouquet, cycle
from corealg.hilbert_module import (
    CompactOp,
    GraphFrameSystem,
    ModuleElement,
    RadicalFunc,
    TruncationDepthError,
    UhfFrameSystem,
    U_map,
    U_star_map,
    beta_crosscheck,
    build_U,
    canonical_frame,
    compact_to_star,
    conj_beta,
    frame_rep_psi,
    gram_psd_check,
    pair,
    reconstruct_check,
    tensor,
    u_element,
    u_isometry_report,
)
from corealg.scalar import ONE, Radical
from corealg.star_algebra import matrix_unit
from corealg.uhf_cuntz import TensorElement, UhfSystem


@pytest.fixture
def gsys(o2):
    return GraphFrameSystem(o2)


@pytest.fixture
def usys():
    return UhfFrameSystem(UhfSystem(2, 1))


# -- coefficient functions -------------------------------------------------------


def test_radical_func_algebra(o2):
    f = RadicalFunc.indicator(o2, o2.path(["e1"]))
    g = RadicalFunc.indicator(o2, o2.path(["e2"]))
    one = RadicalFunc.constant(o2, ONE)
    assert (f + g).equal(one)
    assert (f * f).equal(f)
    assert (f * g).is_zero()
    assert f.scalar(Radical.sqrt(2)).value(o2.path(["e1", "e1"])) == Radical.sqrt(2)
    with pytest.raises(ValueError):
        f.value(o2.empty_path("v"))


def test_frame_system_requires_path_space(single_edge):
    with pytest.raises(ValueError):
        GraphFrameSystem(single_edge)


# -- frames ------------------------------------------------------------------------


def test_canonical_frame_graph(gsys):
    frame, report = canonical_frame(gsys)
    assert report.passed, report.lines()
    assert set(frame.indices) == {"e1", "e2"}
    # Normalized edge indicators have inner products delta_ef * chi_{Z(s(e))}.
    g11 = frame.gram("e1", "e1")
    assert gsys.equal(g11, RadicalFunc(gsys.graph, 0,
                                       {gsys.graph.empty_path("v"): ONE}))
    assert gsys.is_zero(frame.gram("e1", "e2"))


def test_canonical_frame_uhf(usys):
    frame, report = canonical_frame(usys)
    assert report.passed, report.lines()
    assert set(frame.indices) == {(1, 1), (2, 1)}


def test_reconstruction_from_algebra(gsys, usys):
    g = gsys.graph
    for a in (gsys.frame_rep("e1"),):
        m = ModuleElement.from_algebra(gsys, a)
        report = reconstruct_check(m)
        assert report.passed, report.lines()
    b = TensorElement.unit_entry(2, (1,), (2,))
    m = ModuleElement.from_algebra(usys, b)
    report = reconstruct_check(m)
    assert report.passed, report.lines()


def test_reconstruction_detects_tampering(gsys):
    a = gsys.frame_rep("e1")
    m = ModuleElement.from_algebra(gsys, a)
    coords = dict(m.coords)
    coords[("e2",)] = gsys.unit()  # inconsistent with the recorded source
    tampered = ModuleElement(gsys, 1, coords, source=a)
    report = reconstruct_check(tampered)
    assert not report.passed


# -- module arithmetic ---------------------------------------------------------------


def test_inner_products_and_pairing(gsys):
    m = ModuleElement.basis_word(gsys, ("e1",))
    n = ModuleElement.basis_word(gsys, ("e2",))
    assert gsys.is_zero(m.inner(n))
    assert not gsys.is_zero(m.inner(m))
    assert not gsys.is_zero(pair(gsys, ("e1",), gsys.unit(), ("e1",)))


def test_right_action_compatibility(gsys):
    g = gsys.graph
    m = ModuleElement.basis_word(gsys, ("e1", "e2"))
    b = RadicalFunc.indicator(g, g.path(["e2"]))
    mb = m.right_mul(b)
    # <m b, n> = b* <m, n>; with real coefficients b* = b.
    n = ModuleElement.basis_word(gsys, ("e1", "e2"))
    assert gsys.equal(mb.inner(n), gsys.mul(b, m.inner(n)))


def test_tensor_degree_adds(gsys):
    m = ModuleElement.basis_word(gsys, ("e1",))
    n = ModuleElement.basis_word(gsys, ("e2", "e1"))
    t = tensor(m, n)
    assert t.degree == 3
    assert not t.is_null()


def test_canonical_coordinates_decide_equality(gsys):
    m = ModuleElement.basis_word(gsys, ("e1",))
    z = ModuleElement.zero(gsys, 1)
    assert not m.equal(z)
    assert m.equal(m + z)
    assert (m - m).is_null()


# -- the isometry U -------------------------------------------------------------------


def test_u_element_coordinates(gsys):
    u = u_element(gsys)
    # q(alpha(1)) has coordinate 2^{-1/2} chi_{Z(s(e))} in every slot on O_2.
    for e in ("e1", "e2"):
        val = u.coords[(e,)]
        blocks = list(val.values.values())
        assert blocks and all(c == Radical.inv_sqrt(2) for c in blocks)


def test_build_u_graph_and_uhf(gsys, usys):
    for system in (gsys, usys):
        for depth in (1, 2):
            _, report = build_U(system, depth)
            assert report.passed, report.lines()


def test_build_u_depth_zero_rejected(gsys):
    with pytest.raises(TruncationDepthError):
        build_U(gsys, 0)


def test_u_isometry_identities(gsys, usys):
    for system in (gsys, usys):
        for degree in (1, 2):
            report = u_isometry_report(system, degree)
            assert report.passed, report.lines()


def test_u_star_undoes_u(gsys):
    m = ModuleElement.basis_word(gsys, ("e2", "e1"))
    assert U_star_map(gsys, U_map(gsys, m)).equal(m)


# -- compact operators and the endomorphism --------------------------------------------


def test_theta_composition_rule(gsys):
    m = ModuleElement.basis_word(gsys, ("e1",))
    n = ModuleElement.basis_word(gsys, ("e2",))
    t_mn = CompactOp.from_theta(m, n)
    t_nm = CompactOp.from_theta(n, m)
    assert t_mn.adjoint().equal(t_nm)
    # theta_{m,n} theta_{n,m} = theta_{m <n,n>, m} = theta_{m', m}.
    comp = t_mn.compose(t_nm)
    expected = CompactOp.from_theta(m.right_mul(n.inner(n)), m)
    assert comp.equal(expected)
    assert comp.apply(n).is_null()


def test_conj_beta_matches_endo(o2):
    gsys = GraphFrameSystem(o2)
    m = ModuleElement.basis_word(gsys, ("e1",))
    n = ModuleElement.basis_word(gsys, ("e2",))
    T = CompactOp.from_theta(m, n)
    out = conj_beta(T)
    assert out.degree == 2
    mu = o2.path(["e1"])
    nu = o2.path(["e2"])
    word = compact_to_star(out)
    expected = CoreEndo(o2).beta(matrix_unit(o2, mu, nu))
    assert word.equal(expected)


def test_beta_crosscheck_levels(o2, two_cycle):
    for g in (o2, two_cycle):
        for lvl in (1, 2):
            for mu in g.paths(lvl):
                for nu in g.paths(lvl):
                    report = beta_crosscheck(g, mu, nu)
                    assert report.passed, report.lines()


def test_beta_crosscheck_rejects_unbalanced(o2):
    with pytest.raises(ValueError):
        beta_crosscheck(o2, o2.path(["e1"]), o2.path(["e1", "e2"]))


def test_compact_to_star_uhf_rejected(usys):
    m = ModuleElement.basis_word(usys, ((1, 1),))
    with pytest.raises(ValueError):
        compact_to_star(CompactOp.from_theta(m, m))


# -- representations -------------------------------------------------------------------


def test_frame_rep_psi_graph(o3):
    from corealg.star_algebra import edge_isometry

    gsys = GraphFrameSystem(o3)
    family = {e: edge_isometry(o3, e) for e in o3.edge_names}

    def pi(b):
        # b is a RadicalFunc of some depth; realize it as a core element.
        from corealg.star_algebra import StarElement
        out = StarElement.zero(o3)
        for p, c in b.values.items():
            out = out + StarElement.word(o3, c, p, p)
        return out

    psi, report = frame_rep_psi(gsys, family, pi)
    assert report.passed, report.lines()
    m = ModuleElement.basis_word(gsys, ("e2",))
    assert psi(m).equal(family["e2"])


def test_frame_rep_psi_detects_bad_family(o2):
    from corealg.star_algebra import StarElement, edge_isometry

    gsys = GraphFrameSystem(o2)
    t1 = edge_isometry(o2, "e1")
    family = {"e1": t1, "e2": t1}  # ranges overlap, not a Cuntz family

    def pi(b):
        out = StarElement.zero(o2)
        for p, c in b.values.items():
            out = out + StarElement.word(o2, c, p, p)
        return out

    psi, report = frame_rep_psi(gsys, family, pi)
    assert not report.passed


def test_gram_psd(gsys, usys):
    elems = [ModuleElement.basis_word(gsys, ("e1",)),
             ModuleElement.basis_word(gsys, ("e2",)),
             u_element(gsys)]
    report = gram_psd_check(gsys, elems)
    assert report.passed, report.lines()
    uelems = [ModuleElement.basis_word(usys, ((1, 1),)),
              ModuleElement.basis_word(usys, ((2, 1),))]
    report = gram_psd_check(usys, uelems)
    assert report.passed, report.lines()
