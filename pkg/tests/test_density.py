import pytest

from helpers import free_nilpotent_5
from lieshull.density import (
    InvarianceError,
    NonUnipotentError,
    density_in_quotient,
    gl_algebra,
    hull_via_density,
    invariant_implies_ideal,
    is_algebraically_dense_unipotent,
)
from lieshull.groups import catalog, commutator
from lieshull.lie import Subspace, center, lower_central_series, validate_structure


@pytest.fixture
def h3():
    g, r, gamma = catalog("heisenberg", n=3)
    x, y = gamma.generators
    return g, gamma, x, y, commutator(x, y)


def test_gl_algebra_is_lie():
    assert validate_structure(gl_algebra(2)).valid
    assert center(gl_algebra(2)).dim == 1


def test_density_examples(h3):
    g, gamma, x, y, z = h3
    assert is_algebraically_dense_unipotent(gamma).dense
    rep = is_algebraically_dense_unipotent(gamma.replace([x]))
    assert not rep.dense and rep.closure.dim == 1 and rep.ad_image.dim == 2
    _, _, lattice = catalog("abelian", n=3)
    rep = is_algebraically_dense_unipotent(lattice)
    assert rep.dense and rep.closure.dim == 0


def test_ad_image_dimension(h3):
    for g, gamma in [(h3[0], h3[1]), free_nilpotent_5()[::2]]:
        rep = is_algebraically_dense_unipotent(gamma)
        assert rep.ad_image.dim == g.dim - center(g).dim


def test_non_unipotent_rejected():
    _, _, gamma = catalog("aff1")
    with pytest.raises(NonUnipotentError):
        is_algebraically_dense_unipotent(gamma)


def test_invariant_implies_ideal_examples(h3):
    g, gamma, *_ = h3
    rep = invariant_implies_ideal(gamma, Subspace.span(g, [g.unit(2)]))
    assert rep.dense and rep.is_ideal and rep.conforms
    rep = invariant_implies_ideal(gamma, Subspace.span(g, [g.unit(0), g.unit(2)]))
    assert all(rep.invariant) and rep.is_ideal
    with pytest.raises(InvarianceError) as exc:
        invariant_implies_ideal(gamma, Subspace.span(g, [g.unit(0)]))
    assert exc.value.generator == 1


def test_density_in_quotient_examples(h3):
    g, gamma, x, y, z = h3
    zc = center(g)
    assert density_in_quotient(gamma, zc).dense
    assert density_in_quotient(gamma.replace([x]), zc).dense
    g5, _, lattice = free_nilpotent_5()
    assert is_algebraically_dense_unipotent(lattice).dense
    assert density_in_quotient(lattice, center(g5)).dense


def test_hull_via_density_examples(h3):
    g, gamma, x, y, z = h3
    rep = hull_via_density(gamma)
    assert rep.hull.dim == 3 and rep.checks["dense"]
    assert rep.justification.startswith("algebraically dense")
    rep = hull_via_density(gamma.replace([x, z]))
    assert not rep.checks["dense"]
    assert rep.hull == Subspace.span(g, [g.unit(0), g.unit(2)])
    assert rep.checks["preimage"] == Subspace.span(g, [g.unit(0), g.unit(2)])
    assert rep.checks["dense_in_preimage"] and rep.checks["hull_in_preimage"]
    _, _, lattice = catalog("abelian", n=2)
    assert hull_via_density(lattice).hull.dim == 2


def test_density_descends_to_every_lcs_quotient():
    for g, r, gamma in [catalog("heisenberg", n=5), free_nilpotent_5(),
                        catalog("semidirect_integer", a=[[1, 1, 0], [0, 1, 1], [0, 0, 1]])]:
        assert is_algebraically_dense_unipotent(gamma).dense
        for ideal in lower_central_series(g)[1:]:
            assert density_in_quotient(gamma, ideal).dense


def test_dense_lattices_have_full_log_span_hull():
    from lieshull.hull import log_span_hull

    for g, r, gamma in [catalog("heisenberg", n=3), catalog("heisenberg", n=5), free_nilpotent_5(),
                        catalog("abelian", n=3)]:
        assert is_algebraically_dense_unipotent(gamma).dense
        hull = log_span_hull(gamma).hull
        assert center(g).issubset(hull) and hull.dim == g.dim
