import random
from fractions import Fraction

import numpy as np
import pytest

from helpers import h3_automorphism, random_unipotent_automorphism
from lieshull import linalg as la
from lieshull.groups import catalog, group_exp
from lieshull.rigidity import (
    EXTENDED,
    FAILED,
    RigidityError,
    RigidityInput,
    UniquenessError,
    check_uniqueness,
    extend_isomorphism,
    input_from_map,
)


def test_plane_example():
    _, r, gamma = catalog("abelian", n=2)
    inp = input_from_map(gamma, r, la.qarray([[2, 1], [1, 1]]))
    rep = extend_isomorphism(inp)
    assert rep.verdict == EXTENDED
    assert rep.phi_star.matrix.tolist() == [[2, 1], [1, 1]]
    assert rep.hull_hat.dim == 2
    assert check_uniqueness(inp, 10)


def test_identity_on_h3():
    _, r, gamma = catalog("heisenberg", n=3)
    inp = RigidityInput(r, r, gamma.generators, gamma.generators)
    rep = extend_isomorphism(inp)
    assert rep.phi_star.matrix.tolist() == la.qeye(3).tolist()
    assert check_uniqueness(inp, 5)


def test_shear_automorphism_of_h3():
    _, r, gamma = catalog("heisenberg", n=3)
    psi = h3_automorphism(1, 1, 0, 1, 0, 0)  # X -> X, Y -> X + Y, Z -> Z
    rep = extend_isomorphism(input_from_map(gamma, r, psi))
    assert rep.phi_star.matrix.tolist() == psi.tolist()
    assert rep.certificates["homomorphism_residual"] == 0
    assert rep.certificates["generator_residuals"] == [0, 0]


def test_composition_and_inverse():
    _, r, gamma = catalog("heisenberg", n=3)
    a = h3_automorphism(1, 2, 0, 1, 1, 0)
    b = h3_automorphism(1, 0, -1, 1, 0, 3)
    phi_a = extend_isomorphism(input_from_map(gamma, r, a)).phi_star.matrix
    phi_b = extend_isomorphism(input_from_map(gamma, r, b)).phi_star.matrix
    phi_ab = extend_isomorphism(input_from_map(gamma, r, a @ b)).phi_star.matrix
    assert phi_ab.tolist() == (phi_a @ phi_b).tolist()
    inp = input_from_map(gamma, r, a)
    back = extend_isomorphism(RigidityInput(r, r, inp.images, inp.generators)).phi_star.matrix
    assert back.tolist() == la.inverse(phi_a).tolist()


def test_rank_deficient_image_fails():
    _, r, gamma = catalog("abelian", n=2)
    rep = extend_isomorphism(input_from_map(gamma, r, la.qarray([[1, 2], [0, 0]])))
    assert rep.verdict == FAILED and rep.phi_star is None
    assert "not uniform" in rep.reason


def test_cyclic_into_line_fails():
    _, r1, gamma = catalog("heisenberg", n=3)
    _, r2, line = catalog("abelian", n=1)
    rep = extend_isomorphism(RigidityInput(r1, r2, gamma.generators[:1], line.generators))
    assert rep.verdict == FAILED
    assert rep.certificates["graph_hull_dim"] == 1
    assert "not uniform" in rep.reason


def test_dropped_generator_is_detected():
    _, r, gamma = catalog("abelian", n=2)
    inp = input_from_map(gamma, r, la.qarray([[2, 1], [1, 1]]))
    with pytest.raises(UniquenessError, match="hull dimension drop"):
        check_uniqueness(RigidityInput(r, r, inp.generators[:1], inp.images[:1]))


def test_malformed_input():
    _, r, gamma = catalog("abelian", n=2)
    with pytest.raises(RigidityError):
        RigidityInput(r, r, gamma.generators, gamma.generators[:1])
    _, r2, _ = catalog("abelian", n=2)
    with pytest.raises(RigidityError):
        RigidityInput(r, r, gamma.generators, tuple(r2.identity() for _ in range(2)))


def test_numeric_input_warns_when_not_completely_solvable():
    _, r, gamma = catalog("paper_example")
    rep = extend_isomorphism(RigidityInput(r, r, gamma.generators, gamma.generators))
    assert rep.verdict == EXTENDED and rep.exactness == "numeric"
    assert np.allclose(rep.phi_star.matrix, np.eye(3), atol=1e-9)
    assert any("not completely solvable" in w for w in rep.warnings)


def test_aff1_identity_numeric():
    _, r, gamma = catalog("aff1")
    rep = extend_isomorphism(RigidityInput(r, r, gamma.generators, gamma.generators))
    assert rep.verdict == EXTENDED and not rep.warnings


def test_random_unipotent_automorphisms():
    _, r, gamma = catalog("heisenberg", n=3)
    rng = random.Random(21)
    for _ in range(5):
        psi = random_unipotent_automorphism(rng)
        assert la.is_nilpotent(psi - la.qeye(3))
        inp = input_from_map(gamma, r, psi)
        rep = extend_isomorphism(inp)
        assert rep.verdict == EXTENDED and rep.phi_star.matrix.tolist() == psi.tolist()
