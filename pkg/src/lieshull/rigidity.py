"""Extend a lattice homomorphism to an isomorphism of the ambient groups.

The extension is read off the hull of the graph ``{(x, alpha(x))}`` inside the
product group: when that hull is the graph of a linear map ``g1 -> g2`` the map
is the differential of the extension. Uniformity of the lattice and of its image
is never assumed; it is inferred from the hull dimension and from invertibility
of both projections.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg as la
from .groups import (
    GeneratedSubgroup,
    GroupElement,
    GroupError,
    MatrixRealization,
    group_exp,
    group_log,
    inverse,
)
from .lie import LinearMap, Subspace, direct_sum, homomorphism_residual, lie_closure
from .spectra import classify

EXTENDED = "extended"
FAILED = "failed"


class RigidityError(ValueError):
    pass


class UniquenessError(RigidityError):
    pass


@dataclass
class RigidityInput:
    r1: MatrixRealization
    r2: MatrixRealization
    generators: tuple
    images: tuple

    def __post_init__(self):
        self.generators = tuple(self.generators)
        self.images = tuple(self.images)
        if len(self.generators) != len(self.images):
            raise RigidityError(f"{len(self.generators)} generators but {len(self.images)} images")
        if not self.generators:
            raise RigidityError("no generators")
        if any(x.realization is not self.r1 for x in self.generators):
            raise RigidityError("generator outside the source realization")
        if any(x.realization is not self.r2 for x in self.images):
            raise RigidityError("image outside the target realization")

    @property
    def exact(self) -> bool:
        return self.r1.exact and self.r2.exact

    def replace(self, generators, images) -> "RigidityInput":
        return RigidityInput(self.r1, self.r2, tuple(generators), tuple(images))


@dataclass
class RigidityReport:
    verdict: str
    reason: str = ""
    phi_star: Optional[LinearMap] = None
    hull_hat: Optional[Subspace] = None
    certificates: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    exactness: str = "exact"

    @property
    def extended(self) -> bool:
        return self.verdict == EXTENDED


def _logs(r: MatrixRealization, elems) -> list:
    out = []
    for i, x in enumerate(elems):
        try:
            out.append(group_log(r, x))
        except GroupError as exc:
            raise RigidityError(f"element {i} has no logarithm: {exc}") from exc
    return out


def _graph_hull(inp: RigidityInput):
    g1, g2 = inp.r1.algebra, inp.r2.algebra
    if inp.exact:
        prod = direct_sum(g1, g2)
    else:
        prod = direct_sum(g1.as_numeric() if g1.exact else g1, g2.as_numeric() if g2.exact else g2)
    l1 = _logs(inp.r1, inp.generators)
    l2 = _logs(inp.r2, inp.images)
    seeds = [np.concatenate([a, b]) if inp.exact else np.concatenate([la.to_float(a), la.to_float(b)]) for a, b in zip(l1, l2)]
    return prod, lie_closure(prod, seeds), l1


def _warnings(inp: RigidityInput) -> list[str]:
    out = []
    for side, r in (("source", inp.r1), ("target", inp.r2)):
        if not classify(r.algebra).completely_solvable:
            out.append(
                f"{side} group is not completely solvable: strong rigidity may fail here, "
                "the extension below is not certified"
            )
    return out


def extend_isomorphism(inp: RigidityInput, tol: Optional[float] = None) -> RigidityReport:
    """Compute the differential of the extension of ``gamma_i -> image_i``."""
    g1, g2 = inp.r1.algebra, inp.r2.algebra
    n1, n2 = g1.dim, g2.dim
    tol = None if inp.exact else (tol or max(inp.r1.tolerance, inp.r2.tolerance))
    warnings = _warnings(inp)
    prod, hat, l1 = _graph_hull(inp)
    certs: dict = {"graph_hull_dim": hat.dim, "source_dim": n1, "target_dim": n2}
    report = RigidityReport(FAILED, hull_hat=hat, certificates=certs, warnings=warnings,
                            exactness="exact" if inp.exact else "numeric")
    if hat.dim != n1 or n1 != n2:
        report.reason = f"not uniform: graph hull has dimension {hat.dim}, source {n1}, target {n2}"
        return report
    basis = np.array(hat.vectors)  # rows span the hull
    p1 = basis[:, :n1].T
    p2 = basis[:, n1:].T
    try:
        p1_inv = la.inverse(p1, tol)
        certs["p1_invertible"] = True
    except la.LinalgError:
        certs["p1_invertible"] = False
        report.reason = "projection to the source is singular"
        return report
    phi = p2 @ p1_inv
    try:
        la.inverse(phi, tol)
        certs["phi_invertible"] = True
    except la.LinalgError:
        certs["phi_invertible"] = False
        report.reason = "not uniform: the extension is not invertible (image is rank-deficient)"
        return report
    phi_map = LinearMap(g1, g2, phi)
    report.phi_star = phi_map
    certs["homomorphism_residual"] = homomorphism_residual(phi_map)
    compat = []
    for log_x, img in zip(l1, inp.images):
        m = group_exp(inp.r2, phi @ log_x).matrix
        compat.append(la.max_abs(np.asarray(m - img.matrix)))
    certs["generator_residuals"] = compat
    limit = 0 if inp.exact else tol * 1e3
    if certs["homomorphism_residual"] > limit:
        report.reason = "extension does not preserve brackets"
        return report
    if max(compat) > limit:
        report.reason = "extension does not reproduce the images"
        return report
    report.verdict = EXTENDED
    return report


def _nielsen_move(rng: random.Random, gens: list, imgs: list) -> None:
    """Apply one random Nielsen move to both lists in step."""
    m = len(gens)
    kind = rng.randrange(3) if m > 1 else 0
    i = rng.randrange(m)
    if kind == 0:
        gens[i], imgs[i] = inverse(gens[i]), inverse(imgs[i])
    elif kind == 1:
        j = rng.choice([k for k in range(m) if k != i])
        gens[i], gens[j] = gens[j], gens[i]
        imgs[i], imgs[j] = imgs[j], imgs[i]
    else:
        j = rng.choice([k for k in range(m) if k != i])
        if rng.random() < 0.5:
            gens[i], imgs[i] = gens[i] * gens[j], imgs[i] * imgs[j]
        else:
            gens[i], imgs[i] = gens[i] * inverse(gens[j]), imgs[i] * inverse(imgs[j])


def regenerate(inp: RigidityInput, rng: random.Random, moves: int = 6) -> RigidityInput:
    gens, imgs = list(inp.generators), list(inp.images)
    for _ in range(moves):
        _nielsen_move(rng, gens, imgs)
    return inp.replace(gens, imgs)


def check_uniqueness(inp: RigidityInput, trials: int = 10, seed: int = 0, tol: Optional[float] = None) -> bool:
    """Re-derive the extension from regenerated generator sets; True iff every trial agrees."""
    base = extend_isomorphism(inp, tol)
    target = inp.r1.algebra.dim
    if base.certificates["graph_hull_dim"] < target:
        raise UniquenessError(f"hull dimension drop: {base.certificates['graph_hull_dim']} < {target}")
    if not base.extended:
        raise UniquenessError(f"base extension failed: {base.reason}")
    rng = random.Random(seed)
    for _ in range(trials):
        rep = extend_isomorphism(regenerate(inp, rng), tol)
        if rep.certificates["graph_hull_dim"] < target:
            raise UniquenessError(f"hull dimension drop: {rep.certificates['graph_hull_dim']} < {target}")
        if not rep.extended or not la.equal(rep.phi_star.matrix, base.phi_star.matrix, None if inp.exact else (tol or inp.r1.tolerance) * 1e3):
            return False
    return True


def images_under(r2: MatrixRealization, phi, gens) -> tuple[GroupElement, ...]:
    """Images ``exp(phi log x)`` of source elements under an algebra map ``phi``."""
    r1 = gens[0].realization
    return tuple(group_exp(r2, np.asarray(phi) @ group_log(r1, x)) for x in gens)


def input_from_map(gamma: GeneratedSubgroup, r2: MatrixRealization, phi) -> RigidityInput:
    return RigidityInput(gamma.realization, r2, gamma.generators, images_under(r2, phi, gamma.generators))
