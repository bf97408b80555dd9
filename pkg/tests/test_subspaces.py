"""Frames, the invariant-subspace lattice of a single block, and metrics."""

import json

import numpy as np
import pytest

from c0ops.errors import AmbientMismatch
from c0ops.inner import all_divisors, blaschke, divides, monomial, quotient
from c0ops.model_space import build_model_space, functional_calculus
from c0ops.subspaces import (
    AmbientSpace,
    SubspaceFrame,
    image_closure,
    invariant_subspace_of_block,
    is_invariant,
    load_subspace,
    orthocomplement,
    orthonormalize,
    principal_distance,
)

RNG = np.random.default_rng(7031)


def kernel_frame(mat, dim):
    """Orthonormal frame for ker(mat) of known dimension."""
    _, _, vh = np.linalg.svd(mat)
    return vh.conj().T[:, mat.shape[1] - dim :]


class TestBlockLattice:
    def test_range_equals_kernel_identity(self):
        # ran phi(S) coincides with ker (theta/phi)(S) for every divisor
        theta = blaschke(0.3) * blaschke(-0.2, 2) * blaschke(0.35j)
        space = build_model_space(theta)
        for phi in all_divisors(theta):
            frame = invariant_subspace_of_block(space, phi)
            co = quotient(theta, phi)
            ker = kernel_frame(functional_calculus(space, co), theta.degree - phi.degree)
            amb = AmbientSpace(space, 1)
            d = principal_distance(
                SubspaceFrame(amb, frame.frame), SubspaceFrame(amb, ker)
            )
            assert d < 1e-8

    def test_lattice_sizes(self):
        # z^d: chain of d+1 invariant subspaces; distinct zeros: 2^d
        for d in range(1, 5):
            assert len(all_divisors(monomial(d))) == d + 1
        theta = blaschke(0.1) * blaschke(-0.3) * blaschke(0.25j)
        assert len(all_divisors(theta)) == 8

    def test_block_subspaces_are_invariant(self):
        theta = blaschke(0.2, 2) * blaschke(-0.4)
        space = build_model_space(theta)
        amb = AmbientSpace(space, 1)
        for phi in all_divisors(theta):
            frame = invariant_subspace_of_block(space, phi)
            ok, res = is_invariant(SubspaceFrame(amb, frame.frame))
            assert ok, f"phi={phi} residual {res}"
            assert frame.dim == theta.degree - phi.degree

    def test_lattice_ordering_matches_divisibility(self):
        theta = monomial(4)
        space = build_model_space(theta)
        divs = all_divisors(theta)
        for phi in divs:
            for psi in divs:
                f1 = invariant_subspace_of_block(space, phi).frame
                f2 = invariant_subspace_of_block(space, psi).frame
                contained = np.linalg.norm(f1 - f2 @ (f2.conj().T @ f1)) < 1e-10
                # psi | phi means phi H^2 inside psi H^2
                assert contained == divides(psi, phi)


class TestMetrics:
    def test_principal_distance_rotation(self):
        amb = AmbientSpace.build(monomial(2), 1)
        e0 = np.array([[1.0], [0.0]], dtype=complex)
        for t in (0.1, 0.4, 1.1):
            rot = np.array([[np.cos(t)], [np.sin(t)]], dtype=complex)
            d = principal_distance(SubspaceFrame(amb, e0), SubspaceFrame(amb, rot))
            assert abs(d - abs(np.sin(t))) < 1e-12

    def test_distance_is_a_metric_on_samples(self):
        amb = AmbientSpace.build(monomial(3), 2)
        frames = []
        for _ in range(4):
            cols = RNG.standard_normal((6, 2)) + 1j * RNG.standard_normal((6, 2))
            frames.append(SubspaceFrame(amb, orthonormalize(cols)))
        for a in frames:
            assert principal_distance(a, a) < 1e-12
        for a in frames:
            for b in frames:
                dab = principal_distance(a, b)
                assert abs(dab - principal_distance(b, a)) < 1e-12
                for c in frames:
                    assert dab <= principal_distance(a, c) + principal_distance(c, b) + 1e-12

    def test_ambient_mismatch_rejected(self):
        amb1 = AmbientSpace.build(monomial(2), 1)
        amb2 = AmbientSpace.build(monomial(2), 2)
        f1 = SubspaceFrame(amb1, np.eye(2, 1, dtype=complex))
        f2 = SubspaceFrame(amb2, np.eye(4, 1, dtype=complex))
        with pytest.raises(AmbientMismatch):
            principal_distance(f1, f2)

    def test_orthocomplement_spans(self):
        amb = AmbientSpace.build(monomial(2), 2)
        cols = RNG.standard_normal((4, 2)) + 1j * RNG.standard_normal((4, 2))
        m = SubspaceFrame(amb, orthonormalize(cols))
        co = orthocomplement(m)
        joint = np.hstack([m.frame, co.frame])
        assert np.linalg.matrix_rank(joint) == 4
        assert np.linalg.norm(m.frame.conj().T @ co.frame) < 1e-12


class TestImageClosure:
    def test_invertible_map_preserves_dimension(self):
        amb = AmbientSpace.build(monomial(3), 1)
        m = SubspaceFrame(amb, np.eye(3, 2, dtype=complex))
        x = np.array([[2, 1, 0], [0, 1, 0], [0, 0, 3]], dtype=complex)
        img = image_closure(x, m)
        assert img.dim == 2

    def test_rank_deficient_map_drops_dimension(self):
        amb = AmbientSpace.build(monomial(3), 1)
        m = SubspaceFrame(amb, np.eye(3, 2, dtype=complex))
        x = np.zeros((3, 3), dtype=complex)
        x[0, 0] = 1.0
        img = image_closure(x, m)
        assert img.dim == 1


class TestSerialization:
    def test_round_trip(self):
        amb = AmbientSpace.build(blaschke(0.3) * blaschke(-0.1), 2)
        cols = RNG.standard_normal((4, 2)) + 1j * RNG.standard_normal((4, 2))
        m = SubspaceFrame(amb, orthonormalize(cols))
        data = json.loads(json.dumps(m.to_dict()))
        again, adjust = load_subspace(data)
        assert adjust < 1e-9
        assert principal_distance(m, SubspaceFrame(amb, again.frame)) < 1e-9

    def test_loader_reports_adjustment(self):
        amb = AmbientSpace.build(monomial(2), 1)
        m = SubspaceFrame(amb, np.eye(2, 1, dtype=complex))
        data = m.to_dict()
        # perturb the stored frame so it is no longer orthonormal
        data["frame"][0][0] = 1.5
        _, adjust = load_subspace(data)
        assert adjust > 0.1
