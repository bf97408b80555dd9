"""Norm-preserving solver, triangular X, density sweep, assembled Y."""

import math

import numpy as np
import pytest

from c0ops.errors import (
    DivisibilityFailure,
    HypothesisViolated,
    NotInSubspace,
    PreconditionViolated,
)
from c0ops.inner import ONE, all_divisors, blaschke, divides, monomial, quotient
from c0ops.jordan import JordanModel, canonical_subspace
from c0ops.model_space import ModelVector, build_model_space, functional_calculus
from c0ops.quasiaffine import (
    WeightSchedule,
    build_X,
    build_Y_main,
    compression_intertwiner,
    density_sweep,
    random_density_targets,
    solve_norm_preserving,
)
from c0ops.subspaces import (
    AmbientSpace,
    image_closure,
    invariant_subspace_of_block,
    principal_distance,
)

RNG = np.random.default_rng(424242)


class TestSolver:
    def test_monomial_example(self):
        # theta = z^3, phi = psi = z^2: g = z^2 solves to f = z, norm kept
        space = build_model_space(monomial(3))
        g = ModelVector(space, np.array([0, 0, 1], dtype=complex))
        f = solve_norm_preserving(space, monomial(2), monomial(2), g)
        omega = quotient(monomial(3), monomial(2))  # omega = z
        assert np.allclose(
            functional_calculus(space, omega) @ f.coords, g.coords, atol=1e-10
        )
        assert abs(f.norm - g.norm) < 1e-10

    @pytest.mark.parametrize("trial", range(100))
    def test_random_admissible_instances(self, trial):
        rng = np.random.default_rng(1000 + trial)
        pool = [0.0, 0.3, -0.25, 0.2 + 0.35j]
        mults = rng.integers(0, 2, size=4)
        theta = ONE
        for a, m in zip(pool, mults):
            if m:
                theta = theta * blaschke(a, int(m))
        if theta.degree < 2:
            theta = theta * monomial(2)
        space = build_model_space(theta)
        divisors = all_divisors(theta)
        phi = divisors[rng.integers(len(divisors))]
        admissible = [d for d in divisors if divides(quotient(theta, phi), d)]
        psi = admissible[rng.integers(len(admissible))]
        frame = invariant_subspace_of_block(space, psi).frame
        if frame.shape[1] == 0:
            return
        coeff = rng.standard_normal(frame.shape[1]) + 1j * rng.standard_normal(
            frame.shape[1]
        )
        g = ModelVector(space, frame @ coeff)
        f = solve_norm_preserving(space, phi, psi, g)
        omega = quotient(psi, quotient(theta, phi))
        residual = np.linalg.norm(
            functional_calculus(space, omega) @ f.coords - g.coords
        )
        assert residual <= 1e-9 * max(1.0, g.norm)
        assert abs(f.norm - g.norm) <= 1e-9 * max(1.0, g.norm)

    def test_rejects_target_outside_subspace(self):
        space = build_model_space(monomial(3))
        g = ModelVector(space, np.array([1.0, 0, 0], dtype=complex))
        with pytest.raises(NotInSubspace):
            solve_norm_preserving(space, monomial(2), monomial(2), g)


class TestBuildX:
    def test_intertwines_and_sigma_floor(self):
        thetas = [monomial(2), blaschke(0.3) * blaschke(-0.2), monomial(4)]
        for theta in thetas:
            space = build_model_space(theta)
            for n in (2, 4, 8, 16):
                schedule = WeightSchedule.factorial(n)
                omegas = [theta if k % 2 else ONE for k in range(n)]
                rec = build_X(space, n, omegas, schedule)
                assert rec.intertwining_residual <= 1e-10
                assert rec.sigma_min >= 0.5 * min(schedule.values[:n])

    def test_frozen_sigma_min_two_copies(self):
        space = build_model_space(monomial(2))
        schedule = WeightSchedule.factorial(2)
        rec = build_X(space, 2, [monomial(1), monomial(1)], schedule)
        assert rec.intertwining_residual <= 1e-12
        assert abs(rec.sigma_min - 0.42086143143284666) < 1e-12


class TestSchedule:
    def test_factorial_condition_values(self):
        sched = WeightSchedule.factorial(32)
        ks = sched.condition_sequence()
        assert abs(ks[0] - 1.0) < 1e-12
        assert abs(ks[4] - (6.0 / 720.0) * math.sqrt(618.0)) < 1e-15
        for a, b in zip(ks[3:], ks[4:]):
            assert b < a
        assert not sched.looks_divergent()

    def test_polynomial_schedule_diverges(self):
        sched = WeightSchedule.custom([(n + 1) ** -2 for n in range(32)])
        ks = sched.condition_sequence()
        assert ks[29] > ks[9]
        assert sched.looks_divergent()

    def test_positive_weights_required(self):
        with pytest.raises(ValueError):
            WeightSchedule.custom([1.0, 0.0])


class TestDensitySweep:
    def make_fixture(self, seed=5, copies=12):
        theta = monomial(2)
        space = build_model_space(theta)
        phi_list = [monomial(1)] * copies
        g, fs = random_density_targets(space, copies, phi_list, monomial(1), seed)
        return space, copies, phi_list, g, fs

    def test_residual_below_bound_and_converges(self):
        space, copies, phi_list, g, fs = self.make_fixture()
        sched = WeightSchedule.factorial(copies + 1)
        rows = density_sweep(
            space, copies, phi_list, monomial(2), monomial(1), g, fs, sched
        )
        for row in rows:
            assert row.residual <= row.bound + 1e-9
        assert rows[-1].m == 11
        assert rows[-1].residual <= 0.05

    def test_trivial_target_zero_residual(self):
        # psi1 = psi2 and F = 0 beyond the head: the first approximant with
        # m past the support reproduces the target to solver precision
        space = build_model_space(monomial(2))
        copies = 6
        phi_list = [monomial(1)] * copies
        head = invariant_subspace_of_block(space, monomial(1)).frame
        g = ModelVector(space, head[:, 0])
        fs = [ModelVector(space, np.zeros(2, dtype=complex)) for _ in range(copies)]
        rows = density_sweep(
            space, copies, phi_list, monomial(1), monomial(1), g, fs,
            WeightSchedule.factorial(copies + 1),
        )
        assert rows[-1].residual <= 1e-10

    def test_hypothesis_gate(self):
        space, copies, phi_list, g, fs = self.make_fixture()
        with pytest.raises(HypothesisViolated):
            # psi2 does not divide psi1
            density_sweep(
                space, copies, phi_list, monomial(1), monomial(2), g, fs,
                WeightSchedule.factorial(copies + 1),
            )


class TestBuildY:
    def test_intertwines_and_maps_canonical_subspaces(self):
        theta = monomial(2)
        rest = JordanModel((monomial(1), monomial(1)))
        psi = JordanModel((monomial(1), monomial(1)))
        sched = WeightSchedule.factorial(64)
        for n in (8, 12, 16):
            amb = AmbientSpace.build(theta, n)
            rec = build_Y_main(amb, rest, psi, psi, sched)
            assert rec.intertwining_residual <= 1e-10
            m1 = canonical_subspace(theta, rest, psi, n, amb)
            m2 = canonical_subspace(theta, rest, psi, n, amb)
            d = principal_distance(image_closure(rec.matrix, m1), m2)
            assert d <= 1e-10

    def test_divisibility_failure_raised(self):
        theta = monomial(2)
        rest = JordanModel((monomial(1),))
        psi = JordanModel((monomial(1),))
        tau = JordanModel((monomial(2),))
        amb = AmbientSpace.build(theta, 8)
        with pytest.raises(DivisibilityFailure):
            build_Y_main(amb, rest, psi, tau, WeightSchedule.factorial(64))


class TestCompressionIntertwiner:
    def test_identity_map(self):
        amb = AmbientSpace.build(monomial(2), 2)
        from c0ops.jordan import random_invariant_subspace

        m = random_invariant_subspace(amb, np.random.default_rng(2))
        x = np.eye(amb.total_dim, dtype=complex)
        a = compression_intertwiner(amb, m, amb, m, x)
        assert a.shape == (amb.total_dim - m.dim, amb.total_dim - m.dim)

    def test_rejects_non_intertwiner(self):
        amb = AmbientSpace.build(monomial(2), 2)
        from c0ops.jordan import random_invariant_subspace

        m = random_invariant_subspace(amb, np.random.default_rng(3))
        x = np.diag(np.arange(1.0, 5.0)).astype(complex)
        with pytest.raises(PreconditionViolated):
            compression_intertwiner(amb, m, amb, m, x)
