"""Variational derivatives against finite differences and exact polynomials."""

import numpy as np
import pytest

from conftest import single_atom
from sharp_rosenthal.compound import CompoundLaw, cp_abs_moment
from sharp_rosenthal.errors import ExponentTooSmall, InfeasiblePath
from sharp_rosenthal.measures import DiscreteRV, LevyVarianceMeasure, SignedAtomMeasure
from sharp_rosenthal.suites import (
    fd_first_derivative,
    fd_second_derivative,
    random_variation_case,
)
from sharp_rosenthal.variation import (
    PerturbationPath,
    first_variation,
    h_kernel,
    moment_along_path,
    positivity_kernel,
    second_variation,
    variational_F,
)

D0 = DiscreteRV.delta(0.0)
H1 = LevyVarianceMeasure([(1.0, 1.0)])


class TestHKernel:
    def test_fourth_order(self):
        # q(q-1) E|P~1|^2 = 12 * 1
        assert h_kernel(0.0, 4.0, D0, H1) == pytest.approx(12.0, rel=1e-11)

    def test_sixth_order(self):
        # 30 * E|P~1|^4 = 120
        assert h_kernel(0.0, 6.0, D0, H1) == pytest.approx(120.0, rel=1e-11)

    def test_small_intensity_expansion(self):
        # E|10 + Y|^2 = 100 + Var(Y) for the tiny atom
        value = h_kernel(10.0, 4.0, D0, single_atom(1.0, 0.01))
        assert value == pytest.approx(12.0 * (100.0 + 0.01), rel=1e-12)


class TestPerturbationPath:
    def test_rejects_negative_endpoint(self):
        with pytest.raises(InfeasiblePath):
            PerturbationPath(H1, SignedAtomMeasure([(1.0, -2.0)]), t_max=1.0)

    def test_measure_at(self):
        path = PerturbationPath(H1, SignedAtomMeasure([(1.0, -1.0)]), t_max=1.0)
        assert path.measure_at(0.5).atoms == ((1.0, 0.5),)


class TestFirstVariation:
    def test_zero_direction(self):
        path = PerturbationPath(H1, SignedAtomMeasure(), t_max=1.0)
        assert first_variation(path, 5.0, D0, 0.0) == 0.0

    def test_gaussian_injection_identity(self):
        # Delta = delta_0 collapses the s-integral: (q choose 2) E|X+Y_H|^{q-2}
        path = PerturbationPath(H1, SignedAtomMeasure([(0.0, 1.0)]), t_max=1.0)
        value = first_variation(path, 5.0, D0, 0.0)
        expected = 0.5 * 5.0 * 4.0 * cp_abs_moment(CompoundLaw.pure(H1), 3.0)
        assert value == pytest.approx(expected, rel=1e-10)

    def test_cumulant_polynomial_oracle(self):
        # H + t*Delta = (1, 1+t): E|P~_{1+t}|^6 = f(t) with exact derivative
        path = PerturbationPath(H1, SignedAtomMeasure([(1.0, 1.0)]), t_max=1.0)
        value = first_variation(path, 6.0, D0, 0.0)
        # d/dt [lam + 25 lam^2 + 15 lam^3] at lam = 1
        assert value == pytest.approx(1.0 + 50.0 + 45.0, rel=1e-9)

    def test_matches_richardson_fd(self):
        path = PerturbationPath(H1, SignedAtomMeasure([(1.0, 1.0)]), t_max=1.0)
        analytic = first_variation(path, 5.0, D0, 0.0)
        fd = fd_first_derivative(path, 5.0, D0)
        assert analytic == pytest.approx(fd, rel=1e-5)

    def test_linearity_in_direction(self):
        base = LevyVarianceMeasure([(1.0, 1.0), (-0.7, 0.8)])
        delta = SignedAtomMeasure([(1.0, 0.4), (-0.7, -0.3)])
        for beta in (0.25, 0.5, 1.0):
            path = PerturbationPath(base, delta.scaled(beta), t_max=0.5)
            value = first_variation(path, 5.5, D0, 0.0)
            unit = first_variation(PerturbationPath(base, delta, t_max=0.5), 5.5, D0, 0.0)
            assert value == pytest.approx(beta * unit, rel=1e-10)

    def test_part_moment_variants(self):
        rng = np.random.default_rng(77)
        for i in range(10):
            path, q, X = random_variation_case(int(rng.integers(0, 2**31)), order=1)
            q = max(q, 3.0)
            for kind in ("pos", "neg"):
                analytic = first_variation(path, q, X, 0.0, kind=kind)
                fd = fd_first_derivative(path, q, X, kind=kind)
                assert analytic == pytest.approx(fd, rel=2e-5, abs=1e-8), (i, kind, q)


class TestSecondVariation:
    def test_zero_direction(self):
        path = PerturbationPath(H1, SignedAtomMeasure(), t_max=1.0)
        assert second_variation(path, 6.0, D0, 0.0) == 0.0

    def test_cancelling_direction(self):
        path = PerturbationPath(H1, SignedAtomMeasure([(1.0, 1.0), (1.0, -1.0)]), t_max=1.0)
        assert second_variation(path, 6.0, D0, 0.0) == 0.0

    def test_exponent_gate(self):
        path = PerturbationPath(H1, SignedAtomMeasure([(1.0, 1.0)]), t_max=1.0)
        with pytest.raises(ExponentTooSmall):
            second_variation(path, 4.0, D0, 0.0)

    def test_cumulant_polynomial_oracle(self):
        # f(t) = E|P~_{1+t}|^6: f''(0) = 50 + 90 = 140 exactly
        path = PerturbationPath(H1, SignedAtomMeasure([(1.0, 1.0)]), t_max=1.0)
        assert second_variation(path, 6.0, D0, 0.0) == pytest.approx(140.0, rel=1e-9)

    def test_matches_fd(self):
        path = PerturbationPath(H1, SignedAtomMeasure([(1.0, 1.0)]), t_max=1.0)
        analytic = second_variation(path, 6.0, D0, 0.0)
        fd = fd_second_derivative(path, 6.0, D0)
        assert analytic == pytest.approx(fd, rel=1e-4)


class TestPositivityKernel:
    def test_vanishes_at_u_one(self):
        value = positivity_kernel(1.0, 0.5, 0.5, 5.5, 5.5, D0, H1)
        assert value == pytest.approx(0.0, abs=1e-9)

    def test_positive_interior(self):
        assert positivity_kernel(0.5, 0.5, 0.5, 5.5, 5.5, D0, H1) > 0.0

    def test_monotone_in_p(self):
        v1 = positivity_kernel(0.5, 0.5, 0.5, 5.5, 5.5, D0, H1)
        v2 = positivity_kernel(0.5, 0.5, 0.5, 6.0, 5.5, D0, H1)
        assert v2 >= v1

    def test_positivity_grid_random_atom(self):
        rng = np.random.default_rng(13)
        u0 = float(rng.choice([-1, 1]) * rng.uniform(0.5, 2.0))
        H = single_atom(u0, float(rng.uniform(0.5, 2.0)))
        pts = np.linspace(0.15, 0.95, 5)
        for q in (5.1, 5.5, 6.0):
            for u in pts:
                for alpha in pts:
                    for s in pts:
                        assert positivity_kernel(u, alpha, s, q, q, D0, H) > 0.0


class TestVariationalF:
    def test_b_to_one_limit(self):
        assert variational_F(1.0 - 1e-9, 1.0, 5.5, 5.5, D0, H1) == pytest.approx(0.0, abs=1e-6)

    def test_s_prefactor(self):
        assert variational_F(0.5, 1e-6, 5.5, 5.5, D0, H1) == pytest.approx(0.0, abs=1e-9)

    def test_strictly_positive(self):
        assert variational_F(0.5, 1.0, 5.5, 5.5, D0, H1) > 0.0


class TestMomentAlongPath:
    def test_matches_direct_engine(self):
        path = PerturbationPath(H1, SignedAtomMeasure([(1.0, 0.5)]), t_max=1.0)
        direct = cp_abs_moment(CompoundLaw.pure(LevyVarianceMeasure([(1.0, 1.25)])), 5.0)
        assert moment_along_path(path, 5.0, D0, 0.5) == pytest.approx(direct, rel=1e-12)
