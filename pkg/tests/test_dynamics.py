import numpy as np
import pytest

from mhdbox.dynamics import (
    PhysParams,
    PressureLaw,
    SmallnessAnsatzError,
    State,
    l2_ledger,
    omega,
    omega_rhs,
    reconstruct_physical,
    rhs,
    rhs_primitive_velocity,
    rhs_terms,
    u1_equation_residual,
)
from mhdbox.spectral import (
    ScalarField,
    VectorField,
    perp_grad,
    product,
    random_smooth_field,
    sobolev_norm,
)
from .conftest import cos_field, sin_field, random_state
from .oracles import chain_rule_omega_dt


class TestPressureLaw:
    def test_normalization(self):
        for gamma in (0.8, 1.0, 1.4, 2.0):
            law = PressureLaw(gamma)
            assert law.dP(1.0) == pytest.approx(1.0)

    def test_strictly_increasing(self):
        law = PressureLaw(1.4)
        x = np.linspace(0.05, 1.95, 200)
        assert np.all(law.dP(x) > 0)

    def test_q_small_and_quadratic(self):
        law = PressureLaw(1.4)
        h = 1e-7
        assert law.q(0.0) == 0.0
        assert abs((law.q(h) - law.q(-h)) / (2 * h)) < 1e-6
        rho = np.linspace(-0.5, 0.5, 101)
        assert np.all(np.abs(law.q(rho)) <= 0.5 * rho**2)

    def test_q_closed_form_gamma14(self):
        law = PressureLaw(1.4)
        want = (1.5**1.4 - 1) / 1.4 - 0.5
        assert law.q(0.5) == pytest.approx(want, rel=1e-14)

    def test_q1_vanishes_to_second_order(self):
        for gamma in (1.0, 1.4):
            law = PressureLaw(gamma)
            h = 1e-7
            assert law.q1(0.0) == 0.0
            assert abs((law.q1(h) - law.q1(-h)) / (2 * h)) < 1e-6

    def test_linear_law_q_identically_zero(self):
        law = PressureLaw(1.0)
        rho = np.linspace(-0.5, 0.5, 50)
        assert np.abs(law.q(rho)).max() < 1e-15


class TestPhysParams:
    def test_rejects_bad_viscosities(self):
        with pytest.raises(ValueError):
            PhysParams(mu=0.0)
        with pytest.raises(ValueError):
            PhysParams(mu=1.0, lam=-1.5)


class TestState:
    def test_zero_mean_b_enforced(self, grid32):
        c = grid32.zeros()
        c[0, 0] = 1e-6
        with pytest.raises(ValueError):
            State(ScalarField.zero(grid32), VectorField.zero(grid32),
                  VectorField(ScalarField(grid32, c), ScalarField.zero(grid32)))

    def test_negative_time_rejected(self, grid32):
        with pytest.raises(ValueError):
            State.zero(grid32, time=-1.0)


class TestRhs:
    def test_equilibrium_fixed_point(self, grid32, params):
        T = rhs(State.zero(grid32), params)
        assert np.abs(T.coeff_stack()).max() == 0.0

    def test_pure_magnetic_state(self, grid32, params):
        # b = perp_grad(sin x2) = (cos x2, 0):
        # db/dt = 0;  du/dt = (perp_div b, 0) + b.grad b - grad|b|^2/2
        #           = (-sin x2, sin(2 x2)/2)
        b = perp_grad(sin_field(grid32, (0, 1)))
        st = State(ScalarField.zero(grid32), VectorField.zero(grid32), b)
        T = rhs(st, params)
        assert np.abs(np.stack([T.b.x1.coeffs, T.b.x2.coeffs])).max() < 1e-15
        assert np.abs(T.rho.coeffs).max() < 1e-16
        want_u1 = -1.0 * sin_field(grid32, (0, 1))
        want_u2 = 0.5 * sin_field(grid32, (0, 2))
        assert np.abs(T.u.x1.coeffs - want_u1.coeffs).max() < 1e-14
        assert np.abs(T.u.x2.coeffs - want_u2.coeffs).max() < 1e-14

    def test_pure_velocity_state(self, grid32):
        for mu in (1.0, 2.5):
            params = PhysParams(mu=mu)
            u = VectorField(sin_field(grid32, (0, 1)), ScalarField.zero(grid32))
            st = State(ScalarField.zero(grid32), u, VectorField.zero(grid32))
            T = rhs(st, params)
            want_b1 = cos_field(grid32, (0, 1))
            assert np.abs(T.b.x1.coeffs - want_b1.coeffs).max() < 1e-14
            assert np.abs(T.b.x2.coeffs).max() < 1e-15
            assert np.abs(T.rho.coeffs).max() < 1e-15
            want_u1 = -mu * sin_field(grid32, (0, 1)).coeffs
            assert np.abs(T.u.x1.coeffs - want_u1).max() < 1e-14

    def test_matches_term_sum(self, grid48, params):
        st = random_state(grid48, 21, 1e-2)
        T = rhs(st, params)
        terms = rhs_terms(st, params)
        drho = terms["rho_div_u"].coeffs + terms["rho_transport"].coeffs
        du1 = sum(terms[k].x1.coeffs for k in
                  ("u_viscous", "u_lorentz_linear", "u_pressure", "u_advection",
                   "u_viscous_correction", "u_tension", "u_magnetic_pressure",
                   "u_lorentz_correction"))
        du2 = sum(terms[k].x2.coeffs for k in
                  ("u_viscous", "u_lorentz_linear", "u_pressure", "u_advection",
                   "u_viscous_correction", "u_tension", "u_magnetic_pressure",
                   "u_lorentz_correction"))
        db1 = sum(terms[k].x1.coeffs for k in
                  ("b_stretch_linear", "b_transport", "b_stretch", "b_compression"))
        db2 = sum(terms[k].x2.coeffs for k in
                  ("b_stretch_linear", "b_transport", "b_stretch", "b_compression"))
        scale = np.abs(T.coeff_stack()).max()
        assert np.abs(T.rho.coeffs - drho).max() < 1e-13 * scale + 1e-18
        assert np.abs(T.u.x1.coeffs - du1).max() < 1e-12 * scale + 1e-18
        assert np.abs(T.u.x2.coeffs - du2).max() < 1e-12 * scale + 1e-18
        assert np.abs(T.b.x1.coeffs - db1).max() < 1e-13 * scale + 1e-18
        assert np.abs(T.b.x2.coeffs - db2).max() < 1e-13 * scale + 1e-18

    def test_split_equals_primitive_velocity(self, grid48):
        # tiny band-limited data so dealiasing tails sit below round-off
        for lam in (0.0, 0.7):
            params = PhysParams(mu=1.3, lam=lam)
            st = random_state(grid48, 33, 1e-6, decay=1.2)
            T = rhs(st, params)
            prim = rhs_primitive_velocity(st, params)
            diff = max(np.abs(T.u.x1.coeffs - prim.x1.coeffs).max(),
                       np.abs(T.u.x2.coeffs - prim.x2.coeffs).max())
            assert diff < 1e-16

    def test_mean_preservation_exact(self, grid48, params):
        st = random_state(grid48, 5, 1e-2)
        T = rhs(st, params)
        assert T.rho.coeffs[0, 0] == 0.0
        assert T.b.x1.coeffs[0, 0] == 0.0
        assert T.b.x2.coeffs[0, 0] == 0.0

    def test_ansatz_violation_raises(self, grid32, params):
        c = grid32.zeros()
        c[0, 0] = -0.8  # rho + 1 = 0.2 <= 1/4
        st = State(ScalarField(grid32, c), VectorField.zero(grid32),
                   VectorField.zero(grid32))
        with pytest.raises(SmallnessAnsatzError):
            rhs(st, params)


class TestOmega:
    def test_zero_state(self, grid32, params):
        om = omega(State.zero(grid32), params)
        assert np.abs(om.coeffs).max() < 1e-16

    def test_pure_b_state(self, grid32, params):
        b = VectorField(cos_field(grid32, (0, 1)), ScalarField.zero(grid32))
        st = State(ScalarField.zero(grid32), VectorField.zero(grid32), b)
        om = omega(st, params)
        want = -1.0 * sin_field(grid32, (0, 1))
        assert np.abs(om.coeffs - want.coeffs).max() < 1e-14

    def test_pure_rho_state(self, grid48, params):
        # Omega = -d1 P(1 + eps cos x1) = P'(1 + eps cos x1) eps sin x1
        eps = 0.05
        st = State(eps * cos_field(grid48, (1, 0)), VectorField.zero(grid48),
                   VectorField.zero(grid48))
        om = omega(st, params)
        vals = params.pressure.dP(1.0 + eps * np.cos(grid48.x1)) \
            * eps * np.sin(grid48.x1)
        want = grid48.to_coeffs(vals) * grid48.dealias_mask
        assert np.abs(om.coeffs - want).max() < 1e-14

    def test_omega_rhs_zero_state(self, grid32, params):
        out = omega_rhs(State.zero(grid32), params)
        assert np.abs(out.coeffs).max() < 1e-16

    def test_omega_rhs_linear_example(self, grid32, params):
        # u1 = sin(x1 + x2): all rho/b terms vanish and
        # RHS = 2 d1^2 u1 + d2^2 u1 = -3 sin(x1 + x2)
        u = VectorField(sin_field(grid32, (1, 1)), ScalarField.zero(grid32))
        st = State(ScalarField.zero(grid32), u, VectorField.zero(grid32))
        out = omega_rhs(st, params)
        want = -3.0 * sin_field(grid32, (1, 1))
        assert np.abs(out.coeffs - want.coeffs).max() < 1e-13

    def test_omega_rhs_rejects_general_viscosity(self, grid32):
        st = State.zero(grid32)
        with pytest.raises(ValueError):
            omega_rhs(st, PhysParams(mu=2.0))
        with pytest.raises(ValueError):
            omega_rhs(st, PhysParams(mu=1.0, lam=0.5))

    def test_omega_rhs_matches_chain_rule(self, grid64, params):
        # instantaneous consistency against the independent chain-rule
        # oracle; agreement down to the cubic aliasing-grouping floor
        st = random_state(grid64, 14, 1e-4, decay=0.9)
        lhs = chain_rule_omega_dt(st, params)
        out = omega_rhs(st, params)
        scale = sobolev_norm(out, 0.0)
        assert sobolev_norm(lhs - out, 0.0) < 1e-10 * scale

    def test_u1_equation_residual(self, grid48, params):
        st = random_state(grid48, 41, 1e-6, decay=1.2)
        assert u1_equation_residual(st, params) < 1e-12


class TestLedger:
    def test_zero_state(self, grid32, params):
        s = l2_ledger(State.zero(grid32), params)
        assert (s.energy, s.dissipation, s.i2, s.i3) == (0.0, 0.0, 0.0, 0.0)

    def test_shear_flow(self, grid32, params):
        u = VectorField(sin_field(grid32, (0, 1)), ScalarField.zero(grid32))
        st = State(ScalarField.zero(grid32), u, VectorField.zero(grid32))
        s = l2_ledger(st, params)
        assert s.energy == pytest.approx(np.pi**2, rel=1e-12)
        assert s.dissipation == pytest.approx(2 * np.pi**2, rel=1e-12)
        assert abs(s.i2) < 1e-16
        assert abs(s.i3) < 1e-16


class TestReconstruct:
    def test_equilibrium(self, grid32, params):
        rho_t, u, B = reconstruct_physical(State.zero(grid32))
        assert rho_t.coeffs[0, 0] == 1.0
        assert np.abs(u.x1.coeffs).max() == 0.0
        assert B.x2.coeffs[0, 0] == 1.0
        assert np.abs(B.x1.coeffs).max() == 0.0

    def test_with_perturbation(self, grid32, params):
        b = VectorField(cos_field(grid32, (0, 1)), ScalarField.zero(grid32))
        st = State(ScalarField.zero(grid32), VectorField.zero(grid32), b)
        _, _, B = reconstruct_physical(st)
        assert B.x2.coeffs[0, 0] == 1.0  # mean B2 = 1
        assert np.abs(B.x1.coeffs - cos_field(grid32, (0, 1)).coeffs).max() == 0.0


def test_rhs_preserves_reflection_symmetry(grid48, params):
    from mhdbox.initial import reflection_defect
    from mhdbox.config import RunConfig
    from mhdbox.initial import make_initial_data
    cfg = RunConfig(n1=48, n2=48, epsilon=1e-2, seed=3)
    st = make_initial_data(cfg, grid48, reflection_symmetric=True)
    assert reflection_defect(st) < 1e-18
    T = rhs(st, params)
    mirrored = State(T.rho, T.u, T.b)  # tendencies transform like the fields
    assert reflection_defect(mirrored) < 1e-16
