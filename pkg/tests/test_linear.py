import numpy as np
import pytest

from mhdbox.linear import (
    damping_map,
    fourth_order_symbol_check,
    mode_matrix,
    mode_spectrum,
    wave_pair_check,
)


def symbolic_mode_matrix(k1, k2):
    """Independent symbol-substitution oracle built with sympy."""
    import sympy as sp
    rho, u1, u2, b1, b2 = sp.symbols("rho u1 u2 b1 b2")
    I = sp.I
    d1 = lambda kk: I * k1 * kk
    d2 = lambda kk: I * k2 * kk
    lap = lambda kk: -(k1**2 + k2**2) * kk
    eqs = [
        -(d1(u1) + d2(u2)),
        lap(u1) - d1(rho) + (d2(b1) - d1(b2)),
        lap(u2) - d2(rho),
        d2(u1),
        -d1(u1),
    ]
    vars_ = (rho, u1, u2, b1, b2)
    M = sp.Matrix([[sp.expand(e).coeff(v) for v in vars_] for e in eqs])
    return np.array(M.evalf(), dtype=complex)


class TestModeMatrix:
    @pytest.mark.parametrize("k", [(1, 0), (0, 1), (1, 1), (2, -3), (-4, 5)])
    def test_matches_symbolic_substitution(self, k):
        got = mode_matrix(k).matrix
        want = symbolic_mode_matrix(*k)
        assert np.abs(got - want).max() < 1e-12

    def test_k10_subsystem(self):
        # (rho, u1, b2) block is [[0,-i,0],[-i,-1,-i],[0,-i,0]] and u2
        # decouples at rate -1
        M = mode_matrix((1, 0)).matrix
        block = M[np.ix_([0, 1, 4], [0, 1, 4])]
        want = np.array([[0, -1j, 0], [-1j, -1, -1j], [0, -1j, 0]])
        assert np.abs(block - want).max() == 0.0
        assert M[2, 2] == -1.0

    def test_rejects_zero_mode(self):
        with pytest.raises(ValueError):
            mode_matrix((0, 0))

    @pytest.mark.parametrize("k", [(1, 0), (0, 2), (3, 4), (-2, 7)])
    def test_constraint_subspace_invariant(self, k):
        M = mode_matrix(k).matrix
        rng = np.random.default_rng(5)
        for _ in range(5):
            v = rng.normal(size=5) + 1j * rng.normal(size=5)
            # project b onto k.b = 0
            kv = np.array(k, dtype=float)
            b = v[3:]
            v[3:] = b - kv * (kv @ b) / (kv @ kv)
            w = M @ v
            assert abs(kv @ w[3:]) < 1e-14 * max(1.0, np.abs(w).max())


class TestModeSpectrum:
    def test_k01(self):
        spec = mode_spectrum((0, 1))
        r3 = np.sqrt(3)
        want = np.array([(-1 + 1j * r3) / 2, (-1 + 1j * r3) / 2,
                         (-1 - 1j * r3) / 2, (-1 - 1j * r3) / 2])
        assert np.abs(spec.eigenvalues - want).max() < 1e-10
        assert spec.spectral_abscissa == pytest.approx(-0.5, abs=1e-12)

    def test_k10(self):
        spec = mode_spectrum((1, 0))
        r7 = np.sqrt(7)
        want = np.array([0.0, (-1 + 1j * r7) / 2, (-1 - 1j * r7) / 2, -1.0])
        assert np.abs(spec.eigenvalues - want).max() < 1e-10
        assert spec.spectral_abscissa == 0.0

    def test_k02_strictly_damped(self):
        assert mode_spectrum((0, 2)).spectral_abscissa < -0.4

    @pytest.mark.parametrize("k", [(1, 1), (2, 3), (5, 0), (0, 4), (-7, 2)])
    def test_trace_consistency(self, k):
        a = k[0]**2 + k[1]**2
        vals = mode_spectrum(k).eigenvalues
        assert abs(vals.sum() - (-2.0 * a)) < 1e-10 * max(1.0, a)


class TestSymbolCheck:
    def test_low_modes(self):
        for k in [(0, 1), (1, 0), (1, 1)]:
            assert fourth_order_symbol_check(k) < 1e-12

    def test_defective_mode(self):
        # (0, 2) has a fourfold eigenvalue -2; the residual must still vanish
        assert fourth_order_symbol_check((0, 2)) < 1e-10

    def test_large_mode(self):
        assert fourth_order_symbol_check((16, 16)) < 1e-10


class TestDampingMap:
    def test_kmax1(self):
        rows = {(r.k1, r.k2): r for r in damping_map(1)}
        assert len(rows) == 8
        for (k1, k2), r in rows.items():
            if k2 == 0:
                assert r.abscissa == 0.0
                assert r.kernel_dim == 1
            else:
                assert r.abscissa < 0.0

    def test_kernel_dimension_k10(self):
        rows = {(r.k1, r.k2): r for r in damping_map(1)}
        assert rows[(1, 0)].kernel_dim == 1

    def test_abscissa_k01_exact(self):
        rows = {(r.k1, r.k2): r for r in damping_map(1)}
        assert rows[(0, 1)].abscissa == pytest.approx(-0.5, abs=1e-12)

    def test_csv_row_shape(self):
        row = damping_map(1)[0]
        parts = row.csv().split(",")
        assert len(parts) == 4


class TestWavePair:
    def test_k01_exact(self):
        assert wave_pair_check((0, 1)) == 0.0

    def test_k03_block_polynomial(self):
        # block eigenvalues are the roots of z^2 + 9 z + 9
        M = mode_matrix((0, 3)).matrix
        block = M[np.ix_([0, 2], [0, 2])]
        vals = np.linalg.eigvals(block)
        roots = np.roots([1.0, 9.0, 9.0])
        assert np.abs(np.sort_complex(vals) - np.sort_complex(roots)).max() < 1e-12

    def test_k02_trace_det(self):
        M = mode_matrix((0, 2)).matrix
        block = M[np.ix_([0, 2], [0, 2])]
        assert np.trace(block) == pytest.approx(-4.0)
        assert np.linalg.det(block) == pytest.approx(4.0)

    def test_rejects_wrong_modes(self):
        with pytest.raises(ValueError):
            wave_pair_check((1, 1))
