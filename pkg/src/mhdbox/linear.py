"""Per-mode analysis of the linearized perturbation system.

At wavenumber k the linearization (normalized parameters mu = 1, lam = 0)

    d rho/dt = -div u,   d u/dt = Lap u - grad rho + (perp_div b, 0),
    d b/dt = perp_grad u1

acts on (rho^, u1^, u2^, b1^, b2^) via the substitution d_j -> i k_j.
The divergence-free constraint i k.b^ = 0 is invariant; eliminating the
constrained magnetic direction leaves a 4x4 matrix whose characteristic
polynomial coincides with the quartic symbol

    p(z) = (z^2 + |k|^2 z + |k|^2)^2 - k1^2 |k|^2

of the fourth-order wave equation satisfied by rho and b.  The symbol
check below verifies that identity eigenvalue by eigenvalue, with the
eigenvalues refined in extended precision so the residual is not limited
by double-precision eigensolver noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

_ZERO_SNAP = 1e-12


def _validate_k(k) -> tuple:
    k1, k2 = int(k[0]), int(k[1])
    if (k1, k2) != (k[0], k[1]):
        raise ValueError("wavenumber must be an integer pair")
    if k1 == 0 and k2 == 0:
        raise ValueError("k = (0,0) is handled outside the mode analysis: "
                         "mean u is frozen at the linear level and mean b "
                         "is excluded by hypothesis")
    return k1, k2


@dataclass(frozen=True)
class ModeMatrix:
    """Linearized generator at one wavenumber.

    `matrix` is the full 5x5 on (rho^, u1^, u2^, b1^, b2^); `reduced` is
    the 4x4 on (rho^, u1^, u2^, beta) where beta is the divergence-free
    magnetic amplitude along (-k2, k1)/|k|.
    """

    k: tuple
    matrix: np.ndarray
    reduced: np.ndarray
    constraint_dim: int


@dataclass(frozen=True)
class ModeSpectrum:
    k: tuple
    eigenvalues: np.ndarray
    spectral_abscissa: float


def mode_matrix(k) -> ModeMatrix:
    k1, k2 = _validate_k(k)
    a = float(k1 * k1 + k2 * k2)
    i = 1j
    M = np.array([
        [0, -i * k1, -i * k2, 0, 0],
        [-i * k1, -a, 0, i * k2, -i * k1],
        [-i * k2, 0, -a, 0, 0],
        [0, i * k2, 0, 0, 0],
        [0, -i * k1, 0, 0, 0],
    ], dtype=complex)
    q = np.sqrt(a)
    R = np.array([
        [0, -i * k1, -i * k2, 0],
        [-i * k1, -a, 0, -i * q],
        [-i * k2, 0, -a, 0],
        [0, -i * q, 0, 0],
    ], dtype=complex)
    return ModeMatrix((k1, k2), M, R, 4)


def _sorted_desc(vals: np.ndarray) -> np.ndarray:
    order = np.lexsort((-vals.imag, -vals.real))
    return vals[order]


def mode_spectrum(k) -> ModeSpectrum:
    mm = mode_matrix(k)
    vals = _sorted_desc(np.linalg.eigvals(mm.reduced))
    absc = float(vals.real.max())
    if abs(absc) < _ZERO_SNAP:
        absc = 0.0
    return ModeSpectrum(mm.k, vals, absc)


# ---------------------------------------------------------------------------
# fourth-order wave symbol
# ---------------------------------------------------------------------------

def _integer_reduced(k1: int, k2: int):
    """Reduced generator with Gaussian-integer entries.

    Rescaling the magnetic amplitude by |k| turns the couplings into
    -i and -i a; a diagonal similarity, so the spectrum is unchanged.
    Entries are returned as (re, im) integer pairs.
    """
    a = k1 * k1 + k2 * k2
    z = (0, 0)
    return [
        [z, (0, -k1), (0, -k2), z],
        [(0, -k1), (-a, 0), z, (0, -1)],
        [(0, -k2), z, (-a, 0), z],
        [z, (0, -a), z, z],
    ]


def _gadd(x, y):
    return (x[0] + y[0], x[1] + y[1])


def _gmul(x, y):
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _char_poly_exact(A):
    """Monic characteristic polynomial coefficients via Faddeev-LeVerrier.

    Exact over the Gaussian integers; the per-step division is exact
    because the coefficients are themselves Gaussian integers.
    """
    n = len(A)
    B = [[(1, 0) if i == j else (0, 0) for j in range(n)] for i in range(n)]
    coeffs = [(1, 0)]
    for step in range(1, n + 1):
        AB = [[(0, 0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                acc = (0, 0)
                for m in range(n):
                    acc = _gadd(acc, _gmul(A[i][m], B[m][j]))
                AB[i][j] = acc
        tr = (sum(AB[i][i][0] for i in range(n)), sum(AB[i][i][1] for i in range(n)))
        assert tr[0] % step == 0 and tr[1] % step == 0
        c = (-tr[0] // step, -tr[1] // step)
        coeffs.append(c)
        B = AB
        for i in range(n):
            B[i][i] = _gadd(B[i][i], c)
    return coeffs


def _wave_symbol(lam, k1: int, k2: int):
    a = k1 * k1 + k2 * k2
    quad = lam * lam + a * lam + a
    return quad * quad - k1 * k1 * a


def _polish_roots(coeffs, seeds, dps: int = 60, iters: int = 30):
    """Newton-refine eigenvalue seeds against the exact char polynomial.

    Quadratic convergence on simple roots reaches working precision in a
    handful of iterations; on multiple roots Newton stalls linearly, but
    there the polynomial value itself is already far below any tolerance
    of interest (it scales with the root error to the multiplicity).
    """
    with mpmath.workdps(dps):
        poly = [mpmath.mpc(c[0], c[1]) for c in coeffs]
        dpoly = [poly[j] * (len(poly) - 1 - j) for j in range(len(poly) - 1)]
        scale = max(1.0, max(abs(c) for c in poly))
        tiny = mpmath.mpf(10) ** (-(dps - 8)) * scale
        out = []
        for seed in seeds:
            z = mpmath.mpc(seed.real, seed.imag)
            for _ in range(iters):
                f = mpmath.polyval(poly, z)
                if abs(f) < tiny:
                    break
                df = mpmath.polyval(dpoly, z)
                if df == 0:
                    break
                znew = z - f / df
                if znew == z:
                    break
                z = znew
            out.append(z)
        return out


def fourth_order_symbol_check(k) -> float:
    """Max |p(z)| of the wave symbol over the rho/b eigenvalue branch.

    Eigenvalues come from the reduced mode matrix (double-precision seeds,
    then Newton refinement on the exact characteristic polynomial in
    extended precision); the symbol is evaluated in the same precision, so
    the returned residual reflects the matrix/symbol identity rather than
    eigensolver round-off.
    """
    k1, k2 = _validate_k(k)
    mm = mode_matrix((k1, k2))
    vals, vecs = np.linalg.eig(mm.reduced)

    # branch: eigenvectors whose (rho, b) content is at least the u content
    rb = np.abs(vecs[0]) ** 2 + np.abs(vecs[3]) ** 2
    uu = np.abs(vecs[1]) ** 2 + np.abs(vecs[2]) ** 2
    on_branch = rb >= uu - 1e-9
    if not np.any(on_branch):
        # tie-break toward the smallest symbol residual
        resid = [abs(_wave_symbol(complex(z), k1, k2)) for z in vals]
        on_branch = np.zeros(len(vals), dtype=bool)
        on_branch[int(np.argmin(resid))] = True

    coeffs = _char_poly_exact(_integer_reduced(k1, k2))
    polished = _polish_roots(coeffs, vals[on_branch])
    with mpmath.workdps(60):
        residuals = [abs(_wave_symbol(z, k1, k2)) for z in polished]
        return float(max(residuals))


def symbol_check_lattice(kmax: int) -> float:
    """Max symbol residual over 0 < max(|k1|,|k2|) <= kmax."""
    worst = 0.0
    for k1 in range(-kmax, kmax + 1):
        for k2 in range(-kmax, kmax + 1):
            if k1 == 0 and k2 == 0:
                continue
            worst = max(worst, fourth_order_symbol_check((k1, k2)))
    return worst


# ---------------------------------------------------------------------------
# damping classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DampingRow:
    k1: int
    k2: int
    abscissa: float
    kernel_dim: int

    def csv(self) -> str:
        return f"{self.k1},{self.k2},{self.abscissa:.17g},{self.kernel_dim}"


def damping_map(kmax: int) -> list:
    """Spectral abscissa and kernel dimension over the lattice |k_i| <= kmax.

    Modes with k2 = 0 sit on a one-dimensional neutral kernel; every mode
    with k2 != 0 is strictly damped (the vertical regularization of the
    background field).  Rows are ordered by (k1, k2) for reproducible CSV
    output.
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    rows = []
    for k1 in range(-kmax, kmax + 1):
        for k2 in range(-kmax, kmax + 1):
            if k1 == 0 and k2 == 0:
                continue
            mm = mode_matrix((k1, k2))
            spec = mode_spectrum((k1, k2))
            svals = np.linalg.svd(mm.reduced, compute_uv=False)
            tol = 1e-10 * max(1.0, float(svals[0]))
            kernel = int(np.sum(svals < tol))
            rows.append(DampingRow(k1, k2, spec.spectral_abscissa, kernel))
    return rows


def wave_pair_check(k) -> float:
    """Deviation of the (rho, u2) block from its companion wave form.

    For k = (0, k2) the block must equal [[0, -i k2], [-i k2, -k2^2]].
    """
    k1, k2 = _validate_k(k)
    if k1 != 0 or k2 == 0:
        raise ValueError("wave_pair_check requires k = (0, k2) with k2 != 0")
    M = mode_matrix((k1, k2)).matrix
    block = M[np.ix_([0, 2], [0, 2])]
    expected = np.array([[0, -1j * k2], [-1j * k2, -float(k2 * k2)]], dtype=complex)
    return float(np.max(np.abs(block - expected)))
