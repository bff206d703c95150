"""Perturbation dynamics of 2D viscous, non-resistive compressible MHD.

The state (rho, u, b) is the perturbation of (density, velocity, magnetic
field) around the equilibrium (1, 0, e2) with e2 = (0, 1).  Writing
rho~ = rho + 1 and B = b + e2, the evolution is

    d rho/dt = -div u - div(rho u)
    d u/dt   = mu Lap u + lam grad div u + (perp_div b, 0)
               - (1/rho~) grad P(rho~) - u.grad u
               - (rho/rho~) (mu Lap u + lam grad div u)
               + (1/rho~) b.grad b - (1/(2 rho~)) grad |b|^2
               - (rho/rho~) (perp_div b, 0)
    d b/dt   = perp_grad u1 - u.grad b + b.grad u - b div u

with perp_grad = (d2, -d1) and perp_div b = d2 b1 - d1 b2.  With the
normalization mu = 1, lam = 0 the velocity equation reduces to the split
form whose linear part is Lap u - grad rho + (perp_div b, 0).

The combined quantity

    Omega = perp_div b - d1 P - (1/2) d1 |b|^2 + b.grad b1

couples to u1 and carries the enhanced dissipation of the divergence part
of the velocity; `omega_rhs` assembles its evolution equation term by term
for consistency checking against time differences of `omega` along
computed trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectral import (
    Grid,
    ScalarField,
    TWO_PI,
    VectorField,
    derivative,
    laplacian,
    perp_div,
    sobolev_norm,
)


class SmallnessAnsatzError(RuntimeError):
    """The density perturbation left the small-data regime."""


@dataclass(frozen=True)
class PressureLaw:
    """Barotropic pressure P(rho~) = (rho~^gamma - 1)/gamma, P'(1) = 1.

    gamma = 1 gives the linear law P(rho~) = rho~ - 1 (same gradient as
    P = rho~), for which the remainder q vanishes identically.
    """

    gamma: float = 1.4

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    def P(self, rho_total):
        g = self.gamma
        return (np.power(rho_total, g) - 1.0) / g

    def dP(self, rho_total):
        return np.power(rho_total, self.gamma - 1.0)

    def q(self, rho):
        """q(rho) = P(rho+1) - P(1) - rho; vanishes to second order at 0."""
        return self.P(rho + 1.0) - self.P(1.0) - rho

    def q1(self, rho):
        """q1(rho) = int_0^rho (P'(r+1)/(r+1) - 1) dr, closed form."""
        g = self.gamma
        if abs(g - 1.0) < 1e-14:
            return np.log1p(rho) - rho
        return (np.power(1.0 + rho, g - 1.0) - 1.0) / (g - 1.0) - rho

    @property
    def is_linear(self) -> bool:
        return abs(self.gamma - 1.0) < 1e-14


@dataclass(frozen=True)
class PhysParams:
    """Viscosities and pressure law; mu > 0 and mu + lam > 0 are required."""

    mu: float = 1.0
    lam: float = 0.0
    pressure: PressureLaw = field(default_factory=PressureLaw)

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.mu + self.lam <= 0:
            raise ValueError("mu + lam must be positive")

    @property
    def normalized(self) -> bool:
        return self.mu == 1.0 and self.lam == 0.0


_MEAN_B_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class State:
    """Perturbation fields at one time.

    b must have exactly zero mean (the zero modes of both components
    vanish); the divergence-free constraint is monitored by the stepper
    rather than enforced here.
    """

    rho: ScalarField
    u: VectorField
    b: VectorField
    time: float = 0.0

    def __post_init__(self):
        g = self.rho.grid
        for f in (self.u.x1, self.u.x2, self.b.x1, self.b.x2):
            if not g.compatible(f.grid):
                raise ValueError("state fields must share one grid")
        if self.time < 0:
            raise ValueError("time must be nonnegative")
        mb = max(abs(self.b.x1.coeffs[0, 0]), abs(self.b.x2.coeffs[0, 0]))
        if mb > _MEAN_B_TOL:
            raise ValueError(f"b must have zero mean, |zero mode| = {mb:.3e}")

    @property
    def grid(self) -> Grid:
        return self.rho.grid

    @classmethod
    def zero(cls, grid: Grid, time: float = 0.0) -> "State":
        return cls(ScalarField.zero(grid), VectorField.zero(grid),
                   VectorField.zero(grid), time)

    def div_b_norm(self) -> float:
        g = self.grid
        d = 1j * g.k1 * self.b.x1.coeffs + 1j * g.k2 * self.b.x2.coeffs
        return float(np.sqrt(TWO_PI**2 * np.sum(np.abs(d) ** 2)))

    def mean_b(self) -> tuple:
        return (float(abs(self.b.x1.coeffs[0, 0])),
                float(abs(self.b.x2.coeffs[0, 0])))

    def rho_linf(self) -> float:
        return self.rho.linf()

    def coeff_stack(self) -> np.ndarray:
        """Writable (5, n1, n2) copy in the order rho, u1, u2, b1, b2."""
        return np.stack([self.rho.coeffs, self.u.x1.coeffs, self.u.x2.coeffs,
                         self.b.x1.coeffs, self.b.x2.coeffs])

    @classmethod
    def from_coeff_stack(cls, grid: Grid, Y: np.ndarray, time: float) -> "State":
        return cls(
            ScalarField(grid, Y[0]),
            VectorField(ScalarField(grid, Y[1]), ScalarField(grid, Y[2])),
            VectorField(ScalarField(grid, Y[3]), ScalarField(grid, Y[4])),
            time,
        )


@dataclass(frozen=True, eq=False)
class Tendency:
    rho: ScalarField
    u: VectorField
    b: VectorField

    def coeff_stack(self) -> np.ndarray:
        return np.stack([self.rho.coeffs, self.u.x1.coeffs, self.u.x2.coeffs,
                         self.b.x1.coeffs, self.b.x2.coeffs])


# ---------------------------------------------------------------------------
# right-hand side
# ---------------------------------------------------------------------------

def _ansatz_check(rho_vals: np.ndarray) -> None:
    if float(rho_vals.real.min()) + 1.0 <= 0.25:
        raise SmallnessAnsatzError(
            "min(rho + 1) <= 1/4 on the grid; quotient 1/(rho+1) near-singular")


def rhs_arrays(Y: np.ndarray, grid: Grid, params: PhysParams, *,
               include_viscous: bool = True,
               linearized: bool = False) -> np.ndarray:
    """Tendency of the stacked coefficients (rho, u1, u2, b1, b2).

    `include_viscous=False` drops the linear viscous operator on u (it is
    integrated exactly by the stepper); the small nonlinear viscous
    correction -(rho/rho~)(mu Lap u + lam grad div u) stays.  The zero
    modes of the rho and b tendencies are scrubbed to exactly zero: every
    contribution is a perfect divergence or a derivative, so their means
    are conserved identically.
    """
    K1, K2, ksq, mask = grid.k1, grid.k2, grid.ksq, grid.dealias_mask
    rho_c, u1_c, u2_c, b1_c, b2_c = Y
    mu, lam = params.mu, params.lam

    div_u_c = 1j * K1 * u1_c + 1j * K2 * u2_c
    curl_b_c = 1j * K2 * b1_c - 1j * K1 * b2_c

    out = np.empty_like(Y)

    if linearized:
        out[0] = -div_u_c
        out[1] = curl_b_c - 1j * K1 * rho_c
        out[2] = -1j * K2 * rho_c
        if include_viscous:
            out[1] += -mu * ksq * u1_c + lam * 1j * K1 * div_u_c
            out[2] += -mu * ksq * u2_c + lam * 1j * K2 * div_u_c
        out[3] = 1j * K2 * u1_c
        out[4] = -1j * K1 * u1_c
        return out

    # one batched inverse transform for every grid quantity the terms need
    IK1, IK2 = grid.ik1, grid.ik2
    spec = np.empty((17, grid.n1, grid.n2), dtype=complex)
    spec[0:5] = Y
    spec[5] = IK1 * rho_c
    spec[6] = IK2 * rho_c
    spec[7] = IK1 * u1_c
    spec[8] = IK2 * u1_c
    spec[9] = IK1 * u2_c
    spec[10] = IK2 * u2_c
    spec[11] = IK1 * b1_c
    spec[12] = IK2 * b1_c
    spec[13] = IK1 * b2_c
    spec[14] = IK2 * b2_c
    spec[15] = -mu * ksq * u1_c
    spec[16] = -mu * ksq * u2_c
    if lam != 0.0:
        spec[15] += lam * IK1 * div_u_c
        spec[16] += lam * IK2 * div_u_c
    # physical fields are real; assembling pointwise terms on the real
    # parts halves the arithmetic and scrubs Hermitian round-off drift
    vals = grid.to_values(spec).real
    (r, u1, u2, b1, b2, drx, dry, du1x, du1y, du2x, du2y,
     db1x, db1y, db2x, db2y, visc1, visc2) = vals
    _ansatz_check(r)

    w = 1.0 / (r + 1.0)
    Pp = params.pressure.dP(r + 1.0)
    divu = du1x + du2y
    curlb = db1y - db2x

    nl = np.empty((5, grid.n1, grid.n2))
    # density: -div(rho u) = -(u.grad rho + rho div u)
    nl[0] = -(u1 * drx + u2 * dry + r * divu)
    # velocity, split form: pointwise corrections to the spectral linear part
    grad_bsq_x = 2.0 * (b1 * db1x + b2 * db2x)
    grad_bsq_y = 2.0 * (b1 * db1y + b2 * db2y)
    nl[1] = (-(u1 * du1x + u2 * du1y)
             - (r * w) * visc1
             + w * (b1 * db1x + b2 * db1y)
             - 0.5 * w * grad_bsq_x
             - (r * w) * curlb
             - (Pp * w) * drx)
    nl[2] = (-(u1 * du2x + u2 * du2y)
             - (r * w) * visc2
             + w * (b1 * db2x + b2 * db2y)
             - 0.5 * w * grad_bsq_y
             - (Pp * w) * dry)
    # induction: -u.grad b + b.grad u - b div u
    nl[3] = -(u1 * db1x + u2 * db1y) + (b1 * du1x + b2 * du1y) - b1 * divu
    nl[4] = -(u1 * db2x + u2 * db2y) + (b1 * du2x + b2 * du2y) - b2 * divu
    nl_c = grid.to_coeffs(nl) * mask

    out[0] = -div_u_c + nl_c[0]
    out[1] = curl_b_c + nl_c[1]
    out[2] = nl_c[2]
    if include_viscous:
        out[1] += -mu * ksq * u1_c + lam * IK1 * div_u_c
        out[2] += -mu * ksq * u2_c + lam * IK2 * div_u_c
    out[3] = IK2 * u1_c + nl_c[3]
    out[4] = -IK1 * u1_c + nl_c[4]
    # perfect-divergence structure: the rho and b means are conserved exactly
    out[0][0, 0] = 0.0
    out[3][0, 0] = 0.0
    out[4][0, 0] = 0.0
    return out


def rhs(state: State, params: PhysParams) -> Tendency:
    """Full right-hand side of the perturbation system."""
    dY = rhs_arrays(state.coeff_stack(), state.grid, params)
    g = state.grid
    return Tendency(
        ScalarField(g, dY[0]),
        VectorField(ScalarField(g, dY[1]), ScalarField(g, dY[2])),
        VectorField(ScalarField(g, dY[3]), ScalarField(g, dY[4])),
    )


def rhs_terms(state: State, params: PhysParams) -> dict:
    """Each term of the split-form equations as a named spectral field.

    Slower than `rhs` (one transform per term); meant for inspection and
    unit tests.  Summing the entries per equation reproduces `rhs` to
    round-off.
    """
    g = state.grid
    K1, K2, ksq, mask = g.k1, g.k2, g.ksq, g.dealias_mask
    val = g.to_values
    rho_c = state.rho.coeffs
    u1_c, u2_c = state.u.x1.coeffs, state.u.x2.coeffs
    b1_c, b2_c = state.b.x1.coeffs, state.b.x2.coeffs
    mu, lam = params.mu, params.lam

    r = val(rho_c)
    _ansatz_check(r)
    u1, u2, b1, b2 = val(u1_c), val(u2_c), val(b1_c), val(b2_c)
    drx, dry = val(1j * K1 * rho_c), val(1j * K2 * rho_c)
    du1x, du1y = val(1j * K1 * u1_c), val(1j * K2 * u1_c)
    du2x, du2y = val(1j * K1 * u2_c), val(1j * K2 * u2_c)
    db1x, db1y = val(1j * K1 * b1_c), val(1j * K2 * b1_c)
    db2x, db2y = val(1j * K1 * b2_c), val(1j * K2 * b2_c)
    w = 1.0 / (r + 1.0)
    Pp = params.pressure.dP(r + 1.0)
    divu = du1x + du2y
    curlb = db1y - db2x

    def sf(coeffs):
        return ScalarField(g, coeffs)

    def fwd(x):
        return g.to_coeffs(x) * mask

    def vec(cx, cy):
        return VectorField(sf(cx), sf(cy))

    visc1_c = -mu * ksq * u1_c + lam * 1j * K1 * (1j * K1 * u1_c + 1j * K2 * u2_c)
    visc2_c = -mu * ksq * u2_c + lam * 1j * K2 * (1j * K1 * u1_c + 1j * K2 * u2_c)
    visc1, visc2 = val(visc1_c), val(visc2_c)

    terms = {
        "rho_div_u": sf(-(1j * K1 * u1_c + 1j * K2 * u2_c)),
        "rho_transport": sf(fwd(-(u1 * drx + u2 * dry + r * divu))),
        "u_viscous": vec(visc1_c, visc2_c),
        "u_lorentz_linear": vec(1j * K2 * b1_c - 1j * K1 * b2_c, g.zeros()),
        "u_pressure": vec(fwd(-(Pp * w) * drx), fwd(-(Pp * w) * dry)),
        "u_advection": vec(fwd(-(u1 * du1x + u2 * du1y)),
                           fwd(-(u1 * du2x + u2 * du2y))),
        "u_viscous_correction": vec(fwd(-(r * w) * visc1), fwd(-(r * w) * visc2)),
        "u_tension": vec(fwd(w * (b1 * db1x + b2 * db1y)),
                         fwd(w * (b1 * db2x + b2 * db2y))),
        "u_magnetic_pressure": vec(fwd(-w * (b1 * db1x + b2 * db2x)),
                                   fwd(-w * (b1 * db1y + b2 * db2y))),
        "u_lorentz_correction": vec(fwd(-(r * w) * curlb), g.zeros()),
        "b_stretch_linear": vec(1j * K2 * u1_c, -1j * K1 * u1_c),
        "b_transport": vec(fwd(-(u1 * db1x + u2 * db1y)),
                           fwd(-(u1 * db2x + u2 * db2y))),
        "b_stretch": vec(fwd(b1 * du1x + b2 * du1y), fwd(b1 * du2x + b2 * du2y)),
        "b_compression": vec(fwd(-b1 * divu), fwd(-b2 * divu)),
    }
    return terms


def rhs_primitive_velocity(state: State, params: PhysParams) -> VectorField:
    """du/dt assembled from the unexpanded momentum balance.

    Divides the primitive momentum equation by rho~ pointwise instead of
    using the split form; agrees with `rhs` up to dealiasing tails.
    """
    g = state.grid
    K1, K2, ksq, mask = g.k1, g.k2, g.ksq, g.dealias_mask
    val = g.to_values
    rho_c = state.rho.coeffs
    u1_c, u2_c = state.u.x1.coeffs, state.u.x2.coeffs
    b1_c, b2_c = state.b.x1.coeffs, state.b.x2.coeffs
    mu, lam = params.mu, params.lam

    r = val(rho_c)
    _ansatz_check(r)
    rt = r + 1.0
    u1, u2, b1, b2 = val(u1_c), val(u2_c), val(b1_c), val(b2_c)
    du1x, du1y = val(1j * K1 * u1_c), val(1j * K2 * u1_c)
    du2x, du2y = val(1j * K1 * u2_c), val(1j * K2 * u2_c)
    db1x, db1y = val(1j * K1 * b1_c), val(1j * K2 * b1_c)
    db2x, db2y = val(1j * K1 * b2_c), val(1j * K2 * b2_c)
    drx, dry = val(1j * K1 * rho_c), val(1j * K2 * rho_c)
    div_u_c = 1j * K1 * u1_c + 1j * K2 * u2_c
    visc1 = mu * val(-ksq * u1_c) + (lam * val(1j * K1 * div_u_c) if lam else 0.0)
    visc2 = mu * val(-ksq * u2_c) + (lam * val(1j * K2 * div_u_c) if lam else 0.0)

    B1, B2 = b1, b2 + 1.0
    # B.grad B - (1/2) grad |B|^2 with grad B2_total = grad b2
    lor1 = B1 * db1x + B2 * db1y - (B1 * db1x + B2 * db2x)
    lor2 = B1 * db2x + B2 * db2y - (B1 * db1y + B2 * db2y)
    gradP_x, gradP_y = params.pressure.dP(rt) * drx, params.pressure.dP(rt) * dry
    a1 = (-rt * (u1 * du1x + u2 * du1y) + visc1 - gradP_x + lor1) / rt
    a2 = (-rt * (u1 * du2x + u2 * du2y) + visc2 - gradP_y + lor2) / rt
    return VectorField(ScalarField(g, g.to_coeffs(a1) * mask),
                       ScalarField(g, g.to_coeffs(a2) * mask))


# ---------------------------------------------------------------------------
# the combined quantity Omega
# ---------------------------------------------------------------------------

def omega(state: State, params: PhysParams) -> ScalarField:
    """Omega = perp_div b - d1 P - (1/2) d1 |b|^2 + b.grad b1."""
    g = state.grid
    K1, mask = g.k1, g.dealias_mask
    val = g.to_values
    b1_c, b2_c = state.b.x1.coeffs, state.b.x2.coeffs
    b1, b2 = val(b1_c), val(b2_c)
    db1x, db1y = val(1j * K1 * b1_c), val(1j * g.k2 * b1_c)

    P_c = g.to_coeffs(params.pressure.P(val(state.rho.coeffs) + 1.0)) * mask
    bsq_c = g.to_coeffs(b1 * b1 + b2 * b2) * mask
    bgradb1_c = g.to_coeffs(b1 * db1x + b2 * db1y) * mask
    curl_b_c = 1j * g.k2 * b1_c - 1j * K1 * b2_c
    return ScalarField(g, curl_b_c - 1j * K1 * P_c - 0.5j * K1 * bsq_c + bgradb1_c)


def omega_rhs(state: State, params: PhysParams) -> ScalarField:
    """Right-hand side of the Omega evolution equation, term by term.

    Valid only for the normalized parameters mu = 1, lam = 0 under which
    the equation is derived.  Serves as a consistency oracle: a central
    time difference of `omega` along a trajectory converges to this field
    at second order in the step size.
    """
    if not params.normalized:
        raise ValueError("omega_rhs requires mu = 1 and lam = 0")
    g = state.grid
    K1, K2, mask = g.k1, g.k2, g.dealias_mask
    val = g.to_values
    rho_c = state.rho.coeffs
    u1_c, u2_c = state.u.x1.coeffs, state.u.x2.coeffs
    b1_c, b2_c = state.b.x1.coeffs, state.b.x2.coeffs

    r = val(rho_c)
    u1, u2, b1, b2 = val(u1_c), val(u2_c), val(b1_c), val(b2_c)
    drx, dry = val(1j * K1 * rho_c), val(1j * K2 * rho_c)
    du1x, du1y = val(1j * K1 * u1_c), val(1j * K2 * u1_c)
    du2x, du2y = val(1j * K1 * u2_c), val(1j * K2 * u2_c)
    db1x, db1y = val(1j * K1 * b1_c), val(1j * K2 * b1_c)
    db2x, db2y = val(1j * K1 * b2_c), val(1j * K2 * b2_c)
    divu = du1x + du2y
    Pp = params.pressure.dP(r + 1.0)

    def fwd(x):
        return g.to_coeffs(x) * mask

    # linear part: 2 d1^2 u1 + d2^2 u1 + d1 d2 u2
    total = -(2.0 * K1**2 + K2**2) * u1_c - (K1 * K2) * u2_c

    # -u.grad Omega
    om_c = omega(state, params).coeffs
    omx, omy = val(1j * K1 * om_c), val(1j * K2 * om_c)
    accum = -(u1 * omx + u2 * omy)

    # d1 u.grad b2  and  +(1/2) d1 u.grad |b|^2  and  d1 u.grad P
    accum += du1x * db2x + du2x * db2y
    bsqx = 2.0 * (b1 * db1x + b2 * db2x)
    bsqy = 2.0 * (b1 * db1y + b2 * db2y)
    # sign: the product rule d1(u.grad f) = u.grad(d1 f) + (d1 u).grad f
    # puts +(1/2)(d1 u).grad |b|^2 on this side once the (1/2) d1 |b|^2
    # block of Omega is moved over.
    accum += 0.5 * (du1x * bsqx + du2x * bsqy)
    accum += du1x * (Pp * drx) + du2x * (Pp * dry)

    # perp_div(b.grad u)
    X1 = b1 * du1x + b2 * du1y
    X2 = b1 * du2x + b2 * du2y
    total += 1j * K2 * fwd(X1) - 1j * K1 * fwd(X2)

    # -d2 u.grad b1
    accum += -(du1y * db1x + du2y * db1y)

    # -d1 (b.grad_perp u1), grad_perp u1 = (d2 u1, -d1 u1)
    Yf = b1 * du1y - b2 * du1x
    total += -1j * K1 * fwd(Yf)

    # b.grad(d2 u1)
    d12u1 = val(-(K1 * K2) * u1_c)
    d22u1 = val(-(K2 * K2) * u1_c)
    accum += b1 * d12u1 + b2 * d22u1

    # perp_grad u1.grad b1
    accum += du1y * db1x - du1x * db1y

    # b.grad(b.grad u1)
    Z_c = fwd(b1 * du1x + b2 * du1y)
    Zx, Zy = val(1j * K1 * Z_c), val(1j * K2 * Z_c)
    accum += b1 * Zx + b2 * Zy

    # -d1(b.(b.grad u))
    total += -1j * K1 * fwd(b1 * X1 + b2 * X2)

    # -perp_div(b div u)
    total += -(1j * K2 * fwd(b1 * divu) - 1j * K1 * fwd(b2 * divu))

    # +d1(|b|^2 div u)
    total += 1j * K1 * fwd((b1 * b1 + b2 * b2) * divu)

    # +d1((P'(rho~) rho~ - 1) div u)
    total += 1j * K1 * fwd((Pp * (r + 1.0) - 1.0) * divu)

    # -div u (b.grad b1) - b.grad(b1 div u)
    accum += -divu * (b1 * db1x + b2 * db1y)
    S_c = fwd(b1 * divu)
    Sx, Sy = val(1j * K1 * S_c), val(1j * K2 * S_c)
    accum += -(b1 * Sx + b2 * Sy)

    total = (total + fwd(accum)) * mask
    return ScalarField(g, total)


def u1_equation_residual(state: State, params: PhysParams) -> float:
    """L^2 mismatch between the direct u1 tendency and its Omega form.

    The u1 equation can be rewritten as
        du1/dt = -u.grad u1 + Lap u1 + Omega - (rho/rho~)(Lap u1 + Omega);
    both assemblies agree up to dealiasing tails (round-off for
    band-limited data).  Normalized parameters only.
    """
    if not params.normalized:
        raise ValueError("the Omega form requires mu = 1 and lam = 0")
    g = state.grid
    val = g.to_values
    direct = rhs(state, params).u.x1

    om = omega(state, params)
    u1_c = state.u.x1.coeffs
    u1, u2 = val(u1_c), val(state.u.x2.coeffs)
    du1x, du1y = val(1j * g.k1 * u1_c), val(1j * g.k2 * u1_c)
    r = val(state.rho.coeffs)
    lap_u1 = val(-g.ksq * u1_c)
    om_vals = val(om.coeffs)
    acc = -(u1 * du1x + u2 * du1y) - (r / (r + 1.0)) * (lap_u1 + om_vals)
    via_omega = ScalarField(
        g, -g.ksq * u1_c + om.coeffs + g.to_coeffs(acc) * g.dealias_mask)
    return sobolev_norm(direct - via_omega, 0.0)


# ---------------------------------------------------------------------------
# L^2 energy ledger
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LedgerSample:
    """One evaluation of the L^2 identity dE/dt + D = I2 + I3."""

    energy: float
    dissipation: float
    i2: float
    i3: float


def l2_ledger(state: State, params: PhysParams) -> LedgerSample:
    """Energy E = (1/2)(||sqrt(rho~) u||^2 + ||rho||^2 + ||b||^2), the
    viscous dissipation D = mu ||grad u||^2 + lam ||div u||^2, and the
    quadratures I2 = -int (u.grad rho) rho - int rho^2 div u,
    I3 = int (grad rho - grad P).u."""
    g = state.grid
    val = g.to_values
    area = g.cell_area
    rho_c = state.rho.coeffs
    u1_c, u2_c = state.u.x1.coeffs, state.u.x2.coeffs

    r = val(rho_c).real
    u1, u2 = val(u1_c).real, val(u2_c).real
    drx, dry = val(1j * g.k1 * rho_c).real, val(1j * g.k2 * rho_c).real
    divu = val(1j * g.k1 * u1_c + 1j * g.k2 * u2_c).real
    Pp = params.pressure.dP(r + 1.0)

    l2sq = lambda c: TWO_PI**2 * float(np.sum(np.abs(c) ** 2))
    energy = 0.5 * (area * float(np.sum((r + 1.0) * (u1**2 + u2**2)))
                    + l2sq(rho_c)
                    + l2sq(state.b.x1.coeffs) + l2sq(state.b.x2.coeffs))
    grad_u_sq = TWO_PI**2 * float(
        np.sum(g.ksq * (np.abs(u1_c) ** 2 + np.abs(u2_c) ** 2)))
    div_u_sq = TWO_PI**2 * float(
        np.sum(np.abs(1j * g.k1 * u1_c + 1j * g.k2 * u2_c) ** 2))
    dissipation = params.mu * grad_u_sq + params.lam * div_u_sq

    i2 = -area * float(np.sum((u1 * drx + u2 * dry) * r + r * r * divu))
    i3 = area * float(np.sum((1.0 - Pp) * (drx * u1 + dry * u2)))
    return LedgerSample(energy, dissipation, i2, i3)


def reconstruct_physical(state: State):
    """Total fields (rho~, u, B) with the equilibrium constants restored."""
    g = state.grid
    rho_total = g.zeros()
    rho_total[:] = state.rho.coeffs
    rho_total[0, 0] += 1.0
    B2 = g.zeros()
    B2[:] = state.b.x2.coeffs
    B2[0, 0] += 1.0
    return (
        ScalarField(g, rho_total),
        state.u,
        VectorField(ScalarField(g, state.b.x1.coeffs.copy()), ScalarField(g, B2)),
    )
