"""Randomized numerical trials for the analytic toolbox.

Two inequalities are exercised on ensembles of random smooth fields: the
commutator bound

    ||[d^{s0}, f] g||_{L2} <~ ||grad f||_{H^{[s0/2]+1}} ||g||_{H^{s0-1}}
                              + ||grad f||_{H^{s0-1}} ||g||_{H^{[s0/2]+2}}

with [d^{s0}, f] g = d^{s0}(f g) - f d^{s0} g for one mixed derivative
d^{s0} = d1^a1 d2^a2, a1 + a2 = s0, and the anisotropic triple-product
bound for | int d^{s0}(f.grad g) . d^{s0} g dx | whose right-hand side
pairs f1 with d1 g and f2 with d2 g plus a ||div f||_{H^2} ||g||_{dot
H^{s0}}^2 term.  The left-hand sides are computed alias-free at doubled
resolution so the observed ratios reflect the inequality and not grid
artifacts; the hidden constants are reported as empirical ratio
distributions, never asserted.

The pressure remainders q(rho) = P(rho+1) - P(1) - rho and
q1(rho) = int_0^rho (P'(r+1)/(r+1) - 1) dr are checked to be quadratically
small by adaptive quadrature of their integral definitions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .dynamics import PressureLaw
from .spectral import (
    Grid,
    ScalarField,
    derivative,
    exact_product,
    hdot_norm,
    random_smooth_field,
    refine,
    sobolev_norm,
    l2_inner,
)


@dataclass(frozen=True)
class LemmaTrial:
    lemma: str
    seed: int
    s0: int
    lhs: float
    rhs: float
    ratio: float
    alpha: tuple

    def csv(self) -> str:
        return (f"{self.lemma},{self.seed},{self.s0},"
                f"{self.lhs:.17g},{self.rhs:.17g},{self.ratio:.17g}")


def _multi_derivative(f: ScalarField, a1: int, a2: int) -> ScalarField:
    out = f
    if a1 > 0:
        out = derivative(out, 1, a1)
    if a2 > 0:
        out = derivative(out, 2, a2)
    return out


def _grad_norm(f: ScalarField, m: float) -> float:
    return float(np.hypot(sobolev_norm(derivative(f, 1), m),
                          sobolev_norm(derivative(f, 2), m)))


DEFAULT_BAND = 5


def _check_resolution(grid: Grid, s0: int, band: int) -> None:
    if min(grid.n1, grid.n2) < 3 * (s0 + band):
        raise ValueError("grid too coarse to resolve the requested derivatives")


def _pick_alpha(seed, s0: int) -> tuple:
    rng = np.random.default_rng((*_as_tuple(seed), 0))
    a1 = int(rng.integers(0, s0 + 1))
    return a1, s0 - a1


def _as_tuple(seed) -> tuple:
    return tuple(seed) if isinstance(seed, (tuple, list)) else (int(seed),)


def _trial_field(grid: Grid, seed, band: int, decay_rate: float) -> ScalarField:
    """Random smooth field hard-limited to |k_i| <= band.

    Keeping the trial spectra on a modest band makes the alias-free
    left-hand sides exact to round-off even after repeated derivatives.
    """
    f = random_smooth_field(grid, seed, 1.0, decay_rate, zero_mean=False)
    keep = (np.abs(grid.k1) <= band) & (np.abs(grid.k2) <= band)
    return ScalarField(grid, f.coeffs * keep)


def commutator_trial(seed, s0: int, grid: Grid, decay_rate: float = 0.25,
                     band: int = DEFAULT_BAND) -> LemmaTrial:
    """One commutator trial with random f, g and a random multi-index."""
    if s0 < 1:
        raise ValueError("s0 must be >= 1")
    _check_resolution(grid, s0, band)
    a1, a2 = _pick_alpha(seed, s0)
    base = _as_tuple(seed)
    f = _trial_field(grid, (*base, 1), band, decay_rate)
    g = _trial_field(grid, (*base, 2), band, decay_rate)

    d_fg = _multi_derivative(exact_product(f, g), a1, a2)
    f_dg = exact_product(f, _multi_derivative(g, a1, a2))
    lhs = sobolev_norm(d_fg - f_dg, 0.0)

    half = s0 // 2
    rhs = (_grad_norm(f, half + 1) * sobolev_norm(g, s0 - 1)
           + _grad_norm(f, s0 - 1) * sobolev_norm(g, half + 2))
    ratio = 0.0 if rhs == 0.0 and lhs == 0.0 else lhs / rhs
    return LemmaTrial("commutator", _scalar_seed(seed), s0, lhs, rhs, ratio,
                      (a1, a2))


def triple_product_trial(seed, s0: int, grid: Grid, decay_rate: float = 0.25,
                         band: int = DEFAULT_BAND) -> LemmaTrial:
    """One anisotropic triple-product trial with random vector fields."""
    if s0 < 1:
        raise ValueError("s0 must be >= 1")
    _check_resolution(grid, s0, band)
    a1, a2 = _pick_alpha(seed, s0)
    base = _as_tuple(seed)
    f1 = _trial_field(grid, (*base, 1), band, decay_rate)
    f2 = _trial_field(grid, (*base, 2), band, decay_rate)
    g1 = _trial_field(grid, (*base, 3), band, decay_rate)
    g2 = _trial_field(grid, (*base, 4), band, decay_rate)

    total = 0.0
    for gm in (g1, g2):
        adv = (exact_product(f1, derivative(gm, 1))
               + exact_product(f2, derivative(gm, 2)))
        total += l2_inner(_multi_derivative(adv, a1, a2),
                          _multi_derivative(refine(gm), a1, a2))
    lhs = abs(total)

    half = s0 // 2

    def dx_norm(axis, m):
        return float(np.hypot(sobolev_norm(derivative(g1, axis), m),
                              sobolev_norm(derivative(g2, axis), m)))

    g_dot = float(np.hypot(hdot_norm(g1, s0), hdot_norm(g2, s0)))
    div_f = derivative(f1, 1) + derivative(f2, 2)
    rhs = ((_grad_norm(f1, half + 1) * dx_norm(1, s0 - 1)
            + _grad_norm(f2, half + 1) * dx_norm(2, s0 - 1)) * g_dot
           + (_grad_norm(f1, s0 - 1) * dx_norm(1, half + 2)
              + _grad_norm(f2, s0 - 1) * dx_norm(2, half + 2)) * g_dot
           + sobolev_norm(div_f, 2.0) * g_dot**2)
    ratio = 0.0 if rhs == 0.0 and lhs == 0.0 else lhs / rhs
    return LemmaTrial("triple_product", _scalar_seed(seed), s0, lhs, rhs, ratio,
                      (a1, a2))


def _scalar_seed(seed) -> int:
    t = _as_tuple(seed)
    return int(t[-1])


def commutator_constant_defect(seed, s0: int, grid: Grid, value: float = 0.7,
                               band: int = DEFAULT_BAND) -> float:
    """||[d^{s0}, f] g||_{L2} for constant f; vanishes identically."""
    const = grid.zeros()
    const[0, 0] = value
    f = ScalarField(grid, const)
    g = _trial_field(grid, (*_as_tuple(seed), 2), band, 0.5)
    a1, a2 = _pick_alpha(seed, s0)
    d_fg = _multi_derivative(exact_product(f, g), a1, a2)
    f_dg = exact_product(f, _multi_derivative(g, a1, a2))
    return sobolev_norm(d_fg - f_dg, 0.0)


def run_ensemble(lemma: str, master_seed: int, s0: int, n_trials: int,
                 grid: Grid) -> list:
    """Deterministic batch of independent trials for one lemma and order."""
    trial = {"commutator": commutator_trial,
             "triple_product": triple_product_trial}[lemma]
    return [trial((master_seed, s0, i), s0, grid) for i in range(n_trials)]


def pressure_remainder_trial(law: PressureLaw, rho_samples) -> tuple:
    """Max of |q(rho)|/rho^2 and |q1(rho)|/rho^2 over the samples.

    Both remainders are evaluated by adaptive quadrature of their integral
    definitions (the closed forms on the law itself stay an independent
    route).  At rho = 0 the limits |q''(0)|/2 and |q1''(0)|/2 are used,
    with the second derivatives taken by central differences of P'.
    """
    max_q, max_q1 = 0.0, 0.0
    h = 1e-6
    ddP1 = (law.dP(1.0 + h) - law.dP(1.0 - h)) / (2.0 * h)
    for rho in rho_samples:
        rho = float(rho)
        if abs(rho) > 0.5:
            raise ValueError("samples must satisfy |rho| <= 1/2")
        if rho == 0.0:
            rq = 0.5 * abs(ddP1)
            rq1 = 0.5 * abs(ddP1 - 1.0)
        else:
            q, _ = quad(lambda r: law.dP(r + 1.0) - 1.0, 0.0, rho)
            q1, _ = quad(lambda r: law.dP(r + 1.0) / (r + 1.0) - 1.0, 0.0, rho)
            rq = abs(q) / rho**2
            rq1 = abs(q1) / rho**2
        max_q = max(max_q, rq)
        max_q1 = max(max_q1, rq1)
    return max_q, max_q1
