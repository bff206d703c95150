"""Time advancement: exact viscous semigroup + explicit Runge-Kutta.

The linear viscous operator acts only on the velocity and is diagonal per
Fourier mode up to the k-parallel / k-perpendicular split, so it is
exponentiated exactly and composed with a classical explicit Runge-Kutta
treatment of everything else (integrating-factor scheme).  The density
and magnetic field carry no dissipation; an optional weak exponential
filter (default off) is available for long runs, and the divergence-free
constraint on b is re-projected when round-off drift exceeds a tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import PhysParams, State, rhs_arrays
from .spectral import Grid, TWO_PI

_LAND_EPS = 1e-12


class CFLViolation(RuntimeError):
    """Requested step exceeds the advective CFL bound."""


@dataclass(frozen=True)
class StepConfig:
    """Step size, scheme and stabilization options.

    dt = None selects automatic CFL-limited steps.  `linearized` is a test
    hook that evolves only the linearized system (used to compare against
    per-mode matrix exponentials).
    """

    dt: float | None = None
    cfl_safety: float = 0.4
    scheme: str = "IFRK4"
    filter_enabled: bool = False
    filter_strength: float = 36.0
    divb_projection: bool = True
    divb_tol: float = 1e-10
    linearized: bool = False

    def __post_init__(self):
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        if not 0 < self.cfl_safety <= 1:
            raise ValueError("cfl_safety must lie in (0, 1]")
        if self.scheme not in _TABLEAUS:
            raise ValueError(f"unknown scheme {self.scheme!r}")

    @property
    def order(self) -> int:
        return _TABLEAUS[self.scheme].order


@dataclass(frozen=True)
class _Tableau:
    a: tuple
    b: tuple
    c: tuple
    order: int


_TABLEAUS = {
    "IFRK4": _Tableau(
        a=((), (0.5,), (0.0, 0.5), (0.0, 0.0, 1.0)),
        b=(1 / 6, 1 / 3, 1 / 3, 1 / 6),
        c=(0.0, 0.5, 0.5, 1.0),
        order=4,
    ),
    "IFRK3": _Tableau(
        a=((), (0.5,), (-1.0, 2.0)),
        b=(1 / 6, 2 / 3, 1 / 6),
        c=(0.0, 0.5, 1.0),
        order=3,
    ),
}


def viscous_semigroup(k, dt: float, mu: float, lam: float) -> np.ndarray:
    """Closed-form 2x2 action exp(dt M(k)), M(k) = -mu|k|^2 I - lam k k^T.

    Decays at rate mu|k|^2 on the k-perpendicular component and at
    (mu+lam)|k|^2 on the k-parallel one; the k = (0,0) action is the
    identity.
    """
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    k1, k2 = float(k[0]), float(k[1])
    ksq = k1 * k1 + k2 * k2
    if ksq == 0.0:
        return np.eye(2, dtype=complex)
    P = np.array([[k1 * k1, k1 * k2], [k1 * k2, k2 * k2]], dtype=complex) / ksq
    e_perp = np.exp(-mu * ksq * dt)
    e_par = np.exp(-(mu + lam) * ksq * dt)
    return e_perp * (np.eye(2, dtype=complex) - P) + e_par * P


class Stepper:
    """Reusable integrating-factor stepper for one grid and parameter set."""

    def __init__(self, grid: Grid, params: PhysParams, config: StepConfig):
        self.grid = grid
        self.params = params
        self.config = config
        self.tableau = _TABLEAUS[config.scheme]
        ksq = grid.ksq
        safe = np.where(ksq > 0, ksq, 1.0)
        self._p11 = np.where(ksq > 0, grid.k1**2 / safe, 0.0)
        self._p12 = np.where(ksq > 0, grid.k1 * grid.k2 / safe, 0.0)
        self._p22 = np.where(ksq > 0, grid.k2**2 / safe, 0.0)
        self._semigroup_cache: dict = {}
        self._filter = self._filter_factors() if config.filter_enabled else None
        self._h = TWO_PI / max(grid.n1, grid.n2)

    # -- pieces ----------------------------------------------------------

    def _filter_factors(self) -> np.ndarray:
        g = self.grid
        frac = np.maximum(np.abs(g.k1) / g.kcut1, np.abs(g.k2) / g.kcut2)
        sigma = np.ones_like(frac)
        hot = frac > 0.8
        sigma[hot] = np.exp(-self.config.filter_strength
                            * ((frac[hot] - 0.8) / 0.2) ** 4)
        return sigma

    def _semigroup(self, dt: float):
        key = dt
        hit = self._semigroup_cache.get(key)
        if hit is None:
            ksq = self.grid.ksq
            hit = (np.exp(-self.params.mu * ksq * dt),
                   np.exp(-(self.params.mu + self.params.lam) * ksq * dt))
            if len(self._semigroup_cache) > 16:
                self._semigroup_cache.clear()
            self._semigroup_cache[key] = hit
        return hit

    def _apply_semigroup(self, Y: np.ndarray, dt: float) -> np.ndarray:
        if dt == 0.0:
            return Y
        e_perp, e_par = self._semigroup(dt)
        u1, u2 = Y[1], Y[2]
        par1 = self._p11 * u1
        par1 += self._p12 * u2
        par2 = self._p12 * u1
        par2 += self._p22 * u2
        out = Y.copy()
        np.subtract(u1, par1, out=out[1])
        out[1] *= e_perp
        par1 *= e_par
        out[1] += par1
        np.subtract(u2, par2, out=out[2])
        out[2] *= e_perp
        par2 *= e_par
        out[2] += par2
        return out

    def cfl_dt(self, state: State) -> float:
        speed = 1.0 + self._max_speed(state)
        return self.config.cfl_safety * self._h / speed

    def _max_speed(self, state: State) -> float:
        spec = np.stack([state.u.x1.coeffs, state.u.x2.coeffs,
                         state.b.x1.coeffs, state.b.x2.coeffs])
        u1, u2, b1, b2 = self.grid.to_values(spec).real
        umax = float(np.sqrt(u1**2 + u2**2).max())
        bmax = float(np.sqrt(b1**2 + b2**2).max())
        return umax + bmax

    # -- stepping --------------------------------------------------------

    def step(self, state: State, dt: float | None = None,
             land_time: float | None = None) -> State:
        """One integrating-factor Runge-Kutta step of size dt."""
        cfg = self.config
        bound = self.cfl_dt(state)
        if dt is None:
            dt = cfg.dt if cfg.dt is not None else bound
        if dt <= 0:
            raise ValueError("dt must be positive")
        if dt > bound * (1.0 + 1e-9):
            raise CFLViolation(
                f"dt = {dt:.3e} exceeds the advective CFL bound {bound:.3e}")
        from .dynamics import SmallnessAnsatzError
        if state.rho_linf() > 0.5:
            raise SmallnessAnsatzError(
                "||rho||_Linf exceeded 1/2; outside the small-data regime")

        tab = self.tableau
        Y0 = state.coeff_stack()
        stage_n = []
        shifted_y0 = {0.0: Y0}
        for i, ci in enumerate(tab.c):
            if ci not in shifted_y0:
                shifted_y0[ci] = self._apply_semigroup(Y0, ci * dt)
            Yi = shifted_y0[ci]
            for j, aij in enumerate(tab.a[i]):
                if aij != 0.0:
                    Yi = Yi + dt * aij * self._apply_semigroup(
                        stage_n[j], (ci - tab.c[j]) * dt)
            stage_n.append(rhs_arrays(Yi, self.grid, self.params,
                                      include_viscous=False,
                                      linearized=cfg.linearized))
        Ynew = shifted_y0.get(1.0)
        if Ynew is None:
            Ynew = self._apply_semigroup(Y0, dt)
        for j, bj in enumerate(tab.b):
            Ynew = Ynew + dt * bj * self._apply_semigroup(
                stage_n[j], (1.0 - tab.c[j]) * dt)

        if self._filter is not None:
            for row in (0, 3, 4):
                Ynew[row] = Ynew[row] * self._filter
        if cfg.divb_projection:
            self._project_divergence(Ynew)

        t_new = land_time if land_time is not None else state.time + dt
        return State.from_coeff_stack(self.grid, Ynew, t_new)

    def _project_divergence(self, Y: np.ndarray) -> None:
        g = self.grid
        div = 1j * g.k1 * Y[3] + 1j * g.k2 * Y[4]
        norm = float(np.sqrt(TWO_PI**2 * np.sum(np.abs(div) ** 2)))
        if norm > self.config.divb_tol:
            safe = np.where(g.ksq > 0, g.ksq, 1.0)
            kb = np.where(g.ksq > 0, (g.k1 * Y[3] + g.k2 * Y[4]) / safe, 0.0)
            Y[3] = Y[3] - g.k1 * kb
            Y[4] = Y[4] - g.k2 * kb

    def advance(self, state: State, t_end: float, observer=None,
                sample_interval: float | None = None) -> State:
        """Advance to t_end, invoking the observer on the sample grid.

        Samples land on absolute multiples of sample_interval (steps are
        shortened to hit them exactly); the final state at t_end is always
        observed.  Observers must not mutate the state.
        """
        if t_end < state.time - _LAND_EPS:
            raise ValueError("t_end must not precede the state time")
        sampling = observer is not None and sample_interval is not None
        if observer is not None:
            observer(state)
        if sampling:
            idx = int(np.floor(state.time / sample_interval + 1e-9)) + 1
        while state.time < t_end - _LAND_EPS:
            target = t_end
            if sampling:
                target = min(t_end, idx * sample_interval)
            dt_nom = self.config.dt if self.config.dt is not None else self.cfl_dt(state)
            remaining = target - state.time
            if dt_nom >= remaining - _LAND_EPS:
                state = self.step(state, remaining, land_time=target)
                reached_sample = sampling and abs(target - idx * sample_interval) < _LAND_EPS
                if reached_sample:
                    idx += 1
                if observer is not None and (reached_sample or target == t_end):
                    observer(state)
            else:
                state = self.step(state, dt_nom)
        return state


def step(state: State, params: PhysParams, config: StepConfig,
         dt: float | None = None) -> State:
    return Stepper(state.grid, params, config).step(state, dt)


def advance(state: State, params: PhysParams, config: StepConfig,
            t_end: float, observer=None,
            sample_interval: float | None = None) -> State:
    return Stepper(state.grid, params, config).advance(
        state, t_end, observer, sample_interval)
