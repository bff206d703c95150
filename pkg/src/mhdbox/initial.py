"""Initial-data generation for small-perturbation runs.

The magnetic perturbation is taken as b0 = perp_grad(psi) for a random
zero-mean stream function psi, so div b0 = 0 and int b0 dx = 0 hold by
construction; the whole triple is then rescaled so that

    |rho0|_{H^s} + |u0|_{H^s} + |b0|_{H^s} = epsilon

exactly (the sum of the three norms, matching the smallness hypothesis).
"""

from __future__ import annotations

import numpy as np

from .config import RunConfig
from .dynamics import State
from .spectral import (
    Grid,
    ScalarField,
    VectorField,
    perp_grad,
    random_smooth_field,
    sobolev_norm,
    vector_sobolev_norm,
)


def _reflect_coeffs(c: np.ndarray) -> np.ndarray:
    """Coefficients of f(-x1, x2): index flip k1 -> -k1."""
    return np.roll(c[::-1, :], 1, axis=0)


def _even_part(f: ScalarField) -> ScalarField:
    return ScalarField(f.grid, 0.5 * (f.coeffs + _reflect_coeffs(f.coeffs)))


def _odd_part(f: ScalarField) -> ScalarField:
    return ScalarField(f.grid, 0.5 * (f.coeffs - _reflect_coeffs(f.coeffs)))


def make_initial_data(config: RunConfig, grid: Grid | None = None,
                      reflection_symmetric: bool = False) -> State:
    """Random smooth initial state with the hypotheses built in.

    With `reflection_symmetric` the fields are projected onto the x1 ->
    -x1, (u1, b1) -> -(u1, b1) symmetry class before rescaling, which the
    dynamics preserve.
    """
    grid = grid or config.grid()
    eps = config.epsilon
    seed = config.seed
    if eps == 0.0:
        return State.zero(grid)

    amp, dec = 1.0, config.decay_rate
    rho = (random_smooth_field(grid, (seed, 101), amp, dec)
           if config.enable_rho else ScalarField.zero(grid))
    if config.enable_u:
        u = VectorField(random_smooth_field(grid, (seed, 102), amp, dec),
                        random_smooth_field(grid, (seed, 103), amp, dec))
    else:
        u = VectorField.zero(grid)
    if config.enable_b:
        psi = random_smooth_field(grid, (seed, 104), amp, dec)
        if reflection_symmetric:
            psi = _odd_part(psi)
        b = perp_grad(psi)
    else:
        b = VectorField.zero(grid)

    if reflection_symmetric:
        rho = _even_part(rho)
        u = VectorField(_odd_part(u.x1), _even_part(u.x2))

    total = (sobolev_norm(rho, config.s) + vector_sobolev_norm(u, config.s)
             + vector_sobolev_norm(b, config.s))
    if total == 0.0:
        raise ValueError("all fields disabled or empty; cannot rescale to epsilon")
    scale = eps / total
    return State(rho * scale, u * scale, b * scale, 0.0)


def band_limited_state(grid: Grid, seed: int, epsilon: float, kmax: int,
                       s: float = 4.0) -> State:
    """Random admissible state supported on |k_i| <= kmax.

    Spectrally compact data keeps every populated mode deep inside the
    asymptotic regime of step-size studies (the convergence-order and
    identity-residual checks); the construction and rescaling otherwise
    match `make_initial_data`.
    """
    keep = (np.abs(grid.k1) <= kmax) & (np.abs(grid.k2) <= kmax)

    def field(tag):
        f = random_smooth_field(grid, (seed, tag), 1.0, 0.3)
        return ScalarField(grid, f.coeffs * keep)

    rho = field(201)
    u = VectorField(field(202), field(203))
    b = perp_grad(field(204))
    total = (sobolev_norm(rho, s) + vector_sobolev_norm(u, s)
             + vector_sobolev_norm(b, s))
    scale = epsilon / total
    return State(rho * scale, u * scale, b * scale, 0.0)


def reflection_defect(state: State) -> float:
    """Max coefficient deviation from the reflection symmetry class."""
    defects = [
        np.abs(state.rho.coeffs - _reflect_coeffs(state.rho.coeffs)),
        np.abs(state.u.x1.coeffs + _reflect_coeffs(state.u.x1.coeffs)),
        np.abs(state.u.x2.coeffs - _reflect_coeffs(state.u.x2.coeffs)),
        np.abs(state.b.x1.coeffs + _reflect_coeffs(state.b.x1.coeffs)),
        np.abs(state.b.x2.coeffs - _reflect_coeffs(state.b.x2.coeffs)),
    ]
    return float(max(d.max() for d in defects))
