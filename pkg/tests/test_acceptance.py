"""Acceptance suite: every exit criterion at its stated tolerance.

Each test prints one PASS/FAIL line (run with `pytest -s` to see them on
success).  The two long items share one full-scale decay-verification run
through a module-scoped fixture.
"""

import time

import numpy as np
import pytest
from scipy.linalg import expm

from mhdbox.config import RunConfig
from mhdbox.diagnostics import decay_fit, theorem_monitor
from mhdbox.dynamics import PhysParams, State
from mhdbox.initial import band_limited_state
from mhdbox.linear import damping_map, mode_matrix, mode_spectrum, symbol_check_lattice
from mhdbox.scenarios import (
    decay_verify,
    ledger_residuals,
    lemma_suite,
    omega_consistency_errors,
)
from mhdbox.spectral import (
    Grid,
    ScalarField,
    VectorField,
    aniso_norm,
    derivative,
    random_smooth_field,
    sobolev_norm,
)
from mhdbox.stepping import StepConfig, Stepper
from .conftest import cos_field


def _report(num, name, passed, detail):
    line = f"ACCEPTANCE {num:2d} {name}: {'PASS' if passed else 'FAIL'} ({detail})"
    print(line)
    assert passed, line


# -- 1: closed-form linear spectra -------------------------------------------

def test_acc01_linear_spectra():
    t0 = time.perf_counter()
    r3, r7 = np.sqrt(3.0), np.sqrt(7.0)
    want01 = np.array([(-1 + 1j * r3) / 2, (-1 + 1j * r3) / 2,
                       (-1 - 1j * r3) / 2, (-1 - 1j * r3) / 2])
    want10 = np.array([0.0, (-1 + 1j * r7) / 2, (-1 - 1j * r7) / 2, -1.0])
    err = max(np.abs(mode_spectrum((0, 1)).eigenvalues - want01).max(),
              np.abs(mode_spectrum((1, 0)).eigenvalues - want10).max())
    elapsed = time.perf_counter() - t0
    _report(1, "linear spectra", err < 1e-10 and elapsed < 1.0,
            f"max error {err:.2e}, {elapsed:.3f}s")


# -- 2: fourth-order wave symbol ----------------------------------------------

def test_acc02_symbol_identity():
    t0 = time.perf_counter()
    resid = symbol_check_lattice(16)
    elapsed = time.perf_counter() - t0
    _report(2, "fourth-order symbol identity",
            resid < 1e-10 and elapsed < 10.0,
            f"max residual {resid:.2e} over |k_i|<=16, {elapsed:.1f}s")


# -- 3: anisotropic damping map -----------------------------------------------

def test_acc03_damping_map():
    rows = damping_map(16)
    bad = [r for r in rows
           if (r.k2 != 0 and r.abscissa >= 0.0)
           or (r.k2 == 0 and (r.abscissa != 0.0 or r.kernel_dim != 1))]
    _report(3, "anisotropic damping map", len(bad) == 0,
            f"{len(rows)} modes, {len(bad)} violations")


# -- 4: nonlinear/linear consistency ------------------------------------------

def test_acc04_nonlinear_linear_consistency():
    g = Grid(64, 64)
    params = PhysParams()
    k, eps = (2, 1), 1e-6
    M = mode_matrix(k).matrix
    v0 = np.array([0.4, 0.3j, -0.2, -0.25 * k[1], 0.25 * k[0]], dtype=complex)
    v0[3:] /= np.hypot(*k)
    v0 *= eps
    cs = [g.zeros() for _ in range(5)]
    for i in range(5):
        cs[i][k] = v0[i]
        cs[i][-k[0], -k[1]] = np.conj(v0[i])
    st = State(ScalarField(g, cs[0]),
               VectorField(ScalarField(g, cs[1]), ScalarField(g, cs[2])),
               VectorField(ScalarField(g, cs[3]), ScalarField(g, cs[4])))
    out = Stepper(g, params, StepConfig(dt=1e-3)).advance(st, 1.0)
    got = np.array([out.rho.coeffs[k], out.u.x1.coeffs[k], out.u.x2.coeffs[k],
                    out.b.x1.coeffs[k], out.b.x2.coeffs[k]])
    want = expm(M * 1.0) @ v0
    rel = float(np.linalg.norm(got - want) / np.linalg.norm(want))
    _report(4, "single-mode vs matrix exponential", rel < 0.01,
            f"relative deviation {rel:.2e} at t=1")


# -- 5: integrator order --------------------------------------------------------

def test_acc05_integrator_order():
    t0 = time.perf_counter()
    g = Grid(64, 64)
    params = PhysParams()
    s0 = band_limited_state(g, 99, 1e-3, kmax=3)
    slopes = {}
    for scheme, order in (("IFRK4", 4), ("IFRK3", 3)):
        finals = []
        dts = (1 / 48, 1 / 96, 1 / 192, 1 / 384)
        for dt in dts:
            stp = Stepper(g, params, StepConfig(dt=dt, scheme=scheme,
                                                divb_projection=False))
            finals.append(stp.advance(s0, 0.5).coeff_stack())
        errs = [np.linalg.norm(finals[i] - finals[i + 1]) for i in range(3)]
        slope = float(np.polyfit(np.log(dts[:-1]), np.log(errs), 1)[0])
        slopes[scheme] = (slope, order)
    elapsed = time.perf_counter() - t0
    ok = all(abs(s - p) < 0.3 for s, p in slopes.values()) and elapsed < 60.0
    _report(5, "step-doubling self-convergence", ok,
            "; ".join(f"{k}: slope {v[0]:.2f} (order {v[1]})"
                      for k, v in slopes.items()) + f"; {elapsed:.0f}s")


# -- 6 and 9 share the full-scale decay-verification runs ----------------------

@pytest.fixture(scope="module")
def decay_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("decay_verify")
    return decay_verify(str(out), config=RunConfig(decay_rate=1.5))


def test_acc06_structure_preservation(decay_report):
    res = next(r for r in decay_report.results
               if r.criterion == "structure preservation")
    _report(6, "structure preservation over [0,50]", res.passed, res.detail)


def test_acc09_decay_monitor(decay_report):
    names = ("bound-ratio plateau", "vertical magnetic decay rate")
    results = [r for r in decay_report.results if r.criterion in names]
    assert len(results) == 2
    ok = all(r.passed for r in results)
    _report(9, "bound monitor and decay rates", ok,
            "; ".join(r.detail for r in results))


# -- 7: L2 energy identity ------------------------------------------------------

def test_acc07_ledger_identity_order():
    metrics, _ = ledger_residuals(1234, dts=(0.02, 0.01))
    ratio = metrics[0] / metrics[1]
    _report(7, "energy identity residual order", 3.5 <= ratio <= 4.5,
            f"integrated-residual ratio {ratio:.2f} for dt -> dt/2")


# -- 8: combined-quantity evolution ----------------------------------------------

def test_acc08_omega_consistency():
    pairs = omega_consistency_errors(1234)
    ratio = pairs[0][1] / pairs[1][1]
    _report(8, "combined-quantity consistency", 3.5 <= ratio <= 4.5,
            f"centered-difference error ratio {ratio:.2f}")


# -- 10: inequality trials --------------------------------------------------------

def test_acc10_lemma_suite(tmp_path):
    report = lemma_suite(str(tmp_path), seed=1234)
    _report(10, "inequality trial ensembles", report.passed,
            "; ".join(r.detail for r in report.results))


# -- 11: norm oracles --------------------------------------------------------------

def test_acc11_norm_oracles():
    g = Grid(64, 64)
    f = cos_field(g, (1, 0))
    e1 = abs(sobolev_norm(f, 0.0) - np.sqrt(2 * np.pi**2))
    e2 = abs(sobolev_norm(f, 1.0) - 2 * np.pi)
    poincare = interp = True
    for seed in range(100):
        h = random_smooth_field(g, seed, 1.0, 0.4, zero_mean=True)
        grad = np.hypot(sobolev_norm(derivative(h, 1), 0.0),
                        sobolev_norm(derivative(h, 2), 0.0))
        poincare &= sobolev_norm(h, 0.0) <= grad * (1 + 1e-12)
        interp &= (aniso_norm(h, 1, 3.0) ** 2
                   <= sobolev_norm(h, 4.0) * aniso_norm(h, 2, 2.0) * (1 + 1e-10))
    _report(11, "norm oracles and sharp inequalities",
            e1 < 1e-12 and e2 < 1e-12 and poincare and interp,
            f"cos-norm errors {e1:.1e}, {e2:.1e}; Poincare/interpolation on "
            f"100 zero-mean fields")
