"""Reproducible experiment presets with PASS/FAIL verdicts.

Each scenario writes CSV output, figures, and a summary to its output
directory and returns a report with one verdict per acceptance check it
covers.  All presets are deterministic functions of (configuration,
master seed).
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass

import numpy as np

from . import plots
from .checkpoint import save_checkpoint
from .config import RunConfig
from .diagnostics import DiagnosticsConfig, EnergyLedger, decay_fit, theorem_monitor
from .dynamics import PhysParams, State, l2_ledger, omega, omega_rhs
from .initial import band_limited_state, make_initial_data, reflection_defect
from .lemmas import commutator_constant_defect, run_ensemble
from .linear import damping_map, mode_spectrum, symbol_check_lattice
from .spectral import Grid, ScalarField, VectorField, sobolev_norm
from .stepping import StepConfig, Stepper

SCENARIOS = ("linear-modes", "decay-verify", "omega-residual",
             "lemma-suite", "ledger-check")


@dataclass(frozen=True)
class CriterionResult:
    criterion: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.criterion}: {self.detail}"


@dataclass(frozen=True)
class ScenarioReport:
    name: str
    results: list
    out_dir: str

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def summary(self) -> str:
        lines = [f"scenario: {self.name}"] + [r.line() for r in self.results]
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _prepare(out_dir: str) -> str:
    fig_dir = os.path.join(out_dir, "figures")
    os.makedirs(fig_dir, exist_ok=True)
    return fig_dir


def _write_summary(report: ScenarioReport) -> None:
    with open(os.path.join(report.out_dir, "summary.txt"), "w") as fh:
        fh.write(report.summary() + "\n")


def run_scenario(name: str, out_dir: str, seed: int = 1234,
                 config: RunConfig | None = None) -> ScenarioReport:
    if name not in SCENARIOS and name != "simulate":
        raise ValueError(f"unknown scenario {name!r}; choose from {SCENARIOS}")
    runner = {
        "linear-modes": linear_modes,
        "decay-verify": decay_verify,
        "omega-residual": omega_residual,
        "lemma-suite": lemma_suite,
        "ledger-check": ledger_check,
    }[name]
    report = runner(out_dir, seed=seed, config=config)
    _write_summary(report)
    return report


# ---------------------------------------------------------------------------
# linear-modes
# ---------------------------------------------------------------------------

def linear_modes(out_dir: str, seed: int = 1234,
                 config: RunConfig | None = None, kmax: int = 16) -> ScenarioReport:
    fig_dir = _prepare(out_dir)
    results = []

    t0 = time.perf_counter()
    spec01 = mode_spectrum((0, 1)).eigenvalues
    spec10 = mode_spectrum((1, 0)).eigenvalues
    r3, r7 = math.sqrt(3.0), math.sqrt(7.0)
    want01 = np.array([(-1 + 1j * r3) / 2, (-1 + 1j * r3) / 2,
                       (-1 - 1j * r3) / 2, (-1 - 1j * r3) / 2])
    want10 = np.array([0.0, (-1 + 1j * r7) / 2, (-1 - 1j * r7) / 2, -1.0])
    err = max(np.abs(spec01 - want01).max(), np.abs(spec10 - want10).max())
    dt1 = time.perf_counter() - t0
    results.append(CriterionResult(
        "closed-form mode spectra",
        err < 1e-10 and dt1 < 1.0,
        f"max eigenvalue error {err:.2e} in {dt1:.2f}s"))

    t0 = time.perf_counter()
    resid = symbol_check_lattice(kmax)
    dt2 = time.perf_counter() - t0
    results.append(CriterionResult(
        "fourth-order wave symbol",
        resid < 1e-10 and dt2 < 10.0,
        f"max residual {resid:.2e} over |k_i|<={kmax} in {dt2:.1f}s"))

    rows = damping_map(kmax)
    with open(os.path.join(out_dir, "damping_map.csv"), "w") as fh:
        fh.write("k1,k2,abscissa,kernel_dim\n")
        for r in rows:
            fh.write(r.csv() + "\n")
    bad = [r for r in rows
           if (r.k2 != 0 and r.abscissa >= 0.0)
           or (r.k2 == 0 and (r.abscissa != 0.0 or r.kernel_dim != 1))]
    results.append(CriterionResult(
        "anisotropic damping map",
        not bad,
        f"{len(rows)} modes: abscissa<0 off the k2=0 line, neutral kernel "
        f"dim 1 on it ({len(bad)} violations)"))
    plots.damping_map_figure(rows, os.path.join(fig_dir, "damping_map.png"))
    return ScenarioReport("linear-modes", results, out_dir)


# ---------------------------------------------------------------------------
# decay-verify
# ---------------------------------------------------------------------------

def _plateau_ratio(fam, t_half: float, t_full: float) -> float:
    """Growth of the family's running-sup component over the late window."""
    series = fam.sup_series if fam.sup_series is not None else fam.series
    i_half = int(np.searchsorted(fam.times, t_half))
    i_half = min(i_half, len(series) - 1)
    denom = series[i_half]
    if denom == 0.0:
        return 1.0
    return float(series[-1] / denom)


def decay_verify(out_dir: str, seed: int = 1234,
                 config: RunConfig | None = None) -> ScenarioReport:
    """Full-scale decay verification at n = 128, t_end = 50.

    The preset draws initial data with spectral decay rate 1.5 (steeper
    than the library default 0.5): broad spectra park substantial content
    on the weakly damped modes k = (k1, +-1), whose (1+t)^(3-sigma)-
    weighted supremum then peaks only after the verification window, and
    the plateau check would measure the approach instead of the
    saturation.
    """
    cfg = config or RunConfig(decay_rate=1.5)
    cfg = cfg.with_overrides(t_end=cfg.t_end or 50.0, seed=seed)
    fig_dir = _prepare(out_dir)
    results = []
    grid, params = cfg.grid(), cfg.phys()
    dcfg, scfg = cfg.diag_config(), cfg.step_config()
    t_end = cfg.t_end

    # generic run with the full ledger
    state = make_initial_data(cfg, grid)
    ledger = EnergyLedger(grid, params, dcfg)
    Stepper(grid, params, scfg).advance(state, t_end, observer=ledger.observe,
                                        sample_interval=dcfg.sample_interval)
    ledger.write_csv(os.path.join(out_dir, "timeseries.csv"))

    report = theorem_monitor(ledger, cfg.epsilon)
    if cfg.epsilon == 0.0:
        results.append(CriterionResult(
            "bound monitor", report.all_passed, "zero data, all ratios 0"))
    else:
        plateaus = {f.name: _plateau_ratio(f, t_end / 2, t_end)
                    for f in report.families if f.kind == "sup"}
        worst_name = max(plateaus, key=plateaus.get)
        plateau_ok = all(v <= 1.2 for v in plateaus.values())
        results.append(CriterionResult(
            "bound-ratio plateau",
            plateau_ok and report.all_passed,
            f"sup-family growth ratio(t={t_end:g})/ratio(t={t_end / 2:g}) "
            f"max {plateaus[worst_name]:.3f} ({worst_name}); "
            f"all ratios under ceiling {report.ceiling:g}: {report.all_passed}"))

        fits = [decay_fit(ledger, q, (max(5.0, 0.1 * t_end), t_end))
                for q in ("d2b_sq_sm1", "d2rho_sq_sm1", "d2u_sq_sm1",
                          "u2_sq_dot_sm2", "d1u1_sq_sm1")]
        with open(os.path.join(out_dir, "decay_fits.txt"), "w") as fh:
            for f in fits:
                fh.write(f.report() + "\n")
        vert_b = fits[0]
        bound = -(1.0 - dcfg.sigma) + 0.3
        results.append(CriterionResult(
            "vertical magnetic decay rate",
            vert_b.exponent <= bound,
            f"fit exponent {vert_b.exponent:.3f} <= {bound:.2f} "
            f"(r^2 = {vert_b.r_squared:.3f})"))
        plots.decay_figure(ledger, fits, os.path.join(fig_dir, "decay_norms.png"))
        plots.monitor_figure(report, os.path.join(fig_dir, "bound_ratios.png"))
        plots.timeseries_figure(ledger, os.path.join(fig_dir, "timeseries.png"))

    # structure-preservation run on reflection-symmetric data
    sym_state = make_initial_data(cfg, grid, reflection_symmetric=True)
    tracker = {"div": 0.0, "mean": 0.0, "sym": 0.0}

    def watch(s: State) -> None:
        tracker["div"] = max(tracker["div"], s.div_b_norm())
        tracker["mean"] = max(tracker["mean"], max(s.mean_b()))
        tracker["sym"] = max(tracker["sym"], reflection_defect(s))

    Stepper(grid, params, scfg).advance(sym_state, t_end, observer=watch,
                                        sample_interval=1.0)
    results.append(CriterionResult(
        "structure preservation",
        tracker["div"] <= 1e-9 and tracker["mean"] <= 1e-13
        and tracker["sym"] <= 1e-9,
        f"max |div b| {tracker['div']:.2e}, max |mean b| {tracker['mean']:.2e}, "
        f"max reflection defect {tracker['sym']:.2e} over [0,{t_end:g}]"))
    return ScenarioReport("decay-verify", results, out_dir)


# ---------------------------------------------------------------------------
# omega-residual
# ---------------------------------------------------------------------------

def omega_consistency_errors(seed: int = 1234, steps=(64, 128),
                             t_star: float = 0.5, n: int = 64,
                             epsilon: float = 1e-3, kmax: int = 4) -> list:
    """Relative L2 error of the centered dOmega/dt against its equation
    right-hand side, for step sizes t_star/steps; halving the step should
    shrink the error fourfold.

    Band-limited data keeps the centered-difference truncation (the h^2
    term being measured) dominant over the integrator's own high-mode
    error down to the step sizes used here.
    """
    grid = Grid(n, n)
    params = PhysParams()
    start = band_limited_state(grid, seed, epsilon, kmax)
    out = []
    for m in steps:
        h = t_star / m
        stepper = Stepper(grid, params, StepConfig(dt=h))
        s = start
        for _ in range(m - 1):
            s = stepper.step(s, h)
        s_minus = s
        s_mid = stepper.step(s_minus, h)
        s_plus = stepper.step(s_mid, h)
        dom = (omega(s_plus, params).coeffs - omega(s_minus, params).coeffs) / (2 * h)
        target = omega_rhs(s_mid, params)
        err = sobolev_norm(ScalarField(grid, dom) - target, 0.0)
        out.append((h, err / sobolev_norm(target, 0.0)))
    return out


def omega_residual(out_dir: str, seed: int = 1234,
                   config: RunConfig | None = None) -> ScenarioReport:
    fig_dir = _prepare(out_dir)
    pairs = omega_consistency_errors(seed)
    with open(os.path.join(out_dir, "omega_residual.csv"), "w") as fh:
        fh.write("h,relative_error\n")
        for h, e in pairs:
            fh.write(f"{h:.17g},{e:.17g}\n")
    ratio = pairs[0][1] / pairs[1][1]
    results = [CriterionResult(
        "combined-quantity evolution consistency",
        3.5 <= ratio <= 4.5,
        f"centered-difference error ratio {ratio:.2f} for h halving "
        f"(errors {pairs[0][1]:.2e} -> {pairs[1][1]:.2e})")]
    plots.convergence_figure([p[0] for p in pairs], [p[1] for p in pairs], 2,
                             os.path.join(fig_dir, "omega_residual.png"))
    return ScenarioReport("omega-residual", results, out_dir)


# ---------------------------------------------------------------------------
# ledger-check
# ---------------------------------------------------------------------------

def ledger_residuals(seed: int = 1234, dts=(0.02, 0.01), t_end: float = 2.5,
                     t_skip: float = 0.5, n: int = 64, epsilon: float = 1e-3,
                     kmax: int = 3):
    """Integrated defect of dE/dt + D = I2 + I3 along runs at each step size.

    The energy identity is sampled every step and differenced with the
    trapezoid rule, so the defect is second order in the step size.  The
    first `t_skip` units are excluded: the fastest viscous transients are
    not resolvable by any of the sampled step sizes and would contaminate
    the order measurement (band-limited data bounds the surviving rates).
    """
    grid = Grid(n, n)
    params = PhysParams()
    start = band_limited_state(grid, seed, epsilon, kmax)
    metrics, traces = [], []
    for dt in dts:
        samples = []
        stepper = Stepper(grid, params, StepConfig(dt=dt))
        stepper.advance(start, t_end,
                        observer=lambda s: samples.append(
                            (s.time, l2_ledger(s, params))),
                        sample_interval=dt)
        total = 0.0
        rows = []
        for (t0, a), (t1, b) in zip(samples, samples[1:]):
            if t0 < t_skip:
                continue
            h = t1 - t0
            resid = ((b.energy - a.energy) / h
                     + 0.5 * (a.dissipation + b.dissipation)
                     - 0.5 * (a.i2 + b.i2) - 0.5 * (a.i3 + b.i3))
            total += abs(resid) * h
            rows.append((0.5 * (t0 + t1), resid))
        metrics.append(total)
        traces.append(rows)
    return metrics, traces


def ledger_check(out_dir: str, seed: int = 1234,
                 config: RunConfig | None = None) -> ScenarioReport:
    fig_dir = _prepare(out_dir)
    dts = (0.02, 0.01)
    metrics, traces = ledger_residuals(seed, dts)
    with open(os.path.join(out_dir, "ledger_residual.csv"), "w") as fh:
        fh.write("dt,t,residual\n")
        for dt, rows in zip(dts, traces):
            for t, r in rows:
                fh.write(f"{dt:.17g},{t:.17g},{r:.17g}\n")
    ratio = metrics[0] / metrics[1]
    results = [CriterionResult(
        "L2 energy identity order",
        3.5 <= ratio <= 4.5,
        f"integrated residual ratio {ratio:.2f} between dt and dt/2 "
        f"({metrics[0]:.3e} -> {metrics[1]:.3e})")]
    plots.convergence_figure(list(dts), metrics, 2,
                             os.path.join(fig_dir, "ledger_residual.png"),
                             xlabel="dt")
    return ScenarioReport("ledger-check", results, out_dir)


# ---------------------------------------------------------------------------
# lemma-suite
# ---------------------------------------------------------------------------

def lemma_suite(out_dir: str, seed: int = 1234,
                config: RunConfig | None = None, n_trials: int = 500,
                n: int = 64) -> ScenarioReport:
    fig_dir = _prepare(out_dir)
    grid = Grid(n, n)
    results = []
    all_trials = []
    stable, violations = True, 0
    details = []
    for lemma in ("commutator", "triple_product"):
        for s0 in (1, 2, 3):
            trials = run_ensemble(lemma, seed, s0, 2 * n_trials, grid)
            all_trials.extend(trials)
            base = max(t.ratio for t in trials[:n_trials])
            full = max(t.ratio for t in trials)
            if full > 1.05 * base:
                stable = False
            violations += sum(1 for t in trials if t.lhs > 1.05 * base * t.rhs)
            details.append(f"{lemma} s0={s0}: max {base:.4g} -> {full:.4g}")
    with open(os.path.join(out_dir, "lemma_trials.csv"), "w") as fh:
        fh.write("lemma,seed,s0,lhs,rhs,ratio\n")
        for t in all_trials:
            fh.write(t.csv() + "\n")
    results.append(CriterionResult(
        "inequality trials",
        stable and violations == 0,
        f"{len(all_trials)} trials; max ratios stable under doubling "
        f"(+-5%): {stable}; violations: {violations}; " + "; ".join(details)))

    const_defect = max(commutator_constant_defect((seed, 999, i), 1 + i % 3, grid)
                       for i in range(50))
    results.append(CriterionResult(
        "constant-field commutator",
        const_defect < 1e-13,
        f"max defect {const_defect:.2e} over 50 seeded trials"))
    plots.lemma_ratio_figure(all_trials, os.path.join(fig_dir, "lemma_ratios.png"))
    return ScenarioReport("lemma-suite", results, out_dir)


# ---------------------------------------------------------------------------
# plain simulation
# ---------------------------------------------------------------------------

def simulate(cfg: RunConfig, out_dir: str,
             resume_state: State | None = None,
             resume_params: PhysParams | None = None) -> ScenarioReport:
    """Run one configured simulation, recording the ledger and checkpoints."""
    if cfg.t_end is None:
        raise ValueError("simulate requires t_end in the [run] section")
    fig_dir = _prepare(out_dir)
    grid = cfg.grid()
    params = resume_params if resume_params is not None else cfg.phys()
    dcfg = cfg.diag_config()
    state = resume_state if resume_state is not None else make_initial_data(cfg, grid)
    ledger = EnergyLedger(grid, params, dcfg)

    every = cfg.checkpoint_every

    def observer(s: State) -> None:
        ledger.observe(s)
        if every > 0:
            q = s.time / every
            if abs(q - round(q)) < 1e-9:
                save_checkpoint(s, params, os.path.join(
                    out_dir, f"checkpoint_t{s.time:.3f}.mhd2"))

    final = Stepper(grid, params, cfg.step_config()).advance(
        state, cfg.t_end, observer=observer,
        sample_interval=dcfg.sample_interval)
    ledger.write_csv(os.path.join(out_dir, "timeseries.csv"))
    save_checkpoint(final, params, os.path.join(out_dir, "final.mhd2"))
    plots.timeseries_figure(ledger, os.path.join(fig_dir, "timeseries.png"))
    results = [CriterionResult(
        "simulation", True,
        f"advanced to t = {final.time:g} with {len(ledger.times)} observations")]
    report = ScenarioReport("simulate", results, out_dir)
    _write_summary(report)
    return report
