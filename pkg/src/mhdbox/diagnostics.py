"""Time-weighted energy ledger, decay fitting, and bound monitoring.

The ledger tracks every instantaneous Sobolev/anisotropic norm entering
the time-weighted energy functionals, their running suprema, and the
trapezoid accumulators of every time-integral piece.  With the weights
w_k(t) = (1+t)^(k-sigma), 0 < sigma < 1/2, the functionals are

    basic_energy        sup w0 (|u|_s^2 + |rho|_s^2 + |b|_s^2)
                        + int w_{-1} (same) + int w0 |grad u|_s^2
    vertical_energy_k   sup w_k (|d2 u|^2 + |d2 rho|^2 + |d2 b|^2)_{s-k}
                        + int w_k |grad d2 u|_{s-k}^2,    k = 1, 2, 3
    vertical_rho_integral_k    int w_k |d2^2 rho|_{s-1-k}^2
    vertical_curlb_integral_k  int w_k |d2^2 perp_div b|_{s-2-k}^2
    omega_integral_base        int w0 |Omega|_{s-1}^2
    omega_integral_k           int w_k |Omega|_{s-k}^2
    div_energy_k        sup w_k (|d1 u1|^2 + |Omega|^2)_{s-k}
                        + int w_k |grad d1 u1|_{s-k}^2
    loworder_energy     sup (|u|^2 + |b|^2 + |rho|^2)_{s-1} + int |grad u|_{s-1}^2
    u2_decay_energy     sup w2 |u2|_{dot s-2}^2 + int w2 |grad u2|_{dot s-2}^2

and the total sums the k = 1, 3 members plus the base pieces; the k = 2
members are intermediate (interpolable) and reported but excluded from
the total.  Sup-type entries are maxima over the sampled times only and
therefore lower bounds on the true suprema.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import PhysParams, State, omega
from .spectral import Grid, TWO_PI


def time_weight(k: int, sigma: float, t: float) -> float:
    """w_k(t) = (1+t)^(k - sigma)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return float((1.0 + t) ** (k - sigma))


@dataclass(frozen=True)
class TimeWeight:
    k: int
    sigma: float

    def __call__(self, t: float) -> float:
        return time_weight(self.k, self.sigma, t)


@dataclass(frozen=True)
class DiagnosticsConfig:
    """Regularity index s (any real >= 2 at desk scale), weight exponent
    sigma in (0, 1/2), and the observer cadence."""

    s: float = 4.0
    sigma: float = 0.25
    sample_interval: float = 0.1
    quadrature: str = "trapezoid"

    def __post_init__(self):
        if not 0.0 < self.sigma < 0.5:
            raise ValueError("sigma must satisfy 0 < sigma < 1/2")
        if self.s < 2:
            raise ValueError("regularity index s must be >= 2")
        if self.sample_interval <= 0:
            raise ValueError("sample_interval must be positive")
        if self.quadrature != "trapezoid":
            raise ValueError("only trapezoid quadrature is implemented")


_WEIGHT_KS = (-1, 0, 1, 2, 3)


class EnergyLedger:
    """Accumulates the full functional family along one trajectory.

    Call `observe(state)` at strictly increasing times; every integral
    accumulator is extended by one trapezoid panel per observation and is
    nondecreasing, and sup-type entries are running maxima.
    """

    def __init__(self, grid: Grid, params: PhysParams, config: DiagnosticsConfig):
        self.grid = grid
        self.params = params
        self.config = config
        s = config.s
        ksq = grid.ksq
        self._sob = {e: (1.0 + ksq) ** e
                     for e in {s, s - 1, s - 2, s - 3, s - 4, s - 5}}
        self._hom = {}
        for e in {s - 2, s - 1}:
            if e > 0:
                self._hom[e] = ksq**e
            else:
                self._hom[e] = np.where(ksq > 0, ksq**min(e, 0.0), 0.0) if e < 0 \
                    else np.ones_like(ksq)
        self.times: list = []
        self.inst: dict = {}           # name -> list of instantaneous values
        self.sups: dict = {}           # name -> list of running maxima
        self.integrals: dict = {}      # name -> list of running trapezoids
        self.functionals: dict = {}    # name -> list of functional values
        self._prev_integrand: dict = {}

    # -- instantaneous norms ------------------------------------------------

    def _measure(self, state: State) -> dict:
        s = self.config.s
        pref = TWO_PI**2
        sob, hom = self._sob, self._hom
        g = self.grid
        K1SQ, K2SQ, KSQ = g.k1**2, g.k2**2, g.ksq

        S_rho = np.abs(state.rho.coeffs) ** 2
        S_u1 = np.abs(state.u.x1.coeffs) ** 2
        S_u = S_u1 + np.abs(state.u.x2.coeffs) ** 2
        S_b = np.abs(state.b.x1.coeffs) ** 2 + np.abs(state.b.x2.coeffs) ** 2
        S_u2 = np.abs(state.u.x2.coeffs) ** 2
        curl = 1j * g.k2 * state.b.x1.coeffs - 1j * g.k1 * state.b.x2.coeffs
        S_curl = np.abs(curl) ** 2
        S_om = np.abs(omega(state, self.params).coeffs) ** 2

        m = {
            "u_sq_s": pref * float(np.sum(sob[s] * S_u)),
            "rho_sq_s": pref * float(np.sum(sob[s] * S_rho)),
            "b_sq_s": pref * float(np.sum(sob[s] * S_b)),
            "gradu_sq_s": pref * float(np.sum(KSQ * sob[s] * S_u)),
            "u_sq_sm1": pref * float(np.sum(sob[s - 1] * S_u)),
            "rho_sq_sm1": pref * float(np.sum(sob[s - 1] * S_rho)),
            "b_sq_sm1": pref * float(np.sum(sob[s - 1] * S_b)),
            "gradu_sq_sm1": pref * float(np.sum(KSQ * sob[s - 1] * S_u)),
            "u2_sq_dot_sm2": pref * float(np.sum(hom[s - 2] * S_u2)),
            "gradu2_sq_dot_sm2": pref * float(np.sum(hom[s - 1] * S_u2)),
        }
        for k in (1, 2, 3):
            e = sob[s - k]
            m[f"d2u_sq_sm{k}"] = pref * float(np.sum(K2SQ * e * S_u))
            m[f"d2rho_sq_sm{k}"] = pref * float(np.sum(K2SQ * e * S_rho))
            m[f"d2b_sq_sm{k}"] = pref * float(np.sum(K2SQ * e * S_b))
            m[f"gradd2u_sq_sm{k}"] = pref * float(np.sum(KSQ * K2SQ * e * S_u))
            m[f"d22rho_sq_sm{k + 1}"] = pref * float(
                np.sum(K2SQ**2 * sob[s - 1 - k] * S_rho))
            m[f"d22curlb_sq_sm{k + 2}"] = pref * float(
                np.sum(K2SQ**2 * sob[s - 2 - k] * S_curl))
            m[f"omega_sq_sm{k}"] = pref * float(np.sum(e * S_om))
            m[f"d1u1_sq_sm{k}"] = pref * float(np.sum(K1SQ * e * S_u1))
            m[f"gradd1u1_sq_sm{k}"] = pref * float(np.sum(KSQ * K1SQ * e * S_u1))
        return m

    # -- accumulation ---------------------------------------------------------

    def observe(self, state: State) -> "EnergyLedger":
        t = state.time
        if self.times and t <= self.times[-1]:
            raise ValueError("observation times must be strictly increasing")
        sigma = self.config.sigma
        w = {k: time_weight(k, sigma, t) for k in _WEIGHT_KS}
        m = self._measure(state)
        for name, value in m.items():
            self.inst.setdefault(name, []).append(value)
        for k in _WEIGHT_KS:
            self.inst.setdefault(f"w{k}", []).append(w[k])

        sup_now = {
            "basic_sup": w[0] * (m["u_sq_s"] + m["rho_sq_s"] + m["b_sq_s"]),
            "low_sup": m["u_sq_sm1"] + m["b_sq_sm1"] + m["rho_sq_sm1"],
            "u2_sup": w[2] * m["u2_sq_dot_sm2"],
        }
        for k in (1, 2, 3):
            sup_now[f"vertical_sup_{k}"] = w[k] * (
                m[f"d2u_sq_sm{k}"] + m[f"d2rho_sq_sm{k}"] + m[f"d2b_sq_sm{k}"])
            sup_now[f"div_sup_{k}"] = w[k] * (
                m[f"d1u1_sq_sm{k}"] + m[f"omega_sq_sm{k}"])
            sup_now[f"d1u1_sup_{k}"] = w[k] * m[f"d1u1_sq_sm{k}"]
        for name, value in sup_now.items():
            prev = self.sups[name][-1] if self.sups.get(name) else 0.0
            self.sups.setdefault(name, []).append(max(prev, value))

        integrand = {
            "basic_decay_int": w[-1] * (m["u_sq_s"] + m["rho_sq_s"] + m["b_sq_s"]),
            "basic_gradu_int": w[0] * m["gradu_sq_s"],
            "omega_int_base": w[0] * m["omega_sq_sm1"],
            "low_gradu_int": m["gradu_sq_sm1"],
            "u2_int": w[2] * m["gradu2_sq_dot_sm2"],
        }
        for k in (1, 2, 3):
            integrand[f"vertical_int_{k}"] = w[k] * m[f"gradd2u_sq_sm{k}"]
            integrand[f"rho_vert_int_{k}"] = w[k] * m[f"d22rho_sq_sm{k + 1}"]
            integrand[f"curlb_vert_int_{k}"] = w[k] * m[f"d22curlb_sq_sm{k + 2}"]
            integrand[f"omega_int_{k}"] = w[k] * m[f"omega_sq_sm{k}"]
            integrand[f"div_int_{k}"] = w[k] * m[f"gradd1u1_sq_sm{k}"]
        if self.times:
            dt = t - self.times[-1]
            for name, value in integrand.items():
                panel = 0.5 * dt * (self._prev_integrand[name] + value)
                self.integrals[name].append(self.integrals[name][-1] + panel)
        else:
            for name in integrand:
                self.integrals.setdefault(name, []).append(0.0)
        self._prev_integrand = integrand

        self.times.append(t)
        self._update_functionals()
        return self

    def _update_functionals(self) -> None:
        f = {}
        f["basic_energy"] = (self.sups["basic_sup"][-1]
                             + self.integrals["basic_decay_int"][-1]
                             + self.integrals["basic_gradu_int"][-1])
        f["loworder_energy"] = (self.sups["low_sup"][-1]
                                + self.integrals["low_gradu_int"][-1])
        f["u2_decay_energy"] = (self.sups["u2_sup"][-1]
                                + self.integrals["u2_int"][-1])
        f["omega_integral_base"] = self.integrals["omega_int_base"][-1]
        for k in (1, 2, 3):
            f[f"vertical_energy_{k}"] = (self.sups[f"vertical_sup_{k}"][-1]
                                         + self.integrals[f"vertical_int_{k}"][-1])
            f[f"vertical_rho_integral_{k}"] = self.integrals[f"rho_vert_int_{k}"][-1]
            f[f"vertical_curlb_integral_{k}"] = self.integrals[f"curlb_vert_int_{k}"][-1]
            f[f"div_energy_{k}"] = (self.sups[f"div_sup_{k}"][-1]
                                    + self.integrals[f"div_int_{k}"][-1])
            f[f"omega_integral_{k}"] = self.integrals[f"omega_int_{k}"][-1]
        f["total_energy"] = (
            f["basic_energy"]
            + sum(f[f"vertical_energy_{k}"] for k in (1, 3))
            + sum(f[f"vertical_rho_integral_{k}"] for k in (1, 3))
            + sum(f[f"vertical_curlb_integral_{k}"] for k in (1, 3))
            + sum(f[f"div_energy_{k}"] for k in (1, 3))
            + sum(f[f"omega_integral_{k}"] for k in (1, 3))
            + f["omega_integral_base"]
            + f["u2_decay_energy"]
            + f["loworder_energy"])
        for name, value in f.items():
            self.functionals.setdefault(name, []).append(value)

    # -- access ----------------------------------------------------------------

    def total_energy(self) -> float:
        if not self.times:
            raise ValueError("ledger is empty")
        return self.functionals["total_energy"][-1]

    def series(self, name: str) -> np.ndarray:
        for store in (self.inst, self.functionals, self.sups, self.integrals):
            if name in store:
                return np.asarray(store[name])
        raise KeyError(f"unknown ledger series {name!r}")

    def column_names(self) -> list:
        inst = sorted(self.inst)
        return (["t"] + inst + sorted(self.sups) + sorted(self.integrals)
                + sorted(self.functionals))

    def rows(self):
        names = self.column_names()
        for i, t in enumerate(self.times):
            row = [t]
            for name in names[1:]:
                row.append(self.series(name)[i])
            yield row

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(",".join(self.column_names()) + "\n")
            for row in self.rows():
                fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def observe(ledger: EnergyLedger, state: State, params: PhysParams | None = None
            ) -> EnergyLedger:
    """Functional entry point; params is fixed at ledger construction."""
    return ledger.observe(state)


def total_energy(ledger: EnergyLedger) -> float:
    return ledger.total_energy()


# ---------------------------------------------------------------------------
# decay fitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayFit:
    quantity: str
    window: tuple
    exponent: float
    r_squared: float
    degenerate: bool = False

    def report(self) -> str:
        return ('{"quantity": "%s", "window": [%g, %g], "exponent": %.6g, '
                '"r_squared": %.6g, "degenerate": %s}'
                % (self.quantity, self.window[0], self.window[1],
                   self.exponent, self.r_squared,
                   "true" if self.degenerate else "false"))


def decay_fit(ledger: EnergyLedger, quantity: str, window: tuple) -> DecayFit:
    """Least-squares slope of log(quantity) against log(1+t) on the window."""
    t = np.asarray(ledger.times)
    q = ledger.series(quantity)
    sel = (t >= window[0]) & (t <= window[1])
    if int(sel.sum()) < 10:
        raise ValueError("need at least 10 samples inside the fit window")
    tq, qq = t[sel], q[sel]
    degenerate = bool(np.any(qq <= 0.0))
    floor = np.finfo(float).tiny
    x = np.log1p(tq)
    y = np.log(np.maximum(qq, floor))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return DecayFit(quantity, (float(window[0]), float(window[1])),
                    float(slope), float(r2), degenerate)


# ---------------------------------------------------------------------------
# stability-bound monitor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyRatio:
    """One bound family: running-max measured quantity over epsilon^power.

    For families containing a weighted supremum, `sup_series` isolates
    that running-sup component (same normalization); saturation of these
    is what the plateau check of the decay-verification preset gates on,
    while the time-integral components are only held under the ceiling.
    """

    name: str
    kind: str            # "sup" families enter the plateau check
    power: int           # 1 or 2: measured against epsilon or epsilon^2
    times: np.ndarray
    series: np.ndarray
    final: float
    passed: bool
    sup_series: np.ndarray | None = None


@dataclass(frozen=True)
class MonitorReport:
    epsilon: float
    ceiling: float
    families: list

    @property
    def all_passed(self) -> bool:
        return all(f.passed for f in self.families)


# Ceiling on measured/epsilon^power ratios.  The analysis only provides
# unquantified constants, so this is a calibration: the value was fixed
# from the first accepted decay-verification run (max observed family
# ratio ~ 3.1 at epsilon = 1e-3, n = 128) with an order-of-magnitude
# margin, and is reported as a calibration, never as a derived constant.
DEFAULT_RATIO_CEILING = 50.0


def theorem_monitor(ledger: EnergyLedger, epsilon: float,
                    ceiling: float = DEFAULT_RATIO_CEILING) -> MonitorReport:
    """Ratios of the six decay/boundedness bound families to epsilon^2
    (the second vertical density integral is measured against epsilon).

    Each series is the running maximum of the measured quantity, so the
    ratios are nondecreasing; a family passes when its final ratio sits
    under the (calibrated) ceiling.  epsilon = 0 reports zero ratios.
    """
    t = np.asarray(ledger.times)
    fams = []

    def running_max(x):
        return np.maximum.accumulate(np.asarray(x))

    def add(name, kind, power, series, sup_part=None):
        eps_pow = epsilon**power
        if eps_pow > 0:
            ratios = running_max(series) / eps_pow
            sup = (running_max(sup_part) / eps_pow
                   if sup_part is not None else None)
        else:
            ratios = np.zeros(len(t))
            sup = np.zeros(len(t)) if sup_part is not None else None
        final = float(ratios[-1]) if len(ratios) else 0.0
        fams.append(FamilyRatio(name, kind, power, t, ratios, final,
                                final <= ceiling, sup))

    inst_low = (np.asarray(ledger.inst["u_sq_sm1"])
                + np.asarray(ledger.inst["rho_sq_sm1"])
                + np.asarray(ledger.inst["b_sq_sm1"]))
    add("weighted_energy_sup", "sup", 2, ledger.sups["basic_sup"],
        ledger.sups["basic_sup"])
    add("loworder_uniform", "sup", 2,
        inst_low + np.asarray(ledger.integrals["low_gradu_int"]), inst_low)
    for k in (1, 2, 3):
        add(f"vertical_decay_k{k}", "sup", 2,
            np.asarray(ledger.sups[f"vertical_sup_{k}"])
            + np.asarray(ledger.integrals[f"vertical_int_{k}"]),
            ledger.sups[f"vertical_sup_{k}"])
    for k in (1, 2, 3):
        add(f"rho_vertical_integral_k{k}", "integral", 1,
            ledger.integrals[f"rho_vert_int_{k}"])
    for k in (1, 2, 3):
        add(f"curlb_vertical_integral_k{k}", "integral", 2,
            ledger.integrals[f"curlb_vert_int_{k}"])
    for k in (1, 2, 3):
        add(f"div_part_decay_k{k}", "sup", 2,
            np.asarray(ledger.sups[f"d1u1_sup_{k}"])
            + np.asarray(ledger.integrals[f"div_int_{k}"]),
            ledger.sups[f"d1u1_sup_{k}"])
    return MonitorReport(epsilon, ceiling, fams)
