"""Energy, dissipation, norm and inequality objects evaluated on discrete fields.

Everything here is a pure function of arrays (fields are duck-typed by
attribute), composite trapezoid on the field grid unless a derivative lives
more naturally on cell edges, in which case the midpoint rule is used.  All
x-derivatives are second-order finite differences (one-sided at the ends).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainViolation, KEqualsOne, MissingDerivative, WeightViolation


def _gradient(f, x):
    return np.gradient(f, x, edge_order=2)


def _trapz(f, x):
    return float(np.trapezoid(f, x))


# ---------------------------------------------------------------------------
# interior cut-off and temporal weights
# ---------------------------------------------------------------------------

def chi_cutoff(x, R0: float):
    """C^1 interior cut-off: 1 on [0, R0/2], 0 on [3R0/4, R0], cubic ramp between.

    The ramp satisfies -6/R0 <= chi' <= 0, inside the required [-4, 0] for
    any star with R0 >= 3/2.
    """
    x = np.asarray(x, dtype=float)
    t = np.clip((x - 0.5 * R0) / (0.25 * R0), 0.0, 1.0)
    return 1.0 - t * t * (3.0 - 2.0 * t)


def chi_cutoff_prime(x, R0: float):
    x = np.asarray(x, dtype=float)
    t = (x - 0.5 * R0) / (0.25 * R0)
    inside = (t > 0.0) & (t < 1.0)
    return np.where(inside, -6.0 * t * (1.0 - t) / (0.25 * R0), 0.0)


@dataclass(frozen=True)
class WeightSpec:
    """Decay exponents of the total-energy ledgers.

    `a` is the isentropic decay exponent; the six thermodynamic indices
    carry the temporal weights e^{k a1 tau} of the thermodynamic ledger.
    Defaults are the known-admissible example set.
    """

    a: float = 0.5
    r1: float = 0.5
    l1: float = -2.5
    r2: float = -0.5
    l2: float = -2.0
    frak_r: float = -1.5
    r3: float = -2.5

    def violations(self, R0: float | None = None) -> list[str]:
        out = []
        if not (0.0 < self.a < 1.0):
            out.append("0 < a < 1")
        if not (-1.0 < self.r1 < 1.0):
            out.append("-1 < r1 < 1")
        if not (self.r1 - 3.0 <= self.l1 < -2.0):
            out.append("r1 - 3 <= l1 < -2")
        if not (self.r2 <= self.r1 - 1.0):
            out.append("r2 <= r1 - 1")
        if not (self.l2 + 2.0 <= 0.0):
            out.append("l2 + 2 <= 0")
        if not (0.0 <= self.r2 - self.l2 <= 2.0):
            out.append("0 <= r2 - l2 <= 2")
        if not (-3.0 < self.frak_r <= self.r2 - 1.0):
            out.append("-3 < frak_r <= r2 - 1")
        if not (self.r3 <= self.r2 - 2.0):
            out.append("r3 <= r2 - 2")
        if not (self.l2 + 2.0 >= 0.0):
            out.append("l2 + 2 >= 0")
        if R0 is not None and 6.0 / R0 > 4.0:
            out.append("-4 <= chi' <= 0 (star too small for the cubic ramp)")
        return out

    def validate(self, R0: float | None = None) -> None:
        bad = self.violations(R0)
        if bad:
            raise WeightViolation(bad)


# ---------------------------------------------------------------------------
# physical (Eulerian) energy and dissipation
# ---------------------------------------------------------------------------

@dataclass
class PhysicalEnergy:
    E: float
    D: float
    sources: dict | None = None   # thermo: named dE/dt source terms


def physical_energy(snapshot, model: str = "isentropic", mu: float = 1.0,
                    c_nu: float | None = None, epsilon: float | None = None) -> PhysicalEnergy:
    """Total energy and viscous dissipation of an Eulerian snapshot.

    Isentropic: E = 1/2 int r^2 rho u^2 + 3 int r^2 rho^{4/3} - int r rho M(r);
    E is non-increasing, dE/dt = -D.  Thermodynamic: the internal term is
    c_nu int r^2 rho theta and dE/dt instead carries the boundary heat flux
    and the heating source, returned in `sources`.
    """
    r, rho, u = np.asarray(snapshot.r), np.asarray(snapshot.rho), np.asarray(snapshot.u)
    kinetic = 0.5 * _trapz(r**2 * rho * u**2, r)
    mass_cum = np.concatenate([[0.0], np.cumsum(0.5 * (r[1:] - r[:-1])
                                                * (r[1:]**2 * rho[1:] + r[:-1]**2 * rho[:-1]))])
    grav = _trapz(r * rho * mass_cum, r)
    u_r = _gradient(u, r)
    D = (4.0 * mu / 3.0) * _trapz((r * u_r - u) ** 2, r)
    if model == "isentropic":
        internal = 3.0 * _trapz(r**2 * rho ** (4.0 / 3.0), r)
        return PhysicalEnergy(E=kinetic + internal - grav, D=D)
    if model == "thermo":
        if c_nu is None or epsilon is None:
            raise MissingDerivative("thermo physical energy needs c_nu and epsilon")
        theta = np.asarray(snapshot.theta_abs)
        internal = c_nu * _trapz(r**2 * rho * theta, r)
        theta_r_R = (3.0 * theta[-1] - 4.0 * theta[-2] + theta[-3]) / (2.0 * (r[-1] - r[-2]))
        sources = {
            "boundary_heat_flux": float(r[-1] ** 2 * theta_r_R),
            "heating": float(epsilon * _trapz(r**2 * rho, r)),
        }
        return PhysicalEnergy(E=kinetic + internal - grav, D=D, sources=sources)
    raise ValueError(f"unknown model {model!r}")


def exact_expansion_energy(params, fourth_moment: float) -> float:
    """Energy of the unperturbed expanding star: (a1^2 + 2 delta/a0)/2 * int s^4 rho.

    Constant in time by the first integral of alpha and the profile virial
    identity 3 int y^2 rho^{4/3} - int y rho M = delta int y^4 rho; vanishes
    exactly on the self-similar branch.
    """
    return 0.5 * (params.a1**2 + 2.0 * params.delta / params.a0) * fourth_moment


# ---------------------------------------------------------------------------
# perturbation energy and dissipation (self-similar clock)
# ---------------------------------------------------------------------------

def perturbation_energy_ss(x, phi, phi_s, rho4_nodes, rho43_edges, a0: float,
                           delta: float, s: float, mu: float = 1.0) -> tuple[float, float]:
    """E(s), D(s) of a perturbation of the self-similar star.

    rho4_nodes = x^4 rho at the nodes; rho43_edges = x^2 rho^{4/3} at cell
    midpoints (where the gradient part is evaluated).  D's integrand is the
    weighted square x^2 ((1+phi) x phi_xs - x phi_x phi_s)^2 / (1+phi+x phi_x)
    on the edges, matching the solver's summation-by-parts form.
    """
    x = np.asarray(x, dtype=float)
    phi = np.asarray(phi, dtype=float)
    phi_s = np.asarray(phi_s, dtype=float)
    b = math.sqrt(2.0 * abs(delta))
    one = 1.0 + phi
    if np.any(one <= 0.0):
        raise DomainViolation("1 + phi <= 0")
    alpha_bar = a0 * math.exp(b * s)

    kin = 0.5 * phi_s**2 + b * one * phi_s - delta * one**2 + delta / one
    E1 = _trapz(rho4_nodes * kin, x)

    dx = x[1] - x[0]
    Hm = 0.5 * (one[:-1] + one[1:])
    dphi = np.diff(phi) / dx
    xm = 0.5 * (x[:-1] + x[1:])
    Jm = Hm + xm * dphi
    if np.any(Jm <= 0.0):
        raise DomainViolation("1 + phi + x phi_x <= 0")
    qm = xm * dphi
    grad_term = 3.0 * (Hm * Hm * Jm) ** (-1.0 / 3.0) - 3.0 / Hm + qm / Hm**2
    E2 = float(np.sum(dx * rho43_edges * grad_term))

    dv = np.diff(phi_s) / dx
    vm = 0.5 * (phi_s[:-1] + phi_s[1:])
    Q = xm * (Hm * dv - vm * dphi)
    D = (4.0 * mu / 3.0) * float(np.sum(dx * xm**2 * Q**2 / Jm))
    return (E1 + E2) / alpha_bar, D


def perturbation_energy_ss_field(field, profile, a0: float, delta: float,
                                 mu: float = 1.0) -> tuple[float, float]:
    """Field-object wrapper around perturbation_energy_ss."""
    x = field.x_nodes
    xm = 0.5 * (x[:-1] + x[1:])
    rho4 = x**4 * profile.rho_at(x)
    rho43 = xm**2 * profile.rho43_at(xm)
    return perturbation_energy_ss(x, field.theta, field.theta_t, rho4, rho43,
                                  a0, delta, field.clock, mu)


# ---------------------------------------------------------------------------
# relative entropy
# ---------------------------------------------------------------------------

def relative_entropy(x, h, h_x=None, h_xx=None):
    """log[(1+h)^2 (1+h+x h_x)] and its x-derivative on the grid."""
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    if h_x is None:
        h_x = _gradient(h, x)
    if h_xx is None:
        h_xx = _gradient(h_x, x)
    one = 1.0 + h
    J = one + x * h_x
    if np.any(one <= 0.0) or np.any(J <= 0.0):
        raise DomainViolation("relative entropy outside its domain")
    H = np.log(one**2 * J)
    H_x = 2.0 * h_x / one + (2.0 * h_x + x * h_xx) / J
    return H, H_x


def frak_A_inequality(x, h, h_x=None, h_xx=None) -> tuple[float, float]:
    """(lhs, rhs) of int (4 h_x + x h_xx)^2 >= 12 int h_x^2 + int x^2 h_xx^2.

    An algebraic identity plus the nonnegative boundary term 4 R0 h_x(R0)^2,
    so lhs - rhs >= 0 up to quadrature error.
    """
    from scipy.integrate import simpson
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    if h_x is None:
        h_x = _gradient(h, x)
    if h_xx is None:
        h_xx = _gradient(h_x, x)
    lhs = float(simpson((4.0 * h_x + x * h_xx) ** 2, x=x))
    rhs = float(12.0 * simpson(h_x**2, x=x) + simpson(x**2 * h_xx**2, x=x))
    return lhs, rhs


# ---------------------------------------------------------------------------
# sup-norm amplitude
# ---------------------------------------------------------------------------

def amplitude(field) -> float:
    """Perturbation amplitude: max sup-norm of {theta, x theta_x, theta_t, x theta_xt}.

    Thermo fields additionally contribute sup |zeta / (R0 - x)|, with the
    boundary node evaluated by the one-sided limit using zeta(R0) = 0.
    """
    x = np.asarray(field.x_nodes, dtype=float)
    th = np.asarray(field.theta, dtype=float)
    th_t = np.asarray(field.theta_t, dtype=float)
    vals = [np.max(np.abs(th)), np.max(np.abs(x * _gradient(th, x))),
            np.max(np.abs(th_t)), np.max(np.abs(x * _gradient(th_t, x)))]
    zeta = getattr(field, "zeta", None)
    if zeta is not None:
        zeta = np.asarray(zeta, dtype=float)
        sigma = x[-1] - x
        ratio = np.abs(zeta[:-1]) / sigma[:-1]
        boundary = abs(zeta[-1] - zeta[-2]) / (x[-1] - x[-2])
        vals.append(max(float(np.max(ratio)), float(boundary)))
    return float(max(vals))


# ---------------------------------------------------------------------------
# Hardy inequality probe
# ---------------------------------------------------------------------------

def hardy_check(k: float, g, s=None) -> tuple[float, float, float]:
    """Both sides of the Hardy inequality on (0, 1) for exponent k != 1.

    k > 1: (int s^{k-2} g^2, int s^k (g^2 + g'^2)).
    k < 1: (int s^{k-2} (g - g(0))^2, int s^k g'^2), g(0) by trace.
    Returns (lhs, rhs, ratio); the ratio is reported as 0 when both vanish.
    """
    from scipy.integrate import simpson
    if k == 1.0:
        raise KEqualsOne("Hardy inequality excludes k = 1")
    if s is None:
        s = np.linspace(0.0, 1.0, 4001)
    s = np.asarray(s, dtype=float)
    g_arr = g(s) if callable(g) else np.asarray(g, dtype=float)
    gp = _gradient(g_arr, s)
    with np.errstate(divide="ignore", invalid="ignore"):
        if k > 1.0:
            lhs_int = np.where(s > 0, s ** (k - 2.0) * g_arr**2, 0.0)
            rhs_int = s**k * (g_arr**2 + gp**2)
        else:
            diff = g_arr - g_arr[0]
            lhs_int = np.where(s > 0, s ** (k - 2.0) * diff**2, 0.0)
            rhs_int = np.where(s > 0, s**k * gp**2, 0.0)
    lhs = float(simpson(lhs_int, x=s))
    rhs = float(simpson(rhs_int, x=s))
    ratio = 0.0 if lhs == 0.0 else lhs / max(rhs, 1e-300)
    return lhs, rhs, ratio


# ---------------------------------------------------------------------------
# total energy / dissipation ledgers
# ---------------------------------------------------------------------------

@dataclass
class EnergyReport:
    clock: float
    ledger: dict
    total_E: float
    total_D: float
    E0: float
    omega: float
    E_pert: float | None = None
    D_pert: float | None = None
    E_phys: float | None = None
    D_phys: float | None = None
    identity_residual: float | None = None


def _entropy_grad_pair(x, th, th_t):
    """(G_x, G_xt) for G = log[(1+th)^2 (1+th+x th_x)]."""
    h_x = _gradient(th, x)
    h_xx = _gradient(h_x, x)
    one = 1.0 + th
    J = one + x * h_x
    G_x = 2.0 * h_x / one + (2.0 * h_x + x * h_xx) / J
    # G_t = 2 th_t/(1+th) + (th_t + x th_xt)/J; differentiate in x.
    v_x = _gradient(th_t, x)
    G_t = 2.0 * th_t / one + (th_t + x * v_x) / J
    G_xt = _gradient(G_t, x)
    return G_x, G_xt


def ledger_terms_isentropic(field, profile, weights: WeightSpec, alpha: float) -> dict:
    """Instantaneous terms of the linearly expanding isentropic total energy."""
    if field.theta_tt is None:
        raise MissingDerivative("ledger needs the second clock derivative")
    x = np.asarray(field.x_nodes, dtype=float)
    th, v, acc = field.theta, field.theta_t, field.theta_tt
    a = weights.a
    rho = profile.rho_at(x)
    rho43 = profile.rho43_at(x)
    chi = chi_cutoff(x, profile.R0)
    th_x = _gradient(th, x)
    v_x = _gradient(v, x)
    th_xx = _gradient(th_x, x)
    G_x, G_xt = _entropy_grad_pair(x, th, v)
    al = alpha
    return {
        "E_vel": (al + al ** (1 + a)) * _trapz(x**4 * rho * v**2, x),
        "E_press_grad": _trapz(x**4 * rho43 * th_x**2, x),
        "E_grad": _trapz(x**4 * th_x**2, x),
        "E_field": _trapz(x**4 * rho * th**2, x),
        "E_acc": al ** (a - 3) * _trapz(x**4 * rho * acc**2, x),
        "E_visc_pair": al ** (1 + a) * _trapz(((1.0 + th) * x * v_x - x * th_x * v) ** 2 * x**2, x),
        "E_int_vel": al ** (1 + a) * _trapz(chi * (v**2 + x**2 * v_x**2), x),
        "E_int_field": _trapz(chi * (th**2 + x**2 * th_x**2), x),
        "E_int_acc": al ** (a - 5) * _trapz(chi * x**2 * rho * acc**2, x),
        "E_entropy_grad": _trapz(G_x**2, x),
        "E_entropy_grad_t": al ** (a - 1) * _trapz(G_xt**2, x),
        "E_elliptic_grad": _trapz(th_x**2, x),
        "E_elliptic_xx": _trapz(x**2 * th_xx**2, x),
        "E_elliptic_grad_t": al ** (a - 1) * _trapz(v_x**2, x),
        "E_elliptic_xx_t": al ** (a - 1) * _trapz(x**2 * _gradient(v_x, x) ** 2, x),
    }


def dissipation_integrands_isentropic(field, profile, weights: WeightSpec, alpha: float) -> dict:
    """Integrands (per unit tau) of the isentropic dissipation ledger."""
    if field.theta_tt is None:
        raise MissingDerivative("dissipation ledger needs the second clock derivative")
    x = np.asarray(field.x_nodes, dtype=float)
    th, v, acc = field.theta, field.theta_t, field.theta_tt
    a = weights.a
    rho = profile.rho_at(x)
    rho43 = profile.rho43_at(x)
    chi = chi_cutoff(x, profile.R0)
    th_x = _gradient(th, x)
    v_x = _gradient(v, x)
    acc_x = _gradient(acc, x)
    pair_v = (1.0 + th) * x * v_x - x * th_x * v
    pair_acc = (1.0 + th) * x * acc_x - x * th_x * acc
    G_x, _ = _entropy_grad_pair(x, th, v)
    al = alpha
    return {
        "D_vel": (al + al ** (1 + a)) * _trapz(x**4 * rho * v**2, x),
        "D_visc_pair": (al**3 + al ** (3 + a)) * _trapz(x**2 * pair_v**2, x),
        "D_acc": al ** (a - 3) * _trapz(x**4 * rho * acc**2, x),
        "D_visc_pair_t": al ** (a - 1) * _trapz(x**2 * pair_acc**2, x),
        "D_int_vel": al ** (1 + a) * _trapz(chi * (v**2 + x**2 * v_x**2), x),
        "D_int_acc": al ** (a - 5) * _trapz(chi * x**2 * rho * acc**2, x),
        "D_int_acc2": al ** (a - 3) * _trapz(chi * (acc**2 + x**2 * acc_x**2), x),
        "D_entropy": al ** (-3) * _trapz(rho43 * G_x**2, x),
    }


def initial_energy_isentropic(x, th0, th1, th2, profile, weights: WeightSpec) -> float:
    """The initial total energy of the linearly expanding isentropic ledger."""
    x = np.asarray(x, dtype=float)
    rho = profile.rho_at(x)
    rho43 = profile.rho43_at(x)
    chi = chi_cutoff(x, profile.R0)
    th0_x = _gradient(th0, x)
    th0_xx = _gradient(th0_x, x)
    return float(
        _trapz(x**4 * rho * th1**2, x)
        + _trapz(x**4 * rho * th0**2, x)
        + _trapz(x**4 * th0_x**2, x)
        + _trapz(x**4 * rho43 * th0_x**2, x)
        + _trapz(x**4 * rho * th2**2, x)
        + _trapz(chi * (th0**2 + x**2 * th0_x**2), x)
        + _trapz(chi * x**2 * rho * th2**2, x)
        + _trapz(th0_x**2 + x**2 * th0_xx**2, x))


def ledger_terms_thermo(field, profile, weights: WeightSpec, a1: float) -> dict:
    """Instantaneous terms of the thermodynamic total energy ledger."""
    if field.xi_tt is None or field.zeta_t is None:
        raise MissingDerivative("thermo ledger needs xi_tt and zeta_t")
    x = np.asarray(field.x_nodes, dtype=float)
    xi, v, acc = field.xi, field.xi_t, field.xi_tt
    zeta, zeta_t = field.zeta, field.zeta_t
    w = weights
    tau = field.clock
    rho = profile.rho_at(x)
    chi = chi_cutoff(x, profile.R0)
    xi_x = _gradient(xi, x)
    v_x = _gradient(v, x)
    xi_xx = _gradient(xi_x, x)
    zeta_x = _gradient(zeta, x)
    zeta_xx = _gradient(zeta_x, x)
    pair_v = (1.0 + xi) * x * v_x - x * xi_x * v
    e = lambda p: math.exp(p * a1 * tau)
    return {
        "E_vel": e(1 + w.r1) * _trapz(x**4 * rho * v**2, x),
        "E_temp": e(w.l1) * _trapz(x**2 * rho * zeta**2, x),
        "E_field": _trapz(x**4 * rho * xi**2, x),
        "E_grad4": _trapz(x**4 * xi_x**2, x),
        "E_field2": _trapz(x**2 * xi**2, x),
        "E_acc": e(w.r2 - 2) * _trapz(x**4 * rho * acc**2, x),
        "E_temp_t": e(w.l2 - 2) * _trapz(x**2 * rho * zeta_t**2, x),
        "E_temp_grad": e((w.l1 + w.l2) / 2 + 1) * _trapz(x**2 * zeta_x**2, x),
        "E_visc_pair": e((w.r1 + w.r2) / 2 + 1.5) * _trapz(x**2 * pair_v**2, x),
        "E_int_field": _trapz(chi * (xi**2 + x**2 * xi_x**2), x),
        "E_int_vel": e(w.r2 + 2) * _trapz(chi * (x**2 * v_x**2 + v**2), x),
        "E_int_acc": e(w.r3 - 2) * _trapz(chi * x**2 * rho * acc**2, x),
        "E_elliptic_grad": _trapz(xi_x**2, x),
        "E_elliptic_xx": _trapz(x**2 * xi_xx**2, x),
        "E_zeta_grad": _trapz(zeta_x**2, x),
        "E_elliptic_t": e(w.r3 + 2) * _trapz(v_x**2 + x**2 * _gradient(v_x, x) ** 2, x),
        "E_zeta_xx": _trapz(x**2 * zeta_xx**2, x),
    }


def dissipation_integrands_thermo(field, profile, weights: WeightSpec, a1: float) -> dict:
    if field.xi_tt is None or field.zeta_t is None:
        raise MissingDerivative("thermo dissipation ledger needs xi_tt and zeta_t")
    x = np.asarray(field.x_nodes, dtype=float)
    xi, v, acc = field.xi, field.xi_t, field.xi_tt
    zeta, zeta_t = field.zeta, field.zeta_t
    w = weights
    tau = field.clock
    rho = profile.rho_at(x)
    chi = chi_cutoff(x, profile.R0)
    xi_x = _gradient(xi, x)
    v_x = _gradient(v, x)
    acc_x = _gradient(acc, x)
    zeta_x = _gradient(zeta, x)
    zeta_tx = _gradient(zeta_t, x)
    pair_v = (1.0 + xi) * x * v_x - x * xi_x * v
    pair_acc = (1.0 + xi) * x * acc_x - x * xi_x * acc
    e = lambda p: math.exp(p * a1 * tau)
    return {
        "D_vel": a1 * e(1 + w.r1) * _trapz(x**4 * rho * v**2, x),
        "D_visc_pair": e(3 + w.r1) * _trapz(x**2 * pair_v**2, x),
        "D_temp": a1 * e(w.l1) * _trapz(x**2 * rho * zeta**2, x),
        "D_temp_grad": e(2 + w.l1) * _trapz(x**2 * zeta_x**2, x),
        "D_acc": a1 * e(w.r2 - 2) * _trapz(x**4 * rho * acc**2, x),
        "D_visc_pair_t": e(w.r2) * _trapz(x**2 * pair_acc**2, x),
        "D_temp_grad_t": e(w.l2) * _trapz(x**2 * zeta_tx**2, x),
        "D_int_vel": e(3 + w.frak_r) * _trapz(chi * (x**2 * v_x**2 + v**2), x),
        "D_int_acc": e(w.r3) * _trapz(chi * (x**2 * acc_x**2 + acc**2), x),
    }


def initial_energy_thermo(x, xi0, xi1, xi2, zeta0, zeta1, profile,
                          weights: WeightSpec) -> float:
    x = np.asarray(x, dtype=float)
    rho = profile.rho_at(x)
    chi = chi_cutoff(x, profile.R0)
    xi0_x = _gradient(xi0, x)
    xi0_xx = _gradient(xi0_x, x)
    return float(
        _trapz(x**4 * rho * xi1**2, x)
        + _trapz(x**2 * rho * zeta0**2, x)
        + _trapz(x**4 * rho * xi0**2, x)
        + _trapz(x**4 * xi0_x**2, x)
        + _trapz(x**4 * rho * xi2**2, x)
        + _trapz(x**2 * rho * zeta1**2, x)
        + _trapz(chi * (xi0**2 + x**2 * xi0_x**2), x)
        + _trapz(chi * x**2 * rho * xi2**2, x)
        + _trapz(xi0_x**2 + x**2 * xi0_xx**2, x))


def total_energy_ledger(series, profile, weights: WeightSpec, regime: str,
                        alpha_of_clock, E0: float, a1: float | None = None,
                        dissipation_online: dict | None = None) -> list[EnergyReport]:
    """EnergyReport per emission time for a field series.

    `series` must carry second clock derivatives (theta_tt / xi_tt, zeta_t).
    Time-integral (dissipation) terms use the solver's online accumulators
    when given, otherwise the trapezoid rule over the emitted series.
    """
    weights.validate(profile.R0)
    reports = []
    acc_diss: dict[str, float] = {}
    prev_clock = None
    prev_integrands = None
    for idx, f in enumerate(series):
        clock = f.clock
        if regime == "linear-isentropic":
            terms = ledger_terms_isentropic(f, profile, weights, alpha_of_clock(clock))
            integrands = dissipation_integrands_isentropic(
                f, profile, weights, alpha_of_clock(clock))
        elif regime == "linear-thermo":
            terms = ledger_terms_thermo(f, profile, weights, a1)
            integrands = dissipation_integrands_thermo(f, profile, weights, a1)
        else:
            raise ValueError(f"no total-energy ledger for regime {regime!r}")
        if dissipation_online is not None:
            for name in integrands:
                acc_diss[name] = dissipation_online[name][idx]
        elif prev_clock is not None:
            dt = clock - prev_clock
            for name, val in integrands.items():
                acc_diss[name] = acc_diss.get(name, 0.0) + 0.5 * dt * (val + prev_integrands[name])
        else:
            for name in integrands:
                acc_diss.setdefault(name, 0.0)
        ledger = dict(terms)
        ledger.update({k: acc_diss[k] for k in integrands})
        bad = [k for k, v in ledger.items() if not np.isfinite(v)]
        if bad:
            raise WeightViolation([f"non-finite ledger term {k}" for k in bad])
        reports.append(EnergyReport(
            clock=clock, ledger=ledger,
            total_E=float(sum(terms.values())),
            total_D=float(sum(acc_diss[k] for k in integrands)),
            E0=E0, omega=amplitude(f)))
        prev_clock, prev_integrands = clock, integrands
    return reports
