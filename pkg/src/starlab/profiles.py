"""Stationary star profiles on [0, R0].

Both profile families solve a singular second-order ODE from the center out
to the first zero of the density (the vacuum boundary).  The center
singularity is removed with a short Taylor start; the first zero is located
by event detection on the adaptive integrator and refined on its dense
output.  Mass moments are accumulated as extra quadrature states so they
inherit the integrator accuracy.

Isentropic family (pressure rho^{4/3}): w = rho^{1/3} solves

    w'' + (2/y) w' + w^3/4 + 3*delta/4 = 0,   w(0) = 1, w'(0) = 0.

Thermodynamic family (pressure K*rho*theta, heating rate epsilon): the
coupled hydrostatic/temperature system

    K y^2 (rho*theta)' + rho * M(y) = 0,      M' = y^2 rho,
    -(y^2 theta')' = epsilon y^2 rho,

with theta(0) = 1, rho(0) = A.  Exact solutions satisfy rho = A*theta^m,
m = (1 - eps*K)/(eps*K); the solver integrates the coupled system and the
power-law relation is kept as an independent consistency oracle, never used
in the construction.  Because rho vanishes like theta^m, its equation is
integrated under relative error control (vanishing absolute tolerance) and
the run stops at a small positive temperature cut; the remaining sliver up
to the true zero is closed with a Taylor step, which costs O(theta_cut^2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    NoFirstZero,
    NonPhysicalVacuum,
    OutOfRange,
    ToleranceNotMet,
    ZerosDoNotCoincide,
)

# Ballpark radius of the delta = 0 star; used only to place the series start
# and to cap step sizes so the dense output stays as accurate as the steps.
_R0_SCALE_GUESS = 13.8

# Integrate this much tighter than the contract tolerance: the dense-output
# interpolant (what every downstream module evaluates) then meets the
# contract with margin.
_TOL_SAFETY = 1e-3
_TOL_FLOOR = 1e-14


@dataclass(frozen=True)
class GridSpec:
    """Resolution and tolerance block for profile construction."""

    n_cells: int = 512
    rtol: float = 1e-10
    atol: float = 1e-10
    root_tol: float = 1e-12        # |w(R0)| / w(0) allowed at the located zero
    y_max: float = 200.0           # abort if no zero before this radius
    series_frac: float = 1e-3      # series start at series_frac * radius guess
    slope_floor: float = 1e-6      # physical-vacuum slope must exceed this
    slope_cap: float = 1e6
    theta_cut: float = 1e-9        # thermo: stop when theta falls to this

    def __post_init__(self):
        if self.n_cells < 8 or self.rtol <= 0 or self.atol <= 0:
            raise ToleranceNotMet("grid spec requires n_cells >= 8 and positive tolerances")

    @property
    def tol_eff(self) -> float:
        return max(_TOL_FLOOR, self.rtol * _TOL_SAFETY)


@dataclass
class MassMoments:
    """Cumulative second moment and the scalar fourth moment of the density."""

    cumulative: np.ndarray        # int_0^y s^2 rho(s) ds at the grid nodes
    fourth_moment: float          # int_0^{R0} s^4 rho(s) ds


@dataclass
class IsentropicProfile:
    delta: float
    R0: float
    y_nodes: np.ndarray
    w: np.ndarray                 # rho^{1/3} at the nodes
    rho_bar: np.ndarray
    mass_moments: MassMoments
    boundary_slope: float         # d/dy rho^{1/3} at R0 (finite, negative)
    _sol: object = field(repr=False, default=None)
    _y_series: float = field(repr=False, default=0.0)

    # Evaluation helpers, valid for 0 <= y <= R0.  The PDE modules use them
    # to place profile data on cell edges at integrator accuracy.

    def _blend(self, y, series_fn, idx):
        y = np.asarray(y, dtype=float)
        safe = np.clip(y, self._y_series, self.R0)
        dense = self._sol.sol(safe)[idx]
        return np.where(y < self._y_series, series_fn(y), dense)

    def w_at(self, y):
        c2 = -(1.0 + 3.0 * self.delta) / 24.0
        return self._blend(y, lambda t: 1.0 + c2 * t**2, 0)

    def wprime_at(self, y):
        c2 = -(1.0 + 3.0 * self.delta) / 24.0
        return self._blend(y, lambda t: 2.0 * c2 * t, 1)

    def rho_at(self, y):
        return np.clip(self.w_at(y), 0.0, None) ** 3

    def rho43_at(self, y):
        return np.clip(self.w_at(y), 0.0, None) ** 4

    def drho43_at(self, y):
        w = np.clip(self.w_at(y), 0.0, None)
        return 4.0 * w**3 * self.wprime_at(y)

    def cumulative_mass_at(self, y):
        c2 = -(1.0 + 3.0 * self.delta) / 24.0
        return self._blend(y, lambda t: t**3 / 3.0 + 3.0 * c2 * t**5 / 5.0, 2)


@dataclass
class ThermoProfile:
    K: float
    epsilon: float
    c_nu: float                   # fixed to 3K
    R0: float
    y_nodes: np.ndarray
    rho_bar: np.ndarray
    theta_bar: np.ndarray
    reduction_constant: float     # A in rho = A * theta^m
    mass_moments: MassMoments
    theta_boundary_slope: float   # d/dy theta at R0
    rho_pow_boundary_slope: float  # d/dy rho^{1/m} at R0
    zero_gap: float = 0.0         # |implied rho zero - theta zero|
    _sol: object = field(repr=False, default=None)
    _y_series: float = field(repr=False, default=0.0)
    _y_cut: float = field(repr=False, default=0.0)

    @property
    def exponent(self) -> float:
        """m = (1 - eps K)/(eps K); rho = A theta^m for exact solutions."""
        ek = self.epsilon * self.K
        return (1.0 - ek) / ek

    def _series(self, y, which):
        A, m = self.reduction_constant, self.exponent
        t2 = -self.epsilon * A / 6.0
        if which == "rho":
            return A * (1.0 + m * t2 * y**2)
        if which == "theta":
            return 1.0 + t2 * y**2
        if which == "thetaprime":
            return 2.0 * t2 * y
        if which == "mass":
            return A * (y**3 / 3.0 + m * t2 * y**5 / 5.0)
        raise KeyError(which)

    def _tail_theta(self, y):
        # Linear vacuum behavior past the temperature cut.
        return np.clip(self.theta_boundary_slope * (y - self.R0), 0.0, None)

    def _eval(self, y, which):
        y = np.asarray(y, dtype=float)
        mid = self._sol.sol(np.clip(y, self._y_series, self._y_cut))
        if which == "rho":
            m = self.exponent
            theta_c = float(self._sol.sol(self._y_cut)[1])
            rho_c = float(self._sol.sol(self._y_cut)[0])
            tail = rho_c * (self._tail_theta(y) / theta_c) ** m
            vals = np.where(y > self._y_cut, tail, np.clip(mid[0], 0.0, None))
        elif which == "theta":
            vals = np.where(y > self._y_cut, self._tail_theta(y), np.clip(mid[1], 0.0, None))
        elif which == "thetaprime":
            with np.errstate(divide="ignore", invalid="ignore"):
                inner = mid[2] / np.maximum(y, 1e-300) ** 2
            vals = np.where(y > self._y_cut, self.theta_boundary_slope, inner)
        elif which == "mass":
            vals = np.where(y > self._y_cut, self._sol.sol(self._y_cut)[3], mid[3])
        else:
            raise KeyError(which)
        return np.where(y < self._y_series, self._series(y, which), vals)

    def rho_at(self, y):
        return self._eval(y, "rho")

    def theta_at(self, y):
        return self._eval(y, "theta")

    def thetaprime_at(self, y):
        return self._eval(y, "thetaprime")

    def ptheta_at(self, y):
        """Background pressure K * rho * theta."""
        return self.K * self.rho_at(y) * self.theta_at(y)

    def dptheta_at(self, y, h: float = 1e-6):
        """d/dy of the background pressure, from the hydrostatic relation."""
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = -self.rho_at(y) * self._eval(y, "mass") / np.maximum(y, 1e-300) ** 2
        return np.where(y > 0, vals, 0.0)

    def cumulative_mass_at(self, y):
        return self._eval(y, "mass")


def solve_isentropic_profile(delta: float, grid_spec: GridSpec | None = None) -> IsentropicProfile:
    """Integrate the isentropic profile ODE out to its first density zero."""
    gs = grid_spec or GridSpec()
    c2 = -(1.0 + 3.0 * delta) / 24.0
    y0 = gs.series_frac * _R0_SCALE_GUESS
    state0 = [
        1.0 + c2 * y0**2,                      # w
        2.0 * c2 * y0,                         # w'
        y0**3 / 3.0 + 3.0 * c2 * y0**5 / 5.0,  # int s^2 rho
        y0**5 / 5.0 + 3.0 * c2 * y0**7 / 7.0,  # int s^4 rho
    ]

    def rhs(y, u):
        w, wp, _, _ = u
        w3 = w * w * w
        return (wp, -2.0 * wp / y - 0.25 * w3 - 0.75 * delta, y * y * w3, y**4 * w3)

    def hit_zero(y, u):
        return u[0]

    hit_zero.terminal = True
    hit_zero.direction = -1

    tol = gs.tol_eff
    sol = solve_ivp(rhs, (y0, gs.y_max), state0, method="DOP853",
                    rtol=tol, atol=tol, events=hit_zero, dense_output=True,
                    max_step=0.02 * _R0_SCALE_GUESS)
    if not sol.success:
        raise ToleranceNotMet(f"profile integration failed: {sol.message}")
    if sol.t_events[0].size == 0:
        raise NoFirstZero(
            f"rho^(1/3) stayed positive up to y = {gs.y_max} for delta = {delta}; "
            "delta may be below the solvable range or y_max too small")

    R0 = float(sol.t_events[0][0])
    w_R0, slope, m2_R0, q4_R0 = sol.sol(R0)
    if abs(w_R0) > gs.root_tol:
        raise ToleranceNotMet(f"|w(R0)| = {abs(w_R0):.3e} above root tolerance {gs.root_tol}")
    if not np.isfinite(slope) or abs(slope) > gs.slope_cap:
        raise NonPhysicalVacuum(f"boundary slope {slope} diverged")
    if slope > -gs.slope_floor:
        raise NonPhysicalVacuum(
            f"boundary slope {slope:.3e} is not strictly negative; vacuum is not physical")

    y_nodes = np.linspace(0.0, R0, gs.n_cells + 1)
    inner = y_nodes >= y0
    w = np.empty_like(y_nodes)
    m2 = np.empty_like(y_nodes)
    w[~inner] = 1.0 + c2 * y_nodes[~inner] ** 2
    m2[~inner] = y_nodes[~inner] ** 3 / 3.0 + 3.0 * c2 * y_nodes[~inner] ** 5 / 5.0
    dense = sol.sol(y_nodes[inner])
    w[inner] = dense[0]
    m2[inner] = dense[2]
    w[0] = 1.0
    m2[0] = 0.0
    w[-1] = max(w[-1], 0.0)
    if np.any(w[1:-1] <= 0.0):
        raise ToleranceNotMet("interior density lost positivity before the located zero")

    return IsentropicProfile(
        delta=float(delta),
        R0=R0,
        y_nodes=y_nodes,
        w=w,
        rho_bar=w**3,
        mass_moments=MassMoments(cumulative=m2, fourth_moment=float(q4_R0)),
        boundary_slope=float(slope),
        _sol=sol,
        _y_series=y0,
    )


def solve_thermo_profile(K: float, epsilon: float, grid_spec: GridSpec | None = None,
                         rho0: float = 1.0) -> ThermoProfile:
    """Integrate the coupled thermodynamic equilibrium out to the common zero.

    theta(0) is normalized to 1 and rho(0) = rho0 selects the branch of the
    one-parameter equilibrium family.  rho and theta must vanish together:
    the implied zeros of theta (Taylor-extended) and of the linearly
    vanishing variable rho^{1/m} are compared and ZerosDoNotCoincide is
    raised if they disagree by more than 1e-6 * R0.
    """
    gs = grid_spec or GridSpec()
    ek = epsilon * K
    if not (1.0 / 6.0 < ek < 1.0):
        raise OutOfRange(f"epsilon*K = {ek} outside (1/6, 1)")
    A = float(rho0)
    if A <= 0:
        raise OutOfRange("rho(0) must be positive")
    m = (1.0 - ek) / ek

    # Lane-Emden scaling of the reduced equation sets the radius scale.
    r0_guess = _R0_SCALE_GUESS / 2.0 / np.sqrt(epsilon * A)
    y0 = gs.series_frac * r0_guess
    t2 = -epsilon * A / 6.0
    state0 = [
        A * (1.0 + m * t2 * y0**2),                 # rho
        1.0 + t2 * y0**2,                           # theta
        2.0 * t2 * y0**3,                           # g = y^2 theta'
        A * (y0**3 / 3.0 + m * t2 * y0**5 / 5.0),   # M = int s^2 rho
        A * (y0**5 / 5.0 + m * t2 * y0**7 / 7.0),   # int s^4 rho
    ]

    def rhs(y, u):
        rho, theta, g, M, _ = u
        y2 = y * y
        theta_p = g / y2
        rho_p = -rho * (M / (K * y2) + theta_p) / theta
        return (rho_p, theta_p, -epsilon * y2 * rho, y2 * rho, y2 * y2 * rho)

    theta_cut = gs.theta_cut

    def hit_cut(y, u):
        return u[1] - theta_cut

    hit_cut.terminal = True
    hit_cut.direction = -1

    tol = gs.tol_eff
    # Vanishing atol on rho keeps its error control relative all the way
    # into the vacuum tail.
    sol = solve_ivp(rhs, (y0, gs.y_max), state0, method="DOP853",
                    rtol=tol, atol=[0.0, tol, tol, tol, tol],
                    events=hit_cut, dense_output=True, max_step=0.04 * r0_guess)
    if not sol.success:
        raise ToleranceNotMet(f"thermo profile integration failed: {sol.message}")
    if sol.t_events[0].size == 0:
        raise NoFirstZero(f"theta stayed positive up to y = {gs.y_max}")

    y_cut = float(sol.t_events[0][0])
    rho_c, theta_c, g_c, M_c, q4_c = sol.sol(y_cut)
    theta_p = g_c / y_cut**2
    theta_pp = -2.0 * theta_p / y_cut - epsilon * rho_c
    if theta_p >= 0:
        raise NonPhysicalVacuum("theta is not decreasing at the cut")

    # Quadratic Taylor step from the cut to the true zero of theta.
    d = theta_c / (-theta_p)
    d -= (theta_c + theta_p * d + 0.5 * theta_pp * d * d) / (theta_p + theta_pp * d)
    R0 = y_cut + d
    theta_slope = theta_p + theta_pp * d

    if not np.isfinite(theta_slope) or theta_slope > -gs.slope_floor:
        raise NonPhysicalVacuum(f"theta boundary slope {theta_slope:.3e} not strictly negative")

    # rho^{1/m} vanishes linearly; its implied zero must match R0.
    rho_p = -rho_c * (M_c / (K * y_cut**2) + theta_p) / theta_c
    if rho_p >= 0:
        raise NonPhysicalVacuum("rho is not decreasing at the cut")
    R0_rho = y_cut + m * rho_c / (-rho_p)
    if abs(R0_rho - R0) > 1e-6 * R0:
        raise ZerosDoNotCoincide(
            f"implied rho zero differs from theta zero by {abs(R0_rho - R0):.3e} (> 1e-6 R0)")
    rho_pow_slope = (rho_c ** (1.0 / m)) * rho_p / (m * rho_c)
    if not np.isfinite(rho_pow_slope) or rho_pow_slope >= 0:
        raise NonPhysicalVacuum("rho^(eps K/(1-eps K)) boundary slope not strictly negative")

    # Close the moment integrals over the sliver [y_cut, R0] analytically
    # (rho ~ rho_c ((R0-y)/(R0-y_cut))^m there).
    sliver = R0 - y_cut
    m2_R0 = M_c + y_cut**2 * rho_c * sliver / (m + 1.0)
    q4_R0 = q4_c + y_cut**4 * rho_c * sliver / (m + 1.0)

    y_nodes = np.linspace(0.0, R0, gs.n_cells + 1)
    profile = ThermoProfile(
        K=float(K),
        epsilon=float(epsilon),
        c_nu=3.0 * float(K),
        R0=R0,
        y_nodes=y_nodes,
        rho_bar=np.zeros_like(y_nodes),
        theta_bar=np.zeros_like(y_nodes),
        reduction_constant=A,
        mass_moments=MassMoments(cumulative=np.zeros_like(y_nodes), fourth_moment=float(q4_R0)),
        theta_boundary_slope=float(theta_slope),
        rho_pow_boundary_slope=float(rho_pow_slope),
        zero_gap=float(abs(R0_rho - R0)),
        _sol=sol,
        _y_series=y0,
        _y_cut=y_cut,
    )
    profile.rho_bar = profile.rho_at(y_nodes)
    profile.theta_bar = profile.theta_at(y_nodes)
    profile.mass_moments.cumulative = profile.cumulative_mass_at(y_nodes)
    profile.rho_bar[-1] = 0.0
    profile.theta_bar[-1] = 0.0
    if np.any(profile.rho_bar[1:-1] <= 0.0) or np.any(profile.theta_bar[1:-1] <= 0.0):
        raise ToleranceNotMet("interior positivity lost before the located zero")
    return profile


def profile_mass_moments(profile) -> tuple[np.ndarray, float]:
    """Cumulative mass samples and the fourth moment of a solved profile."""
    return profile.mass_moments.cumulative, profile.mass_moments.fourth_moment


def delta_is_solvable(delta: float, grid_spec: GridSpec | None = None) -> bool:
    """Empirical solvability probe for the isentropic family.

    The model guarantees a first zero for delta above some negative
    threshold it never quantifies; this reports whether the construction
    succeeds at the given delta instead of guessing the threshold.
    """
    try:
        solve_isentropic_profile(delta, grid_spec)
        return True
    except (NoFirstZero, NonPhysicalVacuum):
        return False


def isentropic_ode_residual(profile: IsentropicProfile, h: float = 1e-5) -> np.ndarray:
    """Residual of the profile ODE at the interior nodes, via an independent stencil.

    w'' is reconstructed by central-differencing the integrator's first
    derivative, so the check is independent of the right-hand side wiring.
    """
    y = profile.y_nodes[1:-1]
    wpp = (profile.wprime_at(y + h) - profile.wprime_at(y - h)) / (2.0 * h)
    w = profile.w_at(y)
    wp = profile.wprime_at(y)
    return wpp + 2.0 * wp / y + 0.25 * w**3 + 0.75 * profile.delta


def thermo_ode_residual(profile: ThermoProfile, h: float = 1e-5) -> tuple[np.ndarray, np.ndarray]:
    """Residuals of both equilibrium equations at interior nodes (FD stencils)."""
    y = profile.y_nodes[1:-1]
    p = lambda t: profile.K * profile.rho_at(t) * profile.theta_at(t)
    dp = (p(y + h) - p(y - h)) / (2.0 * h)
    res_mom = y**2 * dp + profile.rho_at(y) * profile.cumulative_mass_at(y)
    dg = ((y + h) ** 2 * profile.thetaprime_at(y + h)
          - (y - h) ** 2 * profile.thetaprime_at(y - h)) / (2.0 * h)
    res_temp = -dg - profile.epsilon * y**2 * profile.rho_at(y)
    return res_mom / max(profile.K, 1.0), res_temp


def boundary_slope_fd(y_nodes: np.ndarray, values: np.ndarray) -> float:
    """One-sided second-order slope estimate at the last grid node."""
    h = y_nodes[-1] - y_nodes[-2]
    return float((3.0 * values[-1] - 4.0 * values[-2] + values[-3]) / (2.0 * h))
