"""Expansion factor alpha(t): classification, integration, rescaled clocks.

alpha solves alpha'' * alpha^2 = delta with alpha(0) = a0 > 0,
alpha'(0) = a1.  Multiplying by alpha' gives the first integral

    alpha'^2 = a1^2 + 2*delta/a0 - 2*delta/alpha,

which drives the trichotomy: for delta < 0 the escape threshold is
a1* = sqrt(2|delta|/a0); a1 = a1* yields the closed-form self-similar
branch alpha = (a0^{3/2} + 1.5 a0^{1/2} a1 t)^{2/3}, a1 > a1* the linearly
expanding branch, a1 < a1* finite-time collapse with alpha ~ (T-t)^{2/3}.
The two rescaled clocks s = int alpha^{-3/2} dt and tau = int alpha^{-1} dt
are accumulated as quadrature states of the same integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import CollapseReached, InvalidParams, StepFailure, WrongClassification

SELF_SIMILAR = "SelfSimilar"
LINEAR = "Linear"
COLLAPSE = "Collapse"
POSITIVE_DELTA = "PositiveDelta"

#: Relative tolerance deciding a1 == a1*; SelfSimilar is a measure-zero set
#: so callers must opt in by hitting the threshold almost exactly.
A1_STAR_REL_TOL = 1e-12


@dataclass(frozen=True)
class ExpansionParams:
    delta: float
    a0: float
    a1: float
    a1_star: float
    beta1: float
    beta2: float
    classification: str

    @property
    def b(self) -> float:
        """sqrt(2|delta|), the self-similar growth rate in the s clock."""
        return math.sqrt(2.0 * abs(self.delta))


@dataclass
class ExpansionPath:
    params: ExpansionParams
    t_samples: np.ndarray
    alpha: np.ndarray
    alpha_prime: np.ndarray
    s_samples: np.ndarray
    tau_samples: np.ndarray
    T_collapse: float | None = None
    _sol: object = field(repr=False, default=None)

    def alpha_at(self, t):
        return self._sol.sol(np.asarray(t, dtype=float))[0]

    def alpha_prime_at(self, t):
        return self._sol.sol(np.asarray(t, dtype=float))[1]

    def s_at(self, t):
        return self._sol.sol(np.asarray(t, dtype=float))[2]

    def tau_at(self, t):
        return self._sol.sol(np.asarray(t, dtype=float))[3]

    @property
    def t_end(self) -> float:
        return float(self._sol.t[-1])

    def t_of_clock(self, value: float, kind: str) -> float:
        """Invert s(t) or tau(t) by bisection on the dense output."""
        idx = 2 if kind == "s" else 3
        lo, hi = self._sol.t[0], self._sol.t[-1]
        f = lambda t: float(self._sol.sol(t)[idx]) - value
        if f(hi) < 0 or f(lo) > 0:
            raise StepFailure(f"clock value {value} outside the integrated span")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if f(mid) < 0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-14 * max(1.0, abs(hi)):
                break
        return 0.5 * (lo + hi)


def classify_expansion(delta: float, a0: float, a1: float,
                       rel_tol: float = A1_STAR_REL_TOL) -> ExpansionParams:
    """Classify the expansion branch from (delta, a0, a1)."""
    if a0 <= 0:
        raise InvalidParams(f"a0 must be positive, got {a0}")
    if delta > 0:
        cls = POSITIVE_DELTA
        a1_star = 0.0
    elif delta == 0:
        cls = LINEAR
        a1_star = 0.0
    else:
        a1_star = math.sqrt(2.0 * abs(delta) / a0)
        if abs(a1 - a1_star) <= rel_tol * a1_star:
            cls = SELF_SIMILAR
        elif a1 > a1_star:
            cls = LINEAR
        else:
            cls = COLLAPSE
    rad = a1 * a1 + 2.0 * delta / a0
    if cls == SELF_SIMILAR:
        rad = 0.0
    if rad >= 0:
        root = math.sqrt(rad)
        beta1, beta2 = min(a1, root), max(a1, root)
    else:
        beta1 = beta2 = math.nan
    return ExpansionParams(delta=float(delta), a0=float(a0), a1=float(a1),
                           a1_star=a1_star, beta1=beta1, beta2=beta2, classification=cls)


def alpha_closed_form(params: ExpansionParams, t):
    """Exact alpha(t) where one exists (SelfSimilar, or any delta = 0 path)."""
    t = np.asarray(t, dtype=float)
    if params.classification == SELF_SIMILAR:
        a0, a1 = params.a0, params.a1
        return (a0**1.5 + 1.5 * math.sqrt(a0) * a1 * t) ** (2.0 / 3.0)
    if params.delta == 0.0:
        return params.a0 + params.a1 * t
    raise WrongClassification("no closed form for this branch")


def integrate_alpha(params: ExpansionParams, t_end: float, n_samples: int = 512,
                    rtol: float = 1e-12, atol: float = 1e-12,
                    alpha_min_frac: float = 1e-6) -> ExpansionPath:
    """Integrate alpha and both rescaled clocks up to t_end.

    Collapsing paths stop at alpha = alpha_min_frac * a0; if that happens
    before t_end a CollapseReached is raised carrying the truncated path and
    the blow-down time T (event time plus the exact quadrature remainder of
    dt = d alpha / |alpha'|, which beats Richardson extrapolation here).
    """
    if t_end <= 0:
        raise InvalidParams("t_end must be positive")
    delta, a0, a1 = params.delta, params.a0, params.a1

    def rhs(t, u):
        a = u[0]
        return (u[1], delta / (a * a), a**-1.5, 1.0 / a)

    alpha_min = alpha_min_frac * a0

    def hit_floor(t, u):
        return u[0] - alpha_min

    hit_floor.terminal = True
    hit_floor.direction = -1

    sol = solve_ivp(rhs, (0.0, t_end), [a0, a1, 0.0, 0.0], method="DOP853",
                    rtol=rtol, atol=atol, events=hit_floor, dense_output=True)
    if not sol.success and sol.t_events[0].size == 0:
        raise StepFailure(f"alpha integration failed: {sol.message}")

    collapsed = sol.t_events[0].size > 0
    t_reach = float(sol.t[-1])
    t_samples = np.linspace(0.0, t_reach, n_samples)
    states = sol.sol(t_samples)

    T_collapse = None
    if collapsed:
        t_ev = float(sol.t_events[0][0])
        rad = a1 * a1 + 2.0 * delta / a0
        remainder, _ = quad(lambda a: 1.0 / math.sqrt(rad - 2.0 * delta / a), 0.0, alpha_min)
        T_collapse = t_ev + remainder

    path = ExpansionPath(
        params=params,
        t_samples=t_samples,
        alpha=states[0],
        alpha_prime=states[1],
        s_samples=states[2],
        tau_samples=states[3],
        T_collapse=T_collapse,
        _sol=sol,
    )
    if collapsed and t_reach < t_end:
        raise CollapseReached(
            f"alpha reached its floor at t = {t_reach:.6g} (T ~ {T_collapse:.6g}) "
            f"before t_end = {t_end}", path=path, t_collapse=T_collapse)
    return path


def integrate_to_collapse(params: ExpansionParams, **kwargs) -> ExpansionPath:
    """Convenience wrapper returning the truncated path of a collapsing branch."""
    if params.classification != COLLAPSE:
        raise WrongClassification("parameters do not collapse")
    try:
        # Upper bound on T: the floor event always fires first.
        t_cap = 10.0 * (params.a0 / max(params.a1_star - params.a1, 1e-12) + params.a0)
        return integrate_alpha(params, t_cap, **kwargs)
    except CollapseReached as exc:
        return exc.path


def self_similar_clock(path: ExpansionPath) -> np.ndarray:
    """Samples of s(t) = int alpha^{-3/2}; requires the SelfSimilar branch.

    For that branch s has the closed form (ln alpha - ln a0)/sqrt(2|delta|),
    and alpha expressed in s is a0 * exp(sqrt(2|delta|) s).
    """
    if path.params.classification != SELF_SIMILAR:
        raise WrongClassification("self-similar clock requires the SelfSimilar branch")
    return np.asarray(path.s_samples)


def self_similar_alpha_of_s(params: ExpansionParams, s):
    if params.classification != SELF_SIMILAR:
        raise WrongClassification("requires the SelfSimilar branch")
    return params.a0 * np.exp(params.b * np.asarray(s, dtype=float))


def linear_clock(a0: float, a1: float, t):
    """tau(t) = int_0^t dt/alpha for the delta = 0 path alpha = a0 + a1 t."""
    t = np.asarray(t, dtype=float)
    if a1 == 0.0:
        return t / a0
    return np.log1p(a1 * t / a0) / a1


def linear_clock_inverse(a0: float, a1: float, tau):
    tau = np.asarray(tau, dtype=float)
    if a1 == 0.0:
        return a0 * tau
    return a0 * np.expm1(a1 * tau) / a1


def thermo_expansion_gate(K: float, c_nu: float, rel_tol: float = 1e-9) -> bool:
    """True iff 3K = c_nu, the existence condition for thermodynamic expansion."""
    if K <= 0 or c_nu <= 0:
        raise InvalidParams("K and c_nu must be positive")
    return abs(3.0 * K - c_nu) <= rel_tol * max(3.0 * K, c_nu)


def fit_collapse_exponent(path: ExpansionPath, decades: float = 1.0, n_fit: int = 200) -> float:
    """Least-squares slope of log alpha vs log(T - t) over the final decade(s)."""
    if path.T_collapse is None:
        raise WrongClassification("path did not collapse")
    T = path.T_collapse
    gap_end = T - path.t_end
    gaps = np.geomspace(gap_end * 10.0**decades, gap_end, n_fit)
    t_fit = T - gaps
    t_fit = t_fit[t_fit >= 0.0]
    a_fit = path.alpha_at(t_fit)
    slope, _ = np.polyfit(np.log(T - t_fit), np.log(a_fit), 1)
    return float(slope)


def linear_growth_bounds_ok(path: ExpansionPath, slack: float = 1e-8) -> bool:
    """Check a0 e^{beta1 tau} <= alpha <= a0 e^{beta2 tau} and the alpha_tau bounds.

    alpha_tau = alpha * alpha' by the chain rule through tau.
    """
    p = path.params
    if p.classification not in (LINEAR, POSITIVE_DELTA):
        raise WrongClassification("growth bounds apply to linearly expanding paths")
    a, ap, tau = path.alpha, path.alpha_prime, path.tau_samples
    lo = p.a0 * np.exp(p.beta1 * tau)
    hi = p.a0 * np.exp(p.beta2 * tau)
    alpha_tau = a * ap
    ok_alpha = np.all(a >= lo * (1 - slack)) and np.all(a <= hi * (1 + slack))
    ok_rate = (np.all(alpha_tau >= p.beta1 * a * (1 - slack) - slack)
               and np.all(alpha_tau <= p.beta2 * a * (1 + slack) + slack))
    return bool(ok_alpha and ok_rate)
