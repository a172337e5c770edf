"""Levy densities and characteristic exponents.

Subordinator density mu(t) and its tail, the subordination integral for
the radial jump density j(r), the modulated kernel J_X = j * m, the
characteristic exponent Psi by radial quadrature, and the ratio profiles
backing every small-argument comparability claim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special
from scipy.interpolate import PchipInterpolator

from . import quad
from .bernstein import (MixturePhi, OscillatingPhi, PhiModel, PiecewiseSchedule,
                        StablePowerPhi)
from .errors import DomainError, ModelError, QuadratureError
from .profiles import RatioProfile

__all__ = [
    "SubordinatorModel", "ProcessModel", "RatioProfile", "mu_density",
    "mu_tail", "mu_from_stieltjes", "j_density", "psi_eval",
    "asymp_ratio_profile", "stable_jump_constant", "sphere_area",
]


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere in R^d."""
    return 2.0 * math.pi ** (0.5 * d) / special.gamma(0.5 * d)


def stable_jump_constant(d: int, alpha: float) -> float:
    """A(d, alpha) in j(r) = A r^(-d-alpha) for the isotropic stable process."""
    return (alpha * 2.0 ** (alpha - 1.0) * special.gamma(0.5 * (d + alpha))
            / (math.pi ** (0.5 * d) * special.gamma(1.0 - 0.5 * alpha)))


# ---------------------------------------------------------------------------
# Subordinator
# ---------------------------------------------------------------------------

def _gamma_diff(s, a, b):
    """Q(s, a) - Q(s, b) for 0 <= a < b <= inf, stable in both regimes."""
    if a > 1.0:
        qb = 0.0 if math.isinf(b) else special.gammaincc(s, b)
        return special.gammaincc(s, a) - qb
    pb = 1.0 if math.isinf(b) else special.gammainc(s, b)
    return pb - special.gammainc(s, a)


def mu_from_stieltjes(schedule: PiecewiseSchedule, t: float,
                      method: str = "closed") -> float:
    """Subordinator density of the oscillating symbol.

    mu(t) = int s e^{-st} sigma(ds) with sigma(ds) = f'(s) ds; on each
    power piece the integral reduces to incomplete-gamma differences.
    ``method='quad'`` integrates f'(s) s e^{-st} directly instead, for
    cross-checking.
    """
    if t <= 0.0:
        raise DomainError("mu is defined for t > 0")
    if method == "quad":
        pts = [b for b in schedule.breakpoints] + [1.0 / t]

        def integrand(s):
            for p in schedule.pieces:
                if p.lo < s <= p.hi:
                    return p.scale * p.exponent * s ** p.exponent * math.exp(-s * t)
            return 0.0

        hi = min(1e4 / t, 1e300)
        return quad.integrate(integrand, 0.0, hi, points=pts, rel_tol=1e-9)
    total = 0.0
    for p in schedule.pieces:
        beta = p.exponent
        total += (p.scale * beta * t ** (-beta - 1.0) * special.gamma(beta + 1.0)
                  * _gamma_diff(beta + 1.0, p.lo * t,
                                math.inf if math.isinf(p.hi) else p.hi * t))
    return total


def _mu_tail_from_stieltjes(schedule: PiecewiseSchedule, t: float) -> float:
    # mu(t, inf) = int e^{-st} f'(s) ds, again incomplete-gamma differences
    total = 0.0
    for p in schedule.pieces:
        beta = p.exponent
        total += (p.scale * beta * t ** (-beta) * special.gamma(beta)
                  * _gamma_diff(beta, p.lo * t,
                                math.inf if math.isinf(p.hi) else p.hi * t))
    return total


@dataclass(frozen=True)
class SubordinatorModel:
    """Driftless subordinator described by its symbol phi."""

    phi: PhiModel

    def __post_init__(self):
        if isinstance(self.phi, OscillatingPhi) and self.phi.reciprocal:
            raise ModelError("the reciprocal comparison candidate has no "
                             "derived jump density; use the lam*g form")

    def mu(self, t):
        """Levy density mu(t) of the subordinator."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr <= 0.0):
            raise DomainError("mu is defined for t > 0")
        phi = self.phi
        if isinstance(phi, StablePowerPhi):
            q = 0.5 * phi.alpha
            out = q / special.gamma(1.0 - q) * t_arr ** (-1.0 - q)
        elif isinstance(phi, MixturePhi):
            out = np.zeros_like(t_arr)
            for w, a in phi.terms:
                q = 0.5 * a
                out = out + w * q / special.gamma(1.0 - q) * t_arr ** (-1.0 - q)
        elif isinstance(phi, OscillatingPhi):
            if t_arr.ndim == 0:
                out = mu_from_stieltjes(phi.schedule, float(t_arr))
            else:
                out = np.array([mu_from_stieltjes(phi.schedule, x) for x in t_arr])
        else:
            raise ModelError(f"no jump density accessor for symbol variant "
                             f"{phi.variant!r}")
        return float(out) if t_arr.ndim == 0 else out

    def mu_tail(self, t):
        """mu(t, inf), the tail mass of the subordinator's Levy measure."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr <= 0.0):
            raise DomainError("the tail is defined for t > 0")
        phi = self.phi
        if isinstance(phi, StablePowerPhi):
            q = 0.5 * phi.alpha
            out = t_arr ** (-q) / special.gamma(1.0 - q)
        elif isinstance(phi, MixturePhi):
            out = np.zeros_like(t_arr)
            for w, a in phi.terms:
                q = 0.5 * a
                out = out + w * t_arr ** (-q) / special.gamma(1.0 - q)
        elif isinstance(phi, OscillatingPhi):
            if t_arr.ndim == 0:
                out = _mu_tail_from_stieltjes(phi.schedule, float(t_arr))
            else:
                out = np.array([_mu_tail_from_stieltjes(phi.schedule, x)
                                for x in t_arr])
        else:
            raise ModelError(f"no tail accessor for symbol variant "
                             f"{phi.variant!r}")
        return float(out) if t_arr.ndim == 0 else out

    def validate(self, t_grid=None):
        """Positivity/monotonicity of mu and integrability of (1 ^ t) mu(dt)."""
        grid = np.asarray(t_grid if t_grid is not None
                          else np.logspace(-6, 4, 101))
        vals = self.mu(grid)
        if np.any(vals <= 0.0) or np.any(np.diff(vals) >= 0.0):
            raise ModelError("mu must be positive and strictly decreasing")
        small = quad.integrate(lambda t: t * self.mu(t), 0.0, 1.0,
                               points=[1e-6, 1e-3], rel_tol=1e-4)
        total = small + self.mu_tail(1.0)
        if not np.isfinite(total):
            raise ModelError("integral of (1 ^ t) against mu diverges")
        return total


def mu_density(sub: SubordinatorModel, t):
    return sub.mu(t)


def mu_tail(sub: SubordinatorModel, t):
    return sub.mu_tail(t)


# ---------------------------------------------------------------------------
# Process model: J_X(y) = j(|y|) m(|y|)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProcessModel:
    """Rotationally symmetric pure-jump process.

    The kernel is the subordinate-Brownian radial density j modulated by a
    radial factor m with gamma^-1 <= m <= gamma; Psi is its characteristic
    exponent.  With m == 1 the process is the subordinate Brownian motion
    itself.
    """

    d: int
    sub: SubordinatorModel
    gamma: float = 1.0
    modulation: tuple | None = None  # ("constant", c) or None

    def __post_init__(self):
        if self.d < 1:
            raise ModelError("dimension must be >= 1")
        if self.gamma < 1.0:
            raise ModelError("gamma must be >= 1")
        if self.modulation is not None:
            kind = self.modulation[0]
            if kind != "constant":
                raise ModelError(f"unsupported modulation {kind!r}")
            c = float(self.modulation[1])
            if not (1.0 / self.gamma <= c <= self.gamma):
                raise ModelError("modulation must stay within [1/gamma, gamma]")

    @property
    def phi(self) -> PhiModel:
        return self.sub.phi

    def m(self, r):
        r = np.asarray(r, dtype=float)
        if self.modulation is None:
            return np.ones_like(r)
        return np.full_like(r, float(self.modulation[1]))

    def j(self, r):
        return j_density(self, r)

    def kernel(self, r):
        """J_X as a function of the radius: j(r) * m(r)."""
        return self.j(r) * self.m(r)

    @property
    def is_stable(self) -> bool:
        return isinstance(self.phi, StablePowerPhi) and self.modulation is None

    @property
    def alpha(self) -> float:
        if not isinstance(self.phi, StablePowerPhi):
            raise ModelError("alpha is only defined for the stable symbol")
        return self.phi.alpha


# ---------------------------------------------------------------------------
# Subordination integral for j
# ---------------------------------------------------------------------------

_J_R_FLOOR = 1e-8


def j_density(model: ProcessModel, r):
    """Radial jump density j(r) of the subordinate Brownian motion.

    Quadrature of (4 pi t)^(-d/2) e^(-r^2/4t) mu(t) dt, split at t = r^2;
    the t < r^2 piece is mapped through t = r^2/u to tame the essential
    singularity, the t > r^2 piece runs in log scale.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0.0):
        raise DomainError("j is defined for r > 0")
    if np.any(r_arr < _J_R_FLOOR):
        raise DomainError(f"j quadrature is guarded below r = {_J_R_FLOOR:g}")
    d = model.d
    mu = model.sub.mu

    def one(rv):
        r2 = rv * rv

        def left(u):  # t = r^2/u, u in (1, inf)
            return ((4.0 * math.pi * r2 / u) ** (-0.5 * d)
                    * math.exp(-0.25 * u) * mu(r2 / u) * r2 / (u * u))

        def right(w):  # t = r^2 e^w, w in (0, inf)
            t = r2 * math.exp(w)
            return (4.0 * math.pi * t) ** (-0.5 * d) * math.exp(-r2 / (4.0 * t)) * mu(t) * t

        lv = quad.integrate(left, 1.0, np.inf, points=[4.0, 16.0], rel_tol=1e-7)
        rv_ = quad.integrate(right, 0.0, 600.0, points=[1.0, 10.0], rel_tol=1e-7)
        return lv + rv_

    if r_arr.ndim == 0:
        return one(float(r_arr))
    return np.array([one(x) for x in r_arr])


# ---------------------------------------------------------------------------
# Characteristic exponent by radial quadrature
# ---------------------------------------------------------------------------

def _one_minus_lambda(x, d):
    """1 - Lambda_d(x), where Lambda_d is the normalized spherical average
    of cos(x e . u); series below x = 1e-3 to avoid cancellation."""
    x = float(x)
    if x < 1e-3:
        x2 = x * x
        return x2 / (2.0 * d) - x2 * x2 / (8.0 * d * (d + 2.0))
    if d == 1:
        return 1.0 - math.cos(x)
    if d == 2:
        return 1.0 - special.j0(x)
    if d == 3:
        return 1.0 - math.sin(x) / x
    nu = 0.5 * d - 1.0
    return 1.0 - special.gamma(0.5 * d) * (2.0 / x) ** nu * special.jv(nu, x)


def _lambda_d(x, d):
    return 1.0 - _one_minus_lambda(x, d)


def _euler_sum(blocks):
    """Euler-transformed sum of (eventually) alternating block integrals:
    repeated pairwise averaging of the partial sums."""
    s = np.cumsum(np.asarray(blocks, dtype=float))
    while s.size > 1:
        s = 0.5 * (s[:-1] + s[1:])
    return float(s[0])


def kernel_tail_mass(model: ProcessModel, s: float) -> float:
    """Total kernel mass beyond radius s: integral of J_X over {|y| > s}.

    Uses P(|W_t| > s) = Q(d/2, s^2/(4t)) under the subordination, so only
    one quadrature over the subordinator density is needed.
    """
    if s <= 0.0:
        raise DomainError("tail mass needs s > 0")
    d = model.d
    mu = model.sub.mu
    s2 = s * s

    def integrand(u):  # u = s^2/(4t)
        return float(mu(s2 / (4.0 * u))) * special.gammaincc(0.5 * d, u) \
            * s2 / (4.0 * u * u)

    base = quad.integrate(integrand, 0.0, np.inf, points=[0.25, 1.0, 4.0],
                          rel_tol=1e-7)
    return float(model.m(s)) * base


@lru_cache(maxsize=32)
def _j_table(model: ProcessModel, lo_exp: int = -8, hi_exp: int = 8,
             per_decade: int = 40):
    """Cached log-log interpolant of j on [10^lo_exp, 10^hi_exp]."""
    s = np.logspace(lo_exp, hi_exp, (hi_exp - lo_exp) * per_decade + 1)
    vals = j_density(model, s)
    return PchipInterpolator(np.log(s), np.log(vals), extrapolate=False)


def psi_eval(model: ProcessModel, theta, rel_tol=1e-6, max_blocks=96):
    """Characteristic exponent Psi(theta) of the modulated kernel.

    Radial quadrature of the dimension-reduced integrand
    omega_{d-1} (1 - Lambda_d(theta s)) J_X(s) s^{d-1}; the oscillatory
    far field is summed over half-period blocks with Euler acceleration,
    the flat part of the tail through the closed-form tail mass.
    """
    th_arr = np.asarray(theta, dtype=float)
    if np.any(th_arr < 0.0):
        raise DomainError("Psi is defined for theta >= 0")

    d = model.d
    omega = sphere_area(d)
    table = _j_table(model)

    def radial(s):
        ls = math.log(s)
        if table.x[0] <= ls <= table.x[-1]:
            j = math.exp(float(table(ls)))
        else:
            j = float(j_density(model, s))
        return j * float(model.m(s)) * s ** (d - 1)

    def one(th):
        if th == 0.0:
            return 0.0
        s1 = 0.5 * math.pi / th
        near = quad.integrate(
            lambda v: _one_minus_lambda(th * math.exp(v), d)
            * radial(math.exp(v)) * math.exp(v),
            math.log(max(_J_R_FLOOR, s1 * 1e-9)), math.log(s1),
            rel_tol=rel_tol)
        flat = kernel_tail_mass(model, s1) / omega
        # oscillatory tail: - int_{s1}^inf Lambda_d(theta s) J s^{d-1} ds
        blocks = []
        prev_sum = None
        scale = abs(near + flat)
        for k in range(max_blocks):
            lo = s1 + k * math.pi / th
            blk = quad.integrate_block(
                lambda s: _lambda_d(th * s, d) * radial(s),
                lo, lo + math.pi / th, abs_tol=1e-12 * scale)
            blocks.append(blk)
            if k >= 12 and k % 4 == 0:
                cur = _euler_sum(blocks)
                if prev_sum is not None and abs(cur - prev_sum) <= rel_tol * max(
                        abs(near + flat - cur), 1e-300):
                    return omega * (near + flat - cur)
                prev_sum = cur
        osc = _euler_sum(blocks)
        approx = omega * (near + flat - osc)
        tail_scale = abs(blocks[-1]) / max(abs(approx / omega), 1e-300)
        if tail_scale > 100.0 * rel_tol:
            raise QuadratureError(
                f"oscillatory tail did not settle at theta={th:g}",
                achieved=tail_scale, value=approx)
        return approx

    if th_arr.ndim == 0:
        return one(float(th_arr))
    return np.array([one(x) for x in th_arr])


# ---------------------------------------------------------------------------
# Asymptotic comparability profiles
# ---------------------------------------------------------------------------

def asymp_ratio_profile(model: ProcessModel, which: str, grid) -> RatioProfile:
    """Named ratio over a grid; the evidence for each comparability claim.

    which:
      mu             t mu(t) / phi(1/t)
      tail           mu(t, inf) / phi(1/t)
      j              j(r) r^d / phi(r^-2)
      doubling_small j(r) / j(2r), r <= 1
      doubling_large j(r) / j(r+1), r > 1
    """
    grid = np.asarray(grid, dtype=float)
    if np.any(grid <= 0.0):
        raise DomainError("profile grids must be positive")
    phi = model.phi
    if which == "mu":
        ratios = grid * model.sub.mu(grid) / phi(1.0 / grid)
    elif which == "tail":
        ratios = model.sub.mu_tail(grid) / phi(1.0 / grid)
    elif which == "j":
        ratios = j_density(model, grid) * grid ** model.d / phi(grid ** -2.0)
    elif which == "doubling_small":
        if np.any(grid > 1.0):
            raise DomainError("doubling_small is stated for r <= 1")
        ratios = j_density(model, grid) / j_density(model, 2.0 * grid)
    elif which == "doubling_large":
        if np.any(grid <= 1.0):
            raise DomainError("doubling_large is stated for r > 1")
        ratios = j_density(model, grid) / j_density(model, grid + 1.0)
    else:
        raise ValueError(f"unknown profile {which!r}")
    return RatioProfile(label=f"asymp_{which}", arguments=grid, ratios=ratios,
                        meta={"d": model.d, "phi": phi.variant})
