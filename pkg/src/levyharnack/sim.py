"""Seeded Monte Carlo exit sampling.

Exact positive-stable and symmetric-stable increments, subordinate
Brownian increments for every shipped symbol, compound-Poisson stepping
for modulated kernels, the exact stable ball-exit law, and exit sampling
from arbitrary geometries by walk-on-spheres or adaptive time stepping.

Randomness is entirely counter-based (see rng.py): sample k's path
consumes the streams (seed, k, step, slot), so batches are bit-identical
regardless of chunking or worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special

from . import rng
from .bernstein import MixturePhi, OscillatingPhi, StablePowerPhi
from .errors import DomainError, ModelError, SamplerError
from .geometry import Geometry
from .levy import (ProcessModel, _j_table, j_density, kernel_tail_mass,
                   sphere_area)
from .quad import integrate

__all__ = [
    "ExitSample", "ExitBatch", "stable_subordinator_increment",
    "sbm_increment", "jump_process_increment", "ball_exit_stable",
    "sample_exit", "exit_batch", "expected_exit_time",
    "stable_mean_exit_constant",
]

# slot layout within one (sample, step) stream
_SLOT_POISSON = 0
_SLOT_JUMP_SIZE = 8     # one per jump, up to _MAX_JUMPS
_SLOT_JUMP_DIR = 64     # two per jump
_SLOT_GAUSS = 192       # two per coordinate
_SLOT_SUB = 224         # two per mixture term
_SLOT_STABLE = 240      # two per coordinate (d = 1 fast path)
_SLOT_BALL = 248        # radial, polar, azimuth, side

_MAX_JUMPS = 48
_MAX_MIXTURE_TERMS = 8
_MAX_DIM = 16

DEFAULT_STEP_FACTOR = 0.002   # c_h in h = c_h / phi(dist^-2)
DEFAULT_STEP_BUDGET = 10 ** 6
_RATE_CAP = 4.0               # cap on (jump rate) * h per step
_DIST_FLOOR_FACTOR = 1e-9


def stable_mean_exit_constant(d: int, alpha: float) -> float:
    """C(d, alpha) with E_x[tau_ball] = C (r^2 - |x|^2)^(alpha/2)."""
    return (special.gamma(0.5 * d)
            / (2.0 ** alpha * special.gamma(1.0 + 0.5 * alpha)
               * special.gamma(0.5 * (d + alpha))))


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExitSample:
    position: np.ndarray
    time: float | None
    exited_by_jump: bool
    steps: int


@dataclass(frozen=True, eq=False)
class ExitBatch:
    """Struct-of-arrays batch of exit samples plus its provenance."""

    geometry: Geometry
    model: ProcessModel
    start: np.ndarray
    n: int
    seed: int
    strategy: str
    params: dict
    positions: np.ndarray       # (n, d)
    times: np.ndarray           # (n,), nan when not tracked
    jump_flags: np.ndarray      # (n,) bool
    steps: np.ndarray           # (n,) int
    censored: np.ndarray        # (n,) bool

    @property
    def n_censored(self) -> int:
        return int(self.censored.sum())

    @property
    def ok(self) -> np.ndarray:
        return ~self.censored

    def sample(self, i: int) -> ExitSample:
        return ExitSample(position=self.positions[i],
                          time=float(self.times[i]),
                          exited_by_jump=bool(self.jump_flags[i]),
                          steps=int(self.steps[i]))


# ---------------------------------------------------------------------------
# Elementary increments
# ---------------------------------------------------------------------------

def stable_subordinator_increment(alpha_sub: float, t, seed, sample=0, step=0):
    """Increment S_t of the stable subordinator, E[e^{-lam S_t}] = e^{-t lam^q}."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0):
        raise DomainError("time increment must be positive")
    s1 = rng.one_sided_stable(alpha_sub, seed, sample, step, _SLOT_SUB)
    return t ** (1.0 / alpha_sub) * s1


@lru_cache(maxsize=64)
def _sub_jump_quantile(model: ProcessModel, eps: float):
    """Inverse conditional tail of the subordinator jump law above eps."""
    tail = model.sub.mu_tail
    t_eps = tail(eps)
    logs = [math.log(eps)]
    vals = [t_eps]
    s = eps
    while vals[-1] > 1e-15 * t_eps:
        s *= 10.0 ** 0.05
        logs.append(math.log(s))
        vals.append(tail(s))
        if s > 1e250:
            break
    x = -np.log(np.asarray(vals))  # increasing in s
    y = np.asarray(logs)
    rate = float(t_eps)

    def quantile(u):
        target = -(math.log(t_eps)) - np.log1p(-np.minimum(u, 1.0 - 1e-15))
        return np.exp(np.interp(target, x, y))

    return rate, quantile


@lru_cache(maxsize=64)
def _sub_small_drift(model: ProcessModel, eps: float) -> float:
    """int_0^eps s mu(s) ds: the deterministic compensation of cut jumps."""
    mu = model.sub.mu
    return integrate(lambda v: math.exp(-v) ** 2 * float(mu(math.exp(-v))),
                     -math.log(eps), -math.log(eps) + 80.0, rel_tol=1e-7)


def _jump_layout(counts):
    """Flatten per-sample jump counts into (owner local index, within index)."""
    owners = np.repeat(np.arange(counts.size), counts)
    offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
    within = np.arange(owners.size) - np.repeat(offsets, counts)
    return owners, within


def _subordinator_total(model: ProcessModel, t, seed, samples, step, eps_cut):
    """Subordinated time over per-sample increments t (exact for stable and
    mixture symbols; compound Poisson plus drift otherwise)."""
    phi = model.phi
    t = np.asarray(t, dtype=float)
    if isinstance(phi, StablePowerPhi):
        q = 0.5 * phi.alpha
        return t ** (1.0 / q) * rng.one_sided_stable(q, seed, samples, step,
                                                     _SLOT_SUB)
    if isinstance(phi, MixturePhi):
        if len(phi.terms) > _MAX_MIXTURE_TERMS:
            raise ModelError(f"at most {_MAX_MIXTURE_TERMS} mixture terms "
                             "are supported by the samplers")
        total = np.zeros_like(t)
        for k, (w, a) in enumerate(phi.terms):
            q = 0.5 * a
            total = total + (w * t) ** (1.0 / q) * rng.one_sided_stable(
                q, seed, samples, step, _SLOT_SUB + 2 * k)
        return total
    if isinstance(phi, OscillatingPhi):
        if eps_cut is None or eps_cut <= 0.0:
            raise DomainError("general symbols need a positive eps_cut")
        rate, quantile = _sub_jump_quantile(model, eps_cut)
        drift = _sub_small_drift(model, eps_cut)
        counts = np.minimum(
            rng.poisson(rate * t, seed, samples, step, _SLOT_POISSON),
            _MAX_JUMPS)
        total = drift * t
        owners, within = _jump_layout(counts)
        if owners.size:
            u = rng.uniform(seed, np.asarray(samples)[owners], step,
                            _SLOT_JUMP_SIZE + within)
            np.add.at(total, owners, quantile(u))
        return total
    raise ModelError(f"no sampler for symbol variant {phi.variant!r}")


def sbm_increment(model: ProcessModel, t, seed, sample=0, step=0,
                  eps_cut=None):
    """Spatial increment of the subordinate Brownian motion over time t.

    Exact for stable and mixture symbols; for general symbols the
    subordinator jumps below eps_cut are replaced by their mean drift
    (bias of order the cut first moment, documented in the batch params).
    Returns shape (..., d).
    """
    if model.modulation is not None:
        raise ModelError("modulated kernels use jump_process_increment")
    samples = np.atleast_1d(np.asarray(sample))
    t_arr = np.broadcast_to(np.asarray(t, dtype=float), samples.shape)
    d = model.d
    if d > _MAX_DIM:
        raise ModelError(f"at most {_MAX_DIM} dimensions are supported")
    if d == 1 and isinstance(model.phi, StablePowerPhi):
        a = model.phi.alpha
        out = (t_arr ** (1.0 / a)
               * rng.symmetric_stable(a, seed, samples, step, _SLOT_STABLE))
        out = out[..., None]
    else:
        total = _subordinator_total(model, t_arr, seed, samples, step, eps_cut)
        z = rng.normal_vector(seed, samples, step, _SLOT_GAUSS, d)
        out = np.sqrt(2.0 * total)[..., None] * z
    return out[0] if np.ndim(sample) == 0 else out


@lru_cache(maxsize=64)
def _spatial_jump_quantile(model: ProcessModel, eps: float):
    """Inverse conditional radial tail of the modulated kernel above eps."""
    n_eps = kernel_tail_mass(model, eps)
    logs = [math.log(eps)]
    vals = [n_eps]
    s = eps
    while vals[-1] > 1e-12 * n_eps:
        s *= 10.0 ** 0.1
        logs.append(math.log(s))
        vals.append(kernel_tail_mass(model, s))
        if s > 1e200:
            break
    x = -np.log(np.asarray(vals))
    y = np.asarray(logs)

    def quantile(u):
        target = -math.log(n_eps) - np.log1p(-np.minimum(u, 1.0 - 1e-12))
        return np.exp(np.interp(target, x, y))

    return float(n_eps), quantile


@lru_cache(maxsize=64)
def _spatial_small_variance(model: ProcessModel, eps: float) -> float:
    """Per-coordinate variance rate matching the cut small jumps:
    (1/d) int_{|y| < eps} |y|^2 J_X(y) dy."""
    d = model.d
    omega = sphere_area(d)
    table = _j_table(model)

    def radial(v):
        s = math.exp(v)
        ls = math.log(s)
        if table.x[0] <= ls <= table.x[-1]:
            j = math.exp(float(table(ls)))
        else:
            j = float(j_density(model, s))
        return j * float(model.m(s)) * s ** (d + 2)  # extra s: log substitution

    lo = math.log(eps) - 60.0
    return omega / d * integrate(radial, lo, math.log(eps), rel_tol=1e-7)


def _unit_from_polar(axis, cos_polar, azim_u, d):
    """Unit vectors at given polar cosine around per-row axes (d <= 3)."""
    n = axis.shape[0]
    if d == 1:
        return np.where(cos_polar[:, None] >= 0.0, axis, -axis)
    if d == 2:
        sin_polar = np.sqrt(np.maximum(0.0, 1.0 - cos_polar ** 2))
        sign = np.where(azim_u < 0.5, 1.0, -1.0)
        perp = np.stack([-axis[:, 1], axis[:, 0]], axis=1)
        return cos_polar[:, None] * axis + (sign * sin_polar)[:, None] * perp
    if d == 3:
        helper = np.zeros_like(axis)
        helper[np.arange(n), np.argmin(np.abs(axis), axis=1)] = 1.0
        e1 = np.cross(axis, helper)
        e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
        e2 = np.cross(axis, e1)
        sin_polar = np.sqrt(np.maximum(0.0, 1.0 - cos_polar ** 2))
        phi_ang = 2.0 * np.pi * azim_u
        return (cos_polar[:, None] * axis
                + (sin_polar * np.cos(phi_ang))[:, None] * e1
                + (sin_polar * np.sin(phi_ang))[:, None] * e2)
    raise ModelError("directional sampling is implemented for d <= 3")


def jump_process_increment(model: ProcessModel, t, seed, sample=0, step=0,
                           eps_cut=None):
    """Increment of the modulated jump process over time t.

    Compound Poisson above eps_cut from the radial kernel J_X = j * m plus
    an isotropic Gaussian matching the variance of the cut small jumps.
    Pure symmetry: no drift term.
    """
    if model.d > 3:
        raise ModelError("jump_process_increment supports d <= 3")
    if eps_cut is None or eps_cut <= 0.0:
        raise DomainError("eps_cut must be positive")
    samples = np.atleast_1d(np.asarray(sample))
    t_arr = np.broadcast_to(np.asarray(t, dtype=float), samples.shape)
    d = model.d
    rate, quantile = _spatial_jump_quantile(model, eps_cut)
    var_rate = _spatial_small_variance(model, eps_cut)

    counts = np.minimum(rng.poisson(rate * t_arr, seed, samples, step,
                                    _SLOT_POISSON), _MAX_JUMPS)
    disp = (math.sqrt(var_rate) * np.sqrt(t_arr)[..., None]
            * rng.normal_vector(seed, samples, step, _SLOT_GAUSS, d))
    owners, within = _jump_layout(counts)
    if owners.size:
        su = np.asarray(samples)[owners]
        radii = quantile(rng.uniform(seed, su, step, _SLOT_JUMP_SIZE + within))
        u1 = rng.uniform(seed, su, step, _SLOT_JUMP_DIR + 2 * within)
        u2 = rng.uniform(seed, su, step, _SLOT_JUMP_DIR + 2 * within + 1)
        if d == 1:
            vec = np.where(u1[:, None] < 0.5, -1.0, 1.0)
        elif d == 2:
            ang = 2.0 * np.pi * u1
            vec = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        else:
            c = 2.0 * u1 - 1.0
            s_ = np.sqrt(np.maximum(0.0, 1.0 - c * c))
            ph = 2.0 * np.pi * u2
            vec = np.stack([c, s_ * np.cos(ph), s_ * np.sin(ph)], axis=1)
        np.add.at(disp, owners, radii[:, None] * vec)
    return disp[0] if np.ndim(sample) == 0 else disp


def model_increment(model: ProcessModel, t, seed, sample=0, step=0,
                    eps_cut=None):
    """Dispatch to the appropriate increment sampler for the model."""
    if model.modulation is None:
        return sbm_increment(model, t, seed, sample, step, eps_cut)
    return jump_process_increment(model, t, seed, sample, step, eps_cut)


# ---------------------------------------------------------------------------
# Exact stable ball exit
# ---------------------------------------------------------------------------

def _radial_quantile_stable(alpha, s, u):
    """|exit| of the unit ball from |x| = s: v ~ Beta(1 - a/2, a/2),
    rho^2 = s^2 + (1 - s^2)/(1 - v)."""
    if alpha == 1.0:
        v = np.sin(0.5 * np.pi * u) ** 2
    else:
        v = special.betaincinv(1.0 - 0.5 * alpha, 0.5 * alpha, u)
    v = np.minimum(v, 1.0 - 1e-15)
    return np.sqrt(s * s + (1.0 - s * s) / (1.0 - v))


def ball_exit_stable(alpha: float, d: int, center, radius: float, x,
                     seed, sample=0, step=0):
    """Exact exit position of the isotropic alpha-stable process from a ball.

    The radial law reduces to a Beta quantile and the polar angle given the
    radius has a closed inverse CDF for d <= 3, so the draw is exact and
    rejection-free.  Exit time is not part of the law; see the walk driver
    for the expected-time accounting.
    """
    if not 0.0 < alpha < 2.0:
        raise DomainError("alpha must lie in (0, 2)")
    if d > 3:
        raise ModelError("exact ball-exit sampling is implemented for d <= 3")
    center = np.asarray(center, dtype=float)
    samples = np.atleast_1d(np.asarray(sample))
    n = samples.size
    pts = np.broadcast_to(np.asarray(x, dtype=float), (n, d)).copy()
    rel = (pts - center) / radius
    s = np.linalg.norm(rel, axis=1)
    if np.any(s >= 1.0):
        raise DomainError("start point must lie strictly inside the ball")

    u_rad = rng.uniform(seed, samples, step, _SLOT_BALL)
    rho = _radial_quantile_stable(alpha, s, u_rad)

    u_ang = rng.uniform(seed, samples, step, _SLOT_BALL + 1)
    u_azi = rng.uniform(seed, samples, step, _SLOT_BALL + 2)

    central = s < 1e-14
    axis = np.where(central[:, None],
                    np.concatenate([np.ones((n, 1)), np.zeros((n, d - 1))],
                                   axis=1),
                    rel / np.maximum(s, 1e-300)[:, None])

    cos_polar = np.empty(n)
    if d == 1:
        # two-point conditional law: P(same side) = (rho + s) / (2 rho)
        p_same = np.where(central, 0.5, (rho + s) / (2.0 * rho))
        cos_polar = np.where(u_ang < p_same, 1.0, -1.0)
        direction = _unit_from_polar(axis, cos_polar, u_azi, d)
    elif d == 2:
        # angular density prop. to (A - B cos t)^-1; tangent half-angle inverse
        ratio = np.where(central, 1.0, (rho - s) / (rho + s))
        theta = 2.0 * np.arctan(ratio * np.tan(np.pi * (u_ang - 0.5)))
        cos_polar = np.cos(theta)
        rot_sign = np.where(theta >= 0.0, 0.25, 0.75)  # encodes the rotation sign
        direction = _unit_from_polar(axis, cos_polar, rot_sign, d)
    else:
        # density prop. to (A - B c)^-3/2: inverse CDF in closed form
        a_ = rho * rho + s * s
        b_ = 2.0 * rho * s
        h = (1.0 - u_ang) / (rho + s) + u_ang / np.maximum(rho - s, 1e-300)
        c_ = np.where(central, 2.0 * u_ang - 1.0,
                      (a_ - 1.0 / (h * h)) / np.maximum(b_, 1e-300))
        cos_polar = np.clip(c_, -1.0, 1.0)
        direction = _unit_from_polar(axis, cos_polar, u_azi, d)

    out = center + radius * rho[:, None] * direction
    return out[0] if np.ndim(sample) == 0 else out


# ---------------------------------------------------------------------------
# Exit walks
# ---------------------------------------------------------------------------

def _phi_of_inv_sq(model, dist):
    return model.phi(np.maximum(dist, 1e-300) ** -2.0)


def _scale_of(geometry: Geometry) -> float:
    br = geometry.bounding_radius
    return br if math.isfinite(br) else 1.0


def _wos_chunk(model, geometry, x, seed, lo, hi, budget):
    if not model.is_stable:
        raise ModelError("walk-on-spheres requires the unmodulated stable "
                         "symbol; use the timestep strategy instead")
    alpha = model.alpha
    d = model.d
    const = stable_mean_exit_constant(d, alpha)
    n = hi - lo
    samples = np.arange(lo, hi, dtype=np.int64)
    pos = np.broadcast_to(np.asarray(x, dtype=float), (n, d)).copy()
    times = np.zeros(n)
    steps = np.zeros(n, dtype=np.int64)
    alive = geometry.contains(pos)
    if not np.all(alive):
        raise DomainError("start point must lie inside the geometry")
    floor = 1e-15 * _scale_of(geometry)
    k = 0
    while np.any(alive) and k < budget:
        ia = np.flatnonzero(alive)
        cur = pos[ia]
        rad = np.maximum(geometry.dist_to_complement(cur), floor)
        nxt = ball_exit_stable(alpha, d, np.zeros(d), 1.0,
                               np.zeros((ia.size, d)), seed, samples[ia], k)
        # the exact sampler is translation/scale covariant
        nxt = cur + rad[:, None] * nxt
        times[ia] += const * rad ** alpha
        steps[ia] += 1
        pos[ia] = nxt
        alive[ia] = geometry.contains(nxt)
        k += 1
    censored = alive.copy()
    jump = ~censored  # stable ball exits land strictly outside a.s.
    return pos, times, jump, steps, censored


def _timestep_chunk(model, geometry, x, seed, lo, hi, budget, c_h, eps_cut):
    d = model.d
    n = hi - lo
    samples = np.arange(lo, hi, dtype=np.int64)
    pos = np.broadcast_to(np.asarray(x, dtype=float), (n, d)).copy()
    times = np.zeros(n)
    steps = np.zeros(n, dtype=np.int64)
    jump = np.zeros(n, dtype=bool)
    alive = geometry.contains(pos)
    if not np.all(alive):
        raise DomainError("start point must lie inside the geometry")
    scale = _scale_of(geometry)
    floor = _DIST_FLOOR_FACTOR * scale
    general = not (model.modulation is None
                   and isinstance(model.phi, (StablePowerPhi, MixturePhi)))
    if general:
        eps_cut = eps_cut if eps_cut is not None else 1e-3 * scale
        if model.modulation is None:
            rate, _ = _sub_jump_quantile(model, eps_cut)
        else:
            rate, _ = _spatial_jump_quantile(model, eps_cut)
    k = 0
    while np.any(alive) and k < budget:
        ia = np.flatnonzero(alive)
        cur = pos[ia]
        dist = np.maximum(geometry.dist_to_complement(cur), floor)
        h = c_h / _phi_of_inv_sq(model, dist)
        if general:
            h = np.minimum(h, _RATE_CAP / rate)
        inc = model_increment(model, h, seed, samples[ia], k, eps_cut)
        had_jump = np.ones(ia.size, dtype=bool)
        if general:
            counts = np.minimum(
                rng.poisson(rate * h, seed, samples[ia], k, _SLOT_POISSON),
                _MAX_JUMPS)
            had_jump = counts > 0
        nxt = cur + inc
        times[ia] += h
        steps[ia] += 1
        pos[ia] = nxt
        inside = geometry.contains(nxt)
        exited = ~inside
        # midpoint correction: the exit happened within the last step
        times[ia[exited]] -= 0.5 * h[exited]
        jump[ia[exited]] = had_jump[exited]
        alive[ia] = inside
        k += 1
    censored = alive.copy()
    return pos, times, jump, steps, censored


def _run_chunk(args):
    (model, geometry, x, seed, lo, hi, strategy, budget, c_h, eps_cut) = args
    if strategy == "wos_stable":
        return _wos_chunk(model, geometry, x, seed, lo, hi, budget)
    if strategy == "timestep":
        return _timestep_chunk(model, geometry, x, seed, lo, hi, budget,
                               c_h, eps_cut)
    raise ValueError(f"unknown strategy {strategy!r}")


_CHUNK = 1 << 15


def exit_batch(model: ProcessModel, geometry: Geometry, x, n: int, seed: int,
               strategy: str = "wos_stable", budget: int = DEFAULT_STEP_BUDGET,
               c_h: float = DEFAULT_STEP_FACTOR, eps_cut=None,
               workers: int = 1) -> ExitBatch:
    """Draw n exit samples from a common start point.

    Chunking is fixed (independent of ``workers``), and sample k's path
    depends only on (seed, k), so the batch is reproducible bit-for-bit
    under any parallel schedule.
    """
    if n < 1:
        raise DomainError("need n >= 1")
    edges = list(range(0, n, _CHUNK)) + [n]
    jobs = [(model, geometry, np.asarray(x, dtype=float), seed, lo, hi,
             strategy, budget, c_h, eps_cut)
            for lo, hi in zip(edges[:-1], edges[1:])]
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(j) for j in jobs]
    pos = np.concatenate([p[0] for p in parts])
    times = np.concatenate([p[1] for p in parts])
    jump = np.concatenate([p[2] for p in parts])
    steps = np.concatenate([p[3] for p in parts])
    censored = np.concatenate([p[4] for p in parts])
    params = {"budget": budget, "c_h": c_h, "eps_cut": eps_cut,
              "time_accounting": ("per_ball_expectation"
                                  if strategy == "wos_stable"
                                  else "midpoint_corrected")}
    return ExitBatch(geometry=geometry, model=model,
                     start=np.asarray(x, dtype=float), n=n, seed=seed,
                     strategy=strategy, params=params, positions=pos,
                     times=times, jump_flags=jump, steps=steps,
                     censored=censored)


def sample_exit(model: ProcessModel, geometry: Geometry, x,
                strategy: str = "wos_stable", seed: int = 0, sample: int = 0,
                budget: int = DEFAULT_STEP_BUDGET,
                c_h: float = DEFAULT_STEP_FACTOR, eps_cut=None) -> ExitSample:
    """Draw one exit sample (sample index selects the stream)."""
    args = (model, geometry, np.asarray(x, dtype=float), seed, sample,
            sample + 1, strategy, budget, c_h, eps_cut)
    pos, times, jump, steps, censored = _run_chunk(args)
    if censored[0]:
        raise SamplerError(f"path exceeded the step budget {budget}")
    return ExitSample(position=pos[0], time=float(times[0]),
                      exited_by_jump=bool(jump[0]), steps=int(steps[0]))


def expected_exit_time(model: ProcessModel, geometry: Geometry, x, n: int,
                       seed: int, strategy: str = "timestep",
                       budget: int = DEFAULT_STEP_BUDGET,
                       c_h: float = DEFAULT_STEP_FACTOR, eps_cut=None,
                       workers: int = 1):
    """Monte Carlo estimate (mean, stderr) of the expected exit time.

    The returned dict carries the censoring fraction; above 1% the
    ``reliable`` flag drops (censored paths are excluded from the mean
    but never silently forgotten).
    """
    if n < 10 ** 3:
        raise DomainError("expected_exit_time needs n >= 1000")
    batch = exit_batch(model, geometry, x, n, seed, strategy=strategy,
                       budget=budget, c_h=c_h, eps_cut=eps_cut,
                       workers=workers)
    ok = batch.ok
    vals = batch.times[ok]
    est = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(vals.size))
    frac = batch.n_censored / n
    return {"estimate": est, "stderr": stderr, "n": n,
            "censored_fraction": frac, "reliable": frac <= 0.01,
            "strategy": strategy, "seed": seed}
