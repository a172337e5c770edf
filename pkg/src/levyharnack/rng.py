"""Counter-based random streams.

Every random quantity in the package is a pure function of
``(seed, sample, step, slot)``.  Streams are derived by hashing the
four indices through a splitmix64-style avalanche, so a batch is
reproducible sample-by-sample no matter how the samples are chunked
across workers or rounds.  No mutable RNG state exists anywhere.
"""

from __future__ import annotations

import numpy as np
from scipy import stats

_U64 = np.uint64
_GOLD = _U64(0x9E3779B97F4A7C15)
_K_SAMPLE = _U64(0xD1342543DE82EF95)
_K_STEP = _U64(0x2545F4914F6CDD1D)
_K_SLOT = _U64(0x27220A95FE3D4C65)
_INV_2_53 = 1.0 / 9007199254740992.0


def _mix(z):
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


def uniform(seed, sample, step=0, slot=0):
    """Uniform(0,1) draws indexed by (seed, sample, step, slot).

    Broadcasting applies across the three index arrays.  Values lie in
    the open interval (0, 1): the 53-bit mantissa is offset by half an ulp.
    """
    with np.errstate(over="ignore"):
        z = (_U64(seed) * _GOLD
             + np.asarray(sample, dtype=np.uint64) * _K_SAMPLE
             + np.asarray(step, dtype=np.uint64) * _K_STEP
             + np.asarray(slot, dtype=np.uint64) * _K_SLOT)
        z = _mix(_mix(z + _GOLD))
    return ((z >> _U64(11)).astype(np.float64) + 0.5) * _INV_2_53


def normal(seed, sample, step=0, slot=0):
    """Standard normal draws (Box-Muller; consumes slots ``slot`` and ``slot+1``)."""
    u1 = uniform(seed, sample, step, slot)
    u2 = uniform(seed, sample, step, np.asarray(slot) + 1)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def normal_vector(seed, sample, step, slot, dim):
    """(n, dim) array of iid standard normals; consumes 2*dim slots."""
    sample = np.asarray(sample)
    cols = [normal(seed, sample, step, slot + 2 * k) for k in range(dim)]
    return np.stack(cols, axis=-1)


def exponential(seed, sample, step=0, slot=0):
    return -np.log(uniform(seed, sample, step, slot))


def symmetric_stable(alpha, seed, sample, step=0, slot=0):
    """Standard symmetric alpha-stable draws, E[e^{i theta X}] = e^{-|theta|^alpha}.

    Chambers-Mallows-Stuck; consumes slots ``slot`` and ``slot+1``.
    alpha=1 reduces to the Cauchy quantile (one uniform).
    """
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must be in (0, 2], got {alpha}")
    u = uniform(seed, sample, step, slot)
    theta = np.pi * (u - 0.5)
    if alpha == 1.0:
        return np.tan(theta)
    w = exponential(seed, sample, step, np.asarray(slot) + 1)
    if alpha == 2.0:
        return 2.0 * np.sqrt(w) * np.sin(theta)
    return (np.sin(alpha * theta) / np.cos(theta) ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * theta) / w) ** ((1.0 - alpha) / alpha))


def one_sided_stable(q, seed, sample, step=0, slot=0):
    """Positive stable draws with E[e^{-lam S}] = e^{-lam^q}, q in (0,1).

    Kanter's transformation; rejection-free, consumes two slots.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"stability index must be in (0, 1), got {q}")
    theta = np.pi * uniform(seed, sample, step, slot)
    w = exponential(seed, sample, step, np.asarray(slot) + 1)
    a = (np.sin((1.0 - q) * theta)
         * np.sin(q * theta) ** (q / (1.0 - q))
         / np.sin(theta) ** (1.0 / (1.0 - q)))
    return (a / w) ** ((1.0 - q) / q)


def poisson(mean, seed, sample, step=0, slot=0):
    """Poisson counts via the exact quantile function; one slot each."""
    u = uniform(seed, sample, step, slot)
    mean = np.asarray(mean, dtype=np.float64)
    out = stats.poisson.ppf(u, np.maximum(mean, 0.0)).astype(np.int64)
    return np.where(mean <= 0.0, 0, out)
