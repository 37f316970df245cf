"""Chordal SLE at desk scale: the (c, h) map, the Itô drift of observables,
Euler-Maruyama ensembles of ``k_t(z) = g_t(z) - xi_t`` and martingale checks.

Randomness: path ``i`` of a run with seed ``s`` draws its Brownian
increments from ``numpy.random.Generator(PCG64(SeedSequence([s, i])))``.
Paths are therefore reproducible one by one and independent of how the
ensemble is chunked or scheduled.
"""

from __future__ import annotations

import cmath
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .evolution.flow import _step_grid, rk4

# --------------------------------------------------------------------------
# central charge and weight


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal/fraction string or float."""
    if isinstance(x, bool):
        raise TypeError("boolean is not a number")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        # snap decimal renderings such as 8/3 = 2.6666666666666665 to the intended fraction
        q = Fraction(x).limit_denominator(1000)
        return q if abs(float(q) - x) <= 1e-12 * max(1.0, abs(x)) else Fraction(x)
    raise TypeError(f"cannot read {x!r} as a rational number")


@dataclass(frozen=True)
class ChargeWeight:
    c: Fraction
    h: Fraction


def charge_weight(kappa) -> ChargeWeight:
    """``c = (6-k)(3k-8)/(2k)`` and ``h = (6-k)/(2k)`` in exact arithmetic."""
    k = as_fraction(kappa)
    if k <= 0:
        raise ValueError("kappa must be positive")
    return ChargeWeight((6 - k) * (3 * k - 8) / (2 * k), (6 - k) / (2 * k))


# --------------------------------------------------------------------------
# deterministic Loewner map (xi = 0)


def deterministic_map(z: complex, t: float) -> complex:
    """``sqrt(z^2 + 4t)`` on the branch continuous from ``g(z, 0) = z`` (upper half-plane)."""
    if complex(z).imag <= 0:
        raise ValueError("z must lie in the upper half-plane")
    w = cmath.sqrt(z * z + 4 * t)
    if w.imag < 0 or (w.imag == 0 and w.real * complex(z).real < 0):
        w = -w
    return w


def integrate_deterministic(z: complex, t_end: float, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """RK4 for ``dg/dt = 2/g`` from ``g(0) = z``; returns ``(times, g)``."""
    grid = _step_grid(0.0, t_end, dt, [])
    g = np.array([complex(z)])
    out = [g[0]]
    f = lambda t, y: 2.0 / y  # noqa: E731
    with np.errstate(divide="ignore", invalid="ignore"):
        for ta, tb in zip(grid, grid[1:]):
            g = rk4(f, g, ta, tb - ta)
            out.append(g[0])
    return np.array(grid), np.array(out)


@dataclass(frozen=True)
class DeterministicCheck:
    z: complex
    t_end: float
    dt: float
    max_error: float
    error_at: float

    def to_json(self) -> dict:
        return {"z": [self.z.real, self.z.imag], "t_end": self.t_end, "dt": self.dt,
                "max_error": self.max_error, "error_at": self.error_at}


def deterministic_check(z: complex = 2j, t_end: float = 1.0, dt: float = 1e-3) -> DeterministicCheck:
    """Largest RK4 error against the closed form over the integration grid."""
    ts, g = integrate_deterministic(z, t_end, dt)
    exact_vals = np.array([deterministic_map(z, t) for t in ts])
    err = np.abs(g - exact_vals)
    err = np.where(np.isfinite(err), err, np.inf)
    i = int(np.argmax(err))
    return DeterministicCheck(complex(z), t_end, dt, float(err[i]), float(ts[i]))


def capacity_fit(t: float, radii: Sequence[float] = (10.0, 20.0, 40.0), angles: int = 7,
                 dt: float = 1e-3) -> complex:
    """Least-squares ``a`` in ``g(z) - z ~ a/z + b/z^3`` from RK4 values on half-circles.

    For the hull grown by ``xi = 0``, ``a`` is the half-plane capacity ``2t``.
    """
    thetas = np.linspace(0, math.pi, angles + 2)[1:-1]
    zs = np.array([r * np.exp(1j * th) for r in radii for th in thetas])
    grid = _step_grid(0.0, t, dt, [])
    g = zs.astype(complex)
    f = lambda s, y: 2.0 / y  # noqa: E731
    for ta, tb in zip(grid, grid[1:]):
        g = rk4(f, g, ta, tb - ta)
    A = np.stack([1 / zs, 1 / zs**3], axis=1)
    coef, *_ = np.linalg.lstsq(A, g - zs, rcond=None)
    return complex(coef[0])


# --------------------------------------------------------------------------
# observables and the Itô drift


@dataclass(frozen=True)
class Observable:
    """Finite sum ``sum_p a_p z^p`` with rational (possibly fractional) exponents.

    Fractional powers use the principal branch, so evaluation points must
    stay off the negative real axis.
    """

    terms: Mapping[Fraction, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for p, a in dict(self.terms).items():
            a = complex(a)
            if a != 0:
                q = as_fraction(p) if not isinstance(p, Fraction) else p
                clean[q] = clean.get(q, 0) + a
        object.__setattr__(self, "terms", {p: a for p, a in clean.items() if a != 0})

    @classmethod
    def monomial(cls, p, a: complex = 1.0) -> "Observable":
        return cls({as_fraction(p): a})

    @classmethod
    def from_json(cls, pairs) -> "Observable":
        """``[[power, coef], ...]`` where power may be a string like ``"-1/2"`` and coef ``[re, im]``."""
        terms = {}
        for p, a in pairs:
            if isinstance(a, (list, tuple)):
                a = complex(a[0], a[1])
            terms[as_fraction(p)] = complex(a)
        return cls(terms)

    def to_json(self) -> list:
        return [[str(p), [a.real, a.imag]] for p, a in sorted(self.terms.items())]

    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for p, a in self.terms.items():
            if p.denominator == 1:
                out = out + a * z ** int(p)
            else:
                out = out + a * np.exp(float(p) * np.log(z))
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({a:g})*z^({p})" for p, a in sorted(self.terms.items()))


def drift_operator(F: Observable, kappa) -> Observable:
    """``(kappa/2) F'' + (2/z) F'``: the ``dt`` part of ``dF(k_t)``.

    On ``a z^p`` this is ``a p ((kappa/2)(p-1) + 2) z^{p-2}``, which vanishes
    for ``p = 0`` and ``p = 1 - 4/kappa``.
    """
    k = as_fraction(kappa)
    out: dict[Fraction, complex] = {}
    for p, a in F.terms.items():
        factor = p * (k / 2 * (p - 1) + 2)
        if factor != 0:
            out[p - 2] = out.get(p - 2, 0) + a * float(factor)
    return Observable(out)


def driftless_power(kappa) -> Fraction:
    """The exponent ``1 - 4/kappa`` whose monomial is a martingale observable."""
    return 1 - 4 / as_fraction(kappa)


# --------------------------------------------------------------------------
# Euler-Maruyama ensembles


@dataclass(frozen=True)
class SleParams:
    """Run parameters; ``kappa`` is kept exact (pass ``"8/3"`` rather than ``8/3``)."""

    kappa: Fraction
    dt: float
    T: float
    n_paths: int
    seed: int
    eps: float = 1e-3
    noise_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kappa", as_fraction(self.kappa))
        errors = []
        if not self.kappa > 0:
            errors.append("kappa must be > 0")
        if not self.dt > 0:
            errors.append("dt must be > 0")
        if not self.T >= 0:
            errors.append("T must be >= 0")
        if self.n_paths < 1:
            errors.append("n_paths must be >= 1")
        if not self.eps > 0:
            errors.append("eps must be > 0")
        if errors:
            raise ValueError("; ".join(errors))


def path_rng(seed: int, index: int) -> np.random.Generator:
    """Substream of path ``index``: ``PCG64(SeedSequence([seed, index]))``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


@dataclass(frozen=True)
class SlePath:
    times: np.ndarray
    k_values: np.ndarray
    xi: np.ndarray
    swallowed_at: float

    @property
    def terminated(self) -> bool:
        return math.isfinite(self.swallowed_at)


@dataclass
class SleEnsemble:
    """Samples of ``k_t(z0)`` and ``xi_t`` at the recorded times for every path."""

    params: SleParams
    z0: complex
    times: np.ndarray
    k: np.ndarray
    xi: np.ndarray
    swallowed_at: np.ndarray
    max_im_increase: np.ndarray

    def alive(self, j: int) -> np.ndarray:
        """Paths not swallowed up to and including recorded time ``j``."""
        return self.swallowed_at > self.times[j]

    @property
    def swallowed_fraction(self) -> float:
        return float(np.mean(np.isfinite(self.swallowed_at)))

    def path(self, i: int) -> SlePath:
        return SlePath(self.times, self.k[i], self.xi[i], float(self.swallowed_at[i]))


def _simulate_chunk(params: SleParams, z0: complex, idx: np.ndarray, n_steps: int,
                    record: np.ndarray) -> tuple:
    m = len(idx)
    dB = np.empty((m, n_steps))
    sd = math.sqrt(params.dt)
    for r, i in enumerate(idx):
        dB[r] = path_rng(params.seed, int(i)).standard_normal(n_steps) * sd
    dB *= params.noise_scale
    sk = math.sqrt(float(params.kappa))
    k = np.full(m, complex(z0))
    xi = np.zeros(m)
    alive = np.ones(m, dtype=bool)
    swallowed = np.full(m, np.inf)
    # largest single-step increase of Im k, for the monotonicity check
    max_im_increase = np.full(m, -np.inf)
    n_rec = int(record.sum())
    K = np.empty((m, n_rec + 1), dtype=complex)
    X = np.empty((m, n_rec + 1))
    K[:, 0], X[:, 0] = k, xi
    col = 1
    for s in range(n_steps):
        t_next = (s + 1) * params.dt
        inc = sk * dB[:, s]
        new_k = k + 2.0 / k * params.dt - inc
        step_im = new_k.imag - k.imag
        max_im_increase = np.where(alive, np.maximum(max_im_increase, step_im), max_im_increase)
        k = np.where(alive, new_k, k)
        xi = np.where(alive, xi + inc, xi)
        dead = alive & ((np.abs(k) < params.eps) | (k.imag < 0))
        swallowed[dead] = t_next
        alive &= ~dead
        if record[s]:
            K[:, col], X[:, col] = k, xi
            col += 1
    return K, X, swallowed, max_im_increase


def simulate_chordal(params: SleParams, z0: complex, record_every: int | None = None,
                     threads: int = 1, chunk: int = 1000) -> SleEnsemble:
    """Euler-Maruyama for ``dk = (2/k) dt - sqrt(kappa) dB`` started at ``z0``.

    A path is swallowed (and frozen) once ``|k| < eps`` or ``Im k < 0``.
    ``threads = 0`` uses the CPU count; results do not depend on it.
    """
    z0 = complex(z0)
    if z0.imag <= 0:
        raise ValueError("z0 must lie in the upper half-plane")
    n_steps = int(round(params.T / params.dt))
    if abs(n_steps * params.dt - params.T) > 1e-9 * max(1.0, params.T):
        raise ValueError("T must be an integer multiple of dt")
    every = n_steps if record_every is None else record_every
    record = np.zeros(n_steps, dtype=bool)
    if n_steps:
        record[every - 1 :: max(every, 1)] = True
        record[-1] = True
    times = np.concatenate(([0.0], (np.nonzero(record)[0] + 1) * params.dt))

    chunks = [np.arange(a, min(a + chunk, params.n_paths)) for a in range(0, params.n_paths, chunk)]
    workers = (os.cpu_count() or 1) if threads == 0 else max(threads, 1)
    job = lambda idx: _simulate_chunk(params, z0, idx, n_steps, record)  # noqa: E731
    if workers == 1 or len(chunks) == 1:
        parts = [job(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, chunks))
    K = np.concatenate([p[0] for p in parts])
    X = np.concatenate([p[1] for p in parts])
    sw = np.concatenate([p[2] for p in parts])
    mi = np.concatenate([p[3] for p in parts])
    return SleEnsemble(params, z0, times, K, X, sw, mi)


@dataclass(frozen=True)
class MartingaleReport:
    kappa: float
    c: Fraction
    h: Fraction
    F0: complex
    checkpoints: list[dict]
    swallowed_fraction: float
    deviation_sigma: float

    def to_json(self) -> dict:
        return {
            "kappa": self.kappa,
            "c": str(self.c),
            "h": str(self.h),
            "F0": [self.F0.real, self.F0.imag],
            "checkpoints": self.checkpoints,
            "swallowed_fraction": self.swallowed_fraction,
            "deviation_sigma": self.deviation_sigma,
        }


def ensemble_mean(values: np.ndarray) -> tuple[complex, float]:
    """Mean and its standard error ``sqrt((var re + var im)/N)``."""
    N = len(values)
    if N == 0:
        return complex("nan"), math.nan
    mean = complex(np.mean(values))
    if N < 2:
        return mean, math.inf
    var = np.var(values.real, ddof=1) + np.var(values.imag, ddof=1)
    return mean, float(math.sqrt(var / N))


def martingale_test(F: Observable, params: SleParams, z0: complex, checkpoints: int = 5,
                    threads: int = 1, require_driftless: bool = True,
                    warn_fraction: float = 0.01) -> MartingaleReport:
    """Monte-Carlo ``E[F(k_t)]`` at checkpoints against ``F(z0)``, in standard errors.

    Swallowed paths are excluded from each checkpoint; the reported
    ``deviation_sigma`` is the one at the final time.
    """
    if require_driftless and not drift_operator(F, params.kappa).is_zero():
        raise ValueError("observable has non-zero drift for this kappa")
    n_steps = int(round(params.T / params.dt))
    every = max(n_steps // max(checkpoints, 1), 1)
    ens = simulate_chordal(params, z0, record_every=every, threads=threads)
    F0 = complex(F(np.array([z0]))[0])
    cps = []
    for j, t in enumerate(ens.times):
        alive = ens.alive(j)
        mean, se = ensemble_mean(F(ens.k[alive, j]))
        dev = abs(mean - F0) / se if se > 0 else (0.0 if mean == F0 else math.inf)
        cps.append({"t": float(t), "mean_re": mean.real, "mean_im": mean.imag,
                    "stderr": se, "n_alive": int(alive.sum()), "deviation_sigma": dev})
    frac = ens.swallowed_fraction
    if frac > warn_fraction:
        warnings.warn(f"swallowed fraction {frac:.3%} exceeds {warn_fraction:.0%}", RuntimeWarning)
    cw = charge_weight(params.kappa)
    return MartingaleReport(float(params.kappa), cw.c, cw.h, F0, cps, frac, cps[-1]["deviation_sigma"])
