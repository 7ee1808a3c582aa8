"""Checking the transport identity, the maximal inequality and survival.

Every check exists in two independent lanes wherever the process allows:

* exact: enumerate the full window law with rational arithmetic and
  compute the quantity as a Fraction, no tolerances anywhere;
* Monte Carlo: estimate the same quantity from seeded sampling and
  report a confidence interval.

The Monte Carlo lanes are deterministic given (spec, seed, trials): work
is cut into fixed-size chunks of trials whatever the thread count, each
chunk is a pure function of its trial indices, and all reductions run on
the reassembled full vectors.  Running with 1 or 16 threads produces the
same bytes.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from .errors import InvalidSpec
from .processes import (
    DEFAULT_ATOM_CAP,
    GaussianProcess,
    IidDiscreteProcess,
    MarkovProcess,
    MixtureProcess,
    Process,
    exact_window_distribution,
)
from .transport import mass_received_at_zero, mass_row, received_mass_terms, sent_mass_terms

# default confidence level: two-sided 99%
Z_DEFAULT = 2.576

# sign checks pass when the estimate exceeds zero by at most this many
# standard errors; exact-vs-MC agreement is gated at AGREEMENT_SIGMAS
SIGN_SLACK = 3.0
AGREEMENT_SIGMAS = 4.0

# trials per work unit; a deterministic function of the window width (never
# of the thread count), capped so a chunk's sample block stays around 128 MB.
# Chunking only groups trials; every draw is keyed by its absolute trial
# index, so results cannot depend on these numbers.
CHUNK_TRIALS = 4096
_CHUNK_BYTES = 128 << 20


@dataclass(frozen=True)
class EstimateCI:
    """A Monte Carlo mean with its normal-approximation interval."""

    mean: float
    std_error: float
    trials: int
    z: float
    ci_low: float
    ci_high: float

    @classmethod
    def from_samples(cls, samples: np.ndarray, z: float = Z_DEFAULT) -> "EstimateCI":
        n = len(samples)
        if n < 2:
            raise ValueError("need at least 2 samples for a standard error")
        mean = float(np.mean(samples))
        std_error = float(np.std(samples, ddof=1) / math.sqrt(n))
        return cls(mean, std_error, n, z, mean - z * std_error, mean + z * std_error)

    def covers(self, x: float) -> bool:
        return self.ci_low <= x <= self.ci_high


def ci_overlap(a: EstimateCI, b: EstimateCI) -> bool:
    return a.ci_low <= b.ci_high and b.ci_low <= a.ci_high


def sign_pass(est: EstimateCI, slack: float = SIGN_SLACK) -> bool:
    """One-sided check that the estimated mean is <= 0 up to noise."""
    return est.mean <= slack * est.std_error


def agreement_pass(est: EstimateCI, target: float, sigmas: float = AGREEMENT_SIGMAS) -> bool:
    """Two-sided check that an estimate is within a few sigma of a known value."""
    return abs(est.mean - target) <= sigmas * max(est.std_error, 1e-300)


@dataclass(frozen=True)
class IdentityTerm:
    """Estimates of E[M(0, n)] and E[M(-n, 0)] for one n."""

    n: int
    lhs: EstimateCI
    rhs: EstimateCI

    @property
    def passed(self) -> bool:
        return ci_overlap(self.lhs, self.rhs)


@dataclass(frozen=True)
class IdentityReport:
    horizon: int
    trials: int
    seed: int
    z: float
    terms: tuple[IdentityTerm, ...]

    @property
    def all_passed(self) -> bool:
        return all(t.passed for t in self.terms)


def _chunk_arrays(total: int, width: int) -> list[np.ndarray]:
    size = max(1, min(CHUNK_TRIALS, _CHUNK_BYTES // (8 * max(1, width))))
    return [
        np.arange(s, min(s + size, total), dtype=np.uint64)
        for s in range(0, total, size)
    ]


def _run_chunks(total: int, threads: int, worker, width: int = 1):
    """Apply worker to each fixed chunk of trial indices, in order."""
    chunks = _chunk_arrays(total, width)
    if threads <= 1 or len(chunks) <= 1:
        return [worker(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=min(threads, len(chunks))) as pool:
        return list(pool.map(worker, chunks))


def _anchored_float_sums(block: np.ndarray, anchor_end: bool) -> np.ndarray:
    """Partial sum matrix with a leading zero column; optionally re-anchor
    so the last column (the origin of a left window) is zero."""
    sums = np.concatenate(
        [np.zeros((block.shape[0], 1), dtype=np.float64), np.cumsum(block, axis=1)],
        axis=1,
    )
    if anchor_end:
        sums -= sums[:, -1:]
    return sums


def mc_identity(
    process: Process,
    horizon: int,
    trials: int,
    seed: int,
    *,
    z: float = Z_DEFAULT,
    threads: int = 1,
) -> IdentityReport:
    """Estimate both sides of E[M(0, n)] = E[M(-n, 0)] for n = 1..horizon.

    The left side uses windows [0, horizon] on trials 0..trials-1, the
    right side windows [-horizon, 0] on trials trials..2*trials-1, so the
    two estimates are independent and each n passes when the confidence
    intervals overlap.
    """
    if horizon < 1:
        raise InvalidSpec("horizon must be at least 1")
    if trials < 2:
        raise InvalidSpec("need at least 2 trials")

    def worker(chunk: np.ndarray):
        left = process.sample_block(seed, chunk, 0, horizon)
        lterms = sent_mass_terms(_anchored_float_sums(left, anchor_end=False))
        right = process.sample_block(seed, chunk + np.uint64(trials), -horizon, 0)
        rterms = received_mass_terms(_anchored_float_sums(right, anchor_end=True))
        return lterms, rterms

    parts = _run_chunks(trials, threads, worker, width=2 * horizon)
    lhs = np.concatenate([p[0] for p in parts], axis=0)
    rhs = np.concatenate([p[1] for p in parts], axis=0)
    terms = tuple(
        IdentityTerm(
            n,
            EstimateCI.from_samples(lhs[:, n - 1], z),
            EstimateCI.from_samples(rhs[:, n - 1], z),
        )
        for n in range(1, horizon + 1)
    )
    return IdentityReport(horizon, trials, seed, z, terms)


def exact_identity(
    process: Process, n: int, atom_cap: int = DEFAULT_ATOM_CAP
) -> tuple[Fraction, Fraction]:
    """Both sides of E[M(0, n)] = E[M(-n, 0)], exactly.

    The left side enumerates windows [0, n] and reads the sender-side
    mass row at the origin; the right side enumerates windows [-n, 0] and
    reads the ladder-epoch form of the received mass.  The two routes
    share no code past the window law, which is the point.
    """
    if n < 1:
        raise InvalidSpec("n must be at least 1")
    left = exact_window_distribution(process, 0, n, atom_cap)
    lhs = left.expectation(lambda w: mass_row(w, 0).get(n))
    right = exact_window_distribution(process, -n, 0, atom_cap)
    rhs = right.expectation(lambda w: mass_received_at_zero(w).get(-n, 0))
    return Fraction(lhs), Fraction(rhs)


def exact_maximal_ergodic(
    process: Process, n_max: int, atom_cap: int = DEFAULT_ATOM_CAP
) -> Fraction:
    """E[X_1; some S_n <= 0 with n <= n_max], exactly.

    The inequality value <= 0 holds for every stationary sequence at
    every n_max separately, so each finite check is a complete instance
    of the statement, not an approximation of a limit.  The quantity is
    non-decreasing in n_max: a path whose first visit to (-inf, 0]
    happens at n_max + 1 must have started upward, so extending the
    horizon only ever adds positive X_1 contributions.
    """
    if n_max < 1:
        raise InvalidSpec("n_max must be at least 1")
    dist = exact_window_distribution(process, 0, n_max, atom_cap)
    acc = Fraction(0)
    for window, p in dist.atoms:
        if any(window.s(k) <= 0 for k in range(1, n_max + 1)):
            acc += p * window.x(1)
    return acc


def mc_maximal_ergodic(
    process: Process,
    n_max: int,
    trials: int,
    seed: int,
    *,
    z: float = Z_DEFAULT,
    threads: int = 1,
) -> EstimateCI:
    """Estimate E[X_1; some S_n <= 0 with n <= n_max]."""
    if n_max < 1:
        raise InvalidSpec("n_max must be at least 1")

    def worker(chunk: np.ndarray):
        block = process.sample_block(seed, chunk, 0, n_max)
        dipped = np.cumsum(block, axis=1).min(axis=1) <= 0.0
        return block[:, 0] * dipped

    parts = _run_chunks(trials, threads, worker, width=n_max)
    return EstimateCI.from_samples(np.concatenate(parts), z)


def exact_survival(process: Process, n_max: int, atom_cap: int = DEFAULT_ATOM_CAP) -> Fraction:
    """P(S_n > 0 for all n <= n_max), exactly."""
    if n_max < 1:
        raise InvalidSpec("n_max must be at least 1")
    dist = exact_window_distribution(process, 0, n_max, atom_cap)
    acc = Fraction(0)
    for window, p in dist.atoms:
        if all(window.s(k) > 0 for k in range(1, n_max + 1)):
            acc += p
    return acc


def mc_survival(
    process: Process,
    n_max: int,
    trials: int,
    seed: int,
    *,
    z: float = Z_DEFAULT,
    threads: int = 1,
) -> EstimateCI:
    """Estimate P(S_n > 0 for all n <= n_max)."""
    if n_max < 1:
        raise InvalidSpec("n_max must be at least 1")

    def worker(chunk: np.ndarray):
        block = process.sample_block(seed, chunk, 0, n_max)
        return (np.cumsum(block, axis=1).min(axis=1) > 0.0).astype(np.float64)

    parts = _run_chunks(trials, threads, worker, width=n_max)
    return EstimateCI.from_samples(np.concatenate(parts), z)


# ---------------------------------------------------------------------------
# how much of the survival probability a finite horizon can miss


def _tilted_decay(matrix: np.ndarray, payoffs: np.ndarray, start: np.ndarray):
    """Geometric bound P(S_n <= 0) <= C * rho^n for a payoff chain.

    Chernoff: P(S_n <= 0) <= E[exp(-lam S_n)] for lam >= 0, and the
    moment term is start' B^(n-1) 1 with B = matrix * exp(-lam payoffs)
    columnwise.  The spectral radius of B is log-convex in lam, so a
    ternary search finds the minimizer; the Perron eigenvector turns the
    matrix power into C * rho^n.
    """

    def tilted(lam: float) -> np.ndarray:
        return matrix * np.exp(-lam * payoffs)[None, :]

    def radius(lam: float) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(tilted(lam)))))

    hi = 1.0
    for _ in range(200):
        if radius(hi) >= 1.0:
            break
        hi *= 2.0
    else:
        return None
    lo = 0.0
    for _ in range(200):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if radius(m1) <= radius(m2):
            hi = m2
        else:
            lo = m1
    lam = (lo + hi) / 2.0
    b = tilted(lam)
    rho = radius(lam)
    if not (0.0 < rho < 1.0):
        return None
    eigvals, eigvecs = np.linalg.eig(b)
    u = np.abs(eigvecs[:, int(np.argmax(np.abs(eigvals)))])
    if u.min() <= 1e-12 * u.max():
        return None
    c = float(start @ np.exp(-lam * payoffs)) * float(u.max() / u.min()) / rho
    return rho, c


def _ruin_decay(process: Process):
    """(rho, c) with P(S_n <= 0) <= c * rho^n, or None when unavailable."""
    if isinstance(process, IidDiscreteProcess):
        if process.mean() <= 0:
            return None
        values = np.array([float(v) for v in process.spec.values])
        if values.min() >= 0.0:
            return 0.0, 0.0
        probs = np.array([float(p) for p in process.spec.probs])
        return _tilted_decay(np.tile(probs, (len(probs), 1)), values, probs)
    if isinstance(process, GaussianProcess):
        mu, sd = process.spec.mean, process.spec.stddev
        if mu <= 0:
            return None
        return math.exp(-mu * mu / (2.0 * sd * sd)), 1.0
    if isinstance(process, MarkovProcess):
        if process.mean() <= 0:
            return None
        payoffs = np.array([float(v) for v in process.spec.payoffs])
        if payoffs.min() >= 0.0:
            return 0.0, 0.0
        matrix = np.array([[float(p) for p in row] for row in process.spec.transitions])
        start = np.array([float(p) for p in process.pi])
        return _tilted_decay(matrix, payoffs, start)
    if isinstance(process, MixtureProcess):
        rho, c = 0.0, 0.0
        for w, child in zip(process.weights, process.children):
            decay = _ruin_decay(child)
            if decay is None:
                return None
            rho = max(rho, decay[0])
            c += float(w) * decay[1]
        return rho, c
    return None


def survival_truncation_bound(process: Process, n_max: int) -> float | None:
    """Upper bound on P(ruin strictly after n_max), the truncation bias.

    The horizon-n_max survival probability overstates true survival by
    exactly P(first nonpositive sum occurs beyond n_max), which union
    bounds by sum of P(S_n <= 0) over n > n_max.  Available for positive
    mean iid, Gaussian and Markov processes and mixtures of those; None
    when no geometric tail bound is known for the kind.
    """
    decay = _ruin_decay(process)
    if decay is None:
        return None
    rho, c = decay
    if rho <= 0.0:
        return 0.0
    if rho >= 1.0:
        return None
    return float(min(1.0, c * rho ** (n_max + 1) / (1.0 - rho)))
