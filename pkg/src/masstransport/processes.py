"""Stationary increment processes: descriptions, sampling, enumeration.

A process produces a two-sided stationary sequence of increments
X_k (k in Z) with partial sums anchored at S_0 = 0.  Six kinds are
supported:

* ``IidDiscrete``     independent draws from a finite table
* ``IidGaussian``     independent normal draws
* ``MarkovChain``     payoff of a finite-state chain started stationary
* ``MovingAverage``   finite linear filter over iid innovations
* ``Rotation``        step-function payoff read along an irrational
                      rotation of the circle with a uniform phase
* ``Mixture``         draw one component per trajectory, then follow it

Probabilities, weights and transition entries are exact rationals
(``fractions.Fraction``).  Payoff values may be floats or rationals; a
process whose distribution has finite support and whose values are all
rationals supports exact enumeration alongside Monte Carlo sampling.

Sampling is counter based (see :mod:`masstransport.rng`): the block of
increments for a trial is a pure function of (seed, trial) and of the
stream ids assigned to the nodes of the description, so windows of any
shape cut from the same trial agree wherever they overlap.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

import numpy as np
from scipy.special import ndtri

from . import rng
from .errors import (
    ExplosionCap,
    InvalidSpec,
    NoStationaryDistribution,
    UnsupportedProcess,
)

Real = Union[float, Fraction]

# default ceiling on the number of paths an exact enumeration may touch
DEFAULT_ATOM_CAP = 1 << 20

# default rotation angle: fractional part of the golden ratio
GOLDEN_ANGLE = (math.sqrt(5.0) - 1.0) / 2.0


def _coerce_real(v) -> Real:
    """Normalize payoff-like values: ints become exact, floats stay floats."""
    if isinstance(v, bool):
        raise InvalidSpec("boolean is not a valid numeric value")
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    raise InvalidSpec(f"expected a number, got {type(v).__name__}")


def _coerce_reals(vs) -> tuple[Real, ...]:
    return tuple(_coerce_real(v) for v in vs)


# ---------------------------------------------------------------------------
# process descriptions


@dataclass(frozen=True)
class IidDiscrete:
    """Independent draws from a finite value table."""

    values: tuple[Real, ...]
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _coerce_reals(self.values))
        object.__setattr__(self, "probs", tuple(self.probs))


@dataclass(frozen=True)
class IidGaussian:
    """Independent normal draws with the given mean and standard deviation."""

    mean: float
    stddev: float


@dataclass(frozen=True)
class MarkovChain:
    """Payoff sequence X_k = payoffs[state_k] of a stationary finite chain."""

    transitions: tuple[tuple[Fraction, ...], ...]
    payoffs: tuple[Real, ...]

    def __post_init__(self):
        object.__setattr__(self, "transitions", tuple(tuple(row) for row in self.transitions))
        object.__setattr__(self, "payoffs", _coerce_reals(self.payoffs))


@dataclass(frozen=True)
class MovingAverage:
    """X_k = sum_i coefficients[i] * Z_{k-i} over iid innovations Z."""

    coefficients: tuple[Real, ...]
    innovation: Union[IidDiscrete, IidGaussian]

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _coerce_reals(self.coefficients))


@dataclass(frozen=True)
class Rotation:
    """X_k = step(phase + k * angle mod 1) with a uniform random phase.

    ``pieces`` lists (breakpoint, value) pairs with strictly increasing
    breakpoints in [0, 1); the value applies from its breakpoint up to the
    next one, and the last piece wraps around through 0 back to the first
    breakpoint.  ``angle`` should be irrational for ergodicity; that
    cannot be represented, let alone checked, in floating point, so the
    default is a float close to the golden rotation and the sequence is
    periodic with an astronomically long period.
    """

    pieces: tuple[tuple[float, Real], ...]
    angle: float = GOLDEN_ANGLE

    def __post_init__(self):
        object.__setattr__(
            self,
            "pieces",
            tuple((float(b), _coerce_real(v)) for b, v in self.pieces),
        )


@dataclass(frozen=True)
class Mixture:
    """Pick one component per trajectory with the given weights."""

    components: tuple[tuple[Fraction, "ProcessSpec"], ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple((w, s) for w, s in self.components))


ProcessSpec = Union[IidDiscrete, IidGaussian, MarkovChain, MovingAverage, Rotation, Mixture]


# ---------------------------------------------------------------------------
# path windows and exact distributions


def _anchored_sums(lo: int, values: Sequence[Real]) -> tuple[Real, ...]:
    """Partial sums S_lo..S_hi of the increments X_{lo+1}..X_hi with S_0 = 0."""
    acc = 0
    partial = [acc]
    for v in values:
        acc = acc + v
        partial.append(acc)
    shift = partial[-lo]
    return tuple(p - shift for p in partial)


@dataclass(frozen=True)
class PathWindow:
    """A finite stretch of one trajectory, increments and anchored sums.

    ``values[j]`` is the increment X_{lo+1+j}; ``sums[k - lo]`` is the
    partial sum S_k, normalized so that S_0 = 0.  The window must contain
    the origin and at least one increment.
    """

    lo: int
    hi: int
    values: tuple[Real, ...]
    sums: tuple[Real, ...]

    def __post_init__(self):
        if not (self.lo <= 0 <= self.hi):
            raise InvalidSpec(f"window [{self.lo}, {self.hi}] must contain 0")
        if self.hi - self.lo < 1:
            raise InvalidSpec("window must contain at least one increment")
        if len(self.values) != self.hi - self.lo:
            raise InvalidSpec("values length does not match window size")
        if len(self.sums) != self.hi - self.lo + 1:
            raise InvalidSpec("sums length does not match window size")
        if self.sums != _anchored_sums(self.lo, self.values):
            raise InvalidSpec("sums are not the anchored partial sums of values")

    @classmethod
    def from_values(cls, lo: int, values: Sequence[Real]) -> "PathWindow":
        vals = tuple(float(v) if isinstance(v, np.floating) else v for v in values)
        return cls(lo, lo + len(vals), vals, _anchored_sums(lo, vals))

    def x(self, k: int) -> Real:
        """Increment X_k for lo < k <= hi."""
        if not (self.lo < k <= self.hi):
            raise IndexError(f"increment index {k} outside ({self.lo}, {self.hi}]")
        return self.values[k - self.lo - 1]

    def s(self, k: int) -> Real:
        """Partial sum S_k for lo <= k <= hi."""
        if not (self.lo <= k <= self.hi):
            raise IndexError(f"sum index {k} outside [{self.lo}, {self.hi}]")
        return self.sums[k - self.lo]


@dataclass(frozen=True)
class ExactDistribution:
    """Finite law of a path window: atoms (window, probability), summing to 1."""

    lo: int
    hi: int
    atoms: tuple[tuple[PathWindow, Fraction], ...]

    def expectation(self, fn) -> Real:
        """Expectation of fn(window); exact when fn returns rationals."""
        acc = 0
        for window, p in self.atoms:
            acc = acc + p * fn(window)
        return acc

    def probability(self, predicate) -> Fraction:
        acc = Fraction(0)
        for window, p in self.atoms:
            if predicate(window):
                acc += p
        return acc

    def block_law(self, k: int, length: int) -> dict[tuple, Fraction]:
        """Marginal law of the increments (X_{k+1}, .., X_{k+length})."""
        if not (self.lo <= k and k + length <= self.hi and length >= 1):
            raise InvalidSpec(
                f"block ({k}, {k + length}] not contained in ({self.lo}, {self.hi}]"
            )
        law: dict[tuple, Fraction] = {}
        for window, p in self.atoms:
            block = window.values[k - self.lo : k - self.lo + length]
            law[block] = law.get(block, Fraction(0)) + p
        return law


# ---------------------------------------------------------------------------
# runtime processes


@dataclass(frozen=True)
class ComponentInfo:
    """One ergodic component of a process with its mixture weight."""

    index: int
    weight: Fraction
    process: "Process"


class Process:
    """Runtime form of a ProcessSpec: sampling, enumeration, moments."""

    spec: ProcessSpec
    stream: int
    finite_support: bool
    exact: bool

    def mean(self) -> float:
        raise NotImplementedError

    def exact_mean(self) -> Fraction | None:
        return None

    def components(self) -> tuple[ComponentInfo, ...]:
        return (ComponentInfo(0, Fraction(1), self),)

    def n_components(self) -> int:
        return len(self.components())

    def sample_block(self, seed: int, trials: np.ndarray, lo: int, hi: int) -> np.ndarray:
        """Increments X_{lo+1}..X_hi for each trial, shape (T, hi-lo)."""
        raise NotImplementedError

    def component_ids(self, seed: int, trials: np.ndarray) -> np.ndarray:
        """Which ergodic component each trial follows, shape (T,)."""
        return np.zeros(len(trials), dtype=np.int64)

    def enum_paths(self, lo: int, hi: int) -> Iterator[tuple[tuple[Real, ...], Fraction]]:
        """All (values, probability) atoms of the window law."""
        raise UnsupportedProcess(f"{type(self.spec).__name__} has no finite enumeration")

    def atom_bound(self, lo: int, hi: int) -> int | None:
        """Upper bound on the number of enumeration atoms, None if infinite."""
        return None


def _check_prob(x, where: str) -> Fraction:
    """Probabilities become exact Fractions.  Floats convert by their exact
    binary value, so 0.5 is fine while 0.7 + 0.4 will fail the sum check."""
    if isinstance(x, bool) or not isinstance(x, (int, float, Fraction)):
        raise InvalidSpec(
            f"probabilities must be rationals, not {type(x).__name__}", where
        )
    x = Fraction(x)
    if not (0 <= x <= 1):
        raise InvalidSpec(f"probability {x} outside [0, 1]", where)
    return x


def _inverse_cdf(cum: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Index of the first cumulative weight >= u; cum[-1] must be 1.0."""
    return np.searchsorted(cum, u, side="left")


class IidDiscreteProcess(Process):
    finite_support = True

    def __init__(self, spec: IidDiscrete, stream: int):
        if len(spec.values) == 0:
            raise InvalidSpec("value table is empty", "values")
        if len(spec.values) != len(spec.probs):
            raise InvalidSpec("values and probs have different lengths", "probs")
        probs = tuple(_check_prob(p, "probs") for p in spec.probs)
        if sum(probs) != 1:
            raise InvalidSpec(f"probabilities sum to {sum(probs)}, not 1", "probs")
        self.spec = IidDiscrete(spec.values, probs)
        self.stream = stream
        self.exact = all(isinstance(v, Fraction) for v in self.spec.values)
        self._values_f = np.array([float(v) for v in self.spec.values], dtype=np.float64)
        cum = np.cumsum(np.array([float(p) for p in probs], dtype=np.float64))
        cum[-1] = 1.0
        self._cum = cum

    def mean(self) -> float:
        return float(sum(float(v) * float(p) for v, p in zip(self.spec.values, self.spec.probs)))

    def exact_mean(self) -> Fraction | None:
        if not self.exact:
            return None
        return sum((v * p for v, p in zip(self.spec.values, self.spec.probs)), Fraction(0))

    def draw_values(self, seed: int, trials: np.ndarray, lo: int, hi: int) -> np.ndarray:
        if len(self._values_f) == 1:
            return np.full((len(trials), hi - lo), self._values_f[0])
        u = rng.uniform_block(seed, self.stream, trials, rng.index_positions(lo + 1, hi))
        return self._values_f[_inverse_cdf(self._cum, u)]

    def sample_block(self, seed, trials, lo, hi):
        return self.draw_values(seed, trials, lo, hi)

    def enum_paths(self, lo, hi):
        pairs = [(v, p) for v, p in zip(self.spec.values, self.spec.probs) if p > 0]
        for combo in itertools.product(pairs, repeat=hi - lo):
            p = Fraction(1)
            for _, q in combo:
                p *= q
            yield tuple(v for v, _ in combo), p

    def atom_bound(self, lo, hi):
        return len(self.spec.values) ** (hi - lo)


class GaussianProcess(Process):
    finite_support = False
    exact = False

    def __init__(self, spec: IidGaussian, stream: int):
        if not math.isfinite(spec.mean):
            raise InvalidSpec("mean must be finite", "mean")
        if not (math.isfinite(spec.stddev) and spec.stddev > 0):
            raise InvalidSpec("stddev must be finite and positive", "stddev")
        self.spec = IidGaussian(float(spec.mean), float(spec.stddev))
        self.stream = stream

    def mean(self) -> float:
        return self.spec.mean

    def draw_values(self, seed, trials, lo, hi):
        u = rng.uniform_block(seed, self.stream, trials, rng.index_positions(lo + 1, hi))
        return self.spec.mean + self.spec.stddev * ndtri(u)

    def sample_block(self, seed, trials, lo, hi):
        return self.draw_values(seed, trials, lo, hi)


class MarkovProcess(Process):
    finite_support = True

    def __init__(self, spec: MarkovChain, stream: int):
        n = len(spec.transitions)
        if n == 0:
            raise InvalidSpec("transition matrix is empty", "transitions")
        for i, row in enumerate(spec.transitions):
            if len(row) != n:
                raise InvalidSpec(f"row {i} has length {len(row)}, expected {n}", "transitions")
        if len(spec.payoffs) != n:
            raise InvalidSpec(f"expected {n} payoffs, got {len(spec.payoffs)}", "payoffs")
        rows = tuple(
            tuple(_check_prob(p, f"transitions[{i}]") for p in row)
            for i, row in enumerate(spec.transitions)
        )
        for i, row in enumerate(rows):
            if sum(row) != 1:
                raise InvalidSpec(f"row {i} sums to {sum(row)}, not 1", "transitions")
        self.spec = MarkovChain(rows, spec.payoffs)
        self.stream = stream
        self.pi = stationary_distribution(rows)
        if any(p == 0 for p in self.pi):
            raise NoStationaryDistribution(
                "stationary law puts zero weight on some state; drop transient states"
            )
        self.exact = all(isinstance(v, Fraction) for v in self.spec.payoffs)
        self._payoff_f = np.array([float(v) for v in self.spec.payoffs], dtype=np.float64)
        pc = np.cumsum(np.array([float(p) for p in self.pi], dtype=np.float64))
        pc[-1] = 1.0
        self._pi_cum = pc
        rc = np.cumsum(np.array([[float(p) for p in row] for row in rows], dtype=np.float64), axis=1)
        rc[:, -1] = 1.0
        self._row_cum = rc

    def mean(self) -> float:
        return float(sum(float(p) * float(v) for p, v in zip(self.pi, self.spec.payoffs)))

    def exact_mean(self) -> Fraction | None:
        if not self.exact:
            return None
        return sum((p * v for p, v in zip(self.pi, self.spec.payoffs)), Fraction(0))

    def sample_block(self, seed, trials, lo, hi):
        # one uniform per index: the draw at lo+1 picks the initial state
        # from the stationary law, later draws step the chain
        u = rng.uniform_block(seed, self.stream, trials, rng.index_positions(lo + 1, hi))
        length = hi - lo
        state = _inverse_cdf(self._pi_cum, u[:, 0])
        if len(self._payoff_f) == 2:
            return self._two_state_block(state, u)
        out = np.empty((len(trials), length), dtype=np.float64)
        out[:, 0] = self._payoff_f[state]
        for j in range(1, length):
            rows = self._row_cum[state]
            state = np.sum(rows < u[:, j, None], axis=1)
            out[:, j] = self._payoff_f[state]
        return out

    def _two_state_block(self, first, u):
        # With two states the step from s reduces to the single comparison
        # row_cum[s, 0] < u (the last cumulative entry is exactly 1 and
        # u < 1), so each column acts on the state as one of four maps:
        # set 0, set 1, keep, or swap.  The state at column j is then the
        # value written by the latest "set" column, swapped once per
        # "swap" column after it, which vectorizes over whole rows.
        a = self._row_cum[0, 0] < u
        b = self._row_cum[1, 0] < u
        a[:, 0] = first.astype(bool)
        b[:, 0] = a[:, 0]
        sets = a == b
        swaps = np.cumsum(a & ~b, axis=1, dtype=np.int32)
        cols = np.arange(u.shape[1], dtype=np.int32)
        last = np.maximum.accumulate(np.where(sets, cols, np.int32(0)), axis=1)
        value = np.take_along_axis(a, last, axis=1)
        parity = (swaps - np.take_along_axis(swaps, last, axis=1)) & 1
        return np.where(value ^ parity.astype(bool), self._payoff_f[1], self._payoff_f[0])

    def enum_paths(self, lo, hi):
        length = hi - lo
        payoffs = self.spec.payoffs
        rows = self.spec.transitions
        stack = [((), s, p) for s, p in enumerate(self.pi) if p > 0]
        for prefix, state, prob in stack:
            # depth-first expansion without recursion
            pending = [(prefix + (payoffs[state],), state, prob)]
            while pending:
                values, s, p = pending.pop()
                if len(values) == length:
                    yield values, p
                    continue
                for t, q in enumerate(rows[s]):
                    if q > 0:
                        pending.append((values + (payoffs[t],), t, p * q))

    def atom_bound(self, lo, hi):
        return len(self.spec.payoffs) ** (hi - lo)


class MovingAverageProcess(Process):
    finite_support: bool

    def __init__(self, spec: MovingAverage, stream: int, inner: Process):
        if len(spec.coefficients) == 0:
            raise InvalidSpec("coefficient list is empty", "coefficients")
        self.spec = MovingAverage(spec.coefficients, inner.spec)
        self.stream = stream
        self.inner = inner
        self.order = len(spec.coefficients) - 1
        self.finite_support = inner.finite_support
        self.exact = inner.exact and all(isinstance(c, Fraction) for c in spec.coefficients)
        self._coef_f = [float(c) for c in spec.coefficients]

    def mean(self) -> float:
        return self.inner.mean() * float(sum(self._coef_f))

    def exact_mean(self) -> Fraction | None:
        im = self.inner.exact_mean()
        if im is None or not self.exact:
            return None
        return im * sum(self.spec.coefficients, Fraction(0))

    def sample_block(self, seed, trials, lo, hi):
        q = self.order
        z = self.inner.draw_values(seed, trials, lo - q, hi)
        length = hi - lo
        out = self._coef_f[0] * z[:, q : q + length]
        for i in range(1, q + 1):
            out += self._coef_f[i] * z[:, q - i : q - i + length]
        return out

    def enum_paths(self, lo, hi):
        q = self.order
        coefs = self.spec.coefficients
        length = hi - lo
        for innov, p in self.inner.enum_paths(lo - q, hi):
            values = tuple(
                sum((coefs[i] * innov[q - i + j] for i in range(q + 1)), 0)
                for j in range(length)
            )
            yield values, p

    def atom_bound(self, lo, hi):
        return self.inner.atom_bound(lo - self.order, hi)


class RotationProcess(Process):
    finite_support = False
    exact = False

    def __init__(self, spec: Rotation, stream: int):
        if len(spec.pieces) == 0:
            raise InvalidSpec("piece list is empty", "pieces")
        breaks = [b for b, _ in spec.pieces]
        if any(not (0.0 <= b < 1.0) for b in breaks):
            raise InvalidSpec("breakpoints must lie in [0, 1)", "pieces")
        if any(b2 <= b1 for b1, b2 in zip(breaks, breaks[1:])):
            raise InvalidSpec("breakpoints must be strictly increasing", "pieces")
        if not (0.0 < spec.angle < 1.0) or not math.isfinite(spec.angle):
            raise InvalidSpec("angle must lie in (0, 1)", "angle")
        self.spec = Rotation(spec.pieces, float(spec.angle))
        self.stream = stream
        self._breaks = np.array(breaks, dtype=np.float64)
        self._values_f = np.array([float(v) for _, v in spec.pieces], dtype=np.float64)

    def mean(self) -> float:
        # arc length of each piece on the circle; the last wraps through 0
        b = self._breaks
        v = self._values_f
        if len(b) == 1:
            return float(v[0])
        arcs = np.empty_like(b)
        arcs[:-1] = b[1:] - b[:-1]
        arcs[-1] = 1.0 - b[-1] + b[0]
        return float(arcs @ v)

    def sample_block(self, seed, trials, lo, hi):
        phase = rng.uniform_column(seed, self.stream, trials, 0)
        ks = np.arange(lo + 1, hi + 1, dtype=np.int64).astype(np.float64)
        offsets = np.mod(ks * self.spec.angle, 1.0)
        t = np.mod(phase[:, None] + offsets[None, :], 1.0)
        idx = np.searchsorted(self._breaks, t, side="right") - 1
        idx[idx < 0] = len(self._breaks) - 1
        return self._values_f[idx]


class MixtureProcess(Process):
    def __init__(self, spec: Mixture, stream: int, children: tuple[Process, ...]):
        weights = tuple(_check_prob(w, "components") for w, _ in spec.components)
        if len(weights) == 0:
            raise InvalidSpec("component list is empty", "components")
        if sum(weights) != 1:
            raise InvalidSpec(f"weights sum to {sum(weights)}, not 1", "components")
        self.spec = Mixture(tuple((w, c.spec) for w, c in zip(weights, children)))
        self.stream = stream
        self.children = children
        self.weights = weights
        self.finite_support = all(c.finite_support for c in children)
        self.exact = all(c.exact for c in children)
        wc = np.cumsum(np.array([float(w) for w in weights], dtype=np.float64))
        wc[-1] = 1.0
        self._w_cum = wc
        offsets = []
        total = 0
        for c in children:
            offsets.append(total)
            total += c.n_components()
        self._offsets = offsets
        self._leafs = total

    def mean(self) -> float:
        return float(sum(float(w) * c.mean() for w, c in zip(self.weights, self.children)))

    def exact_mean(self) -> Fraction | None:
        acc = Fraction(0)
        for w, c in zip(self.weights, self.children):
            m = c.exact_mean()
            if m is None:
                return None
            acc += w * m
        return acc

    def components(self) -> tuple[ComponentInfo, ...]:
        out = []
        for w, c in zip(self.weights, self.children):
            for info in c.components():
                out.append(ComponentInfo(len(out), w * info.weight, info.process))
        return tuple(out)

    def _picks(self, seed, trials):
        u = rng.uniform_column(seed, self.stream, trials, 0)
        return _inverse_cdf(self._w_cum, u)

    def sample_block(self, seed, trials, lo, hi):
        picks = self._picks(seed, trials)
        out = np.empty((len(trials), hi - lo), dtype=np.float64)
        for c, child in enumerate(self.children):
            rows = np.nonzero(picks == c)[0]
            if len(rows):
                out[rows] = child.sample_block(seed, trials[rows], lo, hi)
        return out

    def component_ids(self, seed, trials):
        picks = self._picks(seed, trials)
        out = np.empty(len(trials), dtype=np.int64)
        for c, child in enumerate(self.children):
            rows = np.nonzero(picks == c)[0]
            if len(rows):
                out[rows] = self._offsets[c] + child.component_ids(seed, trials[rows])
        return out

    def enum_paths(self, lo, hi):
        for w, child in zip(self.weights, self.children):
            if w == 0:
                continue
            for values, p in child.enum_paths(lo, hi):
                yield values, w * p

    def atom_bound(self, lo, hi):
        total = 0
        for child in self.children:
            b = child.atom_bound(lo, hi)
            if b is None:
                return None
            total += b
        return total


# ---------------------------------------------------------------------------
# building and operating on processes


def _build(spec: ProcessSpec, counter: list[int]) -> Process:
    stream = counter[0]
    counter[0] += 1
    if isinstance(spec, IidDiscrete):
        return IidDiscreteProcess(spec, stream)
    if isinstance(spec, IidGaussian):
        return GaussianProcess(spec, stream)
    if isinstance(spec, MarkovChain):
        return MarkovProcess(spec, stream)
    if isinstance(spec, MovingAverage):
        if not isinstance(spec.innovation, (IidDiscrete, IidGaussian)):
            raise InvalidSpec("innovation must be an iid kind", "innovation")
        inner = _build(spec.innovation, counter)
        return MovingAverageProcess(spec, stream, inner)
    if isinstance(spec, Rotation):
        return RotationProcess(spec, stream)
    if isinstance(spec, Mixture):
        children = tuple(_build(s, counter) for _, s in spec.components)
        return MixtureProcess(spec, stream, children)
    raise InvalidSpec(f"unknown process kind {type(spec).__name__}")


def make_process(spec: ProcessSpec) -> Process:
    """Validate a description and return a runtime process.

    Stream ids are assigned to the nodes of the description in preorder,
    so the same description always samples identically under a seed.
    """
    return _build(spec, [0])


def sample_window(process: Process, lo: int, hi: int, seed: int, trial: int = 0) -> PathWindow:
    """One simulated window; pure in (process, lo, hi, seed, trial)."""
    _check_window(lo, hi)
    block = process.sample_block(seed, np.array([trial], dtype=np.uint64), lo, hi)
    return PathWindow.from_values(lo, [float(v) for v in block[0]])


def exact_window_distribution(
    process: Process, lo: int, hi: int, atom_cap: int = DEFAULT_ATOM_CAP
) -> ExactDistribution:
    """Full window law of a finite-support exact process, as rational atoms."""
    _check_window(lo, hi)
    if not process.finite_support:
        raise UnsupportedProcess(
            f"{type(process.spec).__name__} does not have finite support"
        )
    if not process.exact:
        raise UnsupportedProcess(
            "exact enumeration needs rational values; this process carries floats"
        )
    bound = process.atom_bound(lo, hi)
    if bound is None or bound > atom_cap:
        raise ExplosionCap(
            f"enumeration needs up to {bound} atoms, cap is {atom_cap}",
            atoms=bound,
            cap=atom_cap,
        )
    atoms = []
    total = Fraction(0)
    for values, p in process.enum_paths(lo, hi):
        if p == 0:
            continue
        atoms.append((PathWindow.from_values(lo, values), p))
        total += p
    if total != 1:
        raise InvalidSpec(f"enumerated probabilities sum to {total}, not 1")
    return ExactDistribution(lo, hi, tuple(atoms))


def _check_window(lo: int, hi: int) -> None:
    if not (lo <= 0 <= hi):
        raise InvalidSpec(f"window [{lo}, {hi}] must contain 0")
    if hi - lo < 1:
        raise InvalidSpec("window must contain at least one increment")


# ---------------------------------------------------------------------------
# exact stationary law of a finite chain


def _rref(rows: list[list[Fraction]]) -> list[int]:
    """In-place reduced row echelon form; returns the pivot columns."""
    n_rows = len(rows)
    n_cols = len(rows[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return pivots


def stationary_distribution(
    transitions: Sequence[Sequence[Union[Fraction, int]]],
) -> tuple[Fraction, ...]:
    """Exact stationary law pi of a row-stochastic rational matrix.

    Solves pi P = pi, sum pi = 1 by rational elimination.  Raises
    NoStationaryDistribution when the fixed space is not one dimensional
    (reducible chains with several closed classes) or the fixed vector
    cannot be normalized to a probability vector.
    """
    n = len(transitions)
    if n == 0:
        raise InvalidSpec("transition matrix is empty", "transitions")
    rows = [tuple(_check_prob(p, f"transitions[{i}]") for p in row) for i, row in enumerate(transitions)]
    for i, row in enumerate(rows):
        if len(row) != n:
            raise InvalidSpec(f"row {i} has length {len(row)}, expected {n}", "transitions")
        if sum(row) != 1:
            raise InvalidSpec(f"row {i} sums to {sum(row)}, not 1", "transitions")
    # fixed vectors of P^T: solve (P^T - I) x = 0
    a = [[rows[j][i] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
    pivots = _rref(a)
    rank = len(pivots)
    if rank != n - 1:
        raise NoStationaryDistribution(
            f"fixed space has dimension {n - rank}, stationary law is not unique"
        )
    free = next(c for c in range(n) if c not in pivots)
    x = [Fraction(0)] * n
    x[free] = Fraction(1)
    for r, c in enumerate(pivots):
        x[c] = -a[r][free]
    total = sum(x)
    if total == 0:
        raise NoStationaryDistribution("fixed vector has zero total weight")
    pi = tuple(v / total for v in x)
    if any(p < 0 for p in pi):
        raise NoStationaryDistribution("fixed vector is not a probability vector")
    return pi


# ---------------------------------------------------------------------------
# sign flip


def negate_spec(spec: ProcessSpec) -> ProcessSpec:
    """Description of the process -X.

    For every kind except IidGaussian the flipped process is pathwise the
    negation under the same seed and trial: negating values does not touch
    the probabilities driving the draws, and IEEE negation is exact.  For
    IidGaussian only the law is flipped (mean sign), since the normal
    inverse CDF draw is not an odd function of its uniform.
    """
    if isinstance(spec, IidDiscrete):
        return IidDiscrete(tuple(-v for v in spec.values), spec.probs)
    if isinstance(spec, IidGaussian):
        return IidGaussian(-spec.mean, spec.stddev)
    if isinstance(spec, MarkovChain):
        return MarkovChain(spec.transitions, tuple(-v for v in spec.payoffs))
    if isinstance(spec, MovingAverage):
        return MovingAverage(spec.coefficients, negate_spec(spec.innovation))
    if isinstance(spec, Rotation):
        return Rotation(tuple((b, -v) for b, v in spec.pieces), spec.angle)
    if isinstance(spec, Mixture):
        return Mixture(tuple((w, negate_spec(s)) for w, s in spec.components))
    raise InvalidSpec(f"unknown process kind {type(spec).__name__}")
