"""Catalog of convergence scenarios for the estimation-stability lab.

A scenario is a sequence of pair laws (X_n, Y_n) together with a limit pair
(X, Y) and a declared expected outcome for the audited functional (MMSE by
default, LMMSE where registered).  The built-in catalog covers the
canonical stress cases:

* ``example1`` — mass 1/(2n) escaping to +-sqrt(n): every MMSE_n = 1 while
  the limit pair is deterministic (MMSE 0).  The sequence limit sits ABOVE
  the limit value; second moments do not converge and the squared sequence
  is not uniformly integrable.
* ``example2`` — a uniform prior recoverable from the fractional part of
  the measurement at every n, but independent of it in the limit: MMSE_n = 0
  vs limit variance 1/12.  Realized exactly on a floor-quantization grid of
  step 1/(64 n), fine enough to keep per-n recovery below 1e-3.
* ``example3`` — Rademacher prior and noise, X_n = n/(n+1) X observed
  through Y_n = X_n + N: the measurement reveals X_n exactly at every n
  (MMSE_n = 0) yet the limit pair has MMSE 1/2.
* ``example4`` — uniform prior, additive uniform noise shrinking as 1/n:
  genuinely continuous, MMSE_n -> 0 = limit MMSE.
* ``cor1_additive`` (+ two off-diagonal paths) — vanishing additive
  perturbations on both coordinates of the example3 limit pair; continuous
  with MMSE -> 1/2.
* ``cor2_quantization`` — vanishing floor quantization of both coordinates
  of the same pair; continuous with MMSE -> 1/2 (the supports sit on every
  1/n lattice, so each quantized value is exactly 1/2).
* ``markov_degraded_family`` — a fixed base pair garbled by a binary
  symmetric channel with flip probability 1/(10 n): degraded measurements
  converging back to the base; continuous.
* ``lmmse_mixture`` — the LMMSE stress case: Y_n equals X with probability
  1 - 1/n and an independent +-sqrt(n) spike otherwise.  Second moments
  converge but the limit measurement variance (here of Y = X) differs from
  the sequence's, and the LMMSE trajectory 1 - (1-1/n)^2/(2-1/n) stalls at
  1/2 while the limit LMMSE is 0.  (The MMSE itself is continuous here —
  the gap is a purely linear-estimation effect.)

Exact realizations are used everywhere: continuous laws enter as lattice
joints whose cell probabilities are interval overlaps computed in closed
form, so the downstream engine sees finite joints and no sampling noise.
Scenarios with continuous laws additionally carry a plain Monte Carlo
sampler so the regressogram path can cross-check the exact one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .degradedness import Channel, binary_symmetric_channel, compose
from .errors import InvalidDistribution
from .exact import mmse_exact
from .mc import RegressionConfig
from .probcore import (
    FiniteJoint,
    Sampler,
    joint_from_atoms,
    product_joint,
    quantize_joint,
    rng_stream,
)

SQRT3 = math.sqrt(3.0)


class OutcomeKind(enum.Enum):
    CONTINUOUS = "CONTINUOUS"
    DISCONTINUOUS_USC = "DISCONTINUOUS_USC"
    DISCONTINUOUS_LSC = "DISCONTINUOUS_LSC"


@dataclass(frozen=True)
class ExpectedOutcome:
    """Declared target of a scenario.

    ``limit_mmse`` is the audited value at the limit pair;
    ``sequence_limit_mmse`` is the limit of the per-n values.  CONTINUOUS
    requires the two to be equal; the DISCONTINUOUS kinds record which
    side the sequence limit falls on (LSC: above the limit value, USC:
    below).  ``source`` says how the numbers were derived.
    """

    kind: OutcomeKind
    limit_mmse: float
    sequence_limit_mmse: float
    source: str

    def __post_init__(self):
        equal = self.limit_mmse == self.sequence_limit_mmse
        if (self.kind is OutcomeKind.CONTINUOUS) != equal:
            raise InvalidDistribution(
                f"kind {self.kind.value} inconsistent with limit "
                f"{self.limit_mmse!r} vs sequence {self.sequence_limit_mmse!r}")
        if self.kind is OutcomeKind.DISCONTINUOUS_LSC \
                and self.sequence_limit_mmse < self.limit_mmse:
            raise InvalidDistribution("LSC kind needs sequence limit above limit value")
        if self.kind is OutcomeKind.DISCONTINUOUS_USC \
                and self.sequence_limit_mmse > self.limit_mmse:
            raise InvalidDistribution("USC kind needs sequence limit below limit value")


@dataclass(frozen=True)
class ScenarioSequence:
    """A named sequence of pair laws with a limit pair and expectations.

    ``realize(n, seed)`` produces the law of (X_n, Y_n) — a FiniteJoint for
    exact scenarios (the seed is then ignored).  ``markov_witness(n)``,
    when present, is a channel D_n with realize(n) = compose(limit, D_n),
    i.e. an explicit degradedness coupling of the sequence to its limit.
    ``mc_sampler(n)`` draws from the un-quantized continuous law for the
    Monte Carlo cross-path.  ``x_deviation_prob(n, eps)`` is the exact
    P(||X_n - X|| > eps) under the scenario's natural coupling.
    """

    name: str
    realize: Callable[[int, int], FiniteJoint | Sampler]
    limit: FiniteJoint | Sampler
    expected: ExpectedOutcome
    markov_witness: Callable[[int], Channel] | None = None
    audit: str = "mmse"
    mc_sampler: Callable[[int], Sampler] | None = None
    mc_config: Callable[[int, int], RegressionConfig] | None = None
    x_deviation_prob: Callable[[int, float], float] | None = None
    notes: str = ""

    def __post_init__(self):
        if self.audit not in ("mmse", "lmmse"):
            raise InvalidDistribution(f"unknown audit {self.audit!r}")


# ---------------------------------------------------------------------------
# lattice-cell machinery for exact quantized realizations
# ---------------------------------------------------------------------------

_EPS = np.finfo(float).eps


def _lattice_floor(value: float, step: float) -> int:
    """floor(value / step) with the same ulp snap as floor_quantize."""
    r = value / step
    nearest = round(r)
    if abs(r - nearest) <= 4.0 * _EPS * max(1.0, abs(r)):
        return int(nearest)
    return int(math.floor(r))


def uniform_lattice_cells(lo: float, hi: float, step: float) -> list[tuple[int, float]]:
    """Floor-lattice cells of a uniform(lo, hi) law.

    Returns (cell_index, probability) pairs with probability equal to the
    exact overlap of [index*step, (index+1)*step) with [lo, hi), normalized
    by hi - lo.  Zero-overlap cells are skipped.
    """
    if not hi > lo:
        raise InvalidDistribution("uniform interval must have positive length")
    total = hi - lo
    cells = []
    j = _lattice_floor(lo, step)
    while j * step < hi:
        left = max(lo, j * step)
        right = min(hi, (j + 1) * step)
        if right > left:
            cells.append((j, (right - left) / total))
        j += 1
    return cells


def _joint_from_cell_triples(triples, x_value, y_value) -> FiniteJoint:
    """Accumulate (x_key, y_key, prob) triples into a FiniteJoint.

    Keys are hashable cell identifiers; ``x_value``/``y_value`` map a key
    to its float support atom, evaluated once per key so equal cells merge
    bit-exactly.
    """
    mass: dict[tuple, float] = {}
    for xk, yk, p in triples:
        mass[(xk, yk)] = mass.get((xk, yk), 0.0) + p
    x_keys = sorted({k[0] for k in mass})
    y_keys = sorted({k[1] for k in mass})
    xi = {k: i for i, k in enumerate(x_keys)}
    yi = {k: j for j, k in enumerate(y_keys)}
    pmf = np.zeros((len(x_keys), len(y_keys)))
    for (xk, yk), p in mass.items():
        pmf[xi[xk], yi[yk]] += p
    pmf /= pmf.sum()
    return FiniteJoint(
        x_support=np.array([[x_value(k)] for k in x_keys]),
        y_support=np.array([[y_value(k)] for k in y_keys]),
        pmf=pmf,
    )


# ---------------------------------------------------------------------------
# example1: escaping mass, second moment does not follow
# ---------------------------------------------------------------------------

def _example1_realize(n: int, seed: int) -> FiniteJoint:
    root = math.sqrt(n)
    half = 1.0 / (2.0 * n)
    return FiniteJoint(
        x_support=np.array([[-root], [0.0], [root]]),
        y_support=np.array([[0.0]]),
        pmf=np.array([[half], [1.0 - 1.0 / n], [half]]),
    )


def example1_scenario() -> ScenarioSequence:
    limit = FiniteJoint(x_support=np.array([[0.0]]),
                        y_support=np.array([[0.0]]),
                        pmf=np.array([[1.0]]))
    expected = ExpectedOutcome(
        kind=OutcomeKind.DISCONTINUOUS_LSC,
        limit_mmse=0.0,
        sequence_limit_mmse=1.0,
        source="E[X_n^2] = n * (1/n) = 1 at every n with a blind measurement; "
               "the limit prior is the constant 0",
    )
    return ScenarioSequence(
        name="example1",
        realize=_example1_realize,
        limit=limit,
        expected=expected,
        x_deviation_prob=lambda n, eps: 1.0 / n if math.sqrt(n) > eps else 0.0,
        notes="X_n = +-sqrt(n) w.p. 1/(2n) each, else 0; Y_n = Y = 0. "
              "Mass escapes, E[X_n^2] stays 1, squared family not u.i.",
    )


# ---------------------------------------------------------------------------
# example2: perfect recovery from the fractional part, lost in the limit
# ---------------------------------------------------------------------------

EXAMPLE2_CELLS_PER_INDEX = 64
EXAMPLE2_LIMIT_STEP = 1.0 / 1024.0


def _example2_realize(n: int, seed: int) -> FiniteJoint:
    # X uniform on [0, 1) quantized at step h = 1/(64 n); the measurement
    # B + X/n quantized at the same step reveals exactly which of the 64
    # coarse cells X occupies, i.e. the x-cell index j up to j mod n.
    cells = EXAMPLE2_CELLS_PER_INDEX * n
    h = 1.0 / cells
    p_cell = 0.5 / cells
    triples = []
    for j in range(cells):
        q = j // n
        for b in (0, 1):
            triples.append((j, (b, q), p_cell))
    return _joint_from_cell_triples(
        triples,
        x_value=lambda j, h=h: j * h,
        y_value=lambda key, h=h: key[0] + key[1] * h,
    )


def _example2_limit() -> FiniteJoint:
    steps = int(round(1.0 / EXAMPLE2_LIMIT_STEP))
    values = np.arange(steps)[:, None] * EXAMPLE2_LIMIT_STEP
    return product_joint(values, np.full(steps, 1.0 / steps),
                         np.array([[0.0], [1.0]]), np.array([0.5, 0.5]))


def _example2_sampler(n: int) -> Sampler:
    def draw_batch(rng: np.random.Generator, size: int):
        x = rng.random(size)
        b = rng.integers(0, 2, size).astype(float)
        return x[:, None], (b + x / n)[:, None]

    def draw(rng: np.random.Generator):
        x, y = draw_batch(rng, 1)
        return x[0], y[0]

    return Sampler(draw=draw, draw_batch=draw_batch,
                   descriptor=f"X uniform[0,1), B fair bit, Y = B + X/{n}")


def example2_scenario() -> ScenarioSequence:
    limit = _example2_limit()
    limit_value = mmse_exact(limit).mmse  # quantized uniform variance
    expected = ExpectedOutcome(
        kind=OutcomeKind.DISCONTINUOUS_USC,
        limit_mmse=limit_value,
        sequence_limit_mmse=0.0,
        source="the fractional part of B + X/n determines X at every n; "
               "in the limit the bit B is independent of X, so the value is "
               "the (grid) variance of a uniform prior, 1/12 up to O(2^-20)",
    )

    def mc_config(n: int, seed: int) -> RegressionConfig:
        return RegressionConfig(
            n_samples=100_000,
            seed=seed,
            binning=lambda _count, n=n: EXAMPLE2_CELLS_PER_INDEX * (n + 1),
        )

    return ScenarioSequence(
        name="example2",
        realize=_example2_realize,
        limit=limit,
        expected=expected,
        mc_sampler=_example2_sampler,
        mc_config=mc_config,
        x_deviation_prob=lambda n, eps: 0.0,  # X_n = X in the coupling
        notes="grid step 1/(64 n) keeps per-n recovery error below 1e-3; "
              "the Monte Carlo path bins at the matching resolution",
    )


# ---------------------------------------------------------------------------
# example3: shrinking prior observed exactly, limit keeps residual noise
# ---------------------------------------------------------------------------

def _example3_realize(n: int, seed: int) -> FiniteJoint:
    c = n / (n + 1.0)
    return FiniteJoint(
        x_support=np.array([[-c], [c]]),
        y_support=np.array([[-c - 1.0], [1.0 - c], [c - 1.0], [c + 1.0]]),
        pmf=np.array([[0.25, 0.25, 0.0, 0.0],
                      [0.0, 0.0, 0.25, 0.25]]),
    )


def example3_limit_joint() -> FiniteJoint:
    """Rademacher prior X observed through Y = X + N, N Rademacher."""
    return FiniteJoint(
        x_support=np.array([[-1.0], [1.0]]),
        y_support=np.array([[-2.0], [0.0], [2.0]]),
        pmf=np.array([[0.25, 0.25, 0.0],
                      [0.0, 0.25, 0.25]]),
    )


def example3_scenario() -> ScenarioSequence:
    expected = ExpectedOutcome(
        kind=OutcomeKind.DISCONTINUOUS_USC,
        limit_mmse=0.5,
        sequence_limit_mmse=0.0,
        source="Y_n = X_n + N with X_n = n/(n+1) X determines X_n (the four "
               "measurement atoms are distinct), so MMSE_n = 0; the limit "
               "pair loses the sign at Y = 0 and pays E[X^2 | Y=0]/2 = 1/2",
    )
    return ScenarioSequence(
        name="example3",
        realize=_example3_realize,
        limit=example3_limit_joint(),
        expected=expected,
        x_deviation_prob=lambda n, eps: 1.0 if 1.0 / (n + 1.0) > eps else 0.0,
        notes="exact finite scenario; conditional mean of the limit is y/2",
    )


# ---------------------------------------------------------------------------
# example4: additive uniform noise shrinking as 1/n — continuous
# ---------------------------------------------------------------------------

EXAMPLE4_STEP = 2.0 * SQRT3 / 256.0


def _example4_realize(n: int, seed: int) -> FiniteJoint:
    h = EXAMPLE4_STEP
    x_cells = uniform_lattice_cells(-SQRT3, SQRT3, h)
    w_cells = uniform_lattice_cells(-SQRT3 / n, SQRT3 / n, h)
    triples = [(i, i + j, pi * pj)
               for i, pi in x_cells for j, pj in w_cells]
    return _joint_from_cell_triples(
        triples,
        x_value=lambda i, h=h: i * h,
        y_value=lambda s, h=h: s * h,
    )


def _example4_limit() -> FiniteJoint:
    h = EXAMPLE4_STEP
    cells = uniform_lattice_cells(-SQRT3, SQRT3, h)
    triples = [(i, i, p) for i, p in cells]
    return _joint_from_cell_triples(
        triples, x_value=lambda i: i * h, y_value=lambda i: i * h)


def _example4_sampler(n: int) -> Sampler:
    def draw_batch(rng: np.random.Generator, size: int):
        x = rng.uniform(-SQRT3, SQRT3, size)
        w = rng.uniform(-SQRT3, SQRT3, size) / n
        return x[:, None], (x + w)[:, None]

    def draw(rng: np.random.Generator):
        x, y = draw_batch(rng, 1)
        return x[0], y[0]

    return Sampler(draw=draw, draw_batch=draw_batch,
                   descriptor=f"X uniform[-sqrt3, sqrt3], Y = X + N/{n}")


def example4_scenario() -> ScenarioSequence:
    expected = ExpectedOutcome(
        kind=OutcomeKind.CONTINUOUS,
        limit_mmse=0.0,
        sequence_limit_mmse=0.0,
        source="unit-variance uniform prior plus independent uniform noise "
               "scaled by 1/n: the posterior interval shrinks as 1/n, so "
               "MMSE_n ~ 1/n^2 -> 0 and the limit measurement is exact",
    )

    def mc_config(n: int, seed: int) -> RegressionConfig:
        return RegressionConfig(n_samples=100_000, seed=seed)

    return ScenarioSequence(
        name="example4",
        realize=_example4_realize,
        limit=_example4_limit(),
        expected=expected,
        mc_sampler=_example4_sampler,
        mc_config=mc_config,
        x_deviation_prob=lambda n, eps: 0.0,  # X_n = X in the coupling
        notes=f"lattice step {EXAMPLE4_STEP:.6f} fixed across n; the exact "
              "path therefore floors at O(step^2) instead of reaching 0",
    )


# ---------------------------------------------------------------------------
# perturbed and quantized variants of the example3 limit pair
# ---------------------------------------------------------------------------

def _cor1_realize_factory(gamma_of_n, lambda_of_n):
    base = example3_limit_joint()

    def realize(n: int, seed: int) -> FiniteJoint:
        gamma = gamma_of_n(n)
        lam = lambda_of_n(n)
        h = min(gamma, lam) / 8.0
        triples = []
        for i_atom in range(base.x_support.shape[0]):
            for j_atom in range(base.y_support.shape[0]):
                p = base.pmf[i_atom, j_atom]
                if p == 0.0:
                    continue
                x0 = float(base.x_support[i_atom, 0])
                y0 = float(base.y_support[j_atom, 0])
                x_cells = uniform_lattice_cells(x0 - gamma / 2.0,
                                                x0 + gamma / 2.0, h)
                y_cells = uniform_lattice_cells(y0 - lam / 2.0,
                                                y0 + lam / 2.0, h)
                for i, pi in x_cells:
                    for j, pj in y_cells:
                        triples.append((i, j, p * pi * pj))
        return _joint_from_cell_triples(
            triples, x_value=lambda i, h=h: i * h, y_value=lambda j, h=h: j * h)

    return realize


def _cor1_sampler_factory(gamma_of_n, lambda_of_n):
    def make(n: int) -> Sampler:
        gamma = gamma_of_n(n)
        lam = lambda_of_n(n)

        def draw_batch(rng: np.random.Generator, size: int):
            x = rng.choice([-1.0, 1.0], size)
            nr = rng.choice([-1.0, 1.0], size)
            pert = (rng.random(size) - 0.5) * gamma
            meas = (rng.random(size) - 0.5) * lam
            return (x + pert)[:, None], (x + nr + meas)[:, None]

        def draw(rng: np.random.Generator):
            xs, ys = draw_batch(rng, 1)
            return xs[0], ys[0]

        return Sampler(draw=draw, draw_batch=draw_batch,
                       descriptor=f"additive uniform perturbations "
                                  f"gamma={gamma:.6g} lambda={lam:.6g}")

    return make


def _cor1_scenario(name: str, gamma_of_n, lambda_of_n, path_note: str) -> ScenarioSequence:
    expected = ExpectedOutcome(
        kind=OutcomeKind.CONTINUOUS,
        limit_mmse=0.5,
        sequence_limit_mmse=0.5,
        source="independent centered uniform perturbations vanish in mean "
               "square, so the value returns to the base pair's 1/2; per-n "
               "value is 1/2 + gamma^2/12 up to grid error",
    )

    def mc_config(n: int, seed: int) -> RegressionConfig:
        return RegressionConfig(n_samples=100_000, seed=seed)

    def x_dev(n: int, eps: float) -> float:
        gamma = gamma_of_n(n)
        return max(0.0, 1.0 - 2.0 * eps / gamma) if eps < gamma / 2.0 else 0.0

    return ScenarioSequence(
        name=name,
        realize=_cor1_realize_factory(gamma_of_n, lambda_of_n),
        limit=example3_limit_joint(),
        expected=expected,
        mc_sampler=_cor1_sampler_factory(gamma_of_n, lambda_of_n),
        mc_config=mc_config,
        x_deviation_prob=x_dev,
        notes="both noises are centered uniform of width gamma (on X) and "
              "lambda (on Y), independent of everything; " + path_note,
    )


def cor1_scenarios() -> list[ScenarioSequence]:
    return [
        _cor1_scenario("cor1_additive",
                       lambda n: 1.0 / n, lambda n: 1.0 / n,
                       "diagonal path gamma = lambda = 1/n"),
        _cor1_scenario("cor1_additive_fast_x",
                       lambda n: 1.0 / (n * n), lambda n: 1.0 / n,
                       "off-diagonal path gamma = 1/n^2, lambda = 1/n"),
        _cor1_scenario("cor1_additive_fast_y",
                       lambda n: 1.0 / n, lambda n: 1.0 / (n * n),
                       "off-diagonal path gamma = 1/n, lambda = 1/n^2"),
    ]


def cor2_scenario() -> ScenarioSequence:
    base = example3_limit_joint()

    def realize(n: int, seed: int) -> FiniteJoint:
        step = 1.0 / n
        return quantize_joint(base, step, step)

    expected = ExpectedOutcome(
        kind=OutcomeKind.CONTINUOUS,
        limit_mmse=0.5,
        sequence_limit_mmse=0.5,
        source="the base supports {-1,1} and {-2,0,2} sit on every 1/n "
               "lattice, so floor quantization is lossless and each "
               "quantized value equals 1/2 exactly",
    )
    return ScenarioSequence(
        name="cor2_quantization",
        realize=realize,
        limit=base,
        expected=expected,
        x_deviation_prob=lambda n, eps: 0.0,  # lattice atoms are fixed points
        notes="floor quantization of both coordinates at step 1/n",
    )


# ---------------------------------------------------------------------------
# degraded family: base pair garbled by a shrinking symmetric flip
# ---------------------------------------------------------------------------

def bsc_prior_joint(flip: float, prior=(0.5, 0.5)) -> FiniteJoint:
    """Uniform-by-default +-1 prior observed through a symmetric flip."""
    p0, p1 = prior
    return FiniteJoint(
        x_support=np.array([[-1.0], [1.0]]),
        y_support=np.array([[-1.0], [1.0]]),
        pmf=np.array([[p0 * (1.0 - flip), p0 * flip],
                      [p1 * flip, p1 * (1.0 - flip)]]),
    )


def make_markov_degraded_scenario(name: str, base: FiniteJoint,
                                  flip_of_n: Callable[[int], float],
                                  notes: str = "") -> ScenarioSequence:
    """Garble ``base`` by a symmetric binary flip of size flip_of_n(n).

    The witness channel is the garbling itself, so the degradedness
    coupling is exact by construction.  Requires a two-letter measurement
    alphabet.
    """
    if base.y_support.shape[0] != 2:
        raise InvalidDistribution("symmetric flip needs a binary measurement")
    support = base.y_support

    def witness(n: int) -> Channel:
        return binary_symmetric_channel(flip_of_n(n), support=support.ravel())

    def realize(n: int, seed: int) -> FiniteJoint:
        return compose(base, witness(n))

    value = mmse_exact(base).mmse
    expected = ExpectedOutcome(
        kind=OutcomeKind.CONTINUOUS,
        limit_mmse=value,
        sequence_limit_mmse=value,
        source="the garbling flip vanishes, so the degraded value falls "
               "back to the base pair's exact MMSE",
    )
    return ScenarioSequence(
        name=name,
        realize=realize,
        limit=base,
        expected=expected,
        markov_witness=witness,
        x_deviation_prob=lambda n, eps: 0.0,  # the prior is untouched
        notes=notes or "binary symmetric garbling with vanishing flip",
    )


def markov_degraded_scenario() -> ScenarioSequence:
    return make_markov_degraded_scenario(
        "markov_degraded_family",
        bsc_prior_joint(0.1),
        lambda n: 0.1 / n,
        notes="base: uniform +-1 prior through a 0.1 symmetric flip "
              "(MMSE 0.36); garbling flip 0.1/n",
    )


def make_random_degraded_scenario(seed: int, max_support: int = 6) -> ScenarioSequence:
    """Random base joint garbled by a shrinking random stochastic kernel.

    The witness is D_n = (1 - 2^-n) I + 2^-n R with R a fixed random
    row-stochastic matrix, so realize(n) -> base geometrically and every
    realization is degraded with respect to the base by construction.
    """
    rng = rng_stream(seed, "random_degraded")
    nx = int(rng.integers(2, max_support + 1))
    ny = int(rng.integers(2, max_support + 1))
    grid = np.linspace(-2.0, 2.0, 33)
    x_vals = np.sort(rng.choice(grid, size=nx, replace=False))[:, None]
    y_vals = np.sort(rng.choice(grid, size=ny, replace=False))[:, None]
    pmf = rng.exponential(1.0, (nx, ny))
    pmf /= pmf.sum()
    base = FiniteJoint(x_support=x_vals, y_support=y_vals, pmf=pmf)
    mixer = rng.exponential(1.0, (ny, ny))
    mixer /= mixer.sum(axis=1, keepdims=True)

    def witness(n: int) -> Channel:
        eps = 2.0 ** (-n)
        mat = (1.0 - eps) * np.eye(ny) + eps * mixer
        return Channel(input_support=y_vals, output_support=y_vals, matrix=mat)

    def realize(n: int, seed_: int) -> FiniteJoint:
        return compose(base, witness(n))

    value = mmse_exact(base).mmse
    expected = ExpectedOutcome(
        kind=OutcomeKind.CONTINUOUS,
        limit_mmse=value,
        sequence_limit_mmse=value,
        source="geometrically vanishing random garbling of a random base",
    )
    return ScenarioSequence(
        name=f"random_degraded_{seed}",
        realize=realize,
        limit=base,
        expected=expected,
        markov_witness=witness,
        x_deviation_prob=lambda n, eps: 0.0,
        notes="randomized degraded family used by the property suite",
    )


# ---------------------------------------------------------------------------
# LMMSE mixture: second moments converge, linear estimation still breaks
# ---------------------------------------------------------------------------

def _lmmse_mixture_realize(n: int, seed: int) -> FiniteJoint:
    root = math.sqrt(n)
    mix = (1.0 - 1.0 / n) / 2.0   # per sign: Y_n = X
    spike = 1.0 / (4.0 * n)       # per (sign of X, sign of spike)
    atoms = []
    for x in (-1.0, 1.0):
        atoms.append(((x,), (x,), mix))
        atoms.append(((x,), (-root,), spike))
        atoms.append(((x,), (root,), spike))
    return joint_from_atoms(atoms)


def lmmse_mixture_scenario() -> ScenarioSequence:
    limit = FiniteJoint(
        x_support=np.array([[-1.0], [1.0]]),
        y_support=np.array([[-1.0], [1.0]]),
        pmf=np.array([[0.5, 0.0], [0.0, 0.5]]),
    )
    expected = ExpectedOutcome(
        kind=OutcomeKind.DISCONTINUOUS_LSC,
        limit_mmse=0.0,
        sequence_limit_mmse=0.5,
        source="linear audit: with C_Y = 2 - 1/n and C_XY = 1 - 1/n the "
               "best linear value is 1 - (1-1/n)^2/(2-1/n) -> 1/2, while "
               "the limit pair Y = X has linear value 0",
    )
    return ScenarioSequence(
        name="lmmse_mixture",
        realize=_lmmse_mixture_realize,
        limit=limit,
        expected=expected,
        audit="lmmse",
        x_deviation_prob=lambda n, eps: 0.0,  # X_n = X throughout
        notes="Y_n = X w.p. 1 - 1/n, else an independent +-sqrt(n) spike "
              "(the spike carries no information about X); the plain MMSE "
              "is continuous here, only the linear value jumps",
    )


def builtin_scenarios() -> dict[str, ScenarioSequence]:
    """Name-addressable catalog of the built-in scenarios."""
    catalog = [
        example1_scenario(),
        example2_scenario(),
        example3_scenario(),
        example4_scenario(),
        *cor1_scenarios(),
        cor2_scenario(),
        markov_degraded_scenario(),
        lmmse_mixture_scenario(),
    ]
    return {s.name: s for s in catalog}
