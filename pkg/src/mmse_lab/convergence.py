"""Run scenarios over an index grid and audit their convergence behavior.

``run_scenario`` evaluates the audited functional (exact MMSE, or LMMSE
where the scenario says so) at every index of the grid plus the limit pair,
then compares the tail window — the last quarter of the grid — against the
scenario's declared sequence limit.  Scenarios carrying a Monte Carlo
sampler are evaluated a second time through the regressogram path, and the
verdict requires both paths to agree with the declaration (the Monte Carlo
path gets an extra bin-bias allowance on top of its 3-sigma band).

The diagnostics bundle records the quantities that the continuity theory
says to watch:

* ``second_moment_gap``   — |E||X_n||^2 - E||X||^2| at the largest index;
* ``second_moment_gap_y`` — same for the measurement coordinate;
* ``prob_convergence_proxy`` — exact P(||X_n - X|| > 0.05) under the
  scenario coupling where one is registered, else None;
* ``ui_proxy`` — the uniform-integrability functional of the squared
  prior, a -> E[1{||X_n||^2 > a} ||X_n||^2], on a fixed grid of a.  A
  healthy (u.i.) squared family drives this to zero along the grid; the
  escaping-mass scenario keeps it pinned at 1.
* ``markov_verified`` — whether compose(limit, witness(n)) reproduced
  realize(n) atom-for-atom within 1e-9 at every grid index (None when the
  scenario has no witness).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .degradedness import compose
from .errors import MissingWitness, MmseLabError, ScenarioRunError
from .exact import conditional_expectation, mmse_exact
from .linear import lmmse, tail_window
from .mc import RegressionConfig, mc_mmse
from .probcore import (
    FiniteJoint,
    Sampler,
    moments_empirical,
    moments_exact,
    rng_stream,
    sample_pairs,
)
from .scenarios import ExpectedOutcome, ScenarioSequence

UI_GRID = (1.0, 2.0, 4.0, 8.0, 16.0)
PROB_EPS = 0.05
MC_BIN_SLACK = 1e-2
WITNESS_TOL = 1e-9


@dataclass(frozen=True)
class ReportRow:
    n: int
    mmse: float
    std_err: float
    second_moment_x: float
    second_moment_y: float


@dataclass(frozen=True)
class DiagnosticsBundle:
    second_moment_gap: float
    second_moment_gap_y: float
    prob_convergence_proxy: float | None
    ui_proxy: dict[float, float]
    markov_verified: bool | None

    def to_json_dict(self) -> dict:
        return {
            "second_moment_gap": self.second_moment_gap,
            "second_moment_gap_y": self.second_moment_gap_y,
            "prob_convergence_proxy": self.prob_convergence_proxy,
            "ui_proxy": {repr(a): v for a, v in sorted(self.ui_proxy.items())},
            "markov_verified": self.markov_verified,
        }


@dataclass(frozen=True)
class ConvergenceReport:
    scenario: str
    rows: tuple[ReportRow, ...]
    limit_value: float
    limit_std_err: float
    verdict_matches: bool
    expected: ExpectedOutcome
    diagnostics: DiagnosticsBundle
    tol_abs: float
    mc_rows: tuple[ReportRow, ...] = ()


def ui_functional(joint: FiniteJoint, threshold: float) -> float:
    """E[ 1{||X||^2 > a} ||X||^2 ] for the prior marginal of a joint."""
    sq = (joint.x_support * joint.x_support).sum(axis=1)
    px = joint.x_marginal()
    return float((px * sq * (sq > threshold)).sum())


def _second_moments(obj: FiniteJoint | Sampler, seed: int) -> tuple[float, float]:
    if isinstance(obj, FiniteJoint):
        smx = float(obj.x_marginal() @ (obj.x_support ** 2).sum(axis=1))
        smy = float(obj.y_marginal() @ (obj.y_support ** 2).sum(axis=1))
        return smx, smy
    xs, ys = sample_pairs(obj, 100_000, rng_stream(seed, "moments"))
    ms = moments_empirical((xs, ys))
    return ms.second_moment_x, ms.second_moment_y


def _audit_value(scenario: ScenarioSequence, obj: FiniteJoint | Sampler,
                 n: int | None, seed: int) -> tuple[float, float]:
    """(value, std_err) of the audited functional on one pair law."""
    if isinstance(obj, FiniteJoint):
        if scenario.audit == "lmmse":
            return lmmse(moments_exact(obj)).value, 0.0
        return mmse_exact(obj).mmse, 0.0
    if scenario.audit == "lmmse":
        xs, ys = sample_pairs(obj, 100_000, rng_stream(seed, "lmmse-draw"))
        return lmmse(moments_empirical((xs, ys))).value, 0.0
    if scenario.mc_config is not None and n is not None:
        config = scenario.mc_config(n, seed)
    else:
        config = RegressionConfig(n_samples=100_000, seed=seed)
    est = mc_mmse(obj, config)
    return est.value, est.std_error


def _tail_mean_within(tail: list[ReportRow], target: float, band: float) -> bool:
    mean = math.fsum(r.mmse for r in tail) / len(tail)
    sem = math.sqrt(math.fsum(r.std_err ** 2 for r in tail)) / len(tail)
    return abs(mean - target) <= band + 3.0 * sem


def run_scenario(scenario: ScenarioSequence, n_grid, tol_abs: float = 0.02,
                 seed: int = 0) -> ConvergenceReport:
    """Evaluate a scenario on an increasing index grid and audit the tail."""
    grid = [int(n) for n in n_grid]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] < 1:
        raise ScenarioRunError(f"n_grid must be strictly increasing and >= 1, got {grid}")
    if not tol_abs > 0.0:
        raise ScenarioRunError(f"tol_abs must be positive, got {tol_abs!r}")

    realized: list[FiniteJoint | Sampler] = []
    rows: list[ReportRow] = []
    mc_rows: list[ReportRow] = []
    try:
        for n in grid:
            obj = scenario.realize(n, seed)
            realized.append(obj)
            run_seed = _derived_seed(seed, scenario.name, n)
            value, std_err = _audit_value(scenario, obj, n, run_seed)
            smx, smy = _second_moments(obj, run_seed)
            rows.append(ReportRow(n=n, mmse=value, std_err=std_err,
                                  second_moment_x=smx, second_moment_y=smy))
            if scenario.mc_sampler is not None:
                sampler = scenario.mc_sampler(n)
                mc_seed = _derived_seed(seed, scenario.name + "/mc", n)
                if scenario.mc_config is not None:
                    config = scenario.mc_config(n, mc_seed)
                else:
                    config = RegressionConfig(n_samples=100_000, seed=mc_seed)
                est = mc_mmse(sampler, config)
                xs, ys = sample_pairs(sampler, 20_000,
                                      rng_stream(mc_seed, "mc-moments"))
                ms = moments_empirical((xs, ys))
                mc_rows.append(ReportRow(n=n, mmse=est.value,
                                         std_err=est.std_error,
                                         second_moment_x=ms.second_moment_x,
                                         second_moment_y=ms.second_moment_y))
        limit_seed = _derived_seed(seed, scenario.name, 0)
        limit_value, limit_std = _audit_value(scenario, scenario.limit, None,
                                              limit_seed)
        smx_lim, smy_lim = _second_moments(scenario.limit, limit_seed)
    except MmseLabError as err:
        if isinstance(err, ScenarioRunError):
            raise
        raise ScenarioRunError(
            f"scenario {scenario.name!r}: {err}") from err

    window = tail_window(len(grid))
    target = scenario.expected.sequence_limit_mmse
    # The tail is summarised by its mean: a single-point read is too noisy
    # under MC, and averaging keeps the band honest for slowly decaying
    # exact sequences as well.
    matches = _tail_mean_within(rows[len(rows) - window:], target, tol_abs)
    if mc_rows:
        matches = matches and _tail_mean_within(
            mc_rows[len(mc_rows) - window:], target, tol_abs + MC_BIN_SLACK)

    last = rows[-1]
    diag = DiagnosticsBundle(
        second_moment_gap=abs(last.second_moment_x - smx_lim),
        second_moment_gap_y=abs(last.second_moment_y - smy_lim),
        prob_convergence_proxy=(
            scenario.x_deviation_prob(grid[-1], PROB_EPS)
            if scenario.x_deviation_prob is not None else None),
        ui_proxy=(
            {a: ui_functional(realized[-1], a) for a in UI_GRID}
            if isinstance(realized[-1], FiniteJoint) else {}),
        markov_verified=_verify_witness(scenario, grid, realized),
    )
    return ConvergenceReport(
        scenario=scenario.name,
        rows=tuple(rows),
        limit_value=limit_value,
        limit_std_err=limit_std,
        verdict_matches=bool(matches),
        expected=scenario.expected,
        diagnostics=diag,
        tol_abs=tol_abs,
        mc_rows=tuple(mc_rows),
    )


def _derived_seed(seed: int, tag: str, n: int) -> int:
    return int(rng_stream(seed, tag, n).integers(0, 2 ** 63))


def _verify_witness(scenario: ScenarioSequence, grid, realized) -> bool | None:
    if scenario.markov_witness is None:
        return None
    if not isinstance(scenario.limit, FiniteJoint):
        return None
    ok = True
    for n, obj in zip(grid, realized):
        if not isinstance(obj, FiniteJoint):
            return None
        composed = compose(scenario.limit, scenario.markov_witness(n))
        same_support = (np.array_equal(composed.x_support, obj.x_support)
                        and np.array_equal(composed.y_support, obj.y_support))
        ok = ok and same_support and bool(
            np.max(np.abs(composed.pmf - obj.pmf)) <= WITNESS_TOL)
    return ok


def usc_check(report: ConvergenceReport, expected: ExpectedOutcome,
              slack: float = 0.05) -> bool:
    """Does the tail stay below the limit value (up to slack and noise)?

    True iff max tail mmse <= expected.limit_mmse + slack + 3 * max tail
    std_err.  This is the one-sided check that a family continuous from
    above (e.g. any degraded family) must satisfy, and that the
    escaping-mass scenario must fail.
    """
    window = tail_window(len(report.rows))
    tail = report.rows[len(report.rows) - window:]
    worst = max(r.mmse for r in tail)
    noise = max(r.std_err for r in tail)
    return bool(worst <= expected.limit_mmse + slack + 3.0 * noise)


def estimator_convergence_check(scenario: ScenarioSequence, n_grid,
                                seed: int = 0) -> float:
    """Exact mean-square distance between the per-n and limit estimators.

    Uses the degradedness witness to couple (Y, Y_n) exactly:

        E || g_n(Y_n) - g(Y) ||^2
          = sum_{y, z} P(Y = y) D_n(z | y) || g_n(z) - g(y) ||^2 .

    Returns the value at the largest grid index.  Requires the scenario to
    carry a markov_witness and an exact limit; raises MissingWitness
    otherwise.  With an identity witness the value is exactly 0; a witness
    that destroys the measurement entirely keeps it pinned at the limit
    estimator's second moment.
    """
    if scenario.markov_witness is None or not isinstance(scenario.limit, FiniteJoint):
        raise MissingWitness(
            f"scenario {scenario.name!r} carries no exact degradedness witness")
    grid = [int(n) for n in n_grid]
    if not grid:
        raise ScenarioRunError("n_grid must be non-empty")
    limit = scenario.limit
    g = conditional_expectation(limit)
    # positions of the limit's positive-mass measurement atoms
    py_full = limit.y_marginal()
    keep_y = np.where(py_full > 0.0)[0]
    value = 0.0
    for n in grid:
        channel = scenario.markov_witness(n)
        composed = compose(limit, channel)
        gn = conditional_expectation(composed)
        pz_full = composed.y_marginal()
        keep_z = pz_full > 0.0
        z_pos = np.cumsum(keep_z) - 1  # full z index -> row of gn.estimates
        value = 0.0
        for yi, y_idx in enumerate(keep_y):
            row = channel.matrix[y_idx]
            mass = py_full[y_idx] * row
            for z_idx in np.where(row > 0.0)[0]:
                if not keep_z[z_idx]:  # unreachable: mass > 0 implies kept
                    continue
                d = gn.estimates[z_pos[z_idx]] - g.estimates[yi]
                value += float(mass[z_idx]) * float(d @ d)
    return value
