"""Exact conditional expectation and MMSE on finite joints.

For a finite joint the conditional mean is a weighted column average,

    g(y_j) = sum_i x_i pmf[i, j] / P(Y = y_j),

and the minimum mean square error admits two algebraically equal forms,

    direct     = sum_ij pmf[i, j] ||x_i - g(y_j)||^2
    difference = E||X||^2 - E||g(Y)||^2.

Both are computed on every call and must agree to CHECK_TOL; the direct
form is returned.  The difference form is the orthogonality principle in
disguise, so the agreement doubles as a structural self-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import EmptySupport, SelfCheckError
from .probcore import FiniteJoint, MOMENT_TOL

CHECK_TOL = 1e-10


@dataclass(frozen=True)
class ConditionalExpectation:
    """Tabulated conditional mean estimate of X given Y = y.

    Only measurement atoms with positive mass are tabulated;
    ``dropped_zero_mass`` records whether any zero-mass column was removed.
    ``posterior_mass[j]`` is P(Y = y_support[j]); entries sum to 1.
    """

    y_support: np.ndarray       # (ny', m)
    estimates: np.ndarray       # (ny', k)
    posterior_mass: np.ndarray  # (ny',)
    dropped_zero_mass: bool

    def estimate(self, y) -> np.ndarray:
        """Estimate for one measurement atom (must be in the support)."""
        target = np.atleast_1d(np.asarray(y, dtype=float))
        hits = np.where((self.y_support == target).all(axis=1))[0]
        if hits.size == 0:
            raise EmptySupport(f"measurement {y!r} not in the conditioned support")
        return self.estimates[hits[0]]


def conditional_expectation(joint: FiniteJoint) -> ConditionalExpectation:
    """Exact conditional mean table for a finite joint."""
    py = joint.y_marginal()
    keep = py > 0.0
    if not np.any(keep):
        raise EmptySupport("every measurement atom has zero probability")
    cols = joint.pmf[:, keep]
    mass = py[keep]
    est = (joint.x_support.T @ cols / mass).T  # (ny', k)
    ce = ConditionalExpectation(
        y_support=joint.y_support[keep],
        estimates=est,
        posterior_mass=mass,
        dropped_zero_mass=bool(not np.all(keep)),
    )
    # law of total expectation: E[g(Y)] must equal E[X]
    ex = joint.x_marginal() @ joint.x_support
    eg = ce.posterior_mass @ ce.estimates
    if np.max(np.abs(ex - eg)) > CHECK_TOL * max(1.0, float(np.max(np.abs(ex)))):
        raise SelfCheckError(
            f"law of total expectation violated: E[X]={ex!r} vs E[g(Y)]={eg!r}")
    return ce


@dataclass(frozen=True)
class MmseResult:
    """MMSE value together with the estimator that achieves it."""

    mmse: float
    estimator: ConditionalExpectation
    second_moment_x: float
    estimator_second_moment: float


def mmse_exact(joint: FiniteJoint) -> MmseResult:
    """Exact MMSE of estimating X from Y under a finite joint.

    Cross-checks the residual form against the second-moment difference
    form to CHECK_TOL and returns the residual (direct) form, which is
    nonnegative by construction.  Vector X contributes the trace.
    """
    ce = conditional_expectation(joint)
    py = joint.y_marginal()
    keep = py > 0.0
    pmf = joint.pmf[:, keep]
    xs = joint.x_support
    diff = xs[:, None, :] - ce.estimates[None, :, :]     # (nx, ny', k)
    direct = float((pmf * (diff * diff).sum(axis=2)).sum())
    sm_x = float(joint.x_marginal() @ (xs * xs).sum(axis=1))
    est_sm = float(ce.posterior_mass @ (ce.estimates * ce.estimates).sum(axis=1))
    difference = sm_x - est_sm
    scale = max(1.0, abs(sm_x))
    if abs(direct - difference) > CHECK_TOL * scale:
        raise SelfCheckError(
            f"MMSE forms disagree: direct={direct!r} difference={difference!r}")
    eta_x = joint.x_marginal() @ xs
    trace_cx = sm_x - float(eta_x @ eta_x)
    if direct > trace_cx + CHECK_TOL * scale:
        raise SelfCheckError(
            f"MMSE {direct!r} exceeds prior variance {trace_cx!r}")
    return MmseResult(mmse=direct, estimator=ce, second_moment_x=sm_x,
                      estimator_second_moment=est_sm)


def orthogonality_check(
    joint: FiniteJoint,
    test_functions: Sequence[Callable[[np.ndarray], np.ndarray]],
    estimator: ConditionalExpectation | None = None,
) -> float:
    """Largest |E[(X - g(Y))^T h(Y)]| over the given test functions.

    With the true conditional mean this is zero up to rounding for every
    bounded h; feeding a perturbed ``estimator`` makes the residual
    correlation visible, which the self-test suite uses as a negative
    control.  Each test function maps a measurement atom (1-D array of
    length m) to a vector of length k.
    """
    ce = estimator if estimator is not None else conditional_expectation(joint)
    py = joint.y_marginal()
    keep = py > 0.0
    pmf = joint.pmf[:, keep]
    xs = joint.x_support
    worst = 0.0
    for h in test_functions:
        hv = np.stack([np.atleast_1d(np.asarray(h(y), dtype=float))
                       for y in ce.y_support])  # (ny', k)
        resid = xs[:, None, :] - ce.estimates[None, :, :]
        corr = float((pmf[:, :, None] * resid * hv[None, :, :]).sum())
        worst = max(worst, abs(corr))
    return worst
