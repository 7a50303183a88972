"""Master stability function: per-mode growth rate and stable intervals.

For a plant with closed-loop matrices (F, H, G), the function
``sigma(lam, mu)`` is the largest real part among the eigenvalues of
``F + lam*H + mu*G``.  A network mode with plant eigenvalue ``lam`` is
stabilized by any feedback eigenvalue ``mu`` with ``sigma(lam, mu) < 0``;
``stable_interval`` locates the negative-sigma interval on the real mu axis
nearest the origin, which is what the norm-minimal designer consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadParameter, NoStableInterval, NumericalFailure
from .model import PlantModel

#: |sigma| allowed at a refined finite interval boundary.
BOUNDARY_TOL = 1e-6

#: Default number of scan points for the coarse sign-change sweep.
DEFAULT_SCAN_POINTS = 400

#: Default bisection bracket width.
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class MsfPoint:
    """One evaluation of the stability function."""

    lam: complex
    mu: complex
    sigma: float


@dataclass(frozen=True)
class StableInterval:
    """Maximal interval of the real mu axis with sigma(lam, mu) < 0.

    A side flagged unbounded was still negative at the search-range endpoint,
    which is recorded as the bound; unboundedness is relative to the searched
    range, not proven.
    """

    lam: complex
    lower: float
    upper: float
    bounded_lower: bool
    bounded_upper: bool
    empty: bool = False

    def strictly_contains_zero(self) -> bool:
        return self.lower < 0.0 < self.upper

    def contains(self, mu: float) -> bool:
        return self.lower <= mu <= self.upper

    def distance_to_origin(self) -> float:
        if self.empty:
            return float("inf")
        if self.lower <= 0.0 <= self.upper:
            return 0.0
        return min(abs(self.lower), abs(self.upper))


def sigma(model: PlantModel, lam: complex, mu: complex) -> float:
    """Largest real part among the eigenvalues of F + lam*H + mu*G."""
    block = model.F + lam * model.H + mu * model.G
    try:
        eigenvalues = np.linalg.eigvals(block)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue computation failed at "
                               f"lambda={lam}, mu={mu}: {exc}") from exc
    return float(np.max(eigenvalues.real))


def sigma_grid(model: PlantModel, lambda_range, mu_range, steps) -> list[MsfPoint]:
    """Evaluate sigma over a real (lambda, mu) rectangle.

    ``steps`` is an int applied to both axes or a (lambda_steps, mu_steps)
    pair; at least 2 per axis.  Points come back row-major with lambda as
    the outer axis, each computed by the same evaluator as :func:`sigma`.
    """
    lam_lo, lam_hi = _finite_range("lambda_range", lambda_range)
    mu_lo, mu_hi = _finite_range("mu_range", mu_range)
    if isinstance(steps, (tuple, list)):
        lam_steps, mu_steps = int(steps[0]), int(steps[1])
    else:
        lam_steps = mu_steps = int(steps)
    if lam_steps < 2 or mu_steps < 2:
        raise BadParameter(f"steps must be >= 2 per axis, got {steps}")

    lams = np.linspace(lam_lo, lam_hi, lam_steps)
    mus = np.linspace(mu_lo, mu_hi, mu_steps)
    points = []
    for lam in lams:
        for mu in mus:
            try:
                points.append(MsfPoint(lam, mu, sigma(model, lam, mu)))
            except NumericalFailure as exc:
                raise NumericalFailure(
                    f"grid point (lambda={lam}, mu={mu}): {exc}") from exc
    return points


def stable_interval(model: PlantModel, lam: complex,
                    search_range=(-50.0, 50.0), tol: float = DEFAULT_TOL,
                    *, scan_points: int = DEFAULT_SCAN_POINTS) -> StableInterval:
    """Negative-sigma interval on the real mu axis nearest the origin.

    Scans ``scan_points`` equispaced mu values over ``search_range`` for
    sign changes of sigma(lam, .), refines each finite boundary by bisection
    to bracket width ``tol``, and returns the maximal negative interval
    minimizing distance to mu = 0 (ties resolved toward the negative side,
    then by lower endpoint).  Raises NoStableInterval when sigma is
    nonnegative over the whole scan or every negative region is narrower
    than the 2*tol resolution limit.
    """
    mu_lo, mu_hi = _finite_range("search_range", search_range)
    if not mu_lo < 0.0 < mu_hi:
        raise BadParameter(f"search_range must straddle 0, got {search_range}")
    if tol <= 0.0:
        raise BadParameter(f"tol must be positive, got {tol}")
    if scan_points < 3:
        raise BadParameter(f"scan_points must be >= 3, got {scan_points}")

    def f(mu: float) -> float:
        return sigma(model, lam, mu)

    grid = np.linspace(mu_lo, mu_hi, scan_points)
    negative = np.array([f(mu) for mu in grid]) < 0.0
    if not negative.any():
        raise NoStableInterval(
            f"sigma(lambda={lam}, mu) >= 0 over [{mu_lo}, {mu_hi}] "
            f"({scan_points} scan points); consider enlarging the range")

    candidates = []
    i = 0
    while i < len(grid):
        if not negative[i]:
            i += 1
            continue
        j = i
        while j + 1 < len(grid) and negative[j + 1]:
            j += 1
        if i == 0:
            lower, bounded_lower = float(mu_lo), False
        else:
            lower, bounded_lower = _refine_boundary(f, grid[i - 1], grid[i], tol), True
        if j == len(grid) - 1:
            upper, bounded_upper = float(mu_hi), False
        else:
            upper, bounded_upper = _refine_boundary(f, grid[j], grid[j + 1], tol), True
        candidates.append(StableInterval(lam, lower, upper, bounded_lower, bounded_upper))
        i = j + 1

    # slivers below the bisection resolution are rounding artifacts (a
    # boundary grazing a grid or range point), not resolvable intervals
    candidates = [c for c in candidates if c.upper - c.lower > 2.0 * tol]
    if not candidates:
        raise NoStableInterval(
            f"sigma(lambda={lam}, mu) has no negative interval wider than "
            f"{2.0 * tol} in [{mu_lo}, {mu_hi}]")

    best = min(candidates, key=_selection_key)
    _validate_interval(best, f)
    return best


def _finite_range(name: str, value) -> tuple[float, float]:
    try:
        lo, hi = float(value[0]), float(value[1])
    except (TypeError, ValueError, IndexError) as exc:
        raise BadParameter(f"{name} must be a (low, high) pair, got {value!r}") from exc
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo >= hi:
        raise BadParameter(f"{name} must be finite with low < high, got {value!r}")
    return lo, hi


def _refine_boundary(f, lo: float, hi: float, tol: float) -> float:
    """Bisect the sign change of f in (lo, hi), tightening past ``tol`` if
    needed until f at the returned point is inside the boundary tolerance."""
    negative_lo = f(lo) < 0.0
    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        value = f(mid)
        if hi - lo <= tol and abs(value) <= 0.5 * BOUNDARY_TOL:
            break
        if (value < 0.0) == negative_lo:
            lo = mid
        else:
            hi = mid
    return mid


def _selection_key(interval: StableInterval):
    if interval.lower <= 0.0 <= interval.upper:
        return (0.0, 0, interval.lower)
    if interval.lower > 0.0:
        return (interval.lower, 1, interval.lower)
    return (-interval.upper, 0, interval.lower)


def _validate_interval(interval: StableInterval, f) -> None:
    # five interior probes plus the finite-boundary tolerance check
    span = interval.upper - interval.lower
    if span <= 0.0:
        raise NumericalFailure(f"degenerate interval {interval}")
    for k in range(1, 6):
        probe = interval.lower + span * k / 6.0
        if f(probe) >= 0.0:
            raise NumericalFailure(
                f"interior probe mu={probe} of {interval} is not stable; "
                f"increase scan_points")
    for bounded, point in ((interval.bounded_lower, interval.lower),
                           (interval.bounded_upper, interval.upper)):
        if bounded and abs(f(point)) > BOUNDARY_TOL:
            raise NumericalFailure(
                f"boundary mu={point} of {interval} has |sigma| > {BOUNDARY_TOL}")
