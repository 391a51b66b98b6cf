"""Bearing-only target position fixes from two or more sensors.

Finds the point whose predicted azimuth/elevation at every sensor best
matches the measured bearings (least squares over wrapped angle
residuals), via Gauss-Newton with Levenberg damping.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import IllConditionedError, NoConvergenceError
from .geometry import direction_from_angles, wrap_angle

MAX_ITERATIONS = 50
COST_DECREASE_TOL = 1e-12   # rad^2
STEP_NORM_TOL = 1e-9        # meters
CONDITION_LIMIT = 1e12
LAMBDA_INIT = 1e-3
LAMBDA_MAX = 1e12
MIN_SENSOR_SEPARATION = 1e-6

STATUS_OK = 0
STATUS_NO_CONVERGENCE = 1
STATUS_ILL_CONDITIONED = 2


@dataclass(frozen=True)
class BearingSet:
    """Bearings to one target from S sensors at known locations.

    locations: (S, 3) meters, az/el: (S,) radians.
    """

    locations: np.ndarray
    az: np.ndarray
    el: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "locations", np.asarray(self.locations, dtype=float))
        object.__setattr__(self, "az", np.asarray(self.az, dtype=float))
        object.__setattr__(self, "el", np.asarray(self.el, dtype=float))
        s = self.locations.shape[0]
        if self.locations.ndim != 2 or self.locations.shape[1] != 3 or s < 2:
            raise ValueError("locations must be (S, 3) with S >= 2")
        if self.az.shape != (s,) or self.el.shape != (s,):
            raise ValueError("az and el must be (S,) to match locations")
        diff = self.locations[:, np.newaxis, :] - self.locations[np.newaxis, :, :]
        dist = np.linalg.norm(diff, axis=-1)
        dist[np.diag_indices(s)] = np.inf
        if dist.min() < MIN_SENSOR_SEPARATION:
            raise ValueError("sensor locations must be pairwise distinct")


@dataclass(frozen=True)
class TriangulationFix:
    """Result of a bearing-only fix.

    ``local_positions[s]`` is the target position in sensor s's own
    frame: the measured bearing scaled by the fitted range, so it is
    always consistent with that sensor's az/el.
    """

    point: np.ndarray
    local_positions: np.ndarray
    residual_cost: float
    iterations: int


class BatchFix(NamedTuple):
    """Vectorized fixes for n targets: see ``triangulate_batch``."""

    points: np.ndarray      # (n, 3)
    ranges: np.ndarray      # (S, n), ||point - location_s||
    cost: np.ndarray        # (n,) final sum of squared residuals, rad^2
    iterations: np.ndarray  # (n,)
    status: np.ndarray      # (n,) STATUS_* codes


def bearing_residuals(points, locations, az, el):
    """Wrapped bearing residuals and their Jacobian.

    Parameters
    ----------
    points : (n, 3) candidate target positions.
    locations : (S, 3) sensor locations.
    az, el : (S, n) measured bearings.

    Returns
    -------
    res : (n, 2S) residuals, sensor-major (az_s, el_s) pairs, wrapped
        to (-pi, pi].
    jac : (n, 2S, 3) derivative of ``res`` with respect to the point.
    """
    points = np.asarray(points, dtype=float)
    locations = np.asarray(locations, dtype=float)
    n = points.shape[0]
    s = locations.shape[0]

    delta = points[np.newaxis, :, :] - locations[:, np.newaxis, :]  # (S, n, 3)
    dx, dy, dz = delta[..., 0], delta[..., 1], delta[..., 2]
    rho2 = np.maximum(dx * dx + dy * dy, 1e-30)
    rho = np.sqrt(rho2)
    r2 = rho2 + dz * dz

    res = np.empty((n, 2 * s))
    res[:, 0::2] = wrap_angle(az - np.arctan2(dy, dx)).T
    res[:, 1::2] = wrap_angle(el - np.arctan2(dz, rho)).T

    # residual = measured - predicted, so the Jacobian is -d(predicted)/dx
    jac = np.empty((n, 2 * s, 3))
    jac[:, 0::2, 0] = (dy / rho2).T
    jac[:, 0::2, 1] = (-dx / rho2).T
    jac[:, 0::2, 2] = 0.0
    jac[:, 1::2, 0] = (dx * dz / (r2 * rho)).T
    jac[:, 1::2, 1] = (dy * dz / (r2 * rho)).T
    jac[:, 1::2, 2] = (-rho / r2).T
    return res, jac


def initial_points(locations, az, el) -> np.ndarray:
    """Starting guesses: midpoint of the common perpendicular of the
    first two rays, or the sensor centroid pushed 1 km along the mean
    ray when those rays are near-parallel."""
    locations = np.asarray(locations, dtype=float)
    d1 = direction_from_angles(az[0], el[0])  # (n, 3)
    d2 = direction_from_angles(az[1], el[1])
    w0 = locations[0] - locations[1]
    b = np.sum(d1 * d2, axis=-1)
    d = d1 @ w0
    e = d2 @ w0
    denom = 1.0 - b * b
    safe = denom > 1e-9
    denom = np.where(safe, denom, 1.0)
    t = (b * e - d) / denom
    u = (e - b * d) / denom
    mid = 0.5 * (locations[0] + t[:, np.newaxis] * d1
                 + locations[1] + u[:, np.newaxis] * d2)
    if np.all(safe):
        return mid
    mean_dir = direction_from_angles(az, el).mean(axis=0)  # (n, 3)
    norm = np.linalg.norm(mean_dir, axis=-1, keepdims=True)
    mean_dir = mean_dir / np.where(norm < 1e-12, 1.0, norm)
    fallback = locations.mean(axis=0) + 1000.0 * mean_dir
    return np.where(safe[:, np.newaxis], mid, fallback)


def triangulate_batch(locations, az, el, max_iterations: int = MAX_ITERATIONS) -> BatchFix:
    """Fix n targets at once from per-sensor bearing arrays.

    Parameters
    ----------
    locations : (S, 3) sensor locations, S >= 2.
    az, el : (S, n) bearings in radians.

    Per-target failures are reported through ``status`` rather than
    raised, so one bad geometry does not abort the batch.
    """
    locations = np.asarray(locations, dtype=float)
    az = np.atleast_2d(np.asarray(az, dtype=float))
    el = np.atleast_2d(np.asarray(el, dtype=float))
    n = az.shape[1]

    x = initial_points(locations, az, el)
    res, jac = bearing_residuals(x, locations, az, el)
    cost = np.sum(res * res, axis=1)
    lam = np.full(n, LAMBDA_INIT)
    status = np.full(n, STATUS_NO_CONVERGENCE, dtype=int)
    iterations = np.zeros(n, dtype=int)
    active = np.ones(n, dtype=bool)

    for it in range(1, max_iterations + 1):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        j = jac[idx]
        r = res[idx]
        jtj = np.einsum("nki,nkj->nij", j, j)
        bad = np.linalg.cond(jtj) > CONDITION_LIMIT
        if bad.any():
            status[idx[bad]] = STATUS_ILL_CONDITIONED
            active[idx[bad]] = False
            iterations[idx[bad]] = it
            idx = idx[~bad]
            if idx.size == 0:
                continue
            j, r, jtj = j[~bad], r[~bad], jtj[~bad]

        diag = jtj * np.eye(3)
        damped = jtj + lam[idx, np.newaxis, np.newaxis] * diag
        rhs = -np.einsum("nki,nk->ni", j, r)
        step = np.linalg.solve(damped, rhs[..., np.newaxis])[..., 0]
        trial = x[idx] + step
        res_t, _ = bearing_residuals(trial, locations, az[:, idx], el[:, idx])
        cost_t = np.sum(res_t * res_t, axis=1)

        better = cost_t <= cost[idx]
        acc = idx[better]
        rej = idx[~better]
        iterations[idx] = it

        decrease = cost[acc] - cost_t[better]
        x[acc] = trial[better]
        cost[acc] = cost_t[better]
        lam[acc] = np.maximum(lam[acc] / 10.0, 1e-12)
        done = (decrease < COST_DECREASE_TOL) | \
               (np.linalg.norm(step[better], axis=1) < STEP_NORM_TOL)
        status[acc[done]] = STATUS_OK
        active[acc[done]] = False

        lam[rej] = lam[rej] * 10.0
        stuck = lam[rej] > LAMBDA_MAX
        active[rej[stuck]] = False

        moved = acc[~done]
        if moved.size:
            res_m, jac_m = bearing_residuals(x[moved], locations, az[:, moved], el[:, moved])
            res[moved] = res_m
            jac[moved] = jac_m

    ranges = np.linalg.norm(x[np.newaxis, :, :] - locations[:, np.newaxis, :], axis=-1)
    return BatchFix(points=x, ranges=ranges, cost=cost, iterations=iterations, status=status)


def triangulate(bearings: BearingSet, max_iterations: int = MAX_ITERATIONS) -> TriangulationFix:
    """Fix a single target from a BearingSet.

    Raises
    ------
    IllConditionedError
        If the normal-equation condition number exceeds 1e12
        (near-parallel rays).
    NoConvergenceError
        If the fit does not converge within ``max_iterations``.
    """
    fix = triangulate_batch(bearings.locations,
                            bearings.az[:, np.newaxis],
                            bearings.el[:, np.newaxis],
                            max_iterations=max_iterations)
    code = int(fix.status[0])
    if code == STATUS_ILL_CONDITIONED:
        raise IllConditionedError("bearing rays are near-parallel")
    if code != STATUS_OK:
        raise NoConvergenceError(f"no convergence in {max_iterations} iterations")
    local = fix.ranges[:, 0, np.newaxis] * direction_from_angles(bearings.az, bearings.el)
    return TriangulationFix(point=fix.points[0],
                            local_positions=local,
                            residual_cost=float(fix.cost[0]),
                            iterations=int(fix.iterations[0]))
