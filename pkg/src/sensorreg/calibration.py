"""Rotation-bias estimation for networks of 2D/3D sensors.

Every sensor observes the same targets in its own, slightly rotated,
local frame.  These routines estimate one correcting rotation per sensor
so that corrected local tracks, shifted to sensor locations, agree in a
common frame.  3D (range + bearing) sensors are handled directly via
alternating optimal-rotation updates; bearing-only (2D) sensors get
ranges from triangulation that is refreshed as the bias estimates
improve.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, MissingRangeError, ZeroVectorError
from .geometry import collinearity_ratio, direction_from_angles
from .triangulation import STATUS_OK, triangulate_batch
from .wahba import solve_wahba

COLLINEAR_WARN_RATIO = 0.01


@dataclass(frozen=True)
class SensorMeasurements:
    """Measurements of n targets by one sensor (angles in radians).

    ``rng`` is None for a bearing-only sensor, otherwise meters.
    """

    az: np.ndarray
    el: np.ndarray
    rng: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "az", np.asarray(self.az, dtype=float))
        object.__setattr__(self, "el", np.asarray(self.el, dtype=float))
        if self.az.ndim != 1 or self.el.shape != self.az.shape:
            raise ValueError("az and el must be equal-length 1-D arrays")
        if self.rng is not None:
            object.__setattr__(self, "rng", np.asarray(self.rng, dtype=float))
            if self.rng.shape != self.az.shape:
                raise ValueError("rng must match az/el length")

    @property
    def n(self) -> int:
        return self.az.shape[0]

    @property
    def is_3d(self) -> bool:
        return self.rng is not None

    def local_positions(self) -> np.ndarray:
        """Cartesian positions in the sensor's own frame, (n, 3)."""
        if self.rng is None:
            raise MissingRangeError("bearing-only sensor has no Cartesian positions")
        return self.rng[:, np.newaxis] * direction_from_angles(self.az, self.el)

    def directions(self) -> np.ndarray:
        """Unit line-of-sight vectors in the sensor's own frame, (n, 3)."""
        return direction_from_angles(self.az, self.el)


@dataclass(frozen=True)
class MeasurementBatch:
    """Aligned measurements of the same n targets from S sensors.

    Index i refers to the same target/epoch for every sensor.
    ``locations`` are the true sensor positions in the common frame,
    shape (S, 3).
    """

    sensors: tuple
    locations: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "sensors", tuple(self.sensors))
        object.__setattr__(self, "locations", np.asarray(self.locations, dtype=float))
        s = len(self.sensors)
        if s < 2:
            raise ValueError("a batch needs at least two sensors")
        if self.locations.shape != (s, 3):
            raise ValueError(f"locations must be ({s}, 3)")
        n = self.sensors[0].n
        if n < 2:
            raise ValueError("a batch needs at least two shared targets")
        if any(m.n != n for m in self.sensors):
            raise ValueError("every sensor must report the same number of targets")

    @property
    def n_sensors(self) -> int:
        return len(self.sensors)

    @property
    def n_epochs(self) -> int:
        return self.sensors[0].n

    @property
    def all_3d(self) -> bool:
        return all(m.is_3d for m in self.sensors)

    def local_positions(self) -> list:
        """Per-sensor (n, 3) Cartesian positions; requires 3D sensors."""
        return [m.local_positions() for m in self.sensors]


@dataclass(frozen=True)
class StoppingCriteria:
    """Stop when the total pairwise cost changes by less than
    ``rel_cost_tol`` (relative) between iterations, or after
    ``max_iterations`` sweeps.  A tolerance of zero disables the cost
    rule, so the iteration always runs the full budget."""

    rel_cost_tol: float = 1e-3
    max_iterations: int = 100

    def __post_init__(self):
        if self.rel_cost_tol < 0.0:
            raise ValueError("rel_cost_tol must be non-negative")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class CalibrationResult:
    """Estimated correcting rotations and fit diagnostics.

    estimates[s] maps sensor s's local coordinates into the common
    frame (apply then add the sensor location).  ``cost_trace`` holds
    the total pairwise cost per iteration; for the range-bearing
    algorithms its first entry is the cost before any update.
    ``gauge_ambiguous`` flags two-sensor absolute solutions, where any
    common rotation about the baseline fits equally well.
    ``dropped_indices`` counts per-iteration triangulation failures
    (bearing-only algorithms).
    """

    estimates: list
    cost_trace: list
    iterations: int
    converged: bool
    gauge_ambiguous: bool = False
    dropped_indices: int = 0


def pairwise_cost(rotations, batch: MeasurementBatch = None, *,
                  local_positions=None, locations=None) -> float:
    """Total squared disagreement between corrected sensor tracks.

    sum over sensor pairs (s < t) and targets i of
    ||R_s p_s^i + l_s - (R_t p_t^i + l_t)||^2.

    Positions come from ``batch`` (3D sensors) or, for bearing-only
    data, from ``local_positions``/``locations`` directly.
    """
    if batch is not None:
        local_positions = batch.local_positions()
        locations = batch.locations
    return _cost(rotations, local_positions, np.asarray(locations, dtype=float))


def _cost(rotations, positions, locations) -> float:
    common = [positions[s] @ np.asarray(rotations[s], dtype=float).T + locations[s]
              for s in range(len(positions))]
    total = 0.0
    for t in range(len(common)):
        for s in range(t + 1, len(common)):
            diff = common[t] - common[s]
            total += float(np.sum(diff * diff))
    return total


def _pair_schedule(n_sensors: int) -> list:
    return [(t, s) for t in range(n_sensors - 1) for s in range(t + 1, n_sensors)]


def _als_sweep(rotations, positions, locations, pairs):
    # Gauss-Seidel: each update uses the freshest estimate of its partner,
    # and each is an exact minimizer with the partner held fixed.
    for t, s in pairs:
        target = positions[s] @ rotations[s].T + (locations[s] - locations[t])
        rotations[t] = solve_wahba(positions[t], target)
        target = positions[t] @ rotations[t].T + (locations[t] - locations[s])
        rotations[s] = solve_wahba(positions[s], target)


def _stopped(prev: float, cur: float, tol: float) -> bool:
    if prev <= 0.0:
        return True
    return abs(prev - cur) < tol * prev


def relative_3d(batch: MeasurementBatch) -> np.ndarray:
    """Rotation of 3D sensor 0 relative to 3D sensor 1, one shot.

    Treats sensor 1 as the reference: returns the rotation R such that
    R p_0^i + l_0 best matches p_1^i + l_1.
    """
    _check_sensor_count(batch, 2)
    p0, p1 = batch.local_positions()
    shifted = p1 + (batch.locations[1] - batch.locations[0])
    return solve_wahba(p0, shifted)


def relative_hetero(batch: MeasurementBatch) -> np.ndarray:
    """Rotation of bearing-only sensor 0 relative to 3D sensor 1.

    Matches sensor 0's unit line-of-sight directions against directions
    to sensor 1's positions seen from sensor 0's location.

    Raises
    ------
    ZeroVectorError
        If a target coincides with sensor 0's location.
    """
    _check_sensor_count(batch, 2)
    if not batch.sensors[1].is_3d:
        raise MissingRangeError("reference sensor must supply ranges")
    q0 = batch.sensors[0].directions()
    shifted = batch.sensors[1].local_positions() \
        + (batch.locations[1] - batch.locations[0])
    norms = np.linalg.norm(shifted, axis=1)
    if np.any(norms < 1e-12):
        raise ZeroVectorError("a target coincides with sensor 0's location")
    return solve_wahba(q0, shifted / norms[:, np.newaxis])


def absolute_3d_pair(batch: MeasurementBatch,
                     stopping: StoppingCriteria = StoppingCriteria()) -> CalibrationResult:
    """Estimate both rotations of a 3D sensor pair by alternation.

    Each iteration rotates one sensor's track onto the other's current
    corrected track and vice versa; both updates are exact minimizers,
    so the cost trace never increases.  The solution is only determined
    up to a common rotation about the sensor baseline
    (``gauge_ambiguous``): corrected tracks agree, but individual
    rotations need not match any externally known truth.
    """
    _check_sensor_count(batch, 2)
    return _absolute_cartesian(batch, stopping, gauge_ambiguous=True)


def absolute_3d(batch: MeasurementBatch,
                stopping: StoppingCriteria = StoppingCriteria()) -> CalibrationResult:
    """Estimate all rotations of S >= 3 non-collinear 3D sensors.

    Sweeps every sensor pair in a fixed order, aligning each sensor of
    the pair to the other in turn.  With three or more non-collinear
    sensors the baseline ambiguity of the two-sensor case is broken.
    """
    _check_sensor_count(batch, 3, at_least=True)
    _warn_if_collinear(batch.locations)
    return _absolute_cartesian(batch, stopping, gauge_ambiguous=False)


def _absolute_cartesian(batch, stopping, gauge_ambiguous) -> CalibrationResult:
    positions = batch.local_positions()
    locations = batch.locations
    pairs = _pair_schedule(batch.n_sensors)
    rotations = [np.eye(3) for _ in range(batch.n_sensors)]
    trace = [_cost(rotations, positions, locations)]
    converged = False
    iterations = 0
    for iterations in range(1, stopping.max_iterations + 1):
        _als_sweep(rotations, positions, locations, pairs)
        cur = _cost(rotations, positions, locations)
        trace.append(cur)
        if _stopped(trace[-2], cur, stopping.rel_cost_tol):
            converged = True
            break
    return CalibrationResult(estimates=rotations, cost_trace=trace,
                             iterations=iterations, converged=converged,
                             gauge_ambiguous=gauge_ambiguous)


def absolute_2d_pair(batch: MeasurementBatch,
                     stopping: StoppingCriteria = StoppingCriteria()) -> CalibrationResult:
    """Estimate both rotations of a bearing-only sensor pair.

    Ranges are not measured, so each iteration first triangulates every
    target from bias-compensated bearings, rebuilds per-sensor Cartesian
    positions from the fitted ranges, then runs one alternation sweep.
    The incremental rotations are composed into the running estimates
    and the compensated bearings are recomputed for the next pass.
    Shares the two-sensor baseline ambiguity of the 3D pair case.
    """
    _check_sensor_count(batch, 2)
    return _absolute_bearing(batch, stopping, gauge_ambiguous=True)


def absolute_2d(batch: MeasurementBatch,
                stopping: StoppingCriteria = StoppingCriteria()) -> CalibrationResult:
    """Estimate all rotations of S >= 3 bearing-only sensors.

    Triangulation pass and pair sweep per iteration, as in the
    two-sensor case, but over the full pair schedule.
    """
    _check_sensor_count(batch, 3, at_least=True)
    _warn_if_collinear(batch.locations)
    return _absolute_bearing(batch, stopping, gauge_ambiguous=False)


def _absolute_bearing(batch, stopping, gauge_ambiguous) -> CalibrationResult:
    n_sensors = batch.n_sensors
    n = batch.n_epochs
    locations = batch.locations
    pairs = _pair_schedule(n_sensors)
    raw_dirs = [m.directions() for m in batch.sensors]

    accumulated = [np.eye(3) for _ in range(n_sensors)]
    trace = []
    dropped = 0
    converged = False
    iterations = 0
    for iterations in range(1, stopping.max_iterations + 1):
        comp_dirs = [raw_dirs[s] @ accumulated[s].T for s in range(n_sensors)]
        az = np.stack([np.arctan2(d[:, 1], d[:, 0]) for d in comp_dirs])
        el = np.stack([np.arctan2(d[:, 2], np.hypot(d[:, 0], d[:, 1]))
                       for d in comp_dirs])
        fix = triangulate_batch(locations, az, el)
        ok = fix.status == STATUS_OK
        dropped += int(n - ok.sum())
        if ok.sum() < 2:
            raise DegenerateInputError(
                "fewer than two targets could be triangulated")
        positions = [fix.ranges[s, ok][:, np.newaxis] * comp_dirs[s][ok]
                     for s in range(n_sensors)]

        increments = [np.eye(3) for _ in range(n_sensors)]
        _als_sweep(increments, positions, locations, pairs)
        cur = _cost(increments, positions, locations)
        accumulated = [increments[s] @ accumulated[s] for s in range(n_sensors)]
        trace.append(cur)
        if len(trace) >= 2 and _stopped(trace[-2], cur, stopping.rel_cost_tol):
            converged = True
            break
    return CalibrationResult(estimates=accumulated, cost_trace=trace,
                             iterations=iterations, converged=converged,
                             gauge_ambiguous=gauge_ambiguous,
                             dropped_indices=dropped)


def _check_sensor_count(batch, count, at_least=False):
    if at_least:
        if batch.n_sensors < count:
            raise ValueError(f"at least {count} sensors required, got {batch.n_sensors}")
    elif batch.n_sensors != count:
        raise ValueError(f"exactly {count} sensors required, got {batch.n_sensors}")


def _warn_if_collinear(locations):
    ratio = collinearity_ratio(locations)
    if ratio < COLLINEAR_WARN_RATIO:
        warnings.warn(
            f"sensor locations are nearly collinear (spread ratio {ratio:.2e}); "
            "rotation biases may not be fully observable", stacklevel=3)
