"""Monte-Carlo experiment harness: configs, runs, sweeps, reports.

An experiment draws random per-sensor biases and measurement noise for
each realization, runs the selected calibration algorithm on simulated
batches, and aggregates per-angle RMS errors.  Everything is seeded:
the same config and seed reproduce the same outputs byte for byte.
"""

import csv
import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import calibration
from .calibration import (CalibrationResult, MeasurementBatch,
                          SensorMeasurements, StoppingCriteria, pairwise_cost)
from .errors import ConfigError, ExperimentError, RegistrationError
from .geometry import (EulerAngles, geodesic_angle, rotation_to_euler,
                       wrap_angle)
from .scenario import (SensorTruth, TrajectorySpec, build_batch,
                       generate_trajectory, sample_biases,
                       sample_sensor_locations)
from .wahba import wahba_cost

RAD_TO_MRAD = 1000.0

# selector -> (solver kind, required sensor kind, sensor count constraint)
ALGORITHMS = {
    "alg1": ("relative", "3d", "=2"),      # one 3D sensor against a 3D reference
    "alg2": ("relative", "hetero", "=2"),  # bearing-only sensor against a 3D reference
    "alg3": ("absolute", "3d", "=2"),      # 3D pair, gauge-ambiguous
    "alg4": ("absolute", "3d", ">=3"),     # 3D network
    "alg6": ("absolute", "2d", "=2"),      # bearing-only pair, gauge-ambiguous
    "alg7": ("absolute", "2d", ">=3"),     # bearing-only network
}

SWEEP_AXES = ("sensor_count", "noise_std", "sample_count")


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one Monte-Carlo study.

    Key names carry explicit units.  ``sensor_kind`` is "3d", "2d", or
    "hetero" (sensor 0 bearing-only, sensor 1 with ranges).  Leave
    ``sensor_locations_m`` None to draw a seeded random constellation in
    a ``placement_box_km`` box around the trajectory; leave
    ``fixed_biases_deg`` None to redraw biases per realization from
    +/-[bias_low_deg, bias_high_deg] with random signs.
    ``sample_count`` thins the default trajectory to that many epochs.
    """

    algorithm: str = "alg4"
    seed: int = 0
    mc_runs: int = 50
    sensor_count: int = 4
    sensor_kind: str = "3d"
    sigma_range_m: float = 10.0
    sigma_az_mrad: float = 3.0
    sigma_el_mrad: float = 3.0
    bias_low_deg: float = 1.0
    bias_high_deg: float = 4.0
    fixed_biases_deg: list | None = None
    sensor_locations_m: list | None = None
    placement_box_km: tuple = (20.0, 20.0, 1.0)
    duration_s: float = 900.0
    sample_period_s: float = 10.0
    sample_count: int | None = None
    rel_cost_tol: float = 1e-3
    max_iterations: int = 100
    out_dir: str | None = None

    def __post_init__(self):
        self.placement_box_km = tuple(float(v) for v in self.placement_box_km)
        if self.fixed_biases_deg is not None:
            self.fixed_biases_deg = [[float(v) for v in row]
                                     for row in self.fixed_biases_deg]
        if self.sensor_locations_m is not None:
            self.sensor_locations_m = [[float(v) for v in row]
                                       for row in self.sensor_locations_m]
        self.validate()

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; "
                              f"choose one of {sorted(ALGORITHMS)}")
        _, kind, count = ALGORITHMS[self.algorithm]
        if self.sensor_kind != kind:
            raise ConfigError(f"{self.algorithm} needs sensor_kind={kind!r}, "
                              f"got {self.sensor_kind!r}")
        if count == "=2" and self.sensor_count != 2:
            raise ConfigError(f"{self.algorithm} needs exactly 2 sensors, "
                              f"got {self.sensor_count}")
        if count == ">=3" and self.sensor_count < 3:
            raise ConfigError(f"{self.algorithm} needs at least 3 sensors, "
                              f"got {self.sensor_count}")
        if self.mc_runs < 1:
            raise ConfigError("mc_runs must be at least 1")
        if min(self.sigma_range_m, self.sigma_az_mrad, self.sigma_el_mrad) < 0:
            raise ConfigError("noise sigmas must be nonnegative")
        if not 0 <= self.bias_low_deg <= self.bias_high_deg:
            raise ConfigError("bias bounds must satisfy 0 <= low <= high")
        if self.fixed_biases_deg is not None:
            if len(self.fixed_biases_deg) != self.sensor_count or \
                    any(len(row) != 3 for row in self.fixed_biases_deg):
                raise ConfigError("fixed_biases_deg must be sensor_count rows of "
                                  "[yaw, pitch, roll] degrees")
        if self.sensor_locations_m is not None:
            if len(self.sensor_locations_m) != self.sensor_count or \
                    any(len(row) != 3 for row in self.sensor_locations_m):
                raise ConfigError("sensor_locations_m must be sensor_count rows "
                                  "of [x, y, z] meters")
        if self.sample_count is not None and self.sample_count < 2:
            raise ConfigError("sample_count must be at least 2")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["placement_box_km"] = list(self.placement_box_km)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def sensor_kinds(self) -> list:
        if self.sensor_kind == "hetero":
            return ["2d", "3d"]
        return [self.sensor_kind] * self.sensor_count

    def stopping(self) -> StoppingCriteria:
        return StoppingCriteria(rel_cost_tol=self.rel_cost_tol,
                                max_iterations=self.max_iterations)


@dataclass
class RunRecord:
    """Outcome of one Monte-Carlo realization."""

    run: int
    converged: bool
    iterations: int
    final_cost: float
    cost_trace: list
    angle_errors_mrad: np.ndarray | None   # (S, 3) wrapped est - truth
    geodesic_mrad: np.ndarray | None       # (S,)
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None


@dataclass
class ErrorReport:
    """Aggregated experiment outcome; one RunRecord per realization."""

    config: ExperimentConfig
    runs: list
    rms_mrad: np.ndarray             # (3,) across runs and sensors
    per_sensor_rms_mrad: np.ndarray  # (S, 3)
    rms_geodesic_mrad: float
    success_rate: float


def run_experiment(cfg: ExperimentConfig) -> ErrorReport:
    """Run the full seeded Monte-Carlo study described by ``cfg``.

    Realizations are scored against the simulated truth: per-sensor
    Euler-angle errors (wrapped), plus the geodesic rotation angle.
    Failed realizations are recorded and skipped in the aggregates; the
    experiment itself fails if fewer than 80% succeed.
    """
    cfg.validate()
    spec = TrajectorySpec(duration=cfg.duration_s, sample_period=cfg.sample_period_s)
    points = generate_trajectory(spec)
    if cfg.sample_count is not None:
        points = points[_thin_indices(points.shape[0], cfg.sample_count)]

    master = np.random.SeedSequence(cfg.seed)
    placement_child, *run_children = master.spawn(1 + cfg.mc_runs)
    if cfg.sensor_locations_m is not None:
        locations = np.asarray(cfg.sensor_locations_m, dtype=float)
    else:
        box = tuple(1000.0 * v for v in cfg.placement_box_km)
        locations = sample_sensor_locations(
            cfg.sensor_count, placement_child,
            center=points[:, :2].mean(axis=0), box=box)

    kinds = cfg.sensor_kinds()
    stopping = cfg.stopping()
    runs = []
    for r, child in enumerate(run_children):
        bias_ss, noise_ss = child.spawn(2)
        biases = _draw_biases(cfg, np.random.default_rng(bias_ss))
        sensors = [
            SensorTruth(location=tuple(locations[s]), kind=kinds[s],
                        bias=biases[s],
                        sigma_range=cfg.sigma_range_m,
                        sigma_az=cfg.sigma_az_mrad / RAD_TO_MRAD,
                        sigma_el=cfg.sigma_el_mrad / RAD_TO_MRAD)
            for s in range(cfg.sensor_count)
        ]
        batch, truth = build_batch(points, sensors, noise_ss)
        runs.append(_score_run(r, cfg, batch, truth, stopping))

    ok = [rec for rec in runs if rec.ok]
    success_rate = len(ok) / cfg.mc_runs
    if success_rate < 0.8:
        raise ExperimentError(
            f"only {len(ok)}/{cfg.mc_runs} realizations succeeded")

    angle_err = np.stack([rec.angle_errors_mrad for rec in ok])  # (R, S, 3)
    geo_err = np.stack([rec.geodesic_mrad for rec in ok])        # (R, S)
    return ErrorReport(
        config=cfg,
        runs=runs,
        rms_mrad=np.sqrt(np.mean(angle_err ** 2, axis=(0, 1))),
        per_sensor_rms_mrad=np.sqrt(np.mean(angle_err ** 2, axis=0)),
        rms_geodesic_mrad=float(np.sqrt(np.mean(geo_err ** 2))),
        success_rate=success_rate)


def _score_run(r, cfg, batch, truth, stopping) -> RunRecord:
    try:
        result = _run_algorithm(cfg.algorithm, batch, stopping)
        n_sensors = batch.n_sensors
        errors = np.empty((n_sensors, 3))
        geodesic = np.empty(n_sensors)
        for s in range(n_sensors):
            est = result.estimates[s]
            est_angles = np.asarray(rotation_to_euler(est))
            true_angles = np.asarray(truth.biases[s])
            errors[s] = wrap_angle(est_angles - true_angles) * RAD_TO_MRAD
            geodesic[s] = geodesic_angle(est, truth.rotations[s]) * RAD_TO_MRAD
        return RunRecord(run=r, converged=result.converged,
                         iterations=result.iterations,
                         final_cost=result.cost_trace[-1],
                         cost_trace=list(result.cost_trace),
                         angle_errors_mrad=errors, geodesic_mrad=geodesic)
    except RegistrationError as exc:
        return RunRecord(run=r, converged=False, iterations=0,
                         final_cost=math.nan, cost_trace=[],
                         angle_errors_mrad=None, geodesic_mrad=None,
                         failure=f"{type(exc).__name__}: {exc}")


def _run_algorithm(algorithm, batch, stopping) -> CalibrationResult:
    if algorithm == "alg3":
        return calibration.absolute_3d_pair(batch, stopping)
    if algorithm == "alg4":
        return calibration.absolute_3d(batch, stopping)
    if algorithm == "alg6":
        return calibration.absolute_2d_pair(batch, stopping)
    if algorithm == "alg7":
        return calibration.absolute_2d(batch, stopping)
    if algorithm == "alg1":
        rot = calibration.relative_3d(batch)
        cost = pairwise_cost([rot, np.eye(3)], batch)
        return CalibrationResult(estimates=[rot, np.eye(3)], cost_trace=[cost],
                                 iterations=1, converged=True)
    if algorithm == "alg2":
        rot = calibration.relative_hetero(batch)
        dirs = batch.sensors[0].directions()
        shifted = batch.sensors[1].local_positions() \
            + (batch.locations[1] - batch.locations[0])
        unit = shifted / np.linalg.norm(shifted, axis=1)[:, np.newaxis]
        cost = wahba_cost(rot, dirs, unit)
        return CalibrationResult(estimates=[rot, np.eye(3)], cost_trace=[cost],
                                 iterations=1, converged=True)
    raise ConfigError(f"unknown algorithm {algorithm!r}")


def _draw_biases(cfg, rng) -> list:
    if cfg.fixed_biases_deg is not None:
        return [EulerAngles(*(math.radians(v) for v in row))
                for row in cfg.fixed_biases_deg]
    biases = sample_biases(cfg.sensor_count, rng,
                           low=math.radians(cfg.bias_low_deg),
                           high=math.radians(cfg.bias_high_deg))
    if ALGORITHMS[cfg.algorithm][0] == "relative":
        # the reference sensor is assumed unbiased by these algorithms
        biases[1] = EulerAngles(0.0, 0.0, 0.0)
    return biases


def _thin_indices(n, m) -> np.ndarray:
    if m > n:
        raise ConfigError(f"sample_count {m} exceeds available epochs {n}")
    return np.unique(np.round(np.linspace(0, n - 1, m)).astype(int))


def sweep(cfg: ExperimentConfig, axis: str, values) -> list:
    """Run one experiment per axis value; returns [(value, ErrorReport)].

    Every point reuses the same base seed, so differences between points
    come from the swept parameter alone; with random placement the
    constellations for different sensor counts are nested subsets.
    """
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")
    results = []
    for value in values:
        if axis == "sensor_count":
            point = dataclasses.replace(cfg, sensor_count=int(value))
        elif axis == "noise_std":
            point = dataclasses.replace(cfg, sigma_az_mrad=float(value),
                                        sigma_el_mrad=float(value))
        else:
            point = dataclasses.replace(cfg, sample_count=int(value))
        results.append((value, run_experiment(point)))
    return results


# ---------------------------------------------------------------------------
# report emission

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and math.isnan(value):
        return ""
    return repr(float(value))


def emit_reports(report: ErrorReport, out_dir) -> dict:
    """Write runs.csv, summary.json and cost_trace.csv under ``out_dir``.

    runs.csv has one row per (realization, sensor); failed realizations
    keep their rows with empty error cells.  cost_trace.csv has one
    column per realization, padded with empty cells once a run has
    stopped.  Returns the written paths.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = report.config
    n_sensors = cfg.sensor_count

    runs_path = out / "runs.csv"
    with open(runs_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run", "sensor", "err_psi_mrad", "err_theta_mrad",
                         "err_phi_mrad", "geodesic_mrad", "iterations",
                         "final_cost", "converged"])
        for rec in report.runs:
            for s in range(n_sensors):
                if rec.ok:
                    err = rec.angle_errors_mrad[s]
                    row = [rec.run, s, _fmt(err[0]), _fmt(err[1]), _fmt(err[2]),
                           _fmt(rec.geodesic_mrad[s]), rec.iterations,
                           _fmt(rec.final_cost), rec.converged]
                else:
                    row = [rec.run, s, "", "", "", "", rec.iterations, "",
                           rec.converged]
                writer.writerow(row)

    trace_path = out / "cost_trace.csv"
    with open(trace_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"run_{rec.run}" for rec in report.runs])
        longest = max((len(rec.cost_trace) for rec in report.runs), default=0)
        for i in range(longest):
            writer.writerow([
                _fmt(rec.cost_trace[i]) if i < len(rec.cost_trace) else ""
                for rec in report.runs])

    summary_path = out / "summary.json"
    summary = {
        "config": cfg.to_dict(),
        "success_rate": report.success_rate,
        "rms_mrad": {
            "psi": report.rms_mrad[0],
            "theta": report.rms_mrad[1],
            "phi": report.rms_mrad[2],
        },
        "rms_geodesic_mrad": report.rms_geodesic_mrad,
        "per_sensor_rms_mrad": report.per_sensor_rms_mrad.tolist(),
        "iterations": [rec.iterations for rec in report.runs],
        "converged": [rec.converged for rec in report.runs],
        "failures": {str(rec.run): rec.failure
                     for rec in report.runs if not rec.ok},
    }
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")

    return {"runs_csv": runs_path, "cost_trace_csv": trace_path,
            "summary_json": summary_path}


def emit_sweep_reports(results, axis: str, out_dir) -> dict:
    """Write sweep.csv (one row per axis value) and sweep_summary.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    sweep_path = out / "sweep.csv"
    with open(sweep_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([axis, "rms_psi_mrad", "rms_theta_mrad", "rms_phi_mrad",
                         "rms_geodesic_mrad", "success_rate", "mean_iterations"])
        for value, report in results:
            iters = [rec.iterations for rec in report.runs if rec.ok]
            writer.writerow([
                value, _fmt(report.rms_mrad[0]), _fmt(report.rms_mrad[1]),
                _fmt(report.rms_mrad[2]), _fmt(report.rms_geodesic_mrad),
                _fmt(report.success_rate), _fmt(float(np.mean(iters)))])

    summary_path = out / "sweep_summary.json"
    payload = {
        "axis": axis,
        "values": [value for value, _ in results],
        "seed_policy": "every sweep point reuses the base config seed; random "
                       "sensor constellations are nested subsets across counts",
        "base_config": results[0][1].config.to_dict() if results else None,
        "points": [{
            "value": value,
            "rms_mrad": report.rms_mrad.tolist(),
            "rms_geodesic_mrad": report.rms_geodesic_mrad,
            "success_rate": report.success_rate,
        } for value, report in results],
    }
    with open(summary_path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return {"sweep_csv": sweep_path, "sweep_summary_json": summary_path}


# ---------------------------------------------------------------------------
# batch file round trip (the on-disk ingestion format)

def write_batch(batch: MeasurementBatch, csv_path, sidecar_path) -> None:
    """Write a batch as the documented CSV + sensor sidecar JSON pair.

    CSV columns: sensor_id, epoch_index, rng_m (empty for bearing-only
    sensors), az_rad, el_rad.
    """
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sensor_id", "epoch_index", "rng_m", "az_rad", "el_rad"])
        for s, meas in enumerate(batch.sensors):
            for i in range(meas.n):
                rng_cell = _fmt(meas.rng[i]) if meas.is_3d else ""
                writer.writerow([s, i, rng_cell,
                                 _fmt(meas.az[i]), _fmt(meas.el[i])])
    sensors = [{
        "id": s,
        "location_m": [float(v) for v in batch.locations[s]],
        "kind": "3d" if batch.sensors[s].is_3d else "2d",
    } for s in range(batch.n_sensors)]
    with open(sidecar_path, "w") as fh:
        json.dump({"sensors": sensors}, fh, indent=2)
        fh.write("\n")


def read_batch(csv_path, sidecar_path) -> MeasurementBatch:
    """Read a batch written by ``write_batch`` (or recorded real data)."""
    with open(sidecar_path) as fh:
        sidecar = json.load(fh)
    locations = {int(s["id"]): s["location_m"] for s in sidecar["sensors"]}

    rows = {}
    with open(csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            s = int(row["sensor_id"])
            rng_cell = row["rng_m"].strip()
            rows.setdefault(s, []).append(
                (int(row["epoch_index"]),
                 float(rng_cell) if rng_cell else None,
                 float(row["az_rad"]), float(row["el_rad"])))

    if set(rows) != set(locations):
        raise ValueError("sensor ids in CSV and sidecar JSON do not match")
    sensors = []
    for s in sorted(rows):
        entries = sorted(rows[s])
        if [e[0] for e in entries] != list(range(len(entries))):
            raise ValueError(f"sensor {s}: epoch indices must be 0..n-1")
        ranges = [e[1] for e in entries]
        has_rng = [r is not None for r in ranges]
        if any(has_rng) and not all(has_rng):
            raise ValueError(f"sensor {s}: rng_m must be all present or all empty")
        sensors.append(SensorMeasurements(
            az=np.array([e[2] for e in entries]),
            el=np.array([e[3] for e in entries]),
            rng=np.array(ranges, dtype=float) if all(has_rng) else None))
    ordered = sorted(rows)
    return MeasurementBatch(
        sensors=tuple(sensors),
        locations=np.array([locations[s] for s in ordered], dtype=float))
