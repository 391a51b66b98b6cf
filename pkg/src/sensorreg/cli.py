"""Command-line front end: simulate, calibrate, experiment, sweep."""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import calibration
from .errors import GimbalLockError, RegistrationError
from .experiments import (ALGORITHMS, ExperimentConfig, emit_reports,
                          emit_sweep_reports, read_batch, run_experiment,
                          sweep, write_batch, _draw_biases)
from .geometry import rotation_to_euler
from .scenario import SensorTruth, TrajectorySpec, build_batch, \
    generate_trajectory, sample_sensor_locations


def _load_config(args) -> ExperimentConfig:
    if args.config:
        with open(args.config) as fh:
            cfg = ExperimentConfig.from_dict(json.load(fh))
    else:
        cfg = ExperimentConfig()
    # flags beat file values
    import dataclasses
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.algorithm is not None:
        updates["algorithm"] = args.algorithm
    if args.sensors is not None:
        updates["sensor_count"] = args.sensors
    if args.mc_runs is not None:
        updates["mc_runs"] = args.mc_runs
    if args.out_dir is not None:
        updates["out_dir"] = args.out_dir
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _add_common(parser):
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--algorithm", choices=sorted(ALGORITHMS), default=None)
    parser.add_argument("--sensors", type=int, default=None,
                        help="number of sensors")
    parser.add_argument("--mc-runs", type=int, default=None)
    parser.add_argument("--out-dir", default=None)


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    out = Path(cfg.out_dir or "simulated")
    out.mkdir(parents=True, exist_ok=True)

    spec = TrajectorySpec(duration=cfg.duration_s, sample_period=cfg.sample_period_s)
    points = generate_trajectory(spec)
    master = np.random.SeedSequence(cfg.seed)
    placement_child, run_child = master.spawn(2)
    if cfg.sensor_locations_m is not None:
        locations = np.asarray(cfg.sensor_locations_m, dtype=float)
    else:
        locations = sample_sensor_locations(
            cfg.sensor_count, placement_child,
            center=points[:, :2].mean(axis=0),
            box=tuple(1000.0 * v for v in cfg.placement_box_km))
    bias_ss, noise_ss = run_child.spawn(2)
    biases = _draw_biases(cfg, np.random.default_rng(bias_ss))
    kinds = cfg.sensor_kinds()
    sensors = [SensorTruth(location=tuple(locations[s]), kind=kinds[s],
                           bias=biases[s],
                           sigma_range=cfg.sigma_range_m,
                           sigma_az=cfg.sigma_az_mrad / 1000.0,
                           sigma_el=cfg.sigma_el_mrad / 1000.0)
               for s in range(cfg.sensor_count)]
    batch, truth = build_batch(points, sensors, noise_ss)

    write_batch(batch, out / "batch.csv", out / "sensors.json")
    truth_payload = {
        "sensors": [{
            "id": s,
            "bias_deg": [math.degrees(a) for a in truth.biases[s]],
            "rotation": truth.rotations[s].tolist(),
        } for s in range(len(sensors))],
        "target_positions_m": truth.target_positions.tolist(),
    }
    with open(out / "truth.json", "w") as fh:
        json.dump(truth_payload, fh, indent=2)
        fh.write("\n")
    print(f"wrote {out / 'batch.csv'}, {out / 'sensors.json'}, {out / 'truth.json'}")
    return 0


def _infer_algorithm(batch) -> str:
    kinds = [m.is_3d for m in batch.sensors]
    if all(kinds):
        return "alg3" if batch.n_sensors == 2 else "alg4"
    if not any(kinds):
        return "alg6" if batch.n_sensors == 2 else "alg7"
    if batch.n_sensors == 2 and not kinds[0] and kinds[1]:
        return "alg2"
    raise RegistrationError(
        "cannot infer an algorithm for this mix of sensor kinds; "
        "pass --algorithm explicitly")


def cmd_calibrate(args) -> int:
    batch = read_batch(args.batch, args.sensors_file)
    algorithm = args.algorithm or _infer_algorithm(batch)
    stopping = calibration.StoppingCriteria()

    from .experiments import _run_algorithm
    result = _run_algorithm(algorithm, batch, stopping)

    sensors = []
    for s, rot in enumerate(result.estimates):
        entry = {"id": s, "rotation": np.asarray(rot).tolist()}
        try:
            angles = rotation_to_euler(rot)
            entry["yaw_deg"] = math.degrees(angles.psi)
            entry["pitch_deg"] = math.degrees(angles.theta)
            entry["roll_deg"] = math.degrees(angles.phi)
        except GimbalLockError:
            pass
        sensors.append(entry)
    payload = {
        "algorithm": algorithm,
        "converged": result.converged,
        "iterations": result.iterations,
        "gauge_ambiguous": result.gauge_ambiguous,
        "dropped_indices": result.dropped_indices,
        "cost_trace": [float(c) for c in result.cost_trace],
        "sensors": sensors,
    }
    out_path = Path(args.out)
    if out_path.parent != Path("."):
        out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(f"wrote {out_path} ({algorithm}, converged={result.converged}, "
          f"{result.iterations} iterations)")
    return 0


def cmd_experiment(args) -> int:
    cfg = _load_config(args)
    report = run_experiment(cfg)
    out = cfg.out_dir or "results"
    paths = emit_reports(report, out)
    rms = ", ".join(f"{k}={v:.3f}" for k, v in
                    zip(("psi", "theta", "phi"), report.rms_mrad))
    print(f"{cfg.algorithm}: {cfg.mc_runs} runs, success rate "
          f"{report.success_rate:.0%}, RMS mRad: {rms}")
    for p in paths.values():
        print(f"wrote {p}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    values = [float(v) for v in args.values.split(",")]
    results = sweep(cfg, args.axis, values)
    out = cfg.out_dir or "results"
    paths = emit_sweep_reports(results, args.axis, out)
    for value, report in results:
        rms = ", ".join(f"{v:.3f}" for v in report.rms_mrad)
        print(f"{args.axis}={value:g}: RMS mRad ({rms})")
    for p in paths.values():
        print(f"wrote {p}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sensorreg",
        description="Angular misalignment registration for sensor networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="simulate a measurement batch")
    _add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_cal = sub.add_parser("calibrate", help="estimate rotations from a batch file")
    p_cal.add_argument("--batch", required=True, help="batch CSV file")
    p_cal.add_argument("--sensors-file", required=True,
                       help="sidecar JSON with sensor locations")
    p_cal.add_argument("--algorithm", choices=sorted(ALGORITHMS), default=None,
                       help="default: inferred from sensor kinds and count")
    p_cal.add_argument("--out", default="result.json")
    p_cal.set_defaults(func=cmd_calibrate)

    p_exp = sub.add_parser("experiment", help="run a Monte-Carlo study")
    _add_common(p_exp)
    p_exp.set_defaults(func=cmd_experiment)

    p_swp = sub.add_parser("sweep", help="run experiments along one axis")
    _add_common(p_swp)
    p_swp.add_argument("--axis", required=True,
                       choices=("sensor_count", "noise_std", "sample_count"))
    p_swp.add_argument("--values", required=True,
                       help="comma-separated axis values, e.g. 1,2,3,4,5")
    p_swp.set_defaults(func=cmd_sweep)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RegistrationError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
