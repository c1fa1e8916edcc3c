"""Config ingestion, experiment presets, and persistent run outputs.

Configs are JSON documents; every emitted file (trajectory CSV, metrics,
resolved config) is a pure function of the run, so a replay from the
emitted config reproduces the files byte for byte.  Floats are written with
17 significant digits for lossless double round-trips.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .engine import CostReport, SimTrace
from .model import (
    ConfigError,
    ControlParams,
    FixedTopology,
    FormationSpec,
    RandomStronglyConnected,
    SimConfig,
    UniformFading,
)

__all__ = [
    "parse_config",
    "parse_config_dict",
    "preset",
    "PRESETS",
    "resolved_config_dict",
    "config_json",
    "emit_outputs",
    "TRAJECTORY_HEADER",
]

TRAJECTORY_HEADER = "t,agent,x,y,theta_x,theta_y"


def _fmt(value) -> str:
    """One JSON token with floats at 17 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not np.isfinite(v):
            raise ValueError("cannot serialize non-finite float")
        return format(v, ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"unsupported scalar {type(value).__name__}")


def _dump(value, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_dump(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        flat = all(not isinstance(v, (dict, list, tuple)) for v in value)
        if flat:
            return "[" + ", ".join(_fmt(v) for v in value) + "]"
        items = [f"{inner}{_dump(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return _fmt(value)


def dump_json(document) -> str:
    """Deterministic JSON text (insertion order, 17-digit floats)."""
    return _dump(document) + "\n"


# --------------------------
# Parsing
# --------------------------


def _gain(raw, n, path, problems):
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return float(raw)
    if isinstance(raw, list) and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw
    ):
        if len(raw) != n:
            problems.append(f"{path}: expected {n} entries, got {len(raw)}")
            return 1.0
        return [float(v) for v in raw]
    problems.append(f"{path}: must be a positive number or list of {n} numbers")
    return 1.0


def parse_config_dict(doc: dict) -> SimConfig:
    """Validate a config document; raises ConfigError naming offending fields."""
    problems = []
    if not isinstance(doc, dict):
        raise ConfigError(["config: top level must be an object"])

    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        problems.append(f"n: must be an integer >= 2, got {n!r}")
        raise ConfigError(problems)

    disp = doc.get("formation", {}).get("displacements") if isinstance(doc.get("formation"), dict) else None
    if disp is None:
        problems.append("formation.displacements: missing")
        formation = None
    else:
        try:
            formation = FormationSpec(disp)
            if formation.n != n:
                problems.append(
                    f"formation.displacements: {formation.n} rows but n={n}"
                )
        except (ValueError, TypeError) as exc:
            problems.append(f"formation.displacements: {exc}")
            formation = None

    params = None
    p = doc.get("params")
    if not isinstance(p, dict):
        problems.append("params: missing section")
    else:
        sigma = p.get("sigma")
        if not isinstance(sigma, (int, float)) or isinstance(sigma, bool) or not (0.0 < sigma < 1.0):
            problems.append(
                f"params.sigma: must lie strictly in the open interval (0, 1), got {sigma!r}"
            )
        else:
            try:
                params = ControlParams(
                    _gain(p.get("a_x", 0.5), n, "params.a_x", problems),
                    _gain(p.get("a_y", 0.5), n, "params.a_y", problems),
                    _gain(p.get("b_x", 0.5), n, "params.b_x", problems),
                    _gain(p.get("b_y", 0.5), n, "params.b_y", problems),
                    sigma,
                ).resolved(n)
            except ValueError as exc:
                problems.append(f"params: {exc}")

    bounds = doc.get("delta_bounds", [10.0, 30.0])
    if (
        not isinstance(bounds, list)
        or len(bounds) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in bounds)
        or not (0.0 < bounds[0] <= bounds[1])
    ):
        problems.append(f"delta_bounds: need [lower, upper] with 0 < lower <= upper, got {bounds!r}")
        bounds = [10.0, 30.0]

    fading = UniformFading(0.0, 1.0)
    f = doc.get("fading", {"kind": "uniform", "lo": 0.0, "hi": 1.0})
    if not isinstance(f, dict) or f.get("kind", "uniform") != "uniform":
        problems.append("fading.kind: only 'uniform' is supported")
    else:
        try:
            fading = UniformFading(float(f.get("lo", 0.0)), float(f.get("hi", 1.0)))
        except (TypeError, ValueError) as exc:
            problems.append(f"fading: {exc}")

    topology = RandomStronglyConnected(0.2)
    t = doc.get("topology", {"mode": "random_strongly_connected"})
    mode = t.get("mode") if isinstance(t, dict) else None
    if mode == "fixed":
        try:
            topology = FixedTopology(tuple(map(tuple, t.get("arcs", []))))
        except (TypeError, ValueError) as exc:
            problems.append(f"topology.arcs: {exc}")
    elif mode == "random_strongly_connected":
        try:
            topology = RandomStronglyConnected(float(t.get("extra_arc_probability", 0.2)))
        except (TypeError, ValueError) as exc:
            problems.append(f"topology.extra_arc_probability: {exc}")
    else:
        problems.append(
            f"topology.mode: must be 'fixed' or 'random_strongly_connected', got {mode!r}"
        )

    initial = doc.get("initial", {})
    init_pos = initial.get("positions") if isinstance(initial, dict) else None
    init_theta = initial.get("theta") if isinstance(initial, dict) else None
    init_box = initial.get("box", 5.0) if isinstance(initial, dict) else 5.0

    if problems or formation is None or params is None:
        raise ConfigError(problems or ["config: invalid"])

    try:
        return SimConfig(
            n=n,
            formation=formation,
            params=params,
            delta_bounds=(float(bounds[0]), float(bounds[1])),
            fading=fading,
            topology=topology,
            seed=int(doc.get("seed", 0)),
            max_rounds=int(doc.get("max_rounds", 50)),
            convergence_tol=float(doc.get("convergence_tol", 1e-2)),
            sample_rate=int(doc.get("sample_rate", 50)),
            initial_positions=None if init_pos is None else np.asarray(init_pos, dtype=float),
            initial_theta=None if init_theta is None else np.asarray(init_theta, dtype=float),
            initial_box=float(init_box),
            matrix_shadow=bool(doc.get("matrix_shadow", True)),
            certify_rounds=bool(doc.get("certify_rounds", True)),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError([str(exc)])


def parse_config(source) -> SimConfig:
    """Parse a config from a file path or inline JSON text."""
    if isinstance(source, Path):
        if not source.exists():
            raise ConfigError([f"config file not found: {source}"])
        text = source.read_text()
    else:
        stripped = str(source).strip()
        if stripped.startswith("{"):
            text = stripped
        else:
            path = Path(source)
            if not path.exists():
                raise ConfigError([f"config file not found: {source}"])
            text = path.read_text()
    if not text.strip():
        raise ConfigError(["config: empty document"])
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config: malformed JSON ({exc})"])
    return parse_config_dict(doc)


# --------------------------
# Presets
# --------------------------


def _hexagon6() -> SimConfig:
    # Six agents forming a unit-circumradius hexagon: homogeneous gains
    # a = b = 0.5, sigma = 0.8, fading U(0,1), intervals U(10,30) s, fresh
    # strongly connected topology each round.  Graph density and the initial
    # spread are free parameters; these values make the median run converge
    # within 8 rounds over a 100-seed battery at the default tolerance.
    n = 6
    return SimConfig(
        n=n,
        formation=FormationSpec.regular_polygon(n, circumradius=1.0),
        params=ControlParams.homogeneous(n, a=0.5, b=0.5, sigma=0.8),
        delta_bounds=(10.0, 30.0),
        fading=UniformFading(0.0, 1.0),
        topology=RandomStronglyConnected(extra_arc_probability=0.6),
        seed=1,
        max_rounds=50,
        convergence_tol=1e-2,
        sample_rate=50,
        initial_box=0.75,
    )


PRESETS = {"hexagon6": _hexagon6}


def preset(name: str) -> SimConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError([f"unknown preset {name!r}; available: {sorted(PRESETS)}"])


# --------------------------
# Serialization
# --------------------------


def resolved_config_dict(config: SimConfig) -> dict:
    """Plain document that parses back to an equal config (seed included)."""
    if isinstance(config.topology, FixedTopology):
        topology = {"mode": "fixed", "arcs": [list(a) for a in sorted(config.topology.arcs)]}
    else:
        topology = {
            "mode": "random_strongly_connected",
            "extra_arc_probability": config.topology.extra_arc_probability,
        }
    initial = {"box": config.initial_box}
    if config.initial_positions is not None:
        initial["positions"] = [list(row) for row in np.asarray(config.initial_positions)]
    if config.initial_theta is not None:
        initial["theta"] = [list(row) for row in np.asarray(config.initial_theta)]
    return {
        "n": config.n,
        "seed": config.seed,
        "max_rounds": config.max_rounds,
        "convergence_tol": config.convergence_tol,
        "sample_rate": config.sample_rate,
        "formation": {"displacements": [list(row) for row in config.formation.displacements]},
        "params": {
            "a_x": list(config.params.a_x),
            "a_y": list(config.params.a_y),
            "b_x": list(config.params.b_x),
            "b_y": list(config.params.b_y),
            "sigma": config.params.sigma,
        },
        "delta_bounds": list(config.delta_bounds),
        "fading": {"kind": "uniform", "lo": config.fading.lo, "hi": config.fading.hi},
        "topology": topology,
        "initial": initial,
        "matrix_shadow": config.matrix_shadow,
        "certify_rounds": config.certify_rounds,
    }


def config_json(config: SimConfig) -> str:
    return dump_json(resolved_config_dict(config))


def metrics_dict(trace: SimTrace, report: CostReport, config: SimConfig) -> dict:
    rounds = []
    for summary in trace.round_summaries:
        entry = {
            "k": summary.k,
            "t_k": summary.t_k,
            "delta": summary.delta,
            "formation_error": summary.formation_error,
            "g_broadcast_cumulative": summary.g_broadcast_cumulative,
            "g_orthogonal_cumulative": summary.g_orthogonal_cumulative,
        }
        if summary.certificates is not None:
            entry["certificates"] = summary.certificates
        rounds.append(entry)
    return {
        "converged_round": trace.converged_round,
        "consensus_point": None if trace.consensus_point is None else list(trace.consensus_point),
        "rounds_executed": trace.rounds_executed(),
        "g_broadcast_cumulative": report.cumulative_broadcast,
        "g_orthogonal_cumulative": report.cumulative_orthogonal,
        "formation": {"displacements": [list(row) for row in config.formation.displacements]},
        "rounds": rounds,
    }


def trajectory_csv(trace: SimTrace) -> str:
    lines = [TRAJECTORY_HEADER]
    for s in trace.samples:
        lines.append(
            f"{s.t:.17g},{s.agent},{s.x:.17g},{s.y:.17g},{s.theta_x:.17g},{s.theta_y:.17g}"
        )
    return "\n".join(lines) + "\n"


def emit_outputs(trace: SimTrace, report: CostReport, config: SimConfig, out_dir) -> dict:
    """Write trajectory.csv, metrics.json, and the resolved config.json.

    Returns {"trajectory": path, "metrics": path, "config": path}.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "trajectory": out / "trajectory.csv",
            "metrics": out / "metrics.json",
            "config": out / "config.json",
        }
        paths["trajectory"].write_text(trajectory_csv(trace))
        paths["metrics"].write_text(dump_json(metrics_dict(trace, report, config)))
        paths["config"].write_text(config_json(config))
    except OSError as exc:
        raise OSError(f"cannot write outputs under {out}: {exc}") from exc
    return paths
