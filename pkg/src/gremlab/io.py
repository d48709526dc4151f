"""Config parsing and the delimited output formats.

One JSON config fully determines a run; unknown keys are rejected so typos
fail loudly.  All writers format floats via repr-faithful %.17g and never
embed timestamps, so re-running a command reproduces files byte for byte.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from gremlab.hierarchy import OrderParameter, validate_order_parameter


class ConfigError(ValueError):
    """Invalid or unknown configuration content."""


COMMON_KEYS = {"model", "seed", "out"}
COMMAND_KEYS = {
    "validate": set(),
    "tstar": {"h_grid"},
    "coarse-grain": {"h"},
    "free-energy": {"h", "betas"},
    "simulate": {"h", "betas", "N", "replicas", "zero_disorder", "top_k", "size_cap"},
    "fluctuations": {"h", "betas", "N", "replicas", "top_k", "interval",
                     "cascade_samples", "cascade_K", "size_cap"},
    "cascade": {"h", "m", "K", "samples", "beta", "top_k"},
}


def load_config(path: str | Path, command: str) -> dict:
    """Read a JSON config and reject keys the command does not understand."""
    p = Path(path)
    try:
        raw = json.loads(p.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    allowed = COMMON_KEYS | COMMAND_KEYS[command]
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
    return raw


def require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"missing required config key: {key!r}")
    return cfg[key]


def model_from_config(cfg: dict) -> OrderParameter:
    spec = require(cfg, "model")
    if not isinstance(spec, dict) or set(spec) != {"x", "q"}:
        raise ConfigError("model must be an object with exactly the arrays 'x' and 'q'")
    try:
        return validate_order_parameter(spec["x"], spec["q"])
    except ValueError as e:
        raise ConfigError(f"invalid model: {e}")


def betas_from_config(cfg: dict) -> tuple[float, ...]:
    betas = require(cfg, "betas")
    try:
        out = tuple(float(b) for b in betas)
    except (TypeError, ValueError):
        raise ConfigError("betas must be an array of numbers")
    if not out or any(b <= 0 for b in out):
        raise ConfigError("betas must be positive")
    if any(b2 <= b1 for b1, b2 in zip(out, out[1:])):
        raise ConfigError("betas must be strictly increasing")
    return out


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def write_csv(path: str | Path, headers, rows) -> None:
    """Plain delimited table; floats at full precision, no quoting needed."""
    lines = [",".join(headers)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_points(path: str | Path, sample) -> None:
    """Two-column point file: header line, then rank,value rows (rank from 1)."""
    write_csv(path, ["rank", "value"],
              [(i + 1, v) for i, v in enumerate(sample.points)])


def read_points(path: str | Path) -> np.ndarray:
    lines = Path(path).read_text().strip().splitlines()
    return np.array([float(line.split(",")[1]) for line in lines[1:]])


def write_records_jsonl(path: str | Path, records) -> None:
    """Line-delimited records; dataclasses are serialized with sorted keys."""
    lines = []
    for rec in records:
        d = dataclasses.asdict(rec) if dataclasses.is_dataclass(rec) else dict(rec)
        lines.append(json.dumps(d, sort_keys=True, separators=(",", ":"),
                                allow_nan=True, default=_json_default))
    Path(path).write_text("\n".join(lines) + "\n")


def _json_default(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"cannot serialize {type(v)}")


def write_reports_csv(path: str | Path, reports) -> None:
    write_csv(path, ["test", "statistic", "sample_size", "critical_1pct",
                     "critical_5pct", "pass_1pct", "pass_5pct", "detail"],
              [(r.test, r.statistic, r.sample_size, r.critical_1pct,
                r.critical_5pct, r.pass_1pct, r.pass_5pct,
                r.detail.replace(",", ";"))
               for r in reports])


def prepare_out_dir(out: str | Path, cfg: dict | None) -> Path:
    """Create the output directory and keep a copy of the driving config."""
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if cfg is not None:
        (out_dir / "config.json").write_text(
            json.dumps(cfg, indent=1, sort_keys=True) + "\n")
    return out_dir
