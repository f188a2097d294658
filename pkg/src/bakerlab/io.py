"""Artifact files: CSV series with metadata comments, trade-off JSON, flat
key=value configs and gnuplot scripts."""
import json
import subprocess
from functools import lru_cache
from importlib import metadata
from pathlib import Path

import numpy as np

from .hyper import TradeoffCurve


@lru_cache(maxsize=1)
def version_string():
    """Package version plus ``git describe`` output when run from a checkout."""
    try:
        base = metadata.version("bakerlab")
    except metadata.PackageNotFoundError:
        base = "0+unknown"
    try:
        desc = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True, text=True, timeout=5,
        )
        if desc.returncode == 0 and desc.stdout.strip():
            return f"{base}+g{desc.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return base


def format_value(v):
    """Shortest round-trip text for floats; plain text otherwise."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def parse_value(text):
    text = text.strip()
    if text == "":
        return None
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


# -- config files ------------------------------------------------------------

def read_config(path):
    """Flat ``key = value`` file; blank lines and ``#`` comments are ignored."""
    config = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        config[key.strip().replace("-", "_")] = parse_value(value)
    return config


def write_config(path, config):
    lines = [f"{k} = {format_value(v)}" for k, v in sorted(config.items()) if v is not None]
    Path(path).write_text("\n".join(lines) + "\n")


# -- CSV ---------------------------------------------------------------------

def _meta_lines(meta):
    lines = [f"# version = {version_string()}"]
    for key, value in sorted(meta.items()):
        lines.append(f"# {key} = {format_value(value)}")
    return lines


def write_csv(path, columns, rows, meta=None):
    lines = _meta_lines(meta or {})
    lines.append(",".join(columns))
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row {row!r} does not match columns {columns}")
        lines.append(",".join(format_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path):
    """Returns (meta, columns, data) with data as a float array (NaN for blanks)."""
    meta, columns, data = {}, None, []
    for raw in Path(path).read_text().splitlines():
        if raw.startswith("#"):
            key, _, value = raw[1:].partition("=")
            meta[key.strip()] = parse_value(value)
        elif columns is None:
            columns = raw.split(",")
        elif raw.strip():
            data.append([float(x) if x else np.nan for x in raw.split(",")])
    return meta, columns, np.array(data, dtype=float).reshape(-1, len(columns or []))


# -- trade-off JSON ----------------------------------------------------------

def write_curve_json(path, curve, config=None):
    payload = curve.to_dict()
    payload["version"] = version_string()
    if config is not None:
        payload["config"] = {k: v for k, v in sorted(config.items())}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_curve_json(path):
    data = json.loads(Path(path).read_text())
    return TradeoffCurve.from_dict(data), data


# -- gnuplot -----------------------------------------------------------------

def write_gnuplot(path, series, title="", xlabel="t", ylabel="", logy=False):
    """Script plotting CSV columns; ``series`` holds (csv file, x column, y column, legend)."""
    lines = [
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set key outside right autotitle columnheader",
        f"set title {json.dumps(title)}",
        f"set xlabel {json.dumps(xlabel)}",
        f"set ylabel {json.dumps(ylabel)}",
    ]
    if logy:
        lines.append("set logscale y")
    parts = [
        f"{json.dumps(Path(f).name)} using {x}:{y} with linespoints title {json.dumps(label)}"
        for f, x, y, label in series
    ]
    lines.append("plot " + ", \\\n     ".join(parts))
    Path(path).write_text("\n".join(lines) + "\n")
