"""Experiment configuration files.

A config is a YAML mapping of flat keys (``critical`` may be given as a nested
mapping ``{rho_c, nu}`` instead of the two top-level keys).  Unknown or
duplicate keys are errors, and every default is resolved at parse time so the
returned object fully describes the run.
"""

from __future__ import annotations

import difflib
import hashlib
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .geometry import CriticalParams, btz_depth

EXPERIMENTS = ("calibrate", "collapse", "ads", "btz", "mi", "wedge")

COMMON_KEYS = {"experiment", "seed", "samples", "threads", "gate_mix", "rho_c", "nu", "critical"}
EXPERIMENT_KEYS = {
    "calibrate": {"L", "rho"},
    "collapse": {"L", "rho", "bootstrap"},
    "ads": {"L", "l", "truncate"},
    "btz": {"L", "l", "r_h", "T", "initial"},
    "mi": {"L", "l", "r_h", "T", "size", "separations"},
    "wedge": {"L", "l", "r_h", "T", "size", "separations", "references"},
}
ALL_KEYS = COMMON_KEYS.union(*EXPERIMENT_KEYS.values())


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key when known."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


@dataclass
class ExperimentConfig:
    """A fully resolved experiment configuration."""

    experiment: str
    seed: int = 0
    samples: int = 100
    threads: int = 1
    gate_mix: float = 0.1
    critical: CriticalParams = field(default_factory=CriticalParams)
    params: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["critical"] = {"rho_c": self.critical.rho_c, "nu": self.critical.nu}
        return d


def _key_lines(text: str) -> dict[str, list[int]]:
    """1-based line numbers of each top-level key (repeated for duplicates)."""
    node = yaml.compose(text, Loader=yaml.SafeLoader)
    lines: dict[str, list[int]] = {}
    if isinstance(node, yaml.MappingNode):
        for k, _ in node.value:
            lines.setdefault(str(k.value), []).append(k.start_mark.line + 1)
    return lines


def _suggest(key: str, allowed) -> str:
    close = difflib.get_close_matches(key, sorted(allowed), n=1, cutoff=0.5)
    if not close and key.lower().startswith("rho_c"):
        close = ["rho_c"]
    return f"; did you mean {close[0]!r}?" if close else ""


def _int(v, name, lo=None, line=None) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
        raise ConfigError(f"{name} must be an integer, got {v!r}", name, line)
    if lo is not None and v < lo:
        raise ConfigError(f"{name} must be >= {lo}, got {v}", name, line)
    return int(v)


def _float(v, name, line=None) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name} must be a number, got {v!r}", name, line)
    return float(v)


def _system_size(v, name, line, quarter=False) -> int:
    L = _int(v, name, 2, line)
    if L % 2:
        raise ConfigError(f"{name}={L} is odd; brickwork pairing needs an even L", name, line)
    if quarter and L % 4:
        raise ConfigError(f"{name}={L} must be divisible by 4 for quarter regions", name, line)
    return L


def _float_list(v, name, line) -> list[float]:
    vals = v if isinstance(v, list) else [v]
    if not vals:
        raise ConfigError(f"{name} must not be empty", name, line)
    return [_float(x, name, line) for x in vals]


def _rho_grid(v, line) -> list[float]:
    if isinstance(v, dict):
        extra = set(v) - {"start", "stop", "step"}
        if extra or len(v) != 3:
            raise ConfigError("rho grid needs exactly start, stop and step", "rho", line)
        start, stop, step = (_float(v[k], f"rho.{k}", line) for k in ("start", "stop", "step"))
        if step <= 0 or stop < start:
            raise ConfigError("rho grid needs step > 0 and stop >= start", "rho", line)
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        vals = [round(start + i * step, 12) for i in range(n)]
    else:
        vals = _float_list(v, "rho", line)
    for r in vals:
        if not 0 <= r <= 1:
            raise ConfigError(f"rho values must lie in [0, 1], got {r}", "rho", line)
    return vals


def parse_config_text(text: str, experiment: str | None = None) -> ExperimentConfig:
    """Parse and validate config text; see :func:`parse_config`."""
    try:
        lines = _key_lines(text)
        raw = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"parse error: {exc.problem or exc}", None, line) from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"parse error: {exc}") from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping of keys to values", None, 1)
    for k, ls in lines.items():
        if len(ls) > 1:
            raise ConfigError(f"duplicate key {k!r}", k, ls[1])

    def line(k):
        return lines.get(k, [None])[0]

    exp = raw.get("experiment", experiment)
    if experiment is not None and exp != experiment:
        raise ConfigError(f"config is for {exp!r}, command is {experiment!r}", "experiment",
                          line("experiment"))
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {', '.join(EXPERIMENTS)}, got {exp!r}",
                          "experiment", line("experiment"))
    allowed = COMMON_KEYS | EXPERIMENT_KEYS[exp]
    for k in raw:
        if k not in allowed:
            hint = _suggest(str(k), allowed)
            if not hint and k in ALL_KEYS:
                hint = f"; {k!r} is not used by {exp!r}"
            raise ConfigError(f"unknown key {k!r}{hint}", str(k), line(k))

    rho_c, nu = 0.2050, 1.30
    if "critical" in raw:
        crit = raw["critical"]
        if not isinstance(crit, dict):
            raise ConfigError("critical must be a mapping with rho_c and nu", "critical",
                              line("critical"))
        for k in crit:
            if k not in ("rho_c", "nu"):
                raise ConfigError(f"unknown key 'critical.{k}'{_suggest(str(k), ['rho_c', 'nu'])}",
                                  f"critical.{k}", line("critical"))
        if ("rho_c" in crit and "rho_c" in raw) or ("nu" in crit and "nu" in raw):
            raise ConfigError("critical parameters given twice", "critical", line("critical"))
        rho_c = _float(crit.get("rho_c", rho_c), "critical.rho_c", line("critical"))
        nu = _float(crit.get("nu", nu), "critical.nu", line("critical"))
    rho_c = _float(raw.get("rho_c", rho_c), "rho_c", line("rho_c"))
    nu = _float(raw.get("nu", nu), "nu", line("nu"))
    try:
        critical = CriticalParams(rho_c, nu)
    except ValueError as exc:
        raise ConfigError(str(exc), "critical") from None

    cfg = ExperimentConfig(exp, critical=critical)
    cfg.seed = _int(raw.get("seed", 0), "seed", 0, line("seed"))
    if cfg.seed >= 1 << 64:
        raise ConfigError("seed must fit in 64 bits", "seed", line("seed"))
    cfg.samples = _int(raw.get("samples", 100), "samples", 2, line("samples"))
    cfg.threads = _int(raw.get("threads", 1), "threads", 1, line("threads"))
    cfg.gate_mix = _float(raw.get("gate_mix", 0.1), "gate_mix", line("gate_mix"))
    if not 0 <= cfg.gate_mix <= 1:
        raise ConfigError("gate_mix must lie in [0, 1]", "gate_mix", line("gate_mix"))

    p: dict[str, Any] = {}
    if "L" not in raw:
        raise ConfigError("missing required key 'L'", "L")
    if exp in ("calibrate", "collapse"):
        Ls = raw["L"] if isinstance(raw["L"], list) else [raw["L"]]
        p["L"] = [_system_size(v, "L", line("L"), quarter=True) for v in Ls]
        if exp == "collapse" and len(set(p["L"])) < 3:
            raise ConfigError("collapse needs at least three system sizes", "L", line("L"))
        if "rho" not in raw:
            raise ConfigError("missing required key 'rho'", "rho")
        p["rho"] = _rho_grid(raw["rho"], line("rho"))
        if exp == "collapse":
            p["bootstrap"] = _int(raw.get("bootstrap", 100), "bootstrap", 0, line("bootstrap"))
    elif exp == "ads":
        p["L"] = _system_size(raw["L"], "L", line("L"), quarter=True)
        if p["L"] < 40:
            raise ConfigError("ads needs L >= 40 so the fit window 8..L/4 has three points", "L",
                              line("L"))
        if "l" not in raw:
            raise ConfigError("missing required key 'l'", "l")
        p["l"] = _float_list(raw["l"], "l", line("l"))
        if any(v <= 0 for v in p["l"]):
            raise ConfigError("AdS radii l must be positive", "l", line("l"))
        p["truncate"] = bool(raw.get("truncate", False))
        p["T"] = (2 if p["truncate"] else 4) * p["L"]
    else:
        p["L"] = _system_size(raw["L"], "L", line("L"))
        for k in ("l", "r_h"):
            if k not in raw:
                raise ConfigError(f"missing required key {k!r}", k)
            p[k] = _float(raw[k], k, line(k))
            if p[k] <= 0:
                raise ConfigError(f"{k} must be positive", k, line(k))
        default_T = btz_depth(p["L"], p["l"], p["r_h"])
        p["T"] = _int(raw.get("T", default_T), "T", 1, line("T"))
        if exp == "btz":
            p["initial"] = raw.get("initial", "volume")
            if p["initial"] not in ("volume", "product"):
                raise ConfigError("initial must be 'volume' or 'product'", "initial",
                                  line("initial"))
        else:
            p["size"] = _int(raw.get("size", p["L"] // 8), "size", 1, line("size"))
            seps = raw.get("separations")
            if seps is None:
                raise ConfigError("missing required key 'separations'", "separations")
            if not isinstance(seps, list) or not seps:
                raise ConfigError("separations must be a non-empty list", "separations",
                                  line("separations"))
            p["separations"] = [_int(d, "separations", 0, line("separations")) for d in seps]
            if 2 * p["size"] + max(p["separations"]) > p["L"]:
                raise ConfigError("2*size + separation exceeds L", "separations",
                                  line("separations"))
        if exp == "wedge":
            if raw.get("references") is not True:
                raise ConfigError("wedge imaging requires 'references: true'", "references",
                                  line("references"))
            p["references"] = True
    cfg.params = p
    return cfg


def parse_config(path, experiment: str | None = None) -> ExperimentConfig:
    """Read, validate and resolve a config file.

    Args:
        path: YAML file.
        experiment: the command being run; must agree with an ``experiment``
            key in the file if one is present.

    Raises:
        ConfigError: parse errors carry the line number, validation errors the
            field name.
        FileNotFoundError: missing file.
    """
    text = Path(path).read_text()
    return parse_config_text(text, experiment)


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()
