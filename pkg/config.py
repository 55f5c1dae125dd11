"""Configuration for experiments, the contact process and the run monitor.

Experiment files are flat ``key = value`` text with ``#`` comments and one
``[model]`` block::

    lambda = 2.0
    n_list = 4, 8, 16
    seeds = 4
    trials = 200

    [model]
    model = bond
    d = 2
    p = 0.7
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

OUT_ENV = "METASTAB_OUT"
DEFAULT_OUT = "results"

MODELS = ("bond", "site", "rgg", "gw", "gff", "ri-occupied", "ri-vacant")

# Literature value of the critical rate of the contact process on Z. Used only
# for a regime warning, never asserted.
LAMBDA_C_LINE = 1.6494

# Keys that actually parameterize each model (results CSV ``params`` column).
MODEL_PARAMS: dict[str, tuple[str, ...]] = {
    "bond": ("d", "p"),
    "site": ("d", "p"),
    "rgg": ("d", "R"),
    "gw": ("nu", "conditioning"),
    "gff": ("d", "h", "pad_factor"),
    "ri-occupied": ("d", "u", "kill_radius", "cap_walks"),
    "ri-vacant": ("d", "u", "kill_radius", "cap_walks"),
}


class ConfigError(Exception):
    """Raised when a config file or value is invalid."""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None) -> None:
        self.message = message
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


def _default_nu() -> dict[int, float]:
    return {0: 0.25, 1: 0.25, 2: 0.5}


@dataclass
class ModelConfig:
    """Random graph ensemble and its parameters."""
    model: str = "bond"                 # one of MODELS
    d: int = 2                          # dimension (ignored by gw)
    p: float = 0.7                      # bond/site open probability
    R: float = 1.5                      # rgg connection radius
    u: float = 1.0                      # interlacement intensity
    h: float = 0.0                      # gff excursion level
    pad_factor: int = 4                 # gff covariance domain B_{pad*n}
    kill_radius: Optional[int] = None   # interlacement walks killed outside B_M; None -> 4n
    cap_walks: int = 256                # escape walks per boundary site for the capacity estimate
    nu: dict[int, float] = field(default_factory=_default_nu)  # gw offspring law
    conditioning: str = "survival"      # gw: none | survival

    def params(self) -> dict[str, Any]:
        return {key: getattr(self, key) for key in MODEL_PARAMS[self.model]}

    def params_string(self) -> str:
        """Canonical ``k=v;k=v`` rendering of the parameters that matter."""
        return ";".join(f"{k}={_format_value(k, v)}" for k, v in self.params().items())

    @property
    def is_lattice(self) -> bool:
        return self.model in ("bond", "site", "gff", "ri-occupied", "ri-vacant")


@dataclass
class ContactConfig:
    """Contact process dynamics on a finite graph."""
    lam: float = 2.0                            # infection rate per directed edge
    initial: Optional[tuple[int, ...]] = None   # None -> every vertex infected
    time_cap: Optional[float] = 1e6             # censoring horizon; None -> run to extinction


@dataclass
class ExperimentConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    lam: float = 2.0
    n_list: list[int] = field(default_factory=lambda: [4, 8, 16])
    seeds: int = 4                      # graph samples per scale
    trials: int = 200                   # contact-process trials per graph
    time_cap: Optional[float] = 1e6
    master_seed: int = 0
    out: str = field(default_factory=lambda: os.environ.get(OUT_ENV, DEFAULT_OUT))
    resume: bool = False
    workers: int = 0                    # 0 -> os.cpu_count()
    dump_trials: bool = False
    dump_graphs: bool = False
    epsilon: float = 0.5                # census shell exponent

    def contact(self) -> ContactConfig:
        return ContactConfig(lam=self.lam, time_cap=self.time_cap)

    def resolved_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)


@dataclass
class MonitorConfig:
    """Read-only run monitor (``cli.py serve``)."""
    host: str = "127.0.0.1"
    port: int = 8090
    out: str = field(default_factory=lambda: os.environ.get(OUT_ENV, DEFAULT_OUT))
    progress_hz: float = 1.0            # /ws/progress push rate
    log_lines: int = 200


# -- value codecs ------------------------------------------------------------

def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int_list(text: str) -> list[int]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ValueError("empty list")
    return [int(t) for t in items]


def _parse_optional_float(text: str) -> Optional[float]:
    return None if text.lower() == "none" else float(text)


def _parse_optional_int(text: str) -> Optional[int]:
    return None if text.lower() in ("auto", "none") else int(text)


def parse_nu(text: str) -> dict[int, float]:
    """Parse ``"k:prob,k:prob"`` into an offspring law."""
    nu: dict[int, float] = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        k, sep, prob = item.partition(":")
        if not sep:
            raise ValueError(f"expected k:prob, got {item!r}")
        nu[int(k)] = float(prob)
    if not nu:
        raise ValueError("empty offspring law")
    return nu


def format_nu(nu: dict[int, float]) -> str:
    return ",".join(f"{k}:{nu[k]!r}" for k in sorted(nu))


def _quote(text: str) -> str:
    q = "'" if "\"" in text else "\""
    return f"{q}{text}{q}"


def _format_value(key: str, value: Any) -> str:
    if key == "nu":
        return format_nu(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "auto" if key == "kill_radius" else "none"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ", ".join(str(v) for v in value)
    return str(value)


_TOP_KEYS: dict[str, tuple[str, Callable[[str], Any]]] = {
    "lambda": ("lam", float),
    "n_list": ("n_list", _parse_int_list),
    "seeds": ("seeds", int),
    "trials": ("trials", int),
    "time_cap": ("time_cap", _parse_optional_float),
    "master_seed": ("master_seed", int),
    "out": ("out", str),
    "resume": ("resume", _parse_bool),
    "workers": ("workers", int),
    "dump_trials": ("dump_trials", _parse_bool),
    "dump_graphs": ("dump_graphs", _parse_bool),
    "epsilon": ("epsilon", float),
}

_MODEL_KEYS: dict[str, Callable[[str], Any]] = {
    "model": str,
    "d": int,
    "p": float,
    "R": float,
    "u": float,
    "h": float,
    "pad_factor": int,
    "kill_radius": _parse_optional_int,
    "cap_walks": int,
    "nu": parse_nu,
    "conditioning": str,
}


def _strip_comment(raw: str) -> str:
    """Drop a trailing ``#`` comment; a value that opens with a quote keeps ``#`` up to its closing quote."""
    _, sep, value = raw.partition("=")
    body = value.lstrip()
    if sep and body[:1] in ("\"", "'"):
        end = body.find(body[0], 1)
        if end > 0:
            head = raw[: len(raw) - len(body) + end + 1]
            return head + raw[len(head):].split("#", 1)[0]
    return raw.split("#", 1)[0]


def _unquote(text: str) -> str:
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    return text


# -- parse / serialize -------------------------------------------------------

def parse_config(text: str) -> ExperimentConfig:
    """Parse experiment config text.

    Raises:
        ConfigError: on unknown keys, bad values or failed validation, with the
            offending line and field.
    """
    cfg = ExperimentConfig()
    model = ModelConfig()
    seen_lines: dict[str, int] = {}
    section = "top"

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name != "model":
                raise ConfigError(f"unknown section [{name}]", line=lineno)
            if section == "model":
                raise ConfigError("only one [model] block allowed", line=lineno)
            section = "model"
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=lineno)
        key = key.strip()
        value = _unquote(value.strip())
        qualified = f"{section}.{key}"
        if qualified in seen_lines:
            raise ConfigError(f"duplicate key (first on line {seen_lines[qualified]})", line=lineno, field=key)
        seen_lines[qualified] = lineno

        if section == "top":
            if key not in _TOP_KEYS:
                raise ConfigError("unknown key", line=lineno, field=key)
            attr, codec = _TOP_KEYS[key]
            target = cfg
        else:
            if key not in _MODEL_KEYS:
                raise ConfigError("unknown model key", line=lineno, field=key)
            attr, codec = key, _MODEL_KEYS[key]
            target = model
        try:
            setattr(target, attr, codec(value))
        except ValueError as e:
            raise ConfigError(f"bad value {value!r}: {e}", line=lineno, field=key) from e

    cfg.model = model
    try:
        validate_config(cfg)
    except ConfigError as e:
        if e.line is None and e.field is not None:
            line = seen_lines.get(f"top.{e.field}") or seen_lines.get(f"model.{e.field}")
            raise ConfigError(e.message, line=line, field=e.field) from None
        raise
    return cfg


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    return parse_config(text)


def _render(key: str, value: Any) -> str:
    return _quote(value) if isinstance(value, str) else _format_value(key, value)


def serialize_config(cfg: ExperimentConfig) -> str:
    """Render ``cfg`` as canonical config text; ``parse_config`` inverts it.

    String values are quoted so that ``#`` inside them survives parsing.
    """
    lines = []
    for key, (attr, _) in _TOP_KEYS.items():
        lines.append(f"{key} = {_render(key, getattr(cfg, attr))}")
    lines.append("")
    lines.append("[model]")
    for key in _MODEL_KEYS:
        lines.append(f"{key} = {_render(key, getattr(cfg.model, key))}")
    return "\n".join(lines) + "\n"


def validate_config(cfg: ExperimentConfig) -> None:
    """Check cross-field invariants.

    Raises:
        ConfigError: naming the field at fault.
    """
    m = cfg.model
    if m.model not in MODELS:
        raise ConfigError(f"unknown model {m.model!r} (expected one of {', '.join(MODELS)})", field="model")
    if not cfg.n_list or any(n < 1 for n in cfg.n_list):
        raise ConfigError("scales must be positive integers", field="n_list")
    if any(a >= b for a, b in zip(cfg.n_list, cfg.n_list[1:])):
        raise ConfigError("scales must be strictly ascending", field="n_list")
    if cfg.seeds < 1:
        raise ConfigError("need at least one seed per scale", field="seeds")
    if cfg.trials < 1:
        raise ConfigError("need at least one trial per graph", field="trials")
    if cfg.lam < 0:
        raise ConfigError("infection rate must be nonnegative", field="lambda")
    if cfg.time_cap is not None and cfg.time_cap <= 0:
        raise ConfigError("time cap must be positive", field="time_cap")
    if cfg.workers < 0:
        raise ConfigError("workers must be >= 0", field="workers")
    if not 0 < cfg.epsilon < 1:
        raise ConfigError("epsilon must lie in (0, 1)", field="epsilon")
    if m.model in ("bond", "site") and not 0.0 <= m.p <= 1.0:
        raise ConfigError("probability must lie in [0, 1]", field="p")
    if m.model == "rgg" and m.R <= 0:
        raise ConfigError("radius must be positive", field="R")
    if m.model in ("ri-occupied", "ri-vacant"):
        if m.u < 0:
            raise ConfigError("intensity must be nonnegative", field="u")
        if m.kill_radius is not None and m.kill_radius < 4 * max(cfg.n_list):
            raise ConfigError(f"kill radius must be >= 4n = {4 * max(cfg.n_list)}", field="kill_radius")
        if m.cap_walks < 1:
            raise ConfigError("need at least one escape walk per site", field="cap_walks")
    if m.model == "gff" and m.pad_factor < 2:
        raise ConfigError("pad factor must be >= 2", field="pad_factor")
    if m.model == "gw":
        if any(k < 0 for k in m.nu) or any(q < 0 for q in m.nu.values()):
            raise ConfigError("offspring law needs k >= 0 and probabilities >= 0", field="nu")
        if abs(sum(m.nu.values()) - 1.0) > 1e-9:
            raise ConfigError("offspring probabilities must sum to 1", field="nu")
        if m.conditioning not in ("none", "survival"):
            raise ConfigError("conditioning must be none or survival", field="conditioning")

