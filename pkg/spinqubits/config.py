"""
Sweep configuration and device parameter files.

Both file formats are flat `key=value` text; `#` and `;` start comment lines.
A sweep config uses the same keys as the command-line flags:

    steps=41
    max_param=2*pi
    shots=1024
    seed=7
    initial=m=+1
    csv=out/magfield.csv

A device file carries the averages used by the noise model and the error
budget, as fractions:

    single_qubit_gate_error=0.00047
    cx_gate_error=0.01168
    readout_error=0.0263
    shots=1024
"""

import configparser
import math
import os
from dataclasses import dataclass, fields
from typing import Any, Dict, Optional

import numpy as np

from spinqubits.errors import ConfigError, DomainError, QasmError
from spinqubits.noise import DeviceParams
from spinqubits.qasm import parse_angle

EXPERIMENTS = ("magfield", "ising")
DEFAULT_WORKERS = os.cpu_count() or 1

# Accepted spellings of each initial state
_INITIAL_ALIASES = {
    "m=+1": "m=+1",
    "m=1": "m=+1",
    "+1": "m=+1",
    "1": "m=+1",
    "m=0": "m=0",
    "0": "m=0",
    "m=-1": "m=-1",
    "-1": "m=-1",
    "x-polarized": "x-polarized",
    "x": "x-polarized",
}
_INITIAL_CHOICES = {
    "magfield": ("m=+1", "m=0", "m=-1"),
    "ising": ("x-polarized",),
}

_SECTION = "spinqubits"


@dataclass(frozen=True)
class SweepConfig:
    """
    Everything needed to run and export one parameter sweep.

    Args:
        experiment: "magfield" or "ising"
        initial: Initial state label (defaults per experiment)
        steps: Number of grid points, at least 2
        max_param: Upper end of the grid linspace(0, max_param, steps)
        shots: Shots per measurement setting; None for exact probabilities
        seed: Root seed of the sweep
        noise: Path of a device parameter file
        csv: CSV output path
        svg: SVG output path
        qasm: QASM output path (circuit at the last grid point)
        workers: Threads evaluating grid points (defaults to the CPU count)
    """

    experiment: str = "magfield"
    initial: Optional[str] = None
    steps: int = 41
    max_param: float = 2 * math.pi
    shots: Optional[int] = 1024
    seed: int = 0
    noise: Optional[str] = None
    csv: Optional[str] = None
    svg: Optional[str] = None
    qasm: Optional[str] = None
    workers: int = DEFAULT_WORKERS

    def __post_init__(self):
        if self.initial is None:
            object.__setattr__(self, "initial", _INITIAL_CHOICES.get(self.experiment, ("",))[0])
        else:
            label = _INITIAL_ALIASES.get(str(self.initial).strip().lower())
            if label is not None:
                object.__setattr__(self, "initial", label)
        self.validate()

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        choices = _INITIAL_CHOICES[self.experiment]
        if self.initial not in choices:
            raise ConfigError(
                f"initial state for {self.experiment} must be one of {choices}, "
                f"got {self.initial!r}"
            )
        if self.steps < 2:
            raise ConfigError(f"steps must be >= 2, got {self.steps}")
        if not np.isfinite(self.max_param) or self.max_param < 0:
            raise ConfigError(f"max_param must be finite and >= 0, got {self.max_param}")
        if self.shots is not None and self.shots < 1:
            raise ConfigError(f"shots must be >= 1, got {self.shots}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    @property
    def exact(self) -> bool:
        return self.shots is None

    @property
    def initial_m(self) -> Optional[int]:
        """Magnetic number of the field experiment's initial state."""
        if self.initial.startswith("m="):
            return int(self.initial[2:])
        return None

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.max_param, self.steps)


def _read_flat_file(path: str) -> Dict[str, str]:
    parser = configparser.ConfigParser(
        delimiters=("=",), comment_prefixes=("#", ";"), interpolation=None
    )
    try:
        with open(path, "r", encoding="utf-8") as handle:
            parser.read_string(f"[{_SECTION}]\n" + handle.read(), source=path)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed file {path}: {exc}") from exc
    return {key.replace("-", "_"): value.strip() for key, value in parser[_SECTION].items()}


def _parse_bool(key: str, text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key} must be a boolean, got {text!r}")


def _parse_int(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {text!r}") from None


def _parse_float(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {text!r}") from None


def parse_config_values(values: Dict[str, str]) -> Dict[str, Any]:
    """
    Convert raw key=value strings into SweepConfig field values.

    `max_param` accepts angle expressions such as `2*pi`, `shots` accepts
    `exact`, and `exact=true` clears the shot count.
    """
    known = ({f.name for f in fields(SweepConfig)} - {"experiment"}) | {"exact"}
    parsed: Dict[str, Any] = {}
    for key, text in values.items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        if key in ("steps", "seed", "workers"):
            parsed[key] = _parse_int(key, text)
        elif key == "max_param":
            try:
                parsed[key] = parse_angle(text)
            except QasmError as exc:
                raise ConfigError(f"max_param: {exc}") from None
        elif key == "shots":
            parsed[key] = None if text.lower() == "exact" else _parse_int(key, text)
        elif key == "exact":
            if _parse_bool(key, text):
                parsed["shots"] = None
        else:
            parsed[key] = text or None
    return parsed


def load_config_file(path: str) -> Dict[str, Any]:
    """Read a sweep config file into SweepConfig field values."""
    return parse_config_values(_read_flat_file(path))


def resolve_config(experiment: str, config_path: Optional[str] = None,
                   **overrides: Any) -> SweepConfig:
    """
    Build a SweepConfig from defaults, an optional config file and flags.

    Args:
        experiment: "magfield" or "ising"
        config_path: Optional flat key=value file
        overrides: Flag values; None means "not given"

    Returns:
        The validated configuration
    """
    values: Dict[str, Any] = {}
    if config_path:
        values.update(load_config_file(config_path))
    values.update({key: value for key, value in overrides.items() if value is not None})
    if values.pop("exact", False):
        values["shots"] = None
    return SweepConfig(experiment=experiment, **values)


def load_device_params(path: str) -> DeviceParams:
    """
    Read a device parameter file.

    Args:
        path: Flat key=value file with single_qubit_gate_error, cx_gate_error,
            readout_error and optionally shots (an integer or `inf`)

    Returns:
        The validated DeviceParams
    """
    values = _read_flat_file(path)
    required = ("single_qubit_gate_error", "cx_gate_error", "readout_error")
    missing = [key for key in required if key not in values]
    if missing:
        raise ConfigError(f"{path} is missing {', '.join(missing)}")
    unknown = set(values) - set(required) - {"shots"}
    if unknown:
        raise ConfigError(f"{path} has unknown keys {sorted(unknown)}")
    try:
        return DeviceParams(
            single_qubit_gate_error=_parse_float("single_qubit_gate_error", values[required[0]]),
            cx_gate_error=_parse_float("cx_gate_error", values[required[1]]),
            readout_error_per_qubit=_parse_float("readout_error", values[required[2]]),
            shots=_parse_float("shots", values.get("shots", "1024")),
        )
    except DomainError as exc:
        raise ConfigError(f"{path}: {exc}") from None

