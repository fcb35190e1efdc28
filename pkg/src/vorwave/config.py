"""INI-style run configuration.

Example::

    [vorticity]
    kind = linear
    b = 1

    [stream]
    branch = 0-
    s = 2

Unknown sections or keys are rejected. Tolerance environment variables
(see :mod:`vorwave.tolerances`) take precedence over the ``[tolerances]``
section.
"""

import configparser
from dataclasses import dataclass, field
import math
import os
import re

from .errors import ConfigurationError
from .tolerances import _ENV, Tolerances, default_tolerances

SCHEMA = {
    "vorticity": {"kind": "str", "b": "float", "coeffs": "list", "grid": "list", "values": "list"},
    "stream": {"branch": "str", "s": "float", "depth": "float", "r": "float"},
    "scan": {"s_min": "float", "s_max": "float", "n": "int", "tau_min": "float",
             "tau_max": "float", "n_tau": "int", "j_max": "int", "seeds": "int"},
    "tolerances": {"ode_rtol": "float", "ode_atol": "float", "quad_tol": "float", "root_tol": "float"},
    "output": {"csv": "str", "json": "str"},
    "dimensional": {"Q": "float", "g": "float", "R": "float"},
    "field": {"t": "float", "nx": "int", "nz": "int", "periods": "float", "root": "int"},
    "kernel": {"n": "int", "root": "int"},
}

_SPLIT = re.compile(r"[,\s]+")


def _convert(section, key, raw, kind):
    where = f"[{section}] {key}"
    text = raw.strip()
    try:
        if kind == "str":
            return text
        if kind == "int":
            return int(text)
        if kind == "float":
            val = float(text)
            if not math.isfinite(val):
                raise ValueError
            return val
        items = [t for t in _SPLIT.split(text) if t]
        vals = [float(t) for t in items]
        if not vals or not all(math.isfinite(v) for v in vals):
            raise ValueError
        return vals
    except ValueError:
        raise ConfigurationError(f"{where}: cannot parse {raw!r} as {kind}") from None


@dataclass
class RunConfig:
    sections: dict = field(default_factory=dict)

    def get(self, section, key, default=None):
        return self.sections.get(section, {}).get(key, default)

    def has(self, section, key=None):
        if key is None:
            return section in self.sections
        return key in self.sections.get(section, {})

    def vorticity_descriptor(self):
        if "vorticity" not in self.sections:
            raise ConfigurationError("missing [vorticity] section")
        return dict(self.sections["vorticity"])

    def tolerances(self) -> Tolerances:
        tol = Tolerances().updated(**self.sections.get("tolerances", {}))
        env = default_tolerances()
        overrides = {k: getattr(env, k) for k, var in _ENV.items() if os.environ.get(var, "").strip()}
        return tol.updated(**overrides) if overrides else tol

    def echo(self):
        return {s: dict(sorted(v.items())) for s, v in sorted(self.sections.items())}

    def validate(self):
        sc = self.sections.get("scan", {})
        if "s_min" in sc and "s_max" in sc and not sc["s_min"] < sc["s_max"]:
            raise ConfigurationError("[scan] s_min must be smaller than s_max")
        if "tau_min" in sc and "tau_max" in sc and not sc["tau_min"] < sc["tau_max"]:
            raise ConfigurationError("[scan] tau_min must be smaller than tau_max")
        for key in ("n", "n_tau", "seeds"):
            if key in sc and sc[key] < 2:
                raise ConfigurationError(f"[scan] {key} must be at least 2")
        if "j_max" in sc and sc["j_max"] < 0:
            raise ConfigurationError("[scan] j_max must be non-negative")
        dim = self.sections.get("dimensional")
        if dim is not None:
            if dim.get("Q", 0.0) == 0.0:
                raise ConfigurationError("[dimensional] Q must be given and non-zero")
            if dim.get("g", 0.0) <= 0.0:
                raise ConfigurationError("[dimensional] g must be given and positive")
        kinds = [k for k in ("s", "depth", "r") if k in self.sections.get("stream", {})]
        if len(kinds) > 1:
            raise ConfigurationError(f"[stream] give only one of s, depth, r (got {kinds})")
        self.tolerances()
        return self


def parse_config_text(text) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from None
    sections = {}
    for name in cp.sections():
        if name not in SCHEMA:
            raise ConfigurationError(f"unknown section [{name}]")
        out = {}
        for key, raw in cp.items(name):
            if key not in SCHEMA[name]:
                raise ConfigurationError(f"unknown key '{key}' in [{name}]")
            out[key] = _convert(name, key, raw, SCHEMA[name][key])
        sections[name] = out
    return RunConfig(sections).validate()


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path!r}: {exc.strerror}") from None
    return parse_config_text(text)
