"""Run configuration: the line-oriented key=value format.

Sections are introduced by bracketed headers; keys are validated against
per-section vocabularies (unknown keys are errors carrying the line
number), defaults are applied with provenance recorded, and a parsed
configuration reproduces its run byte-for-byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bernstein import PhiModel, phi_from_mapping, phi_to_mapping
from .errors import ConfigError
from .geometry import geometry_from_mapping
from .levy import ProcessModel, SubordinatorModel

_MODEL_KEYS = {
    "variant", "alpha", "weights", "alphas", "epsilon", "num_pieces",
    "reciprocal", "breakpoints", "lambdas", "phis", "d", "gamma",
    "modulation",
}
_GEOMETRY_KEYS = {
    "variant", "center", "radius", "normal", "aperture", "axis", "halfwidth",
    "r_inner", "r_outer", "d", "lo", "hi",
}
_RUN_KEYS = {"experiment", "out", "seed", "workers", "figures"}
_MC_KEYS = {"n", "n_inner", "strategy", "c_h", "eps_cut", "budget"}
_GRID_KEYS = {
    "lambda_min", "lambda_max", "per_decade", "r_min", "r_max", "points",
    "t_min", "t_max", "theta_min", "theta_max", "which", "radii", "offsets",
    "x", "x_grid", "r", "R0", "lam_max", "exponent_floor", "a",
    "n_radial", "n_angular", "target_axis",
}
_THRESHOLD_KEYS = {
    "variation_cap", "ratio_cap", "seed_stability", "mu_spread_cap",
    "tail_spread_cap", "j_spread_cap", "kappa_spread_cap", "renewal_spread_cap",
    "delta1_lo", "delta1_hi", "delta2_lo", "delta2_hi", "bernstein_tol",
}
_SECTION_KEYS = {
    "run": _RUN_KEYS,
    "model": _MODEL_KEYS,
    "geometry": _GEOMETRY_KEYS,
    "geometry2": _GEOMETRY_KEYS,
    "geometry3": _GEOMETRY_KEYS,
    "grid": _GRID_KEYS,
    "mc": _MC_KEYS,
    "thresholds": _THRESHOLD_KEYS,
}

_DEFAULTS = {
    "run": {"out": "runs", "seed": "0", "workers": "1", "figures": "true"},
    "mc": {"n": "10000", "strategy": "auto"},
    "thresholds": {"variation_cap": "2.0", "ratio_cap": "25.0",
                   "seed_stability": "0.25"},
}


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    sections: dict           # section -> {key: raw string}
    defaulted: tuple         # ("section.key", ...) provenance of defaults
    source: str = ""

    def get(self, section: str, key: str, cast=str, default=None):
        raw = self.sections.get(section, {}).get(key)
        if raw is None:
            return default
        if cast is bool:
            return raw.strip().lower() in ("true", "1", "yes")
        return cast(raw)

    def floats(self, section: str, key: str, default=None):
        raw = self.sections.get(section, {}).get(key)
        if raw is None:
            return default
        return [float(x) for x in raw.split(",") if x.strip()]

    def model_mapping(self) -> dict:
        return dict(self.sections.get("model", {}))

    def geometry(self, which: str = "geometry"):
        sec = self.sections.get(which)
        return geometry_from_mapping(sec) if sec else None

    def process_model(self) -> ProcessModel:
        return process_model_from_mapping(self.model_mapping())

    def __eq__(self, other):
        return (isinstance(other, RunConfig)
                and self.experiment == other.experiment
                and self.sections == other.sections)

    def __hash__(self):
        return hash((self.experiment,
                     tuple(sorted((s, tuple(sorted(kv.items())))
                                  for s, kv in self.sections.items()))))


def parse_config(text: str) -> RunConfig:
    """Parse and validate; unknown sections/keys raise with the line number."""
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in _SECTION_KEYS:
                raise ConfigError(f"unknown section [{current}]", line=lineno)
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError("expected key = value", line=lineno)
        if current is None:
            raise ConfigError("key outside of any [section]", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SECTION_KEYS[current]:
            raise ConfigError(f"unknown key {key!r} in [{current}]",
                              line=lineno)
        if key in sections[current]:
            raise ConfigError(f"duplicate key {key!r} in [{current}]",
                              line=lineno)
        _check_value(current, key, value, lineno)
        sections[current][key] = value

    if "run" not in sections or "experiment" not in sections.get("run", {}):
        raise ConfigError("missing [run] experiment = <group.action>")
    defaulted = []
    for sec, defaults in _DEFAULTS.items():
        block = sections.setdefault(sec, {})
        for key, value in defaults.items():
            if key not in block:
                block[key] = value
                defaulted.append(f"{sec}.{key}")
    return RunConfig(experiment=sections["run"]["experiment"],
                     sections=sections, defaulted=tuple(sorted(defaulted)),
                     source=text)


_NUMERIC_KEYS = {
    "alpha", "epsilon", "gamma", "radius", "aperture", "halfwidth",
    "r_inner", "r_outer", "lo", "hi", "lambda_min", "lambda_max", "r_min",
    "r_max", "t_min", "t_max", "theta_min", "theta_max", "r", "R0",
    "lam_max", "exponent_floor", "a", "c_h", "eps_cut", "variation_cap",
    "ratio_cap", "seed_stability", "mu_spread_cap", "tail_spread_cap",
    "j_spread_cap", "kappa_spread_cap", "renewal_spread_cap", "delta1_lo",
    "delta1_hi", "delta2_lo", "delta2_hi", "bernstein_tol",
}
_INT_KEYS = {"num_pieces", "d", "seed", "workers", "n", "n_inner", "budget",
             "per_decade", "points", "n_radial", "n_angular", "axis",
             "target_axis"}
_LIST_KEYS = {"weights", "alphas", "breakpoints", "lambdas", "phis", "center",
              "normal", "radii", "offsets", "x", "x_grid"}


def _check_value(section, key, value, lineno):
    try:
        if key in _NUMERIC_KEYS:
            float(value)
        elif key in _INT_KEYS:
            int(value)
        elif key in _LIST_KEYS:
            [float(x) for x in value.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"malformed number in {key!r}: {value!r}",
                          line=lineno) from None


def emit_config(cfg: RunConfig) -> str:
    """Serialize back to the key=value format; parse(emit(cfg)) == cfg."""
    lines = []
    order = ["run", "model", "geometry", "geometry2", "geometry3", "grid",
             "mc", "thresholds"]
    for sec in order:
        block = cfg.sections.get(sec)
        if not block:
            continue
        lines.append(f"[{sec}]")
        for key in sorted(block):
            lines.append(f"{key} = {block[key]}")
        lines.append("")
    return "\n".join(lines)


def process_model_from_mapping(mapping: dict) -> ProcessModel:
    """Build the full process model from one flat mapping: symbol keys plus
    d, gamma, and an optional 'constant:<c>' modulation."""
    phi = phi_from_mapping(mapping)
    d = int(mapping.get("d", 1))
    gamma = float(mapping.get("gamma", 1.0))
    modulation = None
    raw = mapping.get("modulation", "")
    if raw and raw != "none":
        kind, _, val = raw.partition(":")
        if kind != "constant":
            raise ConfigError(f"unsupported modulation {raw!r}")
        modulation = ("constant", float(val))
        gamma = max(gamma, float(val), 1.0 / float(val))
    return ProcessModel(d=d, sub=SubordinatorModel(phi=phi), gamma=gamma,
                        modulation=modulation)


def model_mapping(model: ProcessModel) -> dict:
    out = phi_to_mapping(model.phi)
    out["d"] = str(model.d)
    out["gamma"] = repr(model.gamma)
    if model.modulation is not None:
        out["modulation"] = f"constant:{model.modulation[1]!r}"
    return out
