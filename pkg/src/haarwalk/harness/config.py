"""Experiment configuration: a single JSON document, schema-checked."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from ..lattice import LatticeSpec
from ..randomness import SUPPORTS, parse_seed


class ConfigError(ValueError):
    """Invalid experiment configuration; the message starts with the field path."""


_NUM = {"type": "number"}
_NUM_OR_LIST = {"oneOf": [_NUM, {"type": "array", "items": _NUM, "minItems": 1}]}
_SEED = {"oneOf": [{"type": "integer", "minimum": 0}, {"type": "string"}]}

_LATTICE = {
    "type": "object",
    "additionalProperties": False,
    "required": ["topology", "rows", "cols"],
    "properties": {
        "topology": {"enum": ["grid", "chain"]},
        "rows": {"type": "integer", "minimum": 1},
        "cols": {"type": "integer", "minimum": 1},
        "c_nn": {"type": "number", "exclusiveMinimum": 0},
        "c_nnn": {"type": "number", "minimum": 0},
        "beta0": {"type": "number", "minimum": 0},
    },
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["lattice", "noise", "run"],
    "properties": {
        "experiment": {"type": "string", "minLength": 1},
        "lattice": {"oneOf": [_LATTICE, {"type": "array", "items": _LATTICE, "minItems": 1}]},
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "required": ["amplitude", "dz_mm"],
            "properties": {
                "amplitude": {"oneOf": [{"type": "number", "minimum": 0},
                                        {"type": "array", "minItems": 1,
                                         "items": {"type": "number", "minimum": 0}}]},
                "dz_mm": {"oneOf": [{"type": "number", "exclusiveMinimum": 0},
                                    {"type": "array", "minItems": 1,
                                     "items": {"type": "number", "exclusiveMinimum": 0}}]},
                "support": {"enum": list(SUPPORTS)},
            },
        },
        "run": {
            "type": "object",
            "additionalProperties": False,
            "required": ["lengths_mm", "samples"],
            "properties": {
                "ensemble": {"enum": ["qsw", "haar"]},
                "lengths_mm": {"type": "array", "items": {"type": "number", "minimum": 0}},
                "samples": {"oneOf": [{"type": "integer", "minimum": 1},
                                      {"type": "array", "minItems": 1,
                                       "items": {"type": "integer", "minimum": 1}}]},
                "master_seed": _SEED,
                "groups": {"type": "integer", "minimum": 1},
                "q": {"enum": [1, 2]},
                "input_modes": {"type": "array", "items": {"type": "integer", "minimum": 0},
                                "minItems": 1, "maxItems": 2},
                "include_pure_walk": {"type": "boolean"},
            },
        },
        "amplitude_band": {"oneOf": [{"type": "null"},
                                     {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}]},
        "convergence_threshold": {"oneOf": [{"type": "null"}, {"type": "number", "exclusiveMinimum": 0}]},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "csv_path": {"type": ["string", "null"]},
                "json_path": {"type": ["string", "null"]},
                "svg_path": {"type": ["string", "null"]},
            },
        },
    },
}


def _as_list(x):
    return list(x) if isinstance(x, (list, tuple)) else [x]


def _path(parts) -> str:
    return ".".join(str(p) for p in parts) or "<root>"


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    lattices: tuple[LatticeSpec, ...]
    amplitudes: tuple[float, ...]
    dz_mm: tuple[float, ...]
    support: str
    ensemble: str
    lengths_mm: tuple[float, ...]
    samples: tuple[int, ...]
    master_seed: int
    groups: int
    q: int
    input_modes: tuple[int, ...] | None
    include_pure_walk: bool
    amplitude_band: float | None
    convergence_threshold: float | None
    output: dict = field(default_factory=dict)

    def inputs_for(self, lattice: LatticeSpec) -> tuple[int, ...]:
        """Injection modes; defaults to the lattice centre (and its right neighbour for q=2)."""
        if self.input_modes is not None:
            return self.input_modes
        c = lattice.center_mode
        if self.q == 1:
            return (c,)
        return (c, c + 1 if c + 1 < lattice.n_modes else c - 1)

    def to_dict(self) -> dict:
        """Fully resolved form; parsing it again yields an equal config."""
        lat = [x.to_dict() for x in self.lattices]
        return {
            "experiment": self.experiment,
            "lattice": lat[0] if len(lat) == 1 else lat,
            "noise": {
                "amplitude": list(self.amplitudes),
                "dz_mm": list(self.dz_mm),
                "support": self.support,
            },
            "run": {
                "ensemble": self.ensemble,
                "lengths_mm": list(self.lengths_mm),
                "samples": list(self.samples),
                "master_seed": self.master_seed,
                "groups": self.groups,
                "q": self.q,
                "input_modes": None if self.input_modes is None else list(self.input_modes),
                "include_pure_walk": self.include_pure_walk,
            },
            "amplitude_band": self.amplitude_band,
            "convergence_threshold": self.convergence_threshold,
            "output": dict(self.output),
        }


def parse_config(doc: dict) -> ExperimentConfig:
    doc = copy.deepcopy(doc)
    # resolved configs carry input_modes: null, which the schema rejects
    if isinstance(doc.get("run"), dict) and doc["run"].get("input_modes", 0) is None:
        del doc["run"]["input_modes"]

    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise ConfigError(f"{_path(e.absolute_path)}: {e.message}")

    run = doc["run"]
    noise = doc["noise"]
    try:
        lattices = tuple(LatticeSpec.from_dict(x) for x in _as_list(doc["lattice"]))
    except ValueError as exc:
        raise ConfigError(f"lattice: {exc}") from None
    try:
        seed = parse_seed(run.get("master_seed", 0))
    except ValueError as exc:
        raise ConfigError(f"run.master_seed: {exc}") from None

    q = run.get("q", 1)
    inputs = run.get("input_modes")
    if inputs is not None:
        if len(inputs) != q:
            raise ConfigError(f"run.input_modes: q={q} needs {q} input mode(s), got {len(inputs)}")
        if q == 2 and inputs[0] == inputs[1]:
            raise ConfigError("run.input_modes: two-photon inputs must be distinct modes")
        for lat in lattices:
            if max(inputs) >= lat.n_modes:
                raise ConfigError(f"run.input_modes: mode {max(inputs)} outside a {lat.n_modes}-mode lattice")
        inputs = tuple(inputs)

    ensemble = run.get("ensemble", "qsw")
    dzs = tuple(float(x) for x in _as_list(noise["dz_mm"]))
    lengths = tuple(float(x) for x in run["lengths_mm"])
    if ensemble == "qsw":
        if not lengths:
            raise ConfigError("run.lengths_mm: at least one length is required")
        if list(lengths) != sorted(set(lengths)):
            raise ConfigError("run.lengths_mm: lengths must be strictly increasing")
        for dz in dzs:
            for k, z in enumerate(lengths):
                if abs(z / dz - round(z / dz)) > 1e-9:
                    raise ConfigError(f"run.lengths_mm.{k}: {z} mm is not a multiple of dz_mm={dz}")

    out = {k: v for k, v in doc.get("output", {}).items() if v is not None}
    return ExperimentConfig(
        experiment=doc.get("experiment", "custom"),
        lattices=lattices,
        amplitudes=tuple(float(x) for x in _as_list(noise["amplitude"])),
        dz_mm=dzs,
        support=noise.get("support", "zero_to_A"),
        ensemble=ensemble,
        lengths_mm=lengths,
        samples=tuple(sorted(set(int(x) for x in _as_list(run["samples"])))),
        master_seed=seed,
        groups=run.get("groups", 1),
        q=q,
        input_modes=inputs,
        include_pure_walk=run.get("include_pure_walk", False),
        amplitude_band=doc.get("amplitude_band"),
        convergence_threshold=doc.get("convergence_threshold"),
        output=out,
    )


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"<root>: not valid JSON ({exc})") from None
    return parse_config(doc)


def apply_overrides(doc: dict, overrides) -> dict:
    """Apply ``key.path=value`` overrides; values parse as JSON, falling back to strings."""
    doc = copy.deepcopy(doc)
    items = overrides.items() if isinstance(overrides, dict) else (
        tuple(o.split("=", 1)) for o in overrides)
    for item in items:
        if len(item) != 2:
            raise ConfigError(f"override {item[0]!r} is not of the form key=value")
        key, raw = item
        if isinstance(raw, str):
            try:
                value = json.loads(raw)
            except json.JSONDecodeError:
                value = raw
        else:
            value = raw
        parts = key.split(".")
        node = doc
        for p in parts[:-1]:
            if not isinstance(node.get(p), dict):
                raise ConfigError(f"{key}: no such section {p!r}")
            node = node[p]
        node[parts[-1]] = value
    return doc
