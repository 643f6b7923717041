"""Experiment configuration files.

INI layout (schema version 1), every value parsed as JSON when possible::

    [sequence]
    kind = "geometric"        # or "explicit" with values = [...]
    lambda0 = 1
    ratio = 2
    count = 40
    block_sizes = [1, 1, ...] # optional; default singleton blocks
    q_prime = 2.0             # optional subgeometric bound

    [measure]
    kind = "jacobi"           # jacobi | lebesgue | atom | mixture | zero
    gamma = 1.0
    atoms = [[1.0, 1.0]]

    [operator]
    kind = "identity"         # identity | zero | diagonal | dilation |
                              # counterexample_subcritical | counterexample_supercritical |
                              # example_supercritical | diagonal_profile
    ...                       # constructor parameters

    [experiment]
    schema = 1
    p = 1.5
    q = 4
    r = 2
    alpha = 1
    beta = 1
    ...                       # runner options (family_size, k_max, N_list, ...)
"""
from __future__ import annotations

import configparser
import json
from dataclasses import dataclass, field

from .errors import ConfigError, MuntzLabError
from .exponents import (BlockPartition, ExponentSequence, lacunary_partition, make_geometric,
                        validate_quasi_lacunary, with_subgeometric)
from .measures import Measure, atom, jacobi, lebesgue, mixture, zero_measure
from . import operators as ops

SCHEMA_VERSION = 1
SECTIONS = ("sequence", "measure", "operator", "experiment")


def _value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw.strip().strip('"')


@dataclass
class Config:
    sequence: dict = field(default_factory=dict)
    measure: dict = field(default_factory=dict)
    operator: dict = field(default_factory=dict)
    experiment: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.experiment.get(key, default)


def parse_config(text: str) -> Config:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"malformed config: {e}") from e
    unknown = set(cp.sections()) - set(SECTIONS)
    if unknown:
        raise ConfigError(f"unknown sections: {sorted(unknown)}")
    cfg = Config(**{s: {k: _value(v) for k, v in cp[s].items()} if cp.has_section(s) else {}
                    for s in SECTIONS})
    schema = cfg.experiment.pop("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {schema}")
    return cfg


def load_config(path: str | None) -> Config:
    if path is None:
        return Config()
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from e


def _wrap(fn, what):
    try:
        return fn()
    except (MuntzLabError, TypeError, ValueError, KeyError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"bad [{what}] section: {e}") from e


def build_partition(sec: dict) -> BlockPartition:
    def make():
        kind = sec.get("kind", "geometric")
        if kind == "geometric":
            seq = make_geometric(float(sec.get("lambda0", 1.0)), float(sec.get("ratio", 2.0)),
                                 int(sec.get("count", 40)))
        elif kind == "explicit":
            seq = ExponentSequence(sec["values"])
        else:
            raise ConfigError(f"unknown sequence kind {kind!r}")
        sizes = sec.get("block_sizes")
        part = lacunary_partition(seq, sec.get("q")) if sizes is None else \
            validate_quasi_lacunary(seq, sizes, float(sec["q"]))
        if sec.get("q_prime") is not None:
            part = with_subgeometric(part, float(sec["q_prime"]))
        return part
    return _wrap(make, "sequence")


def build_measure(sec: dict) -> Measure:
    def make():
        kind = sec.get("kind", "jacobi")
        if kind == "jacobi":
            return jacobi(float(sec.get("gamma", 1.0)))
        if kind == "lebesgue":
            return lebesgue()
        if kind == "atom":
            return atom(float(sec.get("loc", 1.0)), float(sec.get("mass", 1.0)))
        if kind == "mixture":
            return mixture(sec.get("gamma"), [tuple(a) for a in sec.get("atoms", [])])
        if kind == "zero":
            return zero_measure()
        raise ConfigError(f"unknown measure kind {kind!r}")
    return _wrap(make, "measure")


def build_operator(sec: dict, part: BlockPartition):
    def make():
        kind = sec.get("kind", "identity")
        P = {k: v for k, v in sec.items() if k != "kind"}
        if kind == "identity":
            return ops.identity(part.seq)
        if kind == "zero":
            return ops.zero_operator(part.seq)
        if kind == "diagonal":
            return ops.diagonal(part.seq, P["d"])
        if kind == "dilation":
            return ops.make_dilation_example(P.get("c"), P.get("scales"),
                                             float(P.get("gamma", 1.0)), float(P.get("p", 2.0)))[0]
        if kind == "counterexample_subcritical":
            return ops.make_counterexample_subcritical(part, **_floats(P))
        if kind == "counterexample_supercritical":
            return ops.make_counterexample_supercritical(part, **_floats(P))
        if kind == "example_supercritical":
            return ops.make_example_supercritical(part, **_floats(P))
        if kind == "diagonal_profile":
            eps = P.pop("eps")
            if eps == "harmonic":
                eps = [1.0] + [1.0 / k for k in range(1, len(part.seq))]
            return ops.diagonal_for_profile(part, eps, **_floats(P))
        raise ConfigError(f"unknown operator kind {kind!r}")
    return _wrap(make, "operator")


def _floats(d: dict) -> dict:
    return {k: float(v) if isinstance(v, (int, float)) else v for k, v in d.items()}
