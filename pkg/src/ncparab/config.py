"""Run configuration: flat key-value files with dotted section prefixes.

The format is one ``section.key = value`` pair per line with ``#`` comments,
chosen over positional flags so numerical experiments stay auditable. A
config serializes back to text and round-trips unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields

import numpy as np

from . import fields as coeff_fields
from .errors import ConfigError
from .presets import get_preset
from .problem import Interval, ProblemSpec, Rectangle, UnitDiskPolygon, split_zero_order


@dataclass
class RunConfig:
    problem_preset: str = "heat1d"
    problem_domain: str = ""  # inline mode: interval(a,b) | rectangle(ax,bx,ay,by) | disk(segments)
    problem_principal: str = "identity"
    problem_first_order: str = ""  # comma-separated complex constants
    problem_a0: str = "0"
    problem_b0: str = "1"
    problem_b1: str = "1"
    problem_s: str = "none"
    problem_u0: str = "zero"
    problem_f: str = "zero"
    problem_T: float = 0.1
    mesh_resolution: int = 0  # 0 means preset default
    basis_k: int = 0  # 0 means preset default
    time_steps: int = 0  # 0 means preset default
    time_theta: float = 0.5
    checks_bounds: bool = True
    checks_uniqueness: bool = True
    checks_continuity: bool = True
    checks_energy: bool = False
    checks_cauchy: bool = False
    convergence_levels: int = 4
    convergence_mode: str = "space_time"  # space_time | time | eigs
    sharpness_s: float = 0.75
    sharpness_epsilon: float = 0.0  # 0 means derive the witness from s
    sharpness_terms: int = 100_000
    output_dir: str = "out"
    seed: int = 0

    _KEYMAP = None

    @classmethod
    def keymap(cls) -> dict:
        if cls._KEYMAP is None:
            cls._KEYMAP = {f.name.replace("_", ".", 1): f.name for f in dc_fields(cls)}
        return cls._KEYMAP

    def to_text(self) -> str:
        lines = [
            f"{key} = {_format_value(getattr(self, attr))}"
            for key, attr in sorted(self.keymap().items())
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        cfg = cls()
        keymap = cls.keymap()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in keymap:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            attr = keymap[key]
            try:
                setattr(cfg, attr, _parse_value(value, type(getattr(cfg, attr))))
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        try:
            with open(path) as fh:
                return cls.from_text(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc

    def validate(self) -> None:
        if self.problem_T <= 0.0:
            raise ConfigError("problem.T must be positive")
        if not 0.0 <= self.time_theta <= 1.0:
            raise ConfigError("time.theta must lie in [0, 1]")
        for attr in (
            "mesh_resolution",
            "basis_k",
            "time_steps",
            "convergence_levels",
            "sharpness_terms",
        ):
            if getattr(self, attr) < 0:
                raise ConfigError(f"{attr.replace('_', '.', 1)} must be nonnegative")
        if self.convergence_mode not in ("space_time", "time", "eigs"):
            raise ConfigError(f"unknown convergence.mode {self.convergence_mode!r}")


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _parse_value(text: str, kind: type):
    if kind is bool:
        low = text.lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no"):
            return False
        raise ValueError(text)
    if kind is int:
        return int(text)
    if kind is float:
        return float(text)
    return text


def parse_domain(text: str):
    token = text.strip().lower().replace(" ", "")
    try:
        if token.startswith("interval(") and token.endswith(")"):
            a, b = (float(v) for v in token[9:-1].split(","))
            return Interval(a, b)
        if token.startswith("rectangle(") and token.endswith(")"):
            ax, bx, ay, by = (float(v) for v in token[10:-1].split(","))
            return Rectangle(ax, bx, ay, by)
        if token.startswith("disk(") and token.endswith(")"):
            return UnitDiskPolygon(int(token[5:-1]))
    except ValueError as exc:
        raise ConfigError(f"cannot parse domain {text!r}") from exc
    raise ConfigError(f"unknown domain {text!r}")


def _selector_from_name(name: str, domain):
    key = name.strip().lower()
    if key == "none":
        return None
    if key == "all":
        return lambda *c: np.ones(np.shape(c[0]), dtype=bool)
    if key in ("left", "right"):
        if not isinstance(domain, Interval):
            raise ConfigError(f"S selector {name!r} requires an interval domain")
        target = domain.a if key == "left" else domain.b
        return lambda x: np.isclose(x, target)
    raise ConfigError(f"unknown S selector {name!r}")


def _initial_from_name(name: str, dim: int):
    key = name.strip().lower()
    if key == "zero":
        return coeff_fields.constant_scalar(0.0)
    if key == "sine":
        if dim != 1:
            raise ConfigError("u0 preset 'sine' requires a 1D domain")
        return lambda x: np.sin(np.pi * x).astype(complex)
    if key == "z2":
        if dim != 2:
            raise ConfigError("u0 preset 'z2' requires a 2D domain")
        return lambda x, y: (x + 1j * y) ** 2
    if key.startswith("csv:"):
        return coeff_fields.tabulated_scalar(key[4:])
    raise ConfigError(f"unknown initial data preset {name!r}")


def _source_from_name(name: str, dim: int):
    key = name.strip().lower()
    if key == "zero":
        return None
    if key == "sine_cos":
        if dim != 1:
            raise ConfigError("source preset 'sine_cos' requires a 1D domain")
        return lambda x, t: np.sin(np.pi * x) * np.cos(4.0 * t) + 0.0j
    raise ConfigError(f"unknown source preset {name!r}")


def build_problem(cfg: RunConfig) -> tuple[ProblemSpec, int, int, int]:
    """Resolve a config to a problem plus mesh/basis/step counts.

    Returns (spec, resolution, basis size, time steps) with preset defaults
    filled in where the config left zeros.
    """
    if cfg.problem_preset and cfg.problem_preset != "inline":
        preset = get_preset(cfg.problem_preset)
        spec = preset.build()
        resolution = cfg.mesh_resolution or preset.default_resolution
        k = cfg.basis_k or preset.default_k
        steps = cfg.time_steps or preset.default_steps
        return spec, resolution, k, steps

    domain = parse_domain(cfg.problem_domain)
    dim = domain.dim
    principal = coeff_fields.matrix_field_from_name(cfg.problem_principal, dim)
    first_order = []
    if cfg.problem_first_order.strip():
        try:
            for token in cfg.problem_first_order.split(","):
                first_order.append(coeff_fields.constant_scalar(complex(token.strip())))
        except ValueError as exc:
            raise ConfigError(
                f"cannot parse problem.first_order {cfg.problem_first_order!r}"
            ) from exc
    a0 = coeff_fields.scalar_field_from_spec(cfg.problem_a0, dim)
    b0 = coeff_fields.scalar_field_from_spec(cfg.problem_b0, dim)
    b1 = coeff_fields.scalar_field_from_spec(cfg.problem_b1, dim)
    a00, delta_a0, b00, delta_b0 = split_zero_order(a0, b0, b1)
    spec = ProblemSpec(
        domain=domain,
        final_time=cfg.problem_T,
        principal=principal,
        first_order=first_order,
        zero_order_a00=a00,
        zero_order_delta_a0=delta_a0,
        boundary_b1=b1,
        boundary_b00=b00,
        boundary_delta_b0=delta_b0,
        dirichlet_selector=_selector_from_name(cfg.problem_s, domain),
        source=_source_from_name(cfg.problem_f, dim),
        initial=_initial_from_name(cfg.problem_u0, dim),
    )
    resolution = cfg.mesh_resolution or 32
    k = cfg.basis_k or 16
    steps = cfg.time_steps or 100
    return spec, resolution, k, steps
