"""Named problem presets used by the CLI and the verification suite."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import fields
from .errors import ConfigError
from .problem import Interval, ProblemSpec, Rectangle, UnitDiskPolygon


@dataclass
class Preset:
    name: str
    build: Callable[[], ProblemSpec]
    default_resolution: int
    default_k: int
    default_steps: int
    description: str
    oracle: Optional[Callable] = None  # exact solution (coords..., t) -> complex


def _sine(x):
    return np.sin(np.pi * x).astype(complex)


def _heat_oracle(x, t):
    return np.exp(-np.pi**2 * t) * np.sin(np.pi * x)


def _all_boundary(x):
    return np.ones(np.shape(x), dtype=bool)


def _zero_boundary_fields(spec_kwargs):
    spec_kwargs.setdefault("boundary_b1", fields.constant_scalar(0.0))
    spec_kwargs.setdefault("boundary_b00", fields.constant_scalar(0.0))
    spec_kwargs.setdefault("boundary_delta_b0", fields.constant_scalar(0.0))
    return spec_kwargs


def _dirichlet_interval(**overrides) -> ProblemSpec:
    kwargs = dict(
        domain=Interval(0.0, 1.0),
        final_time=0.1,
        principal=fields.constant_matrix([[1.0]]),
        first_order=[],
        zero_order_a00=fields.constant_scalar(0.0),
        zero_order_delta_a0=fields.constant_scalar(0.0),
        dirichlet_selector=_all_boundary,
        source=None,
        initial=_sine,
    )
    kwargs.update(overrides)
    return ProblemSpec(**_zero_boundary_fields(kwargs))


def build_heat1d() -> ProblemSpec:
    return _dirichlet_interval()


def build_zero1d() -> ProblemSpec:
    return _dirichlet_interval(initial=fields.constant_scalar(0.0))


def build_growth1d() -> ProblemSpec:
    # a0 = -5: the nonnegative part vanishes and the remainder drives growth.
    return _dirichlet_interval(
        zero_order_delta_a0=fields.constant_scalar(-5.0), final_time=0.2
    )


def build_drift1d() -> ProblemSpec:
    return _dirichlet_interval(
        first_order=[fields.constant_scalar(0.5)],
        zero_order_delta_a0=fields.constant_scalar(-0.2j),
        final_time=0.2,
    )


def _forcing(x, t):
    return np.sin(np.pi * x) * np.cos(4.0 * t) + 0.0j


def build_forced1d() -> ProblemSpec:
    return _dirichlet_interval(source=_forcing, final_time=0.5)


def build_disk() -> ProblemSpec:
    def u0(x, y):
        return (x + 1j * y) ** 2

    return ProblemSpec(
        domain=UnitDiskPolygon(48),
        final_time=0.5,
        principal=fields.constant_matrix(fields.DEGENERATE_DISK_MATRIX),
        first_order=[],
        zero_order_a00=fields.constant_scalar(0.0),
        zero_order_delta_a0=fields.constant_scalar(0.0),
        boundary_b1=fields.constant_scalar(1.0),
        boundary_b00=fields.constant_scalar(1.0),
        boundary_delta_b0=fields.constant_scalar(0.0),
        dirichlet_selector=None,
        source=None,
        initial=u0,
    )


def build_robin_rect() -> ProblemSpec:
    def u0(x, y):
        return np.cos(np.pi * x) * np.cos(np.pi * y) + 0.0j

    return ProblemSpec(
        domain=Rectangle(0.0, 1.0, 0.0, 1.0),
        final_time=0.1,
        principal=fields.constant_matrix(np.eye(2)),
        first_order=[],
        zero_order_a00=fields.constant_scalar(1.0),
        zero_order_delta_a0=fields.constant_scalar(0.0),
        boundary_b1=fields.constant_scalar(1.0),
        boundary_b00=fields.constant_scalar(1.0),
        boundary_delta_b0=fields.constant_scalar(0.0),
        dirichlet_selector=None,
        source=None,
        initial=u0,
    )


PRESETS: dict[str, Preset] = {
    "heat1d": Preset(
        "heat1d",
        build_heat1d,
        default_resolution=100,
        default_k=40,
        default_steps=100,
        description="1D heat equation, fully constrained boundary, sine initial data",
        oracle=_heat_oracle,
    ),
    "zero1d": Preset(
        "zero1d",
        build_zero1d,
        default_resolution=32,
        default_k=16,
        default_steps=50,
        description="zero data on the interval; trajectory must vanish",
    ),
    "growth1d": Preset(
        "growth1d",
        build_growth1d,
        default_resolution=50,
        default_k=20,
        default_steps=100,
        description="strong negative zero-order remainder (delta_a0 = -5)",
    ),
    "drift1d": Preset(
        "drift1d",
        build_drift1d,
        default_resolution=50,
        default_k=20,
        default_steps=100,
        description="constant drift plus imaginary zero-order remainder",
    ),
    "forced1d": Preset(
        "forced1d",
        build_forced1d,
        default_resolution=50,
        default_k=25,
        default_steps=200,
        description="heat problem with time-periodic forcing",
    ),
    "disk": Preset(
        "disk",
        build_disk,
        default_resolution=6,
        default_k=30,
        default_steps=100,
        description="degenerate principal matrix on the polygonal unit disk",
    ),
    "robin_rect": Preset(
        "robin_rect",
        build_robin_rect,
        default_resolution=12,
        default_k=25,
        default_steps=50,
        description="coercive Robin problem on the unit square",
    ),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None
