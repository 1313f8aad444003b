"""Python interface to the heunpulse library."""

import json

from ._core import (
    Field,
    ResonanceError,
    StepUnderflow,
    class_info,
    crossing_discriminant,
    enumerate_classes,
    heun_eval,
    lambert_w,
    matched_pair,
    narrow_pulse_roots,
    peak_metrics,
    realizing_u0star,
    wall_positions,
)

__all__ = [
    "Field",
    "ResonanceError",
    "StepUnderflow",
    "class_info",
    "crossing_discriminant",
    "enumerate_classes",
    "heun_eval",
    "heun_params",
    "lambert_w",
    "matched_pair",
    "narrow_pulse_roots",
    "peak_metrics",
    "realizing_u0star",
    "verify",
    "wall_positions",
]


def heun_params(cls, a, U0star, d1, d2, d3, branch=None):
    """Heun parameters of a class as a dict (complex values as [re, im] pairs)."""
    from ._core import heun_params_json

    return json.loads(heun_params_json(cls, a, U0star, d1, d2, d3, branch))


def verify(field, rel_tol=1e-12, n_points=81, z_interval=None, t_interval=None):
    """Verification report of a Field as a dict."""
    return json.loads(field.verify_json(rel_tol, n_points, z_interval, t_interval))
