"""Finsler volumes, the area formula on rectifiable sets and polyhedral length spaces."""

import json as _json

from . import _core
from ._core import ConvergenceError, GeometryError, Norm, SchemaError, area_cases, volume_tags, write_zigzag_off

__all__ = [
    "ConvergenceError",
    "GeometryError",
    "Norm",
    "SchemaError",
    "area_cases",
    "area_sweep",
    "diagnose_map",
    "jacobian",
    "rigidity_batch",
    "rigidity_test",
    "shortcut_sphere_certificate",
    "sr_counterexample",
    "surface_distance",
    "volume_tags",
    "write_zigzag_off",
    "zigzag_certificate",
]


def _wrap(fn):
    def call(*args, **kwargs):
        return _json.loads(fn(*args, **kwargs))

    call.__name__ = fn.__name__
    call.__doc__ = fn.__doc__
    return call


jacobian = _wrap(_core.jacobian)
rigidity_test = _wrap(_core.rigidity_test)
sr_counterexample = _wrap(_core.sr_counterexample)
rigidity_batch = _wrap(_core.rigidity_batch)
area_sweep = _wrap(_core.area_sweep)
shortcut_sphere_certificate = _wrap(_core.shortcut_sphere_certificate)
zigzag_certificate = _wrap(_core.zigzag_certificate)
diagnose_map = _wrap(_core.diagnose_map)
surface_distance = _core.surface_distance
