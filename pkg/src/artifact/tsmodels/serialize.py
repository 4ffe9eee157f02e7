"""JSON documents for fitted forecasting models."""

from __future__ import annotations

import dataclasses
import json

from ..errors import ParameterError
from .arima import ArimaModel
from .smoothing import HoltModel, HoltWintersModel, SesModel

_KINDS = {cls.kind: cls for cls in (SesModel, HoltModel, HoltWintersModel, ArimaModel)}


def model_to_dict(model) -> dict:
    fields = {
        f.name: getattr(model, f.name)
        for f in dataclasses.fields(model)
        if f.name != "attempts"
    }
    for key, value in fields.items():
        if isinstance(value, tuple):
            fields[key] = list(value)
    return {"kind": model.kind, **fields}


def model_from_dict(doc: dict):
    doc = dict(doc)
    kind = doc.pop("kind", None)
    if kind not in _KINDS:
        raise ParameterError(f"unknown model kind {kind!r}")
    cls = _KINDS[kind]
    for f in dataclasses.fields(cls):
        if isinstance(doc.get(f.name), list):
            doc[f.name] = tuple(doc[f.name])
    return cls(**doc)


def dumps(model) -> str:
    return json.dumps(model_to_dict(model), indent=2, sort_keys=True)


def loads(text: str):
    return model_from_dict(json.loads(text))
