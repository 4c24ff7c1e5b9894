"""Datum file loading, validation and the bundled example data."""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import ValidationError
from .lattice import MirrorDatum


def _parse_rational(x, what="lambda"):
    if isinstance(x, bool):
        raise ValidationError(f"{what}: booleans are not numbers")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"{what}: cannot parse rational {x!r}") from exc
    if isinstance(x, float):
        if x == int(x):
            return Fraction(int(x))
        raise ValidationError(
            f"{what}: float {x!r} rejected; use a 'p/q' string for exactness")
    raise ValidationError(f"{what}: unsupported value {x!r}")


def datum_schema():
    with resources.files("tropgamma").joinpath("data/datum.schema.json").open() as f:
        return json.load(f)


def datum_from_dict(obj) -> MirrorDatum:
    try:
        import jsonschema

        jsonschema.validate(obj, datum_schema())
    except ImportError:
        pass
    except Exception as exc:
        raise ValidationError(f"datum file invalid: {exc}") from exc
    dim = obj["dim"]
    V = [tuple(int(x) for x in q) for q in obj["V"]]
    lam = [_parse_rational(x) for x in obj["lambda"]]
    theta = obj.get("theta")
    if theta is not None:
        theta = [float(x) for x in theta]
    return MirrorDatum(dim=dim, V=tuple(V), lam=tuple(lam),
                       theta=tuple(theta) if theta else None)


def load_datum(path) -> MirrorDatum:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"datum file not found: {path}")
    text = path.read_text()
    if path.suffix == ".toml":
        try:
            import tomllib
        except ImportError:
            try:
                import tomli as tomllib
            except ImportError as exc:
                raise ValidationError("TOML datum needs Python >= 3.11 or tomli") from exc
        obj = tomllib.loads(text)
    else:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return datum_from_dict(obj)


def bundled_examples() -> dict:
    """Name -> path of the shipped example data."""
    base = resources.files("tropgamma").joinpath("data")
    out = {}
    for name in ("p2-elliptic", "quartic-k3", "quintic", "p1xp1-k3-slice",
                 "p2-elliptic-theta"):
        p = base.joinpath(f"{name}.json")
        out[name] = Path(str(p))
    return out
