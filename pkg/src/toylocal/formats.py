"""JSON encodings and the bundled measurement files.

Measurement: ``{"num_particles": N, "outcomes": [[[row ints]...]...]}``
Mixture: ``[{"state": [...], "p": "num/den"}, ...]``
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

from toylocal.core import Measurement, Mixture

BUNDLED = {
    "A": "a.json",
    "B": "b.json",
    "P": "p.json",
    "P_prime": "p_prime.json",
    "bell": "bell.json",
}


class FormatError(ValueError):
    pass


def frac_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_frac(text: str) -> Fraction:
    if not isinstance(text, str):
        raise FormatError(f"expected a 'num/den' string, got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {text!r}") from exc


def measurement_to_json(m: Measurement) -> dict:
    out = {
        "num_particles": m.num_particles,
        "outcomes": [[list(row) for row in rows] for rows in m.outcomes],
    }
    if m.name:
        out["name"] = m.name
    return out


def measurement_from_json(obj) -> Measurement:
    if not isinstance(obj, dict):
        raise FormatError("measurement must be a JSON object")
    n = obj.get("num_particles")
    outcomes = obj.get("outcomes")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise FormatError("num_particles must be a positive integer")
    if not isinstance(outcomes, list) or not all(isinstance(rows, list) for rows in outcomes):
        raise FormatError("outcomes must be a list of lists of rows")
    for r, rows in enumerate(outcomes):
        for row in rows:
            if not isinstance(row, list) or len(row) != n:
                raise FormatError(f"outcome {r}: row {row!r} is not a list of {n} integers")
            if any(isinstance(v, bool) or not isinstance(v, int) or not 0 <= v <= 3 for v in row):
                raise FormatError(f"outcome {r}: row {row!r} has values outside 0..3")
    name = obj.get("name")
    try:
        return Measurement(outcomes, n, name if isinstance(name, str) else None)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def mixture_to_json(mix: Mixture) -> list:
    return [{"state": list(s), "p": frac_str(p)} for s, p in mix.support]


def mixture_from_json(obj) -> Mixture:
    if not isinstance(obj, list):
        raise FormatError("mixture must be a JSON array")
    try:
        return Mixture([(entry["state"], parse_frac(entry["p"])) for entry in obj])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad mixture entry: {exc}") from exc
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def load_measurement(path: str | Path) -> Measurement:
    """Read a measurement file; JSON syntax errors propagate as ``json.JSONDecodeError``."""
    with open(path, encoding="utf-8") as fh:
        return measurement_from_json(json.load(fh))


def bundled_measurement(name: str) -> Measurement:
    """One of the example measurements shipped with the package (see ``BUNDLED``)."""
    try:
        filename = BUNDLED[name]
    except KeyError:
        raise KeyError(f"no bundled measurement {name!r}; choose from {sorted(BUNDLED)}") from None
    text = resources.files("toylocal.data").joinpath(filename).read_text(encoding="utf-8")
    return measurement_from_json(json.loads(text))


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
