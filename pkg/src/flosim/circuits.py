"""Load and save circuit description files.

A circuit file is a JSON document with three top-level keys::

    {
      "modes": 4,
      "electrons": 2,
      "steps": [
        {"kind": "rotate", "modes": [0, 2], "theta": 0.7, "phi": 0.3},
        {"kind": "rotate", "unitary": [[...], ...]},
        {"kind": "rotate", "generator": [[...], ...], "tau": 0.4},
        {"kind": "measure1", "mode": 1, "policy": "sample"},
        {"kind": "measure2", "first": 0, "second": 1,
         "grouping": "012", "policy": "forced", "outcome": "1"}
      ]
    }

Complex entries are written as two-element [real, imaginary] arrays; a
bare number is read as a real entry.  Mode arguments of measurement
steps are either an integer site index or an explicit length-D vector,
which is normalized on load.  The two-mode rotate shorthand with
"modes", "theta" and an optional "phi" expands to

    [[cos(theta),                -i sin(theta) e^{-i phi}],
     [-i sin(theta) e^{i phi},    cos(theta)             ]]

acting on the named pair of sites and leaving every other site alone.

Mode indices are 0-based everywhere.
"""

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParseError
from .multislater import GROUPINGS, group_label
from .simulate import POLICIES, MeasureOne, MeasureTwo, Rotate

RENORMALIZE_WARN = 1e-6

_TOP_KEYS = {"modes", "electrons", "steps"}
_STEP_KEYS = {
    "rotate": {"kind", "unitary", "generator", "tau", "modes", "theta", "phi"},
    "measure1": {"kind", "mode", "vector", "policy", "outcome"},
    "measure2": {"kind", "first", "second", "grouping", "policy", "outcome"},
}


@dataclass(frozen=True)
class Circuit:
    """A parsed circuit document: mode count, electron count, steps."""

    modes: int
    electrons: int
    steps: tuple


def _complex_from_json(value, where):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in value)
    ):
        return complex(value[0], value[1])
    raise ParseError(f"{where}: expected a number or an [re, im] pair, got {value!r}")


def _vector_from_json(value, length, where):
    if not isinstance(value, list) or len(value) != length:
        raise ParseError(f"{where}: expected a list of {length} entries")
    vec = np.array(
        [_complex_from_json(v, f"{where}[{i}]") for i, v in enumerate(value)]
    )
    if not np.all(np.isfinite(vec.view(float))):
        raise ParseError(f"{where}: non-finite entry")
    return vec


def _matrix_from_json(value, shape, where):
    rows, cols = shape
    if not isinstance(value, list) or len(value) != rows:
        raise ParseError(f"{where}: expected {rows} rows")
    mat = np.zeros((rows, cols), dtype=complex)
    for i, row in enumerate(value):
        mat[i] = _vector_from_json(row, cols, f"{where}[{i}]")
    return mat


def _complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def _vector_to_json(vec):
    return [_complex_to_json(z) for z in np.asarray(vec)]


def _matrix_to_json(mat):
    return [_vector_to_json(row) for row in np.asarray(mat)]


def _require_int(value, where, low=None, high=None):
    if not isinstance(value, int) or isinstance(value, bool):
        raise ParseError(f"{where}: expected an integer, got {value!r}")
    if low is not None and value < low:
        raise ParseError(f"{where}: {value} is below {low}")
    if high is not None and value > high:
        raise ParseError(f"{where}: {value} is above {high}")
    return value


def _require_real(value, where):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ParseError(f"{where}: expected a real number, got {value!r}")
    return float(value)


def _check_keys(obj, allowed, where):
    extra = set(obj) - allowed
    if extra:
        raise ParseError(f"{where}: unknown keys {sorted(extra)}")


def _mode_argument(step, key, d, where):
    """Read a measurement mode given as a site index or a vector."""
    if key not in step:
        raise ParseError(f"{where}: missing {key!r}")
    value = step[key]
    if isinstance(value, int) and not isinstance(value, bool):
        _require_int(value, f"{where}.{key}", low=0, high=d - 1)
        vec = np.zeros(d, dtype=complex)
        vec[value] = 1.0
        return vec
    vec = _vector_from_json(value, d, f"{where}.{key}")
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise ParseError(f"{where}.{key}: zero vector")
    if abs(nrm - 1) > RENORMALIZE_WARN:
        warnings.warn(f"{where}.{key}: renormalizing a vector of norm {nrm:.6g}")
    return vec / nrm


def pair_rotation(theta, phi=0.0):
    """The 2x2 unitary of the two-site rotate shorthand."""
    c = np.cos(theta)
    s = np.sin(theta)
    return np.array(
        [
            [c, -1j * s * np.exp(-1j * phi)],
            [-1j * s * np.exp(1j * phi), c],
        ]
    )


def _parse_rotate(step, d, where):
    forms = [k for k in ("unitary", "generator", "modes") if k in step]
    if len(forms) != 1:
        raise ParseError(
            f"{where}: give exactly one of 'unitary', 'generator'+'tau', "
            "or 'modes'+'theta'"
        )
    form = forms[0]
    if form == "unitary":
        mat = _matrix_from_json(step["unitary"], (d, d), f"{where}.unitary")
        return Rotate(unitary=mat)
    if form == "generator":
        if "tau" not in step:
            raise ParseError(f"{where}: 'generator' needs 'tau'")
        mat = _matrix_from_json(step["generator"], (d, d), f"{where}.generator")
        return Rotate(generator=mat, tau=_require_real(step["tau"], f"{where}.tau"))
    pair = step["modes"]
    if not isinstance(pair, list) or len(pair) != 2:
        raise ParseError(f"{where}.modes: expected a pair of site indices")
    i = _require_int(pair[0], f"{where}.modes[0]", low=0, high=d - 1)
    j = _require_int(pair[1], f"{where}.modes[1]", low=0, high=d - 1)
    if i == j:
        raise ParseError(f"{where}.modes: indices must differ")
    if "theta" not in step:
        raise ParseError(f"{where}: 'modes' needs 'theta'")
    theta = _require_real(step["theta"], f"{where}.theta")
    phi = _require_real(step.get("phi", 0.0), f"{where}.phi")
    block = pair_rotation(theta, phi)
    full = np.eye(d, dtype=complex)
    full[np.ix_([i, j], [i, j])] = block
    return Rotate(unitary=full)


def _parse_policy(step, where):
    policy = step.get("policy", "sample")
    if policy not in POLICIES:
        raise ParseError(f"{where}.policy: expected one of {POLICIES}, got {policy!r}")
    return policy


def _parse_measure1(step, d, where):
    if ("mode" in step) == ("vector" in step):
        raise ParseError(f"{where}: give exactly one of 'mode' or 'vector'")
    key = "mode" if "mode" in step else "vector"
    kappa = _mode_argument(step, key, d, where)
    policy = _parse_policy(step, where)
    outcome = step.get("outcome")
    if outcome is not None:
        _require_int(outcome, f"{where}.outcome", low=0, high=1)
    if policy == "forced" and outcome is None:
        raise ParseError(f"{where}: forced policy needs 'outcome'")
    return MeasureOne(kappa=kappa, policy=policy, outcome=outcome)


def _parse_measure2(step, d, where):
    kappa = _mode_argument(step, "first", d, where)
    lam = _mode_argument(step, "second", d, where)
    grouping = step.get("grouping", "012")
    if grouping not in GROUPINGS:
        raise ParseError(
            f"{where}.grouping: expected one of {sorted(GROUPINGS)}, got {grouping!r}"
        )
    policy = _parse_policy(step, where)
    outcome = step.get("outcome")
    if outcome is not None:
        labels = [group_label(g) for g in GROUPINGS[grouping]]
        if outcome not in labels:
            raise ParseError(
                f"{where}.outcome: grouping {grouping!r} yields {labels}, "
                f"got {outcome!r}"
            )
    if policy == "forced" and outcome is None:
        raise ParseError(f"{where}: forced policy needs 'outcome'")
    return MeasureTwo(
        kappa=kappa, lam=lam, grouping=grouping, policy=policy, outcome=outcome
    )


_STEP_PARSERS = {
    "rotate": _parse_rotate,
    "measure1": _parse_measure1,
    "measure2": _parse_measure2,
}


def parse_circuit(text):
    """Parse a circuit document from a JSON string."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"bad JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    _check_keys(doc, _TOP_KEYS, "top level")
    for key in ("modes", "electrons", "steps"):
        if key not in doc:
            raise ParseError(f"missing top-level key {key!r}")
    d = _require_int(doc["modes"], "modes", low=1)
    n = _require_int(doc["electrons"], "electrons", low=0, high=d)
    if not isinstance(doc["steps"], list):
        raise ParseError("steps: expected a list")
    steps = []
    for idx, step in enumerate(doc["steps"]):
        where = f"step {idx}"
        if not isinstance(step, dict):
            raise ParseError(f"{where}: expected an object")
        kind = step.get("kind")
        if kind not in _STEP_PARSERS:
            raise ParseError(
                f"{where}.kind: expected one of {sorted(_STEP_PARSERS)}, got {kind!r}"
            )
        _check_keys(step, _STEP_KEYS[kind], where)
        try:
            steps.append(_STEP_PARSERS[kind](step, d, where))
        except ValueError as exc:
            raise ParseError(f"{where}: {exc}") from exc
    return Circuit(modes=d, electrons=n, steps=tuple(steps))


def load_circuit(path):
    """Parse a circuit document from a file."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_circuit(handle.read())


def _rotate_to_json(step):
    if step.unitary is not None:
        return {"kind": "rotate", "unitary": _matrix_to_json(step.unitary)}
    return {
        "kind": "rotate",
        "generator": _matrix_to_json(step.generator),
        "tau": float(step.tau),
    }


def _measure1_to_json(step):
    out = {"kind": "measure1", "vector": _vector_to_json(step.kappa),
           "policy": step.policy}
    if step.outcome is not None:
        out["outcome"] = int(step.outcome)
    return out


def _measure2_to_json(step):
    out = {
        "kind": "measure2",
        "first": _vector_to_json(step.kappa),
        "second": _vector_to_json(step.lam),
        "grouping": step.grouping,
        "policy": step.policy,
    }
    if step.outcome is not None:
        out["outcome"] = step.outcome
    return out


def serialize_circuit(circuit):
    """Render a circuit back to JSON text.

    Shorthand rotations come back as their expanded unitaries and mode
    indices as explicit vectors, so a save/load round trip preserves
    every matrix exactly even though the surface syntax may differ.
    """
    steps = []
    for step in circuit.steps:
        if isinstance(step, Rotate):
            steps.append(_rotate_to_json(step))
        elif isinstance(step, MeasureOne):
            steps.append(_measure1_to_json(step))
        elif isinstance(step, MeasureTwo):
            steps.append(_measure2_to_json(step))
        else:
            raise TypeError(f"unknown step type {type(step).__name__}")
    doc = {"modes": circuit.modes, "electrons": circuit.electrons, "steps": steps}
    return json.dumps(doc, indent=2) + "\n"


def save_circuit(circuit, path):
    """Write a circuit document to a file."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(serialize_circuit(circuit))
