"""JSON file formats for states, operators, and protocols.

Matrix files: {"dims": [d1, ...], "parties": ["A", ...], "matrix": [[re, im], ...]}
with the matrix flattened row-major (length D^2). Floats round-trip
bit-exactly through json at double precision.

Protocol files: {"layout": {"dims": ..., "parties": ..., "labels": ...},
"steps": [{"kind": ..., ...}, ...]} with kinds local_unitary,
add_max_mixed, discard, dephase_local, send_dephased.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ValidationError
from .channels import Protocol, ProtocolStep
from .operators import DenseOperator, DensityMatrix, Subsystem, SubsystemLayout


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"{path}: file not found")
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}:{e.lineno}:{e.colno}: malformed JSON: {e.msg}")


def _layout_from_json(obj: dict, context: str) -> SubsystemLayout:
    try:
        dims = [int(d) for d in obj["dims"]]
        parties = list(obj["parties"])
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"{context}: bad layout ({e})")
    if len(parties) != len(dims):
        raise ValidationError(f"{context}: {len(dims)} dims but {len(parties)} parties")
    labels = obj.get("labels") or [f"s{i}" for i in range(len(dims))]
    subs = tuple(
        Subsystem(str(l), d, p if p in ("A", "B") else None)
        for l, d, p in zip(labels, dims, parties)
    )
    return SubsystemLayout(subs)


def _layout_to_json(layout: SubsystemLayout) -> dict:
    return {
        "dims": list(layout.dims),
        "parties": [p if p is not None else "" for p in layout.parties],
        "labels": list(layout.labels),
    }


def _matrix_from_pairs(pairs, dim: int, context: str) -> np.ndarray:
    if len(pairs) != dim * dim:
        raise ValidationError(f"{context}: matrix has {len(pairs)} entries, expected {dim * dim}")
    try:
        flat = np.array([complex(re, im) for re, im in pairs])
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{context}: bad matrix entry ({e})")
    return flat.reshape(dim, dim)


def _matrix_to_pairs(mat: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in mat.reshape(-1)]


def load_operator(path: str) -> DenseOperator:
    obj = _load_json(path)
    layout = _layout_from_json(obj, path)
    mat = _matrix_from_pairs(obj.get("matrix", []), layout.dim, path)
    return DenseOperator(mat, layout)


def load_state(path: str) -> DensityMatrix:
    return DensityMatrix(load_operator(path))


def save_operator(op: DenseOperator, path: str):
    obj = _layout_to_json(op.layout)
    obj["matrix"] = _matrix_to_pairs(op.mat)
    with open(path, "w") as fh:
        json.dump(obj, fh)


def _basis_from_json(vectors, context: str) -> np.ndarray:
    try:
        return np.array([[complex(re, im) for re, im in vec] for vec in vectors])
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{context}: bad basis ({e})")


def step_from_json(obj: dict, context: str) -> ProtocolStep:
    kind = obj.get("kind")
    try:
        if kind == "local_unitary":
            labels = [str(l) for l in obj["labels"]]
            d = obj.get("dim")
            pairs = obj["matrix"]
            dim = int(round(len(pairs) ** 0.5)) if d is None else int(d)
            return ProtocolStep.local_unitary(_matrix_from_pairs(pairs, dim, context), labels)
        if kind == "add_max_mixed":
            return ProtocolStep.add_max_mixed(int(obj["dim"]), str(obj["party"]),
                                              obj.get("label"))
        if kind == "discard":
            return ProtocolStep.discard(str(obj["label"]))
        if kind == "dephase_local":
            return ProtocolStep.dephase_local(str(obj["label"]),
                                              _basis_from_json(obj["basis"], context))
        if kind == "send_dephased":
            return ProtocolStep.send_dephased(str(obj["label"]), str(obj["to_party"]))
    except KeyError as e:
        raise ValidationError(f"{context}: step {kind!r} is missing field {e}")
    raise ValidationError(f"{context}: unknown step kind {kind!r}")


def step_to_json(step: ProtocolStep) -> dict:
    p = step.params
    if step.kind == "local_unitary":
        return {"kind": step.kind, "labels": list(p["labels"]),
                "matrix": _matrix_to_pairs(p["matrix"])}
    if step.kind == "add_max_mixed":
        out = {"kind": step.kind, "dim": p["dim"], "party": p["party"]}
        if p.get("label"):
            out["label"] = p["label"]
        return out
    if step.kind == "discard":
        return {"kind": step.kind, "label": p["label"]}
    if step.kind == "dephase_local":
        return {"kind": step.kind, "label": p["label"],
                "basis": [[[float(z.real), float(z.imag)] for z in row] for row in p["basis"]]}
    return {"kind": step.kind, "label": p["label"], "to_party": p["to_party"]}


def load_protocol(path: str) -> Protocol:
    obj = _load_json(path)
    if "layout" not in obj or "steps" not in obj:
        raise ValidationError(f"{path}: protocol file needs 'layout' and 'steps'")
    layout = _layout_from_json(obj["layout"], path)
    steps = [step_from_json(s, f"{path} step {i}") for i, s in enumerate(obj["steps"])]
    protocol = Protocol(steps, layout)
    protocol.channels()  # validates threading and send preconditions
    return protocol


def save_protocol(protocol: Protocol, path: str):
    obj = {
        "layout": _layout_to_json(protocol.initial_layout),
        "steps": [step_to_json(s) for s in protocol.steps],
    }
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1)
