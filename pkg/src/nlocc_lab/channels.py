"""NLOCC channel constructors and protocol composition.

Every channel is kept in Kraus form. The elementary steps are the four
noisy-LOCC primitives: local unitaries, adding a maximally mixed ancilla,
discarding a local subsystem, and classical communication realized as
local dephasing followed by sending the dephased subsystem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ValidationError
from .operators import (
    DenseOperator,
    Subsystem,
    SubsystemLayout,
    _as_op,
    _check_orthonormal,
    embed,
)

TP_TOL = 1e-9
KRAUS_PRUNE_TOL = 1e-12


@dataclass(eq=False)
class KrausChannel:
    """Completely positive map as a list of Kraus operators."""

    kraus: list
    in_layout: SubsystemLayout
    out_layout: SubsystemLayout

    def __post_init__(self):
        self.kraus = [np.asarray(v, dtype=complex) for v in self.kraus]
        shape = (self.out_layout.dim, self.in_layout.dim)
        for v in self.kraus:
            if v.shape != shape:
                raise ValidationError(f"Kraus operator shape {v.shape} != {shape}")

    @property
    def d_in(self) -> int:
        return self.in_layout.dim

    @property
    def d_out(self) -> int:
        return self.out_layout.dim

    def apply_matrix(self, mat: np.ndarray) -> np.ndarray:
        mat = np.asarray(mat, dtype=complex)
        out = np.zeros((self.d_out, self.d_out), dtype=complex)
        for v in self.kraus:
            out += v @ mat @ v.conj().T
        return out

    def apply(self, rho) -> DenseOperator:
        op = _as_op(rho)
        if op.dim != self.d_in:
            raise ValidationError(f"channel expects dimension {self.d_in}, got {op.dim}")
        return DenseOperator(self.apply_matrix(op.mat), self.out_layout)

    def is_trace_preserving(self, tol: float = TP_TOL) -> bool:
        acc = sum(v.conj().T @ v for v in self.kraus)
        return bool(np.max(np.abs(acc - np.eye(self.d_in))) <= tol)

    @staticmethod
    def identity(layout: SubsystemLayout) -> "KrausChannel":
        return KrausChannel([np.eye(layout.dim)], layout, layout)


def make_local_unitary(u, labels, layout: SubsystemLayout) -> KrausChannel:
    """Unitary on the named subsystems, which must all belong to one party."""
    u = np.asarray(u, dtype=complex)
    parties = {layout.subsystem(l).party for l in labels}
    if len(parties) != 1 or None in parties:
        raise ValidationError(f"local unitary must act within a single party, got {parties}")
    d = math.prod(layout.subsystem(l).dim for l in labels)
    if u.shape != (d, d):
        raise ValidationError(f"unitary shape {u.shape} != ({d}, {d})")
    if np.max(np.abs(u.conj().T @ u - np.eye(d))) > TP_TOL:
        raise ValidationError("matrix is not unitary within 1e-9")
    return KrausChannel([embed(u, labels, layout)], layout, layout)


def make_add_max_mixed(d_anc: int, party: str, layout: SubsystemLayout,
                       label: Optional[str] = None) -> KrausChannel:
    """Append a maximally mixed ancilla of dimension d_anc at the given party."""
    if d_anc < 1:
        raise ValidationError(f"ancilla dimension must be >= 1, got {d_anc}")
    if label is None:
        label = layout.fresh_label()
    out_layout = layout.append(Subsystem(label, d_anc, party))
    scale = 1.0 / math.sqrt(d_anc)
    eye = np.eye(layout.dim)
    kraus = [scale * np.kron(eye, np.eye(d_anc)[:, [k]]) for k in range(d_anc)]
    return KrausChannel(kraus, layout, out_layout)


def make_discard(label: str, layout: SubsystemLayout) -> KrausChannel:
    """Partial trace over one labeled subsystem, as a channel."""
    d = layout.subsystem(label).dim
    out_layout = layout.without(label)
    i = layout.index(label)
    before = math.prod(layout.dims[:i]) if i else 1
    after = math.prod(layout.dims[i + 1:]) if i + 1 < len(layout.dims) else 1
    kraus = []
    for k in range(d):
        bra = np.eye(d)[[k], :]
        kraus.append(np.kron(np.kron(np.eye(before), bra), np.eye(after)))
    return KrausChannel(kraus, layout, out_layout)


def make_dephase_local(label: str, basis, layout: SubsystemLayout) -> KrausChannel:
    """Pinching on one subsystem; Kraus operators are the embedded projectors."""
    d = layout.subsystem(label).dim
    vecs = np.asarray(basis, dtype=complex).T
    _check_orthonormal(vecs, d)
    kraus = [embed(np.outer(vecs[:, k], vecs[:, k].conj()), [label], layout) for k in range(d)]
    return KrausChannel(kraus, layout, layout)


def make_send_dephased(label: str, to_party: str, layout: SubsystemLayout) -> KrausChannel:
    """Move a (previously dephased) subsystem to the other party.

    Matrix entries are untouched; only the party tag changes. Validation
    that the subsystem is actually dephased happens at the protocol level.
    """
    layout.index(label)  # raises on unknown label
    out_layout = layout.with_party(label, to_party)
    return KrausChannel([np.eye(layout.dim)], layout, out_layout)


@dataclass(frozen=True)
class ProtocolStep:
    """One elementary NLOCC step; parameters depend on the kind."""

    kind: str
    params: dict = field(default_factory=dict)

    KINDS = ("local_unitary", "add_max_mixed", "discard", "dephase_local", "send_dephased")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValidationError(f"unknown step kind {self.kind!r}")

    @staticmethod
    def local_unitary(matrix, labels) -> "ProtocolStep":
        return ProtocolStep("local_unitary",
                            {"matrix": np.asarray(matrix, dtype=complex), "labels": tuple(labels)})

    @staticmethod
    def add_max_mixed(dim: int, party: str, label: Optional[str] = None) -> "ProtocolStep":
        return ProtocolStep("add_max_mixed", {"dim": dim, "party": party, "label": label})

    @staticmethod
    def discard(label: str) -> "ProtocolStep":
        return ProtocolStep("discard", {"label": label})

    @staticmethod
    def dephase_local(label: str, basis) -> "ProtocolStep":
        return ProtocolStep("dephase_local",
                            {"label": label, "basis": np.asarray(basis, dtype=complex)})

    @staticmethod
    def send_dephased(label: str, to_party: str) -> "ProtocolStep":
        return ProtocolStep("send_dephased", {"label": label, "to_party": to_party})

    def to_channel(self, layout: SubsystemLayout) -> KrausChannel:
        p = self.params
        if self.kind == "local_unitary":
            return make_local_unitary(p["matrix"], p["labels"], layout)
        if self.kind == "add_max_mixed":
            return make_add_max_mixed(p["dim"], p["party"], layout, p.get("label"))
        if self.kind == "discard":
            return make_discard(p["label"], layout)
        if self.kind == "dephase_local":
            return make_dephase_local(p["label"], p["basis"], layout)
        return make_send_dephased(p["label"], p["to_party"], layout)


@dataclass(eq=False)
class Protocol:
    """Ordered NLOCC steps threaded through a common layout."""

    steps: list
    initial_layout: SubsystemLayout

    def channels(self) -> list:
        """Thread layouts through the steps and validate every send.

        A SendDephased is accepted only if its subsystem is currently
        dephased: the most recent step touching the label must have been
        a DephaseLocal (a fresh maximally mixed ancilla also qualifies,
        being invariant under any pinching).
        """
        out = []
        layout = self.initial_layout
        dephased = {}
        for idx, step in enumerate(self.steps):
            ch = step.to_channel(layout)
            p = step.params
            if step.kind == "dephase_local":
                dephased[p["label"]] = True
            elif step.kind == "add_max_mixed":
                lbl = p.get("label") or ch.out_layout.labels[-1]
                dephased[lbl] = True
            elif step.kind == "local_unitary":
                for l in p["labels"]:
                    dephased.pop(l, None)
            elif step.kind == "discard":
                dephased.pop(p["label"], None)
            elif step.kind == "send_dephased":
                if not dephased.get(p["label"]):
                    raise ValidationError(
                        f"step {idx}: send of {p['label']!r} without a preceding dephase"
                    )
            out.append(ch)
            layout = ch.out_layout
        return out

    @property
    def output_layout(self) -> SubsystemLayout:
        chans = self.channels()
        return chans[-1].out_layout if chans else self.initial_layout

    def apply(self, rho) -> DenseOperator:
        """Run the protocol on a state, step by step."""
        op = _as_op(rho)
        for ch in self.channels():
            op = ch.apply(op)
        return op

    def compose(self) -> KrausChannel:
        """Single Kraus channel for the whole protocol.

        Kraus operators with Frobenius norm <= 1e-12 are pruned; the
        composition would otherwise fill up with numerical zeros.
        """
        acc = KrausChannel.identity(self.initial_layout)
        for ch in self.channels():
            kraus = [w @ v for w in ch.kraus for v in acc.kraus]
            kraus = [k for k in kraus if np.linalg.norm(k) > KRAUS_PRUNE_TOL]
            acc = KrausChannel(kraus, self.initial_layout, ch.out_layout)
        return acc


def preserves_max_mixed(c: KrausChannel, tol: float = TP_TOL) -> bool:
    """True iff the channel maps I/d_in to I/d_out."""
    out = c.apply_matrix(np.eye(c.d_in) / c.d_in)
    return bool(np.max(np.abs(out - np.eye(c.d_out) / c.d_out)) <= tol)
