"""Hilbert-Schmidt adjoints of Kraus channels and the normalized dual.

The adjoint of Lambda(rho) = sum_i V_i rho V_i^dag is
Lambda^dag(rho) = sum_i V_i^dag rho V_i; it satisfies
Tr(A^dag Lambda(B)) = Tr(Lambda^dag(A^dag) B) for all operators A, B.
For channels that preserve the maximally mixed state the adjoint is trace
preserving up to the factor d_in/d_out, and rescaling by d_out/d_in gives
a genuine channel again (the normalized dual).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from .errors import ValidationError
from .channels import KrausChannel, Protocol, preserves_max_mixed
from .operators import DenseOperator, _as_op
from .random_ops import random_hermitian


@dataclass(eq=False)
class DualMap:
    """Kraus-adjointed map; CP by construction, trace preserving only up
    to trace_factor (= d_in/d_out of the source channel) when the source
    preserves the maximally mixed state."""

    kraus: list
    in_layout: object
    out_layout: object
    trace_factor: Fraction

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
            raise ValidationError(f"dual map expects dimension {self.d_in}, got {op.dim}")
        return DenseOperator(self.apply_matrix(op.mat), self.out_layout)

    def to_channel(self) -> KrausChannel:
        """Forget the trace bookkeeping and treat the dual as a plain CP map."""
        return KrausChannel(self.kraus, self.in_layout, self.out_layout)


def adjoint(c: KrausChannel) -> DualMap:
    """Hilbert-Schmidt adjoint of a Kraus channel."""
    return DualMap(
        kraus=[v.conj().T for v in c.kraus],
        in_layout=c.out_layout,
        out_layout=c.in_layout,
        trace_factor=Fraction(c.d_in, c.d_out),
    )


def normalized_dual(c: KrausChannel) -> KrausChannel:
    """The adjoint rescaled by d_out/d_in so it is trace preserving.

    Requires the source channel to preserve the maximally mixed state;
    otherwise no constant factor can normalize the trace.
    """
    if not preserves_max_mixed(c):
        raise ValidationError("normalized dual needs a channel preserving the maximally mixed state")
    scale = math.sqrt(c.d_out / c.d_in)
    return KrausChannel([scale * v.conj().T for v in c.kraus], c.out_layout, c.in_layout)


def verify_adjoint(c: KrausChannel, trials: int, tol: float = 1e-9, seed: int = 0) -> dict:
    """Sample random Hermitian (A, B) pairs and check the defining relation.

    Returns {"max_deviation", "trials", "seed", "pass"}.
    """
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    dual = adjoint(c)
    worst = 0.0
    for _ in range(trials):
        a = random_hermitian(rng, c.d_out)
        b = random_hermitian(rng, c.d_in)
        lhs = np.trace(a.conj().T @ c.apply_matrix(b))
        rhs = np.trace(dual.apply_matrix(a.conj().T) @ b)
        worst = max(worst, abs(lhs - rhs))
    return {"max_deviation": float(worst), "trials": trials, "seed": seed,
            "pass": bool(worst <= tol)}


def pure_target_projector(m: int) -> np.ndarray:
    """Projector onto |00...0> of m two-qubit pairs (dimension 4^m)."""
    d = 4 ** m
    p = np.zeros((d, d), dtype=complex)
    p[0, 0] = 1.0
    return p


def dual_image_operator(p: Protocol, m: int) -> DenseOperator:
    """Pi = Lambda^dag(P_target) for the composed protocol channel.

    Pi is positive semidefinite on the protocol's input space and has
    trace d_in/d_out of the composed channel.
    """
    ch = p.compose()
    if ch.d_out != 4 ** m:
        raise ValidationError(
            f"protocol output dimension {ch.d_out} != 4^{m} (m two-qubit pairs)"
        )
    dual = adjoint(ch)
    return DenseOperator(dual.apply_matrix(pure_target_projector(m)), ch.in_layout)
