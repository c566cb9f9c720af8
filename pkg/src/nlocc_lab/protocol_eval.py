"""End-to-end evaluation of distillation protocols.

A protocol takes rho^(x)n to (approximately) m standard pure pairs
P_|00>^(x)m. Fidelity can be computed on the primal side (push the state
through the channel) or the dual side (pull the target back through the
adjoint); the two must agree to machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import NumericalError, ValidationError
from .channels import Protocol
from .duality import adjoint, dual_image_operator, pure_target_projector
from .operators import DenseOperator, DensityMatrix, tensor_power
from .separable import ppt_check

FID_TOL = 1e-9
DENSE_DIM_CAP = 4096


def _input_power(p: Protocol, rho: DensityMatrix, n: int) -> DenseOperator:
    rho_n = tensor_power(rho.op, n)
    if rho_n.dim > DENSE_DIM_CAP:
        raise ValidationError(f"dense evaluation capped at dimension {DENSE_DIM_CAP}")
    if rho_n.dim != p.initial_layout.dim:
        raise ValidationError(
            f"rho^(x){n} has dimension {rho_n.dim}, protocol expects {p.initial_layout.dim}"
        )
    return DenseOperator(rho_n.mat, p.initial_layout)


def fidelity_primal(p: Protocol, rho: DensityMatrix, n: int, m: int) -> float:
    """F = Tr[P_target Lambda(rho^(x)n)]."""
    rho_n = _input_power(p, rho, n)
    out = p.apply(rho_n)
    if out.dim != 4 ** m:
        raise ValidationError(f"protocol output dimension {out.dim} != 4^{m}")
    return float(np.real(np.trace(pure_target_projector(m) @ out.mat)))


def fidelity_dual(p: Protocol, rho: DensityMatrix, n: int, m: int) -> float:
    """F = Tr[Lambda^dag(P_target) rho^(x)n]; equals fidelity_primal."""
    rho_n = _input_power(p, rho, n)
    pi = dual_image_operator(p, m)
    return float(np.real(np.trace(pi.mat @ rho_n.mat)))


def rate_from_pi(pi: DenseOperator, rho: DensityMatrix, n: int, d: int) -> float:
    """r = 2 log2 d - (1/n) log2 Tr[Pi rho^(x)n], in bits per input copy."""
    rho_n = tensor_power(rho.op, n)
    if pi.dim != rho_n.dim:
        raise ValidationError(f"Pi dimension {pi.dim} != rho^(x){n} dimension {rho_n.dim}")
    overlap = float(np.real(np.trace(pi.mat @ rho_n.mat)))
    if overlap <= 0.0:
        raise NumericalError(f"degenerate protocol: Tr[Pi rho^(x)n] = {overlap}")
    return 2.0 * math.log2(d) - math.log2(overlap) / n


def concentration_rate_from_trace(pi_trace: float, n: int, d: int) -> float:
    """Qubit-pair rate 2m/n per copy, recovered from Tr Pi = d^(2n)/4^m."""
    return 2.0 * math.log2(d) - math.log2(pi_trace) / n


@dataclass(frozen=True)
class FidelityReport:
    n: int
    m: int
    f_primal: float
    f_dual: float
    pi_trace: float
    pi_trace_expected: float
    ppt_pi: bool
    rate_from_pi: float
    concentration_rate: float

    def to_dict(self) -> dict:
        return asdict(self)


def audit_protocol(p: Protocol, rho: DensityMatrix, n: int, m: int) -> FidelityReport:
    """Full protocol audit: both fidelities, Pi trace vs d_in/d_out,
    PPT of Pi/Tr Pi across the A:B cut, and the rate."""
    ch = p.compose()
    rho_n = _input_power(p, rho, n)
    pi = dual_image_operator(p, m)

    f_primal = float(np.real(np.trace(pure_target_projector(m) @ ch.apply(rho_n).mat)))
    f_dual = float(np.real(np.trace(pi.mat @ rho_n.mat)))

    pi_trace = float(np.real(np.trace(pi.mat)))
    expected = ch.d_in / ch.d_out
    pi_state = DensityMatrix.from_matrix(pi.mat / pi_trace, pi.layout)
    d_single = round(math.sqrt(rho.dim))

    overlap = f_dual
    if overlap <= 0.0:
        raise NumericalError(f"degenerate protocol: Tr[Pi rho^(x)n] = {overlap}")
    return FidelityReport(
        n=n,
        m=m,
        f_primal=f_primal,
        f_dual=f_dual,
        pi_trace=pi_trace,
        pi_trace_expected=expected,
        ppt_pi=ppt_check(pi_state),
        rate_from_pi=2.0 * math.log2(d_single) - math.log2(overlap) / n,
        concentration_rate=concentration_rate_from_trace(pi_trace, n, d_single),
    )
