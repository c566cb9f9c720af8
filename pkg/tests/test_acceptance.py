"""Acceptance gate: one pass/fail line per criterion.

Each test prints its verdict before asserting, so the summary is visible
even when a criterion fails.
"""

import math
import time

import numpy as np
import pytest

from nlocc_lab import (
    DensityMatrix,
    SpectrumPower,
    adjoint,
    audit_protocol,
    computational_basis,
    load_protocol,
    load_state,
    make_add_max_mixed,
    make_dephase_local,
    make_discard,
    make_local_unitary,
    min_trace_operator,
    mismatched_rate,
    normalized_dual,
    ppt_check,
    qubit_pair_layout,
    ree,
    typical_projector_dim,
    ubound_rate,
    von_neumann_entropy,
)
from nlocc_lab.data import BUNDLED_PROTOCOLS, protocol_path, state_path
from nlocc_lab.random_ops import (
    bell_state,
    max_mixed_state,
    random_density_matrix,
    random_hermitian,
    random_product_ensemble,
    random_unitary,
    zero_zero_state,
)

from test_compression import oracle_dim


def _verdict(num, label, ok):
    print(f"criterion {num} ({label}): {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {num} ({label}) failed"


def _channel_pool():
    rng = np.random.default_rng(1001)
    lay = qubit_pair_layout(1)
    elementary = [
        make_local_unitary(random_unitary(rng, 2), ["a0"], lay),
        make_add_max_mixed(2, "A", lay),
        make_add_max_mixed(3, "B", lay),
        make_discard("a0", lay),
        make_dephase_local("a0", computational_basis(2), lay),
        make_dephase_local("b0", computational_basis(2), lay),
    ]
    composed = [load_protocol(protocol_path(n)).compose() for n in BUNDLED_PROTOCOLS]
    return elementary + composed


def test_criterion_1_adjoint_identity():
    t0 = time.time()
    rng = np.random.default_rng(1002)
    pool = _channel_pool()
    worst = 0.0
    trials = 1000
    for i in range(trials):
        ch = pool[i % len(pool)]
        dual = adjoint(ch)
        a = random_hermitian(rng, ch.d_out)
        b = random_hermitian(rng, ch.d_in)
        lhs = np.trace(a.conj().T @ ch.apply_matrix(b))
        rhs = np.trace(dual.apply_matrix(a.conj().T) @ b)
        worst = max(worst, abs(lhs - rhs))
    elapsed = time.time() - t0
    _verdict(1, "adjoint identity", worst <= 1e-9 and elapsed < 30.0)


def test_criterion_2_dual_pair_table():
    rng = np.random.default_rng(1003)
    lay = qubit_pair_layout(1)
    ok = True

    deph = make_dephase_local("a0", computational_basis(2), lay)
    nd_deph = normalized_dual(deph)
    u = random_unitary(rng, 2)
    lu = make_local_unitary(u, ["a0"], lay)
    lu_inv = make_local_unitary(u.conj().T, ["a0"], lay)
    nd_lu = normalized_dual(lu)
    add = make_add_max_mixed(2, "A", lay, label="anc")
    disc = make_discard("anc", add.out_layout)
    nd_add = normalized_dual(add)
    nd_disc = normalized_dual(disc)

    for _ in range(20):
        rho = random_density_matrix(rng, lay).mat
        big = random_density_matrix(rng, add.out_layout).mat
        ok &= np.max(np.abs(nd_deph.apply_matrix(rho) - deph.apply_matrix(rho))) <= 1e-9
        ok &= np.max(np.abs(nd_lu.apply_matrix(rho) - lu_inv.apply_matrix(rho))) <= 1e-9
        ok &= np.max(np.abs(nd_add.apply_matrix(big) - disc.apply_matrix(big))) <= 1e-9
        ok &= np.max(np.abs(nd_disc.apply_matrix(rho) - add.apply_matrix(rho))) <= 1e-9
    _verdict(2, "dual-pair table", bool(ok))


def test_criterion_3_trace_factor():
    rng = np.random.default_rng(1004)
    ok = True
    for name in BUNDLED_PROTOCOLS:
        ch = load_protocol(protocol_path(name)).compose()
        dual = adjoint(ch)
        gamma = normalized_dual(ch)
        ok &= gamma.is_trace_preserving(tol=1e-9)
        factor = ch.d_in / ch.d_out
        for _ in range(10):
            rho = random_density_matrix(rng, ch.out_layout).mat
            ok &= abs(np.trace(dual.apply_matrix(rho)) - factor) <= 1e-9
    _verdict(3, "dual trace factor", bool(ok))


def test_criterion_4_compression_oracle_agreement():
    t0 = time.time()
    sp = SpectrumPower((0.9, 0.1), 10)
    dim = typical_projector_dim(sp, 0.01)
    ok = dim == oracle_dim((0.9, 0.1), 10, 0.01) == 229
    ok &= time.time() - t0 < 10.0
    _verdict(4, "compression oracle agreement at n=10", bool(ok))


def test_criterion_4_compression_convergence():
    # deviation |rate - S(rho)| at eps = 0.1 is small at n = 20 but is NOT
    # strictly decreasing over n in {5, 10, 15, 20}: at this large epsilon
    # the projector undershoots the entropy for small n (rate < S), so the
    # deviation first grows; see the decision ledger for the enumeration
    t0 = time.time()
    s = -(0.9 * math.log2(0.9) + 0.1 * math.log2(0.1))
    devs = []
    for n in (5, 10, 15, 20):
        dim = typical_projector_dim(SpectrumPower((0.9, 0.1), n), 0.1)
        devs.append(abs(math.log2(dim) / n - s))
    decreasing = all(devs[i + 1] < devs[i] for i in range(3))
    ok = decreasing and devs[-1] <= 0.15 and time.time() - t0 < 10.0
    _verdict(4, "compression deviation strictly decreasing", bool(ok))


def test_criterion_5_positive_operator_relaxation():
    rng = np.random.default_rng(1005)
    ok = True
    spectra = [tuple(sorted((p1, 1.0 - p1), reverse=True))
               for p1 in rng.uniform(0.5, 1.0, size=100)]
    for w in spectra:
        for n in (5, 10):
            sp = SpectrumPower(w, n)
            dim = typical_projector_dim(sp, 0.1)
            mt = min_trace_operator(sp, 0.1)
            ok &= mt <= dim + 1e-9
            ok &= dim - mt < 1.0
    for w in spectra:
        sp = SpectrumPower(w, 20)
        dim = typical_projector_dim(sp, 0.1)
        mt = min_trace_operator(sp, 0.1)
        ok &= (math.log2(dim) - math.log2(mt)) / 20 <= 0.02
    _verdict(5, "positive-operator relaxation", bool(ok))


def test_criterion_6_mismatched_penalty():
    rate = mismatched_rate((0.9, 0.1), (0.6, 0.4), 20, 0.05)
    ok = abs(rate - 0.8371) <= 0.15
    for n in (1, 5, 10, 20, 35):
        ok &= mismatched_rate((0.9, 0.1), (0.5, 0.5), n, 0.05) == 1.0
    _verdict(6, "mismatched penalty", bool(ok))


def test_criterion_7_ree():
    t0 = time.time()
    rng = np.random.default_rng(1006)
    lay = qubit_pair_layout(1)
    ok = True
    for k in range(10):
        rho = random_product_ensemble(rng, lay, n_terms=3)
        res = ree(rho, seed=k)
        ok &= res.value_bits <= 1e-3
        h = res.objective_history
        ok &= all(h[i + 1] <= h[i] + 1e-12 for i in range(len(h) - 1))
    bell = bell_state()
    res = ree(bell, seed=0)
    from nlocc_lab import partial_trace

    oracle = von_neumann_entropy(
        DensityMatrix.from_matrix(
            partial_trace(bell, "b0").mat, bell.layout.without("b0")
        )
    )
    ok &= abs(res.value_bits - oracle) <= 1e-2
    h = res.objective_history
    ok &= all(h[i + 1] <= h[i] + 1e-12 for i in range(len(h) - 1))
    elapsed = time.time() - t0
    ok &= elapsed < 60.0
    _verdict(7, "relative entropy of entanglement", bool(ok))


def test_criterion_8_rate_bound():
    rng = np.random.default_rng(1007)
    lay = qubit_pair_layout(1)
    ok = True
    ok &= abs(ubound_rate(bell_state(), seed=0).bound_bits - 1.0) <= 1e-2
    ok &= abs(ubound_rate(zero_zero_state(), seed=0).bound_bits - 2.0) <= 1e-6
    ok &= abs(ubound_rate(max_mixed_state(), seed=0).bound_bits) <= 1e-6
    for k in range(20):
        rho = random_density_matrix(rng, lay)
        u = np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
        rotated = DensityMatrix.from_matrix(u @ rho.mat @ u.conj().T, lay)
        b1 = ubound_rate(rho, seed=k).bound_bits
        b2 = ubound_rate(rotated, seed=k).bound_bits
        ok &= abs(b1 - b2) <= 1e-2
    _verdict(8, "separable rate bound", bool(ok))


def test_criterion_9_protocol_audit():
    rho = zero_zero_state()
    bound = ubound_rate(rho, seed=0).bound_bits
    ok = True
    for name in BUNDLED_PROTOCOLS:
        proto = load_protocol(protocol_path(name))
        rep = audit_protocol(proto, rho, n=1, m=1)
        ok &= abs(rep.f_primal - rep.f_dual) <= 1e-9
        ok &= abs(rep.pi_trace - rep.pi_trace_expected) <= 1e-9
        ok &= rep.ppt_pi
        ok &= rep.rate_from_pi <= bound + 1e-2
    _verdict(9, "protocol audit", bool(ok))
