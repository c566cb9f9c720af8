"""Heisenberg-picture adjoints, dual pairs, and trace factors."""

from fractions import Fraction

import numpy as np

from nlocc_lab import (
    Protocol,
    ProtocolStep,
    adjoint,
    computational_basis,
    make_add_max_mixed,
    make_dephase_local,
    make_discard,
    make_local_unitary,
    normalized_dual,
    qubit_pair_layout,
    verify_adjoint,
)
from nlocc_lab.duality import dual_image_operator, pure_target_projector
from nlocc_lab.random_ops import random_density_matrix, random_hermitian, random_unitary


def _check_defining_relation(ch, rng, trials=50, tol=1e-9):
    dual = adjoint(ch)
    worst = 0.0
    for _ in range(trials):
        a = random_hermitian(rng, ch.d_out)
        b = random_hermitian(rng, ch.d_in)
        lhs = np.trace(a.conj().T @ ch.apply_matrix(b))
        rhs = np.trace(dual.apply_matrix(a.conj().T) @ b)
        worst = max(worst, abs(lhs - rhs))
    assert worst <= tol


def test_adjoint_defining_relation_elementary():
    rng = np.random.default_rng(101)
    lay = qubit_pair_layout(1)
    channels = [
        make_local_unitary(random_unitary(rng, 2), ["a0"], lay),
        make_add_max_mixed(3, "A", lay),
        make_discard("a0", lay),
        make_dephase_local("b0", computational_basis(2), lay),
    ]
    for ch in channels:
        _check_defining_relation(ch, rng)


def test_adjoint_defining_relation_composed():
    rng = np.random.default_rng(103)
    lay = qubit_pair_layout(1)
    proto = Protocol(
        [
            ProtocolStep.dephase_local("a0", computational_basis(2)),
            ProtocolStep.send_dephased("a0", "B"),
            ProtocolStep.add_max_mixed(2, "A", label="anc"),
            ProtocolStep.discard("b0"),
        ],
        lay,
    )
    _check_defining_relation(proto.compose(), rng)


def test_dephasing_is_self_dual():
    rng = np.random.default_rng(107)
    lay = qubit_pair_layout(1)
    ch = make_dephase_local("a0", computational_basis(2), lay)
    nd = normalized_dual(ch)
    for _ in range(10):
        rho = random_density_matrix(rng, lay)
        assert np.allclose(nd.apply_matrix(rho.mat), ch.apply_matrix(rho.mat), atol=1e-9)


def test_dual_of_unitary_is_inverse():
    rng = np.random.default_rng(109)
    lay = qubit_pair_layout(1)
    u = random_unitary(rng, 2)
    ch = make_local_unitary(u, ["a0"], lay)
    inv = make_local_unitary(u.conj().T, ["a0"], lay)
    nd = normalized_dual(ch)
    for _ in range(10):
        rho = random_density_matrix(rng, lay)
        assert np.allclose(nd.apply_matrix(rho.mat), inv.apply_matrix(rho.mat), atol=1e-9)


def test_add_and_discard_are_dual_pair():
    rng = np.random.default_rng(113)
    lay = qubit_pair_layout(1)
    add = make_add_max_mixed(2, "A", lay, label="anc")
    disc = make_discard("anc", add.out_layout)
    nd_add = normalized_dual(add)
    nd_disc = normalized_dual(disc)
    for _ in range(10):
        big = random_density_matrix(rng, add.out_layout)
        small = random_density_matrix(rng, lay)
        assert np.allclose(nd_add.apply_matrix(big.mat), disc.apply_matrix(big.mat), atol=1e-9)
        assert np.allclose(nd_disc.apply_matrix(small.mat), add.apply_matrix(small.mat), atol=1e-9)


def test_trace_factor_is_exact_fraction():
    lay = qubit_pair_layout(1)
    add = make_add_max_mixed(3, "A", lay)
    disc = make_discard("a0", lay)
    assert adjoint(add).trace_factor == Fraction(4, 12)
    assert adjoint(disc).trace_factor == Fraction(4, 2)
    rng = np.random.default_rng(127)
    for ch in (add, disc):
        dual = adjoint(ch)
        for _ in range(10):
            rho = random_density_matrix(rng, ch.out_layout)
            tr = np.trace(dual.apply_matrix(rho.mat))
            assert abs(tr - float(dual.trace_factor)) < 1e-9


def test_verify_adjoint_report():
    lay = qubit_pair_layout(1)
    ch = make_dephase_local("a0", computational_basis(2), lay)
    rep = verify_adjoint(ch, trials=25, seed=3)
    assert rep["pass"] is True
    assert rep["trials"] == 25
    assert rep["max_deviation"] <= 1e-9


def test_pure_target_projector_shape():
    p = pure_target_projector(2)
    assert p.shape == (16, 16)
    assert p[0, 0] == 1.0 and np.count_nonzero(p) == 1


def test_dual_image_operator_on_identity_protocol():
    lay = qubit_pair_layout(1)
    proto = Protocol([], lay)
    pi = dual_image_operator(proto, 1)
    assert np.allclose(pi.mat, pure_target_projector(1))
