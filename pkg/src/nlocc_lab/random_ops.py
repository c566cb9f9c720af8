"""Seeded random operators and a few standard states."""

from __future__ import annotations

import numpy as np

from .operators import DenseOperator, DensityMatrix, SubsystemLayout, qubit_pair_layout


def haar_vector(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_hermitian(rng: np.random.Generator, d: int, scale: float = 1.0) -> np.ndarray:
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (m + m.conj().T) / 2


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density_matrix(rng: np.random.Generator, layout: SubsystemLayout,
                          rank: int | None = None) -> DensityMatrix:
    d = layout.dim
    rank = rank or d
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return DensityMatrix.from_matrix(m / np.trace(m), layout)


def random_product_ensemble(rng: np.random.Generator, layout: SubsystemLayout,
                            n_terms: int) -> DensityMatrix:
    """Random separable state: a mixture of Haar product pure states
    across the A:B cut of the layout."""
    from .separable import bipartite_split  # local import to avoid a cycle

    _, d_a, d_b, perm = bipartite_split(DenseOperator.identity(layout))
    w = rng.dirichlet(np.ones(n_terms))
    m_sorted = np.zeros((d_a * d_b, d_a * d_b), dtype=complex)
    for k in range(n_terms):
        v = np.kron(haar_vector(rng, d_a), haar_vector(rng, d_b))
        m_sorted += w[k] * np.outer(v, v.conj())
    # undo the A-first sort so the matrix matches the caller's layout order
    dims = layout.dims
    nsub = len(dims)
    inv = np.argsort(perm)
    t = m_sorted.reshape([dims[i] for i in perm] * 2)
    t = t.transpose(list(inv) + [nsub + i for i in inv])
    return DensityMatrix.from_matrix(t.reshape(layout.dim, layout.dim), layout)


def bell_state(layout: SubsystemLayout | None = None) -> DensityMatrix:
    layout = layout or qubit_pair_layout(1)
    return DensityMatrix.from_vector(np.array([1, 0, 0, 1]) / np.sqrt(2), layout)


def zero_zero_state(layout: SubsystemLayout | None = None) -> DensityMatrix:
    layout = layout or qubit_pair_layout(1)
    return DensityMatrix.from_vector(np.array([1, 0, 0, 0]), layout)


def max_mixed_state(layout: SubsystemLayout | None = None) -> DensityMatrix:
    layout = layout or qubit_pair_layout(1)
    return DensityMatrix.from_matrix(np.eye(layout.dim) / layout.dim, layout)
