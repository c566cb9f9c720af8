"""Dense operator algebra on labeled tensor-product spaces.

Matrices are stored row-major with the leftmost subsystem as the most
significant index, so ``tensor(a, b)`` is exactly ``np.kron(a, b)``.
All entropies and relative entropies are reported in bits (base-2 logs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ValidationError

HERMITIAN_TOL = 1e-10
# Eigenvalues below EIG_CLIP are treated as exact zeros in entropy sums;
# SUPPORT_TOL decides support membership for relative entropy.
EIG_CLIP = 1e-12
SUPPORT_TOL = 1e-10

PARTIES = ("A", "B")


@dataclass(frozen=True)
class Subsystem:
    label: str
    dim: int
    party: Optional[str] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError(f"subsystem {self.label!r}: dim must be >= 1, got {self.dim}")
        if self.party is not None and self.party not in PARTIES:
            raise ValidationError(f"subsystem {self.label!r}: unknown party {self.party!r}")


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered list of subsystems; defines the tensor factorization."""

    subsystems: tuple

    def __post_init__(self):
        subs = tuple(self.subsystems)
        object.__setattr__(self, "subsystems", subs)
        labels = [s.label for s in subs]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"duplicate subsystem labels in {labels}")

    @staticmethod
    def of(*specs) -> "SubsystemLayout":
        """Build a layout from (label, dim) or (label, dim, party) tuples."""
        return SubsystemLayout(tuple(Subsystem(*s) for s in specs))

    @property
    def dims(self) -> tuple:
        return tuple(s.dim for s in self.subsystems)

    @property
    def labels(self) -> tuple:
        return tuple(s.label for s in self.subsystems)

    @property
    def parties(self) -> tuple:
        return tuple(s.party for s in self.subsystems)

    @property
    def dim(self) -> int:
        return int(math.prod(self.dims))

    def index(self, label: str) -> int:
        for i, s in enumerate(self.subsystems):
            if s.label == label:
                return i
        raise ValidationError(f"unknown subsystem label {label!r} (have {self.labels})")

    def subsystem(self, label: str) -> Subsystem:
        return self.subsystems[self.index(label)]

    def without(self, label: str) -> "SubsystemLayout":
        i = self.index(label)
        return SubsystemLayout(self.subsystems[:i] + self.subsystems[i + 1:])

    def with_party(self, label: str, party: Optional[str]) -> "SubsystemLayout":
        if party is not None and party not in PARTIES:
            raise ValidationError(f"unknown party {party!r}")
        i = self.index(label)
        subs = list(self.subsystems)
        subs[i] = Subsystem(subs[i].label, subs[i].dim, party)
        return SubsystemLayout(tuple(subs))

    def append(self, sub: Subsystem) -> "SubsystemLayout":
        return SubsystemLayout(self.subsystems + (sub,))

    def party_positions(self, party: str) -> list:
        return [i for i, s in enumerate(self.subsystems) if s.party == party]

    def fresh_label(self, stem: str = "anc") -> str:
        k = 0
        while f"{stem}{k}" in self.labels:
            k += 1
        return f"{stem}{k}"


def qubit_pair_layout(n: int = 1) -> SubsystemLayout:
    """Layout for n shared qubit pairs, alternating Alice/Bob."""
    specs = []
    for k in range(n):
        specs.append((f"a{k}", 2, "A"))
        specs.append((f"b{k}", 2, "B"))
    return SubsystemLayout.of(*specs)


@dataclass(eq=False)
class DenseOperator:
    """Square complex matrix with a declared subsystem layout."""

    mat: np.ndarray
    layout: SubsystemLayout

    def __post_init__(self):
        self.mat = np.asarray(self.mat, dtype=complex)
        if self.mat.ndim != 2 or self.mat.shape[0] != self.mat.shape[1]:
            raise ValidationError(f"operator must be square, got shape {self.mat.shape}")
        if self.mat.shape[0] != self.layout.dim:
            raise ValidationError(
                f"matrix dimension {self.mat.shape[0]} != layout dimension {self.layout.dim}"
            )

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return bool(np.max(np.abs(self.mat - self.mat.conj().T)) <= tol)

    def trace(self) -> complex:
        return complex(np.trace(self.mat))

    @staticmethod
    def identity(layout: SubsystemLayout) -> "DenseOperator":
        return DenseOperator(np.eye(layout.dim), layout)


@dataclass(eq=False)
class DensityMatrix:
    """A DenseOperator validated as a quantum state."""

    op: DenseOperator

    def __post_init__(self):
        m = self.op.mat
        if not self.op.is_hermitian():
            raise ValidationError("density matrix is not Hermitian within 1e-10")
        if abs(np.trace(m).real - 1.0) > HERMITIAN_TOL or abs(np.trace(m).imag) > HERMITIAN_TOL:
            raise ValidationError(f"density matrix trace {np.trace(m)} != 1")
        w = np.linalg.eigvalsh(m)
        if w.min() < -HERMITIAN_TOL:
            raise ValidationError(f"density matrix has negative eigenvalue {w.min()}")

    @staticmethod
    def from_matrix(mat, layout: SubsystemLayout) -> "DensityMatrix":
        return DensityMatrix(DenseOperator(mat, layout))

    @staticmethod
    def from_vector(vec, layout: SubsystemLayout) -> "DensityMatrix":
        v = np.asarray(vec, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
        return DensityMatrix(DenseOperator(np.outer(v, v.conj()), layout))

    @property
    def mat(self) -> np.ndarray:
        return self.op.mat

    @property
    def layout(self) -> SubsystemLayout:
        return self.op.layout

    @property
    def dim(self) -> int:
        return self.op.dim


def _as_op(a) -> DenseOperator:
    return a.op if isinstance(a, DensityMatrix) else a


def tensor(a, b) -> DenseOperator:
    """Kronecker product with concatenated layouts (labels must not clash)."""
    a, b = _as_op(a), _as_op(b)
    clash = set(a.layout.labels) & set(b.layout.labels)
    if clash:
        raise ValidationError(f"label clash in tensor product: {sorted(clash)}")
    return DenseOperator(np.kron(a.mat, b.mat),
                         SubsystemLayout(a.layout.subsystems + b.layout.subsystems))


def tensor_power(a, n: int) -> DenseOperator:
    """n-fold tensor power; copy k gets labels suffixed with ``#k``."""
    a = _as_op(a)
    if n < 1:
        raise ValidationError(f"tensor power needs n >= 1, got {n}")
    out = None
    for k in range(n):
        subs = tuple(Subsystem(f"{s.label}#{k}", s.dim, s.party) for s in a.layout.subsystems)
        copy = DenseOperator(a.mat, SubsystemLayout(subs))
        out = copy if out is None else tensor(out, copy)
    return out


def partial_trace(a, label: str) -> DenseOperator:
    """Trace out one labeled subsystem."""
    a = _as_op(a)
    i = a.layout.index(label)
    dims = a.layout.dims
    k = len(dims)
    t = a.mat.reshape(dims + dims)
    t = np.trace(t, axis1=i, axis2=k + i)
    new_layout = a.layout.without(label)
    return DenseOperator(t.reshape(new_layout.dim, new_layout.dim), new_layout)


def partial_transpose(a, party: str = "B") -> DenseOperator:
    """Transpose the tensor factors belonging to one party."""
    a = _as_op(a)
    pos = a.layout.party_positions(party)
    dims = a.layout.dims
    k = len(dims)
    axes = list(range(2 * k))
    for i in pos:
        axes[i], axes[k + i] = axes[k + i], axes[i]
    t = a.mat.reshape(dims + dims).transpose(axes)
    return DenseOperator(t.reshape(a.dim, a.dim), a.layout)


def _check_orthonormal(basis: np.ndarray, dim: int, tol: float = HERMITIAN_TOL):
    if basis.shape != (dim, dim):
        raise ValidationError(
            f"basis must be {dim} orthonormal vectors of length {dim}, got shape {basis.shape}"
        )
    gram = basis.conj().T @ basis
    if np.max(np.abs(gram - np.eye(dim))) > tol:
        raise ValidationError("basis vectors are not orthonormal within 1e-10")


def embed(local: np.ndarray, labels: Sequence[str], layout: SubsystemLayout) -> np.ndarray:
    """Embed an operator acting on the named subsystems into the full space."""
    local = np.asarray(local, dtype=complex)
    dims = layout.dims
    pos = [layout.index(l) for l in labels]
    rest = [i for i in range(len(dims)) if i not in pos]
    d_loc = math.prod(dims[i] for i in pos)
    if local.shape != (d_loc, d_loc):
        raise ValidationError(f"local operator shape {local.shape} != ({d_loc}, {d_loc})")
    full = np.kron(local, np.eye(math.prod(dims[i] for i in rest) if rest else 1))
    order = pos + rest
    t = full.reshape([dims[i] for i in order] * 2)
    inv = list(np.argsort(order))
    t = t.transpose(inv + [len(dims) + i for i in inv])
    return np.ascontiguousarray(t.reshape(layout.dim, layout.dim))


def dephase(a, label: str, basis) -> DenseOperator:
    """Pinch one tensor factor in the given orthonormal basis.

    The basis is a sequence of d vectors (d = dimension of the labeled
    subsystem); the map is sum_i (P_i (x) I) rho (P_i (x) I) with P_i the
    rank-1 projectors onto the basis vectors.
    """
    a = _as_op(a)
    d = a.layout.subsystem(label).dim
    b = np.asarray(basis, dtype=complex)
    if b.ndim != 2:
        raise ValidationError("basis must be a sequence of vectors")
    vecs = b.T  # rows in, columns out
    _check_orthonormal(vecs, d)
    out = np.zeros_like(a.mat)
    for i in range(d):
        p = embed(np.outer(vecs[:, i], vecs[:, i].conj()), [label], a.layout)
        out += p @ a.mat @ p
    return DenseOperator(out, a.layout)


def computational_basis(d: int) -> np.ndarray:
    """Standard basis as rows, for use with dephase()."""
    return np.eye(d)


def eig_hermitian(a, tol: float = HERMITIAN_TOL):
    """Spectral decomposition, eigenvalues sorted descending.

    Returns (eigenvalues, eigenvectors) with eigenvectors as columns,
    column j matching eigenvalue j.
    """
    m = _as_op(a).mat if isinstance(a, (DenseOperator, DensityMatrix)) else np.asarray(a, dtype=complex)
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise ValidationError("eig_hermitian: input is not Hermitian within 1e-10")
    w, v = np.linalg.eigh(m)
    return w[::-1].copy(), v[:, ::-1].copy()


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S(rho) = -sum lambda_i log2 lambda_i, in bits."""
    w = np.linalg.eigvalsh(rho.mat)
    w = w[w > EIG_CLIP]
    return float(-np.sum(w * np.log2(w)))


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """S(rho||sigma) = Tr rho log2 rho - Tr rho log2 sigma, in bits.

    Returns +inf when the support of rho is not contained in the
    support of sigma (decided at eigenvalue threshold 1e-10).
    """
    if rho.dim != sigma.dim:
        raise ValidationError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    wr = np.linalg.eigvalsh(rho.mat)
    wr = wr[wr > EIG_CLIP]
    term1 = float(np.sum(wr * np.log2(wr)))
    ws, vs = np.linalg.eigh(sigma.mat)
    overlap = np.real(np.einsum("ji,jk,ki->i", vs.conj(), rho.mat, vs))
    outside = ws <= SUPPORT_TOL
    if np.any(overlap[outside] > SUPPORT_TOL):
        return math.inf
    inside = ~outside
    term2 = float(np.sum(overlap[inside] * np.log2(ws[inside])))
    return term1 - term2


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product Tr(a^dag b)."""
    a, b = _as_op(a), _as_op(b)
    if a.dim != b.dim:
        raise ValidationError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.mat, b.mat))
