"""Concrete ordered *-spaces and gramian (vector-valued inner product) utilities.

Two coefficient spaces are supported: the complex scalars with the
nonnegative half-line as positive cone, and ``d x d`` complex matrices with
the conjugate transpose as involution and the positive semidefinite cone.
Elements of either space are plain ``(d, d)`` complex arrays (scalars as
``1 x 1``), so a single code path serves both.

A gram tensor is an ``n x n`` table of such elements acting as a
matrix-valued metric on coefficient vectors in ``C^n``.  The pairing it
induces is conjugate-linear in the first slot and linear in the second.
All functions here are pure; arrays inside the frozen containers are marked
read-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaError

SEMINORM_TAGS = ("operator", "trace")

#: Multiplicative constant in the Schwarz-type bound for gram pairings.
#: The sharp constant for general weakly positive metrics is not known to be
#: smaller; claims of 2 in the literature have not survived scrutiny, so the
#: proven value 4 is used and the empirical ratio is merely reported.
SCHWARZ_CONSTANT = 4.0


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ZSpaceDescriptor:
    """Which ordered *-space the elements live in.

    ``kind`` is ``"scalar"`` (complex numbers, cone = nonnegative reals) or
    ``"hermitian"`` (``dim x dim`` matrices, cone = positive semidefinite).
    ``tolerance`` is the relative cone-membership slack; the effective slack
    for an element ``z`` is ``tolerance * (1 + opnorm(z))``.
    """

    kind: str = "scalar"
    dim: int = 1
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.kind not in ("scalar", "hermitian"):
            raise SchemaError(f"unknown space kind {self.kind!r}")
        if self.dim < 1:
            raise SchemaError("space dimension must be >= 1")
        if self.kind == "scalar" and self.dim != 1:
            raise SchemaError("scalar space has dim 1")
        if self.tolerance < 0:
            raise SchemaError("tolerance must be nonnegative")


def scalar_space(tolerance: float = 1e-9) -> ZSpaceDescriptor:
    return ZSpaceDescriptor("scalar", 1, tolerance)


def hermitian_space(dim: int, tolerance: float = 1e-9) -> ZSpaceDescriptor:
    return ZSpaceDescriptor("hermitian", dim, tolerance)


def as_zelement(value, space: ZSpaceDescriptor) -> np.ndarray:
    """Coerce a scalar or array into a ``(dim, dim)`` complex array."""
    z = np.atleast_2d(np.asarray(value, dtype=complex))
    if z.shape != (space.dim, space.dim):
        raise SchemaError(f"element shape {z.shape} does not match space dim {space.dim}")
    if not np.all(np.isfinite(z)):
        raise SchemaError("element has non-finite entries")
    return z


def involution(z: np.ndarray) -> np.ndarray:
    """Conjugate transpose, applied to the last two axes."""
    return np.conj(np.swapaxes(np.asarray(z, dtype=complex), -1, -2))


def hermitian_part(z: np.ndarray) -> np.ndarray:
    return 0.5 * (np.asarray(z, dtype=complex) + involution(z))


def hermitian_defect(z: np.ndarray) -> float:
    """Max entrywise distance from ``z`` to its conjugate transpose."""
    return float(np.max(np.abs(z - involution(z)))) if np.size(z) else 0.0


def seminorm(z: np.ndarray, tag: str = "operator") -> float:
    """Increasing seminorm of an element.

    ``"operator"`` is the largest singular value, ``"trace"`` the sum of
    singular values.  Both are monotone for the semidefinite order.
    """
    if tag not in SEMINORM_TAGS:
        raise SchemaError(f"unknown seminorm tag {tag!r}")
    s = np.linalg.svd(np.atleast_2d(np.asarray(z, dtype=complex)), compute_uv=False)
    return float(s.max()) if tag == "operator" else float(s.sum())


def cone_slack(z: np.ndarray, space: ZSpaceDescriptor) -> float:
    """Scale-aware cone membership tolerance for a concrete element."""
    return space.tolerance * (1.0 + seminorm(z, "operator"))


def in_cone(z, space: ZSpaceDescriptor) -> bool:
    """Membership in the positive cone, up to the scale-aware slack.

    True iff the Hermitian defect is within slack and the minimal eigenvalue
    of the Hermitian part is above minus the slack.
    """
    z = as_zelement(z, space)
    tol = cone_slack(z, space)
    if hermitian_defect(z) > tol:
        return False
    return float(np.linalg.eigvalsh(hermitian_part(z)).min()) >= -tol


def leq(a, b, space: ZSpaceDescriptor) -> bool:
    """Partial order induced by the cone: ``a <= b`` iff ``b - a`` is positive."""
    a = as_zelement(a, space)
    b = as_zelement(b, space)
    return in_cone(b - a, space)


@dataclass(frozen=True)
class GramTensor:
    """An ``n x n`` table of ``d x d`` elements serving as a metric.

    Valid gram tensors are Hermitian-symmetric across the block transpose
    and weakly positive: every scalar-coefficient quadratic contraction must
    land in the positive cone.  Construction only checks shape; use
    :func:`validate_gram` (or the kernel-level positivity verifier) for the
    order-theoretic invariants.
    """

    blocks: np.ndarray = field()  # (n, n, d, d)

    def __post_init__(self):
        b = _readonly(self.blocks)
        if b.ndim != 4 or b.shape[0] != b.shape[1] or b.shape[2] != b.shape[3]:
            raise SchemaError(f"gram tensor must have shape (n, n, d, d), got {b.shape}")
        object.__setattr__(self, "blocks", b)

    @property
    def n(self) -> int:
        return self.blocks.shape[0]

    @property
    def d(self) -> int:
        return self.blocks.shape[2]


def validate_gram(G: GramTensor, space: ZSpaceDescriptor) -> list[str]:
    """Structural gram invariants: block symmetry and diagonal positivity.

    Weak positivity of the full metric is deliberately left to the kernel
    verifier, which owns the search machinery.
    """
    out = []
    sym = float(np.max(np.abs(G.blocks - involution(G.blocks).transpose(1, 0, 2, 3)))) if G.n else 0.0
    scale = 1.0 + (float(np.max(np.abs(G.blocks))) if G.n else 0.0)
    if sym > space.tolerance * scale:
        out.append(f"hermitian symmetry defect {sym:.3e}")
    for i in range(G.n):
        if not in_cone(G.blocks[i, i], space):
            out.append(f"diagonal block {i} outside the positive cone")
    return out


def _check_coeff(G: GramTensor, u) -> np.ndarray:
    u = np.asarray(u, dtype=complex).reshape(-1)
    if u.shape[0] != G.n:
        raise SchemaError(f"coefficient vector length {u.shape[0]} != gram size {G.n}")
    return u


def gram_pair(G: GramTensor, u, v) -> np.ndarray:
    """Pairing ``sum_ij conj(u_i) v_j G[i, j]``; an element of the value space."""
    u = _check_coeff(G, u)
    v = _check_coeff(G, v)
    return np.einsum("i,j,ijab->ab", np.conj(u), v, G.blocks)


def polarisation_check(G: GramTensor, u, v) -> float:
    """Defect of the polarisation identity recovering the pairing from squares.

    With the pairing linear in its second slot, the identity reads
    ``4 [u, v] = sum_k (-i)^k [u + i^k v, u + i^k v]``.  The defect is zero up
    to rounding on every gram tensor; it measures arithmetic consistency, not
    positivity.
    """
    u = _check_coeff(G, u)
    v = _check_coeff(G, v)
    acc = np.zeros((G.d, G.d), dtype=complex)
    for k in range(4):
        w = u + (1j ** k) * v
        acc += ((-1j) ** k) * gram_pair(G, w, w)
    return float(np.max(np.abs(acc - 4.0 * gram_pair(G, u, v))))


def schwarz_check(G: GramTensor, u, v, tag: str = "operator", tol: float | None = None):
    """Schwarz-type bound ``p([u,v]) <= 4 p([u,u])^{1/2} p([v,v])^{1/2}``.

    Returns ``(lhs, rhs, holds)``.  Requires the gram tensor to be a weakly
    positive metric; on indefinite input the bound can genuinely fail.
    """
    lhs = seminorm(gram_pair(G, u, v), tag)
    puu = max(seminorm(gram_pair(G, u, u), tag), 0.0)
    pvv = max(seminorm(gram_pair(G, v, v), tag), 0.0)
    rhs = SCHWARZ_CONSTANT * np.sqrt(puu) * np.sqrt(pvv)
    if tol is None:
        tol = 1e-12 * (1.0 + rhs)
    return float(lhs), float(rhs), bool(lhs <= rhs + tol)


def ve_seminorm(G: GramTensor, u, tag: str = "operator") -> float:
    """Seminorm induced on coefficient vectors: ``p([u, u])^{1/2}``."""
    return float(np.sqrt(max(seminorm(gram_pair(G, u, u), tag), 0.0)))
