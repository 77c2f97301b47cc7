"""Graph Laplacians as symmetric pencils, spectral gaps, and the co-area identity.

Two operators are built, both as a pencil (stiffness L, diagonal mass D):

  delta (walk Laplacian on l2(V; mu)):
      L[u,u] = mu(u), L[u,v] = -a(u,v); mass mu.  L f = lam D f is the
      eigenproblem of f(v) - sum_u f(u) r(v,u); the spectrum lies in [0, 2].

  lambda (measured-graph operator on l2(V; m)):
      stiffness of the conductance m(u) + m(v); mass m.  Its smallest
      positive eigenvalue is the best constant lam in
      sum_{u~v} |f(u)-f(v)|^2 (m(u)+m(v)) >= 2 lam sum |f|^2 m
      over functions with sum f(v) m(v) = 0.

The pencil is reduced by D^(-1/2) conjugation and diagonalized with cyclic
Jacobi rotations: deterministic, no external eigensolver, fine for a few
hundred vertices.  Float conversion of the rational inputs happens exactly
once, here; the co-area check below stays fully rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .graphs import MeasuredGraph
from .walks import ReversibleWalk, auxiliary_walk

ZERO_TOLERANCE = 1e-9
_JACOBI_SWEEPS = 100
_JACOBI_TOL = 1e-12


class EigensolverError(RuntimeError):
    """Jacobi iteration failed to reach the off-diagonal threshold."""


@dataclass(frozen=True)
class SelfAdjointOperator:
    """Symmetric pencil (stiffness, diagonal mass) of a graph operator."""

    kind: str  # "delta" | "lambda"
    stiffness: np.ndarray
    mass_diagonal: np.ndarray

    @property
    def n(self) -> int:
        return self.stiffness.shape[0]


@dataclass(frozen=True)
class SpectralResult:
    """Ascending eigenvalues, the spectral gap, and the kernel dimension.

    gap is the smallest eigenvalue above zero_tolerance (None if there is
    none); zero_multiplicity counts eigenvalues below the tolerance and
    equals the number of connected components of the underlying graph.
    """

    eigenvalues: tuple[float, ...]
    gap: float | None
    zero_multiplicity: int
    zero_tolerance: float


def delta_operator(walk: ReversibleWalk) -> SelfAdjointOperator:
    """Pencil representing the walk Laplacian on l2(V; mu)."""
    n = walk.graph.n
    stiff = np.zeros((n, n))
    for (u, v), a in walk.a.items():
        w = float(a)
        stiff[u, v] -= w
        stiff[v, u] -= w
    mass = np.array([float(m) for m in walk.mu])
    stiff[np.diag_indices(n)] = mass
    return SelfAdjointOperator(kind="delta", stiffness=stiff, mass_diagonal=mass)


def lambda_operator(graph: MeasuredGraph) -> SelfAdjointOperator:
    """Pencil whose smallest positive eigenvalue is the measured spectral gap."""
    for v, m in enumerate(graph.measure):
        if m == 0:
            raise ValueError(f"vertex {graph.labels[v]!r} has zero measure")
    if not graph.connected:
        raise ValueError("the measured spectral gap is defined for connected graphs")
    n = graph.n
    stiff = np.zeros((n, n))
    diag = np.zeros(n)
    for u, v in graph.edges:
        w = float(graph.measure[u] + graph.measure[v])
        stiff[u, v] -= w
        stiff[v, u] -= w
        diag[u] += w
        diag[v] += w
    stiff[np.diag_indices(n)] = diag
    mass = np.array([float(m) for m in graph.measure])
    return SelfAdjointOperator(kind="lambda", stiffness=stiff, mass_diagonal=mass)


def jacobi_eigh(matrix: np.ndarray, sweeps: int = _JACOBI_SWEEPS, tol: float = _JACOBI_TOL):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues ascending, eigenvectors as columns).  Convergence is
    declared when the off-diagonal Frobenius norm falls below tol relative to
    the matrix norm; exceeding the sweep cap raises EigensolverError.
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if n == 1:
        return np.array([a[0, 0]]), np.array([[1.0]])
    v = np.eye(n)
    scale = max(np.linalg.norm(a), 1.0)
    # summing the off-diagonal squares directly avoids the cancellation that
    # norm(a)^2 - norm(diag)^2 suffers once the matrix is nearly diagonal
    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(sweeps):
        off = np.sqrt((a[off_mask] ** 2).sum())
        if off <= tol * scale:
            w = np.diag(a).copy()
            order = np.argsort(w, kind="stable")
            return w[order], v[:, order]
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vec_p = v[:, p].copy()
                v[:, p] = c * vec_p - s * v[:, q]
                v[:, q] = s * vec_p + c * v[:, q]
    off = np.sqrt((a[off_mask] ** 2).sum())
    raise EigensolverError(
        f"Jacobi did not converge in {sweeps} sweeps; off-diagonal norm {off:.3e}"
    )


def eigenpairs(op: SelfAdjointOperator):
    """Eigenvalues (ascending) and pencil eigenvectors of (stiffness, mass).

    The pencil is symmetrized as M = D^(-1/2) L D^(-1/2); eigenvectors are
    mapped back by D^(-1/2) so that L v = lam D v.
    """
    d = op.mass_diagonal
    if np.any(d <= 0):
        raise ValueError("mass diagonal must be strictly positive")
    inv_sqrt = 1.0 / np.sqrt(d)
    sym = op.stiffness * np.outer(inv_sqrt, inv_sqrt)
    sym = (sym + sym.T) / 2.0
    w, u = jacobi_eigh(sym)
    vecs = inv_sqrt[:, None] * u
    return w, vecs


def spectrum(op: SelfAdjointOperator, zero_tolerance: float = ZERO_TOLERANCE) -> SpectralResult:
    """Full eigenvalue list of the pencil with gap and kernel multiplicity."""
    w, _ = eigenpairs(op)
    positive = [x for x in w if x >= zero_tolerance]
    return SpectralResult(
        eigenvalues=tuple(float(x) for x in w),
        gap=float(min(positive)) if positive else None,
        zero_multiplicity=int(sum(1 for x in w if x < zero_tolerance)),
        zero_tolerance=zero_tolerance,
    )


def rayleigh(op: SelfAdjointOperator, f: Sequence[float]) -> float:
    """Quadratic-form ratio (f' L f) / (f' D f)."""
    vec = np.asarray(f, dtype=float)
    if vec.shape != (op.n,):
        raise ValueError(f"vector length {vec.shape} does not match {op.n} vertices")
    mass_norm = float(vec @ (op.mass_diagonal * vec))
    if mass_norm <= 0.0:
        raise ValueError("vector has zero mass norm")
    return float(vec @ (op.stiffness @ vec)) / mass_norm


@dataclass(frozen=True)
class CoareaReport:
    """Exact decomposition of the squared-difference edge energy into level sets.

    direct      sum over edges of |f(u)^2 - f(v)^2| * a(u,v)
    level_sum   sum over level sets L_i = {f >= beta_i} of
                a(cut L_i) * (beta_i^2 - beta_{i-1}^2)
    equal       exact rational comparison; always True
    """

    direct: Fraction
    level_sum: Fraction
    equal: bool


def coarea_check(walk: ReversibleWalk, f: Sequence) -> CoareaReport:
    """Verify the level-set decomposition for a nonnegative rational function."""
    values = [Fraction(x) for x in f]
    if len(values) != walk.graph.n:
        raise ValueError(f"function has {len(values)} entries for {walk.graph.n} vertices")
    for v, x in enumerate(values):
        if x < 0:
            raise ValueError(f"entry {v} is negative ({x}); the identity needs f >= 0")
    direct = Fraction(0)
    for (u, v), a in walk.a.items():
        direct += abs(values[u] ** 2 - values[v] ** 2) * a
    betas = sorted(set(values))
    level_sum = Fraction(0)
    for i in range(1, len(betas)):
        cut = Fraction(0)
        for (u, v), a in walk.a.items():
            inside_u = values[u] >= betas[i]
            inside_v = values[v] >= betas[i]
            if inside_u != inside_v:
                cut += a
        level_sum += cut * (betas[i] ** 2 - betas[i - 1] ** 2)
    return CoareaReport(direct=direct, level_sum=level_sum, equal=direct == level_sum)


def delta_gap(walk: ReversibleWalk, zero_tolerance: float = ZERO_TOLERANCE) -> float:
    """Spectral gap of the walk Laplacian (requires a connected graph)."""
    result = spectrum(delta_operator(walk), zero_tolerance)
    if result.gap is None:
        raise ValueError("walk Laplacian has no positive eigenvalue")
    return result.gap


def measured_gap(graph: MeasuredGraph, zero_tolerance: float = ZERO_TOLERANCE) -> float:
    """Measured spectral gap: smallest positive eigenvalue of the lambda pencil."""
    result = spectrum(lambda_operator(graph), zero_tolerance)
    if result.gap is None:
        raise ValueError("measured-gap pencil has no positive eigenvalue")
    return result.gap


def auxiliary_delta_gap(graph: MeasuredGraph, zero_tolerance: float = ZERO_TOLERANCE) -> float:
    """Spectral gap of the auxiliary walk's Laplacian."""
    return delta_gap(auxiliary_walk(graph), zero_tolerance)
