"""Greedy sparse and jointly-sparse solvers for underdetermined systems.

Selection scores normalize by column norm (the converter matrices have
unequal column norms), least-squares projections go through an orthogonal
decomposition rather than normal equations, and rank deficiency is reported
instead of silently regularized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "SupportSet",
    "SparseSolution",
    "RankDeficiencyError",
    "mutual_coherence",
    "unique_if",
    "omp",
    "omp_mmv",
    "solve_on_support",
]

#: Ties in the greedy argmax within this absolute score gap resolve to the
#: lowest column index, for determinism across platforms.
TIE_TOL = 1e-12

#: Relative residual below which iteration stops even when the caller asked
#: for residual_tol = 0: past numerical exactness further selections would
#: only chase rounding noise.
RESIDUAL_FLOOR = 1e-12


class RankDeficiencyError(ValueError):
    """Raised when a least-squares subproblem loses column rank."""


@dataclass(frozen=True)
class SupportSet:
    """Strictly increasing column indices of a sparse solution."""

    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        for a, b in zip(self.indices, self.indices[1:]):
            if b <= a:
                raise ValueError("indices must be strictly increasing")

    @classmethod
    def from_indices(cls, it: Iterable[int]) -> "SupportSet":
        return cls(tuple(sorted(set(int(i) for i in it))))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, i: int) -> bool:
        return i in self.indices

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=int)

    def jaccard(self, other: "SupportSet") -> float:
        """Intersection-over-union; two empty supports count as identical."""
        a, b = set(self.indices), set(other.indices)
        if not a and not b:
            return 1.0
        return len(a & b) / len(a | b)


@dataclass(frozen=True)
class SparseSolution:
    support: SupportSet
    values: np.ndarray
    residual_norm: float

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.complex128)
        object.__setattr__(self, "values", vals)
        if vals.shape[0] != len(self.support):
            raise ValueError("one coefficient per support index required")
        if self.residual_norm < 0:
            raise ValueError("residual norm must be nonnegative")

    def dense(self, width: int) -> np.ndarray:
        out = np.zeros((width,) + self.values.shape[1:], dtype=np.complex128)
        out[self.support.as_array()] = self.values
        return out


def _column_norms(c: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(c, axis=0)
    if np.any(norms == 0):
        raise ValueError("matrix has a zero column")
    return norms


def mutual_coherence(c: np.ndarray) -> float:
    """Largest normalized inner product between distinct columns."""
    c = np.asarray(c, dtype=np.complex128)
    norms = _column_norms(c)
    gram = np.abs(c.conj().T @ c) / np.outer(norms, norms)
    np.fill_diagonal(gram, 0.0)
    return float(gram.max())


def unique_if(sparsity: int, mu: float) -> bool:
    """Uniqueness gate: a k-sparse solution is the unique sparsest one when
    k < (1 + 1/mu) / 2."""
    if mu <= 0:
        return True
    return sparsity < 0.5 * (1 + 1 / mu)


def _lstsq(c_s: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    sol, _, rank, _ = np.linalg.lstsq(c_s, rhs, rcond=None)
    if rank < c_s.shape[1]:
        raise RankDeficiencyError(
            f"selected columns are rank deficient (rank {rank} < {c_s.shape[1]})"
        )
    return sol


def solve_on_support(y: np.ndarray, c: np.ndarray, support: SupportSet) -> np.ndarray:
    """Least-squares coefficients on the given columns (SVD-based solve).

    ``y`` may be a vector or a matrix of measurement columns sharing the
    support; rank deficiency raises RankDeficiencyError.
    """
    c = np.asarray(c, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    idx = support.as_array()
    if len(idx) == 0:
        return np.zeros((0,) + y.shape[1:], dtype=np.complex128)
    if idx.min() < 0 or idx.max() >= c.shape[1]:
        raise ValueError("support index outside matrix width")
    return _lstsq(c[:, idx], y)


def _greedy(
    v: np.ndarray, c: np.ndarray, max_support: int, residual_tol: float
) -> tuple[list[int], np.ndarray, float]:
    """Shared OMP core; ``v`` is a matrix of one or more measurement columns.

    Scores are the euclidean norm across measurement columns of the
    column-normalized correlations; projection re-solves least squares on the
    accumulated support.
    """
    if residual_tol < 0:
        raise ValueError("residual_tol must be nonnegative")
    if max_support > c.shape[0]:
        raise ValueError("max_support cannot exceed the number of rows")
    if v.shape[0] != c.shape[0]:
        raise ValueError("measurements and matrix row counts differ")
    norms = _column_norms(c)
    scale = float(np.linalg.norm(v))
    stop = max(residual_tol, RESIDUAL_FLOOR) * scale
    chosen: list[int] = []
    coeffs = np.zeros((0,) + v.shape[1:], dtype=np.complex128)
    if scale == 0.0:
        return chosen, coeffs, 0.0
    residual = v.copy()
    res_norm = scale
    while len(chosen) < max_support and res_norm > stop:
        scores = np.linalg.norm(c.conj().T @ residual, axis=tuple(range(1, v.ndim))) / norms
        if chosen:
            scores[chosen] = -np.inf
        best = np.flatnonzero(scores >= scores.max() - TIE_TOL)[0]
        chosen.append(int(best))
        coeffs = _lstsq(c[:, chosen], v)
        residual = v - c[:, chosen] @ coeffs
        res_norm = float(np.linalg.norm(residual))
    order = np.argsort(chosen)
    return [chosen[i] for i in order], coeffs[order], res_norm


def omp(
    y: np.ndarray, c: np.ndarray, max_support: int, residual_tol: float = 0.0
) -> SparseSolution:
    """Orthogonal matching pursuit.

    Repeatedly selects the column with the largest normalized correlation to
    the residual (lowest index on ties), orthogonally re-projects on the
    accumulated support, and stops at ``max_support`` indices or when the
    residual drops to residual_tol times ||y||.
    """
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim != 1:
        raise ValueError("y must be a vector; use omp_mmv for matrices")
    c = np.asarray(c, dtype=np.complex128)
    chosen, coeffs, res = _greedy(y[:, None], c, max_support, residual_tol)
    return SparseSolution(SupportSet(tuple(chosen)), coeffs[:, 0], res)


def save_matrix_csv(c: np.ndarray, path) -> None:
    """Debug dump of a (possibly complex) matrix, one re,im pair per entry."""
    from .signals import CSV_FLOAT_FMT

    fmt = CSV_FLOAT_FMT.format
    arr = np.asarray(c, dtype=np.complex128)
    lines = []
    for row in arr:
        lines.append(",".join(f"{fmt(v.real)},{fmt(v.imag)}" for v in row))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def omp_mmv(
    v: np.ndarray, c: np.ndarray, max_support: int, residual_tol: float = 0.0
) -> SupportSet:
    """Joint-sparse OMP over multiple measurement columns.

    The selection score of a column is the l2 norm, across measurement
    columns, of its normalized correlations; the result is the shared row
    support of the solution matrix.
    """
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim == 1:
        v = v[:, None]
    c = np.asarray(c, dtype=np.complex128)
    chosen, _, _ = _greedy(v, c, max_support, residual_tol)
    return SupportSet(tuple(chosen))
