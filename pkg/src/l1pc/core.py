"""Dense vector/matrix validation, index partitions, and sparsity accounting.

Vectors and matrices are plain float64 numpy arrays.  The constructors here
validate shape and finiteness and hand back read-only copies, so validated
data can be shared freely between concurrent solver runs.

All indices are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_ZERO_TOL = 1e-6


def as_vector(u, n: int | None = None) -> np.ndarray:
    """Validate ``u`` as a finite real vector and return a read-only copy."""
    arr = np.array(u, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"expected a 1-d vector with at least one entry, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("vector contains NaN or Inf entries")
    if n is not None and arr.size != n:
        raise ValueError(f"expected dimension {n}, got {arr.size}")
    arr.flags.writeable = False
    return arr


def as_matrix(a, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Validate ``a`` as a finite real matrix and return a read-only copy."""
    arr = np.array(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"expected a 2-d matrix, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("matrix contains NaN or Inf entries")
    if shape is not None and arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Partition:
    """Ordered disjoint index groups covering ``range(n)``.

    Each group is a strictly increasing tuple of 0-based indices; the groups
    are pairwise disjoint and their union is the full index set.
    """

    groups: tuple[tuple[int, ...], ...]
    n: int = field(init=False)

    def __post_init__(self):
        if not self.groups:
            raise ValueError("partition needs at least one group")
        groups = tuple(tuple(int(i) for i in g) for g in self.groups)
        object.__setattr__(self, "groups", groups)
        seen: set[int] = set()
        for g in groups:
            if not g:
                raise ValueError("empty group in partition")
            if any(b <= a for a, b in zip(g, g[1:])):
                raise ValueError(f"group indices must be strictly increasing, got {g}")
            if seen.intersection(g):
                raise ValueError("groups are not pairwise disjoint")
            seen.update(g)
        n = len(seen)
        if seen != set(range(n)):
            raise ValueError("groups must cover range(n) exactly")
        object.__setattr__(self, "n", n)

    @property
    def d(self) -> int:
        return len(self.groups)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.groups)


def natural_partition(n: int) -> Partition:
    """The singleton partition {0}, {1}, ..., {n-1}."""
    return Partition(tuple((j,) for j in range(n)))


def dyadic_partition(n: int, d: int) -> Partition:
    """Split ``range(n)`` into ``d`` contiguous blocks of dyadic sizes.

    The two coarsest blocks have size n / 2**(d-1) and block j (0-based,
    j >= 1) has size n / 2**(d-j); this is the usual wavelet sub-band
    layout.  Requires n divisible by 2**(d-1).
    """
    if d < 1:
        raise ValueError("need at least one block")
    if d == 1:
        return Partition((tuple(range(n)),))
    if n % (1 << (d - 1)) != 0:
        raise ValueError(f"n={n} is not divisible by 2**(d-1)={1 << (d - 1)}")
    sizes = [n >> (d - 1)] + [n >> (d - j) for j in range(1, d)]
    groups = []
    start = 0
    for s in sizes:
        groups.append(tuple(range(start, start + s)))
        start += s
    return Partition(tuple(groups))


@dataclass(frozen=True)
class SparsityReport:
    """Count of nonzero entries (or sub-vectors) and their index support."""

    level: int
    support: tuple[int, ...]
    zero_tolerance: float

    def __post_init__(self):
        if self.level != len(self.support):
            raise ValueError("level must equal the support cardinality")


def _zero_scale(u: np.ndarray) -> float:
    return max(1.0, float(np.abs(u).max())) if u.size else 1.0


def sparsity_level(u, tol: float = DEFAULT_ZERO_TOL) -> SparsityReport:
    """Count entries of ``u`` that fail the relative zero test.

    Entry ``u[j]`` counts as zero iff ``|u[j]| <= tol * max(1, ||u||_inf)``.
    The relative scale makes the count stable for iterates of an iterative
    solver, which return near-zeros rather than exact zeros.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    arr = np.asarray(u, dtype=float)
    cut = tol * _zero_scale(arr)
    support = tuple(int(j) for j in np.flatnonzero(np.abs(arr) > cut))
    return SparsityReport(level=len(support), support=support, zero_tolerance=tol)


def block_sparsity_level(u, partition: Partition, tol: float = DEFAULT_ZERO_TOL) -> SparsityReport:
    """Count sub-vectors of ``u`` (under ``partition``) failing the zero test.

    Sub-vector j counts as zero iff ``||u_j||_inf <= tol * max(1, ||u||_inf)``;
    the support holds the 0-based group indices of the nonzero blocks.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    arr = np.asarray(u, dtype=float)
    if arr.ndim != 1 or arr.size != partition.n:
        raise ValueError(f"vector of dimension {arr.size} does not match partition over {partition.n} indices")
    cut = tol * _zero_scale(arr)
    support = tuple(
        j for j, g in enumerate(partition.groups) if np.abs(arr[list(g)]).max() > cut
    )
    return SparsityReport(level=len(support), support=support, zero_tolerance=tol)


def subvector(u, partition: Partition, j: int) -> np.ndarray:
    """Entries of ``u`` at the ordered indices of group ``j`` (0-based)."""
    if not 0 <= j < partition.d:
        raise IndexError(f"group index {j} out of range for {partition.d} groups")
    arr = np.asarray(u, dtype=float)
    if arr.size != partition.n:
        raise ValueError(f"vector of dimension {arr.size} does not match partition over {partition.n} indices")
    return arr[list(partition.groups[j])]
