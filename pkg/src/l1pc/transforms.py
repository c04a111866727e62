"""Structured matrices and the SVD-based change-of-variables machinery.

Builders for difference operators, orthogonal transforms (DCT, Haar,
Daubechies wavelet), Kronecker-square image transforms and Gaussian kernel
matrices, plus the factorization that reduces a transform matrix B to a
degenerated identity: B = U diag(sigma) V^T together with the derived
matrix B' = V Lambda' U' and the bijection u <-> (B u, trailing V^T u).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_matrix

RANK_RTOL = 1e-10

# Orthonormal Daubechies scaling filters, indexed by number of vanishing
# moments.  Published minimum-phase coefficients, polished so that the
# shift-by-two orthonormality products hold to machine precision (the raw
# published digits only reach ~1e-8 for the longer filters).
DAUBECHIES_FILTERS: dict[int, tuple[float, ...]] = {
    2: (0.48296291314453416, 0.83651630373780794, 0.22414386804201336,
        -0.12940952255126037),
    3: (0.33267055295008263, 0.80689150931109266, 0.4598775021184916,
        -0.13501102001025458, -0.085441273882026672, 0.03522629188570954),
    4: (0.23037781330889667, 0.71484657055291578, 0.6308807679298587,
        -0.027983769416860042, -0.187034811719093, 0.030841381835560799,
        0.032883011666885183, -0.010597401785069032),
    5: (0.16010239797419301, 0.60382926979718987, 0.72430852843777283,
        0.13842814590132055, -0.24229488706638203, -0.032244869584638312,
        0.077571493840045705, -0.0062414902127982856, -0.012580751999081997,
        0.0033357252854737717),
    6: (0.11154074335010923, 0.49462389039845295, 0.75113390802109548,
        0.31525035170919763, -0.22626469396543963, -0.1297668675672618,
        0.09750160558732289, 0.027522865530305699, -0.03158203931748594,
        0.00055384220116148268, 0.0047772575109454943, -0.0010773010853084737),
    7: (0.077852054085007172, 0.39653931948191196, 0.72913209084623376,
        0.46978228740520034, -0.14390600392855998, -0.2240361849938777,
        0.071309219266828025, 0.080612609151084216, -0.038029936935013768,
        -0.016574541630667253, 0.012550998556099733, 0.00042957797292143845,
        -0.0018016407040474839, 0.00035371379997451455),
    8: (0.054415842243107887, 0.31287159091431316, 0.67563073629729842,
        0.58535468365419097, -0.015829105256369262, -0.28401554296154313,
        0.00047248457392385599, 0.12874742662047614, -0.0173693010018116,
        -0.044088253930793367, 0.013981027917399254, 0.0087460940474052909,
        -0.0048703529934516756, -0.00039174037337686693, 0.00067544940645056738,
        -0.0001174767841247726),
}


def first_difference(n: int) -> np.ndarray:
    """(n-1) x n forward difference matrix: -1 on the diagonal, 1 above it."""
    if n < 2:
        raise ValueError("need n >= 2")
    d = np.zeros((n - 1, n))
    idx = np.arange(n - 1)
    d[idx, idx] = -1.0
    d[idx, idx + 1] = 1.0
    return d


def first_difference_map(n: int):
    """Matrix-free first-difference operator (2.0 bounds its spectral norm)."""
    from .fppa import LinearMap

    if n < 2:
        raise ValueError("need n >= 2")
    return LinearMap(
        (n - 1, n),
        matvec=np.diff,
        rmatvec=lambda v: -np.diff(v, prepend=0.0, append=0.0),
        norm_2=2.0,
    )


def kth_difference(n: int, k: int) -> np.ndarray:
    """(n-k) x n difference matrix of order k, built by the recursion
    D(k+1) = D(1, on n-k points) @ D(k)."""
    if k < 1:
        raise ValueError("need k >= 1")
    if n <= k:
        raise ValueError(f"need n > k, got n={n}, k={k}")
    d = first_difference(n)
    for j in range(1, k):
        d = first_difference(n - j) @ d
    return d


def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal type-II discrete cosine transform matrix of order n."""
    if n < 1:
        raise ValueError("need n >= 1")
    k = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    w = np.sqrt(2.0 / n) * np.cos(np.pi * (2 * j + 1) * k / (2 * n))
    w[0, :] /= np.sqrt(2.0)
    return w


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _level_apply(block: np.ndarray, h: np.ndarray) -> np.ndarray:
    """One periodic filter-bank level applied to the rows of ``block``:
    stride-two circular correlation with the lowpass filter stacked on the
    same with the alternating-flip highpass filter."""
    q = block.shape[0]
    taps = h.size
    g = ((-1.0) ** np.arange(taps)) * h[::-1]
    approx = np.zeros((q // 2, block.shape[1]))
    detail = np.zeros_like(approx)
    base = np.arange(0, q, 2)
    for k in range(taps):
        sub = block[(base + k) % q]
        approx += h[k] * sub
        detail += g[k] * sub
    return np.concatenate([approx, detail], axis=0)


def _wavelet_matrix(n: int, h: np.ndarray, levels: int) -> np.ndarray:
    if not _is_pow2(n) or n < 2:
        raise ValueError(f"transform size must be a power of two >= 2, got {n}")
    if levels < 1 or n % (1 << levels) != 0:
        raise ValueError(f"cannot run {levels} levels on size {n}")
    w = np.eye(n)
    q = n
    for _ in range(levels):
        w[:q] = _level_apply(w[:q], h)
        q //= 2
    return w


def haar_matrix(n: int) -> np.ndarray:
    """Fully decomposed orthonormal Haar transform matrix (n a power of two)."""
    h = np.array([1.0, 1.0]) / np.sqrt(2.0)
    if n == 1:
        return np.eye(1)
    return _wavelet_matrix(n, h, levels=int(np.log2(n)))


def daubechies_matrix(n: int, vanishing_moments: int, levels: int) -> np.ndarray:
    """Orthonormal Daubechies wavelet analysis matrix.

    ``vanishing_moments`` selects the filter (2 through 8), ``levels`` the
    decomposition depth.  Periodic (circular) boundary handling keeps the
    matrix exactly orthogonal for every power-of-two size.
    """
    if vanishing_moments not in DAUBECHIES_FILTERS:
        supported = sorted(DAUBECHIES_FILTERS)
        raise ValueError(f"unsupported vanishing moments {vanishing_moments}; choose from {supported}")
    h = np.asarray(DAUBECHIES_FILTERS[vanishing_moments])
    return _wavelet_matrix(n, h, levels)


def kron_2d(w) -> np.ndarray:
    """Explicit Kronecker square W (x) W; use the *_apply helpers at scale."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError("need a square matrix")
    return np.kron(w, w)


def kron_2d_apply(w, vec) -> np.ndarray:
    """(W (x) W) @ vec without forming the Kronecker product.

    ``vec`` is the row-major flattening of a square image, so the product
    equals vec(W X W^T).
    """
    w = np.asarray(w, dtype=float)
    q = w.shape[0]
    x = np.asarray(vec, dtype=float).reshape(q, q)
    return (w @ x @ w.T).reshape(-1)


def kron_2d_apply_t(w, vec) -> np.ndarray:
    """(W (x) W)^T @ vec, matrix free."""
    w = np.asarray(w, dtype=float)
    q = w.shape[0]
    x = np.asarray(vec, dtype=float).reshape(q, q)
    return (w.T @ x @ w).reshape(-1)


def gaussian_kernel_matrix(samples, mu: float, samples2=None) -> np.ndarray:
    """Gaussian kernel matrix exp(-||x_j - y_k||^2 / (2 mu^2)).

    ``samples`` holds one point per row.  With one sample set the result is
    the Gram matrix, symmetric with unit diagonal by construction; passing
    ``samples2`` gives the rectangular cross-kernel against it.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    x = np.asarray(samples, dtype=float)
    y = x if samples2 is None else np.asarray(samples2, dtype=float)
    if x.ndim != 2 or y.ndim != 2 or x.shape[1] != y.shape[1]:
        raise ValueError("need one sample per row, matching dimensions")
    diff = x[:, None, :] - y[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    return np.exp(-sq / (2.0 * mu * mu))


@dataclass(frozen=True)
class SvdTransform:
    """A transform matrix together with its SVD and derived inverse map.

    ``b = u @ diag(sigma) @ v.T`` with orthogonal ``u`` (m x m) and ``v``
    (n x n); ``sigma`` holds all min(m, n) singular values in nonincreasing
    order, of which the first ``rank`` are counted nonzero.  ``b_prime`` is
    the n x (m + n - rank) matrix V Lambda' U' whose action inverts the
    variable change: b_prime @ [[b @ u, v]] == u for every u, where v is the
    trailing block of V^T u.
    """

    b: np.ndarray
    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    rank: int
    b_prime: np.ndarray

    @property
    def m(self) -> int:
        return self.b.shape[0]

    @property
    def n(self) -> int:
        return self.b.shape[1]

    def apply_b_prime(self, z, v) -> np.ndarray:
        """Evaluate b_prime @ [[z, v]]."""
        return self.b_prime @ np.concatenate([np.asarray(z, dtype=float), np.asarray(v, dtype=float)])


def svd(b) -> SvdTransform:
    """Factor a nonzero matrix and build the change-of-variables data.

    The numerical rank is the count of singular values above
    ``RANK_RTOL * sigma_max``.  Singular-vector signs are whatever the
    factorization returns; consumers must stay sign invariant.
    """
    b = as_matrix(b)
    if not b.any():
        raise ValueError("zero matrix has no singular value decomposition of positive rank")
    m, n = b.shape
    u, s, vt = np.linalg.svd(b, full_matrices=True)
    v = vt.T
    r = int(np.sum(s > RANK_RTOL * s[0]))
    lam_prime = np.ones(n)
    lam_prime[:r] = 1.0 / s[:r]
    u_prime = np.zeros((n, m + n - r))
    u_prime[:r, :m] = u[:, :r].T
    if n > r:
        u_prime[r:, m:] = np.eye(n - r)
    b_prime = v @ (lam_prime[:, None] * u_prime)
    for arr in (u, s, v, b_prime):
        arr.flags.writeable = False
    return SvdTransform(b=b, u=u, sigma=s, v=v, rank=r, b_prime=b_prime)


def degenerate_identity_transform(m: int, n: int) -> SvdTransform:
    """Analytic `SvdTransform` for the degenerated identity [I_m 0] (m <= n).

    The factorization is exact (U = I_m, unit singular values, V = I_n,
    b_prime = I_n), which avoids a numerical SVD for the augmented-variable
    models whose transform only drops trailing coordinates.
    """
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    b = np.zeros((m, n))
    b[:, :m] = np.eye(m)
    u = np.eye(m)
    sigma = np.ones(m)
    v = np.eye(n)
    b_prime = np.eye(n)
    for arr in (b, u, sigma, v, b_prime):
        arr.flags.writeable = False
    return SvdTransform(b=b, u=u, sigma=sigma, v=v, rank=m, b_prime=b_prime)


def mapping_b(t: SvdTransform, u) -> tuple[np.ndarray, np.ndarray]:
    """The bijection u -> (z, v) with z = B u and v the trailing n - rank
    coordinates of V^T u; ``t.apply_b_prime(z, v)`` recovers u."""
    u = np.asarray(u, dtype=float)
    if u.shape != (t.n,):
        raise ValueError(f"expected a vector of dimension {t.n}, got shape {u.shape}")
    z = t.b @ u
    v = (t.v.T @ u)[t.rank:]
    return z, v
