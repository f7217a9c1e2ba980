"""Kernel matrices, extreme singular values, and pseudo-inverse solves.

A Mercer kernel matrix K = Psi^T Lambda Psi is never analysed through its
explicit entries: forming K squares the condition number and the smallest
singular values drown in roundoff.  All spectral quantities come from the
factor G = Lambda^{1/2} Psi, so K's singular values are the squares of G's.

For steep spectra the factor itself has singular values spanning far more
than the 1e16 range a bidiagonalization-based SVD can resolve.  G is
row-graded (G = D * B with D diagonal and B well conditioned), which is
exactly the class where the Jacobi SVD (LAPACK dgejsv) attains high
*relative* accuracy for every singular value; we switch to it once the
eigenvalue spread makes the standard routine's absolute error floor
(~eps * s_max) visible.  Quantities certified by that path carry no zero
cutoff, because values far below eps * s_max are still fully accurate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg.lapack import dgejsv

from .errors import (
    InsufficientTailError,
    InvariantViolationError,
    NumericError,
    ShapeError,
)
from .features import AnalyticKernel, DesignMatrix
from .spectra import Spectrum

# lambda_1/lambda_min spread beyond which the factor SVD switches to the
# high-relative-accuracy Jacobi routine
STEEP_SPECTRUM_RATIO = 1e8

# fast-path floors (meaningless noise below these; not applied to Jacobi results)
SMIN_ZERO_CUTOFF = 1e-13
PINV_RELATIVE_CUTOFF = 1e-12


@dataclass(frozen=True)
class MercerProvenance:
    spectrum: Spectrum
    design: DesignMatrix


@dataclass(frozen=True)
class AnalyticProvenance:
    kernel: AnalyticKernel | None
    points: np.ndarray | None


@dataclass(frozen=True)
class SpectrumSummary:
    """Extreme singular values of a kernel matrix.

    ``condition_number`` is +inf when s_min is (or is cut to) zero.
    ``accurate`` records whether the values came from the Jacobi path and are
    therefore trustworthy below the standard SVD noise floor.
    """

    s_max: float
    s_min: float
    condition_number: float
    full_singular_values: np.ndarray | None = None
    accurate: bool = False


@dataclass(frozen=True)
class RowNormDiagnostics:
    """Normalized tail-row norms P_i of a design matrix.

    P_i^2 concentrates near 1 for independent entries; its minimum collapsing
    toward 0 signals feature dependence.
    """

    p_values: np.ndarray
    min_p_squared: float


@dataclass(frozen=True)
class MinNormSolution:
    """Result of a pseudo-inverse solve K alpha = y."""

    alpha: np.ndarray
    inconsistent: bool
    rank: int


class KernelMatrix:
    """Symmetric PSD Gram matrix with provenance.

    Mercer instances keep the factor G = Lambda^{1/2} Psi, build their entries
    lazily as G^T G, and memoize the factor SVD; every downstream solve,
    prediction, and variance evaluation reuses it.  Instances are immutable
    and safe to share across trial workers.
    """

    def __init__(self, provenance, entries=None, factor=None, size=None):
        self.provenance = provenance
        if factor is not None:
            factor = np.asarray(factor, dtype=np.float64)
            factor.setflags(write=False)
        self._factor = factor
        if entries is not None:
            entries = np.asarray(entries, dtype=np.float64)
            if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
                raise ShapeError(f"kernel matrix must be square, got {entries.shape}")
            scale = float(np.abs(entries).max())
            if np.isfinite(scale):  # non-finite matrices fail later, at use
                skew = float(np.abs(entries - entries.T).max())
                if skew > 1e-12 * max(scale, 1e-300):
                    raise InvariantViolationError(
                        f"kernel matrix asymmetric beyond tolerance (skew {skew:.3g})"
                    )
            entries.setflags(write=False)
        self._entries = entries
        if size is None:
            size = entries.shape[0] if entries is not None else factor.shape[1]
        self.size = int(size)

    @classmethod
    def from_mercer(cls, spectrum: Spectrum, design: DesignMatrix, factor: np.ndarray):
        return cls(MercerProvenance(spectrum, design), factor=factor,
                   size=factor.shape[1])

    @classmethod
    def from_analytic(cls, entries, kernel=None, points=None):
        return cls(AnalyticProvenance(kernel, points), entries=entries)

    @classmethod
    def from_entries(cls, entries):
        """Wrap a raw symmetric PSD matrix (no provenance)."""
        return cls(AnalyticProvenance(None, None), entries=entries)

    @property
    def entries(self) -> np.ndarray:
        if self._entries is None:
            g = self._factor
            k = g.T @ g
            k = 0.5 * (k + k.T)
            k.setflags(write=False)
            self._entries = k
        return self._entries

    @property
    def is_mercer(self) -> bool:
        return isinstance(self.provenance, MercerProvenance)

    @property
    def factor(self) -> np.ndarray | None:
        return self._factor

    # -- memoized spectral data ------------------------------------------------

    @cached_property
    def _steep(self) -> bool:
        if not self.is_mercer:
            return False
        g = self._factor
        if g.shape[0] < g.shape[1]:
            return False  # wide factors are rank deficient; fast path + cutoff
        lam = self.provenance.spectrum.eigenvalues
        visible = min(len(lam), self.size) - 1
        return bool(lam[0] / lam[visible] > STEEP_SPECTRUM_RATIO)

    @cached_property
    def _factor_values(self) -> np.ndarray:
        """Singular values of G, descending."""
        if self._steep:
            return _jacobi_svd(self._factor, want_vectors=False)[1]
        return np.linalg.svd(self._factor, compute_uv=False)

    @cached_property
    def _factor_svd(self):
        """(U, s, V) of G with G = U diag(s) V^T; V spans sample space."""
        if self._steep:
            u, s, v = _jacobi_svd(self._factor, want_vectors=True)
        else:
            u, s, vh = np.linalg.svd(self._factor, full_matrices=False)
            v = vh.T
        self.__dict__["_factor_values"] = s
        return u, s, v

    @cached_property
    def _eigh(self):
        """(eigenvalues descending, eigenvectors) for analytic matrices."""
        if not np.all(np.isfinite(self.entries)):
            raise NumericError("kernel matrix has non-finite entries")
        w, q = np.linalg.eigh(self.entries)
        return w[::-1].copy(), q[:, ::-1].copy()

    def eigensystem(self):
        """Eigenvalues (descending) and eigenvectors of K in sample space."""
        if not self.is_mercer:
            return self._eigh
        u, s, v = self._factor_svd
        w = s * s
        if s.size == self.size:
            return w, v
        # wide factor: nonzero modes are V's columns; complete the null space
        w = np.concatenate([w, np.zeros(self.size - s.size)])
        q_full = np.linalg.qr(v, mode="complete")[0]
        q = np.concatenate([v, q_full[:, s.size:]], axis=1)
        return w, q


def assemble_kernel(s: Spectrum, d: DesignMatrix) -> KernelMatrix:
    """Build K = Psi^T Lambda Psi as G^T G with G = Lambda^{1/2} Psi."""
    if s.size != d.num_features:
        raise ShapeError(
            f"spectrum length {s.size} != design feature count {d.num_features}"
        )
    g = np.sqrt(s.eigenvalues)[:, None] * d.entries
    return KernelMatrix.from_mercer(s, d, g)


def singular_extremes(K: KernelMatrix, full: bool = True) -> SpectrumSummary:
    """Largest and smallest singular values of K plus their ratio.

    Mercer matrices are measured through the factor; on the fast path an
    s_min below 1e-13 * s_max is reported as exactly 0 (it is numerically
    indistinguishable from it there) and the condition number becomes +inf.
    """
    if K.is_mercer:
        s = K._factor_values
        if not np.all(np.isfinite(s)):
            raise NumericError("kernel factor has non-finite singular values")
        vals = s * s
        if vals.size < K.size:
            vals = np.concatenate([vals, np.zeros(K.size - vals.size)])
        accurate = K._steep
    else:
        vals = np.sort(np.abs(K._eigh[0]))[::-1]
        accurate = False
    if not np.all(np.isfinite(vals)):
        raise NumericError("kernel matrix has non-finite singular values")
    s_max = float(vals[0])
    s_min = float(vals[-1])
    if not accurate and s_min < SMIN_ZERO_CUTOFF * s_max:
        s_min = 0.0
    cond = math.inf if s_min == 0.0 else s_max / s_min
    return SpectrumSummary(
        s_max=s_max,
        s_min=s_min,
        condition_number=cond,
        full_singular_values=vals if full else None,
        accurate=accurate,
    )


def row_norm_diagnostics(d: DesignMatrix, N: int | None = None) -> RowNormDiagnostics:
    """P_i = sqrt(mean of squared tail entries) per column, tail = rows > N."""
    if N is None:
        N = d.num_samples
    m = d.num_features
    if m <= N:
        raise InsufficientTailError(f"need M > N for a tail block, got M={m}, N={N}")
    tail = d.entries[N:, :]
    p = np.sqrt(np.einsum("ki,ki->i", tail, tail) / (m - N))
    p.setflags(write=False)
    return RowNormDiagnostics(p_values=p, min_p_squared=float(np.min(p) ** 2))


def min_norm_solve(K: KernelMatrix, y) -> MinNormSolution:
    """Minimum-norm solution alpha = K^+ y.

    Fast-path results drop eigenvalues below 1e-12 * s_max; Jacobi-certified
    results keep every positive eigenvalue.  If y has a component outside
    the numerical range of K larger than 1e-8 * ||y||, the solution is
    flagged inconsistent.
    """
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.size != K.size:
        raise ShapeError(f"y has length {y.size}, kernel is {K.size} x {K.size}")
    if not np.all(np.isfinite(y)):
        raise NumericError("right-hand side has non-finite entries")
    w, q = K.eigensystem()
    keep = kept_modes(K, w)
    qk = q[:, keep]
    proj = qk.T @ y
    alpha = qk @ (proj / w[keep])
    norm_y = float(np.linalg.norm(y))
    residual = float(np.linalg.norm(y - qk @ proj))
    inconsistent = norm_y > 0 and residual > 1e-8 * norm_y
    return MinNormSolution(alpha=alpha, inconsistent=inconsistent, rank=int(keep.sum()))


def kept_modes(K: KernelMatrix, w: np.ndarray) -> np.ndarray:
    """Pseudo-inverse mode filter matching the documented cutoff policy."""
    if w.size == 0 or w[0] <= 0.0:
        return np.zeros_like(w, dtype=bool)
    if K.is_mercer and K._steep:
        return w > 0.0
    return w > PINV_RELATIVE_CUTOFF * w[0]


def _jacobi_svd(g: np.ndarray, want_vectors: bool):
    """High-relative-accuracy SVD of a tall row-graded factor via dgejsv.

    joba='F' targets matrices of the form D1*C*D2 with ill-conditioned
    diagonal scalings; singular values come back scaled by work[0]/work[1].
    """
    jobu, jobv = (0, 0) if want_vectors else (3, 3)
    sva, u, v, work, _, info = dgejsv(
        np.asfortranarray(g), joba=2, jobu=jobu, jobv=jobv
    )
    if info != 0:
        raise NumericError(f"Jacobi SVD did not converge (info={info})")
    s = sva * (work[0] / work[1])
    if want_vectors:
        return u, s, v
    return None, s, None
