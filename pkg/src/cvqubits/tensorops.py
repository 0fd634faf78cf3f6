"""Dense complex linear algebra over labeled tensor-product spaces.

States are plain numpy arrays wrapped together with their factor structure
(:class:`TruncatedFockSpace`), so partial traces and transposes are
requested by factor index instead of by hand-rolled stride arithmetic.
Every operation is a pure function of its inputs; nothing here mutates its
arguments, and results are bit-reproducible for a fixed summation order.
"""

from __future__ import annotations

import hashlib
import string
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "TruncatedFockSpace",
    "StateVector",
    "DensityOperator",
    "kron",
    "partial_trace",
    "partial_transpose",
    "eig_hermitian",
    "mat_exp",
]

# Hermiticity tolerances: tight for freshly constructed operators, looser
# for states that went through long chains of matrix products.
HERM_TOL_BUILT = 1e-12
HERM_TOL_EVOLVED = 1e-10
PSD_FLOOR = -1e-10


@dataclass(frozen=True)
class TruncatedFockSpace:
    """Dimension bookkeeping for a tensor product of truncated factors.

    A qubit factor has dimension 2; a field mode truncated at photon number
    N has dimension N + 1.  Factor order is significant and fixed at
    construction.
    """

    factor_dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims:
            raise ValueError("a space needs at least one factor")
        if any(d < 1 for d in dims):
            raise ValueError(f"every factor dimension must be >= 1, got {dims}")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def n_factors(self) -> int:
        return len(self.factor_dims)

    @property
    def total_dim(self) -> int:
        out = 1
        for d in self.factor_dims:
            out *= d
        return out


@dataclass(frozen=True)
class StateVector:
    """Dense pure state on a :class:`TruncatedFockSpace`.

    ``tail_weight`` records the probability mass lost to truncation; the
    amplitudes are deliberately *not* renormalized, so the squared norm of a
    truncated state is ``1 - tail_weight``.
    """

    space: TruncatedFockSpace
    amplitudes: np.ndarray
    tail_weight: float = 0.0

    def __post_init__(self) -> None:
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.size != self.space.total_dim:
            raise ValueError(
                f"amplitude count {amp.size} does not match total dimension "
                f"{self.space.total_dim}"
            )
        object.__setattr__(self, "amplitudes", amp)

    def norm_sq(self) -> float:
        return float(np.real(np.vdot(self.amplitudes, self.amplitudes)))

    def density(self) -> "DensityOperator":
        m = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityOperator(self.space, m, self.tail_weight)

    def validate(self, tol: float = 1e-10) -> None:
        """Raise ValueError unless the norm matches the declared deficit."""
        dev = abs(self.norm_sq() - (1.0 - self.tail_weight))
        if dev > tol:
            raise ValueError(f"norm deficit off by {dev:.3e}")


@dataclass(frozen=True)
class DensityOperator:
    """Dense mixed state on a :class:`TruncatedFockSpace`.

    Construction checks only shape; the (expensive) Hermiticity, trace and
    positivity invariants are checked on demand via :meth:`validate` --
    an eigensolve per constructed state would dominate sweep runtimes.
    """

    space: TruncatedFockSpace
    matrix: np.ndarray
    tail_weight: float = 0.0

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        d = self.space.total_dim
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match space dim {d}")
        object.__setattr__(self, "matrix", m)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def validate(
        self,
        herm_tol: float = HERM_TOL_BUILT,
        psd_floor: float = PSD_FLOOR,
        trace_tol: float = 1e-12,
    ) -> None:
        """Raise ValueError on any violated state invariant.

        Hermiticity within ``herm_tol``, smallest eigenvalue above
        ``psd_floor``, and real trace inside
        ``[1 - tail_weight - trace_tol, 1 + trace_tol]``.
        """
        m = self.matrix
        dev = float(np.max(np.abs(m - m.conj().T)))
        if dev > herm_tol:
            raise ValueError(f"not Hermitian: max deviation {dev:.3e}")
        tr = self.trace()
        if abs(tr.imag) > trace_tol:
            raise ValueError(f"trace has imaginary part {tr.imag:.3e}")
        lo = 1.0 - self.tail_weight - trace_tol
        if not (lo <= tr.real <= 1.0 + trace_tol):
            raise ValueError(
                f"trace {tr.real!r} outside [{lo!r}, {1.0 + trace_tol!r}]"
            )
        wmin = float(np.linalg.eigvalsh((m + m.conj().T) / 2.0)[0])
        if wmin < psd_floor:
            raise ValueError(f"negative eigenvalue {wmin:.3e}")


def kron(a, b):
    """Tensor product of two states of the same kind.

    The first argument supplies the slow (leftmost) indices; the result's
    factor list is the concatenation of the inputs' factor lists.
    """
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        space = TruncatedFockSpace(a.space.factor_dims + b.space.factor_dims)
        tail = 1.0 - (1.0 - a.tail_weight) * (1.0 - b.tail_weight)
        return StateVector(space, np.kron(a.amplitudes, b.amplitudes), tail)
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        space = TruncatedFockSpace(a.space.factor_dims + b.space.factor_dims)
        tail = 1.0 - (1.0 - a.tail_weight) * (1.0 - b.tail_weight)
        return DensityOperator(space, np.kron(a.matrix, b.matrix), tail)
    raise TypeError("kron needs two StateVectors or two DensityOperators")


def partial_trace(rho: DensityOperator, keep) -> DensityOperator:
    """Trace out every factor whose index is not in ``keep``.

    ``keep`` is any iterable of factor indices; the result's factors appear
    in ascending index order.  Trace is preserved exactly up to roundoff.
    """
    dims = rho.space.factor_dims
    nf = len(dims)
    kept = sorted({int(i) for i in keep})
    if not kept:
        raise ValueError("keep set must not be empty")
    if kept[0] < 0 or kept[-1] >= nf:
        raise IndexError(f"factor index out of range for {nf} factors: {kept}")
    if len(kept) == nf:
        return rho

    letters = iter(string.ascii_letters)
    row, col, out_row, out_col = [], [], [], []
    kept_set = set(kept)
    for i in range(nf):
        if i in kept_set:
            r, c = next(letters), next(letters)
            row.append(r)
            col.append(c)
            out_row.append(r)
            out_col.append(c)
        else:
            t = next(letters)  # shared letter contracts the factor
            row.append(t)
            col.append(t)
    sub = "".join(row) + "".join(col) + "->" + "".join(out_row) + "".join(out_col)
    reduced = np.einsum(sub, rho.matrix.reshape(dims + dims))
    kdims = tuple(dims[i] for i in kept)
    space = TruncatedFockSpace(kdims)
    return DensityOperator(space, reduced.reshape(space.total_dim, space.total_dim), rho.tail_weight)


def partial_transpose(rho: DensityOperator, factor: int) -> DensityOperator:
    """Transpose the indices of a single factor, leaving the rest alone."""
    dims = rho.space.factor_dims
    nf = len(dims)
    if not 0 <= factor < nf:
        raise IndexError(f"factor {factor} out of range for {nf} factors")
    tens = rho.matrix.reshape(dims + dims)
    perm = list(range(2 * nf))
    perm[factor], perm[nf + factor] = perm[nf + factor], perm[factor]
    out = tens.transpose(perm).reshape(rho.matrix.shape)
    return DensityOperator(rho.space, out, rho.tail_weight)


def eig_hermitian(m, vectors: bool = False):
    """Real ascending eigenvalues of a Hermitian matrix.

    Raises ValueError when the input deviates from Hermiticity by more than
    1e-10 in any element.  With ``vectors=True`` returns ``(w, v)`` with
    columns of ``v`` the eigenvectors.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    dev = float(np.max(np.abs(m - m.conj().T)))
    if dev > 1e-10:
        raise ValueError(f"matrix is not Hermitian: max deviation {dev:.3e}")
    h = (m + m.conj().T) / 2.0
    if vectors:
        return np.linalg.eigh(h)
    return np.linalg.eigvalsh(h)


# The beam-splitter and exchange generators get re-exponentiated at many
# angles / times; memoising their factorisation turns those repeats into a
# diagonal rescale plus one matrix product.  Keyed by content hash so equal
# arrays share an entry regardless of identity.
_spectral_cache: "OrderedDict[tuple, tuple[np.ndarray, np.ndarray]]" = OrderedDict()
_SPECTRAL_CACHE_MAX = 3


def _eigh_cached(h: np.ndarray):
    key = (hashlib.sha256(h.tobytes()).hexdigest(), h.shape[0])
    hit = _spectral_cache.get(key)
    if hit is None:
        hit = np.linalg.eigh(h)
        _spectral_cache[key] = hit
        while len(_spectral_cache) > _SPECTRAL_CACHE_MAX:
            _spectral_cache.popitem(last=False)
    else:
        _spectral_cache.move_to_end(key)
    return hit


def mat_exp(m, scale: complex = 1.0) -> np.ndarray:
    """exp(scale * m) for a square complex matrix.

    Hermitian and anti-Hermitian generators take the spectral route, which
    keeps the result exactly unitary for anti-Hermitian ``scale * m``;
    anything else falls back to scipy's scaling-and-squaring.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    ref = max(float(np.max(np.abs(m))), 1.0)
    if float(np.max(np.abs(m - m.conj().T))) <= 1e-13 * ref:
        h = (m + m.conj().T) / 2.0
        w, v = _eigh_cached(h)
        return (v * np.exp(scale * w)) @ v.conj().T
    if float(np.max(np.abs(m + m.conj().T))) <= 1e-13 * ref:
        # m = -i h with h Hermitian, so exp(scale m) = exp(-i scale h)
        im = 1j * m
        h = (im + im.conj().T) / 2.0
        w, v = _eigh_cached(h)
        return (v * np.exp(-1j * scale * w)) @ v.conj().T
    return scipy.linalg.expm(scale * m)
