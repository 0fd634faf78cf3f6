"""Squeezed-light preparation and lossy injection into the cavity pair.

The two halves of an external two-mode squeezed vacuum each pass through a
beam splitter into one cavity; the reflected output ports are traced away,
leaving the (generally mixed) joint cavity field.  :func:`inject` builds
that field directly from its photon-number expansion, while
:func:`inject_oracle` constructs the beam-splitter unitary explicitly and
traces -- the two must agree element-wise, which is this module's core
self-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tensorops import DensityOperator, StateVector, TruncatedFockSpace, mat_exp

__all__ = [
    "SqueezeParam",
    "CouplingParam",
    "TruncationPolicy",
    "CavityFieldState",
    "squeezed_state",
    "binom_coeff",
    "binom_row",
    "inject",
    "inject_oracle",
]

# Keep a few photon levels even at tiny squeezing so multi-photon terms stay
# exercised; and give the injection oracle spare headroom above the cutoff.
N_MAX_FLOOR = 4
ORACLE_PAD = 2


@dataclass(frozen=True)
class SqueezeParam:
    """Dimensionless squeezing strength of the external source."""

    s: float

    def __post_init__(self) -> None:
        s = float(self.s)
        if not math.isfinite(s) or s < 0.0:
            raise ValueError(f"squeezing parameter must be finite and >= 0, got {self.s}")
        object.__setattr__(self, "s", s)

    @property
    def tanh(self) -> float:
        return math.tanh(self.s)

    @property
    def cosh(self) -> float:
        return math.cosh(self.s)


@dataclass(frozen=True)
class CouplingParam:
    """Beam-splitter reflection coefficient r = cos(theta/2).

    r = 0 transmits the external field into the cavity completely (pure
    injection); r = 1 reflects everything and the cavity stays in vacuum.
    """

    r: float
    theta: float | None = None

    def __post_init__(self) -> None:
        r = float(self.r)
        if not 0.0 <= r <= 1.0:
            raise ValueError(f"reflection coefficient must lie in [0, 1], got {self.r}")
        object.__setattr__(self, "r", r)
        if self.theta is None:
            object.__setattr__(self, "theta", 2.0 * math.acos(r))
        elif abs(r - math.cos(self.theta / 2.0)) > 1e-14:
            raise ValueError(f"r={r} inconsistent with theta={self.theta}")

    # Half-angle cosine/sine straight from r: exact at both endpoints,
    # where going through theta would leave ~1e-16 dust.
    @property
    def cos_half(self) -> float:
        return self.r

    @property
    def sin_half(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.r * self.r))


@dataclass(frozen=True)
class TruncationPolicy:
    """Photon-number cutoff: fixed, or derived from a tail-weight bound.

    With only ``tail_tol`` given, the cutoff is the smallest n_max whose
    discarded weight (tanh s)^(2(n_max+1)) stays below the bound, floored at
    ``N_MAX_FLOOR``.  An explicit ``n_max`` wins over ``tail_tol``.
    """

    tail_tol: float | None = 1e-10
    n_max: int | None = None

    def __post_init__(self) -> None:
        if self.n_max is not None:
            n = int(self.n_max)
            if n < 1:
                raise ValueError(f"n_max must be >= 1, got {self.n_max}")
            object.__setattr__(self, "n_max", n)
        else:
            if self.tail_tol is None or not (float(self.tail_tol) > 0.0):
                raise ValueError("need a positive tail_tol when n_max is not set")
            object.__setattr__(self, "tail_tol", float(self.tail_tol))

    def resolve(self, s) -> tuple[int, float]:
        """Return (n_max, exact discarded weight) for squeezing ``s``."""
        s = _as_squeeze(s)
        th = s.tanh
        if self.n_max is not None:
            n = self.n_max
        elif th == 0.0:
            n = N_MAX_FLOOR
        else:
            n = max(N_MAX_FLOOR, math.ceil(math.log(self.tail_tol) / (2.0 * math.log(th))) - 1)
        return n, th ** (2 * (n + 1))


@dataclass(frozen=True)
class CavityFieldState:
    """Joint two-cavity field plus the parameters that generated it."""

    rho: DensityOperator
    s: SqueezeParam
    coupling: CouplingParam
    policy: TruncationPolicy
    n_max: int
    tail_weight: float


def _as_squeeze(s) -> SqueezeParam:
    return s if isinstance(s, SqueezeParam) else SqueezeParam(s)


def _as_coupling(r) -> CouplingParam:
    return r if isinstance(r, CouplingParam) else CouplingParam(r)


def squeezed_state(s, policy: TruncationPolicy | None = None) -> StateVector:
    """Two-mode squeezed vacuum, photon numbers locked across the modes.

    Amplitude (tanh s)^n / cosh s on |n, n>, zero elsewhere; the geometric
    tail beyond the cutoff is recorded in ``tail_weight``, never
    renormalized away.
    """
    s = _as_squeeze(s)
    policy = policy if policy is not None else TruncationPolicy()
    n_max, tail = policy.resolve(s)
    dim = n_max + 1
    amps = np.zeros(dim * dim, dtype=complex)
    c = 1.0 / s.cosh
    for n in range(dim):
        amps[n * dim + n] = c
        c *= s.tanh
    return StateVector(TruncatedFockSpace((dim, dim)), amps, tail)


# Cumulative log-factorial table, grown on demand; raw factorials overflow
# doubles near n = 171 while sweeps can push the cutoff past 300.
_LOG_FACT = [0.0]


def _log_factorial(n: int) -> float:
    while len(_LOG_FACT) <= n:
        _LOG_FACT.append(_LOG_FACT[-1] + math.log(len(_LOG_FACT)))
    return _LOG_FACT[n]


_EXACT_LIMIT = 20  # plain comb/sqrt/pow is exact and cheap this far


def binom_coeff(n: int, k: int, theta: float) -> float:
    """sqrt(C(n,k)) * cos^k(theta/2) * sin^(n-k)(theta/2).

    The amplitude for k of n photons to pass the beam splitter.  Exact
    combinatorics up to n = 20, log-space evaluation beyond.
    """
    if n < 0 or k < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    return _binom_value(n, k, math.cos(theta / 2.0), math.sin(theta / 2.0))


def _binom_value(n: int, k: int, c: float, s_: float) -> float:
    if n <= _EXACT_LIMIT:
        return math.sqrt(math.comb(n, k)) * c**k * s_ ** (n - k)
    if c == 0.0:
        return s_**n if k == 0 else 0.0
    if s_ == 0.0:
        return c**n if k == n else 0.0
    half_log_comb = 0.5 * (_log_factorial(n) - _log_factorial(k) - _log_factorial(n - k))
    return math.exp(half_log_comb + k * math.log(c) + (n - k) * math.log(s_))


def binom_row(n: int, coupling) -> np.ndarray:
    """All splitting amplitudes of one photon-number level: row[k], k=0..n."""
    if n < 0:
        raise ValueError(f"need n >= 0, got {n}")
    coupling = _as_coupling(coupling)
    c, s_ = coupling.cos_half, coupling.sin_half
    k = np.arange(n + 1)
    if n <= _EXACT_LIMIT:
        comb = np.array([math.comb(n, int(kk)) for kk in k], dtype=float)
        return np.sqrt(comb) * c**k * s_ ** (n - k)
    out = np.zeros(n + 1)
    if c == 0.0:
        out[0] = s_**n
        return out
    if s_ == 0.0:
        out[n] = c**n
        return out
    _log_factorial(n)
    lf = np.array(_LOG_FACT[: n + 1])
    logs = 0.5 * (lf[n] - lf[k] - lf[n - k]) + k * math.log(c) + (n - k) * math.log(s_)
    return np.exp(logs)


def _infer_squeeze(psi: StateVector) -> SqueezeParam:
    dim = psi.space.factor_dims[0]
    d0 = psi.amplitudes[0].real
    d1 = psi.amplitudes[dim + 1].real if dim > 1 else 0.0
    return SqueezeParam(math.atanh(d1 / d0))


def _check_two_mode(psi: StateVector) -> int:
    dims = psi.space.factor_dims
    if len(dims) != 2 or dims[0] != dims[1]:
        raise ValueError(f"expected a square two-mode input state, got factors {dims}")
    return dims[0]


def inject(psi: StateVector, coupling, *, s=None, policy=None) -> CavityFieldState:
    """Joint cavity field after the beam splitters, from the number expansion.

    Conditioning on (k, l) photons escaping through the two reflected ports
    leaves one pure branch per outcome; the field is the unnormalized sum of
    those branch projectors, accumulated through a single symmetric matrix
    product.  ``s``/``policy`` default to values recovered from ``psi``.
    """
    coupling = _as_coupling(coupling)
    dim = _check_two_mode(psi)
    n_max = dim - 1
    d = psi.amplitudes.reshape(dim, dim).diagonal().real.copy()
    rows = np.zeros((dim, dim))
    for n in range(dim):
        rows[n, : n + 1] = binom_row(n, coupling)

    branches = np.zeros((dim * dim, dim * dim))
    for k in range(dim):
        for l in range(dim):
            lo = max(k, l)
            ns = np.arange(lo, dim)
            branches[k * dim + l, (ns - k) * dim + (ns - l)] = d[ns] * rows[ns, k] * rows[ns, l]
    m = branches.T @ branches

    field = DensityOperator(psi.space, m.astype(complex), psi.tail_weight)
    s = _as_squeeze(s) if s is not None else _infer_squeeze(psi)
    policy = policy if policy is not None else TruncationPolicy(n_max=dim - 1)
    return CavityFieldState(field, s, coupling, policy, n_max, psi.tail_weight)


def inject_oracle(
    psi: StateVector, coupling, pad: int = ORACLE_PAD, *, s=None, policy=None
) -> CavityFieldState:
    """Same cavity field through the explicit beam-splitter unitary.

    Builds exp[(theta/2)(c f+ - c+ f)] per (external, cavity) mode pair on a
    padded truncation, applies it to input (x) cavity-vacuum, and traces the
    external ports out.  Deliberately shares no code path with
    :func:`inject` beyond the exponential itself.
    """
    if pad < 2:
        raise ValueError("pad >= 2 required: the rotation transiently mixes the top level upward")
    coupling = _as_coupling(coupling)
    dim = _check_two_mode(psi)
    n_max = dim - 1
    big = dim + pad

    a = np.diag(np.sqrt(np.arange(1.0, big)), 1)
    cav = np.kron(np.eye(big), a)  # cavity is the fast factor of a pair
    ext = np.kron(a, np.eye(big))
    generator = cav @ ext.T - cav.T @ ext
    bs = mat_exp(generator, scale=coupling.theta / 2.0)

    # input (x) vacuum as a (pair A) x (pair B) amplitude matrix
    amp = np.zeros((big * big, big * big), dtype=complex)
    occupied = np.arange(dim) * big  # (n photons, empty cavity) within a pair
    amp[np.ix_(occupied, occupied)] = psi.amplitudes.reshape(dim, dim)
    amp = bs @ amp @ bs.T

    # regroup to (externals) x (cavities); the splitter conserves each
    # pair's total, so every populated index stays below the original cutoff
    # and the crop is lossless
    four = amp.reshape(big, big, big, big).transpose(0, 2, 1, 3)
    flat = np.ascontiguousarray(four[:dim, :dim, :dim, :dim]).reshape(dim * dim, dim * dim)
    m = flat.T @ flat.conj()

    field = DensityOperator(psi.space, m, psi.tail_weight)
    s = _as_squeeze(s) if s is not None else _infer_squeeze(psi)
    policy = policy if policy is not None else TruncationPolicy(n_max=n_max)
    return CavityFieldState(field, s, coupling, policy, n_max, psi.tail_weight)
