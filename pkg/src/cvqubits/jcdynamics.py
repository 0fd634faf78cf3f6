"""Resonant atom-field dynamics and the dense evolution oracle.

One two-level atom crosses each cavity; each (atom, cavity) pair evolves
under the resonant excitation-exchange unitary, built either in closed form
per photon level or by exponentiating the block interaction Hamiltonian.
The only parameter is the product of coupling and transit time, lambda*t.

This module is the slow, assumption-free reference path: `evolve` +
`reduce_atoms` materializes the full composite state, while
`reduce_atoms_direct` contracts the field indices pair by pair -- the same
algebra without the composite, cheap enough for the verification grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fieldprep import CavityFieldState
from .tensorops import (
    DensityOperator,
    StateVector,
    TruncatedFockSpace,
    mat_exp,
    partial_trace,
)

__all__ = [
    "AtomState",
    "JCParams",
    "EvolvedState",
    "jc_unitary",
    "jc_unitary_oracle",
    "evolve",
    "reduce_atoms",
    "reduce_atoms_direct",
    "total_excitation",
]

# Spare field levels above the cutoff, so an initially excited atom can
# always deposit its quantum without hitting the wall; the populated
# sectors then evolve exactly unitarily.
EVOLVE_PAD = 2

ATOM_BASIS = ("ee", "eg", "ge", "gg")  # per-atom ordering: |e> = 0, |g> = 1


class AtomState:
    """Initial joint state of the two atoms.

    Either one of the four basis labels or any normalized two-qubit pure
    state (a 4-amplitude array or a StateVector with factors (2, 2)), in
    the basis (|e,e>, |e,g>, |g,e>, |g,g>).
    """

    def __init__(self, state) -> None:
        if isinstance(state, str):
            if state not in ATOM_BASIS:
                raise ValueError(f"unknown atom label {state!r}, expected one of {ATOM_BASIS}")
            vec = np.zeros(4, dtype=complex)
            vec[ATOM_BASIS.index(state)] = 1.0
            self.label: str | None = state
        else:
            if isinstance(state, StateVector):
                if state.space.factor_dims != (2, 2):
                    raise ValueError(f"expected a two-qubit state, got factors {state.space.factor_dims}")
                vec = state.amplitudes.copy()
            else:
                vec = np.asarray(state, dtype=complex).reshape(-1)
            if vec.size != 4:
                raise ValueError(f"expected 4 amplitudes, got {vec.size}")
            if abs(float(np.real(np.vdot(vec, vec))) - 1.0) > 1e-10:
                raise ValueError("atom state must be normalized")
            self.label = None
        self.vector = vec

    def density(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())

    def __repr__(self) -> str:
        return f"AtomState({self.label or self.vector!r})"


@dataclass(frozen=True)
class JCParams:
    """Dimensionless interaction time lambda*t; nothing else enters."""

    lambda_t: float

    def __post_init__(self) -> None:
        lt = float(self.lambda_t)
        if not math.isfinite(lt) or lt < 0.0:
            raise ValueError(f"lambda_t must be finite and >= 0, got {self.lambda_t}")
        object.__setattr__(self, "lambda_t", lt)


@dataclass(frozen=True)
class EvolvedState:
    """Composite state after the transit, factors (atom A, atom B, field A, field B)."""

    rho: DensityOperator
    params: JCParams
    provenance: str  # closed_form_unitary | hamiltonian_exponential


def _lt(params) -> float:
    return params.lambda_t if isinstance(params, JCParams) else JCParams(params).lambda_t


def jc_unitary(params, field_dim: int) -> np.ndarray:
    """Pair transit unitary on (atom x field), atom index slow, basis (|e>, |g>).

    Per photon level the excited/ground doublet rotates at the Rabi angle
    lambda*t*sqrt(n).  Exactly unitary except at the top field level, where
    the outgoing quantum has nowhere to go; keep populated levels below the
    top (see EVOLVE_PAD).
    """
    lt = _lt(params)
    if field_dim < 2:
        raise ValueError(f"field_dim must be >= 2, got {field_dim}")
    dim = field_dim
    n = np.arange(dim, dtype=float)
    lower = np.diag(np.sqrt(n[1:]), 1)
    # sin(lt sqrt(n))/sqrt(n) with its n=0 limit spelled out, so the 0/0
    # never reaches the arithmetic (the annihilator kills that column anyway)
    sinc = np.empty(dim)
    sinc[0] = lt
    sinc[1:] = np.sin(lt * np.sqrt(n[1:])) / np.sqrt(n[1:])
    sinc_up = np.sin(lt * np.sqrt(n + 1.0)) / np.sqrt(n + 1.0)

    u = np.zeros((2 * dim, 2 * dim), dtype=complex)
    u[:dim, :dim] = np.diag(np.cos(lt * np.sqrt(n + 1.0)))
    u[dim:, dim:] = np.diag(np.cos(lt * np.sqrt(n)))
    u[:dim, dim:] = -1j * (lower @ np.diag(sinc))
    u[dim:, :dim] = -1j * (lower.T @ np.diag(sinc_up))
    return u


def jc_unitary_oracle(params, field_dim: int) -> np.ndarray:
    """Same unitary by exponentiating the block interaction Hamiltonian."""
    lt = _lt(params)
    if field_dim < 2:
        raise ValueError(f"field_dim must be >= 2, got {field_dim}")
    dim = field_dim
    lower = np.diag(np.sqrt(np.arange(1.0, dim)), 1)
    h = np.zeros((2 * dim, 2 * dim), dtype=complex)
    h[:dim, dim:] = lower
    h[dim:, :dim] = lower.T
    return mat_exp(h, scale=-1j * lt)


def _to_pair_order(m: np.ndarray, field_dim: int) -> np.ndarray:
    """Regroup factors (aA,aB,fA,fB) -> (aA,fA,aB,fB)."""
    f = field_dim
    d = 4 * f * f
    return (
        m.reshape(2, 2, f, f, 2, 2, f, f)
        .transpose(0, 2, 1, 3, 4, 6, 5, 7)
        .reshape(d, d)
    )


def _from_pair_order(m: np.ndarray, field_dim: int) -> np.ndarray:
    """Undo :func:`_to_pair_order`: same axis swap, pair-order dimensions."""
    f = field_dim
    d = 4 * f * f
    return (
        m.reshape(2, f, 2, f, 2, f, 2, f)
        .transpose(0, 2, 1, 3, 4, 6, 5, 7)
        .reshape(d, d)
    )


def evolve(atoms: AtomState, field: CavityFieldState, params, method: str = "closed_form") -> EvolvedState:
    """Full composite evolution; factors ordered (atom A, atom B, field A, field B).

    Dense and explicit: memory grows like field_dim**4, fine at moderate
    cutoffs.  For the reduced atom state at large cutoffs use
    :func:`reduce_atoms_direct` instead.
    """
    if method == "closed_form":
        build, provenance = jc_unitary, "closed_form_unitary"
    elif method == "hamiltonian":
        build, provenance = jc_unitary_oracle, "hamiltonian_exponential"
    else:
        raise ValueError(f"unknown method {method!r}")

    fdim = field.rho.space.factor_dims[0]
    if field.rho.space.factor_dims != (fdim, fdim):
        raise ValueError(f"field must have two equal factors, got {field.rho.space.factor_dims}")
    big = fdim + EVOLVE_PAD
    padded = np.zeros((big, big, big, big), dtype=complex)
    padded[:fdim, :fdim, :fdim, :fdim] = field.rho.matrix.reshape(fdim, fdim, fdim, fdim)

    rho0 = np.kron(atoms.density(), padded.reshape(big * big, big * big))
    u = build(params, big)
    u_both = np.kron(u, u)
    evolved = u_both @ _to_pair_order(rho0, big) @ u_both.conj().T
    out = _from_pair_order(evolved, big)

    space = TruncatedFockSpace((2, 2, big, big))
    return EvolvedState(
        DensityOperator(space, out, field.tail_weight),
        JCParams(_lt(params)),
        provenance,
    )


def reduce_atoms(state: EvolvedState) -> DensityOperator:
    """Trace the two field factors out of a composite evolved state."""
    return partial_trace(state.rho, keep={0, 1})


def _pair_channel(u4: np.ndarray, col_a: int, col_b: int, field_dim: int) -> np.ndarray:
    """Field-traced pair propagator between two atom input columns.

    Returns M[(i,j), (n,m)] = sum_p u[i,p,col_a,n] * conj(u[j,p,col_b,m]),
    cropped to the field block actually populated by the input state.
    """
    va = u4[:, :, col_a, :]
    vb = u4[:, :, col_b, :]
    m = np.einsum("ipn,jpm->ijnm", va, vb.conj())
    return np.ascontiguousarray(m[:, :, :field_dim, :field_dim]).reshape(4, field_dim * field_dim)


def reduce_atoms_direct(atoms: AtomState, field: CavityFieldState, params) -> DensityOperator:
    """Reduced two-atom state after the transit, without the composite.

    Contracts the transit unitaries against the field state one cavity at a
    time -- identical algebra to evolve + reduce_atoms (the tests pin the
    two paths together), but memory stays at a few copies of the field
    state instead of the composite's square.
    """
    fdim = field.rho.space.factor_dims[0]
    big = fdim + EVOLVE_PAD
    u4 = jc_unitary(params, big).reshape(2, big, 2, big)

    # (nA, nB, mA, mB) -> (nA, mA) x (nB, mB)
    r2 = np.ascontiguousarray(
        field.rho.matrix.reshape(fdim, fdim, fdim, fdim).transpose(0, 2, 1, 3)
    ).reshape(fdim * fdim, fdim * fdim)

    chi = atoms.vector.reshape(2, 2)
    occupied = [(int(ia), int(ib)) for ia in range(2) for ib in range(2) if chi[ia, ib] != 0.0]
    channels: dict[tuple[int, int], np.ndarray] = {}

    def channel(col_a: int, col_b: int) -> np.ndarray:
        key = (col_a, col_b)
        if key not in channels:
            channels[key] = _pair_channel(u4, col_a, col_b, fdim)
        return channels[key]

    out = np.zeros((2, 2, 2, 2), dtype=complex)  # [i, j, k, l] = (rows A,B | cols A,B)... see below
    for ket_a, ket_b in occupied:
        for bra_a, bra_b in occupied:
            weight = chi[ket_a, ket_b] * np.conj(chi[bra_a, bra_b])
            half = channel(ket_a, bra_a) @ r2  # (4, fdim^2) over (i,j) x (nB,mB)
            block = half @ channel(ket_b, bra_b).T  # (4, 4) over (i,j) x (k,l)
            out += weight * block.reshape(2, 2, 2, 2)

    # regroup (i,j,k,l) -> rows (i,k), cols (j,l)
    rho4 = out.transpose(0, 2, 1, 3).reshape(4, 4)
    return DensityOperator(TruncatedFockSpace((2, 2)), rho4, field.tail_weight)


def total_excitation(rho: DensityOperator) -> float:
    """Expected atom excitations plus photon numbers, (2,2,F,F) factors.

    The transit unitary commutes with this total, so it is the conserved
    charge the validity suite tracks.
    """
    dims = rho.space.factor_dims
    if len(dims) != 4 or dims[0] != 2 or dims[1] != 2:
        raise ValueError(f"expected factors (2, 2, F, F), got {dims}")
    diag = np.real(np.diag(rho.matrix)).reshape(dims)
    excited = np.array([1.0, 0.0])  # |e> carries the quantum
    weight = (
        excited[:, None, None, None]
        + excited[None, :, None, None]
        + np.arange(dims[2])[None, None, :, None]
        + np.arange(dims[3])[None, None, None, :]
    )
    return float(np.sum(diag * weight))
