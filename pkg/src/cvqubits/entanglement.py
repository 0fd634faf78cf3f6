"""Partial-transpose entanglement detection for two qubits.

For a 2x2 system a negative eigenvalue of the partially transposed state is
both necessary and sufficient for entanglement, so the verdict here is
exact, and -2 times the sum of negative eigenvalues gives a measure scaled
to [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensorops import DensityOperator, TruncatedFockSpace, eig_hermitian, partial_transpose

__all__ = ["EntanglementReport", "negativity_general"]

# below this the smallest eigenvalue is eigensolver noise, not physics
NEGATIVITY_TOL = 1e-10


@dataclass(frozen=True)
class EntanglementReport:
    """Verdict plus the raw spectrum, so near-threshold behaviour stays visible."""

    measure: float
    pt_eigenvalues: np.ndarray  # ascending
    is_entangled: bool
    min_eigenvalue: float


def negativity_general(rho) -> EntanglementReport:
    """Measure and verdict from the partial-transpose spectrum.

    Accepts a (2, 2)-factored DensityOperator or a bare 4x4 matrix.  The
    transpose is taken over the second qubit; which qubit is transposed
    does not change the spectrum.
    """
    if isinstance(rho, DensityOperator):
        if rho.space.factor_dims != (2, 2):
            raise ValueError(f"expected a two-qubit state, got factors {rho.space.factor_dims}")
        op = rho
    else:
        m = np.asarray(rho, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 two-qubit state, got shape {m.shape}")
        op = DensityOperator(TruncatedFockSpace((2, 2)), m)

    spectrum = eig_hermitian(partial_transpose(op, 1).matrix)
    negative = float(spectrum[spectrum < 0.0].sum())
    measure = max(0.0, -2.0 * negative)
    lowest = float(spectrum[0])
    return EntanglementReport(
        measure=measure,
        pt_eigenvalues=spectrum,
        is_entangled=bool(lowest < -NEGATIVITY_TOL),
        min_eigenvalue=lowest,
    )
