import numpy as np
import pytest

from cvqubits.fieldprep import CouplingParam, SqueezeParam, TruncationPolicy, inject, squeezed_state
from cvqubits.jcdynamics import (
    ATOM_BASIS,
    AtomState,
    EvolvedState,
    JCParams,
    evolve,
    jc_unitary,
    jc_unitary_oracle,
    reduce_atoms,
    reduce_atoms_direct,
    total_excitation,
)
from cvqubits.tensorops import StateVector, TruncatedFockSpace

LT_GRID = [0.1, 1.0, 5.0, 11.0, 15.0]


def small_field(s=0.3, r=0.25, n_max=6):
    policy = TruncationPolicy(n_max=n_max)
    psi = squeezed_state(SqueezeParam(s), policy)
    return inject(psi, CouplingParam(r), s=SqueezeParam(s), policy=policy)


# ------------------------------------------------------------------- params


def test_jc_params_rejects_bad_times():
    for bad in (-0.5, float("nan"), float("inf")):
        with pytest.raises(ValueError):
            JCParams(bad)


def test_atom_state_labels_and_vectors():
    assert ATOM_BASIS == ("ee", "eg", "ge", "gg")
    gg = AtomState("gg")
    assert gg.label == "gg"
    np.testing.assert_allclose(gg.vector, [0, 0, 0, 1])

    bell = AtomState(np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2))
    assert bell.label is None
    assert bell.vector @ bell.vector.conj() == pytest.approx(1.0)

    sv = StateVector(TruncatedFockSpace((2, 2)), [0, 1, 0, 0])
    assert AtomState(sv).label is None

    with pytest.raises(ValueError):
        AtomState("xx")
    with pytest.raises(ValueError):
        AtomState(np.array([1.0, 1.0, 0.0, 0.0]))  # not normalized
    with pytest.raises(ValueError):
        AtomState(StateVector(TruncatedFockSpace((4,)), [1, 0, 0, 0]))


# ------------------------------------------------------------- pair unitary


def test_jc_unitary_zero_time_is_identity():
    np.testing.assert_allclose(jc_unitary(0.0, 8), np.eye(16), atol=1e-15)


def test_jc_unitary_ground_vacuum_is_fixed():
    dim = 6
    u = jc_unitary(JCParams(2.3), dim)
    col = u[:, dim + 0]  # |g, 0>
    expect = np.zeros(2 * dim)
    expect[dim] = 1.0
    np.testing.assert_allclose(col, expect, atol=1e-15)


@pytest.mark.parametrize("lt", LT_GRID)
def test_jc_unitary_vacuum_rabi_doublet(lt):
    dim = 6
    u = jc_unitary(lt, dim)
    col = u[:, 0]  # |e, 0>
    assert col[0] == pytest.approx(np.cos(lt))
    assert col[dim + 1] == pytest.approx(-1j * np.sin(lt))
    assert np.count_nonzero(np.abs(col) > 1e-15) <= 2


def test_jc_unitary_rejects_tiny_space():
    with pytest.raises(ValueError):
        jc_unitary(1.0, 1)


@pytest.mark.parametrize("dim", [5, 15, 31])
@pytest.mark.parametrize("lt", LT_GRID)
def test_jc_unitary_matches_exponential(lt, dim):
    got = jc_unitary(lt, dim)
    ref = jc_unitary_oracle(lt, dim)
    # the truncated generator cannot rotate the top excited level, the
    # closed form can: blank that single column on both sides
    got, ref = got.copy(), ref.copy()
    got[:, dim - 1] = ref[:, dim - 1] = 0.0
    assert np.max(np.abs(got - ref)) < 1e-11


@pytest.mark.parametrize("lt", LT_GRID)
def test_jc_unitary_columns_are_orthonormal(lt):
    dim = 9
    u = jc_unitary(lt, dim)
    g = u.conj().T @ u
    # all columns except the uncoupled top excited level
    keep = [i for i in range(2 * dim) if i != dim - 1]
    np.testing.assert_allclose(g[np.ix_(keep, keep)], np.eye(2 * dim - 1), atol=1e-13)


# ------------------------------------------------------------------- evolve


def test_evolve_zero_time_returns_input_state():
    field = small_field()
    out = evolve(AtomState("eg"), field, 0.0)
    assert isinstance(out, EvolvedState)
    assert out.provenance == "closed_form_unitary"
    atoms = reduce_atoms(out)
    np.testing.assert_allclose(atoms.matrix, AtomState("eg").density(), atol=1e-14)


def test_evolve_factor_layout():
    field = small_field(n_max=4)
    out = evolve(AtomState("gg"), field, 1.0)
    fdim = field.rho.space.factor_dims[0] + 2
    assert out.rho.space.factor_dims == (2, 2, fdim, fdim)
    assert out.params == JCParams(1.0)


def test_evolve_methods_agree():
    field = small_field(s=0.4, r=0.3, n_max=5)
    a = evolve(AtomState("gg"), field, 7.0, method="closed_form")
    b = evolve(AtomState("gg"), field, 7.0, method="hamiltonian")
    assert a.provenance == "closed_form_unitary"
    assert b.provenance == "hamiltonian_exponential"
    assert np.max(np.abs(a.rho.matrix - b.rho.matrix)) < 1e-11
    with pytest.raises(ValueError):
        evolve(AtomState("gg"), field, 7.0, method="trotter")


@pytest.mark.parametrize("initial", ["gg", "ee", "eg"])
@pytest.mark.parametrize("lt", [0.7, 5.0, 11.0])
def test_evolve_conserves_excitation(initial, lt):
    field = small_field(s=0.5, r=0.1, n_max=8)
    before = evolve(AtomState(initial), field, 0.0)
    after = evolve(AtomState(initial), field, lt)
    assert total_excitation(after.rho) == pytest.approx(total_excitation(before.rho), abs=1e-9)
    assert after.rho.trace().real == pytest.approx(before.rho.trace().real, abs=1e-12)


def test_total_excitation_needs_atom_field_layout():
    field = small_field()
    with pytest.raises(ValueError):
        total_excitation(field.rho)


# ---------------------------------------------------------- reduced dynamics


@pytest.mark.parametrize("initial", ["gg", "ee"])
@pytest.mark.parametrize("lt", [0.9, 11.0])
def test_reduced_state_is_x_shaped(initial, lt):
    field = small_field(s=0.5, r=0.25, n_max=8)
    rho = reduce_atoms(evolve(AtomState(initial), field, lt)).matrix
    off = [rho[0, 1], rho[0, 2], rho[1, 2], rho[1, 3], rho[2, 3], rho[0, 3].imag]
    assert np.max(np.abs(off)) < 1e-9
    # corner stays but is generally nonzero
    assert abs(rho[0, 3]) < 1.0


@pytest.mark.parametrize("method", ["closed_form", "hamiltonian"])
@pytest.mark.parametrize("initial", ["gg", "ee", "ge"])
def test_direct_reduction_matches_composite(method, initial):
    field = small_field(s=0.45, r=0.3, n_max=7)
    lt = 6.3
    via_composite = reduce_atoms(evolve(AtomState(initial), field, lt, method=method))
    direct = reduce_atoms_direct(AtomState(initial), field, lt)
    assert np.max(np.abs(via_composite.matrix - direct.matrix)) < 1e-12
    assert direct.space.factor_dims == (2, 2)
    assert direct.tail_weight == pytest.approx(field.tail_weight)


def test_direct_reduction_handles_entangled_atoms():
    field = small_field(s=0.45, r=0.0, n_max=7)
    bell = AtomState(np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2))
    for lt in (0.0, 2.2, 9.7):
        via_composite = reduce_atoms(evolve(bell, field, lt))
        direct = reduce_atoms_direct(bell, field, lt)
        assert np.max(np.abs(via_composite.matrix - direct.matrix)) < 1e-12


def test_direct_reduction_complex_superposition():
    field = small_field(s=0.3, r=0.5, n_max=6)
    chi = np.array([0.5, 0.5j, -0.5, 0.5j])
    atoms = AtomState(chi)
    via_composite = reduce_atoms(evolve(atoms, field, 4.4))
    direct = reduce_atoms_direct(atoms, field, 4.4)
    assert np.max(np.abs(via_composite.matrix - direct.matrix)) < 1e-12
