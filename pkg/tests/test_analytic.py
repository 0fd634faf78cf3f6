import math

import numpy as np
import pytest

from cvqubits.analytic import (
    AtomXState,
    negativity_closed_form,
    weight_table,
    xstate_ee,
    xstate_gg,
)
from cvqubits.fieldprep import CouplingParam, SqueezeParam, TruncationPolicy, inject, squeezed_state
from cvqubits.jcdynamics import AtomState, reduce_atoms_direct


def x_state(a, b, c, d, e):
    return AtomXState(a, b, c, d, e, s=0.0, r=0.0, lambda_t=0.0, initial="gg", n_max=1)


# ------------------------------------------------------------- weight table


def test_weight_table_entry_formula():
    table = weight_table(0.65, 0.25, 10)
    th, ch = math.tanh(0.65), math.cosh(0.65)
    theta = 2.0 * math.acos(0.25)
    cos_h, sin_h = math.cos(theta / 2.0), math.sin(theta / 2.0)

    def c(n, k):
        return math.sqrt(math.comb(n, k)) * cos_h**k * sin_h ** (n - k)

    for n, m, k, l in [(0, 0, 0, 0), (3, 2, 1, 0), (5, 5, 2, 4), (10, 9, 0, 3)]:
        expect = th ** (n + m) / ch**2 * c(n, k) * c(m, k) * c(n, l) * c(m, l)
        assert table[n, m, k, l] == pytest.approx(expect, rel=1e-12)


def test_weight_table_symmetries():
    table = weight_table(0.8, 0.6, 8)
    for n, m, k, l in [(4, 2, 1, 2), (7, 7, 0, 5), (3, 6, 3, 1)]:
        assert table[n, m, k, l] == pytest.approx(table[m, n, k, l], rel=1e-14)
        assert table[n, m, k, l] == pytest.approx(table[n, m, l, k], rel=1e-14)


def test_weight_table_block_matches_entries():
    table = weight_table(0.5, 0.4, 6)
    block = table.block(5, 3)
    assert block.shape == (4, 4)
    for k in range(4):
        for l in range(4):
            assert block[k, l] == pytest.approx(table[5, 3, k, l], rel=1e-14)


def test_weight_table_diagonal_total_is_kept_mass():
    for s in (0.3, 0.65, 1.0):
        for n_max in (4, 9, 20):
            table = weight_table(s, 0.7, n_max)
            tail = math.tanh(s) ** (2 * (n_max + 1))
            assert table.diagonal_total() == pytest.approx(1.0 - tail, abs=1e-14)


def test_weight_table_no_light_at_zero_squeezing():
    table = weight_table(0.0, 0.5, 5)
    assert table[0, 0, 0, 0] == pytest.approx(1.0)
    assert table[3, 2, 0, 0] == 0.0
    assert table.diagonal_total() == pytest.approx(1.0)


def test_weight_table_bounds():
    table = weight_table(0.5, 0.5, 4)
    with pytest.raises(IndexError):
        table.entry(2, 3, 3, 0)  # k beyond min(n, m)
    with pytest.raises(IndexError):
        table.entry(9, 0, 0, 0)  # level beyond the stored rows
    with pytest.raises(IndexError):
        table.block(9, 0)


def test_weight_table_matches_injected_field_elements():
    # vacuum-vacuum population and the first same-ladder coherence, read
    # straight off the injected density matrix
    s, r, n_max = 0.6, 0.35, 12
    policy = TruncationPolicy(n_max=n_max)
    field = inject(squeezed_state(SqueezeParam(s), policy), CouplingParam(r),
                   s=SqueezeParam(s), policy=policy)
    table = weight_table(s, r, n_max)
    dim = n_max + 1

    vac = math.fsum(table.entry(n, n, n, n) for n in range(dim))
    assert field.rho.matrix[0, 0].real == pytest.approx(vac, abs=1e-14)

    # every branch losing (k, k) photons reaches this coherence, one level
    # pair (n+1+k, n+k) each
    for n in (0, 3, 7):
        got = field.rho.matrix[(n + 1) * dim + (n + 1), n * dim + n].real
        expect = math.fsum(
            table.entry(n + 1 + k, n + k, k, k) for k in range(dim - n - 1)
        )
        assert got == pytest.approx(expect, abs=1e-14)


# ----------------------------------------------------------- X-state builder


def test_xstate_zero_time_is_initial_state():
    for s, r in [(0.3, 0.0), (0.65, 0.7)]:
        g = xstate_gg(s, r, 0.0, 15)
        assert g.a == g.b == g.c == 0.0
        assert g.e_coh == 0.0
        assert g.d == pytest.approx(1.0 - math.tanh(s) ** 32, abs=1e-14)
        e = xstate_ee(s, r, 0.0, 15)
        assert e.b == e.c == e.d == 0.0
        assert e.a == pytest.approx(1.0 - math.tanh(s) ** 32, abs=1e-14)


def test_xstate_gg_dark_without_light():
    # no squeezing, atoms in |g,g>: nothing ever happens
    for lt in (0.0, 1.7, 11.0):
        x = xstate_gg(0.0, 0.3, lt, 6)
        assert x.a == x.b == x.c == 0.0
        assert x.d == pytest.approx(1.0)
        assert x.e_coh == 0.0
        assert negativity_closed_form(x) == 0.0


@pytest.mark.parametrize("lt", [0.4, 1.1, 2.8, 11.0])
def test_xstate_ee_vacuum_factorizes(lt):
    # no squeezing, full transmission: each atom does independent vacuum
    # Rabi flopping, so the joint state is a product of (cos^2, sin^2)
    x = xstate_ee(0.0, 0.0, lt, 6)
    c2, s2 = math.cos(lt) ** 2, math.sin(lt) ** 2
    assert x.a == pytest.approx(c2 * c2, abs=1e-14)
    assert x.b == pytest.approx(c2 * s2, abs=1e-14)
    assert x.c == pytest.approx(s2 * c2, abs=1e-14)
    assert x.d == pytest.approx(s2 * s2, abs=1e-14)
    assert x.e_coh == 0.0
    assert negativity_closed_form(x) == 0.0


def test_xstate_cross_populations_match_exactly():
    # both cavities see the same field and coupling, so the two single-flip
    # populations coincide by construction
    for initial, build in (("gg", xstate_gg), ("ee", xstate_ee)):
        x = build(0.9, 0.4, 7.3, 25)
        assert x.b == x.c
        assert x.initial == initial


def test_xstate_trace_matches_kept_mass():
    for build in (xstate_gg, xstate_ee):
        x = build(0.65, 0.25, 11.0, 20)
        assert x.trace() == pytest.approx(1.0 - math.tanh(0.65) ** 42, abs=1e-13)


def test_xstate_matrix_layout():
    x = xstate_gg(0.65, 0.0, 11.0, 20)
    m = x.to_matrix()
    assert m[0, 0] == x.a and m[3, 3] == x.d
    assert m[0, 3] == m[3, 0] == x.e_coh
    assert np.count_nonzero(m - np.diag(np.diag(m))) == 2


def test_xstate_rejects_degenerate_cutoff():
    with pytest.raises(ValueError):
        xstate_gg(0.65, 0.0, 1.0, 0)


@pytest.mark.parametrize("initial", ["gg", "ee"])
@pytest.mark.parametrize("s,r,lt", [(0.4, 0.3, 3.7), (0.65, 0.0, 11.0), (0.5, 0.9, 8.2)])
def test_xstate_matches_dense_reduction(initial, s, r, lt):
    # same truncation on both sides, so agreement is down at roundoff
    n_max = 14
    policy = TruncationPolicy(n_max=n_max)
    field = inject(squeezed_state(SqueezeParam(s), policy), CouplingParam(r),
                   s=SqueezeParam(s), policy=policy)
    rho = reduce_atoms_direct(AtomState(initial), field, lt).matrix
    build = xstate_gg if initial == "gg" else xstate_ee
    x = build(s, r, lt, n_max)
    assert abs(rho[0, 0].real - x.a) < 1e-13
    assert abs(rho[1, 1].real - x.b) < 1e-13
    assert abs(rho[2, 2].real - x.c) < 1e-13
    assert abs(rho[3, 3].real - x.d) < 1e-13
    assert abs(rho[0, 3].real - x.e_coh) < 1e-13
    assert abs(rho[0, 3].imag) < 1e-13


# ------------------------------------------------------------ closed measure


def test_measure_on_werner_family():
    # p |Phi+><Phi+| + (1-p)/4 I: entangled above p = 1/3 with measure (3p-1)/2
    for p in (0.0, 1.0 / 3.0, 0.5, 1.0):
        x = x_state(p / 2 + (1 - p) / 4, (1 - p) / 4, (1 - p) / 4, p / 2 + (1 - p) / 4, p / 2)
        assert negativity_closed_form(x) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-15)


def test_measure_bell_state_is_maximal():
    assert negativity_closed_form(x_state(0.5, 0.0, 0.0, 0.5, 0.5)) == pytest.approx(1.0)


def test_measure_clamps_separable_states():
    assert negativity_closed_form(x_state(0.25, 0.25, 0.25, 0.25, 0.0)) == 0.0
    assert negativity_closed_form(x_state(0.1, 0.4, 0.4, 0.1, 0.05)) == 0.0
