import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from torus_wigner.core import fourier, grid_points, phase_point_op, phase_point_stack
from torus_wigner.states import StateSpec, make_state, random_density_matrix, random_pure_state
from torus_wigner.wigner import (
    LineSpec,
    WignerGrid,
    extend_from_subgrid,
    format_grid_csv,
    gamma_table,
    inner_product,
    line_points,
    line_projector,
    line_sum,
    marginal,
    parse_grid_csv,
    purity_residual,
    read_grid_csv,
    redundancy_residual,
    state_from_wigner,
    three_point,
    three_point_closed_form,
    triangle_area,
    wigner_of,
    write_grid_csv,
)


def brute_wigner(rho):
    n = rho.shape[0]
    ops = phase_point_stack(n)
    return np.einsum("ij,qpji->qp", rho, ops)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_wigner_matches_trace_definition(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        rho = random_density_matrix(n, rng)
        want = brute_wigner(rho)
        assert np.abs(want.imag).max() < 1e-12
        assert np.abs(wigner_of(rho).values - want.real).max() < 1e-13


def test_position_strip_pattern():
    w = wigner_of(make_state(4, StateSpec.position(1))).values
    want = np.zeros((8, 8))
    want[2, :] = 1 / 8
    want[6, :] = (-1.0) ** np.arange(8) / 8
    assert np.abs(w - want).max() < 1e-12


def test_mixed_pattern():
    w = wigner_of(make_state(4, StateSpec.mixed())).values
    q, p = np.meshgrid(np.arange(8), np.arange(8), indexing="ij")
    want = np.where((q % 2 == 0) & (p % 2 == 0), 1 / 16, 0.0)
    assert np.abs(w - want).max() < 1e-12


def test_superposition_interference_strip():
    w = wigner_of(make_state(4, StateSpec.superposition(0, 1, 0.0))).values
    p = np.arange(8)
    # W = (W_0 + W_1 + dW) / 2 and the direct strips vanish on q = 1
    delta = 2 * w[1]
    assert np.abs(delta - np.cos(np.pi * p / 4) / 4).max() < 1e-12
    nonzero_rows = sorted(set(np.nonzero(np.abs(w) > 1e-12)[0]))
    assert nonzero_rows == [0, 1, 2, 4, 5, 6]


@pytest.mark.parametrize("n", [4, 8])
@pytest.mark.parametrize("q0,q1,phi", [(0, 1, 0.0), (1, 3, 0.7), (2, 7, -1.3), (5, 0, 2.0)])
def test_superposition_closed_form(n, q0, q1, phi):
    from torus_wigner.evolution import position_strip

    q0, q1 = q0 % n, q1 % n
    w = wigner_of(make_state(n, StateSpec.superposition(q0, q1, phi))).values
    q, p = np.meshgrid(np.arange(2 * n), np.arange(2 * n), indexing="ij")
    # interference strip at q = q0 + q1 + m N with fringe sign (-1)^(m p)
    m = (q - q0 - q1) // n
    on_strip = (q - q0 - q1) % n == 0
    delta = np.where(on_strip, (-1.0) ** ((m * p) % 2), 0.0) \
        * np.cos(np.pi * p * (q0 - q1) / n - phi) / n
    want = (position_strip(n, q0) + position_strip(n, q1) + delta) / 2
    assert np.abs(w - want).max() < 1e-12


def test_grid_invariants():
    rng = np.random.default_rng(3)
    for n in (2, 4, 8):
        w = wigner_of(random_density_matrix(n, rng)).values
        assert redundancy_residual(w) < 1e-12
        assert abs(w.sum() - 1) < 1e-10


def test_wigner_rejects_non_hermitian():
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 1] = 1
    with pytest.raises(ValueError):
        wigner_of(rho)


def test_grid_shape_validation():
    with pytest.raises(ValueError):
        WignerGrid(np.zeros((6, 6)))
    with pytest.raises(ValueError):
        WignerGrid(np.zeros((8, 4)))


def test_grid_lookup_wraps():
    g = wigner_of(make_state(4, StateSpec.position(1)))
    assert g[(10, -1)] == g[(2, 7)] == pytest.approx(1 / 8)


def test_round_trip_position():
    rho = make_state(4, StateSpec.position(1))
    assert np.abs(state_from_wigner(wigner_of(rho)) - rho).max() < 1e-12


def test_round_trip_random_pure():
    rng = np.random.default_rng(7)
    for _ in range(20):
        rho = random_pure_state(8, rng)
        g = wigner_of(rho)
        back = state_from_wigner(g)
        assert np.abs(back - rho).max() < 1e-10
        assert np.abs(wigner_of(back).values - g.values).max() < 1e-10


def test_full_grid_reconstruction_agrees():
    rng = np.random.default_rng(8)
    for n in (2, 4, 6):
        g = wigner_of(random_density_matrix(n, rng))
        assert np.abs(state_from_wigner(g, full_grid=True) - state_from_wigner(g)).max() < 1e-12


def test_reconstruction_matches_operator_sum():
    n = 4
    rng = np.random.default_rng(9)
    g = wigner_of(random_density_matrix(n, rng))
    ops = phase_point_stack(n)
    direct = 4 * n * np.einsum("qp,qpij->ij", g.values[:n, :n], ops[:n, :n])
    assert np.abs(state_from_wigner(g) - direct).max() < 1e-12


def test_reconstruction_rejects_broken_redundancy():
    v = wigner_of(make_state(4, StateSpec.position(1))).values.copy()
    v[7, 7] += 0.1
    with pytest.raises(ValueError):
        state_from_wigner(WignerGrid(v))


def test_inner_product_examples():
    w0 = wigner_of(make_state(4, StateSpec.position(0)))
    w1 = wigner_of(make_state(4, StateSpec.position(1)))
    wm = wigner_of(make_state(4, StateSpec.mixed()))
    assert inner_product(w1, w1) == pytest.approx(1, abs=1e-12)
    assert inner_product(w0, w1) == pytest.approx(0, abs=1e-12)
    assert inner_product(wm, wm) == pytest.approx(0.25, abs=1e-12)
    with pytest.raises(ValueError):
        inner_product(w1, wigner_of(make_state(2, StateSpec.mixed())))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 4, 6, 8]), st.integers(0, 2**32 - 1))
def test_inner_product_is_trace(n, seed):
    rng = np.random.default_rng(seed)
    r1, r2 = random_density_matrix(n, rng), random_density_matrix(n, rng)
    assert abs(inner_product(wigner_of(r1), wigner_of(r2)) - np.trace(r1 @ r2).real) < 1e-10


def test_line_points_examples():
    assert len(line_points(4, LineSpec(1, -1, 0))) == 8
    assert line_points(4, LineSpec(2, -2, 1)) == []
    assert len(line_points(4, LineSpec(2, -2, 0))) == 16
    pts = line_points(4, LineSpec.vertical(3))
    assert pts == [(3, p) for p in range(8)]


def test_line_spec_rejects_degenerate():
    with pytest.raises(ValueError):
        line_points(4, LineSpec(8, 0, 1))


def test_vertical_projector_is_basis_projector():
    proj, dim = line_projector(4, LineSpec.vertical(2))
    want = np.zeros((4, 4))
    want[1, 1] = 1
    assert dim == 1
    assert np.abs(proj - want).max() < 1e-12


def test_odd_offset_gives_zero_projector():
    for line in (LineSpec(2, -2, 1), LineSpec(0, -2, 3), LineSpec(2, 0, 5)):
        proj, dim = line_projector(4, line)
        assert dim == 0
        assert np.abs(proj).max() < 1e-12


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_every_line_is_a_projector(n):
    # line_projector raises if P^2 != P or if the dimension disagrees with the even-point count
    side = 2 * n
    for n1, n2 in itertools.product(range(side), repeat=2):
        if (n1, n2) == (0, 0) or (n > 4 and (n1 % 3 or n2 % 3)):
            continue
        for n3 in range(side):
            line_projector(n, LineSpec(n1, n2, n3))


def test_horizontal_lines_are_momentum_probabilities():
    n = 4
    rng = np.random.default_rng(11)
    rho = random_density_matrix(n, rng)
    g = wigner_of(rho)
    ft = fourier(n)
    mom = np.diag(ft.conj().T @ rho @ ft).real
    for p0 in range(2 * n):
        want = mom[p0 // 2] if p0 % 2 == 0 else 0.0
        assert abs(line_sum(g, LineSpec.horizontal(p0)) - want) < 1e-12


def test_line_sum_equals_projector_expectation():
    n = 4
    rng = np.random.default_rng(12)
    rho = random_density_matrix(n, rng)
    g = wigner_of(rho)
    for line in (LineSpec(1, -1, 0), LineSpec(1, 1, 2), LineSpec(2, 1, 3), LineSpec(3, 1, 0)):
        proj, _ = line_projector(n, line)
        s = line_sum(g, line)
        assert abs(s - np.trace(rho @ proj).real) < 1e-10
        assert s >= -1e-10


def test_marginal_examples():
    g = wigner_of(make_state(4, StateSpec.position(1)))
    assert np.allclose(marginal(g, "position"), [0, 1, 0, 0], atol=1e-12)
    g = wigner_of(make_state(4, StateSpec.momentum(2)))
    assert np.allclose(marginal(g, "momentum"), [0, 0, 1, 0], atol=1e-12)
    g = wigner_of(make_state(4, StateSpec.mixed()))
    for fam in ("position", "momentum"):
        assert np.allclose(marginal(g, fam), 0.25, atol=1e-12)
    with pytest.raises(ValueError):
        marginal(g, "diagonal")


def test_triangle_area():
    assert triangle_area((0, 0), (1, 0), (0, 1)) == 1
    assert triangle_area((0, 0), (0, 1), (1, 0)) == -1
    assert triangle_area((3, 3), (3, 3), (5, 7)) == 0


def test_three_point_closed_form_exhaustive_n2():
    n = 2
    pts = grid_points(n)
    for a, b, c in itertools.product(pts, repeat=3):
        direct = three_point(n, a, b, c)
        assert abs(direct - three_point_closed_form(n, a, b, c)) < 1e-12


def test_three_point_closed_form_sampled_n4():
    n = 4
    rng = np.random.default_rng(5)
    for _ in range(400):
        a, b, c = (tuple(rng.integers(0, 2 * n, 2)) for _ in range(3))
        assert abs(three_point(n, a, b, c) - three_point_closed_form(n, a, b, c)) < 1e-12


def test_three_point_support_and_modulus():
    n = 2
    for a, b, c in itertools.product(grid_points(n), repeat=3):
        g = three_point(n, a, b, c)
        parity_ok = (a[0] + b[0] + c[0]) % 2 == 0 and (a[1] + b[1] + c[1]) % 2 == 0
        if parity_ok:
            assert abs(abs(g) - 1 / (4 * n**3)) < 1e-12
        else:
            assert abs(g) < 1e-12


def test_gamma_table_matches_direct_trace():
    n = 2
    table = gamma_table(n)
    sub = [(q, p) for q in range(n) for p in range(n)]
    for ai, a in enumerate(grid_points(n)):
        for bi, b in enumerate(sub):
            for ci, c in enumerate(sub):
                assert abs(table[ai, bi, ci] - three_point(n, a, b, c)) < 1e-12


def test_gamma_table_refuses_large_n():
    with pytest.raises(ValueError):
        gamma_table(10)


def test_purity_residual_pure_and_mixed():
    rng = np.random.default_rng(2)
    for n in (2, 4):
        for _ in range(5):
            assert purity_residual(wigner_of(random_pure_state(n, rng))) < 1e-10
    assert purity_residual(wigner_of(make_state(2, StateSpec.mixed()))) > 0.01
    assert purity_residual(wigner_of(make_state(4, StateSpec.position(0)))) < 1e-10


def test_purity_relation_matches_squared_state():
    # oracle: the quadratic form equals Tr(rho^2 A(alpha)) for any state
    n = 4
    rng = np.random.default_rng(4)
    rho = random_density_matrix(n, rng)
    g = wigner_of(rho)
    table = gamma_table(n)
    w = g.values[:n, :n].reshape(-1)
    quad = (16 * n * n * (table @ w @ w)).reshape(2 * n, 2 * n)
    assert np.abs(quad - brute_wigner(rho @ rho).real).max() < 1e-12


def test_csv_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(6)
    g = wigner_of(random_density_matrix(4, rng))
    path = tmp_path / "w.csv"
    write_grid_csv(g, path)
    back = read_grid_csv(path)
    assert np.array_equal(back.values, g.values)
    text = format_grid_csv(g)
    assert text.splitlines()[0] == "q,p,w"
    assert text.splitlines()[1].startswith("0,0,")
    assert text.splitlines()[2].startswith("0,1,")


def test_csv_rejects_malformed():
    with pytest.raises(ValueError):
        parse_grid_csv("a,b,c\n")
    with pytest.raises(ValueError):
        parse_grid_csv("q,p,w\n0,0,1\n0,1,1\n")


def test_extend_from_subgrid_reproduces_grid():
    rng = np.random.default_rng(10)
    w = wigner_of(random_density_matrix(6, rng)).values
    assert np.array_equal(extend_from_subgrid(w[:6, :6]), w)


def test_phase_point_grid_of_operator():
    # W of A(beta) itself (as a Hermitian operator) peaks at beta
    n = 4
    a = phase_point_op(n, (1, 3))
    w = brute_wigner(a).real
    assert w[1, 3] == pytest.approx(1 / (4 * n))
