import math

import numpy as np
import pytest

from torus_wigner.grover import (
    GroverConfig,
    closed_form_probability,
    default_steps,
    floor_steps,
    grover_step,
    oracle,
    run_grover,
)
from torus_wigner.wigner import marginal


def state_vector_probabilities(n, marked, k, steps):
    """Independent oracle: iterate amplitudes with reflections written out by hand."""
    psi = np.exp(2j * np.pi * np.arange(n) * k / n) / np.sqrt(n)
    start = psi.copy()
    probs = [abs(psi[marked]) ** 2]
    for _ in range(steps):
        psi = psi.copy()
        psi[marked] *= -1
        psi = psi - 2 * start * np.vdot(start, psi)
        probs.append(abs(psi[marked]) ** 2)
    return probs


def test_config_validation():
    with pytest.raises(ValueError):
        GroverConfig(12, 0)
    with pytest.raises(ValueError):
        GroverConfig(8, 8)
    with pytest.raises(ValueError):
        GroverConfig(8, 0, initial_momentum=-1)
    assert GroverConfig.from_qubits(5, 16).n == 32


def test_oracle_is_diagonal_sign_flip():
    u = oracle(GroverConfig(8, 3))
    want = np.eye(8)
    want[3, 3] = -1
    assert np.array_equal(u.real, want)
    assert not u.imag.any()


def test_grover_step_unitary():
    u = grover_step(GroverConfig(32, 16, 1))
    assert np.abs(u.conj().T @ u - np.eye(32)).max() < 1e-12


def test_initial_probability_uniform():
    frames = run_grover(GroverConfig(4, 2), steps=0)
    assert len(frames) == 1
    assert frames[0].success_probability == pytest.approx(0.25, abs=1e-15)


def test_amplitude_growth_matches_closed_form():
    n = 32
    theta = math.asin(1 / math.sqrt(n))
    frames = run_grover(GroverConfig(n, 16, 1), steps=8)
    for fr in frames:
        assert abs(fr.success_probability - math.sin((2 * fr.step + 1) * theta) ** 2) < 1e-12


def test_n32_values():
    frames = run_grover(GroverConfig(32, 16, 1), steps=5)
    assert abs(frames[4].success_probability - closed_form_probability(32, 4)) < 1e-12
    assert frames[4].success_probability == pytest.approx(0.9991823155, abs=1e-9)
    assert frames[5].success_probability == pytest.approx(0.8596366612, abs=1e-9)


@pytest.mark.parametrize("n,marked,k", [(8, 3, 0), (16, 5, 7), (32, 16, 1), (64, 0, 63)])
def test_matches_state_vector_oracle(n, marked, k):
    steps = default_steps(n) + 2
    frames = run_grover(GroverConfig(n, marked, k), steps=steps)
    want = state_vector_probabilities(n, marked, k, steps)
    assert np.abs(np.array([f.success_probability for f in frames]) - want).max() < 1e-12


def test_probability_independent_of_momentum():
    base = [f.success_probability for f in run_grover(GroverConfig(16, 9, 0), 5)]
    for k in range(1, 16):
        other = [f.success_probability for f in run_grover(GroverConfig(16, 9, k), 5)]
        assert np.abs(np.array(other) - base).max() < 1e-10


def test_marginal_consistency():
    for fr in run_grover(GroverConfig(32, 16, 1), steps=6):
        assert abs(marginal(fr.wigner, "position")[16] - fr.success_probability) < 1e-10


def test_grids_insensitive_to_global_phase():
    cfg = GroverConfig(8, 5, 2)
    u = grover_step(cfg)
    frames = run_grover(cfg, 3)
    from torus_wigner.states import momentum_vector, pure
    from torus_wigner.wigner import wigner_of

    psi = momentum_vector(8, 2)
    for fr in frames[1:]:
        psi = np.exp(0.7j) * (u @ psi)
        assert np.abs(wigner_of(pure(psi)).values - fr.wigner.values).max() < 1e-12


def test_strip_concentration_at_optimum():
    n, marked = 32, 16
    frames = run_grover(GroverConfig(n, marked, 1))
    w = np.abs(frames[-1].wigner.values)
    strip = w[2 * marked].sum() + w[(2 * marked + n) % (2 * n)].sum()
    assert strip / w.sum() > 0.8
    row = frames[-1].wigner.values[2 * marked]
    assert np.abs(row - frames[-1].success_probability / (2 * n)).max() < 1e-3


def test_step_counts():
    assert default_steps(32) == 4
    assert floor_steps(32) == 4
    assert default_steps(4) == 2
    assert floor_steps(4) == 1


def test_trajectory_limits():
    with pytest.raises(ValueError):
        run_grover(GroverConfig(128, 1))
    with pytest.raises(ValueError):
        run_grover(GroverConfig(8, 1), steps=-1)
