import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zeeman_cim import (
    CacState,
    InvalidArgumentError,
    IsingProblem,
    StepSizeFault,
    ZeemanMethod,
    brute_force_ground,
    cac_error_step,
    extend_problem_aux,
    gauge_fix_aux,
    generate_sk,
    injection_abs_mean,
    injection_cac,
    ising_energy,
)


def test_abs_mean_zeta_zero_is_plain_coupling():
    p = generate_sk(5, 1)
    x = np.random.default_rng(0).normal(size=5)
    m = ZeemanMethod("ABS_MEAN", zeta=0.0, j=1.0)
    np.testing.assert_array_equal(injection_abs_mean(p, x, m), 1.0 * (p.J * x).sum(axis=1))


def test_abs_mean_zero_amplitudes():
    p = generate_sk(4, 2)
    np.testing.assert_array_equal(injection_abs_mean(p, np.zeros(4), ZeemanMethod("ABS_MEAN", 1.3)), 0.0)


def test_abs_mean_hand_value():
    p = IsingProblem(np.zeros((2, 2)), [1.0, -1.0])
    inj = injection_abs_mean(p, [0.5, -0.5], ZeemanMethod("ABS_MEAN", zeta=1.0, j=1.0))
    np.testing.assert_allclose(inj, [0.5, -0.5])


def test_abs_mean_dimension_mismatch():
    with pytest.raises(InvalidArgumentError):
        injection_abs_mean(generate_sk(3, 0), np.ones(4), ZeemanMethod("ABS_MEAN"))


def test_cac_injection_reduces_to_coupling():
    p = generate_sk(6, 3)
    x = np.random.default_rng(1).normal(size=6)
    m = ZeemanMethod("CAC", zeta=0.0, beta=10.0, j=1.0)
    np.testing.assert_array_equal(injection_cac(p, x, CacState.ones(6), 2.0, m), (p.J * x).sum(axis=1))


def test_cac_injection_hand_value():
    p = IsingProblem(np.zeros((3, 3)), [1.0, 0.5, -2.0])
    inj = injection_cac(p, np.ones(3), CacState.ones(3), 4.0, ZeemanMethod("CAC", zeta=1.0, j=1.0))
    np.testing.assert_allclose(inj, 2.0 * p.h)


def test_cac_injection_linear_in_e():
    p = generate_sk(6, 4)
    x = np.random.default_rng(2).normal(size=6)
    e = np.random.default_rng(3).uniform(0.5, 2, size=6)
    m = ZeemanMethod("CAC", zeta=0.7)
    a = injection_cac(p, x, CacState(e), 1.5, m)
    b = injection_cac(p, x, CacState(2 * e), 1.5, m)
    np.testing.assert_allclose(b, 2 * a, rtol=1e-15)


def test_cac_injection_rejects_bad_tau():
    with pytest.raises(InvalidArgumentError):
        injection_cac(generate_sk(2, 0), np.ones(2), CacState.ones(2), 0.0, ZeemanMethod())


@given(st.floats(0.1, 3), st.floats(0.1, 3), st.integers(0, 1000))
def test_abs_mean_and_cac_agree_when_scales_match(j, zeta, seed):
    p = generate_sk(5, seed)
    x = np.random.default_rng(seed).normal(size=5)
    tau = np.abs(x).mean() ** 2
    a = injection_abs_mean(p, x, ZeemanMethod("ABS_MEAN", zeta=zeta, j=j))
    c = injection_cac(p, x, CacState.ones(5), tau, ZeemanMethod("CAC", zeta=zeta, j=j))
    np.testing.assert_allclose(a, c, rtol=1e-12, atol=1e-12)


def test_cac_error_fixed_point():
    x = np.array([1.0, -1.0, 1.0])
    state = cac_error_step(CacState(np.array([1.0, 2.0, 3.0])), x, 1.0, 10.0, 0.01)
    np.testing.assert_array_equal(state.e, [1.0, 2.0, 3.0])


def test_cac_error_beta_zero():
    e = np.array([1.0, 0.4])
    out = cac_error_step(CacState(e), np.array([5.0, 0.0]), 2.0, 0.0, 0.01)
    np.testing.assert_array_equal(out.e, e)


def test_cac_error_hand_value():
    out = cac_error_step(CacState(np.array([1.0])), np.array([2.0]), 1.0, 10.0, 0.01)
    assert out.e[0] == pytest.approx(0.7, abs=1e-15)


def test_cac_error_negative_is_fault():
    with pytest.raises(StepSizeFault):
        cac_error_step(CacState(np.array([1.0])), np.array([5.0]), 1.0, 10.0, 0.1)


@given(st.floats(1e-6, 0.1), st.floats(0, 20), st.floats(1e-4, 0.1))
def test_cac_error_stationary_manifold(eps, beta, dt):
    tau = 2.0
    rng = np.random.default_rng(0)
    x = np.sqrt(tau + rng.uniform(-eps, eps, 8))
    e = rng.uniform(0.5, 5, 8)
    out = cac_error_step(CacState(e), x, tau, beta, dt)
    # 1e-15 covers rounding of the update itself
    assert np.all(np.abs(out.e - e) / e <= beta * eps * dt * (1 + 1e-9) + 1e-15)


def test_extend_problem_zero_zeta():
    p = generate_sk(4, 5)
    ext = extend_problem_aux(p, 0.0)
    assert ext.n == 5
    np.testing.assert_array_equal(ext.J[:4, 4], 0.0)
    np.testing.assert_array_equal(ext.J[:4, :4], p.J)
    np.testing.assert_array_equal(ext.h, 0.0)


def test_extend_problem_hand_border():
    p = IsingProblem([[0.0, 1.0], [1.0, 0.0]], [0.5, -0.25])
    ext = extend_problem_aux(p, 2.0)
    np.testing.assert_array_equal(ext.J[:2, 2], [1.0, -0.5])
    np.testing.assert_array_equal(ext.J[2, :2], [1.0, -0.5])
    assert ext.J[2, 2] == 0.0


def test_gauge_fix():
    s = np.array([1.0, -1.0, 1.0, 1.0])
    np.testing.assert_array_equal(gauge_fix_aux(s), [1, -1, 1])
    s2 = np.array([1.0, -1.0, 1.0, -1.0])
    np.testing.assert_array_equal(gauge_fix_aux(s2), [-1, 1, -1])
    np.testing.assert_array_equal(gauge_fix_aux(-s2), gauge_fix_aux(s2))
    with pytest.raises(InvalidArgumentError):
        gauge_fix_aux([1.0])


@pytest.mark.parametrize("n", [1, 3, 6, 8])
def test_aux_hamiltonian_identity(n):
    p = generate_sk(n, 100 + n)
    ext = extend_problem_aux(p, 1.0)
    for bits in itertools.product([-1.0, 1.0], repeat=n + 1):
        s_ext = np.array(bits)
        assert ising_energy(ext, s_ext) == pytest.approx(ising_energy(p, gauge_fix_aux(s_ext)), abs=1e-12)


@settings(deadline=None, max_examples=20)
@given(st.integers(1, 10), st.integers(0, 10**6))
def test_aux_ground_state_consistency(n, seed):
    p = generate_sk(n, seed)
    ext = extend_problem_aux(p, 1.0)
    gt_ext, gt = brute_force_ground(ext), brute_force_ground(p)
    assert gt_ext.energy == pytest.approx(gt.energy, abs=1e-9)
    assert ising_energy(p, gauge_fix_aux(gt_ext.config)) == pytest.approx(gt.energy, abs=1e-9)


def test_method_validation():
    with pytest.raises(InvalidArgumentError):
        ZeemanMethod("CAC", zeta=-1.0)
    with pytest.raises(InvalidArgumentError):
        ZeemanMethod("CAC", j=0.0)
    with pytest.raises(ValueError):
        ZeemanMethod("NOPE")
