import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zeeman_cim import (
    InvalidArgumentError,
    IsingProblem,
    NumericFault,
    SizeLimitError,
    brute_force_ground,
    brute_force_naive,
    generate_sk,
    ising_energy,
    load_problem,
    local_field,
    save_problem,
    spins_from_amplitudes,
)
from zeeman_cim.ising import config_from_index, config_index


@pytest.fixture
def pair():
    return IsingProblem([[0.0, 1.0], [1.0, 0.0]], [0.5, -0.25])


def test_energy_single_spin():
    assert ising_energy(IsingProblem([[0.0]], [1.0]), [1]) == -1.0


def test_energy_empty_hamiltonian():
    p = IsingProblem(np.zeros((2, 2)), np.zeros(2))
    for s in itertools.product([-1, 1], repeat=2):
        assert ising_energy(p, s) == 0.0


def test_energy_pair_all_configs(pair):
    # hand arithmetic: -J s1 s2 - 0.5 s1 + 0.25 s2
    expected = {(1, 1): -1.25, (1, -1): 0.25, (-1, 1): 1.75, (-1, -1): -0.75}
    for s, e in expected.items():
        assert ising_energy(pair, s) == pytest.approx(e, abs=1e-15)


def test_energy_batched_matches_loop():
    p = generate_sk(6, 3)
    S = 1.0 - 2.0 * np.random.default_rng(0).integers(0, 2, (20, 6))
    np.testing.assert_allclose(ising_energy(p, S), [ising_energy(p, s) for s in S], rtol=1e-14)


def test_energy_dimension_mismatch(pair):
    with pytest.raises(InvalidArgumentError):
        ising_energy(pair, [1, 1, 1])


@pytest.mark.parametrize(
    "J",
    [
        [[0.0, 1.0], [2.0, 0.0]],
        [[1.0, 0.0], [0.0, 0.0]],
        [[0.0, np.inf], [np.inf, 0.0]],
    ],
)
def test_problem_invariants_rejected(J):
    with pytest.raises(InvalidArgumentError):
        IsingProblem(J, [0.0, 0.0])


def test_problem_arrays_read_only(pair):
    with pytest.raises(ValueError):
        pair.J[0, 1] = 3.0


def test_local_field_field_only():
    p = IsingProblem(np.zeros((3, 3)), [0.7, 0.1, 0.2])
    assert local_field(p, [1, -1, 1], 0) == pytest.approx(0.7)


def test_local_field_single_coupling():
    p = IsingProblem([[0.0, 1.0], [1.0, 0.0]], [0.0, 0.0])
    assert local_field(p, [1, -1], 0) == -1.0


def test_local_field_index_error(pair):
    with pytest.raises(InvalidArgumentError):
        local_field(pair, [1, 1], 2)
    with pytest.raises(InvalidArgumentError):
        local_field(pair, [1, 1], -1)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(1, 10), data=st.data())
def test_flip_energy_identity(seed, n, data):
    p = generate_sk(n, seed)
    bits = data.draw(st.lists(st.sampled_from([-1.0, 1.0]), min_size=n, max_size=n))
    s = np.array(bits)
    r = data.draw(st.integers(0, n - 1))
    flipped = s.copy()
    flipped[r] = -s[r]
    delta = ising_energy(p, flipped) - ising_energy(p, s)
    expected = 2.0 * s[r] * local_field(p, s, r)
    assert delta == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_brute_force_pair_zero_field():
    p = IsingProblem([[0.0, 1.0], [1.0, 0.0]], [0.0, 0.0])
    gt = brute_force_ground(p)
    assert gt.energy == -1.0
    np.testing.assert_array_equal(gt.config, [1, 1])
    assert gt.degenerate


def test_brute_force_pair_with_field(pair):
    gt = brute_force_ground(pair)
    assert gt.energy == pytest.approx(-1.25)
    np.testing.assert_array_equal(gt.config, [1, 1])
    assert not gt.degenerate


def test_brute_force_single_spin():
    gt = brute_force_ground(IsingProblem([[0.0]], [-2.0]))
    assert gt.energy == -2.0
    np.testing.assert_array_equal(gt.config, [-1])


def test_brute_force_size_limit():
    p = IsingProblem(np.zeros((31, 31)), np.zeros(31))
    with pytest.raises(SizeLimitError):
        brute_force_ground(p)
    with pytest.raises(SizeLimitError):
        brute_force_naive(p)


def _itertools_ground(p):
    return min(ising_energy(p, s) for s in itertools.product([-1.0, 1.0], repeat=p.n))


@pytest.mark.parametrize("seed", range(10))
def test_gray_code_matches_naive_and_itertools(seed):
    n = 3 + seed % 8
    p = generate_sk(n, seed)
    gray, naive = brute_force_ground(p), brute_force_naive(p)
    assert gray.energy == pytest.approx(naive.energy, abs=1e-9)
    assert gray.energy == pytest.approx(_itertools_ground(p), abs=1e-9)
    np.testing.assert_array_equal(gray.config, naive.config)
    assert gray.degenerate == naive.degenerate
    assert gray.energy == ising_energy(p, gray.config)


def test_brute_force_dominance():
    p = generate_sk(16, 7)
    gt = brute_force_ground(p)
    S = 1.0 - 2.0 * np.random.default_rng(1).integers(0, 2, (10_000, 16))
    assert np.all(ising_energy(p, S) >= gt.energy)


@pytest.mark.parametrize("seed", range(5))
def test_zero_field_is_degenerate(seed):
    p = generate_sk(8, seed)
    gt = brute_force_ground(IsingProblem(p.J, np.zeros(8)))
    assert gt.degenerate


def test_config_index_roundtrip():
    for idx in range(32):
        assert config_index(config_from_index(idx, 5)) == idx
    np.testing.assert_array_equal(config_from_index(0, 3), [1, 1, 1])


def test_generate_sk_deterministic():
    a, b = generate_sk(16, 42), generate_sk(16, 42)
    assert a.J.tobytes() == b.J.tobytes() and a.h.tobytes() == b.h.tobytes()
    assert generate_sk(16, 43) != a


def test_generate_sk_structure():
    p = generate_sk(16, 5)
    assert np.all(np.diag(p.J) == 0)
    assert np.max(np.abs(p.J - p.J.T)) == 0


def test_generate_sk_moments():
    # 16 instances of n=110: 16 * (5995 + 110) = 97_680 couplings+fields, then more
    samples = []
    seed = 0
    while sum(map(len, samples)) < 100_000:
        p = generate_sk(110, seed)
        samples.append(np.concatenate([p.J[np.triu_indices(110, 1)], p.h]))
        seed += 1
    x = np.concatenate(samples)
    assert abs(x.mean()) <= 0.02
    assert abs(x.var() - 1.0) <= 0.05


def test_generate_sk_rejects_empty():
    with pytest.raises(InvalidArgumentError):
        generate_sk(0, 1)


def test_spin_readout():
    np.testing.assert_array_equal(spins_from_amplitudes([0.3, -0.01]), [1, -1])
    np.testing.assert_array_equal(spins_from_amplitudes([0.0]), [1])
    x = np.array([0.5, -2.0, 0.0, 1e-300])
    np.testing.assert_array_equal(spins_from_amplitudes(-x)[x != 0], -spins_from_amplitudes(x)[x != 0])


def test_spin_readout_rejects_nan():
    with pytest.raises(NumericFault):
        spins_from_amplitudes([0.1, np.nan])


def test_problem_file_roundtrip(tmp_path):
    p = generate_sk(9, 2**63 + 11)
    path = tmp_path / "p.json"
    save_problem(p, path)
    q = load_problem(path)
    assert q.J.tobytes() == p.J.tobytes() and q.h.tobytes() == p.h.tobytes()
    assert q.seed == p.seed


def test_problem_file_rejects_bad_sizes(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 2, "J": [0, 1, 1], "h": [0, 0]}')
    with pytest.raises(InvalidArgumentError):
        load_problem(path)
