"""Ising problems with a Zeeman term: energies, exact ground states, SK instances.

The Hamiltonian is

    E(s) = -1/2 * sum_{r,r'} J[r, r'] s_r s_r' - sum_r h_r s_r

with a symmetric, zero-diagonal coupling matrix ``J`` and spins ``s_r`` in
{+1, -1}.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import InvalidArgumentError, NumericFault, SizeLimitError

MAX_BRUTE_FORCE_SPINS = 30
DEGENERACY_ATOL = 1e-9
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True, eq=False)
class IsingProblem:
    """Dense Ising instance ``(J, h)``.

    Arrays are copied to read-only float64 on construction. ``seed`` records
    the generator seed for instances produced by :func:`generate_sk` and is
    carried through the problem file format.
    """

    J: np.ndarray
    h: np.ndarray
    seed: int | None = field(default=None)

    def __post_init__(self):
        J = np.array(self.J, dtype=np.float64)
        h = np.array(self.h, dtype=np.float64).reshape(-1)
        n = h.shape[0]
        if n < 1:
            raise InvalidArgumentError("problem needs at least one spin")
        if J.shape != (n, n):
            raise InvalidArgumentError(f"J has shape {J.shape}, expected ({n}, {n})")
        if not (np.all(np.isfinite(J)) and np.all(np.isfinite(h))):
            raise InvalidArgumentError("J and h must be finite")
        if not np.array_equal(J, J.T):
            raise InvalidArgumentError("J must be symmetric")
        if np.any(np.diag(J) != 0.0):
            raise InvalidArgumentError("J must have a zero diagonal")
        J.flags.writeable = False
        h.flags.writeable = False
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "h", h)

    @property
    def n(self) -> int:
        return self.h.shape[0]

    def __eq__(self, other):
        if not isinstance(other, IsingProblem):
            return NotImplemented
        return np.array_equal(self.J, other.J) and np.array_equal(self.h, other.h)

    __hash__ = None

    def fingerprint(self) -> bytes:
        """Raw bytes of ``(J, h)``; equal fingerprints mean bit-identical problems."""
        return self.J.tobytes() + self.h.tobytes()


@dataclass(frozen=True)
class GroundTruth:
    """Exact minimum of the Hamiltonian.

    ``degenerate`` is set when at least two configurations reach the minimum
    within ``DEGENERACY_ATOL``; with ``h = 0`` this always holds because a
    global flip leaves the energy unchanged.
    """

    energy: float
    config: np.ndarray
    degenerate: bool


def _as_spins(problem: IsingProblem, s) -> np.ndarray:
    s = np.asarray(s, dtype=np.float64)
    if s.shape[-1:] != (problem.n,):
        raise InvalidArgumentError(
            f"spin vector has trailing length {s.shape[-1:]} but problem has n={problem.n}"
        )
    return s


def ising_energy(problem: IsingProblem, s) -> float | np.ndarray:
    """Energy of spin configuration(s) ``s`` of shape ``(..., n)``."""
    s = _as_spins(problem, s)
    pair = np.einsum("...i,ij,...j->...", s, problem.J, s)
    e = -0.5 * pair - s @ problem.h
    return float(e) if np.ndim(e) == 0 else e


def local_field(problem: IsingProblem, s, r: int) -> float:
    """Local field ``sum_{r' != r} J[r, r'] s_r' + h_r`` on spin ``r``."""
    s = _as_spins(problem, s)
    if s.ndim != 1:
        raise InvalidArgumentError("local_field takes a single configuration")
    if not 0 <= r < problem.n:
        raise InvalidArgumentError(f"spin index {r} out of range for n={problem.n}")
    # diagonal is zero, so the full row product already excludes r' = r
    return float(problem.J[r] @ s + problem.h[r])


def spins_from_amplitudes(x) -> np.ndarray:
    """Read spins from the sign of amplitudes ``x``; an exact zero reads as +1."""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise NumericFault("cannot read spins from non-finite amplitudes")
    return np.where(x < 0.0, -1.0, 1.0)


def config_from_index(index: int, n: int) -> np.ndarray:
    """Spins for a canonical index: bit ``r`` set means ``s_r = -1``."""
    bits = (int(index) >> np.arange(n)) & 1
    return 1.0 - 2.0 * bits


def config_index(s) -> int:
    """Inverse of :func:`config_from_index`."""
    s = np.asarray(s)
    return int(sum(1 << r for r in range(s.shape[0]) if s[r] < 0))


@numba.njit(cache=True)
def _gray_code_search(J, h, atol):
    n = h.shape[0]
    s = -np.ones(n)
    fields = J @ s + h
    energy = -0.5 * (s @ (J @ s)) - h @ s
    # canonical index of the current configuration; all -1 sets every bit
    idx = (1 << n) - 1
    best = energy
    best_idx = idx
    count = 1
    for k in range(1, 1 << n):
        b = 0
        while not (k >> b) & 1:
            b += 1
        energy += 2.0 * s[b] * fields[b]
        s[b] = -s[b]
        for r in range(n):
            fields[r] += 2.0 * s[b] * J[r, b]
        idx ^= 1 << b
        if energy < best - atol:
            best = energy
            best_idx = idx
            count = 1
        elif energy <= best + atol:
            count += 1
            if idx < best_idx:
                best_idx = idx
            if energy < best:
                best = energy
    return best_idx, count


def brute_force_ground(problem: IsingProblem) -> GroundTruth:
    """Exact ground state by Gray-code enumeration of all ``2**n`` configurations.

    Each step flips one spin and updates the energy and local fields in
    O(n). Ties within ``DEGENERACY_ATOL`` resolve to the configuration with
    the lowest canonical index (see :func:`config_from_index`), so the result
    does not depend on the enumeration order.
    """
    if problem.n > MAX_BRUTE_FORCE_SPINS:
        raise SizeLimitError(
            f"brute force limited to n <= {MAX_BRUTE_FORCE_SPINS}, got n={problem.n}"
        )
    J = np.ascontiguousarray(problem.J)
    h = np.ascontiguousarray(problem.h)
    best_idx, count = _gray_code_search(J, h, DEGENERACY_ATOL)
    config = config_from_index(best_idx, problem.n)
    return GroundTruth(ising_energy(problem, config), config, count >= 2)


def brute_force_naive(problem: IsingProblem, chunk_bits: int = 14) -> GroundTruth:
    """Reference enumeration that re-evaluates the full energy of every configuration.

    Slower than :func:`brute_force_ground` and kept as its independent check.
    """
    n = problem.n
    if n > MAX_BRUTE_FORCE_SPINS:
        raise SizeLimitError(
            f"brute force limited to n <= {MAX_BRUTE_FORCE_SPINS}, got n={n}"
        )
    total = 1 << n
    chunk = 1 << min(chunk_bits, n)
    shifts = np.arange(n, dtype=np.int64)
    best = np.inf
    energies = []
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        spins = 1.0 - 2.0 * ((idx[:, None] >> shifts) & 1)
        e = ising_energy(problem, spins)
        energies.append((idx, e))
        best = min(best, float(e.min()))
    ties = np.concatenate([idx[np.abs(e - best) <= DEGENERACY_ATOL] for idx, e in energies])
    config = config_from_index(int(ties.min()), n)
    return GroundTruth(ising_energy(problem, config), config, ties.size >= 2)


def generate_sk(n: int, seed: int) -> IsingProblem:
    """Sherrington-Kirkpatrick instance with a random field.

    Couplings ``J[r, r']`` for ``r < r'`` and fields ``h_r`` are i.i.d.
    standard normal; ``J`` is mirrored and its diagonal left at zero. The
    instance is a pure function of ``(n, seed)``.
    """
    if n < 1:
        raise InvalidArgumentError(f"n must be positive, got {n}")
    seed = int(seed) & _SEED_MASK
    rng = np.random.default_rng(seed)
    J = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    J[iu] = rng.standard_normal(iu[0].size)
    J = J + J.T
    h = rng.standard_normal(n)
    return IsingProblem(J, h, seed=seed)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def save_problem(problem: IsingProblem, path) -> None:
    """Write ``problem`` as JSON with fields ``n``, ``J`` (row-major), ``h``, ``seed``.

    Reals are written with 17 significant digits so that loading restores
    the exact same floats.
    """
    parts = [
        f'  "n": {problem.n}',
        '  "J": [' + ", ".join(_fmt(v) for v in problem.J.ravel()) + "]",
        '  "h": [' + ", ".join(_fmt(v) for v in problem.h) + "]",
    ]
    if problem.seed is not None:
        parts.append(f'  "seed": {problem.seed}')
    with open(os.fspath(path), "w") as f:
        f.write("{\n" + ",\n".join(parts) + "\n}\n")


def load_problem(path) -> IsingProblem:
    """Read a problem written by :func:`save_problem`."""
    with open(os.fspath(path)) as f:
        data = json.load(f)
    try:
        n = int(data["n"])
        J = np.array(data["J"], dtype=np.float64)
        h = np.array(data["h"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"malformed problem file {path}: {exc}") from exc
    if J.size != n * n or h.size != n:
        raise InvalidArgumentError(f"problem file {path}: sizes do not match n={n}")
    return IsingProblem(J.reshape(n, n), h, seed=data.get("seed"))
