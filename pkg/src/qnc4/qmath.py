"""Qubit-state math for the tetra-state protocols.

The four tetra states sit at the corners of a regular tetrahedron on the
Bloch sphere, one per letter.  Halving them gives a four-outcome POVM (the
tetra measurement); measuring and re-preparing the reported state shrinks
any input toward the maximally mixed state by a factor of 3.

Shrink bookkeeping is exact: a `ShrunkState` pairs a letter with a rational
shrink factor, and converts losslessly to and from a rational mixture over
the four tetra states.  Matrices are complex floats and appear only where
sqrt(3) does.
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .netgraph import LETTERS, Letter

MATRIX_TOL = 1e-12
RANK_TOL = 1e-9

pauli_x = np.array([[0, 1], [1, 0]], dtype=complex)
pauli_y = np.array([[0, -1j], [1j, 0]], dtype=complex)
pauli_z = np.array([[1, 0], [0, -1]], dtype=complex)
identity2 = np.eye(2, dtype=complex)

# cos^2 of the cone half-angle that puts the states at (+-1, +-1, +-1)/sqrt(3)
_COS2 = 0.5 + math.sqrt(3.0) / 6.0
_COS = math.sqrt(_COS2)
_SIN = math.sqrt(1.0 - _COS2)


def _phase(k: int) -> complex:
    return cmath.exp(1j * math.pi * k / 4)


_VECTORS = (
    np.array([_COS, _phase(1) * _SIN]),
    np.array([_COS, _phase(-3) * _SIN]),
    np.array([_SIN, _phase(-1) * _COS]),
    np.array([_SIN, _phase(3) * _COS]),
)


def _proj(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


_MATRICES = tuple(_proj(v) for v in _VECTORS)
for _m in _MATRICES:
    _m.flags.writeable = False


@dataclass(frozen=True, eq=False)
class TetraState:
    label: Letter
    vector: np.ndarray
    matrix: np.ndarray


_STATES = tuple(TetraState(z, _VECTORS[z], _MATRICES[z]) for z in LETTERS)


def tetra(label: Letter) -> TetraState:
    return _STATES[label]


def tetra_matrix(label: Letter) -> np.ndarray:
    return _MATRICES[label]


def tetra_vector(label: Letter) -> np.ndarray:
    return _VECTORS[label]


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    return np.array(
        [
            np.trace(rho @ pauli_x).real,
            np.trace(rho @ pauli_y).real,
            np.trace(rho @ pauli_z).real,
        ]
    )


def state_from_bloch(theta: float, phi: float) -> np.ndarray:
    """Pure state at polar angle theta, azimuth phi."""
    return np.array([math.cos(theta / 2), cmath.exp(1j * phi) * math.sin(theta / 2)])


def random_pure_state(rng) -> np.ndarray:
    z = rng.uniform(-1.0, 1.0)
    phi = rng.uniform(0.0, 2 * math.pi)
    return state_from_bloch(math.acos(z), phi)


def is_density_matrix(rho: np.ndarray, tol: float = MATRIX_TOL) -> bool:
    if rho.shape != (2, 2):
        return False
    if not np.allclose(rho, rho.conj().T, atol=tol):
        return False
    if abs(np.trace(rho) - 1) > tol:
        return False
    return bool(np.linalg.eigvalsh(rho).min() > -tol)


def fidelity(psi: np.ndarray, rho: np.ndarray) -> float:
    """Overlap of a unit vector with a density matrix: <psi| rho |psi>."""
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"state vector is not normalized (norm {norm})")
    value = np.vdot(psi, rho @ psi)
    return float(value.real)


@dataclass(frozen=True)
class ShrunkState:
    """A tetra state shrunk toward the maximally mixed state:
    alpha * chi(label) + (1 - alpha) * I/2, with rational alpha in (0, 1]."""

    label: Letter
    alpha: Fraction

    def __post_init__(self):
        if self.label not in LETTERS:
            raise ValueError(f"not a letter: {self.label}")
        a = self.alpha
        if not isinstance(a, Fraction) or not 0 < a <= 1:
            raise ValueError(f"shrink factor must be a rational in (0, 1], got {a!r}")


def densify(state: ShrunkState) -> np.ndarray:
    a = float(state.alpha)
    return a * tetra_matrix(state.label) + (1 - a) * identity2 / 2


def tetra_weights(state: ShrunkState) -> dict[Letter, Fraction]:
    """The unique rational mixture over the four tetra states equal to the
    shrunk state (I/2 is the average of the four)."""
    off = (1 - state.alpha) / 4
    return {z: state.alpha + off if z == state.label else off for z in LETTERS}


def mixture_matrix(weights) -> np.ndarray:
    rho = np.zeros((2, 2), dtype=complex)
    for z, w in weights.items():
        rho += float(w) * tetra_matrix(z)
    return rho


def shrunk_from_weights(weights) -> ShrunkState | None:
    """Recover a ShrunkState from exact tetra-mixture weights, or None when
    the weights are not of that one-peak, three-equal form."""
    w = {z: Fraction(weights.get(z, 0)) for z in LETTERS}
    if sum(w.values()) != 1:
        return None
    top = max(w, key=lambda z: w[z])
    rest = [w[z] for z in LETTERS if z != top]
    if rest[0] != rest[1] or rest[0] != rest[2]:
        return None
    alpha = w[top] - rest[0]
    if not 0 < alpha <= 1:
        return None
    return ShrunkState(top, alpha)


def ttr_outcome_weights(z: Letter) -> dict[Letter, Fraction]:
    """Tetra-measurement outcome law on a pure tetra state: the state's own
    letter with probability 1/2, each other letter with 1/6."""
    return {x: Fraction(1, 2) if x == z else Fraction(1, 6) for x in LETTERS}


def ttr_probabilities(rho):
    """Outcome probabilities of the tetra measurement, indexed by letter.

    Accepts a density matrix (float probabilities Tr(rho chi/2)) or a
    ShrunkState (exact rationals).
    """
    if isinstance(rho, ShrunkState):
        a = rho.alpha
        return tuple(
            Fraction(1, 4) + a / 4 if z == rho.label else Fraction(1, 4) - a / 12
            for z in LETTERS
        )
    return tuple(float(np.trace(rho @ tetra_matrix(z)).real / 2) for z in LETTERS)


def ttr_channel(rho: np.ndarray) -> np.ndarray:
    """Measure-and-prepare through the tetra measurement.  Acts as
    rho -> rho/3 + (2/3) I/2 on every input."""
    probs = ttr_probabilities(rho)
    out = np.zeros((2, 2), dtype=complex)
    for z in LETTERS:
        out += probs[z] * tetra_matrix(z)
    return out


def tetra_povm() -> list[np.ndarray]:
    return [tetra_matrix(z) / 2 for z in LETTERS]


def check_povm(elements, tol: float = MATRIX_TOL) -> bool:
    total = sum(elements)
    if not np.allclose(total, identity2, atol=tol):
        return False
    return all(np.linalg.eigvalsh(e).min() > -tol for e in elements)


def linear_independence_rank(states) -> int:
    """Rank of a family of 2x2 matrices viewed as vectors in matrix space.

    Singular values below 1e-9 count as zero.  A set of states admits an
    entanglement-free cloner (with per-output shrink factors that need not
    match) only if the states are linearly independent here, which caps
    usable families at 4 states.
    """
    states = list(states)
    if not 1 <= len(states) <= 4:
        raise ValueError(f"expected between 1 and 4 states, got {len(states)}")
    stacked = np.array([np.asarray(s, dtype=complex).flatten() for s in states])
    singular = np.linalg.svd(stacked, compute_uv=False)
    return int((singular > RANK_TOL).sum())
