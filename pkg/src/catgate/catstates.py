"""Cat-state logical encoding of a resonator mode and the two-qubit input/ideal states.

Logical |0> is the even cat M+(|α> + |-α>), logical |1> the odd cat M-(|α> - |-α>).
Both are written in the Fock basis with closed-form coefficients

    C_k = 2 M± exp(-|α|²/2) α^k / sqrt(k!)

restricted to even (|0>) or odd (|1>) k. Vectors are returned unrenormalised: the
missing weight is exactly the truncation tail, which :func:`tail_population` audits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEncodingError, InputError, TruncationError
from .hilbert import SpaceDescriptor
from .states import StateVector

DEFAULT_TAIL_EPS = 1e-9
DEGENERATE_ALPHA = 1e-6
_TAIL_TERMS = 400


@dataclass(frozen=True)
class CatEncoding:
    alpha: complex = 0.5
    n_trunc: int = 10
    eps: float = DEFAULT_TAIL_EPS

    def __post_init__(self):
        if self.n_trunc < 2:
            raise InputError(f"n_trunc must be >= 2, got {self.n_trunc}")
        object.__setattr__(self, "alpha", complex(self.alpha))

    @property
    def norm_plus(self) -> float:
        x = abs(self.alpha) ** 2
        return 1.0 / math.sqrt(2.0 * (1.0 + math.exp(-2.0 * x)))

    @property
    def norm_minus(self) -> float:
        x = abs(self.alpha) ** 2
        if x == 0.0:
            return math.inf
        return 1.0 / math.sqrt(-2.0 * math.expm1(-2.0 * x))


@dataclass(frozen=True)
class InitialStateSpec:
    theta: float
    phi: float

    @property
    def amplitudes(self) -> np.ndarray:
        """Amplitudes of |00>, |01>, |10>, |11> (first bit: resonator a)."""
        ct, st = math.cos(self.theta), math.sin(self.theta)
        cp, sp = math.cos(self.phi), math.sin(self.phi)
        return np.array([ct * cp, ct * sp, st * cp, st * sp])

    @property
    def label(self) -> str:
        return f"th={self.theta:.6g},ph={self.phi:.6g}"


# The four input states evaluated in the fidelity-versus-lifetime study.
PAPER_STATES: dict[str, InitialStateSpec] = {
    "pi4-pi4": InitialStateSpec(math.pi / 4, math.pi / 4),
    "pi3-pi3": InitialStateSpec(math.pi / 3, math.pi / 3),
    "pi4-pi3": InitialStateSpec(math.pi / 4, math.pi / 3),
    "pi3-pi4": InitialStateSpec(math.pi / 3, math.pi / 4),
}


def _powers_over_sqrt_factorial(alpha: complex, n: int) -> np.ndarray:
    """alpha**k / sqrt(k!) for k < n, built by recurrence to avoid overflow."""
    out = np.empty(n, dtype=np.complex128)
    out[0] = 1.0
    for k in range(1, n):
        out[k] = out[k - 1] * alpha / math.sqrt(k)
    return out


def cat_coefficients(alpha: complex, n: int, parity: int) -> np.ndarray:
    """Closed-form C_k for k < n (zeros on the other parity)."""
    enc = CatEncoding(alpha, max(n, 2))
    norm = enc.norm_plus if parity == 0 else enc.norm_minus
    c = 2.0 * norm * math.exp(-abs(alpha) ** 2 / 2.0) * _powers_over_sqrt_factorial(complex(alpha), n)
    c[(np.arange(n) % 2) != parity] = 0.0
    return c


def _parity_tail(alpha: complex, n_trunc: int, parity: int) -> float:
    # |C_k|^2 = x^k/k! / cosh(x) (even) or / sinh(x) (odd), x = |alpha|^2.
    # Scaled by x^parity so the alpha -> 0 limit is exact.
    x = abs(alpha) ** 2
    total = tail = 0.0
    term = 1.0  # x^(k - parity) * parity! / k! at k = parity
    for k in range(parity, n_trunc + _TAIL_TERMS, 2):
        if k > parity:
            term *= x * x / ((k - 1) * k)
        total += term
        if k >= n_trunc:
            tail += term
        if k >= n_trunc and term <= 1e-30 * max(tail, 1e-300):
            break
        if term == 0.0 and k > parity:
            break
    return tail / total


def tail_population(enc: CatEncoding) -> float:
    """Largest weight either logical state places on Fock indices >= n_trunc."""
    return max(_parity_tail(enc.alpha, enc.n_trunc, 0), _parity_tail(enc.alpha, enc.n_trunc, 1))


def required_n_trunc(alpha: complex, eps: float = DEFAULT_TAIL_EPS) -> int:
    n = 2
    while tail_population(CatEncoding(alpha, n, eps)) >= eps:
        n += 1
    return n


def _check_tail(enc: CatEncoding) -> None:
    tail = tail_population(enc)
    if tail >= enc.eps:
        need = required_n_trunc(enc.alpha, enc.eps)
        raise TruncationError(
            f"cat amplitude {enc.alpha} leaves tail population {tail:.3e} >= {enc.eps:.1e} "
            f"at n_trunc={enc.n_trunc}; need n_trunc >= {need}",
            required_n_trunc=need,
        )


def logical_zero(enc: CatEncoding) -> StateVector:
    _check_tail(enc)
    return StateVector(cat_coefficients(enc.alpha, enc.n_trunc, 0))


def logical_one(enc: CatEncoding) -> StateVector:
    if abs(enc.alpha) < DEGENERATE_ALPHA:
        raise DegenerateEncodingError(
            f"|alpha| = {abs(enc.alpha):.3e} < {DEGENERATE_ALPHA:g}: the odd cat state vanishes"
        )
    _check_tail(enc)
    return StateVector(cat_coefficients(enc.alpha, enc.n_trunc, 1))


def _padded(v: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=np.complex128)
    out[: v.size] = v
    return out


def _mode_states(enc: CatEncoding, space: SpaceDescriptor) -> tuple[dict, dict]:
    if space.n_a < enc.n_trunc or space.n_b < enc.n_trunc:
        raise InputError(
            f"space truncation ({space.n_a}, {space.n_b}) is smaller than the encoding's n_trunc={enc.n_trunc}"
        )
    zero, one = logical_zero(enc).amplitudes, logical_one(enc).amplitudes
    cat_a = {0: _padded(zero, space.n_a), 1: _padded(one, space.n_a)}
    cat_b = {0: _padded(zero, space.n_b), 1: _padded(one, space.n_b)}
    return cat_a, cat_b


_GROUND = np.array([1.0, 0.0, 0.0])


def two_qubit_logical(state_bits: str, enc: CatEncoding, space: SpaceDescriptor) -> StateVector:
    """|bits>_ab ⊗ |g>, stored in qutrit ⊗ a ⊗ b order."""
    if state_bits not in ("00", "01", "10", "11"):
        raise InputError(f"state_bits must be one of 00, 01, 10, 11; got {state_bits!r}")
    cat_a, cat_b = _mode_states(enc, space)
    v = np.kron(_GROUND, np.kron(cat_a[int(state_bits[0])], cat_b[int(state_bits[1])]))
    return StateVector(v, space)


def _superposition(amps: np.ndarray, enc: CatEncoding, space: SpaceDescriptor) -> StateVector:
    cat_a, cat_b = _mode_states(enc, space)
    modes = np.zeros(space.n_a * space.n_b, dtype=np.complex128)
    for k, bits in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        modes += amps[k] * np.kron(cat_a[bits[0]], cat_b[bits[1]])
    return StateVector(np.kron(_GROUND, modes), space)


def input_superposition(spec: InitialStateSpec, enc: CatEncoding, space: SpaceDescriptor) -> StateVector:
    return _superposition(spec.amplitudes, enc, space)


def ideal_output(spec: InitialStateSpec, enc: CatEncoding, space: SpaceDescriptor) -> StateVector:
    """Input superposition with the |11> amplitude sign-flipped (ideal controlled-phase)."""
    amps = spec.amplitudes.copy()
    amps[3] = -amps[3]
    return _superposition(amps, enc, space)


def parity_expectation(state: StateVector) -> float:
    n = np.arange(state.dim)
    return float(np.sum((-1.0) ** n * np.abs(state.amplitudes) ** 2).real)
