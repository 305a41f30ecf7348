"""Tensor-product Hilbert space of a transmon qutrit and two truncated resonator modes.

Ordering convention, fixed everywhere in the package::

    qutrit (g, e, f) ⊗ resonator a (Fock 0..n_a-1) ⊗ resonator b (Fock 0..n_b-1)

so the flat index of ``|q, n_a, n_b>`` is ``(q * n_a + n_a_idx) * n_b + n_b_idx``.
Operators are stored densely; at the truncations used here the total dimension stays
at a few hundred.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DimensionError, InputError

QUTRIT_DIM = 3
LEVELS = {"g": 0, "e": 1, "f": 2}
SLOTS = ("qutrit", "a", "b")


@dataclass(frozen=True)
class SpaceDescriptor:
    n_a: int
    n_b: int
    qutrit_dim: int = field(default=QUTRIT_DIM, init=False)

    def __post_init__(self):
        if int(self.n_a) != self.n_a or int(self.n_b) != self.n_b:
            raise DimensionError(f"Fock truncations must be integers, got {self.n_a}, {self.n_b}")
        if self.n_a < 2 or self.n_b < 2:
            raise DimensionError(f"Fock truncations must be >= 2, got n_a={self.n_a}, n_b={self.n_b}")

    @property
    def dim(self) -> int:
        return QUTRIT_DIM * self.n_a * self.n_b

    @property
    def shape(self) -> tuple[int, int, int]:
        return (QUTRIT_DIM, self.n_a, self.n_b)

    def slot_dim(self, slot: str) -> int:
        try:
            return self.shape[SLOTS.index(slot)]
        except ValueError:
            raise InputError(f"unknown slot {slot!r}; expected one of {SLOTS}") from None

    def index(self, level: str | int, n_a: int, n_b: int) -> int:
        q = LEVELS[level] if isinstance(level, str) else int(level)
        if not (0 <= q < QUTRIT_DIM and 0 <= n_a < self.n_a and 0 <= n_b < self.n_b):
            raise InputError(f"basis label ({level}, {n_a}, {n_b}) outside {self}")
        return (q * self.n_a + n_a) * self.n_b + n_b

    def labels(self) -> np.ndarray:
        """(dim, 3) integer array of (qutrit level, n_a, n_b) per flat index."""
        q, a, b = np.meshgrid(
            np.arange(QUTRIT_DIM), np.arange(self.n_a), np.arange(self.n_b), indexing="ij"
        )
        return np.stack([q.ravel(), a.ravel(), b.ravel()], axis=1)


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense complex matrix, optionally tied to a SpaceDescriptor.

    Single-subsystem operators (ladder operators, qutrit transitions) carry
    ``space=None``; :func:`embed` lifts them onto the full space.
    """

    matrix: np.ndarray
    space: SpaceDescriptor | None = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"operator matrix must be square, got shape {m.shape}")
        if self.space is not None and m.shape[0] != self.space.dim:
            raise DimensionError(
                f"operator dimension {m.shape[0]} does not match space dimension {self.space.dim}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def adjoint(self) -> Operator:
        return Operator(self.matrix.conj().T, self.space)

    @property
    def dag(self) -> Operator:
        return self.adjoint()

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return hermiticity_error(self) < tol

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def _check(self, other: Operator) -> None:
        if self.space != other.space or self.dim != other.dim:
            raise InputError("operators live on different spaces")

    def __add__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.matrix + other.matrix, self.space)

    def __sub__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.matrix - other.matrix, self.space)

    def __neg__(self) -> Operator:
        return Operator(-self.matrix, self.space)

    def __mul__(self, c: complex) -> Operator:
        return Operator(c * self.matrix, self.space)

    __rmul__ = __mul__

    def __matmul__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.matrix @ other.matrix, self.space)

    def __repr__(self) -> str:
        return f"Operator(dim={self.dim}, space={self.space})"


def annihilation(n: int) -> Operator:
    if n < 2:
        raise DimensionError(f"ladder operators need truncation n >= 2, got {n}")
    return Operator(np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1))


def creation(n: int) -> Operator:
    return annihilation(n).adjoint()


def number(n: int) -> Operator:
    if n < 2:
        raise DimensionError(f"ladder operators need truncation n >= 2, got {n}")
    return Operator(np.diag(np.arange(n, dtype=float)))


def identity(n: int, space: SpaceDescriptor | None = None) -> Operator:
    return Operator(np.eye(n), space)


def qutrit_transition(from_level: str, to_level: str) -> Operator:
    """``|to><from|`` on the qutrit; a projector when the two levels coincide."""
    try:
        i, j = LEVELS[to_level], LEVELS[from_level]
    except (KeyError, TypeError):
        raise InputError(
            f"qutrit levels must be in {tuple(LEVELS)}, got {from_level!r} -> {to_level!r}"
        ) from None
    m = np.zeros((QUTRIT_DIM, QUTRIT_DIM))
    m[i, j] = 1.0
    return Operator(m)


def embed(op: Operator, slot: str, space: SpaceDescriptor) -> Operator:
    """Lift a single-subsystem operator onto the full space (identities elsewhere)."""
    dims = space.shape
    k = SLOTS.index(slot) if slot in SLOTS else None
    if k is None:
        raise InputError(f"unknown slot {slot!r}; expected one of {SLOTS}")
    if op.dim != dims[k]:
        raise InputError(f"operator of dimension {op.dim} cannot act on slot {slot!r} of size {dims[k]}")
    factors = [np.eye(d) for d in dims]
    factors[k] = op.matrix
    m = np.kron(np.kron(factors[0], factors[1]), factors[2])
    return Operator(m, space)


def compose(terms: Iterable[tuple[complex, Operator]]) -> Operator:
    terms = list(terms)
    if not terms:
        raise InputError("compose needs at least one term")
    space, dim = terms[0][1].space, terms[0][1].dim
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for c, op in terms:
        if op.space != space or op.dim != dim:
            raise InputError("compose: operators live on different spaces")
        acc += c * op.matrix
    return Operator(acc, space)


def adjoint(op: Operator) -> Operator:
    return op.adjoint()


def commutator(x: Operator, y: Operator) -> Operator:
    return x @ y - y @ x


def hermiticity_error(op: Operator | np.ndarray) -> float:
    m = op.matrix if isinstance(op, Operator) else op
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)))


class Ops:
    """Frequently used embedded operators on one space, built once.

    Attribute names follow the physics notation: ``a``, ``b``, ``n_a``, ``n_b``,
    ``s_eg_plus`` = |e><g|, ``s_fe_plus`` = |f><e|, ``s_fg_minus`` = |g><f|,
    ``p_g``/``p_e``/``p_f`` projectors.
    """

    def __init__(self, space: SpaceDescriptor):
        self.space = space
        self.identity = identity(space.dim, space)
        self.a = embed(annihilation(space.n_a), "a", space)
        self.b = embed(annihilation(space.n_b), "b", space)
        self.n_a = embed(number(space.n_a), "a", space)
        self.n_b = embed(number(space.n_b), "b", space)

        def q(frm, to):
            return embed(qutrit_transition(frm, to), "qutrit", space)

        self.s_eg_plus = q("g", "e")
        self.s_fe_plus = q("e", "f")
        self.s_eg_minus = q("e", "g")
        self.s_fe_minus = q("f", "e")
        self.s_fg_minus = q("f", "g")
        self.p_g = q("g", "g")
        self.p_e = q("e", "e")
        self.p_f = q("f", "f")
