from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InputError
from .hilbert import Operator, SpaceDescriptor, hermiticity_error


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    space: SpaceDescriptor | None = None

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if self.space is not None and v.size != self.space.dim:
            raise DimensionError(f"state of length {v.size} does not match space dimension {self.space.dim}")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: StateVector) -> complex:
        """<self|other>."""
        if self.dim != other.dim:
            raise InputError("inner product of states with different dimensions")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def expect(self, op: Operator) -> complex:
        return complex(np.vdot(self.amplitudes, op.matrix @ self.amplitudes))

    def to_density(self) -> DensityMatrix:
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()), self.space)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    space: SpaceDescriptor | None = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {m.shape}")
        if self.space is not None and m.shape[0] != self.space.dim:
            raise DimensionError("density matrix does not match space dimension")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_error(self) -> float:
        return hermiticity_error(self.matrix)

    def min_eigenvalue(self) -> float:
        h = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.linalg.eigvalsh(h)[0])

    def expect(self, op: Operator) -> complex:
        return complex(np.trace(op.matrix @ self.matrix))
