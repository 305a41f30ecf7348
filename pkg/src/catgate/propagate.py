"""Propagators: RK4 Schrödinger and Lindblad integration, plus exact phases for the
diagonal effective Hamiltonians.

Both integrators use a fixed step ``min(max_step, 2π / (f * samples_per_period))`` with
``f`` the larger of the fastest rotating-term detuning and a bound on ||H||, so both the
fastest rotation and the fastest eigenphase are sampled ``samples_per_period`` times per period.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import InputError, IntegratorAccuracyError, SubspaceError
from .hamiltonian import TimeDependentHamiltonian
from .hilbert import Operator, Ops, SpaceDescriptor
from .model import DerivedParams, NoiseParams
from .states import DensityMatrix, StateVector

NORM_DRIFT_LIMIT = 1e-6
TRACE_DRIFT_LIMIT = 1e-6
HERMITICITY_LIMIT = 1e-8


@dataclass(frozen=True)
class IntegratorConfig:
    samples_per_period: int = 64
    max_step: float = 1e-3
    # None disables the step-halving audit; otherwise the tolerated change in fidelity
    convergence_tol: float | None = None

    def __post_init__(self):
        if self.samples_per_period < 8:
            raise InputError(f"samples_per_period must be >= 8, got {self.samples_per_period}")
        if not self.max_step > 0:
            raise InputError("max_step must be positive")

    def step_count(self, h: TimeDependentHamiltonian, duration: float) -> int:
        step = self.max_step
        f = max(h.max_frequency, h.norm_bound)
        if f > 0:
            step = min(step, 2.0 * math.pi / (f * self.samples_per_period))
        return max(1, math.ceil(duration / step - 1e-9))

    def halved(self) -> IntegratorConfig:
        return IntegratorConfig(2 * self.samples_per_period, self.max_step / 2, None)


@dataclass(frozen=True)
class CollapseSet:
    """Collapse channels as (rate, operator); the dissipator is rate * L[op]."""

    channels: tuple[tuple[float, Operator], ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        for rate, _ in self.channels:
            if not rate >= 0:
                raise InputError(f"collapse rates must be >= 0, got {rate}")

    @classmethod
    def from_noise(cls, noise: NoiseParams, space: SpaceDescriptor) -> CollapseSet:
        o = Ops(space)
        return cls(
            (
                (noise.kappa_a, o.a),
                (noise.kappa_b, o.b),
                (noise.gamma_eg, o.s_eg_minus),
                (noise.gamma_fe, o.s_fe_minus),
                (noise.gamma_fg, o.s_fg_minus),
                (noise.gamma_phi_e, o.p_e),
                (noise.gamma_phi_f, o.p_f),
            )
        )

    def active(self) -> list[tuple[float, Operator]]:
        return [(r, op) for r, op in self.channels if r > 0]

    def anti_hermitian_part(self, dim: int) -> np.ndarray:
        """-i/2 Σ rate L⁺L, folded into the effective non-Hermitian Hamiltonian."""
        acc = np.zeros((dim, dim), dtype=np.complex128)
        for rate, op in self.active():
            acc += rate * (op.matrix.conj().T @ op.matrix)
        return -0.5j * acc

    def restricted(self, keep: np.ndarray) -> CollapseSet:
        sub = np.ix_(keep, keep)
        return CollapseSet(tuple((r, Operator(op.matrix[sub])) for r, op in self.channels))

    def layers(self, dim: int | None = None):
        """Split each scaled collapse operator sqrt(rate) L into constant-offset layers.

        Returns coordinate arrays, layer and jump pointers, the per-layer offsets and
        row spans, and the conjugated layer values scattered into dense length-dim rows.
        """
        rows, cols, vals, layer_ptr, jump_ptr, offs, spans, dense = [], [], [], [0], [0], [], [], []
        if dim is None:
            dim = self.channels[0][1].dim if self.channels else 0
        for rate, op in self.active():
            m = math.sqrt(rate) * op.matrix
            r, c = np.nonzero(m)
            offsets = c - r
            for off in np.unique(offsets):
                sel = offsets == off
                rows.append(r[sel])
                cols.append(c[sel])
                vals.append(m[r[sel], c[sel]])
                layer_ptr.append(layer_ptr[-1] + int(sel.sum()))
                offs.append(int(off))
                spans.append((int(r[sel].min()), int(r[sel].max()) + 1))
                w = np.zeros(dim, dtype=np.complex128)
                w[r[sel]] = m[r[sel], c[sel]].conj()
                dense.append(w)
            jump_ptr.append(len(layer_ptr) - 1)

        def cat(xs, dtype):
            return np.concatenate(xs).astype(dtype) if xs else np.zeros(0, dtype=dtype)

        return (
            cat(rows, np.int64),
            cat(cols, np.int64),
            cat(vals, np.complex128),
            np.array(layer_ptr, dtype=np.int64),
            np.array(jump_ptr, dtype=np.int64),
            np.array(offs, dtype=np.int64),
            np.array(spans, dtype=np.int64).reshape(len(spans), 2),
            np.array(dense, dtype=np.complex128).reshape(len(dense), dim),
        )


def schrodinger(
    h: TimeDependentHamiltonian,
    psi0: StateVector,
    duration: float,
    cfg: IntegratorConfig = IntegratorConfig(),
    t0: float = 0.0,
) -> StateVector:
    if psi0.dim != h.space.dim:
        raise InputError("initial state does not match the Hamiltonian's space")
    if not duration > 0:
        raise InputError(f"duration must be positive, got {duration}")
    n0 = psi0.norm()
    if abs(n0 - 1.0) > NORM_DRIFT_LIMIT:
        raise InputError(f"initial state is not normalized (norm {n0:.12g})")
    nsteps = cfg.step_count(h, duration)
    rows, cols, base, fidx, freqs = h.coordinate_form()
    psi = _kernels.rk4_schrodinger(
        np.array(psi0.amplitudes), float(t0), duration / nsteps, nsteps, rows, cols, base, fidx, freqs
    )
    drift = abs(np.linalg.norm(psi) - n0)
    if drift > NORM_DRIFT_LIMIT:
        raise IntegratorAccuracyError(
            f"norm drift {drift:.3e} exceeds {NORM_DRIFT_LIMIT:g}; increase samples_per_period or lower max_step"
        )
    return StateVector(psi, psi0.space)


@dataclass
class TrajectoryRecorder:
    """Samples (t, Tr ρ, <n_a>, <n_b>, qutrit populations) every ``stride`` integrator steps."""

    stride: int = 100
    rows: list[tuple[float, ...]] = field(default_factory=list)

    COLUMNS = ("t_us", "trace", "n_a", "n_b", "pop_g", "pop_e", "pop_f")

    def record(self, t: float, rho: np.ndarray, space: SpaceDescriptor) -> None:
        diag = np.real(np.diag(rho)).reshape(space.shape)
        n_a = np.arange(space.n_a)[None, :, None]
        n_b = np.arange(space.n_b)[None, None, :]
        pops = diag.sum(axis=(1, 2))
        self.rows.append(
            (
                t,
                float(diag.sum()),
                float((diag * n_a).sum()),
                float((diag * n_b).sum()),
                *map(float, pops),
            )
        )

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(self.COLUMNS)
            for row in self.rows:
                w.writerow([repr(x) for x in row])


def lindblad(
    h: TimeDependentHamiltonian,
    rho0: DensityMatrix,
    collapse: CollapseSet,
    duration: float,
    cfg: IntegratorConfig = IntegratorConfig(),
    t0: float = 0.0,
    recorder: TrajectoryRecorder | None = None,
    time_offset: float = 0.0,
) -> DensityMatrix:
    """Integrate dρ/dt = -i[H, ρ] + Σ rate L[op] with fixed-step RK4.

    ``t0`` is the Hamiltonian clock at the start; ``time_offset`` only shifts the
    timestamps written to ``recorder``.
    """
    if rho0.dim != h.space.dim:
        raise InputError("initial density matrix does not match the Hamiltonian's space")
    if not duration > 0:
        raise InputError(f"duration must be positive, got {duration}")
    nsteps = cfg.step_count(h, duration)
    step = duration / nsteps
    d = h.space.dim
    heff = np.array(h.static_part.matrix) + collapse.anti_hermitian_part(d)
    hermitian = [heff] + [t.op.matrix for t in h.rotating_terms if t.amplitude != 0.0]
    keep = closed_support(rho0.matrix, hermitian, [op.matrix for _, op in collapse.active()])
    sub = np.ix_(keep, keep)
    rows, cols, base, fidx, freqs = _restrict(h, collapse, keep)
    jumps = collapse.restricted(keep).layers(keep.size)
    tr0 = rho0.trace().real
    rho = np.array(rho0.matrix[sub])

    def full(r):
        out = np.zeros((d, d), dtype=np.complex128)
        out[sub] = r
        return out

    chunks = [nsteps] if recorder is None else _chunks(nsteps, recorder.stride)
    if recorder is not None:
        recorder.record(time_offset, full(rho), h.space)
    done = 0
    for n in chunks:
        rho = _kernels.rk4_lindblad(
            rho, t0 + done * step, step, n, rows, cols, base, fidx, freqs,
            *jumps,
        )
        done += n
        if recorder is not None:
            recorder.record(time_offset + done * step, full(rho), h.space)
    rho = full(rho)

    drift = abs(np.trace(rho).real - tr0)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if drift > TRACE_DRIFT_LIMIT or herm > HERMITICITY_LIMIT:
        raise IntegratorAccuracyError(
            f"Lindblad integration lost accuracy (trace drift {drift:.3e}, hermiticity {herm:.3e}); "
            "increase samples_per_period or lower max_step"
        )
    return DensityMatrix(rho, rho0.space)


def closed_support(
    rho0: np.ndarray, hamiltonian_parts: Sequence[np.ndarray], jumps: Sequence[np.ndarray] = ()
) -> np.ndarray:
    """Smallest index set containing the support of ``rho0`` and closed under the dynamics.

    Hamiltonian parts link indices both ways (their adjoints also act); a jump operator
    only moves weight from column j to row i.  Nothing outside the returned set is ever
    populated, so integrating the restricted density matrix is exact.
    """
    d = rho0.shape[0]
    link = np.zeros((d, d), dtype=bool)
    for g in hamiltonian_parts:
        nz = g != 0
        link |= nz | nz.T
    for g in jumps:
        link |= g != 0
    seen = np.abs(np.diag(rho0)) > 0
    seen |= np.any(rho0 != 0, axis=1)
    frontier = seen.copy()
    while frontier.any():
        reach = link[:, frontier].any(axis=1) & ~seen
        seen |= reach
        frontier = reach
    return np.flatnonzero(seen)


def _restrict(h: TimeDependentHamiltonian, collapse: CollapseSet, keep: np.ndarray):
    rows, cols, base, fidx, freqs = h.coordinate_form(collapse.anti_hermitian_part(h.space.dim))
    pos = np.full(h.space.dim, -1, dtype=np.int64)
    pos[keep] = np.arange(keep.size)
    sel = (pos[rows] >= 0) & (pos[cols] >= 0)
    return pos[rows[sel]], pos[cols[sel]], base[sel], fidx[sel], freqs


def _chunks(total: int, stride: int) -> list[int]:
    stride = max(1, int(stride))
    out = [stride] * (total // stride)
    if total % stride:
        out.append(total % stride)
    return out


def analytic_phase_factors(stage_times: Sequence[float], derived: DerivedParams, fock_pair: Sequence[int]) -> complex:
    """Phase picked up by |g, n_a, n_b> after stage 1 (t1) then stage 2 (t2)."""
    t1, t2 = stage_times
    n_a, n_b = fock_pair
    stark = n_a * (derived.lambda_a * t1 + derived.lambda_a_t * t2)
    return complex(np.exp(1j * stark) * np.exp(1j * n_a * n_b * derived.chi * t1))


def analytic_effective_evolve(psi0: StateVector, derived: DerivedParams, stage: int, t: float) -> StateVector:
    """Exact evolution under the ground-manifold effective Hamiltonian of one stage."""
    space = psi0.space
    if space is None:
        raise InputError("analytic evolution needs a state on the full space")
    amps = psi0.amplitudes.reshape(space.shape)
    leak = float(np.sum(np.abs(amps[1:]) ** 2))
    if leak > 1e-12:
        raise SubspaceError(f"state has weight {leak:.3e} outside the qutrit ground manifold")
    n_a = np.arange(space.n_a)[:, None]
    n_b = np.arange(space.n_b)[None, :]
    if stage == 1:
        phase = np.exp(1j * derived.lambda_a * n_a * t) * np.exp(1j * derived.chi * n_a * n_b * t)
    elif stage == 2:
        phase = np.exp(1j * derived.lambda_a_t * n_a * t) * np.ones_like(n_b)
    else:
        raise InputError(f"stage must be 1 or 2, got {stage}")
    out = np.zeros(space.shape, dtype=np.complex128)
    out[0] = amps[0] * phase
    return StateVector(out.reshape(-1), space)


def state_fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|² for pure states."""
    return abs(a.inner(b)) ** 2
