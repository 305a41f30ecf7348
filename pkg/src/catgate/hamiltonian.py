"""Interaction-picture Hamiltonians for the two gate stages.

Three fidelity levels per stage:

* ideal rotating-wave couplings (stage 1: a on g<->e, b on e<->f; stage 2: a on g<->e),
* full couplings with the spurious transitions and the resonator-resonator crosstalk,
* effective dispersive (static, diagonal) Hamiltonians.

Each rotating term stores the non-Hermitian half exactly as written, e.g.
``g * exp(i δ_a t) a σ⁺_eg``; the Hermitian conjugate is implied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hilbert import Operator, Ops, SpaceDescriptor, hermiticity_error
from .model import DerivedParams, SystemParams, derive


@dataclass(frozen=True)
class RotatingTerm:
    amplitude: float
    detuning: float
    op: Operator
    name: str = ""

    def evaluate(self, t: float) -> np.ndarray:
        half = self.amplitude * np.exp(1j * self.detuning * t) * self.op.matrix
        return half + half.conj().T


@dataclass(frozen=True)
class TimeDependentHamiltonian:
    space: SpaceDescriptor
    static_part: Operator
    rotating_terms: tuple[RotatingTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "rotating_terms", tuple(self.rotating_terms))
        if hermiticity_error(self.static_part) > 1e-12:
            raise ValueError("static part of a Hamiltonian must be Hermitian")

    @property
    def max_frequency(self) -> float:
        return max((abs(t.detuning) for t in self.rotating_terms), default=0.0)

    @property
    def norm_bound(self) -> float:
        """Upper bound on ||H(t)||₂ for all t (max of row- and column-sum norms, termwise)."""

        def bound(m):
            a = np.abs(m)
            return math.sqrt(a.sum(axis=0).max() * a.sum(axis=1).max()) if m.size else 0.0

        total = bound(self.static_part.matrix)
        for term in self.rotating_terms:
            total += 2.0 * abs(term.amplitude) * bound(term.op.matrix)
        return total

    @property
    def is_static(self) -> bool:
        return all(t.amplitude == 0.0 for t in self.rotating_terms)

    def evaluate(self, t: float) -> Operator:
        m = np.array(self.static_part.matrix)
        for term in self.rotating_terms:
            m += term.evaluate(t)
        return Operator(m, self.space)

    def with_terms(self, *terms: RotatingTerm) -> TimeDependentHamiltonian:
        return TimeDependentHamiltonian(self.space, self.static_part, self.rotating_terms + tuple(terms))

    def coordinate_form(self, extra_static: np.ndarray | None = None):
        """Entries of H(t) as (rows, cols, base, fidx, freqs) with H[r, c] = base * exp(i freqs[fidx] t).

        ``extra_static`` (optionally non-Hermitian) is folded into the zero-frequency entries.
        """
        blocks = []
        static = np.array(self.static_part.matrix)
        if extra_static is not None:
            static = static + extra_static
        blocks.append((static, 0.0))
        for term in self.rotating_terms:
            if term.amplitude == 0.0:
                continue
            half = term.amplitude * term.op.matrix
            blocks.append((half, term.detuning))
            blocks.append((half.conj().T, -term.detuning))
        freqs = sorted({f for _, f in blocks})
        rows, cols, base, fidx = [], [], [], []
        for m, f in blocks:
            r, c = np.nonzero(m)
            rows.append(r)
            cols.append(c)
            base.append(m[r, c])
            fidx.append(np.full(r.size, freqs.index(f)))
        return (
            np.concatenate(rows).astype(np.int64),
            np.concatenate(cols).astype(np.int64),
            np.concatenate(base).astype(np.complex128),
            np.concatenate(fidx).astype(np.int64),
            np.array(freqs, dtype=np.float64),
        )


def evaluate(h: TimeDependentHamiltonian, t: float) -> Operator:
    return h.evaluate(t)


def _zero(space: SpaceDescriptor) -> Operator:
    return Operator(np.zeros((space.dim, space.dim)), space)


def _derived(params: SystemParams, derived: DerivedParams | None) -> DerivedParams:
    return derive(params) if derived is None else derived


def stage1_ideal(params: SystemParams, space: SpaceDescriptor, derived: DerivedParams | None = None):
    d = _derived(params, derived)
    o = Ops(space)
    terms = (
        RotatingTerm(params.g, d.delta_a, o.a @ o.s_eg_plus, "g a s_eg+"),
        RotatingTerm(params.mu, d.delta_b, o.b @ o.s_fe_plus, "mu b s_fe+"),
    )
    return TimeDependentHamiltonian(space, _zero(space), terms)


def stage1_full(params: SystemParams, space: SpaceDescriptor, derived: DerivedParams | None = None):
    d = _derived(params, derived)
    o = Ops(space)
    terms = (
        RotatingTerm(params.g, d.delta_a, o.a @ o.s_eg_plus, "g a s_eg+"),
        RotatingTerm(params.mu, d.delta_b, o.b @ o.s_fe_plus, "mu b s_fe+"),
        RotatingTerm(params.g_prime, d.delta_a_p, o.a @ o.s_fe_plus, "g' a s_fe+"),
        RotatingTerm(params.mu_prime, d.delta_b_p, o.b @ o.s_eg_plus, "mu' b s_eg+"),
        crosstalk_term(params.g_ab_value, d.Delta_ab, o),
    )
    return TimeDependentHamiltonian(space, _zero(space), terms)


def stage2_ideal(params: SystemParams, space: SpaceDescriptor, derived: DerivedParams | None = None):
    d = _derived(params, derived)
    o = Ops(space)
    terms = (RotatingTerm(d.g_t, d.delta_a_t, o.a @ o.s_eg_plus, "g_t a s_eg+"),)
    return TimeDependentHamiltonian(space, _zero(space), terms)


def stage2_full(params: SystemParams, space: SpaceDescriptor, derived: DerivedParams | None = None):
    d = _derived(params, derived)
    o = Ops(space)
    terms = (
        RotatingTerm(d.g_t, d.delta_a_t, o.a @ o.s_eg_plus, "g_t a s_eg+"),
        RotatingTerm(params.g_t_prime_ratio * d.g_t, d.delta_a_tp, o.a @ o.s_fe_plus, "g_t' a s_fe+"),
        crosstalk_term(params.g_ab_t_value, d.Delta_ab_t, o),
    )
    return TimeDependentHamiltonian(space, _zero(space), terms)


def crosstalk_term(amplitude: float, frequency_difference: float, ops: Ops) -> RotatingTerm:
    """g_ab (exp(-i Δ_ab t) a b⁺ + h.c.) with Δ_ab = ω_a - ω_b."""
    return RotatingTerm(amplitude, -frequency_difference, ops.a @ ops.b.dag, "g_ab a b+")


def effective_stage1(
    params: SystemParams,
    space: SpaceDescriptor,
    include_e_f_levels: bool = False,
    derived: DerivedParams | None = None,
) -> TimeDependentHamiltonian:
    """Static dispersive Hamiltonian of stage 1.

    With ``include_e_f_levels`` the Stark shifts of e and f and the f-level χ term are
    kept (a a⁺ is taken as n_a + 1, its untruncated value); otherwise only the
    ground-manifold part ``-λ_a n_a|g><g| - χ n_a n_b|g><g|`` remains.
    """
    d = _derived(params, derived)
    o = Ops(space)
    eye = o.identity
    h = -d.lambda_a * (o.n_a @ o.p_g) - d.chi * (o.n_a @ o.n_b @ o.p_g)
    if include_e_f_levels:
        aad = o.n_a + eye
        bbd = o.n_b + eye
        h = (
            h
            + d.lambda_a * (aad @ o.p_e)
            - d.lambda_b * (o.n_b @ o.p_e)
            + d.lambda_b * (bbd @ o.p_f)
            + d.chi * (aad @ bbd @ o.p_f)
        )
    return TimeDependentHamiltonian(space, h)


def effective_stage2(
    params: SystemParams, space: SpaceDescriptor, derived: DerivedParams | None = None
) -> TimeDependentHamiltonian:
    d = _derived(params, derived)
    o = Ops(space)
    return TimeDependentHamiltonian(space, -d.lambda_a_t * (o.n_a @ o.p_g))


def effective_stage1_with_crosstalk(params, space, derived=None):
    d = _derived(params, derived)
    return effective_stage1(params, space, derived=d).with_terms(
        crosstalk_term(params.g_ab_value, d.Delta_ab, Ops(space))
    )


def effective_stage2_with_crosstalk(params, space, derived=None):
    d = _derived(params, derived)
    return effective_stage2(params, space, derived=d).with_terms(
        crosstalk_term(params.g_ab_t_value, d.Delta_ab_t, Ops(space))
    )


def excitation_number(space: SpaceDescriptor) -> Operator:
    o = Ops(space)
    return o.n_a + o.n_b + o.p_e + 2.0 * o.p_f
