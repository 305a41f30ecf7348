"""Gate protocol, fidelity, truth table and photon-lifetime sweeps.

The gate is two fixed-duration stages: stage 1 (both resonators coupled) for t1, an
instantaneous retune, then stage 2 (resonator a only) for t2.  Three model tiers
differ in the Hamiltonians used and whether dissipation is included:

========  =========================================  ===================================
tier      Hamiltonians                               propagation
========  =========================================  ===================================
green     effective, ground manifold only            exact phases, no noise
blue      effective + resonator crosstalk            Lindblad (Schrödinger if noiseless)
red       full rotating-wave with spurious couplings Lindblad (Schrödinger if noiseless)
========  =========================================  ===================================
"""

from __future__ import annotations

import enum
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import hamiltonian as ham
from .catstates import CatEncoding, InitialStateSpec, ideal_output, input_superposition, two_qubit_logical
from .errors import CatGateError, ConfigurationError, InputError, IntegratorAccuracyError, NumericalValidityError
from .hilbert import SpaceDescriptor
from .model import DerivedParams, NoiseParams, SystemParams, derive, to_ghz, validate_regime
from .propagate import (
    CollapseSet,
    IntegratorConfig,
    TrajectoryRecorder,
    analytic_effective_evolve,
    lindblad,
    schrodinger,
)
from .states import DensityMatrix, StateVector

DEFAULT_LEAKAGE_BOUND = 0.05


class ModelTier(str, enum.Enum):
    GREEN = "green"  # ideal effective: no decoherence, no crosstalk
    BLUE = "blue"  # effective + crosstalk + dissipators
    RED = "red"  # full Hamiltonians + dissipators

    @classmethod
    def parse(cls, value: str | ModelTier) -> ModelTier:
        if isinstance(value, ModelTier):
            return value
        aliases = {
            "ideal-effective": cls.GREEN,
            "effective-noisy": cls.BLUE,
            "full-noisy": cls.RED,
        }
        v = value.strip().lower()
        if v in aliases:
            return aliases[v]
        try:
            return cls(v)
        except ValueError:
            raise InputError(f"unknown model tier {value!r}; expected green, blue or red") from None


@dataclass
class GateResult:
    tier: ModelTier
    initial_spec: InitialStateSpec
    alpha: complex
    kappa_inv: float
    fidelity: float
    t1: float
    t2: float
    trace_drift: float = 0.0
    norm_drift: float = 0.0
    leakage_ef: float = 0.0
    leakage_flag: bool = False
    runtime_s: float = 0.0
    convergence_delta: float | None = None
    status: str = "ok"
    message: str = ""
    final_state: StateVector | DensityMatrix | None = field(default=None, repr=False)


# Column order of the serialized sweep rows; status/message trail the fixed schema.
CSV_COLUMNS = (
    "tier",
    "theta_rad",
    "phi_rad",
    "alpha",
    "kappa_inv_us",
    "fidelity",
    "t1_us",
    "t2_us",
    "trace_drift",
    "leakage_ef",
    "runtime_s",
)
EXTRA_COLUMNS = ("status", "message")


@dataclass(frozen=True)
class SweepRecord:
    tier: str
    theta_rad: float
    phi_rad: float
    alpha: float
    kappa_inv_us: float
    fidelity: float
    t1_us: float
    t2_us: float
    trace_drift: float
    leakage_ef: float
    runtime_s: float
    status: str = "ok"
    message: str = ""

    @classmethod
    def from_result(cls, r: GateResult) -> SweepRecord:
        return cls(
            tier=r.tier.value,
            theta_rad=r.initial_spec.theta,
            phi_rad=r.initial_spec.phi,
            alpha=float(np.real(r.alpha)),
            kappa_inv_us=r.kappa_inv,
            fidelity=r.fidelity,
            t1_us=r.t1,
            t2_us=r.t2,
            trace_drift=r.trace_drift,
            leakage_ef=r.leakage_ef,
            runtime_s=r.runtime_s,
            status=r.status,
            message=r.message,
        )

    def as_dict(self) -> dict:
        return asdict(self)

    def sort_key(self):
        return (self.tier, self.theta_rad, self.phi_rad, self.kappa_inv_us)


def fidelity(rho: DensityMatrix | StateVector, psi_id: StateVector) -> float:
    """sqrt(<ψ_id|ρ|ψ_id>), with tiny negative round-off clamped to zero."""
    if isinstance(rho, StateVector):
        return abs(psi_id.inner(rho))
    if rho.dim != psi_id.dim:
        raise InputError("fidelity: state dimensions differ")
    v = psi_id.amplitudes
    q = float(np.real(np.vdot(v, rho.matrix @ v)))
    if q < -1e-8:
        raise NumericalValidityError(f"<psi|rho|psi> = {q:.3e} is negative; rho is not positive")
    return math.sqrt(max(q, 0.0))


def _stage_hamiltonians(tier: ModelTier, params: SystemParams, space: SpaceDescriptor, d: DerivedParams):
    if tier is ModelTier.GREEN:
        return ham.effective_stage1(params, space, derived=d), ham.effective_stage2(params, space, derived=d)
    if tier is ModelTier.BLUE:
        return (
            ham.effective_stage1_with_crosstalk(params, space, d),
            ham.effective_stage2_with_crosstalk(params, space, d),
        )
    return ham.stage1_full(params, space, d), ham.stage2_full(params, space, d)


def _leakage(state: StateVector | DensityMatrix, space: SpaceDescriptor) -> float:
    if isinstance(state, StateVector):
        pops = np.abs(state.amplitudes.reshape(space.shape)) ** 2
    else:
        pops = np.real(np.diag(state.matrix)).reshape(space.shape)
    return float(pops[1:].sum())


def evolve_gate(
    tier: ModelTier,
    psi_in: StateVector,
    params: SystemParams,
    noise: NoiseParams,
    cfg: IntegratorConfig,
    derived: DerivedParams | None = None,
    stages: Sequence[int] = (1, 2),
    recorder: TrajectoryRecorder | None = None,
) -> StateVector | DensityMatrix:
    """Run the stages of the protocol on ``psi_in``; pure output when the tier is noiseless."""
    tier = ModelTier.parse(tier)
    d = derive(params) if derived is None else derived
    space = psi_in.space
    durations = {1: d.t1, 2: d.t2}
    h = dict(zip((1, 2), _stage_hamiltonians(tier, params, space, d)))

    if tier is ModelTier.GREEN or (tier is ModelTier.BLUE and noise.is_zero() and _no_crosstalk(params)):
        state = psi_in
        for s in stages:
            state = analytic_effective_evolve(state, d, s, durations[s])
        return state

    if noise.is_zero():
        state = psi_in
        for s in stages:
            state = schrodinger(h[s], state, durations[s], cfg)
        return state

    collapse = CollapseSet.from_noise(noise, space)
    rho = psi_in.to_density()
    elapsed = 0.0
    for s in stages:
        # each stage runs on its own interaction-picture clock starting at zero
        rho = lindblad(h[s], rho, collapse, durations[s], cfg, recorder=recorder, time_offset=elapsed)
        elapsed += durations[s]
    return rho


def _no_crosstalk(params: SystemParams) -> bool:
    return params.g_ab_value == 0.0 and params.g_ab_t_value == 0.0


def _require_regime(params: SystemParams, d: DerivedParams) -> None:
    report = validate_regime(params, d)
    if not report.ok:
        names = ", ".join(f"{c.name}={c.value:.3g}" for c in report.failures())
        raise ConfigurationError(f"dispersive regime check failed: {names}")


def run_gate(
    tier: ModelTier | str,
    spec: InitialStateSpec,
    enc: CatEncoding,
    params: SystemParams,
    noise: NoiseParams,
    cfg: IntegratorConfig = IntegratorConfig(),
    space: SpaceDescriptor | None = None,
    leakage_bound: float = DEFAULT_LEAKAGE_BOUND,
    keep_state: bool = False,
    recorder: TrajectoryRecorder | None = None,
) -> GateResult:
    tier = ModelTier.parse(tier)
    start = time.perf_counter()
    d = derive(params)
    _require_regime(params, d)
    space = space or SpaceDescriptor(enc.n_trunc, enc.n_trunc)
    if tier is ModelTier.GREEN:
        noise = NoiseParams()
    psi_in = input_superposition(spec, enc, space)
    psi_id = ideal_output(spec, enc, space)

    out = evolve_gate(tier, psi_in, params, noise, cfg, d, recorder=recorder)
    fid = fidelity(out, psi_id)
    result = GateResult(
        tier=tier,
        initial_spec=spec,
        alpha=enc.alpha,
        kappa_inv=_kappa_inv(noise),
        fidelity=fid,
        t1=d.t1,
        t2=d.t2,
    )
    # truncated inputs carry norm² = 1 - tail; drift is measured against that
    if isinstance(out, DensityMatrix):
        result.trace_drift = abs(out.trace().real - psi_in.norm() ** 2)
    else:
        result.norm_drift = abs(out.norm() - psi_in.norm())
        result.trace_drift = abs(out.norm() ** 2 - psi_in.norm() ** 2)
    result.leakage_ef = _leakage(out, space)
    result.leakage_flag = result.leakage_ef > leakage_bound

    if cfg.convergence_tol is not None and tier is not ModelTier.GREEN:
        fine = evolve_gate(tier, psi_in, params, noise, cfg.halved(), d)
        result.convergence_delta = abs(fidelity(fine, psi_id) - fid)
        if result.convergence_delta > cfg.convergence_tol:
            raise IntegratorAccuracyError(
                f"step halving changed the fidelity by {result.convergence_delta:.3e} "
                f"(> {cfg.convergence_tol:g}); increase samples_per_period"
            )
    if keep_state:
        result.final_state = out
    result.runtime_s = time.perf_counter() - start
    return result


def _kappa_inv(noise: NoiseParams) -> float:
    k = noise.kappa_a
    return math.inf if k == 0 else 1.0 / k


@dataclass(frozen=True)
class TruthTableRow:
    label: str
    phase: float
    magnitude: float
    phase_reference: str  # "absolute" for pure outputs, "relative-00" for mixed


def truth_table(
    tier: ModelTier | str,
    enc: CatEncoding,
    params: SystemParams,
    noise: NoiseParams,
    cfg: IntegratorConfig = IntegratorConfig(),
    space: SpaceDescriptor | None = None,
) -> list[TruthTableRow]:
    """Gate action on the four logical basis states.

    Pure outputs report ``arg <b|out>``.  A density matrix carries no global phase, so
    for mixed outputs the phase of each basis state is read relative to |00> from one
    extra run on the uniform superposition of all four inputs:
    ``arg <b|ρ|00>``; magnitudes are ``sqrt(<b|ρ_b|b>)`` from the basis runs.
    """
    tier = ModelTier.parse(tier)
    d = derive(params)
    _require_regime(params, d)
    space = space or SpaceDescriptor(enc.n_trunc, enc.n_trunc)
    if tier is ModelTier.GREEN:
        noise = NoiseParams()
    labels = ("00", "01", "10", "11")
    basis = {b: two_qubit_logical(b, enc, space) for b in labels}
    outputs = {b: evolve_gate(tier, basis[b], params, noise, cfg, d) for b in labels}
    if all(isinstance(o, StateVector) for o in outputs.values()):
        return [
            TruthTableRow(b, float(np.angle(basis[b].inner(outputs[b]))), abs(basis[b].inner(outputs[b])), "absolute")
            for b in labels
        ]
    plus = StateVector(0.5 * sum(basis[b].amplitudes for b in labels), space)
    rho = evolve_gate(tier, plus, params, noise, cfg, d)
    ref = basis["00"].amplitudes
    rows = []
    for b in labels:
        v = basis[b].amplitudes
        coherence = np.vdot(v, rho.matrix @ ref)
        rows.append(TruthTableRow(b, float(np.angle(coherence)), fidelity(outputs[b], basis[b]), "relative-00"))
    return rows


@dataclass(frozen=True)
class SweepCell:
    tier: ModelTier
    spec: InitialStateSpec
    kappa_inv: float


def _run_cell(args) -> SweepRecord:
    cell, enc, params, noise, cfg, space, leakage_bound = args
    n = noise.with_kappa(0.0 if math.isinf(cell.kappa_inv) else 1.0 / cell.kappa_inv)
    try:
        r = run_gate(cell.tier, cell.spec, enc, params, n, cfg, space, leakage_bound)
        r.kappa_inv = cell.kappa_inv
        return SweepRecord.from_result(r)
    except CatGateError as exc:
        d = derive(params)
        return SweepRecord(
            tier=cell.tier.value,
            theta_rad=cell.spec.theta,
            phi_rad=cell.spec.phi,
            alpha=float(np.real(enc.alpha)),
            kappa_inv_us=cell.kappa_inv,
            fidelity=math.nan,
            t1_us=d.t1,
            t2_us=d.t2,
            trace_drift=math.nan,
            leakage_ef=math.nan,
            runtime_s=0.0,
            status=type(exc).__name__,
            message=str(exc),
        )


def sweep_kappa(
    grid: Sequence[float],
    specs: Sequence[InitialStateSpec],
    tiers: Iterable[ModelTier | str],
    enc: CatEncoding,
    params: SystemParams,
    noise: NoiseParams,
    cfg: IntegratorConfig = IntegratorConfig(),
    space: SpaceDescriptor | None = None,
    jobs: int = 1,
    leakage_bound: float = DEFAULT_LEAKAGE_BOUND,
) -> list[SweepRecord]:
    """Fidelity for every (tier, state, κ⁻¹) cell with κ_a = κ_b = κ.

    Cells are independent; with ``jobs > 1`` they are distributed over a process pool.
    Rows come back sorted by (tier, θ, φ, κ⁻¹) whatever the worker count.
    """
    if not len(grid):
        raise InputError("kappa grid must not be empty")
    for k in grid:
        if not k > 0:
            raise InputError(f"kappa_inv values must be positive, got {k}")
    tiers = [ModelTier.parse(t) for t in tiers]
    cells = [SweepCell(t, s, float(k)) for t in tiers for s in specs for k in grid]
    payload = [(c, enc, params, noise, cfg, space, leakage_bound) for c in cells]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_cell, payload))
    else:
        records = [_run_cell(p) for p in payload]
    return sorted(records, key=SweepRecord.sort_key)


def tier_gaps(records: Sequence[SweepRecord]) -> dict[tuple[float, float, float], float]:
    """Blue minus red fidelity per (θ, φ, κ⁻¹) wherever both tiers were run."""
    by = {(r.tier, r.theta_rad, r.phi_rad, r.kappa_inv_us): r.fidelity for r in records}
    gaps = {}
    for (tier, th, ph, k), f in by.items():
        if tier == "red" and ("blue", th, ph, k) in by:
            gaps[(th, ph, k)] = by[("blue", th, ph, k)] - f
    return gaps


# Quality factors quoted for κ⁻¹ = 300 µs; note the first is attributed to 6.5 GHz
# although resonator a sits at 7.5 GHz during stage 1.
QUOTED_Q = {
    "a": (6.5, 1.2e7),
    "a_t": (5.5, 1.0e7),
    "b": (4.9, 9.2e6),
    "b_t": (3.5, 6.6e6),
}


@dataclass(frozen=True)
class QualityFactorRow:
    resonator: str
    frequency_ghz: float
    q: float
    quoted_frequency_ghz: float
    quoted_q: float
    note: str = ""


def quality_factor(omega: float, kappa_inv: float) -> float:
    if not kappa_inv > 0:
        raise InputError("kappa_inv must be positive")
    return omega * kappa_inv


def quality_factor_report(params: SystemParams, kappa_inv: float) -> list[QualityFactorRow]:
    freqs = {
        "a": params.omega_a,
        "a_t": params.omega_a_t,
        "b": params.omega_b,
        "b_t": params.omega_b_t,
    }
    rows = []
    for name, omega in freqs.items():
        qf, qq = QUOTED_Q[name]
        note = ""
        if not math.isclose(to_ghz(omega), qf, rel_tol=1e-9):
            note = f"quoted Q uses {qf} GHz; configured frequency is {to_ghz(omega):.6g} GHz"
        rows.append(QualityFactorRow(name, to_ghz(omega), quality_factor(omega, kappa_inv), qf, qq, note))
    return rows
