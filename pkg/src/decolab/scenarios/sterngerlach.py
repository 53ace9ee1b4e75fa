"""Spin-1/2 beam in a field gradient: the textbook continuous measurement.

The gradient potential -/+ mu_B beta_z z pushes the two spin branches apart
with constant force mu_B beta_z, so the branch centers separate as
z_pm(t) = +/- (mu_B beta_z / 2 m) t^2 while the packet widths stay at
sigma0.  The position gap crosses the critical half-width sum at

    tau_c = sqrt(delta_z m / (mu_B beta_z)),

which is ~1e-7 s for heavy-atom numbers.  sg_run traces the order parameter,
locates the crossing numerically, and (once past it) samples collapse
outcomes with Born weights |c_-|^2, |c_+|^2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..collapse import (
    OrderParameterTrace,
    classicize,
    CollapsedProduct,
    order_parameter_trace,
    split_seed,
)
from ..constants import MASS_SILVER, MU_B
from ..errors import TMaxBeforeCritical
from ..hilbert import OperatorMatrix, StateVector
from ..supersystem import Branch, CorrelatedState, InteractionHamiltonian, branch_evolve
from ..wavepacket import GaussianPacket, Grid1D

BRANCH_LABELS = ("minus", "plus")


@dataclass(frozen=True)
class SGConfig:
    """Beam parameters. Defaults: silver atom in a 1e3 T/m gradient."""

    beta_z: float = 1.0e3  # T/m
    mass: float = MASS_SILVER  # kg
    mu_b: float = MU_B  # J/T
    delta_z: float = 1.0e-9  # m, critical width scale
    c_minus: complex = 1.0 / math.sqrt(2.0)
    c_plus: complex = 1.0 / math.sqrt(2.0)
    sigma0: float = 1.0e-9  # m, packet width (frozen, no dissipation)
    grid: Grid1D = field(default_factory=lambda: Grid1D(-1.6e-8, 1.6e-8, 1024))
    t_max: float = 3.0e-7  # s
    n_steps: int = 1000

    def __post_init__(self):
        for name in ("beta_z", "mass", "mu_b", "delta_z", "sigma0", "t_max"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.n_steps < 2:
            raise ValueError("n_steps must be at least 2")
        total = abs(self.c_minus) ** 2 + abs(self.c_plus) ** 2
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"|c_-|^2 + |c_+|^2 = {total!r}, expected 1")


def sg_moments(config: SGConfig, t: float) -> dict[str, float]:
    """Closed-form branch moments: z_pm = +/- (mu beta / 2m) t^2, p_pm = +/- mu beta t."""
    a = config.mu_b * config.beta_z / config.mass  # acceleration magnitude
    return {
        "z_plus": 0.5 * a * t * t,
        "z_minus": -0.5 * a * t * t,
        "p_plus": config.mass * a * t,
        "p_minus": -config.mass * a * t,
    }


def sg_critical_time(config: SGConfig) -> float:
    """Gap = critical width when (mu beta / m) t^2 = delta_z."""
    return math.sqrt(config.delta_z * config.mass / (config.mu_b * config.beta_z))


def sg_hamiltonian(config: SGConfig) -> InteractionHamiltonian:
    """Gradient coupling V1 (x) V2 with V1 = diag(+mu_B, -mu_B), V2 = beta_z z.

    Branch order is (minus, plus); with V2' = beta_z the effective forces are
    f_pm = -v_pm beta_z = -/+ ... = +/- mu_B beta_z as required.  The spin
    factor carries no free Hamiltonian here (uniform-field phases drop out of
    every gap and weight).
    """
    h1 = OperatorMatrix(np.zeros((2, 2)), units="J", hermitian=True)
    v1 = OperatorMatrix(np.diag([config.mu_b, -config.mu_b]).astype(complex), units="J/T", hermitian=True)
    beta = config.beta_z
    return InteractionHamiltonian(h1=h1, v1=v1, v2=lambda x: beta * np.asarray(x, dtype=float), mass=config.mass)


def sg_correlated_state(config: SGConfig) -> CorrelatedState:
    """Initial entangled state: both branches share the packet at the origin."""
    packet = GaussianPacket(0.0, 0.0, config.sigma0, config.mass)
    minus = StateVector(np.array([1.0, 0.0], dtype=complex), "spin")
    plus = StateVector(np.array([0.0, 1.0], dtype=complex), "spin")
    return CorrelatedState(
        (
            Branch(complex(config.c_minus), (minus, packet)),
            Branch(complex(config.c_plus), (plus, packet)),
        )
    )


def sg_branch_trajectories(config: SGConfig):
    """Branch packet trajectories t -> GaussianPacket via the interaction."""
    ham = sg_hamiltonian(config)
    packet = GaussianPacket(0.0, 0.0, config.sigma0, config.mass)
    eigenvalues = (config.mu_b, -config.mu_b)  # (minus, plus) branch order

    def trajectory(v: float):
        return lambda t: branch_evolve(ham, v, packet, t)

    return [trajectory(v) for v in eigenvalues]


@dataclass(frozen=True)
class SGRunResult:
    trace: OrderParameterTrace
    tau_c_analytic: float
    tau_c_numeric: float | None
    counts: dict | None  # branch label -> trials, None when readout precedes tau
    frequencies: dict | None
    weights: dict  # exact Born weights
    n_trials: int
    seed: int


def sg_run(config: SGConfig, n_trials: int, seed: int) -> SGRunResult:
    """Trace the order parameter and sample collapse outcomes at t_max.

    When t_max falls before the crossing time a TMaxBeforeCritical warning is
    issued and no outcomes are drawn; the exact branch weights stand in for
    statistics.
    """
    times = np.linspace(0.0, config.t_max, config.n_steps + 1)
    trace = order_parameter_trace(sg_branch_trajectories(config), "position", times)
    state = sg_correlated_state(config)
    weights = {label: float(w) for label, w in zip(BRANCH_LABELS, state.weights)}
    counts = None
    frequencies = None
    if trace.tau is None or config.t_max < trace.tau:
        warnings.warn(
            f"t_max = {config.t_max:g} s precedes the critical time; returning exact weights",
            TMaxBeforeCritical,
        )
    else:
        counts = {label: 0 for label in BRANCH_LABELS}
        for i in range(n_trials):
            outcome = classicize(state, trace, config.t_max, split_seed(seed, i))
            assert isinstance(outcome, CollapsedProduct)
            counts[BRANCH_LABELS[outcome.branch_index]] += 1
        frequencies = {label: counts[label] / n_trials for label in BRANCH_LABELS}
    return SGRunResult(
        trace=trace,
        tau_c_analytic=sg_critical_time(config),
        tau_c_numeric=trace.tau,
        counts=counts,
        frequencies=frequencies,
        weights=weights,
        n_trials=n_trials,
        seed=int(seed),
    )
