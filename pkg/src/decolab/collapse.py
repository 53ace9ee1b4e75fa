"""Order-parameter traces, the diagonal phase transform, and branch sampling.

When every branch of a superposition is a wave packet for the measured
observable, the breaking transform W_eps reduces to diagonal phases
c_n -> c_n exp(i eps |c_n|^2).  The inter-branch mean gap acts as an order
parameter: once it crosses the critical value (the half-sum of branch
spreads) the superposition is effectively broken and a single branch can be
drawn with Born weight |c_n|^2.  classicize packages that decision rule; it
returns the untouched input before the crossing time and a sampled product
branch after it.

Sampling is inverse-CDF over the cumulative branch weights in branch order,
driven by a seeded PCG64 generator, so runs are reproducible and portable.
Concurrent trials derive per-trial seeds with split_seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyTimes
from .hilbert import StateVector
from .supersystem import CorrelatedState
from .wavepacket import GaussianPacket

# Branches lighter than this weight carry no observable phase and are
# excluded from the spread maximum.
PHASE_WEIGHT_FLOOR = 1e-12

# 64-bit golden-ratio increment; decorrelates per-trial seeds.
SEED_GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def split_seed(base: int, index: int) -> int:
    """Per-trial seed: base XOR (golden ratio * index) mod 2^64."""
    return (int(base) ^ ((SEED_GOLDEN * int(index)) & _MASK64)) & _MASK64


def approx_w_transform(psi: StateVector, eps: float) -> StateVector:
    """Diagonal phase form of the breaking transform: c_n -> c_n e^{i eps |c_n|^2}."""
    c = psi.amplitudes
    return StateVector(c * np.exp(1j * eps * np.abs(c) ** 2), psi.basis_label)


def decoherence_phase_spread(psi: StateVector, eps: float) -> float:
    """Largest relative phase the diagonal transform imprints across branches.

    max over branch pairs of |eps| * ||c_n|^2 - |c_m|^2|, restricted to
    branches with weight above PHASE_WEIGHT_FLOOR.  Zero means the transform
    acts as a global phase (equal-weight or single-branch states).
    """
    weights = np.abs(psi.amplitudes) ** 2
    live = weights[weights > PHASE_WEIGHT_FLOOR]
    if live.size < 2:
        return 0.0
    return float(abs(eps) * (np.max(live) - np.min(live)))


@dataclass(frozen=True)
class OrderParameterTrace:
    """Mean gaps vs critical values for every branch pair over a time series.

    tau_nm[k] is the first time pair k satisfies gap >= critical (linearly
    interpolated between samples, None when it never does); tau is the max
    over pairs, None if any pair never crosses.
    """

    observable_name: str
    times: np.ndarray
    pairs: tuple
    gap: np.ndarray  # shape (n_pairs, n_times)
    critical: np.ndarray  # shape (n_pairs, n_times)
    tau_nm: tuple
    tau: float | None
    n_branches: int


def _moments(packet: GaussianPacket, observable: str) -> tuple[float, float]:
    if observable == "position":
        return packet.x0, packet.sigma_x
    if observable == "momentum":
        return packet.p0, packet.sigma_p
    raise ValueError(f"unknown observable {observable!r}; use 'position' or 'momentum'")


def _first_crossing(times: np.ndarray, diff: np.ndarray) -> float | None:
    above = diff >= 0.0
    if not np.any(above):
        return None
    i = int(np.argmax(above))
    if i == 0:
        return float(times[0])
    t0, t1 = times[i - 1], times[i]
    d0, d1 = diff[i - 1], diff[i]
    return float(t0 + (t1 - t0) * (-d0) / (d1 - d0))


def order_parameter_trace(
    branches: Sequence[Callable[[float], GaussianPacket]],
    observable: str,
    times: Sequence[float],
) -> OrderParameterTrace:
    """Evaluate gap and critical series for every pair of branch trajectories.

    Each branch is a map t -> GaussianPacket; times must be strictly
    increasing starting at 0.
    """
    t = np.asarray(times, dtype=float)
    if t.size == 0:
        raise EmptyTimes("need at least one sample time")
    if t[0] != 0.0 or np.any(np.diff(t) <= 0.0):
        raise ValueError("times must be strictly increasing starting at 0")
    n = len(branches)
    if n < 2:
        raise DimensionMismatch("order parameter needs at least two branches")
    means = np.zeros((n, t.size))
    devs = np.zeros((n, t.size))
    for b, branch in enumerate(branches):
        for k, tk in enumerate(t):
            means[b, k], devs[b, k] = _moments(branch(float(tk)), observable)
    pairs = tuple((i, j) for i in range(n) for j in range(i + 1, n))
    gap = np.zeros((len(pairs), t.size))
    critical = np.zeros((len(pairs), t.size))
    tau_nm = []
    for k, (i, j) in enumerate(pairs):
        gap[k] = np.abs(means[i] - means[j])
        critical[k] = 0.5 * (devs[i] + devs[j])
        tau_nm.append(_first_crossing(t, gap[k] - critical[k]))
    tau = None if any(v is None for v in tau_nm) else max(tau_nm)
    return OrderParameterTrace(
        observable_name=observable,
        times=t,
        pairs=pairs,
        gap=gap,
        critical=critical,
        tau_nm=tuple(tau_nm),
        tau=tau,
        n_branches=n,
    )


@dataclass(frozen=True)
class CollapseOutcome:
    branch_index: int
    prior: float
    posterior: tuple
    seed: int


def sample_collapse(psi: StateVector, seed: int) -> CollapseOutcome:
    """Draw one branch with Born weight |c_n|^2 (inverse-CDF, PCG64 stream).

    The cumulative weights are walked in branch order and the final branch
    absorbs any rounding remainder, so zero-weight branches are never drawn.
    """
    weights = np.abs(psi.amplitudes) ** 2
    cumulative = np.cumsum(weights)
    u = np.random.Generator(np.random.PCG64(seed)).random()
    index = int(np.searchsorted(cumulative, u, side="right"))
    index = min(index, weights.size - 1)
    posterior = np.zeros(weights.size)
    posterior[index] = 1.0
    return CollapseOutcome(
        branch_index=index,
        prior=float(weights[index]),
        posterior=tuple(posterior),
        seed=int(seed),
    )


def geometric_reduction(c_n: complex, full_width: float) -> tuple[float, float]:
    """Reduced support width and draw probability for one branch.

    A branch of amplitude c_n occupies the fraction |c_n|^2 of the full
    configuration-volume width, so the geometric draw probability (reduced
    over full) equals the Born weight.
    """
    if full_width <= 0.0:
        raise ValueError("full_width must be positive")
    weight = abs(c_n) ** 2
    if weight > 1.0 + 1e-12:
        raise ValueError("|c_n| cannot exceed 1")
    reduced = weight * full_width
    return reduced, reduced / full_width


@dataclass(frozen=True)
class ExactState:
    """Pre-critical result: the correlated state, untouched."""

    state: CorrelatedState


@dataclass(frozen=True)
class CollapsedProduct:
    """Post-critical result: one branch, now an uncorrelated product."""

    branch_index: int
    prior: float
    factors: tuple
    product: StateVector | None  # tensor of the factors when they are all StateVectors
    seed: int


def classicize(
    correlated: CorrelatedState,
    trace: OrderParameterTrace,
    t: float,
    seed: int,
) -> ExactState | CollapsedProduct:
    """Apply the order-parameter decision rule at time t.

    Before the crossing time (or when the trace never crosses) the exact
    correlated state is returned as-is.  From tau onward one branch is drawn
    with Born weight and returned as a product.
    """
    if trace.n_branches != len(correlated.branches):
        raise DimensionMismatch("trace was computed for a different branch family")
    if trace.tau is None or t < trace.tau:
        return ExactState(state=correlated)
    coeff_state = StateVector(np.array([b.coefficient for b in correlated.branches]))
    outcome = sample_collapse(coeff_state, seed)
    branch = correlated.branches[outcome.branch_index]
    product = branch.product()
    return CollapsedProduct(
        branch_index=outcome.branch_index,
        prior=outcome.prior,
        factors=branch.factors,
        product=product,
        seed=int(seed),
    )


# ---------------------------------------------------------------------------
# Export plumbing.


def trace_table(trace: OrderParameterTrace) -> tuple[list[str], list[tuple]]:
    """Header and rows for CSV export; single-pair traces use plain names."""
    if len(trace.pairs) == 1:
        header = ["t", "gap", "critical"]
    else:
        header = ["t"]
        for i, j in trace.pairs:
            header += [f"gap_{i}_{j}", f"critical_{i}_{j}"]
    rows = []
    for k, t in enumerate(trace.times):
        row = [float(t)]
        for p in range(len(trace.pairs)):
            row += [float(trace.gap[p, k]), float(trace.critical[p, k])]
        rows.append(tuple(row))
    return header, rows


def outcomes_to_jsonl(outcomes: Sequence[CollapseOutcome]) -> str:
    """One JSON object per line; stable key order for reproducible bytes."""
    lines = []
    for o in outcomes:
        lines.append(
            json.dumps(
                {
                    "branch_index": o.branch_index,
                    "prior": o.prior,
                    "posterior": list(o.posterior),
                    "seed": o.seed,
                },
                sort_keys=True,
            )
        )
    return "\n".join(lines) + "\n"
