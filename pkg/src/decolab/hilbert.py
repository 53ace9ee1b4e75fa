"""Finite-dimensional state vectors, operators, and the superposition-breaking transform.

The central object is the rank-one projector P = |psi><psi| and the
one-parameter unitary family

    W_eps = exp(i eps P) = 1 + (e^{i eps} - 1) P,

which follows from idempotency of P.  W_eps multiplies the component of any
vector along |psi> by a phase e^{i eps} and leaves the orthogonal complement
untouched; it is the elementary move behind every collapse model in this
package.  Everything here is dense and desk-scale (dimensions up to a few
thousand); states and operators are immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyInput,
    NonHermitian,
    NonHermitianDeviation,
    ZeroVector,
)

# Norm drift allowed for anything that claims to be a unit vector or unitary.
NORM_TOL = 1e-10
# Tolerance for exact algebraic identities (idempotency, reconstruction, ...).
ALG_TOL = 1e-12


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=complex, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class StateVector:
    """A unit-norm complex vector, optionally tagged with a basis label."""

    amplitudes: np.ndarray
    basis_label: str = ""

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size == 0:
            raise EmptyInput("state vector needs a non-empty 1-d amplitude array")
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(
                f"amplitudes are not unit norm (|psi|^2 = {norm_sq!r}); use make_state"
            )
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>."""
        if self.dim != other.dim:
            raise DimensionMismatch(f"dims {self.dim} and {other.dim} differ")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A dense square operator with verified structural claims.

    The hermitian/unitary flags are promises checked at construction time:
    a flag set to True on a matrix that fails the corresponding identity is
    rejected rather than silently trusted.
    """

    entries: np.ndarray
    units: str = ""
    hermitian: bool = False
    unitary: bool = False

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise DimensionMismatch(f"operator must be square, got shape {m.shape}")
        if self.hermitian and np.max(np.abs(m - m.conj().T)) >= ALG_TOL:
            raise NonHermitian("hermitian flag set but M != M^dagger")
        if self.unitary:
            drift = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
            if drift >= NORM_TOL:
                raise ValueError(f"unitary flag set but |M^dag M - 1| = {drift:g}")
        object.__setattr__(self, "entries", _frozen(m))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class GaussDecomposition:
    """Rank-one projector split into diagonal, raising and lowering parts.

    For |Psi> = sum_i c_i |u_i> the projector splits as

        P = sum_i |c_i|^2 |u_i><u_i|                      (diagonal)
          + sum_{j>i} c_i* c_j |u_j><u_i|                 (raising)
          + sum_{j<i} c_i* c_j |u_j><u_i|                 (lowering)

    Entries are stored sparsely as (row, col, value) triples; exact zeros in
    the amplitude vector produce no triple.
    """

    dim: int
    diagonal: tuple = field(default_factory=tuple)  # (index, weight)
    raising: tuple = field(default_factory=tuple)  # (row j, col i, value), j > i
    lowering: tuple = field(default_factory=tuple)  # (row j, col i, value), j < i

    def reconstruct(self) -> np.ndarray:
        m = np.zeros((self.dim, self.dim), dtype=complex)
        for i, w in self.diagonal:
            m[i, i] = w
        for j, i, v in self.raising:
            m[j, i] = v
        for j, i, v in self.lowering:
            m[j, i] = v
        return m


def make_state(amplitudes, basis_label: str = "") -> StateVector:
    """Normalize a complex amplitude list into a StateVector.

    Relative phases are preserved exactly; only the overall scale is fixed.
    """
    amps = np.asarray(amplitudes, dtype=complex)
    if amps.ndim != 1 or amps.size == 0:
        raise EmptyInput("make_state needs a non-empty 1-d amplitude sequence")
    norm = float(np.linalg.norm(amps))
    if norm == 0.0:
        raise ZeroVector("cannot normalize the zero vector")
    return StateVector(amps / norm, basis_label)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product state |a> (x) |b>, index of b varying fastest."""
    label = f"{a.basis_label}*{b.basis_label}" if (a.basis_label or b.basis_label) else ""
    return StateVector(np.kron(a.amplitudes, b.amplitudes), label)


def projector(psi: StateVector) -> OperatorMatrix:
    """Rank-one projector |psi><psi|."""
    c = psi.amplitudes
    return OperatorMatrix(np.outer(c, c.conj()), hermitian=True)


def exp_projector(psi: StateVector, eps: float) -> OperatorMatrix:
    """The unitary exp(i eps |psi><psi|) = 1 + (e^{i eps} - 1) |psi><psi|."""
    p = projector(psi).entries
    w = np.eye(psi.dim, dtype=complex) + (np.exp(1j * eps) - 1.0) * p
    return OperatorMatrix(w, unitary=True)


def apply_w(psi: StateVector, chi: StateVector, eps: float) -> StateVector:
    """Apply exp(i eps |psi><psi|) to |chi> without forming the matrix.

    Three regimes, resolved by the overlap s = <psi|chi>:
    parallel (|s| = 1): chi picks up the global phase e^{i eps};
    orthogonal (s = 0): chi is returned unchanged;
    otherwise: chi + s (e^{i eps} - 1) psi.
    """
    if psi.dim != chi.dim:
        raise DimensionMismatch(f"dims {psi.dim} and {chi.dim} differ")
    s = np.vdot(psi.amplitudes, chi.amplitudes)
    if abs(abs(s) - 1.0) < ALG_TOL:
        out = np.exp(1j * eps) * chi.amplitudes
    elif abs(s) < ALG_TOL:
        out = chi.amplitudes.copy()
    else:
        out = chi.amplitudes + s * (np.exp(1j * eps) - 1.0) * psi.amplitudes
    return StateVector(out, chi.basis_label)


def expectation(op: OperatorMatrix, psi: StateVector) -> complex:
    """<psi|M|psi>; real part only when the operator is flagged Hermitian."""
    if op.dim != psi.dim:
        raise DimensionMismatch(f"dims {op.dim} and {psi.dim} differ")
    val = complex(np.vdot(psi.amplitudes, op.entries @ psi.amplitudes))
    return val.real if op.hermitian else val


def expectation_and_deviation(op: OperatorMatrix, psi: StateVector) -> tuple[float, float]:
    """Mean and standard deviation of a Hermitian observable.

    The variance <A^2> - <A>^2 can dip slightly below zero from rounding;
    anything within -ALG_TOL is clamped to zero, anything worse is a bug in
    the caller's operator and raises.
    """
    if not op.hermitian:
        raise NonHermitianDeviation("deviation is defined for Hermitian operators only")
    if op.dim != psi.dim:
        raise DimensionMismatch(f"dims {op.dim} and {psi.dim} differ")
    a_psi = op.entries @ psi.amplitudes
    mean = float(np.vdot(psi.amplitudes, a_psi).real)
    second = float(np.vdot(a_psi, a_psi).real)  # <A^2> via |A psi|^2, exact for Hermitian A
    variance = second - mean * mean
    if variance < -ALG_TOL * max(1.0, second):
        raise NonHermitian(f"negative variance {variance:g} beyond rounding tolerance")
    return mean, float(np.sqrt(max(variance, 0.0)))


def gauss_decompose(psi: StateVector) -> GaussDecomposition:
    """Split |psi><psi| into diagonal, raising and lowering triples."""
    c = psi.amplitudes
    diagonal = []
    raising = []
    lowering = []
    for i in range(c.size):
        if c[i] == 0:
            continue
        diagonal.append((i, float(abs(c[i]) ** 2)))
        for j in range(c.size):
            if j == i or c[j] == 0:
                continue
            value = complex(np.conj(c[i]) * c[j])
            if j > i:
                raising.append((j, i, value))
            else:
                lowering.append((j, i, value))
    return GaussDecomposition(
        dim=c.size,
        diagonal=tuple(diagonal),
        raising=tuple(raising),
        lowering=tuple(lowering),
    )


# ---------------------------------------------------------------------------
# JSON plumbing: matrices and states as row-major [re, im] pairs.


def matrix_to_jsonable(op: OperatorMatrix) -> dict:
    pairs = [[[float(v.real), float(v.imag)] for v in row] for row in op.entries]
    return {
        "entries": pairs,
        "units": op.units,
        "hermitian": op.hermitian,
        "unitary": op.unitary,
    }


def matrix_from_jsonable(data: dict) -> OperatorMatrix:
    entries = np.array(
        [[complex(re, im) for re, im in row] for row in data["entries"]], dtype=complex
    )
    return OperatorMatrix(
        entries,
        units=data.get("units", ""),
        hermitian=bool(data.get("hermitian", False)),
        unitary=bool(data.get("unitary", False)),
    )


def state_to_jsonable(psi: StateVector) -> dict:
    return {
        "amplitudes": [[float(v.real), float(v.imag)] for v in psi.amplitudes],
        "basis_label": psi.basis_label,
    }


def state_from_jsonable(data: dict) -> StateVector:
    amps = np.array([complex(re, im) for re, im in data["amplitudes"]], dtype=complex)
    return StateVector(amps, data.get("basis_label", ""))
