"""Dense statevector simulator over labeled qubits.

Design notes:
- Qubits are identified by hashable labels, not positions. Measurement is
  destructive: the measured qubit's axis is removed and the survivors keep
  their labels, which is what a one-way computation needs (nodes disappear
  as they are consumed).
- Measurement bases: Computational (|0>,|1>) and Rotated(delta), the
  equatorial basis |+/-_delta> = (|0> +/- e^{i delta} |1>)/sqrt(2).
  Outcome 0 always means collapse onto the + ("plus") branch.
- Outcomes are drawn through an OutcomeSource so the same code path serves
  seeded Born sampling and forced-branch enumeration.
- States are compared with global-phase-insensitive fidelity; nothing in
  this package should ever assert on a global phase.

The amplitude array is shaped (2,)*n with one axis per qubit, axis order
matching ``labels``. A hard cap of 24 qubits keeps accidental blowups from
eating the machine.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractViolation, DegenerateBranchError, InputError, SequencingError

QUBIT_CAP = 24
_NORM_TOL = 1e-9
_UNITARY_TOL = 1e-12
_DEGENERATE_TOL = 1e-14

Label = object  # any hashable


# ---------------------------------------------------------------- gates ----


@dataclass(frozen=True)
class Gate:
    """A named unitary on k qubits (matrix is 2^k x 2^k, row-major)."""

    kind: str
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"gate {self.kind}: matrix must be square, got {m.shape}")
        n = m.shape[0]
        if n & (n - 1) or n < 2:
            raise InputError(f"gate {self.kind}: dimension {n} is not a power of two")
        if not np.allclose(m @ m.conj().T, np.eye(n), atol=_UNITARY_TOL):
            raise InputError(f"gate {self.kind}: matrix is not unitary within {_UNITARY_TOL}")
        object.__setattr__(self, "matrix", m)

    @property
    def arity(self) -> int:
        return self.matrix.shape[0].bit_length() - 1


I2 = Gate("I", np.eye(2))
X = Gate("X", np.array([[0, 1], [1, 0]]))
Y = Gate("Y", np.array([[0, -1j], [1j, 0]]))
Z = Gate("Z", np.array([[1, 0], [0, -1]]))
H = Gate("H", np.array([[1, 1], [1, -1]]) / math.sqrt(2))
S = Gate("S", np.array([[1, 0], [0, 1j]]))
CZ = Gate("CZ", np.diag([1, 1, 1, -1]))
CNOT = Gate("CNOT", np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]))


def rz(phi: float) -> Gate:
    """Phase rotation diag(1, e^{i phi}); new_plus_theta(t) == rz(t) H |0>."""
    return Gate(f"Rz({phi:g})", np.diag([1.0, cmath.exp(1j * phi)]))


# ---------------------------------------------------------------- bases ----


@dataclass(frozen=True)
class MeasBasis:
    """Measurement basis: Computational, or Rotated(delta) on the equator."""

    kind: str  # "computational" | "rotated"
    delta: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("computational", "rotated"):
            raise InputError(f"unknown basis kind {self.kind!r}")

    def describe(self) -> str:
        if self.kind == "computational":
            return "Z"
        return f"M({self.delta:g})"


COMPUTATIONAL = MeasBasis("computational")


def rotated(delta: float) -> MeasBasis:
    return MeasBasis("rotated", float(delta))


# -------------------------------------------------------- outcome source ----


class OutcomeSource:
    """Decides measurement outcomes given the two branch probabilities."""

    def choose(self, p0: float, p1: float) -> int:
        raise NotImplementedError


class BornSampler(OutcomeSource):
    """Samples outcomes by the Born rule from a seeded generator."""

    def __init__(self, seed: int | np.random.Generator | None = 0):
        if isinstance(seed, np.random.Generator):
            self.rng = seed
        else:
            self.rng = np.random.default_rng(seed)

    def choose(self, p0: float, p1: float) -> int:
        return 0 if self.rng.random() < p0 else 1


class ForcedBranch(OutcomeSource):
    """Replays an explicit branch word; errors out on a ~zero-probability branch.

    Used for exhaustive enumeration: the caller sweeps branch words and skips
    subtrees whose prefix raises DegenerateBranchError.
    """

    def __init__(self, bits: Sequence[int]):
        self.bits = [int(b) for b in bits]
        if any(b not in (0, 1) for b in self.bits):
            raise InputError("branch word must contain only bits")
        self.pos = 0

    def choose(self, p0: float, p1: float) -> int:
        if self.pos >= len(self.bits):
            raise SequencingError("branch word exhausted: more measurements than bits")
        bit = self.bits[self.pos]
        self.pos += 1
        if (p0 if bit == 0 else p1) < _DEGENERATE_TOL:
            raise DegenerateBranchError(
                f"forced branch bit {self.pos - 1} has probability below {_DEGENERATE_TOL}"
            )
        return bit


# --------------------------------------------------------------- states ----


@dataclass
class PureState:
    """A normalized pure state over labeled qubits."""

    amps: np.ndarray
    labels: list = field(default_factory=list)

    def __post_init__(self) -> None:
        self.amps = np.asarray(self.amps, dtype=complex)
        self.labels = list(self.labels)
        n = len(self.labels)
        if n > QUBIT_CAP:
            raise InputError(f"{n} qubits exceeds the cap of {QUBIT_CAP}")
        if len(set(self.labels)) != n:
            raise InputError("qubit labels must be unique")
        if self.amps.shape != (2,) * n:
            self.amps = self.amps.reshape((2,) * n)
        norm = float(np.vdot(self.amps, self.amps).real)
        if abs(norm - 1.0) > _NORM_TOL:
            raise InputError(f"state norm^2 = {norm} is not 1 within {_NORM_TOL}")

    # -- bookkeeping --

    @property
    def n(self) -> int:
        return len(self.labels)

    def axis(self, label: Label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise SequencingError(f"qubit {label!r} is not part of this state") from None

    def vector(self, order: Sequence[Label] | None = None) -> np.ndarray:
        """Flat amplitude vector, axes permuted to ``order`` (default: self.labels)."""
        if order is None:
            return self.amps.reshape(-1)
        order = list(order)
        if sorted(map(repr, order)) != sorted(map(repr, self.labels)):
            raise InputError("order must be a permutation of the state's labels")
        perm = [self.labels.index(lb) for lb in order]
        return np.transpose(self.amps, perm).reshape(-1)


def new_basis_state(n: int, bits: Sequence[int] | int = 0, labels: Sequence[Label] | None = None) -> PureState:
    """|b_0 b_1 ... b_{n-1}> with labels 0..n-1 unless given explicitly."""
    if n < 1 or n > QUBIT_CAP:
        raise InputError(f"qubit count {n} outside 1..{QUBIT_CAP}")
    if isinstance(bits, int):
        bits = [(bits >> (n - 1 - i)) & 1 for i in range(n)]
    bits = [int(b) for b in bits]
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise InputError("bits must be 0/1 of length n")
    amps = np.zeros((2,) * n, dtype=complex)
    amps[tuple(bits)] = 1.0
    return PureState(amps, list(labels) if labels is not None else list(range(n)))


def new_plus_theta(theta: float, label: Label = 0) -> PureState:
    """|+_theta> = (|0> + e^{i theta} |1>)/sqrt(2)."""
    amps = np.array([1.0, cmath.exp(1j * float(theta))]) / math.sqrt(2)
    return PureState(amps, [label])


def tensor(a: PureState, b: PureState) -> PureState:
    """Product state a (x) b; label sets must be disjoint."""
    if set(a.labels) & set(b.labels):
        raise InputError("tensor: overlapping qubit labels")
    if a.n + b.n > QUBIT_CAP:
        raise InputError(f"tensor would exceed the {QUBIT_CAP}-qubit cap")
    amps = np.tensordot(a.amps, b.amps, axes=0)
    return PureState(amps, a.labels + b.labels)


# ----------------------------------------------------------- operations ----


def apply_gate(s: PureState, g: Gate, targets: Sequence[Label]) -> PureState:
    """Apply gate g to the given target qubits (order matters for multi-qubit gates)."""
    targets = list(targets)
    if len(targets) != g.arity:
        raise InputError(f"gate {g.kind} expects {g.arity} targets, got {len(targets)}")
    if len(set(targets)) != len(targets):
        raise InputError("duplicate target labels")
    axes = [s.axis(t) for t in targets]
    k = len(axes)
    op = g.matrix.reshape((2,) * (2 * k))
    # contract op's input axes (k..2k-1) with the state's target axes
    amps = np.tensordot(op, s.amps, axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the gate's output axes first; move them home
    amps = np.moveaxis(amps, list(range(k)), axes)
    out = PureState.__new__(PureState)
    out.amps = amps
    out.labels = list(s.labels)
    _check_norm(out)
    return out


def _check_norm(s: PureState) -> None:
    norm = float(np.vdot(s.amps, s.amps).real)
    if abs(norm - 1.0) > _NORM_TOL:
        raise ContractViolation(f"norm drifted to {norm}")


def measure(
    s: PureState, q: Label, basis: MeasBasis, src: OutcomeSource
) -> tuple[int, float, PureState]:
    """Destructively measure qubit q. Returns (outcome, Born probability, residual state).

    Outcome 0 is the |0> / |+_delta> branch. The measured qubit is removed;
    the residual state is renormalized. A state may become empty (n == 0), in
    which case the residual has a 0-dim amplitude scalar of modulus 1.
    """
    ax = s.axis(q)
    a0 = np.take(s.amps, 0, axis=ax)
    a1 = np.take(s.amps, 1, axis=ax)
    if basis.kind == "computational":
        b0, b1 = a0, a1
    else:
        phase = cmath.exp(-1j * basis.delta)
        b0 = (a0 + phase * a1) / math.sqrt(2)
        b1 = (a0 - phase * a1) / math.sqrt(2)
    p0 = float(np.vdot(b0, b0).real)
    p1 = float(np.vdot(b1, b1).real)
    if abs(p0 + p1 - 1.0) > _NORM_TOL:
        raise ContractViolation(f"branch probabilities sum to {p0 + p1}")
    outcome = src.choose(p0, p1)
    if outcome not in (0, 1):
        raise InputError(f"outcome source returned {outcome!r}")
    prob = p0 if outcome == 0 else p1
    if prob < _DEGENERATE_TOL:
        raise DegenerateBranchError(f"outcome {outcome} on {q!r} has probability {prob}")
    branch = (b0 if outcome == 0 else b1) / math.sqrt(prob)
    out = PureState.__new__(PureState)
    out.amps = branch
    out.labels = [lb for lb in s.labels if lb != q]
    _check_norm(out)
    return outcome, prob, out


def reduced_density(s: PureState, keep: Sequence[Label]) -> "DensityMatrix":
    """Partial trace onto ``keep`` (result axes in keep order)."""
    keep = list(keep)
    if not keep:
        raise InputError("keep must name at least one qubit")
    if len(set(keep)) != len(keep):
        raise InputError("duplicate labels in keep")
    axes = [s.axis(lb) for lb in keep]
    rest = [i for i in range(s.n) if i not in axes]
    a = np.transpose(s.amps, axes + rest).reshape(2 ** len(keep), -1)
    rho = a @ a.conj().T
    return DensityMatrix(rho, keep)


@dataclass
class DensityMatrix:
    """Hermitian, unit-trace, PSD matrix over labeled qubits."""

    matrix: np.ndarray
    labels: list

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        self.labels = list(self.labels)
        d = 2 ** len(self.labels)
        if m.shape != (d, d):
            raise InputError(f"density matrix shape {m.shape} does not match {len(self.labels)} qubits")
        if not np.allclose(m, m.conj().T, atol=1e-10):
            raise InputError("density matrix is not Hermitian within 1e-10")
        if abs(np.trace(m).real - 1.0) > 1e-10:
            raise InputError(f"density matrix trace {np.trace(m)} is not 1 within 1e-10")
        if float(np.linalg.eigvalsh(m).min()) < -1e-10:
            raise InputError("density matrix has an eigenvalue below -1e-10")
        self.matrix = m

    def reordered(self, order: Sequence[Label]) -> np.ndarray:
        """Matrix with qubit axes permuted to ``order``."""
        order = list(order)
        if sorted(map(repr, order)) != sorted(map(repr, self.labels)):
            raise InputError("order must be a permutation of the density matrix labels")
        n = len(self.labels)
        perm = [self.labels.index(lb) for lb in order]
        t = self.matrix.reshape((2,) * (2 * n))
        t = np.transpose(t, perm + [n + p for p in perm])
        return t.reshape(2**n, 2**n)


def trace_distance(r1: DensityMatrix, r2: DensityMatrix) -> float:
    """(1/2)||r1 - r2||_1 via eigenvalues of the Hermitian difference."""
    if sorted(map(repr, r1.labels)) != sorted(map(repr, r2.labels)):
        raise InputError("trace_distance: density matrices cover different qubits")
    diff = r1.matrix - r2.reordered(r1.labels)
    return 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())


def fidelity(s1: PureState, s2: PureState) -> float:
    """|<s1|s2>|^2, insensitive to global phase; labels are aligned first."""
    if sorted(map(repr, s1.labels)) != sorted(map(repr, s2.labels)):
        raise InputError("fidelity: states cover different qubits")
    v1 = s1.vector()
    v2 = s2.vector(order=s1.labels)
    return float(abs(np.vdot(v1, v2)) ** 2)
