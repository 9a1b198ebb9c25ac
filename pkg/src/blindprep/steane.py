"""The [[7,1,3]] code: codewords, encoder, syndromes, and MBQC compilation.

Code conventions:
- Physical qubits are labelled ("d", 1) .. ("d", 7); bit strings written
  with qubit 1 leftmost.
- Stabilizer generators use the three parity rows 0001111, 0110011,
  1010101 for both X and Z checks. Reading the three check parities
  most-significant-first yields the binary position of a single error
  (0 means no error), the classic single-error-correcting property.
- Logical X is X on qubits {3, 5, 6}; together with the X stabilizers it
  generates the full 16-string group underlying both codewords.

Encoder (data on wire 3, everything else arriving as |+>): wires 1, 2, 4
are the row pivots and stay |+>; wires 5, 6, 7 are Hadamard-ed to |0>;
the data then fans out over the logical-X support and each pivot fans out
over its row. Eleven CNOTs total, each compiled to a cluster tile between
consecutive rows, giving a 7-row measurement pattern for the whole block.

Syndrome extraction is ancilla-coupled and non-destructive:
- bit check (finds X errors): fresh |+>_L ancilla as the TARGET of a
  transversal CNOT from the data, ancilla read out in the computational
  basis; the parity rows of the readout word give the syndrome while every
  data amplitude survives (the ancilla word is uniform over a coset).
- phase check (finds Z errors): fresh |0>_L ancilla as the CONTROL of a
  transversal CNOT onto the data, ancilla read out in the X basis.
The roles are not interchangeable: flipping either ancilla choice still
produces a valid-looking syndrome but collapses or overwrites the encoded
data, which the tests demonstrate explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import mbqc
from . import statevector as sv
from .errors import InputError

DATA_LABELS = tuple(("d", i) for i in range(1, 8))

PARITY_ROWS = ("0001111", "0110011", "1010101")

ZERO_STRINGS = (
    "0000000",
    "0001111",
    "0110011",
    "0111100",
    "1010101",
    "1011010",
    "1100110",
    "1101001",
)

LOGICAL_X_SUPPORT = (3, 5, 6)

# encoder wiring: data wire, pivot wires, |0>-prepared wires, CNOT fan-outs
DATA_WIRE = 3
PIVOT_WIRES = (1, 2, 4)
ZEROED_WIRES = (5, 6, 7)
ENCODER_CNOTS = (
    (3, 5),
    (3, 6),
    (1, 3),
    (1, 5),
    (1, 7),
    (2, 3),
    (2, 6),
    (2, 7),
    (4, 5),
    (4, 6),
    (4, 7),
)


# --------------------------------------------------------------- codewords ----


def _string_state(strings, labels) -> sv.PureState:
    amps = np.zeros((2,) * 7, dtype=complex)
    for s in strings:
        amps[tuple(int(ch) for ch in s)] = 1.0 / math.sqrt(len(strings))
    return sv.PureState(amps, list(labels))


def logical_zero() -> sv.PureState:
    return _string_state(ZERO_STRINGS, DATA_LABELS)


def logical_one() -> sv.PureState:
    flipped = ["".join("1" if ch == "0" else "0" for ch in s) for s in ZERO_STRINGS]
    return _string_state(flipped, DATA_LABELS)


def logical_plus_theta(theta: float) -> sv.PureState:
    """(|0>_L + e^{i theta} |1>_L) / sqrt(2)."""
    zero, one = logical_zero(), logical_one()
    amps = (zero.amps + np.exp(1j * theta) * one.amps) / math.sqrt(2.0)
    return sv.PureState(amps, list(DATA_LABELS))


# ----------------------------------------------------------------- encoder ----


def encoder_unitary() -> np.ndarray:
    """The 7-wire encoder map for all-|+> non-data inputs (wire order 1..7)."""
    u = np.eye(2**7, dtype=complex)
    for w in ZEROED_WIRES:
        u = mbqc.embed_one_qubit(sv.H.matrix, 7, w - 1) @ u
    for c, t in ENCODER_CNOTS:
        u = mbqc.embed_two_qubit(sv.CNOT.matrix, 7, c - 1, t - 1) @ u
    return u


def encode_circuit(data) -> sv.PureState:
    """Reference gate-model encoding of a single-qubit state (2-vector or
    1-qubit PureState); returns the encoded block on ("d", 1..7)."""
    vec = _data_vec(data)
    state = None
    plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    zero = np.array([1.0, 0.0], dtype=complex)
    for i in range(1, 8):
        if i == DATA_WIRE:
            q = sv.PureState(vec, [("d", i)])
        elif i in PIVOT_WIRES:
            q = sv.PureState(plus.copy(), [("d", i)])
        else:
            q = sv.PureState(zero.copy(), [("d", i)])
        state = q if state is None else sv.tensor(state, q)
    for c, t in ENCODER_CNOTS:
        state = sv.apply_gate(state, sv.CNOT, [("d", c), ("d", t)])
    return state


def _data_vec(data) -> np.ndarray:
    if isinstance(data, sv.PureState):
        if data.n != 1:
            raise InputError("encode a single qubit at a time")
        return data.amps.reshape(-1).copy()
    vec = np.asarray(data, dtype=complex).reshape(-1)
    if vec.shape != (2,):
        raise InputError("data must be a 2-vector or 1-qubit state")
    return vec


# ------------------------------------------------------------------ errors ----


@dataclass(frozen=True)
class PauliError:
    kind: str  # "X" | "Y" | "Z"
    position: int  # 1..7

    def __post_init__(self) -> None:
        if self.kind not in ("X", "Y", "Z"):
            raise InputError(f"unknown Pauli kind {self.kind!r}")
        if not 1 <= self.position <= 7:
            raise InputError("error position must be between 1 and 7")


def inject_error(state: sv.PureState, err: PauliError) -> sv.PureState:
    gate = {"X": sv.X, "Y": sv.Y, "Z": sv.Z}[err.kind]
    return sv.apply_gate(state, gate, [("d", err.position)])


# --------------------------------------------------------------- syndromes ----


@dataclass(frozen=True)
class SyndromeResult:
    bit_word: tuple  # raw computational readout of the bit-check ancilla
    phase_word: tuple  # raw X-basis readout of the phase-check ancilla
    bit_syndrome: tuple  # three parity-row bits, most significant first
    phase_syndrome: tuple
    bit_position: int  # 0 = clean, else the flagged qubit (1..7)
    phase_position: int

    @property
    def clean(self) -> bool:
        return self.bit_position == 0 and self.phase_position == 0


def _row_parities(word) -> tuple:
    return tuple(
        sum(bit for bit, ch in zip(word, row) if ch == "1") % 2 for row in PARITY_ROWS
    )


def _position(syndrome) -> int:
    return syndrome[0] * 4 + syndrome[1] * 2 + syndrome[2]


def extract_syndrome(
    state: sv.PureState, src: sv.OutcomeSource
) -> tuple[SyndromeResult, sv.PureState]:
    """Run one bit round and one phase round; returns (result, surviving data).

    The data state must live on the ("d", 1..7) labels. Each round tensors a
    fresh 7-qubit logical ancilla (14 live qubits), couples transversally,
    and destructively reads the ancilla out.
    """
    for lb in DATA_LABELS:
        if lb not in state.labels:
            raise InputError("state does not carry the encoded-block labels")

    anc = [("bit", i) for i in range(1, 8)]
    joint = sv.tensor(state, sv.PureState(logical_plus_theta(0.0).amps, anc))
    for d, a in zip(DATA_LABELS, anc):
        joint = sv.apply_gate(joint, sv.CNOT, [d, a])
    bit_word = []
    for a in anc:
        outcome, _, joint = sv.measure(joint, a, sv.COMPUTATIONAL, src)
        bit_word.append(outcome)

    anc = [("phase", i) for i in range(1, 8)]
    joint = sv.tensor(joint, sv.PureState(logical_zero().amps, anc))
    for d, a in zip(DATA_LABELS, anc):
        joint = sv.apply_gate(joint, sv.CNOT, [a, d])
    phase_word = []
    for a in anc:
        outcome, _, joint = sv.measure(joint, a, sv.rotated(0.0), src)
        phase_word.append(outcome)

    bit_syn = _row_parities(bit_word)
    phase_syn = _row_parities(phase_word)
    result = SyndromeResult(
        bit_word=tuple(bit_word),
        phase_word=tuple(phase_word),
        bit_syndrome=bit_syn,
        phase_syndrome=phase_syn,
        bit_position=_position(bit_syn),
        phase_position=_position(phase_syn),
    )
    return result, joint


def apply_correction(state: sv.PureState, result: SyndromeResult) -> sv.PureState:
    """Undo the flagged single-qubit error: X at the bit-check position,
    Z at the phase-check position (both at once recovers a Y)."""
    if result.bit_position:
        state = sv.apply_gate(state, sv.X, [("d", result.bit_position)])
    if result.phase_position:
        state = sv.apply_gate(state, sv.Z, [("d", result.phase_position)])
    return state


# --------------------------------------------------------- MBQC compilation ----


def compile_encoder() -> mbqc.MeasurementPattern:
    """Compile the full encoder to one cluster-state measurement pattern.

    Wires 1..7 sit on rows 0..6 with inputs in column 1; Hadamard chains on
    the |0>-prepared wires come first, then each CNOT tile in fan-out order.
    All measurement angles are fixed (X or Y), so the pattern needs no
    adaptivity and every correction is a static output-frame update.
    """
    b = mbqc.PatternBuilder()
    starts = [b.wire(w, 1, w - 1) for w in range(1, 8)]
    for w in ZEROED_WIRES:
        mbqc.lay_hadamard(b, w)
    for c, t in ENCODER_CNOTS:
        mbqc.lay_cnot(b, list(range(c, t + 1)))
    return b.build(starts, list(range(1, 8)), encoder_unitary())


@dataclass
class EncodedBlock:
    """An MBQC-prepared logical qubit plus the run's public record."""

    state: sv.PureState  # corrected block on ("d", 1..7)
    transcript: mbqc.Transcript
    grid: tuple  # (columns, rows) bounding box of the cluster
    frame: mbqc.ByproductFrame  # corrections that were applied, on ("d", i) keys


def prepare_encoded_mbqc(
    theta: float, src: sv.OutcomeSource, jit: bool = True
) -> EncodedBlock:
    """Prepare |+_theta>_L by running the compiled encoder pattern with a
    |+_theta> data input, then undoing the tracked byproducts."""
    p = compile_encoder()
    data_in = p.inputs[DATA_WIRE - 1]
    state, transcript, frame = mbqc.run_pattern(
        p, {data_in: sv.new_plus_theta(theta).amps.reshape(-1)}, src, jit=jit
    )
    state = mbqc.apply_byproducts(state, frame)
    relabel = {node: ("d", i + 1) for i, node in enumerate(p.outputs)}
    state = sv.PureState(state.amps, [relabel.get(lb, lb) for lb in state.labels])
    frame = mbqc.ByproductFrame(
        {relabel[node]: exps for node, exps in frame.exps.items()}
    )
    return EncodedBlock(state, transcript, p.graph.bounding_grid(), frame)
