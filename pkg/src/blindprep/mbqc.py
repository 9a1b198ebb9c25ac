"""Cluster graphs, measurement patterns, and the one-way executor.

Conventions (fixed once, everything else is derived):
- Cluster nodes are prepared as |+> (or a supplied input state), entangled by
  CZ along graph edges, and consumed by destructive measurement.
- M(delta) is the equatorial basis |+/-_delta>; outcome s=0 is the + branch.
- Head-of-chain identity: measuring the first node of an edge pair in M(delta)
  leaves X^s H Rz(-delta) |psi> on its neighbour. Z-basis measurement of a
  neighbour removes it, leaving Z^s on the survivors.
- Byproducts are tracked as exponent pairs (a, b) meaning X^a Z^b per wire.
  Every exponent is a GF(2) sum of measurement outcomes, so patterns carry
  static node sets (x_corr / z_corr) and adaptive-angle dependency sets, all
  computed symbolically by PatternBuilder while a layout is described.

Gate layouts (node counts are this implementation's choice; the soundness
tests are the authority for their correctness):

  Hadamard                 Rotation(xi, eta, zeta)
  in--x--y--y--y--out      in--x--(-xi)--(-eta)--(-zeta)--out
  (5-node chain)           (5-node chain, adaptive signs)

  CNOT between wires separated by d rows: the control wire is a 5-node row
  whose middle node couples through a vertical bridge of X-measured nodes to
  the target row. An even-length bridge composes to exactly CZ between its
  endpoints times known outcome-parity Z byproducts, while an odd bridge is
  a non-unitary parity fusion, so the bridge must have even length: odd d
  runs straight (d-1 nodes), even d adds one jog node next to the target.
  The target row is a 3-node chain (odd d) or 5-node chain (even d) so the
  coupling lands between two single hops (H.CZ.H = CNOT on the target side).
  Pass-through wires ride 3-node chains placed off the bridge column and
  contribute identity. One intermediate row forms the repeatable tile.

Node identifiers ARE their (column, row) grid coordinates, which keeps
transcripts, corrections, and the text serialization readable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import statevector as sv
from .errors import DegenerateBranchError, InputError, SequencingError, StructuralError

LIVE_CAP = 20  # max simultaneously-alive qubits during pattern execution

Node = tuple  # (x, y) int pairs


# ---------------------------------------------------------------- graphs ----


@dataclass
class ClusterGraph:
    """Undirected graph of grid-placed nodes (edges need not be grid-local)."""

    nodes: list
    edges: list

    def __post_init__(self) -> None:
        seen = set()
        for node in self.nodes:
            if (
                not isinstance(node, tuple)
                or len(node) != 2
                or not all(isinstance(c, int) for c in node)
            ):
                raise StructuralError(f"node {node!r} is not an (x, y) int pair")
            if node in seen:
                raise StructuralError(f"duplicate node {node}")
            seen.add(node)
        edge_set = set()
        for a, b in self.edges:
            if a == b:
                raise StructuralError(f"self-loop at {a}")
            if a not in seen or b not in seen:
                raise StructuralError(f"edge ({a}, {b}) references a missing node")
            key = frozenset((a, b))
            if key in edge_set:
                raise StructuralError(f"duplicate edge ({a}, {b})")
            edge_set.add(key)
        self.edges = [tuple(sorted(e)) for e in self.edges]

    def neighbours(self, node: Node) -> list:
        out = []
        for a, b in self.edges:
            if a == node:
                out.append(b)
            elif b == node:
                out.append(a)
        return out

    def bounding_grid(self) -> tuple[int, int]:
        xs = [x for x, _ in self.nodes]
        ys = [y for _, y in self.nodes]
        return (max(xs) - min(xs) + 1, max(ys) - min(ys) + 1)


def build_cluster(g: ClusterGraph, inputs: dict | None = None) -> sv.PureState:
    """Materialize the full cluster state: |+> everywhere except supplied inputs,
    then CZ along every edge. Intended for small graphs and tests."""
    inputs = dict(inputs or {})
    for node in inputs:
        if node not in g.nodes:
            raise InputError(f"input node {node} is not in the graph")
    state = None
    for node in g.nodes:
        q = _one_qubit(inputs.get(node), node)
        state = q if state is None else sv.tensor(state, q)
    if state is None:
        raise InputError("graph has no nodes")
    for a, b in g.edges:
        state = sv.apply_gate(state, sv.CZ, [a, b])
    return state


def _one_qubit(spec, label) -> sv.PureState:
    """Coerce an input spec (None -> |+>, 2-vector, or 1-qubit PureState) to a state."""
    if spec is None:
        return sv.new_plus_theta(0.0, label)
    if isinstance(spec, sv.PureState):
        if spec.n != 1:
            raise InputError("per-node input states must be single qubits")
        return sv.PureState(spec.amps.copy(), [label])
    vec = np.asarray(spec, dtype=complex).reshape(-1)
    if vec.shape != (2,):
        raise InputError("per-node input must be a 2-vector or 1-qubit state")
    return sv.PureState(vec, [label])


# ----------------------------------------------------------------- roles ----


@dataclass(frozen=True)
class Role:
    """How a node is consumed: Z elimination, fixed Pauli basis, or adaptive angle."""

    kind: str  # "zelim" | "base" | "adaptive"
    angle: float = 0.0
    deps: frozenset = frozenset()

    def __post_init__(self) -> None:
        if self.kind not in ("zelim", "base", "adaptive"):
            raise StructuralError(f"unknown role kind {self.kind!r}")
        if self.kind == "base" and not (
            abs(self.angle) < 1e-15 or abs(self.angle - math.pi / 2) < 1e-15
        ):
            raise StructuralError("base roles are restricted to M(0) and M(pi/2)")
        if self.kind != "adaptive" and self.deps:
            raise StructuralError("only adaptive roles carry sign dependencies")


def role_zelim() -> Role:
    return Role("zelim")


def role_x() -> Role:
    return Role("base", 0.0)


def role_y() -> Role:
    return Role("base", math.pi / 2)


def role_adaptive(angle: float, deps: Iterable[Node]) -> Role:
    return Role("adaptive", float(angle), frozenset(deps))


# -------------------------------------------------------------- patterns ----


@dataclass
class MeasurementPattern:
    """A runnable one-way pattern with static correction bookkeeping.

    steps: measurement order; every non-output node exactly once.
    x_corr/z_corr: per output node, the set of measured nodes whose outcome
    parity gives the X / Z byproduct exponent on that output.
    declared_unitary: intended map on the wire space (inputs order = wire
    order = outputs order); None for fixtures that do not claim one.
    """

    graph: ClusterGraph
    inputs: list
    outputs: list
    steps: list  # [(node, Role)]
    x_corr: dict
    z_corr: dict
    declared_unitary: np.ndarray | None = None

    def __post_init__(self) -> None:
        nodes = set(self.graph.nodes)
        for group, name in ((self.inputs, "input"), (self.outputs, "output")):
            if len(set(group)) != len(group):
                raise StructuralError(f"duplicate {name} nodes")
            for node in group:
                if node not in nodes:
                    raise StructuralError(f"{name} node {node} missing from graph")
        measured = [node for node, _ in self.steps]
        if len(set(measured)) != len(measured):
            raise StructuralError("a node is measured twice")
        want = nodes - set(self.outputs)
        if set(measured) != want:
            raise StructuralError(
                "steps must measure exactly the non-output nodes "
                f"(missing {want - set(measured)}, extra {set(measured) - want})"
            )
        seen: set = set()
        for node, role in self.steps:
            if role.kind == "adaptive" and not role.deps <= seen:
                raise StructuralError(f"adaptive node {node} depends on later outcomes")
            seen.add(node)
        for corr in (self.x_corr, self.z_corr):
            for out, dep_nodes in corr.items():
                if out not in self.outputs:
                    raise StructuralError(f"correction for non-output node {out}")
                if not frozenset(dep_nodes) <= set(measured):
                    raise StructuralError(f"correction for {out} cites unmeasured nodes")
        if self.declared_unitary is not None:
            d = 2 ** len(self.inputs)
            if self.declared_unitary.shape != (d, d):
                raise StructuralError("declared unitary dimension mismatch")

    @property
    def measured_count(self) -> int:
        return len(self.steps)


@dataclass
class TranscriptEntry:
    node: Node
    basis: sv.MeasBasis
    outcome: int
    prob: float


@dataclass
class Transcript:
    """Ordered measurement record of one pattern execution branch."""

    entries: list = field(default_factory=list)

    @property
    def branch_prob(self) -> float:
        p = 1.0
        for e in self.entries:
            p *= e.prob
        return p

    def outcomes(self) -> dict:
        return {e.node: e.outcome for e in self.entries}

    def basis_labels(self) -> list:
        return [e.basis.describe() for e in self.entries]

    def branch_word(self) -> list:
        return [e.outcome for e in self.entries]


@dataclass
class ByproductFrame:
    """Pending X^a Z^b per output node (exponents mod 2)."""

    exps: dict  # node -> (a, b)

    def is_trivial(self) -> bool:
        return all(a == 0 and b == 0 for a, b in self.exps.values())


def adapt_angle(base: float, deps: Iterable[Node], outcomes: dict) -> float:
    """Measurement angle +/-base with sign fixed by the dep outcomes' parity."""
    parity = 0
    for node in deps:
        if node not in outcomes:
            raise SequencingError(f"dependency {node} has no recorded outcome")
        parity ^= outcomes[node] & 1
    return -base if parity else base


def apply_byproducts(state: sv.PureState, frame: ByproductFrame) -> sv.PureState:
    """Apply the pending corrections: X^a Z^b means Z first, then X."""
    for node, (a, b) in frame.exps.items():
        if b:
            state = sv.apply_gate(state, sv.Z, [node])
        if a:
            state = sv.apply_gate(state, sv.X, [node])
    return state


# -------------------------------------------------------------- executor ----


def run_pattern(
    p: MeasurementPattern,
    inputs: dict | sv.PureState | None,
    src: sv.OutcomeSource,
    jit: bool = True,
) -> tuple[sv.PureState, Transcript, ByproductFrame]:
    """Execute a pattern and return (residual state, transcript, byproduct frame).

    inputs: dict node -> 1-qubit state/2-vector (missing input nodes default
    to |+>), or a joint PureState whose labels include every input node
    (extra labels ride along untouched as spectators, e.g. Choi probes).
    With jit=True nodes are created and entangled only when first needed and
    the live width is capped at LIVE_CAP; with jit=False the full cluster is
    built up front (small patterns only). Both modes agree branch-by-branch.
    """
    input_set = set(p.inputs)
    if isinstance(inputs, sv.PureState):
        labels = set(inputs.labels)
        if not input_set <= labels:
            raise InputError("joint input state must cover every input node")
        if (labels - input_set) & set(p.graph.nodes):
            raise InputError("joint input state labels collide with non-input nodes")
        live = sv.PureState(inputs.amps.copy(), list(inputs.labels))
        seeded: dict = {}
    else:
        seeded = dict(inputs or {})
        for node in seeded:
            if node not in input_set:
                raise InputError(f"state supplied for non-input node {node}")
        live = None

    created: set = set(input_set) if live is not None else set()
    pending_edges = {frozenset(e) for e in p.graph.edges}

    def ensure(node: Node) -> None:
        nonlocal live
        if node in created:
            return
        q = _one_qubit(seeded.get(node), node)
        live = q if live is None else sv.tensor(live, q)
        created.add(node)
        alive = sum(1 for lb in live.labels if lb in set(p.graph.nodes))
        if alive > LIVE_CAP:
            raise InputError(f"live width {alive} exceeds the cap of {LIVE_CAP}")

    def entangle_around(node: Node) -> None:
        nonlocal live
        for edge in [e for e in pending_edges if node in e]:
            (a, b) = tuple(edge)
            ensure(a)
            ensure(b)
            live = sv.apply_gate(live, sv.CZ, [a, b])
            pending_edges.discard(edge)

    if not jit:
        for node in p.graph.nodes:
            ensure(node)
        for edge in list(pending_edges):
            a, b = tuple(edge)
            live = sv.apply_gate(live, sv.CZ, [a, b])
            pending_edges.discard(edge)

    transcript = Transcript()
    outcomes: dict = {}
    for node, role in p.steps:
        ensure(node)
        entangle_around(node)
        if role.kind == "zelim":
            basis = sv.COMPUTATIONAL
        elif role.kind == "base":
            basis = sv.rotated(role.angle)
        else:
            basis = sv.rotated(adapt_angle(role.angle, role.deps, outcomes))
        outcome, prob, live = sv.measure(live, node, basis, src)
        outcomes[node] = outcome
        transcript.entries.append(TranscriptEntry(node, basis, outcome, prob))

    for node in p.outputs:
        ensure(node)
    for edge in list(pending_edges):
        a, b = tuple(edge)
        live = sv.apply_gate(live, sv.CZ, [a, b])
        pending_edges.discard(edge)

    frame = ByproductFrame(
        {
            out: (
                _parity(p.x_corr.get(out, ()), outcomes),
                _parity(p.z_corr.get(out, ()), outcomes),
            )
            for out in p.outputs
        }
    )
    return live, transcript, frame


def _parity(nodes: Iterable[Node], outcomes: dict) -> int:
    par = 0
    for node in nodes:
        par ^= outcomes[node] & 1
    return par


def enumerate_branches(
    p: MeasurementPattern, inputs, jit: bool = True
) -> Iterator[tuple[list, float, sv.PureState, Transcript, ByproductFrame]]:
    """Walk every measurement branch, pruning zero-probability subtrees.

    Yields (branch word, branch probability, residual state, transcript,
    frame). Cost grows with 2^measured_count; callers keep patterns small.
    """
    m = p.measured_count
    if m > 22:
        raise InputError(f"refusing to enumerate 2^{m} branches")
    word = 0
    while word < (1 << m):
        bits = [(word >> (m - 1 - i)) & 1 for i in range(m)]
        src = sv.ForcedBranch(bits)
        try:
            state, transcript, frame = run_pattern(p, inputs, src, jit=jit)
        except DegenerateBranchError:
            dead = src.pos - 1  # index of the impossible bit
            word = ((word >> (m - 1 - dead)) + 1) << (m - 1 - dead)
            continue
        yield bits, transcript.branch_prob, state, transcript, frame
        word += 1


# --------------------------------------------------------------- builder ----


class PatternBuilder:
    """Describes a layout while symbolically tracking byproduct frames.

    Wire frames are (a, b) sets of node ids over GF(2); hop/couple/bridge
    update them per the rules in the module docstring, so the finished
    pattern carries exact static correction sets and adaptive dependencies.
    """

    def __init__(self) -> None:
        self._nodes: list = []
        self._node_set: set = set()
        self._edges: list = []
        self._steps: list = []
        self._wires: dict = {}

    # -- graph primitives --

    def _add_node(self, node: Node) -> Node:
        if node in self._node_set:
            raise StructuralError(f"node {node} placed twice")
        self._nodes.append(node)
        self._node_set.add(node)
        return node

    def _add_edge(self, a: Node, b: Node) -> None:
        self._edges.append((a, b))

    # -- wires --

    def wire(self, key, x: int, y: int) -> Node:
        """Register a wire whose input node sits at (x, y)."""
        if key in self._wires:
            raise StructuralError(f"wire {key!r} already exists")
        node = self._add_node((x, y))
        self._wires[key] = {"carrier": node, "a": frozenset(), "b": frozenset(), "row": y}
        return node

    def carrier(self, key) -> Node:
        return self._wires[key]["carrier"]

    def row(self, key) -> int:
        return self._wires[key]["row"]

    def hop(self, key, kind, x: int | None = None, y: int | None = None) -> Node:
        """Advance a wire one node: measure the carrier, move to a new node.

        kind: "x" (M(0)), "y" (M(pi/2)), or ("rot", base_angle) for an
        adaptive node. Default placement is one column right of the carrier.
        """
        w = self._wires[key]
        u = w["carrier"]
        if x is None:
            x = u[0] + 1
        if y is None:
            y = w["row"]
        v = self._add_node((x, y))
        self._add_edge(u, v)
        a, b = w["a"], w["b"]
        if kind == "x":
            self._steps.append((u, role_x()))
            w["a"], w["b"] = frozenset({u}) ^ b, a
        elif kind == "y":
            # fixed M(pi/2): a pending X flips the measured basis's sign,
            # which re-reads the outcome; fold that into the new frame
            self._steps.append((u, role_y()))
            w["a"], w["b"] = frozenset({u}) ^ a ^ b, a
        elif isinstance(kind, tuple) and kind[0] == "rot":
            self._steps.append((u, role_adaptive(kind[1], a)))
            w["a"], w["b"] = frozenset({u}) ^ b, a
        else:
            raise InputError(f"unknown hop kind {kind!r}")
        w["carrier"] = v
        return v

    def couple(self, k1, k2) -> None:
        """CZ edge between the two wires' carriers (plus the frame swap rule)."""
        w1, w2 = self._wires[k1], self._wires[k2]
        self._add_edge(w1["carrier"], w2["carrier"])
        w1["b"] = w1["b"] ^ w2["a"]
        w2["b"] = w2["b"] ^ w1["a"]

    def bridge(self, k1, k2, coords: Sequence[tuple]) -> None:
        """Even-length X-measured chain linking two carriers.

        With coords listed k1 -> k2, the chain composes to CZ with the
        crossed outcome parities Z^{s_2 xor s_4 xor ...} on the k1 side and
        Z^{s_1 xor s_3 xor ...} on the k2 side.
        """
        if len(coords) % 2 != 0 or not coords:
            raise InputError("bridges must contain an even, positive node count")
        w1, w2 = self._wires[k1], self._wires[k2]
        chain = [w1["carrier"]]
        for xy in coords:
            chain.append(self._add_node((int(xy[0]), int(xy[1]))))
        chain.append(w2["carrier"])
        for a, b in zip(chain, chain[1:]):
            self._add_edge(a, b)
        for node in chain[1:-1]:
            self._steps.append((node, role_x()))
        w1["b"] = w1["b"] ^ frozenset(chain[1:-1][1::2])
        w2["b"] = w2["b"] ^ frozenset(chain[1:-1][0::2])
        w1["b"] = w1["b"] ^ w2["a"]
        w2["b"] = w2["b"] ^ w1["a"]

    def eliminate(self, x: int, y: int, attach: Sequence) -> Node:
        """A redundant |+> node attached to the named wires' carriers and
        removed by a computational-basis measurement (Z^s lands on each
        neighbour, folded into the wires' frames)."""
        node = self._add_node((x, y))
        for key in attach:
            w = self._wires[key]
            self._add_edge(node, w["carrier"])
            w["b"] = w["b"] ^ frozenset({node})
        self._steps.append((node, role_zelim()))
        return node

    # -- finishing --

    def build(
        self,
        input_nodes: Sequence[Node],
        wire_order: Sequence,
        declared_unitary: np.ndarray | None,
        step_order: str = "coordinate",
    ) -> MeasurementPattern:
        """Freeze into a MeasurementPattern.

        input_nodes: the wire input nodes in wire order (recorded before the
        wires advanced). Outputs are the current carriers in wire_order.
        step_order "coordinate" sorts measurements column-major; "logical"
        keeps description order (needed only if causality would break).
        """
        outputs = [self._wires[k]["carrier"] for k in wire_order]
        steps = list(self._steps)
        if step_order == "coordinate":
            steps.sort(key=lambda item: (item[0][0], item[0][1]))
        elif step_order != "logical":
            raise InputError("step_order must be 'coordinate' or 'logical'")
        x_corr = {self._wires[k]["carrier"]: self._wires[k]["a"] for k in wire_order}
        z_corr = {self._wires[k]["carrier"]: self._wires[k]["b"] for k in wire_order}
        return MeasurementPattern(
            graph=ClusterGraph(list(self._nodes), list(self._edges)),
            inputs=list(input_nodes),
            outputs=outputs,
            steps=steps,
            x_corr=x_corr,
            z_corr=z_corr,
            declared_unitary=declared_unitary,
        )


# ---------------------------------------------------------- gate library ----


@dataclass(frozen=True)
class HadamardGate:
    pass


@dataclass(frozen=True)
class RotationGate:
    xi: float
    eta: float
    zeta: float


@dataclass(frozen=True)
class CNOTGate:
    separation: int


GateSpec = object  # HadamardGate | RotationGate | CNOTGate


def lay_hadamard(b: PatternBuilder, key) -> None:
    """Five-node chain measured X, Y, Y, Y; net byproduct X^{s1+s3+s4} Z^{s2+s3}."""
    for kind in ("x", "y", "y", "y"):
        b.hop(key, kind)


def lay_rotation(b: PatternBuilder, key, xi: float, eta: float, zeta: float) -> None:
    """Five-node chain realizing Rx(zeta) Rz(eta) Rx(xi) via nominal angles
    (0, -xi, -eta, -zeta); signs of the last three adapt to earlier outcomes."""
    b.hop(key, "x")
    b.hop(key, ("rot", -xi))
    b.hop(key, ("rot", -eta))
    b.hop(key, ("rot", -zeta))


def lay_cnot(b: PatternBuilder, keys: Sequence) -> None:
    """CNOT from keys[0] (control) to keys[-1] (target); keys in between pass
    through unchanged. Wire rows must be consecutive top-to-bottom."""
    control, target = keys[0], keys[-1]
    rows = [b.row(k) for k in keys]
    if rows != list(range(rows[0], rows[0] + len(keys))):
        raise InputError("lay_cnot expects consecutive rows, control on top")
    d = rows[-1] - rows[0]
    base = max(b.carrier(k)[0] for k in keys)
    rc, rt = rows[0], rows[-1]

    b.hop(control, "x", x=base + 1)
    b.hop(control, "x", x=base + 2)  # carrier now at the coupling column

    if d % 2 == 1:
        b.hop(target, "x", x=base + 2)  # 3-node target chain
        bridge_coords = [(base + 2, r) for r in range(rc + 1, rt)]
    else:
        b.hop(target, "x", x=base + 1)  # 5-node target chain
        bridge_coords = [(base + 2, r) for r in range(rc + 1, rt)] + [(base + 1, rt - 1)]

    if bridge_coords:
        b.bridge(control, target, bridge_coords)
    else:
        b.couple(control, target)

    b.hop(control, "x", x=base + 3)
    b.hop(control, "x", x=base + 4)
    if d % 2 == 1:
        b.hop(target, "x", x=base + 3)
    else:
        for x in (base + 2, base + 3, base + 4):
            b.hop(target, "x", x=x)
    for key in keys[1:-1]:
        b.hop(key, "x", x=base + 3)
        b.hop(key, "x", x=base + 4)


def embed_two_qubit(u4: np.ndarray, n: int, i: int, j: int) -> np.ndarray:
    """Embed a 2-qubit unitary on wires (i, j) of an n-wire space (big-endian)."""
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (n - 1 - k)) & 1 for k in range(n)]
        sub_in = (bits[i] << 1) | bits[j]
        for sub_out in range(4):
            amp = u4[sub_out, sub_in]
            if amp == 0:
                continue
            nb = list(bits)
            nb[i], nb[j] = (sub_out >> 1) & 1, sub_out & 1
            row = 0
            for bit in nb:
                row = (row << 1) | bit
            out[row, col] += amp
    return out


def embed_one_qubit(u2: np.ndarray, n: int, i: int) -> np.ndarray:
    mats = [u2 if k == i else np.eye(2) for k in range(n)]
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def rotation_unitary(xi: float, eta: float, zeta: float) -> np.ndarray:
    """Declared rotation matrix: H R(zeta) H R(eta) H R(xi) H, R = diag(1, e^{i.})."""
    h = sv.H.matrix
    return h @ sv.rz(zeta).matrix @ h @ sv.rz(eta).matrix @ h @ sv.rz(xi).matrix @ h


def pattern_for_gate(gate: GateSpec) -> MeasurementPattern:
    """Build the standalone measurement pattern for one gate."""
    b = PatternBuilder()
    if isinstance(gate, HadamardGate):
        start = b.wire("w", 1, 0)
        lay_hadamard(b, "w")
        return b.build([start], ["w"], sv.H.matrix)
    if isinstance(gate, RotationGate):
        start = b.wire("w", 1, 0)
        lay_rotation(b, "w", gate.xi, gate.eta, gate.zeta)
        return b.build([start], ["w"], rotation_unitary(gate.xi, gate.eta, gate.zeta))
    if isinstance(gate, CNOTGate):
        d = gate.separation
        if not isinstance(d, int) or d < 1:
            raise InputError("CNOT separation must be a positive integer")
        keys = ["c"] + [f"m{r}" for r in range(1, d)] + ["t"]
        starts = [b.wire(k, 1, r) for r, k in enumerate(keys)]
        lay_cnot(b, keys)
        n = d + 1
        declared = embed_two_qubit(sv.CNOT.matrix, n, 0, n - 1)
        return b.build(starts, keys, declared)
    raise InputError(f"unknown gate spec {gate!r}")


# ---------------------------------------------------------- serialization ----


def pattern_to_text(p: MeasurementPattern) -> str:
    """Line-oriented fixture format; see pattern_from_text for the grammar."""
    lines = ["# measurement pattern"]
    for node in p.inputs:
        lines.append(f"input {_c(node)}")
    for node in p.outputs:
        lines.append(f"output {_c(node)}")
    for node, role in p.steps:
        if role.kind == "zelim":
            lines.append(f"node {_c(node)} z")
        elif role.kind == "base":
            name = "x" if abs(role.angle) < 1e-15 else "y"
            lines.append(f"node {_c(node)} {name}")
        else:
            deps = " ".join(_c(d) for d in sorted(role.deps))
            lines.append(f"node {_c(node)} rot:{role.angle!r}" + (f" {deps}" if deps else ""))
    for a, bnode in sorted(p.graph.edges):
        lines.append(f"edge {_c(a)} {_c(bnode)}")
    for out in p.outputs:
        xs = " ".join(_c(n) for n in sorted(p.x_corr.get(out, ())))
        zs = " ".join(_c(n) for n in sorted(p.z_corr.get(out, ())))
        if xs:
            lines.append(f"xcorr {_c(out)} {xs}")
        if zs:
            lines.append(f"zcorr {_c(out)} {zs}")
    return "\n".join(lines) + "\n"


def pattern_from_text(text: str) -> MeasurementPattern:
    """Parse the fixture format.

    Grammar (one directive per line, '#' starts a comment):
      input X,Y                     declares an input node (order significant)
      output X,Y                    declares an output node (order significant)
      node X,Y ROLE [DEP ...]       a measured node, in measurement order;
                                    ROLE is z | x | y | rot:<float-repr>,
                                    DEPs are X,Y coords (adaptive signs only)
      edge X1,Y1 X2,Y2              a CZ edge
      xcorr XO,YO [X,Y ...]         X-byproduct node set for output XO,YO
      zcorr XO,YO [X,Y ...]         Z-byproduct node set for output XO,YO
    Unmeasured nodes (outputs) are declared only via output lines. The
    declared unitary is not serialized; fixtures carry structure only.
    """
    inputs: list = []
    outputs: list = []
    steps: list = []
    edges: list = []
    x_corr: dict = {}
    z_corr: dict = {}
    nodes: list = []
    node_seen: set = set()

    def remember(node: Node) -> Node:
        if node not in node_seen:
            node_seen.add(node)
            nodes.append(node)
        return node

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "input":
                inputs.append(remember(_parse_c(parts[1])))
            elif parts[0] == "output":
                outputs.append(remember(_parse_c(parts[1])))
            elif parts[0] == "node":
                node = remember(_parse_c(parts[1]))
                role_txt = parts[2]
                if role_txt == "z":
                    steps.append((node, role_zelim()))
                elif role_txt == "x":
                    steps.append((node, role_x()))
                elif role_txt == "y":
                    steps.append((node, role_y()))
                elif role_txt.startswith("rot:"):
                    deps = [_parse_c(t) for t in parts[3:]]
                    steps.append((node, role_adaptive(float(role_txt[4:]), deps)))
                else:
                    raise StructuralError(f"bad role {role_txt!r}")
            elif parts[0] == "edge":
                edges.append((remember(_parse_c(parts[1])), remember(_parse_c(parts[2]))))
            elif parts[0] in ("xcorr", "zcorr"):
                out = _parse_c(parts[1])
                dep_nodes = frozenset(_parse_c(t) for t in parts[2:])
                (x_corr if parts[0] == "xcorr" else z_corr)[out] = dep_nodes
            else:
                raise StructuralError(f"unknown directive {parts[0]!r}")
        except (IndexError, ValueError) as exc:
            raise StructuralError(f"line {ln}: cannot parse {raw!r}") from exc
    return MeasurementPattern(
        graph=ClusterGraph(nodes, edges),
        inputs=inputs,
        outputs=outputs,
        steps=steps,
        x_corr=x_corr,
        z_corr=z_corr,
        declared_unitary=None,
    )


def _c(node: Node) -> str:
    return f"{node[0]},{node[1]}"


def _parse_c(token: str) -> Node:
    x, y = token.split(",")
    return (int(x), int(y))
