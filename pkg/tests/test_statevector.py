"""Statevector layer: gate algebra, destructive measurement, density tools.

Expected values come from independent oracles computed inside each test
(explicit matrix-vector products, einsum partial traces, eigenvalue sums),
not from the module under test.
"""

import cmath
import math

import numpy as np
import pytest

from blindprep import statevector as sv
from blindprep.errors import (
    ContractViolation,
    DegenerateBranchError,
    InputError,
    SequencingError,
)

ATOL = 1e-12


# ------------------------------------------------------------ gate algebra


def test_pauli_matrices_match_standard_entries():
    assert np.array_equal(sv.X.matrix, np.array([[0, 1], [1, 0]], dtype=complex))
    assert np.array_equal(sv.Y.matrix, np.array([[0, -1j], [1j, 0]], dtype=complex))
    assert np.array_equal(sv.Z.matrix, np.array([[1, 0], [0, -1]], dtype=complex))


def test_pauli_products():
    x, y, z = sv.X.matrix, sv.Y.matrix, sv.Z.matrix
    assert np.allclose(x @ z, -1j * y, atol=ATOL)
    for p in (x, y, z):
        assert np.allclose(p @ p, np.eye(2), atol=ATOL)


@pytest.mark.parametrize("g", [sv.I2, sv.X, sv.Y, sv.Z, sv.H, sv.S, sv.CZ, sv.CNOT, sv.rz(0.7)])
def test_gates_unitary(g):
    m = g.matrix
    assert np.allclose(m @ m.conj().T, np.eye(m.shape[0]), atol=1e-12)


def test_cz_symmetric():
    assert np.array_equal(sv.CZ.matrix, sv.CZ.matrix.T)


def test_nonunitary_matrix_rejected():
    with pytest.raises(InputError):
        sv.Gate("bad", np.array([[1, 0], [0, 2]]))


# ------------------------------------------------------------ constructors


def test_plus_theta_at_half_pi():
    s = sv.new_plus_theta(math.pi / 2)
    want = np.array([1.0, 1j]) / math.sqrt(2)
    assert np.allclose(s.vector(), want, atol=ATOL)


def test_basis_state_bits():
    s = sv.new_basis_state(3, [1, 0, 1])
    v = s.vector()
    assert v[0b101] == 1.0 and np.count_nonzero(v) == 1


def test_basis_state_int_form():
    assert np.allclose(sv.new_basis_state(3, 5).vector(), sv.new_basis_state(3, [1, 0, 1]).vector())


def test_qubit_cap_enforced():
    with pytest.raises(InputError):
        sv.new_basis_state(sv.QUBIT_CAP + 1)


def test_duplicate_labels_rejected():
    with pytest.raises(InputError):
        sv.PureState(np.array([[1, 0], [0, 0]], dtype=complex) / 1.0, ["a", "a"])


# -------------------------------------------------------------- apply_gate


def test_cz_on_plus_plus_matches_matrix_oracle():
    s = sv.tensor(sv.new_plus_theta(0.0, "a"), sv.new_plus_theta(0.0, "b"))
    got = sv.apply_gate(s, sv.CZ, ["a", "b"]).vector()
    # oracle: explicit 4x4 matrix times the |++> vector
    cz = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
    want = cz @ (np.ones(4, dtype=complex) / 2)
    assert np.allclose(got, want, atol=ATOL)


def test_gate_on_missing_qubit_is_sequencing_error():
    s = sv.new_basis_state(1)
    with pytest.raises(SequencingError):
        sv.apply_gate(s, sv.X, ["nope"])


def test_two_qubit_gate_axis_order():
    # CNOT with control "c", target "t" on |10> -> |11>, regardless of storage order
    s = sv.tensor(sv.new_basis_state(1, [0], labels=["t"]), sv.new_basis_state(1, [1], labels=["c"]))
    out = sv.apply_gate(s, sv.CNOT, ["c", "t"])
    assert abs(out.vector(order=["c", "t"])[0b11]) == pytest.approx(1.0, abs=ATOL)


def test_rz_acts_as_phase_on_one():
    s = sv.new_plus_theta(0.0)
    out = sv.apply_gate(s, sv.rz(0.3), [0])
    want = np.array([1.0, cmath.exp(0.3j)]) / math.sqrt(2)
    assert np.allclose(out.vector(), want, atol=ATOL)


# ----------------------------------------------------------------- measure


def test_measure_plus_in_x_basis_is_deterministic():
    s = sv.new_plus_theta(0.0)
    outcome, prob, rest = sv.measure(s, 0, sv.rotated(0.0), sv.ForcedBranch([0]))
    assert outcome == 0
    assert prob == pytest.approx(1.0, abs=ATOL)
    assert rest.n == 0


def test_measure_zero_in_x_basis_is_even():
    for bit in (0, 1):
        _, prob, _ = sv.measure(sv.new_basis_state(1), 0, sv.rotated(0.0), sv.ForcedBranch([bit]))
        assert prob == pytest.approx(0.5, abs=ATOL)


def test_branch_probabilities_sum_to_one():
    rng = np.random.default_rng(7)
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    v /= np.linalg.norm(v)
    s = sv.PureState(v.reshape(2, 2, 2), ["a", "b", "c"])
    for basis in (sv.COMPUTATIONAL, sv.rotated(0.0), sv.rotated(1.234)):
        _, p0, _ = sv.measure(s, "b", basis, sv.ForcedBranch([0]))
        _, p1, _ = sv.measure(s, "b", basis, sv.ForcedBranch([1]))
        assert p0 + p1 == pytest.approx(1.0, abs=1e-12)


def test_measure_is_destructive_and_renormalized():
    s = sv.tensor(sv.new_plus_theta(0.4, "d"), sv.new_basis_state(1, [0], labels=["anc"]))
    outcome, prob, rest = sv.measure(s, "anc", sv.COMPUTATIONAL, sv.ForcedBranch([0]))
    assert rest.labels == ["d"]
    assert np.vdot(rest.vector(), rest.vector()).real == pytest.approx(1.0, abs=ATOL)
    with pytest.raises(SequencingError):
        sv.measure(rest, "anc", sv.COMPUTATIONAL, sv.ForcedBranch([0]))


def test_forced_impossible_branch_raises():
    s = sv.new_basis_state(1, [0])
    with pytest.raises(DegenerateBranchError):
        sv.measure(s, 0, sv.COMPUTATIONAL, sv.ForcedBranch([1]))


def test_rotated_basis_projects_correctly():
    # |+_theta> measured in Rotated(theta) must give + deterministically
    theta = 2.1
    s = sv.new_plus_theta(theta)
    outcome, prob, _ = sv.measure(s, 0, sv.rotated(theta), sv.ForcedBranch([0]))
    assert prob == pytest.approx(1.0, abs=ATOL)


def test_born_sampler_reproducible():
    def run(seed):
        src = sv.BornSampler(seed)
        bits = []
        for _ in range(20):
            outcome, _, _ = sv.measure(sv.new_basis_state(1), 0, sv.rotated(0.0), src)
            bits.append(outcome)
        return bits

    assert run(123) == run(123)
    assert run(123) != run(124)  # astronomically unlikely to collide


# ------------------------------------------------------- density utilities


def _einsum_partial_trace(vec, n, keep):
    """Independent partial-trace oracle over a flat 2^n vector."""
    t = vec.reshape((2,) * n)
    rho = np.tensordot(t, t.conj(), axes=0)  # shape (2,)*2n
    # trace out everything not kept, pairing axis i with axis n+i
    drop = [i for i in range(n) if i not in keep]
    for d in sorted(drop, reverse=True):
        rho = np.trace(rho, axis1=d, axis2=d + (rho.ndim // 2))
    k = len(keep)
    return rho.reshape(2**k, 2**k)


def test_reduced_density_of_min_cluster_is_maximally_mixed():
    # CZ(|+_theta> (x) |+>), keep the second qubit -> I/2
    theta = math.pi / 4
    s = sv.tensor(sv.new_plus_theta(theta, "n1"), sv.new_plus_theta(0.0, "n2"))
    s = sv.apply_gate(s, sv.CZ, ["n1", "n2"])
    got = sv.reduced_density(s, ["n2"]).matrix
    want = _einsum_partial_trace(s.vector(order=["n1", "n2"]), 2, keep=[1])
    assert np.allclose(got, want, atol=ATOL)
    assert np.allclose(got, np.eye(2) / 2, atol=ATOL)


def test_reduced_density_axis_order():
    s = sv.new_basis_state(2, [0, 1], labels=["p", "q"])
    rho = sv.reduced_density(s, ["q", "p"])
    # |01> with axes (q,p) -> basis index 0b10
    assert rho.matrix[0b10, 0b10] == pytest.approx(1.0, abs=ATOL)


def test_density_validation_rejects_bad_matrices():
    with pytest.raises(InputError):
        sv.DensityMatrix(np.array([[0.5, 0.5], [0.4, 0.5]]), ["a"])  # not Hermitian
    with pytest.raises(InputError):
        sv.DensityMatrix(np.eye(2), ["a"])  # trace 2
    with pytest.raises(InputError):
        sv.DensityMatrix(np.diag([1.5, -0.5]), ["a"])  # negative eigenvalue


def test_trace_distance_zero_vs_plus():
    r0 = sv.reduced_density(sv.new_basis_state(1), [0])
    rp = sv.reduced_density(sv.new_plus_theta(0.0), [0])
    got = sv.trace_distance(r0, rp)
    # oracle: eigenvalues of the explicit difference matrix
    diff = np.array([[1, 0], [0, 0]], dtype=complex) - np.array([[0.5, 0.5], [0.5, 0.5]])
    want = 0.5 * np.abs(np.linalg.eigvalsh(diff)).sum()
    assert got == pytest.approx(want, abs=ATOL)
    assert got == pytest.approx(1 / math.sqrt(2), abs=ATOL)


def test_trace_distance_aligns_labels():
    s = sv.new_basis_state(2, [0, 1], labels=["a", "b"])
    r1 = sv.reduced_density(s, ["a", "b"])
    r2 = sv.reduced_density(s, ["b", "a"])
    assert sv.trace_distance(r1, r2) == pytest.approx(0.0, abs=ATOL)


# ---------------------------------------------------------------- fidelity


def test_fidelity_ignores_global_phase():
    theta = 1.9
    s1 = sv.new_plus_theta(theta)
    s2 = sv.PureState(s1.vector() * cmath.exp(0.77j), [0])
    assert sv.fidelity(s1, s2) == pytest.approx(1.0, abs=ATOL)


def test_fidelity_of_plus_and_plus_i():
    got = sv.fidelity(sv.new_plus_theta(0.0), sv.new_plus_theta(math.pi / 2))
    # oracle: |<+|+_i>|^2 computed from raw vectors
    v1 = np.array([1, 1]) / math.sqrt(2)
    v2 = np.array([1, 1j]) / math.sqrt(2)
    assert got == pytest.approx(float(abs(np.vdot(v1, v2)) ** 2), abs=ATOL)
    assert got == pytest.approx(0.5, abs=ATOL)


def test_fidelity_aligns_label_order():
    a = sv.tensor(sv.new_basis_state(1, [0], labels=["x"]), sv.new_plus_theta(0.3, "y"))
    b = sv.tensor(sv.new_plus_theta(0.3, "y"), sv.new_basis_state(1, [0], labels=["x"]))
    assert sv.fidelity(a, b) == pytest.approx(1.0, abs=ATOL)


def test_fidelity_rejects_mismatched_labels():
    with pytest.raises(InputError):
        sv.fidelity(sv.new_plus_theta(0.0, "a"), sv.new_plus_theta(0.0, "b"))


# ------------------------------------------------------------ norm guards


def test_norm_drift_detected():
    with pytest.raises(InputError):
        sv.PureState(np.array([1.0, 1.0]), [0])  # norm sqrt(2)
