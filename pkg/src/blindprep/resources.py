"""Decoy-state resource estimates for photonic remote state preparation.

The sender emits phase-randomized weak coherent pulses (signal intensity mu,
one weak decoy nu1, one vacuum decoy) through a lossy channel; only
single-photon pulses prepare honest blind qubits, so the estimates hinge on
a lower bound for the single-photon fraction p1 of detected signal pulses.

Channel model and bound (notation: T channel transmittance, Y0 dark/stray
yield, Q_x = Y0 + 1 - exp(-x T) the yield of intensity x):

    Y1 >= (mu / (mu nu1 - nu1^2)) * ( Q_nu1 e^{nu1}
          - Q_mu e^{mu} nu1^2 / mu^2 - (mu^2 - nu1^2)/mu^2 * Y0 )
    p1 >= Y1 * mu e^{-mu} / Q_mu

with the asymptotic (perfect-estimation) counterpart Y1 -> Y0 + T. The
vacuum decoy contributes only through Y0, which is why nu2 must be zero.

Pulse budget: collecting S single-photon successes with failure chance at
most eps requires

    N = ceil( (S / T) * ( ln(eps / S) / (p_mu mu ln(1 - p1)) + C ) )

where C is the extra per-success overhead of carving an encoded block out
of the cluster (C = 0 for direct, non-encoded preparation). A non-encoded
qubit must instead be repeated

    k = ln(1 - (1 - e^2)^S) / ln(1 - (1 - e)^S)

times to match the encoded block's residual error, so the quantities to
compare are N_coded against ceil(k) * N_d. Preparation efficiency is
E = S f / N for source repetition rate f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import EstimationError, InputError

__all__ = [
    "ExperimentParams",
    "ResourceRow",
    "transmittance",
    "gain",
    "p1_lower_bound",
    "p1_asymptotic",
    "pulses_needed",
    "repetition_factor",
    "efficiency",
    "estimate",
    "sweep",
    "with_overrides",
]


@dataclass(frozen=True)
class ExperimentParams:
    """Source, channel, and protocol parameters (defaults: the reference
    telecom scenario used throughout the tests)."""

    alpha_db_km: float = 0.2  # fiber loss
    t_source: float = 0.45  # source-side transmittance
    eta_det: float = 0.1  # receiver detection efficiency
    mu: float = 0.6  # signal intensity
    nu1: float = 0.125  # weak decoy intensity
    nu2: float = 0.0  # second decoy; must stay vacuum
    p_mu: float = 0.9  # emission probabilities per intensity
    p_nu1: float = 0.05
    p_nu2: float = 0.05
    successes: int = 1000  # S, single-photon qubits to collect
    eps_fail: float = 1e-10  # acceptable chance of falling short
    err_rate: float = 0.01  # per-qubit preparation error e
    block_overhead: float = 1774.0  # C, extra pulses per encoded success
    rep_rate_hz: float = 1e6  # source repetition rate f
    y0_dark: float = 0.0  # dark/stray count yield Y0

    def __post_init__(self) -> None:
        if not 0.0 < self.mu <= 1.0:
            raise InputError("signal intensity mu must lie in (0, 1]")
        if not 0.0 < self.nu1 < self.mu:
            raise InputError("weak decoy nu1 must lie strictly between 0 and mu")
        if self.nu2 != 0.0:
            raise InputError(
                "the single-photon bound implemented here assumes a vacuum "
                "second decoy (nu2 = 0)"
            )
        probs = (self.p_mu, self.p_nu1, self.p_nu2)
        if any(not 0.0 < q < 1.0 for q in probs):
            raise InputError("intensity probabilities must lie in (0, 1)")
        if abs(sum(probs) - 1.0) > 1e-12:
            raise InputError("intensity probabilities must sum to 1")
        if not 0.0 < self.t_source <= 1.0 or not 0.0 < self.eta_det <= 1.0:
            raise InputError("transmittance factors must lie in (0, 1]")
        if self.alpha_db_km < 0.0:
            raise InputError("fiber loss cannot be negative")
        if self.successes < 1:
            raise InputError("need at least one success")
        if not 0.0 < self.eps_fail < 1.0:
            raise InputError("failure budget must lie in (0, 1)")
        if not 0.0 < self.err_rate < 1.0:
            raise InputError("error rate must lie in (0, 1)")
        if self.block_overhead < 0.0:
            raise InputError("block overhead cannot be negative")
        if self.rep_rate_hz <= 0.0:
            raise InputError("repetition rate must be positive")
        if not 0.0 <= self.y0_dark < 1.0:
            raise InputError("dark yield must lie in [0, 1)")


def transmittance(length_km: float, p: ExperimentParams) -> float:
    """End-to-end transmittance of length_km of fiber plus fixed losses."""
    if length_km < 0.0:
        raise InputError("fiber length cannot be negative")
    return p.t_source * p.eta_det * 10.0 ** (-p.alpha_db_km * length_km / 10.0)


def gain(t: float, intensity: float, p: ExperimentParams) -> float:
    """Detection probability of a pulse with the given mean photon number."""
    # expm1 keeps the full relative precision of 1 - exp(-x) when x*T is tiny
    # (long fibers drive it below 1e-5, where the subtraction loses digits).
    return p.y0_dark - math.expm1(-intensity * t)


def p1_lower_bound(t: float, p: ExperimentParams) -> float:
    """Weak+vacuum decoy lower bound on the single-photon fraction of
    detected signal pulses; raises EstimationError when the bound is vacuous."""
    q_mu = gain(t, p.mu, p)
    if q_mu <= 0.0:
        raise EstimationError(
            f"no detected signal events at T = {t:.6g}: channel is opaque"
        )
    q_nu1 = gain(t, p.nu1, p)
    y1 = (p.mu / (p.mu * p.nu1 - p.nu1**2)) * (
        q_nu1 * math.exp(p.nu1)
        - q_mu * math.exp(p.mu) * p.nu1**2 / p.mu**2
        - (p.mu**2 - p.nu1**2) / p.mu**2 * p.y0_dark
    )
    p1 = y1 * p.mu * math.exp(-p.mu) / q_mu
    if not 0.0 < p1 < 1.0:
        raise EstimationError(
            f"single-photon bound left (0, 1): p1 = {p1:.6g} at T = {t:.6g}"
        )
    return p1


def p1_asymptotic(t: float, p: ExperimentParams) -> float:
    """Single-photon fraction with perfectly known yields (Y1 = Y0 + T)."""
    q_mu = gain(t, p.mu, p)
    if q_mu <= 0.0:
        raise EstimationError(
            f"no detected signal events at T = {t:.6g}: channel is opaque"
        )
    p1 = (p.y0_dark + t) * p.mu * math.exp(-p.mu) / q_mu
    if not 0.0 < p1 < 1.0:
        raise EstimationError(
            f"asymptotic single-photon fraction left (0, 1): p1 = {p1:.6g}"
        )
    return p1


def pulses_needed(t: float, p1: float, p: ExperimentParams, overhead: float) -> int:
    """Total pulses to collect `successes` single-photon qubits except with
    probability eps_fail, including `overhead` extra pulses per success."""
    raw = (p.successes / t) * (
        math.log(p.eps_fail / p.successes) / (p.p_mu * p.mu * math.log1p(-p1))
        + overhead
    )
    if not math.isfinite(raw) or raw <= 0.0:
        raise EstimationError(f"pulse count came out non-physical: {raw!r}")
    return math.ceil(raw)


def repetition_factor(p: ExperimentParams) -> float:
    """How many times a bare qubit must be re-prepared for its residual error
    to match one error-corrected block of the same size."""
    # log1p(-exp(x)) rather than log(-expm1(x)): when (1 - err)^S sits within
    # a few ulps of 1 the latter takes log of a near-1 float and drops three
    # digits of the quotient.
    coded = math.log1p(-math.exp(p.successes * math.log1p(-p.err_rate**2)))
    bare = math.log1p(-math.exp(p.successes * math.log1p(-p.err_rate)))
    return coded / bare


def efficiency(n_pulses: float, p: ExperimentParams) -> float:
    """Prepared qubits per second: S f / N."""
    if n_pulses <= 0:
        raise EstimationError("efficiency needs a positive pulse count")
    return p.successes * p.rep_rate_hz / n_pulses


@dataclass(frozen=True)
class ResourceRow:
    """One fiber length's worth of estimates (the CSV row of the CLI)."""

    length_km: float
    t: float
    p1_lower: float
    n_coded: int
    n_direct: int
    k: float
    k_n_direct: int
    n_asym: int
    e_coded: float
    e_direct_k: float
    e_asym: float


def estimate(length_km: float, p: ExperimentParams) -> ResourceRow:
    """Full estimate at one fiber length; raises EstimationError when any
    bound degenerates."""
    t = transmittance(length_km, p)
    p1 = p1_lower_bound(t, p)
    p1_inf = p1_asymptotic(t, p)
    n_coded = pulses_needed(t, p1, p, p.block_overhead)
    n_direct = pulses_needed(t, p1, p, 0.0)
    n_asym = pulses_needed(t, p1_inf, p, 0.0)
    k = repetition_factor(p)
    k_n_direct = math.ceil(k) * n_direct
    return ResourceRow(
        length_km=length_km,
        t=t,
        p1_lower=p1,
        n_coded=n_coded,
        n_direct=n_direct,
        k=k,
        k_n_direct=k_n_direct,
        n_asym=n_asym,
        e_coded=efficiency(n_coded, p),
        e_direct_k=efficiency(k_n_direct, p),
        e_asym=efficiency(n_asym, p),
    )


def sweep(lengths_km, p: ExperimentParams) -> list:
    """Estimate each length; failed rows come back as (length, None, reason)."""
    out = []
    for length in lengths_km:
        try:
            out.append((float(length), estimate(float(length), p), None))
        except EstimationError as exc:
            out.append((float(length), None, str(exc)))
    return out


def with_overrides(p: ExperimentParams, **kwargs) -> ExperimentParams:
    """A copy of p with the given fields replaced (validation re-runs)."""
    return replace(p, **kwargs)
