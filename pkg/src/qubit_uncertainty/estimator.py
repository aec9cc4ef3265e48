"""
Mixedness from measurement statistics.

Inverting the two-observable equality gives

    M = [((dA + dB)^2 - cms_A - cms_B + zeta)^2 - 4 |G|^2] / (4 F)

where only ``dA``, ``dB``, ``zeta`` and the covariance ``G`` depend on the
state. Those are estimated from four projective measurement settings:
``A``, ``B``, ``A + B`` (real part of G through the anticommutator) and
``C = (a x b) . sigma`` (imaginary part of G, since ``[A, B] = 2i C``).
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .moments import commutator_measure, covariance, mixedness, stddev, zeta, cms_variance
from .pauli import (
    DegenerateObservableError,
    PauliObservable,
    as_scalar,
    bloch_array,
    coeff_array,
    eigensystem,
)

log = logging.getLogger(__name__)

COMMUTING_TOL = 1e-9
MIN_RECOMMENDED_SHOTS = 100


class CommutingPairError(ValueError):
    """F([A, B]) ~ 0: the pair carries no information about the mixedness."""


def check_pair(obs_a, obs_b):
    """Return F([A, B]); raise :class:`CommutingPairError` when it vanishes."""
    return _require_noncommuting(obs_a, obs_b)


def _require_noncommuting(obs_a, obs_b):
    f = commutator_measure(obs_a, obs_b)
    if np.any(np.asarray(f) <= COMMUTING_TOL):
        raise CommutingPairError(
            f"commuting pair: F([A,B]) = {np.min(f):.3g} ~ 0, mixedness cannot be recovered from it"
        )
    return f


def exact_mixedness(obs_a, obs_b, state):
    """Mixedness recovered from exact moments of a non-commuting pair.

    Broadcasts over batches; raises if any pair commutes.
    """
    f = _require_noncommuting(obs_a, obs_b)
    s = np.add(stddev(obs_a, state), stddev(obs_b, state))
    inner = s ** 2 - cms_variance(obs_a) - cms_variance(obs_b) + zeta(obs_a, obs_b, state)
    g2 = np.abs(covariance(obs_a, obs_b, state)) ** 2
    return as_scalar((inner ** 2 - 4.0 * g2) / (4.0 * f))


@dataclass(frozen=True)
class MeasurementPlan:
    setting_a: PauliObservable
    setting_b: PauliObservable
    setting_sum: PauliObservable
    setting_cross: PauliObservable

    @classmethod
    def for_pair(cls, obs_a: PauliObservable, obs_b: PauliObservable) -> "MeasurementPlan":
        c = np.cross(obs_a.vector, obs_b.vector)
        return cls(obs_a, obs_b, obs_a + obs_b, PauliObservable(*(float(x) for x in c), 0.0))

    @property
    def settings(self) -> Tuple[PauliObservable, ...]:
        return (self.setting_a, self.setting_b, self.setting_sum, self.setting_cross)


@dataclass(frozen=True)
class ShotRecord:
    observable: PauliObservable
    shots: int
    count_plus: int
    count_minus: int

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("a shot record needs at least one shot")
        if self.count_plus < 0 or self.count_minus < 0:
            raise ValueError("counts must be nonnegative")
        if self.count_plus + self.count_minus != self.shots:
            raise ValueError(
                f"counts {self.count_plus} + {self.count_minus} do not add up to {self.shots} shots"
            )


@dataclass(frozen=True)
class EstimateReport:
    m_hat: float
    interval: Tuple[float, float]
    clamped: bool
    shots_per_setting: int
    true_m: Optional[float] = None

    @property
    def abs_error(self) -> Optional[float]:
        return None if self.true_m is None else abs(self.m_hat - self.true_m)


def born_sample(obs, state, shots: int, rng: np.random.Generator) -> ShotRecord:
    """Simulate ``shots`` projective measurements of ``obs``.

    The larger eigenvalue occurs with probability ``(1 + p . a_hat) / 2``.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    if not isinstance(obs, PauliObservable):
        obs = PauliObservable(*coeff_array(obs))
    eig = eigensystem(obs)
    if eig.degenerate:
        raise DegenerateObservableError(
            "observable is a multiple of the identity: every shot gives the same outcome"
        )
    p = bloch_array(state)
    prob = 0.5 * (1.0 + float(np.dot(p, eig.axis)))
    prob = min(max(prob, 0.0), 1.0)
    plus = int(rng.binomial(int(shots), prob))
    return ShotRecord(obs, int(shots), plus, int(shots) - plus)


def variance_from_counts(record: ShotRecord) -> Tuple[float, float]:
    """Sample mean and population variance of the recorded eigenvalues."""
    mean, var = _count_moments(record.observable, record.count_plus, record.shots)
    return float(mean), float(var)


def _count_moments(obs, count_plus, shots):
    eig = eigensystem(obs)
    lp, lm = eig.lambda_plus, eig.lambda_minus
    f = np.asarray(count_plus, dtype=float) / shots
    mean = f * lp + (1.0 - f) * lm
    second = f * lp ** 2 + (1.0 - f) * lm ** 2
    return mean, np.maximum(second - mean ** 2, 0.0)


def _plug_in(plan: MeasurementPlan, plus_counts: Sequence, shots: Sequence):
    """Raw (unclamped) mixedness estimate; counts may carry a batch axis."""
    obs_a, obs_b = plan.setting_a, plan.setting_b
    mean_a, var_a = _count_moments(obs_a, plus_counts[0], shots[0])
    mean_b, var_b = _count_moments(obs_b, plus_counts[1], shots[1])
    mean_s, var_s = _count_moments(plan.setting_sum, plus_counts[2], shots[2])
    mean_c, _ = _count_moments(plan.setting_cross, plus_counts[3], shots[3])

    sq_a = var_a + mean_a ** 2
    sq_b = var_b + mean_b ** 2
    sq_s = var_s + mean_s ** 2
    re_g = 0.5 * (sq_s - sq_a - sq_b) - mean_a * mean_b
    im_g = mean_c

    zeta_hat = (mean_a - obs_a.a4) ** 2 + (mean_b - obs_b.a4) ** 2
    s = np.sqrt(var_a) + np.sqrt(var_b)
    inner = s ** 2 - cms_variance(obs_a) - cms_variance(obs_b) + zeta_hat
    f = commutator_measure(obs_a, obs_b)
    return (inner ** 2 - 4.0 * (re_g ** 2 + im_g ** 2)) / (4.0 * f)


def _plan_from_records(records: Sequence[ShotRecord]) -> MeasurementPlan:
    if len(records) != 4:
        raise ValueError(f"expected 4 shot records (A, B, A+B, C), got {len(records)}")
    plan = MeasurementPlan.for_pair(records[0].observable, records[1].observable)
    for want, rec, label in zip(plan.settings[2:], records[2:], ("A+B", "C")):
        if not np.allclose(want.as_array(), rec.observable.as_array(), rtol=0, atol=1e-9):
            raise ValueError(
                f"record for setting {label} measures {rec.observable.coefficients}, "
                f"expected {want.coefficients}"
            )
    return plan


def mixedness_from_records(records: Sequence[ShotRecord]) -> float:
    """Unclamped plug-in mixedness from the four setting records."""
    plan = _plan_from_records(records)
    _require_noncommuting(plan.setting_a, plan.setting_b)
    return float(_plug_in(plan, [r.count_plus for r in records], [r.shots for r in records]))


def estimate_from_records(records: Sequence[ShotRecord], rng: np.random.Generator,
                          resamples: int = 1000, true_m: Optional[float] = None) -> EstimateReport:
    """Clamped plug-in estimate with a 95% percentile bootstrap interval.

    Each bootstrap replicate redraws every setting's counts from a binomial
    with the observed frequency, which is the multinomial resample of a
    two-outcome table.
    """
    plan = _plan_from_records(records)
    _require_noncommuting(plan.setting_a, plan.setting_b)
    shots = [r.shots for r in records]
    plus = [r.count_plus for r in records]
    raw = float(_plug_in(plan, plus, shots))
    m_hat = min(max(raw, 0.0), 0.5)
    clamped = m_hat != raw

    if resamples < 1:
        raise ValueError("resamples must be at least 1")
    boot_counts = [rng.binomial(n, k / n, size=resamples) for n, k in zip(shots, plus)]
    boot = np.clip(_plug_in(plan, boot_counts, shots), 0.0, 0.5)
    lo, hi = np.percentile(boot, [2.5, 97.5])
    lo, hi = min(float(lo), m_hat), max(float(hi), m_hat)
    return EstimateReport(m_hat, (lo, hi), clamped, min(shots), true_m)


def simulate_records(obs_a: PauliObservable, obs_b: PauliObservable, state, shots: int,
                     rng: np.random.Generator) -> List[ShotRecord]:
    plan = MeasurementPlan.for_pair(obs_a, obs_b)
    return [born_sample(o, state, shots, rng) for o in plan.settings]


def _streams(rng):
    """Split one seed into independent sampling and bootstrap streams."""
    if isinstance(rng, np.random.Generator):
        sampling, boot = rng.spawn(2)
    else:
        sampling, boot = (np.random.default_rng(s) for s in np.random.SeedSequence(rng).spawn(2))
    return sampling, boot


def estimate_mixedness(obs_a: PauliObservable, obs_b: PauliObservable, state, shots_per_setting: int,
                       rng, resamples: int = 1000) -> EstimateReport:
    """Simulate the four-setting protocol and estimate the mixedness.

    ``rng`` may be a Generator or an integer seed. With an integer seed the
    sampling and bootstrap streams are derived from it in a fixed way, so
    :func:`estimate_from_records` on the exported records with
    ``bootstrap_stream(seed)`` reproduces the interval exactly.
    """
    _require_noncommuting(obs_a, obs_b)
    if shots_per_setting < MIN_RECOMMENDED_SHOTS:
        log.warning("only %d shots per setting; the estimate will be very noisy", shots_per_setting)
    sampling, boot = _streams(rng)
    records = simulate_records(obs_a, obs_b, state, shots_per_setting, sampling)
    return estimate_from_records(records, boot, resamples, true_m=mixedness(state))


def sampling_stream(seed: int) -> np.random.Generator:
    return _streams(seed)[0]


def bootstrap_stream(seed: int) -> np.random.Generator:
    return _streams(seed)[1]


RECORD_FIELDS = ["a1", "a2", "a3", "a4", "shots", "count_plus", "count_minus"]


def write_records(records: Iterable[ShotRecord], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(RECORD_FIELDS)
    for r in records:
        writer.writerow([f"{x:.17g}" for x in r.observable.coefficients]
                        + [r.shots, r.count_plus, r.count_minus])


def read_records(fh) -> List[ShotRecord]:
    reader = csv.DictReader(fh)
    missing = set(RECORD_FIELDS) - set(reader.fieldnames or [])
    if missing:
        raise ValueError(f"counts file is missing columns: {sorted(missing)}")
    out = []
    for lineno, row in enumerate(reader, start=2):
        try:
            obs = PauliObservable(*(float(row[k]) for k in ("a1", "a2", "a3", "a4")))
            out.append(ShotRecord(obs, int(row["shots"]), int(row["count_plus"]), int(row["count_minus"])))
        except ValueError as exc:
            raise ValueError(f"counts file line {lineno}: {exc}") from None
    return out
