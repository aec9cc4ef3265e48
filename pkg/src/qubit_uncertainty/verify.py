"""Randomized property suite behind ``qubit-uncertainty verify``."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from . import bounds
from .estimator import exact_mixedness
from .moments import dense_moments, moment_set
from .pauli import random_sample

N_VALUES = (2, 3, 4, 5)
COEFF_RANGE = (-2.0, 2.0)
NONCOMMUTING_F = 1e-6

MOMENT_FIELDS = ("mean", "variance", "stddev", "cms_variance", "covariance",
                 "commutator_measure", "zeta", "mixedness")


@dataclass
class Batch:
    """Random configurations sharing one observable count."""

    observables: np.ndarray   # (K, N, 4)
    states: np.ndarray        # (K, 3)
    pure: np.ndarray          # (K,) bool


def random_batches(rng: np.random.Generator, trials: int, n_values=N_VALUES,
                   coeff_range=COEFF_RANGE) -> List[Batch]:
    """Split ``trials`` configurations evenly over ``n_values``.

    Half the states in each batch are uniform over the Bloch ball, half
    uniform on the sphere.
    """
    out = []
    counts = np.full(len(n_values), trials // len(n_values))
    counts[: trials % len(n_values)] += 1
    for n, k in zip(n_values, counts):
        if k == 0:
            continue
        obs = rng.uniform(*coeff_range, size=(k, n, 4))
        n_pure = k // 2
        states = np.concatenate([random_sample(rng, "ball", k - n_pure),
                                 random_sample(rng, "pure", n_pure)])
        pure = np.arange(k) >= k - n_pure
        out.append(Batch(obs, states, pure))
    return out


def eigenstate_pairs(rng: np.random.Generator, trials: int, coeff_range=COEFF_RANGE) -> Batch:
    """Random pairs with states mixing ball, sphere and +-eigenstates of A.

    Eigenstates of ``A`` zero the covariance, which is where product-form
    bounds become trivial.
    """
    obs = rng.uniform(*coeff_range, size=(trials, 2, 4))
    kind = rng.integers(0, 3, size=trials)
    axis = obs[:, 0, :3] / np.linalg.norm(obs[:, 0, :3], axis=-1, keepdims=True)
    sign = rng.choice([-1.0, 1.0], size=(trials, 1))
    states = np.where((kind == 0)[:, None], random_sample(rng, "ball", trials),
                      np.where((kind == 1)[:, None], random_sample(rng, "pure", trials), sign * axis))
    return Batch(obs, states, kind != 0)


@dataclass
class PropertyResult:
    name: str
    worst: float
    tolerance: float
    passed: bool
    description: str
    witness: Optional[dict] = field(default=None)


def _rel(x, scale):
    return np.abs(x) / np.maximum(1.0, np.abs(scale))


# Each check maps a batch to a per-configuration violation; the property
# passes when every violation is <= tolerance.

def equality_residual(b: Batch) -> np.ndarray:
    lhs = bounds.sum_stddev(b.observables, b.states)
    return _rel(lhs - bounds.equality_rhs(b.observables, b.states), lhs)


def dominance_excess(b: Batch) -> np.ndarray:
    lhs = bounds.sum_stddev(b.observables, b.states)
    return (np.asarray(bounds.inequality_rhs(b.observables, b.states)) - lhs) / np.maximum(1.0, lhs)


def oracle_mismatch(b: Batch) -> np.ndarray:
    ms = moment_set(b.observables, b.states)
    dm = dense_moments(b.observables, b.states)
    worst = np.zeros(b.states.shape[0])
    for name in MOMENT_FIELDS:
        x, y = np.asarray(getattr(ms, name)), np.asarray(getattr(dm, name))
        err = _rel(x - y, y)
        worst = np.maximum(worst, err.reshape(err.shape[0], -1).max(axis=-1))
    return worst


def covariance_identity_residual(b: Batch) -> np.ndarray:
    ms = moment_set(b.observables[:, :2], b.states)
    prod = ms.variance[:, 0] * ms.variance[:, 1]
    rhs = ms.mixedness * ms.commutator_measure[:, 0, 1] + np.abs(ms.covariance[:, 0, 1]) ** 2
    return _rel(prod - rhs, prod)


def competitor_excess(b: Batch) -> np.ndarray:
    a, p = b.observables, b.states
    n = a.shape[1]
    ms = moment_set(a, p)
    sv = np.sum(ms.variance, axis=-1)
    excess = np.full(p.shape[0], -np.inf)
    if n == 2:
        prod = ms.variance[:, 0] * ms.variance[:, 1]
        excess = np.maximum(excess, bounds.sur_bound(a[:, 0], a[:, 1], p) - prod)
        if b.pure.any():
            mp = bounds.maccone_pati_bound(a[b.pure, 0], a[b.pure, 1], p[b.pure])
            excess[b.pure] = np.maximum(excess[b.pure], mp - sv[b.pure])
    if n == 3:
        excess = np.maximum(excess, bounds.triple_bound_sum(a, p) - sv)
        excess = np.maximum(excess, bounds.triple_bound_commutators(a, p) - sv)
    if n >= 3:
        excess = np.maximum(excess, bounds.n_observable_bound(a, p) - sv)
    return excess


def triviality_shortfall(b: Batch) -> np.ndarray:
    """Negative of the smaller of the pair bound and the bracket (>= 0 means failure)."""
    a, p = b.observables, b.states
    fmeas = np.asarray(moment_set(a, p).commutator_measure[:, 0, 1])
    keep = fmeas > NONCOMMUTING_F
    lower = np.asarray(bounds.pair_lower_bound(a[:, 0], a[:, 1], p))
    bracket = np.asarray(bounds.pair_bracket_positivity(a[:, 0], a[:, 1], p))
    return np.where(keep, -np.minimum(lower, bracket), -np.inf)


def inversion_residual(b: Batch) -> np.ndarray:
    a, p = b.observables, b.states
    out = np.full(p.shape[0], -np.inf)
    ms = moment_set(a[:, :2], p)
    keep = ms.commutator_measure[:, 0, 1] > NONCOMMUTING_F
    if keep.any():
        m = exact_mixedness(a[keep, 0], a[keep, 1], p[keep])
        out[keep] = np.abs(m - ms.mixedness[keep])
    return out


PROPERTIES: Dict[str, tuple] = {
    # name: (check, tolerance, strict, description)
    "equality": (equality_residual, 1e-10, False, "|sum dA - equality rhs| / max(1, sum dA)"),
    "dominance": (dominance_excess, 1e-12, False, "(inequality rhs - sum dA) / max(1, sum dA)"),
    "oracle": (oracle_mismatch, 1e-12, False, "closed form vs dense traces, max abs-or-rel error"),
    "covariance_identity": (covariance_identity_residual, 1e-12, False,
                            "dA^2 dB^2 - (M F + |G|^2), relative"),
    "competitors": (competitor_excess, 1e-10, False, "max(bound - lhs) over competing bounds"),
    "inversion": (inversion_residual, 1e-10, False, "|mixedness from inversion - (1 - |p|^2)/2|"),
    "triviality": (triviality_shortfall, 0.0, True, "-min(pair bound, bracket) for F > 1e-6"),
}


def _witness(b: Batch, k: int, name: str, value: float) -> dict:
    return {
        "property": name,
        "observables": b.observables[k].tolist(),
        "state": b.states[k].tolist(),
        "pure": bool(b.pure[k]),
        "violation": float(value),
    }


def run_suite(trials: int, seed: int = 0, names=None) -> List[PropertyResult]:
    """Run every property over ``trials`` seeded random configurations."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    batches = random_batches(rng, trials)
    pairs = eigenstate_pairs(rng, trials)
    pair_batches = [b for b in batches if b.observables.shape[1] == 2]
    results = []
    for name, (check, tol, strict, desc) in PROPERTIES.items():
        if names is not None and name not in names:
            continue
        if name == "triviality":
            pool = [pairs]
        elif name in ("covariance_identity", "inversion"):
            pool = pair_batches or batches
        else:
            pool = batches
        worst, witness = -np.inf, None
        for b in pool:
            v = check(b)
            k = int(np.argmax(v))
            if v[k] > worst:
                worst, witness = float(v[k]), _witness(b, k, name, v[k])
        passed = worst < tol if strict else worst <= tol
        results.append(PropertyResult(name, worst, tol, bool(passed), desc,
                                      None if passed else witness))
    return results


def replay(witness: dict) -> float:
    """Recompute the violation stored in a serialized failing configuration."""
    name = witness["property"]
    check: Callable = PROPERTIES[name][0]
    b = Batch(np.array([witness["observables"]], dtype=float),
              np.array([witness["state"]], dtype=float),
              np.array([witness.get("pure", False)]))
    return float(check(b)[0])
