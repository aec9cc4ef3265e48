"""
Tightness ratios and the state sweeps behind the three reference figures.

A tightness ratio is a left-hand side divided by its own lower bound, so 1
means saturation. Ratios whose bound vanishes are reported as ``None``
rather than infinity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import bounds
from .moments import moment_set
from .pauli import SX, SY, SZ, bloch_array, coeff_array

UNDEFINED_TOL = 1e-12

PAULI_TRIPLE = np.array([SX.as_array(), SY.as_array(), SZ.as_array()])
PAULI_PAIR = PAULI_TRIPLE[:2]


@dataclass(frozen=True)
class TightnessRatios:
    t1: Optional[float] = None
    t2: Optional[float] = None
    t3: Optional[float] = None
    t4: Optional[float] = None

    def as_tuple(self):
        return (self.t1, self.t2, self.t3, self.t4)


def _ratio(num, den):
    """Elementwise ``num / den`` with NaN wherever ``den <= UNDEFINED_TOL``."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    ok = den > UNDEFINED_TOL
    return np.where(ok, num / np.where(ok, den, 1.0), np.nan)


def _opt(x) -> Optional[float]:
    x = float(x)
    return None if math.isnan(x) else x


def _evaluate(obs_list, states) -> dict:
    """Left-hand sides, bounds and ratios as arrays; NaN marks absent values."""
    a = coeff_array(obs_list)
    states = np.asarray(states, dtype=float)
    a = np.broadcast_to(a, states.shape[:-1] + a.shape[-2:])
    n = a.shape[-2]
    ms = moment_set(a, states)
    lhs_std = np.sum(ms.stddev, axis=-1)
    lhs_var = np.sum(ms.variance, axis=-1)
    nan = np.full(states.shape[:-1], np.nan)

    rhs14 = np.asarray(bounds.inequality_rhs(a, states), dtype=float)
    rhs3 = bounds.triple_bound_sum(a, states) if n == 3 else nan
    rhs4 = bounds.triple_bound_commutators(a, states) if n == 3 else nan
    rhs5 = bounds.n_observable_bound(a, states) if n >= 3 else nan
    return {
        "lhs_sum_std": lhs_std,
        "lhs_sum_var": lhs_var,
        "rhs_eq14": rhs14,
        "rhs_eq3": np.asarray(rhs3, dtype=float),
        "rhs_eq4": np.asarray(rhs4, dtype=float),
        "rhs_eq5": np.asarray(rhs5, dtype=float),
        "t1": _ratio(lhs_std, rhs14),
        "t2": _ratio(lhs_var, rhs3),
        "t3": _ratio(lhs_var, rhs4),
        "t4": _ratio(lhs_var, rhs5),
    }


def tightness(obs_list, state) -> TightnessRatios:
    """Tightness of the new inequality (t1) and of the three competitors.

    t2 and t3 need exactly three observables, t4 at least three; otherwise
    they are ``None``, as is any ratio whose bound is not positive.
    """
    values = _evaluate(obs_list, bloch_array(state))
    return TightnessRatios(*(_opt(values[k]) for k in ("t1", "t2", "t3", "t4")))


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    steps: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class SweepPoint:
    gamma: float
    theta: float
    phi: float
    mixedness: float
    ratios: TightnessRatios
    lhs_sum_std: float
    lhs_sum_var: float
    rhs_eq14: float
    rhs_eq3: Optional[float] = None
    rhs_eq4: Optional[float] = None
    rhs_eq5: Optional[float] = None
    extras: dict = field(default_factory=dict)


@dataclass
class SweepGrid:
    name: str
    axes: List[Axis]
    points: List[SweepPoint]

    def column(self, key: str) -> np.ndarray:
        """Pull one field (or ratio ``t1``..``t4``) as a float array, NaN for ``None``."""
        out = []
        for pt in self.points:
            if key in ("t1", "t2", "t3", "t4"):
                v = getattr(pt.ratios, key)
            elif key in pt.extras:
                v = pt.extras[key]
            else:
                v = getattr(pt, key)
            out.append(np.nan if v is None else v)
        return np.array(out, dtype=float)


def spherical_state(gamma, theta, phi) -> np.ndarray:
    """``gamma (sin t cos f, sin t sin f, cos t)``, broadcasting over inputs."""
    gamma, theta, phi = np.broadcast_arrays(
        np.asarray(gamma, float), np.asarray(theta, float), np.asarray(phi, float)
    )
    return gamma[..., None] * np.stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1
    )


def _points(gamma, theta, phi, obs) -> List[SweepPoint]:
    states = spherical_state(gamma, theta, phi)
    vals = _evaluate(obs, states)
    gamma, theta, phi = np.broadcast_arrays(gamma, theta, phi)
    mix = (1.0 - gamma ** 2) / 2.0
    points = []
    for k in range(states.shape[0]):
        points.append(SweepPoint(
            gamma=float(gamma[k]),
            theta=float(theta[k]),
            phi=float(phi[k]),
            mixedness=float(mix[k]),
            ratios=TightnessRatios(*(_opt(vals[t][k]) for t in ("t1", "t2", "t3", "t4"))),
            lhs_sum_std=float(vals["lhs_sum_std"][k]),
            lhs_sum_var=float(vals["lhs_sum_var"][k]),
            rhs_eq14=float(vals["rhs_eq14"][k]),
            rhs_eq3=_opt(vals["rhs_eq3"][k]),
            rhs_eq4=_opt(vals["rhs_eq4"][k]),
            rhs_eq5=_opt(vals["rhs_eq5"][k]),
        ))
    return points


def _check_steps(*steps):
    for s in steps:
        if int(s) < 2:
            raise ValueError(f"sweeps need at least 2 steps per axis, got {s}")


def sweep_fig1(gamma: float = math.sqrt(0.8), theta_steps: int = 64, phi_steps: int = 64,
               observables=PAULI_TRIPLE) -> SweepGrid:
    """Fixed Bloch radius ``gamma``; theta and phi each swept over [0, pi]."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    _check_steps(theta_steps, phi_steps)
    axes = [Axis("theta", 0.0, math.pi, int(theta_steps)), Axis("phi", 0.0, math.pi, int(phi_steps))]
    th, ph = np.meshgrid(axes[0].values(), axes[1].values(), indexing="ij")
    g = np.full(th.size, float(gamma))
    return SweepGrid("fig1", axes, _points(g, th.ravel(), ph.ravel(), observables))


def fig2_gamma(m):
    """Bloch radius giving mixedness ``m``."""
    return np.sqrt(np.clip(1.0 - 2.0 * np.asarray(m, dtype=float), 0.0, None))


def sweep_fig2(theta: float = 3 * math.pi / 4, phi: float = math.pi / 4, m_steps: int = 64,
               observables=PAULI_TRIPLE, m_values=None) -> SweepGrid:
    """Fixed direction ``(theta, phi)``, mixedness swept over [0, 1/2].

    ``m_values`` replaces the uniform grid when the caller needs specific
    mixedness levels.
    """
    if m_values is None:
        _check_steps(m_steps)
        axis = Axis("mixedness", 0.0, 0.5, int(m_steps))
        m = axis.values()
    else:
        m = np.asarray(m_values, dtype=float)
        if np.any((m < 0) | (m > 0.5)):
            raise ValueError("mixedness values must lie in [0, 1/2]")
        axis = Axis("mixedness", float(m.min()), float(m.max()), int(m.size))
    g = fig2_gamma(m)
    th = np.full(m.size, float(theta))
    ph = np.full(m.size, float(phi))
    pts = _points(g, th, ph, observables)
    # report the requested mixedness rather than one recomputed through sqrt
    pts = [SweepPoint(**{**pt.__dict__, "mixedness": float(mk)}) for pt, mk in zip(pts, m)]
    return SweepGrid("fig2", [axis], pts)


def sweep_fig3(theta_steps: int = 64) -> SweepGrid:
    """``sx``, ``sy`` on ``cos(t)|1> + sin(t)|0>`` for t in [0, pi].

    Each point carries the two-observable bound and the Schrodinger bound
    from the general code path next to their closed forms.
    """
    _check_steps(theta_steps)
    axis = Axis("theta", 0.0, math.pi, int(theta_steps))
    t = axis.values()
    states = bounds.triviality_family_state(t)
    obs = np.broadcast_to(PAULI_PAIR, (t.size, 2, 4))
    l_new = np.asarray(bounds.inequality_rhs(obs, states))
    l_sur = np.asarray(bounds.sur_bound(PAULI_PAIR[0], PAULI_PAIR[1], states))
    l_new_cf, l_sur_cf = (np.asarray(x) for x in bounds.closed_form_curves(t))
    vals = _evaluate(obs, states)
    points = []
    for k in range(t.size):
        points.append(SweepPoint(
            gamma=1.0,
            theta=float(t[k]),
            phi=0.0,
            mixedness=0.0,
            ratios=TightnessRatios(t1=_opt(vals["t1"][k])),
            lhs_sum_std=float(vals["lhs_sum_std"][k]),
            lhs_sum_var=float(vals["lhs_sum_var"][k]),
            rhs_eq14=float(vals["rhs_eq14"][k]),
            extras={
                "L_new": float(l_new[k]),
                "L_SUR": float(l_sur[k]),
                "L_new_closed": float(l_new_cf[k]),
                "L_SUR_closed": float(l_sur_cf[k]),
            },
        ))
    return SweepGrid("fig3", [axis], points)
