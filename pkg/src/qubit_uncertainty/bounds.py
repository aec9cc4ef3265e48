"""
Sum-of-standard-deviations equality and inequality, plus competing bounds.

``equality_rhs`` reproduces ``sum_m dA_m`` exactly for any qubit state;
``inequality_rhs`` drops the covariance term and is a state-dependent
lower bound. The competitors are the Schrodinger product bound, the
Maccone-Pati sum-of-variances bound (pure states), two three-observable
bounds and an N-observable bound on the sum of variances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .moments import clamp_small_negative, moment_set
from .pauli import (
    PURE_TOL,
    MixedStateError,
    as_scalar,
    bloch_array,
    coeff_array,
    observable_to_dense,
    orthogonal_pure,
    pure_ket,
    to_density,
)

SQRT3_OVER_3 = math.sqrt(3.0) / 3.0


def _obs_stack(obs_list, minimum: int = 2, exact: Optional[int] = None) -> np.ndarray:
    a = coeff_array(obs_list)
    if a.ndim < 2:
        raise ValueError("expected a list of observables")
    n = a.shape[-2]
    if exact is not None and n != exact:
        raise ValueError(f"this bound needs exactly {exact} observables, got {n}")
    if n < minimum:
        raise ValueError(f"need at least {minimum} observables, got {n}")
    return a


def _pair_sum(values: np.ndarray) -> np.ndarray:
    """Sum an (..., N, N) array over ordered pairs i != j."""
    n = values.shape[-1]
    off = ~np.eye(n, dtype=bool)
    return np.sum(np.where(off, values, 0.0), axis=(-2, -1))


def pair_brackets(obs_list, state, with_covariance: bool = True) -> np.ndarray:
    """Per ordered pair bracket ``2 sqrt(M F [+ |G|^2]) + cms_i + cms_j - zeta_ij``.

    Returned unclamped, shape (..., N, N); the diagonal is meaningless.
    """
    ms = moment_set(_obs_stack(obs_list), state)
    mf = ms.mixedness[..., None, None] * ms.commutator_measure
    if with_covariance:
        mf = mf + np.abs(ms.covariance) ** 2
    cms = ms.cms_variance
    return 2.0 * np.sqrt(mf) + cms[..., :, None] + cms[..., None, :] - ms.zeta


def _rhs(obs_list, state, with_covariance: bool):
    a = _obs_stack(obs_list)
    n = a.shape[-2]
    brackets = clamp_small_negative(pair_brackets(a, state, with_covariance))
    return as_scalar(_pair_sum(np.sqrt(brackets)) / (2.0 * (n - 1)))


def equality_rhs(obs_list, state):
    """Right side of the uncertainty equality; equals ``sum_m dA_m``."""
    return _rhs(obs_list, state, with_covariance=True)


def inequality_rhs(obs_list, state):
    """Lower bound on ``sum_m dA_m`` obtained by dropping ``|G|^2``."""
    return _rhs(obs_list, state, with_covariance=False)


def pair_lower_bound(obs_a, obs_b, state):
    """Two-observable form: ``dA + dB >= [2 sqrt(M F) + cms_A + cms_B - zeta]^(1/2)``."""
    a = np.stack([coeff_array(obs_a), coeff_array(obs_b)], axis=-2)
    return inequality_rhs(a, state)


def pair_bracket_positivity(obs_a, obs_b, state):
    """``cms_A + cms_B - zeta(A, B)``; nonnegative, and positive when [A, B] != 0."""
    a = coeff_array(obs_a)
    b = coeff_array(obs_b)
    p = bloch_array(state)
    pa = np.sum(p * a[..., :3], axis=-1)
    pb = np.sum(p * b[..., :3], axis=-1)
    total = np.sum(a[..., :3] ** 2, axis=-1) + np.sum(b[..., :3] ** 2, axis=-1)
    return as_scalar(total - pa ** 2 - pb ** 2)


def sum_stddev(obs_list, state):
    ms = moment_set(_obs_stack(obs_list), state)
    return as_scalar(np.sum(ms.stddev, axis=-1))


def sum_variance(obs_list, state):
    ms = moment_set(_obs_stack(obs_list), state)
    return as_scalar(np.sum(ms.variance, axis=-1))


def _expect(rho, op):
    return np.trace(rho @ op, axis1=-2, axis2=-1)


def sur_bound(obs_a, obs_b, state):
    """Schrodinger bound on ``dA^2 dB^2``, evaluated with dense matrices.

    ``|<[A,B]> / 2i|^2 + |<{A~, B~}> / 2|^2`` with ``O~ = O - <O>``.
    """
    A = observable_to_dense(obs_a)
    B = observable_to_dense(obs_b)
    rho = to_density(state)
    eye = np.eye(2)
    At = A - _expect(rho, A)[..., None, None] * eye
    Bt = B - _expect(rho, B)[..., None, None] * eye
    comm = _expect(rho, A @ B - B @ A) / 2j
    anti = _expect(rho, At @ Bt + Bt @ At) / 2.0
    return as_scalar(np.abs(comm) ** 2 + np.abs(anti) ** 2)


def maccone_pati_bound(obs_a, obs_b, state):
    """Maccone-Pati lower bound on ``dA^2 + dB^2`` for a pure state.

    Both sign choices ``+-i<[A,B]> + |<psi|A +- iB|psi_perp>|^2`` are
    evaluated and the larger one returned.
    """
    p = bloch_array(state)
    if np.any(np.abs(np.sum(p * p, axis=-1) - 1.0) > PURE_TOL):
        raise MixedStateError("the Maccone-Pati bound is only defined for pure states")
    A = observable_to_dense(obs_a)
    B = observable_to_dense(obs_b)
    psi = pure_ket(p)
    perp = pure_ket(orthogonal_pure(p))
    rho = to_density(p)
    i_comm = (1j * _expect(rho, A @ B - B @ A)).real
    best = None
    for sign in (1.0, -1.0):
        op = A + sign * 1j * B
        amp = np.einsum("...i,...ij,...j->...", np.conj(psi), op, perp)
        val = sign * i_comm + np.abs(amp) ** 2
        best = val if best is None else np.maximum(best, val)
    return as_scalar(best)


def _imag_cov_pairs(a, state):
    ms = moment_set(a, state)
    im = ms.covariance.imag
    return im[..., 0, 1], im[..., 1, 2], im[..., 2, 0]


def triple_bound_sum(obs_list, state):
    """``(1/3) Var(A1+A2+A3) + (sqrt3/3) |<[A1,A2] + [A2,A3] + [A3,A1]>|``."""
    a = _obs_stack(obs_list, exact=3)
    total = np.sum(a, axis=-2)
    ms = moment_set(total[..., None, :], state)
    g12, g23, g31 = _imag_cov_pairs(a, state)
    # <[Ai, Aj]> = 2i Im G(Ai, Aj)
    comm = 2.0 * np.abs(g12 + g23 + g31)
    return as_scalar(ms.variance[..., 0] / 3.0 + SQRT3_OVER_3 * comm)


def triple_bound_commutators(obs_list, state):
    """``(sqrt3/3) (|<[A1,A2]>| + |<[A2,A3]>| + |<[A3,A1]>|)``."""
    a = _obs_stack(obs_list, exact=3)
    g12, g23, g31 = _imag_cov_pairs(a, state)
    return as_scalar(SQRT3_OVER_3 * 2.0 * (np.abs(g12) + np.abs(g23) + np.abs(g31)))


def n_observable_bound(obs_list, state):
    """Lower bound on ``sum_m dA_m^2`` built from pairwise sums ``A_m + A_n``."""
    a = _obs_stack(obs_list, minimum=3)
    n = a.shape[-2]
    iu, ju = np.triu_indices(n, k=1)
    pair_ops = a[..., iu, :] + a[..., ju, :]
    ms = moment_set(pair_ops, state)
    sum_var = np.sum(ms.variance, axis=-1)
    sum_std = np.sum(ms.stddev, axis=-1)
    return as_scalar(sum_var / (n - 2) - sum_std ** 2 / ((n - 1) ** 2 * (n - 2)))


def triviality_family_state(theta):
    """Bloch vector of ``cos(theta)|1> + sin(theta)|0>``."""
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.sin(2 * theta), np.zeros_like(theta), -np.cos(2 * theta)], axis=-1)


def closed_form_curves(theta):
    """Closed forms ``(L_new, L_SUR)`` for ``A = sx``, ``B = sy`` on the family above."""
    c2 = np.cos(2 * np.asarray(theta, dtype=float)) ** 2
    return as_scalar(np.sqrt(1.0 + c2)), as_scalar(c2)


@dataclass(frozen=True)
class BoundComparison:
    """Left-hand sides and every applicable lower bound for one configuration.

    Bounds that do not apply at this N (or to a mixed state) are ``None``.
    """

    observable_count: int
    lhs_sum_stddev: float
    lhs_sum_variance: float
    equality_rhs: float
    inequality_rhs: float
    sur_bound: Optional[float] = None
    mp_bound: Optional[float] = None
    eq3_bound: Optional[float] = None
    eq4_bound: Optional[float] = None
    eq5_bound: Optional[float] = None
    lhs_variance_product: Optional[float] = None


def compare(obs_list, state) -> BoundComparison:
    a = _obs_stack(obs_list)
    if a.ndim != 2:
        raise ValueError("compare() takes a single configuration, not a batch")
    n = a.shape[0]
    ms = moment_set(a, state)
    p = bloch_array(state)
    pure = abs(float(np.dot(p, p)) - 1.0) <= PURE_TOL
    extra = {}
    if n == 2:
        extra["sur_bound"] = float(sur_bound(a[0], a[1], p))
        extra["lhs_variance_product"] = float(ms.variance[0] * ms.variance[1])
        if pure:
            extra["mp_bound"] = float(maccone_pati_bound(a[0], a[1], p))
    if n == 3:
        extra["eq3_bound"] = float(triple_bound_sum(a, p))
        extra["eq4_bound"] = float(triple_bound_commutators(a, p))
    if n >= 3:
        extra["eq5_bound"] = float(n_observable_bound(a, p))
    return BoundComparison(
        observable_count=n,
        lhs_sum_stddev=float(np.sum(ms.stddev)),
        lhs_sum_variance=float(np.sum(ms.variance)),
        equality_rhs=float(equality_rhs(a, p)),
        inequality_rhs=float(inequality_rhs(a, p)),
        **extra,
    )
