"""
Second-order moments of qubit observables.

Two independent routes compute the same quantities: closed forms in
Bloch/Pauli coordinates (used everywhere downstream) and
:func:`dense_moments`, which only takes traces of 2x2 complex matrices and
serves as the oracle in tests.

All functions broadcast over leading batch axes: states are (..., 3)
arrays and observables (..., 4) arrays (or the dataclass wrappers).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import (
    as_scalar,
    bloch_array,
    coeff_array,
    observable_to_dense,
    to_density,
)

CLAMP_TOL = 1e-12
PURE_RESOLUTION = 4 * np.finfo(float).eps


def clamp_small_negative(x, tol: float = CLAMP_TOL):
    """Map rounding noise in ``[-tol, 0)`` to exactly zero.

    Values below ``-tol`` are left untouched so that genuine sign errors
    still surface as NaN under a square root.
    """
    x = np.asarray(x, dtype=float)
    return np.where((x < 0) & (x >= -tol), 0.0, x)


def _dot(p, a):
    return np.sum(p * a[..., :3], axis=-1)


def expectation(obs, state):
    """``<A> = a4 + p . a``."""
    a = coeff_array(obs)
    p = bloch_array(state)
    return as_scalar(a[..., 3] + _dot(p, a))


def variance_eq9(obs, state):
    """Variance expanded term by term in Bloch components (no clamping)."""
    a = coeff_array(obs)
    p = bloch_array(state)
    a1, a2, a3 = a[..., 0], a[..., 1], a[..., 2]
    p1, p2, p3 = p[..., 0], p[..., 1], p[..., 2]
    diag = (1 - p1 ** 2) * a1 ** 2 + (1 - p2 ** 2) * a2 ** 2 + (1 - p3 ** 2) * a3 ** 2
    cross = p2 * p3 * a2 * a3 + p1 * a1 * (p2 * a2 + p3 * a3)
    return diag - 2.0 * cross


def variance_compact(obs, state):
    """Variance as ``|a|^2 - (p . a)^2`` (no clamping)."""
    a = coeff_array(obs)
    p = bloch_array(state)
    return np.sum(a[..., :3] ** 2, axis=-1) - _dot(p, a) ** 2


def variance(obs, state):
    """Variance ``<A^2> - <A>^2`` of an observable on a state."""
    return as_scalar(clamp_small_negative(variance_eq9(obs, state)))


def stddev(obs, state):
    return as_scalar(np.sqrt(clamp_small_negative(variance_eq9(obs, state))))


def covariance(obs_a, obs_b, state):
    """Complex covariance ``<AB> - <A><B>``.

    The real part is the symmetrized covariance
    ``a.b - (p.a)(p.b)``; the imaginary part is ``p . (a x b)``, i.e.
    ``<[A, B]> / 2i``.
    """
    a = coeff_array(obs_a)
    b = coeff_array(obs_b)
    p = bloch_array(state)
    av, bv = a[..., :3], b[..., :3]
    re = np.sum(av * bv, axis=-1) - _dot(p, a) * _dot(p, b)
    im = np.sum(p * np.cross(av, bv), axis=-1)
    return as_scalar(re + 1j * im)


def commutator_measure(obs_a, obs_b):
    """``tr([A,B][A,B]^dagger) / 4 = 2 |a x b|^2``; independent of the state."""
    a = coeff_array(obs_a)
    b = coeff_array(obs_b)
    c = np.cross(a[..., :3], b[..., :3])
    return as_scalar(2.0 * np.sum(c * c, axis=-1))


def mixedness(state):
    """``1 - tr(rho^2) = (1 - |p|^2) / 2``.

    Values within a few ulps of zero are rounding in ``|p|^2`` and are
    returned as exactly 0. Without this a unit Bloch vector can report
    M ~ 1e-16, and ``sqrt(M F)`` in the bounds turns that into a 1e-8 error.
    """
    p = bloch_array(state)
    m = clamp_small_negative(0.5 * (1.0 - np.sum(p * p, axis=-1)))
    return as_scalar(np.where(np.abs(m) <= PURE_RESOLUTION, 0.0, m))


def cms_variance(obs):
    """Variance on the completely mixed state ``I/2``: ``|a|^2``."""
    a = coeff_array(obs)
    return as_scalar(np.sum(a[..., :3] ** 2, axis=-1))


def cms_expectation(obs):
    return as_scalar(coeff_array(obs)[..., 3])


def zeta(obs_a, obs_b, state):
    """Squared offsets of both expectations from their ``I/2`` values, summed."""
    a = coeff_array(obs_a)
    b = coeff_array(obs_b)
    p = bloch_array(state)
    return as_scalar(_dot(p, a) ** 2 + _dot(p, b) ** 2)


@dataclass(frozen=True)
class MomentSet:
    """All scalar moments for a list of N observables on one state.

    Per-observable arrays have shape (..., N); per-pair arrays (..., N, N)
    indexed ``[i, j]`` for the ordered pair ``(A_i, A_j)``.
    """

    mean: np.ndarray
    variance: np.ndarray
    stddev: np.ndarray
    cms_variance: np.ndarray
    covariance: np.ndarray
    commutator_measure: np.ndarray
    zeta: np.ndarray
    mixedness: np.ndarray


def moment_set(obs_list, state) -> MomentSet:
    """Closed-form moments for observables (..., N, 4) on states (..., 3)."""
    a = coeff_array(obs_list)
    p = bloch_array(state)[..., None, :]
    var = clamp_small_negative(variance_eq9(a, p))
    ai = a[..., :, None, :]
    aj = a[..., None, :, :]
    pp = p[..., None, :]
    return MomentSet(
        mean=np.asarray(a[..., 3] + _dot(p, a)),
        variance=var,
        stddev=np.sqrt(var),
        cms_variance=np.asarray(cms_variance(a)),
        covariance=np.asarray(covariance(ai, aj, pp)),
        commutator_measure=np.asarray(commutator_measure(ai, aj)),
        zeta=np.asarray(zeta(ai, aj, pp)),
        mixedness=np.asarray(mixedness(bloch_array(state))),
    )


def _trace(m):
    return np.trace(m, axis1=-2, axis2=-1)


def _expect_dense(rho, op):
    return _trace(rho @ op)


def dense_moments(obs_list, state) -> MomentSet:
    """Same fields as :func:`moment_set`, computed only from matrix traces.

    Never touches the Bloch closed forms: every quantity is a trace of
    products of dense 2x2 matrices.
    """
    a = coeff_array(obs_list)
    ops = observable_to_dense(a)                       # (..., N, 2, 2)
    rho = to_density(bloch_array(state))[..., None, :, :]
    mean = _expect_dense(rho, ops)
    second = _expect_dense(rho, ops @ ops)
    var = clamp_small_negative((second - mean * mean).real)

    oi = ops[..., :, None, :, :]
    oj = ops[..., None, :, :, :]
    r2 = rho[..., None, :, :, :]
    cov = _expect_dense(r2, oi @ oj) - mean[..., :, None] * mean[..., None, :]
    comm = oi @ oj - oj @ oi
    fmeas = _trace(comm @ np.conj(np.swapaxes(comm, -1, -2))).real / 4.0

    half_id = np.eye(2) / 2.0
    cms_mean = _expect_dense(half_id, ops).real
    cms_var = (_expect_dense(half_id, ops @ ops) - cms_mean ** 2).real
    dev2 = (mean.real - cms_mean) ** 2
    zeta_pairs = dev2[..., :, None] + dev2[..., None, :]

    rho0 = to_density(bloch_array(state))
    mix = clamp_small_negative(1.0 - _trace(rho0 @ rho0).real)
    return MomentSet(
        mean=mean.real,
        variance=var,
        stddev=np.sqrt(var),
        cms_variance=cms_var,
        covariance=cov,
        commutator_measure=fmeas,
        zeta=zeta_pairs,
        mixedness=mix,
    )
