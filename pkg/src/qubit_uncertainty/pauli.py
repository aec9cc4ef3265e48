"""
Qubit states and observables in the Bloch/Pauli basis.

States are Bloch vectors ``p`` with ``rho = (I + p . sigma) / 2`` and
observables are real quadruples ``(a1, a2, a3, a4)`` standing for
``a1 sx + a2 sy + a3 sz + a4 I``. Basis convention: ``|0>`` is the +1
eigenvector of ``sz``.

Most functions here accept either the dataclass wrappers or plain arrays
with the Bloch/Pauli components on the last axis, so the same code path
serves single evaluations and large vectorized batches.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

PHYSICAL_TOL = 1e-12
PURE_TOL = 1e-9

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

# (sx, sy, sz, I) stacked so that einsum over the last coefficient axis
# builds dense operators directly.
PAULI_BASIS = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z, IDENTITY])


class UnphysicalStateError(ValueError):
    """Bloch vector outside the unit ball."""


class MixedStateError(ValueError):
    """A pure state was required but a mixed one was supplied."""


class DegenerateObservableError(ValueError):
    """Observable proportional to the identity where a measurement axis is needed."""


@dataclass(frozen=True)
class BlochState:
    p1: float
    p2: float
    p3: float

    def __post_init__(self):
        vec = (self.p1, self.p2, self.p3)
        if not all(math.isfinite(x) for x in vec):
            raise ValueError(f"Bloch components must be finite, got {vec}")
        norm2 = self.p1 ** 2 + self.p2 ** 2 + self.p3 ** 2
        if norm2 > 1 + PHYSICAL_TOL:
            raise UnphysicalStateError(
                f"|p|^2 = {norm2:.6g} exceeds 1: not a valid qubit state"
            )

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.p1, self.p2, self.p3], dtype=float)

    @property
    def radius(self) -> float:
        return math.sqrt(self.p1 ** 2 + self.p2 ** 2 + self.p3 ** 2)

    @property
    def is_pure(self) -> bool:
        return abs(self.radius ** 2 - 1.0) <= PURE_TOL


@dataclass(frozen=True)
class PauliObservable:
    a1: float
    a2: float
    a3: float
    a4: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(x) for x in self.coefficients):
            raise ValueError(f"observable coefficients must be finite, got {self.coefficients}")

    @property
    def coefficients(self) -> tuple:
        return (self.a1, self.a2, self.a3, self.a4)

    @property
    def vector(self) -> np.ndarray:
        """Pauli 3-vector ``(a1, a2, a3)``."""
        return np.array([self.a1, self.a2, self.a3], dtype=float)

    def as_array(self) -> np.ndarray:
        return np.array(self.coefficients, dtype=float)

    def __add__(self, other: "PauliObservable") -> "PauliObservable":
        return PauliObservable(*(x + y for x, y in zip(self.coefficients, other.coefficients)))


@dataclass(frozen=True)
class EigenSystem:
    """Spectrum of ``a . sigma + a4 I``.

    ``axis`` is the unit vector along ``a`` and ``None`` when the observable
    is a multiple of the identity (``degenerate`` is then True).
    """

    lambda_plus: float
    lambda_minus: float
    axis: Optional[tuple]

    @property
    def degenerate(self) -> bool:
        return self.axis is None


StateLike = Union[BlochState, Sequence[float], np.ndarray]
ObservableLike = Union[PauliObservable, Sequence[float], np.ndarray]


def bloch_array(state) -> np.ndarray:
    """Return the Bloch vector(s) of ``state`` as a float array (..., 3)."""
    if isinstance(state, BlochState):
        return state.vector
    arr = np.asarray(state, dtype=float)
    if arr.shape[-1:] != (3,):
        raise ValueError(f"expected Bloch vectors with last axis 3, got shape {arr.shape}")
    return arr


def coeff_array(obs) -> np.ndarray:
    """Return Pauli coefficients as a float array (..., 4).

    Accepts a single :class:`PauliObservable`, a sequence of them, or an
    array whose last axis holds ``(a1, a2, a3, a4)``.
    """
    if isinstance(obs, PauliObservable):
        return obs.as_array()
    if isinstance(obs, (list, tuple)) and obs and isinstance(obs[0], PauliObservable):
        return np.array([o.coefficients for o in obs], dtype=float)
    arr = np.asarray(obs, dtype=float)
    if arr.shape[-1:] != (4,):
        raise ValueError(f"expected Pauli coefficients with last axis 4, got shape {arr.shape}")
    return arr


def as_scalar(x):
    """Collapse 0-d numpy results to Python scalars; leave batches alone."""
    arr = np.asarray(x)
    if arr.ndim == 0:
        return arr.item()
    return arr


def make_state(p1: float, p2: float, p3: float) -> BlochState:
    return BlochState(float(p1), float(p2), float(p3))


def make_observable(a1: float, a2: float, a3: float, a4: float = 0.0) -> PauliObservable:
    return PauliObservable(float(a1), float(a2), float(a3), float(a4))


SX = PauliObservable(1.0, 0.0, 0.0, 0.0)
SY = PauliObservable(0.0, 1.0, 0.0, 0.0)
SZ = PauliObservable(0.0, 0.0, 1.0, 0.0)
ID = PauliObservable(0.0, 0.0, 0.0, 1.0)


def to_density(state) -> np.ndarray:
    """Dense density matrix ``(I + p . sigma) / 2``, shape (..., 2, 2)."""
    p = bloch_array(state)
    full = np.concatenate([p, np.ones(p.shape[:-1] + (1,))], axis=-1)
    return 0.5 * np.einsum("...k,kij->...ij", full, PAULI_BASIS)


def observable_to_dense(obs) -> np.ndarray:
    """Dense Hermitian matrix for Pauli coefficients, shape (..., 2, 2)."""
    return np.einsum("...k,kij->...ij", coeff_array(obs), PAULI_BASIS)


def eigensystem(obs) -> EigenSystem:
    a = coeff_array(obs)
    vec = [float(x) for x in a[:3]]
    norm = math.hypot(*vec)
    axis = None if norm == 0.0 else tuple(x / norm for x in vec)
    return EigenSystem(float(a[3] + norm), float(a[3] - norm), axis)


def orthogonal_pure(state):
    """Bloch vector of the pure state orthogonal to ``state``.

    For a pure qubit state the orthogonal complement is the antipodal point
    on the sphere. Mixed input is rejected.
    """
    p = bloch_array(state)
    norm2 = np.sum(p * p, axis=-1)
    if np.any(np.abs(norm2 - 1.0) > PURE_TOL):
        raise MixedStateError("orthogonal state is only defined here for pure states (|p| = 1)")
    if isinstance(state, BlochState):
        return BlochState(-state.p1 + 0.0, -state.p2 + 0.0, -state.p3 + 0.0)
    return -p


def pure_ket(state) -> np.ndarray:
    """State vector(s) with Bloch vector ``p`` (|p| = 1), global phase arbitrary.

    Two charts are used so that neither divides by a vanishing norm: the
    north chart for ``p3 >= 0`` and the south chart otherwise.
    """
    p = bloch_array(state)
    p1, p2, p3 = p[..., 0], p[..., 1], p[..., 2]
    north = p3 >= 0
    with np.errstate(invalid="ignore", divide="ignore"):
        n_norm = np.sqrt(2.0 * (1.0 + p3))
        s_norm = np.sqrt(2.0 * (1.0 - p3))
        c0 = np.where(north, (1.0 + p3) / n_norm, (p1 - 1j * p2) / s_norm)
        c1 = np.where(north, (p1 + 1j * p2) / n_norm, (1.0 - p3) / s_norm)
    return np.stack([c0, c1], axis=-1)


def random_sample(rng: np.random.Generator, kind: str, size: Optional[int] = None,
                  gamma: Optional[float] = None, coeff_range: tuple = (-1.0, 1.0)):
    """Draw random states or observables.

    Parameters
    ----------
    rng : numpy.random.Generator
        Caller-owned stream; the only state this function mutates.
    kind : {"pure", "ball", "fixed-purity", "observable"}
        ``pure``: uniform on the Bloch sphere. ``ball``: uniform over the
        Bloch ball. ``fixed-purity``: uniform direction with ``|p| = gamma``.
        ``observable``: four i.i.d. uniform coefficients in ``coeff_range``.
    size : int, optional
        Number of draws. ``None`` returns a single dataclass instance,
        otherwise an array of shape (size, 3) or (size, 4).
    """
    n = 1 if size is None else int(size)
    if kind == "observable":
        lo, hi = coeff_range
        out = rng.uniform(lo, hi, size=(n, 4))
        return PauliObservable(*out[0]) if size is None else out

    if kind == "fixed-purity":
        if gamma is None or not 0.0 <= gamma <= 1.0:
            raise ValueError(f"fixed-purity radius gamma must lie in [0, 1], got {gamma}")
    elif kind not in ("pure", "ball"):
        raise ValueError(f"unknown sample kind {kind!r}")

    direction = rng.standard_normal((n, 3))
    direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
    if kind == "pure":
        radius = np.ones((n, 1))
    elif kind == "ball":
        radius = np.cbrt(rng.uniform(0.0, 1.0, size=(n, 1)))
    else:
        radius = np.full((n, 1), float(gamma))
    out = direction * radius
    if size is None:
        # renormalized draws can land a few ulps outside the sphere
        v = out[0]
        if kind == "pure" or gamma == 1.0:
            v = v / np.linalg.norm(v)
        return BlochState(*(float(x) for x in v))
    return out


_ALIASES = {
    "sx": SX,
    "sy": SY,
    "sz": SZ,
    "id": ID,
}


def parse_observable(text: str) -> PauliObservable:
    """Parse ``"a1,a2,a3,a4"`` or one of the aliases ``sx sy sz id``."""
    key = text.strip().lower()
    if key in _ALIASES:
        return _ALIASES[key]
    parts = key.split(",")
    if len(parts) != 4:
        raise ValueError(f"observable {text!r}: expected an alias or four comma-separated reals")
    try:
        values = [float(x) for x in parts]
    except ValueError:
        raise ValueError(f"observable {text!r}: components must be decimal reals") from None
    return make_observable(*values)


def parse_state(text: str) -> BlochState:
    """Parse ``"p1,p2,p3"``."""
    parts = text.strip().split(",")
    if len(parts) != 3:
        raise ValueError(f"state {text!r}: expected three comma-separated reals")
    try:
        values = [float(x) for x in parts]
    except ValueError:
        raise ValueError(f"state {text!r}: components must be decimal reals") from None
    return make_state(*values)
