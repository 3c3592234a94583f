"""Projective Hilbert space geometry.

Ray products, the three equivalent metrics (chord / Fubini-Study / gap),
positive-phase local sections, explicit unitary transports, the Cayley
chart, and the U(1) sector transition phase.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .linalg import eye, operator_norm

ORTHOGONALITY_TOL = 1e-12
RAY_EQUALITY_TOL = 1e-10


class Ray:
    """A point of projective Hilbert space, stored as a unit representative.

    Two rays compare equal iff their ray product is 1 to tolerance; the
    stored phase is arbitrary.
    """

    __slots__ = ("vec",)

    def __init__(self, vec):
        v = np.asarray(vec, dtype=np.complex128).ravel()
        nrm = np.linalg.norm(v)
        if not np.isfinite(nrm) or nrm == 0.0:
            raise ValueError("a ray needs a nonzero finite representative")
        self.vec = v / nrm

    @property
    def dim(self) -> int:
        return self.vec.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ray):
            return NotImplemented
        return abs(1.0 - ray_product(self, other)) <= RAY_EQUALITY_TOL

    def __hash__(self):
        raise TypeError("rays are not hashable")

    def __repr__(self):
        return f"Ray({self.vec!r})"


def _rep(x) -> np.ndarray:
    """Unit representative of a Ray or raw vector."""
    if isinstance(x, Ray):
        return x.vec
    v = np.asarray(x, dtype=np.complex128).ravel()
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ValueError("zero vector does not represent a ray")
    return v / nrm


def ray_product(a, b) -> float:
    """|<a, b>| for unit representatives; phase independent, in [0, 1]."""
    p = abs(np.vdot(_rep(a), _rep(b)))
    return float(min(p, 1.0))


class RayDistances(NamedTuple):
    chord: float
    fubini_study: float
    gap: float


def ray_distances(a, b) -> RayDistances:
    """Chord, Fubini-Study and gap distances, all closed forms in the ray
    product p: sqrt(2-2p), arccos(p), sqrt(1-p^2)."""
    p = ray_product(a, b)
    return RayDistances(
        chord=float(np.sqrt(max(2.0 - 2.0 * p, 0.0))),
        fubini_study=float(np.arccos(p)),
        gap=float(np.sqrt(max(1.0 - p * p, 0.0))),
    )


def section_positive(base, target) -> np.ndarray:
    """The unique unit representative of `target` with positive inner
    product against `base`. Defined on the open gap-metric unit ball
    around `base`."""
    b = _rep(base)
    t = _rep(target)
    ov = np.vdot(b, t)
    if abs(ov) <= ORTHOGONALITY_TOL:
        raise ValueError("target ray is (numerically) orthogonal to the base ray")
    return (abs(ov) / ov) * t


def rotator(psi: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Unitary U with U psi = omega, acting as the scalar
    <omega, psi>/|<omega, psi>| on the complement of span{psi, omega}.

    Explicit rank-four-correction form; norm-continuous in both arguments
    wherever <psi, omega> != 0.
    """
    psi = _rep(psi)
    omega = _rep(omega)
    ov = np.vdot(omega, psi)  # <omega, psi>
    if abs(ov) <= ORTHOGONALITY_TOL:
        raise ValueError("rotator requires non-orthogonal inputs")
    lam = ov / abs(ov)
    mu = 1.0 / (1.0 + abs(ov))
    n = psi.shape[0]
    out = lam * eye(n)
    out -= mu * np.outer(psi, omega.conj())
    out -= lam * mu * np.outer(psi, psi.conj())
    out -= lam * mu * np.outer(omega, omega.conj())
    out += (1.0 + lam * mu * ov) * np.outer(omega, psi.conj())
    return out


def elementary_transport(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Unitary z -> <y,x> z - <y,z> x + <x,z> y on span{x,y}, identity on
    the complement. Maps x to y and satisfies ||1 - U|| = ||x - y||."""
    x = _rep(x)
    y = _rep(y)
    n = x.shape[0]
    out = np.vdot(y, x) * eye(n)
    out -= np.outer(x, y.conj())
    out += np.outer(y, x.conj())
    # the span-complement must carry the identity, not the scalar <y,x>:
    # add back (1 - <y,x>) on the orthogonal complement of span{x,y}
    q = _orthonormal_span(x, y)
    comp = eye(n) - q @ q.conj().T
    out += (1.0 - np.vdot(y, x)) * comp
    return out


def _orthonormal_span(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Orthonormal columns spanning span{x, y}."""
    cols = [x]
    r = y - np.vdot(x, y) * x
    nrm = np.linalg.norm(r)
    if nrm > 1e-14:
        cols.append(r / nrm)
    return np.column_stack(cols)


def frame_transport(xs, ys) -> tuple[np.ndarray, float]:
    """Unitary sending the orthonormal frame xs to ys, built by the
    transport-then-correct recursion: after mapping the first i vectors,
    the image of the next one is carried to its target by an elementary
    transport (which fixes the already-placed targets).

    Returns (U, defect) where defect = ||1 - U|| in operator norm. The
    defect is small when the frames are close; it is reported, not gated.
    """
    xs = [_as_unit(v) for v in xs]
    ys = [_as_unit(v) for v in ys]
    if len(xs) != len(ys):
        raise ValueError("frames must have equal length")
    n = len(xs)
    if n == 0:
        raise ValueError("empty frame")
    dim = xs[0].shape[0]
    if dim < 2 * n:
        raise ValueError(f"ambient dimension {dim} < 2n = {2 * n}")
    _check_orthonormal(xs)
    _check_orthonormal(ys)
    u = eye(dim)
    for i in range(n):
        z = u @ xs[i]
        u = elementary_transport(z, ys[i]) @ u
    return u, operator_norm(eye(dim) - u)


def _as_unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).ravel()
    return v


def _check_orthonormal(frame, tol: float = 1e-10):
    g = np.array([[np.vdot(a, b) for b in frame] for a in frame])
    if np.max(np.abs(g - np.eye(len(frame)))) > tol:
        raise ValueError("frame is not orthonormal within tolerance")


CAYLEY_SPECTRUM_TOL = 1e-8


def cayley_chart(m: np.ndarray, direction: str = "forward") -> np.ndarray:
    """Cayley chart phi(U) = i(1-U)(1+U)^{-1} and its inverse
    A -> (i1-A)(i1+A)^{-1}.

    Forward requires a unitary with -1 outside the spectrum; inverse
    requires a Hermitian input. Round trips return the input.
    """
    m = np.asarray(m, dtype=np.complex128)
    n = m.shape[0]
    if direction == "forward":
        if operator_norm(m @ m.conj().T - eye(n)) > 1e-8:
            raise ValueError("cayley forward expects a unitary")
        evals = np.linalg.eigvals(m)
        if np.min(np.abs(1.0 + evals)) < CAYLEY_SPECTRUM_TOL:
            raise ValueError("-1 in spectrum: outside the Cayley chart")
        a = 1j * (eye(n) - m) @ np.linalg.inv(eye(n) + m)
        return (a + a.conj().T) / 2
    if direction == "inverse":
        if np.linalg.norm(m - m.conj().T) > 1e-8 * max(np.linalg.norm(m), 1.0):
            raise ValueError("cayley inverse expects a Hermitian matrix")
        return (1j * eye(n) - m) @ np.linalg.inv(1j * eye(n) + m)
    raise ValueError("direction must be 'forward' or 'inverse'")


def sector_transition_phase(phi1, phi2, psi) -> complex:
    """U(1) transition value between positive-phase sections based at phi1
    and phi2, evaluated at psi:

        |<phi2, psi>| / <phi2, psi> * <phi1, psi> / |<phi1, psi>|

    Independent of the representative of psi; a 1-cocycle over base rays.
    """
    p1 = _rep(phi1)
    p2 = _rep(phi2)
    s = _rep(psi)
    ov1 = np.vdot(p1, s)
    ov2 = np.vdot(p2, s)
    if abs(ov1) <= ORTHOGONALITY_TOL or abs(ov2) <= ORTHOGONALITY_TOL:
        raise ValueError("psi is orthogonal to a base ray; transition undefined")
    return complex((abs(ov2) / ov2) * (ov1 / abs(ov1)))
