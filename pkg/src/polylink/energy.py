"""Self-intersection energy of embedded polygons and its turn-angle gradient.

The elliptic distance energy sums, over every (edge, vertex) pair with the
vertex not an endpoint of the edge, the inverse squared excess of the
triangle inequality::

    F = sum  1 / (|v - a| + |v - b| - |b - a|)^2

A term blows up exactly when the vertex lands on the edge, so F is finite
on embedded polygons and diverges at self-contact.  The modified energy
multiplies F by a sum of smooth bumps of the negated turn angles, making
it vanish exactly on convex configurations.

Gradients are taken in reduced turn-angle coordinates: the first ``n - 1``
turn angles are free, the chain start is pinned to the canonical frame,
and closure (final vertex at the origin) is a two-dimensional constraint
whose Jacobian is used to project gradients onto the constraint tangent
space.  Side lengths are preserved exactly by this parametrization.

Because ``exp(-1/x^2)`` underflows to zero in double precision for
``x < 0.0366``, the energy is also exposed in log-domain form
(:func:`log_energy_gradient`); the descent flow steers by it so that the
signal survives all the way to convexity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain_geometry import (
    PolygonChain,
    SideLengths,
    normalize_angle,
    turn_angles_from_vertices,
    vertices_from_turn_angles,
)

TAU = 2.0 * math.pi

# exp(-1/x^2) < 1e-4343 below this; sub-denormal, treated as exactly zero
BUMP_CUTOFF = 0.01


def bump(x: float) -> float:
    """Smooth bump: 0 for x <= 0, exp(-1/x^2) for x > 0.

    Values below ``BUMP_CUTOFF`` are flushed to exactly zero; they are far
    beneath the smallest subnormal double anyway.
    """
    if x <= BUMP_CUTOFF:
        return 0.0
    return math.exp(-1.0 / (x * x))


def bump_derivative(x: float) -> float:
    """da/dx of :func:`bump`, analytically (2/x^3) exp(-1/x^2)."""
    if x <= BUMP_CUTOFF:
        return 0.0
    return 2.0 / (x * x * x) * math.exp(-1.0 / (x * x))


def log_bump(x: float) -> float:
    """log of the exact-math bump: -1/x^2 for x > 0, -inf otherwise.

    No cutoff: this is the representation the descent flow steers by.
    """
    if x <= 0.0:
        return -math.inf
    return -1.0 / (x * x)


def _elliptic_terms(verts: np.ndarray, anchor: np.ndarray):
    """Edge endpoint arrays and excluded vertex indices for the pair sum.

    Edge i runs from A[i] to B[i]; its excluded vertices are ``(i-1) % n``
    and ``i``.  ``anchor`` is the start point of edge 0 (the stored last
    vertex for a closed chain, the exact origin for the smooth extension
    used in gradient work).
    """
    n = verts.shape[0]
    A = np.vstack((anchor, verts[:-1]))
    B = verts
    return n, A, B


def _elliptic_value(verts: np.ndarray, anchor: np.ndarray) -> float:
    n, A, B = _elliptic_terms(verts, anchor)
    total = 0.0
    for i in range(n):
        a, b = A[i], B[i]
        lab = math.hypot(b[0] - a[0], b[1] - a[1])
        skip = ((i - 1) % n, i)
        for j in range(n):
            if j in skip:
                continue
            v = verts[j]
            den = (
                math.hypot(v[0] - a[0], v[1] - a[1])
                + math.hypot(v[0] - b[0], v[1] - b[1])
                - lab
            )
            if den <= 0.0:
                raise ValueError(
                    "vertex lies on a non-incident edge: energy undefined"
                )
            total += 1.0 / (den * den)
    return total


def _elliptic_value_and_vertex_grad(verts: np.ndarray, anchor: np.ndarray):
    """Energy F and dF/d(vertex) for every vertex; anchor is constant."""
    n, A, B = _elliptic_terms(verts, anchor)
    grad = np.zeros_like(verts)
    total = 0.0
    for i in range(n):
        a, b = A[i], B[i]
        ab = b - a
        lab = math.hypot(ab[0], ab[1])
        e_hat = ab / lab
        skip = ((i - 1) % n, i)
        for j in range(n):
            if j in skip:
                continue
            v = verts[j]
            va = v - a
            vb = v - b
            da = math.hypot(va[0], va[1])
            db = math.hypot(vb[0], vb[1])
            den = da + db - lab
            if den <= 0.0:
                raise ValueError(
                    "vertex lies on a non-incident edge: energy undefined"
                )
            total += 1.0 / (den * den)
            w = -2.0 / (den * den * den)
            ua = va / da
            ub = vb / db
            grad[j] += w * (ua + ub)
            if i >= 1:
                grad[i - 1] += w * (-ua + e_hat)
            grad[i] += w * (-ub - e_hat)
    return total, grad


def elliptic_energy(chain: PolygonChain) -> float:
    """Elliptic distance energy of a closed embedded polygon."""
    verts = chain.vertices
    return _elliptic_value(verts, verts[-1])


def modified_energy(chain: PolygonChain) -> float:
    """Bump-weighted energy: zero exactly when every turn angle is >= 0."""
    theta = turn_angles_from_vertices(chain).angles
    amp = sum(bump(-t) for t in theta)
    if amp == 0.0:
        return 0.0
    return amp * elliptic_energy(chain)


@dataclass(frozen=True, eq=False)
class ReducedCoords:
    """Turn-angle coordinates with the last angle dependent.

    ``free_angles`` holds the first ``n - 1`` turn angles; the last is
    ``2*pi - sum(free_angles)`` (normalized), which is the geometric turn
    at the frame corner whenever the chain closes counterclockwise.
    """

    free_angles: np.ndarray

    def __post_init__(self):
        arr = np.atleast_1d(np.asarray(self.free_angles, dtype=float))
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("need at least 2 free angles (n >= 3)")
        object.__setattr__(self, "free_angles", arr)

    @property
    def n(self) -> int:
        return int(self.free_angles.size) + 1

    @classmethod
    def from_chain(cls, chain: PolygonChain) -> "ReducedCoords":
        theta = turn_angles_from_vertices(chain).angles
        return cls(theta[:-1].copy())

    def dependent_angle(self) -> float:
        return normalize_angle(TAU - float(self.free_angles.sum()))

    def full_angles(self) -> np.ndarray:
        return np.append(self.free_angles, self.dependent_angle())

    def chain(self, lengths: SideLengths) -> tuple[PolygonChain, float]:
        """Rebuild vertices; the reported defect is |final vertex|."""
        return vertices_from_turn_angles(
            lengths, np.append(self.free_angles, 0.0)
        )


@dataclass(frozen=True, eq=False)
class EnergyGradient:
    """Modified energy with its full and closure-projected gradients."""

    value: float
    gradient: np.ndarray
    projected_gradient: np.ndarray


def _rot90(v: np.ndarray) -> np.ndarray:
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    return out


def closure_jacobian(verts: np.ndarray) -> np.ndarray:
    """d(final vertex)/d(free angles), shape (2, n-1).

    Rotating all headings after vertex m swings the tail rigidly about
    vertex m, so each column is the 90-degree rotation of the arm from
    vertex m to the final vertex.
    """
    n = verts.shape[0]
    arms = verts[-1] - verts[: n - 1]
    return _rot90(arms).T


def project_tangent(grad: np.ndarray, jac: np.ndarray) -> np.ndarray:
    """Remove the closure-normal component (least squares in the 2x2
    normal equations)."""
    jjt = jac @ jac.T
    lam = np.linalg.solve(jjt, jac @ grad)
    return grad - jac.T @ lam

def energy_of_free_angles(free: np.ndarray, lengths: SideLengths) -> float:
    """Smooth extension of the modified energy to off-manifold free angles.

    The chain starts at the exact origin; the dependent turn angle is
    ``2*pi - sum(free)``.  On the closure manifold this agrees with
    :func:`modified_energy` of the rebuilt chain.
    """
    chain, _ = vertices_from_turn_angles(lengths, np.append(free, 0.0))
    verts = chain.vertices
    theta_n = normalize_angle(TAU - float(np.sum(free)))
    amp = sum(bump(-t) for t in free) + bump(-theta_n)
    if amp == 0.0:
        return 0.0
    return amp * _elliptic_value(verts, np.zeros(2))


def energy_gradient(coords: ReducedCoords, lengths: SideLengths) -> EnergyGradient:
    """Analytic gradient of the modified energy in free turn angles.

    The chain rule runs through the vertex positions (each angle swings
    the downstream arm) and through the dependent last angle in the bump
    sum.  ``projected_gradient`` is tangent to the closure constraint.
    """
    from .config_space import classify  # local import: avoids a cycle

    free = coords.free_angles
    n = coords.n
    chain, defect = coords.chain(lengths)
    if defect > 1e-6 * lengths.perimeter:
        raise ValueError("coordinates are far off the closure manifold")
    if not classify(chain).embedded:
        raise ValueError("energy gradient requires an embedded configuration")
    verts = chain.vertices
    theta_n = coords.dependent_angle()

    F, vgrad = _elliptic_value_and_vertex_grad(verts, np.zeros(2))
    amp = sum(bump(-t) for t in free) + bump(-theta_n)

    # dF/dtheta_m: every vertex past m swings about vertex m
    dF = np.zeros(n - 1)
    for m in range(n - 1):
        arms = _rot90(verts[m + 1 :] - verts[m])
        dF[m] = float(np.sum(vgrad[m + 1 :] * arms))

    d_amp = np.array(
        [-bump_derivative(-t) + bump_derivative(-theta_n) for t in free]
    )
    grad = d_amp * F + amp * dF
    jac = closure_jacobian(verts)
    value = amp * F
    return EnergyGradient(
        value=value, gradient=grad, projected_gradient=project_tangent(grad, jac)
    )


def finite_difference_gradient(
    coords: ReducedCoords, lengths: SideLengths, h: float = 1e-6
) -> np.ndarray:
    """Central differences of the smooth energy extension; test oracle."""
    free = coords.free_angles
    out = np.zeros_like(free)
    for m in range(free.size):
        bumped = free.copy()
        bumped[m] = free[m] + h
        hi = energy_of_free_angles(bumped, lengths)
        bumped[m] = free[m] - h
        lo = energy_of_free_angles(bumped, lengths)
        out[m] = (hi - lo) / (2.0 * h)
    return out


def _logsumexp(values: np.ndarray) -> float:
    top = np.max(values)
    if top == -math.inf:
        return -math.inf
    return float(top + math.log(np.sum(np.exp(values - top))))


@dataclass(frozen=True, eq=False)
class LogEnergy:
    """Log-domain modified energy; finite whenever some turn angle is
    negative, -inf exactly on the convex set.

    ``bump_gradient`` is the bump-factor part of the gradient (the rest
    is the gradient of log F, which acts as the contact barrier)."""

    log_value: float
    gradient: np.ndarray  # of log E, full
    projected_gradient: np.ndarray
    bump_gradient: np.ndarray
    elliptic: float
    min_turn_angle: float


def log_energy_gradient(coords: ReducedCoords, lengths: SideLengths) -> LogEnergy:
    """Log of the exact-math modified energy with its gradient.

    ``grad log E = grad A / A + grad F / F`` where the first term is a
    softmax-weighted combination of the bump log-derivatives ``2/x^3``.
    Representable in doubles for reflex angles arbitrarily close to zero,
    unlike E itself.
    """
    free = coords.free_angles
    n = coords.n
    chain, _ = coords.chain(lengths)
    verts = chain.vertices
    theta_n = coords.dependent_angle()
    full = np.append(free, theta_n)

    x = -full  # bump arguments
    logs = np.array([log_bump(v) for v in x])
    log_amp = _logsumexp(logs)
    F, vgrad = _elliptic_value_and_vertex_grad(verts, np.zeros(2))

    if log_amp == -math.inf:
        zero = np.zeros(n - 1)
        return LogEnergy(-math.inf, zero, zero, zero, F, float(full.min()))

    # softmax weights of the active bumps
    w = np.exp(logs - log_amp)
    dlog_bump = np.where(x > 0.0, 2.0 / np.where(x > 0.0, x, 1.0) ** 3, 0.0)
    contrib = w * dlog_bump
    d_log_amp = -contrib[:-1] + contrib[-1]

    dF = np.zeros(n - 1)
    for m in range(n - 1):
        arms = _rot90(verts[m + 1 :] - verts[m])
        dF[m] = float(np.sum(vgrad[m + 1 :] * arms))

    grad = d_log_amp + dF / F
    jac = closure_jacobian(verts)
    return LogEnergy(
        log_value=log_amp + math.log(F),
        gradient=grad,
        projected_gradient=project_tangent(grad, jac),
        bump_gradient=d_log_amp,
        elliptic=F,
        min_turn_angle=float(full.min()),
    )
