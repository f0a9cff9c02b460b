"""Bergman kernel and metric on validation domains.

K_D(z) = sup |f(z)|^2 / ||f||^2 over L^2-holomorphic f is computed as the
finite-basis supremum e* G^{-1} e with G the Gram matrix of scaled monomials
(z/R)^n (Laurent powers on annuli).  The derivative functional I_D(z,1) uses
the same quadratic form over the subspace f(z) = 0, imposed by deflating the
evaluation vector, and the metric is the classical quotient beta_D = I/K.

The engine deliberately refuses domains with arc or segment obstacles: their
Bergman space strictly exceeds restrictions of disc functions, and a monomial
computation would be silently wrong.  Discs, annuli, and punctured variants
are the supported validation domains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    DiscObstacle,
    DomainSpec,
    PointObstacle,
    _point_on_obstacle,
)

CONDITION_CAP = 1e14
HERMITIAN_TOL = 1e-13


@dataclass(frozen=True)
class QuadratureConfig:
    """Tensor polar quadrature: Gauss-Legendre radial nodes per panel times a
    uniform angular grid (exact for the trig polynomials the bases produce)."""

    radial_order: int = 64
    angular_points: int = 512

    def __post_init__(self) -> None:
        if self.radial_order < 2:
            raise ValueError("radial_order must be >= 2")
        if self.angular_points < 8:
            raise ValueError("angular_points must be >= 8")


@dataclass(frozen=True)
class BasisSpec:
    """Scaled power basis (z/R)^n for n in [min_degree, max_degree]."""

    domain: DomainSpec
    max_degree: int
    min_degree: int = 0

    def __post_init__(self) -> None:
        if self.max_degree < self.min_degree:
            raise ValueError("max_degree must be >= min_degree")
        rho, _ = _radial_profile(self.domain)
        if self.min_degree < 0 and rho <= 0.0:
            raise ValueError("negative (Laurent) degrees need the origin excluded by a positive-radius obstacle")

    @property
    def degrees(self) -> np.ndarray:
        return np.arange(self.min_degree, self.max_degree + 1)

    @property
    def size(self) -> int:
        return self.max_degree - self.min_degree + 1


def monomials(domain: DomainSpec, max_degree: int) -> BasisSpec:
    return BasisSpec(domain=domain, max_degree=max_degree)


def laurent(domain: DomainSpec, min_degree: int, max_degree: int) -> BasisSpec:
    return BasisSpec(domain=domain, max_degree=max_degree, min_degree=min_degree)


@dataclass(frozen=True)
class KernelEstimate:
    z: complex
    kernel: float  # K_D(z)
    metric: float  # beta_D(z) = I/K
    derivative_functional: float  # I_D(z, 1)
    basis_size: int
    quad_points: int
    error_proxy: float  # relative K change when the top basis function is dropped
    condition: float  # 2-norm condition number of the Gram matrix


def _radial_profile(domain: DomainSpec) -> tuple[float, float]:
    """(inner radius, outer radius) of the radially-symmetric area; rejects
    obstacle shapes whose Bergman space has no implemented basis."""
    rho = 0.0
    for ob in domain.obstacles:
        if isinstance(ob, PointObstacle):
            continue
        if isinstance(ob, DiscObstacle) and ob.center == 0j:
            rho = max(rho, ob.radius)
            continue
        raise ValueError(
            "no implemented basis for domains with arc, segment, or off-center disc "
            "obstacles; the kernel engine runs on disc/annulus/punctured domains only"
        )
    return rho, domain.outer_radius


def _quadrature_nodes(domain: DomainSpec, quad: QuadratureConfig) -> tuple[np.ndarray, np.ndarray]:
    """Node locations and positive area weights for the tensor polar rule."""
    rho, R = _radial_profile(domain)
    cuts = sorted(
        {abs(ob.location) for ob in domain.obstacles if isinstance(ob, PointObstacle) and rho < abs(ob.location) < R}
    )
    edges = [rho, *cuts, R]
    x, wx = np.polynomial.legendre.leggauss(quad.radial_order)
    s_parts = []
    ws_parts = []
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        s_parts.append(half * x + 0.5 * (a + b))
        ws_parts.append(half * wx)
    s = np.concatenate(s_parts)
    ws = np.concatenate(ws_parts)
    m = quad.angular_points
    theta = 2.0 * np.pi * np.arange(m) / m
    nodes = (s[:, None] * np.exp(1j * theta)[None, :]).ravel()
    weights = ((ws * s)[:, None] * np.full(m, 2.0 * np.pi / m)[None, :]).ravel()
    return nodes, weights


def _basis_values(basis: BasisSpec, z: np.ndarray) -> np.ndarray:
    w = np.asarray(z, dtype=complex) / basis.domain.outer_radius
    return np.power(w[..., None], basis.degrees)


def _basis_derivatives(basis: BasisSpec, z: complex) -> np.ndarray:
    R = basis.domain.outer_radius
    w = complex(z) / R
    out = np.zeros(basis.size, dtype=complex)
    for i, d in enumerate(basis.degrees):
        if d == 0:
            continue  # constant term: derivative 0 even at w = 0
        out[i] = (d / R) * w ** (d - 1)
    return out


def gram_matrix(basis: BasisSpec, quad: QuadratureConfig) -> np.ndarray:
    """Inner-product matrix <b_i, b_j> over the domain's area measure."""
    max_abs_degree = int(max(abs(basis.min_degree), abs(basis.max_degree)))
    if quad.angular_points < 4 * max_abs_degree + 8:
        raise ValueError(
            f"angular_points {quad.angular_points} too coarse for max degree {max_abs_degree}; "
            f"need at least {4 * max_abs_degree + 8}"
        )
    nodes, weights = _quadrature_nodes(basis.domain, quad)
    B = _basis_values(basis, nodes)
    G = (B.conj().T * weights) @ B
    scale = float(np.max(np.abs(G)))
    asym = float(np.max(np.abs(G - G.conj().T)))
    if asym > HERMITIAN_TOL * scale:
        raise ValueError(f"Gram matrix asymmetry {asym:.3e} exceeds tolerance; quadrature inconsistent")
    return 0.5 * (G + G.conj().T)


class _KernelEngine:
    """One Gram assembly + factorization, many point estimates."""

    def __init__(self, basis: BasisSpec, quad: QuadratureConfig):
        self.basis = basis
        self.quad = quad
        self.gram = gram_matrix(basis, quad)
        self.condition = float(np.linalg.cond(self.gram))
        if not (self.condition < CONDITION_CAP):
            raise ValueError(
                f"Gram matrix condition {self.condition:.3e} exceeds {CONDITION_CAP:.0e}; use a smaller basis"
            )
        self.quad_points = len(_quadrature_nodes(basis.domain, quad)[0])
        self._chol = np.linalg.cholesky(self.gram)

    def _solve(self, rhs: np.ndarray) -> np.ndarray:
        y = np.linalg.solve(self._chol, rhs)
        return np.linalg.solve(self._chol.conj().T, y)

    def _check_inside(self, z: complex) -> None:
        rho, R = _radial_profile(self.basis.domain)
        if not (rho < abs(z) < R or (rho == 0.0 and abs(z) < R)):
            raise ValueError(f"point {z} not inside the domain's area")
        for ob in self.basis.domain.obstacles:
            if _point_on_obstacle(complex(z), ob):
                raise ValueError(f"point {z} lies on an obstacle")

    def estimate(self, z: complex) -> KernelEstimate:
        self._check_inside(z)
        e = _basis_values(self.basis, np.asarray(z)).ravel()
        d = _basis_derivatives(self.basis, z)
        u = self._solve(e)
        v = self._solve(d)
        K = float(np.real(np.vdot(e, u)))
        if not (K > 0.0):
            raise ValueError(f"kernel estimate {K} not positive; basis cannot represent evaluation at {z}")
        A = float(np.real(np.vdot(d, v)))
        c = complex(np.vdot(e, v))
        I = A - abs(c) ** 2 / K
        # drop the top basis function for a same-grid convergence proxy
        if self.basis.size > 1:
            G_small = self.gram[:-1, :-1]
            e_small = e[:-1]
            K_small = float(np.real(np.vdot(e_small, np.linalg.solve(G_small, e_small))))
            proxy = abs(K - K_small) / K
        else:
            proxy = math.inf
        return KernelEstimate(
            z=complex(z),
            kernel=K,
            metric=I / K,
            derivative_functional=I,
            basis_size=self.basis.size,
            quad_points=self.quad_points,
            error_proxy=proxy,
            condition=self.condition,
        )


def kernel_at(basis: BasisSpec, quad: QuadratureConfig, z: complex) -> KernelEstimate:
    """Finite-basis Bergman data at one point; see _KernelEngine for reuse."""
    return _KernelEngine(basis, quad).estimate(z)


def metric_path_length(
    basis: BasisSpec, quad: QuadratureConfig, path: tuple[complex, ...], samples: int = 257
) -> float:
    """Composite-trapezoid Bergman length of a polyline: integral of
    sqrt(beta) with respect to arclength."""
    pts = [complex(p) for p in path]
    if len(pts) < 2:
        raise ValueError("path needs at least two waypoints")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    seg_lengths = [abs(b - a) for a, b in zip(pts[:-1], pts[1:])]
    total = sum(seg_lengths)
    if total == 0.0:
        return 0.0
    # arclength-uniform samples along the polyline
    s_grid = np.linspace(0.0, total, samples)
    cum = np.concatenate([[0.0], np.cumsum(seg_lengths)])
    zs = np.empty(samples, dtype=complex)
    for i, s in enumerate(s_grid):
        j = int(np.searchsorted(cum, s, side="right") - 1)
        j = min(j, len(pts) - 2)
        frac = 0.0 if seg_lengths[j] == 0.0 else (s - cum[j]) / seg_lengths[j]
        zs[i] = pts[j] + frac * (pts[j + 1] - pts[j])
    engine = _KernelEngine(basis, quad)
    integrand = np.array([math.sqrt(max(engine.estimate(z).metric, 0.0)) for z in zs])
    return float(np.trapezoid(integrand, s_grid))
