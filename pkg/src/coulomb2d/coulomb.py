"""Coulomb-type integrals: the direct term, nuclear attraction and
repulsion, and the disk-restricted uncertainty inequalities.

Every planar 1/|x-y| integral against a radial density reduces to the
angular kernel K(r, s) = integral over the angle of the inverse distance
between two rings, a complete elliptic integral evaluated here by the
arithmetic-geometric mean.  The kernel diverges logarithmically on the
diagonal r = s, which the integrators handle by splitting panels there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import BoundParameters, sharp_constant
from .density import DensityProfile, MixtureProfile, TabulatedProfile
from .errors import DomainError
from .quadrature import decaying_quad, panel_quad, segmented_gauss

_TWO_PI = 2.0 * math.pi


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of nonnegative a, b (quadratic convergence)."""
    if a < 0.0 or b < 0.0:
        raise DomainError("agm needs nonnegative arguments")
    if a == 0.0 or b == 0.0:
        return 0.0
    # quadratic convergence reaches rounding level well within 30 steps
    for _ in range(30):
        if abs(a - b) <= 4e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def complete_elliptic_first(k: float) -> float:
    """Complete elliptic integral of the first kind, modulus k in [0, 1).

    K(k) = pi / (2 agm(1, sqrt(1 - k^2))).
    """
    if not 0.0 <= k < 1.0:
        raise DomainError(f"modulus must lie in [0, 1), got {k!r}")
    return math.pi / (2.0 * agm(1.0, math.sqrt((1.0 - k) * (1.0 + k))))


def angular_coulomb_kernel(r: float, s: float) -> float:
    """Integral over the angle of 1/|x - y| for |x| = r, |y| = s.

    Equals 4/(r+s) K(2 sqrt(rs)/(r+s)).  Symmetric in (r, s); tends to
    2 pi / max(r, s) when the radii separate; returns +inf on the diagonal
    r = s, where callers must split their integrals.
    """
    if r < 0.0 or s < 0.0 or (r == 0.0 and s == 0.0):
        raise DomainError(f"radii must be nonnegative and not both zero: {r!r}, {s!r}")
    if r == s:
        return math.inf
    # complementary modulus |r-s|/(r+s) is exact, no cancellation near r = s
    kp = abs(r - s) / (r + s)
    return 4.0 / (r + s) * math.pi / (2.0 * agm(1.0, kp))


@dataclass(frozen=True)
class DiskSpec:
    """A disk of radius R; the uncertainty inequalities live on it."""

    radius: float
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not self.radius > 0.0:
            raise DomainError(f"disk radius must be positive, got {self.radius!r}")


@dataclass(frozen=True)
class MolecularConfig:
    """Nuclear charge z at K distinct positions, with derived half-distances.

    half_distances[j] is half the distance to the nearest other nucleus;
    for a single nucleus it is +inf (flagged downstream, the disk
    decomposition degenerates there).
    """

    z: float
    positions: tuple
    half_distances: tuple = field(init=False)

    def __post_init__(self):
        if not self.z > 0.0:
            raise DomainError(f"nuclear charge must be positive, got {self.z!r}")
        pos = tuple((float(p[0]), float(p[1])) for p in self.positions)
        if not pos:
            raise DomainError("need at least one nucleus")
        object.__setattr__(self, "positions", pos)
        half = []
        for j, pj in enumerate(pos):
            dists = [math.dist(pj, pk) for k, pk in enumerate(pos) if k != j]
            if any(d == 0.0 for d in dists):
                raise DomainError("nuclear positions must be pairwise distinct")
            half.append(0.5 * min(dists) if dists else math.inf)
        object.__setattr__(self, "half_distances", tuple(half))


def _radial_components(rho: DensityProfile):
    if isinstance(rho, MixtureProfile):
        if not all(c.is_radial for c in rho.components):
            raise DomainError("mixture components must be radial")
        return rho.components
    if not rho.is_radial:
        raise DomainError("operation needs a radial profile")
    return (rho,)


def _ring_potential(rho: DensityProfile, d: float, rel_tol: float) -> float:
    """integral of rho(x) / |x - p| dx for a radial rho, |p - center| = d."""
    def f(r):
        return rho.radial(r) * angular_coulomb_kernel(r, d) * r

    if d == 0.0:
        val, _ = decaying_quad(lambda r: _TWO_PI * rho.radial(r), 0.0,
                               rho.inner_scale(), rel_tol=rel_tol,
                               min_radius=rho.cover_radius())
        return val
    inner, _ = panel_quad(f, 0.0, d, rel_tol=rel_tol)
    outer, _ = decaying_quad(f, d, rho.inner_scale(), rel_tol=rel_tol,
                             min_radius=rho.cover_radius())
    return inner + outer


def direct_term(rho: DensityProfile, rel_tol: float = 1e-8) -> float:
    """D(rho, rho) = half the double integral of rho rho / |x - y|.

    Radial profiles only (concentric mixtures included); the diagonal
    log singularity is handled by splitting the inner integral at s = r.
    """
    if not rho.is_radial:
        raise DomainError("direct term needs a radial profile")
    if rho.mass() == 0.0:
        return 0.0

    def inner(r):
        def f(s):
            return s * rho.radial(s) * angular_coulomb_kernel(r, s)
        left, _ = panel_quad(f, 0.0, r, rel_tol=rel_tol * 0.1)
        right, _ = decaying_quad(f, r, rho.inner_scale(), rel_tol=rel_tol * 0.1,
                                 min_radius=max(rho.cover_radius() - r, 0.0))
        return left + right

    # both angular integrations together contribute 2 pi times the kernel
    val, _ = decaying_quad(lambda r: math.pi * r * rho.radial(r) * inner(r),
                           0.0, rho.inner_scale(), rel_tol=rel_tol,
                           min_radius=rho.cover_radius())
    return val


def direct_term_monte_carlo(rho: DensityProfile, samples: int = 10 ** 6,
                            seed: int = 0):
    """Monte Carlo estimate of D(rho, rho) with its standard error.

    Plain independent pair sampling from the normalized density:
    D = (M^2 / 2) E[1/|x - y|] for total mass M.
    """
    if samples < 2:
        raise DomainError("need at least two samples")
    mass = rho.mass()
    if mass == 0.0:
        return 0.0, 0.0
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    x = rho.sample(samples, rng)
    y = rho.sample(samples, rng)
    inv = 1.0 / np.hypot(x[:, 0] - y[:, 0], x[:, 1] - y[:, 1])
    scale = 0.5 * mass * mass
    mean = float(inv.mean())
    stderr = float(inv.std(ddof=1) / math.sqrt(samples))
    return scale * mean, scale * stderr


def attraction_term(rho: DensityProfile, config: MolecularConfig,
                    rel_tol: float = 1e-9) -> float:
    """integral of V rho with V(x) = sum_i z / |x - R_i|."""
    if config.z == 0.0:
        return 0.0
    total = 0.0
    for comp in _radial_components(rho):
        if comp.mass() == 0.0:
            continue
        for nucleus in config.positions:
            d = math.dist(nucleus, comp.center)
            total += config.z * _ring_potential(comp, d, rel_tol)
    return total


def repulsion_term(config: MolecularConfig) -> float:
    """Pairwise nuclear repulsion sum_{i<j} z^2 / |R_i - R_j|; 0 for K = 1."""
    total = 0.0
    pos = config.positions
    for i in range(len(pos)):
        for j in range(i + 1, len(pos)):
            total += config.z ** 2 / math.dist(pos[i], pos[j])
    return total


# --------------------------------------------------------------------------
# Disk uncertainty inequalities, both with the weight u(r) = 1/r - 1/R
# (the only weight the downstream bound uses).


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    holds: bool


_HOLDS_SLACK = 1e-9


def _require_centered(rho: DensityProfile, disk: DiskSpec):
    if not rho.is_radial:
        raise DomainError("disk inequalities need a radial profile")
    if tuple(rho.center) != tuple(disk.center):
        raise DomainError("profile and disk must share a center")


def _disk_quad(rho, f_scalar, f_vec, R, rel_tol):
    """Integrate an integrand built from ``rho`` over [0, R].

    Tabulated profiles go through the segmented rule on their own nodes
    (adaptive rules stall on the interpolant's per-node curvature jumps).
    """
    if isinstance(rho, TabulatedProfile):
        r_max = rho.nodes[-1]
        cut = min(R, r_max)
        nodes = np.append(rho.nodes[rho.nodes < cut], cut)
        value, _ = segmented_gauss(f_vec, nodes)
        if R > r_max:
            extra, _ = panel_quad(f_scalar, r_max, R, rel_tol=rel_tol)
            value += extra
        return value
    value, _ = panel_quad(f_scalar, 0.0, R, rel_tol=rel_tol)
    return value


def verify_uncertainty_lemma(f: DensityProfile, disk: DiskSpec,
                             params: BoundParameters,
                             rel_tol: float = 1e-10) -> InequalityCheck:
    """Disk inequality for a radial f with weight u(r) = 1/r - 1/R:

    |int (1/r - 2/R) f^{1/alpha}|
        <= (1/alpha) (C(gamma) int |grad f|^gamma)^{1/gamma}
                     (C(delta) int (r u)^delta f^{3/(2 alpha)})^{1/delta}

    using 2u + r u' = 1/r - 2/R and r u = 1 - r/R, both regular on the disk.
    """
    _require_centered(f, disk)
    R = disk.radius
    alpha, gamma, delta = params.alpha, params.gamma, params.delta

    lhs_int = _disk_quad(
        f,
        lambda r: (1.0 - 2.0 * r / R) * f.radial(r) ** (1.0 / alpha),
        lambda r: (1.0 - 2.0 * r / R) * f.radial_vec(r) ** (1.0 / alpha),
        R, rel_tol)
    lhs = _TWO_PI * abs(lhs_int)

    grad_int = _disk_quad(
        f,
        lambda r: abs(f.radial_derivative(r)) ** gamma * r,
        lambda r: np.abs(f.radial_derivative_vec(r)) ** gamma * r,
        R, rel_tol)
    weight_int = _disk_quad(
        f,
        lambda r: (1.0 - r / R) ** delta * f.radial(r) ** (1.5 / alpha) * r,
        lambda r: (1.0 - r / R) ** delta * f.radial_vec(r) ** (1.5 / alpha) * r,
        R, rel_tol)
    rhs = (1.0 / alpha) \
        * (sharp_constant(gamma) * _TWO_PI * grad_int) ** (1.0 / gamma) \
        * (sharp_constant(delta) * _TWO_PI * weight_int) ** (1.0 / delta)
    return InequalityCheck(lhs, rhs, lhs <= rhs * (1.0 + _HOLDS_SLACK))


def verify_coulomb_uncertainty(rho: DensityProfile, disk: DiskSpec,
                               a: float, b: float, params: BoundParameters,
                               rel_tol: float = 1e-10) -> InequalityCheck:
    """Coulomb uncertainty principle on the disk:

    a b alpha |int (1/|x| - 2/R) rho|
        <= (a^gamma C(gamma)/gamma) int |grad rho^alpha|^gamma
         + (b^delta C(delta)/delta) int rho^{3/2}
    """
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"couplings must be positive, got a={a!r}, b={b!r}")
    _require_centered(rho, disk)
    R = disk.radius
    alpha, gamma, delta = params.alpha, params.gamma, params.delta

    sing_int = _disk_quad(
        rho,
        lambda r: (1.0 - 2.0 * r / R) * rho.radial(r),
        lambda r: (1.0 - 2.0 * r / R) * rho.radial_vec(r),
        R, rel_tol)
    lhs = a * b * alpha * _TWO_PI * abs(sing_int)

    grad_int = _disk_quad(
        rho,
        lambda r: abs(rho.alpha_derivative(r, alpha)) ** gamma * r,
        lambda r: np.abs(rho.alpha_derivative_vec(r, alpha)) ** gamma * r,
        R, rel_tol)
    mass_int = _disk_quad(
        rho,
        lambda r: rho.radial(r) ** 1.5 * r,
        lambda r: rho.radial_vec(r) ** 1.5 * r,
        R, rel_tol)
    rhs = (a ** gamma * sharp_constant(gamma) / gamma) * _TWO_PI * grad_int \
        + (b ** delta * sharp_constant(delta) / delta) * _TWO_PI * mass_int
    return InequalityCheck(lhs, rhs, lhs <= rhs * (1.0 + _HOLDS_SLACK))
