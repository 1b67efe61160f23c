"""Nonnegative densities on the plane and their functional terms.

Profiles are immutable after construction.  The two functionals evaluated
here are ``L = integral of rho^{3/2}`` and the gradient term
``G = integral of |grad rho^alpha|^gamma``; both are computed by adaptive
radial quadrature (2D polar quadrature for non-concentric mixtures), with
the Gaussian closed forms kept as an independent cross-check.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .constants import BoundParameters
from .errors import DivergenceError, DomainError
from .quadrature import decaying_quad, panel_quad, segmented_gauss

QuadResult = namedtuple("QuadResult", ["value", "error"])

_TWO_PI = 2.0 * math.pi
# Below this the density is treated as zero in gradient integrands, else
# rho^(alpha-1) overflows on subnormals.
_RHO_FLOOR = 1e-280


class DensityProfile:
    """Base class: a nonnegative density with finite mass.

    Radial subclasses implement ``radial`` (value at distance r from the
    center), ``radial_derivative``, and ``alpha_derivative`` (derivative of
    rho^alpha, the quantity the gradient term differentiates).
    """

    kind = "abstract"
    center = (0.0, 0.0)
    is_radial = True

    def radial(self, r: float) -> float:
        raise NotImplementedError

    def radial_vec(self, r):
        r = np.asarray(r, dtype=float)
        flat = np.array([self.radial(float(x)) for x in r.ravel()])
        return flat.reshape(r.shape)

    def radial_derivative(self, r: float) -> float:
        raise NotImplementedError

    def radial_derivative_vec(self, r):
        r = np.asarray(r, dtype=float)
        flat = np.array([self.radial_derivative(float(x)) for x in r.ravel()])
        return flat.reshape(r.shape)

    def alpha_derivative(self, r: float, alpha: float) -> float:
        """d(rho^alpha)/dr at radius r."""
        raise NotImplementedError

    def value(self, x: float, y: float) -> float:
        return self.radial(math.hypot(x - self.center[0], y - self.center[1]))

    def gradient(self, x: float, y: float):
        dx = x - self.center[0]
        dy = y - self.center[1]
        r = math.hypot(dx, dy)
        if r == 0.0:
            return 0.0, 0.0
        d = self.radial_derivative(r)
        return d * dx / r, d * dy / r

    def mass(self) -> float:
        raise NotImplementedError

    def inner_scale(self) -> float:
        """Characteristic length, used as the first quadrature panel width."""
        raise NotImplementedError

    def cover_radius(self) -> float:
        """Radius certainly containing the bulk of the density."""
        raise NotImplementedError

    def scaled(self, lam: float) -> "DensityProfile":
        """The mass-preserving rescaling x -> lam^2 rho(lam x)."""
        raise NotImplementedError

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw n points from the normalized density.  Shape (n, 2)."""
        raise NotImplementedError


@dataclass(frozen=True)
class GaussianProfile(DensityProfile):
    """rho(r) = C exp(-A r^2) about ``center``; mass pi C / A."""

    C: float
    A: float
    center: tuple = (0.0, 0.0)
    kind = "gaussian"

    def __post_init__(self):
        if self.C < 0.0 or not self.A > 0.0:
            raise DomainError(f"need C >= 0 and A > 0, got C={self.C!r}, A={self.A!r}")

    def radial(self, r):
        return self.C * math.exp(-self.A * r * r)

    def radial_vec(self, r):
        return self.C * np.exp(-self.A * np.asarray(r, dtype=float) ** 2)

    def radial_derivative(self, r):
        return -2.0 * self.A * r * self.radial(r)

    def alpha_derivative(self, r, alpha):
        if self.C == 0.0:
            return 0.0
        return -2.0 * alpha * self.A * r * self.C ** alpha \
            * math.exp(-alpha * self.A * r * r)

    def mass(self):
        return math.pi * self.C / self.A

    def inner_scale(self):
        return 1.0 / math.sqrt(self.A)

    def cover_radius(self):
        return 2.0 / math.sqrt(self.A)

    def scaled(self, lam):
        cx, cy = self.center
        return GaussianProfile(lam * lam * self.C, lam * lam * self.A,
                               (cx / lam, cy / lam))

    def sample(self, n, rng):
        sd = 1.0 / math.sqrt(2.0 * self.A)
        return rng.normal(loc=self.center, scale=sd, size=(n, 2))


@dataclass(frozen=True)
class ExponentialProfile(DensityProfile):
    """rho(r) = C exp(-A r) about ``center``; mass 2 pi C / A^2."""

    C: float
    A: float
    center: tuple = (0.0, 0.0)
    kind = "exponential"

    def __post_init__(self):
        if self.C < 0.0 or not self.A > 0.0:
            raise DomainError(f"need C >= 0 and A > 0, got C={self.C!r}, A={self.A!r}")

    def radial(self, r):
        return self.C * math.exp(-self.A * r)

    def radial_vec(self, r):
        return self.C * np.exp(-self.A * np.asarray(r, dtype=float))

    def radial_derivative(self, r):
        return -self.A * self.radial(r)

    def alpha_derivative(self, r, alpha):
        if self.C == 0.0:
            return 0.0
        return -alpha * self.A * self.C ** alpha * math.exp(-alpha * self.A * r)

    def mass(self):
        return _TWO_PI * self.C / (self.A * self.A)

    def inner_scale(self):
        return 1.0 / self.A

    def cover_radius(self):
        return 4.0 / self.A

    def scaled(self, lam):
        cx, cy = self.center
        return ExponentialProfile(lam * lam * self.C, lam * self.A,
                                  (cx / lam, cy / lam))

    def sample(self, n, rng):
        # radial pdf is proportional to r exp(-A r): a Gamma(2, 1/A) radius
        r = rng.gamma(shape=2.0, scale=1.0 / self.A, size=n)
        theta = rng.uniform(0.0, _TWO_PI, size=n)
        out = np.column_stack((r * np.cos(theta), r * np.sin(theta)))
        out += np.asarray(self.center, dtype=float)
        return out


class TabulatedProfile(DensityProfile):
    """Radial density given on strictly increasing nodes starting at 0.

    Values are interpolated with a shape-preserving monotone cubic; the
    gradient term uses a monotone cubic of rho^alpha directly so power-law
    endpoint errors are not amplified.  Beyond the last node the profile is
    either zero (requires the data to have decayed) or an exponential tail
    whose rate comes from the last two nodes.
    """

    kind = "tabulated"
    is_radial = True

    def __init__(self, r, rho, tail="zero", center=(0.0, 0.0)):
        r = np.asarray(r, dtype=float)
        rho = np.asarray(rho, dtype=float)
        if r.ndim != 1 or r.shape != rho.shape or r.size < 4:
            raise DomainError("need matching 1-D arrays with at least 4 nodes")
        if r[0] != 0.0 or np.any(np.diff(r) <= 0.0):
            raise DomainError("radii must start at 0 and increase strictly")
        if np.any(rho < 0.0) or not np.all(np.isfinite(rho)):
            raise DomainError("density values must be finite and nonnegative")
        if tail == "zero":
            if rho[-1] > 1e-9 * max(rho.max(), 1e-300):
                raise DomainError(
                    "zero tail requires the profile to decay at the last node")
            self._tail_rate = None
        elif tail == "exponential":
            if not (rho[-2] > rho[-1] > 0.0):
                raise DomainError(
                    "exponential tail requires decreasing positive end values")
            self._tail_rate = math.log(rho[-2] / rho[-1]) / (r[-1] - r[-2])
        else:
            raise DomainError(f"unknown tail model {tail!r}")
        self.tail = tail
        self.center = (float(center[0]), float(center[1]))
        self.nodes = r
        self.values = rho
        self._interp = PchipInterpolator(r, rho, extrapolate=False)
        self._deriv = self._interp.derivative()
        self._alpha_cache = {}
        self._mass = None

    def _tail_value(self, r):
        if self._tail_rate is None:
            return 0.0
        return self.values[-1] * math.exp(-self._tail_rate * (r - self.nodes[-1]))

    def radial(self, r):
        if r <= self.nodes[-1]:
            return max(float(self._interp(r)), 0.0)
        return self._tail_value(r)

    def radial_vec(self, r):
        r = np.asarray(r, dtype=float)
        inside = r <= self.nodes[-1]
        out = np.zeros_like(r)
        out[inside] = np.maximum(self._interp(r[inside]), 0.0)
        if self._tail_rate is not None:
            out[~inside] = self.values[-1] * np.exp(
                -self._tail_rate * (r[~inside] - self.nodes[-1]))
        return out

    def radial_derivative(self, r):
        if r <= self.nodes[-1]:
            return float(self._deriv(r))
        if self._tail_rate is None:
            return 0.0
        return -self._tail_rate * self._tail_value(r)

    def radial_derivative_vec(self, r):
        # only valid inside the tabulated range
        return np.asarray(self._deriv(np.asarray(r, dtype=float)))

    def _alpha_interp(self, alpha):
        pair = self._alpha_cache.get(alpha)
        if pair is None:
            powered = PchipInterpolator(self.nodes, self.values ** alpha,
                                        extrapolate=False)
            pair = (powered, powered.derivative())
            self._alpha_cache[alpha] = pair
        return pair

    def alpha_derivative(self, r, alpha):
        if r <= self.nodes[-1]:
            return float(self._alpha_interp(alpha)[1](r))
        if self._tail_rate is None:
            return 0.0
        k = self._tail_rate
        return -alpha * k * self.values[-1] ** alpha \
            * math.exp(-alpha * k * (r - self.nodes[-1]))

    def alpha_derivative_vec(self, r, alpha):
        # only valid inside the tabulated range
        return np.asarray(self._alpha_interp(alpha)[1](np.asarray(r, dtype=float)))

    def body_and_tail(self, f_vec, f_scalar):
        """Integrate segment-by-segment inside the nodes, adaptively beyond.

        The interpolant is smooth within segments but has curvature jumps
        at every node, which would defeat a single adaptive rule.
        """
        body, err = segmented_gauss(f_vec, self.nodes)
        if self._tail_rate is not None:
            tail, terr = decaying_quad(f_scalar, self.nodes[-1],
                                       1.0 / self._tail_rate)
            body += tail
            err += terr
        return body, err

    def mass(self):
        if self._mass is None:
            val, _ = self.body_and_tail(
                lambda s: _TWO_PI * self.radial_vec(s) * s,
                lambda s: _TWO_PI * self.radial(s) * s)
            self._mass = val
        return self._mass

    def inner_scale(self):
        return self.nodes[-1] / 8.0

    def cover_radius(self):
        return self.nodes[-1]

    def scaled(self, lam):
        cx, cy = self.center
        return TabulatedProfile(self.nodes / lam, lam * lam * self.values,
                                tail=self.tail, center=(cx / lam, cy / lam))

    def sample(self, n, rng):
        r_max = self.nodes[-1]
        if self._tail_rate is not None:
            r_max += 40.0 / self._tail_rate
        grid = np.linspace(0.0, r_max, 8192)
        pdf = self.radial_vec(grid) * grid
        cdf = np.concatenate(([0.0], np.cumsum((pdf[1:] + pdf[:-1]) / 2.0
                                               * np.diff(grid))))
        cdf /= cdf[-1]
        r = np.interp(rng.uniform(size=n), cdf, grid)
        theta = rng.uniform(0.0, _TWO_PI, size=n)
        out = np.column_stack((r * np.cos(theta), r * np.sin(theta)))
        out += np.asarray(self.center, dtype=float)
        return out


class MixtureProfile(DensityProfile):
    """Sum of radial components, possibly at different centers.

    Concentric mixtures stay radial; otherwise functionals fall back to
    polar quadrature about the mass centroid.
    """

    kind = "mixture"

    def __init__(self, components):
        components = tuple(components)
        if not components:
            raise DomainError("mixture needs at least one component")
        if any(isinstance(c, MixtureProfile) for c in components):
            raise DomainError("mixtures do not nest")
        self.components = components
        self._masses = np.array([c.mass() for c in components])
        total = self._masses.sum()
        if total > 0.0:
            cx = sum(m * c.center[0] for m, c in zip(self._masses, components)) / total
            cy = sum(m * c.center[1] for m, c in zip(self._masses, components)) / total
        else:
            cx, cy = components[0].center
        self.center = (cx, cy)
        self.is_radial = all(c.center == components[0].center for c in components)

    def radial(self, r):
        if not self.is_radial:
            raise DomainError("non-concentric mixture has no radial form")
        return sum(c.radial(r) for c in self.components)

    def radial_derivative(self, r):
        if not self.is_radial:
            raise DomainError("non-concentric mixture has no radial form")
        return sum(c.radial_derivative(r) for c in self.components)

    def alpha_derivative(self, r, alpha):
        # d(rho^alpha)/dr = alpha rho^(alpha-1) rho'; the per-component
        # alpha-derivatives do not add, so go through the sum.
        rho = self.radial(r)
        if rho < _RHO_FLOOR:
            return 0.0
        return alpha * rho ** (alpha - 1.0) * self.radial_derivative(r)

    def value(self, x, y):
        return sum(c.value(x, y) for c in self.components)

    def gradient(self, x, y):
        gx = gy = 0.0
        for c in self.components:
            cgx, cgy = c.gradient(x, y)
            gx += cgx
            gy += cgy
        return gx, gy

    def mass(self):
        return float(self._masses.sum())

    def inner_scale(self):
        return max(c.inner_scale() for c in self.components)

    def cover_radius(self):
        cx, cy = self.center
        return max(math.hypot(c.center[0] - cx, c.center[1] - cy)
                   + c.cover_radius() for c in self.components)

    def component_angles(self):
        cx, cy = self.center
        angles = sorted(math.atan2(c.center[1] - cy, c.center[0] - cx) % _TWO_PI
                        for c in self.components
                        if (c.center[0] - cx, c.center[1] - cy) != (0.0, 0.0))
        return angles or None

    def scaled(self, lam):
        return MixtureProfile([c.scaled(lam) for c in self.components])

    def sample(self, n, rng):
        weights = self._masses / self._masses.sum()
        idx = rng.choice(len(self.components), size=n, p=weights)
        out = np.empty((n, 2))
        for k, comp in enumerate(self.components):
            where = np.nonzero(idx == k)[0]
            if where.size:
                out[where] = comp.sample(where.size, rng)
        return out


def scale_density(rho: DensityProfile, lam: float) -> DensityProfile:
    """Return the profile of lam^2 rho(lam x); total mass is unchanged."""
    if not lam > 0.0 or not math.isfinite(lam):
        raise DomainError(f"scaling factor must be positive, got {lam!r}")
    return rho.scaled(lam)


# --------------------------------------------------------------------------
# Functional terms


@dataclass(frozen=True)
class FunctionalValue:
    """The two functional terms with the exponent used for the gradient one."""

    L: float
    G: float
    gamma: float
    estimated_quadrature_error: float


def _polar_integral(f, rho, rel_tol):
    """Integrate f(x, y) over the plane in polar coordinates about the
    mixture centroid."""
    cx, cy = rho.center
    hints = rho.component_angles() if isinstance(rho, MixtureProfile) else None

    def ring(r):
        val, _ = panel_quad(
            lambda th: f(cx + r * math.cos(th), cy + r * math.sin(th)),
            0.0, _TWO_PI, rel_tol=rel_tol, points=hints)
        return r * val

    return decaying_quad(ring, 0.0, rho.inner_scale(), rel_tol=rel_tol,
                         min_radius=rho.cover_radius())


def evaluate_L(rho: DensityProfile, rel_tol: float = 1e-10) -> QuadResult:
    """L = integral of rho^{3/2} over the plane."""
    if rho.mass() == 0.0:
        return QuadResult(0.0, 0.0)
    if isinstance(rho, TabulatedProfile):
        return QuadResult(*rho.body_and_tail(
            lambda r: _TWO_PI * rho.radial_vec(r) ** 1.5 * r,
            lambda r: _TWO_PI * rho.radial(r) ** 1.5 * r))
    if rho.is_radial:
        return QuadResult(*decaying_quad(
            lambda r: _TWO_PI * rho.radial(r) ** 1.5 * r,
            0.0, rho.inner_scale(), rel_tol=rel_tol,
            min_radius=rho.cover_radius()))
    return QuadResult(*_polar_integral(
        lambda x, y: rho.value(x, y) ** 1.5, rho, rel_tol))


def evaluate_G(rho: DensityProfile, params: BoundParameters,
               rel_tol: float = 1e-10) -> QuadResult:
    """G = integral of |grad rho^alpha|^gamma over the plane."""
    alpha, gamma = params.alpha, params.gamma
    if rho.mass() == 0.0:
        return QuadResult(0.0, 0.0)
    if isinstance(rho, TabulatedProfile):
        return QuadResult(*rho.body_and_tail(
            lambda r: _TWO_PI * np.abs(rho.alpha_derivative_vec(r, alpha)) ** gamma * r,
            lambda r: _TWO_PI * abs(rho.alpha_derivative(r, alpha)) ** gamma * r))
    if rho.is_radial:
        return QuadResult(*decaying_quad(
            lambda r: _TWO_PI * abs(rho.alpha_derivative(r, alpha)) ** gamma * r,
            0.0, rho.inner_scale(), rel_tol=rel_tol,
            min_radius=rho.cover_radius()))

    def integrand(x, y):
        v = rho.value(x, y)
        if v < _RHO_FLOOR:
            return 0.0
        gx, gy = rho.gradient(x, y)
        return (alpha * v ** (alpha - 1.0) * math.hypot(gx, gy)) ** gamma

    return QuadResult(*_polar_integral(integrand, rho, rel_tol))


def functional_value(rho: DensityProfile, params: BoundParameters,
                     rel_tol: float = 1e-10) -> FunctionalValue:
    """Both functional terms plus the summed quadrature error estimate."""
    l_val = evaluate_L(rho, rel_tol=rel_tol)
    g_val = evaluate_G(rho, params, rel_tol=rel_tol)
    return FunctionalValue(L=l_val.value, G=g_val.value, gamma=params.gamma,
                           estimated_quadrature_error=l_val.error + g_val.error)


def kinetic_functional(rho: DensityProfile, params: BoundParameters,
                       a_tilde_sq: float, b_tilde_sq: float) -> float:
    """a~^2 G + b~^2 L; scales like an inverse length under scale_density."""
    return (a_tilde_sq * evaluate_G(rho, params).value
            + b_tilde_sq * evaluate_L(rho).value)


# --------------------------------------------------------------------------
# Gaussian closed forms (the independent check on the quadrature path)


def gaussian_L_closed_form(C: float, A: float) -> float:
    """L for rho = C exp(-A r^2): C^{3/2} 2 pi / (3 A)."""
    return C ** 1.5 * _TWO_PI / (3.0 * A)


def gaussian_G_closed_form(C: float, A: float, params: BoundParameters) -> float:
    """G for rho = C exp(-A r^2):

    C^{alpha gamma} pi 2^gamma (A alpha)^{gamma/2 - 1}
        Gamma(1 + gamma/2) gamma^{-gamma/2 - 1}
    """
    g, alpha = params.gamma, params.alpha
    return (C ** (alpha * g) * math.pi * 2.0 ** g
            * (A * alpha) ** (g / 2.0 - 1.0)
            * math.gamma(1.0 + g / 2.0) * g ** (-g / 2.0 - 1.0))


def gaussian_G_over_L(N: float, params: BoundParameters) -> float:
    """G/L for the mass-N Gaussian (C = N A / pi); independent of A.

    3 (sqrt 2 / gamma)^gamma (pi / N)^{gamma/2}
        Gamma(1 + gamma/2) (3 - gamma)^{gamma/2 - 1}
    """
    if not N > 0.0:
        raise DomainError(f"mass must be positive, got {N!r}")
    g = params.gamma
    return (3.0 * (math.sqrt(2.0) / g) ** g * (math.pi / N) ** (g / 2.0)
            * math.gamma(1.0 + g / 2.0) * (3.0 - g) ** (g / 2.0 - 1.0))


# --------------------------------------------------------------------------
# JSON descriptors (field names fixed for cross-language compatibility)


def profile_to_descriptor(rho: DensityProfile) -> dict:
    if isinstance(rho, GaussianProfile):
        return {"kind": "gaussian", "C": rho.C, "A": rho.A,
                "center": list(rho.center)}
    if isinstance(rho, ExponentialProfile):
        return {"kind": "exponential", "C": rho.C, "A": rho.A,
                "center": list(rho.center)}
    if isinstance(rho, TabulatedProfile):
        return {"kind": "tabulated", "r": rho.nodes.tolist(),
                "rho": rho.values.tolist(), "tail": rho.tail,
                "center": list(rho.center)}
    if isinstance(rho, MixtureProfile):
        return {"kind": "mixture",
                "components": [profile_to_descriptor(c) for c in rho.components]}
    raise DomainError(f"cannot serialize profile kind {rho.kind!r}")


def profile_from_descriptor(desc: dict) -> DensityProfile:
    try:
        kind = desc["kind"]
        center = tuple(desc.get("center", (0.0, 0.0)))
        if kind == "gaussian":
            return GaussianProfile(float(desc["C"]), float(desc["A"]), center)
        if kind == "exponential":
            return ExponentialProfile(float(desc["C"]), float(desc["A"]), center)
        if kind == "tabulated":
            return TabulatedProfile(desc["r"], desc["rho"],
                                    tail=desc.get("tail", "zero"), center=center)
        if kind == "mixture":
            return MixtureProfile([profile_from_descriptor(c)
                                   for c in desc["components"]])
    except KeyError as exc:
        raise DomainError(f"profile descriptor missing field {exc}") from exc
    raise DomainError(f"unknown profile kind {kind!r}")
