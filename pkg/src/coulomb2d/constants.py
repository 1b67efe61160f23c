"""Closed-form constants of the two-dimensional indirect-energy bound.

Everything here is an explicit formula in the gradient exponent ``gamma``
and the slack parameter ``epsilon``, plus the scalar threshold problem
``maximize_h`` whose value caps the nuclear charge for which the auxiliary
molecular functional stays nonnegative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

# gamma is accepted on [1 + GAMMA_GUARD, 3 - GAMMA_GUARD]; the endpoint
# factors 1/(gamma-1) and 1/(3-gamma) blow up outside the guard band and
# silent clamping would corrupt parameter scans.
GAMMA_GUARD = 1e-6

_FIVE_PI_MINUS_ONE = 5.0 * math.pi - 1.0


def sharp_constant(p: float) -> float:
    """Best constant C(p) in |x|^p + |y|^p <= C(p) (x^2 + y^2)^{p/2}.

    C(p) = 2^{1 - p/2} for 0 < p <= 2 and C(p) = 1 for p >= 2; the two
    branches agree at p = 2.
    """
    if not p > 0.0:
        raise DomainError(f"sharp_constant requires p > 0, got {p!r}")
    if p <= 2.0:
        return 2.0 ** (1.0 - p / 2.0)
    return 1.0


@dataclass(frozen=True)
class BoundParameters:
    """The (gamma, epsilon) pair with the derived exponents alpha and delta.

    alpha = (3 - gamma) / (2 gamma) makes the kinetic-type functional scale
    as an inverse length; delta is the Holder conjugate of gamma.
    """

    gamma: float
    epsilon: float
    alpha: float
    delta: float


def _validate_gamma(gamma: float) -> None:
    if not (1.0 + GAMMA_GUARD <= gamma <= 3.0 - GAMMA_GUARD):
        raise DomainError(
            f"gamma must lie in [1 + {GAMMA_GUARD:g}, 3 - {GAMMA_GUARD:g}], got {gamma!r}")


def derive_parameters(gamma: float, epsilon: float) -> BoundParameters:
    """Validate (gamma, epsilon) and derive alpha and delta."""
    _validate_gamma(gamma)
    if not epsilon > 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon!r}")
    alpha = (3.0 - gamma) / (2.0 * gamma)
    delta = gamma / (gamma - 1.0)
    return BoundParameters(gamma=gamma, epsilon=epsilon, alpha=alpha, delta=delta)


def beta_constant() -> float:
    """Leading-term constant (4/3)^{3/2} sqrt(5 pi - 1), about 5.9045."""
    return (4.0 / 3.0) ** 1.5 * math.sqrt(_FIVE_PI_MINUS_ONE)


def b_tilde_squared(epsilon: float) -> float:
    """Coefficient of the rho^{3/2} term: beta (1 + epsilon).

    Independent of gamma by construction, hence no gamma argument.
    """
    if epsilon < 0.0:
        raise DomainError(f"epsilon must be nonnegative, got {epsilon!r}")
    return beta_constant() * (1.0 + epsilon)


def a_tilde_squared(params: BoundParameters) -> float:
    """Coefficient of the gradient term.

    a~^2 = 2^g C(g)/(3-g) * [ (1/(beta eps)) (g-1)/(3-g) C(g/(g-1)) ]^{g-1}
    with g = gamma.  At gamma = 2 this reduces to 4/(beta epsilon); as
    gamma -> 1+ it tends to sqrt(2) for every epsilon.
    """
    g = params.gamma
    eps = params.epsilon
    lead = 2.0 ** g * sharp_constant(g) / (3.0 - g)
    base = (1.0 / (beta_constant() * eps)) * ((g - 1.0) / (3.0 - g)) \
        * sharp_constant(params.delta)
    return lead * base ** (g - 1.0)


def a_from_a_tilde(a_tilde_sq: float, params: BoundParameters) -> float:
    """Invert a~^2 = a^gamma C(gamma) / (2 alpha gamma) for the coupling a."""
    if not a_tilde_sq > 0.0:
        raise DomainError(f"a_tilde_sq must be positive, got {a_tilde_sq!r}")
    g = params.gamma
    # 2 alpha gamma = 3 - gamma
    return (2.0 * params.alpha * g * a_tilde_sq / sharp_constant(g)) ** (1.0 / g)


def a_tilde_sq_from_coupling(a: float, params: BoundParameters) -> float:
    """Forward map a -> a~^2, the inverse of :func:`a_from_a_tilde`."""
    if not a > 0.0:
        raise DomainError(f"coupling a must be positive, got {a!r}")
    g = params.gamma
    return a ** g * sharp_constant(g) / (2.0 * params.alpha * g)


def b_tilde_sq_from_couplings(b1: float, b2: float, params: BoundParameters) -> float:
    """Compose b~^2 = b2^delta C(delta) / (2 alpha delta) + b1^2."""
    if not (b1 > 0.0 and b2 > 0.0):
        raise DomainError(f"couplings must be positive, got b1={b1!r}, b2={b2!r}")
    d = params.delta
    return b2 ** d * sharp_constant(d) / (2.0 * params.alpha * d) + b1 ** 2


@dataclass(frozen=True)
class StabilityInputs:
    """Positive couplings (a, b1, b2) and the nuclear charge z.

    Composing them through :func:`a_tilde_sq_from_coupling` and
    :func:`b_tilde_sq_from_couplings` recovers the tilde constants.
    """

    a: float
    b1: float
    b2: float
    z: float

    def __post_init__(self):
        for name in ("a", "b1", "b2", "z"):
            value = getattr(self, name)
            if not value > 0.0:
                raise DomainError(f"{name} must be strictly positive, got {value!r}")


def h_branches(sigma: float, gamma: float, a: float, b_tilde_sq: float):
    """The two competing charge thresholds whose min defines h(sigma).

    branch1 decreases from a positive value to 0 on (0, 1); branch2
    increases from 0, so their unique crossing maximizes the min.
    """
    if not (0.0 < sigma < 1.0):
        raise DomainError(f"sigma must lie in (0, 1), got {sigma!r}")
    if not (a > 0.0 and b_tilde_sq > 0.0):
        raise DomainError(
            f"couplings must be positive, got a={a!r}, b_tilde_sq={b_tilde_sq!r}")
    _validate_gamma(gamma)
    g = gamma
    c_delta = sharp_constant(g / (g - 1.0))
    branch1 = (a / 2.0) * (
        b_tilde_sq * ((3.0 - g) / (g - 1.0)) / c_delta * (1.0 - sigma)
    ) ** ((g - 1.0) / g)
    branch2 = (27.0 / 64.0) * (b_tilde_sq ** 2 / _FIVE_PI_MINUS_ONE) * sigma ** 2
    return branch1, branch2


def h_of_sigma(sigma: float, gamma: float, a: float, b_tilde_sq: float) -> float:
    """Charge threshold h(sigma) = min of the two branches."""
    branch1, branch2 = h_branches(sigma, gamma, a, b_tilde_sq)
    return min(branch1, branch2)


def maximize_h(gamma: float, a: float, b_tilde_sq: float, tol: float = 1e-12):
    """Maximize h over sigma in (0, 1).

    The max of the min of a decreasing and an increasing branch sits at
    their crossing, located by bracketing bisection on the branch
    difference to absolute tolerance ``tol`` in sigma.

    Returns ``(sigma_star, h_max)``.
    """
    def diff(sigma):
        branch1, branch2 = h_branches(sigma, gamma, a, b_tilde_sq)
        return branch1 - branch2

    lo, hi = 1e-15, 1.0 - 1e-15
    if diff(lo) <= 0.0 or diff(hi) >= 0.0:  # cannot happen for valid inputs
        raise DomainError("branch crossing not bracketed on (0, 1)")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if diff(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    sigma_star = 0.5 * (lo + hi)
    return sigma_star, h_of_sigma(sigma_star, gamma, a, b_tilde_sq)
