"""The auxiliary molecular energy functional and its stability bound.

The functional is

    xi(rho) = a~^2 G + b~^2 L - int V rho + D(rho, rho) + U,

nonnegative for every admissible density whenever the nuclear charge z
stays below the threshold max_sigma h(sigma).  This module assembles xi
term by term, evaluates the closed-form lower bound on it, and sweeps
density corpora looking for (forbidden) violations.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .constants import (BoundParameters, StabilityInputs, a_from_a_tilde,
                        maximize_h)
from .coulomb import (MolecularConfig, attraction_term, direct_term,
                      repulsion_term)
from .density import DensityProfile, evaluate_G, evaluate_L
from .errors import DivergenceError, DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FunctionalBreakdown:
    """The five terms of xi plus the assembled value and verdicts.

    ``half_distance_limit`` marks single-nucleus configurations, where the
    closed-form lower bound degenerates to its K -> 1 limit of zero and
    only the bracket sign is informative.
    """

    gradient_term: float
    l_term: float
    attraction: float
    direct: float
    repulsion: float
    xi: float
    analytic_lower_bound: float | None = None
    stable: bool | None = None
    half_distance_limit: bool = False


def stability_bracket(inputs: StabilityInputs) -> float:
    """z^2/8 - (4 / (27 b1^4)) (2 z^3 (pi - 1) + pi a^3 b2^3)."""
    z = inputs.z
    return z * z / 8.0 - (4.0 / (27.0 * inputs.b1 ** 4)) * (
        2.0 * z ** 3 * (math.pi - 1.0) + math.pi * (inputs.a * inputs.b2) ** 3)


def analytic_stability_rhs(config: MolecularConfig,
                           inputs: StabilityInputs) -> float:
    """Closed-form lower bound on xi: sum_j bracket / D_j.

    Requires z <= a b2 / 2 (the bound's derivation needs it).  For a single
    nucleus every half-distance is infinite and the sum is 0.
    """
    if inputs.z > inputs.a * inputs.b2 / 2.0 * (1.0 + 1e-12):
        raise DomainError(
            f"bound requires z <= a b2 / 2, got z={inputs.z!r}, "
            f"a b2 / 2 = {inputs.a * inputs.b2 / 2.0!r}")
    bracket = stability_bracket(inputs)
    total = 0.0
    for d in config.half_distances:
        if math.isfinite(d):
            total += bracket / d
    return total


def default_stability_inputs(params: BoundParameters, a_tilde_sq: float,
                             b_tilde_sq: float, z: float) -> StabilityInputs:
    """The proof-path couplings: b2 = 2z/a (smallest allowed) and
    b1^2 = sigma* b~^2 with sigma* maximizing h."""
    a = a_from_a_tilde(a_tilde_sq, params)
    sigma_star, _ = maximize_h(params.gamma, a, b_tilde_sq)
    return StabilityInputs(a=a, b1=math.sqrt(sigma_star * b_tilde_sq),
                           b2=2.0 * z / a, z=z)


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    z_max: float
    sigma_star: float


def stability_verdict(params: BoundParameters, a_tilde_sq: float,
                      b_tilde_sq: float, z: float) -> StabilityVerdict:
    """Largest guaranteed-stable charge z_max = max_sigma h(sigma) and the
    verdict z <= z_max."""
    if z < 0.0:
        raise DomainError(f"charge must be nonnegative, got {z!r}")
    a = a_from_a_tilde(a_tilde_sq, params)
    sigma_star, h_max = maximize_h(params.gamma, a, b_tilde_sq)
    return StabilityVerdict(stable=z <= h_max * (1.0 + 1e-10), z_max=h_max,
                            sigma_star=sigma_star)


def evaluate_xi(rho: DensityProfile, config: MolecularConfig,
                params: BoundParameters, a_tilde_sq: float,
                b_tilde_sq: float) -> FunctionalBreakdown:
    """Itemized evaluation of xi(rho) for one molecular configuration."""
    terms = {}
    for name, compute in (
            ("gradient term", lambda: a_tilde_sq * evaluate_G(rho, params).value),
            ("rho^{3/2} term", lambda: b_tilde_sq * evaluate_L(rho).value),
            ("attraction", lambda: attraction_term(rho, config)),
            ("direct term", lambda: direct_term(rho))):
        try:
            terms[name] = compute()
        except DivergenceError as exc:
            raise DivergenceError(f"{name} diverged: {exc}") from exc
    repulsion = repulsion_term(config)

    xi = (terms["gradient term"] + terms["rho^{3/2} term"]
          - terms["attraction"] + terms["direct term"] + repulsion)

    k_is_one = len(config.positions) == 1
    # proof-path couplings satisfy z = a b2 / 2, so the bound always applies
    inputs = default_stability_inputs(params, a_tilde_sq, b_tilde_sq, config.z)
    verdict = stability_verdict(params, a_tilde_sq, b_tilde_sq, config.z)
    rhs = analytic_stability_rhs(config, inputs)
    return FunctionalBreakdown(
        gradient_term=terms["gradient term"],
        l_term=terms["rho^{3/2} term"],
        attraction=terms["attraction"],
        direct=terms["direct term"],
        repulsion=repulsion,
        xi=xi,
        analytic_lower_bound=rhs,
        stable=verdict.stable,
        half_distance_limit=k_is_one)


# Relative floor for flagging xi < 0: measured against the sum of term
# magnitudes so the tolerance is profile independent.
VIOLATION_REL = 1e-8


@dataclass(frozen=True)
class SweepCase:
    profile_index: int
    config_index: int
    breakdown: FunctionalBreakdown
    scale: float
    violation: bool


@dataclass(frozen=True)
class SweepReport:
    cases: tuple
    min_xi: float
    violations: tuple
    skipped: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def empirical_stability_sweep(corpus, configs, params: BoundParameters,
                              a_tilde_sq: float, b_tilde_sq: float) -> SweepReport:
    """Evaluate xi over corpus x configs; any xi below the relative floor
    is a hard violation.

    Precondition: every config charge is within the guaranteed-stable range,
    otherwise a negative xi would not falsify anything.
    """
    verdict_cache = stability_verdict(params, a_tilde_sq, b_tilde_sq, 0.0)
    for j, config in enumerate(configs):
        if config.z > verdict_cache.z_max * (1.0 + 1e-10):
            raise DomainError(
                f"config {j} has z={config.z!r} above z_max={verdict_cache.z_max!r}")

    cases = []
    skipped = []
    for i, rho in enumerate(corpus):
        for j, config in enumerate(configs):
            try:
                breakdown = evaluate_xi(rho, config, params, a_tilde_sq,
                                        b_tilde_sq)
            except DivergenceError as exc:
                logger.warning("skipping corpus %d / config %d: %s", i, j, exc)
                skipped.append((i, j, str(exc)))
                continue
            scale = (abs(breakdown.gradient_term) + abs(breakdown.l_term)
                     + abs(breakdown.attraction) + abs(breakdown.direct)
                     + abs(breakdown.repulsion))
            violation = breakdown.xi < -VIOLATION_REL * scale
            cases.append(SweepCase(i, j, breakdown, scale, violation))

    if not cases:
        raise DomainError("sweep evaluated no cases")
    min_xi = min(c.breakdown.xi for c in cases)
    violations = tuple(c for c in cases if c.violation)
    return SweepReport(cases=tuple(cases), min_xi=min_xi,
                       violations=violations, skipped=tuple(skipped))
