"""Small-N planar wavefunctions with exactly computable marginals.

Symmetric product states built from a single orbital give closed forms for
the single-particle density, the pairwise repulsion expectation, and hence
the indirect energy, so the main lower bound can be verified end to end
without statistical noise.  Shifted-mixture orbitals exercise the Monte
Carlo path; its streams derive from (seed, cell index) so parallel scans
are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import (BoundParameters, a_tilde_squared, b_tilde_squared,
                        derive_parameters)
from .density import (DensityProfile, GaussianProfile, MixtureProfile,
                      evaluate_G, evaluate_L)
from .errors import DomainError

_SPEC_KINDS = ("gaussian-product", "shifted-gaussian-mixture")


@dataclass(frozen=True)
class WaveFunctionSpec:
    """A symmetric N-particle product state.

    ``gaussian-product``: every particle occupies the normalized orbital
    with density (A/pi) exp(-A |x|^2).  ``shifted-gaussian-mixture``: the
    orbital density is an equal-weight mixture of that Gaussian shifted to
    each listed center.
    """

    kind: str
    N: int
    A: float
    centers: tuple = ()
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _SPEC_KINDS:
            raise DomainError(f"unknown wavefunction kind {self.kind!r}")
        if self.N < 2:
            raise DomainError(f"need at least two particles, got {self.N!r}")
        if not self.A > 0.0:
            raise DomainError(f"width parameter must be positive, got {self.A!r}")
        centers = tuple((float(c[0]), float(c[1])) for c in self.centers)
        if self.kind == "shifted-gaussian-mixture" and len(centers) < 2:
            raise DomainError("mixture kind needs at least two centers")
        object.__setattr__(self, "centers", centers)


def single_particle_density(spec: WaveFunctionSpec) -> DensityProfile:
    """N times the one-particle marginal of |psi|^2; integrates to N."""
    if spec.kind == "gaussian-product":
        return GaussianProfile(C=spec.N * spec.A / math.pi, A=spec.A)
    weight = spec.N / len(spec.centers)
    return MixtureProfile([
        GaussianProfile(C=weight * spec.A / math.pi, A=spec.A, center=c)
        for c in spec.centers])


def _orbital_profile(spec: WaveFunctionSpec) -> DensityProfile:
    """The normalized single-orbital density |phi|^2 (mass 1)."""
    if spec.kind == "gaussian-product":
        return GaussianProfile(C=spec.A / math.pi, A=spec.A)
    weight = 1.0 / len(spec.centers)
    return MixtureProfile([
        GaussianProfile(C=weight * spec.A / math.pi, A=spec.A, center=c)
        for c in spec.centers])


def _cell_rng(seed: int, cell: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(cell,)))


def _pair_statistic_mc(spec: WaveFunctionSpec, samples: int, cell: int):
    """Monte Carlo estimate of E[1/|x - y|] for two orbital samples."""
    rng = _cell_rng(spec.seed, cell)
    orbital = _orbital_profile(spec)
    x = orbital.sample(samples, rng)
    y = orbital.sample(samples, rng)
    inv = 1.0 / np.hypot(x[:, 0] - y[:, 0], x[:, 1] - y[:, 1])
    return float(inv.mean()), float(inv.std(ddof=1) / math.sqrt(samples))


def pair_statistic(spec: WaveFunctionSpec, method: str = "auto",
                   samples: int = 10 ** 6, cell: int = 0):
    """E[1/|x - y|] for two independent orbital samples, with stderr.

    The pure Gaussian orbital has the closed form sqrt(pi A / 2); mixtures
    are estimated by Monte Carlo.
    """
    if method not in ("auto", "closed-form", "monte-carlo"):
        raise DomainError(f"unknown method {method!r}")
    if method == "closed-form" and spec.kind != "gaussian-product":
        raise DomainError("closed form only exists for the gaussian product")
    if method == "monte-carlo" or (method == "auto"
                                   and spec.kind != "gaussian-product"):
        return _pair_statistic_mc(spec, samples, cell)
    return math.sqrt(math.pi * spec.A / 2.0), 0.0


def pair_repulsion_expectation(spec: WaveFunctionSpec, method: str = "auto",
                               samples: int = 10 ** 6, cell: int = 0):
    """<psi, sum_{i<j} 1/|x_i - x_j| psi> = N(N-1)/2 E[1/|x-y|]."""
    stat, stderr = pair_statistic(spec, method=method, samples=samples, cell=cell)
    pairs = spec.N * (spec.N - 1) / 2.0
    return pairs * stat, pairs * stderr


def indirect_energy(spec: WaveFunctionSpec, method: str = "auto",
                    samples: int = 10 ** 6, cell: int = 0):
    """E(psi) = pair repulsion minus D(rho_psi, rho_psi).

    For a product state both terms are multiples of the same pair
    statistic e: N(N-1)/2 e and N^2/2 e, so E = -(N/2) e exactly and the
    statistical errors cancel down to a single stderr.
    """
    stat, stderr = pair_statistic(spec, method=method, samples=samples, cell=cell)
    half_n = spec.N / 2.0
    return -half_n * stat, half_n * stderr


@dataclass(frozen=True)
class BoundCheckResult:
    """Both sides of the lower bound on one state.

    ``slack = lhs - rhs`` must not drop below the numerical tolerance plus
    three standard errors; ``tightness_ratio`` is lhs/rhs (both negative),
    1 meaning saturation.
    """

    lhs: float
    rhs: float
    slack: float
    tightness_ratio: float | None
    statistical_error: float


def check_main_bound(spec: WaveFunctionSpec, params: BoundParameters,
                     method: str = "auto", samples: int = 10 ** 6,
                     cell: int = 0,
                     b_tilde_sq: float | None = None,
                     a_tilde_sq: float | None = None) -> BoundCheckResult:
    """Assemble E(psi) >= -b~^2 L(rho_psi) - a~^2 G(rho_psi).

    The tilde coefficients may be overridden (the verification runner uses
    that to prove a corrupted constant is caught).
    """
    rho = single_particle_density(spec)
    if b_tilde_sq is None:
        b_tilde_sq = b_tilde_squared(params.epsilon)
    if a_tilde_sq is None:
        a_tilde_sq = a_tilde_squared(params)
    lhs, stderr = indirect_energy(spec, method=method, samples=samples, cell=cell)
    rhs = -b_tilde_sq * evaluate_L(rho).value \
        - a_tilde_sq * evaluate_G(rho, params).value
    ratio = lhs / rhs if rhs < 0.0 else None
    return BoundCheckResult(lhs=lhs, rhs=rhs, slack=lhs - rhs,
                            tightness_ratio=ratio, statistical_error=stderr)


@dataclass(frozen=True)
class ScanRow:
    gamma: float
    epsilon: float
    N: int
    lhs: float
    rhs: float
    slack: float
    ratio: float
    stderr: float


@dataclass(frozen=True)
class ScanResult:
    rows: tuple
    best: tuple  # per spec: (spec index, gamma, epsilon, ratio)


def _scan_cell(args):
    spec, gamma, epsilon, samples, cell = args
    params = derive_parameters(gamma, epsilon)
    result = check_main_bound(spec, params, samples=samples, cell=cell)
    return ScanRow(gamma=gamma, epsilon=epsilon, N=spec.N, lhs=result.lhs,
                   rhs=result.rhs, slack=result.slack,
                   ratio=result.tightness_ratio if result.tightness_ratio
                   is not None else math.nan,
                   stderr=result.statistical_error)


def tightness_scan(specs, gamma_grid, epsilon_grid, samples: int = 10 ** 5,
                   jobs: int = 1) -> ScanResult:
    """Tightness ratio over specs x gamma_grid x epsilon_grid.

    Each cell's Monte Carlo stream is seeded by (spec seed, cell index), so
    the result is independent of scheduling; rows come back in input order.
    """
    tasks = []
    cell = 0
    for spec in specs:
        for gamma in gamma_grid:
            for epsilon in epsilon_grid:
                derive_parameters(gamma, epsilon)  # validate the grid early
                tasks.append((spec, gamma, epsilon, samples, cell))
                cell += 1

    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_scan_cell, tasks, chunksize=1))
    else:
        rows = [_scan_cell(t) for t in tasks]

    best = []
    per_spec = len(gamma_grid) * len(epsilon_grid)
    for i, spec in enumerate(specs):
        chunk = rows[i * per_spec:(i + 1) * per_spec]
        top = max(chunk, key=lambda row: row.ratio)
        best.append((i, top.gamma, top.epsilon, top.ratio))
    return ScanResult(rows=tuple(rows), best=tuple(best))


def spec_from_descriptor(desc: dict) -> WaveFunctionSpec:
    """Build a spec from its JSON form, e.g.
    {"kind": "gaussian-product", "N": 5, "A": 1.0, "seed": 7}."""
    try:
        return WaveFunctionSpec(
            kind=desc["kind"], N=int(desc["N"]), A=float(desc["A"]),
            centers=tuple(tuple(c) for c in desc.get("centers", ())),
            seed=int(desc.get("seed", 0)))
    except KeyError as exc:
        raise DomainError(f"wavefunction descriptor missing field {exc}") from exc


def spec_to_descriptor(spec: WaveFunctionSpec) -> dict:
    out = {"kind": spec.kind, "N": spec.N, "A": spec.A, "seed": spec.seed}
    if spec.centers:
        out["centers"] = [list(c) for c in spec.centers]
    return out
