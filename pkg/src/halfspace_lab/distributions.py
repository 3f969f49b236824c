"""Synthetic noisy-halfspace distributions and regularity checkers.

Three built-in models, all with ground-truth direction e1 = (1, 0, ...):

  * make_lower_bound_q    -- the adversarial planar mixture (four parts
                             q1..q4) whose logistic minimizer is forced to
                             tilt away from the ground truth,
  * make_smooth_benchmark -- uniform disk marginal with two mirrored label
                             flip squares; radially symmetric, so its
                             angular Lipschitz constant is 0,
  * make_gaussian_noisy   -- standard Gaussian marginal in d dimensions
                             with a label flip strip against e1.

Planar models carry an exact layered density (see geometry.Region); all
models carry a deterministic counter-based sampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import Region, box_region, sector_region, square_region

__all__ = [
    "CapabilityError",
    "LowerBoundParams",
    "DistributionModel",
    "WellBehavedParams",
    "RadialLipschitzParams",
    "DensityPoint",
    "MomentReport",
    "SubExpReport",
    "WellBehavedReport",
    "make_lower_bound_q",
    "make_smooth_benchmark",
    "make_gaussian_noisy",
    "sample",
    "density_q",
    "check_moments",
    "check_sub_exponential",
    "check_well_behaved",
    "dump_samples",
]

PI = math.pi


class CapabilityError(ValueError):
    """A model lacks the capability (exact density, ...) an operation needs."""


def _stream(seed: int, *key: int) -> np.random.Generator:
    """Counter-based generator keyed by (seed, *key).

    Philox streams are independent per key and advance by a counter, so a
    sampling call is reproducible regardless of what other streams were
    consumed elsewhere.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed,) + key)))


# ---------------------------------------------------------------------------
# the adversarial lower-bound mixture


@dataclass(frozen=True)
class LowerBoundParams:
    """Geometry and layer densities of the lower-bound mixture.

    Parts (tags 1..4): two noisy squares on the down-right/up-left
    diagonal (labels opposing the ground truth), two skew strips hugging
    the vertical axis, two balancing squares on the horizontal axis, and
    a uniform unit disk underneath everything.  Only the disk overlaps
    the other parts; densities add where layers overlap.
    """

    opt: float
    q3: float
    q4: float
    q1_edge: float
    q1_centers: tuple[tuple[float, float], tuple[float, float]]
    q2_halfwidth: float
    q3_edge: float
    q3_centers: tuple[tuple[float, float], tuple[float, float]]

    @classmethod
    def from_opt(cls, opt: float) -> "LowerBoundParams":
        if not 0.0 < opt <= 1.0 / 16.0:
            raise ValueError(f"opt must lie in (0, 1/16], got {opt}")
        root = math.sqrt(opt)
        q3 = (2.0 / 3.0) * root * (1.0 - opt)
        q4 = (1.0 - opt - 2.0 * root - q3) / PI
        c = math.sqrt(2.0) / 2.0
        return cls(
            opt=opt,
            q3=q3,
            q4=q4,
            q1_edge=math.sqrt(opt / 2.0),
            q1_centers=((c, -c), (-c, c)),
            q2_halfwidth=root,
            q3_edge=math.sqrt(q3 / 2.0),
            q3_centers=((1.0, 0.0), (-1.0, 0.0)),
        )

    def part_masses(self) -> np.ndarray:
        """Masses of parts 1..4; positive and summing to one by construction."""
        return np.array([self.opt, 2.0 * math.sqrt(self.opt), self.q3, self.q4 * PI])

    def regions(self) -> tuple[Region, ...]:
        (c1p, c1n) = self.q1_centers
        (c3p, c3n) = self.q3_centers
        w = self.q2_halfwidth
        return (
            square_region(-1, 1.0, c1p, self.q1_edge, tag=1),
            square_region(+1, 1.0, c1n, self.q1_edge, tag=1),
            box_region(+1, 1.0, 0.0, w, 0.0, 1.0, tag=2),
            box_region(-1, 1.0, -w, 0.0, -1.0, 0.0, tag=2),
            square_region(+1, 1.0, c3p, self.q3_edge, tag=3),
            square_region(-1, 1.0, c3n, self.q3_edge, tag=3),
            sector_region(+1, self.q4, 1.0, -PI / 2.0, PI / 2.0, tag=4),
            sector_region(-1, self.q4, 1.0, PI / 2.0, 3.0 * PI / 2.0, tag=4),
        )


# ---------------------------------------------------------------------------


@dataclass
class DistributionModel:
    """A samplable labeled distribution with optional exact planar density.

    true_opt is the zero-one risk of the unit ground-truth direction,
    which for every built-in model is also the best achievable by any
    homogeneous halfspace.  support_bound is an almost-sure bound on
    ||x|| when the marginal is bounded; tail holds sub-exponential
    envelope constants (a1, a2) when known.
    """

    name: str
    dim: int
    ground_truth: np.ndarray
    true_opt: float
    sampler: Callable[[int, int], tuple[np.ndarray, np.ndarray]]
    support_bound: float | None = None
    tail: tuple[float, float] | None = None
    regions: tuple[Region, ...] | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.ground_truth = np.asarray(self.ground_truth, dtype=float)
        if abs(np.linalg.norm(self.ground_truth) - 1.0) > 1e-12:
            raise ValueError("ground truth direction must be a unit vector")

    @property
    def has_density(self) -> bool:
        return self.regions is not None

    def sample(self, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
        if n < 1:
            raise ValueError("need at least one sample")
        return self.sampler(n, seed)

    def marginal_density(self, points: np.ndarray) -> np.ndarray:
        """Marginal feature density at each point (labels summed out)."""
        if self.regions is None:
            raise CapabilityError(f"model {self.name!r} has no exact density")
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(len(pts))
        for reg in self.regions:
            out += reg.density * reg.contains(pts)
        return out


# ---------------------------------------------------------------------------
# sampling


def sample(model: DistributionModel, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw n labeled examples; identical output for identical (model, n, seed)."""
    return model.sample(n, seed)


def _sample_q(params: LowerBoundParams, n: int, seed: int):
    masses = params.part_masses()
    u = _stream(seed, 0).uniform(size=n)
    part = np.searchsorted(np.cumsum(masses), u, side="right")  # 0..3
    X = np.empty((n, 2))
    y = np.empty(n, dtype=int)
    regions = params.regions()
    by_part = {0: regions[0:2], 1: regions[2:4], 2: regions[4:6], 3: regions[6:8]}
    for p in range(4):
        idx = np.flatnonzero(part == p)
        if idx.size == 0:
            continue
        rng = _stream(seed, p + 1)
        # the two pieces of each part carry equal mass
        piece = rng.integers(0, 2, size=idx.size)
        for k in (0, 1):
            sub = idx[piece == k]
            if sub.size == 0:
                continue
            reg = by_part[p][k]
            X[sub] = reg.sample(sub.size, rng)
            y[sub] = reg.label
    return X, y


def make_lower_bound_q(opt: float) -> DistributionModel:
    """The planar adversarial mixture with noise rate opt (0 < opt <= 1/16)."""
    params = LowerBoundParams.from_opt(opt)

    def sampler(n: int, seed: int):
        return _sample_q(params, n, seed)

    return DistributionModel(
        name="q",
        dim=2,
        ground_truth=np.array([1.0, 0.0]),
        true_opt=opt,
        sampler=sampler,
        support_bound=2.0,
        tail=(1.0, 10.0),
        regions=params.regions(),
        meta={"params": params},
    )


# ---------------------------------------------------------------------------
# exact density for the lower-bound mixture


@dataclass(frozen=True)
class DensityPoint:
    """Density of the mixture at one point, broken down per covering part.

    density is the total marginal density; part/label describe the
    lowest-numbered covering part (None outside the support); and
    contributions lists (part, density, label) for every covering layer.
    """

    density: float
    label: int | None
    part: int | None
    contributions: tuple[tuple[int, float, int], ...]


def density_q(params: LowerBoundParams, x) -> DensityPoint:
    pt = np.asarray(x, dtype=float).reshape(1, 2)
    contribs = []
    for reg in params.regions():
        if bool(reg.contains(pt)[0]):
            contribs.append((reg.tag, reg.density, reg.label))
    if not contribs:
        return DensityPoint(0.0, None, None, ())
    contribs.sort(key=lambda c: c[0])
    total = sum(c[1] for c in contribs)
    return DensityPoint(total, contribs[0][2], contribs[0][0], tuple(contribs))


# ---------------------------------------------------------------------------
# smooth benchmark: uniform disk marginal, mirrored flip squares


def make_smooth_benchmark(opt: float) -> DistributionModel:
    """Uniform unit-disk marginal with label flips of total mass opt.

    The flip squares sit at (1/2, -1/2) and (-1/2, 1/2), fully inside the
    disk for every admissible opt, so the flipped mass is exactly opt and
    e1 attains it.  The marginal is radially symmetric, hence its angular
    modulus of continuity is identically zero.
    """
    if not 0.0 < opt <= 1.0 / 16.0:
        raise ValueError(f"opt must lie in (0, 1/16], got {opt}")
    edge = math.sqrt(PI * opt / 2.0)  # each square holds mass opt/2
    inv_pi = 1.0 / PI
    cp = (0.5, -0.5)
    cn = (-0.5, 0.5)
    half_diag = edge * math.sqrt(2.0) / 2.0
    assert math.hypot(*cp) + half_diag < 1.0
    regions = (
        sector_region(+1, inv_pi, 1.0, -PI / 2.0, PI / 2.0, tag=1),
        sector_region(-1, inv_pi, 1.0, PI / 2.0, 3.0 * PI / 2.0, tag=1),
        # flip: remove the true-label layer, add the flipped one
        square_region(-1, +inv_pi, cp, edge, tag=2),
        square_region(+1, -inv_pi, cp, edge, tag=2),
        square_region(+1, +inv_pi, cn, edge, tag=2),
        square_region(-1, -inv_pi, cn, edge, tag=2),
    )
    flip_pos = square_region(-1, inv_pi, cp, edge, tag=2)
    flip_neg = square_region(+1, inv_pi, cn, edge, tag=2)

    def sampler(n: int, seed: int):
        rng = _stream(seed, 1)
        theta = rng.uniform(-PI, PI, size=n)
        r = np.sqrt(rng.uniform(0.0, 1.0, size=n))
        X = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        y = np.where(X[:, 0] >= 0.0, 1, -1)
        y[flip_pos.contains(X)] = -1
        y[flip_neg.contains(X)] = 1
        return X, y

    return DistributionModel(
        name="smooth",
        dim=2,
        ground_truth=np.array([1.0, 0.0]),
        true_opt=opt,
        sampler=sampler,
        support_bound=1.0,
        tail=(1.0, 10.0),
        regions=regions,
        meta={"c_kappa": 0.0, "flip_edge": edge},
    )


# ---------------------------------------------------------------------------
# Gaussian marginal with a flip strip


def _gaussian_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def _solve_flip_threshold(opt: float) -> float:
    """t with P(x1 in (-t, 0)) = opt under a standard normal, by bisection."""
    target = opt
    lo, hi = 0.0, 1.0
    while _gaussian_cdf(0.0) - _gaussian_cdf(-hi) < target:
        hi *= 2.0
        if hi > 1e6:
            raise ValueError(f"no flip threshold reaches mass {opt}")
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if _gaussian_cdf(0.0) - _gaussian_cdf(-mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def make_gaussian_noisy(opt: float, d: int) -> DistributionModel:
    """Standard Gaussian marginal in R^d, labels sign(x1) flipped on a strip.

    The strip (-t, 0) x R^(d-1) has mass opt, so e1 has zero-one risk
    exactly opt.  One-dimensional projections satisfy the (2, 1)
    sub-exponential tail envelope.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if not 0.0 < opt < 0.25:
        raise ValueError(f"opt must lie in (0, 1/4), got {opt}")
    t = _solve_flip_threshold(opt)

    def sampler(n: int, seed: int):
        rng = _stream(seed, 1)
        X = rng.standard_normal((n, d))
        y = np.where(X[:, 0] > -t, 1, -1)
        return X, y

    gt = np.zeros(d)
    gt[0] = 1.0
    return DistributionModel(
        name="gaussian",
        dim=d,
        ground_truth=gt,
        true_opt=opt,
        sampler=sampler,
        support_bound=None,
        tail=(2.0, 1.0),
        regions=None,
        meta={"flip_threshold": t},
    )


# ---------------------------------------------------------------------------
# checkers


@dataclass(frozen=True)
class MomentReport:
    mean: np.ndarray
    x1x2: float
    x1sq_minus_x2sq: float
    errors: dict
    method: str

    @property
    def max_abs(self) -> float:
        return max(float(np.max(np.abs(self.mean))), abs(self.x1x2), abs(self.x1sq_minus_x2sq))


def _region_moment(regions, fn) -> float:
    total = 0.0
    for reg in regions:
        pts, w = reg.quad_nodes(64, 128)
        total += reg.density * float(np.dot(w, fn(pts)))
    return total


def check_moments(model: DistributionModel, method="quadrature") -> MomentReport:
    """First and second mixed moments of the feature marginal.

    method is "quadrature" (needs an exact density) or ("mc", n, seed).
    """
    if method == "quadrature":
        if model.regions is None:
            raise CapabilityError("quadrature moments need an exact density")
        mean = np.array(
            [
                _region_moment(model.regions, lambda p: p[:, 0]),
                _region_moment(model.regions, lambda p: p[:, 1]),
            ]
        )
        x1x2 = _region_moment(model.regions, lambda p: p[:, 0] * p[:, 1])
        aniso = _region_moment(model.regions, lambda p: p[:, 0] ** 2 - p[:, 1] ** 2)
        errors = {"rule": "tensor GL 64x128 per region, exact for these integrands"}
        return MomentReport(mean=mean, x1x2=x1x2, x1sq_minus_x2sq=aniso, errors=errors, method="quadrature")

    tag, n, seed = method
    if tag != "mc":
        raise ValueError(f"unknown moment method {method!r}")
    X, _ = model.sample(n, seed)
    mean = X.mean(axis=0)
    x1x2 = float(np.mean(X[:, 0] * X[:, 1]))
    aniso = float(np.mean(X[:, 0] ** 2 - X[:, 1] ** 2))
    errors = {
        "mean": (X.std(axis=0, ddof=1) / math.sqrt(n)).tolist(),
        "x1x2": float(np.std(X[:, 0] * X[:, 1], ddof=1) / math.sqrt(n)),
        "x1sq_minus_x2sq": float(np.std(X[:, 0] ** 2 - X[:, 1] ** 2, ddof=1) / math.sqrt(n)),
    }
    return MomentReport(mean=mean, x1x2=x1x2, x1sq_minus_x2sq=aniso, errors=errors, method=f"mc(n={n})")


@dataclass(frozen=True)
class SubExpReport:
    passed: bool
    worst_margin: float
    alpha1: float
    alpha2: float
    n_samples: int
    n_directions: int


def check_sub_exponential(samples, directions: int, alpha1: float, alpha2: float, seed: int = 0) -> SubExpReport:
    """Empirical test of the tail envelope P(|<v, x>| >= t) <= a1 exp(-t/a2).

    For each of `directions` random unit directions the empirical tail is
    compared against the envelope on a grid of thresholds inside the
    sample range; a violation counts only when it exceeds four binomial
    standard errors.  Needs at least 10^4 samples.
    """
    X = samples[0] if isinstance(samples, tuple) else np.asarray(samples)
    n = len(X)
    if n < 10_000:
        raise ValueError("tail check needs at least 10^4 samples")
    rng = _stream(seed, 97)
    d = X.shape[1]
    worst = -math.inf
    passed = True
    for _ in range(directions):
        v = rng.standard_normal(d)
        v /= np.linalg.norm(v)
        proj = np.sort(np.abs(X @ v))
        tmax = float(proj[-1])
        ts = np.linspace(0.0, tmax, 65)[1:]
        emp = (n - np.searchsorted(proj, ts, side="left")) / n
        bound = alpha1 * np.exp(-ts / alpha2)
        stderr = np.sqrt(np.maximum(emp * (1.0 - emp), 1e-12) / n)
        margin = emp - bound
        worst = max(worst, float(np.max(margin)))
        if np.any(margin > 4.0 * stderr):
            passed = False
    return SubExpReport(
        passed=passed, worst_margin=worst, alpha1=alpha1, alpha2=alpha2,
        n_samples=n, n_directions=directions,
    )


@dataclass(frozen=True)
class WellBehavedReport:
    passed: bool
    floor_ok: bool
    min_density: float
    sigma_integral: float
    r_sigma_integral: float
    U: float
    R: float


def check_well_behaved(model: DistributionModel, U: float, R: float, grid: int = 512) -> WellBehavedReport:
    """Verify the density floor p >= 1/U inside radius R and the envelope
    integrals int sigma <= U, int r*sigma <= U with sigma(r) = sup_theta p."""
    if model.regions is None:
        raise CapabilityError("well-behavedness check needs an exact density")
    support = model.support_bound or R
    thetas = np.linspace(-PI, PI, grid, endpoint=False)
    cos_t, sin_t = np.cos(thetas), np.sin(thetas)

    rs_floor = np.linspace(R / grid, R, grid)
    min_density = math.inf
    for r in rs_floor:
        pts = np.column_stack([r * cos_t, r * sin_t])
        min_density = min(min_density, float(np.min(model.marginal_density(pts))))
    floor_ok = min_density >= 1.0 / U - 1e-12

    rs = np.linspace(support / grid, support, grid)
    sigma = np.empty(grid)
    for i, r in enumerate(rs):
        pts = np.column_stack([r * cos_t, r * sin_t])
        sigma[i] = float(np.max(model.marginal_density(pts)))
    sigma_int = float(np.trapezoid(sigma, rs))
    r_sigma_int = float(np.trapezoid(rs * sigma, rs))
    passed = floor_ok and sigma_int <= U and r_sigma_int <= U
    return WellBehavedReport(
        passed=passed, floor_ok=floor_ok, min_density=min_density,
        sigma_integral=sigma_int, r_sigma_integral=r_sigma_int, U=U, R=R,
    )


# ---------------------------------------------------------------------------
# descriptor types for the regularity assumptions


def _check_envelope(sigma: Callable[[float], float], U: float, support: float) -> tuple[float, float]:
    rs = np.linspace(0.0, support, 4097)
    vals = np.array([sigma(float(r)) for r in rs])
    if np.any(vals < 0):
        raise ValueError("envelope must be nonnegative")
    s_int = float(np.trapezoid(vals, rs))
    rs_int = float(np.trapezoid(rs * vals, rs))
    if s_int > U + 1e-9 or rs_int > U + 1e-9:
        raise ValueError("envelope integrals exceed U")
    return s_int, rs_int


@dataclass(frozen=True)
class WellBehavedParams:
    """Constants (U, R) and a radial envelope for a well-behaved marginal."""

    U: float
    R: float
    sigma: Callable[[float], float]
    support: float

    def __post_init__(self):
        if self.U <= 0 or self.R <= 0:
            raise ValueError("U and R must be positive")
        _check_envelope(self.sigma, self.U, self.support)


@dataclass(frozen=True)
class RadialLipschitzParams:
    """Angular modulus kappa(r) and its integral over the support."""

    kappa: Callable[[float], float]
    support: float
    c_kappa: float = field(init=False)

    def __post_init__(self):
        rs = np.linspace(0.0, self.support, 4097)
        vals = np.array([self.kappa(float(r)) for r in rs])
        if np.any(vals < 0):
            raise ValueError("kappa must be nonnegative")
        c = float(np.trapezoid(vals, rs))
        if not math.isfinite(c):
            raise ValueError("kappa integral must be finite")
        object.__setattr__(self, "c_kappa", c)


def dump_samples(path, X: np.ndarray, y: np.ndarray) -> None:
    """Write samples as CSV with header x1,...,xd,y."""
    d = X.shape[1]
    header = ",".join([f"x{i+1}" for i in range(d)] + ["y"])
    data = np.column_stack([X, y])
    fmt = ["%.17g"] * d + ["%d"]
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt=fmt)
