"""Optimizers and the exact global-minimizer search.

Two optimizers:

  * pgd_logistic: full-batch projected gradient descent on the empirical
    logistic risk, constrained to a ball of radius 1/sqrt(epsilon),
    started at the origin.  With step size 4/B^2 (B an almost-sure bound
    on ||x||) the empirical risk is nonincreasing.
  * sgd_hinge_phase2: one-sample-per-step projected SGD on the hinge
    loss over the halfspace {w : <w, v> >= 1} anchored at a unit warm
    start v, which keeps every iterate at norm >= 1.

two_phase chains them: the normalized PGD output becomes the anchor for
the hinge phase, whose best recorded iterate (by held-out zero-one risk)
is reported.

oracle_global_min locates the global minimizer of the population
logistic risk of an exact planar model by a vectorized polar grid scan
followed by damped Newton refinement on adaptive-quadrature gradients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import angle_between, project_ball
from .distributions import DistributionModel, LowerBoundParams, make_lower_bound_q
from .losses import Hinge, Logistic, LossKind, loss_value
from .oracle import _backtracking_descent, _newton_polish
from .risk import (
    RiskReport,
    batch_population_risk,
    empirical_grad,
    empirical_risk,
    population_grad,
    population_risk,
    scan_nodes,
    zero_one_exact,
)

__all__ = [
    "PgdConfig",
    "SgdConfig",
    "TrajectoryPoint",
    "Trajectory",
    "TwoPhaseResult",
    "OracleReport",
    "pgd_logistic",
    "sgd_hinge_phase2",
    "two_phase",
    "oracle_global_min",
    "oracle_global_min_q",
    "reference_axis_minimum",
]


def _derive_seed(seed: int, tag: int) -> int:
    return int(np.random.SeedSequence((seed, tag)).generate_state(1)[0])


# ---------------------------------------------------------------------------
# configs and trajectories


@dataclass
class PgdConfig:
    """Projected gradient descent settings; the ball radius is always
    derived from epsilon, never cached."""

    epsilon: float
    T: int
    n: int
    seed: int = 0
    eta: float | None = None  # None: 4/B^2 from the model's support bound
    loss: LossKind = field(default_factory=Logistic)
    record_every: int | None = None  # None: max(1, T // 1000)

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.T < 1 or self.n < 1:
            raise ValueError("T and n must be positive")
        if isinstance(self.loss, Hinge):
            raise ValueError("phase 1 optimizes a logistic-type loss")

    @property
    def radius(self) -> float:
        return 1.0 / math.sqrt(self.epsilon)


@dataclass
class SgdConfig:
    """Hinge-phase settings; anchor is the unit warm-start direction."""

    eta: float
    T: int
    anchor: np.ndarray
    eval_every: int = 1000
    eval_n: int = 100_000
    seed: int = 0

    def __post_init__(self):
        self.anchor = np.asarray(self.anchor, dtype=float)
        if abs(float(np.linalg.norm(self.anchor)) - 1.0) > 1e-12:
            raise ValueError("anchor must be a unit vector")
        if self.eval_every < 1:
            raise ValueError("eval_every must be at least 1")
        if self.eta <= 0 or self.T < 1:
            raise ValueError("eta must be positive and T at least 1")


@dataclass(frozen=True)
class TrajectoryPoint:
    step: int
    w: np.ndarray
    logistic_risk: float
    hinge_risk: float
    zero_one: float
    angle: float
    norm: float


@dataclass
class Trajectory:
    """Recorded iterates of one optimization run.

    points holds thinned records; best_index points at the record with
    the smallest evaluated zero-one risk.  objective, when present, is
    the per-step training objective (empirical risk) for every step
    0..T, not just the recorded ones.
    """

    points: list[TrajectoryPoint]
    best_index: int
    meta: dict
    objective: np.ndarray | None = None

    def best(self) -> TrajectoryPoint:
        return self.points[self.best_index]

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("step,r,theta_or_coords,logistic_risk,hinge_risk,zero_one,angle\n")
            for p in self.points:
                if len(p.w) == 2:
                    loc = f"{math.atan2(p.w[1], p.w[0]):.17g}"
                else:
                    loc = ";".join(f"{c:.17g}" for c in p.w)
                fh.write(
                    f"{p.step},{p.norm:.17g},{loc},{p.logistic_risk:.17g},"
                    f"{p.hinge_risk:.17g},{p.zero_one:.17g},{p.angle:.17g}\n"
                )

    def summary(self) -> dict:
        b = self.best()
        return {
            "steps": self.points[-1].step if self.points else 0,
            "recorded": len(self.points),
            "best_step": b.step,
            "best_zero_one": b.zero_one,
            "best_angle": b.angle,
            "final_norm": self.points[-1].norm if self.points else 0.0,
            **{k: v for k, v in self.meta.items() if np.isscalar(v) or isinstance(v, (int, float, str))},
        }


# ---------------------------------------------------------------------------
# phase 1: projected gradient descent on the empirical logistic risk


def _sample_point(model, X, y, kind, step, w) -> TrajectoryPoint:
    z = y * (X @ w)
    pred_wrong = np.mean(np.where(X @ w >= 0.0, 1, -1) != y)
    nrm = float(np.linalg.norm(w))
    ang = angle_between(w, model.ground_truth) if nrm > 0 else math.pi
    return TrajectoryPoint(
        step=step,
        w=w.copy(),
        logistic_risk=float(np.mean(loss_value(kind, z))),
        hinge_risk=float(np.mean(loss_value(Hinge(), z))),
        zero_one=float(pred_wrong),
        angle=ang,
        norm=nrm,
    )


def pgd_logistic(model: DistributionModel, cfg: PgdConfig) -> Trajectory:
    """Full-batch projected GD from the origin on one drawn sample.

    Records the empirical objective at every step (for the monotone
    descent contract) and a thinned set of full iterate snapshots.
    """
    X, y = model.sample(cfg.n, cfg.seed)
    eta = cfg.eta
    if eta is None:
        if model.support_bound is None:
            raise ValueError("eta has no default without a support bound; set cfg.eta")
        eta = 4.0 / model.support_bound**2
    radius = cfg.radius
    every = cfg.record_every or max(1, cfg.T // 1000)

    w = np.zeros(model.dim)
    objective = np.empty(cfg.T + 1)
    objective[0] = empirical_risk((X, y), cfg.loss, w)
    points = [_sample_point(model, X, y, cfg.loss, 0, w)]
    for t in range(1, cfg.T + 1):
        g = empirical_grad((X, y), cfg.loss, w)
        w = project_ball(w - eta * g, radius)
        objective[t] = empirical_risk((X, y), cfg.loss, w)
        if t % every == 0 or t == cfg.T:
            points.append(_sample_point(model, X, y, cfg.loss, t, w))
    best = int(np.argmin([p.zero_one for p in points]))
    meta = {
        "algorithm": "pgd_logistic",
        "eta": eta,
        "radius": radius,
        "epsilon": cfg.epsilon,
        "n": cfg.n,
        "T": cfg.T,
        "seed": cfg.seed,
        "max_objective_increase": float(np.max(np.diff(objective))) if cfg.T > 0 else 0.0,
    }
    return Trajectory(points=points, best_index=best, meta=meta, objective=objective)


# ---------------------------------------------------------------------------
# phase 2: projected SGD on the hinge loss over {w : <w, v> >= 1}


def sgd_hinge_phase2(model: DistributionModel, cfg: SgdConfig) -> Trajectory:
    """One fresh sample per step; iterates stay in the anchored halfspace.

    Zero-one risk is measured on a single held-out batch every
    eval_every steps; the best such iterate is tracked.  meta records
    the smallest anchor inner product seen after any projection, which
    the feasibility contract bounds below by 1 - 1e-12.
    """
    v = cfg.anchor
    d = len(v)
    Xe, ye = model.sample(cfg.eval_n, _derive_seed(cfg.seed, 1))

    points: list[TrajectoryPoint] = []

    def record(step, w):
        z = ye * (Xe @ w)
        pred_wrong = float(np.mean(np.where(Xe @ w >= 0.0, 1, -1) != ye))
        points.append(
            TrajectoryPoint(
                step=step,
                w=np.array(w),
                logistic_risk=float(np.mean(loss_value(Logistic(), z))),
                hinge_risk=float(np.mean(loss_value(Hinge(), z))),
                zero_one=pred_wrong,
                angle=angle_between(w, model.ground_truth),
                norm=float(np.linalg.norm(w)),
            )
        )

    block = 1 << 16
    eta = cfg.eta
    min_dot = 1.0
    if d == 2:
        # scalar fast path: the planar sweeps run millions of steps
        w1, w2 = float(v[0]), float(v[1])
        v1, v2 = float(v[0]), float(v[1])
        cur_dot = 1.0
        t = 0
        record(0, np.array([w1, w2]))
        for b in range(0, cfg.T, block):
            nb = min(block, cfg.T - b)
            Xb, yb = model.sample(nb, _derive_seed(cfg.seed, 2 + b // block))
            x1s = Xb[:, 0].tolist()
            x2s = Xb[:, 1].tolist()
            ys = yb.tolist()
            for i in range(nb):
                yi = ys[i]
                xi1 = x1s[i]
                xi2 = x2s[i]
                if yi * (w1 * xi1 + w2 * xi2) <= 0.0:
                    w1 += eta * yi * xi1
                    w2 += eta * yi * xi2
                    cur_dot = w1 * v1 + w2 * v2
                    if cur_dot < 1.0:
                        c = 1.0 - cur_dot
                        w1 += c * v1
                        w2 += c * v2
                        cur_dot = w1 * v1 + w2 * v2
                    if cur_dot < min_dot:
                        min_dot = cur_dot
                t += 1
                if t % cfg.eval_every == 0 or t == cfg.T:
                    record(t, np.array([w1, w2]))
        w = np.array([w1, w2])
    else:
        w = v.copy()
        t = 0
        record(0, w)
        for b in range(0, cfg.T, block):
            nb = min(block, cfg.T - b)
            Xb, yb = model.sample(nb, _derive_seed(cfg.seed, 2 + b // block))
            for i in range(nb):
                if yb[i] * float(Xb[i] @ w) <= 0.0:
                    w = w + (eta * yb[i]) * Xb[i]
                    dot = float(w @ v)
                    if dot < 1.0:
                        w = w + (1.0 - dot) * v
                        dot = float(w @ v)
                    min_dot = min(min_dot, dot)
                t += 1
                if t % cfg.eval_every == 0 or t == cfg.T:
                    record(t, w)

    best = int(np.argmin([p.zero_one for p in points]))
    meta = {
        "algorithm": "sgd_hinge_phase2",
        "eta": eta,
        "T": cfg.T,
        "seed": cfg.seed,
        "eval_every": cfg.eval_every,
        "eval_n": cfg.eval_n,
        "min_anchor_dot": min_dot,
    }
    return Trajectory(points=points, best_index=best, meta=meta)


# ---------------------------------------------------------------------------
# two-phase driver


@dataclass(frozen=True)
class TwoPhaseResult:
    v: np.ndarray
    phase1: Trajectory
    phase2: Trajectory
    report: RiskReport


def _phase1_defaults(model, epsilon, seed) -> PgdConfig:
    eps_ell = math.sqrt(epsilon)
    if model.support_bound is not None:
        eta = None  # resolves to 4/B^2
        n = int(math.ceil(40.0 / epsilon))
        T = int(math.ceil(1.0 / (epsilon * eps_ell)))
    else:
        d = model.dim
        eta = 1.0 / (d * math.log(d / epsilon) ** 2)
        n = int(math.ceil(40.0 * d / epsilon))
        T = int(math.ceil(1.0 / (epsilon * eps_ell)))
    return PgdConfig(epsilon=epsilon, T=T, n=n, seed=_derive_seed(seed, 11), eta=eta)


def _phase2_defaults(model, epsilon, seed, v) -> SgdConfig:
    if model.support_bound is not None:
        eta = epsilon / 8.0
        T = int(math.ceil(8.0 / epsilon**2))
    else:
        d = model.dim
        scale = d * math.log(d / epsilon) ** 2
        eta = epsilon / (8.0 * scale)
        T = int(math.ceil(8.0 * scale / epsilon**2))
    return SgdConfig(
        eta=eta,
        T=T,
        anchor=v,
        eval_every=max(1, T // 256),
        eval_n=200_000,
        seed=_derive_seed(seed, 12),
    )


def two_phase(
    model: DistributionModel,
    epsilon: float,
    seed: int,
    pgd_cfg: PgdConfig | None = None,
    sgd_cfg: SgdConfig | None = None,
) -> TwoPhaseResult:
    """Warm-started hinge minimization after a logistic regression phase.

    Phase 1 runs projected GD on the logistic risk (target optimization
    error sqrt(epsilon)) and is normalized into a unit anchor; phase 2
    runs hinge SGD over the anchored halfspace with eta = epsilon/8 and
    T of order 1/epsilon^2.  The returned report belongs to the phase-2
    iterate with the best held-out zero-one estimate, evaluated on that
    same held-out batch.
    """
    if not 0.0 < epsilon < 1.0 / math.e:
        raise ValueError("epsilon must lie in (0, 1/e)")
    cfg1 = pgd_cfg or _phase1_defaults(model, epsilon, seed)
    phase1 = pgd_logistic(model, cfg1)
    w1 = phase1.points[-1].w
    nrm = float(np.linalg.norm(w1))
    if nrm == 0.0:
        raise RuntimeError("phase 1 ended at the origin; cannot anchor phase 2")
    v = w1 / nrm
    cfg2 = sgd_cfg or _phase2_defaults(model, epsilon, seed, v)
    phase2 = sgd_hinge_phase2(model, cfg2)
    b = phase2.best()
    report = RiskReport(
        logistic_risk=b.logistic_risk,
        hinge_risk=b.hinge_risk,
        zero_one_risk=b.zero_one,
        angle_to_gt=b.angle,
        norm=b.norm,
    )
    return TwoPhaseResult(v=v, phase1=phase1, phase2=phase2, report=report)


# ---------------------------------------------------------------------------
# global minimizer of the population logistic risk


@dataclass(frozen=True)
class OracleReport:
    r: float
    theta: float
    risk_logistic: float
    risk_zero_one: float
    grad_norm: float
    converged: bool
    iterations: int
    grid_min_value: float
    grid_dominated: bool
    meta: dict

    def to_json(self) -> dict:
        out = {
            "r": self.r,
            "theta": self.theta,
            "risk_logistic": self.risk_logistic,
            "risk_zero_one": self.risk_zero_one,
            "grad_norm": self.grad_norm,
            "converged": self.converged,
            "iterations": self.iterations,
            "grid_min_value": self.grid_min_value,
            "grid_dominated": self.grid_dominated,
        }
        out.update(self.meta)
        return out


def oracle_global_min(
    model_or_params,
    tol: float = 1e-7,
    r_max: float = 100.0,
    grid: tuple[int, int] = (200, 720),
    contenders: int = 32,
) -> tuple[np.ndarray, OracleReport]:
    """Global minimizer of the population logistic risk of a planar model.

    Stage 1 scans the polar grid (0, r_max] x (-pi, pi] with a fixed
    vectorized quadrature rule; stage 2 refines the best node with
    backtracking gradient descent plus damped Newton steps on the
    adaptive quadrature gradient, down to gradient norm <= tol.

    Grid dominance is checked two ways: the `contenders` best scan nodes
    are re-evaluated with the adaptive rule and must not beat the
    refined minimizer (to 1e-12); remaining nodes are compared at scan
    accuracy with a 1e-4 slack, far below the basin depth differences
    the scan needs to resolve.
    """
    nodes = scan_nodes(model_or_params)
    nr, nt = grid
    rs = r_max * (np.arange(1, nr + 1) / nr)
    ts = -math.pi + 2.0 * math.pi * (np.arange(1, nt + 1) / nt)
    rg, tg = np.meshgrid(rs, ts, indexing="ij")
    W = np.column_stack([(rg * np.cos(tg)).ravel(), (rg * np.sin(tg)).ravel()])
    values = batch_population_risk(nodes, Logistic(), W, chunk=512)

    order = np.argsort(values)
    best_idx = int(order[0])
    w_grid = W[best_idx]
    grid_min = float(values[best_idx])

    def f(w):
        return population_risk(model_or_params, Logistic(), w)

    def g(w):
        return population_grad(model_or_params, w)

    w, fw, gn, iters = _backtracking_descent(f, g, w_grid, tol, max_iter=300)
    w, gn, converged = _newton_polish(f, g, w, tol)
    fw = f(w)

    top = W[order[:contenders]]
    top_acc = min(f(wc) for wc in top)
    dominated = fw <= top_acc + 1e-12 and fw <= grid_min + 1e-4

    r = float(np.linalg.norm(w))
    theta = float(math.atan2(w[1], w[0]))
    report = OracleReport(
        r=r,
        theta=theta,
        risk_logistic=fw,
        risk_zero_one=zero_one_exact(model_or_params, w),
        grad_norm=gn,
        converged=converged,
        iterations=iters,
        grid_min_value=grid_min,
        grid_dominated=dominated,
        meta={"r_max": r_max, "grid": list(grid), "tol": tol},
    )
    return w, report


def oracle_global_min_q(params: LowerBoundParams | float, tol: float = 1e-7) -> tuple[np.ndarray, OracleReport]:
    """Minimizer search for the lower-bound mixture, with the theorem's
    reference quantities attached to the report."""
    if isinstance(params, (int, float)):
        params = LowerBoundParams.from_opt(float(params))
    if not 0.0 < params.opt <= 1.0 / 100.0:
        raise ValueError("minimizer search is specified for opt <= 1/100")
    root = math.sqrt(params.opt)
    w, report = oracle_global_min(params, tol=tol, r_max=20.0 / root)
    meta = dict(report.meta)
    meta.update(
        {
            "opt": params.opt,
            "floor_zero_one": root / (60.0 * math.pi),
            "norm_bound": 10.0 / root,
            "theta_band": root / 30.0,
        }
    )
    report = OracleReport(**{**report.__dict__, "meta": meta})
    return w, report


def reference_axis_minimum(model_or_params, epsilon: float, tol: float = 1e-10) -> tuple[float, float]:
    """Golden-section minimum of rho -> R_log(rho * gt) over [0, 1/sqrt(eps)].

    The slice is convex in rho, so golden-section search localizes the
    minimum to tol.  Used as the comparator the first optimization phase
    is measured against.
    """
    if isinstance(model_or_params, LowerBoundParams):
        gt = np.array([1.0, 0.0])
    else:
        gt = model_or_params.ground_truth

    def f(rho):
        return population_risk(model_or_params, Logistic(), rho * gt)

    lo, hi = 0.0, 1.0 / math.sqrt(epsilon)
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    rho = 0.5 * (a + b)
    return rho, f(rho)
