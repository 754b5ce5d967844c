"""First-order solvers for the trace-maximization problems over matrix balls.

Three feasible-set flavors: a Frobenius-norm ball around the nominal blocked
moment matrix, a Bures (Gaussian Wasserstein) ball around it, and the product
of two Bures balls around the source/noise covariances with the Schur-style
estimation-error objective.

The Bures-ball problems are solved in transport coordinates R = T R_hat T
(T Hermitian PSD), under which the Bures constraint becomes the exact
quadratic Tr[(T - I) R_hat (T - I)] <= eps^2. Projection onto that quadratic
ball is exact (entrywise shrinkage in R_hat's eigenbasis plus a 1-D root find
on the multiplier), so fixed points of the projected ascent are KKT points.
Problems here are small (N + M around 12), which is why a general SDP solver
is deliberately avoided.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    NearSingularError,
    assemble_joint,
    eigh,
    herm_inverse,
    herm_sqrt,
    hermitize,
    min_eigenvalue,
    psd_floor,
    split_joint,
    PSD_EIG_FLOOR,
)
from .linear import BeamformerWeights

WASSERSTEIN_BALLS = ("joint_fnorm", "joint_wasserstein", "blocks_wasserstein")


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 2000
    tol: float = 1e-8
    step_init: float = 1.0
    verbose: bool = False

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol <= 0.0:
            raise ValueError("tol must be > 0")


@dataclass(frozen=True)
class DroSolution:
    """Solver output: maximizing moment matrix (or block pair) and diagnostics."""

    r_star: object  # ndarray, or (r_s, r_v) tuple for the block problem
    objective: float
    iterations: int
    constraint_residual: float
    trace: list = field(default_factory=list)  # (iter, objective, residual) rows


def write_trace_csv(solution, path):
    """Dump the iteration trace recorded under SolverConfig(verbose=True)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "objective", "residual"])
        writer.writerows(solution.trace)


def psd_project(a):
    """Nearest PSD matrix in Frobenius norm: clip negative eigenvalues."""
    w, q = eigh(a)
    if w[0] >= 0.0:
        return hermitize(np.asarray(a))
    return hermitize((q * np.clip(w, 0.0, None)) @ q.conj().T)


def bures_sq(a, b):
    """Squared Bures/Wasserstein distance Tr[A + B - 2 (B^1/2 A B^1/2)^1/2]."""
    root_b = herm_sqrt(b)
    cross = herm_sqrt(root_b @ hermitize(a) @ root_b)
    value = float(np.real(np.trace(a) + np.trace(b) - 2.0 * np.trace(cross)))
    return max(value, 0.0)


# ---------------------------------------------------------------------------
# shared projected-ascent loop over tuples of Hermitian matrices


def _tree_norm(xs):
    return float(np.sqrt(sum(np.sum(np.abs(x) ** 2) for x in xs)))


def _tree_step(xs, ds, s):
    return tuple(x + s * d for x, d in zip(xs, ds))


def _projected_ascent(state, objective, gradient, project, cfg, residual):
    state = project(state)
    obj = objective(state)
    trace = [(0, obj, residual(state))] if cfg.verbose else []
    step = cfg.step_init
    stable = 0
    iters = 0
    while iters < cfg.max_iters and stable < 10:
        iters += 1
        grads = gradient(state)
        gnorm = _tree_norm(grads)
        if gnorm == 0.0:
            break
        direction = tuple(g / gnorm for g in grads)
        accepted = False
        s = step
        for _ in range(40):
            cand = project(_tree_step(state, direction, s))
            cand_obj = objective(cand)
            if cand_obj > obj + 1e-15 * max(1.0, abs(obj)):
                accepted = True
                break
            s *= 0.5
        if accepted:
            rel = (cand_obj - obj) / max(abs(obj), 1e-12)
            state, obj = cand, cand_obj
            step = min(s * 2.0, 1e9)
            stable = stable + 1 if rel < cfg.tol else 0
        else:
            stable += 1
        if cfg.verbose:
            trace.append((iters, obj, residual(state)))
    return state, obj, iters, trace


# ---------------------------------------------------------------------------
# Frobenius-norm ball


def _fball_project(a, r_hat, eps):
    delta = a - r_hat
    nrm = float(np.linalg.norm(delta))
    if nrm <= eps:
        return a
    return r_hat + delta * (eps / max(nrm, 1e-300))


def _fball_residual(r, r_hat, eps):
    ball = max(0.0, float(np.linalg.norm(r - r_hat)) - eps)
    cone = max(0.0, -min_eigenvalue(r))
    return ball + cone


def _project_fball_psd(a, r_hat, eps, tol, max_rounds=200):
    # Dykstra alternation between the Frobenius ball and the PSD cone.
    x = hermitize(a)
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    for _ in range(max_rounds):
        y = _fball_project(x + p, r_hat, eps)
        p = x + p - y
        x_new = psd_project(y + q)
        q = y + q - x_new
        x = x_new
        if _fball_residual(x, r_hat, eps) <= tol:
            break
    return x


def solve_fnorm_trace_max(r_hat, epsilon, cfg=None):
    """max Tr R  s.t.  ||R - R_hat||_F <= eps, R PSD (projected ascent)."""
    cfg = cfg or SolverConfig()
    r_hat = hermitize(np.asarray(r_hat, dtype=complex))
    if min_eigenvalue(r_hat) < PSD_EIG_FLOOR:
        raise ValueError("r_hat must be PSD")
    if epsilon < 0.0:
        raise ValueError("epsilon must be >= 0")
    r_hat = psd_project(r_hat)
    if epsilon == 0.0:
        return DroSolution(
            r_star=r_hat,
            objective=float(np.real(np.trace(r_hat))),
            iterations=0,
            constraint_residual=0.0,
        )

    d = r_hat.shape[0]
    eye = np.eye(d)
    inner_tol = min(cfg.tol, 1e-10) * max(1.0, epsilon)

    def objective(state):
        return float(np.real(np.trace(state[0])))

    def gradient(state):
        return (eye.astype(complex),)

    def project(state):
        return (_project_fball_psd(state[0], r_hat, epsilon, inner_tol),)

    def residual(state):
        return _fball_residual(state[0], r_hat, epsilon)

    state, obj, iters, trace = _projected_ascent(
        (r_hat,), objective, gradient, project, cfg, residual
    )
    return DroSolution(
        r_star=hermitize(state[0]),
        objective=obj,
        iterations=iters,
        constraint_residual=residual(state),
        trace=trace,
    )


# ---------------------------------------------------------------------------
# Bures balls in transport coordinates


class _TransportBall:
    """One Bures ball around a PSD nominal, in coordinates R = T R_hat T."""

    def __init__(self, r_hat, eps):
        self.r_hat = psd_project(hermitize(np.asarray(r_hat, dtype=complex)))
        self.eps = float(eps)
        self.d = self.r_hat.shape[0]
        self.eye = np.eye(self.d)
        evals, evecs = eigh(self.r_hat)
        self.evals = np.clip(evals, 0.0, None)
        self.evecs = evecs
        # per-entry ellipsoid weights (r_i + r_j)/2 in the eigenbasis
        self.weights = 0.5 * (self.evals[:, None] + self.evals[None, :])

    def to_cov(self, t):
        return hermitize(t @ self.r_hat @ t)

    def quad(self, t):
        delta = self.evecs.conj().T @ (t - self.eye) @ self.evecs
        return float(np.real(np.sum(self.weights * np.abs(delta) ** 2)))

    def grad_to_t(self, t, grad_r):
        return hermitize(self.r_hat @ t @ grad_r + grad_r @ t @ self.r_hat)

    def project(self, t):
        if self.eps == 0.0:
            return self.eye.astype(complex)
        delta = self.evecs.conj().T @ (hermitize(t) - self.eye) @ self.evecs
        target = self.eps**2

        def quad_of(nu):
            scaled = delta / (1.0 + nu * self.weights)
            return float(np.real(np.sum(self.weights * np.abs(scaled) ** 2)))

        if quad_of(0.0) > target:
            hi = 1.0
            for _ in range(200):
                if quad_of(hi) <= target:
                    break
                hi *= 4.0
            lo = 0.0
            for _ in range(128):
                mid = 0.5 * (lo + hi)
                if quad_of(mid) > target:
                    lo = mid
                else:
                    hi = mid
            delta = delta / (1.0 + hi * self.weights)
        t_new = hermitize(self.eye + self.evecs @ delta @ self.evecs.conj().T)

        w, q = eigh(t_new)
        if w[0] < 0.0:
            t_new = hermitize((q * np.clip(w, 0.0, None)) @ q.conj().T)
            quad = self.quad(t_new)
            if quad > target:
                # convex pull toward I restores the ball and keeps PSD
                t_new = self.eye + np.sqrt(target / quad) * (t_new - self.eye)
        return t_new

    def residual(self, t):
        r = self.to_cov(t)
        ball = max(0.0, np.sqrt(bures_sq(r, self.r_hat)) - self.eps)
        cone = max(0.0, -min_eigenvalue(r))
        return ball + cone


def solve_wasserstein_trace_max(r_hat, epsilon, cfg=None):
    """max Tr R  s.t.  Bures(R, R_hat) <= eps, R PSD (transport-coordinate ascent)."""
    cfg = cfg or SolverConfig()
    r_hat = hermitize(np.asarray(r_hat, dtype=complex))
    if min_eigenvalue(r_hat) < PSD_EIG_FLOOR:
        raise ValueError("r_hat must be PSD")
    if epsilon < 0.0:
        raise ValueError("epsilon must be >= 0")
    r_hat = psd_project(r_hat)
    d = r_hat.shape[0]

    if float(np.real(np.trace(r_hat))) <= 1e-300:
        # ball around zero: any PSD R with Tr R <= eps^2; isotropic maximizer
        r_star = (epsilon**2 / d) * np.eye(d, dtype=complex)
        return DroSolution(
            r_star=r_star,
            objective=float(epsilon**2),
            iterations=0,
            constraint_residual=0.0,
        )
    if epsilon == 0.0:
        return DroSolution(
            r_star=r_hat,
            objective=float(np.real(np.trace(r_hat))),
            iterations=0,
            constraint_residual=0.0,
        )

    ball = _TransportBall(r_hat, epsilon)

    def objective(state):
        return float(np.real(np.trace(ball.to_cov(state[0]))))

    def gradient(state):
        return (ball.grad_to_t(state[0], np.eye(d, dtype=complex)),)

    def project(state):
        return (ball.project(state[0]),)

    def residual(state):
        return ball.residual(state[0])

    state, obj, iters, trace = _projected_ascent(
        (ball.eye.astype(complex),), objective, gradient, project, cfg, residual
    )
    return DroSolution(
        r_star=ball.to_cov(state[0]),
        objective=obj,
        iterations=iters,
        constraint_residual=residual(state),
        trace=trace,
    )


# ---------------------------------------------------------------------------
# product of Bures balls on (R_s, R_v) with the estimation-error objective


def _blocks_inverse(r_s, r_v, h, floor_scale):
    g = hermitize(h @ r_s @ h.conj().T + r_v)
    try:
        return herm_inverse(g)
    except NearSingularError:
        # keep the iterate usable: floor the noise part at delta * I
        delta = max(floor_scale, 1e-300)
        g = hermitize(h @ r_s @ h.conj().T + psd_floor(r_v, delta))
        return herm_inverse(g)


def blocks_objective(r_s, r_v, h, floor_scale=0.0):
    """Worst-case estimation error Tr[R_s - R_s H^H (H R_s H^H + R_v)^{-1} H R_s]."""
    p = _blocks_inverse(r_s, r_v, h, floor_scale)
    c = h.conj().T @ p @ h
    value = np.trace(r_s) - np.trace(r_s @ c @ r_s)
    return float(np.real(value))


def blocks_gradients(r_s, r_v, h, floor_scale=0.0):
    """Analytic gradients of blocks_objective w.r.t. (R_s, R_v).

    grad_s = (I - C R_s)(I - C R_s)^H with C = H^H G^{-1} H, and
    grad_v = G^{-1} H R_s^2 H^H G^{-1}; both Hermitian PSD, matching the
    objective's monotonicity in each block.
    """
    p = _blocks_inverse(r_s, r_v, h, floor_scale)
    c = hermitize(h.conj().T @ p @ h)
    a = np.eye(r_s.shape[0]) - c @ r_s
    grad_s = hermitize(a @ a.conj().T)
    phr = p @ h @ r_s
    grad_v = hermitize(phr @ phr.conj().T)
    return grad_s, grad_v


def solve_wasserstein_blocks(r_s_hat, r_v_hat, h, eps1, eps2, cfg=None):
    """Maximize the estimation-error objective over two Bures balls.

    Projected gradient ascent on (R_s, R_v) in transport coordinates, one
    ball per block; returns the feasible maximizing pair.
    """
    cfg = cfg or SolverConfig()
    h = np.asarray(h, dtype=complex)
    if eps1 < 0.0 or eps2 < 0.0:
        raise ValueError("ball radii must be >= 0")
    ball_s = _TransportBall(r_s_hat, eps1)
    ball_v = _TransportBall(r_v_hat, eps2)
    floor_scale = 1e-10 * float(np.real(np.trace(ball_v.r_hat)))

    if eps1 == 0.0 and eps2 == 0.0:
        obj = blocks_objective(ball_s.r_hat, ball_v.r_hat, h, floor_scale)
        return DroSolution(
            r_star=(ball_s.r_hat, ball_v.r_hat),
            objective=obj,
            iterations=0,
            constraint_residual=0.0,
        )

    def covs(state):
        return ball_s.to_cov(state[0]), ball_v.to_cov(state[1])

    def objective(state):
        r_s, r_v = covs(state)
        return blocks_objective(r_s, r_v, h, floor_scale)

    def gradient(state):
        r_s, r_v = covs(state)
        g_s, g_v = blocks_gradients(r_s, r_v, h, floor_scale)
        return ball_s.grad_to_t(state[0], g_s), ball_v.grad_to_t(state[1], g_v)

    def project(state):
        return ball_s.project(state[0]), ball_v.project(state[1])

    def residual(state):
        return ball_s.residual(state[0]) + ball_v.residual(state[1])

    start = (ball_s.eye.astype(complex), ball_v.eye.astype(complex))
    state, obj, iters, trace = _projected_ascent(
        start, objective, gradient, project, cfg, residual
    )
    return DroSolution(
        r_star=covs(state),
        objective=obj,
        iterations=iters,
        constraint_residual=residual(state),
        trace=trace,
    )


# ---------------------------------------------------------------------------
# beamformers on top of the solvers


def dr_wasserstein_beamformer(
    moments, epsilon, cfg=None, ball="joint_fnorm", h_hat=None, r_v_hat=None
):
    """Combiner built from the worst-case moments of the requested ball.

    joint balls: W = R*_xs^H R*_x^{-1} from the blocked maximizer.
    blocks ball: W = R*_s H^H (H R*_s H^H + R*_v)^{-1}; requires h_hat and
    r_v_hat, with the same radius applied to both balls.
    """
    if ball not in WASSERSTEIN_BALLS:
        raise ValueError(f"unknown ball {ball!r}")
    cfg = cfg or SolverConfig()

    if ball == "blocks_wasserstein":
        if h_hat is None or r_v_hat is None:
            raise ValueError("blocks_wasserstein needs h_hat and r_v_hat")
        sol = solve_wasserstein_blocks(
            moments.r_s, r_v_hat, h_hat, eps1=epsilon, eps2=epsilon, cfg=cfg
        )
        r_s_star, r_v_star = sol.r_star
        h = np.asarray(h_hat, dtype=complex)
        inner = hermitize(h @ r_s_star @ h.conj().T + r_v_star)
        w = r_s_star @ h.conj().T @ herm_inverse(inner)
    else:
        r_hat = assemble_joint(moments)
        if ball == "joint_fnorm":
            sol = solve_fnorm_trace_max(r_hat, epsilon, cfg)
        else:
            sol = solve_wasserstein_trace_max(r_hat, epsilon, cfg)
        star = split_joint(sol.r_star, moments.n, moments.m)
        w = star.r_xs.conj().T @ herm_inverse(star.r_x)

    return BeamformerWeights(
        w=w,
        method=f"dr_wasserstein_{ball}",
        params={
            "epsilon": epsilon,
            "iterations": sol.iterations,
            "constraint_residual": sol.constraint_residual,
        },
    )
