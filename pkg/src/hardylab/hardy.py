"""Discrete weighted Hardy quotients and their minimization.

The central object is the Rayleigh quotient

    Q(u) = sum_cells |grad u|^p d^beta h^n  /  sum_nodes |u|^p d^(beta-p) h^n

over grid functions vanishing on the complement nodes (and on any
artificial truncation boundary).  ``1 / inf Q`` is the best-constant
candidate for the weighted (p, beta)-Hardy inequality on the domain.
The squared cell gradient is half the squared sum of the four edge
differences of the cell (the plain forward difference in 1D), which has
no spurious null vectors; the distance weight at a cell is the average
of its corner node distances.

For p = 2 the infimum is the smallest generalized eigenvalue of a sparse
pencil and is computed by inverse power iteration.  For general p a
normalized descent on the log-quotient with Armijo backtracking is used,
preconditioned by the p = 2 stiffness operator.

A one-dimensional radial variant with measure weight t^(n-1) and
distance d(t) = t covers half-line and point-complement reductions on
log-spaced grids.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import sparse
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse.linalg import splu

from .errors import SubResolutionError, ZeroTestFunctionError
from .geometry import DistanceField, GridDomain, distance_transform

#: Gradient magnitude smoothing used inside the general-p minimizer.
DEFAULT_SMOOTHING = 1e-12

#: Node count beyond which sparse LU gives way to multigrid-preconditioned CG.
_DIRECT_SOLVER_LIMIT = 150_000


# ---------------------------------------------------------------------------
# problems


@dataclass(frozen=True)
class HardyProblem:
    """Weighted (p, beta)-Hardy quotient data on a grid domain."""

    domain: GridDomain
    dist: DistanceField
    p: float
    beta: float

    def __post_init__(self):
        if self.dist.domain is not self.domain:
            raise ValueError("distance field belongs to a different domain")
        if not self.p > 1.0:
            raise ValueError("p must exceed 1")


@dataclass(frozen=True)
class RadialHardyProblem:
    """One-dimensional quotient on a (possibly log-spaced) node ladder.

    Models radial test functions in R^n: the measure weight is t^(n-1)
    and the distance weight is d(t) = t.  Functions vanish at both ends.
    """

    nodes: np.ndarray
    ambient_dim: int
    p: float
    beta: float

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or len(nodes) < 4:
            raise ValueError("need a 1-D ladder of at least four nodes")
        if not (np.diff(nodes) > 0).all() or nodes[0] <= 0:
            raise ValueError("nodes must be positive and strictly increasing")
        if self.ambient_dim < 1:
            raise ValueError("ambient dimension must be at least 1")
        if not self.p > 1.0:
            raise ValueError("p must exceed 1")
        object.__setattr__(self, "nodes", nodes)


def hardy_problem(domain: GridDomain, p: float, beta: float) -> HardyProblem:
    """Convenience constructor computing the distance field."""
    return HardyProblem(domain=domain, dist=distance_transform(domain), p=p, beta=beta)


def radial_problem(
    ambient_dim: int,
    p: float,
    beta: float,
    t_min: float = 1e-20,
    t_max: float = 1.0,
    num_nodes: int = 4096,
    spacing: str = "log",
) -> RadialHardyProblem:
    """Radial ladder on (t_min, t_max), log-spaced by default."""
    if spacing == "log":
        nodes = np.geomspace(t_min, t_max, num_nodes)
    elif spacing == "linear":
        nodes = np.linspace(t_min, t_max, num_nodes)
    else:
        raise ValueError("spacing must be 'log' or 'linear'")
    return RadialHardyProblem(nodes=nodes, ambient_dim=ambient_dim, p=p, beta=beta)


# ---------------------------------------------------------------------------
# quadrature forms


class _GridForms:
    def __init__(self, problem: HardyProblem):
        dom = problem.domain
        self.problem = problem
        self.shape = dom.shape
        self.dim = dom.ambient_dim
        if self.dim not in (1, 2):
            raise ValueError("grid quotients support one- and two-dimensional grids")
        self.h = dom.spacing
        self.cell = dom.cell_measure
        self.vanish = dom.vanishing_mask
        self.free = ~self.vanish
        d = problem.dist.values
        beta, p = problem.beta, problem.p
        # node weights for the denominator; complement nodes carry none
        wden = np.zeros(self.shape)
        pos = self.free & (d > 0)
        wden[pos] = d[pos] ** (beta - p) * self.cell
        self.wden = wden
        # cell-centered distance and numerator weights
        if self.dim == 1:
            d_c = 0.5 * (d[1:] + d[:-1])
        else:
            d_c = 0.25 * (d[:-1, :-1] + d[1:, :-1] + d[:-1, 1:] + d[1:, 1:])
        wnum = np.zeros_like(d_c)
        np.power(d_c, beta, out=wnum, where=d_c > 0)
        self.wnum = wnum * self.cell

    def apply_bc(self, u: np.ndarray) -> np.ndarray:
        out = np.array(u, dtype=float, copy=True)
        out[self.vanish] = 0.0
        return out

    def _cell_gradients(self, u: np.ndarray):
        """Per-cell edge differences.

        In 2D each cell contributes its four edge gradients; the squared
        cell gradient is half their squared sum.  Averaging opposite
        edges first (the tempting alternative) has a checkerboard null
        vector, which lets minimizers buy denominator mass next to the
        singular weight at zero gradient cost; keeping the edges
        separate removes that kernel while staying first-order
        consistent with the isotropic gradient magnitude.
        """
        h = self.h
        if self.dim == 1:
            return ((u[1:] - u[:-1]) / h,)
        gx_lo = (u[1:, :-1] - u[:-1, :-1]) / h
        gx_hi = (u[1:, 1:] - u[:-1, 1:]) / h
        gy_lo = (u[:-1, 1:] - u[:-1, :-1]) / h
        gy_hi = (u[1:, 1:] - u[1:, :-1]) / h
        return gx_lo, gx_hi, gy_lo, gy_hi

    def _grad_sq(self, grads):
        if self.dim == 1:
            return grads[0] * grads[0]
        return 0.5 * sum(g * g for g in grads)

    def numerator(self, u: np.ndarray, smoothing: float = 0.0) -> float:
        g2 = self._grad_sq(self._cell_gradients(u))
        if smoothing > 0.0:
            g2 = g2 + smoothing * smoothing
        return float(np.sum(self.wnum * g2 ** (self.problem.p / 2.0)))

    def denominator(self, u: np.ndarray) -> float:
        return float(np.sum(self.wden * np.abs(u) ** self.problem.p))

    def numerator_grad(self, u: np.ndarray, smoothing: float) -> np.ndarray:
        p = self.problem.p
        h = self.h
        grads = self._cell_gradients(u)
        g2 = self._grad_sq(grads) + smoothing * smoothing
        base = self.wnum * p * g2 ** ((p - 2.0) / 2.0)
        out = np.zeros(self.shape)
        if self.dim == 1:
            t = base * grads[0] / h
            out[:-1] -= t
            out[1:] += t
        else:
            gx_lo, gx_hi, gy_lo, gy_hi = grads
            t = base * gx_lo / (2.0 * h)
            out[:-1, :-1] -= t
            out[1:, :-1] += t
            t = base * gx_hi / (2.0 * h)
            out[:-1, 1:] -= t
            out[1:, 1:] += t
            t = base * gy_lo / (2.0 * h)
            out[:-1, :-1] -= t
            out[:-1, 1:] += t
            t = base * gy_hi / (2.0 * h)
            out[1:, :-1] -= t
            out[1:, 1:] += t
        out[self.vanish] = 0.0
        return out

    def denominator_grad(self, u: np.ndarray) -> np.ndarray:
        p = self.problem.p
        out = p * self.wden * np.abs(u) ** (p - 1.0) * np.sign(u)
        out[self.vanish] = 0.0
        return out

    # -- quadratic pencils ---------------------------------------------------

    def weighted_matrices(self, cell_weights: np.ndarray, node_weights: np.ndarray):
        """(A, M) over the free nodes for given cell/node quadrature weights."""
        n_nodes = int(np.prod(self.shape))
        idx = np.arange(n_nodes).reshape(self.shape)
        w = np.asarray(cell_weights, dtype=float).ravel()
        if self.dim == 1:
            # one edge per cell, full weight
            edges = [(idx[:-1].ravel(), idx[1:].ravel(), w / self.h ** 2)]
        else:
            # four edges per cell, each at half weight (matching _grad_sq)
            k = w / (2.0 * self.h ** 2)
            c00 = idx[:-1, :-1].ravel()
            c10 = idx[1:, :-1].ravel()
            c01 = idx[:-1, 1:].ravel()
            c11 = idx[1:, 1:].ravel()
            edges = [(c00, c10, k), (c01, c11, k), (c00, c01, k), (c10, c11, k)]
        rows, cols, data = [], [], []
        for a, b, coef in edges:
            rows.extend((a, b, a, b))
            cols.extend((a, b, b, a))
            data.extend((coef, coef, -coef, -coef))
        A = sparse.coo_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n_nodes, n_nodes),
        ).tocsr()
        free_idx = np.flatnonzero(self.free.ravel())
        A = A[free_idx][:, free_idx]
        M = sparse.diags(np.asarray(node_weights, dtype=float).ravel()[free_idx])
        return A.tocsr(), M.tocsr()

    def p2_matrices(self):
        """(A, M) over the free nodes: u^T A u = numerator, u^T M u = denominator."""
        return self.weighted_matrices(self.wnum, self.wden)

    def free_indices(self) -> np.ndarray:
        return np.flatnonzero(self.free.ravel())

    def full_from_free(self, v: np.ndarray) -> np.ndarray:
        out = np.zeros(int(np.prod(self.shape)))
        out[self.free_indices()] = v
        return out.reshape(self.shape)

    def default_init(self) -> np.ndarray:
        return self.apply_bc(self.problem.dist.values)


class _RadialForms:
    """Same contract as _GridForms on a 1-D nonuniform ladder."""

    def __init__(self, problem: RadialHardyProblem):
        t = problem.nodes
        n, p, beta = problem.ambient_dim, problem.p, problem.beta
        self.problem = problem
        self.shape = t.shape
        self.dim = 1
        dt = np.diff(t)
        tc = 0.5 * (t[1:] + t[:-1])
        self.dt = dt
        self.wnum = tc ** beta * tc ** (n - 1) * dt
        delta = np.zeros_like(t)
        delta[1:-1] = 0.5 * (t[2:] - t[:-2])
        wden = np.zeros_like(t)
        wden[1:-1] = t[1:-1] ** (beta - p) * t[1:-1] ** (n - 1) * delta[1:-1]
        self.wden = wden
        self.vanish = np.zeros(t.shape, dtype=bool)
        self.vanish[0] = self.vanish[-1] = True
        self.free = ~self.vanish

    def apply_bc(self, u: np.ndarray) -> np.ndarray:
        out = np.array(u, dtype=float, copy=True)
        out[self.vanish] = 0.0
        return out

    def _cell_gradients(self, u: np.ndarray):
        return (np.diff(u) / self.dt,)

    def _grad_sq(self, grads):
        return grads[0] * grads[0]

    def numerator(self, u: np.ndarray, smoothing: float = 0.0) -> float:
        g = np.diff(u) / self.dt
        g2 = g * g
        if smoothing > 0.0:
            g2 = g2 + smoothing * smoothing
        return float(np.sum(self.wnum * g2 ** (self.problem.p / 2.0)))

    def denominator(self, u: np.ndarray) -> float:
        return float(np.sum(self.wden * np.abs(u) ** self.problem.p))

    def numerator_grad(self, u: np.ndarray, smoothing: float) -> np.ndarray:
        p = self.problem.p
        g = np.diff(u) / self.dt
        g2 = g * g + smoothing * smoothing
        t = self.wnum * p * g2 ** ((p - 2.0) / 2.0) * g / self.dt
        out = np.zeros(self.shape)
        out[:-1] -= t
        out[1:] += t
        out[self.vanish] = 0.0
        return out

    def denominator_grad(self, u: np.ndarray) -> np.ndarray:
        p = self.problem.p
        out = p * self.wden * np.abs(u) ** (p - 1.0) * np.sign(u)
        out[self.vanish] = 0.0
        return out

    def weighted_matrices(self, cell_weights: np.ndarray, node_weights: np.ndarray):
        n_nodes = len(self.problem.nodes)
        coef = np.asarray(cell_weights, dtype=float) / self.dt ** 2
        i = np.arange(n_nodes - 1)
        rows = np.concatenate([i, i + 1, i, i + 1])
        cols = np.concatenate([i, i + 1, i + 1, i])
        data = np.concatenate([coef, coef, -coef, -coef])
        A = sparse.coo_matrix((data, (rows, cols)), shape=(n_nodes, n_nodes)).tocsr()
        free_idx = self.free_indices()
        A = A[free_idx][:, free_idx]
        M = sparse.diags(np.asarray(node_weights, dtype=float)[free_idx])
        return A.tocsr(), M.tocsr()

    def p2_matrices(self):
        return self.weighted_matrices(self.wnum, self.wden)

    def free_indices(self) -> np.ndarray:
        return np.flatnonzero(self.free)

    def full_from_free(self, v: np.ndarray) -> np.ndarray:
        out = np.zeros(len(self.problem.nodes))
        out[self.free_indices()] = v
        return out

    def default_init(self) -> np.ndarray:
        t = self.problem.nodes
        # symmetric tent in the stretched coordinate; vanishes at both ends
        s = np.log(t)
        prof = np.minimum(s - s[0], s[-1] - s)
        return self.apply_bc(prof)


def _forms(problem):
    if isinstance(problem, HardyProblem):
        return _GridForms(problem)
    if isinstance(problem, RadialHardyProblem):
        return _RadialForms(problem)
    raise TypeError(f"unsupported problem type {type(problem)!r}")


# ---------------------------------------------------------------------------
# quotients


def quotient(problem, u: np.ndarray) -> float:
    """Exact discrete Hardy quotient of a test function.

    The function is zero-extended on complement and Dirichlet nodes
    before evaluation; supplying a function that is zero everywhere else
    raises :class:`ZeroTestFunctionError`.
    """
    forms = _forms(problem)
    v = forms.apply_bc(np.asarray(u, dtype=float))
    if not np.any(v):
        raise ZeroTestFunctionError("test function vanishes identically")
    den = forms.denominator(v)
    if den == 0.0:
        raise ZeroTestFunctionError("test function has zero weighted mass")
    return forms.numerator(v) / den


# ---------------------------------------------------------------------------
# minimization


@dataclass
class RayleighResult:
    """Outcome of a quotient minimization."""

    lam: float
    hardy_constant: float
    minimizer: np.ndarray
    iterations: int
    residual: float
    trace: tuple[float, ...]
    converged: bool
    method: str


def _make_solver(A: sparse.spmatrix) -> Callable[[np.ndarray], np.ndarray]:
    lu = splu(A.tocsc())
    return lu.solve


def _lobpcg_smallest(A, M, x0, tol, maxiter):
    """Smallest generalized eigenpair via LOBPCG with a multigrid preconditioner."""
    import pyamg
    from scipy.sparse.linalg import lobpcg

    ml = pyamg.smoothed_aggregation_solver(A.tocsr())
    precond = ml.aspreconditioner(cycle="V")
    X = x0.reshape(-1, 1).astype(float)
    vals, vecs, hist = lobpcg(
        A,
        X,
        B=M,
        M=precond,
        tol=tol,
        maxiter=maxiter,
        largest=False,
        retLambdaHistory=True,
    )
    trace = [float(np.atleast_1d(lam)[0]) for lam in hist]
    return float(vals[0]), vecs[:, 0], trace


def _smallest_eigpair(A, M, x0, inner_iter):
    """A few inverse power steps toward the smallest generalized eigenvector.

    Small pencils factorize directly; large ones solve each step with
    multigrid-preconditioned CG (the preconditioner is built once).
    """
    n = A.shape[0]
    if n <= _DIRECT_SOLVER_LIMIT:
        solve = _make_solver(A)
    else:
        import pyamg
        from scipy.sparse.linalg import cg

        ml = pyamg.smoothed_aggregation_solver(A.tocsr())
        precond = ml.aspreconditioner(cycle="V")

        def solve(b):
            try:
                x, _ = cg(A, b, M=precond, rtol=1e-8, atol=0.0, maxiter=300)
            except TypeError:  # older scipy spells the tolerance differently
                x, _ = cg(A, b, M=precond, tol=1e-8, atol=0.0, maxiter=300)
            return x

    w = x0 / math.sqrt(float(x0 @ (M @ x0)))
    for _ in range(inner_iter):
        y = solve(M @ w)
        w = y / math.sqrt(float(y @ (M @ y)))
    return w


def _minimize_p2(forms, init, tol, max_iter):
    A, M = forms.p2_matrices()
    free = forms.free_indices()
    v = np.asarray(init, dtype=float).ravel()[free]
    if not np.any(v):
        raise ZeroTestFunctionError("initial guess vanishes on the free nodes")
    if A.shape[0] > _DIRECT_SOLVER_LIMIT:
        _, v, trace = _lobpcg_smallest(A, M, v, tol=tol, maxiter=max_iter)
        it = len(trace)
        method = "lobpcg"
    else:
        solve = _make_solver(A)
        mv = M @ v
        v = v / math.sqrt(float(v @ mv))
        trace = []
        lam_prev = None
        it = 0
        for it in range(1, max_iter + 1):
            y = solve(M @ v)
            my = M @ y
            y = y / math.sqrt(float(y @ my))
            lam = float(y @ (A @ y)) / float(y @ (M @ y))
            trace.append(lam)
            v = y
            if lam_prev is not None and abs(lam_prev - lam) <= tol * abs(lam):
                lam_prev = lam
                break
            lam_prev = lam
        method = "inverse_power"
    lam = trace[-1]
    res = A @ v - lam * (M @ v)
    residual = float(np.linalg.norm(res) / np.linalg.norm(M @ v))
    u_full = forms.full_from_free(v)
    # report the quotient of the returned minimizer exactly
    lam = forms.numerator(u_full) / forms.denominator(u_full)
    converged = len(trace) >= 2 and abs(trace[-2] - trace[-1]) <= tol * abs(trace[-1])
    return RayleighResult(
        lam=lam,
        hardy_constant=math.inf if lam == 0.0 else 1.0 / lam,
        minimizer=u_full,
        iterations=it,
        residual=residual,
        trace=tuple(trace),
        converged=converged,
        method=method,
    )


_LINE_SEARCH_STEPS = (1.0, 0.7, 0.4, 0.2, 0.1, 0.05, 0.02)


def _minimize_reweighted(forms, init, tol, max_iter, smoothing, inner_iter=6):
    """Iteratively reweighted eigen-iteration for the general-p quotient.

    At the current iterate the p-homogeneous numerator and denominator
    are frozen into quadratic forms with lagged weights
    ``|grad u|^(p-2)`` per cell and ``|u|^(p-2)`` per node; a few inverse
    power steps on the resulting pencil propose a new direction, and a
    safeguarded line search on the exact quotient keeps the trace
    monotone.
    """
    free = forms.free_indices()
    p = forms.problem.p

    def full(vec):
        return forms.full_from_free(vec)

    def exact(u):
        return forms.numerator(u) / forms.denominator(u)

    v = np.asarray(init, dtype=float).ravel()[free]
    if not np.any(v):
        raise ZeroTestFunctionError("initial guess vanishes on the free nodes")
    v = v / float(np.abs(v).max())
    u = full(v)
    trace = [exact(u)]
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        g2 = forms._grad_sq(forms._cell_gradients(u))
        eps_g = max(smoothing, 1e-9 * math.sqrt(float(g2.max())))
        cell_w = forms.wnum * (g2 + eps_g * eps_g) ** ((p - 2.0) / 2.0)
        eps_u = 1e-9 * float(np.abs(u).max())
        node_w = forms.wden * (u * u + eps_u * eps_u) ** ((p - 2.0) / 2.0)
        A, M = forms.weighted_matrices(cell_w, node_w)
        best_q, best_v = trace[-1], v
        for attempt_iters in (inner_iter, 4 * inner_iter):
            w = _smallest_eigpair(A, M, v, attempt_iters)
            if float(w @ v) < 0.0:
                w = -w
            w = w * (float(np.abs(v).max()) / float(np.abs(w).max()))
            for s in _LINE_SEARCH_STEPS:
                cand = (1.0 - s) * v + s * w
                if not np.any(cand):
                    continue
                q = exact(full(cand))
                if q < best_q:
                    best_q, best_v = q, cand
            if best_v is not v:
                break
        if best_v is v:
            # no frozen-pencil direction improves the exact quotient:
            # the iterate is numerically stationary
            converged = True
            break
        v = best_v / float(np.abs(best_v).max())
        u = full(v)
        trace.append(best_q)
        if abs(trace[-2] - best_q) <= tol * abs(best_q):
            converged = True
            break
    lam = trace[-1]
    residual = abs(trace[-1] - trace[-2]) / abs(trace[-1]) if len(trace) > 1 else 0.0
    return RayleighResult(
        lam=lam,
        hardy_constant=math.inf if lam == 0.0 else 1.0 / lam,
        minimizer=u,
        iterations=it,
        residual=residual,
        trace=tuple(trace),
        converged=converged,
        method="reweighted_eigen",
    )


def minimize_quotient(
    problem,
    init: np.ndarray | None = None,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    smoothing: float = DEFAULT_SMOOTHING,
) -> RayleighResult:
    """Minimize the discrete Hardy quotient.

    For p = 2 this runs inverse power iteration on the generalized pencil
    (monotone quotient trace); otherwise preconditioned descent on the
    log-quotient with Armijo backtracking and smoothed gradient
    magnitudes.  The reported ``lam`` is always the exact quotient of the
    returned minimizer.
    """
    forms = _forms(problem)
    if init is None:
        init = forms.default_init()
    else:
        init = forms.apply_bc(np.asarray(init, dtype=float))
    if forms.problem.p == 2.0:
        return _minimize_p2(forms, init, tol, max_iter)
    return _minimize_reweighted(forms, init, tol, max_iter, smoothing)


# ---------------------------------------------------------------------------
# witness families


def _node_radii(domain: GridDomain, center) -> np.ndarray:
    c = np.asarray(center, dtype=float).reshape(-1)
    coords = domain.node_coords()
    return np.linalg.norm(coords - c, axis=1).reshape(domain.shape)


def witness_function(problem: HardyProblem, family: str, **params) -> np.ndarray:
    """Construct a named explicit test function on the problem grid.

    Families:

    - ``shell``: value one outside radius 2^(-j) around the center,
      zero inside 2^(-j-1), linear radial ramp between; multiplied by
      min(1, d(x) / (taper * |x - center|)) so the witness also vanishes
      continuously on complement features away from the center at a
      gradient cost proportional to their size (``taper`` defaults to
      0.5; near the center, where d(x) ~ |x - center|, the factor is
      one and the ramp is untouched).
    - ``plateau``: value one at the center, supported on B(center, 2 r),
      ramping linearly through the outer half of the ball.
    - ``log``: logarithmic radial ramp, one inside ``r_in``, zero outside
      ``r_out``.

    The function is zero-extended on complement nodes by the quotient, so
    witnesses need not dodge the complement themselves.
    """
    dom = problem.domain
    h = dom.spacing
    center = params.get("center", np.zeros(dom.ambient_dim))
    rho = _node_radii(dom, center)
    if family == "shell":
        j = int(params["j"])
        taper = float(params.get("taper", 0.5))
        inner, outer = 2.0 ** (-j - 1), 2.0 ** (-j)
        if outer - inner < h / 2.0 * (1.0 - 1e-9):
            raise SubResolutionError("shell ramp is thinner than half a grid cell")
        u = np.clip((rho - inner) / (outer - inner), 0.0, 1.0)
        if taper > 0.0:
            d = problem.dist.values
            w = np.ones_like(u)
            pos = rho > 0.0
            w[pos] = np.minimum(1.0, d[pos] / (taper * rho[pos]))
            u = u * w
    elif family == "plateau":
        r = float(params["r"])
        if r < h * (1.0 - 1e-9):
            raise SubResolutionError("plateau ramp is thinner than a grid cell")
        u = np.clip((2.0 * r - rho) / r, 0.0, 1.0)
    elif family == "log":
        r_in = float(params["r_in"])
        r_out = float(params["r_out"])
        if not 0.0 < r_in < r_out:
            raise ValueError("need 0 < r_in < r_out")
        if r_in < h / 2.0 * (1.0 - 1e-9):
            raise SubResolutionError("log ramp starts below half a grid cell")
        safe = np.maximum(rho, 1e-300)
        u = np.clip(np.log(r_out / safe) / math.log(r_out / r_in), 0.0, 1.0)
    else:
        raise ValueError(f"unknown witness family {family!r}")
    return u


def witness_quotient(problem: HardyProblem, family: str, **params) -> float:
    """Exact discrete quotient of a named witness test function."""
    return quotient(problem, witness_function(problem, family, **params))


# ---------------------------------------------------------------------------
# refinement studies and admissibility


@dataclass
class RefinementStudy:
    """Grid refinement sweep of minimized quotients."""

    h_values: tuple[float, ...]
    lambdas: tuple[float, ...]
    slope: float
    ratios: tuple[float, ...]
    classification: str
    results: tuple[RayleighResult, ...]


def _interpolate_onto(prev_problem: HardyProblem, prev_u, problem: HardyProblem):
    interp = RegularGridInterpolator(
        prev_problem.domain.axes(),
        prev_u,
        bounds_error=False,
        fill_value=0.0,
    )
    vals = interp(problem.domain.node_coords()).reshape(problem.domain.shape)
    return vals


def refinement_study(
    problem_builder: Callable[[float], HardyProblem],
    h_values: Sequence[float],
    tol: float = 1e-6,
    max_iter: int = 2000,
    smoothing: float = DEFAULT_SMOOTHING,
    witness_decay: bool = False,
    continuation: bool = True,
) -> RefinementStudy:
    """Minimize the quotient across a ladder of grid spacings and classify.

    ``problem_builder`` must return the same continuous problem
    discretized at the requested spacing.  Classification:

    - fails-evidence: the fitted slope of log lambda against log h is at
      least 0.3 (lambda decays under refinement), or a witness family
      certified decay externally (``witness_decay=True``);
    - holds-evidence: |slope| <= 0.15 and every successive ratio
      lambda_finer / lambda_coarser is at least 0.8;
    - inconclusive otherwise.
    """
    hs = sorted(set(float(h) for h in h_values), reverse=True)
    if len(hs) < 3:
        raise ValueError("a refinement study needs at least three spacings")
    lambdas = []
    results = []
    prev_problem = None
    prev_u = None
    for h in hs:
        problem = problem_builder(h)
        init = None
        if continuation and prev_problem is not None:
            init = _interpolate_onto(prev_problem, prev_u, problem)
            if not np.any(_forms(problem).apply_bc(init)):
                init = None
        res = minimize_quotient(problem, init=init, tol=tol, max_iter=max_iter, smoothing=smoothing)
        lambdas.append(res.lam)
        results.append(res)
        prev_problem, prev_u = problem, res.minimizer
    slope = float(np.polyfit(np.log(hs), np.log(lambdas), 1)[0])
    ratios = tuple(
        lambdas[i + 1] / lambdas[i] for i in range(len(lambdas) - 1)
    )
    if witness_decay or slope >= 0.3:
        classification = "fails-evidence"
    elif abs(slope) <= 0.15 and all(r >= 0.8 for r in ratios):
        classification = "holds-evidence"
    else:
        classification = "inconclusive"
    return RefinementStudy(
        h_values=tuple(hs),
        lambdas=tuple(lambdas),
        slope=slope,
        ratios=ratios,
        classification=classification,
        results=tuple(results),
    )


def _estimate_value(val):
    from .dimension import DimensionEstimate

    if isinstance(val, DimensionEstimate):
        return val.value
    return float(val)


def predict_admissibility(
    estimates: dict,
    p: float,
    beta: float,
    margin: float,
) -> str:
    """Theory-side admissibility label from codimension estimates.

    ``estimates`` may contain (floats or dimension estimates):

    - ``codim_lower`` / ``codim_upper``: lower/upper Assouad codimension
      of the full complement;
    - ``thin_codim_lower`` / ``thick_codim_upper``: split-domain data
      for a complement of the form (thick complement) union (thin set);
    - ``codim_hausdorff`` and ``codim_lower_local``: worst local window
      data for the necessary dichotomy;
    - flags ``omega_unbounded`` / ``complement_unbounded``.

    Labels: ``admits`` when a sufficient condition clears the margin,
    ``fails`` when the necessary dichotomy is excluded on both sides
    within the margin, ``out-of-theory`` when beta >= p - 1, otherwise
    ``boundary``.
    """
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    if beta >= p - 1.0:
        return "out-of-theory"
    pb = p - beta
    get = lambda key: (
        _estimate_value(estimates[key]) if key in estimates and estimates[key] is not None else None
    )
    thin = get("codim_lower")
    thick = get("codim_upper")
    split_thin = get("thin_codim_lower")
    split_thick = get("thick_codim_upper")
    thick_ok = (not estimates.get("omega_unbounded", False)) or estimates.get(
        "complement_unbounded", False
    )
    if pb > 1.0 + margin:
        if thin is not None and thin > pb + margin:
            return "admits"
        if thick is not None and thick < pb - margin and thick_ok:
            return "admits"
        if (
            split_thin is not None
            and split_thick is not None
            and split_thin > pb + margin
            and split_thick < pb - margin
        ):
            return "admits"
    codimh = get("codim_hausdorff")
    local_lower = get("codim_lower_local")
    if local_lower is None:
        local_lower = thin
    if (
        codimh is not None
        and local_lower is not None
        and codimh >= pb - margin
        and local_lower <= pb + margin
    ):
        return "fails"
    return "boundary"


@dataclass(frozen=True)
class ScanEntry:
    p: float
    beta: float
    predicted: str
    numeric: str
    lambdas: tuple[float, ...]
    slope: float | None
    flagged: bool


@dataclass(frozen=True)
class AdmissibilityMap:
    margin: float
    entries: tuple[ScanEntry, ...]

    @property
    def flagged_entries(self) -> tuple[ScanEntry, ...]:
        return tuple(e for e in self.entries if e.flagged)


def admissibility_scan(
    make_problem: Callable[[float, float, float], HardyProblem],
    estimates: dict,
    p_values: Sequence[float],
    beta_values: Sequence[float],
    margin: float,
    h_values: Sequence[float],
    tol: float = 1e-6,
    max_iter: int = 2000,
    threads: int = 1,
) -> AdmissibilityMap:
    """Compare predicted labels against refinement numerics on a (p, beta) grid.

    ``make_problem(p, beta, h)`` discretizes the fixed domain.  Cells with
    beta >= p - 1 are labeled out-of-theory and skip the numerics.  A cell
    is flagged when prediction and numerics disagree in the strong sense
    (admits against fails-evidence or fails against holds-evidence).
    """
    points = [(float(p), float(b)) for p in p_values for b in beta_values]

    def run_point(point):
        p, beta = point
        predicted = predict_admissibility(estimates, p, beta, margin)
        if predicted == "out-of-theory":
            return ScanEntry(p, beta, predicted, "skipped", (), None, False)
        study = refinement_study(
            lambda h: make_problem(p, beta, h),
            h_values,
            tol=tol,
            max_iter=max_iter,
        )
        numeric = study.classification
        flagged = (predicted == "admits" and numeric == "fails-evidence") or (
            predicted == "fails" and numeric == "holds-evidence"
        )
        return ScanEntry(p, beta, predicted, numeric, study.lambdas, study.slope, flagged)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            entries = list(pool.map(run_point, points))
    else:
        entries = [run_point(pt) for pt in points]
    return AdmissibilityMap(margin=float(margin), entries=tuple(entries))
