"""Log-Laplace transforms and their equivalence with concentration.

Two bound objects travel through this module:

* :class:`LaplaceBound` - "for every 1-Lipschitz f with zero mean,
  int exp(lam * D * f) dmu <= exp(lam * eps + Phi*(lam) + delta)";
* :class:`ConcBound` - "K(r) >= Phi((D' r - z')_+) - delta'".

Each direction of the translation between them is an explicit formula in
(Phi, D, eps, delta) evaluated on the tabulated Phi; the sup over
Lipschitz functions on a finite space is computed exactly for n <= 7 by
enumerating the vertices of the mean-zero Lipschitz polytope (every
vertex is supported on a spanning tree with edges at full stretch
+-d(u, v)), and by multistart local search above that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .costs import legendre_numeric
from .errors import DomainError, UnsupportedSizeError, ValidationError
from .measures import DiscreteSpace, Measure1D, _cell_partial_mass
from .profiles import LOG2, invert_monotone

__all__ = [
    "LaplaceBound",
    "ConcBound",
    "log_laplace",
    "gibbs_check",
    "GibbsCheck",
    "laplace_to_conc",
    "conc_to_laplace",
    "herbst_laplace",
    "laplace_sup_discrete",
    "mean_zero_lipschitz_vertices",
]


def _validate_phi(x: np.ndarray, vals: np.ndarray) -> None:
    if x.ndim != 1 or x.shape != vals.shape or x.size < 3:
        raise ValidationError("Phi grid must be two equal 1-D arrays (>= 3 points)")
    if not np.all(np.diff(x) > 0) or x[0] != 0.0:
        raise ValidationError("Phi grid must be strictly increasing from 0")
    if abs(vals[0]) > 1e-12:
        raise ValidationError("Phi(0) must be 0")
    if np.any(np.diff(vals) < -1e-12):
        raise ValidationError("Phi must be nondecreasing")
    slopes = np.diff(vals) / np.diff(x)
    if np.any(np.diff(slopes) < -1e-9 * (1.0 + np.abs(vals).max())):
        raise ValidationError("Phi must be convex on its grid")


@dataclass(frozen=True)
class LaplaceBound:
    phi_x: np.ndarray
    phi_vals: np.ndarray
    rate: float          # D
    eps: float = 0.0     # additive slack in metric units
    delta: float = 0.0   # additive slack in log units

    def __post_init__(self) -> None:
        x = np.asarray(self.phi_x, dtype=float)
        v = np.asarray(self.phi_vals, dtype=float)
        _validate_phi(x, v)
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise ValidationError("rate D must be a positive finite real")
        if self.eps < 0 or self.delta < 0:
            raise ValidationError("slacks eps, delta must be nonnegative")
        object.__setattr__(self, "phi_x", x)
        object.__setattr__(self, "phi_vals", v)

    def phi_at(self, x) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), self.phi_x, self.phi_vals)

    def phi_inv_at(self, y: float) -> float:
        return invert_monotone(self.phi_x, self.phi_vals, y)

    def phi_star_at(self, lam) -> np.ndarray:
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        _, out = legendre_numeric(self.phi_x, self.phi_vals, lam)
        return out if out.size > 1 else float(out[0])

    def rhs_log(self, lam) -> np.ndarray:
        """log of the admissible Laplace bound at lam."""
        return lam * self.eps + self.phi_star_at(lam) + self.delta

    def to_json_dict(self) -> dict:
        return {"phi_grid": [self.phi_x.tolist(), self.phi_vals.tolist()],
                "D": self.rate, "eps": self.eps, "delta": self.delta}


@dataclass(frozen=True)
class ConcBound:
    phi_x: np.ndarray
    phi_vals: np.ndarray
    rate: float              # D'
    offset: float = 0.0      # z' >= 0
    log_slack: float = 0.0   # delta' >= -log 2

    def __post_init__(self) -> None:
        x = np.asarray(self.phi_x, dtype=float)
        v = np.asarray(self.phi_vals, dtype=float)
        _validate_phi(x, v)
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise ValidationError("rate D' must be a positive finite real")
        if self.offset < 0:
            raise ValidationError("offset z' must be nonnegative")
        if self.log_slack < -LOG2 - 1e-12:
            raise ValidationError("log slack delta' must be >= -log 2")
        object.__setattr__(self, "phi_x", x)
        object.__setattr__(self, "phi_vals", v)

    def phi_at(self, x) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), self.phi_x, self.phi_vals)

    def phi_inv_at(self, y: float) -> float:
        return invert_monotone(self.phi_x, self.phi_vals, y)

    def alpha_at(self, r) -> np.ndarray:
        """The concentration lower bound Phi((D' r - z')_+) - delta'."""
        arg = np.maximum(self.rate * np.asarray(r, dtype=float) - self.offset, 0.0)
        return self.phi_at(arg) - self.log_slack

    def with_slack(self, offset_new: float, log_slack_new: float,
                   r_max: float | None = None) -> "ConcBound":
        """Renormalize (D', z', delta') to prescribed slack values.

        Since the bound only carries information where it exceeds log 2,
        the rate can be re-fit: the largest D'' is found by bisection so
        that the new curve never exceeds max(old curve, log 2) on a dense
        r-grid (this is where the dependence on Phi^{-1}, realized as
        grid evaluation, enters).
        """
        if offset_new < 0 or log_slack_new < -LOG2:
            raise DomainError("need z'' >= 0 and delta'' >= -log 2")
        if offset_new == 0.0 and log_slack_new == -LOG2:
            raise DomainError("one of the slack inequalities must be strict")
        hi_r = r_max if r_max is not None else (
            2.0 * (float(self.phi_x[-1]) + self.offset + offset_new) / self.rate)
        rs = np.linspace(0.0, hi_r, 4097)
        ceiling = np.maximum(self.alpha_at(rs), LOG2)
        phi_cap = float(self.phi_vals[-1])

        def valid(d: float) -> bool:
            arg = np.maximum(d * rs - offset_new, 0.0)
            if arg.max() > self.phi_x[-1] + 1e-12:
                return False  # new curve runs off the Phi table
            new = self.phi_at(arg) - log_slack_new
            return bool(np.all(new <= ceiling + 1e-12))

        lo, hi = 0.0, self.rate
        if not valid(hi):
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if valid(mid):
                    lo = mid
                else:
                    hi = mid
            d_new = lo
        else:
            d_new = hi
        if d_new <= 0:
            raise DomainError(
                f"no positive rate achieves the requested slacks "
                f"(z''={offset_new:.3g}, delta''={log_slack_new:.3g}, "
                f"Phi range cap {phi_cap:.3g})")
        return ConcBound(phi_x=self.phi_x.copy(), phi_vals=self.phi_vals.copy(),
                         rate=d_new, offset=offset_new, log_slack=log_slack_new)

    def to_json_dict(self) -> dict:
        return {"phi_grid": [self.phi_x.tolist(), self.phi_vals.tolist()],
                "Dp": self.rate, "zp": self.offset, "deltap": self.log_slack}


# ---------------------------------------------------------------------------
# log-Laplace transform
# ---------------------------------------------------------------------------

def _logsumexp(a: np.ndarray) -> float:
    m = np.max(a)
    if not math.isfinite(m):
        return float(m)
    return float(m + math.log(np.sum(np.exp(a - m))))


def log_laplace(mu, f: np.ndarray, lam):
    """L(lam) = log int exp(lam f) dmu.

    ``mu`` is a Measure1D (f = node values; exact for the grid model) or a
    weight vector (f = point values).  lam may be a scalar or array.
    L(0) = 0 identically and L is convex in lam.
    """
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    f = np.asarray(f, dtype=float)
    if not np.all(np.isfinite(f)):
        raise ValidationError("integrand values must be finite")
    if isinstance(mu, Measure1D):
        out = np.array([mu.log_mgf_nodes(f, la) for la in lam_arr])
    else:
        w = np.asarray(mu, dtype=float)
        if w.shape != f.shape:
            raise ValidationError("weights and values must be equal length")
        logw = np.log(np.maximum(w, 1e-300))
        out = np.array([_logsumexp(la * f + logw) for la in lam_arr])
    return out if out.size > 1 else float(out[0])


@dataclass(frozen=True)
class GibbsCheck:
    sup_value: float
    log_mgf: float
    theta_star: np.ndarray = field(repr=False)

    @property
    def gap(self) -> float:
        return abs(self.sup_value - self.log_mgf)


def gibbs_check(mu, psi: np.ndarray) -> GibbsCheck:
    """Verify sup_theta {int psi theta dmu - Ent_mu(theta)} = log int e^psi dmu.

    The two sides are computed by independent routes: the right directly,
    the left by evaluating the functional at the Gibbs optimizer
    theta* = e^psi / int e^psi dmu.
    """
    psi = np.asarray(psi, dtype=float)
    if isinstance(mu, Measure1D):
        log_m = mu.log_mgf_nodes(psi, 1.0)
        theta = np.exp(psi - log_m)
        tilted = Measure1D(grid=mu.grid.copy(), potential=mu.potential - psi,
                           provenance={})
        mean_psi = tilted.integrate_nodes(psi)
        # Ent via nodewise theta log theta (independent quadrature route)
        ent = mu.integrate_nodes(theta * (psi - log_m))
        sup_val = mean_psi - ent
        return GibbsCheck(sup_value=sup_val, log_mgf=log_m, theta_star=theta)
    w = np.asarray(mu, dtype=float)
    log_m = log_laplace(w, psi, 1.0)
    theta = np.exp(psi - log_m)
    mean_psi = float(np.dot(w, theta * psi))
    with np.errstate(divide="ignore", invalid="ignore"):
        tlogt = np.where(theta > 0, theta * np.log(theta), 0.0)
    ent = float(np.dot(w, tlogt))
    return GibbsCheck(sup_value=mean_psi - ent, log_mgf=log_m, theta_star=theta)


# ---------------------------------------------------------------------------
# bound translations
# ---------------------------------------------------------------------------

def laplace_to_conc(bound: LaplaceBound) -> ConcBound:
    """Concentration from a Laplace-functional bound:
    D' = D, delta' = delta, z' = Phi^{-1}(log 2 + delta) + 2 eps."""
    z = bound.phi_inv_at(LOG2 + bound.delta) + 2.0 * bound.eps
    return ConcBound(phi_x=bound.phi_x.copy(), phi_vals=bound.phi_vals.copy(),
                     rate=bound.rate, offset=z, log_slack=bound.delta)


def _exp_neg_phi_integral(x: np.ndarray, vals: np.ndarray) -> float:
    """int_0^oo exp(-Phi) for the piecewise-linear Phi with linear tail
    extension; cell-exact on the grid, rejected when the tail slope is
    not positive."""
    slopes = np.diff(vals) / np.diff(x)
    body = float(np.sum(_cell_partial_mass(vals[:-1], slopes, np.diff(x))))
    tail_slope = slopes[-1]
    if tail_slope <= 0:
        raise DomainError("exp(-Phi) is not integrable: flat or decreasing tail")
    tail = math.exp(-vals[-1]) / tail_slope
    return body + tail


def conc_to_laplace(bound: ConcBound, tau: float = 0.5) -> LaplaceBound:
    """Laplace-functional bound from concentration, for any tau in (0, 1):

        D     = tau D'
        delta = delta' + log(exp(-delta') + tau / (1 - tau))
        eps   = tau (2 z' + Phi^{-1}(log 2 + delta') + int_0^oo e^{-Phi})

    tau defaults to 1/2, balancing the loss in the rate against the
    growth of the additive slacks.
    """
    if not 0.0 < tau < 1.0:
        raise DomainError("tau must lie in (0, 1)")
    if bound.log_slack < -LOG2:
        raise DomainError("delta' must be >= -log 2")
    d_new = tau * bound.rate
    delta_new = bound.log_slack + math.log(
        math.exp(-bound.log_slack) + tau / (1.0 - tau))
    tail_int = _exp_neg_phi_integral(bound.phi_x, bound.phi_vals)
    eps_new = tau * (2.0 * bound.offset
                     + bound.phi_inv_at(LOG2 + bound.log_slack) + tail_int)
    return LaplaceBound(phi_x=bound.phi_x.copy(), phi_vals=bound.phi_vals.copy(),
                        rate=d_new, eps=eps_new, delta=delta_new)


def herbst_laplace(rho: float, *, x_max: float | None = None,
                   n_grid: int = 16385) -> tuple[LaplaceBound, ConcBound]:
    """The sub-Gaussian package implied by a log-Sobolev constant rho:
    a Laplace bound with Phi*(lam) = lam^2 / (4 rho) (i.e. Phi = rho x^2,
    D = 1, no slack), and its induced concentration bound
    K(r) >= rho (r - sqrt(log 2 / rho))_+^2."""
    if rho <= 0:
        raise DomainError("rho must be positive")
    hi = x_max if x_max is not None else math.sqrt(80.0 / rho)
    xs = np.linspace(0.0, hi, n_grid)
    bound = LaplaceBound(phi_x=xs, phi_vals=rho * xs * xs, rate=1.0)
    return bound, laplace_to_conc(bound)


# ---------------------------------------------------------------------------
# exact sup over 1-Lipschitz mean-zero functions (finite spaces)
# ---------------------------------------------------------------------------

def _prufer_trees(n: int):
    """All labeled spanning trees on n nodes as edge lists."""
    if n == 1:
        yield []
        return
    if n == 2:
        yield [(0, 1)]
        return
    for seq in product(range(n), repeat=n - 2):
        degree = [1] * n
        for v in seq:
            degree[v] += 1
        seq_list = list(seq)
        edges = []
        leaves = sorted(i for i in range(n) if degree[i] == 1)
        work = list(leaves)
        for v in seq_list:
            leaf = work.pop(0)
            edges.append((leaf, v))
            degree[v] -= 1
            if degree[v] == 1:
                # insert keeping the working list sorted
                lo = 0
                while lo < len(work) and work[lo] < v:
                    lo += 1
                work.insert(lo, v)
        edges.append((work[0], work[1]))
        yield edges


def mean_zero_lipschitz_vertices(space: DiscreteSpace, mu: np.ndarray,
                                 size_cap: int = 7) -> np.ndarray:
    """Vertices of {f : |f_i - f_j| <= d_ij, sum mu_i f_i = 0}.

    Every vertex stretches the edges of some spanning tree to full length
    with signs, then recenters; trees are enumerated via their sequence
    encoding and infeasible sign assignments are discarded.
    """
    n = space.n
    if n > size_cap:
        raise UnsupportedSizeError(
            f"vertex enumeration capped at n = {size_cap}; use the "
            "multistart heuristic (laplace_sup_discrete(..., exact=False))")
    mu = np.asarray(mu, dtype=float)
    d = space.dist
    if n == 1:
        return np.zeros((1, 1))
    out = []
    for edges in _prufer_trees(n):
        # orient edges away from node 0 by BFS, build path incidence
        adj: dict[int, list[tuple[int, int]]] = {i: [] for i in range(n)}
        for e_idx, (u, v) in enumerate(edges):
            adj[u].append((v, e_idx))
            adj[v].append((u, e_idx))
        b_mat = np.zeros((n, n - 1))
        lengths = np.zeros(n - 1)
        stack = [0]
        seen = {0}
        paths: dict[int, np.ndarray] = {0: np.zeros(n - 1)}
        while stack:
            u = stack.pop()
            for v, e_idx in adj[u]:
                if v in seen:
                    continue
                seen.add(v)
                row = paths[u].copy()
                row[e_idx] = 1.0
                paths[v] = row
                b_mat[v] = row
                lengths[e_idx] = d[min(u, v), max(u, v)]
                stack.append(v)
        signs = np.array(list(product((1.0, -1.0), repeat=n - 1)))
        f_all = (signs * lengths) @ b_mat.T
        f_all -= (f_all @ mu)[:, None]
        gaps = np.abs(f_all[:, :, None] - f_all[:, None, :]) - d[None, :, :]
        feasible = np.all(gaps <= 1e-9, axis=(1, 2))
        if np.any(feasible):
            out.append(f_all[feasible])
    if not out:
        return np.zeros((1, n))
    stacked = np.vstack(out)
    _, idx = np.unique(np.round(stacked, 9), axis=0, return_index=True)
    return stacked[np.sort(idx)]


def _lipschitz_repair(g: np.ndarray, d: np.ndarray) -> np.ndarray:
    for _ in range(3):
        g = np.min(g[None, :] + d, axis=1)
    return g


def laplace_sup_discrete(space: DiscreteSpace, mu, lam, *, exact: bool = True,
                         vertices: np.ndarray | None = None,
                         multistart: int = 32, seed: int = 0,
                         ) -> tuple[np.ndarray, str, np.ndarray]:
    """sup over 1-Lipschitz f with int f dmu = 0 of log int e^{lam f} dmu.

    Exact for n <= 7 (the objective is convex in f, so the sup over the
    mean-zero Lipschitz polytope is attained at a vertex); multistart
    local search otherwise, flagged "lower".

    Returns (values over the lam grid, exactness flag, best f per lam).
    """
    mu = np.asarray(mu, dtype=float)
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    n = space.n
    if exact and n <= 7:
        verts = vertices if vertices is not None else mean_zero_lipschitz_vertices(
            space, mu)
        flag = "exact"
    else:
        if exact and n > 7:
            raise UnsupportedSizeError(
                "exact mode capped at n = 7; call with exact=False")
        rng = np.random.default_rng(seed)
        cand = [np.zeros(n)]
        for _ in range(multistart):
            j = int(rng.integers(n))
            g = rng.choice([-1.0, 1.0]) * space.dist[j] + 0.1 * rng.normal(size=n)
            g = _lipschitz_repair(g, space.dist)
            cand.append(g - np.dot(mu, g))
        verts = np.asarray(cand)
        flag = "lower"
    logw = np.log(np.maximum(mu, 1e-300))
    vals = np.empty(lam_arr.size)
    arg_f = np.empty((lam_arr.size, n))
    for k, la in enumerate(lam_arr):
        scores = la * verts + logw[None, :]
        m = scores.max(axis=1, keepdims=True)
        ls = m[:, 0] + np.log(np.exp(scores - m).sum(axis=1))
        j = int(np.argmax(ls))
        vals[k] = ls[j]
        arg_f[k] = verts[j]
    return vals, flag, arg_f
