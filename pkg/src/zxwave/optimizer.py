"""Max-min coefficient design under energy and spectral-containment constraints.

The design problem: maximize the smallest coefficient gamma subject to all
entries >= gamma, a squared-norm budget, and containment eta >= eta_min at the
critical frequency. Only the positive-polarity rows are free; negative rows
are their negations.

The solver runs a bisection on gamma. Feasibility of a trial gamma is the
question "does a unit-norm set with entries >= gamma reach the containment
floor", answered by multi-start projected coordinate ascent on eta over the
box-sphere set. Because containment is scale-invariant, candidates live on
the norm sphere; inband/reference powers are homogeneous quadratic forms in
the coefficient vector, which the inner loop exploits for fast evaluation.
The returned solution is always re-checked through the full spectrum path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import spectrum
from .zxmap import CoefficientSet, ZxParams, build_machine, zx_params

#: lag budget for the quadratic-form construction; fixed (not adaptive) so the
#: band powers are exactly homogeneous quadratics in the coefficients
_FORM_BLOCKS = 96


@dataclass(frozen=True)
class DesignProblem:
    params: ZxParams
    energy_budget: float = 1.0
    f_c: float = 0.65
    eta_min: float = 0.95
    t_symbol: float = 1.0
    reference_band: float | None = spectrum.REPORT_BAND

    def __post_init__(self):
        if self.energy_budget <= 0:
            raise ValueError("energy budget must be positive")
        # eta_min = 0 disables the containment constraint
        if not 0 <= self.eta_min < 1:
            raise ValueError("eta_min must lie in [0, 1)")


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 20240 + 1
    n_restarts: int = 64
    coarse_step: float = 0.01
    fine_step: float = 1e-4
    gamma_tol: float = 1e-4
    max_sweeps: int = 60
    # the bisection targets eta_min + eta_pad so the boundary witness keeps
    # positive slack on the exact verification path
    eta_pad: float = 2e-4


@dataclass
class SearchLog:
    evaluations: int = 0
    best_trace: list = field(default_factory=list)   # (gamma, eta) after each bisection step


@dataclass(frozen=True)
class EvalReport:
    gamma: float
    eta: float
    norm_sq: float
    feasible: bool


@dataclass(frozen=True)
class DesignSolution:
    coeffs: CoefficientSet
    gamma: float
    eta: float
    norm_sq: float
    feasible: bool
    search_log: SearchLog


# relative slack on the norm check: published sets are printed to four
# decimals, which puts their exact sum of squares a hair past the budget
_NORM_RTOL = 1e-4
_ETA_ATOL = 1e-6


def _eta_of(coeffs: CoefficientSet, problem: DesignProblem) -> float:
    machine = build_machine(problem.params, coeffs)
    ac = spectrum.autocorrelation(machine)
    filt = spectrum.rectangular_filter(problem.t_symbol, problem.params.m_rx)
    return spectrum.containment(ac, filt, problem.f_c, problem.params.m_rx,
                                problem.t_symbol, reference_band=problem.reference_band)


def evaluate(candidate: CoefficientSet, problem: DesignProblem) -> EvalReport:
    """Constraint report for one candidate: min entry, containment, energy."""
    if candidate.params.m_rx != problem.params.m_rx:
        raise ValueError("candidate was built for a different oversampling factor")
    gamma = candidate.min_entry
    norm_sq = candidate.norm_sq
    eta = _eta_of(candidate, problem)
    feasible = (norm_sq <= problem.energy_budget * (1 + _NORM_RTOL)
                and eta >= problem.eta_min - _ETA_ATOL)
    return EvalReport(gamma=gamma, eta=eta, norm_sq=norm_sq, feasible=feasible)


def verify_table(problem: DesignProblem, table: CoefficientSet) -> EvalReport:
    """Evaluate a published/bundled coefficient set against the problem."""
    return evaluate(table, problem)


def _band_power_flat(flat: np.ndarray, problem: DesignProblem, f_lim: float) -> float:
    coeffs = CoefficientSet(g=np.abs(flat).reshape(problem.params.n_patterns,
                                                   problem.params.q),
                            params=problem.params)
    machine = build_machine(problem.params, coeffs)
    # signs of flat do not matter: the quadratic form is built from |e_i + e_j|
    ac = spectrum.autocorrelation(machine, l_max=_FORM_BLOCKS * problem.params.q - 1)
    filt = spectrum.rectangular_filter(problem.t_symbol, problem.params.m_rx)
    return spectrum._symmetric_band_power(ac, filt, problem.params.m_rx,
                                          problem.t_symbol, f_lim,
                                          spectrum.DEFAULT_PSD_GRID)


def band_power_form(problem: DesignProblem, f_lim: float) -> np.ndarray:
    """Symmetric matrix A with g' A g = power of the mapped stream in [-f_lim, f_lim].

    Built by polarization of the (exactly quadratic) band-power functional.
    Entries of the coefficient vector are probed pairwise; a tiny positive
    floor keeps the probe vectors inside the valid (positive) domain, and its
    contribution cancels in the polarization to machine precision.
    """
    return _cached_band_power_form(problem.params.m_rx, float(f_lim),
                                   float(problem.t_symbol))


def _cached_band_power_form(m_rx: int, f_lim: float, t_symbol: float) -> np.ndarray:
    key = (m_rx, f_lim, t_symbol)
    cached = _FORM_CACHE.get(key)
    if cached is not None:
        return cached
    problem = DesignProblem(params=zx_params(m_rx), t_symbol=t_symbol)
    m = problem.params.n_coeffs
    eps = 1e-7
    base = np.full(m, eps)

    def probe(v):
        return _band_power_flat(v, problem, f_lim)

    diag = np.empty(m)
    for i in range(m):
        v = base.copy()
        v[i] = 1.0
        diag[i] = probe(v)
    a = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            v = base.copy()
            v[i] = 1.0
            v[j] = 1.0
            a[i, j] = a[j, i] = (probe(v) - diag[i] - diag[j]) / 2.0
    np.fill_diagonal(a, diag)
    a.flags.writeable = False
    _FORM_CACHE[key] = a
    return a


_FORM_CACHE: dict = {}


def _project(g: np.ndarray, gamma: float) -> np.ndarray:
    """Map onto the unit sphere restricted to the box [gamma, inf).

    Entries below the floor clamp to it and the free entries rescale to
    restore unit norm; the clamp set grows monotonically, so the iteration
    terminates with an exactly feasible point.
    """
    g = np.maximum(np.asarray(g, dtype=float), 1e-12)
    g = g / np.linalg.norm(g)
    if gamma <= 0:
        return g
    m = g.size
    clamped = np.zeros(m, dtype=bool)
    for _ in range(m + 1):
        low = (g < gamma) & ~clamped
        if not low.any():
            break
        clamped |= low
        residual = 1.0 - clamped.sum() * gamma * gamma
        if residual <= 0:
            # floor saturates the sphere: only the uniform corner remains
            return np.full(m, 1.0 / np.sqrt(m))
        free = ~clamped
        norm_free = np.linalg.norm(g[free])
        out = np.empty(m)
        out[clamped] = gamma
        if norm_free > 0:
            out[free] = g[free] * (np.sqrt(residual) / norm_free)
        else:
            out[free] = np.sqrt(residual / free.sum())
        g = out
    return g


def _ratio(g, a_num, a_den):
    return (g @ a_num @ g) / (g @ a_den @ g)


def _coordinate_ascent(g, a_num, a_den, gamma, step, max_sweeps, log):
    best = _ratio(g, a_num, a_den)
    for _ in range(max_sweeps):
        improved = False
        for i in range(g.size):
            for delta in (step, -step):
                cand = g.copy()
                cand[i] = max(gamma, cand[i] + delta)
                cand = _project(cand, gamma)
                log.evaluations += 1
                r = _ratio(cand, a_num, a_den)
                if r > best + 1e-15:
                    g, best, improved = cand, r, True
        if not improved:
            break
    return g, best


def _gradient_polish(g, a_num, a_den, gamma, log, iters=200):
    best = _ratio(g, a_num, a_den)
    for _ in range(iters):
        den = g @ a_den @ g
        grad = 2.0 * (a_num @ g - best * (a_den @ g)) / den
        t = 0.5
        improved = False
        while t > 1e-8:
            cand = _project(g + t * grad, gamma)
            log.evaluations += 1
            r = _ratio(cand, a_num, a_den)
            if r > best + 1e-15:
                g, best, improved = cand, r, True
                break
            t *= 0.5
        if not improved:
            break
    return g, best


def _max_eta(a_num, a_den, gamma, problem, search, rng, log):
    """Best containment achievable on the box-sphere set at the given floor."""
    m = problem.params.n_coeffs
    if gamma * np.sqrt(m) > 1.0 + 1e-12:
        return -np.inf, None
    import scipy.linalg

    eigvals, eigvecs = scipy.linalg.eigh(a_num, a_den)
    seeds = [np.abs(eigvecs[:, -1]) + 1e-6, np.ones(m)]
    seeds.extend(rng.random(m) + 0.05 for _ in range(search.n_restarts))

    best_eta, best_g = -np.inf, None
    for g0 in seeds:
        g = _project(np.asarray(g0, dtype=float), gamma)
        g, _ = _gradient_polish(g, a_num, a_den, gamma, log)
        step = search.coarse_step
        while step >= search.fine_step:
            g, _ = _coordinate_ascent(g, a_num, a_den, gamma, step,
                                      search.max_sweeps, log)
            step /= 10.0
        eta = _ratio(g, a_num, a_den)
        if eta > best_eta:
            best_eta, best_g = eta, g
    return best_eta, best_g


def solve(problem: DesignProblem, search: SearchConfig = SearchConfig()) -> DesignSolution:
    """Bisection on gamma with the multi-start inner ascent as the feasibility oracle.

    Returns the best feasible design found, rescaled to the energy budget.
    If even an unconstrained-floor search cannot reach the containment
    target, the result carries ``feasible=False`` and the best (infeasible)
    iterate for inspection.
    """
    rng = np.random.default_rng(search.seed)
    log = SearchLog()
    a_num = band_power_form(problem, problem.f_c / problem.t_symbol)
    if problem.reference_band is None:
        # exact total power: quadratic form of c0 * m_rx / T = |g|^2 m_rx/(m T)
        m = problem.params.n_coeffs
        a_den = np.eye(m) * (problem.params.m_rx / (m * problem.t_symbol))
    else:
        a_den = band_power_form(problem, problem.reference_band / problem.t_symbol)

    m = problem.params.n_coeffs
    target = problem.eta_min + (search.eta_pad if problem.eta_min > 0 else 0.0)
    lo, hi = 0.0, 1.0 / np.sqrt(m)
    eta_lo, g_lo = _max_eta(a_num, a_den, lo, problem, search, rng, log)
    log.best_trace.append((lo, eta_lo))
    if eta_lo < target:
        # containment target unreachable even without a floor
        flat = np.abs(g_lo) if g_lo is not None else np.full(m, 1 / np.sqrt(m))
        flat = np.maximum(flat, 1e-9)
        coeffs = CoefficientSet.from_flat(flat * np.sqrt(problem.energy_budget), problem.params)
        rep = evaluate(coeffs, problem)
        return DesignSolution(coeffs=coeffs, gamma=rep.gamma, eta=rep.eta,
                              norm_sq=rep.norm_sq, feasible=False, search_log=log)

    best_g = g_lo
    while hi - lo > search.gamma_tol:
        mid = 0.5 * (lo + hi)
        eta_mid, g_mid = _max_eta(a_num, a_den, mid, problem, search, rng, log)
        log.best_trace.append((mid, eta_mid))
        if eta_mid >= target:
            lo, best_g = mid, g_mid
        else:
            hi = mid

    flat = np.maximum(best_g, 1e-9)
    flat = flat / np.linalg.norm(flat) * np.sqrt(problem.energy_budget)
    coeffs = CoefficientSet.from_flat(flat, problem.params)
    rep = evaluate(coeffs, problem)       # dual route: full spectrum path
    return DesignSolution(coeffs=coeffs, gamma=rep.gamma, eta=rep.eta,
                          norm_sq=rep.norm_sq, feasible=rep.feasible,
                          search_log=log)
