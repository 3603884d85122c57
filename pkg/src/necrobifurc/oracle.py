"""Independent finite-difference oracles for every closed form.

Second-order central differences with ghost-node Robin/Neumann closures,
so the Richardson pairs exhibit clean order-2 convergence.  The solvers
never evaluate the closed-form Bessel expressions except where the model's
boundary conditions explicitly require their data (the Robin data
sigma''(R), sigma'(R) for the mode problem, the Neumann datum
chi*sigma'(R0) and the flux-balance apoptosis rate for the pressure
problem).

The 2-D solver works on the perturbed annulus r in [R0, R + eps*cos(l
theta)] mapped onto a fixed rectangle (boundary-fitted coordinates), and
measures how fast the solution approaches steady state + eps * first-order
correction; the observed decay order of the remainder is the computable
content of the expansion estimate.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.linalg import solve_banded
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import spsolve

from .errors import DomainError, InconclusiveResolutionError
from .modes import build_mode, q_grid
from .params import ModelParams
from .steady import build_steady_state, sigma_eval, sigma_grid

_MIN_GRID = 16


@dataclass(frozen=True)
class RadialProfile:
    """A discretized radial solution on [R0, R]."""

    r_values: np.ndarray
    values: np.ndarray
    grid_spacing: float
    convergence_order: float | None = None


@dataclass(frozen=True)
class AnnulusField:
    """A solved field on the perturbed annulus, stored with the first
    angular column duplicated at the end (periodic identification)."""

    rho: np.ndarray     # radial map coordinate in [0, 1]
    theta: np.ndarray   # includes the duplicated 2*pi column
    r: np.ndarray       # physical radius at each node, (n_r+1, n_t+1)
    values: np.ndarray  # field values, same shape
    perturb_eps: float


def _tridiag_solve(sub, diag, sup, rhs):
    """Solve the tridiagonal system with the three bands given on the
    diagonal's indexing (sub[0] and sup[-1] unused)."""
    n = diag.shape[0]
    ab = np.zeros((3, n))
    ab[0, 1:] = sup[:-1]
    ab[1, :] = diag
    ab[2, :-1] = sub[1:]
    return solve_banded((1, 1), ab, rhs)


def _self_convergence_order(solve, n):
    """Observed order from nested solutions ending at grid n.

    Uses the (n/4, n/2, n) triple when n divides by 4: at very fine grids
    the successive differences sink toward the linear-solver roundoff
    floor and would corrupt the estimate.
    """
    if n % 4 == 0:
        u1 = solve(n // 4)
        u2 = solve(n // 2)
        u4 = solve(n)
    else:
        u1 = solve(n)
        u2 = solve(2 * n)
        u4 = solve(4 * n)
    e1 = float(np.max(np.abs(u1 - u2[::2])))
    e2 = float(np.max(np.abs(u2 - u4[::2])))
    if e2 == 0.0:
        return None
    return math.log2(e1 / e2)


def solve_sigma_bvp(p: ModelParams, n, richardson=False) -> RadialProfile:
    """FD solution of sigma'' + sigma'/r - sigma = 0, Dirichlet at R0 and
    Robin at R (ghost node); no closed-form input at all."""
    if n < _MIN_GRID:
        raise DomainError(f"grid size must be >= {_MIN_GRID}")

    def solve(nn):
        # Dirichlet at R0 imposed by elimination so the boundary value is
        # exact; unknowns are the nn nodes i = 1..nn
        h = (p.R - p.R0) / nn
        r = p.R0 + h * np.arange(nn + 1)
        sub = np.zeros(nn)
        diag = np.zeros(nn)
        sup = np.zeros(nn)
        rhs = np.zeros(nn)
        ri = r[1:-1]
        sub[:-1] = 1.0 / h ** 2 - 1.0 / (2.0 * h * ri)
        diag[:-1] = -2.0 / h ** 2 - 1.0
        sup[:-1] = 1.0 / h ** 2 + 1.0 / (2.0 * h * ri)
        rhs[0] = -(1.0 / h ** 2 - 1.0 / (2.0 * h * r[1])) * p.sigma_ul
        beta = p.beta
        sub[-1] = 2.0 / h ** 2
        diag[-1] = -2.0 / h ** 2 - 1.0 - 2.0 * beta / h - beta / p.R
        rhs[-1] = -2.0 * beta / h - beta / p.R
        interior = _tridiag_solve(sub, diag, sup, rhs)
        return np.concatenate([[p.sigma_ul], interior])

    vals = solve(n)
    order = _self_convergence_order(solve, n) if richardson else None
    h = (p.R - p.R0) / n
    return RadialProfile(r_values=p.R0 + h * np.arange(n + 1), values=vals,
                         grid_spacing=h, convergence_order=order)


def solve_q_bvp(p: ModelParams, l, n, richardson=False) -> RadialProfile:
    """FD solution of Q'' + Q'/r - (1 + l^2/r^2) Q = 0 with Q(R0) = 0 and
    the linearized Robin closure at R; the Robin data sigma''(R),
    sigma'(R) come from the closed form, as the boundary condition
    requires."""
    if n < _MIN_GRID:
        raise DomainError(f"grid size must be >= {_MIN_GRID}")
    s = build_steady_state(p)
    _, sig_p_R, sig_pp_R = sigma_eval(s, p.R)
    c = -(sig_pp_R + p.beta * sig_p_R)  # Q'(R) = c - beta Q(R)
    beta = p.beta

    def solve(nn):
        # the homogeneous Dirichlet row at R0 is eliminated (exact zero)
        h = (p.R - p.R0) / nn
        r = p.R0 + h * np.arange(nn + 1)
        sub = np.zeros(nn)
        diag = np.zeros(nn)
        sup = np.zeros(nn)
        rhs = np.zeros(nn)
        ri = r[1:-1]
        sub[:-1] = 1.0 / h ** 2 - 1.0 / (2.0 * h * ri)
        diag[:-1] = -2.0 / h ** 2 - (1.0 + l * l / ri ** 2)
        sup[:-1] = 1.0 / h ** 2 + 1.0 / (2.0 * h * ri)
        R = p.R
        sub[-1] = 2.0 / h ** 2
        diag[-1] = (-2.0 / h ** 2 - (1.0 + l * l / R ** 2)
                    - 2.0 * beta / h - beta / R)
        rhs[-1] = -(2.0 / h + 1.0 / R) * c
        interior = _tridiag_solve(sub, diag, sup, rhs)
        return np.concatenate([[0.0], interior])

    vals = solve(n)
    order = _self_convergence_order(solve, n) if richardson else None
    h = (p.R - p.R0) / n
    return RadialProfile(r_values=p.R0 + h * np.arange(n + 1), values=vals,
                         grid_spacing=h, convergence_order=order)


@dataclass(frozen=True)
class PressureSolve:
    """FD pressure solution plus the emergent-flux consistency residual
    |p'(R) - chi*sigma'(R)|, which the flux-balance apoptosis rate drives
    to zero at second order."""

    profile: RadialProfile
    consistency_residual: float


def solve_pressure_bvp(p: ModelParams, s=None, n=512, apopt_override=None,
                       richardson=False) -> PressureSolve:
    """FD solution of -(p'' + p'/r) = prolif*(sigma - A) - chi*sigma with
    Neumann data at R0 and Dirichlet at R.

    The source sigma is the FD nutrient solution on the same grid (not the
    closed form); only the boundary data chi*sigma'(R0), the Dirichlet
    value, and the flux-balance rate A are taken from the closed form.
    """
    if n < _MIN_GRID:
        raise DomainError(f"grid size must be >= {_MIN_GRID}")
    if s is None:
        s = build_steady_state(p)
    apopt = s.apopt if apopt_override is None else float(apopt_override)
    _, sig_p_R0, _ = sigma_eval(s, p.R0)
    _, sig_p_R, _ = sigma_eval(s, p.R)
    g0 = p.chi * sig_p_R0

    def solve(nn):
        # Dirichlet at R imposed by elimination; unknowns are i = 0..nn-1
        h = (p.R - p.R0) / nn
        r = p.R0 + h * np.arange(nn + 1)
        sig = solve_sigma_bvp(p, nn).values
        f = p.chi * sig - p.prolif * (sig - apopt)  # p'' + p'/r = f
        dirichlet = p.g_inv / p.R
        sub = np.zeros(nn)
        diag = np.zeros(nn)
        sup = np.zeros(nn)
        rhs = np.zeros(nn)
        diag[0] = -2.0 / h ** 2
        sup[0] = 2.0 / h ** 2
        rhs[0] = f[0] + 2.0 * g0 / h - g0 / p.R0
        ri = r[1:nn]
        sub[1:] = 1.0 / h ** 2 - 1.0 / (2.0 * h * ri)
        diag[1:] = -2.0 / h ** 2
        sup[1:] = 1.0 / h ** 2 + 1.0 / (2.0 * h * ri)
        rhs[1:] = f[1:nn]
        rhs[-1] -= (1.0 / h ** 2 + 1.0 / (2.0 * h * r[nn - 1])) * dirichlet
        sup[-1] = 0.0
        interior = _tridiag_solve(sub, diag, sup, rhs)
        return np.concatenate([interior, [dirichlet]])

    vals = solve(n)
    order = _self_convergence_order(solve, n) if richardson else None
    h = (p.R - p.R0) / n
    dp_R = (3.0 * vals[-1] - 4.0 * vals[-2] + vals[-3]) / (2.0 * h)
    residual = abs(dp_R - p.chi * sig_p_R)
    profile = RadialProfile(r_values=p.R0 + h * np.arange(n + 1),
                            values=vals, grid_spacing=h,
                            convergence_order=order)
    return PressureSolve(profile=profile, consistency_residual=residual)


def compare_to_closed_form(profile: RadialProfile, closed_values):
    """Max relative mismatch against closed-form values on the same grid,
    normalized by the closed form's max magnitude."""
    scale = float(np.max(np.abs(closed_values)))
    if scale == 0.0:
        return float(np.max(np.abs(profile.values)))
    return float(np.max(np.abs(profile.values - closed_values)) / scale)


def _solve_perturbed_annulus(p: ModelParams, l, eps, n_r, n_t):
    """FD solve of Laplace(sigma) = sigma on the annulus with outer radius
    R + eps*cos(l theta), in boundary-fitted coordinates.

    Unknown layout: (n_r + 2) x n_t nodes; i = n_r + 1 is the ghost layer
    whose defining equations are the Robin rows at rho = 1.
    """
    R0, R, beta = p.R0, p.R, p.beta
    h = 1.0 / n_r
    ht = 2.0 * math.pi / n_t
    theta = ht * np.arange(n_t)
    svec = R + eps * np.cos(l * theta) - R0
    spvec = -eps * l * np.sin(l * theta)
    sppvec = -eps * l * l * np.cos(l * theta)
    avec = spvec / svec

    n_rows = (n_r + 2) * n_t

    def idx(i, j):
        return i * n_t + (j % n_t)

    rows = []
    cols = []
    data = []
    rhs = np.zeros(n_rows)

    # Dirichlet at the necrotic boundary (rho = 0)
    j = np.arange(n_t)
    rows.append(j)
    cols.append(j)
    data.append(np.ones(n_t))
    rhs[:n_t] = p.sigma_ul

    # interior + boundary PDE rows, i = 1..n_r
    ii, jj = np.meshgrid(np.arange(1, n_r + 1), np.arange(n_t),
                         indexing="ij")
    ii = ii.ravel()
    jj = jj.ravel()
    rho = ii * h
    s_j = svec[jj]
    a_j = avec[jj]
    spp_j = sppvec[jj]
    r = R0 + rho * s_j
    arr = 1.0 / s_j ** 2 + (rho * a_j / r) ** 2
    att = 1.0 / r ** 2
    art = -2.0 * rho * a_j / r ** 2
    ar = 1.0 / (r * s_j) + rho * (2.0 * a_j ** 2 - spp_j / s_j) / r ** 2
    row_id = ii * n_t + jj

    def add(di, dj, coeff):
        rows.append(row_id)
        cols.append((ii + di) * n_t + (jj + dj) % n_t)
        data.append(coeff)

    add(+1, 0, arr / h ** 2 + ar / (2.0 * h))
    add(-1, 0, arr / h ** 2 - ar / (2.0 * h))
    add(0, +1, att / ht ** 2)
    add(0, -1, att / ht ** 2)
    add(0, 0, -2.0 * arr / h ** 2 - 2.0 * att / ht ** 2 - 1.0)
    cross = art / (4.0 * h * ht)
    add(+1, +1, cross)
    add(+1, -1, -cross)
    add(-1, +1, -cross)
    add(-1, -1, cross)

    # Robin rows defining the ghost layer i = n_r + 1:
    # (W^2/s) psi_rho - (s'/r^2) psi_theta + W beta psi = W beta at rho = 1
    jg = np.arange(n_t)
    rg = R0 + svec  # = R + eps cos(l theta)
    w = np.sqrt(1.0 + (spvec / rg) ** 2)
    row_g = (n_r + 1) * n_t + jg
    c_rho = (w ** 2 / svec) / (2.0 * h)
    c_th = (spvec / rg ** 2) / (2.0 * ht)
    for dcols, coeff in (
            ((n_r + 1) * n_t + jg, c_rho),
            ((n_r - 1) * n_t + jg, -c_rho),
            (n_r * n_t + (jg + 1) % n_t, -c_th),
            (n_r * n_t + (jg - 1) % n_t, c_th),
            (n_r * n_t + jg, w * beta)):
        rows.append(row_g)
        cols.append(dcols)
        data.append(coeff)
    rhs[(n_r + 1) * n_t:] = w * beta

    mat = coo_matrix(
        (np.concatenate(data),
         (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_rows, n_rows)).tocsr()
    sol = spsolve(mat, rhs)
    field = sol.reshape(n_r + 2, n_t)[: n_r + 1]  # drop the ghost layer
    rgrid = R0 + np.outer(h * np.arange(n_r + 1), svec)
    return theta, rgrid, field


@dataclass(frozen=True)
class ExpansionReport:
    """Measured remainder decay of the two-term expansion.

    e_full(eps) = max |sigma - sigma_s - eps*Q_l cos| should decay at
    order 2 in eps (ratio about 4 between eps and eps/2); e_first(eps) =
    max |sigma - sigma_s| only at order 1 (ratio about 2).  e_floor is the
    pure discretization error measured at eps = 0.
    """

    l: int
    grid: tuple
    eps_values: list
    e_full: list
    e_first: list
    e_floor: float
    full_ratios: list
    first_ratios: list
    fields: list


def expansion_check_2d(p: ModelParams, l, eps_list, grid=(512, 256),
                       keep_fields=False, floor_factor=6.0):
    """Second-order remainder check for the two-term expansion.

    Solves the nutrient problem on perturbed annuli for each eps (plus
    eps = 0 for the discretization floor) and reports the max-norm
    remainders and their decay ratios.  Raises
    :class:`InconclusiveResolutionError` when the smallest remainder is
    within ``floor_factor`` of the discretization floor.
    """
    if l < 2:
        raise DomainError("expansion check needs l >= 2")
    eps_list = [float(e) for e in eps_list]
    if not eps_list or any(e <= 0.0 for e in eps_list):
        raise DomainError("eps values must be positive")
    if max(eps_list) >= 0.5 * (p.R - p.R0):
        raise DomainError("eps too large for the annulus")
    n_r, n_t = int(grid[0]), int(grid[1])
    if n_r < 32 or n_t < 16:
        raise DomainError("2-D grid too coarse")

    s = build_steady_state(p)
    m = build_mode(s, l)

    def remainders(eps):
        theta, rgrid, field = _solve_perturbed_annulus(p, l, eps, n_r, n_t)
        sig = sigma_grid(s, rgrid, extend=True)[0]
        q = q_grid(m, rgrid, extend=True)[0]
        cosl = np.cos(l * theta)[None, :]
        e_full = float(np.max(np.abs(field - sig - eps * q * cosl)))
        e_first = float(np.max(np.abs(field - sig)))
        return e_full, e_first, (theta, rgrid, field)

    e_floor, _, _ = remainders(0.0)
    e_full = []
    e_first = []
    fields = []
    for eps in sorted(eps_list, reverse=True):
        ef, e1, raw = remainders(eps)
        e_full.append(ef)
        e_first.append(e1)
        if keep_fields:
            theta, rgrid, field = raw
            theta_c = np.concatenate([theta, [2.0 * math.pi]])
            rc = np.concatenate([rgrid, rgrid[:, :1]], axis=1)
            vc = np.concatenate([field, field[:, :1]], axis=1)
            fields.append(AnnulusField(
                rho=np.linspace(0.0, 1.0, n_r + 1), theta=theta_c, r=rc,
                values=vc, perturb_eps=eps))
    if min(e_full) <= floor_factor * e_floor:
        raise InconclusiveResolutionError(
            "discretization error dominates the expansion remainder; "
            "refine the grid or enlarge eps",
            diagnostics={"e_floor": e_floor, "e_full": e_full,
                         "eps": sorted(eps_list, reverse=True),
                         "grid": (n_r, n_t)})
    eps_sorted = sorted(eps_list, reverse=True)
    full_ratios = [e_full[i] / e_full[i + 1] for i in range(len(e_full) - 1)]
    first_ratios = [e_first[i] / e_first[i + 1]
                    for i in range(len(e_first) - 1)]
    return ExpansionReport(l=l, grid=(n_r, n_t), eps_values=eps_sorted,
                           e_full=e_full, e_first=e_first, e_floor=e_floor,
                           full_ratios=full_ratios,
                           first_ratios=first_ratios, fields=fields)


def oracle_report_rows(entries):
    """Rows for the oracle CSV export: quantity, grid_n, max_rel_err,
    conv_order."""
    cols = ["quantity", "grid_n", "max_rel_err", "conv_order"]
    rows = [(q, n, err, order) for (q, n, err, order) in entries]
    return cols, rows
