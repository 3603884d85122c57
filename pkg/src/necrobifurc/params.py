"""Parameter bundles and non-dimensionalization.

Maps the dimensional model constants (diffusivity, consumption, mitosis,
apoptosis, mobility, adhesion, taxis, nutrient levels, supply rate, radii)
to the dimensionless bundle the rest of the package works with: the scaled
nutrient-supply rate, the necrotic nutrient ratio, the taxis coefficient,
the surface-tension strength, the proliferation and apoptosis rates.

Units are not tracked symbolically; the caller is responsible for feeding
a consistent unit system.
"""

from dataclasses import dataclass, replace
import math

from .errors import DomainError

# the quasi-steady reduction assumes taxis is much slower than diffusion;
# flag diagnostics once the rate ratio stops being small
QUASI_STEADY_LIMIT = 0.1


@dataclass(frozen=True)
class DimensionalParams:
    """Dimensional model constants (consistent units assumed)."""

    D: float            # nutrient diffusivity, length^2/time
    lam: float          # nutrient consumption rate, 1/time
    lam_M: float        # mitosis rate, 1/time
    lam_A: float        # apoptosis rate, 1/time
    mu: float           # cell mobility
    gamma: float        # cell-cell adhesion
    chi_sigma_dim: float  # taxis coefficient
    chi_bar: float      # characteristic taxis coefficient
    sigma_inf: float    # far-field nutrient level
    sigma_N: float      # nutrient level at the necrotic boundary
    beta_dim: float     # nutrient supply rate, 1/length
    R0_dim: float       # necrotic (inner) radius, length
    R_dim: float        # tumor (outer) radius, length

    def __post_init__(self):
        positives = {
            "D": self.D, "lam": self.lam, "lam_M": self.lam_M,
            "lam_A": self.lam_A, "mu": self.mu, "gamma": self.gamma,
            "chi_bar": self.chi_bar, "sigma_inf": self.sigma_inf,
            "beta_dim": self.beta_dim, "R0_dim": self.R0_dim,
            "R_dim": self.R_dim,
        }
        for name, val in positives.items():
            if not val > 0.0:
                raise DomainError(f"{name} must be strictly positive, got {val}")
        if self.chi_sigma_dim < 0.0:
            raise DomainError("chi_sigma_dim must be >= 0")
        if self.sigma_N < 0.0:
            raise DomainError("sigma_N must be >= 0")
        if not self.sigma_N < self.sigma_inf:
            raise DomainError("sigma_N must be below sigma_inf")
        if not self.R0_dim < self.R_dim:
            raise DomainError("R0_dim must be below R_dim")


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless parameter bundle used by every solver.

    ``apopt`` is optional: it is either prescribed here (ratio of apoptosis
    to mitosis rates) or derived from the geometry by the steady-state flux
    balance; ``apopt_source`` records which.
    """

    beta: float         # dimensionless nutrient-supply (angiogenesis) rate
    sigma_ul: float     # necrotic/far-field nutrient ratio, in [0, 1)
    R0: float           # inner radius
    R: float            # outer radius
    chi: float = 0.0    # taxis coefficient
    g_inv: float = 0.0  # surface-tension (adhesion) strength
    prolif: float = 1.0  # proliferation rate, the bifurcation parameter
    apopt: float | None = None
    apopt_source: str = "unset"  # "prescribed" | "derived" | "unset"

    def __post_init__(self):
        if not 0.0 < self.R0 < self.R:
            raise DomainError(
                f"need 0 < R0 < R, got R0={self.R0}, R={self.R}")
        if self.beta < 0.0:
            raise DomainError(f"beta must be >= 0, got {self.beta}")
        if not 0.0 <= self.sigma_ul < 1.0:
            raise DomainError(
                f"sigma_ul must lie in [0, 1), got {self.sigma_ul}")
        if self.g_inv < 0.0:
            raise DomainError(f"g_inv must be >= 0, got {self.g_inv}")
        if self.chi < 0.0:
            raise DomainError(f"chi must be >= 0, got {self.chi}")

    def with_(self, **kw):
        """Copy with replaced fields (validates the result)."""
        return replace(self, **kw)


@dataclass(frozen=True)
class NondimDiagnostics:
    """Derived scales reported alongside the dimensionless bundle."""

    L: float            # diffusion length sqrt(D/lam)
    lam_chi: float      # intrinsic taxis rate chi_bar*sigma_inf/L^2
    p_scale: float      # characteristic pressure lam_chi*L^2/mu
    eps: float          # lam_chi/lam, the quasi-steady small parameter
    t_diffusion: float  # 1/lam
    t_taxis: float      # 1/lam_chi; eps is their ratio
    quasi_steady_warning: bool


def nondimensionalize(d: DimensionalParams):
    """Map dimensional constants to (ModelParams, NondimDiagnostics).

    L = sqrt(D/lam); lam_chi = chi_bar*sigma_inf/L^2; p_scale =
    lam_chi*L^2/mu; beta, radii scale with L; prolif = lam_M/lam_chi;
    apopt = lam_A/lam_M; g_inv = mu*gamma/(lam_chi*L^3).  The diagnostics
    carry eps = lam_chi/lam together with both underlying time scales, and
    a warning flag once eps >= 0.1.
    """
    L = math.sqrt(d.D / d.lam)
    lam_chi = d.chi_bar * d.sigma_inf / (L * L)
    p_scale = lam_chi * L * L / d.mu
    eps = lam_chi / d.lam
    params = ModelParams(
        beta=L * d.beta_dim,
        sigma_ul=d.sigma_N / d.sigma_inf,
        R0=d.R0_dim / L,
        R=d.R_dim / L,
        chi=d.chi_sigma_dim / d.chi_bar,
        g_inv=d.mu * d.gamma / (lam_chi * L ** 3),
        prolif=d.lam_M / lam_chi,
        apopt=d.lam_A / d.lam_M,
        apopt_source="prescribed",
    )
    diags = NondimDiagnostics(
        L=L,
        lam_chi=lam_chi,
        p_scale=p_scale,
        eps=eps,
        t_diffusion=1.0 / d.lam,
        t_taxis=1.0 / lam_chi,
        quasi_steady_warning=eps >= QUASI_STEADY_LIMIT,
    )
    return params, diags
