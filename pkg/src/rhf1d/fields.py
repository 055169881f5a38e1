"""Grids, scalar fields, the mixed x-Fourier/radial-Bessel transform,
nuclear density builders, and junction cutoff profiles.

Geometry is a cell [-a/2, a/2) x-periodic times a transverse plane truncated
at radius r_max.  All nuclear densities here are fully rotation invariant in
the transverse plane, so fields carry only their (x, radius) values; angular
channels enter through the operators, not the fields.

The transform pairs an x-DFT with an expansion in the eigenmodes of the
discrete radial Laplacian (Dirichlet wall at r_max).  Using the operator's
own modes makes the forward/inverse pair exactly unitary on the grid and
gives a radial wavenumber grid k_q = sqrt(eps_q) that matches Bessel-zero
wavenumbers j_{0,q}/r_max to second order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import j0

__all__ = [
    "CellGrid",
    "ScalarField",
    "MixedSpectrum",
    "NuclearDensity",
    "build_nuclear_density",
    "mixed_fourier_forward",
    "mixed_fourier_inverse",
    "cutoff_chi",
    "CutoffProfile",
    "bump_profile",
    "radial_operator_tridiag",
]


def bump_profile(s):
    """Standard mollifier profile exp(-1/(1-s^2)) on |s| < 1, zero outside."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


def radial_operator_tridiag(rho, h_r, m):
    """Symmetrized tridiagonal of -(1/rho) d/drho (rho d/drho) + m^2/rho^2.

    Conservative (flux) second-order differences on the cell-centered grid,
    similarity-transformed by sqrt(rho h) so eigenvectors are orthonormal in
    plain l2.  The inner flux face sits at rho = 0 (coefficient vanishes, so
    the axis needs no boundary row); a ghost node antisymmetric across the
    wall enforces u(r_max) = 0.
    """
    rp = rho + 0.5 * h_r
    rm = rho - 0.5 * h_r
    diag = (rp + rm) / (rho * h_r**2) + (m * m) / rho**2
    diag = diag.copy()
    diag[-1] += rp[-1] / (rho[-1] * h_r**2)
    off = -rp[:-1] / (h_r**2 * np.sqrt(rho[:-1] * rho[1:]))
    return diag, off


@dataclass(frozen=True)
class CellGrid:
    """Discretization of one unit cell and its Brillouin zone.

    Attributes
    ----------
    period_a : float
        Lattice constant a; the cell is [-a/2, a/2) in x.
    n_x : int
        Uniform x samples per cell (even, >= 8).
    r_max : float
        Radial truncation; fields and operators see a Dirichlet wall there.
    n_r : int
        Radial nodes, cell-centered on (0, r_max].
    m_max : int
        Angular channels |m| <= m_max.
    n_xi : int
        Brillouin-zone samples, uniform and endpoint-exclusive on
        [-pi/a, pi/a).
    """

    period_a: float
    n_x: int = 32
    r_max: float = 12.0
    n_r: int = 128
    m_max: int = 4
    n_xi: int = 16

    def __post_init__(self):
        if self.period_a <= 0:
            raise ValueError("period_a must be positive")
        if self.n_x < 8 or self.n_x % 2:
            raise ValueError("n_x must be an even integer >= 8")
        if self.n_r < 16:
            raise ValueError("n_r must be >= 16")
        if self.r_max <= 0:
            raise ValueError("r_max must be positive")
        if self.m_max < 0:
            raise ValueError("m_max must be >= 0")
        if self.n_xi < 1:
            raise ValueError("n_xi must be >= 1")

    @property
    def h_x(self):
        return self.period_a / self.n_x

    @property
    def x(self):
        return -0.5 * self.period_a + np.arange(self.n_x) * self.h_x

    @property
    def h_r(self):
        return self.r_max / self.n_r

    @property
    def rho(self):
        return (np.arange(1, self.n_r + 1) - 0.5) * self.h_r

    @property
    def w_r(self):
        """Radial quadrature weights for the measure rho drho (no angular 2 pi)."""
        return self.rho * self.h_r

    @property
    def xis(self):
        b = np.pi / self.period_a
        return -b + 2.0 * b * np.arange(self.n_xi) / self.n_xi

    @property
    def modes(self):
        """Centered x-mode integers n, kinetic wavenumber 2 pi n / a."""
        return np.arange(-self.n_x // 2, self.n_x // 2)

    def spectral_companion(self):
        """Radial transform data: (k_grid, modes v, scale s, weight w_k).

        Lazily built and cached per grid instance; k_q = sqrt of the m = 0
        radial operator eigenvalues, v the orthonormal radial modes, s the
        mode-to-Hankel scale <J0(k_q .), v_q>, and w_k = 1/s^2 the discrete
        (k dk) quadrature weight.
        """
        cache = _companion_cache.setdefault(self._key(), {})
        if "k" not in cache:
            diag, off = radial_operator_tridiag(self.rho, self.h_r, 0)
            eps, vt = eigh_tridiagonal(diag, off)
            v = vt / np.sqrt(self.w_r)[:, None]
            k = np.sqrt(eps)
            s = self.w_r @ (j0(np.outer(self.rho, k)) * v)
            cache.update(k=k, v=v, s=s, w_k=1.0 / s**2, eps=eps)
        return cache

    def dft_matrix(self):
        """Matrix of e^{-2 pi i n x / a} over (mode, x-sample)."""
        cache = _companion_cache.setdefault(self._key(), {})
        if "E" not in cache:
            cache["E"] = np.exp(
                -2j * np.pi * np.outer(self.modes, self.x) / self.period_a)
        return cache["E"]

    def _key(self):
        return (self.period_a, self.n_x, self.r_max, self.n_r, self.m_max,
                self.n_xi)


_companion_cache: dict = {}


@dataclass
class ScalarField:
    """A rotation-invariant field sampled on a cell grid.

    values[i, j] is the field at (x_i, rho_j).  domain_tag records whether
    the samples tile periodically ("cell-periodic") or live on a finite
    junction box ("supercell", where the x array is carried separately).
    """

    grid: CellGrid
    values: np.ndarray
    domain_tag: str = "cell-periodic"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_x, self.grid.n_r):
            raise ValueError(
                f"field shape {self.values.shape} does not match grid "
                f"({self.grid.n_x}, {self.grid.n_r})")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")

    def cell_integral(self):
        """Integral over the cell with the 2 pi rho transverse measure."""
        g = self.grid
        return float(np.sum(self.values * (2.0 * np.pi * g.w_r)[None, :])
                     * g.h_x)

    def l2_norm(self):
        g = self.grid
        return float(np.sqrt(np.sum(self.values**2
                                    * (2.0 * np.pi * g.w_r)[None, :]) * g.h_x))

    def copy_with(self, values):
        return ScalarField(self.grid, values, self.domain_tag)

    def export_csv(self, path):
        """Long-format CSV with columns x, r, value."""
        g = self.grid
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "r", "value"])
            for i, xv in enumerate(g.x):
                for j, rv in enumerate(g.rho):
                    w.writerow([repr(float(xv)), repr(float(rv)),
                                repr(float(self.values[i, j]))])


@dataclass
class MixedSpectrum:
    """Transform-side coefficients on the x-mode times radial-wavenumber grid."""

    grid: CellGrid
    coeffs: np.ndarray          # complex, (n_x modes, n_k)
    k_grid: np.ndarray

    def hermitian_defect(self):
        """Max |c(-n,k) - conj(c(n,k))|; zero for transforms of real fields."""
        n_half = self.grid.n_x // 2
        c = self.coeffs
        # centered mode order: index i holds mode i - n_half
        defect = 0.0
        for i in range(self.grid.n_x):
            n = i - n_half
            if -n_half <= -n < n_half:
                j = -n + n_half
                defect = max(defect, float(np.max(np.abs(c[j] - np.conj(c[i])))))
        return defect


@dataclass(frozen=True)
class NuclearDensity:
    """Smeared-nucleus specification: one compact bump of charge Z per cell.

    The profile is the standard mollifier in both directions: half-width
    support_radius in x (clipped to fit the cell) and an annular radial bump
    centered at bump_center_r with half-width bump_width.  Radial support
    must stay inside both support_radius and the grid's r_max.
    """

    period_a: float
    charge_z: int
    bump_center_r: float = 0.0
    bump_width: float = 0.4
    support_radius: float = 0.45
    x_halfwidth: float | None = None

    def __post_init__(self):
        if self.charge_z < 1:
            raise ValueError("charge_z must be a positive integer")
        if self.bump_width <= 0:
            raise ValueError("bump_width must be positive")
        if self.bump_center_r < 0:
            raise ValueError("bump_center_r must be >= 0")
        if self.support_radius <= 0:
            raise ValueError("support_radius must be positive")

    @property
    def wx(self):
        if self.x_halfwidth is not None:
            return self.x_halfwidth
        return min(self.support_radius, 0.49 * self.period_a)

    @property
    def radial_support(self):
        return self.bump_center_r + self.bump_width


def build_nuclear_density(spec: NuclearDensity, grid: CellGrid) -> ScalarField:
    """Sample the smeared nuclear density on a cell grid, normalized to Z.

    Normalization uses the grid's own quadrature so the cell integral equals
    charge_z to round-off on this grid.
    """
    if abs(spec.period_a - grid.period_a) > 1e-12:
        raise ValueError("nuclear density and grid disagree on the period")
    if spec.radial_support > spec.support_radius + 1e-12:
        raise ValueError("radial bump exceeds declared support_radius")
    if spec.support_radius >= grid.r_max:
        raise ValueError("nuclear support must sit strictly inside r_max")
    if spec.wx > 0.5 * grid.period_a + 1e-12:
        raise ValueError("nuclear x-support must fit inside one cell")
    vals = nuclear_density_values(spec, grid.x, grid.rho, grid.period_a)
    mass = float(np.sum(vals * (2.0 * np.pi * grid.w_r)[None, :]) * grid.h_x)
    if mass <= 0:
        raise ValueError("nuclear bump has zero mass on this grid "
                         "(unresolved support?)")
    vals *= spec.charge_z / mass
    return ScalarField(grid, vals)


def nuclear_density_values(spec: NuclearDensity, x, rho, period=None):
    """Un-normalized periodic bump values at arbitrary (x, rho) samples."""
    a = spec.period_a if period is None else period
    x = np.asarray(x, dtype=float)
    xr = x - a * np.round(x / a)         # reduce to [-a/2, a/2)
    fx = bump_profile(xr / spec.wx)
    fr = bump_profile((np.asarray(rho, dtype=float) - spec.bump_center_r)
                      / spec.bump_width)
    return fx[:, None] * fr[None, :]


def mixed_fourier_forward(f: ScalarField) -> MixedSpectrum:
    """Discrete mixed transform: x-DFT times radial-eigenmode expansion.

    Coefficients approximate (1/2 pi) int f e^{-i(2 pi n x / a + k.r)} over
    the cell; exact Parseval partner of mixed_fourier_inverse.
    """
    g = f.grid
    comp = g.spectral_companion()
    E = g.dft_matrix()
    gx = (E @ f.values) * g.h_x
    coeffs = (gx * g.w_r[None, :]) @ comp["v"] * comp["s"][None, :]
    return MixedSpectrum(g, coeffs, comp["k"])


def mixed_fourier_inverse(s: MixedSpectrum, grid: CellGrid) -> ScalarField:
    """Inverse of mixed_fourier_forward; exact round trip on the grid."""
    if s.grid._key() != grid._key():
        raise ValueError("spectrum was built on a different grid")
    comp = grid.spectral_companion()
    E = grid.dft_matrix()
    gx = (s.coeffs / comp["s"][None, :]) @ comp["v"].T
    vals = np.real(np.conj(E).T @ gx) / grid.period_a
    return ScalarField(grid, vals)


_SMOOTHSTEP = {
    1: lambda t: t * t * (3.0 - 2.0 * t),
    2: lambda t: t**3 * (10.0 - 15.0 * t + 6.0 * t * t),
    3: lambda t: t**4 * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t**3),
}
_SMOOTHSTEP_D1 = {
    1: lambda t: 6.0 * t * (1.0 - t),
    2: lambda t: 30.0 * t * t * (1.0 - t) ** 2,
    3: lambda t: 140.0 * t**3 * (1.0 - t) ** 3,
}
_SMOOTHSTEP_D2 = {
    1: lambda t: 6.0 - 12.0 * t,
    2: lambda t: 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t),
    3: lambda t: 420.0 * t * t * (1.0 - t) ** 2 * (1.0 - 2.0 * t),
}


@dataclass(frozen=True)
class CutoffProfile:
    """Monotone C^order interpolation from 1 to 0 across a transition window.

    The window defaults to [-a_L/2, a_R/2]; window overrides it (still
    subject to lying inside the default seam interval, which callers check).
    """

    a_left: float
    a_right: float
    order: int = 2
    window: tuple | None = None

    def __post_init__(self):
        if self.order not in _SMOOTHSTEP:
            raise ValueError("supported smoothstep orders: 1 (C1), 2 (C2), 3 (C3)")
        lo, hi = self.span
        if not lo < hi:
            raise ValueError("cutoff window is empty")

    @property
    def span(self):
        if self.window is not None:
            return float(self.window[0]), float(self.window[1])
        return -0.5 * self.a_left, 0.5 * self.a_right

    def _t(self, x):
        lo, hi = self.span
        return np.clip((np.asarray(x, dtype=float) - lo) / (hi - lo), 0.0, 1.0)

    def __call__(self, x):
        return 1.0 - _SMOOTHSTEP[self.order](self._t(x))

    def derivative(self, x):
        lo, hi = self.span
        t = self._t(x)
        inside = (t > 0.0) & (t < 1.0)
        out = np.zeros_like(t)
        out[inside] = -_SMOOTHSTEP_D1[self.order](t[inside]) / (hi - lo)
        return out

    def second_derivative(self, x):
        lo, hi = self.span
        t = self._t(x)
        inside = (t > 0.0) & (t < 1.0)
        out = np.zeros_like(t)
        out[inside] = -_SMOOTHSTEP_D2[self.order](t[inside]) / (hi - lo) ** 2
        return out

    def sq(self, x):
        """chi^2 and its first two x-derivatives, closed form."""
        c = self(x)
        d1 = self.derivative(x)
        d2 = self.second_derivative(x)
        return c * c, 2.0 * c * d1, 2.0 * (d1 * d1 + c * d2)


def cutoff_chi(x, a_left, a_right, order: int = 2, window=None):
    """Cutoff value chi(x): 1 left of the seam, 0 right of it, C^order between."""
    if order < 2:
        raise ValueError("junction cutoffs need order >= 2 (C^2 regularity)")
    return CutoffProfile(a_left, a_right, order, window)(x)
