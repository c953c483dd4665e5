"""Resonator field profiles on the 2D sheet and derived coupling quantities.

Two profile representations are supported: an analytic separable Gaussian
and a tabulated uniform grid of the in-plane field amplitude projected on
the momentum matrix element.  Both yield the collective coupling G0, the
reaction-coordinate frequency Omega0, the Kerr shift W0' and the cutoff
frequency xi.  The quantization area cancels in every exported quantity
and is never exposed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .units import E0, EPS0, HBAR_MEV_PS, M0_MEV_PS2_PER_NM2, MaterialParams


class SamplingError(ValueError):
    """Grid too coarse for the requested operation."""


@dataclass(frozen=True)
class GaussianProfile:
    """Separable Gaussian field profile.

    In-plane distribution F(r) = exp(-r^2/(2 L^2)) / sqrt(pi L^2),
    normalized so that the out-of-plane length L_z alone carries the
    field-strength meaning.  rho = |n.p_cv| / |p_cv| is the polarization
    projection ratio; eta_n in [1/2, 1] is the polarization factor of
    the exciton-exciton interaction.
    """

    L_nm: float
    L_z_nm: float
    rho: float = 1.0
    eta_n: float = 1.0

    def __post_init__(self):
        if self.L_nm <= 0:
            raise ValueError("L must be positive")
        if self.L_z_nm <= 0:
            raise ValueError("L_z must be positive")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        if not 0.5 <= self.eta_n <= 1.0:
            raise ValueError("eta_n must lie in [1/2, 1]")

    def amplitude(self, x_nm, y_nm, pcv):
        """Sampled F_c . p_cv on the sheet (units: momentum / nm)."""
        r2 = np.asarray(x_nm) ** 2 + np.asarray(y_nm) ** 2
        norm = pcv * self.rho / math.sqrt(math.pi * self.L_nm**2 * self.L_z_nm)
        return norm * np.exp(-r2 / (2.0 * self.L_nm**2))

    def xi_mev(self, material: MaterialParams):
        """Cutoff energy hbar*xi = hbar^2 / (2 M L^2)."""
        return HBAR_MEV_PS**2 / (2.0 * material.mass_mev_ps2_per_nm2
                                 * self.L_nm**2)


@dataclass(frozen=True)
class TabulatedProfile:
    """Uniform-grid samples of the projected in-plane field amplitude.

    values[i, j] is (F_c . p_cv)(x[i], y[j]); vector fields must be
    reduced to this scalar at ingestion.  The grid must extend far enough
    that the boundary amplitude is below 1e-4 of the peak, and be fine
    enough to resolve both the lateral extent and the Bohr radius.
    """

    x_nm: np.ndarray
    y_nm: np.ndarray
    values: np.ndarray
    L_z_nm: float
    eta_n: float = 1.0

    def __post_init__(self):
        x = np.asarray(self.x_nm, dtype=float)
        y = np.asarray(self.y_nm, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "x_nm", x)
        object.__setattr__(self, "y_nm", y)
        object.__setattr__(self, "values", v)
        if x.ndim != 1 or y.ndim != 1 or v.shape != (x.size, y.size):
            raise ValueError("values must have shape (len(x), len(y))")
        if x.size < 4 or y.size < 4:
            raise ValueError("grid too small")
        hx = np.diff(x)
        hy = np.diff(y)
        if not (np.allclose(hx, hx[0], rtol=1e-9)
                and np.allclose(hy, hy[0], rtol=1e-9)
                and abs(hx[0] - hy[0]) < 1e-9 * hx[0]):
            raise ValueError("grid must be uniform with equal x/y spacing")
        if self.L_z_nm <= 0:
            raise ValueError("L_z must be positive")
        if not 0.5 <= self.eta_n <= 1.0:
            raise ValueError("eta_n must lie in [1/2, 1]")
        peak = np.abs(v).max()
        if peak == 0:
            raise ValueError("profile is identically zero")
        edge = max(np.abs(v[0, :]).max(), np.abs(v[-1, :]).max(),
                   np.abs(v[:, 0]).max(), np.abs(v[:, -1]).max())
        if edge > 1e-4 * peak:
            raise ValueError(
                "boundary amplitude exceeds 1e-4 of the peak; enlarge grid")

    @property
    def spacing_nm(self):
        return float(self.x_nm[1] - self.x_nm[0])

    def rms_extent_nm(self):
        """RMS lateral extent of |amplitude|^2 (estimate of L)."""
        w = np.abs(self.values) ** 2
        X, Y = np.meshgrid(self.x_nm, self.y_nm, indexing="ij")
        total = w.sum()
        x0 = (w * X).sum() / total
        y0 = (w * Y).sum() / total
        var = (w * ((X - x0) ** 2 + (Y - y0) ** 2)).sum() / total
        return math.sqrt(var / 2.0)

    def validate_sampling(self, material: MaterialParams):
        limit = min(material.bohr_radius_nm, self.rms_extent_nm()) / 8.0
        if self.spacing_nm > limit:
            raise SamplingError(
                "grid spacing %.3g nm exceeds min(a_B, L)/8 = %.3g nm"
                % (self.spacing_nm, limit))


def gaussian_tabulated(profile: GaussianProfile, material: MaterialParams,
                       extent_factor=6.0, points=257):
    """Sample a GaussianProfile on a uniform grid (testing/crosscheck aid)."""
    half = extent_factor * profile.L_nm
    x = np.linspace(-half, half, points)
    X, Y = np.meshgrid(x, x, indexing="ij")
    vals = profile.amplitude(X, Y, material.pcv_mev_ps_per_nm)
    return TabulatedProfile(x_nm=x, y_nm=x, values=vals,
                            L_z_nm=profile.L_z_nm, eta_n=profile.eta_n)


@dataclass(frozen=True)
class CouplingSummary:
    """Derived coupling quantities, all as hbar*X in meV except L_z."""

    hbar_g0_mev: float
    hbar_omega0_rc_mev: float
    L_z_nm: float
    hbar_w0p_mev: float
    hbar_xi_mev: float
    hbar_g0_max_mev: float


def upper_bound_g0(material: MaterialParams, omega_c_mev: float,
                   L_z_nm: float):
    """Upper bound hbar*G0_max in meV for given out-of-plane confinement.

    G0_max^2 = e0^2 |p_cv|^2 / (hbar pi eps0 m0^2 omega_c a_B^2 L_z);
    attained when the field polarization is aligned with p_cv.
    """
    if omega_c_mev <= 0 or L_z_nm <= 0:
        raise ValueError("omega_c and L_z must be positive")
    g2 = ((E0**2 / EPS0) * material.pcv_mev_ps_per_nm**2 * HBAR_MEV_PS**2
          / (math.pi * M0_MEV_PS2_PER_NM2**2 * omega_c_mev
             * material.bohr_radius_nm**2 * L_z_nm))
    return math.sqrt(g2)


def _grid_integrals(profile: TabulatedProfile):
    """Trapezoid integrals of |F.p|^2 and |F.p|^4 over the grid."""
    w2 = np.abs(profile.values) ** 2
    h = profile.spacing_nm
    i2 = np.trapezoid(np.trapezoid(w2, dx=h, axis=1), dx=h)
    i4 = np.trapezoid(np.trapezoid(w2**2, dx=h, axis=1), dx=h)
    return float(i2), float(i4)


def coupling_gk(profile: TabulatedProfile, k_per_nm, material: MaterialParams,
                omega_c_mev: float):
    """Momentum-space coupling hbar*g_k in meV (complex).

    Computed as the 2D Fourier integral of the projected field amplitude
    by the trapezoid rule; the quantization area is fixed to the grid
    area internally (it cancels in all exported quantities).
    """
    if omega_c_mev <= 0:
        raise ValueError("omega_c must be positive")
    kx, ky = float(k_per_nm[0]), float(k_per_nm[1])
    h = profile.spacing_nm
    k_nyq = math.pi / h
    if abs(kx) > k_nyq or abs(ky) > k_nyq:
        raise SamplingError(
            "requested |k| exceeds the grid Nyquist limit %.3g 1/nm" % k_nyq)
    X, Y = np.meshgrid(profile.x_nm, profile.y_nm, indexing="ij")
    phase = np.exp(-1j * (kx * X + ky * Y))
    integral = np.trapezoid(
        np.trapezoid(phase * profile.values, dx=h, axis=1), dx=h)
    area = ((profile.x_nm[-1] - profile.x_nm[0])
            * (profile.y_nm[-1] - profile.y_nm[0]))
    prefactor = -(E0 / M0_MEV_PS2_PER_NM2) * math.sqrt(
        HBAR_MEV_PS**2
        / (math.pi * EPS0 * omega_c_mev * material.bohr_radius_nm**2 * area))
    return prefactor * integral


def collective_coupling(profile, material: MaterialParams,
                        omega_c_mev: float) -> CouplingSummary:
    """Collective coupling summary for a Gaussian or tabulated profile.

    For the Gaussian profile the closed forms are used: G0 depends on
    L_z and rho but not on L; Omega0 = omega0 + xi; hbar*W0' =
    alpha E_b a_B^2 eta_n / (2 pi L^2).  For tabulated profiles the
    area integrals are evaluated by the trapezoid rule and Omega0 is the
    J-weighted mean frequency.
    """
    if omega_c_mev <= 0:
        raise ValueError("omega_c must be positive")
    bound = upper_bound_g0(material, omega_c_mev, profile.L_z_nm)

    if isinstance(profile, GaussianProfile):
        hbar_g0 = bound * profile.rho
        hbar_xi = profile.xi_mev(material)
        hbar_omega0_rc = material.exciton_energy_mev + hbar_xi
        hbar_w0p = kerr_shift(profile, material)
        return CouplingSummary(hbar_g0, hbar_omega0_rc, profile.L_z_nm,
                               hbar_w0p, hbar_xi, bound)

    profile.validate_sampling(material)
    i2, _ = _grid_integrals(profile)
    # hbar^2 G0^2 = e0^2 hbar^2 /(pi eps0 m0^2 (hbar w_c) a_B^2) * integral
    g2 = ((E0**2 / EPS0) * HBAR_MEV_PS**2 * i2
          / (math.pi * M0_MEV_PS2_PER_NM2**2 * omega_c_mev
             * material.bohr_radius_nm**2))
    hbar_g0 = math.sqrt(g2)
    # J-weighted mean frequency: <w> = w0 + <hbar k^2/2M> over |FT|^2
    hbar_xi = _mean_kinetic_energy(profile, material)
    hbar_omega0_rc = material.exciton_energy_mev + hbar_xi
    hbar_w0p = kerr_shift(profile, material)
    return CouplingSummary(hbar_g0, hbar_omega0_rc, profile.L_z_nm,
                           hbar_w0p, hbar_xi, bound)


def _mean_kinetic_energy(profile: TabulatedProfile, material: MaterialParams):
    """<hbar^2 k^2 / 2M> weighted by |FT of the amplitude|^2.

    By Parseval this equals hbar^2/(2M) * int |grad F|^2 / int |F|^2,
    evaluated on the momentum grid of the zero-padded FFT.
    """
    h = profile.spacing_nm
    n = 4 * profile.x_nm.size
    ft = np.fft.fft2(profile.values, s=(n, n))
    k = 2.0 * math.pi * np.fft.fftfreq(n, d=h)
    KX, KY = np.meshgrid(k, k, indexing="ij")
    w = np.abs(ft) ** 2
    k2_mean = (w * (KX**2 + KY**2)).sum() / w.sum()
    return HBAR_MEV_PS**2 * k2_mean / (2.0 * material.mass_mev_ps2_per_nm2)


def kerr_shift(profile, material: MaterialParams):
    """Effective Kerr shift hbar*W0' of the exciton reaction coordinate (meV).

    General form: S*W000 * eta_n * [int |F.p|^2]^-2 * int |F.p|^4 with
    hbar*S*W000 = alpha E_b a_B^2.  Gaussian closed form:
    hbar*W0' = alpha E_b a_B^2 eta_n / (2 pi L^2).
    """
    sw000 = material.interaction_product_mev_nm2
    if isinstance(profile, GaussianProfile):
        if profile.L_nm < 5.0 * material.bohr_radius_nm:
            warnings.warn(
                "L = %.3g nm is not large compared to a_B = %.3g nm; the "
                "momentum-independent interaction approximation degrades"
                % (profile.L_nm, material.bohr_radius_nm))
        return sw000 * profile.eta_n / (2.0 * math.pi * profile.L_nm**2)
    i2, i4 = _grid_integrals(profile)
    if i2 == 0.0:
        raise ValueError("degenerate profile: zero field intensity")
    return sw000 * profile.eta_n * i4 / i2**2


def load_tabulated_csv(path, L_z_nm, eta_n=1.0):
    """Read a tabulated profile from CSV with header x_nm,y_nm,re,im.

    Rows must enumerate a uniform grid row-major in y then x.
    """
    data = np.genfromtxt(path, delimiter=",", names=True)
    expected = ("x_nm", "y_nm", "re", "im")
    if data.dtype.names != expected:
        raise ValueError(
            "CSV header must be exactly %s" % ",".join(expected))
    x = np.unique(data["x_nm"])
    y = np.unique(data["y_nm"])
    if x.size * y.size != data.size:
        raise ValueError("rows do not form a complete rectangular grid")
    vals = (data["re"] + 1j * data["im"]).reshape(x.size, y.size)
    return TabulatedProfile(x_nm=x, y_nm=y, values=vals,
                            L_z_nm=L_z_nm, eta_n=eta_n)
