"""Spectral densities of the exciton environment and derived quantities.

Analytic backend (Gaussian lateral confinement):
    J(w)     = J0 exp(-x) for x = (w - w0)/xi >= 0, else 0
    Phi(w)   = J0 exp(-x) Ei(x)
    Jres(w)  = xi exp(+x) / (Ei(x)^2 + pi^2) for x > 0, else 0
    K(tau)   = G0^2 exp(-i (w0 - wc) tau) / (1 + i xi tau)

Numeric backend: tabulated J samples on a frequency grid; Phi by
principal-value quadrature with singularity subtraction, Jres by
composing J and Phi, K by oscillatory quadrature.

All frequencies are stored as hbar*omega in meV; J carries units of
meV^2 (hbar^2 * angular-frequency^2 per unit hbar-frequency) so that
the sum rule integral of J over hbar*omega equals (hbar*G0)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from .units import HBAR_MEV_PS, MaterialParams
from .profiles import GaussianProfile, TabulatedProfile, collective_coupling

EULER_GAMMA = 0.5772156649015328606


def _expi_series(x):
    # convergent everywhere; numerically safe for x > 0 (positive terms)
    # and for moderately small negative x
    total = EULER_GAMMA + math.log(abs(x))
    term = 1.0
    for n in range(1, 200):
        term *= x / n
        contrib = term / n
        total += contrib
        if abs(contrib) < 1e-17 * max(1.0, abs(total)):
            break
    return total


def _e1_continued_fraction(y):
    # E1(y) for y > 0 by the modified Lentz algorithm
    tiny = 1e-300
    b = y + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 200):
        a = -i * i
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-y)


def _expi_asymptotic(x):
    # Ei(x) ~ e^x/x * sum n!/x^n, truncated at the smallest term
    s = 1.0
    term = 1.0
    for n in range(1, 60):
        nxt = term * n / x
        if abs(nxt) >= abs(term):
            break
        term = nxt
        s += term
    return math.exp(x) * s / x


def _expi_scalar(x):
    if x == 0.0:
        raise ValueError("Ei is singular at 0")
    if x > 700.0:
        return math.inf
    if x < -6.0:
        return -_e1_continued_fraction(-x)
    if x <= 40.0:
        return _expi_series(x)
    return _expi_asymptotic(x)


def expi(x):
    """Exponential integral Ei(x) for real x (scalar or array)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return _expi_scalar(float(arr))
    out = np.empty(arr.shape)
    flat = arr.ravel()
    outflat = out.ravel()
    for i, v in enumerate(flat):
        outflat[i] = _expi_scalar(v)
    return out


@dataclass(frozen=True)
class SpectralModel:
    """Exciton spectral density model.

    backend is "analytic-gaussian" or "numeric".  For the numeric
    backend, omega_grid_mev / j_samples hold tabulated J with the same
    conventions; hbar_g0_mev and hbar_xi_mev are derived from the
    samples (sum rule and mean excess frequency).
    """

    backend: str
    hbar_omega0_mev: float
    hbar_xi_mev: float
    hbar_g0_mev: float
    omega_grid_mev: np.ndarray | None = None
    j_samples: np.ndarray | None = None
    _interp: object = field(default=None, repr=False, compare=False)

    @property
    def j0(self):
        """Peak value J0 = G0^2 / xi (units meV)."""
        return self.hbar_g0_mev**2 / self.hbar_xi_mev

    @staticmethod
    def analytic_gaussian(hbar_omega0_mev, hbar_xi_mev, hbar_g0_mev):
        if hbar_xi_mev <= 0 or hbar_g0_mev < 0:
            raise ValueError("xi must be positive and G0 non-negative")
        return SpectralModel("analytic-gaussian", hbar_omega0_mev,
                             hbar_xi_mev, hbar_g0_mev)

    @staticmethod
    def from_profile(profile: GaussianProfile, material: MaterialParams,
                     omega_c_mev):
        """Analytic model with G0, xi, Omega0 from the closed forms."""
        cs = collective_coupling(profile, material, omega_c_mev)
        return SpectralModel.analytic_gaussian(
            material.exciton_energy_mev, cs.hbar_xi_mev, cs.hbar_g0_mev)

    @staticmethod
    def from_samples(omega_grid_mev, j_samples, hbar_omega0_mev):
        """Numeric model from tabulated J(omega) samples."""
        w = np.asarray(omega_grid_mev, dtype=float)
        j = np.asarray(j_samples, dtype=float)
        if w.ndim != 1 or j.shape != w.shape or w.size < 8:
            raise ValueError("need matching 1D grids with >= 8 points")
        if np.any(np.diff(w) <= 0):
            raise ValueError("omega grid must be strictly increasing")
        if np.any(j < 0):
            raise ValueError("J samples must be non-negative")
        g0_sq = np.trapezoid(j, w)
        mean_excess = np.trapezoid(j * (w - hbar_omega0_mev), w) / g0_sq
        interp = PchipInterpolator(w, j, extrapolate=False)
        return SpectralModel(
            "numeric", hbar_omega0_mev, float(mean_excess),
            math.sqrt(g0_sq), w, j, interp)

    @staticmethod
    def from_tabulated_profile(profile: TabulatedProfile,
                               material: MaterialParams, omega_c_mev,
                               n_bins=400, pad_factor=4):
        """Numeric model by momentum-space binning of |g_k|^2.

        The profile is Fourier transformed on a zero-padded grid; the
        coupling weight |g_k|^2 is histogrammed over the exciton
        dispersion w_k = w0 + hbar k^2 / 2M.
        """
        from .units import E0, EPS0, M0_MEV_PS2_PER_NM2

        profile.validate_sampling(material)
        h = profile.spacing_nm
        n = pad_factor * profile.x_nm.size
        ft = np.fft.fft2(profile.values, s=(n, n)) * h * h
        k = 2.0 * math.pi * np.fft.fftfreq(n, d=h)
        KX, KY = np.meshgrid(k, k, indexing="ij")
        k2 = KX**2 + KY**2
        # |hbar g_k|^2 * S, with the quantization area cancelled against
        # the k-space measure S d^2k / (2 pi)^2
        weight = ((E0**2 / EPS0) * HBAR_MEV_PS**2
                  / (math.pi * M0_MEV_PS2_PER_NM2**2 * omega_c_mev
                     * material.bohr_radius_nm**2)) * np.abs(ft) ** 2
        measure = (k[1] - k[0]) ** 2 / (2.0 * math.pi) ** 2
        w0 = material.exciton_energy_mev
        e_k = HBAR_MEV_PS**2 * k2 / (2.0 * material.mass_mev_ps2_per_nm2)
        e_max = np.quantile(e_k[weight > 1e-12 * weight.max()], 0.999)
        edges = np.linspace(0.0, e_max, n_bins + 1)
        hist, _ = np.histogram(e_k.ravel(), bins=edges,
                               weights=(weight * measure).ravel())
        centers = 0.5 * (edges[1:] + edges[:-1])
        j = hist / np.diff(edges)
        return SpectralModel.from_samples(w0 + centers, j, w0)


def j_exciton(model: SpectralModel, omega_mev):
    """Spectral density J at hbar*omega (meV in, meV out)."""
    w = np.asarray(omega_mev, dtype=float)
    if model.backend == "analytic-gaussian":
        x = (w - model.hbar_omega0_mev) / model.hbar_xi_mev
        out = np.where(x >= 0.0, model.j0 * np.exp(-np.clip(x, 0, 700)), 0.0)
        return out if out.ndim else float(out)
    lo, hi = model.omega_grid_mev[0], model.omega_grid_mev[-1]
    if np.any(w < model.hbar_omega0_mev):
        below = w < model.hbar_omega0_mev
    else:
        below = np.zeros(w.shape, dtype=bool)
    if np.any((w > hi) | ((w < lo) & ~below)):
        raise ValueError("frequency outside the tabulated grid")
    out = model._interp(np.clip(w, lo, hi))
    out = np.where(below, 0.0, out)
    out = np.nan_to_num(out, nan=0.0)
    return out if out.ndim else float(out)


def phi_transform(model: SpectralModel, omega_mev):
    """Principal-value transform Phi(omega) in meV.

    Phi(w) = PV int J(z) / (w - z) dz.  Analytic backend uses the
    closed form J0 exp(-x) Ei(x); numeric backend uses singularity
    subtraction plus the analytic log end-point term.
    """
    w = np.asarray(omega_mev, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    if model.backend == "analytic-gaussian":
        x = (w - model.hbar_omega0_mev) / model.hbar_xi_mev
        out = np.array([model.j0 * math.exp(-min(xi, 700.0)) * _expi_scalar(xi)
                        if xi != 0.0 else -math.inf for xi in x])
    else:
        out = np.array([_phi_numeric(model, float(wi)) for wi in w])
    return float(out[0]) if scalar else out


def _phi_numeric(model: SpectralModel, w):
    grid = model.omega_grid_mev
    j = model.j_samples
    a, b = grid[0], grid[-1]
    if w <= a or w >= b:
        # no singularity inside the support
        integrand = j / (w - grid)
        return float(np.trapezoid(integrand, grid))
    jw = float(model._interp(w))
    # subtracted part is regular at z = w; fill the removable singularity
    # with the negative slope of J
    z = grid
    with np.errstate(divide="ignore", invalid="ignore"):
        sub = (j - jw) / (w - z)
    slope = float(model._interp.derivative()(w))
    sub = np.where(np.abs(w - z) < 1e-12 * (b - a), -slope, sub)
    pv = float(np.trapezoid(sub, z))
    return pv + jw * math.log(abs((w - a) / (b - w)))


def phi_quadrature(model: SpectralModel, omega_mev, rel_tol=1e-10):
    """Phi by adaptive Cauchy-weight quadrature (Ei-free oracle path).

    Evaluates PV int J(z)/(w - z) dz with scipy's Cauchy-weighted rule;
    independent of the exponential-integral implementation.
    """
    w = float(omega_mev)
    w0 = model.hbar_omega0_mev
    cutoff = w0 + 80.0 * model.hbar_xi_mev

    def j_of(z):
        return j_exciton(model, z)

    if w0 < w < cutoff:
        val, _ = quad(j_of, w0, cutoff, weight="cauchy", wvar=w,
                      epsrel=rel_tol, limit=400)
        return -val
    val, _ = quad(lambda z: j_of(z) / (w - z), w0, cutoff,
                  epsrel=rel_tol, limit=400)
    return val


def j_residual(model: SpectralModel, omega_mev):
    """Residual spectral density J_res(omega) in meV.

    Analytic backend: xi exp(x) / (Ei(x)^2 + pi^2) on the support x > 0.
    Numeric backend composes J and Phi through
    J_res = G0^2 J / (Phi^2 + pi^2 J^2).
    """
    w = np.asarray(omega_mev, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    if model.backend == "analytic-gaussian":
        x = (w - model.hbar_omega0_mev) / model.hbar_xi_mev
        out = np.zeros(w.shape)
        pos = x > 0
        xs = x[pos]
        ei = expi(xs) if xs.size else np.empty(0)
        # exp(x)/(Ei^2+pi^2) -> overflow-safe form for large x where
        # Ei ~ e^x/x: the ratio tends to x^2 e^{-x}
        vals = np.empty(xs.shape)
        small = xs < 600.0
        vals[small] = np.exp(xs[small]) / (ei[small] ** 2 + math.pi**2)
        vals[~small] = xs[~small] ** 2 * np.exp(-xs[~small])
        out[pos] = model.hbar_xi_mev * vals
    else:
        jj = np.atleast_1d(j_exciton(model, w))
        phi = np.atleast_1d(phi_transform(model, w))
        out = np.zeros(w.shape)
        nz = jj > 0
        denom = phi[nz] ** 2 + math.pi**2 * jj[nz] ** 2
        out[nz] = model.hbar_g0_mev**2 * jj[nz] / denom
    return float(out[0]) if scalar else out


def upper_polariton(omega_c_mev, omega_rc_mev, hbar_g0_mev):
    """Upper polariton frequency (meV):
    w+ = [wc + W0 + sqrt(4 G0^2 + (wc - W0)^2)] / 2."""
    if hbar_g0_mev < 0:
        raise ValueError("G0 must be non-negative")
    return 0.5 * (omega_c_mev + omega_rc_mev
                  + math.sqrt(4.0 * hbar_g0_mev**2
                              + (omega_c_mev - omega_rc_mev) ** 2))


@dataclass(frozen=True)
class ResidualRate:
    """Markovian residual decay rate hbar*Gamma_res at the upper polariton."""

    hbar_gamma_res_mev: float
    hbar_omega_plus_mev: float
    backend: str


def residual_rate(model: SpectralModel, omega_c_mev) -> ResidualRate:
    """Gamma_res = 2 pi J_res(w+) with w+ from the polariton splitting."""
    omega_rc = model.hbar_omega0_mev + model.hbar_xi_mev
    w_plus = upper_polariton(omega_c_mev, omega_rc, model.hbar_g0_mev)
    rate = 2.0 * math.pi * j_residual(model, w_plus)
    return ResidualRate(float(rate), w_plus, model.backend)


def memory_kernel(model: SpectralModel, omega_c_mev, tau_ps):
    """Memory kernel K(tau) in meV^2 (i.e. (hbar x rate)^2 units).

    K(tau) = int J(w) exp(-i (w - wc) tau) dw over hbar-frequency, with
    the phase evaluated using angular frequencies (w - wc)/hbar.
    Analytic backend: G0^2 exp(-i (w0 - wc) tau / hbar) / (1 + i xi tau / hbar).
    """
    tau = np.asarray(tau_ps, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be non-negative")
    if model.backend == "analytic-gaussian":
        phase = np.exp(-1j * (model.hbar_omega0_mev - omega_c_mev)
                       * tau / HBAR_MEV_PS)
        out = (model.hbar_g0_mev**2 * phase
               / (1.0 + 1j * model.hbar_xi_mev * tau / HBAR_MEV_PS))
        return out if out.ndim else complex(out)
    grid = model.omega_grid_mev
    j = model.j_samples
    out = np.array([_filon_kernel(grid, j, (grid - omega_c_mev) / HBAR_MEV_PS, t)
                    for t in np.atleast_1d(tau)])
    return out if np.ndim(tau_ps) else complex(out[0])


def _filon_kernel(grid, j, omega_rel, t):
    """Oscillatory quadrature of J exp(-i w t) by piecewise-linear Filon."""
    if t == 0.0:
        return complex(np.trapezoid(j, grid))
    # integrate J(w) e^{-i w t} with J linear on each interval
    w = omega_rel
    dw = np.diff(w)
    f0, f1 = j[:-1], j[1:]
    a = -1j * t
    e0 = np.exp(a * w[:-1])
    x = a * dw
    # int_0^1 (f0 + (f1-f0) s) e^{x s} ds * dw, stable for small |x|
    small = np.abs(x) < 1e-6
    with np.errstate(divide="ignore", invalid="ignore"):
        i0 = (np.exp(x) - 1.0) / x
        i1 = (np.exp(x) * (x - 1.0) + 1.0) / x**2
    i0 = np.where(small, 1.0 + x / 2.0 + x**2 / 6.0, i0)
    i1 = np.where(small, 0.5 + x / 3.0 + x**2 / 8.0, i1)
    seg = dw * e0 * (f0 * i0 + (f1 - f0) * i1)
    return complex(seg.sum())
