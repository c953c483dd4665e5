"""Unit conventions, physical constants and material parameter records.

Internal unit system: energy in meV, time in ps, length in nm, charge in
units of the elementary charge.  hbar is kept explicit (not set to 1) so
that literature values quoted in meV can be entered verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace


# hbar in meV*ps (CODATA, exact to the digits shown)
HBAR_MEV_PS = 0.6582119569
# Boltzmann constant in meV/K (exact in SI, converted)
KB_MEV_PER_K = 0.08617333262
# free electron mass in meV*ps^2/nm^2
M0_MEV_PS2_PER_NM2 = 9.1093837015e-31 / 1.602176634e-28
# Coulomb constant times e^2: e0^2/(4 pi eps0) in meV*nm
COULOMB_E2_MEV_NM = 7.2973525693e-3 * 197326.98045
# vacuum permittivity in e0^2/(meV*nm)
EPS0 = 1.0 / (4.0 * math.pi * COULOMB_E2_MEV_NM)
# elementary charge in internal charge units
E0 = 1.0


@dataclass(frozen=True)
class UnitSystem:
    """Fixed meV / ps / nm unit system with explicit constants."""

    energy_unit: str = "meV"
    time_unit: str = "ps"
    length_unit: str = "nm"
    hbar: float = HBAR_MEV_PS
    kb: float = KB_MEV_PER_K
    e0: float = E0
    m0: float = M0_MEV_PS2_PER_NM2
    eps0: float = EPS0

    def energy_to_angular_frequency(self, energy_mev):
        """meV -> 1/ps."""
        return energy_mev / self.hbar

    def angular_frequency_to_energy(self, omega_per_ps):
        """1/ps -> meV."""
        return omega_per_ps * self.hbar


UNITS = UnitSystem()


class Dimension:
    """Exponent vector over (energy, time, length, charge).

    Minimal symbolic dimension tracker used by the dimensional-analysis
    tests; supports multiplication, division and integer powers.
    """

    __slots__ = ("exps",)

    def __init__(self, energy=0, time=0, length=0, charge=0):
        self.exps = (energy, time, length, charge)

    def __mul__(self, other):
        return Dimension(*(a + b for a, b in zip(self.exps, other.exps)))

    def __truediv__(self, other):
        return Dimension(*(a - b for a, b in zip(self.exps, other.exps)))

    def __pow__(self, n):
        return Dimension(*(a * n for a in self.exps))

    def __eq__(self, other):
        return isinstance(other, Dimension) and self.exps == other.exps

    def __repr__(self):
        names = ("meV", "ps", "nm", "e0")
        parts = [f"{n}^{e}" for n, e in zip(names, self.exps) if e != 0]
        return " ".join(parts) if parts else "dimensionless"


# dimensions of the constants above
DIM_ENERGY = Dimension(energy=1)
DIM_TIME = Dimension(time=1)
DIM_LENGTH = Dimension(length=1)
DIM_CHARGE = Dimension(charge=1)
DIM_HBAR = Dimension(energy=1, time=1)
DIM_MASS = Dimension(energy=1, time=2, length=-2)
DIM_EPS0 = Dimension(charge=2, energy=-1, length=-1)
DIM_MOMENTUM = Dimension(energy=1, time=1, length=-1)
DIM_ANGULAR_FREQUENCY = Dimension(time=-1)


def bose_occupation(energy_mev, T_kelvin):
    """Bose-Einstein occupation n(E, T); returns 0 at T = 0."""
    if T_kelvin <= 0.0:
        return 0.0
    x = energy_mev / (KB_MEV_PER_K * T_kelvin)
    if x > 500.0:
        return 0.0
    return 1.0 / math.expm1(x)


@dataclass(frozen=True)
class LinewidthModel:
    """Temperature model for exciton decay and dephasing rates (meV).

    gamma_x(T)  = gx0 + gx_slope * T
    gamma_xp(T) = gxp_slope * T + gxp_activated * n_B(phonon_energy, T)

    Phenomenological linear-plus-activated phonon form; all coefficients
    are user-facing configuration, not first-principles values.
    """

    kind: str = "linear-plus-activated"
    gx0_mev: float = 0.5
    gx_slope_mev_per_K: float = 0.005
    gxp_slope_mev_per_K: float = 0.01
    gxp_activated_mev: float = 2.2
    phonon_energy_mev: float = 30.0

    def __post_init__(self):
        if self.kind not in ("constant", "linear-plus-activated"):
            raise ValueError(f"unknown linewidth model kind: {self.kind!r}")
        for name in ("gx0_mev", "gx_slope_mev_per_K", "gxp_slope_mev_per_K",
                     "gxp_activated_mev"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.phonon_energy_mev <= 0:
            raise ValueError("phonon_energy_mev must be positive")


def linewidths_at(model: LinewidthModel, T_kelvin: float):
    """Return (gamma_x, gamma_x') in meV at temperature T.

    The sum gamma_x + gamma_x' is the total intrinsic exciton linewidth
    used downstream by the master-equation module.
    """
    if T_kelvin < 0:
        raise ValueError("temperature must be non-negative")
    if model.kind == "constant":
        return model.gx0_mev, 0.0
    gx = model.gx0_mev + model.gx_slope_mev_per_K * T_kelvin
    gxp = (model.gxp_slope_mev_per_K * T_kelvin
           + model.gxp_activated_mev
           * bose_occupation(model.phonon_energy_mev, T_kelvin))
    return gx, gxp


@dataclass(frozen=True)
class MaterialParams:
    """2D-semiconductor exciton parameters in internal units.

    mass_total is the exciton mass M = m_e + m_h in units of the free
    electron mass.  pcv is the magnitude of the Bloch momentum matrix
    element in meV*ps/nm.  alpha is the dimensionless exciton-exciton
    interaction constant; the product alpha * E_b * a_B^2 sets the
    zero-momentum interaction matrix element.
    """

    mass_ratio: float
    bohr_radius_nm: float
    binding_energy_mev: float
    exciton_energy_mev: float
    pcv_mev_ps_per_nm: float
    alpha: float
    eps_eff: float = 1.0
    linewidths: LinewidthModel = field(default_factory=LinewidthModel)
    interaction_check_mev_nm2: float | None = None

    def __post_init__(self):
        if self.mass_ratio <= 0:
            raise ValueError("mass_ratio must be positive")
        if self.bohr_radius_nm <= 0:
            raise ValueError("bohr_radius_nm must be positive")
        if self.binding_energy_mev <= 0:
            raise ValueError("binding_energy_mev must be positive")
        if self.exciton_energy_mev <= 0:
            raise ValueError("exciton_energy_mev must be positive")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.eps_eff < 1:
            raise ValueError("eps_eff must be >= 1")
        if self.interaction_check_mev_nm2 is not None:
            got = self.interaction_product_mev_nm2
            want = self.interaction_check_mev_nm2
            if abs(got - want) > 0.01 * want:
                raise ValueError(
                    "alpha * E_b * a_B^2 = %.6g meV nm^2 deviates more than"
                    " 1%% from the configured check value %.6g" % (got, want))

    @property
    def mass_mev_ps2_per_nm2(self):
        return self.mass_ratio * M0_MEV_PS2_PER_NM2

    @property
    def interaction_product_mev_nm2(self):
        """alpha * E_b * a_B^2, the areal exciton interaction strength."""
        return self.alpha * self.binding_energy_mev * self.bohr_radius_nm**2

    def linewidths_at(self, T_kelvin):
        return linewidths_at(self.linewidths, T_kelvin)


# WS2 constants: alpha from the exciton-interaction literature; the
# remaining values (mass, exciton energy, Bohr radius, dielectric
# constant, linewidth coefficients) are companion-paper/literature
# sourced defaults, not outputs of this package.
WS2_ALPHA = 2.07
WS2_INTERACTION_MEV_NM2 = 2040.0


def _ws2_pcv(exciton_energy_mev, bohr_radius_nm,
             target_hbar_g0_mev=22.0, L_z_nm=150.0, rho=0.5):
    """Momentum matrix element calibrated to a reference coupling.

    Inverts (hbar*G0)^2 = (e0^2/eps0) * pcv^2 * rho^2 * hbar^2
                          / (pi * m0^2 * hbar*omega_c * a_B^2 * L_z)
    so that the default material reproduces a 22 meV collective coupling
    at L_z = 150 nm with projection ratio 0.5.  Corresponds to a Kane
    energy 2*pcv^2/m0 of roughly 8 eV, a reasonable TMD value.
    """
    c = (E0**2 / EPS0) * HBAR_MEV_PS**2 / (math.pi * M0_MEV_PS2_PER_NM2**2)
    pcv2 = (target_hbar_g0_mev**2 * exciton_energy_mev
            * bohr_radius_nm**2 * L_z_nm) / (c * rho**2)
    return math.sqrt(pcv2)


def ws2_defaults(bohr_radius_nm=None, binding_energy_mev=None, **overrides):
    """WS2 material record with the interaction product held fixed.

    If only one of (bohr_radius_nm, binding_energy_mev) is overridden the
    other is recomputed so that alpha * E_b * a_B^2 stays at the WS2
    value of 2040 meV nm^2.  Pinning both disables the propagation (the
    consistency check then applies as usual).
    """
    alpha = overrides.pop("alpha", WS2_ALPHA)
    if bohr_radius_nm is None and binding_energy_mev is None:
        bohr_radius_nm = 1.8
        binding_energy_mev = WS2_INTERACTION_MEV_NM2 / (alpha * bohr_radius_nm**2)
    elif binding_energy_mev is None:
        binding_energy_mev = WS2_INTERACTION_MEV_NM2 / (alpha * bohr_radius_nm**2)
    elif bohr_radius_nm is None:
        bohr_radius_nm = math.sqrt(
            WS2_INTERACTION_MEV_NM2 / (alpha * binding_energy_mev))

    exciton_energy_mev = overrides.pop("exciton_energy_mev", 2000.0)
    pcv = overrides.pop(
        "pcv_mev_ps_per_nm",
        _ws2_pcv(exciton_energy_mev, bohr_radius_nm))
    return MaterialParams(
        mass_ratio=overrides.pop("mass_ratio", 0.64),
        bohr_radius_nm=bohr_radius_nm,
        binding_energy_mev=binding_energy_mev,
        exciton_energy_mev=exciton_energy_mev,
        pcv_mev_ps_per_nm=pcv,
        alpha=alpha,
        eps_eff=overrides.pop("eps_eff", 1.0),
        linewidths=overrides.pop("linewidths", LinewidthModel()),
        interaction_check_mev_nm2=overrides.pop(
            "interaction_check_mev_nm2", WS2_INTERACTION_MEV_NM2),
        **overrides,
    )


_MATERIAL_KEYS = (
    "mass_ratio", "bohr_radius_nm", "binding_energy_mev",
    "exciton_energy_mev", "pcv_mev_ps_per_nm", "alpha", "eps_eff",
    "gx0_mev", "gx_slope_mev_per_K", "gxp_slope_mev_per_K",
    "gxp_activated_mev", "phonon_energy_mev",
)


def load_material(path):
    """Read a flat key = value material file into MaterialParams.

    Keys must match the documented set exactly; unknown keys are
    rejected with the offending line number.
    """
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _MATERIAL_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = float(val.strip())
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: value for {key!r} is not a number")
    missing = [k for k in _MATERIAL_KEYS if k not in values]
    if missing:
        raise ValueError(f"{path}: missing keys: {', '.join(missing)}")
    lw = LinewidthModel(
        gx0_mev=values["gx0_mev"],
        gx_slope_mev_per_K=values["gx_slope_mev_per_K"],
        gxp_slope_mev_per_K=values["gxp_slope_mev_per_K"],
        gxp_activated_mev=values["gxp_activated_mev"],
        phonon_energy_mev=values["phonon_energy_mev"],
    )
    return MaterialParams(
        mass_ratio=values["mass_ratio"],
        bohr_radius_nm=values["bohr_radius_nm"],
        binding_energy_mev=values["binding_energy_mev"],
        exciton_energy_mev=values["exciton_energy_mev"],
        pcv_mev_ps_per_nm=values["pcv_mev_ps_per_nm"],
        alpha=values["alpha"],
        eps_eff=values["eps_eff"],
        linewidths=lw,
    )


def save_material(material: MaterialParams, path):
    """Write a MaterialParams record in the flat key = value format."""
    lw = material.linewidths
    pairs = [
        ("mass_ratio", material.mass_ratio),
        ("bohr_radius_nm", material.bohr_radius_nm),
        ("binding_energy_mev", material.binding_energy_mev),
        ("exciton_energy_mev", material.exciton_energy_mev),
        ("pcv_mev_ps_per_nm", material.pcv_mev_ps_per_nm),
        ("alpha", material.alpha),
        ("eps_eff", material.eps_eff),
        ("gx0_mev", lw.gx0_mev),
        ("gx_slope_mev_per_K", lw.gx_slope_mev_per_K),
        ("gxp_slope_mev_per_K", lw.gxp_slope_mev_per_K),
        ("gxp_activated_mev", lw.gxp_activated_mev),
        ("phonon_energy_mev", lw.phonon_energy_mev),
    ]
    with open(path, "w") as fh:
        for key, val in pairs:
            fh.write("%s = %.12g\n" % (key, val))


def with_linewidths(material: MaterialParams, linewidths: LinewidthModel):
    return replace(material, linewidths=linewidths)
