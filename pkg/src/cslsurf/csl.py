"""Collapse-noise dephasing and heating rates of rigid homogeneous bodies.

All rates share the coupling prefactor

    c = 2 pi lambda sigma^2 rho^2 / m_N^2        [1 / (s m^4)]

with lambda the collapse rate, sigma the localization length, rho the
material density and m_N the nucleon mass.  Positional dephasing is the
quadratic form of the displacement with c * S (S the translational
surface tensor); angular dephasing uses c times the axial rotational
strength.  Heating rates carry an explicit hbar^2 so that all three are
in watts and the sphere ratio Gamma_cm / Gamma_total = 3 (sigma/R)^4
comes out exactly.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDimension, SingularInertia, ValidityWarning
from .tensors import clamp_psd, principal_axes

#: quadratic (momentum-diffusion) regime is quantitative for |delta| << sigma;
#: warn above this fraction
DELTA_VALIDITY_FRACTION = 0.3


@dataclass(frozen=True)
class CslParams:
    """Universal collapse parameters and physical constants (SI).

    Defaults are the conventional collapse rate 1e-16 1/s and
    localization length 1e-7 m, with CODATA values for the atomic mass
    unit and hbar.
    """

    collapse_rate: float = 1e-16          # 1/s
    localization_length: float = 1e-7     # m
    nucleon_mass: float = 1.66053906660e-27  # kg
    hbar: float = 1.054571817e-34         # J s

    def __post_init__(self):
        for name in ("collapse_rate", "localization_length", "nucleon_mass", "hbar"):
            if not (getattr(self, name) > 0.0):
                raise DegenerateDimension(f"{name} must be positive")


def dephasing_prefactor(density, params: CslParams) -> float:
    """c = 2 pi lambda sigma^2 rho^2 / m_N^2, in 1/(s m^4)."""
    if not (density > 0.0):
        raise DegenerateDimension(f"density must be positive, got {density}")
    lam = params.collapse_rate
    sig = params.localization_length
    return 2.0 * math.pi * lam * sig**2 * density**2 / params.nucleon_mass**2


@dataclass
class DephasingMatrix:
    """Positional dephasing quadratic-form matrix, units 1/(s m^2)."""

    matrix: np.ndarray
    params: CslParams

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)


def dephasing_matrix(surface_tensor, density, params: CslParams) -> DephasingMatrix:
    """Dephasing matrix c * S from the translational surface tensor S."""
    c = dephasing_prefactor(density, params)
    return DephasingMatrix(clamp_psd(c * np.asarray(surface_tensor, dtype=float)), params)


def superposition_dephasing_rate(dephasing: DephasingMatrix, delta) -> float:
    """Decay rate (1/s) of a superposition displaced by ``delta`` (m).

    rate = delta . Lambda . delta.  Quantitative in the small-displacement
    regime; a :class:`ValidityWarning` is emitted when |delta| exceeds
    0.3 sigma (the quadratic form keeps growing where the true rate
    saturates).
    """
    d = np.asarray(delta, dtype=float)
    sep = float(np.linalg.norm(d))
    sigma = dephasing.params.localization_length
    if sep > DELTA_VALIDITY_FRACTION * sigma:
        warnings.warn(
            f"|delta| = {sep:.3g} m exceeds {DELTA_VALIDITY_FRACTION} sigma; "
            "quadratic dephasing rate overestimates the saturated rate",
            ValidityWarning,
            stacklevel=2,
        )
    return float(d @ dephasing.matrix @ d)


def angular_dephasing_coefficient(axial_strength, density, params: CslParams) -> float:
    """Angular dephasing coefficient c * (axial rotational strength).

    The dephasing rate of an angular superposition d_phi about the same
    axis is coefficient * d_phi^2; units 1/(s rad^2).
    """
    if axial_strength < 0.0:
        raise ValueError(f"axial strength must be >= 0, got {axial_strength}")
    return dephasing_prefactor(density, params) * float(axial_strength)


def com_heating_rate(total_area, mass, density, params: CslParams) -> float:
    """Center-of-mass heating power (W): hbar^2 c A / M.

    Equivalently hbar^2 (2 pi lambda sigma^2 rho / m_N^2) (A / V); the
    two forms agree identically since M = rho V.  A is the full boundary
    area including cavity walls.
    """
    if not (mass > 0.0):
        raise DegenerateDimension(f"mass must be positive, got {mass}")
    c = dephasing_prefactor(density, params)
    return params.hbar**2 * c * float(total_area) / mass


def total_heating_rate(mass, params: CslParams) -> float:
    """Total heating power over all constituents: 3 hbar^2 lambda M / (2 m_N^2 sigma^2)."""
    if not (mass > 0.0):
        raise DegenerateDimension(f"mass must be positive, got {mass}")
    lam = params.collapse_rate
    sig = params.localization_length
    return 1.5 * params.hbar**2 * lam * mass / (params.nucleon_mass**2 * sig**2)


def rotational_heating_rate(rotational_tensor, inertia, density, params: CslParams) -> float:
    """Rotational heating power (W): hbar^2 c Tr(I^-1 S_rot).

    ``inertia`` is the mass-weighted tensor about the centroid — normally
    the standard inertia tensor; callers may pass the second-moment
    tensor instead to follow the alternative bookkeeping convention.
    """
    inertia = np.asarray(inertia, dtype=float)
    vals = np.linalg.eigvalsh(0.5 * (inertia + inertia.T))
    if vals.min() <= 1e-12 * max(vals.max(), 0.0) or vals.min() <= 0.0:
        raise SingularInertia(f"inertia tensor is singular: eigenvalues {vals}")
    c = dephasing_prefactor(density, params)
    s_rot = np.asarray(rotational_tensor, dtype=float)
    return params.hbar**2 * c * float(np.trace(np.linalg.solve(inertia, s_rot)))


@dataclass
class RateReport:
    """Bundle of all rates for one body and parameter set."""

    dephasing: DephasingMatrix                 # 1/(s m^2)
    angular_coefficients: np.ndarray           # (3,) 1/(s rad^2), per principal axis
    angular_axes: np.ndarray                   # (3, 3) eigenvector columns
    com_heating: float                         # W
    total_heating: float                       # W
    rotational_heating: float                  # W
    com_fraction: float                        # Gamma_cm / Gamma_total

    def __post_init__(self):
        self.angular_coefficients = np.asarray(self.angular_coefficients, dtype=float)
        self.angular_axes = np.asarray(self.angular_axes, dtype=float)


def rate_report(surface_tensor, rotational_tensor, mass_props, density,
                params: CslParams, inertia_convention="standard") -> RateReport:
    """Assemble every rate from the two surface tensors and bulk properties.

    ``inertia_convention`` selects the tensor entering the rotational
    heating: ``"standard"`` uses the inertia tensor, ``"second_moment"``
    the mass-weighted second moment (the alternative reading of the
    rotational formula).
    """
    if inertia_convention == "standard":
        inert = mass_props.inertia
    elif inertia_convention == "second_moment":
        inert = mass_props.second_moment
    else:
        raise ValueError(f"unknown inertia convention {inertia_convention!r}")
    dm = dephasing_matrix(surface_tensor, density, params)
    c = dephasing_prefactor(density, params)
    s_rot = clamp_psd(np.asarray(rotational_tensor, dtype=float))
    vals, vecs = principal_axes(s_rot)
    gamma_cm = com_heating_rate(mass_props.area, mass_props.mass, density, params)
    gamma_tot = total_heating_rate(mass_props.mass, params)
    gamma_rot = rotational_heating_rate(s_rot, inert, density, params)
    return RateReport(
        dephasing=dm,
        angular_coefficients=c * vals,
        angular_axes=vecs,
        com_heating=gamma_cm,
        total_heating=gamma_tot,
        rotational_heating=gamma_rot,
        com_fraction=gamma_cm / gamma_tot,
    )
