"""Weak-probe perturbative lineshapes at fixed velocity.

For a weak probe the cascade populations reduce to rational functions of
the effective detunings through the complex denominator

    D = (gamma_12 + i d1)(gamma_13 + i (d1 + d2)) + (Omega_2 / 2)^2

whose roots control both the Autler-Townes doublet and the analytic
velocity average in :mod:`cascade_at.doppler`.  The overall prefactors
``K_RHO33`` / ``K_RHO22`` only set the absolute scale; they were fixed once
by least-squares matching the full steady-state solver on the case-a
parameter set at v_z = 0 with a probe at Gamma_2/20, then frozen (see
tests).  Everything quantitative downstream uses peak-normalized spectra.

The perturbative rho22 omits the cascade repopulation feeding |2> from |3>
decay; the weak-probe agreement tests bound that omission.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRootError
from .liouville import EffectiveDetunings
from .model import DopplerParams, DriveParams, LevelScheme, most_probable_speed, rates
from .model import C_M_PER_S

# frozen scale factors (dimensionless); see module docstring
K_RHO33 = 1.1957333777107713
K_RHO22 = 1.195583630615565


@dataclass(frozen=True)
class CascadeDenominator:
    """Quadratic coefficients of D in the dimensionless velocity u = v_z/v_p."""

    a: complex
    b: complex
    c: complex

    def value(self, u):
        return (self.a * u + self.b) * u + self.c

    def roots(self) -> tuple[complex, complex]:
        """Roots by the numerically stable quadratic formula."""
        a, b, c = self.a, self.b, self.c
        sq = np.sqrt(b * b - 4 * a * c)
        # pick the sign that avoids cancellation in b + sq
        if (b.conjugate() * sq).real >= 0:
            q = -(b + sq) / 2
        else:
            q = -(b - sq) / 2
        if q == 0:  # b == 0 and degenerate c or a
            z1 = sq / (2 * a)
            return z1, -z1
        return q / a, c / q


def _denominator_value(rp, drive: DriveParams, det: EffectiveDetunings) -> complex:
    d2ph = det.d1 + det.d2
    return ((rp.gamma_12 + 1j * det.d1) * (rp.gamma_13 + 1j * d2ph)
            + (drive.rabi_2 / 2) ** 2)


def rho33_weak_probe(scheme: LevelScheme, drive: DriveParams,
                     det: EffectiveDetunings) -> float:
    """Upper-level population to lowest order in the probe:
    ``K * (Om1 Om2 / 4)^2 / |D|^2``.  Caller contract: Om1 <= Gamma_2."""
    rp = rates(scheme)
    d = _denominator_value(rp, drive, det)
    num = (drive.rabi_1 * drive.rabi_2 / 4) ** 2
    return K_RHO33 * num / abs(d) ** 2


def rho22_weak_probe(scheme: LevelScheme, drive: DriveParams,
                     det: EffectiveDetunings) -> float:
    """Intermediate-level population to lowest order in the probe:
    ``K' * (Om1/2)^2 |gamma_13 + i(d1+d2)|^2 / |D|^2``.  The numerator
    vanishes at two-photon resonance as gamma_13 -> 0 (the interference
    null behind the transparency dip)."""
    rp = rates(scheme)
    d = _denominator_value(rp, drive, det)
    d2ph = det.d1 + det.d2
    num = (drive.rabi_1 / 2) ** 2 * (rp.gamma_13 ** 2 + d2ph ** 2)
    return K_RHO22 * num / abs(d) ** 2


def doppler_slopes(scheme: LevelScheme, drive: DriveParams,
                   dopp: DopplerParams) -> tuple[float, float]:
    """(alpha, beta): Doppler shifts of d1 and d2 in MHz per unit u = v_z/v_p."""
    v_p = most_probable_speed(scheme, dopp)
    alpha = drive.dir_1 * scheme.nu_21 * v_p / C_M_PER_S
    beta = drive.dir_2 * scheme.nu_32 * v_p / C_M_PER_S
    return alpha, beta


def denominator_coefficients(scheme: LevelScheme, drive: DriveParams,
                             dopp: DopplerParams,
                             delta1: float | None = None) -> CascadeDenominator:
    """Quadratic coefficients (a, b, c) of D in u = v_z/v_p.

    ``delta1`` overrides ``drive.detuning_1`` (the spectrum scan variable).
    Degenerate if a = 0, which happens only for a zero wavenumber or zero
    Doppler width.
    """
    rp = rates(scheme)
    alpha, beta = doppler_slopes(scheme, drive, dopp)
    d1 = drive.detuning_1 if delta1 is None else delta1
    d12 = d1 + drive.detuning_2
    a = -(alpha * (alpha + beta))
    if a == 0:
        raise DegenerateRootError(
            "denominator is not quadratic in u (zero wavenumber or zero Doppler width)")
    b = 1j * alpha * (rp.gamma_13 + 1j * d12) + 1j * (alpha + beta) * (rp.gamma_12 + 1j * d1)
    c = (rp.gamma_12 + 1j * d1) * (rp.gamma_13 + 1j * d12) + (drive.rabi_2 / 2) ** 2
    return CascadeDenominator(a=complex(a), b=complex(b), c=complex(c))


# vectorized forms used by the Doppler averaging engines

def rho_weak_batch(scheme: LevelScheme, drive: DriveParams,
                   d1: np.ndarray, d2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(rho22, rho33) weak-probe values over arrays of effective detunings."""
    rp = rates(scheme)
    d2ph = d1 + d2
    den = np.abs((rp.gamma_12 + 1j * d1) * (rp.gamma_13 + 1j * d2ph)
                 + (drive.rabi_2 / 2) ** 2) ** 2
    r33 = K_RHO33 * (drive.rabi_1 * drive.rabi_2 / 4) ** 2 / den
    r22 = K_RHO22 * (drive.rabi_1 / 2) ** 2 * (rp.gamma_13 ** 2 + d2ph ** 2) / den
    return r22, r33
