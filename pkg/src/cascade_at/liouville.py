"""Steady state of the rotating-frame density-matrix equations of motion
for the open cascade at a fixed molecular velocity.

The rotating-wave Hamiltonian (angular units; ordinary-frequency inputs are
multiplied by 2*pi internally) is::

    H = [[0,       Om1/2,   0     ],
         [Om1/2,  -d1,      Om2/2 ],
         [0,       Om2/2,  -(d1+d2)]]

Relaxation: |3> decays at Gamma_3 (fraction b32 into |2>), |2> at Gamma_2
(fraction b21 into |1>); the transit rate w_t removes population from every
level and re-injects into |1> at unit equilibrium.  Coherences decay at the
gamma_ij of :func:`cascade_at.model.rates`, which carry the transit
contribution through the level-|1> removal rate.  Both fields are treated
nonperturbatively.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SingularSystemError, SolverFailure
from .model import C_M_PER_S, DriveParams, LevelScheme, rates

_TWO_PI = 2 * math.pi

# vec(rho) ordering is row-major: [r11, r12, r13, r21, r22, r23, r31, r32, r33]
_I22, _I33 = 4, 8


@dataclass(frozen=True)
class EffectiveDetunings:
    """Velocity-shifted detunings d_i = Delta_i^0 + s_i nu_i v_z / c, MHz."""

    d1: float
    d2: float


@dataclass(frozen=True)
class DensityMatrix:
    """Steady-state 3x3 density matrix (open system: trace may be < 1)."""

    matrix: np.ndarray

    @property
    def rho11(self) -> float:
        return self.matrix[0, 0].real

    @property
    def rho22(self) -> float:
        return self.matrix[1, 1].real

    @property
    def rho33(self) -> float:
        return self.matrix[2, 2].real

    @property
    def rho21(self) -> complex:
        return self.matrix[1, 0]

    @property
    def rho31(self) -> complex:
        return self.matrix[2, 0]

    @property
    def rho32(self) -> complex:
        return self.matrix[2, 1]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def hermiticity_defect(self) -> float:
        d = np.max(np.abs(self.matrix - self.matrix.conj().T))
        return float(d / max(np.max(np.abs(self.matrix)), 1e-300))


def effective_detunings(drive: DriveParams, scheme: LevelScheme, v_z: float) -> EffectiveDetunings:
    """Doppler-shift the rest-frame detunings for axial velocity v_z (m/s)."""
    shift = v_z / C_M_PER_S
    return EffectiveDetunings(
        d1=drive.detuning_1 + drive.dir_1 * scheme.nu_21 * shift,
        d2=drive.detuning_2 + drive.dir_2 * scheme.nu_32 * shift,
    )


def _comm_superoperator(h: np.ndarray) -> np.ndarray:
    """-i[H, .] acting on row-major vec(rho)."""
    eye = np.eye(3)
    return -1j * (np.kron(h, eye) - np.kron(eye, h.T))


@lru_cache(maxsize=256)
def _liouvillian_parts(scheme: LevelScheme, drive: DriveParams):
    """Constant, d1-linear and d2-linear parts of the generator plus the
    transit source vector (all angular units).  Cached: both parameter
    types are frozen dataclasses."""
    rp = rates(scheme)
    w1 = _TWO_PI * drive.rabi_1 / 2
    w2 = _TWO_PI * drive.rabi_2 / 2
    h0 = np.array([[0, w1, 0], [w1, 0, w2], [0, w2, 0]], dtype=complex)
    hd1 = _TWO_PI * np.diag([0.0, -1.0, -1.0]).astype(complex)
    hd2 = _TWO_PI * np.diag([0.0, 0.0, -1.0]).astype(complex)

    relax = np.zeros((9, 9), dtype=complex)
    g2, g3, wt = _TWO_PI * rp.Gamma_2, _TWO_PI * rp.Gamma_3, _TWO_PI * scheme.transit_rate
    idx = lambda i, j: 3 * i + j
    relax[idx(0, 0), idx(1, 1)] += scheme.branch_2_to_1 * g2
    relax[idx(1, 1), idx(1, 1)] += -g2 - wt
    relax[idx(1, 1), idx(2, 2)] += scheme.branch_3_to_2 * g3
    relax[idx(2, 2), idx(2, 2)] += -g3 - wt
    relax[idx(0, 0), idx(0, 0)] += -wt
    for i, j, g in ((0, 1, rp.gamma_12), (1, 0, rp.gamma_12),
                    (0, 2, rp.gamma_13), (2, 0, rp.gamma_13),
                    (1, 2, rp.gamma_23), (2, 1, rp.gamma_23)):
        relax[idx(i, j), idx(i, j)] += -_TWO_PI * g

    source = np.zeros(9, dtype=complex)
    source[idx(0, 0)] = wt
    a0 = _comm_superoperator(h0) + relax
    return a0, _comm_superoperator(hd1), _comm_superoperator(hd2), source


def steady_state_batch(scheme: LevelScheme, drive: DriveParams,
                       d1: np.ndarray, d2: np.ndarray) -> np.ndarray:
    """Vectorized steady state over arrays of effective detunings (MHz).

    Returns an (N, 9) complex array of vec(rho); the data-parallel path used
    by the Doppler averaging engines.
    """
    if scheme.transit_rate <= 0:
        raise SingularSystemError("steady state needs transit_rate > 0")
    d1 = np.atleast_1d(np.asarray(d1, dtype=float))
    d2 = np.atleast_1d(np.asarray(d2, dtype=float))
    a0, ad1, ad2, source = _liouvillian_parts(scheme, drive)
    a = (a0[None, :, :]
         + d1[:, None, None] * ad1[None, :, :]
         + d2[:, None, None] * ad2[None, :, :])
    rhs = np.broadcast_to(-source, (len(d1), 9))[..., None]
    try:
        v = np.linalg.solve(a, rhs)[..., 0]
    except np.linalg.LinAlgError as exc:
        conds = [float(np.linalg.cond(a[k])) for k in range(min(len(d1), 4))]
        raise SolverFailure(f"steady-state solve failed: {exc}",
                            condition_number=max(conds)) from exc
    if not np.all(np.isfinite(v)):
        raise SolverFailure("steady-state solve produced non-finite entries")
    return v


def steady_state(scheme: LevelScheme, drive: DriveParams,
                 det: EffectiveDetunings) -> DensityMatrix:
    """Unique steady state of the open cascade at fixed effective detunings."""
    v = steady_state_batch(scheme, drive, np.array([det.d1]), np.array([det.d2]))[0]
    return DensityMatrix(matrix=v.reshape(3, 3))


def populations_batch(scheme: LevelScheme, drive: DriveParams,
                      d1: np.ndarray, d2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(rho22, rho33) arrays for the Doppler engines."""
    v = steady_state_batch(scheme, drive, d1, d2)
    return v[:, _I22].real, v[:, _I33].real


def fluorescence_rates(rho: DensityMatrix, scheme: LevelScheme) -> tuple[float, float]:
    """Side-fluorescence rates (I2_raw, I3_raw) = (Gamma_2 rho22, Gamma_3 rho33).

    Detection-channel branching is an overall constant and is dropped.
    """
    rp = rates(scheme)
    return rp.Gamma_2 * rho.rho22, rp.Gamma_3 * rho.rho33
