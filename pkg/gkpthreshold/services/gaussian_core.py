"""
Gaussian core - exact error-matrix evolution through symplectic maps, cluster
noise injection and the GKP correction map.

All maps act on error matrices in (q..., p...) ordering:

    single_mode_step   η ↦ S_j η S_jᵀ + diag(0, ε),   S_j = F·P(m) = [[-m, -1], [1, 0]]
    two_mode_step      η ↦ F̄ η F̄ᵀ + diag(0, 0, ε, ε)
    cz_inject          η ↦ C_Z[-1] η C_Z[-1]ᵀ + diag(0, 0, ε, ε)
    correct_map        η ↦ Π_p η Π_p + δ·I
"""

from functools import lru_cache

import numpy as np
import sympy as sp

from gkpthreshold.core.exceptions import require
from gkpthreshold.models.covariance import (
    NoiseModel,
    SymbolicCovariance,
    SymplecticMap,
    symplectic_form,
)

__all__ = [
    "symplectic_form",
    "shear",
    "fourier",
    "shear_step_map",
    "controlled_z",
    "p_noise",
    "single_mode_step",
    "two_mode_step",
    "cz_inject",
    "correct_map",
    "instantiate",
]


def shear(m) -> SymplecticMap:
    """P(m): p ↦ p + m q."""
    return SymplecticMap(sp.ImmutableMatrix([[1, 0], [m, 1]]))


@lru_cache(maxsize=None)
def fourier(modes: int = 1) -> SymplecticMap:
    """Fourier transform on every mode: q ↦ -p, p ↦ q."""
    n = modes
    block = sp.BlockMatrix([[sp.zeros(n, n), -sp.eye(n)], [sp.eye(n), sp.zeros(n, n)]])
    return SymplecticMap(sp.ImmutableMatrix(block.as_explicit()))


def shear_step_map(m) -> SymplecticMap:
    """S_j = F·P(m_j), applied after measuring p + m_j q."""
    return fourier(1) @ shear(m)


@lru_cache(maxsize=None)
def controlled_z(weight: int = -1) -> SymplecticMap:
    """C_Z[w]: p₁ ↦ p₁ + w q₂, p₂ ↦ p₂ + w q₁.

    The two-rail cluster implements weight -1; the encoded gate is the same for either sign.
    """
    require(weight in (-1, 1), "controlled-Z weight must be +1 or -1", weight=weight)
    w = weight
    return SymplecticMap(
        sp.ImmutableMatrix(
            [
                [1, 0, 0, 0],
                [0, 1, 0, 0],
                [0, w, 1, 0],
                [w, 0, 0, 1],
            ]
        )
    )


@lru_cache(maxsize=None)
def p_noise(modes: int) -> SymbolicCovariance:
    """Cluster noise of variance ε on every p quadrature."""
    z = sp.zeros(2 * modes, 2 * modes)
    e = sp.diag(*([0] * modes + [1] * modes))
    return SymbolicCovariance(z, e)


def _p_projector(modes: int) -> sp.ImmutableMatrix:
    return sp.ImmutableMatrix(sp.diag(*([0] * modes + [1] * modes)))


def single_mode_step(eta: SymbolicCovariance, m) -> SymbolicCovariance:
    """Teleport one node along the single-mode cluster after measuring p + m q."""
    require(eta.dim == 2, "single_mode_step needs a 2x2 error matrix", dim=eta.dim)
    return eta.conjugate(shear_step_map(m)) + p_noise(1)


def two_mode_step(eta: SymbolicCovariance) -> SymbolicCovariance:
    """Teleport both rails one node after p measurements on each."""
    require(eta.dim == 4, "two_mode_step needs a 4x4 error matrix", dim=eta.dim)
    return eta.conjugate(fourier(2)) + p_noise(2)


def cz_inject(eta: SymbolicCovariance, weight: int = -1) -> SymbolicCovariance:
    """The vertical link of the two-rail cluster, measured out and averaged over outcomes."""
    require(eta.dim == 4, "cz_inject needs a 4x4 error matrix", dim=eta.dim)
    return eta.conjugate(controlled_z(weight)) + p_noise(2)


def correct_map(eta: SymbolicCovariance) -> SymbolicCovariance:
    """GKP correction with pure ancillas of variance δ.

    q noise is replaced by fresh, uncorrelated noise δ; every p quadrature gains δ.
    """
    require(eta.dim in (2, 4), "correct_map needs a 2x2 or 4x4 error matrix", dim=eta.dim)
    ident = sp.eye(eta.dim)
    corrected = eta.sandwich(_p_projector(eta.modes))
    return corrected + SymbolicCovariance(ident, sp.zeros(eta.dim, eta.dim))


def instantiate(eta: SymbolicCovariance, noise: NoiseModel) -> np.ndarray:
    """Numeric error matrix at the given δ, ε."""
    return eta.at(noise)
