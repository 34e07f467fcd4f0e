"""
Magic-state distillation - photon counting modulo 4 on a noisy GKP Hadamard eigenstate.

The counting projectors Π_a (n ≡ a mod 4) have closed-form Wigner functions made of
a constant, an oscillating part in r² and a point mass at the origin. After a
Gaussian blur of variance τ² the point mass becomes π·G_τ²(r). The noisy state is
the Hadamard-eigenstate lattice (spacing √π/2, weights λ_j) under a Gaussian envelope,
so every overlap reduces to a lattice sum:

    A[·|±] = Σ G_env(r_ts) λ_j(t, s)
    A[a|±] = 2π Σ G_env(r_ts) W_Πa(r_ts; τ²) λ_j(t, s)

from which P[a|±] = A[a|±] / A[·|±], the misidentification probability ε and the
success probability P[even] follow.
"""

import logging
import math
from typing import NamedTuple, Tuple

import numpy as np

from gkpthreshold.core.config import settings
from gkpthreshold.core.exceptions import ContractViolation, NumericalFailure, require
from gkpthreshold.models.records import BlurredWigner, DistillationConfig, DistillationResult

logger = logging.getLogger(__name__)

LATTICE_SPACING = math.sqrt(math.pi) / 2.0

# signs of (δ-term, sin r², cos r²) inside W_Πa = (1/8π)[1 ± πδ² ± 2 sin r² ± 2 cos r²]
_PI_SIGNS = {
    0: (1, 1, 1),
    1: (-1, 1, -1),
    2: (1, -1, -1),
    3: (-1, -1, 1),
}


class LatticeSums(NamedTuple):
    a_norm: float
    a0: float
    a2: float
    truncation: int


# Special functions

def laguerre(n: int, x):
    """Laguerre polynomial L_n(x) by the three-term recurrence

    (k+1) L_{k+1} = (2k + 1 - x) L_k - k L_{k-1}
    """
    require(n >= 0, "Laguerre order must be non-negative", n=n)
    x = np.asarray(x, dtype=float)
    lnm1 = np.ones_like(x)
    if n == 0:
        return lnm1 if lnm1.ndim else float(lnm1)
    ln = 1.0 - x
    for k in range(1, n):
        ln, lnm1 = ((2 * k + 1 - x) * ln - k * lnm1) / (k + 1), ln
    return ln if ln.ndim else float(ln)


def gaussian(r2, variance: float):
    """Normalised isotropic 2-D Gaussian G_v evaluated at squared radius r2."""
    r2 = np.asarray(r2, dtype=float)
    out = np.exp(-r2 / (2.0 * variance)) / (2.0 * math.pi * variance)
    return out if out.ndim else float(out)


def wigner_number(n: int, r):
    """Wigner function of |n⟩⟨n|: (1/π)(-1)ⁿ L_n(2r²) e^{-r²}."""
    require(n >= 0, "photon number must be non-negative", n=n)
    r2 = np.asarray(r, dtype=float) ** 2
    out = (-1) ** n * laguerre(n, 2.0 * r2) * np.exp(-r2) / math.pi
    return out if np.ndim(out) else float(out)


def wigner_phi(b: int, r) -> Tuple[complex, float]:
    """Limit Wigner function of Φ_b = Σ_n i^{bn}|n⟩⟨n| as (smooth part, δ²(r) coefficient)."""
    require(b in (0, 1, 2, 3), "b must be in Z_4", b=b)
    r2 = float(r) ** 2
    if b == 0:
        return 1.0 / (2.0 * math.pi) + 0j, 0.0
    if b == 1:
        return (1 - 1j) * np.exp(1j * r2) / (2.0 * math.pi), 0.0
    if b == 2:
        return 0j, 0.5
    return (1 + 1j) * np.exp(-1j * r2) / (2.0 * math.pi), 0.0


def wigner_pi(a: int, r) -> BlurredWigner:
    """Unblurred W_Πa as (smooth part, ±π), the second entry being the δ²(r) weight inside the bracket."""
    require(a in _PI_SIGNS, "a must be in Z_4", a=a)
    d, s, c = _PI_SIGNS[a]
    r2 = float(r) ** 2
    smooth = (1.0 + 2.0 * s * math.sin(r2) + 2.0 * c * math.cos(r2)) / (8.0 * math.pi)
    return BlurredWigner(smooth=smooth, delta_weight=d * math.pi)


def _oscillation(r2, tau2: float):
    """Blurred 2 sin r² + 2 cos r² (closed form of its convolution with G_τ²)."""
    denom = 4.0 * tau2**2 + 1.0
    u = r2 / denom
    damp = 2.0 * np.exp(-2.0 * r2 * tau2 / denom) / denom
    return damp * ((1.0 - 2.0 * tau2) * np.sin(u) + (1.0 + 2.0 * tau2) * np.cos(u))


def wigner_pi_blurred(a: int, r, tau2: float) -> BlurredWigner:
    """W_Πa * G_τ² for even a, split as (smooth part, π·G_τ²(r))."""
    if a not in (0, 2):
        raise ContractViolation("only even photon-count classes are evaluated", {"a": a})
    require(tau2 > 0.0, "blur variance must be positive", tau2=tau2)
    r2 = float(r) ** 2
    sign = 1.0 if a == 0 else -1.0
    smooth = (1.0 + sign * float(_oscillation(r2, tau2))) / (8.0 * math.pi)
    return BlurredWigner(smooth=smooth, delta_weight=math.pi * gaussian(r2, tau2))


def hadamard_indicator(j: int, t: int, s: int) -> float:
    """Weight λ_j(t, s) of the Hadamard-eigenstate Wigner lattice at (√π t/2, √π s/2)."""
    t_even, s_even = t % 2 == 0, s % 2 == 0
    if t_even and s_even:
        return 1.0
    if not t_even and not s_even:
        return 0.0
    half = t // 2 if t_even else s // 2
    return (-1.0) ** (j + half) / math.sqrt(2.0)


def _indicator_grid(j: int, t: np.ndarray, s: np.ndarray) -> np.ndarray:
    t_even = t % 2 == 0
    s_even = s % 2 == 0
    half = np.where(t_even, t // 2, s // 2)
    mixed = np.where((j + half) % 2 == 0, 1.0, -1.0) / math.sqrt(2.0)
    return np.where(t_even & s_even, 1.0, np.where(t_even ^ s_even, mixed, 0.0))


# Lattice sums

def required_truncation(envelope_variance: float) -> int:
    """Smallest S with (π S²/4) / (2·envelope_variance) ≥ TAIL_EXPONENT."""
    return max(1, math.ceil(math.sqrt(8.0 * settings.TAIL_EXPONENT * envelope_variance / math.pi)))


def _resolve_truncation(cfg: DistillationConfig) -> int:
    needed = required_truncation(cfg.envelope_variance)
    if cfg.truncation is None:
        return needed
    if cfg.truncation < needed:
        logger.warning(
            "truncation %d leaves envelope tail above e^-%g; enlarging to %d",
            cfg.truncation, settings.TAIL_EXPONENT, needed,
        )
        return needed
    return cfg.truncation


def _shell_sum(terms: np.ndarray, shells: np.ndarray) -> float:
    # compensated sum in order of increasing |s| + |t|
    order = np.argsort(shells, kind="stable")
    return math.fsum(terms[order].tolist())


def lattice_sums(cfg: DistillationConfig, j: int) -> LatticeSums:
    """A[·|±], A[0|±], A[2|±] for j = 0 (+) or j = 1 (-)."""
    require(j in (0, 1), "j selects the Hadamard eigenstate and must be 0 or 1", j=j)
    smax = _resolve_truncation(cfg)
    idx = np.arange(-smax, smax + 1)
    t, s = np.meshgrid(idx, idx, indexing="ij")
    t, s = t.ravel(), s.ravel()
    lam = _indicator_grid(j, t, s)
    keep = lam != 0.0
    t, s, lam = t[keep], s[keep], lam[keep]

    r2 = LATTICE_SPACING**2 * (t.astype(float) ** 2 + s.astype(float) ** 2)
    shells = np.abs(t) + np.abs(s)
    envelope = gaussian(r2, cfg.envelope_variance)
    weighted = envelope * lam

    osc = _oscillation(r2, cfg.blur_variance)
    point_mass = math.pi * gaussian(r2, cfg.blur_variance) / (8.0 * math.pi)
    w0 = (1.0 + osc) / (8.0 * math.pi) + point_mass
    w2 = (1.0 - osc) / (8.0 * math.pi) + point_mass

    a_norm = _shell_sum(weighted, shells)
    a0 = 2.0 * math.pi * _shell_sum(weighted * w0, shells)
    a2 = 2.0 * math.pi * _shell_sum(weighted * w2, shells)
    return LatticeSums(a_norm=a_norm, a0=a0, a2=a2, truncation=smax)


def distill_stats(cfg: DistillationConfig) -> DistillationResult:
    """Outcome probabilities, the error ε given an even count, and P[even]."""
    a_norm, a_even, probs = {}, {}, {}
    truncation = 0
    for j, sign in ((0, "+"), (1, "-")):
        sums = lattice_sums(cfg, j)
        if not sums.a_norm > 0.0:
            raise NumericalFailure(
                "normalisation sum is not positive",
                {"sign": sign, "a_norm": sums.a_norm, "sigma2": cfg.sigma2},
            )
        truncation = sums.truncation
        a_norm[sign] = sums.a_norm
        a_even[sign] = {0: sums.a0, 2: sums.a2}
        probs[sign] = {0: sums.a0 / sums.a_norm, 2: sums.a2 / sums.a_norm}

    even_total = probs["+"][0] + probs["+"][2] + probs["-"][0] + probs["-"][2]
    # rounding can push either ratio a few ulps past 1 when one class dominates
    epsilon = min(max((probs["+"][2] + probs["-"][0]) / even_total, 0.0), 1.0)
    p_even = min(max(0.5 * even_total, 0.0), 1.0)

    result = DistillationResult(
        sigma2=cfg.sigma2,
        blur_variance=cfg.blur_variance,
        envelope_variance=cfg.envelope_variance,
        truncation=truncation,
        a_norm=a_norm,
        a_even=a_even,
        p_even_given=probs,
        epsilon=epsilon,
        p_even=p_even,
    )
    logger.info(
        "distill sigma2=%g product=%.3g -> epsilon=%.4f P[even]=%.4f",
        cfg.sigma2, result.product, epsilon, p_even,
    )
    return result
