"""
Shift Monte Carlo - an independent check on the analytic error model.

Each sample is an explicit Gaussian shift vector pushed through a gate's schedule:
cluster noise is drawn per teleportation step, and at every correction an ancilla
error is drawn, the shift is measured modulo √π and undone. A correction that lands
on the wrong lattice cell is a logical error.

Reproducibility: the run is split into fixed-size chunks, and chunk i draws from
its own PCG64 stream seeded by ``SeedSequence(seed).spawn(n_chunks)[i]``. Normals
come from numpy's ziggurat sampler. Chunk results are reduced in chunk order, so a
given (seed, config, chunk_size) reproduces bit-for-bit.
"""

import logging
import math
from typing import Dict, Optional, Tuple

import numpy as np
from tqdm import tqdm

from gkpthreshold.core.exceptions import require
from gkpthreshold.models.covariance import NoiseModel
from gkpthreshold.models.records import MCConfig, MCResult
from gkpthreshold.models.schedule import GateSchedule
from gkpthreshold.services.cluster_gates import standard_eta0
from gkpthreshold.services.gaussian_core import controlled_z, fourier, shear_step_map

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)


def nearest_multiple(x, spacing: float):
    """The multiple k·spacing closest to x; exact half-cell ties go to even k."""
    require(spacing > 0.0, "spacing must be positive", spacing=spacing)
    k = np.rint(np.asarray(x, dtype=float) / spacing)
    out = k * spacing
    if np.ndim(out) == 0:
        return float(out)
    return out


class _Schedule:
    """Numeric step maps for one gate, prepared once per run."""

    def __init__(self, schedule: GateSchedule, noise: NoiseModel, eta0: np.ndarray):
        self.schedule = schedule
        self.modes = 2 if schedule.gate.is_two_mode else 1
        self.noise = noise
        w, v = np.linalg.eigh(eta0)
        require(w.min() >= -1e-12, "eta0 must be positive semidefinite", min_eigenvalue=float(w.min()))
        self.eta0_sqrt = v * np.sqrt(np.clip(w, 0.0, None))
        self.inject = controlled_z(-1).numeric() if self.modes == 2 else None
        if self.modes == 2:
            self.steps = [fourier(2).numeric() for _ in schedule.measurement_vector]
        else:
            self.steps = [shear_step_map(m).numeric() for m in schedule.measurement_vector]

    def event_labels(self):
        rails = self.schedule.rails
        return [
            f"step{step}" if len(rails) == 1 else f"step{step}_{rail}"
            for step in self.schedule.correction_steps
            for rail in rails
        ]


def _run_chunk(
    plan: _Schedule,
    rng: np.random.Generator,
    size: int,
    exact_modular: bool,
) -> Tuple[int, np.ndarray, np.ndarray]:
    modes = plan.modes
    sd_eps = math.sqrt(plan.noise.epsilon)
    sd_delta = math.sqrt(plan.noise.delta)

    y = rng.standard_normal((size, 2 * modes)) @ plan.eta0_sqrt.T
    if plan.inject is not None:
        y = y @ plan.inject.T
        y[:, modes:] += sd_eps * rng.standard_normal((size, modes))

    failed = np.zeros(size, dtype=bool)
    event_fails = []
    for step, s_map in enumerate(plan.steps, start=1):
        y = y @ s_map.T
        y[:, modes:] += sd_eps * rng.standard_normal((size, modes))
        if step not in plan.schedule.correction_steps:
            continue
        ancilla_q = sd_delta * rng.standard_normal((size, modes))
        measured = y[:, :modes] + ancilla_q
        # after shifting back by (measured mod √π) the residual is lattice - ancilla_q
        cells = np.rint(nearest_multiple(measured, SQRT_PI) / SQRT_PI)
        if exact_modular:
            wrong = np.abs(cells) % 2 == 1
        else:
            wrong = cells != 0
        event_fails.extend(wrong.sum(axis=0))
        failed |= wrong.any(axis=1)
        y[:, :modes] = -ancilla_q
        y[:, modes:] += sd_delta * rng.standard_normal((size, modes))

    return int(failed.sum()), np.asarray(event_fails, dtype=np.int64), y.T @ y


def simulate(cfg: MCConfig, eta0: Optional[np.ndarray] = None) -> MCResult:
    """Estimate the gate's logical error rate and residual error matrix by sampling.

    ``eta0`` overrides the standard input error matrix (numeric, same dimension).
    """
    schedule = GateSchedule.for_gate(cfg.gate)
    noise = NoiseModel.from_sigma2(cfg.sigma2)
    if eta0 is None:
        eta0 = standard_eta0(schedule.gate).at(noise)
    eta0 = np.asarray(eta0, dtype=float)
    dim = 4 if schedule.gate.is_two_mode else 2
    require(eta0.shape == (dim, dim), "eta0 has the wrong shape for the gate", shape=eta0.shape)

    plan = _Schedule(schedule, noise, eta0)
    labels = plan.event_labels()
    exact = cfg.count_convention == "exact_modular"

    n_chunks = -(-cfg.samples // cfg.chunk_size)
    streams = np.random.SeedSequence(cfg.seed).spawn(n_chunks)

    failures = 0
    event_counts = np.zeros(len(labels), dtype=np.int64)
    second_moment = np.zeros((dim, dim))
    progress = tqdm(
        range(n_chunks),
        desc=f"mc {schedule.gate.value}",
        unit="chunk",
        disable=None if logger.isEnabledFor(logging.INFO) else True,
    )
    for i in progress:
        size = min(cfg.chunk_size, cfg.samples - i * cfg.chunk_size)
        rng = np.random.default_rng(streams[i])
        f, ev, m2 = _run_chunk(plan, rng, size, exact)
        failures += f
        event_counts += ev
        second_moment += m2

    n = cfg.samples
    p_hat = failures / n
    eta_hat = second_moment / n
    diag = np.diag(eta_hat)
    eta_se = np.sqrt((np.outer(diag, diag) + eta_hat**2) / n)
    rates: Dict[str, float] = {label: int(c) / n for label, c in zip(labels, event_counts)}

    result = MCResult(
        p_err_hat=p_hat,
        std_err=math.sqrt(p_hat * (1.0 - p_hat) / n),
        samples=n,
        failures=failures,
        empirical_eta=eta_hat.tolist(),
        empirical_eta_std_err=eta_se.tolist(),
        per_step_fail_rates=rates,
    )
    logger.info(
        "mc gate=%s sigma2=%g samples=%d -> p_err=%.6g +/- %.2g",
        schedule.gate.value, cfg.sigma2, n, p_hat, result.std_err,
    )
    return result
