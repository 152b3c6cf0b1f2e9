"""BiAWGN channel, 3-level LLR quantization, and capacity computations.

Conventions: bit 0 maps to +1 on the channel, bit 1 to -1. Channel LLRs are
in nats; capacities are in bits. The conditional channel LLR under the
all-zero word is Gaussian with mean mu = 2/sigma^2 and variance 2 mu.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import erfc, exp, log, sqrt

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.optimize import minimize_scalar

__all__ = [
    "BiAwgnParams",
    "QuantizerParams",
    "BeecParams",
    "LLR_CAP",
    "transmit",
    "quantize",
    "beec_from",
    "beec_capacity",
    "optimize_delta",
    "biawgn_capacity",
    "beec_llr_reconstruction",
    "make_quantizer",
]

# Cap applied in place of an infinite reconstruction LLR when p_error = 0;
# far beyond any path-metric resolution at simulated SNRs.
LLR_CAP = 40.0


@dataclass(frozen=True)
class BiAwgnParams:
    """BiAWGN with noise variance sigma2 per real dimension."""

    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")

    @classmethod
    def from_ebn0_db(cls, ebn0_db: float, rate: float) -> "BiAwgnParams":
        esn0 = rate * 10.0 ** (ebn0_db / 10.0)
        return cls(sigma2=1.0 / (2.0 * esn0))

    @property
    def esn0(self) -> float:
        return 1.0 / (2.0 * self.sigma2)

    def ebn0_db(self, rate: float) -> float:
        return 10.0 * np.log10(self.esn0 / rate)

    @property
    def mu(self) -> float:
        """Mean of the channel LLR conditioned on the all-zero word."""
        return 2.0 / self.sigma2


@dataclass(frozen=True)
class QuantizerParams:
    """Dead-zone threshold delta on the channel LLR plus reconstruction values.

    recon_unq is the value fed to unquantized decoders (the BEEC LLR
    magnitude), recon_q the value used by quantized decoders for PM updates.
    """

    delta: float
    recon_unq: float
    recon_q: float = 1.0

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not (self.recon_unq > 0 and self.recon_q > 0):
            raise ValueError("reconstruction values must be positive")


@dataclass(frozen=True)
class BeecParams:
    """Binary error-and-erasure channel induced by the 3-level quantizer."""

    p_correct: float
    p_erase: float
    p_error: float

    def __post_init__(self):
        triple = (self.p_correct, self.p_erase, self.p_error)
        if min(triple) < -1e-12:
            raise ValueError(f"negative probability in {triple}")
        if abs(sum(triple) - 1.0) > 1e-9:
            raise ValueError(f"probabilities must sum to 1, got {triple}")

    def as_ternary_pmf(self) -> np.ndarray:
        """Conditional pmf of the quantized LLR level (-1, 0, +1) given bit 0."""
        return np.array([self.p_error, self.p_erase, self.p_correct])


def transmit(codeword, params: BiAwgnParams, rng: np.random.Generator):
    """Send the codeword over BiAWGN; returns the channel LLRs 2y/sigma^2."""
    c = np.asarray(codeword)
    sigma = sqrt(params.sigma2)
    y = (1.0 - 2.0 * c) + sigma * rng.standard_normal(c.shape)
    return (2.0 / params.sigma2) * y


def quantize(llr_unq, q: QuantizerParams | float):
    """3-level quantization with boundaries mapped to the saturated levels."""
    delta = q.delta if isinstance(q, QuantizerParams) else float(q)
    lam = np.asarray(llr_unq)
    return np.where(lam <= -delta, np.int8(-1),
                    np.where(lam >= delta, np.int8(1), np.int8(0)))


def _q_func(x: float) -> float:
    return 0.5 * erfc(x / sqrt(2.0))


def beec_from(params: BiAwgnParams, delta: float) -> BeecParams:
    """Transition probabilities of the induced BEEC via Gaussian tails."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    mu = params.mu
    sd = sqrt(2.0 * mu)
    p_correct = _q_func((delta - mu) / sd)
    p_error = _q_func((delta + mu) / sd)
    p_erase = 1.0 - p_correct - p_error
    return BeecParams(p_correct=p_correct, p_erase=max(p_erase, 0.0), p_error=p_error)


def _h(*probs) -> float:
    return -sum(p * log(p, 2) for p in probs if p > 0)


def beec_capacity(b: BeecParams) -> float:
    """Mutual information of the symmetric ternary-output channel, in bits."""
    avg = 0.5 * (b.p_correct + b.p_error)
    return _h(avg, b.p_erase, avg) - _h(b.p_correct, b.p_erase, b.p_error)


def optimize_delta(params: BiAwgnParams) -> tuple[float, float]:
    """Threshold maximizing BEEC capacity, and that capacity.

    Coarse grid over (0, 8 sqrt(2 mu)] followed by bounded refinement; the
    upper bound covers more than eight standard deviations of the channel
    LLR, beyond which the capacity is flat.
    """
    hi = 8.0 * sqrt(2.0 * params.mu)
    grid = np.linspace(hi / 4096.0, hi, 512)
    caps = np.array([beec_capacity(beec_from(params, d)) for d in grid])
    j = int(np.argmax(caps))
    lo_b = grid[max(j - 1, 0)]
    hi_b = grid[min(j + 1, len(grid) - 1)]
    res = minimize_scalar(lambda d: -beec_capacity(beec_from(params, d)),
                          bounds=(lo_b, hi_b), method="bounded",
                          options={"xatol": 1e-9})
    best = float(res.x)
    return best, beec_capacity(beec_from(params, best))


_GH_NODES, _GH_WEIGHTS = hermegauss(151)


def biawgn_capacity(params: BiAwgnParams) -> float:
    """BiAWGN mutual information in bits via Gauss-Hermite quadrature."""
    mu = params.mu
    lam = mu + sqrt(2.0 * mu) * _GH_NODES
    vals = 1.0 - np.logaddexp(0.0, -lam) / log(2.0)
    return float(np.dot(_GH_WEIGHTS, vals) / sqrt(2.0 * np.pi))


def beec_llr_reconstruction(b: BeecParams, cap: float = LLR_CAP) -> float:
    """Reconstruction magnitude matching the BEEC LLR, ln(p_correct/p_error).

    A degenerate channel with p_error = 0 would give an infinite LLR; the
    value is capped so unquantized paths never see infinities.
    """
    if b.p_error <= 0 or b.p_correct / b.p_error > exp(cap):
        return cap
    return log(b.p_correct / b.p_error)


def make_quantizer(params: BiAwgnParams) -> QuantizerParams:
    """Capacity-optimal quantizer with the matched reconstruction value."""
    delta, _ = optimize_delta(params)
    beec = beec_from(params, delta)
    return QuantizerParams(delta=delta,
                           recon_unq=beec_llr_reconstruction(beec),
                           recon_q=1.0)
