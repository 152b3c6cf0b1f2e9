"""Density evolution: message-distribution arithmetic over the decoding tree.

Two pmf representations are supported: exact ternary triples (P(-1), P(0),
P(+1)) for the three-level decoder, and gridded real pmfs for unquantized
messages. The grid is uniform with spacing ``spacing`` over
[-half_extent, +half_extent]; the two end bins saturate (out-of-range mass
folds into them). Variable-node evolution is a discrete convolution; the
min-sum check node uses tail products (O(G)); the exact check node pushes an
outer product through the stable kernel with mass split linearly between the
two neighboring bins, which keeps the mean exact.

``evolve`` walks the same tree as the decoders: producing tree level s uses
the check-node pushforward where bit s of the target index is 0 and the
variable-node pushforward where it is 1, conditional on the all-zero word
(genie partial sums never flip signs).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log, sqrt

import numpy as np
from scipy.signal import fftconvolve

from .channel import BiAwgnParams, BeecParams
from .llr_algebra import _cn_exact
from .polar import CodeSpec

__all__ = [
    "LlrGrid",
    "TernaryRep",
    "GridRep",
    "ternary_cn",
    "ternary_vn",
    "ternary_error_prob",
    "ternary_capacity_bits",
    "evolve",
    "design_code",
    "reliability_report",
    "achievable_rates_at",
    "rate_curve",
    "RATE_CSV_COLUMNS",
]

_TAIL_EPS = 1e-16


# ---------------------------------------------------------------- ternary

def ternary_cn(a, b):
    """Pushforward of two independent ternary pmfs through the sign product."""
    am, az, ap = a
    bm, bz, bp = b
    return np.array([ap * bm + am * bp,
                     az + bz - az * bz,
                     ap * bp + am * bm])


def ternary_vn(a, b):
    """Pushforward through the saturating sum."""
    am, az, ap = a
    bm, bz, bp = b
    return np.array([am * bm + am * bz + az * bm,
                     az * bz + ap * bm + am * bp,
                     ap * bp + ap * bz + az * bp])


def ternary_error_prob(p) -> float:
    return float(p[0] + 0.5 * p[1])


def ternary_capacity_bits(p) -> float:
    """Mutual information of the symmetric channel with this conditional pmf."""
    return beec_capacity_triple(p[2], p[1], p[0])


def beec_capacity_triple(p_correct, p_erase, p_error) -> float:
    def h(*probs):
        return -sum(q * log(q, 2) for q in probs if q > 0)
    avg = 0.5 * (p_correct + p_error)
    return h(avg, p_erase, avg) - h(p_correct, p_erase, p_error)


# ------------------------------------------------------------------- grid

@dataclass(frozen=True)
class LlrGrid:
    """Uniform symmetric LLR grid; end bins act as saturation accumulators."""

    spacing: float = 1.0 / 32.0
    half_extent: float = 60.0

    def __post_init__(self):
        k = round(self.half_extent / self.spacing)
        if not np.isclose(k * self.spacing, self.half_extent):
            raise ValueError("half_extent must be a multiple of spacing")

    @property
    def half_bins(self) -> int:
        return round(self.half_extent / self.spacing)

    @property
    def size(self) -> int:
        return 2 * self.half_bins + 1

    @property
    def values(self) -> np.ndarray:
        k = self.half_bins
        return np.arange(-k, k + 1) * self.spacing

    def zero_index(self) -> int:
        return self.half_bins

    def deposit(self, values, weights, out=None):
        """Accumulate weighted point masses, splitting linearly between the
        two neighboring bins (keeps the first moment exact)."""
        g = self.size
        pos = np.asarray(values) / self.spacing + self.half_bins
        i0 = np.floor(pos).astype(np.int64)
        frac = (pos - i0).ravel()
        i0c = np.clip(i0, 0, g - 1).ravel()
        i1c = np.clip(i0 + 1, 0, g - 1).ravel()
        w = np.asarray(weights).ravel()
        acc = np.bincount(i0c, weights=w * (1.0 - frac), minlength=g)
        acc += np.bincount(i1c, weights=w * frac, minlength=g)
        if out is not None:
            out += acc
            return out
        return acc

    def gaussian_pmf(self, mean: float, var: float) -> np.ndarray:
        """Exact bin masses of a Gaussian (tails into the saturation bins)."""
        from scipy.special import ndtr
        edges = (np.arange(self.size - 1) - self.half_bins + 0.5) * self.spacing
        cdf = ndtr((edges - mean) / sqrt(var))
        return np.diff(cdf, prepend=0.0, append=1.0)

    def discrete_pmf(self, values, probs) -> np.ndarray:
        return self.deposit(np.asarray(values, dtype=float), np.asarray(probs))


def _support(mass: np.ndarray) -> slice:
    csum = np.cumsum(mass)
    lo = int(np.searchsorted(csum, _TAIL_EPS))
    hi = int(np.searchsorted(csum, csum[-1] - _TAIL_EPS)) + 1
    return slice(lo, min(hi, len(mass)))


def grid_vn_mass(grid: LlrGrid, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Convolution of two mass vectors with saturation folding (unnormalized)."""
    sa, sb = _support(a), _support(b)
    full = np.maximum(fftconvolve(a[sa], b[sb]), 0.0)
    u0 = sa.start + sb.start - grid.half_bins  # output bin of full[0]
    out = np.zeros(grid.size)
    # mass outside [0, size) folds into the saturation bins; a support can
    # lie entirely beyond one end once messages fully polarize
    hi_cut = min(max(0, u0 + len(full) - grid.size), len(full))
    lo_cut = min(max(0, -u0), len(full) - hi_cut)
    core = full[lo_cut:len(full) - hi_cut]
    start = max(u0, 0)
    out[start:start + len(core)] = core
    out[0] += full[:lo_cut].sum()
    if hi_cut:
        out[-1] += full[len(full) - hi_cut:].sum()
    return out


def grid_cn_minsum_mass(grid: LlrGrid, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Min-sum check-node pushforward via tail products (unnormalized)."""
    k = grid.half_bins
    z = grid.zero_index()
    # tail_pos[j] = P(X >= +j*s), tail_neg[j] = P(X <= -j*s), j = 1..K
    ta_pos = np.cumsum(a[:z:-1])[::-1]
    ta_neg = np.cumsum(a[:z])
    tb_pos = np.cumsum(b[:z:-1])[::-1]
    tb_neg = np.cumsum(b[:z])
    s_pos = ta_pos * tb_pos + ta_neg[::-1] * tb_neg[::-1]   # index j-1 = mag j
    s_neg = ta_pos * tb_neg[::-1] + ta_neg[::-1] * tb_pos
    out = np.zeros(grid.size)
    out[z + 1:] = s_pos - np.append(s_pos[1:], 0.0)
    out[:z] = (s_neg - np.append(s_neg[1:], 0.0))[::-1]
    out[z] = a.sum() * b.sum() - s_pos[0] - s_neg[0]
    return out


_CORR_CACHE: dict = {}


def _corr_tables(grid: LlrGrid):
    """Correction tables for the exact check node on magnitude indices:
    boxplus(u, v) = min(u, v) + C1[iu+iv] - C2[|iu-iv|] for u, v > 0,
    already divided by the spacing (bin units)."""
    key = (grid.spacing, grid.half_bins)
    if key not in _CORR_CACHE:
        k = grid.half_bins
        s = grid.spacing
        sums = np.arange(2 * k + 1) * s
        diffs = np.arange(k + 1) * s
        _CORR_CACHE[key] = (np.log1p(np.exp(-sums)) / s,
                            np.log1p(np.exp(-diffs)) / s)
    return _CORR_CACHE[key]


def grid_cn_exact_mass(grid: LlrGrid, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact check-node pushforward.

    Decomposed by sign: mass with a zero operand lands exactly at zero; the
    two sign-agreeing quadrants share one magnitude outer product deposited
    on the positive side, the sign-opposing ones the mirrored deposit. The
    kernel value on magnitudes u, v is min(u,v) plus tabulated corrections
    in (u+v) and |u-v|, so the outer product needs no transcendentals.
    """
    z = grid.zero_index()
    d1, d2 = _corr_tables(grid)
    # magnitude mass vectors, index j = magnitude j*s, j = 1..K
    a_pos, a_neg = a[z + 1:], a[z - 1::-1]
    b_pos, b_neg = b[z + 1:], b[z - 1::-1]
    sa = _support(a_pos + a_neg)
    sb = _support(b_pos + b_neg)
    ja = np.arange(sa.start + 1, sa.stop + 1)
    jb = np.arange(sb.start + 1, sb.stop + 1)
    out = np.zeros(grid.size)
    out[z] = (a[z] * b.sum() + b[z] * a.sum() - a[z] * b[z])
    if len(ja) == 0 or len(jb) == 0:
        return out
    # fractional output bin (in magnitude units)
    pos = (np.minimum(ja[:, None], jb[None, :])
           + d1[ja[:, None] + jb[None, :]]
           - d2[np.abs(ja[:, None] - jb[None, :])])
    w_same = (a_pos[sa][:, None] * b_pos[sb][None, :]
              + a_neg[sa][:, None] * b_neg[sb][None, :])
    w_opp = (a_pos[sa][:, None] * b_neg[sb][None, :]
             + a_neg[sa][:, None] * b_pos[sb][None, :])
    i0 = np.floor(pos).astype(np.int64)
    frac = (pos - i0).ravel()
    k = grid.half_bins
    i0 = np.clip(i0, 0, k).ravel()
    i1 = np.minimum(i0 + 1, k)
    for w, sign in ((w_same.ravel(), 1), (w_opp.ravel(), -1)):
        mag = np.bincount(i0, weights=w * (1.0 - frac), minlength=k + 1)
        mag += np.bincount(i1, weights=w * frac, minlength=k + 1)
        if sign > 0:
            out[z] += mag[0]
            out[z + 1:] += mag[1:]
        else:
            out[z] += mag[0]
            out[z - 1::-1] += mag[1:]
    return out


def grid_error_prob(grid: LlrGrid, mass: np.ndarray) -> float:
    z = grid.zero_index()
    return float(mass[:z].sum() + 0.5 * mass[z])


def grid_capacity_bits(grid: LlrGrid, mass: np.ndarray) -> float:
    vals = 1.0 - np.logaddexp(0.0, -grid.values) / log(2.0)
    return float(np.dot(mass, vals))


# ------------------------------------------------- representation objects

class TernaryRep:
    """Exact three-level density evolution."""

    name = "ternary"

    def cn(self, a, b):
        return ternary_cn(a, b)

    def vn(self, a, b):
        return ternary_vn(a, b)

    def error_prob(self, p):
        return ternary_error_prob(p)

    def capacity_bits(self, p):
        return ternary_capacity_bits(p)

    def channel_pmf(self, beec: BeecParams):
        return beec.as_ternary_pmf()


class GridRep:
    """Gridded real density evolution with a min-sum or exact check node."""

    def __init__(self, grid: LlrGrid | None = None, cn_kernel: str = "minsum"):
        if cn_kernel not in ("minsum", "exact"):
            raise ValueError(f"unknown check-node kernel {cn_kernel!r}")
        self.grid = grid if grid is not None else LlrGrid()
        self.cn_kernel = cn_kernel
        self.name = f"grid-{cn_kernel}"

    def _finish(self, mass):
        total = mass.sum()
        if not 0.999999 < total < 1.000001:
            raise ValueError(f"mass not normalized: {total}")
        return mass / total

    def _is_point(self, mass):
        j = int(np.argmax(mass))
        return j if mass[j] > 1.0 - 1e-13 else None

    def cn(self, a, b):
        ja, jb = self._is_point(a), self._is_point(b)
        if ja is not None and jb is not None:
            va, vb = self.grid.values[[ja, jb]]
            out = np.zeros(self.grid.size)
            val = (_cn_exact(va, vb) if self.cn_kernel == "exact"
                   else np.sign(va) * np.sign(vb) * min(abs(va), abs(vb)))
            self.grid.deposit(np.array([val]), np.array([1.0]), out)
            return out
        if self.cn_kernel == "exact":
            return self._finish(grid_cn_exact_mass(self.grid, a, b))
        return self._finish(grid_cn_minsum_mass(self.grid, a, b))

    def vn(self, a, b):
        return self._finish(grid_vn_mass(self.grid, a, b))

    def error_prob(self, mass):
        return grid_error_prob(self.grid, mass)

    def capacity_bits(self, mass):
        return grid_capacity_bits(self.grid, mass)

    def biawgn_channel_pmf(self, params: BiAwgnParams):
        return self.grid.gaussian_pmf(params.mu, 2.0 * params.mu)

    def beec_channel_pmf(self, beec: BeecParams, recon: float):
        return self.grid.discrete_pmf([-recon, 0.0, recon],
                                      beec.as_ternary_pmf())


# ------------------------------------------------------------- tree walks

def evolve(m: int, channel_pmf, rep):
    """Per-index message distributions for all 2^m synthetic channels.

    Walks the decoding tree with memoized per-layer distributions (2^d
    distinct at depth d); index order matches the decoders bit for bit.
    """
    dists = [channel_pmf]
    for _ in range(m):
        dists = [child for w in dists for child in (rep.cn(w, w), rep.vn(w, w))]
    return dists


def design_code(m: int, k: int, channel_pmf, rep, *, design_snr_db=None) -> CodeSpec:
    """Information set of the k most reliable synthetic channels.

    Reliability is the DE error probability (half the mass at LLR zero
    counts as error); ties prefer the higher index.
    """
    n = 2**m
    if k > n:
        raise ValueError(f"k = {k} exceeds n = {n}")
    perr = np.array([rep.error_prob(p) for p in evolve(m, channel_pmf, rep)])
    order = sorted(range(n), key=lambda i: (perr[i], -i))
    info = tuple(sorted(order[:k]))
    return CodeSpec(m=m, info_set=info, construction="density_evolution",
                    design_snr_db=design_snr_db)


def reliability_report(m: int, channel_pmf, rep):
    """Per synthetic channel: (error probability, capacity in bits)."""
    dists = evolve(m, channel_pmf, rep)
    return [(rep.error_prob(p), rep.capacity_bits(p)) for p in dists]


# ------------------------------------------------------------ rate curves

RATE_CSV_COLUMNS = [
    "ebn0_db", "capacity_bits", "rate_unq_unq", "rate_unq_3q", "rate_3q_3q",
    "esn0_db", "sigma2", "ebn0_unq_unq_db", "ebn0_unq_3q_db", "ebn0_3q_3q_db",
]


def achievable_rates_at(params: BiAwgnParams, m_eval: int,
                        grid: LlrGrid | None = None) -> dict:
    """Finite-depth achievable rates of the three channel/decoder pairings.

    Rates are mean synthetic-channel capacities at depth ``m_eval``:
    exact-kernel grid DE for the unquantized decoder (over the BiAWGN and
    over the 3-level quantized channel with matched reconstruction), and
    ternary DE for the 3-level decoder.
    """
    from .channel import beec_from, beec_llr_reconstruction, biawgn_capacity, optimize_delta

    grid_rep = GridRep(grid, cn_kernel="exact")
    tern = TernaryRep()
    delta, _ = optimize_delta(params)
    beec = beec_from(params, delta)
    recon = beec_llr_reconstruction(beec)

    def mean_cap(dists, rep):
        return float(np.mean([rep.capacity_bits(p) for p in dists]))

    r_unq_unq = mean_cap(evolve(m_eval, grid_rep.biawgn_channel_pmf(params), grid_rep), grid_rep)
    r_unq_3q = mean_cap(evolve(m_eval, grid_rep.beec_channel_pmf(beec, recon), grid_rep), grid_rep)
    r_3q_3q = mean_cap(evolve(m_eval, tern.channel_pmf(beec), tern), tern)

    esn0 = params.esn0

    def ebn0_db(rate):
        return 10.0 * np.log10(esn0 / rate) if rate > 1e-9 else float("nan")

    cap = biawgn_capacity(params)
    return {
        "ebn0_db": ebn0_db(cap),
        "capacity_bits": cap,
        "rate_unq_unq": r_unq_unq,
        "rate_unq_3q": r_unq_3q,
        "rate_3q_3q": r_3q_3q,
        "esn0_db": 10.0 * np.log10(esn0),
        "sigma2": params.sigma2,
        "ebn0_unq_unq_db": ebn0_db(r_unq_unq),
        "ebn0_unq_3q_db": ebn0_db(r_unq_3q),
        "ebn0_3q_3q_db": ebn0_db(r_3q_3q),
    }


def rate_curve(esn0_db_points, m_eval: int = 12,
               grid: LlrGrid | None = None) -> list[dict]:
    """Achievable-rate table over an Es/N0 sweep (one row per point).

    Each curve's Eb/N0 column is parametric: Es/N0 divided by that curve's
    own rate at the point, matching how rate-versus-Eb/N0 charts are drawn.
    """
    rows = []
    for esn0_db in esn0_db_points:
        params = BiAwgnParams(sigma2=1.0 / (2.0 * 10.0 ** (esn0_db / 10.0)))
        rows.append(achievable_rates_at(params, m_eval, grid))
    return rows
