"""Successive cancellation list decoding with pluggable PM update rules.

The decoder keeps L path slots per frame, vectorized over a batch of frames.
Per-path tree state lives in flat heap-indexed buffers (slot for tree level
s at [2^s, 2^(s+1)); the channel level is shared across paths since it never
changes). At information bits every path branches into both children; the L
best candidates survive, ordered by (path metric, parent rank, branch bit),
which makes pruning a total, reproducible order even when metrics tie --
under coarse quantization they tie constantly.

PM update rules ("exact", "max", "refined", "epmu") follow the accumulated
penalty convention: the increment for deciding bit u on LLR lambda depends on
s = lambda if u = 1 else -lambda. Frozen bits apply the u = 0 update.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np

from .polar import CodeSpec

__all__ = [
    "PM_RULES",
    "pm_update",
    "FinalList",
    "scl_decode",
    "scl_decode_batch",
    "select_lowest_pm",
    "select_ml",
    "mllb_trial",
    "loglik_scores",
    "contradiction_counts",
]

PM_RULES = ("exact", "max", "refined", "epmu")
_LN2 = log(2.0)


def _increment(rule: str, s):
    """PM increment as a function of s = (-1)^(1-u) * lambda."""
    if rule == "exact":
        return np.maximum(s, 0.0) + np.log1p(np.exp(-np.abs(s)))
    if rule == "max":
        return np.maximum(s, 0.0)
    if rule == "refined":
        return np.where(s > 2 * _LN2, s,
                        np.where(s < -2 * _LN2, 0.0, 0.5 * s + _LN2))
    raise ValueError(f"unknown PM update rule {rule!r}")


def pm_update(rule: str, pm, lam, u, *, table=None, index=None):
    """Updated path metric for deciding bit u on LLR ``lam``.

    For the "epmu" rule ``lam`` must be a ternary level and ``table``/
    ``index`` identify the lookup entries.
    """
    u = np.asarray(u)
    if rule == "epmu":
        if table is None or index is None:
            raise ValueError("epmu rule needs a table and a bit index")
        q = np.asarray(lam)
        if not np.isin(q, (-1, 0, 1)).all():
            raise ValueError("epmu rule requires ternary LLR levels")
        return pm + table.entries[index, q + 1, u]
    s = np.where(u == 1, lam, -np.asarray(lam, dtype=np.float64))
    return pm + _increment(rule, s)


@dataclass(frozen=True)
class FinalList:
    """Completed decoding paths of one frame, in creation-rank order."""

    uhat: np.ndarray        # (entries, n) input-word decisions
    codewords: np.ndarray   # (entries, n)
    pms: np.ndarray         # (entries,)
    path_ids: np.ndarray    # (entries,) creation ranks, strictly increasing

    def __len__(self):
        return len(self.pms)


def _trailing_ones(i: int) -> int:
    c = 0
    while i & 1:
        c += 1
        i >>= 1
    return c


class _SclEngine:
    """One batched decode pass; see module docstring for the state layout."""

    def __init__(self, spec, channel_llrs, algebra, L, rule, *,
                 recon=1.0, epmu_table=None, tie_bit=0):
        ch = np.asarray(channel_llrs)
        if ch.ndim != 2 or ch.shape[1] != spec.n:
            raise ValueError("channel LLRs must be shaped (batch, n)")
        if L < 1:
            raise ValueError("list size must be at least 1")
        if rule == "epmu" and epmu_table is None:
            raise ValueError("epmu rule needs a built table")
        self.spec = spec
        self.algebra = algebra
        self.L = L
        self.rule = rule
        self.recon = recon
        self.table = epmu_table
        self.tie_bit = tie_bit
        self.B = ch.shape[0]
        n = spec.n
        self.ch = ch[:, None, :]
        self.llr = np.zeros((self.B, L, n), dtype=ch.dtype)
        self.bits = np.zeros((self.B, L, n), dtype=np.int8)
        self.uhat = np.zeros((self.B, L, n), dtype=np.int8)
        self.cw = np.zeros((self.B, L, n), dtype=np.int8)
        self.pm = np.full((self.B, L), np.inf)
        self.pm[:, 0] = 0.0
        self._bidx = np.arange(self.B)[:, None]

    def _level_src(self, s):
        if s + 1 == self.spec.m:
            return self.ch
        lo = 1 << (s + 1)
        return self.llr[:, :, lo:2 * lo]

    def _compute_llr(self, i):
        m = self.spec.m
        if i == 0:
            levels = range(m - 1, -1, -1)
            z = m  # no vn level
        else:
            z = (i & -i).bit_length() - 1
            levels = range(z, -1, -1)
        alg = self.algebra
        for s in levels:
            src = self._level_src(s)
            even, odd = src[..., 0::2], src[..., 1::2]
            lo = 1 << s
            if s == z:
                left_bits = self.bits[:, :, lo:2 * lo]
                signed = np.where(left_bits == 1, alg.neg(even), even)
                self.llr[:, :, lo:2 * lo] = alg.vn(odd, signed)
            else:
                self.llr[:, :, lo:2 * lo] = alg.cn(even, odd)

    def _push_bits(self, i):
        enc = self.uhat[:, :, i:i + 1]
        for s in range(_trailing_ones(i)):
            lo = 1 << s
            left = self.bits[:, :, lo:2 * lo]
            new = np.empty(enc.shape[:-1] + (2 * lo,), dtype=np.int8)
            new[..., 0::2] = left ^ enc
            new[..., 1::2] = enc
            enc = new
        if i == self.spec.n - 1:
            self.cw[:] = enc
        else:
            lo = 1 << _trailing_ones(i)
            self.bits[:, :, lo:2 * lo] = enc

    def _both_increments(self, i, lam):
        if self.rule == "epmu":
            cells = self.table.entries[i]               # (3, 2)
            q = lam.astype(np.int64) + 1
            return cells[q, 0], cells[q, 1]
        lam_f = lam * self.recon if lam.dtype.kind == "i" else lam
        return _increment(self.rule, -lam_f), _increment(self.rule, lam_f)

    def _branch(self, i, lam):
        d0, d1 = self._both_increments(i, lam)
        cand = np.empty((self.B, 2 * self.L))
        cand[:, 0::2] = self.pm + d0
        cand[:, 1::2] = self.pm + d1
        order = np.argsort(cand, axis=1, kind="stable")[:, :self.L]
        parent = order >> 1
        self.pm = np.take_along_axis(cand, order, axis=1)
        b = self._bidx
        self.llr = self.llr[b, parent]
        self.bits = self.bits[b, parent]
        self.uhat = self.uhat[b, parent]
        self.uhat[:, :, i] = (order & 1).astype(np.int8)

    def run(self):
        info = self.spec.info_mask()
        for i in range(self.spec.n):
            self._compute_llr(i)
            lam = self.llr[:, :, 1]
            if info[i]:
                self._branch(i, lam)
            else:
                d0, _ = self._both_increments(i, lam)
                self.pm = self.pm + d0
                self.uhat[:, :, i] = 0
            self._push_bits(i)
        return self.uhat, self.cw, self.pm, np.isfinite(self.pm)


def scl_decode_batch(spec: CodeSpec, channel_llrs, algebra, L: int,
                     rule: str | None = None, *, recon: float = 1.0,
                     epmu_table=None, tie_bit: int = 0):
    """List-decode a (batch, n) array of channel LLRs.

    Returns (uhat, codewords, pms, valid): decisions and re-encoded
    codewords per path slot, path metrics, and a mask of populated slots
    (fewer than L paths exist when the code has fewer than log2 L
    information bits). Slots are in creation-rank order.
    """
    if rule is None:
        rule = "refined" if algebra.dtype == np.int8 else "exact"
    if rule not in PM_RULES:
        raise ValueError(f"unknown PM update rule {rule!r}")
    eng = _SclEngine(spec, channel_llrs, algebra, L, rule,
                     recon=recon, epmu_table=epmu_table, tie_bit=tie_bit)
    return eng.run()


def scl_decode(spec: CodeSpec, channel_llrs, algebra, L: int,
               rule: str | None = None, *, recon: float = 1.0,
               epmu_table=None, tie_bit: int = 0) -> FinalList:
    """List-decode a single frame and return its final list."""
    llrs = np.asarray(channel_llrs)
    uhat, cw, pm, valid = scl_decode_batch(
        spec, llrs[None, :], algebra, L, rule,
        recon=recon, epmu_table=epmu_table, tie_bit=tie_bit)
    keep = valid[0]
    return FinalList(uhat=uhat[0][keep], codewords=cw[0][keep],
                     pms=pm[0][keep], path_ids=np.flatnonzero(keep))


def select_lowest_pm(final: FinalList) -> np.ndarray:
    """Codeword with the lowest path metric; ties go to the lowest path id."""
    if len(final) == 0:
        raise ValueError("empty final list")
    return final.codewords[int(np.argmin(final.pms))]


def contradiction_counts(codewords, q_levels):
    """Per-codeword count of non-erased channel signs it contradicts."""
    cw = np.atleast_2d(np.asarray(codewords))
    q = np.asarray(q_levels)
    return ((q * (1 - 2 * cw)) == -1).sum(axis=-1)


def loglik_scores(codewords, channel_obs, channel_model, beec=None):
    """Log-likelihood scores (up to a codeword-independent constant).

    ``channel_model`` is "biawgn" (real observations, correlation metric) or
    "beec" (ternary levels, negated contradiction count; identical ordering
    to the explicitly weighted form since erasures and agreements contribute
    constants). ``beec`` parameters, when given, produce the weighted form.
    """
    cw = np.atleast_2d(np.asarray(codewords))
    obs = np.asarray(channel_obs)
    if channel_model == "biawgn":
        return ((1 - 2 * cw) * obs).sum(axis=-1).astype(np.float64)
    if channel_model == "beec":
        contra = contradiction_counts(cw, obs)
        if beec is None:
            return -contra.astype(np.float64)
        w = log(beec.p_correct) - log(max(beec.p_error, 1e-300))
        return -w * contra.astype(np.float64)
    raise ValueError(f"unknown channel model {channel_model!r}")


def select_ml(final: FinalList, channel_obs, channel_model, beec=None) -> np.ndarray:
    """Most likely codeword in the list; ties go to the lowest path id."""
    if len(final) == 0:
        raise ValueError("empty final list")
    scores = loglik_scores(final.codewords, channel_obs, channel_model, beec)
    return final.codewords[int(np.argmax(scores))]


def mllb_trial(spec: CodeSpec, channel_llrs, true_codeword, algebra, L: int,
               channel_obs, channel_model, rule: str | None = None, *,
               recon: float = 1.0, epmu_table=None) -> bool:
    """ML lower-bound error event: decode, adjoin the transmitted codeword
    to the final list, select by likelihood. The injected codeword wins
    ties, so an error requires a strictly more likely list entry."""
    final = scl_decode(spec, channel_llrs, algebra, L, rule,
                       recon=recon, epmu_table=epmu_table)
    truth = np.asarray(true_codeword, dtype=np.int8)
    scores = loglik_scores(final.codewords, channel_obs, channel_model)
    truth_score = loglik_scores(truth[None, :], channel_obs, channel_model)[0]
    return bool(np.any(scores > truth_score))
