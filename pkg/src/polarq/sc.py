"""Successive cancellation decoding over a pluggable LLR algebra.

The decoder walks the decoding tree (channel LLRs at the leaves): producing
the half-length message array at tree level s applies the check-node op where
bit s of the target index is 0 and the variable-node op where it is 1, with
partial-sum feedback from the re-encoded left sibling. The walk is batched
over frames; all decision logic is vectorized.

``synthetic_llr_bruteforce`` evaluates the synthetic-channel LLR by
exhaustive marginalization of the future input bits in the log domain and is
the oracle the recursion is checked against (n <= 16 only).
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from .llr_algebra import RealAlgebra
from .polar import CodeSpec, polar_transform

__all__ = ["TIE_BIT", "sc_decode", "sc_genie_llrs", "synthetic_llr_bruteforce"]

# Decision for a zero LLR (frequent under ternary decoding): pick bit 0.
# Matches the all-zero-word analysis convention; flip for experiments.
TIE_BIT = 0


def _sc_walk(llrs, algebra, info_mask, forced, tie_bit, llr_out, uhat_out):
    """Batched recursive tree walk; fills decision LLRs and bits per frame.

    Returns the re-encoded codeword of the decided bits.
    """

    def recurse(msgs, base, width):
        if width == 1:
            lam = msgs[..., 0]
            llr_out[..., base] = lam
            if forced is not None:
                bit = forced[..., base].astype(np.int8)
            elif not info_mask[base]:
                bit = np.zeros(lam.shape, dtype=np.int8)
            else:
                bit = algebra.hard_bit(lam, tie_bit)
            uhat_out[..., base] = bit
            return bit[..., None]
        half = width // 2
        even, odd = msgs[..., 0::2], msgs[..., 1::2]
        enc_left = recurse(algebra.cn(even, odd), base, half)
        signed = np.where(enc_left == 1, algebra.neg(even), even)
        enc_right = recurse(algebra.vn(odd, signed), base + half, half)
        out = np.empty(enc_left.shape[:-1] + (width,), dtype=np.int8)
        out[..., 0::2] = enc_left ^ enc_right
        out[..., 1::2] = enc_right
        return out

    return recurse(llrs, 0, llrs.shape[-1])


def sc_decode(spec: CodeSpec, channel_llrs, algebra, tie_bit: int = TIE_BIT):
    """SC-decode one frame or a (batch, n) array of frames.

    Returns (uhat, info_bits) with the leading batch shape preserved.
    Frozen positions decode to 0; ties at LLR 0 follow ``tie_bit``.
    """
    llrs = np.asarray(channel_llrs)
    if llrs.shape[-1] != spec.n:
        raise ValueError(f"expected {spec.n} channel LLRs, got {llrs.shape[-1]}")
    single = llrs.ndim == 1
    if single:
        llrs = llrs[None, :]
    llr_out = np.empty(llrs.shape, dtype=llrs.dtype)
    uhat = np.empty(llrs.shape, dtype=np.int8)
    _sc_walk(llrs, algebra, spec.info_mask(), None, tie_bit, llr_out, uhat)
    info = uhat[..., list(spec.info_set)]
    if single:
        return uhat[0], info[0]
    return uhat, info


def sc_genie_llrs(spec: CodeSpec, channel_llrs, true_u, algebra):
    """Decision LLRs with partial sums fed from the true input word.

    Used by density-evolution validation and the coupled Monte-Carlo
    cross-checks; accepts batches like ``sc_decode``.
    """
    llrs = np.asarray(channel_llrs)
    u = np.asarray(true_u, dtype=np.int8)
    if llrs.shape[-1] != spec.n or u.shape[-1] != spec.n:
        raise ValueError("channel LLRs and true input must have length n")
    single = llrs.ndim == 1
    if single:
        llrs = llrs[None, :]
    u = np.broadcast_to(u, llrs.shape[:-1] + (spec.n,))
    llr_out = np.empty(llrs.shape, dtype=llrs.dtype)
    uhat = np.empty(llrs.shape, dtype=np.int8)
    _sc_walk(llrs, algebra, spec.info_mask(), u, TIE_BIT, llr_out, uhat)
    return llr_out[0] if single else llr_out


def synthetic_llr_bruteforce(spec: CodeSpec, y_llrs, u_prefix, i: int):
    """Synthetic-channel LLR of bit i by exhaustive marginalization.

    Sums the channel likelihood over all completions of the input word in
    the log domain, with the known prefix fixed and both hypotheses for bit
    i. Channel likelihoods enter only through the given LLRs, so the common
    reference density cancels. Exponential cost; limited to n <= 16.
    """
    n = spec.n
    if n > 16:
        raise ValueError("brute-force oracle is limited to n <= 16")
    y = np.asarray(y_llrs, dtype=np.float64)
    prefix = np.asarray(u_prefix, dtype=np.int8)
    if len(prefix) != i:
        raise ValueError(f"prefix must have length i = {i}")
    n_free = n - i - 1
    tails = (np.arange(2**n_free, dtype=np.int64)[:, None]
             >> np.arange(n_free)[None, :]) & 1
    scores = np.empty(2)
    for u_i in (0, 1):
        u = np.empty((2**n_free, n), dtype=np.int8)
        u[:, :i] = prefix
        u[:, i] = u_i
        u[:, i + 1:] = tails
        x = polar_transform(u, spec.m)
        scores[u_i] = logsumexp(-(x * y).sum(axis=1))
    return float(scores[0] - scores[1])


def sc_exact_llrs(spec: CodeSpec, channel_llrs, forced_u):
    """All n decision LLRs from the exact-kernel recursion with forced bits.

    Companion to the brute-force oracle: both evaluate the same posterior
    when fed the same prefix decisions.
    """
    return sc_genie_llrs(spec, channel_llrs, forced_u, RealAlgebra(cn_kernel="exact"))
