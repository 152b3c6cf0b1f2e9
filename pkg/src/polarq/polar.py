"""Polar/Reed-Muller code construction and encoding.

The generator is the m-fold Kronecker power of the [[1,1],[0,1]] kernel
composed with the bit-reversal permutation applied to the input word.
Encoding runs in O(n log n) via in-place butterflies; the equivalent
dense-matrix product is kept in the test suite as an oracle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb

import numpy as np

__all__ = [
    "CodeSpec",
    "bit_reversal_permute",
    "bitrev_indices",
    "polar_transform",
    "encode",
    "construct_rm",
]


def bitrev_indices(m: int) -> np.ndarray:
    """Index table j -> reversal of the m-bit expansion of j."""
    if m < 0:
        raise ValueError(f"depth must be nonnegative, got {m}")
    idx = np.arange(2**m, dtype=np.int64)
    rev = np.zeros_like(idx)
    for b in range(m):
        rev |= ((idx >> b) & 1) << (m - 1 - b)
    return rev


def bit_reversal_permute(v, m: int):
    """Permute a length-2^m vector (or batch of rows) by bit reversal.

    Self-inverse: applying it twice returns the input.
    """
    v = np.asarray(v)
    n = v.shape[-1]
    if n != 2**m:
        raise ValueError(f"length {n} is not 2^{m}")
    return v[..., bitrev_indices(m)]


def polar_transform(u, m: int | None = None):
    """Apply the polar transform over GF(2).

    Accepts a length-n vector or a (batch, n) array of bits. The transform
    is an involution, so this both encodes and inverts.
    """
    u = np.asarray(u)
    n = u.shape[-1]
    if n == 0 or (n & (n - 1)) != 0:
        raise ValueError(f"length {n} is not a power of two")
    if m is None:
        m = n.bit_length() - 1
    if n != 2**m:
        raise ValueError(f"length {n} does not match depth {m}")
    x = bit_reversal_permute(u, m).astype(np.int8).copy()
    shape = x.shape
    for s in range(m):
        step = 2 << s
        half = 1 << s
        v = x.reshape(-1, n // step, step)
        v[..., :half] ^= v[..., half:]
    return x.reshape(shape)


@dataclass(frozen=True)
class CodeSpec:
    """A polar code: block length n = 2^m, dimension k, information set.

    The constructor records provenance: "density_evolution" with its design
    Eb/N0, or "reed_muller" with the order r. Instances are immutable and
    safe to share across simulation workers.
    """

    m: int
    info_set: tuple[int, ...]
    construction: str = "manual"
    design_snr_db: float | None = None
    rm_order: int | None = None

    def __post_init__(self):
        n = 2**self.m
        info = tuple(int(i) for i in self.info_set)
        if list(info) != sorted(set(info)):
            raise ValueError("info_set must be strictly increasing")
        if info and not (0 <= info[0] and info[-1] < n):
            raise ValueError(f"info_set indices must lie in [0, {n})")
        object.__setattr__(self, "info_set", info)

    @property
    def n(self) -> int:
        return 2**self.m

    @property
    def k(self) -> int:
        return len(self.info_set)

    @property
    def rate(self) -> float:
        return self.k / self.n

    def info_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[list(self.info_set)] = True
        return mask

    def to_json(self) -> str:
        doc = {
            "m": self.m,
            "k": self.k,
            "info_set": list(self.info_set),
            "construction": self.construction,
        }
        if self.design_snr_db is not None:
            doc["design_snr_db"] = self.design_snr_db
        if self.rm_order is not None:
            doc["rm_order"] = self.rm_order
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "CodeSpec":
        doc = json.loads(text)
        spec = cls(
            m=doc["m"],
            info_set=tuple(doc["info_set"]),
            construction=doc.get("construction", "manual"),
            design_snr_db=doc.get("design_snr_db"),
            rm_order=doc.get("rm_order"),
        )
        if "k" in doc and doc["k"] != spec.k:
            raise ValueError(f"info_set has {spec.k} entries but k = {doc['k']}")
        return spec


def encode(spec: CodeSpec, msg):
    """Scatter message bits into the information set and polar-transform.

    Frozen positions are fixed to 0. Accepts a length-k vector or a
    (batch, k) array; returns codewords of matching leading shape.
    """
    msg = np.asarray(msg, dtype=np.int8)
    if msg.shape[-1] != spec.k:
        raise ValueError(f"message length {msg.shape[-1]} != k = {spec.k}")
    u = np.zeros(msg.shape[:-1] + (spec.n,), dtype=np.int8)
    u[..., list(spec.info_set)] = msg
    return polar_transform(u, spec.m)


def construct_rm(m: int, r: int) -> CodeSpec:
    """Reed-Muller code of order r as a polar information set.

    Selects the indices whose m-bit expansion has weight >= m - r, giving
    k = sum_{j<=r} C(m, j).
    """
    if not 0 <= r <= m:
        raise ValueError(f"order must satisfy 0 <= r <= m, got r={r}, m={m}")
    idx = np.arange(2**m, dtype=np.uint64)
    weights = np.bitwise_count(idx)
    info = np.flatnonzero(weights >= m - r)
    spec = CodeSpec(m=m, info_set=tuple(int(i) for i in info),
                    construction="reed_muller", rm_order=r)
    assert spec.k == sum(comb(m, j) for j in range(r + 1))
    return spec
