"""LLR algebras: value alphabets with check-node, variable-node and negation ops.

Three instances are provided:

* ``RealAlgebra`` -- unquantized LLRs with an exact or min-sum check node.
* ``TernaryAlgebra`` -- symbolic levels {-1, 0, +1}; the check node is the
  sign product (0 absorbing) and the variable node is the saturating sum.
* ``JointAlgebra`` -- pairs of (ternary, real) messages evolved
  componentwise. Pairs are packed into complex arrays: the real part holds
  the unquantized message, the imaginary part the ternary level. This lets
  tree code slice and index joint messages exactly like scalar ones.

All operations accept scalars or numpy arrays and broadcast.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "RealAlgebra",
    "TernaryAlgebra",
    "JointAlgebra",
    "real_minsum",
    "real_exact",
    "ternary",
    "joint_minsum",
]

_MINSUM = "minsum"
_EXACT = "exact"


def _cn_minsum(a, b):
    mag = np.minimum(np.abs(a), np.abs(b))
    if getattr(mag, "dtype", np.dtype(float)).kind == "f":
        # sign of the product carries sign(a)*sign(b); magnitudes here are
        # far below the float overflow threshold
        return np.copysign(mag, np.multiply(a, b))
    return np.sign(a) * np.sign(b) * mag


def _cn_exact(a, b):
    # 2 atanh(tanh(a/2) tanh(b/2)) in the overflow-free form
    # minsum + log1p(exp(-|a+b|)) - log1p(exp(-|a-b|)): safe for any input
    # magnitude (each correction underflows once its argument passes ~37,
    # where tanh saturation would make the naive form blow up).
    out = _cn_minsum(a, b)
    corr = np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))
    inf_in = np.isinf(a) | np.isinf(b)
    return out + np.where(inf_in, 0.0, corr)


class RealAlgebra:
    """Unquantized LLR algebra; ``cn_kernel`` selects "exact" or "minsum"."""

    name = "linf"
    dtype = np.float64

    def __init__(self, cn_kernel: str = _MINSUM, strict: bool = False):
        if cn_kernel not in (_MINSUM, _EXACT):
            raise ValueError(f"unknown check-node kernel {cn_kernel!r}")
        self.cn_kernel = cn_kernel
        self.strict = strict

    def cn(self, a, b):
        if self.cn_kernel == _EXACT:
            return _cn_exact(a, b)
        return _cn_minsum(a, b)

    def vn(self, a, b):
        if self.strict:
            # opposing infinities are a prohibited input; their NaN is the
            # detector, so keep numpy quiet while producing it
            with np.errstate(invalid="ignore"):
                out = np.add(a, b)
            assert not np.any(np.isnan(out)), "vn of opposing infinite LLRs"
            return out
        return np.add(a, b)

    def neg(self, a):
        return np.negative(a)

    def hard_bit(self, lam, tie_bit: int = 0):
        """Sign decision: 1 for negative LLR, 0 for positive, tie_bit at 0."""
        return np.where(lam < 0, np.int8(1),
                        np.where(lam > 0, np.int8(0), np.int8(tie_bit)))

    def __repr__(self):
        return f"RealAlgebra(cn_kernel={self.cn_kernel!r})"


class TernaryAlgebra:
    """Three-level algebra on {-1, 0, +1}; min-sum rules clipped to the alphabet."""

    name = "l3"
    dtype = np.int8

    def cn(self, a, b):
        return np.multiply(a, b)

    def vn(self, a, b):
        s = np.add(a, b, dtype=np.int8)
        return np.clip(s, -1, 1)

    def neg(self, a):
        return np.negative(a)

    def hard_bit(self, lam, tie_bit: int = 0):
        return np.where(lam < 0, np.int8(1),
                        np.where(lam > 0, np.int8(0), np.int8(tie_bit)))

    def __repr__(self):
        return "TernaryAlgebra()"


class JointAlgebra:
    """Coupled (ternary, real) algebra; both components see the same tree.

    Values are complex: ``unq + 1j * q``. Operations act componentwise, the
    ternary part via the level tables and the real part via the selected
    kernel, so projecting on either component reproduces that component's
    single-algebra computation.
    """

    name = "l3xinf"
    dtype = np.complex128

    def __init__(self, cn_kernel: str = _MINSUM):
        self._q = TernaryAlgebra()
        self._unq = RealAlgebra(cn_kernel=cn_kernel)

    @staticmethod
    def pack(q, unq):
        return np.asarray(unq, dtype=np.float64) + 1j * np.asarray(q, dtype=np.float64)

    @staticmethod
    def q_part(x):
        return np.imag(x).astype(np.int8)

    @staticmethod
    def unq_part(x):
        return np.real(x)

    def cn(self, a, b):
        q = self._q.cn(np.imag(a), np.imag(b))
        unq = self._unq.cn(np.real(a), np.real(b))
        return unq + 1j * q

    def vn(self, a, b):
        q = np.clip(np.imag(a) + np.imag(b), -1, 1)
        unq = self._unq.vn(np.real(a), np.real(b))
        return unq + 1j * q

    def neg(self, a):
        return np.negative(a)

    def __repr__(self):
        return f"JointAlgebra(cn_kernel={self._unq.cn_kernel!r})"


real_minsum = RealAlgebra(cn_kernel=_MINSUM)
real_exact = RealAlgebra(cn_kernel=_EXACT)
ternary = TernaryAlgebra()
joint_minsum = JointAlgebra(cn_kernel=_MINSUM)
