"""Joint (ternary, unquantized) density evolution and EPMU lookup tables.

A coupled decoder runs the three-level and the unquantized decoder on the
same channel realization; the joint law of their per-index outputs is
evolved componentwise (level tables for the ternary part, min-sum/addition
on the grid for the real part). From the per-index joint laws, the table
entry for (index, level, bit) is the conditional expectation of the exact
unquantized PM increment given the ternary level -- the mean-squared-error
optimal emulation of the unquantized update available to the quantized
decoder.

Tables are SNR-specific: one table per (code, operating Eb/N0).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .channel import BiAwgnParams, optimize_delta
from .de import LlrGrid, grid_cn_minsum_mass, grid_vn_mass
from .polar import CodeSpec
from .scl import _increment

__all__ = [
    "JointPmf",
    "EpmuTable",
    "snap_delta_to_edge",
    "joint_channel_pmf",
    "joint_cn",
    "joint_vn",
    "joint_evolve",
    "symmetrize",
    "build_epmu_table",
    "build_table_for",
    "code_hash",
]

_LEVELS = (-1, 0, 1)


@dataclass(frozen=True)
class JointPmf:
    """Joint mass over (ternary level, grid bin); row q+1 holds level q."""

    mass: np.ndarray  # (3, grid.size)

    def q_marginal(self) -> np.ndarray:
        return self.mass.sum(axis=1)

    def unq_marginal(self) -> np.ndarray:
        return self.mass.sum(axis=0)

    def total(self) -> float:
        return float(self.mass.sum())


def snap_delta_to_edge(grid: LlrGrid, delta: float) -> float:
    """Nearest bin edge to the threshold (so level regions align to bins)."""
    j = round(delta / grid.spacing - 0.5)
    return (j + 0.5) * grid.spacing


def joint_channel_pmf(params: BiAwgnParams, delta: float,
                      grid: LlrGrid | None = None) -> JointPmf:
    """Channel-interface joint law under the all-zero word.

    The unquantized LLR is Gaussian with mean mu and variance 2 mu, binned
    exactly; each ternary level carries the bins of its threshold region.
    The threshold is snapped to the nearest bin edge (error below half a
    bin), keeping the level supports exact per component.
    """
    grid = grid if grid is not None else LlrGrid()
    j = round(delta / grid.spacing - 0.5)
    if j < 0 or j + 1 > grid.half_bins:
        raise ValueError(f"threshold {delta} not representable on the grid")
    gauss = grid.gaussian_pmf(params.mu, 2.0 * params.mu)
    k = grid.half_bins
    mass = np.zeros((3, grid.size))
    mass[0, :k - j] = gauss[:k - j]
    mass[1, k - j:k + j + 1] = gauss[k - j:k + j + 1]
    mass[2, k + j + 1:] = gauss[k + j + 1:]
    return JointPmf(mass=mass)


def _normalized(mass: np.ndarray) -> JointPmf:
    total = mass.sum()
    if not 0.999999 < total < 1.000001:
        raise ValueError(f"joint mass not normalized: {total}")
    return JointPmf(mass=mass / total)


def joint_cn(a: JointPmf, b: JointPmf, grid: LlrGrid) -> JointPmf:
    """Componentwise check node: sign product on levels, min-sum on the grid."""
    out = np.zeros_like(a.mass)
    for q1 in _LEVELS:
        for q2 in _LEVELS:
            out[q1 * q2 + 1] += grid_cn_minsum_mass(grid, a.mass[q1 + 1], b.mass[q2 + 1])
    return _normalized(out)


def joint_vn(a: JointPmf, b: JointPmf, grid: LlrGrid) -> JointPmf:
    """Componentwise variable node: saturating sum on levels, sum on the grid."""
    out = np.zeros_like(a.mass)
    for q1 in _LEVELS:
        for q2 in _LEVELS:
            q = max(-1, min(1, q1 + q2))
            out[q + 1] += grid_vn_mass(grid, a.mass[q1 + 1], b.mass[q2 + 1])
    return _normalized(out)


def joint_evolve(m: int, channel: JointPmf,
                 grid: LlrGrid | None = None) -> list[JointPmf]:
    """Per-index joint laws for all 2^m synthetic channels (all-zero word).

    Same tree walk and index order as single-algebra evolution; the 2^d
    distinct distributions at depth d are each computed once.
    """
    grid = grid if grid is not None else LlrGrid()
    dists = [channel]
    for _ in range(m):
        dists = [child for w in dists
                 for child in (joint_cn(w, w, grid), joint_vn(w, w, grid))]
    return dists


def symmetrize(conditional: JointPmf, i: int, spec: CodeSpec) -> JointPmf:
    """Unconditional law: average with the negated law for information
    indices (level sign and grid both reflect); frozen indices unchanged."""
    if i not in spec.info_set:
        return conditional
    m = conditional.mass
    return JointPmf(mass=0.5 * (m + m[::-1, ::-1]))


@dataclass(frozen=True)
class EpmuTable:
    """Per-index PM increments for each (ternary level, decided bit)."""

    entries: np.ndarray  # (n, 3, 2); [i, q+1, u]
    code_hash: str
    ebn0_db: float
    delta: float         # quantizer threshold the table was built for

    def __post_init__(self):
        if np.min(self.entries) < -1e-12 or not np.isfinite(self.entries).all():
            raise ValueError("EPMU increments must be finite and nonnegative")

    def increment(self, i: int, q: int, u: int) -> float:
        return float(self.entries[i, q + 1, u])

    def to_json(self) -> str:
        return json.dumps({
            "code_hash": self.code_hash,
            "ebn0_db": self.ebn0_db,
            "delta": self.delta,
            "entries": self.entries.tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "EpmuTable":
        doc = json.loads(text)
        return cls(entries=np.asarray(doc["entries"], dtype=np.float64),
                   code_hash=doc["code_hash"], ebn0_db=doc["ebn0_db"],
                   delta=doc.get("delta", float("nan")))


def code_hash(spec: CodeSpec) -> str:
    return hashlib.sha256(spec.to_json().encode()).hexdigest()[:16]


def epmu_pm_update(table: EpmuTable, i: int, q_level: int, u: int, pm: float) -> float:
    """Path metric after the table increment for bit i."""
    return pm + table.increment(i, q_level, u)


def _exact_increment(values: np.ndarray, u: int) -> np.ndarray:
    s = values if u == 1 else -values
    return np.maximum(s, 0.0) + np.log1p(np.exp(-np.abs(s)))


def build_epmu_table(spec: CodeSpec, joints: list[JointPmf],
                     grid: LlrGrid | None = None, *,
                     integrand: str = "exact", recon_q: float = 1.0,
                     ebn0_db: float = float("nan"),
                     delta: float = float("nan")) -> EpmuTable:
    """Conditional-expectation table from per-index unconditional joints.

    ``integrand`` picks which unquantized increment is averaged: the exact
    one (default; free at build time) or the piecewise-linear refinement.
    Level cells with zero marginal (fully polarized indices) fall back to
    the refined increment at the reconstruction value; they are never hit
    in matched operation but must be defined.
    """
    grid = grid if grid is not None else LlrGrid()
    if integrand not in ("exact", "refined"):
        raise ValueError(f"unknown integrand {integrand!r}")
    vals = grid.values
    entries = np.zeros((spec.n, 3, 2))
    for i, joint in enumerate(joints):
        for q in _LEVELS:
            row = joint.mass[q + 1]
            marg = row.sum()
            for u in (0, 1):
                if marg <= 1e-300:
                    s = recon_q * q if u == 1 else -recon_q * q
                    entries[i, q + 1, u] = _increment("refined", np.float64(s))
                elif integrand == "exact":
                    entries[i, q + 1, u] = np.dot(row, _exact_increment(vals, u)) / marg
                else:
                    s = vals if u == 1 else -vals
                    entries[i, q + 1, u] = np.dot(row, _increment("refined", s)) / marg
    return EpmuTable(entries=np.maximum(entries, 0.0), code_hash=code_hash(spec),
                     ebn0_db=ebn0_db, delta=delta)


def build_table_for(spec: CodeSpec, ebn0_db: float, *,
                    grid: LlrGrid | None = None, integrand: str = "exact") -> EpmuTable:
    """End-to-end table build at an operating point: capacity-optimal
    threshold, joint channel law, joint evolution, symmetrization, table."""
    grid = grid if grid is not None else LlrGrid()
    params = BiAwgnParams.from_ebn0_db(ebn0_db, spec.rate)
    delta, _ = optimize_delta(params)
    channel = joint_channel_pmf(params, delta, grid)
    joints = joint_evolve(spec.m, channel, grid)
    joints = [symmetrize(j, i, spec) for i, j in enumerate(joints)]
    return build_epmu_table(spec, joints, grid, integrand=integrand,
                            ebn0_db=ebn0_db, delta=snap_delta_to_edge(grid, delta))
