"""Exact simulation of isotropic DPPs on S^1 and S^2.

Two-stage sampler: (1) draw independent Bernoulli variables with the
kernel eigenvalues as means, selecting a finite set of eigenfunctions;
(2) sample the resulting projection DPP sequentially.  With v(x) the
vector of selected eigenfunction values, point j+1 is drawn from the
density proportional to |v(x)|^2 minus its projection onto the span
absorbed so far, by rejection from the uniform law.  The rejection
envelope is the sum of per-eigenfunction sup |Y|^2 bounds (1/(2 pi)
per function on S^1; the factorial-ratio bound on S^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .harmonics import index_set, norm_plm_table, plm_sup_sq, sh_bound_sq
from .spectra import MercerSpectrum
from .sphere import PointPattern, SpherePoint, sample_uniform_angles, surface_measure


class SamplingError(RuntimeError):
    """Rejection cap exceeded or a conditional density went negative."""


@dataclass(frozen=True)
class ProjectionBasis:
    """Selected eigenfunction indices (l, k) with their magnitude bounds."""

    dim: int
    levels: np.ndarray  # int array, one entry per selected function
    orders: np.ndarray
    bounds_sq: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("projection bases exist for d in {1, 2} only")

    def __len__(self):
        return len(self.levels)

    @property
    def envelope(self) -> float:
        """Envelope constant for rejection: per level, the smaller of the
        summed per-index bounds and the addition-formula level sum
        m_(l,d)/sigma_d, which the pointwise |Y|^2 sum never exceeds."""
        sigma = surface_measure(self.dim)
        total = 0.0
        for ell in np.unique(self.levels):
            sel = self.levels == ell
            level_sum = len(index_set(int(ell), self.dim)) / sigma
            total += min(float(np.sum(self.bounds_sq[sel])), level_sum)
        return total

    @property
    def max_level(self) -> int:
        return int(self.levels.max()) if len(self.levels) else 0

    def eval_matrix(self, angles: np.ndarray) -> np.ndarray:
        """Eigenfunction values at a batch of points.

        ``angles`` has shape (B, dim); the result is complex of shape
        (B, n_basis).
        """
        B = angles.shape[0]
        if len(self) == 0:
            return np.zeros((B, 0), dtype=complex)
        if self.dim == 1:
            theta = angles[:, 0]
            freq = self.orders * self.levels
            return np.exp(1j * np.outer(theta, freq)) / math.sqrt(2.0 * math.pi)
        colat, lon = angles[:, 0], angles[:, 1]
        table = norm_plm_table(self.max_level, np.cos(colat))  # (L+1, L+1, B)
        vals = table[self.levels, np.abs(self.orders), :].T  # (B, n)
        phase = np.where((self.orders < 0) & (self.orders % 2 != 0), -1.0, 1.0)
        return vals * phase * np.exp(1j * np.outer(lon, self.orders))


@lru_cache(maxsize=16)
def _flat_indices(dim: int, n_levels: int):
    """Flattened (level, order) arrays covering all eigenfunctions of the
    first n_levels levels, in (l ascending, k ascending) order."""
    levels, orders = [], []
    for ell in range(n_levels):
        ks = index_set(ell, dim)
        levels.append(np.full(len(ks), ell, dtype=int))
        orders.append(np.array(ks, dtype=int))
    return np.concatenate(levels), np.concatenate(orders)


def draw_bernoulli_basis(spec: MercerSpectrum, rng: np.random.Generator) -> ProjectionBasis:
    """Select each eigenfunction (l, k) independently with probability
    lambda_(l,d); all orders at a level share the level's eigenvalue.

    One uniform variate is consumed per candidate index, in (l, k)
    order, so the draw is reproducible under a fixed generator state.
    """
    if spec.kind != "kernel":
        raise ValueError("basis selection needs a kernel spectrum")
    if spec.dim not in (1, 2):
        raise ValueError("sampling implemented for d in {1, 2} only")
    all_levels, all_orders = _flat_indices(spec.dim, len(spec.values))
    lam_flat = spec.values[all_levels]
    keep = rng.random(len(lam_flat)) < lam_flat
    levels = all_levels[keep]
    orders = all_orders[keep]
    if spec.dim == 1 or len(levels) == 0:
        bounds = np.array([sh_bound_sq(spec.dim, ell, k) for ell, k in zip(levels, orders)])
    else:
        # certified per-index sups, capped by the addition-formula bound;
        # the table is keyed on the spectrum length so draws share it
        sup = plm_sup_sq(len(spec.values) - 1)
        bounds = np.minimum(
            sup[levels, np.abs(orders)],
            (2.0 * levels + 1.0) / (4.0 * math.pi),
        )
    return ProjectionBasis(spec.dim, levels, orders, bounds)


@dataclass(frozen=True)
class SampleResult:
    pattern: PointPattern
    basis_size: int
    n_proposals: int
    acceptance_rate: float
    trunc_level: int

    def to_json(self) -> dict:
        return {
            "points": len(self.pattern),
            "basis_size": self.basis_size,
            "proposals": self.n_proposals,
            "acceptance_rate": self.acceptance_rate,
            "trunc_level": self.trunc_level,
        }


def sample_projection(
    basis: ProjectionBasis,
    rng: np.random.Generator,
    max_rejects: int = 10_000_000,
    batch: int = 64,
) -> SampleResult:
    """Draw the projection DPP attached to the selected eigenfunctions.

    Produces exactly len(basis) points.  Proposals are uniform points
    accepted with probability h(x)/M, where h is the unnormalized
    conditional density and M the envelope; after each accepted point
    the orthonormal set grows by one vector (modified Gram-Schmidt with
    one re-orthogonalization pass).
    """
    n = len(basis)
    if n == 0:
        return SampleResult(PointPattern(basis.dim, ()), 0, 0, float("nan"), 0)
    if basis.dim == 2:
        # keep the per-batch Legendre table under ~100 MB
        batch = max(4, min(batch, int(1.2e7 / (basis.max_level + 1) ** 2)))
    envelope = basis.envelope
    ortho = np.zeros((0, n), dtype=complex)
    accepted: list[SpherePoint] = []
    proposals = 0
    for _ in range(n):
        found = False
        point_proposals = 0
        while not found:
            if point_proposals > max_rejects:
                raise SamplingError(
                    f"rejection cap {max_rejects} exceeded at point "
                    f"{len(accepted) + 1}/{n}: envelope or normalization bug"
                )
            angles = sample_uniform_angles(basis.dim, batch, rng)
            uniforms = rng.random(batch)
            vmat = basis.eval_matrix(angles)  # (B, n)
            h = np.sum(np.abs(vmat) ** 2, axis=1)
            if len(ortho):
                h = h - np.sum(np.abs(ortho.conj() @ vmat.T) ** 2, axis=0)
            if np.any(h < -1e-9):
                raise SamplingError(
                    f"conditional density fell below -1e-9 (min {h.min():.3e})"
                )
            h = np.maximum(h, 0.0)
            hits = np.nonzero(uniforms * envelope < h)[0]
            if len(hits) == 0:
                proposals += batch
                point_proposals += batch
                continue
            i = int(hits[0])
            proposals += i + 1
            point_proposals += i + 1
            v = vmat[i]
            if len(ortho):
                v = v - ortho.T @ (ortho.conj() @ v)
                v = v - ortho.T @ (ortho.conj() @ v)  # re-orthogonalization pass
            norm = np.linalg.norm(v)
            if norm <= 0.0:
                raise SamplingError("degenerate direction during Gram-Schmidt")
            ortho = np.vstack([ortho, (v / norm)[None, :]])
            if basis.dim == 1:
                accepted.append(SpherePoint.circle(angles[i, 0]))
            else:
                accepted.append(SpherePoint.s2(angles[i, 0], angles[i, 1]))
            found = True
    pattern = PointPattern(basis.dim, tuple(accepted))
    return SampleResult(
        pattern, n, proposals, n / proposals if proposals else float("nan"),
        basis.max_level,
    )


def sample_dpp(model, rng: np.random.Generator, max_rejects: int = 10_000_000) -> SampleResult:
    """Sample a DPP from a resolved model or a kernel spectrum.

    Composition of the Bernoulli eigenvalue draw and projection
    sampling; an empty Bernoulli outcome legitimately yields the empty
    pattern.
    """
    spec = model if isinstance(model, MercerSpectrum) else model.kernel
    basis = draw_bernoulli_basis(spec, rng)
    result = sample_projection(basis, rng, max_rejects=max_rejects)
    return SampleResult(
        result.pattern,
        result.basis_size,
        result.n_proposals,
        result.acceptance_rate,
        len(spec.values) - 1,
    )
