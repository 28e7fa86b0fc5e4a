"""Discrete transforms on the sphere and the rotation group.

All transforms use the normalized Haar measure (total volume 1) carried by
the quadrature grids from :mod:`homharm.groups`, and are exact for inputs
bandlimited below the grid bandwidth B.

Normalization: the forward transforms are plain weighted inner products with
the conjugated basis functions (matching the integral definition verbatim);
the (2l+1) plancherel weight sits in the inverse transforms.  Consequently
the forward SO(3) transform of D^l_{mn} itself is 1/(2l+1) at (l, m, n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import QuadratureGrid
from .harmonics import wigner_d_stack

# ---------------------------------------------------------------------------
# Coefficient containers
# ---------------------------------------------------------------------------


@dataclass
class ShtCoeffs:
    """Spherical-harmonic coefficients, one (2l+1)-vector per degree l < B.

    data[l] has shape [channels, 2l+1] with m indexed as m + l.
    """

    bandwidth: int
    data: list

    @property
    def channels(self) -> int:
        return self.data[0].shape[0]

    def copy(self) -> "ShtCoeffs":
        return ShtCoeffs(self.bandwidth, [b.copy() for b in self.data])


@dataclass
class SpectralBlocks:
    """Block Fourier coefficients of a function on SO(3).

    blocks[l] has shape [channels, 2l+1, 2l+1] with row m and column n
    indexed as m + l, n + l, for every degree l < bandwidth.
    """

    bandwidth: int
    blocks: list

    @property
    def channels(self) -> int:
        return self.blocks[0].shape[0]

    def copy(self) -> "SpectralBlocks":
        return SpectralBlocks(self.bandwidth, [b.copy() for b in self.blocks])

    @staticmethod
    def zeros(bandwidth: int, channels: int) -> "SpectralBlocks":
        return SpectralBlocks(bandwidth, [
            np.zeros((channels, 2 * l + 1, 2 * l + 1), dtype=complex)
            for l in range(bandwidth)])

    def norm_squared(self) -> float:
        """Plancherel norm: sum_l (2l+1) ||f_hat^l||_F^2 over all channels."""
        return float(sum((2 * l + 1) * np.sum(np.abs(b) ** 2)
                         for l, b in enumerate(self.blocks)))

    def column(self, n: int) -> list:
        """Column-sparse view: the n-column of every block with 2l+1 > ...

        Returns a list over l >= |n| of arrays [channels, 2l+1].
        """
        return [self.blocks[l][:, :, n + l]
                for l in range(abs(n), self.bandwidth)]

    def off_column_energy(self, n: int) -> float:
        """Energy (Plancherel-weighted) outside column n, for sparsity checks."""
        total = 0.0
        for l, b in enumerate(self.blocks):
            e = (2 * l + 1) * np.sum(np.abs(b) ** 2, axis=(0, 1))
            if abs(n) <= l:
                e = np.delete(e, n + l)
            total += float(np.sum(e))
        return total


# ---------------------------------------------------------------------------
# Internal helpers
# ---------------------------------------------------------------------------


def _require_grid(grid: QuadratureGrid, space: str):
    if grid.space != space:
        raise ValueError(f"expected a {space} grid, got {grid.space}")


def _as_channels(samples: np.ndarray, n_nodes: int) -> np.ndarray:
    """Coerce samples to complex [channels, n_nodes] (squeezing a unit dim)."""
    arr = np.asarray(samples)
    if arr.ndim == 3 and arr.shape[-1] == 1:
        arr = arr[..., 0]
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != n_nodes:
        raise ValueError(f"samples must have {n_nodes} nodes per channel, "
                         f"got shape {np.asarray(samples).shape}")
    return arr.astype(complex, copy=False)


def _alpha_phase(B: int, sign: int) -> np.ndarray:
    """Matrix E[m + B - 1, i] = exp(sign * i * m * alpha_i), m in -(B-1)..B-1."""
    m = np.arange(-(B - 1), B)
    alphas = np.pi * np.arange(2 * B) / B
    return np.exp(sign * 1j * np.outer(m, alphas))


# ---------------------------------------------------------------------------
# Spherical harmonic transform
# ---------------------------------------------------------------------------


def sht_forward(samples, grid: QuadratureGrid, bandwidth: int | None = None) -> ShtCoeffs:
    """Forward SHT: coefficients <Y^l_m, f> by quadrature; exact for l < B."""
    _require_grid(grid, "S2")
    B = grid.bandwidth
    if bandwidth is not None and bandwidth != B:
        raise ValueError("grid bandwidth and requested bandwidth differ")
    n = 2 * B
    f = _as_channels(samples, n * n).reshape(-1, n, n)
    # conj(Y^l_m) = sqrt(2l+1) exp(-i m alpha) d^l_{m0}(beta)
    E = _alpha_phase(B, -1)                      # [2B-1, 2B]
    F = np.einsum("mi,cij->cmj", E, f) / n       # alpha average
    wb = grid.beta_weights
    stack = wigner_d_stack(B - 1, grid.betas)
    data = []
    for l in range(B):
        dm0 = stack[l][:, :, l]                  # [2B, 2l+1] over beta
        Fl = F[:, (B - 1 - l):(B + l), :]        # rows m = -l..l
        coeff = np.sqrt(2 * l + 1) * np.einsum("cmj,jm,j->cm", Fl, dm0, wb)
        data.append(coeff)
    return ShtCoeffs(B, data)


def sht_inverse(coeffs: ShtCoeffs, grid: QuadratureGrid) -> np.ndarray:
    """Pointwise synthesis sum_{l,m} f^l_m Y^l_m on the grid nodes.

    Returns complex samples [channels, n_nodes].
    """
    _require_grid(grid, "S2")
    B = grid.bandwidth
    if coeffs.bandwidth > B:
        raise ValueError("coefficient bandwidth exceeds grid bandwidth")
    n = 2 * B
    C = coeffs.channels
    F = np.zeros((C, 2 * B - 1, n), dtype=complex)   # [c, m, beta]
    stack = wigner_d_stack(coeffs.bandwidth - 1, grid.betas)
    for l in range(coeffs.bandwidth):
        dm0 = stack[l][:, :, l]
        F[:, (B - 1 - l):(B + l), :] += np.sqrt(2 * l + 1) * np.einsum(
            "cm,jm->cmj", coeffs.data[l], dm0)
    E = _alpha_phase(B, +1)                          # Y carries exp(+i m alpha)
    f = np.einsum("mi,cmj->cij", E, F)
    return f.reshape(C, n * n)


# ---------------------------------------------------------------------------
# SO(3) Fourier transform
# ---------------------------------------------------------------------------


def so3_ft_forward(samples, grid: QuadratureGrid,
                   bandwidth: int | None = None) -> SpectralBlocks:
    """f_hat^l_{mn} = integral of f(g) conj(D^l_{mn}(g)) over normalized Haar.

    Separable evaluation: gamma DFT, then alpha DFT, then the weighted
    small-d sum over beta.
    """
    _require_grid(grid, "SO3")
    B = grid.bandwidth
    if bandwidth is None:
        bandwidth = B
    if bandwidth > B:
        raise ValueError("requested bandwidth exceeds grid bandwidth")
    n = 2 * B
    f = _as_channels(samples, n ** 3).reshape(-1, n, n, n)
    E = _alpha_phase(B, +1)                      # conj(D) carries e^{+i m alpha}
    G = np.einsum("nk,cijk->cijn", E, f) / n     # gamma first
    G = np.einsum("mi,cijn->cmjn", E, G) / n     # then alpha
    wb = grid.beta_weights
    stack = wigner_d_stack(bandwidth - 1, grid.betas)
    blocks = []
    for l in range(bandwidth):
        d = stack[l]                             # [2B, 2l+1, 2l+1]
        Gl = G[:, (B - 1 - l):(B + l), :, (B - 1 - l):(B + l)]
        blocks.append(np.einsum("cmjn,jmn,j->cmn", Gl, d, wb))
    return SpectralBlocks(bandwidth, blocks)


def so3_ft_inverse(blocks: SpectralBlocks, grid: QuadratureGrid) -> np.ndarray:
    """f(g) = sum_l (2l+1) tr(f_hat^l.T D^l(g)); returns [channels, n_nodes]."""
    _require_grid(grid, "SO3")
    B = grid.bandwidth
    if blocks.bandwidth > B:
        raise ValueError("block bandwidth exceeds grid bandwidth")
    n = 2 * B
    C = blocks.channels
    G = np.zeros((C, 2 * B - 1, n, 2 * B - 1), dtype=complex)  # [c, m, beta, n]
    stack = wigner_d_stack(blocks.bandwidth - 1, grid.betas)
    for l in range(blocks.bandwidth):
        d = stack[l]
        G[:, (B - 1 - l):(B + l), :, (B - 1 - l):(B + l)] += (
            (2 * l + 1) * np.einsum("cmn,jmn->cmjn", blocks.blocks[l], d))
    E = _alpha_phase(B, -1)                      # D carries e^{-i m alpha}
    f = np.einsum("nk,cmjn->cmjk", E, G)
    f = np.einsum("mi,cmjk->cijk", E, f)
    return f.reshape(C, n ** 3)


def fiber_dft(samples, grid: QuadratureGrid, order: int) -> np.ndarray:
    """Weighted DFT over the gamma fiber at each sphere point.

    out(alpha, beta) = sum_k w_k exp(i * order * gamma_k) f(alpha, beta, gamma_k);
    returns complex samples [channels, 4B^2] on the matching S^2 grid.
    """
    _require_grid(grid, "SO3")
    B = grid.bandwidth
    if abs(order) >= 2 * B:
        raise ValueError("fiber order outside the grid's resolvable range")
    n = 2 * B
    f = _as_channels(samples, n ** 3).reshape(-1, n, n, n)
    phase = np.exp(1j * order * grid.gammas) / n
    out = np.einsum("cijk,k->cij", f, phase)
    return out.reshape(-1, n * n)
