"""Fourier-domain convolution with column-constrained sparse kernels.

A kernel mapping order m_in fields to order m_out fields is determined by
one scalar c^l per degree l >= max(|m_in|, |m_out|): its Mackey function on
SO(3) is

    kappa(g) = sum_l c^l D^l_{m_in, m_out}(g)

and convolution acts on the lifted spectrum blockwise as
out_hat^l = in_hat^l @ kappa_hat^l.  The input is column-sparse at n = m_in
and kappa_hat^l is nonzero only at entry (m_in, m_out), where it equals
c^l / (2l+1) under our forward-transform normalization (the Plancherel
weight lives in the inverse transform).  The whole operation therefore
collapses to scaling the input column by c^l / (2l+1) and relabelling it as
column m_out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import QuadratureGrid, Rotation3, quadrature_grid
from .harmonics import wigner_d_stack
from .fields import FieldType, TensorField, field_from_spin_coeffs, spin_coeffs
from .transforms import SpectralBlocks

__all__ = [
    "SparseKernelSpec", "kernel_degrees", "conv_spectral", "conv_field",
    "kernel_to_spatial", "conv_spatial_oracle", "conv_vjp",
    "spectral_identity_kernel",
]


def kernel_degrees(m_in: int, m_out: int, bandwidth: int) -> range:
    """Degrees carrying kernel coefficients: max(|m_in|,|m_out|) .. B-1."""
    return range(max(abs(m_in), abs(m_out)), bandwidth)


@dataclass
class SparseKernelSpec:
    """Sparse spectral kernel: one complex scalar per degree and channel pair.

    coeffs has shape [c_out, c_in, n_l] where n_l covers the degrees
    l = max(|m_in|, |m_out|) .. bandwidth-1 in order.
    """

    m_in: int
    m_out: int
    bandwidth: int
    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=complex)
        if arr.ndim == 1:
            arr = arr[None, None, :]
        n_l = len(kernel_degrees(self.m_in, self.m_out, self.bandwidth))
        if n_l <= 0:
            raise ValueError("kernel orders exceed the bandwidth")
        if arr.ndim != 3 or arr.shape[2] != n_l:
            raise ValueError(f"coeffs must have shape [c_out, c_in, {n_l}], "
                             f"got {np.asarray(self.coeffs).shape}")
        self.coeffs = arr

    @property
    def c_out(self) -> int:
        return self.coeffs.shape[0]

    @property
    def c_in(self) -> int:
        return self.coeffs.shape[1]

    @property
    def degrees(self) -> range:
        return kernel_degrees(self.m_in, self.m_out, self.bandwidth)

    def coeff(self, l: int) -> np.ndarray:
        """[c_out, c_in] coefficient matrix of degree l."""
        lo = self.degrees.start
        if not lo <= l < self.bandwidth:
            raise ValueError(f"degree {l} outside kernel range")
        return self.coeffs[:, :, l - lo]


def spectral_identity_kernel(m: int, bandwidth: int,
                             channels: int = 1) -> SparseKernelSpec:
    """Kernel acting as identity on order-m fields: c^l = 2l+1."""
    degs = kernel_degrees(m, m, bandwidth)
    c = np.zeros((channels, channels, len(degs)), dtype=complex)
    for i, l in enumerate(degs):
        c[:, :, i] = (2 * l + 1) * np.eye(channels)
    return SparseKernelSpec(m, m, bandwidth, c)


# ---------------------------------------------------------------------------
# Spectral convolution
# ---------------------------------------------------------------------------


def conv_spectral(blocks: SpectralBlocks, kernel: SparseKernelSpec,
                  sparsity_tol: float = 1e-8) -> SpectralBlocks:
    """Convolve column-sparse spectral blocks with a sparse kernel.

    The input must be column-sparse at n = m_in (relative off-column energy
    above sparsity_tol is an error); the output is column-sparse at
    n = m_out with

        out_hat^l_{m, m_out} = sum_{c_in} (c^l / (2l+1)) in_hat^l_{m, m_in}.
    """
    if blocks.bandwidth != kernel.bandwidth:
        raise ValueError("kernel and input bandwidths differ")
    if blocks.channels != kernel.c_in:
        raise ValueError(f"kernel expects {kernel.c_in} input channels, "
                         f"got {blocks.channels}")
    total = blocks.norm_squared()
    off = blocks.off_column_energy(kernel.m_in)
    if total > 0 and off / total > sparsity_tol ** 2:
        raise ValueError("input spectrum is not column-sparse at the kernel's "
                         f"input order (relative off-column energy {off / total:.3e})")
    out = SpectralBlocks.zeros(blocks.bandwidth, kernel.c_out)
    for l in kernel.degrees:
        col = blocks.blocks[l][:, :, kernel.m_in + l]       # [c_in, 2l+1]
        scale = kernel.coeff(l) / (2 * l + 1)               # [c_out, c_in]
        out.blocks[l][:, :, kernel.m_out + l] = np.einsum("oi,im->om", scale, col)
    return out


def conv_field(field: TensorField, kernel: SparseKernelSpec) -> TensorField:
    """Convolve an order-m_in field on S^2, producing an order-m_out field."""
    if field.grid.bandwidth != kernel.bandwidth:
        raise ValueError("kernel and grid bandwidths differ")
    if field.field_type.order != kernel.m_in:
        raise ValueError(f"kernel expects input order {kernel.m_in}, "
                         f"field has order {field.field_type.order}")
    if field.channels != kernel.c_in:
        raise ValueError("channel mismatch between field and kernel")
    a = spin_coeffs(field)
    out: list = [None] * kernel.bandwidth
    for l in kernel.degrees:
        scale = kernel.coeff(l) / (2 * l + 1)
        out[l] = np.einsum("oi,im->om", scale, a[l])
    return field_from_spin_coeffs(out, kernel.m_out, field.grid)


# ---------------------------------------------------------------------------
# Spatial views and the direct-space oracle
# ---------------------------------------------------------------------------


def kernel_to_spatial(kernel: SparseKernelSpec,
                      grid: QuadratureGrid | None = None) -> np.ndarray:
    """Sample the kernel's Mackey function kappa(g) = sum_l c^l D^l_{m_in,m_out}(g)
    on an SO(3) grid.  Channel pairs are flattened row-major to
    [c_out * c_in, n_nodes].
    """
    if grid is None:
        grid = quadrature_grid("SO3", kernel.bandwidth)
    elif grid.space != "SO3":
        raise ValueError("kernel_to_spatial needs an SO(3) grid")
    stack = wigner_d_stack(kernel.bandwidth - 1, grid.betas)
    n = 2 * grid.bandwidth
    a = grid.alphas.reshape(n, 1, 1)
    b_idx = np.arange(n)
    g = grid.gammas.reshape(1, 1, n)
    vals = np.zeros((kernel.c_out * kernel.c_in, n, n, n), dtype=complex)
    for l in kernel.degrees:
        d = stack[l][:, kernel.m_in + l, kernel.m_out + l]   # [n] over beta
        basis = (np.exp(-1j * kernel.m_in * a) * d[b_idx].reshape(1, n, 1)
                 * np.exp(-1j * kernel.m_out * g))
        c = kernel.coeff(l).reshape(-1)                      # [c_out*c_in]
        vals += c[:, None, None, None] * basis[None]
    return vals.reshape(-1, grid.n_nodes)


def _relative_euler(alpha_out, beta_out, alphas_in, betas_in):
    """ZYZ Euler angles of Q = R(a', b', 0)^{-1} R(a, b, 0) for one output
    node against all input nodes.  Vectorized over the input grid.
    """
    ca, sa = np.cos(alpha_out), np.sin(alpha_out)
    cb, sb = np.cos(beta_out), np.sin(beta_out)
    R = np.array([[ca * cb, -sa, ca * sb],
                  [sa * cb, ca, sa * sb],
                  [-sb, 0.0, cb]])
    cap, sap = np.cos(alphas_in), np.sin(alphas_in)
    cbp, sbp = np.cos(betas_in), np.sin(betas_in)
    # rows of R(a', b', 0)^T, applied to the columns of R
    Rp = np.empty((len(alphas_in), 3, 3))
    Rp[:, 0, 0] = cap * cbp
    Rp[:, 0, 1] = sap * cbp
    Rp[:, 0, 2] = -sbp
    Rp[:, 1, 0] = -sap
    Rp[:, 1, 1] = cap
    Rp[:, 1, 2] = 0.0
    Rp[:, 2, 0] = cap * sbp
    Rp[:, 2, 1] = sap * sbp
    Rp[:, 2, 2] = cbp
    Q = Rp @ R
    sin_b = np.hypot(Q[:, 0, 2], Q[:, 1, 2])
    beta = np.arctan2(sin_b, Q[:, 2, 2])
    alpha = np.where(sin_b > 1e-12, np.arctan2(Q[:, 1, 2], Q[:, 0, 2]), 0.0)
    gamma = np.where(sin_b > 1e-12, np.arctan2(Q[:, 2, 1], -Q[:, 2, 0]), 0.0)
    # gimbal: beta = 0 leaves only alpha + gamma determined (fold into gamma),
    # beta = pi only alpha - gamma (fold into alpha)
    gimbal = sin_b <= 1e-12
    if np.any(gimbal):
        flip = Q[:, 2, 2] < 0
        sum_ang = np.arctan2(Q[:, 1, 0], Q[:, 0, 0])
        diff_ang = np.arctan2(-Q[:, 0, 1], Q[:, 1, 1])
        alpha = np.where(gimbal, np.where(flip, diff_ang, 0.0), alpha)
        gamma = np.where(gimbal, np.where(flip, 0.0, sum_ang), gamma)
        beta = np.where(gimbal, np.where(flip, np.pi, 0.0), beta)
    return alpha, beta, gamma


def conv_spatial_oracle(field: TensorField, kernel: SparseKernelSpec) -> TensorField:
    """Direct-space convolution on S^2, quadratic in the number of nodes.

    For each output node x with section s(x) = R(alpha, beta, 0),

        f_out(x) = sum_{x'} w' exp(-i m_out gamma_Q) kappa'(alpha_Q, beta_Q)
                   f_in(x')

    where Q = s(x')^{-1} s(x) with Euler angles (alpha_Q, beta_Q, gamma_Q),
    and kappa'(a, b) = sum_l c^l e^{-i m_in a} d^l_{m_in, m_out}(b) is the
    kernel's gamma = 0 profile.  The twist phase on gamma_Q carries the
    output order.  Used only as an independent check on conv_spectral.
    """
    if field.field_type.order != kernel.m_in:
        raise ValueError("field order does not match the kernel input order")
    if field.channels != kernel.c_in:
        raise ValueError("channel mismatch between field and kernel")
    grid = field.grid
    w = grid.weights
    node_alphas = grid.nodes[:, 0]
    node_betas = grid.nodes[:, 1]
    fin = field.flat()                                  # [c_in, N]
    degs = list(kernel.degrees)
    out = np.zeros((kernel.c_out, grid.n_nodes), dtype=complex)
    for node in range(grid.n_nodes):
        a_q, b_q, g_q = _relative_euler(node_alphas[node], node_betas[node],
                                        node_alphas, node_betas)
        d_cols = wigner_d_stack(kernel.bandwidth - 1, b_q)
        kap = np.zeros((kernel.c_out, kernel.c_in, grid.n_nodes), dtype=complex)
        phase_a = np.exp(-1j * kernel.m_in * a_q)
        for l in degs:
            d = d_cols[l][:, kernel.m_in + l, kernel.m_out + l]
            kap += kernel.coeff(l)[:, :, None] * (phase_a * d)[None, None, :]
        integrand = kap * np.exp(-1j * kernel.m_out * g_q)[None, None, :]
        out[:, node] = np.einsum("oip,ip,p->o", integrand, fin, w)
    return TensorField(grid, FieldType("SO2", kernel.m_out), out)


# ---------------------------------------------------------------------------
# Gradients
# ---------------------------------------------------------------------------


def conv_vjp(blocks: SpectralBlocks, kernel: SparseKernelSpec,
             cotangent: SpectralBlocks) -> tuple:
    """Vector-Jacobian products of conv_spectral under the plain real pairing
    Re<u, v> = Re sum conj(u) v over all block entries (no Plancherel weight).

    Returns (vjp_blocks, vjp_coeffs) with vjp_coeffs shaped like
    kernel.coeffs.
    """
    if cotangent.bandwidth != kernel.bandwidth:
        raise ValueError("cotangent bandwidth mismatch")
    vjp_in = SpectralBlocks.zeros(blocks.bandwidth, kernel.c_in)
    vjp_c = np.zeros_like(kernel.coeffs)
    lo = kernel.degrees.start
    for l in kernel.degrees:
        u = cotangent.blocks[l][:, :, kernel.m_out + l]     # [c_out, 2l+1]
        col = blocks.blocks[l][:, :, kernel.m_in + l]       # [c_in, 2l+1]
        scale = np.conj(kernel.coeff(l)) / (2 * l + 1)
        vjp_in.blocks[l][:, :, kernel.m_in + l] = np.einsum("oi,om->im", scale, u)
        vjp_c[:, :, l - lo] = np.einsum("im,om->oi", np.conj(col), u) / (2 * l + 1)
    return vjp_in, vjp_c
