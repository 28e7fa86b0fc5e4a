"""Typed tensor fields on homogeneous spaces, the induced group action, and
the lifting/projection isomorphism to Mackey functions on the group.

The S^2 pipeline represents an order-k field (SO(2) irrep e^{ik theta}) by
its samples on an equiangular grid.  Its "spin coefficients" are the SO(3)
Fourier coefficients of the lift, which occupy column n = k only:

    a^l_m = f_hat^l_{mk} = integral f(alpha, beta) e^{i m alpha}
                           d^l_{mk}(beta) dmu(alpha, beta)

with synthesis f(alpha, beta) = sum_l (2l+1) sum_m a^l_m e^{-i m alpha}
d^l_{mk}(beta).  Group actions are applied spectrally (rotate the coefficient
vectors by conjugated Wigner blocks), which is exact for bandlimited fields.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import QuadratureGrid, Rotation3, quadrature_grid
from .harmonics import wigner_D_matrix, wigner_d_stack
from .transforms import SpectralBlocks, _alpha_phase

# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldType:
    """Field type: the stabilizer irrep labelling the fiber of the field."""

    stabilizer: str   # "SO2" or "SO3"
    order: int

    def __post_init__(self):
        if self.stabilizer not in ("SO2", "SO3"):
            raise ValueError("stabilizer must be SO2 or SO3")
        if self.stabilizer == "SO3" and self.order < 0:
            raise ValueError("SO(3) irrep order must be nonnegative")

    @property
    def dimension(self) -> int:
        return 1 if self.stabilizer == "SO2" else 2 * self.order + 1


@dataclass
class TensorField:
    """Channelled samples of a field f: G/H -> V on a quadrature grid."""

    grid: QuadratureGrid
    field_type: FieldType
    samples: np.ndarray   # [channels, n_nodes, dim]

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=complex)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.shape[1] != self.grid.n_nodes or arr.shape[2] != self.field_type.dimension:
            raise ValueError(f"sample shape {arr.shape} inconsistent with grid "
                             f"({self.grid.n_nodes} nodes) and field dimension "
                             f"{self.field_type.dimension}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("field samples must be finite")
        self.samples = arr

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    def flat(self) -> np.ndarray:
        """Samples as [channels, n_nodes] (SO(2)-order fields only)."""
        return self.samples[:, :, 0]


@dataclass
class GroupFunction:
    """Channelled samples of a function on an SO(3) quadrature grid."""

    grid: QuadratureGrid
    samples: np.ndarray   # [channels, n_nodes, dim]

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=complex)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.shape[1] != self.grid.n_nodes:
            raise ValueError("sample count does not match the grid")
        self.samples = arr

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    def flat(self) -> np.ndarray:
        return self.samples[:, :, 0]


# ---------------------------------------------------------------------------
# Lifting and projection (S^2 / SO(3))
# ---------------------------------------------------------------------------


def _check_s2_order(field: TensorField):
    if field.grid.space != "S2" or field.field_type.stabilizer != "SO2":
        raise ValueError("expected an SO(2)-order field on an S2 grid")
    if abs(field.field_type.order) >= field.grid.bandwidth:
        raise ValueError("field order must satisfy |k| < grid bandwidth")


def lift(field: TensorField, group_grid: QuadratureGrid | None = None) -> GroupFunction:
    """Lift an order-k field on S^2 to its Mackey function on SO(3):
    f_up(alpha, beta, gamma) = exp(-i k gamma) f(alpha, beta).
    """
    _check_s2_order(field)
    B = field.grid.bandwidth
    if group_grid is None:
        group_grid = quadrature_grid("SO3", B)
    elif group_grid.space != "SO3" or group_grid.bandwidth != B:
        raise ValueError("group grid must be the SO(3) grid of the same bandwidth")
    n = 2 * B
    k = field.field_type.order
    phase = np.exp(-1j * k * group_grid.gammas)
    vals = field.flat().reshape(-1, n, n, 1) * phase[None, None, None, :]
    return GroupFunction(group_grid, vals.reshape(-1, n ** 3))


def project(gf: GroupFunction, field_type: FieldType,
            s2_grid: QuadratureGrid | None = None) -> TensorField:
    """Restrict a (near-)Mackey function to the gamma = 0 slice."""
    B = gf.grid.bandwidth
    if s2_grid is None:
        s2_grid = quadrature_grid("S2", B)
    n = 2 * B
    vals = gf.flat().reshape(-1, n, n, n)[:, :, :, 0]
    return TensorField(s2_grid, field_type, vals.reshape(-1, n * n))


def is_mackey(gf: GroupFunction, field_type: FieldType,
              tol: float = 1e-10) -> tuple[bool, float]:
    """Check the Mackey property m(g h) = rho(h^{-1}) m(g) on grid-aligned h.

    Grid-aligned stabilizer elements are the gamma shifts by pi/B; the
    residual is the max norm of the defect over all shifts and nodes.
    """
    B = gf.grid.bandwidth
    n = 2 * B
    k = field_type.order
    vals = gf.flat().reshape(-1, n, n, n)
    scale = max(1.0, float(np.abs(vals).max()))
    residual = 0.0
    for shift in range(1, n):
        theta = gf.grid.gammas[shift]
        shifted = np.roll(vals, -shift, axis=3)   # m(g * h_theta)
        expected = np.exp(-1j * k * theta) * vals
        residual = max(residual, float(np.abs(shifted - expected).max()) / scale)
    return residual <= tol, residual


# ---------------------------------------------------------------------------
# Spin coefficients (column view of the lifted spectrum)
# ---------------------------------------------------------------------------


def spin_coeffs(field: TensorField) -> list:
    """Spectral coefficients a^l_m = f_hat^l_{mk} for l = |k|..B-1.

    Returns a list indexed by l (entries below |k| are None) of arrays
    [channels, 2l+1].
    """
    _check_s2_order(field)
    B = field.grid.bandwidth
    k = field.field_type.order
    n = 2 * B
    f = field.flat().reshape(-1, n, n)
    E = _alpha_phase(B, +1)
    F = np.einsum("mi,cij->cmj", E, f) / n
    wb = field.grid.beta_weights
    stack = wigner_d_stack(B - 1, field.grid.betas)
    out: list = [None] * B
    for l in range(abs(k), B):
        dmk = stack[l][:, :, l + k]            # [2B, 2l+1]
        Fl = F[:, (B - 1 - l):(B + l), :]
        out[l] = np.einsum("cmj,jm,j->cm", Fl, dmk, wb)
    return out


def spin_synthesis(coeffs: list, order: int, grid: QuadratureGrid,
                   channels: int | None = None) -> np.ndarray:
    """Synthesize samples of an order-k field from its spin coefficients.

    coeffs may come from a grid of different bandwidth; degrees above the
    target grid's resolvable range must be absent.
    """
    B = grid.bandwidth
    k = order
    n = 2 * B
    lmax = max((l for l, c in enumerate(coeffs) if c is not None), default=-1)
    if lmax >= B:
        raise ValueError("coefficients exceed the target grid bandwidth")
    if channels is None:
        channels = next(c.shape[0] for c in coeffs if c is not None)
    F = np.zeros((channels, 2 * B - 1, n), dtype=complex)
    stack = wigner_d_stack(max(lmax, 0), grid.betas)
    for l in range(abs(k), lmax + 1):
        if coeffs[l] is None:
            continue
        dmk = stack[l][:, :, l + k]
        F[:, (B - 1 - l):(B + l), :] += (2 * l + 1) * np.einsum(
            "cm,jm->cmj", coeffs[l], dmk)
    E = _alpha_phase(B, -1)                    # synthesis carries e^{-i m alpha}
    f = np.einsum("mi,cmj->cij", E, F)
    return f.reshape(channels, n * n)


def field_from_spin_coeffs(coeffs: list, order: int,
                           grid: QuadratureGrid) -> TensorField:
    samples = spin_synthesis(coeffs, order, grid)
    return TensorField(grid, FieldType("SO2", order), samples)


def resample(field: TensorField, new_bandwidth: int) -> TensorField:
    """Bandlimited resampling of an order-k field onto a finer/coarser grid.

    Coarsening silently truncates degrees >= new bandwidth.
    """
    coeffs = spin_coeffs(field)
    coeffs = coeffs[:new_bandwidth]
    grid = quadrature_grid("S2", new_bandwidth)
    return field_from_spin_coeffs(coeffs, field.field_type.order, grid)


# ---------------------------------------------------------------------------
# Group actions
# ---------------------------------------------------------------------------


def induced_action(g: Rotation3, field: TensorField) -> TensorField:
    """Induced-representation action on an order-k field:
    (L_g f)(x) = rho(h(g^{-1}, x)^{-1}) f(g^{-1} x).

    Implemented spectrally: the lifted spectrum transforms by left
    multiplication with conj(D^l(g)), which preserves the Mackey column.
    Exact for bandlimited fields.
    """
    _check_s2_order(field)
    coeffs = spin_coeffs(field)
    out: list = [None] * len(coeffs)
    for l, a in enumerate(coeffs):
        if a is None:
            continue
        D = wigner_D_matrix(l, g)
        out[l] = np.einsum("mn,cn->cm", np.conj(D), a)
    return field_from_spin_coeffs(out, field.field_type.order, field.grid)


def regular_action(g: Rotation3, gf: GroupFunction,
                   bandwidth: int | None = None) -> GroupFunction:
    """Left regular action (L'_g m)(k) = m(g^{-1} k), applied spectrally.

    Exact for functions bandlimited below the grid bandwidth.
    """
    from .transforms import so3_ft_forward, so3_ft_inverse
    blocks = so3_ft_forward(gf.flat(), gf.grid, bandwidth)
    rotated = []
    for l, b in enumerate(blocks.blocks):
        D = np.conj(wigner_D_matrix(l, g))
        rotated.append(np.einsum("mj,cjn->cmn", D, b))
    out = so3_ft_inverse(SpectralBlocks(blocks.bandwidth, rotated), gf.grid)
    return GroupFunction(gf.grid, out)


def lift_spectrum(field: TensorField) -> SpectralBlocks:
    """SO(3) Fourier blocks of the lifted field (column-sparse at n = k)."""
    _check_s2_order(field)
    B = field.grid.bandwidth
    k = field.field_type.order
    coeffs = spin_coeffs(field)
    blocks = SpectralBlocks.zeros(B, field.channels)
    for l in range(abs(k), B):
        blocks.blocks[l][:, :, k + l] = coeffs[l]
    return blocks
