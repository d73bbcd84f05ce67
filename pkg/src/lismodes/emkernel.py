"""Scalar free-space Green function and the discretized transmit-to-receive coupling operator."""

from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from lismodes.errors import InvalidArgument, InvalidInput, ResourceLimitError, SingularKernelError
from lismodes.geometry import Mesh, Wave

DEFAULT_MEMORY_CAP = 1 << 30  # bytes
_BLOCK_ROWS = 2048


def green_scalar(r, s, wave: Wave, time_sign: int = 1) -> complex:
    """exp(-j k R) / (4 pi R) for the e^{+j w t} convention.

    ``time_sign=-1`` selects the e^{-j w t} convention (conjugate kernel).
    """
    R = float(np.linalg.norm(np.asarray(r, dtype=float) - np.asarray(s, dtype=float)))
    if R == 0.0:
        raise SingularKernelError("source and observation points coincide")
    return complex(np.exp(-1j * time_sign * wave.wavenumber * R) / (4.0 * math.pi * R))


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    """Dense M_R x M_T matrix; row m is receive point m, column n transmit point n.

    Entry (m, n) is g(|r_m - s_n|) sqrt(w_m w_n), so its singular values
    approximate those of the continuous operator.
    """

    entries: np.ndarray
    wave: Wave
    tx_label: str = ""
    rx_label: str = ""

    @property
    def shape(self) -> tuple:
        return self.entries.shape

    def frobenius2(self) -> float:
        e = self.entries
        return float(np.vdot(e, e).real)

    def transpose(self) -> "CouplingMatrix":
        return CouplingMatrix(self.entries.T.copy(), self.wave, self.rx_label, self.tx_label)

    def dump(self, path) -> None:
        """Debug dump: two little-endian uint64 dims, then row-major complex64 (re, im) pairs."""
        rows, cols = self.entries.shape
        data = np.ascontiguousarray(self.entries, dtype="<c8")
        with open(path, "wb") as fh:
            fh.write(struct.pack("<QQ", rows, cols))
            fh.write(data.tobytes())

    @staticmethod
    def load_entries(path) -> np.ndarray:
        raw = Path(path).read_bytes()
        rows, cols = struct.unpack_from("<QQ", raw)
        return np.frombuffer(raw, dtype="<c8", offset=16, count=rows * cols).reshape(rows, cols)


def dense_bytes(n_rows: int, n_cols: int) -> int:
    return 16 * n_rows * n_cols


def _kernel_block(
    rx_points: np.ndarray,
    rx_sqrt_w: np.ndarray,
    tx_points: np.ndarray,
    tx_sqrt_w: np.ndarray,
    k: float,
) -> np.ndarray:
    diff = rx_points[:, None, :] - tx_points[None, :, :]
    R = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    if np.any(R == 0.0):
        raise SingularKernelError("a transmit mesh point coincides with a receive mesh point")
    out = np.exp(-1j * k * R)
    out /= 4.0 * math.pi * R
    out *= rx_sqrt_w[:, None]
    out *= tx_sqrt_w[None, :]
    return out


def _check_meshes(mesh_t: Mesh, mesh_r: Mesh) -> None:
    if len(mesh_t) == 0 or len(mesh_r) == 0:
        raise InvalidArgument("meshes must be non-empty")
    for m in (mesh_t, mesh_r):
        if not (np.all(np.isfinite(m.points)) and np.all(np.isfinite(m.weights))):
            raise InvalidInput("mesh contains non-finite values")


def assemble_coupling_matrix(
    mesh_t: Mesh,
    mesh_r: Mesh,
    wave: Wave,
    *,
    memory_cap: int = DEFAULT_MEMORY_CAP,
    workers: int = 1,
    block_rows: int = _BLOCK_ROWS,
    time_sign: int = 1,
) -> CouplingMatrix:
    """Assemble the dense coupling matrix in row blocks.

    Each block is computed independently with the same operations, so
    threaded assembly (``workers > 1``) is bit-identical to sequential.
    """
    _check_meshes(mesh_t, mesh_r)
    m_r, m_t = len(mesh_r), len(mesh_t)
    need = dense_bytes(m_r, m_t)
    if need > memory_cap:
        raise ResourceLimitError(need, memory_cap)
    k = time_sign * wave.wavenumber
    sw_t = np.sqrt(mesh_t.weights)
    sw_r = np.sqrt(mesh_r.weights)
    entries = np.empty((m_r, m_t), dtype=complex)
    starts = range(0, m_r, block_rows)

    def fill(i0: int) -> None:
        i1 = min(i0 + block_rows, m_r)
        entries[i0:i1] = _kernel_block(mesh_r.points[i0:i1], sw_r[i0:i1], mesh_t.points, sw_t, k)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, starts))
    else:
        for i0 in starts:
            fill(i0)
    return CouplingMatrix(entries, wave, _label(mesh_t), _label(mesh_r))


def coupling_gram(
    mesh_t: Mesh,
    mesh_r: Mesh,
    wave: Wave,
    *,
    block_rows: int = _BLOCK_ROWS,
) -> np.ndarray:
    """Gram matrix of the coupling operator without storing it.

    The result is a Hermitian matrix whose side is the smaller mesh size and
    whose eigenvalues are the squared singular values of K (it is K^H K when
    the transmit mesh is smaller, else the conjugate of K K^H). Memory use
    is one row block plus the Gram matrix itself.
    """
    _check_meshes(mesh_t, mesh_r)
    small, big = (mesh_t, mesh_r) if len(mesh_t) <= len(mesh_r) else (mesh_r, mesh_t)
    k = wave.wavenumber
    sw_s = np.sqrt(small.weights)
    sw_b = np.sqrt(big.weights)
    gram = np.zeros((len(small), len(small)), dtype=complex)
    for i0 in range(0, len(big), block_rows):
        i1 = min(i0 + block_rows, len(big))
        block = _kernel_block(big.points[i0:i1], sw_b[i0:i1], small.points, sw_s, k)
        gram += block.conj().T @ block
    return gram


def _label(mesh: Mesh) -> str:
    s = mesh.surface
    c = ",".join(f"{x:.6g}" for x in s.center)
    return f"rect[{s.len_u:.6g}x{s.len_v:.6g}@({c})]/{mesh.shape[0]}x{mesh.shape[1]}"
