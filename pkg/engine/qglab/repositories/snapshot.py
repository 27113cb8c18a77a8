"""QGCF binary field snapshots.

Little-endian header: magic b"QGCF", then u32 version, N_x, N_y, N_z, component count;
followed by complex64 coefficients, components outermost, then x, y, z in FFT order.
"""
from pathlib import Path

import numpy as np

from ..core.errors import SnapshotFormatError
from ..services.spectral import GridSpec, SpectralField

MAGIC = b"QGCF"
VERSION = 1
_HEADER = np.dtype("<u4")
_COEFF = np.dtype("<c8")


class SnapshotRepository:
    def __init__(self, output_dir: str | Path):
        self.output_dir = Path(output_dir)

    def save(self, name: str, field: SpectralField) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = self.output_dir / f"{name}.qgcf"
        components = int(np.prod(field.shape)) if field.shape else 1
        header = np.array([VERSION, *field.grid.shape, components], dtype=_HEADER)
        with path.open("wb") as fh:
            fh.write(MAGIC)
            fh.write(header.tobytes())
            fh.write(field.coeffs.astype(_COEFF).tobytes())
        return path

    def load(self, name: str, dealias: str = "slicewise", shape: tuple[int, ...] | None = None) -> SpectralField:
        """Read a snapshot; shape restores the component layout (defaults to flat components)."""
        path = self.output_dir / f"{name}.qgcf"
        data = path.read_bytes()
        if data[:4] != MAGIC:
            raise SnapshotFormatError(f"{path}: bad magic {data[:4]!r}")
        header_end = 4 + 5 * _HEADER.itemsize
        if len(data) < header_end:
            raise SnapshotFormatError(f"{path}: truncated header")
        version, nx, ny, nz, components = (int(v) for v in np.frombuffer(data[4:header_end], dtype=_HEADER))
        if version != VERSION:
            raise SnapshotFormatError(f"{path}: unsupported version {version}")
        expected = components * nx * ny * nz * _COEFF.itemsize
        if len(data) - header_end != expected:
            raise SnapshotFormatError(f"{path}: expected {expected} coefficient bytes, found {len(data) - header_end}")
        grid = GridSpec(nx, ny, nz, dealias)
        coeffs = np.frombuffer(data[header_end:], dtype=_COEFF).astype(complex)
        if shape is None:
            shape = () if components == 1 else (components,)
        if int(np.prod(shape)) != components:
            raise SnapshotFormatError(f"{path}: {components} components cannot take shape {shape}")
        return SpectralField(grid, coeffs.reshape(tuple(shape) + grid.shape))
