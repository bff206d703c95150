"""Binary checkpoint format for bit-exact save/resume.

Layout (little-endian):

    bytes 0..3    magic "MHD2"
    u32           format version (1)
    u32, u32      n1, n2
    f64 x 4       mu, lambda, gamma, time
    5 arrays      rho, u1, u2, b1, b2 coefficients, each n1*n2 complex
                  values as interleaved (re, im) f64, row-major k-order

Loading a truncated or mismatched file raises without producing a
partial state.
"""

from __future__ import annotations

import struct

import numpy as np

from .dynamics import PhysParams, PressureLaw, State
from .spectral import Grid, ScalarField, VectorField

MAGIC = b"MHD2"
VERSION = 1
_HEADER = struct.Struct("<4sIIIdddd")


class CheckpointError(RuntimeError):
    pass


def save_checkpoint(state: State, params: PhysParams, path) -> None:
    g = state.grid
    header = _HEADER.pack(MAGIC, VERSION, g.n1, g.n2,
                          params.mu, params.lam, params.pressure.gamma,
                          state.time)
    with open(path, "wb") as fh:
        fh.write(header)
        for c in (state.rho.coeffs, state.u.x1.coeffs, state.u.x2.coeffs,
                  state.b.x1.coeffs, state.b.x2.coeffs):
            fh.write(np.ascontiguousarray(c, dtype="<c16").tobytes())


def load_checkpoint(path, expect_grid: Grid | None = None):
    """Read a checkpoint; returns (state, params) bit-identical to save."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise CheckpointError("truncated checkpoint header")
    magic, version, n1, n2, mu, lam, gamma, time = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise CheckpointError(f"bad magic {magic!r}")
    if version != VERSION:
        raise CheckpointError(f"unsupported format version {version}")
    if expect_grid is not None and (expect_grid.n1, expect_grid.n2) != (n1, n2):
        raise CheckpointError(
            f"checkpoint grid {n1}x{n2} does not match expected "
            f"{expect_grid.n1}x{expect_grid.n2}")
    need = _HEADER.size + 5 * n1 * n2 * 16
    if len(blob) != need:
        raise CheckpointError(
            f"checkpoint length {len(blob)} does not match expected {need}")
    grid = expect_grid if expect_grid is not None else Grid(int(n1), int(n2))
    arrays = []
    off = _HEADER.size
    count = n1 * n2
    for _ in range(5):
        a = np.frombuffer(blob, dtype="<c16", count=count, offset=off)
        arrays.append(a.reshape(n1, n2).astype(complex))
        off += count * 16
    state = State(
        ScalarField(grid, arrays[0]),
        VectorField(ScalarField(grid, arrays[1]), ScalarField(grid, arrays[2])),
        VectorField(ScalarField(grid, arrays[3]), ScalarField(grid, arrays[4])),
        float(time),
    )
    params = PhysParams(float(mu), float(lam), PressureLaw(float(gamma)))
    return state, params
