"""Dense linear algebra over GF(2^s) on numpy integer arrays.

Matrices are 2-D int64 arrays of field elements.  Addition is XOR
(characteristic 2); multiplication goes through the context's exp/log
tables so row operations vectorize.
"""

from __future__ import annotations

import numpy as np

from .gf import FieldCtx


def mul_arrays(ctx: FieldCtx, a, b) -> np.ndarray:
    """Elementwise field product with numpy broadcasting."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if ctx.log_np is None:
        out = np.empty(np.broadcast(a, b).shape, dtype=np.int64)
        flat = out.reshape(-1)
        aa, bb = np.broadcast_arrays(a, b)
        for i, (x, y) in enumerate(zip(aa.reshape(-1), bb.reshape(-1))):
            flat[i] = ctx.mul(int(x), int(y))
        return out
    return ctx.exp_np[ctx.log_np[a] + ctx.log_np[b]]


def matmul(ctx: FieldCtx, a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(a.shape[1]):
        out ^= mul_arrays(ctx, a[:, k][:, None], b[k, :][None, :])
    return out


def matvec(ctx: FieldCtx, a, v) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    out = np.zeros(a.shape[0], dtype=np.int64)
    for k in range(a.shape[1]):
        out ^= mul_arrays(ctx, a[:, k], v[k])
    return out


def inner(ctx: FieldCtx, u, v) -> int:
    """Coordinate-wise inner product sum_i u_i * v_i."""
    prod = mul_arrays(ctx, u, v)
    out = 0
    for x in prod.reshape(-1):
        out ^= int(x)
    return out


def rref(ctx: FieldCtx, a) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form; returns (matrix, pivot column list)."""
    r = np.array(a, dtype=np.int64, copy=True)
    if r.size == 0:
        return r, []
    rows, cols = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        pr = row + int(nz[0])
        if pr != row:
            r[[row, pr]] = r[[pr, row]]
        pivot = int(r[row, col])
        if pivot != 1:
            r[row] = mul_arrays(ctx, r[row], ctx.inv(pivot))
        others = np.nonzero(r[:, col])[0]
        others = others[others != row]
        if others.size:
            r[others] ^= mul_arrays(ctx, r[others, col][:, None], r[row][None, :])
        pivots.append(col)
        row += 1
    return r, pivots


def rank(ctx: FieldCtx, a) -> int:
    return len(rref(ctx, a)[1])


def row_space_canonical(ctx: FieldCtx, a) -> np.ndarray:
    """Canonical basis (rref rows, zero rows dropped) of the row space."""
    r, pivots = rref(ctx, a)
    return r[: len(pivots)]


def solve(ctx: FieldCtx, a, b) -> np.ndarray | None:
    """One solution of A x = b, or None if the system is inconsistent.

    Free variables are set to zero.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    aug = np.hstack([a, b])
    r, pivots = rref(ctx, aug)
    ncols = a.shape[1]
    if ncols in pivots:
        return None
    x = np.zeros(ncols, dtype=np.int64)
    for i, col in enumerate(pivots):
        x[col] = r[i, ncols]
    return x


def null_space(ctx: FieldCtx, a) -> np.ndarray:
    """Basis rows of {x : A x = 0}, in canonical rref-derived form."""
    a = np.asarray(a, dtype=np.int64)
    ncols = a.shape[1]
    r, pivots = rref(ctx, a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for bi, fc in enumerate(free):
        basis[bi, fc] = 1
        for ri, pc in enumerate(pivots):
            basis[bi, pc] = int(r[ri, fc])  # -r = r in char 2
    return basis


def in_row_space(ctx: FieldCtx, basis_rref: np.ndarray, v) -> bool:
    """Membership test against a basis already in rref form."""
    v = np.array(v, dtype=np.int64, copy=True)
    for row in basis_rref:
        nz = np.nonzero(row)[0]
        if nz.size == 0:
            continue
        lead = int(nz[0])
        if v[lead]:
            v ^= mul_arrays(ctx, row, int(v[lead]))
    return not v.any()
