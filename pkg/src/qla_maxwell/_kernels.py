"""Fused numba kernels for the collide-stream sweeps and pointwise operators.

A sweep along x only couples sites within one row (along y, one column), so
each block of lines is gathered into a component-major buffer, the whole
operator sequence is applied there, and the result is scattered back. Lines
never interact, so the result does not depend on the block size or on how
numba partitions the blocks.
"""
import numpy as np
from numba import njit, prange

# Operator codes for a sweep sequence (applied in array order).
OP_C = 0
OP_CDAG = 1
OP_S1_PLUS = 2
OP_S1_MINUS = 3
OP_S2_PLUS = 4
OP_S2_MINUS = 5

# Rightmost factor first.
SECOND_ORDER_SEQUENCE = np.array(
    [OP_CDAG, OP_S1_MINUS, OP_C, OP_S1_PLUS,
     OP_CDAG, OP_S2_PLUS, OP_C, OP_S2_MINUS,
     OP_C, OP_S1_PLUS, OP_CDAG, OP_S1_MINUS,
     OP_C, OP_S2_MINUS, OP_CDAG, OP_S2_PLUS],
    dtype=np.int64,
)
FIRST_ORDER_SEQUENCE = SECOND_ORDER_SEQUENCE[:8].copy()


@njit(cache=True)
def _stream(buf, c, d):
    # S^{d}: new[i] = old[i + d], periodic
    L = buf.shape[1]
    B = buf.shape[2]
    tmp = np.empty(B)
    if d == 1:
        for b in range(B):
            tmp[b] = buf[c, 0, b]
        for i in range(L - 1):
            for b in range(B):
                buf[c, i, b] = buf[c, i + 1, b]
        for b in range(B):
            buf[c, L - 1, b] = tmp[b]
    else:
        for b in range(B):
            tmp[b] = buf[c, L - 1, b]
        for i in range(L - 1, 0, -1):
            for b in range(B):
                buf[c, i, b] = buf[c, i - 1, b]
        for b in range(B):
            buf[c, 0, b] = tmp[b]


@njit(cache=True)
def _rotate(buf, cs, sn, i, j, sigma):
    # q_i <- c q_i + sigma s q_j ; q_j <- -sigma s q_i + c q_j
    L = buf.shape[1]
    B = buf.shape[2]
    for k in range(L):
        for b in range(B):
            c = cs[k, b]
            s = sigma * sn[k, b]
            a = buf[i, k, b]
            e = buf[j, k, b]
            buf[i, k, b] = c * a + s * e
            buf[j, k, b] = c * e - s * a


@njit(cache=True)
def _run_sequence(buf, ca, sa, cb, sb, ops, pairs, sigma, g1, g2):
    for op in ops:
        if op == OP_C or op == OP_CDAG:
            sg = sigma if op == OP_C else -sigma
            _rotate(buf, ca, sa, pairs[0], pairs[1], sg)
            _rotate(buf, cb, sb, pairs[2], pairs[3], sg)
        elif op == OP_S1_PLUS:
            _stream(buf, g1[0], 1)
            _stream(buf, g1[1], 1)
        elif op == OP_S1_MINUS:
            _stream(buf, g1[0], -1)
            _stream(buf, g1[1], -1)
        elif op == OP_S2_PLUS:
            _stream(buf, g2[0], 1)
            _stream(buf, g2[1], 1)
        else:
            _stream(buf, g2[0], -1)
            _stream(buf, g2[1], -1)


@njit(cache=True)
def _pointwise_post(buf, post, pc):
    # post: 0 none, 1 skew rotations, 2 printed sparse rows. pc: (8, L, B) cos/sin
    if post == 1:
        _rotate(buf, pc[0], pc[1], 1, 5, -1.0)
        _rotate(buf, pc[2], pc[3], 2, 4, -1.0)
        _rotate(buf, pc[4], pc[5], 0, 5, 1.0)
        _rotate(buf, pc[6], pc[7], 2, 3, 1.0)
    elif post == 2:
        L = buf.shape[1]
        B = buf.shape[2]
        for k in range(L):
            for b in range(B):
                # V_X rows 4, 5 then V_Y rows 3, 5
                buf[4, k, b] = -pc[1, k, b] * buf[2, k, b] + pc[0, k, b] * buf[4, k, b]
                buf[5, k, b] = pc[3, k, b] * buf[1, k, b] + pc[2, k, b] * buf[5, k, b]
                buf[3, k, b] = pc[5, k, b] * buf[2, k, b] + pc[4, k, b] * buf[3, k, b]
                buf[5, k, b] = -pc[7, k, b] * buf[0, k, b] + pc[6, k, b] * buf[5, k, b]


@njit(parallel=True, cache=True)
def sweep(q, ang, ops, pairs, sigma, g1, g2, axis, block, post, pang):
    """Apply ``ops`` in place along ``axis`` (1 = x rows, 0 = y columns).

    ``ang`` has shape (nblocks, 4, L, block): cos/sin of the two collision
    angles in the same blocked layout as the line buffer. ``post`` selects a
    pointwise potential applied after the sequence, with cos/sin in ``pang``
    (nblocks, 8, L, block).
    """
    ny = q.shape[0]
    nx = q.shape[1]
    nlines = ny if axis == 1 else nx
    L = nx if axis == 1 else ny
    nblocks = (nlines + block - 1) // block
    for kb in prange(nblocks):
        l0 = kb * block
        B = min(block, nlines - l0)
        buf = np.empty((6, L, B))
        if axis == 1:
            for b in range(B):
                for k in range(L):
                    for c in range(6):
                        buf[c, k, b] = q[l0 + b, k, c]
        else:
            for k in range(L):
                for b in range(B):
                    for c in range(6):
                        buf[c, k, b] = q[k, l0 + b, c]
        la = ang[kb]
        pc = pang[kb] if post != 0 else pang[0]
        _run_sequence(buf, la[0], la[1], la[2], la[3], ops, pairs, sigma, g1, g2)
        _pointwise_post(buf, post, pc)
        if axis == 1:
            for b in range(B):
                for k in range(L):
                    for c in range(6):
                        q[l0 + b, k, c] = buf[c, k, b]
        else:
            for k in range(L):
                for b in range(B):
                    for c in range(6):
                        q[k, l0 + b, c] = buf[c, k, b]


@njit(parallel=True, cache=True)
def rotate_pairs(q, ca, sa, cb, sb, pairs, sigma):
    """Pointwise rotation of two component planes (a collision matrix)."""
    ny = q.shape[0]
    nx = q.shape[1]
    i0, j0, i1, j1 = pairs[0], pairs[1], pairs[2], pairs[3]
    for y in prange(ny):
        for x in range(nx):
            c = ca[y, x]
            s = sigma * sa[y, x]
            a = q[y, x, i0]
            e = q[y, x, j0]
            q[y, x, i0] = c * a + s * e
            q[y, x, j0] = c * e - s * a
            c = cb[y, x]
            s = sigma * sb[y, x]
            a = q[y, x, i1]
            e = q[y, x, j1]
            q[y, x, i1] = c * a + s * e
            q[y, x, j1] = c * e - s * a


@njit(parallel=True, cache=True)
def row_update(q, ca, sa, src_a, dst_a, sgn_a, cb, sb, src_b, dst_b, sgn_b):
    """Pointwise sparse update q_dst <- sgn sin(b) q_src + cos(b) q_dst, twice."""
    ny = q.shape[0]
    nx = q.shape[1]
    for y in prange(ny):
        for x in range(nx):
            q[y, x, dst_a] = sgn_a * sa[y, x] * q[y, x, src_a] + ca[y, x] * q[y, x, dst_a]
            q[y, x, dst_b] = sgn_b * sb[y, x] * q[y, x, src_b] + cb[y, x] * q[y, x, dst_b]
