"""Compiled kernels for ordered-frontier wavefront propagation and descent.

The frontier is a ternary-keyed binary heap popping the lexicographically
smallest ``(-priority, arrival, cell_index)`` tuple, i.e. highest priority
first, then lowest arrival, then lowest row-major cell index. With a constant
priority this reduces exactly to the classic fast-marching pop order
(arrival, index). Stale heap entries are skipped lazily, which reproduces the
same finalization sequence as a list kept sorted by the composite key.

Arrival updates are the first-order upwind Godunov scheme on the
4-neighborhood: with axis-minimal finalized neighbor values ``a`` and ``b``
and local step ``h / F``, the update is ``min(a, b) + h/F`` when the minima
differ by at least ``h/F``, else the root of the two-sided quadratic.

Unreached cells are reported as ``inf`` but never enter update arithmetic;
updates only read finalized neighbors.
"""

from __future__ import annotations

import numpy as np
from numba import njit

INF = np.inf

FAR = np.uint8(0)
NARROW = np.uint8(1)
FROZEN = np.uint8(2)


@njit(cache=True)
def march(passable, speed, priority, h, width, src_idx, src_lab, stop_idx):
    """Propagate from the sources over passable cells.

    passable, speed, priority: flat row-major arrays of length width*height.
    src_idx/src_lab: source cells (may sit on impassable cells, e.g. walls
    acting as distance sources) and their labels. stop_idx: halt once this
    cell is finalized (-1 to sweep everything reachable).

    Returns (arrival, label, order): arrival is inf and label -1 wherever the
    run did not finalize; order lists finalized cells in pop order.

    Heap sifts and the Godunov update are inlined by hand; the helper-call
    version costs ~50% more on large grids.
    """
    n = passable.size
    height = n // width
    arrival = np.full(n, INF)
    label = np.full(n, np.int32(-1))
    state = np.zeros(n, np.uint8)
    order = np.empty(n, np.int64)
    n_order = 0

    # Worst case: one push per source plus one per neighbor improvement
    # (at most 4 per cell).
    cap = 5 * n + 16
    hp = np.empty(cap)  # negated priority
    ha = np.empty(cap)  # candidate arrival
    hi = np.empty(cap, np.int64)  # cell index
    size = 0

    for s in range(src_idx.size):
        i = src_idx[s]
        if state[i] == NARROW:
            if src_lab[s] < label[i]:
                label[i] = src_lab[s]
            continue
        arrival[i] = 0.0
        label[i] = src_lab[s]
        state[i] = NARROW
        hp[size] = -priority[i]
        ha[size] = 0.0
        hi[size] = i
        j = size
        size += 1
        while j > 0:
            p = (j - 1) >> 1
            if hp[j] < hp[p] or (hp[j] == hp[p] and (ha[j] < ha[p] or (ha[j] == ha[p] and hi[j] < hi[p]))):
                hp[j], hp[p] = hp[p], hp[j]
                ha[j], ha[p] = ha[p], ha[j]
                hi[j], hi[p] = hi[p], hi[j]
                j = p
            else:
                break

    while size > 0:
        t = ha[0]
        i = hi[0]
        size -= 1
        hp[0] = hp[size]
        ha[0] = ha[size]
        hi[0] = hi[size]
        j = 0
        while True:
            left = 2 * j + 1
            right = left + 1
            m = j
            if left < size and (
                hp[left] < hp[m]
                or (hp[left] == hp[m] and (ha[left] < ha[m] or (ha[left] == ha[m] and hi[left] < hi[m])))
            ):
                m = left
            if right < size and (
                hp[right] < hp[m]
                or (hp[right] == hp[m] and (ha[right] < ha[m] or (ha[right] == ha[m] and hi[right] < hi[m])))
            ):
                m = right
            if m == j:
                break
            hp[j], hp[m] = hp[m], hp[j]
            ha[j], ha[m] = ha[m], ha[j]
            hi[j], hi[m] = hi[m], hi[j]
            j = m

        if state[i] == FROZEN:
            continue
        if t != arrival[i]:
            continue  # stale entry; a better one was popped earlier
        state[i] = FROZEN
        order[n_order] = i
        n_order += 1
        if i == stop_idx:
            break
        col = i % width
        row = i // width
        for k in range(4):
            if k == 0:
                if col == 0:
                    continue
                jj = i - 1
            elif k == 1:
                if col == width - 1:
                    continue
                jj = i + 1
            elif k == 2:
                if row == 0:
                    continue
                jj = i - width
            else:
                if row == height - 1:
                    continue
                jj = i + width
            if state[jj] == FROZEN or not passable[jj]:
                continue

            # Godunov upwind update from finalized 4-neighbors; the support
            # label is the contributing neighbor with the smaller arrival,
            # ties to the lower label (deterministic region boundaries).
            cc = jj % width
            rr = jj // width
            va = INF
            la = np.int32(-1)
            a_ok = False
            if cc > 0 and state[jj - 1] == FROZEN:
                va = arrival[jj - 1]
                la = label[jj - 1]
                a_ok = True
            if cc < width - 1 and state[jj + 1] == FROZEN:
                v1 = arrival[jj + 1]
                if (not a_ok) or v1 < va or (v1 == va and label[jj + 1] < la):
                    va = v1
                    la = label[jj + 1]
                a_ok = True
            vb = INF
            lb = np.int32(-1)
            b_ok = False
            if rr > 0 and state[jj - width] == FROZEN:
                vb = arrival[jj - width]
                lb = label[jj - width]
                b_ok = True
            if rr < height - 1 and state[jj + width] == FROZEN:
                v1 = arrival[jj + width]
                if (not b_ok) or v1 < vb or (v1 == vb and label[jj + width] < lb):
                    vb = v1
                    lb = label[jj + width]
                b_ok = True

            hf = h / speed[jj]
            if a_ok and b_ok:
                if va < vb:
                    lo = va
                    hi2 = vb
                    sup = la
                elif vb < va:
                    lo = vb
                    hi2 = va
                    sup = lb
                else:
                    lo = va
                    hi2 = vb
                    sup = la if la < lb else lb
                if hi2 - lo >= hf:
                    t_new = lo + hf
                else:
                    diff = va - vb
                    t_new = 0.5 * (va + vb + np.sqrt(2.0 * hf * hf - diff * diff))
            elif a_ok:
                t_new = va + hf
                sup = la
            else:
                t_new = vb + hf
                sup = lb

            if t_new < arrival[jj]:
                arrival[jj] = t_new
                label[jj] = sup
                state[jj] = NARROW
                hp[size] = -priority[jj]
                ha[size] = t_new
                hi[size] = jj
                q = size
                size += 1
                while q > 0:
                    p = (q - 1) >> 1
                    if hp[q] < hp[p] or (hp[q] == hp[p] and (ha[q] < ha[p] or (ha[q] == ha[p] and hi[q] < hi[p]))):
                        hp[q], hp[p] = hp[p], hp[q]
                        ha[q], ha[p] = ha[p], ha[q]
                        hi[q], hi[p] = hi[p], hi[q]
                        q = p
                    else:
                        break
            elif t_new == arrival[jj] and sup < label[jj]:
                label[jj] = sup

    for i in range(n):
        if state[i] != FROZEN:
            arrival[i] = INF
            label[i] = np.int32(-1)
    return arrival, label, order[:n_order]


# --- gradient descent over an arrival field ---

DESCENT_OK = 0
DESCENT_UNREACHED = 1
DESCENT_STALLED = 2


@njit(cache=True)
def _interp(values, h, x, y):
    """Bilinear interpolation between cell centers; fails when any corner of
    the stencil is out of bounds or unreached."""
    height, width = values.shape
    fx = x / h - 0.5
    fy = y / h - 0.5
    c0 = int(np.floor(fx))
    r0 = int(np.floor(fy))
    if c0 < 0 or r0 < 0 or c0 + 1 >= width or r0 + 1 >= height:
        return False, 0.0
    v00 = values[r0, c0]
    v10 = values[r0, c0 + 1]
    v01 = values[r0 + 1, c0]
    v11 = values[r0 + 1, c0 + 1]
    if not (np.isfinite(v00) and np.isfinite(v10) and np.isfinite(v01) and np.isfinite(v11)):
        return False, 0.0
    tx = fx - c0
    ty = fy - r0
    top = v01 * (1 - tx) + v11 * tx
    bot = v00 * (1 - tx) + v10 * tx
    return True, bot * (1 - ty) + top * ty


@njit(cache=True)
def _grad(values, h, x, y):
    height, width = values.shape
    fx = x / h - 0.5
    fy = y / h - 0.5
    c0 = int(np.floor(fx))
    r0 = int(np.floor(fy))
    if c0 < 0 or r0 < 0 or c0 + 1 >= width or r0 + 1 >= height:
        return False, 0.0, 0.0
    v00 = values[r0, c0]
    v10 = values[r0, c0 + 1]
    v01 = values[r0 + 1, c0]
    v11 = values[r0 + 1, c0 + 1]
    if not (np.isfinite(v00) and np.isfinite(v10) and np.isfinite(v01) and np.isfinite(v11)):
        return False, 0.0, 0.0
    tx = fx - c0
    ty = fy - r0
    gx = ((v10 - v00) * (1 - ty) + (v11 - v01) * ty) / h
    gy = ((v01 - v00) * (1 - tx) + (v11 - v10) * tx) / h
    return True, gx, gy


@njit(cache=True)
def descend(values, h, x0, y0, step, max_iter):
    """Walk downhill over the arrival field from (x0, y0) (map-local meters).

    Follows the interpolated gradient in steps of ``step``; where the
    interpolated step fails to strictly decrease the sampled value, falls
    back to the steepest 8-neighbor cell center. Terminates on entering a
    zero-arrival (source) cell.

    Returns (points, status) with points an (k, 2) array of local coords.
    """
    height, width = values.shape
    out = np.empty((max_iter + 2, 2))
    n = 0
    x, y = x0, y0
    col = min(int(x / h), width - 1)
    row = min(int(y / h), height - 1)
    if not np.isfinite(values[row, col]):
        return out[:0], DESCENT_UNREACHED
    out[n, 0] = x
    out[n, 1] = y
    n += 1
    ok, t_cur = _interp(values, h, x, y)
    if not ok:
        t_cur = values[row, col]

    for _ in range(max_iter):
        col = min(int(x / h), width - 1)
        row = min(int(y / h), height - 1)
        if values[row, col] == 0.0:
            return out[:n], DESCENT_OK
        moved = False
        gok, gx, gy = _grad(values, h, x, y)
        if gok:
            norm = np.sqrt(gx * gx + gy * gy)
            if norm > 0.0:
                nx = x - step * gx / norm
                ny = y - step * gy / norm
                if 0.0 <= nx < width * h and 0.0 <= ny < height * h:
                    iok, t_new = _interp(values, h, nx, ny)
                    if iok and t_new < t_cur:
                        x, y, t_cur = nx, ny, t_new
                        out[n, 0] = x
                        out[n, 1] = y
                        n += 1
                        moved = True
        if not moved:
            # Steepest descent over the 8 neighboring cell centers.
            best = INF
            bc = -1
            br = -1
            for dr in range(-1, 2):
                for dc in range(-1, 2):
                    if dr == 0 and dc == 0:
                        continue
                    r2 = row + dr
                    c2 = col + dc
                    if r2 < 0 or r2 >= height or c2 < 0 or c2 >= width:
                        continue
                    v = values[r2, c2]
                    if v < best:
                        best = v
                        bc = c2
                        br = r2
            if bc >= 0 and best < t_cur:
                x = (bc + 0.5) * h
                y = (br + 0.5) * h
                t_cur = best
                out[n, 0] = x
                out[n, 1] = y
                n += 1
            else:
                return out[:n], DESCENT_STALLED
    return out[:n], DESCENT_STALLED
