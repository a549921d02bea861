"""Integer hot loops, each with a numba version and a numpy version.

Everything here works on exactly scaled integers: callers pick a common
denominator, pass integer tables, and convert results back to fractions.
Inputs whose magnitudes do not fit comfortably in int64 are routed to the
numpy versions with ``dtype=object`` (Python integers).
"""

import numpy as np

from . import _accel
from ._accel import njit

INT64_SAFE = 2**62

# status codes shared by the search kernels
FOUND = 1
EXHAUSTED = 0
UNDECIDED = 2
BUDGET = 3


def fits_int64(*bounds):
    return all(abs(int(b)) < INT64_SAFE for b in bounds)


def _as_table(values, use_object):
    if use_object:
        return np.array([int(v) for v in values], dtype=object)
    return np.array([int(v) for v in values], dtype=np.int64)


# ---------------------------------------------------------------------------
# Sequence prefixes.  A prefix a_1..a_d with digits in [-amax, amax] carries
# the integer state s_d = p*s_{d-1} - a_d; it is kept iff |s_d| <= bound.
# ---------------------------------------------------------------------------


@njit
def _prefix_extreme_nb(weights, p, start, bound, amax):
    K = weights.shape[0]
    nalpha = 2 * amax + 1
    suffix = np.zeros(K + 1, np.int64)
    for d in range(K - 1, -1, -1):
        suffix[d] = suffix[d + 1] + abs(weights[d]) * amax
    order = np.empty((K, nalpha), np.int64)
    for d in range(K):
        for t in range(nalpha):
            order[d, t] = amax - t if weights[d] >= 0 else t - amax
    path = np.zeros(K, np.int64)
    best_path = np.zeros(K, np.int64)
    choice = np.zeros(K + 1, np.int64)
    vals = np.zeros(K + 1, np.int64)
    states = np.zeros(K + 1, np.int64)
    states[0] = start
    found = False
    best = np.int64(0)
    nodes = 0
    d = 0
    while d >= 0:
        if choice[d] >= nalpha:
            d -= 1
            continue
        a = order[d, choice[d]]
        choice[d] += 1
        s = p * states[d] - a
        if s > bound or s < -bound:
            continue
        v = vals[d] + weights[d] * a
        nodes += 1
        if found and v + suffix[d + 1] <= best:
            # siblings are visited in decreasing contribution order
            choice[d] = nalpha
            continue
        path[d] = a
        if d + 1 == K:
            if not found or v > best:
                best = v
                found = True
                best_path[:] = path
            continue
        vals[d + 1] = v
        states[d + 1] = s
        choice[d + 1] = 0
        d += 1
    return found, best, best_path, nodes


def _prefix_extreme_np(weights, p, start, bound, amax):
    K = len(weights)
    obj = weights.dtype == object
    states = np.arange(-bound, bound + 1)
    alphabet = np.arange(-amax, amax + 1)
    S = len(states)
    best = np.zeros(S, dtype=object if obj else np.int64)
    valid = np.zeros(S, dtype=bool)
    if abs(start) > bound:
        return False, 0, np.zeros(K, np.int64), 0
    valid[start + bound] = True
    back_state = np.zeros((K, S), np.int64)
    back_digit = np.zeros((K, S), np.int64)
    nxt = p * states[:, None] - alphabet[None, :]
    # big weights times int64 digits would overflow
    digit_vals = alphabet.astype(object) if obj else alphabet
    nodes = 0
    for d in range(K):
        ok = valid[:, None] & (np.abs(nxt) <= bound)
        cand = best[:, None] + weights[d] * digit_vals[None, :]
        nodes += int(ok.sum())
        new_best = np.zeros_like(best)
        new_valid = np.zeros(S, dtype=bool)
        for t in range(S):
            mask = ok & (nxt == t - bound)
            if not mask.any():
                continue
            rows, cols = np.nonzero(mask)
            vals = cand[rows, cols]
            j = int(np.argmax(vals))
            new_best[t] = vals[j]
            new_valid[t] = True
            back_state[d, t] = rows[j]
            back_digit[d, t] = alphabet[cols[j]]
        best, valid = new_best, new_valid
    if not valid.any():
        return False, 0, np.zeros(K, np.int64), nodes
    idx = np.nonzero(valid)[0]
    t = int(idx[np.argmax(best[idx])])
    value = best[t]
    path = np.zeros(K, np.int64)
    for d in range(K - 1, -1, -1):
        path[d] = back_digit[d, t]
        t = back_state[d, t]
    return True, value, path, nodes


def prefix_extreme(weights, p, start, bound, amax):
    """Maximum of sum_k weights[k]*a_k over admissible prefixes.

    Returns ``(found, best, path, nodes)``; ``best`` is a Python int.
    """
    mag = sum(abs(int(w)) for w in weights) * amax
    use_object = not fits_int64(mag, p * (bound + 1) + amax)
    w = _as_table(weights, use_object)
    if _accel.use_numba() and not use_object:
        found, best, path, nodes = _prefix_extreme_nb(w, p, start, bound, amax)
    else:
        found, best, path, nodes = _prefix_extreme_np(w, p, start, bound, amax)
    return bool(found), int(best), np.asarray(path, dtype=np.int64), int(nodes)


@njit
def _prefix_hit_nb(weights, p, start, bound, amax, offset, lo, hi, tail, max_nodes):
    K = weights.shape[0]
    nalpha = 2 * amax + 1
    suffix = np.zeros(K + 1, np.int64)
    suffix[K] = tail
    for d in range(K - 1, -1, -1):
        suffix[d] = suffix[d + 1] + abs(weights[d]) * amax
    order = np.empty((K, nalpha), np.int64)
    for d in range(K):
        for t in range(nalpha):
            order[d, t] = amax - t if weights[d] >= 0 else t - amax
    path = np.zeros(K, np.int64)
    choice = np.zeros(K + 1, np.int64)
    vals = np.zeros(K + 1, np.int64)
    states = np.zeros(K + 1, np.int64)
    vals[0] = offset
    states[0] = start
    undecided = 0
    nodes = 0
    if offset - suffix[0] > hi or offset + suffix[0] < lo:
        return EXHAUSTED, path, nodes
    d = 0
    while d >= 0:
        if choice[d] >= nalpha:
            d -= 1
            continue
        a = order[d, choice[d]]
        choice[d] += 1
        s = p * states[d] - a
        if s > bound or s < -bound:
            continue
        v = vals[d] + weights[d] * a
        nodes += 1
        if nodes > max_nodes:
            return BUDGET, path, nodes
        r = suffix[d + 1]
        if v - r > hi or v + r < lo:
            continue
        path[d] = a
        if d + 1 == K:
            if v - tail >= lo and v + tail <= hi:
                return FOUND, path, nodes
            undecided += 1
            continue
        vals[d + 1] = v
        states[d + 1] = s
        choice[d + 1] = 0
        d += 1
    if undecided > 0:
        return UNDECIDED, path, nodes
    return EXHAUSTED, path, nodes


def _prefix_hit_np(weights, p, start, bound, amax, offset, lo, hi, tail, max_nodes):
    K = len(weights)
    obj = weights.dtype == object
    dt = object if obj else np.int64
    alphabet = np.arange(-amax, amax + 1)
    suffix = [0] * (K + 1)
    suffix[K] = tail
    for d in range(K - 1, -1, -1):
        suffix[d] = suffix[d + 1] + abs(int(weights[d])) * amax
    empty = np.zeros(K, np.int64)
    if offset - suffix[0] > hi or offset + suffix[0] < lo:
        return EXHAUSTED, empty, 0
    vals = np.array([offset], dtype=dt)
    states = np.array([start], dtype=np.int64)
    parents, digits = [], []
    nodes = 0
    S = 2 * bound + 1
    digit_vals = alphabet.astype(object) if obj else alphabet
    for d in range(K):
        ns = p * states[:, None] - alphabet[None, :]
        nv = vals[:, None] + weights[d] * digit_vals[None, :]
        r = suffix[d + 1]
        keep = (np.abs(ns) <= bound) & ~(nv - r > hi) & ~(nv + r < lo)
        rows, cols = np.nonzero(keep)
        nodes += len(rows)
        if nodes > max_nodes:
            return BUDGET, empty, nodes
        nv = nv[rows, cols]
        ns = ns[rows, cols]
        # prefixes with equal (state, value) have identical futures
        key = nv * S + (ns + bound)
        _, first = np.unique(key, return_index=True)
        first = np.sort(first)
        vals, states = nv[first], ns[first]
        parents.append(rows[first])
        digits.append(alphabet[cols[first]])
        if len(vals) == 0:
            return EXHAUSTED, empty, nodes
    inside = (vals - tail >= lo) & (vals + tail <= hi)
    if inside.any():
        t = int(np.nonzero(inside)[0][0])
        path = np.zeros(K, np.int64)
        for d in range(K - 1, -1, -1):
            path[d] = digits[d][t]
            t = int(parents[d][t])
        return FOUND, path, nodes
    return UNDECIDED, empty, nodes


def prefix_hit(weights, p, start, bound, amax, offset, lo, hi, tail, max_nodes=50_000_000):
    """Search for a prefix whose value +- tail lies in [lo, hi].

    Returns ``(status, path, nodes)`` with status FOUND, EXHAUSTED (every
    prefix interval misses the target), UNDECIDED or BUDGET.
    """
    mag = sum(abs(int(w)) for w in weights) * amax + abs(offset) + abs(lo) + abs(hi) + tail
    use_object = not fits_int64(mag, p * (bound + 1) + amax)
    w = _as_table(weights, use_object)
    if _accel.use_numba() and not use_object:
        status, path, nodes = _prefix_hit_nb(
            w, p, start, bound, amax, offset, lo, hi, tail, max_nodes
        )
    else:
        status, path, nodes = _prefix_hit_np(
            w, p, start, bound, amax, offset, lo, hi, tail, max_nodes
        )
    return int(status), np.asarray(path, dtype=np.int64), int(nodes)


# ---------------------------------------------------------------------------
# Digit sums: all sums sum_k table[k, d_k]; index order has level 0 as the
# most significant digit.
# ---------------------------------------------------------------------------


@njit
def _all_sums_nb(tx, ty):
    K, B = tx.shape
    N = 1
    for _ in range(K):
        N *= B
    X = np.empty(N, np.int64)
    Y = np.empty(N, np.int64)
    X[:B] = tx[0]
    Y[:B] = ty[0]
    cur = B
    for k in range(1, K):
        # expand in place from the back: slot i feeds slots i*B .. i*B+B-1 >= i
        for i in range(cur - 1, -1, -1):
            x, y = X[i], Y[i]
            for e in range(B - 1, -1, -1):
                X[i * B + e] = x + tx[k, e]
                Y[i * B + e] = y + ty[k, e]
        cur *= B
    return X, Y


def _all_sums_np(tx, ty):
    X, Y = tx[0].copy(), ty[0].copy()
    for k in range(1, tx.shape[0]):
        X = (X[:, None] + tx[k][None, :]).ravel()
        Y = (Y[:, None] + ty[k][None, :]).ravel()
    return X, Y


def all_sums(tx, ty):
    """All digit sums of two integer tables of shape (levels, digits)."""
    tx = np.asarray(tx)
    ty = np.asarray(ty)
    bound = max(
        int(np.abs(tx.astype(object)).max(axis=1).sum()),
        int(np.abs(ty.astype(object)).max(axis=1).sum()),
    )
    if not fits_int64(bound):
        return _all_sums_np(tx.astype(object), ty.astype(object))
    tx = tx.astype(np.int64)
    ty = ty.astype(np.int64)
    if _accel.use_numba():
        return _all_sums_nb(tx, ty)
    return _all_sums_np(tx, ty)


# ---------------------------------------------------------------------------
# Separation search.  Two clouds are compared through their difference:
# state (dx, dy) at level L, children add one difference digit per level.
# span[L] bounds how far the remaining levels can move the difference.
# A leaf hits when |dx| <= thrx and |dy| <= thry.
# ---------------------------------------------------------------------------


@njit
def _near_pair_nb(dtx, dty, spanx, spany, dx0, dy0, thrx, thry, max_nodes):
    K1, E = dtx.shape  # K1 = levels left after the first
    if K1 == 0:
        if abs(dx0) <= thrx and abs(dy0) <= thry:
            return FOUND, dx0, dy0, 1
        return EXHAUSTED, 0, 0, 1
    if abs(dx0) - spanx[0] > thrx or abs(dy0) - spany[0] > thry:
        return EXHAUSTED, 0, 0, 1
    cand = np.empty((K1, E), np.int64)
    cnt = np.zeros(K1, np.int64)
    pos = np.zeros(K1, np.int64)
    xs = np.zeros(K1 + 1, np.int64)
    ys = np.zeros(K1 + 1, np.int64)
    gap_buf = np.empty(E, np.int64)
    idx_buf = np.empty(E, np.int64)
    xs[0] = dx0
    ys[0] = dy0
    seen = set()
    nodes = 0
    L = 0
    entering = True
    while L >= 0:
        if entering:
            c = 0
            for e in range(E):
                gx = abs(xs[L] + dtx[L, e]) - spanx[L + 1]
                gy = abs(ys[L] + dty[L, e]) - spany[L + 1]
                if gx <= thrx and gy <= thry:
                    gap_buf[c] = max(gx, gy, 0)
                    idx_buf[c] = e
                    c += 1
            order = np.argsort(gap_buf[:c], kind="mergesort")
            for t in range(c):
                cand[L, t] = idx_buf[order[t]]
            cnt[L] = c
            pos[L] = 0
            entering = False
        if pos[L] >= cnt[L]:
            L -= 1
            continue
        e = cand[L, pos[L]]
        pos[L] += 1
        cx = xs[L] + dtx[L, e]
        cy = ys[L] + dty[L, e]
        nodes += 1
        if nodes > max_nodes:
            return BUDGET, 0, 0, nodes
        if L + 1 == K1:
            if abs(cx) <= thrx and abs(cy) <= thry:
                return FOUND, cx, cy, nodes
            continue
        key = (L + 1, cx, cy)
        if key in seen:
            continue
        seen.add(key)
        xs[L + 1] = cx
        ys[L + 1] = cy
        L += 1
        entering = True
    return EXHAUSTED, 0, 0, nodes


def _near_pair_np(dtx, dty, spanx, spany, dx0, dy0, thrx, thry, max_nodes):
    K1 = dtx.shape[0]
    if K1 == 0:
        hit = abs(dx0) <= thrx and abs(dy0) <= thry
        return (FOUND, dx0, dy0, 1) if hit else (EXHAUSTED, 0, 0, 1)
    if abs(dx0) - spanx[0] > thrx or abs(dy0) - spany[0] > thry:
        return EXHAUSTED, 0, 0, 1
    dx = np.array([dx0], dtype=dtx.dtype)
    dy = np.array([dy0], dtype=dty.dtype)
    nodes = 0
    for L in range(K1):
        cx = (dx[:, None] + dtx[L][None, :]).ravel()
        cy = (dy[:, None] + dty[L][None, :]).ravel()
        nodes += len(cx)
        if nodes > max_nodes:
            return BUDGET, 0, 0, nodes
        keep = (np.abs(cx) - spanx[L + 1] <= thrx) & (np.abs(cy) - spany[L + 1] <= thry)
        cx, cy = cx[keep], cy[keep]
        if len(cx) == 0:
            return EXHAUSTED, 0, 0, nodes
        if L + 1 == K1:
            return FOUND, int(cx[0]), int(cy[0]), nodes
        if cx.dtype == object:
            uniq = sorted(set(zip(cx.tolist(), cy.tolist())))
            dx = np.array([u[0] for u in uniq], dtype=object)
            dy = np.array([u[1] for u in uniq], dtype=object)
        else:
            pairs = np.unique(np.stack([cx, cy]), axis=1)
            dx, dy = pairs[0], pairs[1]
    return EXHAUSTED, 0, 0, nodes


def near_pair(dtx, dty, spanx, spany, dx0, dy0, thrx, thry, max_nodes=20_000_000):
    """Is some leaf difference inside the box |dx| <= thrx, |dy| <= thry?

    ``dtx[L, e]``/``dty[L, e]`` are the difference digits of level L+2,
    ``spanx[L]`` bounds the total contribution of levels L+2 and deeper.
    Returns ``(status, wx, wy, nodes)``; (wx, wy) is the hit found when the
    status is FOUND.
    """
    dtx = np.asarray(dtx)
    dty = np.asarray(dty)
    spanx = [int(v) for v in spanx]
    spany = [int(v) for v in spany]
    bound = max(spanx[0], spany[0]) + abs(dx0) + abs(dy0) + thrx + thry
    if dtx.size:
        bound += int(np.abs(dtx.astype(object)).max()) + int(np.abs(dty.astype(object)).max())
    args = (int(dx0), int(dy0), int(thrx), int(thry), max_nodes)
    if not fits_int64(bound):
        return _near_pair_np(dtx.astype(object), dty.astype(object), spanx, spany, *args)
    dtx = dtx.astype(np.int64).reshape(dtx.shape)
    dty = dty.astype(np.int64).reshape(dty.shape)
    sx = np.array(spanx, dtype=np.int64)
    sy = np.array(spany, dtype=np.int64)
    kernel = _near_pair_nb if _accel.use_numba() else _near_pair_np
    status, wx, wy, nodes = kernel(dtx, dty, sx, sy, *args)
    return int(status), int(wx), int(wy), int(nodes)


def warmup():
    """Trigger numba compilation on tiny inputs."""
    if not _accel.use_numba():
        return
    w = np.array([1, -1], dtype=np.int64)
    _prefix_extreme_nb(w, 2, 1, 1, 1)
    _prefix_hit_nb(w, 2, 1, 1, 1, 0, -1, 1, 0, 100)
    t = np.zeros((1, 2), np.int64)
    _all_sums_nb(t, t)
    _near_pair_nb(t, t, np.zeros(2, np.int64), np.zeros(2, np.int64), 0, 0, 0, 0, 100)
