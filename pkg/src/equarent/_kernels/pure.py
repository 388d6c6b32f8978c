"""Pure numpy implementations of the hot kernels.

These are the reference semantics; ``equarent._kernels._ctree`` is a
compiled twin that must produce bit-identical output.  Three rules keep
the two backends in lockstep:

* every floating-point reduction is a sequential left-to-right
  accumulation (``np.cumsum`` here, a plain loop in C);
* row order inside a node is taken from a single stable pre-sort of each
  column (computed once by the caller), never re-sorted;
* tie-breaks are "first strictly better wins" scanning columns in
  ascending index order and thresholds in ascending value order.

Trees are stored as flat parallel arrays indexed in preorder (left
subtree before right).  ``feature[i] < 0`` marks a leaf.
"""

from __future__ import annotations

import numpy as np

LEAF = -1


def grow_tree(X, y, counts, order, min_samples_split, min_variance, max_depth):
    """Fit a CART regression tree with variance-reduction splits.

    Parameters
    ----------
    X : (n, d) float64, C-contiguous
    y : (n,) float64
    counts : (n,) float64
        Integer-valued sample weights (bootstrap multiplicities; rows
        with count 0 are not part of the training multiset).
    order : (n, d) int32
        ``order[:, j]`` is a stable argsort of ``X[:, j]``.
    min_samples_split : float
        Nodes with weighted size below this become leaves.
    min_variance : float
        Purity threshold on the weighted label variance.
    max_depth : int
        0 means unlimited.

    Returns
    -------
    (feature, threshold, left, right, value, weight) flat node arrays.
    """
    n, d = X.shape
    feature, threshold = [], []
    left, right = [], []
    value, weight = [], []

    root_c = np.asarray(counts, dtype=np.float64)
    w0 = float(np.cumsum(root_c)[-1]) if n else 0.0
    s0 = float(np.cumsum(root_c * y)[-1]) if n else 0.0
    ss0 = float(np.cumsum(root_c * y * y)[-1]) if n else 0.0

    # Stack of pending nodes: (counts, W, S, SS, depth, parent, is_left).
    # Popping order gives preorder numbering with the left subtree first.
    stack = [(root_c, w0, s0, ss0, 0, -1, False)]
    while stack:
        c, w, s, ss, depth, parent, is_left = stack.pop()
        idx = len(feature)
        if parent >= 0:
            if is_left:
                left[parent] = idx
            else:
                right[parent] = idx
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(s / w)
        weight.append(w)

        if w < min_samples_split:
            continue
        mean = s / w
        if ss / w - mean * mean < min_variance:
            continue
        if max_depth and depth >= max_depth:
            continue

        best = _best_split(X, y, c, order, w, s)
        if best is None:
            continue
        j, thr, wl, sl, ssl = best
        feature[idx] = j
        threshold[idx] = thr
        cl = np.where(X[:, j] <= thr, c, 0.0)
        cr = c - cl
        # Right is pushed first so the left child is processed (and
        # numbered) before the right subtree.
        stack.append((cr, w - wl, s - sl, ss - ssl, depth + 1, idx, False))
        stack.append((cl, wl, sl, ssl, depth + 1, idx, True))

    return (
        np.asarray(feature, dtype=np.int32),
        np.asarray(threshold, dtype=np.float64),
        np.asarray(left, dtype=np.int32),
        np.asarray(right, dtype=np.int32),
        np.asarray(value, dtype=np.float64),
        np.asarray(weight, dtype=np.float64),
    )


def _best_split(X, y, c, order, w, s):
    """Best (column, threshold) by the proxy score sl^2/wl + sr^2/wr.

    Maximizing the score minimizes the summed child SSE.  Returns None
    when no candidate strictly beats the parent score.
    """
    n, d = X.shape
    base = s * s / w
    best_score = base
    best = None
    for j in range(d):
        idx = order[:, j]
        sel = idx[c[idx] > 0.0]
        if sel.shape[0] < 2:
            continue
        xv = X[sel, j]
        bmask = xv[1:] > xv[:-1]
        if not bmask.any():
            continue
        cw = c[sel]
        yv = y[sel]
        wpre = np.cumsum(cw)
        spre = np.cumsum(cw * yv)
        sspre = np.cumsum(cw * yv * yv)
        pos = np.nonzero(bmask)[0]
        wl = wpre[pos]
        sl = spre[pos]
        score = sl * sl / wl + (s - sl) * (s - sl) / (w - wl)
        p = int(np.argmax(score))
        if score[p] > best_score:
            lo = xv[pos[p]]
            hi = xv[pos[p] + 1]
            thr = 0.5 * (lo + hi)
            if thr >= hi:  # midpoint rounded up between adjacent floats
                thr = lo
            best_score = score[p]
            best = (j, float(thr), float(wl[p]), float(sl[p]), float(sspre[pos[p]]))
    return best


def predict_tree(feature, threshold, left, right, value, X):
    """Route every row of X to its leaf and return the leaf values."""
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    rows = np.arange(n)
    while True:
        f = feature[node]
        active = f >= 0
        if not active.any():
            break
        an = node[active]
        go_left = X[rows[active], f[active]] <= threshold[an]
        node[active] = np.where(go_left, left[an], right[an])
    return value[node].copy()


def shap_tree(feature, threshold, left, right, value, x, background, wtable):
    """Exact interventional Shapley values of one tree at ``x``.

    For each background row z the contribution of feature i is the
    Shapley value of the game v(S) = f(x with features outside S taken
    from z).  A leaf reached by forcing the x-branch on the distinct
    feature set A (|A| = k) and the z-branch on B (|B| = l) adds
    ``value * wtable[k-1, l]`` to every feature in A and subtracts
    ``value * wtable[k, l-1]`` from every feature in B, where
    ``wtable[a, b] = a! b! / (a+b+1)!``.

    Returns an (m, d) matrix of per-background-row contributions; the
    caller averages over rows (and over trees, by linearity).
    """
    m, d = background.shape
    phi = np.zeros((m, d), dtype=np.float64)
    if feature[0] < 0:  # single-leaf tree: no feature ever acts
        return phi

    # Precompute branch directions for x and all background rows at
    # every internal node (entries for leaves are never read).
    fsafe = np.where(feature >= 0, feature, 0)
    x_left = x[fsafe] <= threshold
    z_left = background[:, fsafe] <= threshold[None, :]

    alive0 = np.ones(m, dtype=bool)
    a0 = np.zeros((m, d), dtype=bool)
    b0 = np.zeros((m, d), dtype=bool)
    k0 = np.zeros(m, dtype=np.int64)
    l0 = np.zeros(m, dtype=np.int64)

    stack = [(0, alive0, a0, b0, k0, l0)]
    while stack:
        node, alive, a, b, k, l = stack.pop()
        j = feature[node]
        if j < 0:
            v = value[node]
            wpos = wtable[np.maximum(k - 1, 0), l]
            wneg = wtable[k, np.maximum(l - 1, 0)]
            keep = alive.astype(np.float64)
            phi += (v * keep * wpos)[:, None] * a
            phi -= (v * keep * wneg)[:, None] * b
            continue
        xl = bool(x_left[node])
        zl = z_left[:, node]
        diverge = zl != xl
        x_child, o_child = (left[node], right[node]) if xl else (right[node], left[node])

        # Child on x's side: diverging rows must put j into A.
        alive_x = alive & ~(diverge & b[:, j])
        newly_a = alive_x & diverge & ~a[:, j]
        a_x = a.copy()
        a_x[newly_a, j] = True
        k_x = k + newly_a

        # Child on the opposite side: only diverging rows can reach it,
        # and they must put j into B.
        alive_o = alive & diverge & ~a[:, j]
        newly_b = alive_o & ~b[:, j]
        b_o = b.copy()
        b_o[newly_b, j] = True
        l_o = l + newly_b

        # Left-first traversal order, matching the compiled kernel.
        first, second = (
            ((x_child, alive_x, a_x, b, k_x, l), (o_child, alive_o, a, b_o, k, l_o))
            if xl
            else ((o_child, alive_o, a, b_o, k, l_o), (x_child, alive_x, a_x, b, k_x, l))
        )
        if second[1].any():
            stack.append(second)
        if first[1].any():
            stack.append(first)
    return phi
