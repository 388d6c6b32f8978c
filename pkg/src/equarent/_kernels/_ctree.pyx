# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``equarent._kernels.pure``.

Must stay bit-identical to the pure backend: sequential accumulation in
the same order, same tie-breaks, no reordered arithmetic (the extension
is built with -ffp-contract=off for that reason).
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc

cnp.import_array()


cdef struct SplitResult:
    int col
    double threshold
    double score
    double wl
    double sl
    double ssl


cdef struct TreeBuf:
    int* feature
    double* threshold
    int* left
    int* right
    double* value
    double* weight
    int n_nodes


cdef int _best_split(const double[:, ::1] X, const double[::1] y,
                     const double* c, const int[:, ::1] order,
                     double w, double s, SplitResult* out) noexcept nogil:
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t d = X.shape[1]
    cdef Py_ssize_t i, j
    cdef int r
    cdef double base = s * s / w
    cdef double best_score = base
    cdef int found = 0
    cdef double wacc, sacc, ssacc, cr, xv, yv, t, sl, wl, score, prev_val
    cdef double lo, hi, thr
    cdef int started
    for j in range(d):
        wacc = 0.0
        sacc = 0.0
        ssacc = 0.0
        prev_val = 0.0
        started = 0
        for i in range(n):
            r = order[i, j]
            cr = c[r]
            if cr == 0.0:
                continue
            xv = X[r, j]
            if started and xv > prev_val:
                wl = wacc
                sl = sacc
                score = sl * sl / wl + (s - sl) * (s - sl) / (w - wl)
                if score > best_score:
                    best_score = score
                    lo = prev_val
                    hi = xv
                    thr = 0.5 * (lo + hi)
                    if thr >= hi:
                        thr = lo
                    out.col = <int> j
                    out.threshold = thr
                    out.score = score
                    out.wl = wl
                    out.sl = sl
                    out.ssl = ssacc
                    found = 1
            yv = y[r]
            t = cr * yv
            wacc = wacc + cr
            sacc = sacc + t
            ssacc = ssacc + t * yv
            prev_val = xv
            started = 1
    return found


cdef int _build_node(const double[:, ::1] X, const double[::1] y,
                     const int[:, ::1] order, double* c,
                     double w, double s, double ss, int depth,
                     double min_samples_split, double min_variance,
                     int max_depth, TreeBuf* buf) except -1 nogil:
    cdef Py_ssize_t n = X.shape[0]
    cdef int idx = buf.n_nodes
    cdef double mean = s / w
    cdef SplitResult sr
    cdef double* cl
    cdef double* cr_
    cdef Py_ssize_t r
    cdef int child

    buf.n_nodes += 1
    buf.feature[idx] = -1
    buf.threshold[idx] = 0.0
    buf.left[idx] = -1
    buf.right[idx] = -1
    buf.value[idx] = mean
    buf.weight[idx] = w

    if w < min_samples_split:
        return idx
    if ss / w - mean * mean < min_variance:
        return idx
    if max_depth and depth >= max_depth:
        return idx
    if not _best_split(X, y, c, order, w, s, &sr):
        return idx

    buf.feature[idx] = sr.col
    buf.threshold[idx] = sr.threshold
    cl = <double*> malloc(n * sizeof(double))
    cr_ = <double*> malloc(n * sizeof(double))
    if cl == NULL or cr_ == NULL:
        free(cl)
        free(cr_)
        with gil:
            raise MemoryError()
    for r in range(n):
        if X[r, sr.col] <= sr.threshold:
            cl[r] = c[r]
            cr_[r] = 0.0
        else:
            cl[r] = 0.0
            cr_[r] = c[r]
    child = _build_node(X, y, order, cl, sr.wl, sr.sl, sr.ssl,
                        depth + 1, min_samples_split, min_variance,
                        max_depth, buf)
    buf.left[idx] = child
    free(cl)
    child = _build_node(X, y, order, cr_, w - sr.wl, s - sr.sl, ss - sr.ssl,
                        depth + 1, min_samples_split, min_variance,
                        max_depth, buf)
    buf.right[idx] = child
    free(cr_)
    return idx


def grow_tree(const double[:, ::1] X, const double[::1] y,
              const double[::1] counts, const int[:, ::1] order,
              double min_samples_split, double min_variance, int max_depth):
    """See ``equarent._kernels.pure.grow_tree``."""
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t r
    cdef double w0 = 0.0, s0 = 0.0, ss0 = 0.0, t
    cdef TreeBuf buf
    cdef Py_ssize_t cap = 2 * n + 3
    cdef int[::1] fv
    cdef double[::1] tv
    cdef int[::1] lv
    cdef int[::1] rv
    cdef double[::1] vv
    cdef double[::1] wv
    cdef double* c0 = <double*> malloc(n * sizeof(double))
    if c0 == NULL:
        raise MemoryError()
    buf.feature = <int*> malloc(cap * sizeof(int))
    buf.threshold = <double*> malloc(cap * sizeof(double))
    buf.left = <int*> malloc(cap * sizeof(int))
    buf.right = <int*> malloc(cap * sizeof(int))
    buf.value = <double*> malloc(cap * sizeof(double))
    buf.weight = <double*> malloc(cap * sizeof(double))
    buf.n_nodes = 0
    try:
        if (buf.feature == NULL or buf.threshold == NULL or buf.left == NULL
                or buf.right == NULL or buf.value == NULL or buf.weight == NULL):
            raise MemoryError()
        for r in range(n):
            c0[r] = counts[r]
            t = c0[r] * y[r]
            w0 = w0 + c0[r]
            s0 = s0 + t
            ss0 = ss0 + t * y[r]
        with nogil:
            _build_node(X, y, order, c0, w0, s0, ss0, 0,
                        min_samples_split, min_variance, max_depth, &buf)
        feature = np.empty(buf.n_nodes, dtype=np.int32)
        threshold = np.empty(buf.n_nodes, dtype=np.float64)
        left = np.empty(buf.n_nodes, dtype=np.int32)
        right = np.empty(buf.n_nodes, dtype=np.int32)
        value = np.empty(buf.n_nodes, dtype=np.float64)
        weight = np.empty(buf.n_nodes, dtype=np.float64)
        fv = feature
        tv = threshold
        lv = left
        rv = right
        vv = value
        wv = weight
        for r in range(buf.n_nodes):
            fv[r] = buf.feature[r]
            tv[r] = buf.threshold[r]
            lv[r] = buf.left[r]
            rv[r] = buf.right[r]
            vv[r] = buf.value[r]
            wv[r] = buf.weight[r]
        return feature, threshold, left, right, value, weight
    finally:
        free(c0)
        free(buf.feature)
        free(buf.threshold)
        free(buf.left)
        free(buf.right)
        free(buf.value)
        free(buf.weight)


def predict_tree(const int[::1] feature, const double[::1] threshold,
                 const int[::1] left, const int[::1] right,
                 const double[::1] value, const double[:, ::1] X):
    """See ``equarent._kernels.pure.predict_tree``."""
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t i
    cdef int node
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    with nogil:
        for i in range(n):
            node = 0
            while feature[node] >= 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            ov[i] = value[node]
    return out


cdef void _shap_rec(int node,
                    const int[::1] feature, const double[::1] threshold,
                    const int[::1] left, const int[::1] right,
                    const double[::1] value,
                    const double[::1] x, const double* z,
                    const double[:, ::1] wtable,
                    signed char* state, int* path_feat, signed char* path_side,
                    int k, int l, double* phi) noexcept nogil:
    cdef int j = feature[node]
    cdef double v, wp, wn, thr
    cdef int t, xl, zl, x_child, o_child
    if j < 0:
        v = value[node]
        wp = wtable[k - 1, l] if k > 0 else 0.0
        wn = wtable[k, l - 1] if l > 0 else 0.0
        for t in range(k + l):
            if path_side[t] == 1:
                phi[path_feat[t]] += v * wp
            else:
                phi[path_feat[t]] -= v * wn
        return
    thr = threshold[node]
    xl = x[j] <= thr
    zl = z[j] <= thr
    if state[j] == 1:
        _shap_rec(left[node] if xl else right[node], feature, threshold,
                  left, right, value, x, z, wtable, state, path_feat,
                  path_side, k, l, phi)
        return
    if state[j] == 2:
        _shap_rec(left[node] if zl else right[node], feature, threshold,
                  left, right, value, x, z, wtable, state, path_feat,
                  path_side, k, l, phi)
        return
    if xl == zl:
        _shap_rec(left[node] if xl else right[node], feature, threshold,
                  left, right, value, x, z, wtable, state, path_feat,
                  path_side, k, l, phi)
        return
    # Diverging split on a fresh feature: branch into both children,
    # structurally left first to match the pure backend's ordering.
    x_child = left[node] if xl else right[node]
    o_child = right[node] if xl else left[node]
    if xl:
        _shap_branch_a(x_child, feature, threshold, left, right, value, x, z,
                       wtable, state, path_feat, path_side, k, l, phi, j)
        _shap_branch_b(o_child, feature, threshold, left, right, value, x, z,
                       wtable, state, path_feat, path_side, k, l, phi, j)
    else:
        _shap_branch_b(o_child, feature, threshold, left, right, value, x, z,
                       wtable, state, path_feat, path_side, k, l, phi, j)
        _shap_branch_a(x_child, feature, threshold, left, right, value, x, z,
                       wtable, state, path_feat, path_side, k, l, phi, j)


cdef void _shap_branch_a(int child,
                         const int[::1] feature, const double[::1] threshold,
                         const int[::1] left, const int[::1] right,
                         const double[::1] value,
                         const double[::1] x, const double* z,
                         const double[:, ::1] wtable,
                         signed char* state, int* path_feat,
                         signed char* path_side,
                         int k, int l, double* phi, int j) noexcept nogil:
    state[j] = 1
    path_feat[k + l] = j
    path_side[k + l] = 1
    _shap_rec(child, feature, threshold, left, right, value, x, z, wtable,
              state, path_feat, path_side, k + 1, l, phi)
    state[j] = 0


cdef void _shap_branch_b(int child,
                         const int[::1] feature, const double[::1] threshold,
                         const int[::1] left, const int[::1] right,
                         const double[::1] value,
                         const double[::1] x, const double* z,
                         const double[:, ::1] wtable,
                         signed char* state, int* path_feat,
                         signed char* path_side,
                         int k, int l, double* phi, int j) noexcept nogil:
    state[j] = 2
    path_feat[k + l] = j
    path_side[k + l] = 2
    _shap_rec(child, feature, threshold, left, right, value, x, z, wtable,
              state, path_feat, path_side, k, l + 1, phi)
    state[j] = 0


def shap_tree(const int[::1] feature, const double[::1] threshold,
              const int[::1] left, const int[::1] right,
              const double[::1] value,
              const double[::1] x, const double[:, ::1] background,
              const double[:, ::1] wtable):
    """See ``equarent._kernels.pure.shap_tree``."""
    cdef Py_ssize_t m = background.shape[0]
    cdef Py_ssize_t d = background.shape[1]
    cdef Py_ssize_t zi
    phi = np.zeros((m, d), dtype=np.float64)
    cdef double[:, ::1] pv = phi
    cdef signed char* state = <signed char*> malloc(d * sizeof(signed char))
    cdef int* path_feat = <int*> malloc(d * sizeof(int))
    cdef signed char* path_side = <signed char*> malloc(d * sizeof(signed char))
    if state == NULL or path_feat == NULL or path_side == NULL:
        free(state)
        free(path_feat)
        free(path_side)
        raise MemoryError()
    cdef Py_ssize_t t
    try:
        with nogil:
            for t in range(d):
                state[t] = 0
            for zi in range(m):
                _shap_rec(0, feature, threshold, left, right, value, x,
                          &background[zi, 0], wtable, state, path_feat,
                          path_side, 0, 0, &pv[zi, 0])
        return phi
    finally:
        free(state)
        free(path_feat)
        free(path_side)
