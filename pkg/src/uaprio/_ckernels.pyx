# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Mirrors ``_pykernels`` operation for operation."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy

cnp.import_array()

BACKEND = "cython"


def evaluate_batch(perms, enc, long long budget_num, long long budget_den, codes):
    cdef int[:, ::1] P = np.ascontiguousarray(perms, dtype=np.int32)
    cdef Py_ssize_t n_rows = P.shape[0]
    cdef Py_ssize_t n = P.shape[1]
    cdef int[::1] cd = np.ascontiguousarray(codes, dtype=np.int32)
    cdef int k = cd.shape[0]
    out_arr = np.zeros((n_rows, 2 + k), dtype=np.float64)
    mts_arr = np.zeros(n_rows, dtype=np.int64)
    cdef double[:, ::1] out = out_arr
    cdef long long[::1] mts = mts_arr
    cdef long long[::1] et = np.ascontiguousarray(enc.et_ms, dtype=np.int64)
    cdef long long[::1] tr_ptr = np.ascontiguousarray(enc.tr_ptr, dtype=np.int64)
    cdef int[::1] tr_idx = np.ascontiguousarray(enc.tr_idx, dtype=np.int32)
    cdef long long[::1] uu_ptr = np.ascontiguousarray(enc.uu_ptr, dtype=np.int64)
    cdef int[::1] uu_idx = np.ascontiguousarray(enc.uu_idx, dtype=np.int32)
    cdef double[::1] um = np.ascontiguousarray(enc.um, dtype=np.float64)
    cdef double[::1] nor_nu = np.ascontiguousarray(enc.nor_nu, dtype=np.float64)
    cdef double[::1] usp_frac = np.ascontiguousarray(enc.usp_frac, dtype=np.float64)
    cdef long long total = enc.total_ms
    cdef double total_d = <double>total
    cdef double ntr = enc.ntr
    cdef double nuu = enc.nuu
    cdef long long limit = budget_num * total
    cdef long long[::1] stamp_tr = np.zeros(max(1, enc.n_tr_ids), dtype=np.int64)
    cdef long long[::1] stamp_uu = np.zeros(max(1, enc.n_uu_ids), dtype=np.int64)
    cdef double acc[8]
    cdef Py_ssize_t b, j, p, c
    cdef long long used, mt, stamp
    cdef int idx, code, x, new_tr, new_u
    cdef double w, acc_et, acc_tr
    if k > 8:
        raise ValueError("at most 8 uncertainty measures")
    for b in range(n_rows):
        used = 0
        mt = 0
        for j in range(n):
            used += et[P[b, j]]
            if used * budget_den > limit:
                break
            mt += 1
        mts[b] = mt
        if mt == 0:
            continue
        stamp = b + 1
        acc_et = 0.0
        acc_tr = 0.0
        for c in range(k):
            acc[c] = 0.0
        for j in range(mt):
            idx = P[b, j]
            w = <double>(mt - j) / <double>mt
            acc_et += <double>et[idx] * w
            new_tr = 0
            for p in range(tr_ptr[idx], tr_ptr[idx + 1]):
                x = tr_idx[p]
                if stamp_tr[x] != stamp:
                    stamp_tr[x] = stamp
                    new_tr += 1
            acc_tr += <double>new_tr * w
            new_u = -1
            for c in range(k):
                code = cd[c]
                if code == 0:
                    acc[c] += um[idx] * w
                elif code == 1:
                    acc[c] += usp_frac[idx] * w
                elif code == 2:
                    acc[c] += nor_nu[idx] * w
                else:
                    if new_u < 0:
                        new_u = 0
                        for p in range(uu_ptr[idx], uu_ptr[idx + 1]):
                            x = uu_idx[p]
                            if stamp_uu[x] != stamp:
                                stamp_uu[x] = stamp
                                new_u += 1
                    acc[c] += <double>new_u * w
        out[b, 0] = acc_et / total_d
        out[b, 1] = acc_tr / ntr
        for c in range(k):
            if cd[c] == 3:
                out[b, 2 + c] = acc[c] / nuu
            else:
                out[b, 2 + c] = acc[c] / <double>mt
    return out_arr, mts_arr


cdef void _pmx_child(int* a, int* b, int* child, int n, int lo, int hi,
                     int* pos_a, char* in_seg) noexcept nogil:
    cdef int i, v
    for i in range(n):
        pos_a[a[i]] = i
        in_seg[i] = 0
    for i in range(lo, hi + 1):
        child[i] = a[i]
        in_seg[a[i]] = 1
    for i in range(n):
        if lo <= i <= hi:
            continue
        v = b[i]
        while in_seg[v]:
            v = b[pos_a[v]]
        child[i] = v


def pmx_batch(p1, p2, lo, hi, do_cx):
    a_arr = np.ascontiguousarray(p1, dtype=np.int32)
    b_arr = np.ascontiguousarray(p2, dtype=np.int32)
    c1_arr = a_arr.copy()
    c2_arr = b_arr.copy()
    cdef int[:, ::1] A = a_arr
    cdef int[:, ::1] B = b_arr
    cdef int[:, ::1] C1 = c1_arr
    cdef int[:, ::1] C2 = c2_arr
    cdef long long[::1] L = np.ascontiguousarray(lo, dtype=np.int64)
    cdef long long[::1] H = np.ascontiguousarray(hi, dtype=np.int64)
    cdef cnp.npy_bool[::1] D = np.ascontiguousarray(do_cx, dtype=np.bool_)
    cdef Py_ssize_t rows = A.shape[0]
    cdef int n = A.shape[1]
    cdef int* pos_a = <int*>malloc(max(1, n) * sizeof(int))
    cdef char* in_seg = <char*>malloc(max(1, n) * sizeof(char))
    cdef Py_ssize_t r
    try:
        for r in range(rows):
            if not D[r]:
                continue
            _pmx_child(&A[r, 0], &B[r, 0], &C1[r, 0], n, <int>L[r], <int>H[r], pos_a, in_seg)
            _pmx_child(&B[r, 0], &A[r, 0], &C2[r, 0], n, <int>L[r], <int>H[r], pos_a, in_seg)
    finally:
        free(pos_a)
        free(in_seg)
    return c1_arr, c2_arr


def swap_mutation(perms, mask, partner):
    out_arr = np.array(perms, dtype=np.int32, copy=True, order="C")
    cdef int[:, ::1] X = out_arr
    cdef cnp.npy_bool[:, ::1] M = np.ascontiguousarray(mask, dtype=np.bool_)
    cdef long long[:, ::1] Q = np.ascontiguousarray(partner, dtype=np.int64)
    cdef Py_ssize_t r, i, j
    cdef int tmp
    for r in range(X.shape[0]):
        for i in range(X.shape[1]):
            if M[r, i]:
                j = Q[r, i]
                if j >= i:
                    j += 1
                tmp = X[r, i]
                X[r, i] = X[r, j]
                X[r, j] = tmp
    return out_arr


cdef inline bint _dom(double* a, double* b, int m) noexcept nogil:
    cdef int k
    cdef bint strictly = 0
    for k in range(m):
        if a[k] > b[k]:
            return 0
        if a[k] < b[k]:
            strictly = 1
    return strictly


cdef inline bint _equal(double* a, double* b, int m) noexcept nogil:
    cdef int k
    for k in range(m):
        if a[k] != b[k]:
            return 0
    return 1


def nondominated_rank(F):
    cdef double[:, ::1] X = np.ascontiguousarray(F, dtype=np.float64)
    cdef Py_ssize_t n = X.shape[0]
    cdef int m = X.shape[1]
    rank_arr = np.full(n, -1, dtype=np.int32)
    if n == 0:
        return rank_arr
    cdef int[::1] rank = rank_arr
    count_arr = np.zeros(n, dtype=np.int64)
    cdef long long[::1] count = count_arr
    cdef char* domm = <char*>malloc(n * n * sizeof(char))
    cdef int* cur = <int*>malloc(n * sizeof(int))
    cdef int* nxt = <int*>malloc(n * sizeof(int))
    cdef Py_ssize_t i, j
    cdef int ncur, nnxt, t, r
    try:
        for i in range(n):
            for j in range(n):
                domm[i * n + j] = 0
        for i in range(n):
            for j in range(i + 1, n):
                if _dom(&X[i, 0], &X[j, 0], m):
                    domm[i * n + j] = 1
                    count[j] += 1
                elif _dom(&X[j, 0], &X[i, 0], m):
                    domm[j * n + i] = 1
                    count[i] += 1
        ncur = 0
        for i in range(n):
            if count[i] == 0:
                cur[ncur] = <int>i
                ncur += 1
        r = 0
        while ncur > 0:
            nnxt = 0
            for t in range(ncur):
                rank[cur[t]] = r
            for t in range(ncur):
                i = cur[t]
                for j in range(n):
                    if domm[i * n + j]:
                        count[j] -= 1
                        if count[j] == 0:
                            nxt[nnxt] = <int>j
                            nnxt += 1
            # keep ascending index order like the numpy reference
            _isort_int(nxt, nnxt)
            memcpy(cur, nxt, nnxt * sizeof(int))
            ncur = nnxt
            r += 1
    finally:
        free(domm)
        free(cur)
        free(nxt)
    return rank_arr


cdef void _isort_int(int* a, int n) noexcept nogil:
    cdef int i, j, v
    for i in range(1, n):
        v = a[i]
        j = i - 1
        while j >= 0 and a[j] > v:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = v


cdef void _argsort(double* keys, int* idx, int n, int* tmp) noexcept nogil:
    """Stable bottom-up merge sort of ``idx`` (positions 0..n-1) by ``keys``."""
    cdef int width, lo, mid, hi, i, j, t
    for i in range(n):
        idx[i] = i
    width = 1
    while width < n:
        lo = 0
        while lo < n:
            mid = lo + width
            if mid > n:
                mid = n
            hi = lo + 2 * width
            if hi > n:
                hi = n
            i = lo
            j = mid
            t = lo
            while i < mid and j < hi:
                if keys[idx[j]] < keys[idx[i]]:
                    tmp[t] = idx[j]
                    j += 1
                else:
                    tmp[t] = idx[i]
                    i += 1
                t += 1
            while i < mid:
                tmp[t] = idx[i]
                i += 1
                t += 1
            while j < hi:
                tmp[t] = idx[j]
                j += 1
                t += 1
            lo = hi
        for i in range(n):
            idx[i] = tmp[i]
        width *= 2


cdef void _crowding(double* F, int m, long long* members, int size, double* cd,
                    double* keys, int* order, int* tmp) noexcept nogil:
    cdef int k, t
    cdef double lo, hi, span
    for t in range(size):
        cd[t] = 0.0
    if size <= 2:
        for t in range(size):
            cd[t] = INFINITY
        return
    for k in range(m):
        for t in range(size):
            keys[t] = F[members[t] * m + k]
        _argsort(keys, order, size, tmp)
        lo = keys[order[0]]
        hi = keys[order[size - 1]]
        cd[order[0]] = INFINITY
        cd[order[size - 1]] = INFINITY
        span = hi - lo
        if span > 0:
            for t in range(1, size - 1):
                cd[order[t]] += (keys[order[t + 1]] - keys[order[t - 1]]) / span


def archive_insert(F, G, members, candidates, int capacity, tiebreak):
    cdef double[:, ::1] X = np.ascontiguousarray(F, dtype=np.float64)
    cdef int[:, ::1] Gv = np.ascontiguousarray(G, dtype=np.int32)
    cdef long long[::1] mem = np.ascontiguousarray(members, dtype=np.int64)
    cdef long long[::1] cand = np.ascontiguousarray(candidates, dtype=np.int64)
    cdef double[::1] tb = np.ascontiguousarray(tiebreak, dtype=np.float64)
    cdef int m = X.shape[1]
    cdef int glen = Gv.shape[1]
    cdef int cap_all = mem.shape[0] + cand.shape[0] + 2
    cdef long long* arch = <long long*>malloc(cap_all * sizeof(long long))
    cdef double* cdv = <double*>malloc(cap_all * sizeof(double))
    cdef double* keys = <double*>malloc(cap_all * sizeof(double))
    cdef int* order = <int*>malloc(cap_all * sizeof(int))
    cdef int* tmp = <int*>malloc(cap_all * sizeof(int))
    cdef int na = 0, t, q, worst, g
    cdef long long c, a
    cdef bint rejected, same
    cdef Py_ssize_t ci
    try:
        for t in range(mem.shape[0]):
            arch[na] = mem[t]
            na += 1
        for ci in range(cand.shape[0]):
            c = cand[ci]
            rejected = 0
            for t in range(na):
                a = arch[t]
                if _dom(&X[a, 0], &X[c, 0], m):
                    rejected = 1
                    break
                if _equal(&X[a, 0], &X[c, 0], m):
                    same = 1
                    for g in range(glen):
                        if Gv[a, g] != Gv[c, g]:
                            same = 0
                            break
                    if same:
                        rejected = 1
                        break
            if rejected:
                continue
            q = 0
            for t in range(na):
                if not _dom(&X[c, 0], &X[arch[t], 0], m):
                    arch[q] = arch[t]
                    q += 1
            na = q
            arch[na] = c
            na += 1
            if na > capacity:
                _crowding(&X[0, 0], m, arch, na, cdv, keys, order, tmp)
                worst = 0
                for t in range(1, na):
                    if cdv[t] < cdv[worst] or (cdv[t] == cdv[worst] and tb[arch[t]] < tb[arch[worst]]):
                        worst = t
                for t in range(worst, na - 1):
                    arch[t] = arch[t + 1]
                na -= 1
        out = np.empty(na, dtype=np.int64)
        for t in range(na):
            out[t] = arch[t]
    finally:
        free(arch)
        free(cdv)
        free(keys)
        free(order)
        free(tmp)
    return out


def cell_replace(F_pop, F_off, neigh, tb_pop, tb_off):
    cdef double[:, ::1] Fp = np.ascontiguousarray(F_pop, dtype=np.float64)
    cdef double[:, ::1] Fo = np.ascontiguousarray(F_off, dtype=np.float64)
    cdef long long[:, ::1] Nb = np.ascontiguousarray(neigh, dtype=np.int64)
    cdef double[::1] tp = np.ascontiguousarray(tb_pop, dtype=np.float64)
    cdef double[::1] to = np.ascontiguousarray(tb_off, dtype=np.float64)
    cdef Py_ssize_t n = Fo.shape[0]
    cdef int m = Fp.shape[1]
    cdef int gsz = Nb.shape[1] + 1
    out_arr = np.zeros(n, dtype=bool)
    cdef cnp.npy_bool[::1] out = out_arr
    cdef double* grp = <double*>malloc(gsz * m * sizeof(double))
    cdef int* rank = <int*>malloc(gsz * sizeof(int))
    cdef char* mark = <char*>malloc(gsz * sizeof(char))
    cdef long long* front = <long long*>malloc(gsz * sizeof(long long))
    cdef double* cdv = <double*>malloc(gsz * sizeof(double))
    cdef double* keys = <double*>malloc(gsz * sizeof(double))
    cdef int* order = <int*>malloc(gsz * sizeof(int))
    cdef int* tmp = <int*>malloc(gsz * sizeof(int))
    cdef Py_ssize_t i
    cdef int t, s, k, self_pos, off_pos, r, left, nf, fs, fo
    cdef bint dominated
    cdef double dc, do
    try:
        for i in range(n):
            if _dom(&Fo[i, 0], &Fp[i, 0], m):
                out[i] = 1
                continue
            if _dom(&Fp[i, 0], &Fo[i, 0], m):
                continue
            self_pos = -1
            for t in range(gsz - 1):
                if self_pos < 0 and Nb[i, t] == i:
                    self_pos = t
                for k in range(m):
                    grp[t * m + k] = Fp[Nb[i, t], k]
            off_pos = gsz - 1
            for k in range(m):
                grp[off_pos * m + k] = Fo[i, k]
            for t in range(gsz):
                rank[t] = -1
            left = gsz
            r = 0
            while left > 0:
                for t in range(gsz):
                    mark[t] = 0
                    if rank[t] != -1:
                        continue
                    dominated = 0
                    for s in range(gsz):
                        if s != t and rank[s] == -1 and _dom(&grp[s * m], &grp[t * m], m):
                            dominated = 1
                            break
                    if not dominated:
                        mark[t] = 1
                for t in range(gsz):
                    if mark[t]:
                        rank[t] = r
                        left -= 1
                r += 1
            if rank[off_pos] != rank[self_pos]:
                out[i] = rank[off_pos] < rank[self_pos]
                continue
            nf = 0
            fs = -1
            fo = -1
            for t in range(gsz):
                if rank[t] == rank[self_pos]:
                    if t == self_pos:
                        fs = nf
                    if t == off_pos:
                        fo = nf
                    front[nf] = t
                    nf += 1
            _crowding(grp, m, front, nf, cdv, keys, order, tmp)
            dc = cdv[fs]
            do = cdv[fo]
            if do != dc:
                out[i] = do > dc
            else:
                out[i] = to[i] < tp[i]
    finally:
        free(grp)
        free(rank)
        free(mark)
        free(front)
        free(cdv)
        free(keys)
        free(order)
        free(tmp)
    return out_arr


def spea2_truncate(F, int n_keep, tiebreak):
    cdef double[:, ::1] X = np.ascontiguousarray(F, dtype=np.float64)
    cdef double[::1] tb = np.ascontiguousarray(tiebreak, dtype=np.float64)
    cdef int K = X.shape[0]
    cdef int m = X.shape[1]
    keep_arr = np.ones(K, dtype=bool)
    if K <= n_keep:
        return keep_arr
    cdef cnp.npy_bool[::1] alive = keep_arr
    cdef double* D = <double*>malloc(K * K * sizeof(double))
    cdef int* nb = <int*>malloc(K * K * sizeof(int))
    cdef int* tmp = <int*>malloc(K * sizeof(int))
    cdef int* order = <int*>malloc(K * sizeof(int))
    cdef double* row = <double*>malloc(K * sizeof(double))
    cdef int i, j, k, t, best, n_alive, pa, pb, ja, jb, cmp
    cdef double acc, diff, da, db
    try:
        for i in range(K):
            for j in range(K):
                acc = 0.0
                for k in range(m):
                    diff = X[i, k] - X[j, k]
                    if k == 0:
                        acc = diff * diff
                    else:
                        acc = acc + diff * diff
                D[i * K + j] = sqrt(acc)
        # neighbour lists sorted by distance, self excluded (placed via key order)
        for i in range(K):
            for j in range(K):
                row[j] = D[i * K + j]
            _argsort(row, order, K, tmp)
            t = 0
            for j in range(K):
                if order[j] != i:
                    nb[i * K + t] = order[j]
                    t += 1
        n_alive = K
        while n_alive > n_keep:
            best = -1
            for i in range(K):
                if not alive[i]:
                    continue
                if best < 0:
                    best = i
                    continue
                # lexicographic compare of alive-neighbour distance lists
                pa = 0
                pb = 0
                cmp = 0
                while True:
                    while pa < K - 1 and not alive[nb[i * K + pa]]:
                        pa += 1
                    while pb < K - 1 and not alive[nb[best * K + pb]]:
                        pb += 1
                    if pa >= K - 1 or pb >= K - 1:
                        break
                    da = D[i * K + nb[i * K + pa]]
                    db = D[best * K + nb[best * K + pb]]
                    if da < db:
                        cmp = -1
                        break
                    if da > db:
                        cmp = 1
                        break
                    pa += 1
                    pb += 1
                if cmp < 0 or (cmp == 0 and tb[i] < tb[best]):
                    best = i
            alive[best] = 0
            n_alive -= 1
    finally:
        free(D)
        free(nb)
        free(tmp)
        free(order)
        free(row)
    return keep_arr


cdef double _hv(double* P, int D, int* ids, int n, double* ref, int d) noexcept nogil:
    cdef int t, s, na, q, i, last
    cdef double area, ymin, nx, vol, nz, depth, best
    cdef int* order
    cdef int* tmp
    cdef int* active
    cdef double* keys
    cdef bint covered, wd
    if d == 1:
        best = P[ids[0] * D]
        for t in range(1, n):
            if P[ids[t] * D] < best:
                best = P[ids[t] * D]
        return ref[0] - best
    order = <int*>malloc(n * sizeof(int))
    tmp = <int*>malloc(n * sizeof(int))
    keys = <double*>malloc(n * sizeof(double))
    if d == 2:
        for t in range(n):
            keys[t] = P[ids[t] * D]
        _argsort(keys, order, n, tmp)
        area = 0.0
        ymin = ref[1]
        for t in range(n):
            i = ids[order[t]]
            if P[i * D + 1] < ymin:
                ymin = P[i * D + 1]
            if t + 1 < n:
                nx = P[ids[order[t + 1]] * D]
            else:
                nx = ref[0]
            area += (nx - P[i * D]) * (ref[1] - ymin)
        free(order)
        free(tmp)
        free(keys)
        return area
    last = d - 1
    for t in range(n):
        keys[t] = P[ids[t] * D + last]
    _argsort(keys, order, n, tmp)
    active = <int*>malloc(n * sizeof(int))
    na = 0
    vol = 0.0
    for t in range(n):
        i = ids[order[t]]
        covered = 0
        for s in range(na):
            if _wdom(&P[active[s] * D], &P[i * D], last):
                covered = 1
                break
        if not covered:
            q = 0
            for s in range(na):
                if not _wdom(&P[i * D], &P[active[s] * D], last):
                    active[q] = active[s]
                    q += 1
            na = q
            active[na] = i
            na += 1
        if t + 1 < n:
            nz = P[ids[order[t + 1]] * D + last]
        else:
            nz = ref[last]
        depth = nz - P[i * D + last]
        if depth > 0:
            vol += depth * _hv(P, D, active, na, ref, last)
    free(active)
    free(order)
    free(tmp)
    free(keys)
    return vol


cdef inline bint _wdom(double* a, double* b, int d) noexcept nogil:
    cdef int k
    for k in range(d):
        if a[k] > b[k]:
            return 0
    return 1


def hypervolume(points, ref):
    P_arr = np.ascontiguousarray(points, dtype=np.float64)
    ref_arr = np.ascontiguousarray(ref, dtype=np.float64)
    if P_arr.shape[0] == 0:
        return 0.0
    P_arr = np.ascontiguousarray(P_arr[np.all(P_arr < ref_arr, axis=1)])
    if P_arr.shape[0] == 0:
        return 0.0
    cdef double[:, ::1] P = P_arr
    cdef double[::1] R = ref_arr
    cdef int n = P.shape[0]
    cdef int D = P.shape[1]
    cdef int* ids = <int*>malloc(n * sizeof(int))
    cdef int t
    cdef double v
    for t in range(n):
        ids[t] = t
    v = _hv(&P[0, 0], D, ids, n, &R[0], D)
    free(ids)
    return v


def spea2_fitness(F, int k):
    cdef double[:, ::1] X = np.ascontiguousarray(F, dtype=np.float64)
    cdef int K = X.shape[0]
    cdef int m = X.shape[1]
    out_arr = np.zeros(K, dtype=np.float64)
    cdef double[::1] out = out_arr
    if K == 0:
        return out_arr
    cdef long long* strength = <long long*>malloc(K * sizeof(long long))
    cdef char* dom = <char*>malloc(K * K * sizeof(char))
    cdef double* sq = <double*>malloc(K * K * sizeof(double))
    cdef double* best = <double*>malloc(k * sizeof(double))
    cdef int i, j, c, t, filled
    cdef long long raw
    cdef double acc, diff
    try:
        for i in range(K):
            strength[i] = 0
            for j in range(K):
                dom[i * K + j] = _dom(&X[i, 0], &X[j, 0], m)
                strength[i] += dom[i * K + j]
        # squared distances are symmetric, and sqrt preserves their order
        for i in range(K):
            for j in range(i + 1, K):
                acc = 0.0
                for c in range(m):
                    diff = X[i, c] - X[j, c]
                    if c == 0:
                        acc = diff * diff
                    else:
                        acc = acc + diff * diff
                sq[i * K + j] = acc
                sq[j * K + i] = acc
        for i in range(K):
            raw = 0
            for j in range(K):
                if dom[j * K + i]:
                    raw += strength[j]
            if K == 1:
                out[i] = raw + 0.5
                continue
            # k smallest squared distances kept in ascending order
            filled = 0
            for j in range(K):
                if j == i:
                    continue
                acc = sq[i * K + j]
                if filled == k and acc >= best[k - 1]:
                    continue
                t = filled if filled < k else k - 1
                while t > 0 and best[t - 1] > acc:
                    best[t] = best[t - 1]
                    t -= 1
                best[t] = acc
                if filled < k:
                    filled += 1
            out[i] = raw + 1.0 / (sqrt(best[k - 1]) + 2.0)
    finally:
        free(strength)
        free(dom)
        free(sq)
        free(best)
    return out_arr
