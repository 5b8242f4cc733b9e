"""Pure-Python kernels.

Reference implementation of every routine in ``_ckernels.pyx``. Both modules
take pre-drawn random numbers and perform floating-point work in the same
order, so results are identical whichever backend is active.
"""
import math

import numpy as np

BACKEND = "python"

INF = math.inf


def evaluate_batch(perms, enc, budget_num, budget_den, codes):
    perms = np.asarray(perms)
    n_rows = perms.shape[0]
    k = len(codes)
    out = np.zeros((n_rows, 2 + k), dtype=np.float64)
    mts = np.zeros(n_rows, dtype=np.int64)
    et = enc.et_ms.tolist()
    tr_ptr = enc.tr_ptr.tolist()
    tr_idx = enc.tr_idx.tolist()
    uu_ptr = enc.uu_ptr.tolist()
    uu_idx = enc.uu_idx.tolist()
    um = enc.um.tolist()
    nor_nu = enc.nor_nu.tolist()
    usp_frac = enc.usp_frac.tolist()
    limit = budget_num * enc.total_ms
    codes = [int(c) for c in codes]
    for b in range(n_rows):
        row = perms[b].tolist()
        used = 0
        mt = 0
        for idx in row:
            used += et[idx]
            if used * budget_den > limit:
                break
            mt += 1
        mts[b] = mt
        if mt == 0:
            continue
        acc_et = 0.0
        acc_tr = 0.0
        acc = [0.0] * k
        seen_tr = set()
        seen_uu = set()
        for j in range(mt):
            idx = row[j]
            w = (mt - j) / mt
            acc_et += et[idx] * w
            new = 0
            for p in range(tr_ptr[idx], tr_ptr[idx + 1]):
                x = tr_idx[p]
                if x not in seen_tr:
                    seen_tr.add(x)
                    new += 1
            acc_tr += new * w
            new_u = -1
            for c in range(k):
                code = codes[c]
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
                            if x not in seen_uu:
                                seen_uu.add(x)
                                new_u += 1
                    acc[c] += new_u * w
        out[b, 0] = acc_et / enc.total_ms
        out[b, 1] = acc_tr / enc.ntr
        for c in range(k):
            if codes[c] == 3:
                out[b, 2 + c] = acc[c] / enc.nuu
            else:
                out[b, 2 + c] = acc[c] / mt
    return out, mts


def _pmx_child(a, b, lo, hi):
    n = len(a)
    child = [0] * n
    pos_a = [0] * n
    in_seg = [False] * n
    for i in range(n):
        pos_a[a[i]] = i
    for i in range(lo, hi + 1):
        child[i] = a[i]
        in_seg[a[i]] = True
    for i in list(range(0, lo)) + list(range(hi + 1, n)):
        v = b[i]
        while in_seg[v]:
            v = b[pos_a[v]]
        child[i] = v
    return child


def pmx_batch(p1, p2, lo, hi, do_cx):
    """Partially matched crossover row by row; ``lo..hi`` is inclusive."""
    p1 = np.asarray(p1, dtype=np.int32)
    p2 = np.asarray(p2, dtype=np.int32)
    c1 = p1.copy()
    c2 = p2.copy()
    for r in range(p1.shape[0]):
        if not do_cx[r]:
            continue
        a = p1[r].tolist()
        b = p2[r].tolist()
        c1[r] = _pmx_child(a, b, int(lo[r]), int(hi[r]))
        c2[r] = _pmx_child(b, a, int(lo[r]), int(hi[r]))
    return c1, c2


def swap_mutation(perms, mask, partner):
    """Swap position i with ``partner[i]`` (skipping i itself) where ``mask`` is set."""
    perms = np.array(perms, dtype=np.int32, copy=True)
    rows, cols = np.nonzero(mask)
    for r, i in zip(rows.tolist(), cols.tolist()):
        j = int(partner[r, i])
        if j >= i:
            j += 1
        perms[r, i], perms[r, j] = perms[r, j], perms[r, i]
    return perms


def _dom(a, b):
    strictly = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            strictly = True
    return strictly


def nondominated_rank(F):
    """Front index of every row (0 = nondominated), minimization."""
    F = np.asarray(F, dtype=np.float64)
    n = F.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int32)
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    dom = le & lt  # dom[i, j]: i dominates j
    count = dom.sum(axis=0)
    rank = np.full(n, -1, dtype=np.int32)
    current = np.flatnonzero(count == 0)
    r = 0
    while current.size:
        rank[current] = r
        count = count - dom[current].sum(axis=0)
        count[rank >= 0] = -1
        current = np.flatnonzero(count == 0)
        r += 1
    return rank


def _crowding(F, members):
    """Crowding distance of ``members`` (list of row ids) in list order."""
    size = len(members)
    cd = [0.0] * size
    if size <= 2:
        return [INF] * size
    m = F.shape[1]
    for k in range(m):
        vals = [F[i, k] for i in members]
        order = sorted(range(size), key=vals.__getitem__)
        lo = vals[order[0]]
        hi = vals[order[-1]]
        cd[order[0]] = INF
        cd[order[-1]] = INF
        span = hi - lo
        if span > 0:
            for t in range(1, size - 1):
                cd[order[t]] += (vals[order[t + 1]] - vals[order[t - 1]]) / span
    return cd


def archive_insert(F, G, members, candidates, capacity, tiebreak):
    """Sequentially offer ``candidates`` to a bounded crowding archive.

    ``F`` holds min-oriented objectives of the whole pool, ``G`` the
    genotypes. Returns the surviving member ids in list order.
    """
    F = np.asarray(F, dtype=np.float64)
    G = np.asarray(G)
    arch = [int(i) for i in members]
    rows = [F[i].tolist() for i in range(F.shape[0])]
    for c in candidates:
        c = int(c)
        fc = rows[c]
        rejected = False
        for a in arch:
            fa = rows[a]
            if _dom(fa, fc):
                rejected = True
                break
            if fa == fc and np.array_equal(G[a], G[c]):
                rejected = True
                break
        if rejected:
            continue
        arch = [a for a in arch if not _dom(fc, rows[a])]
        arch.append(c)
        if len(arch) > capacity:
            cd = _crowding(F, arch)
            worst = 0
            for t in range(1, len(arch)):
                if cd[t] < cd[worst] or (cd[t] == cd[worst]
                                         and tiebreak[arch[t]] < tiebreak[arch[worst]]):
                    worst = t
            del arch[worst]
    return np.asarray(arch, dtype=np.int64)


def _local_rank(rows):
    n = len(rows)
    rank = [-1] * n
    remaining = list(range(n))
    r = 0
    while remaining:
        front = [i for i in remaining
                 if not any(_dom(rows[j], rows[i]) for j in remaining if j != i)]
        for i in front:
            rank[i] = r
        remaining = [i for i in remaining if rank[i] < 0]
        r += 1
    return rank


def cell_replace(F_pop, F_off, neigh, tb_pop, tb_off):
    """Decide per cell whether the offspring replaces the current individual.

    Replace when the offspring dominates the current one. If neither
    dominates, rank the neighbourhood plus the offspring and replace when the
    offspring has the better (rank, crowding) pair; exact ties go to the
    smaller tiebreak value.
    """
    F_pop = np.asarray(F_pop, dtype=np.float64)
    F_off = np.asarray(F_off, dtype=np.float64)
    n = F_off.shape[0]
    out = np.zeros(n, dtype=bool)
    for i in range(n):
        c = F_pop[i].tolist()
        o = F_off[i].tolist()
        if _dom(o, c):
            out[i] = True
            continue
        if _dom(c, o):
            continue
        ids = [int(j) for j in neigh[i]]
        rows = [F_pop[j].tolist() for j in ids] + [o]
        group = np.vstack([F_pop[ids], F_off[i:i + 1]])
        rank = _local_rank(rows)
        self_pos = ids.index(i)
        off_pos = len(ids)
        rc, ro = rank[self_pos], rank[off_pos]
        if ro != rc:
            out[i] = ro < rc
            continue
        front = [t for t in range(len(rows)) if rank[t] == rc]
        cd = _crowding(group, front)
        dc = cd[front.index(self_pos)]
        do = cd[front.index(off_pos)]
        if do != dc:
            out[i] = do > dc
        else:
            out[i] = tb_off[i] < tb_pop[i]
    return out


def _lex_less(da, db):
    for x, y in zip(da, db):
        if x < y:
            return True
        if x > y:
            return False
    return False


def spea2_truncate(F, n_keep, tiebreak):
    """Iteratively drop the point with the lexicographically smallest
    sorted distance list until ``n_keep`` remain. Returns a keep mask."""
    F = np.asarray(F, dtype=np.float64)
    K, m = F.shape
    diff = F[:, None, :] - F[None, :, :]
    acc = diff[:, :, 0] * diff[:, :, 0]
    for k in range(1, m):
        acc = acc + diff[:, :, k] * diff[:, :, k]
    D = np.sqrt(acc).tolist()
    alive = [True] * K
    n_alive = K
    while n_alive > n_keep:
        best = -1
        best_d = None
        for i in range(K):
            if not alive[i]:
                continue
            d = sorted(D[i][j] for j in range(K) if j != i and alive[j])
            if best < 0 or _lex_less(d, best_d) or (
                    d == best_d and tiebreak[i] < tiebreak[best]):
                best, best_d = i, d
        alive[best] = False
        n_alive -= 1
    return np.asarray(alive, dtype=bool)


def hypervolume(points, ref):
    """Exact hypervolume (minimization) by slicing along the last axis."""
    P = np.asarray(points, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    if P.shape[0] == 0:
        return 0.0
    keep = np.all(P < ref, axis=1)
    P = P[keep]
    if P.shape[0] == 0:
        return 0.0
    return _hv(P.tolist(), ref.tolist(), P.shape[1])


def _hv(pts, ref, d):
    if d == 1:
        return ref[0] - min(p[0] for p in pts)
    if d == 2:
        order = sorted(range(len(pts)), key=lambda i: pts[i][0])
        area = 0.0
        ymin = ref[1]
        for t, i in enumerate(order):
            if pts[i][1] < ymin:
                ymin = pts[i][1]
            nx = pts[order[t + 1]][0] if t + 1 < len(order) else ref[0]
            area += (nx - pts[i][0]) * (ref[1] - ymin)
        return area
    last = d - 1
    order = sorted(range(len(pts)), key=lambda i: pts[i][last])
    vol = 0.0
    active = []
    for t, i in enumerate(order):
        p = pts[i]
        if not any(_weakly_dominates(q, p, last) for q in active):
            active = [q for q in active if not _weakly_dominates(p, q, last)]
            active.append(p)
        nz = pts[order[t + 1]][last] if t + 1 < len(order) else ref[last]
        depth = nz - p[last]
        if depth > 0:
            vol += depth * _hv(active, ref, last)
    return vol


def _weakly_dominates(a, b, d):
    for k in range(d):
        if a[k] > b[k]:
            return False
    return True


def spea2_fitness(F, k):
    """Strength raw fitness plus 1/(sigma_k + 2) density for every row."""
    F = np.asarray(F, dtype=np.float64)
    K, m = F.shape
    rows = F.tolist()
    dom = [[_dom(rows[i], rows[j]) for j in range(K)] for i in range(K)]
    strength = [sum(r) for r in dom]
    diff = F[:, None, :] - F[None, :, :]
    acc = diff[:, :, 0] * diff[:, :, 0]
    for c in range(1, m):
        acc = acc + diff[:, :, c] * diff[:, :, c]
    D = np.sqrt(acc).tolist()
    out = np.zeros(K)
    for i in range(K):
        raw = 0
        for j in range(K):
            if dom[j][i]:
                raw += strength[j]
        if K > 1:
            d = sorted(D[i][j] for j in range(K) if j != i)
            sigma = d[k - 1]
            out[i] = raw + 1.0 / (sigma + 2.0)
        else:
            out[i] = raw + 0.5
    return out
