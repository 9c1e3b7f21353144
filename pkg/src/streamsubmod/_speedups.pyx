# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled backend for the hot kernels; see _pure.py for the spec layout."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"

cdef extern from *:
    """
    static inline int _ssm_popcount(unsigned long long x) {
        return __builtin_popcountll(x);
    }
    """
    int _ssm_popcount(unsigned long long x) nogil


cdef double _eval_mask(int code, int n,
                       unsigned long long[::1] ia, long long[::1] ib_u,
                       long long[::1] ib_v, double[::1] fa,
                       long long extra, unsigned long long mask) nogil:
    cdef double total = 0.0
    cdef int i
    cdef unsigned long long union_mask, bit
    cdef int in_u, in_v, k
    if code == 1:  # modular
        for i in range(n):
            if (mask >> i) & 1:
                total += fa[i]
        return total
    if code == 2:  # coverage
        union_mask = 0
        for i in range(n):
            if (mask >> i) & 1:
                union_mask |= ia[i]
        i = 0
        while union_mask:
            if union_mask & 1:
                total += fa[i]
            union_mask >>= 1
            i += 1
        return total
    if code == 3:  # cut
        for i in range(ib_u.shape[0]):
            in_u = (mask >> ib_u[i]) & 1
            in_v = (mask >> ib_v[i]) & 1
            if extra:
                if in_u and not in_v:
                    total += fa[i]
            elif in_u != in_v:
                total += fa[i]
        return total
    # code 4: hard instance
    k = <int> extra
    if (mask >> (n - 1)) & 1:
        bit = mask & ((<unsigned long long> 1 << (k - 1)) - 1) if k > 1 else 0
        return k + _ssm_popcount(bit)
    return _ssm_popcount(mask)


cdef class _Spec:
    cdef int code, n
    cdef long long extra
    cdef unsigned long long[::1] ia
    cdef long long[::1] ib_u
    cdef long long[::1] ib_v
    cdef double[::1] fa


cdef _Spec _unpack(spec):
    cdef _Spec out = _Spec()
    code, n, ia, ib, fa, extra = spec
    out.code = code
    out.n = n
    out.extra = extra
    if code == 2:
        out.ia = np.ascontiguousarray(ia, dtype=np.uint64)
    else:
        out.ia = np.zeros(0, dtype=np.uint64)
    if code == 3:
        out.ib_u = np.ascontiguousarray(ia, dtype=np.int64)
        out.ib_v = np.ascontiguousarray(ib, dtype=np.int64)
    else:
        out.ib_u = np.zeros(0, dtype=np.int64)
        out.ib_v = np.zeros(0, dtype=np.int64)
    out.fa = np.ascontiguousarray(fa, dtype=np.float64)
    return out


def eval_many(spec, masks):
    cdef _Spec sp = _unpack(spec)
    cdef unsigned long long[::1] m = np.ascontiguousarray(masks, dtype=np.uint64)
    cdef cnp.ndarray[double, ndim=1] out = np.empty(m.shape[0], dtype=np.float64)
    cdef Py_ssize_t i
    for i in range(m.shape[0]):
        out[i] = _eval_mask(sp.code, sp.n, sp.ia, sp.ib_u, sp.ib_v, sp.fa,
                            sp.extra, m[i])
    return out


def brute_force(spec, ids, int k):
    """Best subset of `ids` of size <= k; lexicographically smallest sorted
    id list on value ties. Returns (best_ids, best_value, n_evals)."""
    cdef _Spec sp = _unpack(spec)
    cdef long long[::1] pool = np.ascontiguousarray(np.sort(np.asarray(ids, dtype=np.int64)))
    cdef int m = pool.shape[0]
    cdef int size, i, j, cmp_len
    cdef long long n_evals = 0
    cdef double best_val, val
    cdef unsigned long long mask
    cdef long long[::1] idx = np.zeros(max(k, 1), dtype=np.int64)
    cdef long long[::1] best = np.zeros(max(k, 1), dtype=np.int64)
    cdef int best_len = 0
    cdef bint better, done

    best_val = _eval_mask(sp.code, sp.n, sp.ia, sp.ib_u, sp.ib_v, sp.fa, sp.extra, 0)
    n_evals += 1
    if k > m:
        k = m
    for size in range(1, k + 1):
        for i in range(size):
            idx[i] = i
        done = False
        while not done:
            mask = 0
            for i in range(size):
                mask |= (<unsigned long long> 1) << pool[idx[i]]
            val = _eval_mask(sp.code, sp.n, sp.ia, sp.ib_u, sp.ib_v, sp.fa, sp.extra, mask)
            n_evals += 1
            better = val > best_val
            if not better and val == best_val:
                # lexicographic comparison of sorted id lists
                cmp_len = size if size < best_len else best_len
                for i in range(cmp_len):
                    if pool[idx[i]] != best[i]:
                        better = pool[idx[i]] < best[i]
                        break
                else:
                    better = size < best_len
            if better:
                best_val = val
                best_len = size
                for i in range(size):
                    best[i] = pool[idx[i]]
            # next combination in lexicographic order
            j = size - 1
            while j >= 0 and idx[j] == m - size + j:
                j -= 1
            if j < 0:
                done = True
            else:
                idx[j] += 1
                for i in range(j + 1, size):
                    idx[i] = idx[i - 1] + 1
    return np.asarray(best[:best_len]).copy(), best_val, n_evals


def multilinear_exact(spec, frac_ids, frac_probs, base_mask):
    """Expectation of f over independent inclusion of frac_ids, base always in."""
    cdef _Spec sp = _unpack(spec)
    cdef long long[::1] ids = np.ascontiguousarray(frac_ids, dtype=np.int64)
    cdef double[::1] probs = np.ascontiguousarray(frac_probs, dtype=np.float64)
    cdef int s = ids.shape[0]
    cdef unsigned long long base = <unsigned long long> base_mask
    cdef unsigned long long sub, mask, total = (<unsigned long long> 1) << s
    cdef double value = 0.0, weight
    cdef int j
    for sub in range(total):
        mask = base
        weight = 1.0
        for j in range(s):
            if (sub >> j) & 1:
                mask |= (<unsigned long long> 1) << ids[j]
                weight *= probs[j]
            else:
                weight *= 1.0 - probs[j]
        value += weight * _eval_mask(sp.code, sp.n, sp.ia, sp.ib_u, sp.ib_v,
                                     sp.fa, sp.extra, mask)
    return value, <long long> total
