# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled traversal kernels. Same contract and arithmetic order as _pykernel."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef cnp.intp_t idx_t


cdef struct Tree:
    idx_t n
    idx_t max_actions
    idx_t* kind
    idx_t* player
    idx_t* child_start
    idx_t* n_actions
    idx_t* children
    idx_t* row_base
    idx_t* winner
    double* contrib


cdef struct Tables:
    double* regrets[2]
    double* sums[2]
    double* strat[2]
    idx_t stride


cdef class _Bound:
    """Keeps the numpy buffers referenced by a Tree alive."""
    cdef Tree tree
    cdef object refs

    def __init__(self, flat):
        cdef cnp.ndarray kind = np.ascontiguousarray(flat.kind, dtype=np.intp)
        cdef cnp.ndarray player = np.ascontiguousarray(flat.player, dtype=np.intp)
        cdef cnp.ndarray child_start = np.ascontiguousarray(flat.child_start, dtype=np.intp)
        cdef cnp.ndarray n_actions = np.ascontiguousarray(flat.n_actions, dtype=np.intp)
        cdef cnp.ndarray children = np.ascontiguousarray(flat.children, dtype=np.intp)
        cdef cnp.ndarray row_base = np.ascontiguousarray(flat.row_base, dtype=np.intp)
        cdef cnp.ndarray winner = np.ascontiguousarray(flat.winner, dtype=np.intp)
        cdef cnp.ndarray contrib = np.ascontiguousarray(flat.contrib, dtype=np.float64)
        self.refs = (kind, player, child_start, n_actions, children, row_base, winner, contrib)
        self.tree.n = flat.deck_size
        self.tree.max_actions = int(np.max(flat.n_actions))
        self.tree.kind = <idx_t*> kind.data
        self.tree.player = <idx_t*> player.data
        self.tree.child_start = <idx_t*> child_start.data
        self.tree.n_actions = <idx_t*> n_actions.data
        self.tree.children = <idx_t*> children.data
        self.tree.row_base = <idx_t*> row_base.data
        self.tree.winner = <idx_t*> winner.data
        self.tree.contrib = <double*> contrib.data


_bound_cache = {}


cdef _Bound _bind(flat):
    key = id(flat)
    entry = _bound_cache.get(key)
    if entry is None or entry[0] is not flat:
        entry = (flat, _Bound(flat))
        _bound_cache[key] = entry
    return entry[1]


cdef void terminal(Tree* t, idx_t nid, int traverser, double* reach, double* out) noexcept nogil:
    cdef idx_t n = t.n
    cdef double scale = 1.0 / (n * (n - 1))
    cdef double own = t.contrib[2 * nid + traverser]
    cdef double opp = t.contrib[2 * nid + 1 - traverser]
    cdef double amount, running = 0.0, total
    cdef idx_t c
    if t.kind[nid] == 1:
        for c in range(n):
            running += reach[c]
        total = running
        amount = opp if t.winner[nid] == traverser else -own
        for c in range(n):
            out[c] = scale * amount * (total - reach[c])
    else:
        # out[c] temporarily holds the mass strictly below rank c
        for c in range(n):
            out[c] = running
            running += reach[c]
        total = running
        for c in range(n):
            out[c] = scale * (opp * out[c] - own * ((total - out[c]) - reach[c]))


cdef void match_block(Tree* t, double* table, idx_t stride, idx_t base, idx_t na,
                      double* sigma) noexcept nogil:
    # sigma is (na, n): column c is the strategy at row base + c
    cdef idx_t n = t.n
    cdef idx_t a, c
    cdef double total, x, uniform = 1.0 / na
    for c in range(n):
        total = 0.0
        for a in range(na):
            x = table[(base + c) * stride + a]
            if x < 0.0:
                x = 0.0
            sigma[a * n + c] = x
            if a == 0:
                total = x
            else:
                total = total + x
        if total > 0.0:
            for a in range(na):
                sigma[a * n + c] = sigma[a * n + c] / total
        else:
            for a in range(na):
                sigma[a * n + c] = uniform


cdef void cfr(Tree* t, Tables* tb, idx_t nid, int traverser, double weight, bint plus,
              double* reach, double* out, double* work) noexcept nogil:
    if t.kind[nid] != 0:
        terminal(t, nid, traverser, reach, out)
        return
    cdef idx_t n = t.n
    cdef int p = <int> t.player[nid]
    cdef idx_t na = t.n_actions[nid]
    cdef idx_t start = t.child_start[nid]
    cdef idx_t base = t.row_base[nid]
    cdef idx_t stride = tb.stride
    cdef idx_t a, c
    cdef double* sigma = work
    cdef double* m = work + t.max_actions * n
    cdef double* child_reach = work + 2 * t.max_actions * n
    cdef double* deeper = work + (2 * t.max_actions + 1) * n
    cdef double* table
    cdef double updated
    match_block(t, tb.regrets[p], stride, base, na, sigma)
    for c in range(n):
        out[c] = 0.0
    if p == traverser:
        for a in range(na):
            cfr(t, tb, t.children[start + a], traverser, weight, plus, reach, m + a * n, deeper)
            for c in range(n):
                out[c] += sigma[a * n + c] * m[a * n + c]
        table = tb.regrets[p]
        for a in range(na):
            for c in range(n):
                updated = table[(base + c) * stride + a] + (m[a * n + c] - out[c])
                if plus and updated < 0.0:
                    updated = 0.0
                table[(base + c) * stride + a] = updated
    else:
        for a in range(na):
            for c in range(n):
                child_reach[c] = sigma[a * n + c] * reach[c]
            cfr(t, tb, t.children[start + a], traverser, weight, plus, child_reach, m, deeper)
            for c in range(n):
                out[c] += m[c]
        table = tb.sums[p]
        for a in range(na):
            for c in range(n):
                table[(base + c) * stride + a] += reach[c] * sigma[a * n + c] * weight


cdef void evaluate_rec(Tree* t, Tables* tb, idx_t nid, int player, double* reach,
                       bint best_response, double* out, double* work) noexcept nogil:
    if t.kind[nid] != 0:
        terminal(t, nid, player, reach, out)
        return
    cdef idx_t n = t.n
    cdef int p = <int> t.player[nid]
    cdef idx_t na = t.n_actions[nid]
    cdef idx_t start = t.child_start[nid]
    cdef idx_t base = t.row_base[nid]
    cdef idx_t stride = tb.stride
    cdef double* strat = tb.strat[p]
    cdef double* m = work
    cdef double* child_reach = work + n
    cdef double* deeper = work + 2 * n
    cdef idx_t a, c
    if p == player and best_response:
        for a in range(na):
            evaluate_rec(t, tb, t.children[start + a], player, reach, True,
                         out if a == 0 else m, deeper)
            if a > 0:
                for c in range(n):
                    if m[c] > out[c]:
                        out[c] = m[c]
        return
    for c in range(n):
        out[c] = 0.0
    if p == player:
        for a in range(na):
            evaluate_rec(t, tb, t.children[start + a], player, reach, False, m, deeper)
            for c in range(n):
                out[c] += strat[(base + c) * stride + a] * m[c]
    else:
        for a in range(na):
            for c in range(n):
                child_reach[c] = strat[(base + c) * stride + a] * reach[c]
            evaluate_rec(t, tb, t.children[start + a], player, child_reach, best_response,
                         m, deeper)
            for c in range(n):
                out[c] += m[c]


cdef Tables _tables(list arrays, int slot, idx_t stride):
    cdef Tables tb
    cdef cnp.ndarray arr
    cdef int p
    for p in range(2):
        arr = arrays[2 * p + 0]
        if slot == 0:
            tb.regrets[p] = <double*> arr.data
            arr = arrays[2 * p + 1]
            tb.sums[p] = <double*> arr.data
        else:
            tb.strat[p] = <double*> arr.data
    tb.stride = stride
    return tb


def _checked(tables, max_actions):
    out = []
    for arr in tables:
        if not (isinstance(arr, np.ndarray) and arr.dtype == np.float64
                and arr.flags.c_contiguous and arr.ndim == 2 and arr.shape[1] == max_actions):
            raise ValueError("tables must be C-contiguous float64 arrays of width max_actions")
        out.append(arr)
    return out


def cfr_pass(flat, idx_t nid, int traverser, double weight, bint plus, reach, regrets, sums):
    cdef _Bound b = _bind(flat)
    cdef idx_t n = b.tree.n
    cdef idx_t width = b.tree.max_actions
    arrays = _checked([regrets[0], sums[0], regrets[1], sums[1]], width)
    cdef Tables tb = _tables(arrays, 0, width)
    cdef cnp.ndarray r = np.ascontiguousarray(reach, dtype=np.float64)
    cdef cnp.ndarray out = np.empty(n, dtype=np.float64)
    cdef idx_t levels = flat.depth + 1
    cdef double* work = <double*> malloc(levels * (2 * width + 1) * n * sizeof(double))
    if work == NULL:
        raise MemoryError()
    try:
        with nogil:
            cfr(&b.tree, &tb, nid, traverser, weight, plus, <double*> r.data,
                <double*> out.data, work)
    finally:
        free(work)
    return out


def run_iterations(flat, idx_t start, idx_t count, idx_t delay, bint delay_applies,
                   bint plus, regrets, sums):
    cdef _Bound b = _bind(flat)
    cdef idx_t n = b.tree.n
    cdef idx_t width = b.tree.max_actions
    arrays = _checked([regrets[0], sums[0], regrets[1], sums[1]], width)
    cdef Tables tb = _tables(arrays, 0, width)
    cdef idx_t levels = flat.depth + 1
    cdef double* work = <double*> malloc((levels * (2 * width + 1) * n + 2 * n) * sizeof(double))
    if work == NULL:
        raise MemoryError()
    cdef double* ones = work + levels * (2 * width + 1) * n
    cdef double* out = ones + n
    cdef idx_t t, c
    cdef int i
    cdef double w
    try:
        with nogil:
            for c in range(n):
                ones[c] = 1.0
            for t in range(start + 1, start + count + 1):
                if delay_applies:
                    w = <double> (t - delay if t > delay else 0)
                else:
                    w = 1.0
                for i in range(2):
                    cfr(&b.tree, &tb, 0, i, w, plus, ones, out, work)
    finally:
        free(work)


def evaluate(flat, idx_t nid, int player, reach, strategies, bint best_response):
    cdef _Bound b = _bind(flat)
    cdef idx_t n = b.tree.n
    cdef idx_t width = b.tree.max_actions
    arrays = _checked([strategies[0], strategies[0], strategies[1], strategies[1]], width)
    cdef Tables tb = _tables(arrays, 1, width)
    cdef cnp.ndarray r = np.ascontiguousarray(reach, dtype=np.float64)
    cdef cnp.ndarray out = np.empty(n, dtype=np.float64)
    cdef idx_t levels = flat.depth + 1
    cdef double* work = <double*> malloc(levels * 3 * n * sizeof(double))
    if work == NULL:
        raise MemoryError()
    try:
        with nogil:
            evaluate_rec(&b.tree, &tb, nid, player, <double*> r.data, best_response,
                         <double*> out.data, work)
    finally:
        free(work)
    return out
