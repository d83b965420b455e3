# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled reachability kernel; same contract as ``_pykernels.tracked_reach``
for graphs with fewer than 64 distinct blocks in the tracked set."""

from libc.stdint cimport uint64_t
from libcpp.pair cimport pair
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector

from ._pykernels import CeilingExceeded


ctypedef pair[long long, uint64_t] item_t


cdef extern from *:
    int popcount64 "__builtin_popcountll"(unsigned long long) nogil


def tracked_reach(const long long[:] succ_off, const long long[:] succ,
                  const long long[:] seq_off, const long long[:] seq,
                  long long entry, long long a, long long k, long long ceiling):
    cdef Py_ssize_t n = succ_off.shape[0] - 1
    cdef uint64_t eps = (<uint64_t>1) << a
    cdef vector[unordered_set[uint64_t]] seen = vector[unordered_set[uint64_t]](n)
    cdef vector[unordered_set[uint64_t]] pre = vector[unordered_set[uint64_t]](seq.shape[0])
    cdef vector[item_t] work
    cdef long long node, c, s
    cdef Py_ssize_t j, t
    cdef uint64_t m
    cdef long long count = 1
    cdef bint blown = False

    with nogil:
        seen[entry].insert(eps)
        work.push_back(item_t(entry, eps))
        while not work.empty() and not blown:
            node = work.back().first
            m = work.back().second
            work.pop_back()
            for j in range(seq_off[node], seq_off[node + 1]):
                c = seq[j]
                if c < 0:
                    continue
                if c == a:
                    pre[j].insert(m)
                    m = 0
                elif m == eps or (m >> c) & 1:
                    pass
                elif popcount64(m) < k - 1:
                    m = m | ((<uint64_t>1) << c)
                else:
                    m = eps
            for t in range(succ_off[node], succ_off[node + 1]):
                s = succ[t]
                if seen[s].count(m) == 0:
                    count += 1
                    if count > ceiling:
                        blown = True
                        break
                    seen[s].insert(m)
                    work.push_back(item_t(s, m))
    if blown:
        raise CeilingExceeded(f"more than {ceiling} product states")

    node_states = [set(seen[i]) for i in range(n)]
    pre_out = {}
    for j in range(seq.shape[0]):
        if pre[j].size():
            pre_out[j] = set(pre[j])
    return node_states, pre_out
