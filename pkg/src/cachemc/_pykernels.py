"""Pure-Python reachability kernel; reference twin of ``_ckernels.pyx``.

Graphs arrive in CSR form: successors of node ``i`` are
``succ[succ_off[i]:succ_off[i + 1]]`` and its accesses are
``seq[seq_off[i]:seq_off[i + 1]]``.  Accesses are block indices, or -1 for
accesses that cannot touch the tracked block.  A tracked state is a bit
mask of the blocks younger than the tracked block ``a``; the mask holding
only bit ``a`` stands for "``a`` not cached".
"""


class CeilingExceeded(RuntimeError):
    pass


def tracked_reach(succ_off, succ, seq_off, seq, entry, a, k, ceiling):
    """Explore (node, mask) pairs from ``(entry, absent)``.

    Returns ``(node_states, pre)``: the set of masks seen on entry to every
    node, and for every flat index of an access to ``a`` the masks seen
    just before it.
    """
    eps = 1 << a
    n = len(succ_off) - 1
    seen = [set() for _ in range(n)]
    pre = {}
    seen[entry].add(eps)
    work = [(entry, eps)]
    count = 1
    while work:
        node, m = work.pop()
        for j in range(seq_off[node], seq_off[node + 1]):
            c = seq[j]
            if c < 0:
                continue
            if c == a:
                pre.setdefault(j, set()).add(m)
                m = 0
            elif m == eps or (m >> c) & 1:
                pass
            elif m.bit_count() < k - 1:
                m |= 1 << c
            else:
                m = eps
        for t in range(succ_off[node], succ_off[node + 1]):
            s = succ[t]
            if m not in seen[s]:
                count += 1
                if count > ceiling:
                    raise CeilingExceeded(f"more than {ceiling} product states")
                seen[s].add(m)
                work.append((s, m))
    return seen, pre
