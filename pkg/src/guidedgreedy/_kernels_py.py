"""Pure-Python fallback for the cut-evaluation kernels.

Semantics mirror the compiled extension exactly: same loop order, same
sequential float accumulation, so the two backends produce bit-identical
values on the same inputs.
"""


def cut_value(eu, ev, ew, mask):
    """Cut weight of the vertex set encoded by ``mask``, by edge-list scan."""
    total = 0.0
    for i in range(len(eu)):
        if mask[eu[i]] != mask[ev[i]]:
            total += ew[i]
    return total


def cut_deltas(indptr, nbrs, nws, mask, xs, out):
    """Per-vertex cut deltas against ``mask``.

    For x outside the set this is f(S + x) - f(S); for x inside the set it
    is f(S) - f(S - x). Both reduce to the same signed sum over incident
    edges: +w for neighbors outside S, -w for neighbors inside.
    """
    for j in range(len(xs)):
        x = xs[j]
        acc = 0.0
        for idx in range(indptr[x], indptr[x + 1]):
            if mask[nbrs[idx]]:
                acc -= nws[idx]
            else:
                acc += nws[idx]
        out[j] = acc


def cut_scan_first(indptr, nbrs, nws, mask, xs, tau):
    """Index of the first x in ``xs`` whose cut delta is >= tau, else -1."""
    for j in range(len(xs)):
        x = xs[j]
        acc = 0.0
        for idx in range(indptr[x], indptr[x + 1]):
            if mask[nbrs[idx]]:
                acc -= nws[idx]
            else:
                acc += nws[idx]
        if acc >= tau:
            return j
    return -1
