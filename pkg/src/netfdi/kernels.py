"""Numeric kernels with optional numba acceleration.

Two hot loops live here: all-pairs BFS hop counts and the fixed-step RK4
integrator for piecewise-linear dynamics.  Each has a numba ``@njit``
build and a pure-numpy fallback.  The fallback is used when numba is not
importable or when the environment variable ``NETFDI_DISABLE_NUMBA`` is
set to ``1``/``true``/``yes``.  Both paths return identical results;
``benchmarks/bench_kernels.py`` compares their speed.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False


def _disabled_by_env() -> bool:
    flag = os.environ.get("NETFDI_DISABLE_NUMBA", "")
    return flag.strip().lower() in {"1", "true", "yes"}


USE_NUMBA = HAS_NUMBA and not _disabled_by_env()


def active_backend() -> str:
    """Name of the kernel backend selected at import time."""
    return "numba" if USE_NUMBA else "numpy"


# --- all-pairs BFS hop counts ---


def _bfs_all_pairs_csr(indptr: np.ndarray, indices: np.ndarray, n: int) -> np.ndarray:
    """Per-source BFS over a CSR adjacency; hops[s, v] = -1 when unreachable."""
    hops = np.full((n, n), -1, dtype=np.int32)
    queue = np.empty(n, dtype=np.int32)
    for s in range(n):
        hops[s, s] = 0
        queue[0] = s
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            du = hops[s, u]
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if hops[s, v] < 0:
                    hops[s, v] = du + 1
                    queue[tail] = v
                    tail += 1
    return hops


def _bfs_all_pairs_dense(adj: np.ndarray) -> np.ndarray:
    """Level-synchronous BFS from all sources at once via matrix products."""
    n = adj.shape[0]
    step = adj.astype(np.float64)
    hops = np.full((n, n), -1, dtype=np.int32)
    np.fill_diagonal(hops, 0)
    reached = np.eye(n, dtype=bool)
    frontier = np.eye(n, dtype=bool)
    level = 0
    while True:
        level += 1
        grown = (frontier.astype(np.float64) @ step) > 0.0
        frontier = grown & ~reached
        if not frontier.any():
            return hops
        hops[frontier] = level
        reached |= frontier


if HAS_NUMBA:
    _bfs_all_pairs_csr_jit = njit(cache=True)(_bfs_all_pairs_csr)


def _csr_from_dense(adj: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = adj.shape[0]
    counts = adj.sum(axis=1, dtype=np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.nonzero(adj)[1].astype(np.int64)
    return indptr, indices


def all_pairs_hops(adj: np.ndarray) -> np.ndarray:
    """Hop-count matrix of a dense boolean adjacency (row = tail, col = head).

    Entry [q, p] is the minimum number of edges on a q -> p walk, 0 on the
    diagonal and -1 for unreachable pairs.  Edge weights play no role.
    """
    adj = np.ascontiguousarray(adj, dtype=bool)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise ValueError("adjacency must be a square matrix")
    if USE_NUMBA:
        indptr, indices = _csr_from_dense(adj)
        return _bfs_all_pairs_csr_jit(indptr, indices, adj.shape[0])
    return _bfs_all_pairs_dense(adj)


# --- fixed-step RK4 for piecewise-linear dynamics ---


def _rk4_linear(a: np.ndarray, x0: np.ndarray, u_half: np.ndarray,
                h: float, steps: int) -> np.ndarray:
    """Integrate dx/dt = a x + u(t) with classical RK4 on a fixed grid.

    ``u_half`` holds the forcing term sampled on the half-step grid
    t0 + j*h/2 for j = 0..2*steps, so every RK4 stage reads an exact
    sample instead of re-evaluating the signal inside the loop.
    """
    n = x0.shape[0]
    out = np.empty((steps + 1, n))
    out[0] = x0
    x = x0.copy()
    for s in range(steps):
        u0 = u_half[2 * s]
        um = u_half[2 * s + 1]
        u1 = u_half[2 * s + 2]
        k1 = a @ x + u0
        k2 = a @ (x + (0.5 * h) * k1) + um
        k3 = a @ (x + (0.5 * h) * k2) + um
        k4 = a @ (x + h * k3) + u1
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[s + 1] = x
    return out


if HAS_NUMBA:
    _rk4_linear_jit = njit(cache=True)(_rk4_linear)


def rk4_linear(a: np.ndarray, x0: np.ndarray, u_half: np.ndarray,
               h: float, steps: int) -> np.ndarray:
    """Dispatch ``_rk4_linear`` to the active backend."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    u_half = np.ascontiguousarray(u_half, dtype=np.float64)
    if u_half.shape[0] < 2 * steps + 1:
        raise ValueError("u_half must cover the half-step grid")
    if USE_NUMBA:
        return _rk4_linear_jit(a, x0, u_half, h, steps)
    return _rk4_linear(a, x0, u_half, h, steps)
