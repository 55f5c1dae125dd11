"""Exact expected extinction time for small graphs.

States are infected sets encoded as bitmasks ``1..2^N-1`` (vertex i is bit
i); the empty state is absorbing and dropped, so unknown ``s`` sits at row
``s - 1``. The absorption times ``h`` solve ``A h = 1`` where ``A`` is the
negated generator restricted to nonempty states.
"""

from __future__ import annotations

import logging
from typing import Iterable, Optional

import numpy as np
import scipy.io
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, bicgstab, spilu, splu

from contact.simulator import BadRates, ContactError
from graphs.core import EmptyGraph, Graph, UnknownVertex

logger = logging.getLogger(__name__)

MAX_EXACT_VERTICES = 20
DIRECT_STATES = 1 << 14
RESIDUAL_TOL = 1e-10


class TooManyVertices(ContactError):
    """Raised when the state space 2^|V| is beyond the exact solver."""


class ExactSolveError(ContactError):
    """Raised when the absorption system cannot be solved to tolerance."""


def absorption_system(g: Graph, lam: float) -> sp.csr_matrix:
    """The matrix ``A`` of ``A h = 1`` over nonempty infected sets.

    Raises:
        EmptyGraph, TooManyVertices, BadRates
    """
    N = g.num_vertices
    if N == 0:
        raise EmptyGraph("exact solver on an empty graph")
    if N > MAX_EXACT_VERTICES:
        raise TooManyVertices(f"{N} vertices (limit {MAX_EXACT_VERTICES}, state space 2^|V|)")
    if lam < 0:
        raise BadRates(f"infection rate must be >= 0, got {lam}")

    states = np.arange(1, 1 << N, dtype=np.int64)
    diag = np.zeros(len(states))
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []

    for i in range(N):
        on = np.flatnonzero((states >> i) & 1)
        diag[on] += 1.0
        target = states[on] ^ (1 << i)
        keep = target != 0
        rows.append(on[keep])
        cols.append(target[keep] - 1)
        vals.append(np.full(int(keep.sum()), -1.0))

    if lam > 0:
        e = g.edges
        for a, b in np.concatenate([e, e[:, ::-1]]).tolist():
            src = np.flatnonzero(((states >> a) & 1) & (1 - ((states >> b) & 1)))
            diag[src] += lam
            rows.append(src)
            cols.append((states[src] | (1 << b)) - 1)
            vals.append(np.full(len(src), -lam))

    idx = np.arange(len(states))
    rows.append(idx)
    cols.append(idx)
    vals.append(diag)
    A = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(len(states), len(states)))
    return A.tocsr()


def _backward_error(A: sp.csr_matrix, h: np.ndarray, b: np.ndarray) -> float:
    r = A @ h - b
    scale = abs(A).sum(axis=1).max() * np.abs(h).max() + np.abs(b).max()
    return float(np.abs(r).max() / scale)


def _solve(A: sp.csr_matrix) -> np.ndarray:
    b = np.ones(A.shape[0])
    if A.shape[0] <= DIRECT_STATES:
        lu = splu(A.tocsc())
        h = lu.solve(b)
        for _ in range(3):
            if _backward_error(A, h, b) <= RESIDUAL_TOL:
                break
            h = h + lu.solve(b - A @ h)
    else:
        ilu = spilu(A.tocsc(), drop_tol=1e-6, fill_factor=20)
        M = LinearOperator(A.shape, ilu.solve)
        try:
            h, info = bicgstab(A, b, M=M, rtol=RESIDUAL_TOL, maxiter=5000)
        except TypeError:  # scipy < 1.12 spells it tol
            h, info = bicgstab(A, b, M=M, tol=RESIDUAL_TOL, maxiter=5000)
        if info != 0:
            raise ExactSolveError(f"iterative solve did not converge (info={info})")
    err = _backward_error(A, h, b)
    if err > RESIDUAL_TOL:
        raise ExactSolveError(f"backward error {err:.2e} exceeds {RESIDUAL_TOL:.0e}")
    return h


def exact_extinction_vector(g: Graph, lam: float) -> np.ndarray:
    """Expected extinction time from every nonempty infected set (index ``s - 1``)."""
    return _solve(absorption_system(g, lam))


def exact_expected_extinction(g: Graph, lam: float, initial: Optional[Iterable[int]] = None) -> float:
    """E[tau_G] from full occupancy (or from ``initial``)."""
    h = exact_extinction_vector(g, lam)
    if initial is None:
        state = (1 << g.num_vertices) - 1
    else:
        state = 0
        for v in initial:
            if not 0 <= v < g.num_vertices:
                raise UnknownVertex(f"vertex {v} not in graph of {g.num_vertices} vertices")
            state |= 1 << v
        if state == 0:
            return 0.0
    return float(h[state - 1])


def dump_system(g: Graph, lam: float, path: str) -> None:
    """Write ``A`` in Matrix Market coordinate format; the right-hand side is all ones."""
    A = absorption_system(g, lam)
    comment = (f"contact process absorption system: |V|={g.num_vertices} |E|={g.num_edges} lambda={lam!r}; "
               f"unknown s-1 is the infected-set bitmask s; solve A h = 1")
    scipy.io.mmwrite(path, A.tocoo(), comment=comment)
    logger.info("wrote %dx%d absorption system (%d nonzeros) to %s", A.shape[0], A.shape[1], A.nnz, path)
