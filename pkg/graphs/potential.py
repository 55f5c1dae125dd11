"""Potential theory of simple random walk killed on exiting a lattice box.

All quantities are for the walk on {-M..M-1}^d that dies on its first step
out of the box: the Green function ``g_M`` solves ``(I - P) g = delta`` and
the equilibrium measure of a sub-box is the killed escape probability.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg, splu

from graphs.core import GeneratorError
from graphs.lattice import in_lattice_box, inner_boundary, lattice_coords, lattice_edges, site_index, unit_steps
from seeding import StreamRole, stream

SOLVE_TOL = 1e-10
MAX_SOLVE_SITES = 2_000_000


class TooLarge(GeneratorError):
    """Raised when a lattice domain exceeds a solver guard."""


class SolveFailed(GeneratorError):
    """Raised when an iterative solve does not converge."""


def killed_walk_operator(d: int, M: int) -> sp.csc_matrix:
    """``I - P`` for the walk on B_M killed outside it."""
    sites = (2 * M) ** d
    if sites > MAX_SOLVE_SITES:
        raise TooLarge(f"B_{M} in d={d} has {sites} sites (guard {MAX_SOLVE_SITES})")
    e = lattice_edges(M, d)
    w = np.full(len(e), 1.0 / (2 * d))
    P = sp.coo_matrix((np.concatenate([w, w]), (np.concatenate([e[:, 0], e[:, 1]]),
                                                   np.concatenate([e[:, 1], e[:, 0]]))),
                      shape=(sites, sites))
    return (sp.identity(sites, format="csc") - P.tocsc()).tocsc()


def _cg(A: sp.spmatrix, b: np.ndarray) -> np.ndarray:
    try:
        x, info = cg(A, b, rtol=SOLVE_TOL, maxiter=20_000)
    except TypeError:  # scipy < 1.12 spells it tol
        x, info = cg(A, b, tol=SOLVE_TOL, maxiter=20_000)
    if info != 0:
        raise SolveFailed(f"conjugate gradient did not converge (info={info})")
    return x


def killed_green(d: int, M: int, x: np.ndarray | None = None, y: np.ndarray | None = None) -> float:
    """g_M(x, y), the expected visits to y of the killed walk started at x."""
    x = np.zeros(d, dtype=np.int64) if x is None else np.asarray(x, dtype=np.int64)
    y = x if y is None else np.asarray(y, dtype=np.int64)
    if not (in_lattice_box(x, M) and in_lattice_box(y, M)):
        return 0.0
    A = killed_walk_operator(d, M)
    b = np.zeros(A.shape[0])
    b[site_index(y[None, :], M)[0]] = 1.0
    return float(_cg(A, b)[site_index(x[None, :], M)[0]])


def killed_green_block(d: int, n: int, M: int) -> np.ndarray:
    """g_M restricted to B_n x B_n, in lattice site order of B_n."""
    A = killed_walk_operator(d, M)
    targets = site_index(lattice_coords(n, d), M)
    rhs = np.zeros((A.shape[0], len(targets)))
    rhs[targets, np.arange(len(targets))] = 1.0
    cols = splu(A).solve(rhs)
    block = cols[targets, :]
    return 0.5 * (block + block.T)


# -- equilibrium measure -----------------------------------------------------

def escape_by_walks(d: int, n: int, M: int, walks: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo e(x) = P_x(exit B_M before returning to B_n) on the inner boundary.

    All walks advance together one step per round; a walk stops when it is
    back in B_n (failure) or outside B_M (escape).
    """
    sites = inner_boundary(n, d)
    rng = stream(seed, d, n, M, role=StreamRole.CAPACITY)
    steps = unit_steps(d)
    pos = np.repeat(sites, walks, axis=0)
    owner = np.repeat(np.arange(len(sites)), walks)
    escaped = np.zeros(len(sites), dtype=np.int64)
    while len(pos):
        pos = pos + steps[rng.integers(len(steps), size=len(pos))]
        back = in_lattice_box(pos, n)
        out = ~in_lattice_box(pos, M)
        np.add.at(escaped, owner[out], 1)
        keep = ~(back | out)
        pos, owner = pos[keep], owner[keep]
    return sites, escaped / walks


def escape_by_solve(d: int, n: int, M: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact killed escape probabilities via the harmonic problem on B_M minus B_n."""
    coords = lattice_coords(M, d)
    inside_k = in_lattice_box(coords, n)
    domain = np.flatnonzero(~inside_k)
    local = np.full(len(coords), -1, dtype=np.int64)
    local[domain] = np.arange(len(domain))

    A = killed_walk_operator(d, M)[domain][:, domain].tocsc()
    # Mass that leaves B_M in one step from each domain site.
    degree_inside = np.zeros(len(coords))
    e = lattice_edges(M, d)
    np.add.at(degree_inside, e[:, 0], 1)
    np.add.at(degree_inside, e[:, 1], 1)
    b = (2 * d - degree_inside[domain]) / (2 * d)
    h = _cg(A, b)

    sites = inner_boundary(n, d)
    escape = np.zeros(len(sites))
    for step in unit_steps(d):
        nb = sites + step
        outside_m = ~in_lattice_box(nb, M)
        escape += outside_m / (2 * d)
        in_dom = ~outside_m & ~in_lattice_box(nb, n)
        if in_dom.any():
            escape[in_dom] += h[local[site_index(nb[in_dom], M)]] / (2 * d)
    return sites, escape
