"""Access-structure analysis for secret sharing on F_q multigraphs.

Everything here reduces to ranks of cut matrices. For a dealer d and a player
set B, the classical-access indicator is

    pi(B, d) = cutrank_G(B) - cutrank_{G without d}(B)  in {0, 1}

and the quantum-access indicator is the discrete derivative

    cutrank(B + {d}) - cutrank(B)  in {-1, 0, +1}

where -1 means B can reconstruct a quantum secret, +1 means it has no
information, and 0 is the in-between (partial) regime. Witness multisets
certify the classical verdicts constructively.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .fqlinalg import inv_mod, kernel_basis_mod, rank_mod, reduced_column_echelon_mod, solve_affine_mod
from .multigraph import Multigraph, Multiset

CLASSICAL_ACCESSIBLE = "accessible"
NO_INFO = "no_info"
PARTIAL = "partial"


def _check_b(g: Multigraph, d: int, b_set) -> tuple[int, ...]:
    b = tuple(sorted(set(int(v) for v in b_set)))
    if b and not (0 <= b[0] and b[-1] < g.n):
        raise ValueError("player set outside vertex range")
    if d in b:
        raise ValueError(f"dealer {d} must not belong to the player set")
    return b


def cutrank(g: Multigraph, b_set) -> int:
    """Rank over F_q of the cut matrix between b_set and the rest."""
    b = sorted(set(int(v) for v in b_set))
    rest = [v for v in range(g.n) if v not in set(b)]
    if not b or not rest:
        return 0
    return rank_mod(g.gamma[np.ix_(b, rest)], g.q)


def pi_classical(g: Multigraph, d: int, b_set) -> int:
    """Classical-access indicator: 1 iff B can recover a CQ secret.

    Computed without materializing the vertex-deleted graph: deleting d
    just drops d's column from the cut matrix of B.
    """
    b = _check_b(g, d, b_set)
    if not b:
        return 0
    rest = [v for v in range(g.n) if v not in b]
    rest_no_d = [v for v in rest if v != d]
    full = rank_mod(g.gamma[np.ix_(list(b), rest)], g.q)
    dropped = rank_mod(g.gamma[np.ix_(list(b), rest_no_d)], g.q) if rest_no_d else 0
    return full - dropped


def quantum_derivative(g: Multigraph, d: int, b_set) -> int:
    """Discrete derivative cutrank(B + {d}) - cutrank(B); -1 | 0 | +1."""
    b = _check_b(g, d, b_set)
    return cutrank(g, b + (d,)) - cutrank(g, b)


@dataclass(frozen=True)
class AccessVerdict:
    classical: str
    quantum: str
    pi: int
    derivative: int
    witness_d: Multiset | None
    witness_c: Multiset | None


def witness_D(g: Multigraph, d: int, b_set) -> Multiset | None:
    """Accessing multiset D over B, if one exists.

    D satisfies sup(Gamma.D) outside B = {d}, scaled so the dealer sees D
    with multiplicity exactly 1. None iff pi = 0. The returned solution is
    the deterministic one with lowest-index pivots and zero free variables.
    """
    b = _check_b(g, d, b_set)
    if not b:
        return None
    rest = [v for v in range(g.n) if v not in b]
    m = g.gamma[np.ix_(rest, list(b))]
    target = np.zeros(len(rest), dtype=np.int64)
    target[rest.index(d)] = 1
    sol = solve_affine_mod(m, target, g.q)
    if sol is None:
        return None
    return Multiset(g.q, dict(zip(b, sol.particular.tolist())), domain=b)


def witness_C(g: Multigraph, d: int, b_set) -> Multiset | None:
    """Hiding multiset C over V minus B, if one exists.

    C satisfies C(d) = 1 and, for every u in B, the number of neighbours of
    u in C is 0 mod q. None iff pi = 1. To certify that a quantum-accessible
    B can screen the complement, call with b_set = V minus (B + {d}); the
    result is then supported on B + {d}.
    """
    b = _check_b(g, d, b_set)
    outside = [v for v in range(g.n) if v not in b]
    rows = g.gamma[np.ix_(list(b), outside)] if b else np.zeros((0, len(outside)), dtype=np.int64)
    pin = np.zeros((1, len(outside)), dtype=np.int64)
    pin[0, outside.index(d)] = 1
    m = np.vstack([rows, pin])
    target = np.zeros(len(b) + 1, dtype=np.int64)
    target[-1] = 1
    sol = solve_affine_mod(m, target, g.q)
    if sol is None:
        return None
    return Multiset(g.q, dict(zip(outside, sol.particular.tolist())), domain=outside)


def classify(g: Multigraph, d: int, b_set, cross_check: bool = False) -> AccessVerdict:
    """Full verdict for a player set, with witnesses attached.

    With cross_check=True the quantum verdict is re-derived from the two
    classical indicators (B accessible and the complement hidden), which
    must agree with the derivative; a mismatch raises.
    """
    b = _check_b(g, d, b_set)
    pi = pi_classical(g, d, b)
    der = quantum_derivative(g, d, b)
    if cross_check:
        comp = tuple(v for v in range(g.n) if v != d and v not in b)
        dual = pi == 1 and pi_classical(g, d, comp) == 0
        if dual != (der == -1):
            raise AssertionError(f"derivative {der} contradicts dual indicators for B={b}")
    classical = CLASSICAL_ACCESSIBLE if pi == 1 else NO_INFO
    if der == -1:
        quantum = CLASSICAL_ACCESSIBLE
    elif der == 1:
        quantum = NO_INFO
    else:
        quantum = PARTIAL
    wd = witness_D(g, d, b) if pi == 1 else None
    wc = witness_C(g, d, b) if pi == 0 else None
    return AccessVerdict(classical, quantum, pi, der, wd, wc)


def verify_witness_pair(g: Multigraph, d: int, b_set, d_ms, c_ms) -> bool:
    """Check the quantum-access witness conditions for (D, C).

    D lives on B and must be seen from outside B exactly at the dealer
    (any nonzero multiplicity there is accepted, not just 1). C lives on
    B + {d}, has C(d) != 0, and must not be seen outside B + {d}. Raises on
    domain violations; returns the boolean verdict otherwise.
    """
    b = _check_b(g, d, b_set)
    bset = set(b)
    d_ms = Multiset(g.q, d_ms if not isinstance(d_ms, Multiset) else d_ms.weights)
    c_ms = Multiset(g.q, c_ms if not isinstance(c_ms, Multiset) else c_ms.weights)
    if not d_ms.support() <= bset:
        raise ValueError("D is supported outside the player set")
    if not c_ms.support() <= bset | {d}:
        raise ValueError("C is supported outside the player set plus dealer")
    dvec = d_ms.as_vector(g.n)
    cvec = c_ms.as_vector(g.n)
    nb_d = (g.gamma @ dvec) % g.q
    nb_c = (g.gamma @ cvec) % g.q
    outside = [v for v in range(g.n) if v not in bset]
    seen = {v for v in outside if nb_d[v] != 0}
    if seen != {d}:
        return False
    if cvec[d] == 0:
        return False
    far = [v for v in outside if v != d]
    return all(nb_c[v] == 0 for v in far)


def dealer_kernel_witness(g: Multigraph, d: int, b_set) -> Multiset:
    """Small-support element of the dealer kernel of B.

    The dealer kernel S_d(B) consists of the multisets over B + {d} whose
    neighbours stay inside B + {d} and which are not extensions of such
    multisets over B alone. When the derivative is -1 its size is
    (q^2 - 1) * q^t. Two echelon columns C1 (nonzero at d) and C2 (zero at
    d, nonzero image at d) generate a q^2 - 1 element slice of it; the
    returned witness is the slice element with the smallest support,
    ties broken lexicographically.
    """
    b = _check_b(g, d, b_set)
    if quantum_derivative(g, d, b) != -1:
        raise ValueError("dealer kernel witness requires an accessible set (derivative -1)")
    cols = [d] + list(b)
    rows = [v for v in range(g.n) if v not in set(cols)]
    m = g.gamma[np.ix_(rows, cols)] if rows else np.zeros((0, len(cols)), dtype=np.int64)
    basis = reduced_column_echelon_mod(kernel_basis_mod(m, g.q), g.q)
    if basis.shape[1] < 2 or basis[0, 0] == 0:
        raise ValueError("kernel structure inconsistent with derivative -1")
    c1 = basis[:, 0]
    d_row = g.gamma[d, cols]
    c2 = None
    for j in range(1, basis.shape[1]):
        if int(d_row @ basis[:, j]) % g.q != 0:
            c2 = basis[:, j]
            break
    if c2 is None:
        raise ValueError("kernel structure inconsistent with derivative -1")
    best = None
    for x, y in product(range(g.q), repeat=2):
        if x == 0 and y == 0:
            continue
        cand = (x * c1 + y * c2) % g.q
        key = (int(np.count_nonzero(cand)), tuple(cand.tolist()))
        if best is None or key < best[0]:
            best = (key, cand)
    return Multiset(g.q, dict(zip(cols, best[1].tolist())), domain=cols)


def kernel_slice_columns(g: Multigraph, d: int, b_set) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """The (C1, C2) echelon pair behind dealer_kernel_witness plus the
    column vertex order; exposed for exhaustive scans of the full kernel."""
    b = _check_b(g, d, b_set)
    cols = [d] + list(b)
    rows = [v for v in range(g.n) if v not in set(cols)]
    m = g.gamma[np.ix_(rows, cols)] if rows else np.zeros((0, len(cols)), dtype=np.int64)
    basis = reduced_column_echelon_mod(kernel_basis_mod(m, g.q), g.q)
    return basis, g.gamma[d, cols], cols


def min_support_kernel_element(g: Multigraph, d: int, b_set, budget: int = 200_000) -> int:
    """Exact minimum support size over the whole dealer kernel S_d(B).

    Enumerates all (q^2 - 1) * q^t elements; raises if that exceeds budget.
    Used to probe how tight the echelon-pair bound is.
    """
    basis, d_row, _cols = kernel_slice_columns(g, d, b_set)
    q = g.q
    k = basis.shape[1]
    total = q**k
    if total > budget:
        raise ValueError(f"kernel too large to enumerate ({total} > {budget})")
    best = None
    for coeffs in product(range(q), repeat=k):
        vec = (basis @ np.array(coeffs, dtype=np.int64)) % q
        if vec[0] == 0 and int(d_row @ vec) % q == 0:
            continue
        size = int(np.count_nonzero(vec))
        if best is None or size < best:
            best = size
    if best is None:
        raise ValueError("dealer kernel is empty")
    return best
