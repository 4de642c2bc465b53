"""Dense state-vector oracle for qudit graph states.

Everything here works on explicit complex amplitude arrays, so it is slow
but independent of the graph-side rank machinery: the two are cross-checked
against each other in the test suite. Phases are tracked as integer powers
of omega = exp(2*pi*i/q) inside WeylOperator and only turned into floats
when an operator hits a state.

Site ordering: a StateVector over m qudits reshapes to [q]*m with axis j
holding site j's digit, most significant first. States on the player
subsystem order the players by ascending vertex index.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass

import numpy as np

from .fqlinalg import inv_mod, require_prime
from .multigraph import Multigraph, Multiset, delete_vertex, serialize_graph
from .access import classify, pi_classical, witness_C, witness_D

log = logging.getLogger(__name__)

AMPLITUDE_BUDGET = 2_000_000
ATOL = 1e-9


class StateVector:
    """Dense pure state of m qudits of prime dimension q."""

    def __init__(self, q: int, n: int, amplitudes, budget: int = AMPLITUDE_BUDGET):
        require_prime(q)
        dim = q**n
        if dim > budget:
            raise ValueError(f"q^n = {dim} amplitudes exceed the budget of {budget}")
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(dim).copy()
        self.q = q
        self.n = n
        self.amplitudes = amps

    @classmethod
    def _derived(cls, q: int, n: int, amplitudes) -> "StateVector":
        """Wrap amplitudes already admitted by an entry-point budget check.

        Measurement collapses, single-site unitaries and projections never
        grow the register, so re-checking against the default budget would
        wrongly reject states a caller explicitly allowed.
        """
        sv = cls.__new__(cls)
        sv.q = q
        sv.n = n
        sv.amplitudes = np.asarray(amplitudes, dtype=np.complex128).reshape(q**n)
        return sv

    @classmethod
    def computational(cls, q: int, n: int, digits) -> "StateVector":
        digits = list(digits)
        if len(digits) != n:
            raise ValueError("one digit per site required")
        index = 0
        for x in digits:
            index = index * q + int(x) % q
        amps = np.zeros(q**n, dtype=np.complex128)
        amps[index] = 1.0
        return cls(q, n, amps)

    def grid(self) -> np.ndarray:
        """View as an n-axis array, axis j = site j, most significant first."""
        return self.amplitudes.reshape([self.q] * self.n)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def check_normalized(self, tol: float = ATOL) -> "StateVector":
        if abs(self.norm() - 1.0) > tol:
            raise AssertionError(f"state norm {self.norm()} drifted beyond {tol}")
        return self

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def tensor(self, other: "StateVector", budget: int = AMPLITUDE_BUDGET) -> "StateVector":
        if other.q != self.q:
            raise ValueError("tensor factors must share the qudit dimension")
        amps = np.kron(self.amplitudes, other.amplitudes)
        return StateVector(self.q, self.n + other.n, amps, budget=budget)

    def copy(self) -> "StateVector":
        return StateVector._derived(self.q, self.n, self.amplitudes.copy())

    def __repr__(self):
        return f"StateVector(q={self.q}, n={self.n})"


def state_fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 for pure states."""
    return abs(a.inner(b)) ** 2


@dataclass(frozen=True)
class WeylOperator:
    """omega^phase * prod_v X_v^{x_powers[v]} Z_v^{z_powers[v]}.

    Composition, powers and inverses track the global phase exactly as an
    integer exponent of omega, using X^a Z^b |x> = omega^{b.x} |x+a> and
    Z^b X^a = omega^{a b} X^a Z^b per site.
    """

    q: int
    x_powers: tuple[int, ...]
    z_powers: tuple[int, ...]
    phase: int = 0

    def __post_init__(self):
        require_prime(self.q)
        object.__setattr__(self, "x_powers", tuple(int(a) % self.q for a in self.x_powers))
        object.__setattr__(self, "z_powers", tuple(int(b) % self.q for b in self.z_powers))
        object.__setattr__(self, "phase", int(self.phase) % self.q)
        if len(self.x_powers) != len(self.z_powers):
            raise ValueError("x and z exponent tuples differ in length")

    @classmethod
    def identity(cls, q: int, n: int) -> "WeylOperator":
        return cls(q, (0,) * n, (0,) * n, 0)

    @classmethod
    def x_op(cls, q: int, n: int, site: int, power: int = 1) -> "WeylOperator":
        a = [0] * n
        a[site] = power
        return cls(q, tuple(a), (0,) * n, 0)

    @classmethod
    def z_op(cls, q: int, n: int, site: int, power: int = 1) -> "WeylOperator":
        b = [0] * n
        b[site] = power
        return cls(q, (0,) * n, tuple(b), 0)

    @property
    def n(self) -> int:
        return len(self.x_powers)

    def __matmul__(self, other: "WeylOperator") -> "WeylOperator":
        if other.q != self.q or other.n != self.n:
            raise ValueError("operator shapes differ")
        # (X^a1 Z^b1)(X^a2 Z^b2): moving Z^b1 past X^a2 costs omega^{b1.a2}
        cross = sum(b * a for b, a in zip(self.z_powers, other.x_powers))
        return WeylOperator(
            self.q,
            tuple(a1 + a2 for a1, a2 in zip(self.x_powers, other.x_powers)),
            tuple(b1 + b2 for b1, b2 in zip(self.z_powers, other.z_powers)),
            self.phase + other.phase + cross,
        )

    def inverse(self) -> "WeylOperator":
        cross = sum(b * a for b, a in zip(self.z_powers, self.x_powers))
        return WeylOperator(
            self.q,
            tuple(-a for a in self.x_powers),
            tuple(-b for b in self.z_powers),
            -self.phase + cross,
        )

    def __pow__(self, m: int) -> "WeylOperator":
        if m < 0:
            return self.inverse() ** (-m)
        # W^m phase: m*t + C(m,2) * (b.a) from repeated reordering
        cross = sum(b * a for b, a in zip(self.z_powers, self.x_powers))
        return WeylOperator(
            self.q,
            tuple(m * a for a in self.x_powers),
            tuple(m * b for b in self.z_powers),
            m * self.phase + (m * (m - 1) // 2) * cross,
        )

    def commutation_exponent(self, other: "WeylOperator") -> int:
        """e with self @ other = omega^e (other @ self)."""
        e = sum(b * a for b, a in zip(self.z_powers, other.x_powers)) - sum(
            b * a for b, a in zip(other.z_powers, self.x_powers)
        )
        return e % self.q

    def is_identity(self) -> bool:
        return not any(self.x_powers) and not any(self.z_powers) and self.phase == 0

    def xz_weight(self) -> int:
        """Integer sum of x_v * z_v over sites (not reduced mod q)."""
        return int(sum(a * b for a, b in zip(self.x_powers, self.z_powers)))

    def factor_site(self, site: int) -> tuple[int, int, "WeylOperator"]:
        """Split off one site: returns (a_site, b_site, rest) where rest
        keeps the global phase and acts on the remaining sites in order.
        Exact only when a_site = 0 or the rest carries no phase ambiguity;
        here it is used on sites with no X component, where the operator
        factorizes strictly."""
        a, b = self.x_powers[site], self.z_powers[site]
        if a != 0:
            raise ValueError("cannot cleanly factor a site with an X component")
        keep = [v for v in range(self.n) if v != site]
        return a, b, WeylOperator(
            self.q,
            tuple(self.x_powers[v] for v in keep),
            tuple(self.z_powers[v] for v in keep),
            self.phase,
        )

    def embed(self, n: int, sites) -> "WeylOperator":
        """Place this operator on the given sites of a larger register."""
        sites = list(sites)
        if len(sites) != self.n:
            raise ValueError("site list must match the operator arity")
        a = [0] * n
        b = [0] * n
        for local, g in enumerate(sites):
            a[g] = self.x_powers[local]
            b[g] = self.z_powers[local]
        return WeylOperator(self.q, tuple(a), tuple(b), self.phase)


def omega_table(q: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(q) / q)


def _weyl_on_grid(q: int, grid: np.ndarray, w: WeylOperator) -> np.ndarray:
    """Raw W|x> = omega^{phase + b.x} |x + a> on an n-axis amplitude grid."""
    n = grid.ndim
    exp = np.zeros([q] * n, dtype=np.int64)
    for v, b in enumerate(w.z_powers):
        if b:
            shape = [1] * n
            shape[v] = q
            exp = exp + b * np.arange(q, dtype=np.int64).reshape(shape)
    out = grid * omega_table(q)[(exp + w.phase) % q]
    for v, a in enumerate(w.x_powers):
        if a:
            out = np.roll(out, a, axis=v)
    return out


def apply_weyl(state: StateVector, w: WeylOperator) -> StateVector:
    """W|x> = omega^{phase + b.x} |x + a>, applied over the whole register."""
    if w.q != state.q or w.n != state.n:
        raise ValueError("operator does not match the state register")
    return StateVector._derived(state.q, state.n, _weyl_on_grid(state.q, state.grid(), w)).check_normalized()


def stabilizer_generator(g: Multigraph, u: int) -> WeylOperator:
    """K_u = X_u Z_{Gamma.{u}} on the full vertex register."""
    return WeylOperator(g.q, tuple(int(v == u) for v in range(g.n)), tuple(g.gamma[u].tolist()), 0)


def graph_state(g: Multigraph, budget: int = AMPLITUDE_BUDGET) -> StateVector:
    """|G> with amplitude q^{-n/2} omega^{edge count of the induced
    sub-multigraph} at each basis label."""
    q, n = g.q, g.n
    if q**n > budget:
        raise ValueError(f"q^n = {q ** n} amplitudes exceed the budget of {budget}")
    exp = np.zeros([q] * n, dtype=np.int64)
    ar = np.arange(q, dtype=np.int64)
    for u, v, w in g.edges():
        su = [1] * n
        su[u] = q
        sv = [1] * n
        sv[v] = q
        exp = exp + w * ar.reshape(su) * ar.reshape(sv)
    amps = omega_table(q)[exp % q] * (q ** (-n / 2))
    return StateVector._derived(q, n, amps).check_normalized()


def mub_vector(q: int, t: int, i: int) -> np.ndarray:
    """Eigenbasis vector |i(t)> of X^t Z with eigenvalue omega^i.

    t = 0 is the computational basis. For odd q and t >= 1 the quadratic
    phase needs 1/(2t) and 1/t mod q. q = 2 supports only t = 1, with the
    convention XZ |i(1)> = (-1)^i * i * |i(1)>.
    """
    require_prime(q)
    t, i = t % q, i % q
    if t == 0:
        vec = np.zeros(q, dtype=np.complex128)
        vec[i] = 1.0
        return vec
    if q == 2:
        return np.array([1.0, -1j if i == 0 else 1j]) / np.sqrt(2)
    inv2t = inv_mod(2 * t, q)
    invt = inv_mod(t, q)
    j = np.arange(q)
    exp = (j * (j - t) * inv2t - i * invt * j) % q
    return omega_table(q)[exp] / np.sqrt(q)


def mub_basis(q: int, t: int) -> np.ndarray:
    """q x q matrix whose column i is |i(t)>."""
    return np.stack([mub_vector(q, t, i) for i in range(q)], axis=1)


def measure_site_basis(state: StateVector, site: int, basis: np.ndarray, rng: np.random.Generator):
    """Projective measurement of one site in an orthonormal basis (columns).

    Returns (outcome, collapsed state). The measured site is left in the
    outcome basis vector.
    """
    q = state.q
    grid = np.moveaxis(state.grid(), site, 0).reshape(q, -1)
    overlaps = basis.conj().T @ grid  # row i = <i|psi> component
    probs = (abs(overlaps) ** 2).sum(axis=1)
    probs = np.clip(probs.real, 0.0, None)
    probs = probs / probs.sum()
    outcome = int(rng.choice(q, p=probs))
    residual = overlaps[outcome] / np.sqrt(probs[outcome])
    collapsed = np.tensordot(basis[:, outcome], residual, axes=0).reshape([q] + [q] * (state.n - 1))
    collapsed = np.moveaxis(collapsed, 0, site)
    return outcome, StateVector._derived(q, state.n, collapsed).check_normalized()


def measure_weyl(state: StateVector, w: WeylOperator, rng: np.random.Generator):
    """Projective measurement of a Weyl operator; returns (label, state).

    For odd q every Weyl operator here satisfies W^q = I, the eigenvalues
    are omega^m and the projectors are the discrete Fourier sums of W^j.
    For q = 2 an operator with odd total XZ weight squares to -I; the
    measured observable is then -iW and the label m means eigenvalue
    i * (-1)^m of W itself. Even weight keeps the plain (-1)^m convention.
    """
    q = state.q
    if q != 2:
        powers = [state]
        for _ in range(q - 1):
            powers.append(apply_weyl(powers[-1], w))
        expect = np.array([state.inner(p) for p in powers])
        table = omega_table(q)
        probs = np.array([(table ** (-m) * expect).sum().real / q for m in range(q)])
        probs = np.clip(probs, 0.0, None)
        probs = probs / probs.sum()
        m = int(rng.choice(q, p=probs))
        proj = np.zeros_like(state.amplitudes)
        for j in range(q):
            proj = proj + table[(-m * j) % q] * powers[j].amplitudes
        proj = proj / q
        post = proj / np.linalg.norm(proj)
        return m, StateVector._derived(q, state.n, post).check_normalized()
    # q = 2
    wpsi = apply_weyl(state, w)
    odd = w.xz_weight() % 2 == 1
    scale = -1j if odd else 1.0  # measured observable is scale * W
    probs = []
    branches = []
    for m in range(2):
        amp = 0.5 * (state.amplitudes + (-1) ** m * scale * wpsi.amplitudes)
        branches.append(amp)
        probs.append(float(np.vdot(amp, amp).real))
    probs = np.clip(np.array(probs), 0.0, None)
    probs = probs / probs.sum()
    m = int(rng.choice(2, p=probs))
    post = branches[m] / np.linalg.norm(branches[m])
    return m, StateVector._derived(2, state.n, post).check_normalized()


def eigenvalue_label(state: StateVector, w: WeylOperator) -> int:
    """m with W|psi> = omega^m |psi>, for a state that is an exact
    eigenvector; raises if it is not one within tolerance."""
    q = state.q
    out = apply_weyl(state, w)
    pivot = int(np.argmax(abs(state.amplitudes)))
    ratio = out.amplitudes[pivot] / state.amplitudes[pivot]
    angle = np.angle(ratio) * q / (2 * np.pi)
    m = int(np.round(angle)) % q
    if np.linalg.norm(out.amplitudes - omega_table(q)[m] * state.amplitudes) > 1e-8:
        raise AssertionError("state is not an eigenvector of the given operator")
    return m


# ---------------------------------------------------------------------------
# encodings


def _player_order(g: Multigraph, d: int) -> list[int]:
    return [v for v in range(g.n) if v != d]


def cq_encode(g: Multigraph, d: int, s: int, budget: int = AMPLITUDE_BUDGET) -> StateVector:
    """Classical codeword |s_L> = Z^s on the dealer's neighbours applied to
    the dealer-deleted graph state. Lives on the n-1 players in vertex
    order."""
    if g.degree(d) == 0:
        raise ValueError("isolated dealer: the encoding collapses")
    players = _player_order(g, d)
    base = graph_state(delete_vertex(g, d), budget=budget)
    z = tuple((s * g.gamma[d, v]) % g.q for v in players)
    return apply_weyl(base, WeylOperator(g.q, (0,) * len(players), z, 0))


def qq_encode(g: Multigraph, d: int, secret, budget: int = AMPLITUDE_BUDGET) -> StateVector:
    """Quantum codeword sum_j secret[j] |j_L>. Checks the isometry."""
    secret = np.asarray(secret, dtype=np.complex128).reshape(g.q)
    if abs(np.linalg.norm(secret) - 1.0) > 1e-7:
        raise ValueError("secret amplitudes must be normalized")
    out = None
    for j in range(g.q):
        if secret[j] == 0:
            continue
        word = cq_encode(g, d, j, budget=budget)
        out = secret[j] * word.amplitudes if out is None else out + secret[j] * word.amplitudes
    state = StateVector._derived(g.q, g.n - 1, out)
    if abs(state.norm() - 1.0) > 1e-7:
        raise AssertionError("encoding failed to be an isometry")
    return state


def reduced_density(state: StateVector, sites, budget: int = AMPLITUDE_BUDGET) -> np.ndarray:
    """Partial trace down to the given site positions (sorted order)."""
    keep = sorted(set(int(s) for s in sites))
    if keep and not (0 <= keep[0] and keep[-1] < state.n):
        raise ValueError("sites outside the register")
    if state.q ** (2 * len(keep)) > budget:
        raise ValueError("reduced density matrix exceeds the amplitude budget")
    drop = [s for s in range(state.n) if s not in keep]
    grid = state.grid()
    rho = np.tensordot(grid, grid.conj(), axes=(drop, drop))
    dim = state.q ** len(keep)
    return rho.reshape(dim, dim)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.linalg.eigvalsh(rho - sigma)).sum())


def density_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    vals, vecs = np.linalg.eigh(rho)
    vals = np.clip(vals, 0.0, None)
    root = (vecs * np.sqrt(vals)) @ vecs.conj().T
    inner = root @ sigma @ root
    ivals = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(np.sqrt(ivals).sum() ** 2)


def leak_profile(g: Multigraph, d: int, b_set, budget: int = AMPLITUDE_BUDGET) -> tuple[float, float]:
    """(max trace distance, max fidelity) over pairs of the q reduced
    codeword states on the player positions of b_set."""
    players = _player_order(g, d)
    pos = [players.index(v) for v in sorted(set(b_set))]
    rhos = [reduced_density(cq_encode(g, d, s, budget=budget), pos, budget=budget) for s in range(g.q)]
    max_td = 0.0
    max_fid = 0.0
    for a in range(g.q):
        for b in range(a + 1, g.q):
            max_td = max(max_td, trace_distance(rhos[a], rhos[b]))
            max_fid = max(max_fid, density_fidelity(rhos[a], rhos[b]))
    return max_td, max_fid


def info_leak(g: Multigraph, d: int, b_set, budget: int = AMPLITUDE_BUDGET) -> float:
    """Max trace distance between reduced codeword states on b_set: 0 iff
    the set has no classical information; 1 with orthogonal supports iff it
    can read the secret perfectly."""
    return leak_profile(g, d, b_set, budget=budget)[0]


def schmidt_rank(state: StateVector, sites, tol: float = 1e-7) -> int:
    """Schmidt rank of the bipartition (sites, rest)."""
    keep = sorted(set(int(s) for s in sites))
    grid = np.moveaxis(state.grid(), keep, range(len(keep)))
    mat = grid.reshape(state.q ** len(keep), -1)
    sing = np.linalg.svd(mat, compute_uv=False)
    return int((sing > tol).sum())


# ---------------------------------------------------------------------------
# protocol machinery


def _restricted_stabilizer(g: Multigraph, d: int, u: int) -> WeylOperator:
    """K_u with the dealer column dropped: X_u Z_{Gamma.{u} minus d} on the
    player register."""
    players = _player_order(g, d)
    x = tuple(int(v == u) for v in players)
    z = tuple(int(g.gamma[u, v]) for v in players)
    return WeylOperator(g.q, x, z, 0)


def _as_weights(q: int, ms) -> Multiset:
    return ms if isinstance(ms, Multiset) else Multiset(q, ms)


def _validated_pair(g: Multigraph, d: int, b, d_ms, c_ms):
    """Normalize and sanity check the witness pair; returns (D, C) with the
    dealer coefficient of C equal to 1 and alpha = 1, or raises."""
    from .access import verify_witness_pair

    d_ms = _as_weights(g.q, d_ms)
    if c_ms is not None:
        c_ms = _as_weights(g.q, c_ms)
    if c_ms is not None:
        if not verify_witness_pair(g, d, b, d_ms, c_ms):
            raise ValueError("witness pair fails the access conditions")
    else:
        vec = d_ms.as_vector(g.n)
        nb = (g.gamma @ vec) % g.q
        outside = [v for v in range(g.n) if v not in set(b)]
        if {v for v in outside if nb[v]} != {d}:
            raise ValueError("witness D fails the access conditions")
    alpha = int((g.gamma[d] @ d_ms.as_vector(g.n)) % g.q)
    if alpha != 1:
        inv = inv_mod(alpha, g.q)
        d_ms = Multiset(g.q, {v: (w * inv) % g.q for v, w in d_ms.items()})
    if c_ms is not None and c_ms[d] != 1:
        raise ValueError("witness C must have dealer coefficient 1")
    return d_ms, c_ms


@dataclass(frozen=True)
class DecodeParams:
    """Player-side measurement data for the basis-t round.

    x[i], z[i] give the Weyl exponents measured by player i; c is the
    constructive phase that makes the assembled stabilizer product fix |G>.
    c_printed is the closed-form bookkeeping value recorded alongside (the
    two disagree in general; the constructive one is authoritative).
    half_correction is the extra mod-2 term needed at q = 2 where single
    Weyl factors square to -I.
    """

    q: int
    t: int
    beta: int
    x: dict[int, int]
    z: dict[int, int]
    c: int
    c_printed: int
    printed_matches: bool
    lam: int
    lam_prime: int
    half_correction: int

    def f_t(self, r: int) -> int:
        return (-r - self.c - (self.t * (self.t - 1) // 2) * self.beta) % self.q

    def decode(self, total: int) -> int:
        return (self.f_t(total) + self.half_correction) % self.q


def decode_params(g: Multigraph, d: int, b_set, d_ms, c_ms, t: int) -> DecodeParams:
    """Assemble the round-t measurement parameters from the witness pair.

    The stabilizer product K_C^t K_D^{1 - t*beta} is multiplied out with
    exact phase tracking; its global phase defines c. t = 0 works with
    c_ms = None (the C factor never enters). q = 2 allows t in {0, 1}.
    """
    q = g.q
    t = int(t) % q
    b = tuple(sorted(set(int(v) for v in b_set)))
    if t != 0 and c_ms is None:
        raise ValueError("basis t != 0 needs the hiding witness C")
    d_ms, c_ms = _validated_pair(g, d, b, d_ms, c_ms)
    beta = 0 if c_ms is None else int((g.gamma[d] @ c_ms.as_vector(g.n)) % q)

    k_ops = {u: stabilizer_generator(g, u) for u in (d, *b)}
    k_d_factor = WeylOperator.identity(q, g.n)
    for i in b:
        k_d_factor = k_d_factor @ (k_ops[i] ** d_ms[i])
    if t == 0:
        s_product = k_d_factor
    else:
        k_c_factor = k_ops[d]
        for i in b:
            k_c_factor = k_c_factor @ (k_ops[i] ** c_ms[i])
        s_product = (k_c_factor**t) @ (k_d_factor ** ((1 - t * beta) % q))

    for v in range(g.n):
        if v == d or v in b:
            continue
        if s_product.x_powers[v] or s_product.z_powers[v]:
            raise AssertionError("stabilizer product leaks outside the player set")
    if s_product.x_powers[d] != t or s_product.z_powers[d] != 1:
        raise AssertionError("dealer factor of the stabilizer product is off")

    x = {i: s_product.x_powers[i] for i in b}
    z = {i: s_product.z_powers[i] for i in b}
    half = t * (t - 1) // 2
    c = (s_product.phase - half * beta) % q

    cvec = c_ms.as_vector(g.n) if c_ms is not None else np.zeros(g.n, dtype=np.int64)
    dvec = d_ms.as_vector(g.n)
    bd = sorted((d, *b))
    lam = sum(int(g.gamma[u, v]) * int(cvec[u]) * int(cvec[v]) for ui, u in enumerate(bd) for v in bd[ui + 1 :]) % q
    lam_p = sum(int(g.gamma[u, v]) * int(dvec[u]) * int(dvec[v]) for ui, u in enumerate(b) for v in b[ui + 1 :]) % q
    cross = sum(int(g.gamma[u, v]) * int(cvec[u]) * int(dvec[v]) for u in b for v in b) % q
    c_printed = (t * lam_p + (1 - t * beta) * lam + t * (t - 1) * lam_p + (1 - t * beta) * (-t * beta) * lam + t * (1 - t * beta) * cross) % q
    if c_printed != c:
        log.info(
            "closed-form phase %s disagrees with the constructive phase %s (t=%s); using the constructive value",
            c_printed,
            c,
            t,
        )

    half_corr = 0
    if q == 2:
        weight = t + sum(x[i] * z[i] for i in b)
        if weight % 2:
            raise AssertionError("total XZ weight of the round operator must be even")
        half_corr = (weight // 2) % 2
    return DecodeParams(q, t, beta, x, z, c, c_printed, c_printed == c, lam, lam_p, half_corr)


def cq_round(
    g: Multigraph,
    d: int,
    b_set,
    t: int,
    rng: np.random.Generator,
    on_unauthorized: str = "raise",
    budget: int = AMPLITUDE_BUDGET,
) -> tuple[int, int]:
    """One round of the classical protocol in basis t.

    The dealer measures their qudit of |G> in the X^t Z eigenbasis getting
    s(t); each player in b_set measures X^{x_i} Z^{z_i}; the players combine
    outcomes through the affine decoder. Returns (s, m); the contract for an
    authorized set is m = s.

    An unauthorized set raises by default. on_unauthorized="measure" makes
    the players measure computational digits and decode with the trivial
    map instead, modelling a best-effort attack that the hiding theorem
    forces to be uncorrelated with s.
    """
    q = g.q
    t = int(t) % q
    b = tuple(sorted(set(int(v) for v in b_set)))
    accessible = pi_classical(g, d, b) == 1
    params = None
    if accessible:
        dms = witness_D(g, d, b)
        if t == 0:
            params = decode_params(g, d, b, dms, None, 0)
        else:
            comp = [v for v in range(g.n) if v != d and v not in b]
            cms = witness_C(g, d, comp)
            if cms is None:
                raise ValueError("basis t != 0 needs a quantum-accessible set (no hiding witness exists)")
            params = decode_params(g, d, b, dms, cms, t)
    elif on_unauthorized == "raise":
        raise ValueError("player set cannot access the secret; protocol contract violated")
    elif on_unauthorized != "measure":
        raise ValueError("on_unauthorized must be 'raise' or 'measure'")

    state = graph_state(g, budget=budget)
    s, state = measure_site_basis(state, d, mub_basis(q, t), rng)
    players = _player_order(g, d)
    total = 0
    if params is None:
        for v in b:
            m_v, state = measure_site_basis(state, v, np.eye(q, dtype=np.complex128), rng)
            total += m_v
        return s, (-total) % q
    for v in b:
        w = WeylOperator.x_op(q, g.n, v, params.x[v]) @ WeylOperator.z_op(q, g.n, v, params.z[v])
        m_v, state = measure_weyl(state, w, rng)
        total += m_v
    return s, params.decode(total)


def classical_measure_decode(g: Multigraph, d: int, b_set, d_ms, s: int, budget: int = AMPLITUDE_BUDGET) -> int:
    """Recover s from |s_L> with the accessing multiset D.

    Builds the player-side product of stabilizer generators weighted by D;
    its dealer site carries only a Z factor, so it splits off exactly and
    the rest acts on |s_L> with eigenvalue omega^{-s}. Returns the negated
    label, i.e. s itself.
    """
    b = tuple(sorted(set(int(v) for v in b_set)))
    d_ms, _ = _validated_pair(g, d, b, d_ms, None)
    full = WeylOperator.identity(g.q, g.n)
    for u in b:
        full = full @ (stabilizer_generator(g, u) ** d_ms[u])
    dealer_site_x = full.x_powers[d]
    if dealer_site_x != 0:
        raise AssertionError("dealer site unexpectedly carries an X component")
    _, _, players_op = full.factor_site(d)
    word = cq_encode(g, d, s % g.q, budget=budget)
    m = eigenvalue_label(word, players_op)
    return (-m) % g.q


# ---------------------------------------------------------------------------
# quantum decoding


def logical_x(g: Multigraph, d: int) -> WeylOperator:
    """Xbar = Z on the dealer's neighbour multiset; shifts |i_L> to
    |(i+1)_L> on the player register."""
    players = _player_order(g, d)
    return WeylOperator(g.q, (0,) * len(players), tuple(int(g.gamma[d, v]) for v in players), 0)


def logical_z(g: Multigraph, d: int) -> WeylOperator:
    """Zbar = (X_u Z_{Gamma.{u}})^{-1/Gamma(u,d)} for the first player u
    adjacent to the dealer; phases |i_L> by omega^i."""
    for u in _player_order(g, d):
        if g.gamma[u, d] % g.q:
            return _restricted_stabilizer(g, d, u) ** (-inv_mod(int(g.gamma[u, d]), g.q))
    raise ValueError("no player adjacent to the dealer; logical Z undefined")


def code_unitaries(g: Multigraph, d: int, b_set, d_ms, c_ms) -> tuple[WeylOperator, WeylOperator]:
    """(U_B, V_B) on the player register from a valid witness pair:
    U_B |s_L> = omega^s |s_L> and V_B |s_L> = |(s+1)_L>, both supported on
    b_set only."""
    b = tuple(sorted(set(int(v) for v in b_set)))
    if d_ms is None or c_ms is None:
        raise ValueError("quantum decoding needs both witnesses")
    d_ms, c_ms = _validated_pair(g, d, b, d_ms, c_ms)
    q = g.q
    beta = int((g.gamma[d] @ c_ms.as_vector(g.n)) % q)
    players = _player_order(g, d)
    u_op = WeylOperator.identity(q, len(players))
    v_op = WeylOperator(q, (0,) * len(players), tuple(int(g.gamma[d, v]) for v in players), 0)
    for i in b:
        k_i = _restricted_stabilizer(g, d, i)
        u_op = u_op @ (k_i ** ((-d_ms[i]) % q))
        v_op = v_op @ (k_i ** ((c_ms[i] - beta * d_ms[i]) % q))
    pos = {v: players.index(v) for v in b}
    for p, v in enumerate(players):
        if v in pos:
            continue
        for op, name in ((u_op, "U_B"), (v_op, "V_B")):
            if op.x_powers[p] or op.z_powers[p]:
                raise AssertionError(f"{name} acts outside the player set")
    return u_op, v_op


@dataclass(frozen=True)
class BellDecodeResult:
    amplitudes: np.ndarray
    fidelity: float | None
    syndrome: tuple[int, int]
    used_fallback: bool


def qq_decode_bell(
    g: Multigraph,
    d: int,
    b_set,
    d_ms,
    c_ms,
    encoded: StateVector,
    rng: np.random.Generator,
    expected=None,
    budget: int = AMPLITUDE_BUDGET,
) -> BellDecodeResult:
    """Teleport the logical secret out of the encoded state via a Bell pair.

    Two ancillas join the player register in |00>+...+|q-1,q-1>. The set
    measures V_B^{-1} X_{a1}^{-1} (syndrome k) and U_B Z_{a1}^{-1}
    (syndrome l, recorded as minus the eigenvalue label), then applies
    Z^k X^{-l} on the second ancilla, which afterwards carries the secret.

    When no valid witness pair is supplied or derivable the identity
    operators stand in (used_fallback = True); the measurements then fail
    to steer and the reported fidelity stays below 1.
    """
    q = g.q
    b = tuple(sorted(set(int(v) for v in b_set)))
    used_fallback = False
    try:
        if d_ms is None:
            d_ms = witness_D(g, d, b)
        if c_ms is None:
            comp = [v for v in range(g.n) if v != d and v not in b]
            c_ms = witness_C(g, d, comp)
        u_op, v_op = code_unitaries(g, d, b, d_ms, c_ms)
    except (ValueError, TypeError):
        used_fallback = True
        u_op = WeylOperator.identity(q, g.n - 1)
        v_op = WeylOperator.identity(q, g.n - 1)

    bell = np.zeros((q, q), dtype=np.complex128)
    for i in range(q):
        bell[i, i] = 1.0 / np.sqrt(q)
    full = StateVector(q, encoded.n + 2, np.kron(encoded.amplitudes, bell.reshape(-1)), budget=budget)

    n_tot = full.n
    a1, a2 = n_tot - 2, n_tot - 1
    m1 = v_op.inverse().embed(n_tot, range(encoded.n)) @ WeylOperator.x_op(q, n_tot, a1, -1)
    m2 = u_op.embed(n_tot, range(encoded.n)) @ WeylOperator.z_op(q, n_tot, a1, -1)
    k, full = measure_weyl(full, m1, rng)
    l_label, full = measure_weyl(full, m2, rng)
    l = (-l_label) % q
    correction = WeylOperator.z_op(q, n_tot, a2, k) @ WeylOperator.x_op(q, n_tot, a2, -l)
    full = apply_weyl(full, correction)

    rho = reduced_density(full, [a2], budget=budget)
    vals, vecs = np.linalg.eigh(rho)
    top = vecs[:, int(np.argmax(vals))]
    pivot = int(np.argmax(abs(top)))
    top = top * (abs(top[pivot]) / top[pivot])
    fid = None
    if expected is not None:
        expected = np.asarray(expected, dtype=np.complex128).reshape(q)
        fid = float(np.real(expected.conj() @ rho @ expected))
    return BellDecodeResult(top, fid, (k, l), used_fallback)


# ---------------------------------------------------------------------------
# appendix encode/decode variants


def bell_basis_vector(q: int, k: int, l: int) -> np.ndarray:
    """|beta_{k,l}> = (Z^k x X^l) sum_i |ii> / sqrt(q), flattened over two
    qudit axes."""
    out = np.zeros((q, q), dtype=np.complex128)
    table = omega_table(q)
    for i in range(q):
        out[i, (i + l) % q] = table[(k * i) % q] / np.sqrt(q)
    return out.reshape(-1)


def bell_measure(state: StateVector, site_a: int, site_b: int, rng: np.random.Generator):
    """Projective Bell measurement of two sites; returns (k, l, residual
    state on the remaining sites in order)."""
    q = state.q
    grid = np.moveaxis(state.grid(), (site_a, site_b), (0, 1)).reshape(q * q, -1)
    rest_shape = [q] * (state.n - 2)
    probs = np.zeros(q * q)
    residuals = []
    labels = []
    for k in range(q):
        for l in range(q):
            vec = bell_basis_vector(q, k, l)
            res = vec.conj() @ grid
            probs[k * q + l] = float(np.vdot(res, res).real)
            residuals.append(res)
            labels.append((k, l))
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    pick = int(rng.choice(q * q, p=probs))
    k, l = labels[pick]
    res = residuals[pick] / np.sqrt(probs[pick])
    out = StateVector._derived(q, state.n - 2, res.reshape(rest_shape) if rest_shape else res)
    return k, l, out.check_normalized()


def apply_controlled(state: StateVector, control: int, w: WeylOperator, power_sign: int = 1) -> StateVector:
    """Apply W^{power_sign * j} to the rest of the register for each digit j
    of the control site. w acts on the remaining sites in their order."""
    q = state.q
    grid = np.moveaxis(state.grid(), control, 0).copy()
    for j in range(q):
        wj = w ** ((power_sign * j) % q)
        if not wj.is_identity():
            grid[j] = _weyl_on_grid(q, grid[j], wj)
    out = np.moveaxis(grid, 0, control)
    return StateVector._derived(q, state.n, out).check_normalized()


def _fourier_matrix(q: int) -> np.ndarray:
    j = np.arange(q)
    return omega_table(q)[np.outer(j, j) % q] / np.sqrt(q)


def _project_site(state: StateVector, site: int, vec: np.ndarray, tol: float = ATOL) -> StateVector:
    """Contract one site against a unit vector; errors if the site was not
    exactly in that state (norm loss above tol)."""
    grid = np.moveaxis(state.grid(), site, 0)
    res = np.tensordot(vec.conj(), grid, axes=(0, 0))
    norm = np.linalg.norm(res)
    if abs(norm - 1.0) > max(tol, 1e-7):
        raise AssertionError(f"site {site} is not in the expected product state (residual norm {norm})")
    return StateVector._derived(state.q, state.n - 1, res / norm)


def encode_decode_variants(
    g: Multigraph,
    d: int,
    mode: str,
    secret,
    b_set=None,
    rng: np.random.Generator | None = None,
    budget: int = AMPLITUDE_BUDGET,
):
    """The appendix encoding and decoding circuits.

    E1: secret qudit + |G>, Bell measurement on (secret, dealer), players
        correct with Zbar^k Xbar^{-l}. Returns the player state.
    E2: secret sits on the dealer wire over |0_L>, controlled-Xbar spreads
        it, the dealer measures in the X basis, players correct by
        Zbar^{-j}. Returns the player state.
    E3: unitary version: controlled-Xbar, Fourier on the dealer, then
        controlled-Zbar^{-1}; the dealer wire ends exactly in |+> and is
        factored out. Returns the player state. Deterministic.
    D2: decoding first stage on an authorized b_set (default: everyone):
        ancilla |+> controls V_B^{-1}. Returns the joint ancilla+players
        state (ancilla axis last).
    D3: full decode: D2 then Fourier on the ancilla, controlled-U_B,
        inverse Fourier. Returns the recovered secret amplitudes.

    E1 and E2 sample a measurement outcome and need rng; the contract is
    that every outcome reproduces qq_encode(g, d, secret) exactly.
    """
    q = g.q
    secret = np.asarray(secret, dtype=np.complex128).reshape(q)
    if abs(np.linalg.norm(secret) - 1.0) > 1e-7:
        raise ValueError("secret amplitudes must be normalized")
    players = _player_order(g, d)
    if mode in ("E1", "E2") and rng is None:
        raise ValueError(f"mode {mode} simulates a measurement and needs rng")

    if mode == "E1":
        full = StateVector(q, 1, secret).tensor(graph_state(g, budget=budget), budget=budget)
        k, l, rest = bell_measure(full, 0, 1 + d, rng)
        # remaining axes: the players in vertex order
        xbar, zbar = logical_x(g, d), logical_z(g, d)
        corr = (zbar**k) @ (xbar ** ((-l) % q))
        return apply_weyl(rest, corr)

    if mode == "E2" or mode == "E3":
        # register: dealer wire first, then players in vertex order
        zero_l = cq_encode(g, d, 0, budget=budget)
        full = StateVector(q, 1, secret).tensor(zero_l, budget=budget)
        xbar, zbar = logical_x(g, d), logical_z(g, d)
        full = apply_controlled(full, 0, xbar)
        if mode == "E2":
            # X eigenbasis: column j has X-eigenvalue omega^j, so the
            # leftover phase on |s_L> is omega^{js} and Zbar^{-j} removes it.
            xbasis = _fourier_matrix(q).conj()
            j, full = measure_site_basis(full, 0, xbasis, rng)
            full = _project_site(full, 0, xbasis[:, j])
            return apply_weyl(full, zbar ** ((-j) % q))
        fmat = _fourier_matrix(q)
        grid = np.tensordot(fmat, full.grid(), axes=(1, 0))
        full = StateVector._derived(q, full.n, grid)
        full = apply_controlled(full, 0, zbar, power_sign=-1)
        plus = np.ones(q, dtype=np.complex128) / np.sqrt(q)
        return _project_site(full, 0, plus)

    if mode in ("D2", "D3"):
        b = tuple(sorted(players if b_set is None else set(int(v) for v in b_set)))
        dms = witness_D(g, d, b)
        comp = [v for v in range(g.n) if v != d and v not in b]
        cms = witness_C(g, d, comp)
        if dms is None or cms is None:
            raise ValueError("decoding variants need an authorized player set")
        u_op, v_op = code_unitaries(g, d, b, dms, cms)
        encoded = qq_encode(g, d, secret, budget=budget)
        plus = StateVector(q, 1, np.ones(q, dtype=np.complex128) / np.sqrt(q))
        full = encoded.tensor(plus, budget=budget)  # ancilla is the last axis
        anc = full.n - 1
        full = apply_controlled(full, anc, v_op, power_sign=-1)
        if mode == "D2":
            return full
        fmat = _fourier_matrix(q)
        grid = np.tensordot(fmat, np.moveaxis(full.grid(), anc, 0), axes=(1, 0))
        full = StateVector._derived(q, full.n, np.moveaxis(grid, 0, anc))
        full = apply_controlled(full, anc, u_op)
        grid = np.tensordot(fmat.conj().T, np.moveaxis(full.grid(), anc, 0), axes=(1, 0))
        full = StateVector._derived(q, full.n, np.moveaxis(grid, 0, anc))
        rho = reduced_density(full, [anc], budget=budget)
        vals, vecs = np.linalg.eigh(rho)
        if vals[-1] < 1.0 - 1e-7:
            raise AssertionError("ancilla failed to decouple; decoding is not exact here")
        top = vecs[:, -1]
        pivot = int(np.argmax(abs(top)))
        return top * (abs(top[pivot]) / top[pivot])

    raise ValueError(f"unknown mode {mode!r}; expected E1, E2, E3, D2 or D3")


# ---------------------------------------------------------------------------
# report


def graph_hash(g: Multigraph) -> str:
    return hashlib.sha256(serialize_graph(g).encode()).hexdigest()[:16]


def oracle_report(g: Multigraph, d: int, b_set, rng: np.random.Generator, budget: int = AMPLITUDE_BUDGET) -> dict:
    """Cross-check record for one (graph, dealer, player set) instance.

    verdict_graph comes from the rank algebra; verdict_oracle is rebuilt
    from simulation alone: trace distances for the classical side and Bell
    decoding fidelity for the quantum side (of the set and its complement).
    """
    b = tuple(sorted(set(int(v) for v in b_set)))
    verdict = classify(g, d, b)
    max_td, max_fid = leak_profile(g, d, b, budget=budget)

    secret = rng.normal(size=g.q) + 1j * rng.normal(size=g.q)
    secret = secret / np.linalg.norm(secret)
    encoded = qq_encode(g, d, secret, budget=budget)
    res_b = qq_decode_bell(g, d, b, None, None, encoded, rng, expected=secret, budget=budget)
    comp = tuple(v for v in range(g.n) if v != d and v not in b)
    fid_comp = None
    if comp:
        res_c = qq_decode_bell(g, d, comp, None, None, encoded, rng, expected=secret, budget=budget)
        fid_comp = res_c.fidelity

    if res_b.fidelity is not None and res_b.fidelity >= 1 - 1e-7:
        verdict_oracle = "accessible"
    elif fid_comp is not None and fid_comp >= 1 - 1e-7 and max_td <= 1e-7:
        verdict_oracle = "no_info"
    else:
        verdict_oracle = "partial"

    return {
        "graph_hash": graph_hash(g),
        "B": list(b),
        "verdict_graph": verdict.quantum,
        "verdict_oracle": verdict_oracle,
        "max_trace_distance": float(max_td),
        "decode_fidelity": float(res_b.fidelity) if res_b.fidelity is not None else None,
    }
