"""
Exact linear algebra over GF(p) and the Lie-theoretic constructions built on it.

Vectors are int64 numpy arrays with entries in 0..p-1. Algebras are any
object exposing `p`, `dim` and `bracket_batch(U, V)`.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Protocol, Sequence, Tuple

import numpy as np

from .errors import NoSolutionError, QuotientActionError

logger = logging.getLogger(__name__)

_FLOAT_EXACT = 2 ** 52


class BracketAlgebra(Protocol):
    p: int
    dim: int

    def bracket_batch(self, U: np.ndarray, V: np.ndarray) -> np.ndarray:
        ...


def mod_p(A, p: int) -> np.ndarray:
    """Reduce to canonical residues 0..p-1."""
    return np.mod(np.asarray(A, dtype=np.int64), p)


def inv_mod_scalar(a: int, p: int) -> int:
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse modulo {p}")
    return pow(a, p - 2, p)


def matmul_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """(A @ B) mod p; uses float BLAS while every dot product stays exact."""
    A = mod_p(A, p)
    B = mod_p(B, p)
    if A.shape[-1] * (p - 1) ** 2 < _FLOAT_EXACT:
        C = np.matmul(A.astype(np.float64), B.astype(np.float64))
        return mod_p(np.rint(C).astype(np.int64), p)
    return mod_p(np.matmul(A.astype(object), B.astype(object)).astype(np.int64), p)


def bracket_from_table(table: np.ndarray, U: np.ndarray, V: np.ndarray, p: int) -> np.ndarray:
    """
    Bilinear bracket from structure constants.

    Args:
        table: C[i, j, k] with [e_i, e_j] = Σ_k C[i, j, k] e_k, as float64
        U: (a, d) left operands
        V: (b, d) right operands
        p: Characteristic

    Returns:
        (a, b, d) array of bracket coordinates mod p
    """
    U = mod_p(np.atleast_2d(U), p).astype(np.float64)
    V = mod_p(np.atleast_2d(V), p).astype(np.float64)
    if U.shape[0] == 0 or V.shape[0] == 0:
        return np.zeros((U.shape[0], V.shape[0], table.shape[2]), dtype=np.int64)
    if V.shape[0] < U.shape[0]:
        right = np.mod(np.tensordot(table, V, axes=(1, 1)), p)
        result = np.tensordot(U, right, axes=(1, 0)).transpose(0, 2, 1)
    else:
        left = np.mod(np.tensordot(U, table, axes=(1, 0)), p)
        result = np.matmul(V, left)
    return mod_p(np.rint(result).astype(np.int64), p)


def rref_mod(A, p: int) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form over GF(p).

    Returns:
        (R, pivot_columns); the first len(pivot_columns) rows of R are
        the nonzero rows
    """
    A = mod_p(np.array(A, dtype=np.int64, copy=True), p)
    if A.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {A.shape}")
    rows, cols = A.shape
    r = 0
    pivots: List[int] = []
    for c in range(cols):
        if r >= rows:
            break
        candidates = np.nonzero(A[r:, c])[0]
        if candidates.size == 0:
            continue
        pivot = r + int(candidates[0])
        if pivot != r:
            A[[r, pivot]] = A[[pivot, r]]
        A[r] = A[r] * inv_mod_scalar(A[r, c], p) % p
        column = A[:, c].copy()
        column[r] = 0
        targets = np.nonzero(column)[0]
        if targets.size:
            A[targets] = (A[targets] - np.outer(column[targets], A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def rank_mod(A, p: int) -> int:
    return len(rref_mod(A, p)[1])


def nullspace_mod(A, p: int) -> np.ndarray:
    """Basis of {x : A x = 0} as the columns of the returned matrix."""
    A = mod_p(A, p)
    cols = A.shape[1]
    R, pivots = rref_mod(A, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    N = np.zeros((cols, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        N[f, k] = 1
        for row, c in enumerate(pivots):
            N[c, k] = (-R[row, f]) % p
    return N


def left_nullspace_mod(M, p: int) -> np.ndarray:
    """Rows c with c @ M = 0, as a (k, rows(M)) matrix."""
    M = mod_p(M, p)
    rows, cols = M.shape
    augmented = np.concatenate([M, np.eye(rows, dtype=np.int64)], axis=1)
    R, _ = rref_mod(augmented, p)
    zero_rows = ~R[:, :cols].any(axis=1)
    return R[zero_rows][:, cols:].copy()


def solve_mod(A, b, p: int) -> np.ndarray:
    """
    One solution x of A x = b over GF(p).

    Raises:
        NoSolutionError: If the system is inconsistent
    """
    A = mod_p(A, p)
    b = mod_p(b, p).reshape(-1, 1)
    cols = A.shape[1]
    R, pivots = rref_mod(np.concatenate([A, b], axis=1), p)
    if cols in pivots:
        raise NoSolutionError("No solution to linear system over GF(p)")
    x = np.zeros(cols, dtype=np.int64)
    for row, c in enumerate(pivots):
        x[c] = R[row, -1]
    return x


def inv_mod_mat(A, p: int) -> np.ndarray:
    """
    Inverse of a square matrix over GF(p).

    Raises:
        ValueError: If A is singular
    """
    A = mod_p(A, p)
    n = A.shape[0]
    R, pivots = rref_mod(np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1), p)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("matrix is singular over GF(p)")
    return R[:, n:].copy()


def matrix_nilpotency_index(M: np.ndarray, p: int, max_index: Optional[int] = None) -> Optional[int]:
    """
    Smallest k with M^k = 0, or None if no k ≤ max_index works.

    The zero matrix has index 1. Nilpotency itself is decided by
    repeated squaring before the index is searched for.
    """
    M = mod_p(M, p)
    d = M.shape[0]
    limit = d if max_index is None else min(max_index, d)
    if not M.any():
        return 1
    power = M
    reach = 1
    while reach < limit:
        power = matmul_mod(power, power, p)
        reach *= 2
        if not power.any():
            break
    if power.any():
        return None
    P = M
    k = 1
    while P.any():
        P = matmul_mod(P, M, p)
        k += 1
    return k if k <= limit else None


class Subspace:
    """
    Subspace of GF(p)^d held as reduced row-echelon rows.

    Two subspaces are equal iff their row arrays are identical.
    """

    __slots__ = ("p", "ambient_dim", "rows", "pivots")

    def __init__(self, rows: np.ndarray, pivots: Sequence[int], p: int, ambient_dim: int):
        self.p = p
        self.ambient_dim = ambient_dim
        self.rows = np.asarray(rows, dtype=np.int64).reshape(-1, ambient_dim)
        self.pivots = list(pivots)

    @classmethod
    def from_vectors(cls, vectors, p: int, ambient_dim: int) -> "Subspace":
        M = np.asarray(vectors, dtype=np.int64)
        if M.size == 0:
            return cls.zero(p, ambient_dim)
        M = M.reshape(-1, ambient_dim)
        R, pivots = rref_mod(M, p)
        return cls(R[: len(pivots)], pivots, p, ambient_dim)

    @classmethod
    def zero(cls, p: int, ambient_dim: int) -> "Subspace":
        return cls(np.zeros((0, ambient_dim), dtype=np.int64), [], p, ambient_dim)

    @classmethod
    def full(cls, p: int, ambient_dim: int) -> "Subspace":
        return cls(np.eye(ambient_dim, dtype=np.int64), list(range(ambient_dim)), p, ambient_dim)

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def basis(self) -> List[np.ndarray]:
        return [row.copy() for row in self.rows]

    def _check(self, other: "Subspace") -> None:
        if other.ambient_dim != self.ambient_dim or other.p != self.p:
            raise ValueError(
                f"ambient mismatch: GF({self.p})^{self.ambient_dim} vs GF({other.p})^{other.ambient_dim}"
            )

    def reduce(self, V) -> np.ndarray:
        """Canonical residues of the rows of V modulo this subspace (linear in V)."""
        V = mod_p(V, self.p)
        if self.dim == 0:
            return V
        squeeze = V.ndim == 1
        V2 = np.atleast_2d(V)
        result = mod_p(V2 - matmul_mod(V2[:, self.pivots], self.rows, self.p), self.p)
        return result[0] if squeeze else result

    def member(self, v) -> bool:
        return not self.reduce(np.asarray(v)).any()

    def contains(self, other: "Subspace") -> bool:
        self._check(other)
        return other.dim == 0 or not self.reduce(other.rows).any()

    def sum(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.from_vectors(np.vstack([self.rows, other.rows]), self.p, self.ambient_dim)

    def intersect(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.p, self.ambient_dim)
        combos = left_nullspace_mod(other.reduce(self.rows), self.p)
        if combos.shape[0] == 0:
            return Subspace.zero(self.p, self.ambient_dim)
        return Subspace.from_vectors(matmul_mod(combos, self.rows, self.p), self.p, self.ambient_dim)

    def image(self, matrix: np.ndarray) -> "Subspace":
        """Image under the linear map v ↦ matrix @ v."""
        if self.dim == 0:
            return self
        return Subspace.from_vectors(matmul_mod(self.rows, np.asarray(matrix).T, self.p), self.p, self.ambient_dim)

    def residue_basis(self, other: "Subspace") -> "Subspace":
        """Echelon basis of the residues of self modulo other (spans self/(self ∩ other) lifted)."""
        self._check(other)
        residues = other.reduce(self.rows) if self.dim else self.rows
        return Subspace.from_vectors(residues, self.p, self.ambient_dim)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.p == other.p
            and self.ambient_dim == other.ambient_dim
            and self.pivots == other.pivots
            and np.array_equal(self.rows, other.rows)
        )

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, p={self.p})"


def echelonize(vectors, p: int, ambient_dim: int) -> Subspace:
    return Subspace.from_vectors(vectors, p, ambient_dim)


def lie_closure(algebra: BracketAlgebra, generators, closed: Optional[Subspace] = None) -> Subspace:
    """
    Smallest bracket-closed subspace containing the generators.

    Each round brackets only the newly added directions against the
    current basis; at most dim rounds are needed.

    Args:
        algebra: Anything with p, dim and bracket_batch
        generators: Vectors to close up
        closed: A subspace already known to be bracket-closed; the result contains it
    """
    current = Subspace.from_vectors(generators, algebra.p, algebra.dim)
    fresh = current.rows
    if closed is not None:
        residues = closed.reduce(current.rows)
        fresh = Subspace.from_vectors(residues[residues.any(axis=1)], algebra.p, algebra.dim).rows
        current = closed.sum(current)
    rounds = 0
    while fresh.shape[0]:
        rounds += 1
        if rounds > algebra.dim + 1:
            raise RuntimeError("Lie closure did not stabilize")
        products = algebra.bracket_batch(fresh, current.rows).reshape(-1, algebra.dim)
        residues = current.reduce(products)
        residues = residues[residues.any(axis=1)]
        if residues.shape[0] == 0:
            break
        new_part = Subspace.from_vectors(residues, algebra.p, algebra.dim)
        current = current.sum(new_part)
        fresh = new_part.rows
    logger.debug("Lie closure reached dimension %s after %s rounds", current.dim, rounds)
    return current


def normalizer(
    algebra: BracketAlgebra, A: Subspace, N: Subspace, target: Optional[Subspace] = None
) -> Subspace:
    """
    {y ∈ A : [y, n] ∈ target for every n in a basis of N}; target defaults to N.

    Solved as one linear system in the coordinates of y with respect to
    the rows of A.
    """
    A._check(N)
    target = N if target is None else target
    A._check(target)
    if A.dim == 0 or N.dim == 0:
        return A
    products = algebra.bracket_batch(A.rows, N.rows)
    residues = target.reduce(products.reshape(-1, algebra.dim)).reshape(A.dim, -1)
    combos = left_nullspace_mod(residues, algebra.p)
    if combos.shape[0] == 0:
        return Subspace.zero(algebra.p, algebra.dim)
    return Subspace.from_vectors(matmul_mod(combos, A.rows, algebra.p), algebra.p, algebra.dim)


class QuotientAction:
    """
    Action of a subspace of the algebra on ambient/base by brackets.

    The quotient is identified with the non-pivot coordinates of base,
    and each action element becomes a small square matrix there.

    Raises:
        QuotientActionError: If some action element does not preserve base
    """

    def __init__(self, algebra: BracketAlgebra, action: Subspace, base: Subspace):
        action._check(base)
        self.algebra = algebra
        self.base = base
        self.p = algebra.p
        pivots = set(base.pivots)
        self.free = [c for c in range(algebra.dim) if c not in pivots]
        if action.dim and base.dim:
            leak = base.reduce(algebra.bracket_batch(action.rows, base.rows).reshape(-1, algebra.dim))
            if leak.any():
                raise QuotientActionError("action does not preserve the base subspace")
        size = len(self.free)
        complement = np.zeros((size, algebra.dim), dtype=np.int64)
        complement[np.arange(size), self.free] = 1
        if action.dim and size:
            products = algebra.bracket_batch(action.rows, complement)
            residues = base.reduce(products.reshape(-1, algebra.dim)).reshape(action.dim, size, -1)
            # matrices[a][:, j] = quotient coordinates of [action_a, complement_j]
            self.matrices = residues[:, :, self.free].transpose(0, 2, 1).copy()
        else:
            self.matrices = np.zeros((0, size, size), dtype=np.int64)

    @property
    def quotient_dim(self) -> int:
        return len(self.free)

    def project(self, v) -> np.ndarray:
        return self.base.reduce(np.asarray(v, dtype=np.int64))[self.free]

    def lift(self, rows: np.ndarray) -> np.ndarray:
        lifted = np.zeros((rows.shape[0], self.algebra.dim), dtype=np.int64)
        lifted[:, self.free] = rows
        return lifted

    def spin_quotient(self, start_q) -> Subspace:
        """Smallest stable subspace of the quotient containing start_q."""
        size = self.quotient_dim
        current = Subspace.from_vectors(np.asarray(start_q, dtype=np.int64), self.p, size)
        fresh = current.rows
        while fresh.shape[0] and self.matrices.shape[0]:
            images = np.einsum("aij,fj->afi", self.matrices, fresh).reshape(-1, size)
            residues = current.reduce(images)
            residues = residues[residues.any(axis=1)]
            if residues.shape[0] == 0:
                break
            new_part = Subspace.from_vectors(residues, self.p, size)
            current = current.sum(new_part)
            fresh = new_part.rows
        return current

    def spin(self, start) -> Subspace:
        """Preimage in the ambient space of the submodule generated by start."""
        spun = self.spin_quotient(self.project(start))
        if spun.dim == 0:
            return self.base
        return self.base.sum(Subspace.from_vectors(self.lift(spun.rows), self.p, self.algebra.dim))


def spin_submodule(algebra: BracketAlgebra, action: Subspace, start, base: Subspace) -> Subspace:
    """
    Smallest action-stable subspace of ambient/base containing start.

    Returned as its full preimage, a subspace containing base.

    Raises:
        QuotientActionError: If some action element does not preserve base
    """
    return QuotientAction(algebra, action, base).spin(start)


@dataclass
class TriangulationFlag:
    """V_0 = 0 ⊂ V_1 ⊂ ... ⊂ V_m = V with x(V_i) ⊆ V_{i-1}."""

    levels: List[Subspace]

    @property
    def length(self) -> int:
        return len(self.levels) - 1


@dataclass
class TriangulationFailure:
    reason: str
    offender: Optional[int] = None


def _super_commutator(A: np.ndarray, B: np.ndarray, pa: int, pb: int, p: int) -> np.ndarray:
    sign = -1 if pa * pb else 1
    return mod_p(matmul_mod(A, B, p) - sign * matmul_mod(B, A, p), p)


def strict_triangulation(
    ops: Sequence[np.ndarray], p: int, dim: int, parities: Optional[Sequence[int]] = None
):
    """
    Common flag on which every operator is strictly lower triangular.

    Args:
        ops: Square matrices acting on column vectors
        p: Characteristic
        dim: Dimension of the space
        parities: Z_2-degree of each operator; all even when omitted

    Returns:
        TriangulationFlag, or TriangulationFailure naming the offending
        operator when one is not nilpotent
    """
    ops = [mod_p(X, p) for X in ops]
    parities = list(parities) if parities is not None else [0] * len(ops)
    for k, X in enumerate(ops):
        if matrix_nilpotency_index(X, p) is None:
            return TriangulationFailure(reason=f"operator {k} is not nilpotent", offender=k)
    if ops:
        span = Subspace.from_vectors([X.reshape(-1) for X in ops], p, dim * dim)
        for a in range(len(ops)):
            for b in range(a, len(ops)):
                comm = _super_commutator(ops[a], ops[b], parities[a], parities[b], p)
                if not span.member(comm.reshape(-1)):
                    return TriangulationFailure(reason=f"span not closed under [op {a}, op {b}]")
    levels = [Subspace.zero(p, dim)]
    constraint = np.eye(dim, dtype=np.int64)
    while levels[-1].dim < dim:
        if ops:
            stacked = np.vstack([matmul_mod(constraint, X, p) for X in ops])
        else:
            stacked = np.zeros((0, dim), dtype=np.int64)
        level = Subspace.from_vectors(nullspace_mod(stacked, p).T, p, dim)
        if level.dim <= levels[-1].dim:
            return TriangulationFailure(reason="common kernel chain stalled")
        levels.append(level)
        R, pivots = rref_mod(stacked, p) if stacked.shape[0] else (stacked, [])
        constraint = R[: len(pivots)] if len(pivots) else np.zeros((0, dim), dtype=np.int64)
    return TriangulationFlag(levels)


def verify_flag(flag: TriangulationFlag, ops: Sequence[np.ndarray], p: int) -> bool:
    """Direct check of x(V_i) ⊆ V_{i-1} for every operator and level."""
    for i in range(1, len(flag.levels)):
        lower, upper = flag.levels[i - 1], flag.levels[i]
        for X in ops:
            if not lower.contains(upper.image(X)):
                return False
    return True
