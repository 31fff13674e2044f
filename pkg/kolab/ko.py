"""
Odd Contact superalgebra KO(n,n+1;t).

Elements are stored as potentials a ∈ O(n,n+1;t) standing for D_KO(a).
The closed-form bracket is the primary path; the expansion into W is
kept as an independent cross-check.
"""

import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Dict, List, Optional

import numpy as np

from .errors import CapExceededError, MixedParityError, ShapeMismatchError
from .linalg import Subspace, bracket_from_table, lie_closure, mod_p
from .superalg import Monomial, Poly, Shape, basis, derive, format_poly, monomial_key, multiply, pdeg, sdeg
from .witt import E_operator, SuperDerivation, T_H, euler_derivation

logger = logging.getLogger(__name__)

# Alias used in signatures: a potential is a homogeneous Poly over a contact shape.
Potential = Poly


def _require_contact(shape: Shape) -> int:
    z = shape.distinguished
    if z is None:
        raise ValueError(f"{shape} is not a contact shape (m must equal n+1)")
    return z


def potential_parity(a: Potential) -> int:
    value = a.parity()
    if value is None:
        raise MixedParityError(f"potential {format_poly(a)} is not Z_2-homogeneous")
    return value


def parity_ko(a: Potential) -> int:
    """Parity of D_KO(a), which is p(a) + 1."""
    return (potential_parity(a) + 1) % 2


def pdeg_ko(mono: Monomial, shape: Shape) -> int:
    """Principal degree of D_KO(x^(α)x^u)."""
    return pdeg(mono, shape) - 2


@lru_cache(maxsize=8192)
def d_ko_expand(a: Potential) -> SuperDerivation:
    """
    D_KO(a) = T_H(a) + (−1)^{p(a)} ∂_{2n+1}(a) E + (E(a) − 2a) ∂_{2n+1}.

    Raises:
        MixedParityError: If a is not homogeneous
    """
    shape = a.shape
    z = _require_contact(shape)
    pa = potential_parity(a)
    result = T_H(a)
    da = derive(z, a)
    if da:
        factor = da if pa == 0 else -da
        euler = euler_derivation(shape)
        result = result + SuperDerivation(shape, {i: multiply(factor, x) for i, x in euler.coeffs.items()})
    result = result + SuperDerivation(shape, {z: E_operator(a) - a.scale(2)})
    return result


def ad_operator(a: Potential) -> Callable[[Poly], Poly]:
    """The map b ↦ potential of [D_KO(a), D_KO(b)]; a must be homogeneous."""
    shape = a.shape
    z = _require_contact(shape)
    pa = potential_parity(a)
    expansion = d_ko_expand(a)
    shift = derive(z, a).scale(2 if pa == 0 else -2)

    def apply(b: Poly) -> Poly:
        if b.shape != shape:
            raise ShapeMismatchError(f"shape mismatch: {shape} vs {b.shape}")
        value = expansion.apply(b)
        if shift:
            value = value - multiply(shift, b)
        return value

    return apply


def bracket_ko(a: Potential, b: Potential) -> Potential:
    """
    Potential of [D_KO(a), D_KO(b)]: D_KO(a)(b) − (−1)^{p(a)} 2 ∂_{2n+1}(a) b.

    Raises:
        MixedParityError: If a or b is not homogeneous
        ShapeMismatchError: If a and b live over different shapes
    """
    if a.shape != b.shape:
        raise ShapeMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    potential_parity(b)
    if a.is_zero() or b.is_zero():
        potential_parity(a)
        return Poly.zero(a.shape)
    return ad_operator(a)(b)


def bracket_simplified(a: Potential, b: Potential) -> Potential:
    """
    T_H(a)(b) for a ∈ O(n,n) of standard degree 2.

    Raises:
        ValueError: If a involves x_{2n+1} or is not of standard degree 2
    """
    z = _require_contact(a.shape)
    if derive(z, a):
        raise ValueError(f"{format_poly(a)} involves x{z}")
    if any(sdeg(mono) != 2 for mono in a.monomials()):
        raise ValueError(f"{format_poly(a)} is not of standard degree 2")
    return T_H(a).apply(b)


@dataclass
class GradedComponent:
    index: int
    basis: List[Potential]

    @property
    def dim(self) -> int:
        return len(self.basis)


class KOModel:
    """
    Finite model of KO(n,n+1;t) on the potential basis.

    The basis is sorted by principal degree so that every graded
    component is a contiguous block and every filtration space a tail.
    """

    def __init__(self, shape: Shape, max_dim: Optional[int] = None):
        """
        Build the model.

        Args:
            shape: Contact shape O(n, n+1; t) over F_p
            max_dim: Refuse models larger than this

        Raises:
            CapExceededError: If dim O exceeds max_dim
        """
        _require_contact(shape)
        if max_dim is not None and shape.dim > max_dim:
            raise CapExceededError(f"model dimension {shape.dim} exceeds cap {max_dim}")
        self.shape = shape
        self.p = shape.p
        self.basis: List[Monomial] = basis(shape, key=lambda mono: (pdeg(mono, shape), monomial_key(mono)))
        self.index: Dict[Monomial, int] = {mono: k for k, mono in enumerate(self.basis)}
        self.dim = len(self.basis)
        self.degrees = np.array([pdeg_ko(mono, shape) for mono in self.basis], dtype=np.int64)
        self.parities = np.array([(len(mono.u) + 1) % 2 for mono in self.basis], dtype=np.int64)
        self.min_degree = -2
        self.max_degree = int(self.degrees.max())
        logger.debug("KO model over %s: dimension %s, degrees -2..%s", shape, self.dim, self.max_degree)

    def potential(self, k: int) -> Potential:
        return Poly(self.shape, {self.basis[k]: 1})

    def potentials(self) -> List[Potential]:
        return [self.potential(k) for k in range(self.dim)]

    def coords(self, a: Poly) -> np.ndarray:
        if a.shape != self.shape:
            raise ShapeMismatchError(f"shape mismatch: {self.shape} vs {a.shape}")
        v = np.zeros(self.dim, dtype=np.int64)
        for mono, c in a.terms.items():
            v[self.index[mono]] = c
        return v

    def from_coords(self, v: np.ndarray) -> Poly:
        v = np.asarray(v) % self.p
        return Poly(self.shape, {self.basis[int(k)]: int(v[k]) for k in np.nonzero(v)[0]})

    def unit(self, k: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[k] = 1
        return v

    def degree_components(self, a: Poly) -> Dict[int, Poly]:
        """Split a into principal-degree components (KO degrees)."""
        parts: Dict[int, Dict[Monomial, int]] = {}
        for mono, c in a.terms.items():
            parts.setdefault(pdeg_ko(mono, self.shape), {})[mono] = c
        return {d: Poly(self.shape, terms) for d, terms in sorted(parts.items())}

    def parity_split(self, v: np.ndarray) -> List[np.ndarray]:
        """[even part, odd part] of a coordinate vector (parity of D_KO)."""
        v = np.asarray(v)
        return [np.where(self.parities == q, v, 0) for q in (0, 1)]

    def _indices(self, mask: np.ndarray) -> np.ndarray:
        return np.nonzero(mask)[0]

    def span_of_indices(self, indices) -> Subspace:
        return Subspace.from_vectors([self.unit(int(k)) for k in indices], self.p, self.dim)

    def graded_component(self, i: int) -> GradedComponent:
        """
        Basis of KO_[i].

        Raises:
            ValueError: If i is outside -2..max_degree
        """
        if not self.min_degree <= i <= self.max_degree:
            raise ValueError(f"degree {i} outside {self.min_degree}..{self.max_degree}")
        return GradedComponent(i, [self.potential(int(k)) for k in self._indices(self.degrees == i)])

    def graded_subspace(self, i: int) -> Subspace:
        return self.span_of_indices(self._indices(self.degrees == i))

    def filtration(self, i: int) -> Subspace:
        """KO_i, the span of all components of degree ≥ i."""
        if i < self.min_degree:
            raise ValueError(f"filtration index {i} below {self.min_degree}")
        return self.span_of_indices(self._indices(self.degrees >= i))

    def even_part(self) -> Subspace:
        return self.span_of_indices(self._indices(self.parities == 0))

    def odd_part(self) -> Subspace:
        return self.span_of_indices(self._indices(self.parities == 1))

    def bracket(self, a: Potential, b: Potential) -> Potential:
        return bracket_ko(a, b)

    @cached_property
    def structure_constants(self) -> np.ndarray:
        """C[i, j, :] = coordinates of [e_i, e_j]; float64 so contractions use BLAS."""
        logger.info("Computing KO structure constants (dimension %s)", self.dim)
        elements = self.potentials()
        table = np.zeros((self.dim, self.dim, self.dim), dtype=np.float64)
        for i, a in enumerate(elements):
            op = ad_operator(a)
            for j, b in enumerate(elements):
                value = op(b)
                for mono, c in value.terms.items():
                    table[i, j, self.index[mono]] = c
        return table

    def bracket_vectors(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.bracket_batch(np.asarray(u)[None, :], np.asarray(v)[None, :])[0, 0]

    def bracket_batch(self, U: np.ndarray, V: np.ndarray) -> np.ndarray:
        """Brackets of all rows of U with all rows of V, shape (len U, len V, dim)."""
        return bracket_from_table(self.structure_constants, U, V, self.p)

    @cached_property
    def generator_indices(self) -> List[int]:
        """Basis elements whose Lie closure is the whole model, picked greedily in basis order."""
        chosen: List[int] = []
        span = Subspace.zero(self.p, self.dim)
        for k in range(self.dim):
            if span.dim == self.dim:
                break
            if span.member(self.unit(k)):
                continue
            chosen.append(k)
            span = lie_closure(self, self.unit(k)[None, :], closed=span)
        logger.debug("KO model generated by %s of %s basis elements", len(chosen), self.dim)
        return chosen

    def ad_matrix(self, y: Poly) -> np.ndarray:
        """Matrix of ad y; column j holds the coordinates of [y, e_j]."""
        if "structure_constants" in self.__dict__:
            v = self.coords(y).astype(np.float64)
            table = np.tensordot(v, self.structure_constants, axes=(0, 0))
            return mod_p(np.rint(table).astype(np.int64), self.p).T.copy()
        M = np.zeros((self.dim, self.dim), dtype=np.int64)
        for u in self.parity_split(self.coords(y)):
            if not u.any():
                continue
            op = ad_operator(self.from_coords(u))
            for j, b in enumerate(self.potentials()):
                M[:, j] += self.coords(op(b))
        return mod_p(M, self.p)

    def graded_dims(self) -> Dict[int, int]:
        return {i: int(np.sum(self.degrees == i)) for i in range(self.min_degree, self.max_degree + 1)}

    def index_map(self) -> str:
        """Human-readable variable layout printed in report headers."""
        n = self.shape.n
        odd = f"x{n + 1}..x{2 * n}" if n > 1 else f"x{n + 1}"
        even = f"x1..x{n}" if n > 1 else "x1"
        return f"even {even} | odd {odd} (x_i' = x_(i+n)) | distinguished x{2 * n + 1}"

    def classification_invariant(self) -> int:
        """dim KO_[-2] + dim KO_[-1], which equals 2n+1."""
        dims = self.graded_dims()
        return dims[-2] + dims[-1]


def classification_from_table(table: np.ndarray, degrees: np.ndarray) -> int:
    """
    dim KO/KO_0 read off a structure-constant table in any basis order.

    Args:
        table: C[i, j, k] in that basis order
        degrees: Principal degree of each basis element, same order

    Raises:
        ValueError: If the span of the degree ≥ 0 elements is not a subalgebra
    """
    inside = np.nonzero(degrees >= 0)[0]
    outside = np.nonzero(degrees < 0)[0]
    if np.any(table[np.ix_(inside, inside, outside)]):
        raise ValueError("elements of degree ≥ 0 do not span a subalgebra")
    return int(outside.size)


def recover_rank(invariant: int) -> int:
    """n from the classification invariant 2n+1."""
    if invariant < 3 or invariant % 2 == 0:
        raise ValueError(f"{invariant} is not of the form 2n+1 with n ≥ 1")
    return (invariant - 1) // 2


def structure_constants_payload(model: KOModel) -> Dict:
    """JSON-ready structure constants with deterministic ordering."""
    table = np.rint(model.structure_constants).astype(np.int64)
    brackets = []
    for i in range(model.dim):
        for j in range(model.dim):
            row = table[i, j]
            nonzero = [[int(k), int(row[k])] for k in np.nonzero(row)[0]]
            if nonzero:
                brackets.append([i, j, nonzero])
    return {
        "schema": 1,
        "p": model.p,
        "n": model.shape.n,
        "t": list(model.shape.t),
        "index_map": model.index_map(),
        "basis": [format_poly(model.potential(k)) for k in range(model.dim)],
        "degrees": [int(d) for d in model.degrees],
        "brackets": brackets,
        "classification_invariant": model.classification_invariant(),
    }
