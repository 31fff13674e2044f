"""
Generalized Witt superalgebra W(n,m;t) of superderivations Σ f_r ∂_r.

Also hosts the operators E, T_H and Δ on O(n,n+1;t), the principal
grading of W, and a finite model of W used for matrix computations.
"""

import logging
import re
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from .errors import MixedParityError, ParseError, ShapeMismatchError
from .linalg import bracket_from_table
from .superalg import (
    Monomial,
    Poly,
    Shape,
    basis,
    derive,
    format_poly,
    multiply,
    parse_poly,
    pdeg,
    sdeg,
    split_signed_terms,
)

logger = logging.getLogger(__name__)


def mu(shape: Shape, i: int) -> int:
    """Parity of the variable x_i (and of ∂_i)."""
    shape.check_direction(i)
    return 0 if i <= shape.n else 1


def prime(shape: Shape, i: int) -> int:
    """
    Partner index i′: i+n for i ≤ n and i−n for n < i ≤ 2n.

    Raises:
        ValueError: If i is outside 1..2n
    """
    n = shape.n
    if 1 <= i <= n:
        return i + n
    if n < i <= 2 * n:
        return i - n
    raise ValueError(f"index {i} has no partner (expected 1..{2 * n})")


def _homogeneous_parity(f: Poly, what: str = "element") -> int:
    value = f.parity()
    if value is None:
        raise MixedParityError(f"{what} {format_poly(f)} is not Z_2-homogeneous")
    return value


class SuperDerivation:
    """Σ_r f_r ∂_r with no zero coefficients stored."""

    __slots__ = ("shape", "_coeffs")

    def __init__(self, shape: Shape, coeffs: Optional[Dict[int, Poly]] = None):
        self.shape = shape
        clean = {}
        for r, f in (coeffs or {}).items():
            shape.check_direction(r)
            if f.shape != shape:
                raise ShapeMismatchError(f"coefficient of d{r} lives over {f.shape}, expected {shape}")
            if not f.is_zero():
                clean[r] = f
        self._coeffs = clean

    @classmethod
    def zero(cls, shape: Shape) -> "SuperDerivation":
        return cls(shape)

    @classmethod
    def partial(cls, shape: Shape, r: int) -> "SuperDerivation":
        """The coordinate derivation ∂_r."""
        return cls(shape, {r: Poly.one(shape)})

    @classmethod
    def term(cls, f: Poly, r: int) -> "SuperDerivation":
        return cls(f.shape, {r: f})

    @property
    def coeffs(self) -> Dict[int, Poly]:
        return dict(self._coeffs)

    def coefficient(self, r: int) -> Poly:
        return self._coeffs.get(r, Poly.zero(self.shape))

    def terms(self) -> Iterator[Tuple[int, Monomial, int]]:
        """(direction, monomial, coefficient) in deterministic order."""
        for r in sorted(self._coeffs):
            for mono, c in self._coeffs[r].items():
                yield r, mono, c

    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def parity(self) -> Optional[int]:
        """Common parity of all terms f_r ∂_r, 0 for zero, None if mixed."""
        parities = set()
        for r, f in self._coeffs.items():
            pf = f.parity()
            if pf is None:
                return None
            parities.add((pf + mu(self.shape, r)) % 2)
        if len(parities) > 1:
            return None
        return parities.pop() if parities else 0

    def apply(self, f: Poly) -> Poly:
        """Σ_r f_r · ∂_r(f)."""
        if f.shape != self.shape:
            raise ShapeMismatchError(f"shape mismatch: {self.shape} vs {f.shape}")
        result = Poly.zero(self.shape)
        for r, coeff in self._coeffs.items():
            dr = derive(r, f)
            if dr:
                result = result + multiply(coeff, dr)
        return result

    def bracket(self, other: "SuperDerivation") -> "SuperDerivation":
        return bracket_w(self, other)

    def pdeg(self) -> Optional[int]:
        return pdeg_w(self)

    def sdeg(self) -> Optional[int]:
        return sdeg_w(self)

    def _check(self, other: "SuperDerivation") -> None:
        if other.shape != self.shape:
            raise ShapeMismatchError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: "SuperDerivation") -> "SuperDerivation":
        self._check(other)
        acc = dict(self._coeffs)
        for r, f in other._coeffs.items():
            acc[r] = acc[r] + f if r in acc else f
        return SuperDerivation(self.shape, acc)

    def __neg__(self) -> "SuperDerivation":
        return SuperDerivation(self.shape, {r: -f for r, f in self._coeffs.items()})

    def __sub__(self, other: "SuperDerivation") -> "SuperDerivation":
        return self + (-other)

    def scale(self, c: int) -> "SuperDerivation":
        return SuperDerivation(self.shape, {r: f.scale(c) for r, f in self._coeffs.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SuperDerivation):
            return NotImplemented
        return self.shape == other.shape and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self.shape, frozenset(self._coeffs.items())))

    def __str__(self) -> str:
        return format_derivation(self)

    def __repr__(self) -> str:
        return f"SuperDerivation({format_derivation(self)!r})"


def bracket_w(X: SuperDerivation, Y: SuperDerivation) -> SuperDerivation:
    """
    Super-commutator [X, Y] of two homogeneous superderivations.

    Uses [f∂_i, g∂_j] = f∂_i(g)∂_j − (−1)^{|X||Y|} g∂_j(f)∂_i summed over
    all terms, i.e. Σ_j X(g_j)∂_j − (−1)^{|X||Y|} Σ_i Y(f_i)∂_i.

    Raises:
        MixedParityError: If X or Y is not homogeneous
    """
    X._check(Y)
    px, py = X.parity(), Y.parity()
    if px is None or py is None:
        raise MixedParityError("bracket_w needs Z_2-homogeneous superderivations")
    sign = -1 if px * py else 1
    acc: Dict[int, Poly] = {}
    for j, g in Y._coeffs.items():
        value = X.apply(g)
        acc[j] = acc[j] + value if j in acc else value
    for i, f in X._coeffs.items():
        value = Y.apply(f).scale(-sign)
        acc[i] = acc[i] + value if i in acc else value
    return SuperDerivation(X.shape, acc)


def pdeg_w(D: SuperDerivation) -> Optional[int]:
    """Common principal degree pdeg(f) − 1 − δ_{j,2n+1}; None if mixed or zero."""
    z = D.shape.distinguished
    degrees = set()
    for r, mono, _ in D.terms():
        degrees.add(pdeg(mono, D.shape) - 1 - (1 if r == z else 0))
    return degrees.pop() if len(degrees) == 1 else None


def sdeg_w(D: SuperDerivation) -> Optional[int]:
    degrees = {sdeg(mono) - 1 for _, mono, _ in D.terms()}
    return degrees.pop() if len(degrees) == 1 else None


def euler_derivation(shape: Shape) -> SuperDerivation:
    """E = Σ_{i=1}^{2n} x_i ∂_i."""
    if shape.m < shape.n:
        raise ValueError("E needs at least n odd variables")
    return SuperDerivation(shape, {i: Poly.variable(shape, i) for i in range(1, 2 * shape.n + 1)})


def E_operator(f: Poly) -> Poly:
    return euler_derivation(f.shape).apply(f)


def T_H(a: Poly) -> SuperDerivation:
    """
    Odd Hamiltonian derivation Σ_{i=1}^{2n} (−1)^{μ(i′)p(a)} ∂_{i′}(a) ∂_i.

    Raises:
        MixedParityError: If a is not homogeneous
    """
    shape = a.shape
    pa = _homogeneous_parity(a, "potential")
    coeffs = {}
    for i in range(1, 2 * shape.n + 1):
        j = prime(shape, i)
        value = derive(j, a)
        if mu(shape, j) * pa:
            value = -value
        coeffs[i] = value
    return SuperDerivation(shape, coeffs)


def Delta(a: Poly) -> Poly:
    """Δ(a) = Σ_{i=1}^{n} ∂_i ∂_{i′}(a)."""
    shape = a.shape
    if shape.m < shape.n:
        raise ValueError("Delta needs at least n odd variables")
    result = Poly.zero(shape)
    for i in range(1, shape.n + 1):
        result = result + derive(i, derive(prime(shape, i), a))
    return result


def in_SHO_prime(a: Poly) -> bool:
    """
    True iff Δ(a) = 0 for a ∈ O(n,n).

    Raises:
        ValueError: If a involves the distinguished variable x_{2n+1}
    """
    z = a.shape.distinguished
    if z is not None and any(z in mono.u for mono in a.monomials()):
        raise ValueError(f"{format_poly(a)} involves x{z}; expected an element of O(n,n)")
    return Delta(a).is_zero()


def format_derivation(D: SuperDerivation) -> str:
    """Print as `f * d1 + (g + h) * d5`."""
    if D.is_zero():
        return "0"
    pieces = []
    for r in sorted(D._coeffs):
        f = D._coeffs[r]
        text = format_poly(f)
        if text == "1":
            pieces.append(f"d{r}")
        elif len(f) > 1:
            pieces.append(f"({text}) * d{r}")
        else:
            pieces.append(f"{text} * d{r}")
    return " + ".join(pieces)


_DERIVATION_TERM = re.compile(r"^(?:(.*?)\s*\*\s*)?d(\d+)$", re.DOTALL)


def parse_derivation(shape: Shape, text: str) -> SuperDerivation:
    """
    Parse `f * d1 + g * d5`; coefficients use the Poly syntax.

    Raises:
        ParseError: On malformed terms or directions outside the shape
    """
    text = text.strip()
    if not text:
        raise ParseError("empty derivation")
    result = SuperDerivation.zero(shape)
    for sign, term in split_signed_terms(text):
        match = _DERIVATION_TERM.match(term.strip())
        if not match:
            raise ParseError(f"derivation term '{term}' must end with '* dK'")
        r = int(match.group(2))
        if not 1 <= r <= shape.num_vars:
            raise ParseError(f"d{r} is not a direction of this shape (d1..d{shape.num_vars})")
        coeff_text = (match.group(1) or "1").strip()
        if coeff_text.startswith("(") and coeff_text.endswith(")"):
            coeff_text = coeff_text[1:-1]
        coeff = parse_poly(shape, coeff_text).scale(sign)
        result = result + SuperDerivation.term(coeff, r)
    return result


class WittModel:
    """
    The truncated W(n,m;t) as a finite-dimensional algebra over F_p.

    Basis elements are x^(α)x^u ∂_r ordered by direction, then monomial.
    """

    def __init__(self, shape: Shape):
        self.shape = shape
        self.p = shape.p
        monomials = basis(shape)
        self.basis: List[Tuple[Monomial, int]] = [
            (mono, r) for r in range(1, shape.num_vars + 1) for mono in monomials
        ]
        self.index = {item: k for k, item in enumerate(self.basis)}
        self.dim = len(self.basis)
        self.parities = np.array([(len(mono.u) + mu(shape, r)) % 2 for mono, r in self.basis], dtype=np.int64)
        logger.debug("W model over %s has dimension %s", shape, self.dim)

    def element(self, k: int) -> SuperDerivation:
        mono, r = self.basis[k]
        return SuperDerivation(self.shape, {r: Poly(self.shape, {mono: 1})})

    def coords(self, D: SuperDerivation) -> np.ndarray:
        if D.shape != self.shape:
            raise ShapeMismatchError(f"shape mismatch: {self.shape} vs {D.shape}")
        v = np.zeros(self.dim, dtype=np.int64)
        for r, mono, c in D.terms():
            v[self.index[(mono, r)]] = c
        return v

    def from_coords(self, v: np.ndarray) -> SuperDerivation:
        coeffs: Dict[int, Dict[Monomial, int]] = {}
        for k in np.nonzero(np.asarray(v) % self.p)[0]:
            mono, r = self.basis[int(k)]
            coeffs.setdefault(r, {})[mono] = int(v[k])
        return SuperDerivation(self.shape, {r: Poly(self.shape, terms) for r, terms in coeffs.items()})

    def pdeg(self, k: int) -> int:
        mono, r = self.basis[k]
        return pdeg(mono, self.shape) - 1 - (1 if r == self.shape.distinguished else 0)

    @cached_property
    def structure_constants(self) -> np.ndarray:
        """C[i, j, :] = coordinates of [e_i, e_j]; stored as float64 for BLAS."""
        logger.info("Computing W structure constants (dimension %s)", self.dim)
        elements = [self.element(k) for k in range(self.dim)]
        table = np.zeros((self.dim, self.dim, self.dim), dtype=np.float64)
        for i, X in enumerate(elements):
            for j, Y in enumerate(elements):
                table[i, j] = self.coords(bracket_w(X, Y))
        return table

    def bracket_batch(self, U: np.ndarray, V: np.ndarray) -> np.ndarray:
        return bracket_from_table(self.structure_constants, U, V, self.p)

    def ad_matrix(self, D: SuperDerivation) -> np.ndarray:
        """Matrix of ad D; column j holds the coordinates of [D, e_j]."""
        M = np.zeros((self.dim, self.dim), dtype=np.int64)
        for j in range(self.dim):
            M[:, j] = self.coords(bracket_w(D, self.element(j)))
        return M

    def positive_basis(self) -> List[int]:
        """Indices of basis elements in W_{p,1} (principal degree ≥ 1)."""
        return [k for k in range(self.dim) if self.pdeg(k) >= 1]


def operator_bracket_on(X: SuperDerivation, Y: SuperDerivation, f: Poly) -> Poly:
    """X(Y(f)) − (−1)^{|X||Y|} Y(X(f)), the composition reading of [X, Y]."""
    px, py = X.parity(), Y.parity()
    if px is None or py is None:
        raise MixedParityError("composition bracket needs homogeneous operands")
    sign = -1 if px * py else 1
    return X.apply(Y.apply(f)) - Y.apply(X.apply(f)).scale(sign)
