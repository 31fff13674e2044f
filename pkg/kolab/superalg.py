"""
Truncated divided power superalgebra O(n,m;t) = O(n;t) ⊗ Λ(m).

Variables are numbered 1..n (even, divided powers) and n+1..n+m (odd).
For the contact shapes used throughout the package m = n+1 and x_{2n+1}
is the distinguished odd variable of principal degree 2.
"""

import itertools
import logging
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Iterable, Iterator, List, NamedTuple, Optional, Tuple

from .errors import ParseError, ShapeMismatchError
from .scalars import PrimeField, prime_field

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Shape:
    """Number of variables, truncation heights and characteristic."""

    n: int
    t: Tuple[int, ...]
    p: int
    m: Optional[int] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")
        heights = tuple(int(h) for h in self.t)
        if len(heights) != self.n:
            raise ValueError(f"t must have {self.n} heights, got {len(heights)}")
        if any(h < 1 for h in heights):
            raise ValueError(f"truncation heights must be positive, got {heights}")
        object.__setattr__(self, "t", heights)
        m = self.n + 1 if self.m is None else int(self.m)
        if m < 0:
            raise ValueError(f"m must be non-negative, got {m}")
        object.__setattr__(self, "m", m)
        prime_field(self.p)

    @classmethod
    def contact(cls, n: int, p: int, t: Optional[Iterable[int]] = None) -> "Shape":
        """Shape of O(n, n+1; t); heights default to all ones."""
        heights = tuple(t) if t else (1,) * n
        return cls(n=n, t=heights, p=p)

    @property
    def field(self) -> PrimeField:
        return prime_field(self.p)

    @property
    def bounds(self) -> Tuple[int, ...]:
        """Largest allowed exponent of each even variable."""
        return tuple(self.p ** h - 1 for h in self.t)

    @property
    def num_vars(self) -> int:
        return self.n + self.m

    @property
    def odd_indices(self) -> range:
        return range(self.n + 1, self.n + self.m + 1)

    @property
    def distinguished(self) -> Optional[int]:
        return 2 * self.n + 1 if self.m == self.n + 1 else None

    @property
    def dim(self) -> int:
        return math.prod(self.p ** h for h in self.t) * 2 ** self.m

    def with_heights(self, t: Iterable[int]) -> "Shape":
        return Shape(n=self.n, t=tuple(t), p=self.p, m=self.m)

    def check_direction(self, r: int) -> None:
        if not 1 <= r <= self.num_vars:
            raise ValueError(f"direction {r} out of range 1..{self.num_vars}")


class Monomial(NamedTuple):
    """x^(alpha) x^u with u sorted ascending."""

    alpha: Tuple[int, ...]
    u: Tuple[int, ...] = ()


def sdeg(mono: Monomial) -> int:
    """Standard degree |alpha| + |u|."""
    return sum(mono.alpha) + len(mono.u)


def pdeg(mono: Monomial, shape: Shape) -> int:
    """
    Principal degree |alpha| + ||u||, where x_{2n+1} counts twice.

    Raises:
        ValueError: If the shape has no distinguished odd variable
    """
    z = shape.distinguished
    if z is None:
        raise ValueError("principal degree needs a shape with m = n+1")
    return sum(mono.alpha) + len(mono.u) + (1 if z in mono.u else 0)


def monomial_parity(mono: Monomial) -> int:
    return len(mono.u) % 2


def monomial_key(mono: Monomial) -> Tuple:
    return (sdeg(mono), mono.alpha, mono.u)


def validate_monomial(shape: Shape, mono: Monomial) -> None:
    if len(mono.alpha) != shape.n:
        raise ShapeMismatchError(f"monomial {mono} has {len(mono.alpha)} exponents, shape has n={shape.n}")
    for a, bound in zip(mono.alpha, shape.bounds):
        if not 0 <= a <= bound:
            raise ValueError(f"exponent {a} outside 0..{bound}")
    if list(mono.u) != sorted(set(mono.u)):
        raise ValueError(f"odd part {mono.u} must be strictly increasing")
    if any(r not in shape.odd_indices for r in mono.u):
        raise ValueError(f"odd part {mono.u} uses a non-odd variable")


@lru_cache(maxsize=1 << 18)
def _multiply_monomials(shape: Shape, a: Monomial, b: Monomial) -> Optional[Tuple[int, Monomial]]:
    if a.u and b.u and set(a.u) & set(b.u):
        return None
    field = shape.field
    coeff = 1
    alpha = []
    for x, y, bound in zip(a.alpha, b.alpha, shape.bounds):
        s = x + y
        if s > bound:
            return None
        c = field.binom(s, x)
        if c == 0:
            return None
        coeff = coeff * c % shape.p
        alpha.append(s)
    inversions = sum(1 for x in a.u for y in b.u if x > y)
    if inversions % 2:
        coeff = (-coeff) % shape.p
    return coeff, Monomial(tuple(alpha), tuple(sorted(a.u + b.u)))


@lru_cache(maxsize=1 << 18)
def _derive_monomial(shape: Shape, r: int, mono: Monomial) -> Optional[Tuple[int, Monomial]]:
    if r <= shape.n:
        if mono.alpha[r - 1] == 0:
            return None
        alpha = list(mono.alpha)
        alpha[r - 1] -= 1
        return 1, Monomial(tuple(alpha), mono.u)
    if r not in mono.u:
        return None
    j = mono.u.index(r)
    sign = 1 if j % 2 == 0 else -1
    return sign, Monomial(mono.alpha, mono.u[:j] + mono.u[j + 1:])


class Poly:
    """
    Element of O(n,m;t): a map from Monomial to nonzero residue.

    Instances are treated as immutable. Mixed-parity elements are valid
    data; operations that need a sign from the parity reject them.
    """

    __slots__ = ("shape", "_terms")

    def __init__(self, shape: Shape, terms: Optional[Dict[Monomial, int]] = None):
        self.shape = shape
        p = shape.p
        clean = {}
        if terms:
            for mono, c in terms.items():
                c %= p
                if c:
                    clean[mono] = c
        self._terms = clean

    @classmethod
    def zero(cls, shape: Shape) -> "Poly":
        return cls(shape)

    @classmethod
    def constant(cls, shape: Shape, c: int) -> "Poly":
        return cls(shape, {Monomial((0,) * shape.n, ()): c})

    @classmethod
    def one(cls, shape: Shape) -> "Poly":
        return cls.constant(shape, 1)

    @classmethod
    def monomial(cls, shape: Shape, alpha: Iterable[int], u: Iterable[int] = (), coeff: int = 1) -> "Poly":
        mono = Monomial(tuple(alpha), tuple(sorted(u)))
        validate_monomial(shape, mono)
        return cls(shape, {mono: coeff})

    @classmethod
    def variable(cls, shape: Shape, i: int) -> "Poly":
        """The generator x_i."""
        shape.check_direction(i)
        if i <= shape.n:
            alpha = [0] * shape.n
            alpha[i - 1] = 1
            return cls(shape, {Monomial(tuple(alpha), ()): 1})
        return cls(shape, {Monomial((0,) * shape.n, (i,)): 1})

    @classmethod
    def divided_power(cls, shape: Shape, i: int, k: int) -> "Poly":
        """x_i^(k) for an even variable i."""
        if not 1 <= i <= shape.n:
            raise ValueError(f"x{i} is not an even variable")
        alpha = [0] * shape.n
        alpha[i - 1] = k
        return cls.monomial(shape, alpha)

    @property
    def terms(self) -> Dict[Monomial, int]:
        return dict(self._terms)

    def items(self) -> List[Tuple[Monomial, int]]:
        """Terms in deterministic degree-lex order."""
        return sorted(self._terms.items(), key=lambda item: monomial_key(item[0]))

    def monomials(self) -> List[Monomial]:
        return [mono for mono, _ in self.items()]

    def coefficient(self, mono: Monomial) -> int:
        return self._terms.get(mono, 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def parity(self) -> Optional[int]:
        """Common parity of all terms, 0 for zero, None if mixed."""
        parities = {monomial_parity(mono) for mono in self._terms}
        if len(parities) > 1:
            return None
        return parities.pop() if parities else 0

    def _check(self, other: "Poly") -> None:
        if not isinstance(other, Poly):
            raise TypeError(f"expected Poly, got {type(other).__name__}")
        if other.shape != self.shape:
            raise ShapeMismatchError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        acc = dict(self._terms)
        for mono, c in other._terms.items():
            acc[mono] = acc.get(mono, 0) + c
        return Poly(self.shape, acc)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        return Poly(self.shape, {mono: -c for mono, c in self._terms.items()})

    def scale(self, c: int) -> "Poly":
        return Poly(self.shape, {mono: c * v for mono, v in self._terms.items()})

    def __mul__(self, other) -> "Poly":
        if isinstance(other, int):
            return self.scale(other)
        return multiply(self, other)

    def __rmul__(self, other) -> "Poly":
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.shape == other.shape and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.shape, frozenset(self._terms.items())))

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"


def multiply(f: Poly, g: Poly) -> Poly:
    """
    Product in O(n,m;t).

    Raises:
        ShapeMismatchError: If f and g live over different shapes
    """
    f._check(g)
    shape = f.shape
    p = shape.p
    acc: Dict[Monomial, int] = {}
    for ma, ca in f._terms.items():
        for mb, cb in g._terms.items():
            product = _multiply_monomials(shape, ma, mb)
            if product is None:
                continue
            c, mono = product
            acc[mono] = (acc.get(mono, 0) + ca * cb * c) % p
    return Poly(shape, acc)


def derive(r: int, f: Poly) -> Poly:
    """
    Apply the coordinate superderivation ∂_r.

    Raises:
        ValueError: If r is not a variable of the shape
    """
    shape = f.shape
    shape.check_direction(r)
    acc: Dict[Monomial, int] = {}
    for mono, c in f._terms.items():
        result = _derive_monomial(shape, r, mono)
        if result is None:
            continue
        sign, new = result
        acc[new] = acc.get(new, 0) + sign * c
    return Poly(shape, acc)


def parity(f: Poly) -> Optional[int]:
    return f.parity()


def basis(
    shape: Shape,
    predicate: Optional[Callable[[Monomial], bool]] = None,
    key: Callable[[Monomial], Tuple] = monomial_key,
) -> List[Monomial]:
    """All monomials of the shape accepted by predicate, sorted by key."""
    odd = list(shape.odd_indices)
    ranges = [range(bound + 1) for bound in shape.bounds]
    monomials = []
    for alpha in itertools.product(*ranges):
        for k in range(len(odd) + 1):
            for u in itertools.combinations(odd, k):
                mono = Monomial(tuple(alpha), u)
                if predicate is None or predicate(mono):
                    monomials.append(mono)
    return sorted(monomials, key=key)


def embed(f: Poly, shape: Shape) -> Poly:
    """
    Reinterpret f over a shape with the same variables and larger heights.

    Raises:
        ShapeMismatchError: If the variables or characteristic differ
        ValueError: If an exponent does not fit the target heights
    """
    if (shape.n, shape.m, shape.p) != (f.shape.n, f.shape.m, f.shape.p):
        raise ShapeMismatchError(f"cannot embed {f.shape} into {shape}")
    for mono in f._terms:
        validate_monomial(shape, mono)
    return Poly(shape, f._terms)


def format_monomial(mono: Monomial) -> str:
    factors = []
    for i, a in enumerate(mono.alpha, start=1):
        if a == 1:
            factors.append(f"x{i}")
        elif a > 1:
            factors.append(f"x{i}^({a})")
    factors.extend(f"x{r}" for r in mono.u)
    return "*".join(factors) if factors else "1"


def format_poly(f: Poly) -> str:
    """Print f as e.g. `2*x1^(2)*x3 + x4*x5`; coefficients are residues."""
    if f.is_zero():
        return "0"
    pieces = []
    for mono, c in f.items():
        text = format_monomial(mono)
        if text == "1":
            pieces.append(str(c))
        elif c == 1:
            pieces.append(text)
        else:
            pieces.append(f"{c}*{text}")
    return " + ".join(pieces)


_VARIABLE = re.compile(r"^x(\d+)(?:\^\((\d+)\))?$")
_INTEGER = re.compile(r"^\d+$")


def split_signed_terms(text: str) -> Iterator[Tuple[int, str]]:
    """Split text at top-level + and - signs into (sign, term) pairs."""
    sign = 1
    depth = 0
    current: List[str] = []
    saw_sign = False
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced parentheses in '{text}'")
        if ch in "+-" and depth == 0:
            term = "".join(current).strip()
            if term:
                yield sign, term
                sign = 1
            if ch == "-":
                sign = -sign
            current = []
            saw_sign = True
            continue
        current.append(ch)
    if depth != 0:
        raise ParseError(f"unbalanced parentheses in '{text}'")
    term = "".join(current).strip()
    if term:
        yield sign, term
    elif saw_sign:
        raise ParseError(f"dangling sign at the end of '{text}'")


def _parse_factor(shape: Shape, factor: str) -> Poly:
    if _INTEGER.match(factor):
        return Poly.constant(shape, int(factor))
    match = _VARIABLE.match(factor)
    if not match:
        raise ParseError(f"cannot parse factor '{factor}'")
    i = int(match.group(1))
    if not 1 <= i <= shape.num_vars:
        raise ParseError(f"x{i} is not a variable of this shape (variables x1..x{shape.num_vars})")
    k = int(match.group(2)) if match.group(2) is not None else 1
    if i > shape.n:
        if k != 1:
            raise ParseError(f"odd variable x{i} cannot carry a divided power")
        return Poly.variable(shape, i)
    if k > shape.bounds[i - 1]:
        raise ParseError(f"x{i}^({k}) exceeds the truncation bound {shape.bounds[i - 1]}")
    return Poly.divided_power(shape, i, k)


def _parse_term(shape: Shape, term: str) -> Poly:
    result = Poly.one(shape)
    for factor in term.split("*"):
        factor = factor.strip()
        if not factor:
            raise ParseError(f"empty factor in '{term}'")
        result = result * _parse_factor(shape, factor)
    return result


def parse_poly(shape: Shape, text: str) -> Poly:
    """
    Parse the textual syntax `x1^(3)*x4*x5 - 2*x2`.

    Even variables take divided powers in parentheses, odd variables are
    bare. Repeated factors are multiplied in the algebra, so `x1*x1`
    parses to `2*x1^(2)`.

    Raises:
        ParseError: On malformed input or variables outside the shape
    """
    text = text.strip()
    if not text:
        raise ParseError("empty expression")
    result = Poly.zero(shape)
    for sign, term in split_signed_terms(text):
        if term.startswith("(") and term.endswith(")"):
            piece = parse_poly(shape, term[1:-1])
        else:
            piece = _parse_term(shape, term)
        result = result + piece.scale(sign)
    return result
