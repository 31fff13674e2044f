"""
Certified ad-nilpotency verdicts for elements of KO(n,n+1).

A finite truncation can make negative-degree elements look nilpotent, so
verdicts prefer certificates that survive every height: the structural
rule for positive filtration, eigen-witnesses, and index growth across
heights backed by an explicit nonvanishing sequence.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from .errors import MixedParityError
from .ko import KOModel, ad_operator, bracket_ko, pdeg_ko
from .linalg import matrix_nilpotency_index
from .superalg import Monomial, Poly, Shape, basis, embed, format_poly

logger = logging.getLogger(__name__)

Heights = Tuple[int, ...]


@dataclass(frozen=True)
class NilPolicy:
    """Heights to sweep and the largest index searched at each one."""

    heights: Tuple[Heights, ...]
    max_index: int
    max_dim: int = 5000

    @classmethod
    def default(cls, shape: Shape, max_dim: int = 5000) -> "NilPolicy":
        return cls(
            heights=(shape.t, tuple(h + 1 for h in shape.t)),
            max_index=4 * shape.p,
            max_dim=max_dim,
        )


@dataclass
class AdMatrix:
    element: Poly
    matrix: np.ndarray


@dataclass
class GrowthSequence:
    """(ad y)^k applied to D_KO(x_j^(k+1)) for each tested k, at one height."""

    direction: int
    heights: Heights
    ks: List[int]
    leading: List[int]
    nonzero: List[bool]


@dataclass
class NilpotentStable:
    index: int
    rule: str
    heights: List[Heights] = field(default_factory=list)
    indices: List[int] = field(default_factory=list)
    kind: str = "nilpotent-stable"


@dataclass
class NotNilpotent:
    rule: str
    witness: Optional[Poly] = None
    eigenvalue: Optional[int] = None
    heights: List[Heights] = field(default_factory=list)
    indices: List[Optional[int]] = field(default_factory=list)
    sequence: Optional[GrowthSequence] = None
    kind: str = "not-nilpotent"


@dataclass
class Inconclusive:
    diagnostic: str
    heights: List[Heights] = field(default_factory=list)
    indices: List[Optional[int]] = field(default_factory=list)
    kind: str = "inconclusive"


NilVerdict = Union[NilpotentStable, NotNilpotent, Inconclusive]


def is_nilpotent(verdict: NilVerdict) -> bool:
    return isinstance(verdict, NilpotentStable)


def ad_matrix(model: KOModel, y: Poly) -> AdMatrix:
    return AdMatrix(element=y, matrix=model.ad_matrix(y))


def nilpotency_index(y: Poly, shape: Shape, max_index: Optional[int] = None) -> Optional[int]:
    """
    Smallest k with (ad y)^k = 0 on the potential basis of shape.

    Iterates ad y on every basis potential, keeping only the nonzero
    images, so nilpotent elements of small index stay cheap.

    Returns:
        The index, or None when it exceeds max_index
    """
    y = embed(y, shape) if y.shape != shape else y
    if y.is_zero():
        return 1
    op = ad_operator(y)
    vectors = [Poly(shape, {mono: 1}) for mono in basis(shape)]
    limit = max_index if max_index is not None else len(vectors) + 1
    for k in range(1, limit + 1):
        vectors = [w for w in (op(v) for v in vectors) if w]
        if not vectors:
            return k
    return None


def _torus_partners(model: KOModel, y: Poly) -> List[Poly]:
    """x_j x_{2n+1} for each j with x_j x_{j′} in y, when y only has such terms."""
    n = model.shape.n
    z = model.shape.distinguished
    indices = []
    for mono in y.monomials():
        if sum(mono.alpha) != 1 or len(mono.u) != 1:
            return []
        j = mono.alpha.index(1) + 1
        if mono.u[0] != j + n:
            return []
        indices.append(j)
    partners = []
    for j in sorted(indices):
        alpha = tuple(1 if i == j - 1 else 0 for i in range(n))
        partners.append(model.potential(model.index[Monomial(alpha, (z,))]))
    return partners


def find_eigen_witness(model: KOModel, y: Poly) -> Optional[Tuple[Poly, int]]:
    """
    A potential z with [y, z] = λ z, λ ≠ 0.

    For y = Σ a_i x_i x_i′ the partners x_j x_{2n+1} (λ = −a_j) are tried
    first; otherwise the first basis potential that works.
    """
    op = ad_operator(y)
    for z in _torus_partners(model, y) + model.potentials():
        image = op(z)
        if len(image) != 1:
            continue
        ((mono, c),) = image.terms.items()
        if mono in z.terms:
            return z, c
    return None


def growth_sequence(y: Poly, shape: Shape) -> Optional[GrowthSequence]:
    """
    Evaluate (ad y)^k D_KO(x_j^(k+1)) for k = 1..bound_j - 1.

    j is the first index with a nonzero coefficient of x_{j′} in the
    degree -1 part of y; returns None when y has no such component.
    """
    n = shape.n
    y = embed(y, shape) if y.shape != shape else y
    direction = None
    for mono, c in y.items():
        if pdeg_ko(mono, shape) == -1 and len(mono.u) == 1 and n < mono.u[0] <= 2 * n:
            direction = mono.u[0] - n
            break
    if direction is None:
        return None
    op = ad_operator(y)
    target = Monomial(tuple(1 if i == direction - 1 else 0 for i in range(n)), ())
    ks, leading, nonzero = [], [], []
    for k in range(1, shape.bounds[direction - 1]):
        v = Poly.divided_power(shape, direction, k + 1)
        for _ in range(k):
            v = op(v)
        ks.append(k)
        leading.append(v.coefficient(target))
        nonzero.append(bool(v))
    return GrowthSequence(direction=direction, heights=shape.t, ks=ks, leading=leading, nonzero=nonzero)


def raw_verdict(model: KOModel, y: Poly) -> NilVerdict:
    """Truncated-matrix nilpotency at the model's own height."""
    if y.is_zero():
        return NilpotentStable(index=1, rule="zero", heights=[model.shape.t], indices=[1])
    index = matrix_nilpotency_index(model.ad_matrix(y), model.p)
    if index is None:
        return NotNilpotent(rule="truncated-matrix", heights=[model.shape.t], indices=[None])
    return NilpotentStable(index=index, rule="truncated-matrix", heights=[model.shape.t], indices=[index])


def nilpotency_oracle(model: KOModel, y: Poly, policy: Optional[NilPolicy] = None) -> NilVerdict:
    """
    Decide whether ad y is nilpotent on the untruncated algebra.

    Order of rules: zero element, structural rule for positive
    filtration, eigen-witness among basis potentials, then the index
    sweep over the policy heights.

    Raises:
        ValueError: If the policy lists no heights
        MixedParityError: If y is not homogeneous
    """
    policy = policy or NilPolicy.default(model.shape)
    if not policy.heights:
        raise ValueError("nilpotency policy has no heights")
    if y.parity() is None:
        raise MixedParityError(f"{format_poly(y)} is not Z_2-homogeneous")
    if y.is_zero():
        return NilpotentStable(index=1, rule="zero", heights=[model.shape.t], indices=[1])

    components = model.degree_components(y)
    if min(components) >= 1:
        index = matrix_nilpotency_index(model.ad_matrix(y), model.p)
        return NilpotentStable(index=index, rule="structural", heights=[model.shape.t], indices=[index])

    witness = find_eigen_witness(model, y)
    if witness is not None:
        z, eigenvalue = witness
        return NotNilpotent(rule="eigen-witness", witness=z, eigenvalue=eigenvalue)

    tested: List[Heights] = []
    indices: List[Optional[int]] = []
    for heights in policy.heights:
        shape = model.shape.with_heights(heights)
        if shape.dim > policy.max_dim:
            logger.warning("Skipping heights %s: dimension %s exceeds cap %s", heights, shape.dim, policy.max_dim)
            continue
        tested.append(shape.t)
        indices.append(nilpotency_index(y, shape, policy.max_index))
    if not tested:
        return Inconclusive("no height of the policy fits the dimension cap")

    if len(tested) >= 2 and indices[0] is not None and all(k == indices[0] for k in indices):
        return NilpotentStable(index=indices[0], rule="stable-index", heights=tested, indices=indices)

    ranks = [float("inf") if k is None else k for k in indices]
    growing = (
        len(tested) >= 2
        and indices[0] is not None
        and all(a <= b for a, b in zip(ranks, ranks[1:]))
        and ranks[-1] > ranks[0]
    )
    if growing:
        sequence = growth_sequence(y, model.shape.with_heights(tested[-1]))
        return NotNilpotent(rule="growing-index", heights=tested, indices=indices, sequence=sequence)
    return Inconclusive(
        f"index pattern {indices} over heights {tested} is neither stable nor growing",
        heights=tested,
        indices=indices,
    )


def verify_verdict(model: KOModel, y: Poly, verdict: NilVerdict) -> bool:
    """Re-check a verdict from its own payload."""
    if isinstance(verdict, NilpotentStable):
        heights = verdict.heights[-1] if verdict.heights else model.shape.t
        shape = model.shape.with_heights(heights)
        if verdict.index == 1:
            return y.is_zero() or nilpotency_index(y, shape, 1) == 1
        return nilpotency_index(y, shape, verdict.index) == verdict.index
    if isinstance(verdict, NotNilpotent):
        if verdict.rule == "eigen-witness":
            if verdict.witness is None or not verdict.eigenvalue:
                return False
            return bracket_ko(y, verdict.witness) == verdict.witness.scale(verdict.eigenvalue)
        if verdict.rule == "growing-index":
            if verdict.sequence is not None:
                again = growth_sequence(y, model.shape.with_heights(verdict.sequence.heights))
                return again is not None and bool(again.ks) and all(again.nonzero)
            shapes = [model.shape.with_heights(h) for h in verdict.heights]
            limit = max((k or 0) for k in verdict.indices) or None
            return [nilpotency_index(y, s, limit) for s in shapes] == list(verdict.indices)
        if verdict.rule == "truncated-matrix":
            return raw_verdict(model, y).kind == verdict.kind
        return False
    return True


def verdict_to_dict(verdict: NilVerdict) -> Dict[str, Any]:
    """JSON-ready payload with enough data to re-verify the verdict."""
    payload: Dict[str, Any] = {"kind": verdict.kind, "heights": [list(h) for h in verdict.heights]}
    payload["indices"] = list(verdict.indices)
    if isinstance(verdict, NilpotentStable):
        payload.update(index=verdict.index, rule=verdict.rule)
    elif isinstance(verdict, NotNilpotent):
        payload["rule"] = verdict.rule
        if verdict.witness is not None:
            payload["witness"] = format_poly(verdict.witness)
            payload["eigenvalue"] = verdict.eigenvalue
        if verdict.sequence is not None:
            seq = verdict.sequence
            payload["sequence"] = {
                "direction": seq.direction,
                "heights": list(seq.heights),
                "ks": seq.ks,
                "leading": seq.leading,
                "nonzero": seq.nonzero,
            }
    else:
        payload["diagnostic"] = verdict.diagnostic
    return payload
