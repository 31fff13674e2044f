"""
Concrete automorphisms of the truncated KO model.

Generated maps are exponentials exp(ad z) of even elements z of positive
filtration degree and compositions of those. The invariance claims
checked with them quantify over all automorphisms, so every check here
is a necessary condition only.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import AutomorphismError
from .invariants import InvariantReport, count_report
from .ko import KOModel, Potential, classification_from_table, parity_ko
from .linalg import Subspace, bracket_from_table, inv_mod_mat, matmul_mod, matrix_nilpotency_index, mod_p, rank_mod
from .scalars import prime_field
from .superalg import Poly, format_poly

logger = logging.getLogger(__name__)


@dataclass
class AutoMap:
    """Automorphism as a matrix on the model basis; column j is the image of e_j."""

    matrix: np.ndarray
    provenance: str
    p: int

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, v) -> np.ndarray:
        return matmul_mod(self.matrix, np.asarray(v, dtype=np.int64)[:, None], self.p)[:, 0]

    def image(self, subspace: Subspace) -> Subspace:
        return subspace.image(self.matrix)

    def compose(self, other: "AutoMap") -> "AutoMap":
        """self ∘ other."""
        if other.dim != self.dim or other.p != self.p:
            raise ValueError(f"ambient mismatch: GF({self.p})^{self.dim} vs GF({other.p})^{other.dim}")
        return AutoMap(matmul_mod(self.matrix, other.matrix, self.p), f"{self.provenance} ∘ {other.provenance}", self.p)

    def inverse(self) -> "AutoMap":
        return AutoMap(inv_mod_mat(self.matrix, self.p), f"({self.provenance})^-1", self.p)

    def is_identity(self) -> bool:
        return np.array_equal(self.matrix, np.eye(self.dim, dtype=np.int64))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AutoMap):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.matrix, other.matrix)


def identity_map(model: KOModel) -> AutoMap:
    return AutoMap(np.eye(model.dim, dtype=np.int64), "id", model.p)


def preserves_brackets(model: KOModel, matrix: np.ndarray) -> bool:
    """
    φ([e_i, e_j]) = [φ e_i, φ e_j] for every generator e_i and every e_j.

    For an even linear φ this extends to all pairs through the Jacobi
    identity, since the generators span the model under brackets.
    """
    p = model.p
    rows = model.generator_indices
    phi = mod_p(matrix, p)
    left = np.tensordot(model.structure_constants[rows], phi.astype(np.float64), axes=(2, 1))
    left = mod_p(np.rint(left).astype(np.int64), p)
    right = bracket_from_table(model.structure_constants, phi[:, rows].T, phi.T, p)
    return bool(np.array_equal(left, right))


def preserves_parity(model: KOModel, matrix: np.ndarray) -> bool:
    mixed = model.parities[:, None] != model.parities[None, :]
    return not np.asarray(matrix)[mixed].any()


def validate_automorphism(model: KOModel, phi: AutoMap) -> None:
    """
    Raises:
        AutomorphismError: If phi is singular, mixes parities or breaks brackets
    """
    if rank_mod(phi.matrix, model.p) != model.dim:
        raise AutomorphismError(f"{phi.provenance} is not invertible")
    if not preserves_parity(model, phi.matrix):
        raise AutomorphismError(f"{phi.provenance} does not preserve parity")
    if not preserves_brackets(model, phi.matrix):
        raise AutomorphismError(f"{phi.provenance} does not preserve brackets")


def exp_matrix(A: np.ndarray, index: int, p: int) -> np.ndarray:
    """Σ_{j<index} A^j / j! over GF(p)."""
    field = prime_field(p)
    total = np.eye(A.shape[0], dtype=np.int64)
    power = total
    for j in range(1, index):
        power = matmul_mod(power, A, p)
        total = mod_p(total + field.inv_factorial(j) * power, p)
    return total


def make_exp_automorphism(model: KOModel, z: Potential, sign: int = 1) -> AutoMap:
    """
    exp(sign · ad z) for an even z with ad-nilpotency index below p.

    Raises:
        AutomorphismError: If z is odd, its index is p or more, or the
            resulting map fails the automorphism checks
    """
    if z.is_zero():
        return identity_map(model)
    if parity_ko(z) != 0:
        raise AutomorphismError(f"exp(ad z) needs an even element, got {format_poly(z)}")
    A = mod_p(sign * model.ad_matrix(z), model.p)
    index = matrix_nilpotency_index(A, model.p, model.p - 1)
    if index is None:
        raise AutomorphismError(f"ad {format_poly(z)} has nilpotency index ≥ p = {model.p}; refusing exp")
    prefix = "" if sign == 1 else "-"
    phi = AutoMap(exp_matrix(A, index, model.p), f"exp({prefix}ad {format_poly(z)})", model.p)
    validate_automorphism(model, phi)
    return phi


def compose(model: KOModel, phi: AutoMap, psi: AutoMap) -> AutoMap:
    """φ ∘ ψ, re-validated."""
    result = phi.compose(psi)
    validate_automorphism(model, result)
    return result


def _exp_candidate(model: KOModel, rng: np.random.Generator, tries: int = 20) -> Optional[Potential]:
    even = (model.parities == 0)
    for _ in range(tries):
        d = int(rng.integers(1, model.max_degree + 1))
        support = np.nonzero(even & (model.degrees >= d))[0]
        if support.size == 0:
            continue
        v = np.zeros(model.dim, dtype=np.int64)
        v[support] = rng.integers(0, model.p, size=support.size)
        if not v.any():
            continue
        z = model.from_coords(v)
        index = matrix_nilpotency_index(model.ad_matrix(z), model.p, model.p - 1)
        if index is not None and 2 * (index - 1) < model.p:
            return z
    return None


def generate_automorphisms(model: KOModel, count: int, seed: int = 0) -> List[AutoMap]:
    """
    count seeded automorphisms, each a product of one or two exponentials.

    Elements whose index k has 2(k − 1) ≥ p are skipped; when sampling
    keeps failing the top-degree even basis elements are used instead.
    """
    rng = np.random.default_rng(seed)
    top = [model.potential(int(k)) for k in np.nonzero((model.parities == 0) & (model.degrees == model.max_degree))[0]]
    if not top:
        top = [model.potential(int(k)) for k in np.nonzero((model.parities == 0) & (model.degrees >= 1))[0][-1:]]
    maps = []
    for m in range(count):
        factors = []
        for _ in range(int(rng.integers(1, 3))):
            z = _exp_candidate(model, rng)
            if z is None:
                z = top[int(rng.integers(0, len(top)))]
            factors.append(make_exp_automorphism(model, z))
        phi = factors[0]
        for factor in factors[1:]:
            phi = compose(model, phi, factor)
        maps.append(phi)
        logger.debug("Automorphism %s of %s: %s", m + 1, count, phi.provenance)
    return maps


def check_filtration_invariance(model: KOModel, phi: AutoMap, mode: str = "certified") -> InvariantReport:
    """φ(KO_i) = KO_i for every i in range."""
    levels = list(range(model.min_degree, model.max_degree + 1))
    failures = []
    for i in levels:
        space = model.filtration(i)
        if phi.image(space) != space:
            failures.append(f"KO_{i}")
    report = count_report(
        "filtration-invariance",
        mode,
        len(levels) - len(failures),
        len(levels),
        claim="φ(KO_i) = KO_i for all i (necessary condition over generated automorphisms)",
        provenance=phi.provenance,
    )
    report.witnesses = failures
    return report


def check_subspace_invariance(phi: AutoMap, subspace: Subspace, name: str, mode: str = "certified") -> InvariantReport:
    image = phi.image(subspace)
    return InvariantReport(
        name=f"{name}-invariance",
        mode=mode,
        computed=image,
        expected=subspace,
        verdict="match" if image == subspace else "mismatch",
        claim=f"φ({name}) = {name}",
        details={"provenance": phi.provenance},
    )


@dataclass
class RigidityResult:
    equal: bool
    agree_on_minus_one: bool

    @property
    def violates(self) -> bool:
        """Agreement on KO_[-1] without global equality."""
        return self.agree_on_minus_one and not self.equal


def rigidity_check(model: KOModel, phi: AutoMap, psi: AutoMap) -> RigidityResult:
    minus_one = np.nonzero(model.degrees == -1)[0]
    agree = bool(np.array_equal(phi.matrix[:, minus_one], psi.matrix[:, minus_one]))
    return RigidityResult(equal=phi == psi, agree_on_minus_one=agree)


def one_from_minus_one(model: KOModel) -> int:
    """The scalar c with [x_1, x_{1′}] = c · 1."""
    n = model.shape.n
    value = model.bracket(Poly.variable(model.shape, 1), Poly.variable(model.shape, 1 + n))
    return value.coefficient(Poly.one(model.shape).monomials()[0])


def rigidity_report(model: KOModel, maps: Sequence[AutoMap], mode: str = "certified") -> InvariantReport:
    """
    Over every pair of maps, agreement on KO_[-1] must force equality.

    Also checks that [x_1, x_{1′}] is a nonzero multiple of 1, so the
    image of 1 is fixed by the images of degree -1 elements.
    """
    family = [identity_map(model)] + list(maps)
    pairs = 0
    violations: List[str] = []
    for i in range(len(family)):
        for j in range(i + 1, len(family)):
            pairs += 1
            result = rigidity_check(model, family[i], family[j])
            if result.violates:
                violations.append(f"{family[i].provenance} | {family[j].provenance}")
    scalar = one_from_minus_one(model)
    details: Dict[str, object] = {"pairs": pairs, "one_scalar": scalar}
    if scalar:
        inv = model.shape.field.inv(scalar)
        x1 = model.coords(Poly.variable(model.shape, 1))
        x1p = model.coords(Poly.variable(model.shape, 1 + model.shape.n))
        one = model.coords(Poly.one(model.shape))
        for phi in maps:
            rebuilt = mod_p(inv * model.bracket_vectors(phi.apply(x1), phi.apply(x1p)), model.p)
            if not np.array_equal(rebuilt, phi.apply(one)):
                violations.append(f"{phi.provenance}: image of 1 not recovered from degree -1")
    else:
        violations.append("[x1, x1'] has no component on 1")
    report = count_report(
        "rigidity",
        mode,
        len(violations),
        0,
        claim="automorphisms agreeing on KO_[-1] coincide (necessary condition over generated automorphisms)",
        **details,
    )
    report.witnesses = violations
    return report


def classification_under(model: KOModel, phi: AutoMap, mode: str = "certified") -> InvariantReport:
    """dim KO − dim φ(KO_0) still equals 2n+1."""
    value = model.dim - phi.image(model.filtration(0)).dim
    return count_report(
        "classification-invariance",
        mode,
        value,
        model.classification_invariant(),
        claim="classification invariant is preserved by automorphisms",
        provenance=phi.provenance,
    )


def permuted_classification(model: KOModel, seed: int = 0) -> int:
    """
    Classification invariant recomputed from the structure constants
    rebuilt in a seeded random basis order.
    """
    rng = np.random.default_rng(seed)
    perm = rng.permutation(model.dim)
    table = model.structure_constants[np.ix_(perm, perm, perm)]
    return classification_from_table(table, model.degrees[perm])
