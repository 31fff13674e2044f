"""
Structure suite: dimensions, the operator identity, the Lie superalgebra
axioms and the closed-form bracket identities.
"""

import itertools
from typing import Callable, Dict, List

import numpy as np

from kolab.invariants import InvariantReport
from kolab.ko import bracket_ko, bracket_simplified, d_ko_expand, parity_ko, pdeg_ko
from kolab.linalg import rank_mod
from kolab.superalg import Poly, format_poly, sdeg
from kolab.witt import bracket_w, pdeg_w

from .base_suite import SuiteContext, VerificationSuite, tally_report

EXHAUSTIVE_PAIRS = 40
SAMPLED_PAIRS = 500
EXHAUSTIVE_TRIPLES = 12
SAMPLED_TRIPLES = 300


class StructureSuite(VerificationSuite):
    """Checks that the truncated model is a Z-graded Lie superalgebra embedded in W."""

    def __init__(self, context: SuiteContext):
        super().__init__(context)
        self.suite_name = "s1"

    def checks(self) -> Dict[str, Callable[[], List[InvariantReport]]]:
        return {
            "dims": self.check_dims,
            "operator-identity": self.check_operator_identity,
            "lie-axioms": self.check_lie_axioms,
            "injectivity": self.check_injectivity,
            "parity-degree": self.check_parity_and_degree,
            "grading": self.check_grading,
            "simplified-bracket": self.check_simplified_bracket,
            "proof-identities": self.check_proof_identities,
        }

    def _pairs(self) -> List[tuple]:
        d = self.context.model.dim
        if d <= EXHAUSTIVE_PAIRS:
            return list(itertools.product(range(d), repeat=2))
        rng = np.random.default_rng(self.context.seed)
        return [tuple(int(k) for k in rng.integers(0, d, size=2)) for _ in range(SAMPLED_PAIRS)]

    def check_dims(self) -> List[InvariantReport]:
        model = self.context.model
        n = model.shape.n
        dims = model.graded_dims()
        expected = {-2: 1, -1: 2 * n, 0: 2 * n * n + 1}
        failures = [f"dim KO_[{i}] = {dims.get(i)}, expected {v}" for i, v in expected.items() if dims.get(i) != v]
        if sum(dims.values()) != model.shape.dim:
            failures.append(f"graded dims sum to {sum(dims.values())}, expected {model.shape.dim}")
        return [
            tally_report(
                "dims",
                self.context.mode,
                len(expected) + 1,
                failures,
                claim="KO_[-2] = F·1, dim KO_[-1] = 2n, dim KO_[0] = 2n²+1",
                graded_dims={str(i): v for i, v in dims.items()},
                total_dim=model.dim,
            )
        ]

    def check_operator_identity(self) -> List[InvariantReport]:
        model = self.context.model
        failures = []
        pairs = self._pairs()
        for i, j in pairs:
            a, b = model.potential(i), model.potential(j)
            if d_ko_expand(bracket_ko(a, b)) != bracket_w(d_ko_expand(a), d_ko_expand(b)):
                failures.append(f"[{format_poly(a)}, {format_poly(b)}]")
        return [
            tally_report(
                "operator-identity",
                self.context.mode,
                len(pairs),
                failures,
                claim="D_KO([a, b]) = [D_KO(a), D_KO(b)] in W",
                exhaustive=len(pairs) == model.dim**2,
            )
        ]

    def check_lie_axioms(self) -> List[InvariantReport]:
        model = self.context.model
        p = model.p
        par = model.parities
        units = np.eye(model.dim, dtype=np.int64)
        table = model.bracket_batch(units, units)

        anti = []
        for i, j in itertools.product(range(model.dim), repeat=2):
            sign = -1 if par[i] * par[j] else 1
            if np.any((table[i, j] + sign * table[j, i]) % p):
                anti.append(f"[{format_poly(model.potential(i))}, {format_poly(model.potential(j))}]")

        if model.dim <= EXHAUSTIVE_TRIPLES:
            triples = list(itertools.product(range(model.dim), repeat=3))
        else:
            rng = np.random.default_rng(self.context.seed)
            triples = [tuple(int(k) for k in rng.integers(0, model.dim, size=3)) for _ in range(SAMPLED_TRIPLES)]
        jacobi = []
        for a, b, c in triples:
            left = model.bracket_vectors(units[a], table[b, c])
            first = model.bracket_vectors(table[a, b], units[c])
            second = model.bracket_vectors(units[b], table[a, c])
            sign = -1 if par[a] * par[b] else 1
            if np.any((left - first - sign * second) % p):
                jacobi.append(f"({a}, {b}, {c})")
        return [
            tally_report(
                "anticommutativity",
                self.context.mode,
                model.dim**2,
                anti,
                claim="[x, y] = −(−1)^{|x||y|}[y, x]",
            ),
            tally_report(
                "jacobi",
                self.context.mode,
                len(triples),
                jacobi,
                claim="[x, [y, z]] = [[x, y], z] + (−1)^{|x||y|}[y, [x, z]]",
                exhaustive=len(triples) == model.dim**3,
            ),
        ]

    def check_injectivity(self) -> List[InvariantReport]:
        model = self.context.model
        witt = self.context.witt_model
        rows = np.array([witt.coords(d_ko_expand(a)) for a in model.potentials()], dtype=np.int64)
        rank = rank_mod(rows, model.p)
        return [
            tally_report(
                "injectivity",
                self.context.mode,
                model.dim,
                [] if rank == model.dim else [f"expansions have rank {rank}"],
                claim="a ↦ D_KO(a) is injective",
            )
        ]

    def check_parity_and_degree(self) -> List[InvariantReport]:
        model = self.context.model
        failures = []
        for k, a in enumerate(model.potentials()):
            D = d_ko_expand(a)
            if D.parity() != parity_ko(a) or D.parity() != int(model.parities[k]):
                failures.append(f"parity of D_KO({format_poly(a)})")
            if pdeg_w(D) != pdeg_ko(model.basis[k], model.shape):
                failures.append(f"degree of D_KO({format_poly(a)})")
        return [
            tally_report(
                "parity-degree",
                self.context.mode,
                2 * model.dim,
                failures,
                claim="|D_KO(a)| = p(a) + 1 and D_KO shifts the principal degree by −2",
            )
        ]

    def check_grading(self) -> List[InvariantReport]:
        model = self.context.model
        table = model.structure_constants
        i, j, k = np.nonzero(table)
        bad = np.nonzero(model.degrees[k] != model.degrees[i] + model.degrees[j])[0]
        failures = [
            f"[{format_poly(model.potential(int(i[t])))}, {format_poly(model.potential(int(j[t])))}]" for t in bad[:20]
        ]
        return [
            tally_report(
                "grading",
                self.context.mode,
                len(i),
                failures,
                claim="[KO_[i], KO_[j]] ⊆ KO_[i+j]",
            )
        ]

    def check_simplified_bracket(self) -> List[InvariantReport]:
        model = self.context.model
        z = model.shape.distinguished
        quadratic = [model.potential(k) for k, mono in enumerate(model.basis) if sdeg(mono) == 2 and z not in mono.u]
        failures = []
        for a in quadratic:
            for b in model.potentials():
                if bracket_simplified(a, b) != bracket_ko(a, b):
                    failures.append(f"[{format_poly(a)}, {format_poly(b)}]")
        return [
            tally_report(
                "simplified-bracket",
                self.context.mode,
                len(quadratic) * model.dim,
                failures,
                claim="[D_KO(a), D_KO(b)] = T_H(a)(b) for a ∈ O(n,n) of standard degree 2",
            )
        ]

    def check_proof_identities(self) -> List[InvariantReport]:
        model = self.context.model
        shape = model.shape
        n, p = shape.n, shape.p
        z = shape.distinguished
        calc = self.context.calculator
        one = Poly.one(shape)
        failures = []
        total = 0

        for i in range(1, 2 * n + 1):
            total += 1
            a = calc.product(i, z)
            if bracket_ko(a, one) != calc.variable(i).scale(2):
                failures.append(f"[{format_poly(a)}, 1] ≠ 2*x{i}")
        for c in range(1, p):
            total += 1
            if bracket_ko(calc.variable(z).scale(c), one) != one.scale(2 * c):
                failures.append(f"[{c}*x{z}, 1] ≠ {2 * c}")
        for i in range(1, 2 * n + 1):
            for j in range(1, 2 * n + 1):
                if i == j or j == calc.primed(i):
                    continue
                total += 1
                left = bracket_ko(calc.product(i, j), calc.product(calc.primed(i), calc.primed(j)))
                right = -(calc.product(i, calc.primed(i)) - calc.product(j, calc.primed(j)))
                # x_i x_j = x_j x_i for odd i, even j, while the right side is antisymmetric in (i, j)
                if i > n and j <= n:
                    right = -right
                if left != right:
                    failures.append(f"[x{i}*x{j}, x{calc.primed(i)}*x{calc.primed(j)}] = {format_poly(left)}")
        rng = np.random.default_rng(self.context.seed)
        for _ in range(4):
            coeffs = [int(c) for c in rng.integers(0, p, size=n)]
            h = Poly.zero(shape)
            for i, c in enumerate(coeffs, 1):
                h = h + calc.product(i, calc.primed(i)).scale(c)
            for j in range(1, n + 1):
                total += 1
                target = calc.product(j, z)
                if bracket_ko(h, target) != target.scale(-coeffs[j - 1]):
                    failures.append(f"[{format_poly(h)}, x{j}*x{z}]")
        return [
            tally_report(
                "proof-identities",
                self.context.mode,
                total,
                failures,
                claim=(
                    "closed-form brackets of degree 0 and degree -2 elements; "
                    "[x_i x_j, x_i′ x_j′] = −(x_i x_i′ − x_j x_j′) for i ≠ j, j ≠ i′, "
                    "with the sign reversed when x_i is odd and x_j even"
                ),
            )
        ]
