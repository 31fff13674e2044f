"""
Exact arithmetic for the odd Contact Lie superalgebra KO(n,n+1) over F_p.

Truncated models, closed-form and expanded brackets, certified
ad-nilpotency, invariant subspaces and generated automorphisms.
"""

from .automorphisms import AutoMap, generate_automorphisms, make_exp_automorphism, rigidity_check
from .errors import (
    AutomorphismError,
    CapExceededError,
    KolabError,
    MixedParityError,
    NoSolutionError,
    ParseError,
    QuotientActionError,
    ShapeMismatchError,
)
from .invariants import InvariantCalculator, InvariantReport
from .ko import KOModel, bracket_ko, d_ko_expand, parity_ko
from .linalg import Subspace, lie_closure, normalizer, spin_submodule, strict_triangulation
from .nilpotency import NilPolicy, nilpotency_oracle
from .scalars import PrimeField, prime_field
from .superalg import Monomial, Poly, Shape, format_poly, parse_poly
from .witt import SuperDerivation, WittModel, bracket_w

__all__ = [
    'AutoMap',
    'AutomorphismError',
    'CapExceededError',
    'InvariantCalculator',
    'InvariantReport',
    'KOModel',
    'KolabError',
    'MixedParityError',
    'Monomial',
    'NilPolicy',
    'NoSolutionError',
    'ParseError',
    'Poly',
    'PrimeField',
    'QuotientActionError',
    'Shape',
    'ShapeMismatchError',
    'Subspace',
    'SuperDerivation',
    'WittModel',
    'bracket_ko',
    'bracket_w',
    'd_ko_expand',
    'format_poly',
    'generate_automorphisms',
    'lie_closure',
    'make_exp_automorphism',
    'nilpotency_oracle',
    'normalizer',
    'parity_ko',
    'parse_poly',
    'prime_field',
    'rigidity_check',
    'spin_submodule',
    'strict_triangulation',
]
