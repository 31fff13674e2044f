"""
Prime field arithmetic and binomial coefficients modulo p.
"""

import math
from functools import lru_cache
from typing import List


def is_prime(value: int) -> bool:
    """Trial division; the primes used here are tiny."""
    if value < 2:
        return False
    return all(value % d for d in range(2, math.isqrt(value) + 1))


class PrimeField:
    """
    Exact arithmetic in F_p for an odd prime p.

    Residues are plain Python integers kept in 0..p-1. Binomial
    coefficients are computed digit by digit (Lucas) from a p x p table.
    """

    def __init__(self, p: int):
        """
        Initialize the field.

        Args:
            p: Characteristic, a prime greater than 2

        Raises:
            ValueError: If p is not a prime greater than 2
        """
        if isinstance(p, bool) or not isinstance(p, int):
            raise ValueError(f"p must be an integer, got {p!r}")
        if p <= 2 or not is_prime(p):
            raise ValueError(f"p must be a prime greater than 2, got {p}")
        self.p = p
        self._digit_binomials = self._build_digit_table(p)

    @staticmethod
    def _build_digit_table(p: int) -> List[List[int]]:
        return [[math.comb(a, b) % p for b in range(p)] for a in range(p)]

    def reduce(self, a: int) -> int:
        return a % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def inv(self, a: int) -> int:
        """
        Multiplicative inverse.

        Raises:
            ZeroDivisionError: If a is 0 modulo p
        """
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse modulo {self.p}")
        return pow(a, self.p - 2, self.p)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def binom(self, a: int, b: int) -> int:
        """
        C(a, b) mod p by Lucas' theorem; 0 when b > a.

        Raises:
            ValueError: If a or b is negative
        """
        if a < 0 or b < 0:
            raise ValueError(f"binomial arguments must be non-negative, got ({a}, {b})")
        if b > a:
            return 0
        p = self.p
        result = 1
        while b:
            a_digit, b_digit = a % p, b % p
            if b_digit > a_digit:
                return 0
            result = result * self._digit_binomials[a_digit][b_digit] % p
            a //= p
            b //= p
        return result

    def factorial(self, k: int) -> int:
        return math.factorial(k) % self.p

    def inv_factorial(self, k: int) -> int:
        """1/k! mod p; defined only for k < p."""
        return self.inv(self.factorial(k))

    def signed(self, a: int) -> int:
        """Representative of a in (-p/2, p/2]."""
        a %= self.p
        return a - self.p if a > self.p // 2 else a

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"


@lru_cache(maxsize=None)
def prime_field(p: int) -> PrimeField:
    """Shared field instance for p."""
    return PrimeField(p)


def fp_add(a: int, b: int, p: int) -> int:
    return prime_field(p).add(a, b)


def fp_inv(a: int, p: int) -> int:
    return prime_field(p).inv(a)


def binom_mod_p(a: int, b: int, p: int) -> int:
    return prime_field(p).binom(a, b)
