import pytest

from kolab.scalars import PrimeField, binom_mod_p, fp_add, fp_inv, is_prime, prime_field


class TestPrimeField:
    def test_rejects_non_primes_and_two(self):
        for bad in (2, 4, 9, 1, 0, -3):
            with pytest.raises(ValueError):
                PrimeField(bad)

    def test_rejects_non_integers(self):
        with pytest.raises(ValueError):
            PrimeField(3.0)
        with pytest.raises(ValueError):
            PrimeField(True)

    def test_arithmetic_wraps(self):
        F = PrimeField(5)
        assert F.add(3, 4) == 2
        assert F.sub(1, 3) == 3
        assert F.neg(2) == 3
        assert F.mul(3, 4) == 2
        assert F.reduce(-1) == 4

    def test_inverse(self):
        F = PrimeField(5)
        assert F.inv(2) == 3
        assert all(F.mul(a, F.inv(a)) == 1 for a in range(1, 5))
        assert F.div(1, 2) == 3

    def test_inverse_of_zero(self):
        with pytest.raises(ZeroDivisionError):
            PrimeField(3).inv(0)
        with pytest.raises(ZeroDivisionError):
            PrimeField(3).inv(6)

    def test_signed_representative(self):
        F = PrimeField(5)
        assert F.signed(4) == -1
        assert F.signed(2) == 2


class TestBinomial:
    def test_lucas(self):
        F = PrimeField(3)
        assert F.binom(4, 2) == 0
        assert F.binom(4, 1) == 1
        assert F.binom(3, 1) == 0
        assert F.binom(2, 1) == 2

    def test_out_of_range(self):
        F = PrimeField(3)
        assert F.binom(2, 5) == 0
        with pytest.raises(ValueError):
            F.binom(-1, 0)

    def test_factorials(self):
        F = PrimeField(5)
        assert F.factorial(4) == 4
        assert F.mul(F.factorial(3), F.inv_factorial(3)) == 1


class TestHelpers:
    def test_is_prime(self):
        assert [q for q in range(20) if is_prime(q)] == [2, 3, 5, 7, 11, 13, 17, 19]

    def test_prime_field_is_cached(self):
        assert prime_field(7) is prime_field(7)

    def test_free_functions(self):
        assert fp_add(2, 2, 3) == 1
        assert fp_inv(2, 5) == 3
        assert binom_mod_p(4, 2, 3) == 0
