#include <doctest.h>

#include "kpow/modcore.hpp"
#include "oracles.hpp"

using namespace kpow;

TEST_SUITE("modcore") {

TEST_CASE("mod_pow basics") {
    CHECK(mod_pow(2, 10, 1000) == 24);
    CHECK(mod_pow(5, 0, 7) == 1);
    CHECK(mod_pow(5, 0, 1) == 0); // everything is 0 mod 1

    // against a plain multiplication loop
    u64 expected = 1;
    for (int i = 0; i < 2186; ++i) expected = mulmod(expected, 3, 2187);
    CHECK(mod_pow(3, 2186, 2187) == expected);
}

TEST_CASE("mod_inv examples and involution") {
    CHECK(mod_inv(2, 9) == 5);
    CHECK(mod_inv(1, 97) == 1);
    CHECK_THROWS_AS(mod_inv(3, 9), NotInvertible);

    // exhaustive oracle for m = 9
    for (u64 x = 1; x < 9; ++x)
        if (mulmod(x, 2, 9) == 1) CHECK(x == mod_inv(2, 9));

    for (u64 m : {9ull, 25ull, 27ull, 121ull, 2187ull})
        for (u64 a = 1; a < m; ++a) {
            if (std::gcd(a, m) != 1) continue;
            u64 inv = mod_inv(a, m);
            CHECK(mulmod(a, inv, m) == 1);
            CHECK(mod_inv(inv, m) == a);
        }
}

TEST_CASE("legendre symbol") {
    CHECK(legendre(1, 7) == 1);
    CHECK(legendre(2, 3) == -1);
    CHECK(legendre(0, 5) == 0);

    // multiplicativity, exhaustive for every odd prime p <= 101
    for (u64 p = 3; p <= 101; p += 2) {
        if (!is_odd_prime(p)) continue;
        for (u64 a = 1; a < p; ++a)
            for (u64 b = 1; b < p; ++b)
                CHECK(legendre(mulmod(a, b, p), p) == legendre(a, p) * legendre(b, p));
    }
}

TEST_CASE("sqrt_mod_p against exhaustive search") {
    CHECK(sqrt_mod_p(4, 7) == 2);
    CHECK(sqrt_mod_p(2, 7) == 3);
    CHECK_THROWS_AS(sqrt_mod_p(3, 7), NotAResidue);

    for (u64 p = 3; p <= 101; p += 2) {
        if (!is_odd_prime(p)) continue;
        for (u64 a = 1; a < p; ++a) {
            auto root = oracles::exhaustive_sqrt(a, p);
            if (legendre(a, p) != 1) {
                CHECK(!root.has_value());
                CHECK_THROWS_AS(sqrt_mod_p(a, p), NotAResidue);
            } else {
                REQUIRE(root.has_value());
                u64 r = sqrt_mod_p(a, p);
                CHECK(r == std::min(*root, p - *root));
                CHECK(mulmod(r, r, p) == a);
            }
        }
    }
}

TEST_CASE("hensel_sqrt") {
    PrimePowerModulus m9 = PrimePowerModulus::make(3, 2);
    CHECK(hensel_sqrt(7, m9) == 4);
    CHECK(hensel_sqrt(1, m9) == 1);
    CHECK_THROWS_AS(hensel_sqrt(2, m9), NotAResidue);
    CHECK_THROWS_AS(hensel_sqrt(3, m9), NotCoprime);

    // omega^2 = a mod q exactly, canonical residue mod p, for a (p,k) grid
    for (u64 p : {3ull, 5ull, 7ull, 11ull, 13ull}) {
        for (unsigned k = 1; k <= 5; ++k) {
            PrimePowerModulus m = PrimePowerModulus::make(p, k);
            for (u64 a = 1; a < std::min<u64>(m.q, 400); ++a) {
                if (a % p == 0 || legendre(a % p, p) != 1) continue;
                u64 w = hensel_sqrt(a, m);
                CHECK(mulmod(w, w, m.q) == a % m.q);
                CHECK(w % p == sqrt_mod_p(a % p, p));
            }
        }
    }

    // exhaustive cross-check at q = 9
    for (u64 a : {1ull, 4ull, 7ull}) {
        auto root = oracles::exhaustive_sqrt(a, 9);
        REQUIRE(root.has_value());
        u64 w = hensel_sqrt(a, m9);
        CHECK((w == *root || w == 9 - *root));
    }
}

TEST_CASE("modulus validation") {
    CHECK_THROWS_AS(PrimePowerModulus::make(4, 2), InvalidModulus);
    CHECK_THROWS_AS(PrimePowerModulus::make(2, 3), InvalidModulus);
    CHECK_THROWS_AS(PrimePowerModulus::make(9, 1), InvalidModulus);
    CHECK_THROWS_AS(PrimePowerModulus::make(1, 1), InvalidModulus);
    CHECK_THROWS_AS(PrimePowerModulus::make(3, 0), InvalidModulus);
    CHECK_THROWS_AS(PrimePowerModulus::make(3, 40), InvalidModulus); // width cap

    PrimePowerModulus big = PrimePowerModulus::make(1'000'000'007, 1);
    CHECK(big.q == 1'000'000'007);
    CHECK(big.phi() == 1'000'000'006);

    PrimePowerModulus m = PrimePowerModulus::make(3, 7);
    CHECK(m.q == 2187);
    CHECK(m.phi() == 1458);
}

TEST_CASE("primality check") {
    CHECK(is_odd_prime(3));
    CHECK(is_odd_prime(101));
    CHECK(is_odd_prime(1'000'000'007));
    CHECK(is_odd_prime(2'147'483'647)); // 2^31 - 1
    CHECK(!is_odd_prime(2));
    CHECK(!is_odd_prime(1));
    CHECK(!is_odd_prime(9));
    CHECK(!is_odd_prime(1'000'000'005));
    // Carmichael number
    CHECK(!is_odd_prime(561));
}

TEST_CASE("residue wrapper") {
    PrimePowerModulus m = PrimePowerModulus::make(5, 3);
    Residue a(131, m); // 131 mod 125 = 6
    CHECK(a.value() == 6);
    CHECK(a.mul(a).value() == 36);
    CHECK(a.add(Residue(124, m)).value() == 5);
    CHECK(a.inv().mul(a).value() == 1);
    CHECK(a.pow(3).value() == mod_pow(6, 3, 125));
}

} // TEST_SUITE
