#pragma once

#include <stdexcept>
#include <string>

namespace kpow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// gcd(a, m) > 1 where an inverse was required
struct NotInvertible : Error {
    using Error::Error;
};

// square root requested for a quadratic non-residue
struct NotAResidue : Error {
    using Error::Error;
};

// operand shares a factor with the prime p
struct NotCoprime : Error {
    using Error::Error;
};

// operation needs a proper prime power (k >= 2) or a larger k
struct UnsupportedModulus : Error {
    using Error::Error;
};

// some expansion coefficient c_j is divisible by p, in a context that
// needs (c_j, p) = 1
struct CoefficientDivisible : Error {
    using Error::Error;
};

// requested size exceeds a configured cap
struct CapExceeded : Error {
    using Error::Error;
};

// residue class a with gcd(a, q) > 1 passed to a progression sum
struct ResidueNotCoprime : Error {
    using Error::Error;
};

// numerical Fourier machinery could not certify the decay it needs
struct QuadratureFailure : Error {
    using Error::Error;
};

// p not an odd prime, k = 0, or q = p^k outside the arithmetic width
struct InvalidModulus : Error {
    using Error::Error;
};

} // namespace kpow
