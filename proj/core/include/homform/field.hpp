#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace homform {

/******************************************************************************
 * Errors
 ******************************************************************************/

// Malformed input or violated precondition; the CLI maps this to a usage error.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Consistency check that can only fire on an internal bug, never on valid input.
class InternalError : public std::logic_error {
  public:
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw Error(msg);
}
inline void internal_check(bool cond, const std::string& msg) {
    if (!cond) throw InternalError(msg);
}

/******************************************************************************
 * Modular helpers
 ******************************************************************************/

bool is_prime(long long n);
long long mod_reduce(long long v, long long ell);   // canonical residue in [0, ell)
long long mod_pow(long long base, long long e, long long ell);
long long mod_inv(long long a, long long ell);      // throws Error if gcd(a, ell) != 1

// Multiplicative order of q modulo ell.  Requires ell prime and q invertible mod ell.
int order_of_q(long long q, long long ell);

/******************************************************************************
 * Field
 ******************************************************************************/

// Coefficient field together with the weight base q.
//   ell > 0 (prime < 2^31): the field F_ell; q is stored as a canonical unit
//     residue and h is its multiplicative order mod ell.
//   ell == 0: the field Q; q >= 2 (or 1 for plain linear algebra); h == 0, since
//     q has infinite order and weight gradings are indexed by Z.
struct Field {
    long long ell = 0;
    long long q = 1;
    int h = 0;

    static Field modular(long long ell, long long q);
    static Field rationals(long long q = 1);

    bool modular_p() const { return ell != 0; }
    friend bool operator==(const Field&, const Field&) = default;
    std::string describe() const;
};

/******************************************************************************
 * Frac: exact small fractions (purity slopes alpha)
 ******************************************************************************/

// Reduced fraction num/den with den > 0.  Used for purity slopes, so most
// helpers assume num > 0.
struct Frac {
    long long num = 0;
    long long den = 1;

    Frac() = default;
    Frac(long long n, long long d);                 // reduces; requires d != 0
    static Frac parse(const std::string& text);     // "a/b" or "a"

    bool positive() const { return num > 0; }
    // ceil(p / alpha) for alpha = num/den > 0.
    long long ceil_div(long long p) const;
    // floor(p / alpha).
    long long floor_div(long long p) const;
    // alpha * n is an integer?
    bool times_is_integer(long long n) const { return (n * num) % den == 0; }
    // alpha * n, requires times_is_integer(n).
    long long times(long long n) const;
    std::string str() const;

    friend bool operator==(const Frac&, const Frac&) = default;
};

}  // namespace homform
