#include "homform/field.hpp"

#include <numeric>

namespace homform {

/******************************************************************************
 * Modular helpers
 ******************************************************************************/

bool is_prime(long long n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (long long d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

long long mod_reduce(long long v, long long ell) {
    long long r = v % ell;
    return r < 0 ? r + ell : r;
}

long long mod_pow(long long base, long long e, long long ell) {
    internal_check(e >= 0, "mod_pow: negative exponent");
    long long b = mod_reduce(base, ell), acc = 1 % ell;
    while (e > 0) {
        if (e & 1) acc = acc * b % ell;
        b = b * b % ell;
        e >>= 1;
    }
    return acc;
}

long long mod_inv(long long a, long long ell) {
    // extended Euclid
    long long r0 = ell, r1 = mod_reduce(a, ell), s0 = 0, s1 = 1;
    while (r1 != 0) {
        long long k = r0 / r1;
        r0 -= k * r1; std::swap(r0, r1);
        s0 -= k * s1; std::swap(s0, s1);
    }
    require(r0 == 1, "mod_inv: element not invertible");
    return mod_reduce(s0, ell);
}

int order_of_q(long long q, long long ell) {
    require(is_prime(ell), "order_of_q: modulus must be prime");
    long long r = mod_reduce(q, ell);
    require(r != 0, "order_of_q: q must be invertible mod ell");
    long long acc = r;
    int h = 1;
    while (acc != 1) {
        acc = acc * r % ell;
        ++h;
        internal_check(h <= ell, "order_of_q: order search overran the group");
    }
    return h;
}

/******************************************************************************
 * Field
 ******************************************************************************/

Field Field::modular(long long ell, long long q) {
    require(ell > 0, "field: characteristic must be positive for a modular field");
    require(ell < (1LL << 31), "field: characteristic must be < 2^31");
    require(is_prime(ell), "field: characteristic must be prime");
    require(q >= 1, "field: q must be a positive integer");
    Field f;
    f.ell = ell;
    f.q = mod_reduce(q, ell);
    require(f.q != 0, "field: q must be invertible mod ell");
    f.h = order_of_q(f.q, ell);
    return f;
}

Field Field::rationals(long long q) {
    require(q >= 1, "field: q must be a positive integer over Q");
    Field f;
    f.ell = 0;
    f.q = q;
    f.h = 0;
    return f;
}

std::string Field::describe() const {
    if (modular_p())
        return "F_" + std::to_string(ell) + " (q=" + std::to_string(q) +
               ", h=" + std::to_string(h) + ")";
    return "Q (q=" + std::to_string(q) + ")";
}

/******************************************************************************
 * Frac
 ******************************************************************************/

Frac::Frac(long long n, long long d) {
    require(d != 0, "fraction: zero denominator");
    if (d < 0) { n = -n; d = -d; }
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    num = n / g;
    den = d / g;
}

Frac Frac::parse(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Frac(std::stoll(text), 1);
        return Frac(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    } catch (const std::invalid_argument&) {
        throw Error("fraction: cannot parse '" + text + "'");
    } catch (const std::out_of_range&) {
        throw Error("fraction: out of range '" + text + "'");
    }
}

long long Frac::ceil_div(long long p) const {
    internal_check(num > 0, "fraction: ceil_div needs a positive fraction");
    // ceil(p * den / num)
    long long a = p * den;
    long long r = a / num;
    if (r * num < a) ++r;
    return r;
}

long long Frac::floor_div(long long p) const {
    internal_check(num > 0, "fraction: floor_div needs a positive fraction");
    long long a = p * den;
    long long r = a / num;
    if (r * num > a) --r;
    return r;
}

long long Frac::times(long long n) const {
    internal_check(times_is_integer(n), "fraction: product is not an integer");
    return n * num / den;
}

std::string Frac::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

}  // namespace homform
