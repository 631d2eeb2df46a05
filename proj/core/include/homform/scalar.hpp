#pragma once

#include <gmpxx.h>

#include <string>

#include "homform/field.hpp"

namespace homform {

// A field element: a canonical residue when the field is F_ell, an exact
// rational when the field is Q.  All arithmetic is exact; mixing scalars from
// different fields is an internal error.
class Scalar {
  public:
    Scalar() = default;                                // 0 in Q
    Scalar(const Field& f, long long v);
    Scalar(const Field& f, const mpq_class& v);        // over F_ell: a/b -> a * b^-1

    const Field& field() const { return f_; }
    bool is_zero() const;
    bool is_one() const;
    long long residue() const;                          // modular fields only
    const mpq_class& rational() const;                  // Q only
    std::string str() const;                            // canonical "a" or "a/b"

    Scalar operator-() const;
    Scalar inverse() const;                             // throws Error on zero
    Scalar pow(long long e) const;                      // negative e inverts first

    friend Scalar operator+(const Scalar&, const Scalar&);
    friend Scalar operator-(const Scalar&, const Scalar&);
    friend Scalar operator*(const Scalar&, const Scalar&);
    friend Scalar operator/(const Scalar&, const Scalar&);
    friend bool operator==(const Scalar&, const Scalar&);

  private:
    Field f_ = Field::rationals();
    long long m_ = 0;
    mpq_class r_ = 0;
};

// q^k in the field.  Over F_ell this is well-defined for any integer k; over Q
// negative k yields an honest rational power.
Scalar q_power(const Field& f, long long k);

// Parse "a", "-a" or "a/b" into a scalar of the field.
Scalar scalar_parse(const Field& f, const std::string& text);

}  // namespace homform
