#include "homform/scalar.hpp"

namespace homform {

Scalar::Scalar(const Field& f, long long v) : f_(f) {
    if (f_.modular_p()) m_ = mod_reduce(v, f_.ell);
    else r_ = mpq_class(static_cast<long>(v));  // long long == long on LP64
}

Scalar::Scalar(const Field& f, const mpq_class& v) : f_(f) {
    if (f_.modular_p()) {
        unsigned long ell = static_cast<unsigned long>(f_.ell);
        long long n = static_cast<long long>(mpz_fdiv_ui(v.get_num().get_mpz_t(), ell));
        long long d = static_cast<long long>(mpz_fdiv_ui(v.get_den().get_mpz_t(), ell));
        require(d != 0, "scalar: denominator not invertible in F_ell");
        m_ = n * mod_inv(d, f_.ell) % f_.ell;
    } else {
        r_ = v;
    }
}

bool Scalar::is_zero() const { return f_.modular_p() ? m_ == 0 : r_ == 0; }
bool Scalar::is_one() const { return f_.modular_p() ? m_ == 1 % f_.ell : r_ == 1; }

long long Scalar::residue() const {
    internal_check(f_.modular_p(), "scalar: residue() on a rational scalar");
    return m_;
}

const mpq_class& Scalar::rational() const {
    internal_check(!f_.modular_p(), "scalar: rational() on a modular scalar");
    return r_;
}

std::string Scalar::str() const {
    if (f_.modular_p()) return std::to_string(m_);
    return r_.get_str();
}

Scalar Scalar::operator-() const {
    Scalar out(*this);
    if (f_.modular_p()) out.m_ = m_ == 0 ? 0 : f_.ell - m_;
    else out.r_ = -r_;
    return out;
}

Scalar Scalar::inverse() const {
    require(!is_zero(), "scalar: inverse of zero");
    Scalar out(*this);
    if (f_.modular_p()) out.m_ = mod_inv(m_, f_.ell);
    else out.r_ = 1 / r_;
    return out;
}

Scalar Scalar::pow(long long e) const {
    Scalar base = e < 0 ? inverse() : *this;
    if (e < 0) e = -e;
    Scalar acc(f_, 1);
    while (e > 0) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

static void check_same_field(const Scalar& a, const Scalar& b) {
    internal_check(a.field() == b.field(), "scalar: mixed-field arithmetic");
}

Scalar operator+(const Scalar& a, const Scalar& b) {
    check_same_field(a, b);
    const Field& f = a.field();
    if (f.modular_p()) return Scalar(f, a.residue() + b.residue());
    return Scalar(f, mpq_class(a.rational() + b.rational()));
}

Scalar operator-(const Scalar& a, const Scalar& b) {
    check_same_field(a, b);
    const Field& f = a.field();
    if (f.modular_p()) return Scalar(f, a.residue() - b.residue());
    return Scalar(f, mpq_class(a.rational() - b.rational()));
}

Scalar operator*(const Scalar& a, const Scalar& b) {
    check_same_field(a, b);
    const Field& f = a.field();
    if (f.modular_p()) return Scalar(f, a.residue() * b.residue() % f.ell);
    return Scalar(f, mpq_class(a.rational() * b.rational()));
}

Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inverse(); }

bool operator==(const Scalar& a, const Scalar& b) {
    if (!(a.field() == b.field())) return false;
    if (a.field().modular_p()) return a.residue() == b.residue();
    return a.rational() == b.rational();
}

Scalar q_power(const Field& f, long long k) { return Scalar(f, f.q).pow(k); }

Scalar scalar_parse(const Field& f, const std::string& text) {
    try {
        auto slash = text.find('/');
        if (slash == std::string::npos) {
            mpz_class n(text);
            return Scalar(f, mpq_class(n));
        }
        mpz_class n(text.substr(0, slash)), d(text.substr(slash + 1));
        require(d != 0, "scalar: zero denominator in '" + text + "'");
        mpq_class v(n, d);
        v.canonicalize();
        return Scalar(f, v);
    } catch (const std::invalid_argument&) {
        throw Error("scalar: cannot parse '" + text + "'");
    }
}

}  // namespace homform
