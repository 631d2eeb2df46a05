#pragma once

#include <map>
#include <optional>

#include "homform/matrix.hpp"

namespace homform {

// Degreewise collections of matrices, keyed by internal degree; a missing key
// is a zero map of the appropriate shape.
using DegMap = std::map<int, Matrix>;

/******************************************************************************
 * Complex / EndoComplex
 *
 * Internally everything is indexed homologically (differential lowers the
 * degree by one).  A cohomological complex is stored with negated degrees and
 * a flag; degree negation happens at the serialization boundary, so display
 * degree = -internal degree when the flag is set.
 ******************************************************************************/

class Complex {
  public:
    Complex() = default;    // the zero complex over Q

    // dims and diffs are keyed by internal degree, diffs[n] : C_n -> C_{n-1}.
    // Enforces shape consistency and d*d = 0; throws Error on violation.
    static Complex build(const Field& f, bool cohomological, const std::map<int, int>& dims,
                         const DegMap& diffs);

    const Field& field() const { return f_; }
    bool cohomological_p() const { return coh_; }
    // Inclusive support interval in internal degrees; lo > hi means zero complex.
    int lo() const { return lo_; }
    int hi() const { return hi_; }
    int dim(int n) const;
    // d_n : C_n -> C_{n-1}; correctly shaped zero matrix when absent.
    Matrix d(int n) const;
    int total_dim() const;

    int display_degree(int internal) const { return coh_ ? -internal : internal; }
    int internal_degree(int display) const { return coh_ ? -display : display; }

    friend bool operator==(const Complex&, const Complex&);

  private:
    Field f_ = Field::rationals();
    bool coh_ = false;
    int lo_ = 0, hi_ = -1;
    std::map<int, int> dims_;
    DegMap diffs_;
};

class EndoComplex {
  public:
    EndoComplex() = default;

    // endo keyed by internal degree; enforces d*phi = phi*d; throws Error.
    static EndoComplex build(Complex c, const DegMap& endo);

    const Complex& complex() const { return c_; }
    const Field& field() const { return c_.field(); }
    int dim(int n) const { return c_.dim(n); }
    Matrix d(int n) const { return c_.d(n); }
    // phi_n : C_n -> C_n; zero matrix when absent.
    Matrix endo(int n) const;

    friend bool operator==(const EndoComplex&, const EndoComplex&);

  private:
    Complex c_;
    DegMap endo_;
};

/******************************************************************************
 * Chain maps and homology
 ******************************************************************************/

struct ChainMap {
    Complex src, tgt;
    DegMap comp;            // comp[n] : src_n -> tgt_n
};

// Validates shapes and the commutation d' f = f d; throws Error otherwise.
ChainMap make_chain_map(Complex src, Complex tgt, DegMap comp);
// The degree-n component, zero-filled to the right shape when absent.
Matrix chain_map_at(const ChainMap& m, int n);

struct HomologyDegree {
    Matrix cycles;          // ambient x z, kernel of d_n
    Matrix boundaries;      // ambient x b, image basis of d_{n+1}
    Matrix section;         // ambient x h, cycle representatives of homology classes
    Matrix projection;      // h x ambient: kills boundaries, projection*section = id
};

struct HomologyData {
    Complex source;
    std::map<int, HomologyDegree> at;

    int dim(int n) const;               // homology dimension, 0 outside support
    Matrix section(int n) const;
    Matrix projection(int n) const;
    // The homology as a complex with zero differential (same variance).
    Complex graded_complex() const;
};

// Exact homology with deterministic bases: cycles and boundaries from fixed
// pivoting, representatives = cycle basis columns that extend the boundary
// basis, projection from the inverse of [boundaries | section | completion].
HomologyData homology(const Complex& c);

// Matrix of H_n(f) in the bases fixed by the two HomologyData arguments.
DegMap induced_map(const ChainMap& f, const HomologyData& h_src, const HomologyData& h_tgt);

struct DegreeIsoReport {
    int src_dim = 0, tgt_dim = 0, rank = 0;
    bool iso = false;
};

struct QuasiIsoReport {
    bool ok = true;
    // Degrees (display convention) where H(f) was tested, with verdicts.
    std::map<int, DegreeIsoReport> degrees;
    std::optional<int> first_failure;
};

// True iff H_i(f) is an isomorphism for every display degree i <= n_bound.
QuasiIsoReport is_n_quasi_iso(const ChainMap& f, long long n_bound);
QuasiIsoReport is_quasi_iso(const ChainMap& f);

/******************************************************************************
 * Tensor products (Koszul signs)
 ******************************************************************************/

Complex tensor(const Complex& a, const Complex& b);
EndoComplex tensor_endo(const EndoComplex& x, const EndoComplex& y);

// Layout of (A (x) B)_n as consecutive blocks A_a (x) B_{n-a}, ascending in a;
// within a block the basis is i * dim(B_b) + j.
struct TensorBlock {
    int left_deg = 0, right_deg = 0, offset = 0, size = 0;
};
std::map<int, std::vector<TensorBlock>> tensor_layout(const Complex& a, const Complex& b);

// f (x) g : src_f (x) src_g -> tgt_f (x) tgt_g, blockwise kron(f_a, g_b).
// Degree-0 maps pick up no Koszul signs.
ChainMap tensor_chain_map(const ChainMap& f, const ChainMap& g);

/******************************************************************************
 * Pre-morphism calculus
 *
 * A pre-morphism (f, F) of degree n has f[j] : C_j -> C'_{j-n} and
 * F[j] : C_j -> C'_{j-n+1}; D raises the degree by one.  A ho-morphism is a
 * closed pre-morphism of degree 0; a homotopy between ho-morphisms is a
 * pre-morphism of degree -1 with D(h,H) = (g-f, G-F).
 ******************************************************************************/

struct PreMorphism {
    int degree = 0;
    DegMap f, F;
};

// Shape-checks p against the given source/target; throws Error on mismatch.
void premorphism_validate(const PreMorphism& p, const EndoComplex& src, const EndoComplex& tgt);

// D(f,F) = (df - (-1)^n f d,  d F + (-1)^n F d + (-1)^n (f phi - phi' f)).
// The sign placement in the second component is the unique one that makes
// D(D(p)) = 0 in every degree while keeping the degree-0 equation the
// commuting-up-to-homotopy condition.
PreMorphism D_premorphism(const PreMorphism& p, const EndoComplex& src, const EndoComplex& tgt);

struct HoMorphism {
    EndoComplex src, tgt;
    DegMap f, F;
};

// Validates shapes and closedness D(f,F) = 0; throws Error otherwise.
HoMorphism make_ho_morphism(EndoComplex src, EndoComplex tgt, DegMap f, DegMap F);
// The underlying chain map of the f-part.
ChainMap ho_underlying_chain_map(const HoMorphism& m);
// (f,F) after (g,G): (f g, F g + f G).
HoMorphism ho_compose(const HoMorphism& outer, const HoMorphism& inner);
// Degree -1 pre-morphism (h,H) with D(h,H) = (g-f, G-F), from one global
// linear solve; nullopt when the ho-morphisms are not homotopic.
std::optional<PreMorphism> find_homotopy(const HoMorphism& from, const HoMorphism& to);

// Cyl(f)_n = C_{n-1} (+) C'_n (+) C_n with the block differential
// [[-d,0,0],[-f,d,0],[1,0,d]] and endomorphism [[phi,0,0],[-F,phi',0],[0,0,phi]].
EndoComplex mapping_cylinder(const HoMorphism& m);

struct HomologyModel {
    EndoComplex model;      // zero differential; endo = induced endomorphism
    HoMorphism map;         // closed quasi-isomorphism model -> X
    HomologyData data;
    QuasiIsoReport quasi_iso;
};

// Zero-differential model (H(C), H(phi)) with a closed quasi-iso ho-morphism
// into X: f = homology sections, F solves d F = phi f - f H(phi) degreewise.
HomologyModel homology_model(const EndoComplex& x);

}  // namespace homform
