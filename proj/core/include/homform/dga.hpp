#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "homform/weights.hpp"

namespace homform {

/******************************************************************************
 * WeightedDGA
 *
 * A finite-basis associative unital dg-algebra, cohomologically graded in
 * degrees >= 0, with a cyclic weight grading: every basis element carries a
 * degree n and a weight 0 <= p < modulus, the differential has degree +1 and
 * preserves weights, and products add degrees and add weights mod modulus.
 *
 * The multiplication is stored as structure constants in an N x N^2 matrix
 * whose column i*N + j is the coordinate column of (basis i) * (basis j).
 * Everything above the top basis degree is implicitly zero, so a degreewise
 * truncation of an infinite algebra is representable as long as the retained
 * part is closed under d and associative on the nose (products landing above
 * the top degree must vanish in the truncated table).
 ******************************************************************************/

struct DgaElement {
    std::string label;
    int deg = 0;
    long long weight = 0;

    friend bool operator==(const DgaElement&, const DgaElement&) = default;
};

class WeightedDGA {
  public:
    WeightedDGA() = default;

    // Validates every algebra axiom (see dga_violations); throws Error with
    // the first few located violations on failure.
    static WeightedDGA build(Field f, long long modulus, std::vector<DgaElement> basis,
                             int unit, Matrix mult, Matrix diff);

    const Field& field() const { return f_; }
    long long modulus() const { return m_; }
    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<DgaElement>& basis() const { return basis_; }
    const DgaElement& element(int i) const { return basis_.at(i); }
    int unit_index() const { return unit_; }
    int top_degree() const { return top_; }
    // Basis index carrying the given label, or -1.
    int index_of(const std::string& label) const {
        for (size_t i = 0; i < basis_.size(); ++i)
            if (basis_[i].label == label) return static_cast<int>(i);
        return -1;
    }
    const Matrix& structure() const { return mult_; }
    const Matrix& differential() const { return diff_; }

    // Global basis indices of degree n (ascending); empty outside support.
    std::vector<int> degree_indices(int n) const;
    // Indices of degree n and weight p.
    std::vector<int> slice_indices(int n, long long p) const;

    // Bilinear product of coordinate columns (sparse in the inputs).
    Matrix product(const Matrix& u, const Matrix& v) const;
    Matrix basis_vector(int i) const;
    // The structure-constant column of (basis i) * (basis j).
    Matrix structure_column(int i, int j) const;

    friend bool operator==(const WeightedDGA&, const WeightedDGA&);

  private:
    Field f_ = Field::rationals();
    long long m_ = 1;
    std::vector<DgaElement> basis_;
    int unit_ = 0;
    int top_ = 0;
    Matrix mult_;           // N x N^2 structure constants
    Matrix diff_;           // N x N, degree +1
};

// Every axiom violation, located at the offending basis element, pair, or
// triple: shape errors, degree/weight bounds, unit axioms, d degree/weight,
// d*d = 0, the signed Leibniz rule d(xy) = dx*y + (-1)^{|x|} x*dy, product
// degree/weight homogeneity, and associativity.  Empty result = valid.
std::vector<std::string> dga_violations(const Field& f, long long modulus,
                                        const std::vector<DgaElement>& basis, int unit,
                                        const Matrix& mult, const Matrix& diff);

/******************************************************************************
 * Cohomology
 ******************************************************************************/

// A cohomology class, carried by a homogeneous cocycle representative given
// as a global coordinate column.
struct DgaClass {
    int deg = 0;
    Matrix rep;             // dim() x 1
};

// Per-degree cohomology of the underlying cochain complex, with deterministic
// sections and projections, plus the degree embeddings needed to move between
// global and degreewise coordinates.
struct DgaCohomology {
    Complex cochain;                    // cohomological; display degree = algebra degree
    HomologyData data;

    int h_dim(int n) const;
    Matrix h_section(int n) const;      // degree-n coordinates x h_dim
    Matrix h_projection(int n) const;

    // H coordinates of a cocycle class (validates d rep = 0).
    Matrix class_of(const WeightedDGA& a, const DgaClass& c) const;
    // Representative of the class with the given H coordinates at degree n.
    DgaClass rep_of(const WeightedDGA& a, int n, const Matrix& h_coords) const;
};

DgaCohomology dga_cohomology(const WeightedDGA& a);

// The cohomology algebra: zero differential, basis of classes ordered by
// (degree, weight), the class of 1 re-based to be the first degree-0 basis
// element.  Throws Error if [1] = 0 (the zero ring has no unit element).
WeightedDGA cohomology_algebra(const WeightedDGA& a);

// connected: H^0 is spanned by the class of 1 (dimension exactly 1).
// r: largest r >= 0 with H^i = 0 for 1 <= i <= r, capped at top_degree();
// only meaningful when connected.  simply = connected and H^1 = 0.
struct ConnectivityReport {
    bool connected = false;
    int r = 0;
    bool simply = false;
};

ConnectivityReport connectivity(const WeightedDGA& a);

// Slope check on cohomology: H^n(A)_p must vanish unless alpha * n is an
// integer congruent to p mod modulus.  Cell degrees are algebra degrees.
// Requires 0 < alpha < modulus.
PurityReport dga_purity_check(const WeightedDGA& a, const Frac& alpha);

/******************************************************************************
 * Massey products
 *
 * Defining systems x_{ij} (1 <= i <= j <= k, (i,j) != (1,k)) satisfy
 * [x_{ii}] = x_i and d x_{ij} = sum_{q=i}^{j-1} bar(x_{iq}) x_{q+1,j}, where
 * bar(v) = (-1)^{1+|v|} v; the product's value is the class of
 * sum_{q=1}^{k-1} bar(x_{1q}) x_{q+1,k}, of degree sum|x_i| - k + 2.
 ******************************************************************************/

struct MasseyOptions {
    int param_cap_modular = 12;         // affine parameter dimension cap over F_ell
    int param_cap_rational = 6;         // over Q (grid sampling, never exhaustive)
    long long count_cap = 200000;       // hard cap on enumerated defining systems
    long long height = 1;               // Q grid: coefficients in [-height, height]
};

struct MasseyResult {
    bool defined = false;
    int order = 0;                      // k
    int degree = 0;                     // degree of the value classes
    // Canonical value (fixed-pivot defining system, weight-homogeneous when
    // the inputs are), in H coordinates at `degree`; absent if not defined.
    std::optional<Matrix> representative;
    // k = 3: columns spanning the indeterminacy subspace x*H + H*z (exact).
    Matrix indeterminacy;
    // k > 3 (and k = 3 enumerative runs): distinct value classes found.
    std::vector<Matrix> values;
    bool contains_zero = false;
    // true when `values`/the coset describes the complete value set.
    bool search_exhausted = false;
    std::string obstruction;            // failing system slot when not defined
};

// Exact triple product via coset arithmetic: representative from the
// fixed-pivot defining system, value set = representative + indeterminacy.
MasseyResult triple_massey(const WeightedDGA& a, const DgaClass& x, const DgaClass& y,
                           const DgaClass& z);

// Order-k product (k >= 3) by depth-first traversal of the nested affine
// solution spaces, level by level in j - i; includes coboundary freedom of
// the diagonal representatives.  Exhaustive over F_ell when the total
// parameter dimension and system count fit the caps; otherwise a sampled
// search with search_exhausted = false (contains_zero stays trustworthy when
// true: a witness system was found).
MasseyResult k_massey(const WeightedDGA& a, const std::vector<DgaClass>& xs,
                      const MasseyOptions& opt = {});

// True when alpha * (k-2) / m is not an integer, which forces every defined
// k-fold product on an alpha-pure algebra to contain zero.  Requires
// 0 < alpha < m and k >= 3.
bool vanishing_predicate(const Frac& alpha, long long m, long long k);

// ceil(m*r / alpha) + 2r + 1: on an alpha-pure r-connected algebra (r >= 1),
// Massey products of classes landing in degrees <= this bound contain zero.
long long low_degree_bound(const Frac& alpha, long long m, long long r);

/******************************************************************************
 * Tensor product
 ******************************************************************************/

// Graded tensor product with Koszul signs: (a (x) b)(a' (x) b') =
// (-1)^{|b||a'|} aa' (x) bb', d(a (x) b) = da (x) b + (-1)^{|a|} a (x) db,
// weights add mod the (common) modulus.  Basis pairs in lexicographic order,
// labels joined with "|".
WeightedDGA tensor_dga(const WeightedDGA& a, const WeightedDGA& b);

}  // namespace homform
