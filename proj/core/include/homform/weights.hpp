#pragma once

#include <optional>
#include <string>
#include <vector>

#include "homform/complex.hpp"

namespace homform {

/******************************************************************************
 * Weight gradings
 *
 * A weight grading splits each degree of a complex into summands indexed by
 * weights: residues mod a positive modulus (cyclic, the F_ell case where q
 * has order h) or plain integers (the Q case, where the eigenvalue q^k gets
 * weight 2k).  Summands are recorded as ambient-coordinate bases; per degree
 * they must be a direct-sum decomposition and the differential must preserve
 * each weight.
 ******************************************************************************/

struct WeightSummand {
    long long p = 0;        // weight; canonical residue in [0, modulus) if cyclic
    Matrix basis;           // ambient_dim x summand_dim, full column rank
};

struct WeightGrading {
    bool cyclic = true;
    long long modulus = 1;                          // >= 1; ignored when not cyclic
    std::map<int, std::vector<WeightSummand>> at;   // internal degree -> summands, ascending p
};

struct GradedComplex {
    Complex complex;
    WeightGrading grading;
};

// Validates the decomposition: weights canonical and strictly ascending per
// degree, bases of full column rank jointly spanning each nonzero degree, and
// d mapping each weight-p summand into the weight-p summand below (into zero
// when absent).  Throws Error on violation.
GradedComplex make_graded_complex(Complex c, WeightGrading g);

// The weight-p subcomplex in summand coordinates, with its ambient inclusion.
struct WeightSlice {
    Complex complex;
    DegMap inclusion;       // inclusion[n] = recorded basis of weight p in degree n
};
WeightSlice weight_slice(const GradedComplex& g, long long p);

// Dimension of the weight-p summand in degree n (internal degrees).
int weight_dim(const GradedComplex& g, int n, long long p);
// Sorted union of weights appearing anywhere in the grading.
std::vector<long long> weights_present(const GradedComplex& g);

/******************************************************************************
 * Grading a module or a complex by eigenvalues of its endomorphism
 ******************************************************************************/

struct ModuleGrading {
    bool ok = false;        // summands jointly span
    int defect = 0;         // ambient dim minus sum of summand dims
    std::vector<WeightSummand> summands;
};

// Splits phi's space by the generalized eigenspaces of q^0, ..., q^(h-1).
// Modular fields only; requires phi square and invertible (throws Error).
// ok iff the eigenspaces jointly span, i.e. every eigenvalue is a power of q.
ModuleGrading tate_grade_module(const Field& f, const Matrix& phi);

// Splits phi's space by the generalized eigenspaces of integer powers q^k,
// assigning weight 2k.  Rational field with q >= 2 (or q == 1, which only
// grades the identity); requires phi invertible.  Candidate exponents are cut
// off by exact Cauchy root bounds on the characteristic polynomial.
ModuleGrading weil_grade_module(const Field& f, const Matrix& phi);

struct ComplexGradeOutcome {
    std::optional<GradedComplex> graded;    // set on success
    int fail_degree = 0;                    // display degree of the first failure
    int defect = 0;
    std::string reason;                     // empty on success
};

// Grade every degree of the complex by its endomorphism; soft failure (reason
// set) when some degree is not spanned by q-power eigenspaces or phi_n is
// singular.  tate: cyclic weights mod h; weil: integer weights 2k over Q.
ComplexGradeOutcome tate_grade_complex(const EndoComplex& x);
ComplexGradeOutcome weil_grade_complex(const EndoComplex& x);

/******************************************************************************
 * Purity
 *
 * Slope alpha > 0 (and alpha < modulus in the cyclic case).  Pure means the
 * weight-p part of H_n vanishes unless p = alpha * n: literally for integer
 * weights, as a residue (with alpha * n integral) in the cyclic case.
 ******************************************************************************/

struct PurityCell {
    int degree = 0;         // internal (homological) degree
    long long weight = 0;
    int hdim = 0;
};

struct PurityReport {
    bool pure = true;
    Frac alpha;
    std::vector<PurityCell> failures;               // nonzero off-slope homology
    std::map<int, std::map<long long, int>> h_dims; // all nonzero H_n^p dims
};

PurityReport purity_check(const GradedComplex& g, const Frac& alpha);

/******************************************************************************
 * Truncations
 ******************************************************************************/

// Weightwise canonical truncation: weight p keeps degrees above ceil(p/alpha)
// as they are, the kernel of d at the ceiling degree, zero below.  Requires a
// non-negatively graded homological complex and alpha > 0.
struct TauResult {
    GradedComplex tau;
    ChainMap inclusion;     // tau -> original, a quasi-iso iff the input is pure
};
TauResult truncation_tau(const GradedComplex& g, const Frac& alpha);

// Brutal truncation t_{<=N}: degrees above N dropped, degree N replaced by the
// quotient of C_N by the boundaries arriving from degree N+1.  The projection
// is an N-quasi-isomorphism for every complex.
struct BrutalTruncation {
    Complex complex;
    ChainMap projection;    // original -> truncated
    QuasiIsoReport report;  // verified at bound N
};
BrutalTruncation t_leq_n(const Complex& c, long long n_bound);

/******************************************************************************
 * Graded homology and the comparison arrows
 ******************************************************************************/

// Homology computed slice by slice, assembled into a zero-differential graded
// complex whose degree-n coordinates are the slice homology classes, weights
// ascending.  section/projection mediate with ambient coordinates.
struct GradedHomology {
    GradedComplex h;                            // zero differential
    DegMap section;                             // h_n -> ambient_n, cycle representatives
    DegMap projection;                          // ambient_n -> h_n, kills boundaries
    std::map<long long, HomologyData> per_weight;
    std::map<long long, WeightSlice> slices;
};
GradedHomology graded_homology(const GradedComplex& g);

// The zigzag  A <-(phi)- tau A -(psi)-> t_<=N H(A) <-(upsilon)- H(A)  with
// every arrow verified: phi as a full quasi-iso (this is where purity enters),
// psi and upsilon as N-quasi-isos for N = floor((modulus-1)/alpha).  Integer
// gradings have no truncation bound: t_<=N H = H, upsilon = id, and psi is
// verified as a full quasi-iso.
struct GradedZigzag {
    bool ok = false;
    std::string failure_stage;      // "", "input", "purity"
    std::string failure_detail;
    Frac alpha;
    std::optional<long long> n_bound;   // empty for integer gradings (no truncation)
    PurityReport purity;
    GradedComplex tau;
    ChainMap phi;                   // tau -> A
    QuasiIsoReport phi_report;
    GradedComplex homology;         // H(A), zero differential, graded
    Complex truncated_homology;     // t_<=N H(A)
    ChainMap psi;                   // tau -> t_<=N H(A)
    QuasiIsoReport psi_report;
    ChainMap upsilon;               // H(A) -> t_<=N H(A)
    QuasiIsoReport upsilon_report;
};
GradedZigzag formality_zigzag_graded(const GradedComplex& a, const Frac& alpha);

/******************************************************************************
 * Tensor of graded complexes and multiplicativity of psi
 ******************************************************************************/

// Koszul-sign tensor complex with weights added (mod modulus when cyclic).
GradedComplex tensor_graded(const GradedComplex& a, const GradedComplex& b);

// Exact commutation of the square
//     tau A (x) tau B --(psi_A (x) psi_B)--> t H(A) (x) t H(B)
//          |  mu_tau                              |  mu_H
//     tau (A (x) B) ------(psi_{A(x)B})----> t H(A (x) B)
// where mu_tau is the canonical comparison of truncations and mu_H the
// Kunneth product [x](x)[y] -> [x(x)y].  Both sides are compared entrywise.
struct MonoidalityReport {
    bool ok = false;
    std::string detail;             // failure description, empty when ok
    int fail_degree = 0;
};
MonoidalityReport psi_monoidality(const GradedComplex& a, const GradedComplex& b,
                                  const Frac& alpha);

/******************************************************************************
 * End-to-end witness for a complex with endomorphism
 ******************************************************************************/

// Pipeline: homology model of X, weight grading of the model's endomorphism
// (cyclic over F_ell, integer over Q), purity at alpha, then the zigzag on
// the graded zero-differential model.  On that model every zigzag arrow is
// the identity in the recorded bases through the bound, which the witness
// checks literally (identity_composite).
struct FormalityWitness {
    bool ok = false;
    std::string failure_stage;      // "", "model", "grading", "purity", "zigzag"
    std::string failure_detail;
    Field field;
    Frac alpha;
    long long n_bound = 0;          // resolved bound; top degree when full
    bool full = false;              // integer grading: formality with no truncation
    std::optional<HomologyModel> model;
    std::optional<GradedComplex> graded;    // the graded homology model
    std::optional<GradedZigzag> zigzag;
    bool identity_composite = false;
};
FormalityWitness formality_zigzag_complex(const EndoComplex& x, const Frac& alpha);

}  // namespace homform
