#pragma once

#include <optional>
#include <vector>

#include "homform/scalar.hpp"

namespace homform {

// Dense exact matrix over a Field.  Storage is row-major in one of two
// parallel vectors depending on the field kind; the algorithms are written
// once against an arithmetic policy and instantiated for both.
//
// Row/column conventions: matrices act on column vectors, composition is
// left-multiplication.  All reductions pivot deterministically (columns left
// to right, first nonzero row top to bottom), so bases and sections computed
// from equal inputs are identical across runs and platforms.
class Matrix {
  public:
    Matrix() = default;                                 // 0 x 0 over Q
    Matrix(const Field& f, int rows, int cols);         // zero matrix
    static Matrix identity(const Field& f, int n);
    static Matrix scalar_matrix(const Field& f, int n, const Scalar& c);
    // Row-major entries as integers (reduced mod ell / embedded in Q).
    static Matrix from_ints(const Field& f, int rows, int cols,
                            const std::vector<long long>& entries);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const Field& field() const { return f_; }

    Scalar at(int i, int j) const;
    void set(int i, int j, const Scalar& v);
    void set(int i, int j, long long v);

    bool is_zero() const;
    Matrix transpose() const;
    Matrix scaled(const Scalar& c) const;
    void axpy(const Scalar& c, const Matrix& b);        // this += c * b
    Matrix col(int j) const;
    Matrix cols_selected(const std::vector<int>& idx) const;
    Matrix rows_selected(const std::vector<int>& idx) const;

    Matrix operator-() const;
    friend Matrix operator+(const Matrix&, const Matrix&);
    friend Matrix operator-(const Matrix&, const Matrix&);
    friend Matrix operator*(const Matrix&, const Matrix&);
    friend bool operator==(const Matrix&, const Matrix&);

    // Raw storage, exposed for the algorithm layer and serialization.
    std::vector<long long>& mod_data() { return m_; }
    const std::vector<long long>& mod_data() const { return m_; }
    std::vector<mpq_class>& rat_data() { return r_; }
    const std::vector<mpq_class>& rat_data() const { return r_; }

  private:
    Field f_ = Field::rationals();
    int rows_ = 0, cols_ = 0;
    std::vector<long long> m_;
    std::vector<mpq_class> r_;
};

Matrix hcat(const Matrix& a, const Matrix& b);
Matrix vcat(const Matrix& a, const Matrix& b);
// Kronecker product: entry ((ia*rows_b + ib), (ja*cols_b + jb)) = a[ia][ja] * b[ib][jb].
Matrix kron(const Matrix& a, const Matrix& b);
// Assemble a block matrix from a grid of blocks (all rows/cols consistent).
Matrix block_matrix(const std::vector<std::vector<Matrix>>& grid);

/******************************************************************************
 * Gaussian elimination
 ******************************************************************************/

struct RrefResult {
    int rank = 0;
    std::vector<int> pivots;    // pivot column indices, ascending
    Matrix reduced;             // the reduced row echelon form
};

RrefResult rref(const Matrix& a);
int rank(const Matrix& a);
// Columns form the deterministic basis of the null space.
Matrix kernel_basis(const Matrix& a);
// Particular solution X of a * X = rhs (free variables set to zero), or
// nullopt if some column of rhs is not in the column space.
std::optional<Matrix> solve(const Matrix& a, const Matrix& rhs);
// Particular solution together with the kernel basis: the full solution set
// of a * x = rhs is particular + span(kernel).
struct SolveResult {
    Matrix particular;
    Matrix kernel;
};
std::optional<SolveResult> solve_full(const Matrix& a, const Matrix& rhs);
std::optional<Matrix> inverse(const Matrix& a);
std::vector<int> pivot_columns(const Matrix& a);
// The pivot columns of a, as a basis of its column space.
Matrix column_space_basis(const Matrix& a);

/******************************************************************************
 * Characteristic polynomials and eigenspaces
 ******************************************************************************/

// Monic characteristic polynomial det(tI - a), returned as the 1 x (n+1) row
// of ascending coefficients.  Over Q: Faddeev-LeVerrier; over F_ell:
// Hessenberg reduction followed by the minor recurrence (the trace-based
// recurrence would divide by integers that can vanish mod ell).
Matrix char_poly(const Matrix& a);

Matrix poly_mul(const Matrix& p, const Matrix& q);
Scalar poly_eval(const Matrix& p, const Scalar& x);
// Exact division of p by (t - lambda); nullopt if the remainder is nonzero.
std::optional<Matrix> poly_div_linear(const Matrix& p, const Scalar& lambda);

// Basis of the generalized eigenspace ker (a - lambda I)^n, computed by
// iterating powers until the kernel stabilizes.
Matrix generalized_eigenspace(const Matrix& a, const Scalar& lambda);

Matrix matrix_power(const Matrix& a, long long k);      // k >= 0

}  // namespace homform
