#include "homform/matrix.hpp"

#include <algorithm>
#include <utility>

namespace homform {

/******************************************************************************
 * Arithmetic policies
 *
 * Every elimination/eigen algorithm below is written once as a template over
 * one of these two policies and instantiated for both storage kinds; the
 * Matrix entry points dispatch once per call, never per entry.
 ******************************************************************************/

namespace {

struct ModAr {
    long long ell;
    using elem = long long;
    elem zero() const { return 0; }
    elem one() const { return 1 % ell; }
    bool is_zero(const elem& a) const { return a == 0; }
    elem add(const elem& a, const elem& b) const { return (a + b) % ell; }
    elem sub(const elem& a, const elem& b) const {
        long long r = a - b;
        return r < 0 ? r + ell : r;
    }
    elem neg(const elem& a) const { return a == 0 ? 0 : ell - a; }
    elem mul(const elem& a, const elem& b) const { return a * b % ell; }
    elem inv(const elem& a) const { return mod_inv(a, ell); }
    // acc += a * b, reduced
    void mac(elem& acc, const elem& a, const elem& b) const { acc = (acc + a * b) % ell; }
};

struct RatAr {
    using elem = mpq_class;
    elem zero() const { return 0; }
    elem one() const { return 1; }
    bool is_zero(const elem& a) const { return a == 0; }
    elem add(const elem& a, const elem& b) const { return a + b; }
    elem sub(const elem& a, const elem& b) const { return a - b; }
    elem neg(const elem& a) const { return -a; }
    elem mul(const elem& a, const elem& b) const { return a * b; }
    elem inv(const elem& a) const { return 1 / a; }
    void mac(elem& acc, const elem& a, const elem& b) const { acc += a * b; }
};

template <class Ar>
using Vec = std::vector<typename Ar::elem>;

/******************************************************************************
 * Core elimination templates
 ******************************************************************************/

// In-place reduced row echelon form.  Pivots: columns scanned left to right,
// first nonzero row from the top; pivot normalized to 1, eliminated above and
// below.  Fully deterministic.
template <class Ar>
std::pair<int, std::vector<int>> rref_in_place(const Ar& ar, int rows, int cols, Vec<Ar>& a) {
    int r = 0;
    std::vector<int> piv;
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = -1;
        for (int i = r; i < rows; ++i)
            if (!ar.is_zero(a[i * cols + c])) { p = i; break; }
        if (p < 0) continue;
        if (p != r)
            for (int j = 0; j < cols; ++j) std::swap(a[p * cols + j], a[r * cols + j]);
        auto iv = ar.inv(a[r * cols + c]);
        for (int j = c; j < cols; ++j) a[r * cols + j] = ar.mul(a[r * cols + j], iv);
        for (int i = 0; i < rows; ++i) {
            if (i == r) continue;
            auto f = a[i * cols + c];
            if (ar.is_zero(f)) continue;
            for (int j = c; j < cols; ++j)
                a[i * cols + j] = ar.sub(a[i * cols + j], ar.mul(f, a[r * cols + j]));
        }
        piv.push_back(c);
        ++r;
    }
    return {r, piv};
}

template <class Ar>
Vec<Ar> mat_mul(const Ar& ar, int ra, int ca, const Vec<Ar>& a, int cb, const Vec<Ar>& b) {
    Vec<Ar> out(static_cast<size_t>(ra) * cb, ar.zero());
    for (int i = 0; i < ra; ++i)
        for (int k = 0; k < ca; ++k) {
            const auto& aik = a[i * ca + k];
            if (ar.is_zero(aik)) continue;
            for (int j = 0; j < cb; ++j) ar.mac(out[i * cb + j], aik, b[k * cb + j]);
        }
    return out;
}

// Characteristic polynomial of an upper Hessenberg matrix via the leading
// principal minor recurrence
//   p_k = (t - H[k-1][k-1]) p_{k-1}
//         - sum_i H[i][k-1] (prod_{j=i+1}^{k-1} H[j][j-1]) p_i .
template <class Ar>
Vec<Ar> hessenberg_char_poly(const Ar& ar, int n, const Vec<Ar>& h) {
    std::vector<Vec<Ar>> p(n + 1);
    p[0] = {ar.one()};
    for (int k = 1; k <= n; ++k) {
        Vec<Ar> cur(k + 1, ar.zero());
        const auto& prev = p[k - 1];
        // (t - H[k-1][k-1]) * prev
        for (int d = 0; d < k; ++d) {
            cur[d + 1] = ar.add(cur[d + 1], prev[d]);
            cur[d] = ar.sub(cur[d], ar.mul(h[(k - 1) * n + (k - 1)], prev[d]));
        }
        auto prod = ar.one();
        for (int i = k - 2; i >= 0; --i) {
            prod = ar.mul(prod, h[(i + 1) * n + i]);
            auto coeff = ar.mul(h[i * n + (k - 1)], prod);
            if (ar.is_zero(coeff)) continue;
            for (int d = 0; d <= i; ++d) cur[d] = ar.sub(cur[d], ar.mul(coeff, p[i][d]));
        }
        p[k] = std::move(cur);
    }
    return p[n];
}

// Similarity reduction to upper Hessenberg form, in place.
template <class Ar>
void hessenberg_reduce(const Ar& ar, int n, Vec<Ar>& a) {
    for (int k = 0; k + 2 < n; ++k) {
        int p = -1;
        for (int i = k + 1; i < n; ++i)
            if (!ar.is_zero(a[i * n + k])) { p = i; break; }
        if (p < 0) continue;
        if (p != k + 1) {
            for (int j = 0; j < n; ++j) std::swap(a[p * n + j], a[(k + 1) * n + j]);
            for (int i = 0; i < n; ++i) std::swap(a[i * n + p], a[i * n + (k + 1)]);
        }
        auto iv = ar.inv(a[(k + 1) * n + k]);
        for (int i = k + 2; i < n; ++i) {
            auto f = ar.mul(a[i * n + k], iv);
            if (ar.is_zero(f)) continue;
            // row_i -= f * row_{k+1};  col_{k+1} += f * col_i  (similarity)
            for (int j = 0; j < n; ++j)
                a[i * n + j] = ar.sub(a[i * n + j], ar.mul(f, a[(k + 1) * n + j]));
            for (int r = 0; r < n; ++r)
                a[r * n + (k + 1)] = ar.add(a[r * n + (k + 1)], ar.mul(f, a[r * n + i]));
        }
    }
}

}  // namespace

/******************************************************************************
 * Matrix basics
 ******************************************************************************/

Matrix::Matrix(const Field& f, int rows, int cols) : f_(f), rows_(rows), cols_(cols) {
    require(rows >= 0 && cols >= 0, "matrix: negative dimension");
    if (f_.modular_p()) m_.assign(static_cast<size_t>(rows) * cols, 0);
    else r_.assign(static_cast<size_t>(rows) * cols, mpq_class(0));
}

Matrix Matrix::identity(const Field& f, int n) {
    Matrix a(f, n, n);
    for (int i = 0; i < n; ++i) a.set(i, i, 1);
    return a;
}

Matrix Matrix::scalar_matrix(const Field& f, int n, const Scalar& c) {
    Matrix a(f, n, n);
    for (int i = 0; i < n; ++i) a.set(i, i, c);
    return a;
}

Matrix Matrix::from_ints(const Field& f, int rows, int cols,
                         const std::vector<long long>& entries) {
    require(static_cast<long long>(entries.size()) == static_cast<long long>(rows) * cols,
            "matrix: entry count does not match shape");
    Matrix a(f, rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a.set(i, j, entries[static_cast<size_t>(i) * cols + j]);
    return a;
}

Scalar Matrix::at(int i, int j) const {
    internal_check(i >= 0 && i < rows_ && j >= 0 && j < cols_, "matrix: index out of range");
    size_t k = static_cast<size_t>(i) * cols_ + j;
    if (f_.modular_p()) return Scalar(f_, m_[k]);
    return Scalar(f_, r_[k]);
}

void Matrix::set(int i, int j, const Scalar& v) {
    internal_check(i >= 0 && i < rows_ && j >= 0 && j < cols_, "matrix: index out of range");
    internal_check(v.field() == f_, "matrix: scalar from a different field");
    size_t k = static_cast<size_t>(i) * cols_ + j;
    if (f_.modular_p()) m_[k] = v.residue();
    else r_[k] = v.rational();
}

void Matrix::set(int i, int j, long long v) { set(i, j, Scalar(f_, v)); }

bool Matrix::is_zero() const {
    if (f_.modular_p()) {
        for (const auto& e : m_) if (e != 0) return false;
    } else {
        for (const auto& e : r_) if (e != 0) return false;
    }
    return true;
}

Matrix Matrix::transpose() const {
    Matrix out(f_, cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) {
            size_t src = static_cast<size_t>(i) * cols_ + j;
            size_t dst = static_cast<size_t>(j) * rows_ + i;
            if (f_.modular_p()) out.m_[dst] = m_[src];
            else out.r_[dst] = r_[src];
        }
    return out;
}

Matrix Matrix::scaled(const Scalar& c) const {
    Matrix out(*this);
    if (f_.modular_p()) {
        long long s = c.residue();
        for (auto& e : out.m_) e = e * s % f_.ell;
    } else {
        for (auto& e : out.r_) e *= c.rational();
    }
    return out;
}

void Matrix::axpy(const Scalar& c, const Matrix& b) {
    internal_check(rows_ == b.rows_ && cols_ == b.cols_ && f_ == b.f_,
                   "matrix: axpy shape/field mismatch");
    if (f_.modular_p()) {
        long long s = c.residue();
        for (size_t k = 0; k < m_.size(); ++k) m_[k] = (m_[k] + s * b.m_[k]) % f_.ell;
    } else {
        for (size_t k = 0; k < r_.size(); ++k) r_[k] += c.rational() * b.r_[k];
    }
}

Matrix Matrix::col(int j) const { return cols_selected({j}); }

Matrix Matrix::cols_selected(const std::vector<int>& idx) const {
    Matrix out(f_, rows_, static_cast<int>(idx.size()));
    for (int i = 0; i < rows_; ++i)
        for (size_t j = 0; j < idx.size(); ++j) {
            internal_check(idx[j] >= 0 && idx[j] < cols_, "matrix: column index out of range");
            size_t src = static_cast<size_t>(i) * cols_ + idx[j];
            size_t dst = static_cast<size_t>(i) * idx.size() + j;
            if (f_.modular_p()) out.m_[dst] = m_[src];
            else out.r_[dst] = r_[src];
        }
    return out;
}

Matrix Matrix::rows_selected(const std::vector<int>& idx) const {
    Matrix out(f_, static_cast<int>(idx.size()), cols_);
    for (size_t i = 0; i < idx.size(); ++i) {
        internal_check(idx[i] >= 0 && idx[i] < rows_, "matrix: row index out of range");
        for (int j = 0; j < cols_; ++j) {
            size_t src = static_cast<size_t>(idx[i]) * cols_ + j;
            size_t dst = i * cols_ + j;
            if (f_.modular_p()) out.m_[dst] = m_[src];
            else out.r_[dst] = r_[src];
        }
    }
    return out;
}

Matrix Matrix::operator-() const {
    Matrix out(*this);
    if (f_.modular_p()) {
        for (auto& e : out.m_) e = e == 0 ? 0 : f_.ell - e;
    } else {
        for (auto& e : out.r_) e = -e;
    }
    return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    internal_check(a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.f_ == b.f_,
                   "matrix: addition shape/field mismatch");
    Matrix out(a);
    if (a.f_.modular_p()) {
        for (size_t k = 0; k < out.m_.size(); ++k) out.m_[k] = (out.m_[k] + b.m_[k]) % a.f_.ell;
    } else {
        for (size_t k = 0; k < out.r_.size(); ++k) out.r_[k] += b.r_[k];
    }
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    internal_check(a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.f_ == b.f_,
                   "matrix: subtraction shape/field mismatch");
    Matrix out(a);
    if (a.f_.modular_p()) {
        for (size_t k = 0; k < out.m_.size(); ++k) {
            long long r = out.m_[k] - b.m_[k];
            out.m_[k] = r < 0 ? r + a.f_.ell : r;
        }
    } else {
        for (size_t k = 0; k < out.r_.size(); ++k) out.r_[k] -= b.r_[k];
    }
    return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    internal_check(a.cols_ == b.rows_ && a.f_ == b.f_, "matrix: product shape/field mismatch");
    Matrix out(a.f_, a.rows_, b.cols_);
    if (a.f_.modular_p()) out.m_ = mat_mul(ModAr{a.f_.ell}, a.rows_, a.cols_, a.m_, b.cols_, b.m_);
    else out.r_ = mat_mul(RatAr{}, a.rows_, a.cols_, a.r_, b.cols_, b.r_);
    return out;
}

bool operator==(const Matrix& a, const Matrix& b) {
    if (!(a.f_ == b.f_) || a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    return a.f_.modular_p() ? a.m_ == b.m_ : a.r_ == b.r_;
}

Matrix hcat(const Matrix& a, const Matrix& b) {
    internal_check(a.rows() == b.rows() && a.field() == b.field(), "matrix: hcat mismatch");
    Matrix out(a.field(), a.rows(), a.cols() + b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) out.set(i, j, a.at(i, j));
        for (int j = 0; j < b.cols(); ++j) out.set(i, a.cols() + j, b.at(i, j));
    }
    return out;
}

Matrix vcat(const Matrix& a, const Matrix& b) {
    internal_check(a.cols() == b.cols() && a.field() == b.field(), "matrix: vcat mismatch");
    Matrix out(a.field(), a.rows() + b.rows(), a.cols());
    for (int j = 0; j < a.cols(); ++j) {
        for (int i = 0; i < a.rows(); ++i) out.set(i, j, a.at(i, j));
        for (int i = 0; i < b.rows(); ++i) out.set(a.rows() + i, j, b.at(i, j));
    }
    return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    internal_check(a.field() == b.field(), "matrix: kron field mismatch");
    Matrix out(a.field(), a.rows() * b.rows(), a.cols() * b.cols());
    for (int ia = 0; ia < a.rows(); ++ia)
        for (int ja = 0; ja < a.cols(); ++ja) {
            Scalar v = a.at(ia, ja);
            if (v.is_zero()) continue;
            for (int ib = 0; ib < b.rows(); ++ib)
                for (int jb = 0; jb < b.cols(); ++jb)
                    out.set(ia * b.rows() + ib, ja * b.cols() + jb, v * b.at(ib, jb));
        }
    return out;
}

Matrix block_matrix(const std::vector<std::vector<Matrix>>& grid) {
    internal_check(!grid.empty() && !grid[0].empty(), "matrix: empty block grid");
    const Field& f = grid[0][0].field();
    size_t bcols = grid[0].size();
    int total_rows = 0, total_cols = 0;
    for (const auto& row : grid) {
        internal_check(row.size() == bcols, "matrix: ragged block grid");
        total_rows += row[0].rows();
    }
    for (size_t j = 0; j < bcols; ++j) total_cols += grid[0][j].cols();

    Matrix out(f, total_rows, total_cols);
    int roff = 0;
    for (const auto& row : grid) {
        int expected_rows = row[0].rows();
        int coff = 0;
        for (size_t j = 0; j < bcols; ++j) {
            const Matrix& blk = row[j];
            internal_check(blk.rows() == expected_rows && blk.cols() == grid[0][j].cols() &&
                               blk.field() == f,
                           "matrix: inconsistent block shapes");
            for (int i = 0; i < blk.rows(); ++i)
                for (int c = 0; c < blk.cols(); ++c) out.set(roff + i, coff + c, blk.at(i, c));
            coff += blk.cols();
        }
        roff += expected_rows;
    }
    return out;
}

/******************************************************************************
 * Elimination entry points
 ******************************************************************************/

RrefResult rref(const Matrix& a) {
    RrefResult res;
    res.reduced = a;
    if (a.field().modular_p()) {
        auto [rk, piv] = rref_in_place(ModAr{a.field().ell}, a.rows(), a.cols(),
                                       res.reduced.mod_data());
        res.rank = rk;
        res.pivots = std::move(piv);
    } else {
        auto [rk, piv] = rref_in_place(RatAr{}, a.rows(), a.cols(), res.reduced.rat_data());
        res.rank = rk;
        res.pivots = std::move(piv);
    }
    return res;
}

int rank(const Matrix& a) { return rref(a).rank; }

std::vector<int> pivot_columns(const Matrix& a) { return rref(a).pivots; }

Matrix column_space_basis(const Matrix& a) { return a.cols_selected(pivot_columns(a)); }

Matrix kernel_basis(const Matrix& a) {
    RrefResult r = rref(a);
    std::vector<bool> is_pivot(a.cols(), false);
    for (int c : r.pivots) is_pivot[c] = true;
    std::vector<int> free_cols;
    for (int c = 0; c < a.cols(); ++c)
        if (!is_pivot[c]) free_cols.push_back(c);

    Matrix out(a.field(), a.cols(), static_cast<int>(free_cols.size()));
    for (size_t j = 0; j < free_cols.size(); ++j) {
        int fc = free_cols[j];
        out.set(fc, static_cast<int>(j), 1);
        for (int i = 0; i < r.rank; ++i)
            out.set(r.pivots[i], static_cast<int>(j), -r.reduced.at(i, fc));
    }
    return out;
}

std::optional<Matrix> solve(const Matrix& a, const Matrix& rhs) {
    internal_check(a.rows() == rhs.rows() && a.field() == rhs.field(),
                   "matrix: solve shape/field mismatch");
    RrefResult r = rref(hcat(a, rhs));
    for (int c : r.pivots)
        if (c >= a.cols()) return std::nullopt;
    Matrix x(a.field(), a.cols(), rhs.cols());
    for (int i = 0; i < r.rank; ++i)
        for (int j = 0; j < rhs.cols(); ++j) x.set(r.pivots[i], j, r.reduced.at(i, a.cols() + j));
    return x;
}

std::optional<SolveResult> solve_full(const Matrix& a, const Matrix& rhs) {
    auto x = solve(a, rhs);
    if (!x) return std::nullopt;
    return SolveResult{std::move(*x), kernel_basis(a)};
}

std::optional<Matrix> inverse(const Matrix& a) {
    internal_check(a.rows() == a.cols(), "matrix: inverse of a non-square matrix");
    RrefResult r = rref(hcat(a, Matrix::identity(a.field(), a.rows())));
    if (r.rank < a.rows()) return std::nullopt;
    for (int c : r.pivots)
        if (c >= a.cols()) return std::nullopt;
    std::vector<int> right(a.cols());
    for (int j = 0; j < a.cols(); ++j) right[j] = a.cols() + j;
    return r.reduced.cols_selected(right);
}

/******************************************************************************
 * Characteristic polynomials
 ******************************************************************************/

Matrix char_poly(const Matrix& a) {
    internal_check(a.rows() == a.cols(), "matrix: char_poly of a non-square matrix");
    const int n = a.rows();
    Matrix out(a.field(), 1, n + 1);
    out.set(0, n, 1);
    if (n == 0) return out;

    if (!a.field().modular_p()) {
        // Faddeev-LeVerrier: exact over Q, divides by 1..n.
        std::vector<mpq_class> c(n + 1);
        c[n] = 1;
        Matrix m = a;
        for (int k = 1; k <= n; ++k) {
            mpq_class tr = 0;
            for (int i = 0; i < n; ++i) tr += m.rat_data()[static_cast<size_t>(i) * n + i];
            c[n - k] = -tr / k;
            if (k < n) {
                Matrix shifted = m;
                for (int i = 0; i < n; ++i)
                    shifted.rat_data()[static_cast<size_t>(i) * n + i] += c[n - k];
                m = a * shifted;
            }
        }
        for (int d = 0; d <= n; ++d) out.set(0, d, Scalar(a.field(), c[d]));
        return out;
    }

    ModAr ar{a.field().ell};
    Vec<ModAr> h = a.mod_data();
    hessenberg_reduce(ar, n, h);
    Vec<ModAr> p = hessenberg_char_poly(ar, n, h);
    for (int d = 0; d <= n; ++d) out.set(0, d, Scalar(a.field(), p[d]));
    return out;
}

Matrix poly_mul(const Matrix& p, const Matrix& q) {
    internal_check(p.rows() == 1 && q.rows() == 1 && p.field() == q.field(),
                   "matrix: poly_mul expects coefficient rows over one field");
    Matrix out(p.field(), 1, p.cols() + q.cols() - 1);
    for (int i = 0; i < p.cols(); ++i) {
        Scalar pi = p.at(0, i);
        if (pi.is_zero()) continue;
        for (int j = 0; j < q.cols(); ++j)
            out.set(0, i + j, out.at(0, i + j) + pi * q.at(0, j));
    }
    return out;
}

Scalar poly_eval(const Matrix& p, const Scalar& x) {
    internal_check(p.rows() == 1, "matrix: poly_eval expects a coefficient row");
    Scalar acc(p.field(), 0);
    for (int d = p.cols() - 1; d >= 0; --d) acc = acc * x + p.at(0, d);
    return acc;
}

std::optional<Matrix> poly_div_linear(const Matrix& p, const Scalar& lambda) {
    internal_check(p.rows() == 1 && p.cols() >= 2, "matrix: poly_div_linear needs degree >= 1");
    const int n = p.cols() - 1;
    Matrix q(p.field(), 1, n);
    Scalar carry = p.at(0, n);
    for (int d = n - 1; d >= 0; --d) {
        q.set(0, d, carry);
        carry = p.at(0, d) + lambda * carry;
    }
    if (!carry.is_zero()) return std::nullopt;
    return q;
}

Matrix generalized_eigenspace(const Matrix& a, const Scalar& lambda) {
    internal_check(a.rows() == a.cols(), "matrix: eigenspace of a non-square matrix");
    const int n = a.rows();
    Matrix b = a - Matrix::scalar_matrix(a.field(), n, lambda);
    Matrix pw = b;
    Matrix best = kernel_basis(pw);
    for (int k = 2; k <= n; ++k) {
        if (best.cols() == n) break;
        pw = pw * b;
        Matrix next = kernel_basis(pw);
        if (next.cols() == best.cols()) break;
        best = std::move(next);
    }
    return best;
}

Matrix matrix_power(const Matrix& a, long long k) {
    internal_check(a.rows() == a.cols() && k >= 0, "matrix: power needs square matrix, k >= 0");
    Matrix acc = Matrix::identity(a.field(), a.rows());
    Matrix base = a;
    while (k > 0) {
        if (k & 1) acc = acc * base;
        base = base * base;
        k >>= 1;
    }
    return acc;
}

}  // namespace homform
