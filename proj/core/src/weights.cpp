#include "homform/weights.hpp"

#include <algorithm>
#include <set>

#include <gmpxx.h>

namespace homform {

/******************************************************************************
 * Small helpers
 ******************************************************************************/

namespace {

long long canon_weight(long long modulus, long long p) {
    long long r = p % modulus;
    return r < 0 ? r + modulus : r;
}

void paste(Matrix& dst, int r0, int c0, const Matrix& src) {
    for (int i = 0; i < src.rows(); ++i)
        for (int j = 0; j < src.cols(); ++j) dst.set(r0 + i, c0 + j, src.at(i, j));
}

Matrix hcat_all(const Field& f, int rows, const std::vector<Matrix>& parts) {
    int total = 0;
    for (const Matrix& m : parts) total += m.cols();
    Matrix out(f, rows, total);
    int off = 0;
    for (const Matrix& m : parts) {
        paste(out, 0, off, m);
        off += m.cols();
    }
    return out;
}

const WeightSummand* find_summand(const WeightGrading& g, int n, long long p) {
    auto it = g.at.find(n);
    if (it == g.at.end()) return nullptr;
    for (const WeightSummand& s : it->second)
        if (s.p == p) return &s;
    return nullptr;
}

std::string deg_str(int n) { return std::to_string(n); }

}  // namespace

/******************************************************************************
 * Graded complexes
 ******************************************************************************/

GradedComplex make_graded_complex(Complex c, WeightGrading g) {
    const Field& f = c.field();
    if (g.cyclic) require(g.modulus >= 1, "weight grading: cyclic modulus must be positive");

    for (auto& [n, sums] : g.at) {
        require(!sums.empty(), "weight grading: empty summand list in degree " + deg_str(n));
        require(c.dim(n) > 0, "weight grading: summands attached to zero degree " + deg_str(n));
        int total = 0;
        std::vector<Matrix> bases;
        for (size_t i = 0; i < sums.size(); ++i) {
            const WeightSummand& s = sums[i];
            if (g.cyclic)
                require(s.p >= 0 && s.p < g.modulus,
                        "weight grading: weight out of range in degree " + deg_str(n));
            if (i > 0)
                require(sums[i - 1].p < s.p,
                        "weight grading: weights must be strictly ascending in degree " + deg_str(n));
            require(s.basis.field() == f, "weight grading: field mismatch in degree " + deg_str(n));
            require(s.basis.rows() == c.dim(n) && s.basis.cols() >= 1,
                    "weight grading: summand shape mismatch in degree " + deg_str(n));
            require(rank(s.basis) == s.basis.cols(),
                    "weight grading: dependent summand basis in degree " + deg_str(n));
            total += s.basis.cols();
            bases.push_back(s.basis);
        }
        require(total == c.dim(n),
                "weight grading: summand dimensions do not add up in degree " + deg_str(n));
        require(rank(hcat_all(f, c.dim(n), bases)) == c.dim(n),
                "weight grading: summands do not form a direct sum in degree " + deg_str(n));
    }
    for (int n = c.lo(); n <= c.hi(); ++n)
        if (c.dim(n) > 0)
            require(g.at.count(n) > 0, "weight grading: degree " + deg_str(n) + " is ungraded");

    for (auto& [n, sums] : g.at) {
        if (c.dim(n - 1) == 0) continue;
        for (const WeightSummand& s : sums) {
            Matrix img = c.d(n) * s.basis;
            const WeightSummand* below = find_summand(g, n - 1, s.p);
            if (below)
                require(solve(below->basis, img).has_value(),
                        "weight grading: differential does not preserve weight " +
                            std::to_string(s.p) + " out of degree " + deg_str(n));
            else
                require(img.is_zero(), "weight grading: differential maps weight " +
                                           std::to_string(s.p) + " of degree " + deg_str(n) +
                                           " onto a missing weight");
        }
    }
    return GradedComplex{std::move(c), std::move(g)};
}

WeightSlice weight_slice(const GradedComplex& g, long long p) {
    const Complex& c = g.complex;
    const Field& f = c.field();
    std::map<int, int> dims;
    DegMap incl, diffs;
    for (auto& [n, sums] : g.grading.at)
        for (const WeightSummand& s : sums)
            if (s.p == p) {
                dims[n] = s.basis.cols();
                incl[n] = s.basis;
            }
    for (auto& [n, dn] : dims) {
        auto below = incl.find(n - 1);
        if (below == incl.end()) continue;
        Matrix img = c.d(n) * incl.at(n);
        auto sol = solve(below->second, img);
        internal_check(sol.has_value(), "weight slice: differential left the slice");
        if (!sol->is_zero()) diffs[n] = std::move(*sol);
    }
    return WeightSlice{Complex::build(f, c.cohomological_p(), dims, diffs), std::move(incl)};
}

int weight_dim(const GradedComplex& g, int n, long long p) {
    const WeightSummand* s = find_summand(g.grading, n, p);
    return s ? s->basis.cols() : 0;
}

std::vector<long long> weights_present(const GradedComplex& g) {
    std::set<long long> ws;
    for (auto& [n, sums] : g.grading.at)
        for (const WeightSummand& s : sums) ws.insert(s.p);
    return std::vector<long long>(ws.begin(), ws.end());
}

/******************************************************************************
 * Grading a module by the eigenvalues of its endomorphism
 ******************************************************************************/

ModuleGrading tate_grade_module(const Field& f, const Matrix& phi) {
    require(f.modular_p(), "tate grading: modular field required");
    require(phi.field() == f, "tate grading: field mismatch");
    require(phi.rows() == phi.cols(), "tate grading: square matrix required");
    int n = phi.rows();
    ModuleGrading out;
    if (n == 0) {
        out.ok = true;
        return out;
    }
    require(rank(phi) == n, "tate grading: endomorphism must be invertible");
    int covered = 0;
    for (int k = 0; k < f.h; ++k) {
        Matrix e = generalized_eigenspace(phi, q_power(f, k));
        if (e.cols() == 0) continue;
        covered += e.cols();
        out.summands.push_back(WeightSummand{k, std::move(e)});
    }
    out.defect = n - covered;
    out.ok = out.defect == 0;
    return out;
}

ModuleGrading weil_grade_module(const Field& f, const Matrix& phi) {
    require(!f.modular_p(), "weil grading: rational field required");
    require(phi.field() == f, "weil grading: field mismatch");
    require(phi.rows() == phi.cols(), "weil grading: square matrix required");
    int n = phi.rows();
    ModuleGrading out;
    if (n == 0) {
        out.ok = true;
        return out;
    }
    require(rank(phi) == n, "weil grading: endomorphism must be invertible");

    Matrix cp = char_poly(phi);
    std::map<long long, Matrix> found;
    auto try_exponent = [&](long long k) {
        Scalar lam = q_power(f, k);
        if (!poly_eval(cp, lam).is_zero()) return;
        Matrix e = generalized_eigenspace(phi, lam);
        if (e.cols() > 0) found.emplace(2 * k, std::move(e));
    };

    if (f.q == 1) {
        try_exponent(0);
    } else {
        // Exact Cauchy bounds: every eigenvalue lambda has |lambda| <= 1 + max|c_i|
        // and |1/lambda| <= 1 + max|c_i / c_0|, so only finitely many powers of q
        // can be roots of the characteristic polynomial.
        mpq_class c0 = abs(cp.at(0, 0).rational());
        mpq_class up = 1, down = 1;
        for (int i = 0; i < n; ++i) {
            mpq_class ci = abs(cp.at(0, i).rational());
            up = std::max(up, mpq_class(1 + ci));
            if (i > 0) down = std::max(down, mpq_class(1 + ci / c0));
        }
        down = std::max(down, mpq_class(1 + 1 / c0));
        mpz_class qz = static_cast<long>(f.q);
        mpq_class qk = 1;
        for (long long k = 0; qk <= up; ++k, qk *= qz) try_exponent(k);
        qk = qz;
        for (long long k = -1; qk <= down; --k, qk *= qz) try_exponent(k);
    }

    int covered = 0;
    for (auto& [w, e] : found) {
        covered += e.cols();
        out.summands.push_back(WeightSummand{w, std::move(e)});
    }
    out.defect = n - covered;
    out.ok = out.defect == 0;
    return out;
}

/******************************************************************************
 * Grading a complex degree by degree
 ******************************************************************************/

namespace {

ComplexGradeOutcome grade_complex_by(const EndoComplex& x, bool tate) {
    const Field& f = x.field();
    const Complex& c = x.complex();
    ComplexGradeOutcome out;
    WeightGrading wg;
    wg.cyclic = tate;
    wg.modulus = tate ? f.h : 1;
    for (int n = c.lo(); n <= c.hi(); ++n) {
        int dn = c.dim(n);
        if (dn == 0) continue;
        Matrix phi = x.endo(n);
        int rk = rank(phi);
        if (rk < dn) {
            out.fail_degree = c.display_degree(n);
            out.defect = dn - rk;
            out.reason = "endomorphism is singular in degree " + deg_str(c.display_degree(n));
            return out;
        }
        ModuleGrading mg = tate ? tate_grade_module(f, phi) : weil_grade_module(f, phi);
        if (!mg.ok) {
            out.fail_degree = c.display_degree(n);
            out.defect = mg.defect;
            out.reason = "eigenvalues in degree " + deg_str(c.display_degree(n)) +
                         " are not all powers of q (defect " + std::to_string(mg.defect) + ")";
            return out;
        }
        wg.at[n] = std::move(mg.summands);
    }
    out.graded = make_graded_complex(c, std::move(wg));
    return out;
}

}  // namespace

ComplexGradeOutcome tate_grade_complex(const EndoComplex& x) {
    require(x.field().modular_p(), "tate grading: modular field required");
    return grade_complex_by(x, true);
}

ComplexGradeOutcome weil_grade_complex(const EndoComplex& x) {
    require(!x.field().modular_p(), "weil grading: rational field required");
    return grade_complex_by(x, false);
}

/******************************************************************************
 * Purity
 ******************************************************************************/

namespace {

void check_nonneg_homological(const Complex& c, const std::string& who) {
    require(!c.cohomological_p() && c.lo() >= 0,
            who + ": requires a non-negatively graded homological complex");
}

void check_slope(const WeightGrading& g, const Frac& alpha, const std::string& who) {
    require(alpha.positive(), who + ": slope must be positive");
    if (g.cyclic)
        require(alpha.num < g.modulus * alpha.den,
                who + ": slope must be smaller than the weight modulus");
}

}  // namespace

PurityReport purity_check(const GradedComplex& g, const Frac& alpha) {
    check_nonneg_homological(g.complex, "purity");
    check_slope(g.grading, alpha, "purity");
    PurityReport rep;
    rep.alpha = alpha;
    for (long long p : weights_present(g)) {
        WeightSlice s = weight_slice(g, p);
        HomologyData hd = homology(s.complex);
        for (int n = s.complex.lo(); n <= s.complex.hi(); ++n) {
            int h = hd.dim(n);
            if (h == 0) continue;
            rep.h_dims[n][p] = h;
            bool on_slope = alpha.times_is_integer(n);
            if (on_slope) {
                long long want = alpha.times(n);
                on_slope = g.grading.cyclic ? canon_weight(g.grading.modulus, want) == p
                                            : want == p;
            }
            if (!on_slope) {
                rep.pure = false;
                rep.failures.push_back(PurityCell{n, p, h});
            }
        }
    }
    std::sort(rep.failures.begin(), rep.failures.end(),
              [](const PurityCell& x, const PurityCell& y) {
                  return x.degree != y.degree ? x.degree < y.degree : x.weight < y.weight;
              });
    return rep;
}

/******************************************************************************
 * Truncations
 ******************************************************************************/

namespace {

// Canonical truncation >= cut of a plain complex; degrees above the cut stay,
// the cut degree becomes the kernel of d, everything below is dropped.  The
// DegMap gives the degreewise inclusion into the input.
std::pair<Complex, DegMap> truncate_min(const Complex& s, long long cut) {
    const Field& f = s.field();
    std::map<int, int> dims;
    DegMap incl, diffs;
    for (int n = s.lo(); n <= s.hi(); ++n) {
        if (s.dim(n) == 0 || n < cut) continue;
        if (n > cut) {
            dims[n] = s.dim(n);
            incl[n] = Matrix::identity(f, s.dim(n));
        } else {
            Matrix k = kernel_basis(s.d(n));
            if (k.cols() > 0) {
                dims[n] = k.cols();
                incl[n] = std::move(k);
            }
        }
    }
    for (auto& [n, dn] : dims) {
        if (s.dim(n - 1) == 0) continue;
        Matrix img = s.d(n) * incl.at(n);
        auto below = incl.find(n - 1);
        if (below == incl.end()) {
            internal_check(img.is_zero(), "canonical truncation: differential escapes the cut");
            continue;
        }
        auto sol = solve(below->second, img);
        internal_check(sol.has_value(), "canonical truncation: differential left the kernel");
        if (!sol->is_zero()) diffs[n] = std::move(*sol);
    }
    return {Complex::build(f, false, dims, diffs), std::move(incl)};
}

}  // namespace

TauResult truncation_tau(const GradedComplex& g, const Frac& alpha) {
    check_nonneg_homological(g.complex, "truncation tau");
    check_slope(g.grading, alpha, "truncation tau");
    const Complex& a = g.complex;
    const Field& f = a.field();

    struct Piece {
        long long p;
        Complex trunc;
        DegMap ambient;     // trunc_n -> A_n
        DegMap local;       // trunc_n -> slice_n
    };
    std::vector<Piece> pieces;
    for (long long p : weights_present(g)) {
        WeightSlice s = weight_slice(g, p);
        auto [tc, local] = truncate_min(s.complex, alpha.ceil_div(p));
        if (tc.lo() > tc.hi()) continue;
        DegMap ambient;
        for (int n = tc.lo(); n <= tc.hi(); ++n)
            if (tc.dim(n) > 0) ambient[n] = s.inclusion.at(n) * local.at(n);
        pieces.push_back(Piece{p, std::move(tc), std::move(ambient), std::move(local)});
    }

    std::map<int, int> dims;
    for (const Piece& pc : pieces)
        for (int n = pc.trunc.lo(); n <= pc.trunc.hi(); ++n)
            if (pc.trunc.dim(n) > 0) dims[n] += pc.trunc.dim(n);

    DegMap diffs;
    for (auto& [n, dn] : dims) {
        if (dims.count(n - 1) == 0) continue;
        Matrix d(f, dims.at(n - 1), dn);
        int roff = 0, coff = 0;
        for (const Piece& pc : pieces) {
            int rows = pc.trunc.dim(n - 1), cols = pc.trunc.dim(n);
            if (rows > 0 && cols > 0) paste(d, roff, coff, pc.trunc.d(n));
            roff += rows;
            coff += cols;
        }
        if (!d.is_zero()) diffs[n] = std::move(d);
    }

    WeightGrading wg;
    wg.cyclic = g.grading.cyclic;
    wg.modulus = g.grading.modulus;
    DegMap incl;
    for (auto& [n, dn] : dims) {
        std::vector<WeightSummand> sums;
        Matrix into(f, a.dim(n), dn);
        int off = 0;
        for (const Piece& pc : pieces) {
            int cols = pc.trunc.dim(n);
            if (cols == 0) continue;
            Matrix unit(f, dn, cols);
            for (int i = 0; i < cols; ++i) unit.set(off + i, i, Scalar(f, 1));
            sums.push_back(WeightSummand{pc.p, std::move(unit)});
            paste(into, 0, off, pc.ambient.at(n));
            off += cols;
        }
        wg.at[n] = std::move(sums);
        incl[n] = std::move(into);
    }

    TauResult out{make_graded_complex(Complex::build(f, false, dims, diffs), std::move(wg)), {}};
    out.inclusion = make_chain_map(out.tau.complex, a, std::move(incl));
    return out;
}

BrutalTruncation t_leq_n(const Complex& c, long long n_bound) {
    check_nonneg_homological(c, "brutal truncation");
    require(n_bound >= 0, "brutal truncation: bound must be non-negative");
    const Field& f = c.field();

    std::map<int, int> dims;
    DegMap diffs, proj;
    for (int n = c.lo(); n <= c.hi() && n < n_bound; ++n) {
        if (c.dim(n) == 0) continue;
        dims[n] = c.dim(n);
        proj[n] = Matrix::identity(f, c.dim(n));
        if (n > c.lo() && c.dim(n - 1) > 0 && !c.d(n).is_zero()) diffs[n] = c.d(n);
    }
    if (n_bound <= c.hi() && c.dim((int)n_bound) > 0) {
        int nb = (int)n_bound;
        int dn = c.dim(nb);
        Matrix bounds = column_space_basis(c.d(nb + 1));
        int b = bounds.cols();
        if (dn - b > 0) {
            // complete the boundary basis by unit vectors, deterministically
            Matrix cand = hcat(bounds, Matrix::identity(f, dn));
            std::vector<int> piv = pivot_columns(cand);
            std::vector<int> unit_idx;
            for (int j : piv)
                if (j >= b) unit_idx.push_back(j - b);
            internal_check((int)unit_idx.size() == dn - b, "brutal truncation: completion failed");
            Matrix completion(f, dn, dn - b);
            for (int k = 0; k < dn - b; ++k) completion.set(unit_idx[k], k, Scalar(f, 1));
            Matrix full = hcat(bounds, completion);
            auto inv = inverse(full);
            internal_check(inv.has_value(), "brutal truncation: completion not invertible");
            std::vector<int> last;
            for (int i = b; i < dn; ++i) last.push_back(i);
            dims[nb] = dn - b;
            proj[nb] = inv->rows_selected(last);
            if (dims.count(nb - 1) > 0) {
                Matrix dbar = c.d(nb) * completion;
                if (!dbar.is_zero()) diffs[nb] = std::move(dbar);
            }
        }
    }

    BrutalTruncation out;
    out.complex = Complex::build(f, false, dims, diffs);
    out.projection = make_chain_map(c, out.complex, std::move(proj));
    out.report = is_n_quasi_iso(out.projection, n_bound);
    internal_check(out.report.ok, "brutal truncation: projection is not an n-quasi-iso");
    return out;
}

/******************************************************************************
 * Graded homology
 ******************************************************************************/

GradedHomology graded_homology(const GradedComplex& g) {
    const Complex& a = g.complex;
    const Field& f = a.field();
    GradedHomology out;
    std::vector<long long> ws = weights_present(g);
    for (long long p : ws) {
        WeightSlice s = weight_slice(g, p);
        out.per_weight.emplace(p, homology(s.complex));
        out.slices.emplace(p, std::move(s));
    }

    std::map<int, int> dims;
    for (int n = a.lo(); n <= a.hi(); ++n) {
        int total = 0;
        for (long long p : ws) total += out.per_weight.at(p).dim(n);
        if (total > 0) dims[n] = total;
    }

    WeightGrading wg;
    wg.cyclic = g.grading.cyclic;
    wg.modulus = g.grading.modulus;
    for (auto& [n, total] : dims) {
        std::vector<WeightSummand> sums;
        Matrix sect(f, a.dim(n), total);
        int off = 0;
        for (long long p : ws) {
            const HomologyData& hd = out.per_weight.at(p);
            int h = hd.dim(n);
            if (h == 0) continue;
            Matrix unit(f, total, h);
            for (int i = 0; i < h; ++i) unit.set(off + i, i, Scalar(f, 1));
            sums.push_back(WeightSummand{p, std::move(unit)});
            paste(sect, 0, off, out.slices.at(p).inclusion.at(n) * hd.section(n));
            off += h;
        }
        wg.at[n] = std::move(sums);
        out.section[n] = std::move(sect);
    }

    for (auto& [n, total] : dims) {
        std::vector<Matrix> incls;
        for (long long p : ws) {
            auto it = out.slices.at(p).inclusion.find(n);
            if (it != out.slices.at(p).inclusion.end()) incls.push_back(it->second);
        }
        Matrix full = hcat_all(f, a.dim(n), incls);
        auto inv = inverse(full);
        internal_check(inv.has_value(), "graded homology: slice bases do not span");
        Matrix proj(f, total, a.dim(n));
        int roff = 0, hoff = 0;
        for (long long p : ws) {
            auto it = out.slices.at(p).inclusion.find(n);
            if (it == out.slices.at(p).inclusion.end()) continue;
            int sd = it->second.cols();
            const HomologyData& hd = out.per_weight.at(p);
            int h = hd.dim(n);
            if (h > 0) {
                std::vector<int> rows;
                for (int i = 0; i < sd; ++i) rows.push_back(roff + i);
                paste(proj, hoff, 0, hd.projection(n) * inv->rows_selected(rows));
                hoff += h;
            }
            roff += sd;
        }
        out.projection[n] = std::move(proj);
    }

    out.h = make_graded_complex(Complex::build(f, a.cohomological_p(), dims, {}), std::move(wg));
    return out;
}

/******************************************************************************
 * The comparison zigzag
 ******************************************************************************/

GradedZigzag formality_zigzag_graded(const GradedComplex& a, const Frac& alpha) {
    GradedZigzag z;
    z.alpha = alpha;
    const Complex& A = a.complex;
    const Field& f = A.field();
    if (A.cohomological_p() || A.lo() < 0) {
        z.failure_stage = "input";
        z.failure_detail = "requires a non-negatively graded homological complex";
        return z;
    }
    if (!alpha.positive() ||
        (a.grading.cyclic && alpha.num >= a.grading.modulus * alpha.den)) {
        z.failure_stage = "input";
        z.failure_detail = a.grading.cyclic
                               ? "slope must satisfy 0 < alpha < modulus"
                               : "slope must be positive";
        return z;
    }

    z.purity = purity_check(a, alpha);
    if (!z.purity.pure) {
        const PurityCell& cell = z.purity.failures.front();
        z.failure_stage = "purity";
        z.failure_detail = "homology of weight " + std::to_string(cell.weight) + " in degree " +
                           deg_str(cell.degree) + " has dimension " + std::to_string(cell.hdim) +
                           " off the purity line";
        return z;
    }

    if (a.grading.cyclic) z.n_bound = alpha.floor_div(a.grading.modulus - 1);

    TauResult t = truncation_tau(a, alpha);
    z.tau = std::move(t.tau);
    z.phi = std::move(t.inclusion);
    z.phi_report = is_quasi_iso(z.phi);

    GradedHomology gh = graded_homology(a);
    z.homology = gh.h;
    const Complex& H = gh.h.complex;

    std::map<int, int> tdims;
    for (int n = H.lo(); n <= H.hi(); ++n)
        if (H.dim(n) > 0 && (!z.n_bound || n <= *z.n_bound)) tdims[n] = H.dim(n);
    z.truncated_homology = Complex::build(f, false, tdims, {});

    DegMap up;
    for (auto& [n, dn] : tdims) up[n] = Matrix::identity(f, dn);
    z.upsilon = make_chain_map(H, z.truncated_homology, std::move(up));
    z.upsilon_report =
        z.n_bound ? is_n_quasi_iso(z.upsilon, *z.n_bound) : is_quasi_iso(z.upsilon);

    DegMap psi;
    for (int n = z.tau.complex.lo(); n <= z.tau.complex.hi(); ++n) {
        int rows = z.truncated_homology.dim(n);
        int cols = z.tau.complex.dim(n);
        if (rows == 0 || cols == 0) continue;
        Matrix m(f, rows, cols);
        auto hsums = gh.h.grading.at.find(n);
        auto tsums = z.tau.grading.at.find(n);
        internal_check(hsums != gh.h.grading.at.end() && tsums != z.tau.grading.at.end(),
                       "zigzag: missing summand lists");
        int coff = 0;
        for (const WeightSummand& ts : tsums->second) {
            int tcols = ts.basis.cols();
            if (n == alpha.ceil_div(ts.p)) {
                int roff = 0;
                for (const WeightSummand& hs : hsums->second) {
                    if (hs.p == ts.p) break;
                    roff += hs.basis.cols();
                }
                const HomologyData& hd = gh.per_weight.at(ts.p);
                if (hd.dim(n) > 0) {
                    Matrix k = kernel_basis(gh.slices.at(ts.p).complex.d(n));
                    internal_check(k.cols() == tcols, "zigzag: kernel cut mismatch");
                    paste(m, roff, coff, hd.projection(n) * k);
                }
            }
            coff += tcols;
        }
        if (!m.is_zero()) psi[n] = std::move(m);
    }
    z.psi = make_chain_map(z.tau.complex, z.truncated_homology, std::move(psi));
    z.psi_report = z.n_bound ? is_n_quasi_iso(z.psi, *z.n_bound) : is_quasi_iso(z.psi);

    z.ok = z.phi_report.ok && z.psi_report.ok && z.upsilon_report.ok;
    if (!z.ok) {
        z.failure_stage = "zigzag";
        z.failure_detail = !z.phi_report.ok   ? "truncation inclusion is not a quasi-isomorphism"
                           : !z.psi_report.ok ? "projection to truncated homology misses its bound"
                                              : "homology truncation misses its bound";
    }
    return z;
}

/******************************************************************************
 * Tensor products of graded complexes
 ******************************************************************************/

GradedComplex tensor_graded(const GradedComplex& a, const GradedComplex& b) {
    require(a.complex.field() == b.complex.field(), "graded tensor: field mismatch");
    require(a.grading.cyclic == b.grading.cyclic, "graded tensor: grading kind mismatch");
    if (a.grading.cyclic)
        require(a.grading.modulus == b.grading.modulus, "graded tensor: modulus mismatch");

    Complex t = tensor(a.complex, b.complex);
    const Field& f = t.field();
    auto layout = tensor_layout(a.complex, b.complex);

    WeightGrading wg;
    wg.cyclic = a.grading.cyclic;
    wg.modulus = a.grading.modulus;
    for (auto& [n, blocks] : layout) {
        std::map<long long, std::vector<Matrix>> parts;
        for (const TensorBlock& blk : blocks) {
            auto ia = a.grading.at.find(blk.left_deg);
            auto ib = b.grading.at.find(blk.right_deg);
            internal_check(ia != a.grading.at.end() && ib != b.grading.at.end(),
                           "graded tensor: ungraded factor degree");
            for (const WeightSummand& sa : ia->second)
                for (const WeightSummand& sb : ib->second) {
                    long long w = wg.cyclic ? canon_weight(wg.modulus, sa.p + sb.p)
                                            : sa.p + sb.p;
                    Matrix kk = kron(sa.basis, sb.basis);
                    Matrix emb(f, t.dim(n), kk.cols());
                    paste(emb, blk.offset, 0, kk);
                    parts[w].push_back(std::move(emb));
                }
        }
        std::vector<WeightSummand> sums;
        for (auto& [w, vec] : parts)
            sums.push_back(WeightSummand{w, hcat_all(f, t.dim(n), vec)});
        wg.at[n] = std::move(sums);
    }
    return make_graded_complex(std::move(t), std::move(wg));
}

MonoidalityReport psi_monoidality(const GradedComplex& a, const GradedComplex& b,
                                  const Frac& alpha) {
    MonoidalityReport rep;
    GradedZigzag za = formality_zigzag_graded(a, alpha);
    if (!za.ok) {
        rep.detail = "left factor: " + za.failure_detail;
        return rep;
    }
    GradedZigzag zb = formality_zigzag_graded(b, alpha);
    if (!zb.ok) {
        rep.detail = "right factor: " + zb.failure_detail;
        return rep;
    }
    GradedComplex ab = tensor_graded(a, b);
    GradedZigzag zab = formality_zigzag_graded(ab, alpha);
    if (!zab.ok) {
        rep.detail = "tensor product: " + zab.failure_detail;
        return rep;
    }

    // mu_tau: tau A (x) tau B -> tau(A (x) B), the unique map through the inclusions
    ChainMap incl_prod = tensor_chain_map(za.phi, zb.phi);
    const Complex& tprod = incl_prod.src;
    DegMap mu_tau_comp;
    for (int n = tprod.lo(); n <= tprod.hi(); ++n) {
        if (tprod.dim(n) == 0) continue;
        auto sol = solve(chain_map_at(zab.phi, n), chain_map_at(incl_prod, n));
        internal_check(sol.has_value(),
                       "monoidality: tensor of truncations escapes the truncated tensor");
        if (!sol->is_zero()) mu_tau_comp[n] = std::move(*sol);
    }
    ChainMap mu_tau = make_chain_map(tprod, zab.tau.complex, std::move(mu_tau_comp));

    // mu on truncated homology: Kunneth product [x] (x) [y] -> [x (x) y]
    GradedHomology ga = graded_homology(a);
    GradedHomology gb = graded_homology(b);
    GradedHomology gab = graded_homology(ab);
    ChainMap sect_a = make_chain_map(ga.h.complex, a.complex, ga.section);
    ChainMap sect_b = make_chain_map(gb.h.complex, b.complex, gb.section);
    ChainMap reps = tensor_chain_map(sect_a, sect_b);

    Complex tht = tensor(za.truncated_homology, zb.truncated_homology);
    DegMap mu_t_comp;
    for (int n = tht.lo(); n <= tht.hi(); ++n) {
        int rows = zab.truncated_homology.dim(n);
        if (tht.dim(n) == 0 || rows == 0) continue;
        internal_check(reps.src.dim(n) == tht.dim(n),
                       "monoidality: truncated homology layout mismatch");
        Matrix mu = gab.projection.at(n) * chain_map_at(reps, n);
        if (!mu.is_zero()) mu_t_comp[n] = std::move(mu);
    }
    ChainMap mu_t = make_chain_map(tht, zab.truncated_homology, std::move(mu_t_comp));

    ChainMap psis = tensor_chain_map(za.psi, zb.psi);
    for (int n = tprod.lo(); n <= tprod.hi(); ++n) {
        if (tprod.dim(n) == 0) continue;
        Matrix lhs = chain_map_at(mu_t, n) * chain_map_at(psis, n);
        Matrix rhs = chain_map_at(zab.psi, n) * chain_map_at(mu_tau, n);
        if (!(lhs == rhs)) {
            rep.fail_degree = n;
            rep.detail = "square does not commute in degree " + deg_str(n);
            return rep;
        }
    }
    rep.ok = true;
    return rep;
}

/******************************************************************************
 * End-to-end witness for a complex with endomorphism
 ******************************************************************************/

FormalityWitness formality_zigzag_complex(const EndoComplex& x, const Frac& alpha) {
    FormalityWitness w;
    w.field = x.field();
    w.alpha = alpha;
    const Complex& c = x.complex();
    check_nonneg_homological(c, "formality witness");
    require(alpha.positive(), "formality witness: slope must be positive");
    if (w.field.modular_p())
        require(alpha.num < (long long)w.field.h * alpha.den,
                "formality witness: slope must be smaller than the order of q");

    w.model = homology_model(x);
    ComplexGradeOutcome gr = w.field.modular_p() ? tate_grade_complex(w.model->model)
                                                 : weil_grade_complex(w.model->model);
    if (!gr.graded) {
        w.failure_stage = "grading";
        w.failure_detail = gr.reason;
        return w;
    }
    w.graded = std::move(*gr.graded);

    GradedZigzag z = formality_zigzag_graded(*w.graded, alpha);
    bool zok = z.ok;
    std::string zstage = z.failure_stage, zdetail = z.failure_detail;
    w.zigzag = std::move(z);
    if (!zok) {
        w.failure_stage = zstage;
        w.failure_detail = zdetail;
        return w;
    }

    const GradedZigzag& zz = *w.zigzag;
    if (zz.n_bound) {
        w.n_bound = *zz.n_bound;
        w.full = false;
    } else {
        w.full = true;
        w.n_bound = std::max(0, c.hi());
    }

    // On the zero-differential graded model every zigzag arrow must be the
    // identity matrix through the bound; check that literally.
    long long cap = w.n_bound;
    const Field& f = w.field;
    auto identity_through = [&](const ChainMap& m) {
        for (int n = m.src.lo(); n <= m.src.hi(); ++n) {
            if ((long long)n > cap) continue;
            Matrix mm = chain_map_at(m, n);
            if (mm.rows() != mm.cols()) return false;
            if (!(mm == Matrix::identity(f, mm.rows()))) return false;
        }
        for (int n = m.tgt.lo(); n <= m.tgt.hi(); ++n)
            if ((long long)n <= cap && m.tgt.dim(n) != m.src.dim(n)) return false;
        return true;
    };
    w.identity_composite =
        identity_through(zz.phi) && identity_through(zz.psi) && identity_through(zz.upsilon);
    if (!w.identity_composite) {
        w.failure_stage = "zigzag";
        w.failure_detail = "composite is not the identity in the recorded bases";
        return w;
    }
    w.ok = true;
    return w;
}

}  // namespace homform
