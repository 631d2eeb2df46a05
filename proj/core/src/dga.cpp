#include "homform/dga.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace homform {

namespace {

long long canon_mod(long long p, long long m) {
    long long r = p % m;
    return r < 0 ? r + m : r;
}

// The bilinear product of coordinate columns against a raw structure table.
Matrix table_product(const Field& f, int n, const Matrix& mult, const Matrix& u, const Matrix& v) {
    Matrix out(f, n, 1);
    for (int i = 0; i < n; ++i) {
        Scalar ui = u.at(i, 0);
        if (ui.is_zero()) continue;
        for (int j = 0; j < n; ++j) {
            Scalar vj = v.at(j, 0);
            if (vj.is_zero()) continue;
            out.axpy(ui * vj, mult.col(i * n + j));
        }
    }
    return out;
}

Matrix hcat_all(const Field& f, int rows, const std::vector<Matrix>& parts) {
    Matrix out(f, rows, 0);
    for (const Matrix& p : parts) out = hcat(out, p);
    return out;
}

}  // namespace

/******************************************************************************
 * WeightedDGA
 ******************************************************************************/

std::vector<int> WeightedDGA::degree_indices(int n) const {
    std::vector<int> out;
    for (int i = 0; i < dim(); ++i)
        if (basis_[i].deg == n) out.push_back(i);
    return out;
}

std::vector<int> WeightedDGA::slice_indices(int n, long long p) const {
    std::vector<int> out;
    for (int i = 0; i < dim(); ++i)
        if (basis_[i].deg == n && basis_[i].weight == p) out.push_back(i);
    return out;
}

Matrix WeightedDGA::product(const Matrix& u, const Matrix& v) const {
    internal_check(u.rows() == dim() && u.cols() == 1 && v.rows() == dim() && v.cols() == 1,
                   "dga product: operand shape mismatch");
    return table_product(f_, dim(), mult_, u, v);
}

Matrix WeightedDGA::basis_vector(int i) const {
    Matrix e(f_, dim(), 1);
    e.set(i, 0, 1);
    return e;
}

Matrix WeightedDGA::structure_column(int i, int j) const {
    return mult_.col(i * dim() + j);
}

bool operator==(const WeightedDGA& a, const WeightedDGA& b) {
    return a.f_ == b.f_ && a.m_ == b.m_ && a.basis_ == b.basis_ && a.unit_ == b.unit_ &&
           a.mult_ == b.mult_ && a.diff_ == b.diff_;
}

/******************************************************************************
 * Validation
 ******************************************************************************/

std::vector<std::string> dga_violations(const Field& f, long long modulus,
                                        const std::vector<DgaElement>& basis, int unit,
                                        const Matrix& mult, const Matrix& diff) {
    std::vector<std::string> out;
    const int n = static_cast<int>(basis.size());

    if (modulus < 1) out.push_back("modulus must be a positive integer");
    if (n == 0) out.push_back("basis must be nonempty");
    if (mult.rows() != n || mult.cols() != n * n)
        out.push_back("structure-constant matrix must be dim x dim^2");
    if (diff.rows() != n || diff.cols() != n)
        out.push_back("differential matrix must be dim x dim");
    if (!(mult.field() == f)) out.push_back("structure-constant matrix is over the wrong field");
    if (!(diff.field() == f)) out.push_back("differential matrix is over the wrong field");
    if (!out.empty()) return out;    // shapes broken: nothing below is indexable

    std::set<std::string> labels;
    for (int i = 0; i < n; ++i) {
        const DgaElement& e = basis[i];
        std::string who = "basis '" + e.label + "'";
        if (e.label.empty()) out.push_back("basis element " + std::to_string(i) + " has an empty label");
        if (!labels.insert(e.label).second) out.push_back(who + ": duplicate label");
        if (e.deg < 0) out.push_back(who + ": negative degree");
        if (e.weight < 0 || e.weight >= modulus)
            out.push_back(who + ": weight outside [0, modulus)");
    }
    if (unit < 0 || unit >= n) {
        out.push_back("unit index out of range");
        return out;
    }
    if (basis[unit].deg != 0 || basis[unit].weight != 0)
        out.push_back("unit '" + basis[unit].label + "' must have degree 0 and weight 0");

    // Differential: degree +1, weight-preserving, d*d = 0.
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < n; ++r) {
            if (diff.at(r, c).is_zero()) continue;
            if (basis[r].deg != basis[c].deg + 1)
                out.push_back("d('" + basis[c].label + "') hits '" + basis[r].label +
                              "': differential entry off degree +1");
            if (basis[r].weight != basis[c].weight)
                out.push_back("d('" + basis[c].label + "') hits '" + basis[r].label +
                              "': differential entry changes the weight");
        }
    }
    Matrix dd = diff * diff;
    for (int c = 0; c < n; ++c)
        if (!dd.col(c).is_zero())
            out.push_back("d(d('" + basis[c].label + "')) != 0");

    // Unit axioms.
    for (int j = 0; j < n; ++j) {
        Matrix ej(f, n, 1);
        ej.set(j, 0, 1);
        if (!(mult.col(unit * n + j) == ej))
            out.push_back("1 * '" + basis[j].label + "' != '" + basis[j].label + "'");
        if (!(mult.col(j * n + unit) == ej))
            out.push_back("'" + basis[j].label + "' * 1 != '" + basis[j].label + "'");
    }

    // Product homogeneity and the signed Leibniz rule, per basis pair.
    for (int i = 0; i < n; ++i) {
        Matrix ei(f, n, 1);
        ei.set(i, 0, 1);
        Matrix dei = diff.col(i);
        for (int j = 0; j < n; ++j) {
            std::string pair = "('" + basis[i].label + "', '" + basis[j].label + "')";
            Matrix cij = mult.col(i * n + j);
            for (int r = 0; r < n; ++r) {
                if (cij.at(r, 0).is_zero()) continue;
                if (basis[r].deg != basis[i].deg + basis[j].deg)
                    out.push_back(pair + ": product entry at '" + basis[r].label +
                                  "' is off the expected degree");
                if (basis[r].weight != canon_mod(basis[i].weight + basis[j].weight, modulus))
                    out.push_back(pair + ": product entry at '" + basis[r].label +
                                  "' is off the expected weight");
            }
            Matrix ej(f, n, 1);
            ej.set(j, 0, 1);
            Matrix lhs = diff * cij;
            Matrix rhs = table_product(f, n, mult, dei, ej);
            rhs.axpy(Scalar(f, basis[i].deg % 2 == 0 ? 1 : -1),
                     table_product(f, n, mult, ei, diff.col(j)));
            if (!(lhs == rhs)) out.push_back(pair + ": Leibniz rule fails");
        }
    }

    // Associativity, per basis triple.
    for (int i = 0; i < n; ++i) {
        Matrix ei(f, n, 1);
        ei.set(i, 0, 1);
        for (int j = 0; j < n; ++j) {
            Matrix cij = mult.col(i * n + j);
            for (int k = 0; k < n; ++k) {
                Matrix ek(f, n, 1);
                ek.set(k, 0, 1);
                Matrix lhs = table_product(f, n, mult, cij, ek);
                Matrix rhs = table_product(f, n, mult, ei, mult.col(j * n + k));
                if (!(lhs == rhs))
                    out.push_back("('" + basis[i].label + "', '" + basis[j].label + "', '" +
                                  basis[k].label + "'): associativity fails");
            }
        }
    }
    return out;
}

WeightedDGA WeightedDGA::build(Field f, long long modulus, std::vector<DgaElement> basis, int unit,
                               Matrix mult, Matrix diff) {
    std::vector<std::string> bad = dga_violations(f, modulus, basis, unit, mult, diff);
    if (!bad.empty()) {
        std::string msg = "invalid weighted dg-algebra: " + bad[0];
        for (size_t i = 1; i < bad.size() && i < 3; ++i) msg += "; " + bad[i];
        if (bad.size() > 3) msg += "; (+" + std::to_string(bad.size() - 3) + " more)";
        throw Error(msg);
    }
    WeightedDGA a;
    a.f_ = std::move(f);
    a.m_ = modulus;
    a.basis_ = std::move(basis);
    a.unit_ = unit;
    a.top_ = 0;
    for (const DgaElement& e : a.basis_) a.top_ = std::max(a.top_, e.deg);
    a.mult_ = std::move(mult);
    a.diff_ = std::move(diff);
    return a;
}

/******************************************************************************
 * Cohomology
 ******************************************************************************/

int DgaCohomology::h_dim(int n) const { return data.dim(-n); }
Matrix DgaCohomology::h_section(int n) const { return data.section(-n); }
Matrix DgaCohomology::h_projection(int n) const { return data.projection(-n); }

Matrix DgaCohomology::class_of(const WeightedDGA& a, const DgaClass& c) const {
    require(c.rep.rows() == a.dim() && c.rep.cols() == 1,
            "cohomology class: representative shape mismatch");
    for (int i = 0; i < a.dim(); ++i)
        if (!c.rep.at(i, 0).is_zero())
            require(a.element(i).deg == c.deg,
                    "cohomology class: representative is not homogeneous of degree " +
                        std::to_string(c.deg));
    require((a.differential() * c.rep).is_zero(),
            "cohomology class: representative is not a cocycle");
    return h_projection(c.deg) * c.rep.rows_selected(a.degree_indices(c.deg));
}

DgaClass DgaCohomology::rep_of(const WeightedDGA& a, int n, const Matrix& h_coords) const {
    require(h_coords.rows() == h_dim(n) && h_coords.cols() == 1,
            "cohomology representative: coordinate shape mismatch");
    Matrix degcol = h_section(n) * h_coords;
    Matrix rep(a.field(), a.dim(), 1);
    std::vector<int> idx = a.degree_indices(n);
    for (size_t t = 0; t < idx.size(); ++t) rep.set(idx[t], 0, degcol.at(static_cast<int>(t), 0));
    return DgaClass{n, rep};
}

DgaCohomology dga_cohomology(const WeightedDGA& a) {
    std::map<int, int> dims;
    DegMap diffs;
    for (int n = 0; n <= a.top_degree(); ++n) {
        std::vector<int> idx = a.degree_indices(n);
        if (!idx.empty()) dims[-n] = static_cast<int>(idx.size());
    }
    for (int n = 0; n < a.top_degree(); ++n) {
        std::vector<int> cn = a.degree_indices(n), rn = a.degree_indices(n + 1);
        if (cn.empty() || rn.empty()) continue;
        Matrix sub = a.differential().cols_selected(cn).rows_selected(rn);
        if (!sub.is_zero()) diffs[-n] = std::move(sub);
    }
    DgaCohomology out;
    out.cochain = Complex::build(a.field(), true, dims, diffs);
    out.data = homology(out.cochain);
    return out;
}

/******************************************************************************
 * Weight-sliced cohomology (shared by the algebra, purity and connectivity)
 ******************************************************************************/

namespace {

struct WeightSlices {
    // weight -> degree -> global basis indices (ascending)
    std::map<long long, std::map<int, std::vector<int>>> idx;
    std::map<long long, HomologyData> h;
};

WeightSlices slice_cohomology(const WeightedDGA& a) {
    WeightSlices ws;
    for (long long p = 0; p < a.modulus(); ++p) {
        std::map<int, std::vector<int>>& idx = ws.idx[p];
        for (int i = 0; i < a.dim(); ++i)
            if (a.element(i).weight == p) idx[a.element(i).deg].push_back(i);
        std::map<int, int> dims;
        DegMap diffs;
        for (auto& [n, v] : idx) dims[-n] = static_cast<int>(v.size());
        for (auto& [n, v] : idx) {
            auto it = idx.find(n + 1);
            if (it == idx.end()) continue;
            Matrix sub = a.differential().cols_selected(v).rows_selected(it->second);
            if (!sub.is_zero()) diffs[-n] = std::move(sub);
        }
        ws.h.emplace(p, homology(Complex::build(a.field(), true, dims, diffs)));
    }
    return ws;
}

}  // namespace

WeightedDGA cohomology_algebra(const WeightedDGA& a) {
    const Field& f = a.field();
    const long long m = a.modulus();
    WeightSlices ws = slice_cohomology(a);

    struct Block {
        int n;
        long long p;
        int h;
        int offset;
    };
    std::vector<Block> blocks;
    std::map<std::pair<int, long long>, int> block_of;
    int total = 0;
    for (int n = 0; n <= a.top_degree(); ++n)
        for (long long p = 0; p < m; ++p) {
            int h = ws.h.at(p).dim(-n);
            if (h == 0) continue;
            block_of[{n, p}] = static_cast<int>(blocks.size());
            blocks.push_back({n, p, h, total});
            total += h;
        }

    // Re-base the (0,0) block so the class of 1 is its first basis vector.
    std::map<int, Matrix> sect, proj;
    for (size_t b = 0; b < blocks.size(); ++b) {
        sect[static_cast<int>(b)] = ws.h.at(blocks[b].p).section(-blocks[b].n);
        proj[static_cast<int>(b)] = ws.h.at(blocks[b].p).projection(-blocks[b].n);
    }
    auto itu = block_of.find({0, 0});
    std::optional<Matrix> unit_cls;
    if (itu != block_of.end()) {
        const std::vector<int>& idx00 = ws.idx.at(0).at(0);
        Matrix ucol(f, static_cast<int>(idx00.size()), 1);
        for (size_t t = 0; t < idx00.size(); ++t)
            if (idx00[t] == a.unit_index()) ucol.set(static_cast<int>(t), 0, 1);
        unit_cls = proj.at(itu->second) * ucol;
    }
    if (!unit_cls || unit_cls->is_zero())
        throw Error("cohomology algebra has no unit: the class of 1 is zero");
    {
        int b = itu->second;
        Matrix cand = hcat(*unit_cls, Matrix::identity(f, blocks[b].h));
        std::vector<int> piv = pivot_columns(cand);
        internal_check(static_cast<int>(piv.size()) == blocks[b].h && piv[0] == 0,
                       "cohomology algebra: unit completion failed");
        Matrix basis_change = cand.cols_selected(piv);
        std::optional<Matrix> inv = inverse(basis_change);
        internal_check(inv.has_value(), "cohomology algebra: unit completion not invertible");
        sect[b] = sect[b] * basis_change;
        proj[b] = *inv * proj[b];
    }

    // Basis metadata and global representatives.
    std::vector<DgaElement> hbasis;
    std::vector<Matrix> reps;
    for (const Block& b : blocks)
        for (int k = 0; k < b.h; ++k) {
            hbasis.push_back({"h" + std::to_string(b.n) + "w" + std::to_string(b.p) + "_" +
                                  std::to_string(k),
                              b.n, b.p});
            Matrix col = sect.at(block_of.at({b.n, b.p})).col(k);
            Matrix rep(f, a.dim(), 1);
            const std::vector<int>& idx = ws.idx.at(b.p).at(b.n);
            for (size_t t = 0; t < idx.size(); ++t) rep.set(idx[t], 0, col.at(static_cast<int>(t), 0));
            reps.push_back(std::move(rep));
        }

    // Induced product on classes.
    Matrix hmult(f, total, total * total);
    for (int u = 0; u < total; ++u)
        for (int v = 0; v < total; ++v) {
            int nn = hbasis[u].deg + hbasis[v].deg;
            long long pp = canon_mod(hbasis[u].weight + hbasis[v].weight, m);
            auto it = block_of.find({nn, pp});
            if (it == block_of.end()) continue;    // zero cohomology there
            Matrix w = a.product(reps[u], reps[v]);
            Matrix coords = proj.at(it->second) * w.rows_selected(ws.idx.at(pp).at(nn));
            const Block& b = blocks[static_cast<size_t>(it->second)];
            for (int r = 0; r < b.h; ++r) hmult.set(b.offset + r, u * total + v, coords.at(r, 0));
        }

    return WeightedDGA::build(f, m, std::move(hbasis), blocks[static_cast<size_t>(itu->second)].offset,
                              std::move(hmult), Matrix(f, total, total));
}

ConnectivityReport connectivity(const WeightedDGA& a) {
    DgaCohomology coh = dga_cohomology(a);
    Matrix ucls = coh.class_of(a, DgaClass{0, a.basis_vector(a.unit_index())});
    ConnectivityReport rep;
    rep.connected = coh.h_dim(0) == 1 && !ucls.is_zero();
    if (!rep.connected) return rep;
    for (int i = 1; i <= a.top_degree() && coh.h_dim(i) == 0; ++i) rep.r = i;
    rep.simply = coh.h_dim(1) == 0;
    return rep;
}

PurityReport dga_purity_check(const WeightedDGA& a, const Frac& alpha) {
    require(alpha.positive() && alpha.num < a.modulus() * alpha.den,
            "purity slope must satisfy 0 < alpha < modulus");
    WeightSlices ws = slice_cohomology(a);
    PurityReport rep;
    rep.alpha = alpha;
    for (int n = 0; n <= a.top_degree(); ++n)
        for (long long p = 0; p < a.modulus(); ++p) {
            int h = ws.h.at(p).dim(-n);
            if (h == 0) continue;
            rep.h_dims[n][p] = h;
            bool on_slope =
                alpha.times_is_integer(n) && canon_mod(alpha.times(n), a.modulus()) == p;
            if (!on_slope) {
                rep.pure = false;
                rep.failures.push_back({n, p, h});
            }
        }
    return rep;
}

/******************************************************************************
 * Massey products
 ******************************************************************************/

namespace {

// Shared degreewise scaffolding: embeddings, differential restrictions and
// cocycle/coboundary direction bases, all in global coordinates.
struct MasseyCtx {
    const WeightedDGA* a = nullptr;
    DgaCohomology coh;
    std::map<int, Matrix> embed_, slotmat_, cocycle_, coboundary_;

    const Matrix& embed(int n) {
        auto it = embed_.find(n);
        if (it != embed_.end()) return it->second;
        std::vector<int> idx = a->degree_indices(n);
        Matrix e(a->field(), a->dim(), static_cast<int>(idx.size()));
        for (size_t t = 0; t < idx.size(); ++t) e.set(idx[t], static_cast<int>(t), 1);
        return embed_.emplace(n, std::move(e)).first->second;
    }
    // d restricted to degree n, as a map out of degree-n coordinates.
    const Matrix& slot_matrix(int n) {
        auto it = slotmat_.find(n);
        if (it != slotmat_.end()) return it->second;
        return slotmat_.emplace(n, a->differential() * embed(n)).first->second;
    }
    // Global columns spanning the degree-n cocycles.
    const Matrix& cocycle_dirs(int n) {
        auto it = cocycle_.find(n);
        if (it != cocycle_.end()) return it->second;
        return cocycle_.emplace(n, embed(n) * kernel_basis(slot_matrix(n))).first->second;
    }
    // Global columns spanning the degree-n coboundaries.
    const Matrix& coboundary_dirs(int n) {
        auto it = coboundary_.find(n);
        if (it != coboundary_.end()) return it->second;
        Matrix b(a->field(), static_cast<int>(a->degree_indices(n).size()), 0);
        auto jt = coh.data.at.find(-n);
        if (jt != coh.data.at.end()) b = jt->second.boundaries;
        return coboundary_.emplace(n, embed(n) * b).first->second;
    }
    Matrix class_at(int n, const Matrix& global_vec) {
        return coh.h_projection(n) * global_vec.rows_selected(a->degree_indices(n));
    }
};

MasseyCtx make_ctx(const WeightedDGA& a) {
    MasseyCtx ctx;
    ctx.a = &a;
    ctx.coh = dga_cohomology(a);
    return ctx;
}

// (-1)^{1 + deg}, the sign folded onto left factors of defining equations.
Scalar bar_sign(const Field& f, int deg) { return Scalar(f, deg % 2 == 0 ? -1 : 1); }

// ZERO: the zero vector (homogeneous of every weight); MIXED: no single weight.
struct WeightSupport {
    enum Kind { ZERO, HOMOG, MIXED } kind = ZERO;
    long long p = 0;
};

WeightSupport weight_support(const WeightedDGA& a, const Matrix& v) {
    WeightSupport w;
    for (int i = 0; i < a.dim(); ++i) {
        if (v.at(i, 0).is_zero()) continue;
        if (w.kind == WeightSupport::ZERO) {
            w.kind = WeightSupport::HOMOG;
            w.p = a.element(i).weight;
        } else if (w.p != a.element(i).weight) {
            w.kind = WeightSupport::MIXED;
            return w;
        }
    }
    return w;
}

// Solve d v = rhs with v of degree sdeg; the canonical solution is projected
// onto the expected weight when one is given (rhs must then be homogeneous of
// that weight, which the residual re-check enforces).  Returns v globally.
std::optional<Matrix> solve_slot(MasseyCtx& ctx, int sdeg, const Matrix& rhs,
                                 std::optional<long long> wexp) {
    const Matrix& mat = ctx.slot_matrix(sdeg);
    std::optional<Matrix> part = solve(mat, rhs);
    if (!part) return std::nullopt;
    if (wexp) {
        std::vector<int> idx = ctx.a->degree_indices(sdeg);
        for (size_t t = 0; t < idx.size(); ++t)
            if (ctx.a->element(idx[t]).weight != *wexp) part->set(static_cast<int>(t), 0, 0);
        internal_check(mat * *part == rhs,
                       "massey: weight projection broke a defining equation");
    }
    return ctx.embed(sdeg) * *part;
}

std::string column_key(const Matrix& m) {
    std::string s;
    for (int r = 0; r < m.rows(); ++r) s += m.at(r, 0).str() + ",";
    return s;
}

}  // namespace

MasseyResult triple_massey(const WeightedDGA& a, const DgaClass& x, const DgaClass& y,
                           const DgaClass& z) {
    const Field& f = a.field();
    MasseyCtx ctx = make_ctx(a);
    ctx.coh.class_of(a, x);
    ctx.coh.class_of(a, y);
    ctx.coh.class_of(a, z);

    const int n1 = x.deg, n2 = y.deg, n3 = z.deg;
    const int nv = n1 + n2 + n3 - 1;
    MasseyResult res;
    res.order = 3;
    res.degree = nv;

    WeightSupport wx = weight_support(a, x.rep), wy = weight_support(a, y.rep),
                  wz = weight_support(a, z.rep);
    bool homog = wx.kind != WeightSupport::MIXED && wy.kind != WeightSupport::MIXED &&
                 wz.kind != WeightSupport::MIXED;

    Matrix xy = a.product(x.rep, y.rep);
    if (!ctx.class_at(n1 + n2, xy).is_zero()) {
        res.obstruction = "product of inputs 1 and 2 is nonzero in cohomology (slot (1,2))";
        return res;
    }
    Matrix yz = a.product(y.rep, z.rep);
    if (!ctx.class_at(n2 + n3, yz).is_zero()) {
        res.obstruction = "product of inputs 2 and 3 is nonzero in cohomology (slot (2,3))";
        return res;
    }

    std::optional<long long> w12, w23;
    if (homog) {
        w12 = canon_mod(wx.p + wy.p, a.modulus());
        w23 = canon_mod(wy.p + wz.p, a.modulus());
    }
    std::optional<Matrix> u12 =
        solve_slot(ctx, n1 + n2 - 1, xy.scaled(bar_sign(f, n1)), w12);
    std::optional<Matrix> u23 =
        solve_slot(ctx, n2 + n3 - 1, yz.scaled(bar_sign(f, n2)), w23);
    internal_check(u12.has_value() && u23.has_value(),
                   "massey: coboundary solve failed on a null class");

    Matrix value = a.product(x.rep, *u23).scaled(bar_sign(f, n1));
    value.axpy(bar_sign(f, n1 + n2 - 1), a.product(*u12, z.rep));
    internal_check((a.differential() * value).is_zero(), "massey: value is not a cocycle");

    res.defined = true;
    res.search_exhausted = true;
    res.representative = ctx.class_at(nv, value);

    // Indeterminacy x * H^{n2+n3-1} + H^{n1+n2-1} * z, as classes.
    std::vector<Matrix> cols;
    const int h23 = ctx.coh.h_dim(n2 + n3 - 1);
    for (int k = 0; k < h23; ++k) {
        Matrix e(f, h23, 1);
        e.set(k, 0, 1);
        DgaClass t = ctx.coh.rep_of(a, n2 + n3 - 1, e);
        cols.push_back(ctx.class_at(nv, a.product(x.rep, t.rep)));
    }
    const int h12 = ctx.coh.h_dim(n1 + n2 - 1);
    for (int k = 0; k < h12; ++k) {
        Matrix e(f, h12, 1);
        e.set(k, 0, 1);
        DgaClass t = ctx.coh.rep_of(a, n1 + n2 - 1, e);
        cols.push_back(ctx.class_at(nv, a.product(t.rep, z.rep)));
    }
    res.indeterminacy = column_space_basis(hcat_all(f, ctx.coh.h_dim(nv), cols));
    res.contains_zero =
        res.representative->is_zero() || solve(res.indeterminacy, *res.representative).has_value();
    return res;
}

MasseyResult k_massey(const WeightedDGA& a, const std::vector<DgaClass>& xs,
                      const MasseyOptions& opt) {
    const Field& f = a.field();
    const int k = static_cast<int>(xs.size());
    require(k >= 3, "massey products need at least three inputs");
    MasseyCtx ctx = make_ctx(a);
    for (const DgaClass& c : xs) ctx.coh.class_of(a, c);

    std::vector<long long> pre(static_cast<size_t>(k) + 1, 0);
    for (int i = 1; i <= k; ++i) pre[static_cast<size_t>(i)] = pre[static_cast<size_t>(i) - 1] + xs[static_cast<size_t>(i) - 1].deg;
    auto slot_degree = [&](int i, int j) {
        return static_cast<int>(pre[static_cast<size_t>(j)] - pre[static_cast<size_t>(i) - 1]) - (j - i);
    };
    const int nv = slot_degree(1, k) + 1;

    bool homog = true;
    std::vector<long long> w(static_cast<size_t>(k) + 1, 0);
    for (int i = 1; i <= k; ++i) {
        WeightSupport ws = weight_support(a, xs[static_cast<size_t>(i) - 1].rep);
        if (ws.kind == WeightSupport::MIXED) homog = false;
        if (ws.kind == WeightSupport::HOMOG) w[static_cast<size_t>(i)] = ws.p;
    }
    std::vector<long long> wpre(static_cast<size_t>(k) + 1, 0);
    for (int i = 1; i <= k; ++i) wpre[static_cast<size_t>(i)] = wpre[static_cast<size_t>(i) - 1] + w[static_cast<size_t>(i)];
    auto slot_weight = [&](int i, int j) {
        return canon_mod(wpre[static_cast<size_t>(j)] - wpre[static_cast<size_t>(i) - 1], a.modulus());
    };

    struct Slot {
        int i, j, deg;
        Matrix dirs;    // global parameter directions
    };
    std::vector<Slot> slots;
    for (int i = 1; i <= k; ++i)
        slots.push_back({i, i, xs[static_cast<size_t>(i) - 1].deg,
                         ctx.coboundary_dirs(xs[static_cast<size_t>(i) - 1].deg)});
    for (int t = 1; t <= k - 2; ++t)
        for (int i = 1; i + t <= k; ++i)
            slots.push_back({i, i + t, slot_degree(i, i + t), ctx.cocycle_dirs(slot_degree(i, i + t))});

    long long params_total = 0;
    for (const Slot& s : slots) params_total += s.dirs.cols();

    bool grid;                  // full odometer vs zero + coordinate samples
    long long radix, shift;     // digit -> Scalar(digit - shift)
    bool exhaustive;
    if (f.modular_p()) {
        long double combos = powl(static_cast<long double>(f.ell), static_cast<long double>(params_total));
        exhaustive = params_total <= opt.param_cap_modular &&
                     combos <= static_cast<long double>(opt.count_cap);
        grid = exhaustive;
        radix = f.ell;
        shift = 0;
    } else {
        exhaustive = params_total == 0;
        long double combos = powl(static_cast<long double>(2 * opt.height + 1),
                                  static_cast<long double>(params_total));
        grid = params_total <= opt.param_cap_rational &&
               combos <= static_cast<long double>(opt.count_cap);
        radix = 2 * opt.height + 1;
        shift = opt.height;
    }

    MasseyResult res;
    res.order = k;
    res.degree = nv;
    res.indeterminacy = Matrix(f, ctx.coh.h_dim(nv), 0);

    // Canonical defining system: fixed-pivot solutions, zero parameters,
    // weight-projected when the inputs are homogeneous.
    int deepest_fail = -1;
    {
        std::map<std::pair<int, int>, Matrix> cur;
        bool ok = true;
        for (size_t si = 0; si < slots.size() && ok; ++si) {
            const Slot& s = slots[si];
            if (s.i == s.j) {
                cur[{s.i, s.j}] = xs[static_cast<size_t>(s.i) - 1].rep;
                continue;
            }
            Matrix rhs(f, a.dim(), 1);
            for (int q = s.i; q < s.j; ++q)
                rhs.axpy(bar_sign(f, slot_degree(s.i, q)),
                         a.product(cur.at({s.i, q}), cur.at({q + 1, s.j})));
            std::optional<Matrix> v = solve_slot(
                ctx, s.deg, rhs,
                homog ? std::optional<long long>(slot_weight(s.i, s.j)) : std::nullopt);
            if (!v) {
                ok = false;
                deepest_fail = static_cast<int>(si);
                break;
            }
            cur[{s.i, s.j}] = std::move(*v);
        }
        if (ok) {
            Matrix value(f, a.dim(), 1);
            for (int q = 1; q < k; ++q)
                value.axpy(bar_sign(f, slot_degree(1, q)),
                           a.product(cur.at({1, q}), cur.at({q + 1, k})));
            internal_check((a.differential() * value).is_zero(), "massey: value is not a cocycle");
            res.defined = true;
            res.representative = ctx.class_at(nv, value);
        }
    }

    // Depth-first traversal of all defining systems within the caps.
    std::set<std::string> seen;
    bool aborted = false;
    long long leaves = 0;
    std::map<std::pair<int, int>, Matrix> cur;
    std::function<void(size_t)> walk = [&](size_t si) {
        if (aborted) return;
        if (si == slots.size()) {
            if (++leaves > opt.count_cap) {
                aborted = true;
                return;
            }
            Matrix value(f, a.dim(), 1);
            for (int q = 1; q < k; ++q)
                value.axpy(bar_sign(f, slot_degree(1, q)),
                           a.product(cur.at({1, q}), cur.at({q + 1, k})));
            internal_check((a.differential() * value).is_zero(), "massey: value is not a cocycle");
            Matrix cls = ctx.class_at(nv, value);
            if (seen.insert(column_key(cls)).second) {
                if (cls.is_zero()) res.contains_zero = true;
                res.values.push_back(std::move(cls));
            }
            res.defined = true;
            return;
        }
        const Slot& s = slots[si];
        Matrix base;
        if (s.i == s.j) {
            base = xs[static_cast<size_t>(s.i) - 1].rep;
        } else {
            Matrix rhs(f, a.dim(), 1);
            for (int q = s.i; q < s.j; ++q)
                rhs.axpy(bar_sign(f, slot_degree(s.i, q)),
                         a.product(cur.at({s.i, q}), cur.at({q + 1, s.j})));
            std::optional<Matrix> part = solve(ctx.slot_matrix(s.deg), rhs);
            if (!part) {
                deepest_fail = std::max(deepest_fail, static_cast<int>(si));
                return;
            }
            base = ctx.embed(s.deg) * *part;
        }
        const int d = s.dirs.cols();
        auto descend = [&](const Matrix& v) {
            cur[{s.i, s.j}] = v;
            walk(si + 1);
        };
        if (grid) {
            std::vector<long long> digit(static_cast<size_t>(d), 0);
            while (!aborted) {
                Matrix v = base;
                for (int r = 0; r < d; ++r) {
                    long long c = digit[static_cast<size_t>(r)] - shift;
                    if (c != 0) v.axpy(Scalar(f, c), s.dirs.col(r));
                }
                descend(v);
                int r = 0;
                while (r < d) {
                    ++digit[static_cast<size_t>(r)];
                    if (digit[static_cast<size_t>(r)] < radix) break;
                    digit[static_cast<size_t>(r)] = 0;
                    ++r;
                }
                if (r == d) break;
            }
        } else {
            descend(base);
            for (int r = 0; r < d && !aborted; ++r)
                for (long long c = -opt.height; c <= opt.height && !aborted; ++c) {
                    if (c == 0) continue;
                    long long cc = f.modular_p() ? canon_mod(c, f.ell) : c;
                    Matrix v = base;
                    v.axpy(Scalar(f, cc), s.dirs.col(r));
                    descend(v);
                }
        }
        cur.erase({s.i, s.j});
    };
    walk(0);
    if (aborted) exhaustive = false;
    res.search_exhausted = exhaustive && res.defined;

    if (!res.defined) {
        const Slot& s = slots[static_cast<size_t>(std::max(deepest_fail, 0))];
        res.obstruction = "no defining system: slot (" + std::to_string(s.i) + ", " +
                          std::to_string(s.j) + ") unsolvable";
        res.search_exhausted = exhaustive;
    } else if (!res.representative && !res.values.empty()) {
        res.representative = res.values.front();
    }
    return res;
}

bool vanishing_predicate(const Frac& alpha, long long m, long long k) {
    require(m >= 1, "modulus must be positive");
    require(alpha.positive() && alpha.num < m * alpha.den,
            "vanishing predicate needs 0 < alpha < modulus");
    require(k >= 3, "massey products need order at least 3");
    return ((k - 2) * alpha.num) % (m * alpha.den) != 0;
}

long long low_degree_bound(const Frac& alpha, long long m, long long r) {
    require(m >= 1, "modulus must be positive");
    require(alpha.positive(), "low-degree bound needs a positive slope");
    require(r >= 1, "low-degree bound needs connectivity r >= 1");
    return alpha.ceil_div(m * r) + 2 * r + 1;
}

/******************************************************************************
 * Tensor product
 ******************************************************************************/

WeightedDGA tensor_dga(const WeightedDGA& a, const WeightedDGA& b) {
    require(a.field() == b.field(), "tensor product: fields differ");
    require(a.modulus() == b.modulus(), "tensor product: moduli differ");
    const Field& f = a.field();
    const long long m = a.modulus();
    const int na = a.dim(), nb = b.dim(), n = na * nb;

    std::vector<DgaElement> basis;
    basis.reserve(static_cast<size_t>(n));
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
            basis.push_back({a.element(i).label + "|" + b.element(j).label,
                             a.element(i).deg + b.element(j).deg,
                             canon_mod(a.element(i).weight + b.element(j).weight, m)});

    Matrix sign_a(f, na, na);
    for (int i = 0; i < na; ++i) sign_a.set(i, i, a.element(i).deg % 2 == 0 ? 1 : -1);
    Matrix diff = kron(a.differential(), Matrix::identity(f, nb)) + kron(sign_a, b.differential());

    Matrix mult(f, n, n * n);
    for (int i1 = 0; i1 < na; ++i1)
        for (int j1 = 0; j1 < nb; ++j1)
            for (int i2 = 0; i2 < na; ++i2)
                for (int j2 = 0; j2 < nb; ++j2) {
                    Matrix col = kron(a.structure_column(i1, i2), b.structure_column(j1, j2));
                    if ((b.element(j1).deg % 2 != 0) && (a.element(i2).deg % 2 != 0))
                        col = col.scaled(Scalar(f, -1));
                    if (col.is_zero()) continue;
                    int t1 = i1 * nb + j1, t2 = i2 * nb + j2;
                    for (int r = 0; r < n; ++r) {
                        Scalar v = col.at(r, 0);
                        if (!v.is_zero()) mult.set(r, t1 * n + t2, v);
                    }
                }

    return WeightedDGA::build(f, m, std::move(basis), a.unit_index() * nb + b.unit_index(),
                              std::move(mult), std::move(diff));
}

}  // namespace homform
