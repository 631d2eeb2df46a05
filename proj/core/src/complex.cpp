#include "homform/complex.hpp"

#include <algorithm>
#include <climits>

namespace homform {

/******************************************************************************
 * Complex
 ******************************************************************************/

Complex Complex::build(const Field& f, bool cohomological, const std::map<int, int>& dims,
                       const DegMap& diffs) {
    Complex c;
    c.f_ = f;
    c.coh_ = cohomological;
    c.lo_ = INT_MAX;
    c.hi_ = INT_MIN;
    for (auto& [n, d] : dims) {
        require(d >= 0, "complex: negative dimension in degree " + std::to_string(n));
        if (d == 0) continue;
        c.dims_[n] = d;
        c.lo_ = std::min(c.lo_, n);
        c.hi_ = std::max(c.hi_, n);
    }
    if (c.dims_.empty()) { c.lo_ = 0; c.hi_ = -1; }

    for (auto& [n, m] : diffs) {
        require(m.field() == f, "complex: differential field mismatch in degree " +
                                    std::to_string(n));
        require(m.rows() == c.dim(n - 1) && m.cols() == c.dim(n),
                "complex: differential shape mismatch in degree " + std::to_string(n));
        if (m.rows() == 0 || m.cols() == 0) continue;
        c.diffs_[n] = m;
    }
    for (int n = c.lo_; n + 1 <= c.hi_; ++n)
        require((c.d(n) * c.d(n + 1)).is_zero(),
                "complex: d*d != 0 out of degree " + std::to_string(n + 1));
    return c;
}

int Complex::dim(int n) const {
    auto it = dims_.find(n);
    return it == dims_.end() ? 0 : it->second;
}

Matrix Complex::d(int n) const {
    auto it = diffs_.find(n);
    if (it != diffs_.end()) return it->second;
    return Matrix(f_, dim(n - 1), dim(n));
}

int Complex::total_dim() const {
    int t = 0;
    for (auto& [n, d] : dims_) t += d;
    return t;
}

bool operator==(const Complex& a, const Complex& b) {
    if (!(a.f_ == b.f_) || a.coh_ != b.coh_ || a.dims_ != b.dims_) return false;
    for (int n = a.lo_; n <= a.hi_ + 1; ++n)
        if (!(a.d(n) == b.d(n))) return false;
    return true;
}

/******************************************************************************
 * EndoComplex
 ******************************************************************************/

EndoComplex EndoComplex::build(Complex c, const DegMap& endo) {
    EndoComplex x;
    x.c_ = std::move(c);
    for (auto& [n, m] : endo) {
        require(m.field() == x.c_.field(), "endo complex: endomorphism field mismatch");
        require(m.rows() == x.c_.dim(n) && m.cols() == x.c_.dim(n),
                "endo complex: endomorphism shape mismatch in degree " + std::to_string(n));
        if (m.rows() == 0) continue;
        x.endo_[n] = m;
    }
    for (int n = x.c_.lo(); n <= x.c_.hi(); ++n)
        require(x.d(n) * x.endo(n) == x.endo(n - 1) * x.d(n),
                "endo complex: d phi != phi d in degree " + std::to_string(n));
    return x;
}

Matrix EndoComplex::endo(int n) const {
    auto it = endo_.find(n);
    if (it != endo_.end()) return it->second;
    return Matrix(c_.field(), c_.dim(n), c_.dim(n));
}

bool operator==(const EndoComplex& a, const EndoComplex& b) {
    if (!(a.c_ == b.c_)) return false;
    for (int n = a.c_.lo(); n <= a.c_.hi(); ++n)
        if (!(a.endo(n) == b.endo(n))) return false;
    return true;
}

/******************************************************************************
 * Chain maps
 ******************************************************************************/

ChainMap make_chain_map(Complex src, Complex tgt, DegMap comp) {
    require(src.field() == tgt.field(), "chain map: field mismatch");
    require(src.cohomological_p() == tgt.cohomological_p(), "chain map: variance mismatch");
    ChainMap m{std::move(src), std::move(tgt), {}};
    for (auto& [n, mat] : comp) {
        require(mat.field() == m.src.field(), "chain map: component field mismatch");
        require(mat.rows() == m.tgt.dim(n) && mat.cols() == m.src.dim(n),
                "chain map: component shape mismatch in degree " + std::to_string(n));
        if (mat.rows() == 0 || mat.cols() == 0) continue;
        m.comp[n] = mat;
    }
    int lo = std::min(m.src.lo(), m.tgt.lo()), hi = std::max(m.src.hi(), m.tgt.hi());
    for (int n = lo; n <= hi; ++n)
        require(m.tgt.d(n) * chain_map_at(m, n) == chain_map_at(m, n - 1) * m.src.d(n),
                "chain map: does not commute with differentials in degree " + std::to_string(n));
    return m;
}

Matrix chain_map_at(const ChainMap& m, int n) {
    auto it = m.comp.find(n);
    if (it != m.comp.end()) return it->second;
    return Matrix(m.src.field(), m.tgt.dim(n), m.src.dim(n));
}

/******************************************************************************
 * Homology
 ******************************************************************************/

HomologyData homology(const Complex& c) {
    HomologyData h;
    h.source = c;
    const Field& f = c.field();
    for (int n = c.lo(); n <= c.hi(); ++n) {
        int a = c.dim(n);
        HomologyDegree deg;
        deg.cycles = kernel_basis(c.d(n));
        deg.boundaries = column_space_basis(c.d(n + 1));
        internal_check(solve(deg.cycles, deg.boundaries).has_value(),
                       "homology: boundaries not contained in cycles");

        // representatives: cycle columns whose classes extend the boundary basis
        int b = deg.boundaries.cols();
        auto piv = pivot_columns(hcat(deg.boundaries, deg.cycles));
        std::vector<int> rep_cols;
        for (int p : piv)
            if (p >= b) rep_cols.push_back(p - b);
        deg.section = deg.cycles.cols_selected(rep_cols);
        int hd = deg.section.cols();

        // complete [boundaries | section] to an ambient basis with unit vectors
        Matrix bs = hcat(deg.boundaries, deg.section);
        auto full_piv = pivot_columns(hcat(bs, Matrix::identity(f, a)));
        std::vector<int> unit_cols;
        for (int p : full_piv)
            if (p >= bs.cols()) unit_cols.push_back(p - bs.cols());
        Matrix completion(f, a, static_cast<int>(unit_cols.size()));
        for (size_t j = 0; j < unit_cols.size(); ++j)
            completion.set(unit_cols[j], static_cast<int>(j), 1);

        Matrix basis = hcat(bs, completion);
        internal_check(basis.rows() == basis.cols(), "homology: basis completion is not square");
        auto inv = inverse(basis);
        internal_check(inv.has_value(), "homology: change of basis not invertible");
        std::vector<int> proj_rows(hd);
        for (int i = 0; i < hd; ++i) proj_rows[i] = b + i;
        deg.projection = inv->rows_selected(proj_rows);

        internal_check(deg.projection * deg.section == Matrix::identity(f, hd),
                       "homology: projection*section != id");
        internal_check((deg.projection * deg.boundaries).is_zero(),
                       "homology: projection does not kill boundaries");
        h.at[n] = std::move(deg);
    }
    return h;
}

int HomologyData::dim(int n) const {
    auto it = at.find(n);
    return it == at.end() ? 0 : it->second.section.cols();
}

Matrix HomologyData::section(int n) const {
    auto it = at.find(n);
    if (it != at.end()) return it->second.section;
    return Matrix(source.field(), source.dim(n), 0);
}

Matrix HomologyData::projection(int n) const {
    auto it = at.find(n);
    if (it != at.end()) return it->second.projection;
    return Matrix(source.field(), 0, source.dim(n));
}

Complex HomologyData::graded_complex() const {
    std::map<int, int> dims;
    for (auto& [n, deg] : at) dims[n] = deg.section.cols();
    return Complex::build(source.field(), source.cohomological_p(), dims, {});
}

DegMap induced_map(const ChainMap& f, const HomologyData& h_src, const HomologyData& h_tgt) {
    require(h_src.source == f.src && h_tgt.source == f.tgt,
            "induced map: homology data does not match the chain map endpoints");
    DegMap out;
    int lo = std::min(f.src.lo(), f.tgt.lo()), hi = std::max(f.src.hi(), f.tgt.hi());
    for (int n = lo; n <= hi; ++n) {
        if (h_src.dim(n) == 0 && h_tgt.dim(n) == 0) continue;
        out[n] = h_tgt.projection(n) * chain_map_at(f, n) * h_src.section(n);
    }
    return out;
}

QuasiIsoReport is_n_quasi_iso(const ChainMap& f, long long n_bound) {
    HomologyData hs = homology(f.src), ht = homology(f.tgt);
    DegMap ind = induced_map(f, hs, ht);
    QuasiIsoReport rep;
    int lo = std::min(f.src.lo(), f.tgt.lo()), hi = std::max(f.src.hi(), f.tgt.hi());
    for (int n = lo; n <= hi; ++n) {
        long long display = f.src.display_degree(n);
        if (display > n_bound) continue;
        DegreeIsoReport d;
        d.src_dim = hs.dim(n);
        d.tgt_dim = ht.dim(n);
        if (d.src_dim == 0 && d.tgt_dim == 0) continue;
        auto it = ind.find(n);
        d.rank = it == ind.end() ? 0 : rank(it->second);
        d.iso = (d.src_dim == d.tgt_dim && d.rank == d.src_dim);
        if (!d.iso) {
            rep.ok = false;
            int disp = static_cast<int>(display);
            if (!rep.first_failure || disp < *rep.first_failure) rep.first_failure = disp;
        }
        rep.degrees[static_cast<int>(display)] = d;
    }
    return rep;
}

QuasiIsoReport is_quasi_iso(const ChainMap& f) { return is_n_quasi_iso(f, LLONG_MAX); }

/******************************************************************************
 * Tensor products
 ******************************************************************************/

std::map<int, std::vector<TensorBlock>> tensor_layout(const Complex& a, const Complex& b) {
    std::map<int, std::vector<TensorBlock>> out;
    if (a.lo() > a.hi() || b.lo() > b.hi()) return out;
    for (int n = a.lo() + b.lo(); n <= a.hi() + b.hi(); ++n) {
        std::vector<TensorBlock> blocks;
        int off = 0;
        for (int p = a.lo(); p <= a.hi(); ++p) {
            int q = n - p;
            int sz = a.dim(p) * b.dim(q);
            if (sz == 0) continue;
            blocks.push_back(TensorBlock{p, q, off, sz});
            off += sz;
        }
        if (!blocks.empty()) out[n] = std::move(blocks);
    }
    return out;
}

Complex tensor(const Complex& a, const Complex& b) {
    require(a.field() == b.field(), "tensor: field mismatch");
    require(a.cohomological_p() == b.cohomological_p(), "tensor: variance mismatch");
    const Field& f = a.field();
    auto layout = tensor_layout(a, b);

    std::map<int, int> dims;
    for (auto& [n, blocks] : layout) {
        int total = 0;
        for (auto& blk : blocks) total += blk.size;
        dims[n] = total;
    }

    DegMap diffs;
    for (auto& [n, src_blocks] : layout) {
        auto tgt_it = layout.find(n - 1);
        if (tgt_it == layout.end()) continue;
        const auto& tgt_blocks = tgt_it->second;
        int rows = dims[n - 1], cols = dims[n];
        Matrix d(f, rows, cols);
        for (const auto& sb : src_blocks) {
            // d_A (x) id : block (p,q) -> block (p-1,q)
            for (const auto& tb : tgt_blocks) {
                Matrix part(f, 0, 0);
                if (tb.left_deg == sb.left_deg - 1 && tb.right_deg == sb.right_deg) {
                    part = kron(a.d(sb.left_deg), Matrix::identity(f, b.dim(sb.right_deg)));
                } else if (tb.left_deg == sb.left_deg && tb.right_deg == sb.right_deg - 1) {
                    part = kron(Matrix::identity(f, a.dim(sb.left_deg)), b.d(sb.right_deg));
                    if (sb.left_deg % 2 != 0) part = -part;  // Koszul sign (-1)^{|x|}
                } else {
                    continue;
                }
                for (int i = 0; i < part.rows(); ++i)
                    for (int j = 0; j < part.cols(); ++j)
                        d.set(tb.offset + i, sb.offset + j, part.at(i, j));
            }
        }
        diffs[n] = std::move(d);
    }
    return Complex::build(f, a.cohomological_p(), dims, diffs);
}

EndoComplex tensor_endo(const EndoComplex& x, const EndoComplex& y) {
    Complex t = tensor(x.complex(), y.complex());
    auto layout = tensor_layout(x.complex(), y.complex());
    DegMap endo;
    for (auto& [n, blocks] : layout) {
        Matrix e(t.field(), t.dim(n), t.dim(n));
        for (const auto& blk : blocks) {
            Matrix part = kron(x.endo(blk.left_deg), y.endo(blk.right_deg));
            for (int i = 0; i < part.rows(); ++i)
                for (int j = 0; j < part.cols(); ++j)
                    e.set(blk.offset + i, blk.offset + j, part.at(i, j));
        }
        endo[n] = std::move(e);
    }
    return EndoComplex::build(std::move(t), endo);
}

ChainMap tensor_chain_map(const ChainMap& f, const ChainMap& g) {
    Complex src = tensor(f.src, g.src);
    Complex tgt = tensor(f.tgt, g.tgt);
    auto src_layout = tensor_layout(f.src, g.src);
    auto tgt_layout = tensor_layout(f.tgt, g.tgt);
    DegMap comp;
    for (auto& [n, sblocks] : src_layout) {
        Matrix m(src.field(), tgt.dim(n), src.dim(n));
        auto tl = tgt_layout.find(n);
        for (const auto& sb : sblocks) {
            const TensorBlock* tb = nullptr;
            if (tl != tgt_layout.end())
                for (const auto& cand : tl->second)
                    if (cand.left_deg == sb.left_deg) tb = &cand;
            if (!tb) continue;
            Matrix part = kron(chain_map_at(f, sb.left_deg), chain_map_at(g, sb.right_deg));
            for (int i = 0; i < part.rows(); ++i)
                for (int j = 0; j < part.cols(); ++j)
                    m.set(tb->offset + i, sb.offset + j, part.at(i, j));
        }
        if (!m.is_zero()) comp[n] = std::move(m);
    }
    return make_chain_map(std::move(src), std::move(tgt), std::move(comp));
}

/******************************************************************************
 * Pre-morphism calculus
 ******************************************************************************/

namespace {

Matrix pre_f_at(const PreMorphism& p, const EndoComplex& src, const EndoComplex& tgt, int j) {
    auto it = p.f.find(j);
    if (it != p.f.end()) return it->second;
    return Matrix(src.field(), tgt.dim(j - p.degree), src.dim(j));
}

Matrix pre_F_at(const PreMorphism& p, const EndoComplex& src, const EndoComplex& tgt, int j) {
    auto it = p.F.find(j);
    if (it != p.F.end()) return it->second;
    return Matrix(src.field(), tgt.dim(j - p.degree + 1), src.dim(j));
}

}  // namespace

void premorphism_validate(const PreMorphism& p, const EndoComplex& src, const EndoComplex& tgt) {
    require(src.field() == tgt.field(), "pre-morphism: field mismatch");
    for (auto& [j, m] : p.f)
        require(m.field() == src.field() && m.rows() == tgt.dim(j - p.degree) &&
                    m.cols() == src.dim(j),
                "pre-morphism: f shape mismatch in degree " + std::to_string(j));
    for (auto& [j, m] : p.F)
        require(m.field() == src.field() && m.rows() == tgt.dim(j - p.degree + 1) &&
                    m.cols() == src.dim(j),
                "pre-morphism: F shape mismatch in degree " + std::to_string(j));
}

PreMorphism D_premorphism(const PreMorphism& p, const EndoComplex& src, const EndoComplex& tgt) {
    premorphism_validate(p, src, tgt);
    const int n = p.degree;
    const bool odd = ((n % 2) + 2) % 2 == 1;
    PreMorphism out;
    out.degree = n + 1;
    for (int j = src.complex().lo(); j <= src.complex().hi(); ++j) {
        if (src.dim(j) == 0) continue;
        Matrix fj = pre_f_at(p, src, tgt, j);
        Matrix fjm1 = pre_f_at(p, src, tgt, j - 1);
        Matrix Fj = pre_F_at(p, src, tgt, j);
        Matrix Fjm1 = pre_F_at(p, src, tgt, j - 1);

        Matrix df = tgt.d(j - n) * fj;
        Matrix fd = fjm1 * src.d(j);
        Matrix first = odd ? df + fd : df - fd;

        // Homotopy part dF + (-1)^n Fd + (-1)^n (f phi - phi' f): the relative
        // sign between the dF and Fd terms is pinned by requiring D(D(p)) = 0 in
        // every degree while keeping the degree-0 component equal to the
        // commuting-up-to-homotopy equation.
        Matrix Fd = Fjm1 * src.d(j);
        Matrix dF = tgt.d(j - n + 1) * Fj;
        Matrix comm = fj * src.endo(j) - tgt.endo(j - n) * fj;
        Matrix second = odd ? dF - Fd - comm : dF + Fd + comm;

        if (first.rows() > 0 && first.cols() > 0) out.f[j] = first;
        if (second.rows() > 0 && second.cols() > 0) out.F[j] = second;
    }
    return out;
}

HoMorphism make_ho_morphism(EndoComplex src, EndoComplex tgt, DegMap f, DegMap F) {
    require(src.complex().cohomological_p() == tgt.complex().cohomological_p(),
            "ho-morphism: variance mismatch");
    PreMorphism p{0, std::move(f), std::move(F)};
    PreMorphism d = D_premorphism(p, src, tgt);
    for (auto& [j, m] : d.f)
        require(m.is_zero(), "ho-morphism: D(f,F) f-component nonzero in degree " +
                                 std::to_string(j));
    for (auto& [j, m] : d.F)
        require(m.is_zero(), "ho-morphism: D(f,F) F-component nonzero in degree " +
                                 std::to_string(j));
    return HoMorphism{std::move(src), std::move(tgt), std::move(p.f), std::move(p.F)};
}

ChainMap ho_underlying_chain_map(const HoMorphism& m) {
    return make_chain_map(m.src.complex(), m.tgt.complex(), m.f);
}

namespace {

Matrix ho_f_at(const HoMorphism& m, int j) {
    auto it = m.f.find(j);
    if (it != m.f.end()) return it->second;
    return Matrix(m.src.field(), m.tgt.dim(j), m.src.dim(j));
}

Matrix ho_F_at(const HoMorphism& m, int j) {
    auto it = m.F.find(j);
    if (it != m.F.end()) return it->second;
    return Matrix(m.src.field(), m.tgt.dim(j + 1), m.src.dim(j));
}

}  // namespace

HoMorphism ho_compose(const HoMorphism& outer, const HoMorphism& inner) {
    require(inner.tgt == outer.src, "ho-morphism composition: middle objects differ");
    DegMap f, F;
    int lo = inner.src.complex().lo(), hi = inner.src.complex().hi();
    for (int k = lo; k <= hi; ++k) {
        if (inner.src.dim(k) == 0) continue;
        Matrix fk = ho_f_at(outer, k) * ho_f_at(inner, k);
        Matrix Fk = ho_F_at(outer, k) * ho_f_at(inner, k) + ho_f_at(outer, k + 1) * ho_F_at(inner, k);
        if (fk.rows() > 0) f[k] = fk;
        if (Fk.rows() > 0) F[k] = Fk;
    }
    return make_ho_morphism(inner.src, outer.tgt, std::move(f), std::move(F));
}

/******************************************************************************
 * Homotopy solving: one global linear system
 ******************************************************************************/

namespace {

// Assembles equations  sum_i  L_i * X_{k_i} * R_i = RHS  over several matrix
// variables into a single linear system, and solves it exactly.
class MatrixSystem {
  public:
    explicit MatrixSystem(const Field& f) : f_(f) {}

    void add_var(std::pair<int, int> key, int rows, int cols) {
        if (rows <= 0 || cols <= 0) return;
        vars_[key] = Var{rows, cols, nvars_};
        nvars_ += rows * cols;
    }

    void begin_eq(const Matrix& rhs) { eqs_.push_back(Eq{rhs, {}}); }

    // Adds L * X(key) * R to the current equation (skipped if the variable is
    // absent, i.e. identically zero by shape).
    void add_term(std::pair<int, int> key, const Matrix& l, const Matrix& r) {
        if (vars_.find(key) == vars_.end()) return;
        if (l.rows() == 0 || l.cols() == 0 || r.rows() == 0 || r.cols() == 0) return;
        eqs_.back().terms.push_back(Term{key, l, r});
    }

    std::optional<std::map<std::pair<int, int>, Matrix>> solve_system() {
        int total_rows = 0;
        for (auto& e : eqs_) total_rows += e.rhs.rows() * e.rhs.cols();
        Matrix a(f_, total_rows, nvars_);
        Matrix b(f_, total_rows, 1);
        int off = 0;
        for (auto& e : eqs_) {
            int er = e.rhs.rows(), ec = e.rhs.cols();
            for (int i = 0; i < er; ++i)
                for (int j = 0; j < ec; ++j) b.set(off + i * ec + j, 0, e.rhs.at(i, j));
            for (auto& t : e.terms) {
                const Var& v = vars_.at(t.key);
                internal_check(t.l.cols() == v.rows && t.r.rows() == v.cols &&
                                   t.l.rows() == er && t.r.cols() == ec,
                               "matrix system: term shape mismatch");
                Matrix m = kron(t.l, t.r.transpose());
                for (int i = 0; i < m.rows(); ++i)
                    for (int j = 0; j < m.cols(); ++j) {
                        Scalar s = m.at(i, j);
                        if (s.is_zero()) continue;
                        a.set(off + i, v.offset + j, a.at(off + i, v.offset + j) + s);
                    }
            }
            off += er * ec;
        }
        auto x = solve(a, b);
        if (!x) return std::nullopt;
        std::map<std::pair<int, int>, Matrix> out;
        for (auto& [key, v] : vars_) {
            Matrix m(f_, v.rows, v.cols);
            for (int i = 0; i < v.rows; ++i)
                for (int j = 0; j < v.cols; ++j) m.set(i, j, x->at(v.offset + i * v.cols + j, 0));
            out[key] = std::move(m);
        }
        return out;
    }

  private:
    struct Var {
        int rows, cols, offset;
    };
    struct Term {
        std::pair<int, int> key;
        Matrix l, r;
    };
    struct Eq {
        Matrix rhs;
        std::vector<Term> terms;
    };
    Field f_;
    std::map<std::pair<int, int>, Var> vars_;
    int nvars_ = 0;
    std::vector<Eq> eqs_;
};

constexpr int kVarH = 0;   // h_j : C_j -> C'_{j+1}
constexpr int kVarHH = 1;  // H_j : C_j -> C'_{j+2}

}  // namespace

std::optional<PreMorphism> find_homotopy(const HoMorphism& from, const HoMorphism& to) {
    require(from.src == to.src && from.tgt == to.tgt,
            "homotopy: ho-morphisms have different endpoints");
    const EndoComplex& s = from.src;
    const EndoComplex& t = from.tgt;
    const Field& f = s.field();
    int lo = s.complex().lo(), hi = s.complex().hi();

    MatrixSystem sys(f);
    for (int j = lo; j <= hi; ++j) {
        sys.add_var({kVarH, j}, t.dim(j + 1), s.dim(j));
        sys.add_var({kVarHH, j}, t.dim(j + 2), s.dim(j));
    }
    for (int j = lo; j <= hi; ++j) {
        if (s.dim(j) == 0) continue;
        // d' h_j + h_{j-1} d_j = g_j - f_j
        sys.begin_eq(ho_f_at(to, j) - ho_f_at(from, j));
        sys.add_term({kVarH, j}, t.d(j + 1), Matrix::identity(f, s.dim(j)));
        sys.add_term({kVarH, j - 1}, Matrix::identity(f, t.dim(j)), s.d(j));
        // d' H_j - H_{j-1} d_j - h_j phi_j + phi'_{j+1} h_j = G_j - F_j
        sys.begin_eq(ho_F_at(to, j) - ho_F_at(from, j));
        sys.add_term({kVarHH, j}, t.d(j + 2), Matrix::identity(f, s.dim(j)));
        sys.add_term({kVarHH, j - 1}, -Matrix::identity(f, t.dim(j + 1)), s.d(j));
        sys.add_term({kVarH, j}, -Matrix::identity(f, t.dim(j + 1)), s.endo(j));
        sys.add_term({kVarH, j}, t.endo(j + 1), Matrix::identity(f, s.dim(j)));
    }
    auto sol = sys.solve_system();
    if (!sol) return std::nullopt;

    PreMorphism h;
    h.degree = -1;
    for (auto& [key, m] : *sol) {
        if (key.first == kVarH) h.f[key.second] = m;
        else h.F[key.second] = m;
    }
    return h;
}

/******************************************************************************
 * Mapping cylinder
 ******************************************************************************/

EndoComplex mapping_cylinder(const HoMorphism& m) {
    const EndoComplex& x = m.src;
    const EndoComplex& y = m.tgt;
    const Field& f = x.field();
    require(x.complex().cohomological_p() == y.complex().cohomological_p(),
            "mapping cylinder: variance mismatch");

    int lo = std::min(x.complex().lo(), y.complex().lo());
    int hi = std::max(x.complex().hi() + 1, y.complex().hi());
    std::map<int, int> dims;
    for (int n = lo; n <= hi; ++n) {
        int dsum = x.dim(n - 1) + y.dim(n) + x.dim(n);
        if (dsum > 0) dims[n] = dsum;
    }

    DegMap diffs, endo;
    for (int n = lo; n <= hi; ++n) {
        int c1 = x.dim(n - 1), c2 = y.dim(n), c3 = x.dim(n);
        if (c1 + c2 + c3 == 0) continue;
        // differential [[-d,0,0],[-f,d',0],[1,0,d]]
        Matrix iden = Matrix::identity(f, c1);
        std::vector<std::vector<Matrix>> dgrid = {
            {-x.d(n - 1), Matrix(f, x.dim(n - 2), c2), Matrix(f, x.dim(n - 2), c3)},
            {-ho_f_at(m, n - 1), y.d(n), Matrix(f, y.dim(n - 1), c3)},
            {iden, Matrix(f, c1, c2), x.d(n)},
        };
        Matrix dn = block_matrix(dgrid);
        if (dn.rows() > 0 && dn.cols() > 0) diffs[n] = dn;

        // endomorphism [[phi,0,0],[-F,phi',0],[0,0,phi]]
        std::vector<std::vector<Matrix>> egrid = {
            {x.endo(n - 1), Matrix(f, c1, c2), Matrix(f, c1, c3)},
            {-ho_F_at(m, n - 1), y.endo(n), Matrix(f, c2, c3)},
            {Matrix(f, c3, c1), Matrix(f, c3, c2), x.endo(n)},
        };
        endo[n] = block_matrix(egrid);
    }
    Complex cyl = Complex::build(f, x.complex().cohomological_p(), dims, diffs);
    return EndoComplex::build(std::move(cyl), endo);
}

/******************************************************************************
 * Homology model
 ******************************************************************************/

HomologyModel homology_model(const EndoComplex& x) {
    const Complex& c = x.complex();
    const Field& fl = c.field();
    HomologyData hd = homology(c);

    std::map<int, int> hdims;
    DegMap hphi;
    for (auto& [n, deg] : hd.at) {
        int hn = deg.section.cols();
        if (hn == 0) continue;
        hdims[n] = hn;
        hphi[n] = deg.projection * x.endo(n) * deg.section;
    }
    Complex hc = Complex::build(fl, c.cohomological_p(), hdims, {});
    EndoComplex model = EndoComplex::build(hc, hphi);

    DegMap f, bigF;
    for (auto& [n, deg] : hd.at) {
        if (deg.section.cols() == 0) continue;
        f[n] = deg.section;
        // d F = phi f - f H(phi): the right-hand side is a boundary degreewise
        Matrix rhs = x.endo(n) * deg.section - deg.section * model.endo(n);
        auto w = solve(c.d(n + 1), rhs);
        internal_check(w.has_value(), "homology model: homotopy right-hand side not a boundary");
        if (w->rows() > 0) bigF[n] = *w;
    }
    HoMorphism map = make_ho_morphism(model, x, std::move(f), std::move(bigF));
    QuasiIsoReport qi = is_quasi_iso(ho_underlying_chain_map(map));
    internal_check(qi.ok, "homology model: section map is not a quasi-isomorphism");
    return HomologyModel{std::move(model), std::move(map), std::move(hd), std::move(qi)};
}

}  // namespace homform
