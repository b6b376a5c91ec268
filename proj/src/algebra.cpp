#include "gvfan/algebra.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gvfan {

namespace {

constexpr size_t kMaxPaths = 20000;

struct RawPath {
    int src = 0;
    std::vector<int> arrows;  // application order
    int tgt = 0;
};

std::string arrow_join(const AlgebraPresentation& pres, const std::vector<int>& arrows) {
    std::string s;
    for (size_t i = 0; i < arrows.size(); ++i) {
        if (i) s += "*";
        s += pres.arrows[arrows[i]].name;
    }
    return s;
}

void elt_add(AlgElt& dst, const AlgElt& src, const Rat& scale) {
    if (scale == 0) return;
    for (const auto& [id, c] : src) {
        Rat add = c * scale;
        auto it = dst.find(id);
        if (it == dst.end()) {
            if (add != 0) dst.emplace(id, add);
        } else {
            it->second += add;
            if (it->second == 0) dst.erase(it);
        }
    }
}

// blocks of a map between direct sums of projectives, entry (r, c) in e_{v_r} L e_{u_c}
using Blocks = std::vector<std::vector<AlgElt>>;

Blocks blocks_zero(size_t rows, size_t cols) { return Blocks(rows, std::vector<AlgElt>(cols)); }

Blocks blocks_compose(const Algebra& a, const Blocks& later, const Blocks& earlier) {
    size_t rows = later.size();
    size_t mid = earlier.size();
    size_t cols = mid ? earlier[0].size() : 0;
    Blocks res = blocks_zero(rows, cols);
    for (size_t r = 0; r < rows; ++r)
        for (size_t m = 0; m < mid; ++m) {
            if (later[r][m].empty()) continue;
            for (size_t c = 0; c < cols; ++c) {
                if (earlier[m][c].empty()) continue;
                elt_add(res[r][c], alg_mul(a, later[r][m], earlier[m][c]), 1);
            }
        }
    return res;
}

// coordinates for the space of maps (sum over source summands) -> (sum over target summands)
struct MapLayout {
    const Algebra* alg;
    std::vector<int> tv, sv;
    std::vector<std::vector<size_t>> off;
    size_t dim = 0;

    MapLayout(const Algebra& a, const std::vector<int>& target_verts, const std::vector<int>& source_verts)
        : alg(&a), tv(target_verts), sv(source_verts) {
        off.assign(tv.size(), std::vector<size_t>(sv.size(), 0));
        for (size_t r = 0; r < tv.size(); ++r)
            for (size_t c = 0; c < sv.size(); ++c) {
                off[r][c] = dim;
                dim += ids(r, c).size();
            }
    }
    const std::vector<int>& ids(size_t r, size_t c) const { return alg->block[sv[c]][tv[r]]; }

    size_t coord(size_t r, size_t c, int id) const {
        const auto& v = ids(r, c);
        auto it = std::lower_bound(v.begin(), v.end(), id);
        if (it == v.end() || *it != id) throw std::logic_error("basis element outside its block");
        return off[r][c] + size_t(it - v.begin());
    }
    void accumulate(QVec& vec, size_t r, size_t c, const AlgElt& e, int sgn) const {
        for (const auto& [id, co] : e) {
            Rat term = co * sgn;
            vec[coord(r, c, id)] += term;
        }
    }
    Blocks unpack(const QVec& v, size_t base = 0) const {
        Blocks b = blocks_zero(tv.size(), sv.size());
        for (size_t r = 0; r < tv.size(); ++r)
            for (size_t c = 0; c < sv.size(); ++c) {
                const auto& list = ids(r, c);
                for (size_t k = 0; k < list.size(); ++k) {
                    const Rat& val = v[base + off[r][c] + k];
                    if (val != 0) b[r][c][list[k]] = val;
                }
            }
        return b;
    }
};

// incremental sparse row space, forward elimination only; pivot set and rank
// of the row span are basis independent
struct SparseRowSpace {
    std::vector<std::map<size_t, Rat>> rows;   // normalized: leading coefficient 1
    std::map<size_t, size_t> pivot_row;        // leading column -> row index

    bool add(std::map<size_t, Rat> v) {
        while (!v.empty()) {
            size_t lead = v.begin()->first;
            auto it = pivot_row.find(lead);
            if (it == pivot_row.end()) {
                Rat inv = v.begin()->second;
                for (auto& [j, c] : v) c /= inv;
                pivot_row.emplace(lead, rows.size());
                rows.push_back(std::move(v));
                return true;
            }
            Rat factor = v.begin()->second;
            const auto& prow = rows[it->second];
            for (const auto& [j, c] : prow) {
                Rat delta = c * factor;
                auto vt = v.find(j);
                if (vt == v.end()) {
                    if (delta != 0) v.emplace(j, -delta);
                } else {
                    vt->second -= delta;
                    if (vt->second == 0) v.erase(vt);
                }
            }
        }
        return false;
    }
    size_t rank() const { return rows.size(); }
};

std::map<size_t, Rat> to_sparse(const QVec& v) {
    std::map<size_t, Rat> s;
    for (size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0) s.emplace(i, v[i]);
    return s;
}

size_t rank_of_columns(const std::vector<QVec>& cols) {
    SparseRowSpace rs;
    for (const auto& c : cols) rs.add(to_sparse(c));
    return rs.rank();
}

QMat mat_from_cols(const std::vector<QVec>& cols, size_t nrows) {
    if (nrows == 0 || cols.empty()) return {};
    QMat m(nrows, QVec(cols.size(), Rat(0)));
    for (size_t j = 0; j < cols.size(); ++j)
        for (size_t i = 0; i < nrows; ++i) m[i][j] = cols[j][i];
    return m;
}

std::vector<QVec> cols_of(const QMat& m) {
    std::vector<QVec> cols;
    if (m.empty()) return cols;
    cols.assign(m[0].size(), QVec(m.size(), Rat(0)));
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = 0; j < m[i].size(); ++j) cols[j][i] = m[i][j];
    return cols;
}

// exact nullspace of a sparse system; forward elimination, then back
// substitution per free column.  Matches the dense nullspace up to basis.
std::vector<QVec> nullspace_sparse(size_t ncols, const std::vector<std::map<size_t, Rat>>& eqrows) {
    SparseRowSpace rs;
    for (const auto& r : eqrows) rs.add(r);
    std::vector<char> is_pivot(ncols, 0);
    for (const auto& [col, row] : rs.pivot_row) is_pivot[col] = 1;
    // rows ordered by decreasing pivot for back substitution
    std::vector<std::pair<size_t, size_t>> by_pivot(rs.pivot_row.begin(), rs.pivot_row.end());
    std::vector<QVec> basis;
    for (size_t f = 0; f < ncols; ++f) {
        if (is_pivot[f]) continue;
        QVec x(ncols, Rat(0));
        x[f] = 1;
        for (auto it = by_pivot.rbegin(); it != by_pivot.rend(); ++it) {
            if (it->first > f) continue;  // rows with pivot beyond f cannot touch x's support
            const auto& row = rs.rows[it->second];
            Rat dot(0);
            for (const auto& [j, c] : row)
                if (j != it->first && x[j] != 0) dot += c * x[j];
            x[it->first] = -dot;
        }
        basis.push_back(std::move(x));
    }
    return basis;
}

void validate_complex(const Algebra& a, const TwoTermComplex& x) {
    int V = a.pres.vertices;
    if ((int)x.m_minus.size() != V || (int)x.m_plus.size() != V)
        throw std::invalid_argument("complex multiplicities do not match the algebra");
    auto mv = summand_vertices(x.m_minus);
    auto pv = summand_vertices(x.m_plus);
    if (x.f.size() != pv.size()) throw std::invalid_argument("differential has wrong number of rows");
    for (size_t r = 0; r < pv.size(); ++r) {
        if (x.f[r].size() != mv.size()) throw std::invalid_argument("differential has wrong number of columns");
        for (size_t c = 0; c < mv.size(); ++c)
            for (const auto& [id, co] : x.f[r][c]) {
                const auto& ids = a.block[mv[c]][pv[r]];
                if (!std::binary_search(ids.begin(), ids.end(), id))
                    throw std::invalid_argument("differential entry outside its hom block");
                (void)co;
            }
    }
}

std::vector<size_t> vertex_sort_perm(const std::vector<int>& verts, int V) {
    std::vector<size_t> start(V + 1, 0);
    for (int v : verts) ++start[v + 1];
    for (int v = 0; v < V; ++v) start[v + 1] += start[v];
    std::vector<size_t> pos(verts.size());
    for (size_t i = 0; i < verts.size(); ++i) pos[i] = start[verts[i]]++;
    return pos;
}

}  // namespace

// --- algebra construction ---------------------------------------------------

Algebra make_algebra(const AlgebraPresentation& pres) {
    if (pres.vertices < 1) throw std::invalid_argument("algebra needs at least one vertex");
    if (pres.nilpotency_bound < 1) throw std::invalid_argument("nilpotency bound must be positive");
    for (const auto& ar : pres.arrows)
        if (ar.source < 0 || ar.source >= pres.vertices || ar.target < 0 || ar.target >= pres.vertices)
            throw std::invalid_argument("arrow endpoint out of range: " + ar.name);
    const int L = pres.nilpotency_bound;

    // enumerate paths of length <= L
    std::vector<RawPath> paths;
    std::map<std::pair<int, std::vector<int>>, size_t> path_idx;
    auto add_path = [&](RawPath p) {
        if (paths.size() >= kMaxPaths) throw std::runtime_error("path basis exceeds 20000 elements");
        path_idx.emplace(std::make_pair(p.src, p.arrows), paths.size());
        paths.push_back(std::move(p));
    };
    for (int v = 0; v < pres.vertices; ++v) add_path({v, {}, v});
    size_t layer_begin = 0;
    for (int len = 1; len <= L; ++len) {
        size_t layer_end = paths.size();
        for (size_t i = layer_begin; i < layer_end; ++i)
            for (size_t ai = 0; ai < pres.arrows.size(); ++ai) {
                if (pres.arrows[ai].source != paths[i].tgt) continue;
                RawPath p = paths[i];
                p.arrows.push_back((int)ai);
                p.tgt = pres.arrows[ai].target;
                add_path(std::move(p));
            }
        layer_begin = layer_end;
    }
    auto lookup = [&](int src, const std::vector<int>& arrows) -> size_t {
        auto it = path_idx.find(std::make_pair(src, arrows));
        if (it == path_idx.end()) throw std::logic_error("path lookup failed");
        return it->second;
    };

    // validate relations and find each relation's endpoints
    struct RelInfo {
        int src, tgt, minlen;
    };
    std::vector<RelInfo> rinfo;
    for (const auto& rel : pres.relations) {
        if (rel.empty()) throw std::invalid_argument("empty relation");
        int src = -1, tgt = -1, minlen = L + 1;
        for (const auto& term : rel) {
            if (term.coeff == 0) throw std::invalid_argument("zero coefficient in relation");
            if (term.arrows.empty()) throw std::invalid_argument("relation term with empty path");
            for (size_t k = 0; k < term.arrows.size(); ++k) {
                int ai = term.arrows[k];
                if (ai < 0 || ai >= (int)pres.arrows.size())
                    throw std::invalid_argument("relation names an unknown arrow");
                if (k + 1 < term.arrows.size() &&
                    pres.arrows[ai].target != pres.arrows[term.arrows[k + 1]].source)
                    throw std::invalid_argument("relation term is not a composable path");
            }
            int s = pres.arrows[term.arrows.front()].source;
            int t = pres.arrows[term.arrows.back()].target;
            if (src == -1) {
                src = s;
                tgt = t;
            } else if (s != src || t != tgt)
                throw std::invalid_argument("relation terms have mismatched endpoints");
            minlen = std::min(minlen, (int)term.arrows.size());
        }
        rinfo.push_back({src, tgt, minlen});
    }

    // coordinate order: longer paths first so they become the pivots and the
    // basis keeps the shortest representatives
    std::vector<size_t> order(paths.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
        if (paths[x].arrows.size() != paths[y].arrows.size())
            return paths[x].arrows.size() > paths[y].arrows.size();
        if (paths[x].arrows != paths[y].arrows) return paths[x].arrows < paths[y].arrows;
        return paths[x].src < paths[y].src;
    });
    std::vector<size_t> col_of(paths.size());
    for (size_t pos = 0; pos < order.size(); ++pos) col_of[order[pos]] = pos;

    // span of all products (later path) o (relation) o (earlier path), length > L dropped
    QMat wrows;
    for (size_t ri = 0; ri < pres.relations.size(); ++ri) {
        const auto& rel = pres.relations[ri];
        const auto& info = rinfo[ri];
        for (const auto& q : paths) {
            if (q.tgt != info.src) continue;
            for (const auto& p : paths) {
                if (p.src != info.tgt) continue;
                if ((int)(q.arrows.size() + p.arrows.size()) + info.minlen > L) continue;
                QVec row(paths.size(), Rat(0));
                bool nonzero = false;
                for (const auto& term : rel) {
                    if (q.arrows.size() + term.arrows.size() + p.arrows.size() > (size_t)L) continue;
                    std::vector<int> full = q.arrows;
                    full.insert(full.end(), term.arrows.begin(), term.arrows.end());
                    full.insert(full.end(), p.arrows.begin(), p.arrows.end());
                    row[col_of[lookup(q.src, full)]] += term.coeff;
                    nonzero = true;
                }
                if (nonzero) wrows.push_back(std::move(row));
            }
        }
    }
    std::vector<size_t> pivots;
    size_t wrank = rref(wrows, &pivots);
    std::vector<char> is_pivot(paths.size(), 0);
    std::vector<size_t> pivot_rref_row(paths.size(), SIZE_MAX);
    for (size_t r = 0; r < wrank; ++r) {
        is_pivot[pivots[r]] = 1;
        pivot_rref_row[pivots[r]] = r;
    }

    // admissibility at the bound: length-L paths must all reduce to zero
    for (size_t i = 0; i < paths.size(); ++i)
        if ((int)paths[i].arrows.size() == L && !is_pivot[col_of[i]])
            throw std::invalid_argument("path of length " + std::to_string(L) +
                                        " does not vanish: " + arrow_join(pres, paths[i].arrows));

    Algebra a;
    a.pres = pres;

    // basis ids for non-pivot paths, shortest first
    std::vector<size_t> basis_paths;
    for (size_t i = 0; i < paths.size(); ++i)
        if (!is_pivot[col_of[i]]) basis_paths.push_back(i);
    std::sort(basis_paths.begin(), basis_paths.end(), [&](size_t x, size_t y) {
        if (paths[x].arrows.size() != paths[y].arrows.size())
            return paths[x].arrows.size() < paths[y].arrows.size();
        if (paths[x].src != paths[y].src) return paths[x].src < paths[y].src;
        return paths[x].arrows < paths[y].arrows;
    });
    std::vector<int> bid_of_path(paths.size(), -1);
    for (size_t b = 0; b < basis_paths.size(); ++b) {
        size_t i = basis_paths[b];
        bid_of_path[i] = (int)b;
        a.path_arrows.push_back(paths[i].arrows);
        a.bsrc.push_back(paths[i].src);
        a.btgt.push_back(paths[i].tgt);
    }
    a.unit.assign(pres.vertices, -1);
    for (size_t b = 0; b < basis_paths.size(); ++b)
        if (paths[basis_paths[b]].arrows.empty()) a.unit[paths[basis_paths[b]].src] = (int)b;
    for (int v = 0; v < pres.vertices; ++v)
        if (a.unit[v] < 0) throw std::logic_error("missing unit path");

    // reduction of every enumerated path to the quotient basis
    std::vector<AlgElt> path_elt(paths.size());
    for (size_t i = 0; i < paths.size(); ++i) {
        size_t col = col_of[i];
        if (!is_pivot[col]) {
            path_elt[i][bid_of_path[i]] = 1;
            continue;
        }
        const QVec& row = wrows[pivot_rref_row[col]];
        for (size_t j = 0; j < row.size(); ++j) {
            if (j == col || row[j] == 0) continue;
            size_t pj = order[j];
            if (is_pivot[j]) throw std::logic_error("rref row not fully reduced");
            Rat neg = -row[j];
            path_elt[i][bid_of_path[pj]] = neg;
        }
    }

    a.arrow_elt.resize(pres.arrows.size());
    for (size_t ai = 0; ai < pres.arrows.size(); ++ai)
        a.arrow_elt[ai] = path_elt[lookup(pres.arrows[ai].source, {(int)ai})];

    size_t nb = basis_paths.size();
    a.block.assign(pres.vertices, std::vector<std::vector<int>>(pres.vertices));
    for (size_t b = 0; b < nb; ++b) a.block[a.bsrc[b]][a.btgt[b]].push_back((int)b);

    a.mul_table.assign(nb, std::vector<AlgElt>(nb));
    for (size_t x = 0; x < nb; ++x)
        for (size_t y = 0; y < nb; ++y) {
            if (a.btgt[y] != a.bsrc[x]) continue;
            std::vector<int> full = a.path_arrows[y];
            full.insert(full.end(), a.path_arrows[x].begin(), a.path_arrows[x].end());
            if ((int)full.size() > L) continue;  // killed by the bound
            a.mul_table[x][y] = path_elt[lookup(a.bsrc[y], full)];
        }
    return a;
}

int algebra_dim(const Algebra& a) { return (int)a.path_arrows.size(); }

std::string path_name(const Algebra& a, int basis_id) {
    if (basis_id < 0 || basis_id >= (int)a.path_arrows.size()) throw std::invalid_argument("bad basis id");
    if (a.path_arrows[basis_id].empty()) return "e_" + std::to_string(a.bsrc[basis_id]);
    return arrow_join(a.pres, a.path_arrows[basis_id]);
}

AlgElt alg_mul(const Algebra& a, const AlgElt& later, const AlgElt& earlier) {
    AlgElt out;
    for (const auto& [x, cx] : later)
        for (const auto& [y, cy] : earlier) {
            const AlgElt& prod = a.mul_table[x][y];
            if (prod.empty()) continue;
            Rat scale = cx * cy;
            elt_add(out, prod, scale);
        }
    return out;
}

AlgElt alg_local_inverse(const Algebra& a, const AlgElt& x, int v) {
    if (v < 0 || v >= a.pres.vertices) throw std::invalid_argument("bad vertex");
    int e = a.unit[v];
    Rat c0(0);
    AlgElt nil;
    for (const auto& [id, c] : x) {
        if (a.bsrc[id] != v || a.btgt[id] != v)
            throw std::invalid_argument("element does not live in e_v L e_v");
        if (id == e)
            c0 = c;
        else
            nil[id] = c;
    }
    if (c0 == 0) throw std::invalid_argument("element is not locally invertible");
    // geometric series: (c0 + n)^{-1} = sum (-1)^k n^k / c0^{k+1}
    AlgElt acc;
    AlgElt pw;
    pw[e] = 1;
    Rat coef = 1 / c0;
    int dim = algebra_dim(a);
    for (int k = 0; k <= dim; ++k) {
        if (pw.empty()) break;
        elt_add(acc, pw, coef);
        pw = alg_mul(a, nil, pw);
        coef = -coef / c0;
    }
    if (!pw.empty()) throw std::logic_error("radical part failed to vanish");
    return acc;
}

AlgebraPresentation kronecker_algebra() {
    AlgebraPresentation p;
    p.vertices = 2;
    p.arrows = {{"a", 0, 1}, {"b", 0, 1}};
    p.nilpotency_bound = 2;
    return p;
}

AlgebraPresentation linear_algebra_a2() {
    AlgebraPresentation p;
    p.vertices = 2;
    p.arrows = {{"a", 0, 1}};
    p.nilpotency_bound = 2;
    return p;
}

AlgebraPresentation loop_algebra(int relation_power) {
    if (relation_power < 1) throw std::invalid_argument("relation power must be positive");
    AlgebraPresentation p;
    p.vertices = 1;
    p.arrows = {{"x", 0, 0}};
    Relation r;
    r.push_back({Rat(1), std::vector<int>(relation_power, 0)});
    p.relations.push_back(r);
    p.nilpotency_bound = relation_power;
    return p;
}

// --- two-term complexes -----------------------------------------------------

std::vector<int> summand_vertices(const IntVec& m) {
    std::vector<int> verts;
    for (size_t v = 0; v < m.size(); ++v) {
        if (m[v] < 0) throw std::invalid_argument("negative multiplicity");
        for (long long k = 0; k < m[v]; ++k) verts.push_back((int)v);
    }
    return verts;
}

IntVec g_vector(const TwoTermComplex& x) {
    if (x.m_minus.size() != x.m_plus.size()) throw std::invalid_argument("multiplicity size mismatch");
    IntVec g(x.m_minus.size());
    for (size_t v = 0; v < g.size(); ++v) g[v] = x.m_plus[v] - x.m_minus[v];
    return g;
}

TwoTermComplex projective_complex(const Algebra& a, const IntVec& g) {
    if ((int)g.size() != a.pres.vertices) throw std::invalid_argument("g-vector size mismatch");
    TwoTermComplex x;
    x.m_minus.assign(g.size(), 0);
    x.m_plus.assign(g.size(), 0);
    for (size_t v = 0; v < g.size(); ++v) {
        if (g[v] >= 0)
            x.m_plus[v] = g[v];
        else
            x.m_minus[v] = -g[v];
    }
    size_t np = summand_vertices(x.m_plus).size();
    size_t nm = summand_vertices(x.m_minus).size();
    x.f.assign(np, std::vector<AlgElt>(nm));
    return x;
}

TwoTermComplex shifted_algebra(const Algebra& a) {
    TwoTermComplex x;
    x.m_minus.assign(a.pres.vertices, 1);
    x.m_plus.assign(a.pres.vertices, 0);
    x.f.clear();
    return x;
}

// --- hom spaces ---------------------------------------------------------------

HomSpace hom_complexes(const Algebra& a, const TwoTermComplex& x, const TwoTermComplex& y, int shift) {
    validate_complex(a, x);
    validate_complex(a, y);
    auto Xp = summand_vertices(x.m_plus), Xm = summand_vertices(x.m_minus);
    auto Yp = summand_vertices(y.m_plus), Ym = summand_vertices(y.m_minus);
    HomSpace hs;

    if (shift == 1) {
        MapLayout U(a, Yp, Xm);
        size_t N = U.dim;
        hs.space_dim = N;
        std::vector<QVec> hcols;
        // h : X^{-1} -> Y^{-1} gives f_Y o h
        MapLayout L1(a, Ym, Xm);
        for (size_t t = 0; t < Ym.size(); ++t)
            for (size_t c = 0; c < Xm.size(); ++c)
                for (int b : L1.ids(t, c)) {
                    QVec col(N, Rat(0));
                    AlgElt eb;
                    eb[b] = 1;
                    bool nz = false;
                    for (size_t r = 0; r < Yp.size(); ++r) {
                        if (y.f[r][t].empty()) continue;
                        AlgElt e = alg_mul(a, y.f[r][t], eb);
                        if (!e.empty()) nz = true;
                        U.accumulate(col, r, c, e, 1);
                    }
                    if (nz) hcols.push_back(std::move(col));
                }
        // h : X^0 -> Y^0 gives h o f_X
        MapLayout L2(a, Yp, Xp);
        for (size_t r = 0; r < Yp.size(); ++r)
            for (size_t s = 0; s < Xp.size(); ++s)
                for (int b : L2.ids(r, s)) {
                    QVec col(N, Rat(0));
                    AlgElt eb;
                    eb[b] = 1;
                    bool nz = false;
                    for (size_t c = 0; c < Xm.size(); ++c) {
                        if (x.f[s][c].empty()) continue;
                        AlgElt e = alg_mul(a, eb, x.f[s][c]);
                        if (!e.empty()) nz = true;
                        U.accumulate(col, r, c, e, 1);
                    }
                    if (nz) hcols.push_back(std::move(col));
                }
        hs.quotient_dim = N - rank_of_columns(hcols);
        hs.homotopy_sub = mat_from_cols(hcols, N);
        return hs;
    }
    if (shift != 0) throw std::invalid_argument("shift must be 0 or 1");

    MapLayout U0(a, Yp, Xp), U1(a, Ym, Xm), EQ(a, Yp, Xm);
    size_t N = U0.dim + U1.dim;
    hs.space_dim = N;

    // chain condition u0 o f_X - f_Y o u1 = 0, one sparse row per EQ coordinate
    std::vector<std::map<size_t, Rat>> eqrows(EQ.dim);
    size_t vi = 0;
    auto put = [&](size_t eqcoord, size_t var, const Rat& val) {
        if (val == 0) return;
        auto& row = eqrows[eqcoord];
        auto it = row.find(var);
        if (it == row.end())
            row.emplace(var, val);
        else {
            it->second += val;
            if (it->second == 0) row.erase(it);
        }
    };
    for (size_t r = 0; r < Yp.size(); ++r)
        for (size_t s = 0; s < Xp.size(); ++s)
            for (int b : U0.ids(r, s)) {
                AlgElt eb;
                eb[b] = 1;
                for (size_t c = 0; c < Xm.size(); ++c) {
                    if (x.f[s][c].empty()) continue;
                    AlgElt e = alg_mul(a, eb, x.f[s][c]);
                    for (const auto& [id, co] : e) put(EQ.coord(r, c, id), vi, co);
                }
                ++vi;
            }
    for (size_t t = 0; t < Ym.size(); ++t)
        for (size_t c = 0; c < Xm.size(); ++c)
            for (int b : U1.ids(t, c)) {
                AlgElt eb;
                eb[b] = 1;
                for (size_t r = 0; r < Yp.size(); ++r) {
                    if (y.f[r][t].empty()) continue;
                    AlgElt e = alg_mul(a, y.f[r][t], eb);
                    for (const auto& [id, co] : e) {
                        Rat neg = -co;
                        put(EQ.coord(r, c, id), vi, neg);
                    }
                }
                ++vi;
            }
    if (vi != N) throw std::logic_error("variable count mismatch");

    std::vector<QVec> chain;
    if (EQ.dim == 0) {
        for (size_t j = 0; j < N; ++j) {
            QVec e(N, Rat(0));
            e[j] = 1;
            chain.push_back(std::move(e));
        }
    } else if (N <= 300 && EQ.dim <= 300) {
        QMat M(EQ.dim, QVec(N, Rat(0)));
        for (size_t e = 0; e < EQ.dim; ++e)
            for (const auto& [j, c] : eqrows[e]) M[e][j] = c;
        chain = nullspace(std::move(M));
    } else {
        chain = nullspace_sparse(N, eqrows);
    }

    // null-homotopic maps (f_Y o h, h o f_X) for h : X^0 -> Y^{-1}
    std::vector<QVec> hcols;
    MapLayout HH(a, Ym, Xp);
    for (size_t t = 0; t < Ym.size(); ++t)
        for (size_t s = 0; s < Xp.size(); ++s)
            for (int b : HH.ids(t, s)) {
                QVec col(N, Rat(0));
                AlgElt eb;
                eb[b] = 1;
                bool nz = false;
                for (size_t r = 0; r < Yp.size(); ++r) {
                    if (y.f[r][t].empty()) continue;
                    AlgElt e = alg_mul(a, y.f[r][t], eb);
                    if (!e.empty()) nz = true;
                    for (const auto& [id, co] : e) col[U0.coord(r, s, id)] += co;
                }
                for (size_t c = 0; c < Xm.size(); ++c) {
                    if (x.f[s][c].empty()) continue;
                    AlgElt e = alg_mul(a, eb, x.f[s][c]);
                    if (!e.empty()) nz = true;
                    for (const auto& [id, co] : e) col[U0.dim + U1.coord(t, c, id)] += co;
                }
                if (nz) hcols.push_back(std::move(col));
            }
    hs.chain_basis = mat_from_cols(chain, N);
    hs.homotopy_sub = mat_from_cols(hcols, N);
    hs.quotient_dim = chain.size() - rank_of_columns(hcols);
    return hs;
}

bool is_presilting(const Algebra& a, const TwoTermComplex& x) {
    return hom_complexes(a, x, x, 1).quotient_dim == 0;
}

TwoTermComplex random_complex(const Algebra& a, const IntVec& g, long long coeff_range, SplitRng& rng) {
    if (coeff_range < 0) throw std::invalid_argument("coefficient range must be nonnegative");
    TwoTermComplex x = projective_complex(a, g);
    auto pv = summand_vertices(x.m_plus);
    auto mv = summand_vertices(x.m_minus);
    for (size_t r = 0; r < pv.size(); ++r)
        for (size_t c = 0; c < mv.size(); ++c)
            for (int id : a.block[mv[c]][pv[r]]) {
                long long val = rng.uniform(-coeff_range, coeff_range);
                if (val != 0) x.f[r][c][id] = rat(val);
            }
    return x;
}

size_t e_invariant(const Algebra& a, const IntVec& g, const IntVec& gp, size_t trials, SplitRng& rng) {
    if (trials < 1) throw std::invalid_argument("trials must be positive");
    size_t best = SIZE_MAX, hits = 0;
    uint64_t tag = 0;
    auto sample = [&]() {
        SplitRng xr = rng.split(tag++);
        SplitRng yr = rng.split(tag++);
        TwoTermComplex X = random_complex(a, g, 100, xr);
        TwoTermComplex Y = random_complex(a, gp, 100, yr);
        size_t d = hom_complexes(a, X, Y, 1).quotient_dim;
        if (d < best) {
            best = d;
            hits = 1;
        } else if (d == best) {
            ++hits;
        }
    };
    for (size_t t = 0; t < trials; ++t) sample();
    // confirm the minimum with a second independent sample when possible
    for (size_t t = 0; t < trials && hits < 2; ++t) sample();
    return best;
}

TwoTermComplex cylinder(const Algebra& a, const TwoTermComplex& u, const TwoTermComplex& h) {
    validate_complex(a, u);
    validate_complex(a, h);
    auto Up = summand_vertices(u.m_plus), Um = summand_vertices(u.m_minus);
    auto Hp = summand_vertices(h.m_plus), Hm = summand_vertices(h.m_minus);

    // Hom(U, Sigma H) lives in maps U^{-1} -> H^0; its homotopy row space
    // determines both the dimension d and the echelon representatives
    MapLayout U(a, Hp, Um);
    size_t N = U.dim;
    SparseRowSpace rs;
    for (size_t t = 0; t < Hm.size(); ++t)
        for (size_t c = 0; c < Um.size(); ++c)
            for (int b : a.block[Um[c]][Hm[t]]) {
                AlgElt eb;
                eb[b] = 1;
                std::map<size_t, Rat> col;
                for (size_t r = 0; r < Hp.size(); ++r) {
                    if (h.f[r][t].empty()) continue;
                    AlgElt e = alg_mul(a, h.f[r][t], eb);
                    for (const auto& [id, co] : e) col[U.coord(r, c, id)] += co;
                }
                for (auto it = col.begin(); it != col.end();)
                    it = (it->second == 0) ? col.erase(it) : std::next(it);
                if (!col.empty()) rs.add(std::move(col));
            }
    for (size_t r = 0; r < Hp.size(); ++r)
        for (size_t s = 0; s < Up.size(); ++s)
            for (int b : a.block[Up[s]][Hp[r]]) {
                AlgElt eb;
                eb[b] = 1;
                std::map<size_t, Rat> col;
                for (size_t c = 0; c < Um.size(); ++c) {
                    if (u.f[s][c].empty()) continue;
                    AlgElt e = alg_mul(a, eb, u.f[s][c]);
                    for (const auto& [id, co] : e) col[U.coord(r, c, id)] += co;
                }
                for (auto it = col.begin(); it != col.end();)
                    it = (it->second == 0) ? col.erase(it) : std::next(it);
                if (!col.empty()) rs.add(std::move(col));
            }
    size_t d = N - rs.rank();
    if (d == 0) return u;

    // representatives: unit vectors at the non-pivot coordinates, ascending
    std::vector<size_t> reps;
    for (size_t j = 0; j < N; ++j)
        if (!rs.pivot_row.count(j)) reps.push_back(j);
    if (reps.size() != d) throw std::logic_error("echelon representative count mismatch");

    std::vector<int> plusN = Up, minusN = Um;
    for (size_t k = 0; k < d; ++k) plusN.insert(plusN.end(), Hp.begin(), Hp.end());
    for (size_t k = 0; k < d; ++k) minusN.insert(minusN.end(), Hm.begin(), Hm.end());
    Blocks fnat = blocks_zero(plusN.size(), minusN.size());
    for (size_t r = 0; r < Up.size(); ++r)
        for (size_t c = 0; c < Um.size(); ++c) fnat[r][c] = u.f[r][c];
    for (size_t k = 0; k < d; ++k) {
        // decode the unit coordinate into its (row, column, basis id) block slot
        size_t j = reps[k];
        for (size_t r = 0; r < Hp.size(); ++r)
            for (size_t c = 0; c < Um.size(); ++c) {
                const auto& ids = U.ids(r, c);
                if (j >= U.off[r][c] && j < U.off[r][c] + ids.size()) {
                    fnat[Up.size() + k * Hp.size() + r][c][ids[j - U.off[r][c]]] = 1;
                }
            }
        for (size_t r = 0; r < Hp.size(); ++r)
            for (size_t c = 0; c < Hm.size(); ++c)
                fnat[Up.size() + k * Hp.size() + r][Um.size() + k * Hm.size() + c] = h.f[r][c];
    }

    TwoTermComplex out;
    out.m_minus.resize(a.pres.vertices);
    out.m_plus.resize(a.pres.vertices);
    for (int v = 0; v < a.pres.vertices; ++v) {
        out.m_minus[v] = u.m_minus[v] + (long long)d * h.m_minus[v];
        out.m_plus[v] = u.m_plus[v] + (long long)d * h.m_plus[v];
    }
    auto pperm = vertex_sort_perm(plusN, a.pres.vertices);
    auto mperm = vertex_sort_perm(minusN, a.pres.vertices);
    out.f = blocks_zero(plusN.size(), minusN.size());
    for (size_t r = 0; r < plusN.size(); ++r)
        for (size_t c = 0; c < minusN.size(); ++c)
            if (!fnat[r][c].empty()) out.f[pperm[r]][mperm[c]] = fnat[r][c];
    return out;
}

// --- decomposition ------------------------------------------------------------

namespace {

// flat rational coordinates on a direct sum of projectives
struct TermIx {
    std::vector<int> verts;
    std::vector<std::vector<int>> pbasis;  // per summand: basis ids with that target, sorted
    std::vector<size_t> start;
    size_t dim = 0;
};

TermIx make_ix(const Algebra& a, std::vector<int> verts) {
    TermIx ix;
    ix.verts = std::move(verts);
    for (int v : ix.verts) {
        std::vector<int> ids;
        for (int i = 0; i < a.pres.vertices; ++i)
            ids.insert(ids.end(), a.block[i][v].begin(), a.block[i][v].end());
        std::sort(ids.begin(), ids.end());
        ix.start.push_back(ix.dim);
        ix.dim += ids.size();
        ix.pbasis.push_back(std::move(ids));
    }
    return ix;
}

using TermElt = std::vector<AlgElt>;  // one entry per summand

QVec te_flat(const TermIx& ix, const TermElt& te) {
    QVec v(ix.dim, Rat(0));
    for (size_t s = 0; s < ix.pbasis.size(); ++s)
        for (const auto& [id, c] : te[s]) {
            auto it = std::lower_bound(ix.pbasis[s].begin(), ix.pbasis[s].end(), id);
            if (it == ix.pbasis[s].end() || *it != id) throw std::logic_error("element outside projective basis");
            v[ix.start[s] + size_t(it - ix.pbasis[s].begin())] = c;
        }
    return v;
}

TermElt te_unflat(const TermIx& ix, const QVec& v) {
    TermElt te(ix.pbasis.size());
    for (size_t s = 0; s < ix.pbasis.size(); ++s)
        for (size_t k = 0; k < ix.pbasis[s].size(); ++k)
            if (v[ix.start[s] + k] != 0) te[s][ix.pbasis[s][k]] = v[ix.start[s] + k];
    return te;
}

TermElt te_apply(const Algebra& a, const Blocks& blocks, const TermElt& in) {
    TermElt out(blocks.size());
    for (size_t r = 0; r < blocks.size(); ++r)
        for (size_t c = 0; c < in.size(); ++c) {
            if (blocks[r][c].empty() || in[c].empty()) continue;
            elt_add(out[r], alg_mul(a, blocks[r][c], in[c]), 1);
        }
    return out;
}

TermElt te_right_mul(const Algebra& a, const TermElt& te, const AlgElt& g) {
    TermElt out(te.size());
    for (size_t s = 0; s < te.size(); ++s)
        if (!te[s].empty() && !g.empty()) out[s] = alg_mul(a, te[s], g);
    return out;
}

TermElt te_vertex_mask(const Algebra& a, const TermElt& te, int v) {
    TermElt out(te.size());
    for (size_t s = 0; s < te.size(); ++s)
        for (const auto& [id, c] : te[s])
            if (a.bsrc[id] == v) out[s][id] = c;
    return out;
}

QMat endo_matrix(const Algebra& a, const TermIx& ix, const Blocks& blocks) {
    QMat m(ix.dim, QVec(ix.dim, Rat(0)));
    for (size_t s = 0; s < ix.pbasis.size(); ++s)
        for (size_t k = 0; k < ix.pbasis[s].size(); ++k) {
            TermElt e(ix.pbasis.size());
            e[s][ix.pbasis[s][k]] = 1;
            QVec col = te_flat(ix, te_apply(a, blocks, e));
            size_t j = ix.start[s] + k;
            for (size_t i = 0; i < ix.dim; ++i) m[i][j] = col[i];
        }
    return m;
}

// induced action on the tops of the summands.  A nonzero generalized
// eigenspace of a module endomorphism is a projective direct summand, so
// its eigenvalue already shows up here, and this matrix stays small where
// the full coordinate matrix does not.
QMat top_matrix(const Algebra& a, const std::vector<int>& verts, const Blocks& blocks) {
    size_t k = verts.size();
    QMat t(k, QVec(k, Rat(0)));
    for (size_t r = 0; r < k; ++r)
        for (size_t c = 0; c < k; ++c) {
            if (verts[r] != verts[c]) continue;
            auto it = blocks[r][c].find(a.unit[verts[r]]);
            if (it != blocks[r][c].end()) t[r][c] = it->second;
        }
    return t;
}

QMat mat_minus_lambda(QMat m, const Rat& lambda) {
    for (size_t i = 0; i < m.size(); ++i) m[i][i] -= lambda;
    return m;
}

QMat mat_pow(QMat m, size_t e) {
    QMat acc = qmat_identity(m.size());
    while (e) {
        if (e & 1) acc = qmat_mul(acc, m);
        e >>= 1;
        if (e) m = qmat_mul(m, m);
    }
    return acc;
}

std::vector<QVec> colspace_basis(const QMat& m) {
    SparseRowSpace rs;
    std::vector<QVec> out;
    for (const auto& col : cols_of(m))
        if (rs.add(to_sparse(col))) out.push_back(col);  // keep original columns, not echelon combinations
    return out;
}

// writes a submodule (spanned by the given vectors, required to be a direct
// summand isomorphic to a sum of projectives) in projective coordinates:
// generators y_t with vertices w_t, chosen so the y_t span the top
std::vector<std::pair<TermElt, int>> proj_coords(const Algebra& a, const TermIx& ix,
                                                 const std::vector<TermElt>& w) {
    SparseRowSpace span;
    for (const auto& x : w) span.add(to_sparse(te_flat(ix, x)));
    size_t wdim = span.rank();

    SparseRowSpace rs;
    for (const auto& x : w)
        for (size_t ai = 0; ai < a.pres.arrows.size(); ++ai) {
            TermElt y = te_right_mul(a, x, a.arrow_elt[ai]);
            rs.add(to_sparse(te_flat(ix, y)));
        }
    std::vector<std::pair<TermElt, int>> gens;
    size_t pdim = 0;
    for (const auto& x : w)
        for (int v = 0; v < a.pres.vertices; ++v) {
            TermElt y = te_vertex_mask(a, x, v);
            QVec fy = te_flat(ix, y);
            if (rs.add(to_sparse(fy))) {
                gens.emplace_back(std::move(y), v);
                pdim += make_ix(a, {v}).dim;
            }
        }
    if (pdim != wdim) throw std::logic_error("projective coordinate extraction failed");
    return gens;
}

TwoTermComplex subcomplex_from_gens(const Algebra& a, const TwoTermComplex& y, const TermIx& ixp,
                                    const std::vector<std::pair<TermElt, int>>& mgens,
                                    const std::vector<std::pair<TermElt, int>>& pgens) {
    std::vector<int> mverts, pverts;
    for (const auto& g : mgens) mverts.push_back(g.second);
    for (const auto& g : pgens) pverts.push_back(g.second);

    Blocks fnat = blocks_zero(pverts.size(), mverts.size());
    for (size_t c = 0; c < mgens.size(); ++c) {
        TermElt img = te_apply(a, y.f, mgens[c].first);
        QVec rhs = te_flat(ixp, img);
        // unknowns: one block element per (target generator, basis id)
        std::vector<std::pair<size_t, int>> unk;
        std::vector<QVec> cols;
        for (size_t t = 0; t < pgens.size(); ++t)
            for (int b : a.block[mverts[c]][pverts[t]]) {
                AlgElt eb;
                eb[b] = 1;
                cols.push_back(te_flat(ixp, te_right_mul(a, pgens[t].first, eb)));
                unk.emplace_back(t, b);
            }
        bool rhs_zero = true;
        for (const auto& q : rhs)
            if (q != 0) {
                rhs_zero = false;
                break;
            }
        if (rhs_zero) continue;
        QMat A = mat_from_cols(cols, ixp.dim);
        auto sol = solve(std::move(A), rhs);
        if (!sol) throw std::logic_error("differential does not restrict to the summand");
        for (size_t j = 0; j < unk.size(); ++j)
            if ((*sol)[j] != 0) fnat[unk[j].first][c][unk[j].second] = (*sol)[j];
    }

    TwoTermComplex out;
    out.m_minus.assign(a.pres.vertices, 0);
    out.m_plus.assign(a.pres.vertices, 0);
    for (int v : mverts) ++out.m_minus[v];
    for (int v : pverts) ++out.m_plus[v];
    auto pperm = vertex_sort_perm(pverts, a.pres.vertices);
    auto mperm = vertex_sort_perm(mverts, a.pres.vertices);
    out.f = blocks_zero(pverts.size(), mverts.size());
    for (size_t r = 0; r < pverts.size(); ++r)
        for (size_t c = 0; c < mverts.size(); ++c)
            if (!fnat[r][c].empty()) out.f[pperm[r]][mperm[c]] = fnat[r][c];
    return out;
}

// removes (P_v --iso--> P_v) summands by block gaussian elimination
TwoTermComplex strip_contractibles(const Algebra& a, TwoTermComplex x) {
    auto mv = summand_vertices(x.m_minus);
    auto pv = summand_vertices(x.m_plus);
    bool progress = true;
    while (progress) {
        progress = false;
        for (size_t r = 0; r < pv.size() && !progress; ++r)
            for (size_t c = 0; c < mv.size() && !progress; ++c) {
                if (pv[r] != mv[c]) continue;
                int v = pv[r];
                auto it = x.f[r][c].find(a.unit[v]);
                if (it == x.f[r][c].end() || it->second == 0) continue;
                AlgElt inv = alg_local_inverse(a, x.f[r][c], v);
                // clear the rest of column c
                for (size_t r2 = 0; r2 < pv.size(); ++r2) {
                    if (r2 == r || x.f[r2][c].empty()) continue;
                    AlgElt s = alg_mul(a, x.f[r2][c], inv);
                    for (size_t c2 = 0; c2 < mv.size(); ++c2) {
                        if (x.f[r][c2].empty()) continue;
                        elt_add(x.f[r2][c2], alg_mul(a, s, x.f[r][c2]), Rat(-1));
                    }
                }
                // clear the rest of row r (only row r changes now)
                for (size_t c2 = 0; c2 < mv.size(); ++c2) {
                    if (c2 == c || x.f[r][c2].empty()) continue;
                    AlgElt t = alg_mul(a, inv, x.f[r][c2]);
                    elt_add(x.f[r][c2], alg_mul(a, x.f[r][c], t), Rat(-1));
                }
                // delete summands r (plus) and c (minus)
                x.f.erase(x.f.begin() + r);
                for (auto& row : x.f) row.erase(row.begin() + c);
                --x.m_plus[pv[r]];
                --x.m_minus[mv[c]];
                pv.erase(pv.begin() + r);
                mv.erase(mv.begin() + c);
                progress = true;
            }
    }
    return x;
}

Summand certify_leaf(const Algebra& a, const TwoTermComplex& y) {
    Summand s;
    s.cx = y;
    HomSpace hs = hom_complexes(a, y, y, 0);
    std::vector<QVec> chain = cols_of(hs.chain_basis);
    std::vector<QVec> hcols = cols_of(hs.homotopy_sub);
    size_t N = hs.space_dim;

    SparseRowSpace hspace;
    std::vector<QVec> hbasis;
    for (const auto& h : hcols)
        if (hspace.add(to_sparse(h))) hbasis.push_back(h);
    SparseRowSpace probe = hspace;
    std::vector<QVec> reps;
    for (const auto& c : chain)
        if (probe.add(to_sparse(c))) reps.push_back(c);
    size_t q = reps.size();
    if (q != hs.quotient_dim) throw std::logic_error("endomorphism quotient dimension mismatch");
    s.end_dim = q;
    if (q <= 1) {
        s.local_dim = q;
        s.status = "indecomposable";
        return s;
    }

    // structure constants of End modulo homotopy, then the trace form; in
    // characteristic zero its radical is the Jacobson radical
    auto Xp = summand_vertices(y.m_plus);
    auto Xm = summand_vertices(y.m_minus);
    MapLayout U0(a, Xp, Xp), U1(a, Xm, Xm);
    std::vector<QVec> bcols = reps;
    bcols.insert(bcols.end(), hbasis.begin(), hbasis.end());
    QMat B = mat_from_cols(bcols, N);

    std::vector<Blocks> r0(q), r1(q);
    for (size_t i = 0; i < q; ++i) {
        r0[i] = U0.unpack(reps[i], 0);
        r1[i] = U1.unpack(reps[i], U0.dim);
    }
    std::vector<std::vector<QVec>> mult(q, std::vector<QVec>(q));
    for (size_t i = 0; i < q; ++i)
        for (size_t j = 0; j < q; ++j) {
            Blocks w0 = blocks_compose(a, r0[i], r0[j]);
            Blocks w1 = blocks_compose(a, r1[i], r1[j]);
            QVec wvec(N, Rat(0));
            for (size_t r = 0; r < Xp.size(); ++r)
                for (size_t c = 0; c < Xp.size(); ++c) U0.accumulate(wvec, r, c, w0[r][c], 1);
            for (size_t r = 0; r < Xm.size(); ++r)
                for (size_t c = 0; c < Xm.size(); ++c) {
                    for (const auto& [id, co] : w1[r][c]) wvec[U0.dim + U1.coord(r, c, id)] += co;
                }
            auto sol = solve(B, wvec);
            if (!sol) throw std::logic_error("endomorphism product escaped the chain space");
            mult[i][j] = QVec(sol->begin(), sol->begin() + q);
        }
    QVec tr(q, Rat(0));
    for (size_t k = 0; k < q; ++k)
        for (size_t j = 0; j < q; ++j) tr[k] += mult[k][j][j];
    QMat T(q, QVec(q, Rat(0)));
    for (size_t i = 0; i < q; ++i)
        for (size_t j = 0; j < q; ++j)
            for (size_t k = 0; k < q; ++k) T[i][j] += mult[i][j][k] * tr[k];
    size_t rankT = rref(T);
    s.local_dim = rankT;
    s.status = (rankT == 1) ? "indecomposable" : "possibly-indecomposable";
    return s;
}

void decompose_rec(const Algebra& a, TwoTermComplex x, SplitRng& rng, int budget,
                   std::vector<Summand>& out) {
    x = strip_contractibles(a, x);
    auto mv = summand_vertices(x.m_minus);
    auto pv = summand_vertices(x.m_plus);
    if (mv.empty() && pv.empty()) return;

    // split off summands not touched by the differential
    std::vector<char> row_used(pv.size(), 0), col_used(mv.size(), 0);
    for (size_t r = 0; r < pv.size(); ++r)
        for (size_t c = 0; c < mv.size(); ++c)
            if (!x.f[r][c].empty()) row_used[r] = col_used[c] = 1;
    bool has_loose = false;
    for (char u : row_used) has_loose |= !u;
    for (char u : col_used) has_loose |= !u;
    if (has_loose) {
        for (size_t c = 0; c < mv.size(); ++c)
            if (!col_used[c]) {
                TwoTermComplex p;
                p.m_minus.assign(a.pres.vertices, 0);
                p.m_plus.assign(a.pres.vertices, 0);
                ++p.m_minus[mv[c]];
                out.push_back(certify_leaf(a, p));
            }
        for (size_t r = 0; r < pv.size(); ++r)
            if (!row_used[r]) {
                TwoTermComplex p;
                p.m_minus.assign(a.pres.vertices, 0);
                p.m_plus.assign(a.pres.vertices, 0);
                ++p.m_plus[pv[r]];
                p.f.assign(1, std::vector<AlgElt>{});
                out.push_back(certify_leaf(a, p));
            }
        TwoTermComplex rest;
        rest.m_minus.assign(a.pres.vertices, 0);
        rest.m_plus.assign(a.pres.vertices, 0);
        std::vector<size_t> rr, cc;
        for (size_t r = 0; r < pv.size(); ++r)
            if (row_used[r]) {
                rr.push_back(r);
                ++rest.m_plus[pv[r]];
            }
        for (size_t c = 0; c < mv.size(); ++c)
            if (col_used[c]) {
                cc.push_back(c);
                ++rest.m_minus[mv[c]];
            }
        if (!rr.empty() || !cc.empty()) {
            rest.f = blocks_zero(rr.size(), cc.size());
            for (size_t i = 0; i < rr.size(); ++i)
                for (size_t j = 0; j < cc.size(); ++j) rest.f[i][j] = x.f[rr[i]][cc[j]];
            decompose_rec(a, std::move(rest), rng, budget, out);
        }
        return;
    }

    if (mv.size() + pv.size() > 1 && budget > 0) {
        HomSpace hs = hom_complexes(a, x, x, 0);
        std::vector<QVec> chain = cols_of(hs.chain_basis);
        size_t N = hs.space_dim;
        if (chain.size() > 1) {
            TermIx ixp = make_ix(a, pv), ixm = make_ix(a, mv);
            MapLayout U0(a, pv, pv), U1(a, mv, mv);
            int sweep = std::min((int)chain.size(), std::max(2, budget / 2));
            for (int attempt = 0; attempt < budget; ++attempt) {
                QVec phi(N, Rat(0));
                if (attempt < sweep) {
                    phi = chain[attempt];  // deterministic sweep catches projection-like maps
                } else {
                    for (const auto& col : chain) {
                        long long c = rng.uniform(-9, 9);
                        if (c == 0) continue;
                        for (size_t i = 0; i < N; ++i) phi[i] += rat(c) * col[i];
                    }
                }
                bool zero = true;
                for (const auto& qv : phi)
                    if (qv != 0) {
                        zero = false;
                        break;
                    }
                if (zero) continue;
                Blocks B0 = U0.unpack(phi, 0);
                Blocks B1 = U1.unpack(phi, U0.dim);
                std::vector<Rat> roots;
                if (!pv.empty())
                    for (const auto& r : rational_roots(char_poly(top_matrix(a, pv, B0)))) roots.push_back(r);
                if (!mv.empty())
                    for (const auto& r : rational_roots(char_poly(top_matrix(a, mv, B1)))) roots.push_back(r);
                std::sort(roots.begin(), roots.end());
                roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
                if (roots.empty()) continue;
                QMat M0 = pv.empty() ? QMat{} : endo_matrix(a, ixp, B0);
                QMat M1 = mv.empty() ? QMat{} : endo_matrix(a, ixm, B1);
                size_t dim0 = ixp.dim, dim1 = ixm.dim;
                size_t e = 1;
                while (e < std::max(dim0, dim1)) e <<= 1;
                for (const Rat& lambda : roots) {
                    QMat P0 = M0.empty() ? QMat{} : mat_pow(mat_minus_lambda(M0, lambda), e);
                    QMat P1 = M1.empty() ? QMat{} : mat_pow(mat_minus_lambda(M1, lambda), e);
                    std::vector<QVec> K0 = P0.empty() ? std::vector<QVec>{} : nullspace(P0);
                    std::vector<QVec> K1 = P1.empty() ? std::vector<QVec>{} : nullspace(P1);
                    size_t kd = K0.size() + K1.size();
                    if (kd == 0 || kd == dim0 + dim1) continue;
                    std::vector<QVec> R0 = P0.empty() ? std::vector<QVec>{} : colspace_basis(P0);
                    std::vector<QVec> R1 = P1.empty() ? std::vector<QVec>{} : colspace_basis(P1);
                    auto lift = [&](const TermIx& ix, const std::vector<QVec>& vecs) {
                        std::vector<TermElt> ws;
                        for (const auto& v : vecs) ws.push_back(te_unflat(ix, v));
                        return ws;
                    };
                    auto mg_a = proj_coords(a, ixm, lift(ixm, K1));
                    auto pg_a = proj_coords(a, ixp, lift(ixp, K0));
                    auto mg_b = proj_coords(a, ixm, lift(ixm, R1));
                    auto pg_b = proj_coords(a, ixp, lift(ixp, R0));
                    TwoTermComplex xa = subcomplex_from_gens(a, x, ixp, mg_a, pg_a);
                    TwoTermComplex xb = subcomplex_from_gens(a, x, ixp, mg_b, pg_b);
                    decompose_rec(a, std::move(xa), rng, budget, out);
                    decompose_rec(a, std::move(xb), rng, budget, out);
                    return;
                }
            }
        }
    }
    out.push_back(certify_leaf(a, x));
}

}  // namespace

std::vector<Summand> decompose(const Algebra& a, const TwoTermComplex& x, SplitRng& rng, int budget) {
    validate_complex(a, x);
    if (budget < 0) throw std::invalid_argument("budget must be nonnegative");
    std::vector<Summand> out;
    decompose_rec(a, x, rng, budget, out);
    return out;
}

GenericDecomposition generic_decomposition(const Algebra& a, const IntVec& g, size_t trials,
                                           long long coeff_range, SplitRng& rng) {
    if (trials < 2) throw std::invalid_argument("need at least two trials");
    if ((int)g.size() != a.pres.vertices) throw std::invalid_argument("g-vector size mismatch");

    auto entry_str = [](const IntVec& gi, const std::string& kind) {
        std::string s = "(";
        for (size_t i = 0; i < gi.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(gi[i]);
        }
        s += "):" + kind;
        return s;
    };

    GenericDecomposition gd;
    std::vector<std::string> sigs;
    std::vector<std::pair<IntVec, std::string>> first;
    for (size_t t = 0; t < trials; ++t) {
        SplitRng xr = rng.split(2 * t + 1);
        SplitRng dr = rng.split(2 * t + 2);
        TwoTermComplex X = random_complex(a, g, coeff_range, xr);
        std::vector<Summand> sums = decompose(a, X, dr);
        std::vector<std::pair<IntVec, std::string>> entries;
        for (const auto& s : sums) {
            IntVec gi = g_vector(s.cx);
            size_t f = s.local_dim;
            if (is_presilting(a, s.cx)) {
                entries.emplace_back(gi, "presilting");
                continue;
            }
            size_t selfext = hom_complexes(a, s.cx, s.cx, 1).quotient_dim;
            if (f == 1 && selfext == 1) {
                entries.emplace_back(gi, "band");
                continue;
            }
            // a leaf whose endomorphisms form a number field of degree f splits
            // into f conjugate summands over the algebraic closure; report the
            // geometric pieces when the dimension data is consistent with that
            bool divisible = f >= 2 && s.end_dim == f && selfext == f;
            IntVec gq(gi.size(), 0);
            if (divisible)
                for (size_t i = 0; i < gi.size(); ++i) {
                    if (gi[i] % (long long)f != 0) {
                        divisible = false;
                        break;
                    }
                    gq[i] = gi[i] / (long long)f;
                }
            if (divisible) {
                for (size_t k = 0; k < f; ++k) entries.emplace_back(gq, "band");
            } else {
                entries.emplace_back(gi, "unknown");
            }
        }
        std::sort(entries.begin(), entries.end());
        std::string sig;
        for (const auto& e : entries) {
            if (!sig.empty()) sig += " + ";
            sig += entry_str(e.first, e.second);
        }
        if (sig.empty()) sig = "0";
        sigs.push_back(sig);
        if (t == 0) first = entries;
    }
    gd.stable = std::all_of(sigs.begin(), sigs.end(), [&](const std::string& s) { return s == sigs[0]; });
    std::vector<std::string> uniq = sigs;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    gd.observed = uniq;
    if (gd.stable) {
        for (size_t i = 0; i < first.size();) {
            size_t j = i;
            while (j < first.size() && first[j] == first[i]) ++j;
            GenericSummand gs;
            gs.g = first[i].first;
            gs.multiplicity = (int)(j - i);
            gs.kind = first[i].second;
            gd.summands.push_back(gs);
            i = j;
        }
    }
    return gd;
}

}  // namespace gvfan
