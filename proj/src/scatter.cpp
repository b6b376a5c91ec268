#include "gvfan/scatter.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gvfan {

namespace {

constexpr int kMaxOrder = 12;  // BCH word tables grow ~3.4^k

void check_order(int k) {
    if (k < 1 || k > kMaxOrder) throw std::invalid_argument("truncation order out of range");
}

void check_series(const ScatterLattice& l, const LieSeries& a, int k) {
    if (a.order != k) throw std::invalid_argument("series order does not match the requested truncation");
    for (const auto& [d, c] : a.coeffs) {
        if ((int)d.size() != l.n) throw std::invalid_argument("series key has wrong rank");
        long long deg = 0;
        bool pos = false;
        for (long long x : d) {
            if (x < 0) throw std::invalid_argument("series key not in the positive cone");
            if (x > 0) pos = true;
            deg += x;
        }
        if (!pos) throw std::invalid_argument("series key is zero");
        if (deg > k) throw std::invalid_argument("series key exceeds the truncation order");
        (void)c;
    }
}

void drop_zeros(LieSeries& s) {
    for (auto it = s.coeffs.begin(); it != s.coeffs.end();)
        it = (it->second == 0) ? s.coeffs.erase(it) : std::next(it);
}

// Dynkin coefficients grouped by word: for each composition (r_1,s_1..r_n,s_n)
// of total length L the flattened word a^{r_1} b^{s_1} ... receives
// (-1)^{n-1} / (n * L * prod r_i! s_i!), and the series value of a word is its
// right-nested bracket.  bit i of the key = letter at position i (0 = a).
using WordTable = std::map<uint32_t, Rat>;

long long factorial(int m) {
    long long f = 1;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

void enum_compositions(int L, int pos, uint32_t bits, int n, long long factprod, WordTable& t) {
    if (pos == L) {
        Rat c = rat(n % 2 == 1 ? 1 : -1, (long long)n * L * factprod);
        t[bits] += c;
        return;
    }
    for (int r = 0; r + pos <= L; ++r)
        for (int s = 0; r + s + pos <= L; ++s) {
            if (r + s == 0) continue;
            uint32_t nb = bits | (((1u << s) - 1u) << (pos + r));
            enum_compositions(L, pos + r + s, nb, n + 1, factprod * factorial(r) * factorial(s), t);
        }
}

const WordTable& word_table(int L) {
    static std::mutex mu;
    static std::vector<std::unique_ptr<const WordTable>> tables;  // index = word length
    std::lock_guard<std::mutex> lock(mu);
    while ((int)tables.size() <= L) {
        int len = (int)tables.size();
        WordTable t;
        if (len > 0) enum_compositions(len, 0, 0, 0, 1, t);
        for (auto it = t.begin(); it != t.end();) it = (it->second == 0) ? t.erase(it) : std::next(it);
        tables.push_back(std::make_unique<const WordTable>(std::move(t)));
    }
    return *tables[L];
}

IntVec rot90(const IntVec& v) { return {-v[1], v[0]}; }

long long cross2(const IntVec& u, const IntVec& v) { return u[0] * v[1] - u[1] * v[0]; }

// counterclockwise position relative to the loop start direction (1,1)
int angle_bucket(const IntVec& v) {
    long long cr = v[1] - v[0], dot = v[0] + v[1];
    if (cr > 0) return 0;
    if (cr == 0 && dot < 0) return 1;
    if (cr < 0) return 2;
    throw std::invalid_argument("wall ray passes through the loop base direction (1,1)");
}

struct CrossEvent {
    IntVec ray;
    size_t wall;
    int sign;
};

bool ccw_before(const CrossEvent& a, const CrossEvent& b) {
    int ba = angle_bucket(a.ray), bb = angle_bucket(b.ray);
    if (ba != bb) return ba < bb;
    long long cr = cross2(a.ray, b.ray);
    if (cr != 0) return cr > 0;
    return a.wall < b.wall;
}

int crossing_sign(const IntVec& ray, const IntVec& d0) {
    long long cr = cross2(ray, d0);
    if (cr == 0) throw std::logic_error("degenerate wall crossing");
    return cr < 0 ? 1 : -1;
}

IntVec primitive_from_rational(const QVec& v) {
    Big den(1);
    for (const Rat& x : v) {
        Big d = x.get_den();
        den = den / gcd(den, d) * d;
    }
    std::vector<Big> w;
    Big g(0);
    for (const Rat& x : v) {
        Big e(x.get_num() * (den / x.get_den()));
        w.push_back(e);
        g = gcd(g, e);
    }
    IntVec out;
    for (const Big& e : w) {
        Big q = (g == 0) ? e : Big(e / g);
        if (!q.fits_slong_p()) throw std::overflow_error("facet normal coordinate overflow");
        out.push_back(q.get_si());
    }
    return out;
}

}  // namespace

ScatterLattice make_lattice(IntMat form) {
    ScatterLattice l;
    l.n = (int)form.size();
    if (l.n == 0) throw std::invalid_argument("empty form");
    for (const auto& row : form)
        if ((int)row.size() != l.n) throw std::invalid_argument("form is not square");
    for (int i = 0; i < l.n; ++i)
        for (int j = 0; j < l.n; ++j)
            if (form[i][j] != -form[j][i]) throw std::invalid_argument("form is not skew-symmetric");
    l.form = std::move(form);
    return l;
}

long long pair_form(const ScatterLattice& l, const IntVec& d1, const IntVec& d2) {
    long long acc = 0;
    for (int i = 0; i < l.n; ++i)
        for (int j = 0; j < l.n; ++j) acc += d1[i] * l.form[i][j] * d2[j];
    return acc;
}

IntVec p_star(const ScatterLattice& l, const IntVec& d) {
    IntVec out(l.n, 0);
    for (int j = 0; j < l.n; ++j)
        for (int i = 0; i < l.n; ++i) out[j] += d[i] * l.form[i][j];
    return out;
}

long long degree_of(const IntVec& d) {
    long long s = 0;
    for (long long x : d) s += x;
    return s;
}

LieSeries lie_zero(int order) {
    LieSeries s;
    s.order = order;
    return s;
}

LieSeries lie_neg(const LieSeries& a) {
    LieSeries s;
    s.order = a.order;
    for (const auto& [d, c] : a.coeffs) s.coeffs[d] = -c;
    return s;
}

bool lie_is_zero(const LieSeries& a) {
    for (const auto& [d, c] : a.coeffs)
        if (c != 0) return false;
    return true;
}

LieSeries lie_truncate(const LieSeries& a, int order) {
    LieSeries s;
    s.order = order;
    for (const auto& [d, c] : a.coeffs)
        if (degree_of(d) <= order && c != 0) s.coeffs[d] = c;
    return s;
}

LieSeries bracket(const ScatterLattice& l, const LieSeries& a, const LieSeries& b, int k) {
    check_order(k);
    check_series(l, a, k);
    check_series(l, b, k);
    LieSeries out = lie_zero(k);
    for (const auto& [d1, c1] : a.coeffs) {
        long long deg1 = degree_of(d1);
        for (const auto& [d2, c2] : b.coeffs) {
            if (deg1 + degree_of(d2) > k) continue;
            long long f = pair_form(l, d1, d2);
            if (f == 0) continue;
            IntVec d(l.n);
            for (int i = 0; i < l.n; ++i) d[i] = d1[i] + d2[i];
            out.coeffs[d] += c1 * c2 * rat(f);
        }
    }
    drop_zeros(out);
    return out;
}

LieSeries bch_mul(const ScatterLattice& l, const LieSeries& a, const LieSeries& b, int k) {
    check_order(k);
    check_series(l, a, k);
    check_series(l, b, k);
    if (a.coeffs.empty()) {
        LieSeries s = b;
        drop_zeros(s);
        return s;
    }
    if (b.coeffs.empty()) {
        LieSeries s = a;
        drop_zeros(s);
        return s;
    }

    // memo[len][bits] = right-nested bracket of the word, empty series pruned
    std::vector<std::vector<std::optional<LieSeries>>> memo(k + 1);
    memo[1].resize(2);
    memo[1][0] = a;
    memo[1][1] = b;
    LieSeries out = lie_zero(k);
    for (int len = 1; len <= k; ++len) {
        if (len >= 2) {
            memo[len].resize(1u << len);
            for (uint32_t bits = 0; bits < (1u << len); ++bits) {
                const auto& suffix = memo[len - 1][bits >> 1];
                if (!suffix || suffix->coeffs.empty()) continue;
                LieSeries v = bracket(l, (bits & 1u) ? b : a, *suffix, k);
                if (!v.coeffs.empty()) memo[len][bits] = std::move(v);
            }
        }
        for (const auto& [bits, cw] : word_table(len)) {
            const auto& val = memo[len][bits];
            if (!val) continue;
            for (const auto& [d, c] : val->coeffs) out.coeffs[d] += cw * c;
        }
    }
    drop_zeros(out);
    return out;
}

LieSeries dilog_series(const IntVec& d0, int k) {
    check_order(k);
    long long base = degree_of(d0);
    if (base <= 0) throw std::invalid_argument("dilog direction must have positive degree");
    LieSeries s = lie_zero(k);
    for (long long j = 1; j * base <= k; ++j) {
        IntVec d(d0.size());
        for (size_t i = 0; i < d0.size(); ++i) d[i] = j * d0[i];
        s.coeffs[d] = rat(j % 2 == 1 ? 1 : -1, j * j);
    }
    return s;
}

std::vector<Wall> initial_walls(const ScatterLattice& l, int k) {
    check_order(k);
    std::vector<Wall> walls;
    for (int i = 0; i < l.n; ++i) {
        Wall w;
        w.d0 = IntVec(l.n, 0);
        w.d0[i] = 1;
        w.log_fn = dilog_series(w.d0, k);
        walls.push_back(std::move(w));
    }
    return walls;
}

std::vector<Crossing> ccw_loop_crossings(const ScatterLattice& l, const std::vector<Wall>& walls) {
    if (l.n != 2) throw std::invalid_argument("loop crossings are defined for rank 2 only");
    std::vector<CrossEvent> events;
    for (size_t wi = 0; wi < walls.size(); ++wi) {
        const Wall& w = walls[wi];
        if ((int)w.d0.size() != 2) throw std::invalid_argument("wall direction has wrong rank");
        std::vector<IntVec> rays = w.support_rays;
        if (rays.empty()) {
            IntVec r = rot90(w.d0);
            rays = {r, {-r[0], -r[1]}};
        }
        for (IntVec r : rays) {
            r = normalize_ray(r);
            if (r[0] * w.d0[0] + r[1] * w.d0[1] != 0)
                throw std::invalid_argument("support ray does not lie in the wall hyperplane");
            events.push_back({r, wi, crossing_sign(r, w.d0)});
        }
    }
    std::sort(events.begin(), events.end(), ccw_before);
    std::vector<Crossing> out;
    for (const auto& e : events) out.push_back({e.wall, e.sign});
    return out;
}

LieSeries path_ordered_product(const ScatterLattice& l, const std::vector<Wall>& walls,
                               const std::vector<Crossing>& crossings, int k) {
    check_order(k);
    LieSeries acc = lie_zero(k);
    for (const Crossing& c : crossings) {
        if (c.wall >= walls.size()) throw std::invalid_argument("crossing references a missing wall");
        if (c.sign != 1 && c.sign != -1) throw std::invalid_argument("crossing sign must be +1 or -1");
        LieSeries f = lie_truncate(walls[c.wall].log_fn, k);
        if (c.sign < 0) f = lie_neg(f);
        acc = bch_mul(l, f, acc, k);
    }
    return acc;
}

std::vector<Wall> complete_rank2(const ScatterLattice& l, int k) {
    if (l.n != 2) throw std::invalid_argument("completion implemented for rank 2 only");
    check_order(k);
    std::vector<Wall> walls = initial_walls(l, k);
    for (int ell = 2; ell <= k; ++ell) {
        std::vector<Crossing> crossings = ccw_loop_crossings(l, walls);
        LieSeries loop = path_ordered_product(l, walls, crossings, ell);
        // group the order-ell defect by primitive direction
        std::map<IntVec, std::vector<std::pair<IntVec, Rat>>> defects;
        for (const auto& [d, c] : loop.coeffs) {
            if (c == 0) continue;
            if (degree_of(d) < ell) throw std::logic_error("lower order defect survived completion");
            defects[normalize_ray(d)].push_back({d, c});
        }
        if (defects.empty()) continue;
        // insertion order: by angle of the correction ray, counterclockwise
        std::vector<std::pair<IntVec, IntVec>> order;  // (ray, d0)
        for (const auto& [d0, terms] : defects) {
            IntVec ps = p_star(l, d0);
            if (ps == IntVec(2, 0)) throw std::logic_error("defect direction is central for the form");
            order.push_back({normalize_ray(ps), d0});
            (void)terms;
        }
        std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
            return ccw_before({a.first, 0, 0}, {b.first, 0, 0});
        });
        for (const auto& [ray, d0] : order) {
            size_t wi = walls.size();
            for (size_t i = 0; i < walls.size(); ++i)
                if (walls[i].d0 == d0 && !walls[i].support_rays.empty()) {
                    wi = i;
                    break;
                }
            if (wi == walls.size()) {
                Wall w;
                w.d0 = d0;
                w.support_rays = {ray};
                w.log_fn = lie_zero(k);
                walls.push_back(std::move(w));
            }
            int eps = crossing_sign(ray, d0);
            for (const auto& [d, c] : defects[d0]) walls[wi].log_fn.coeffs[d] += rat(-eps) * c;
            drop_zeros(walls[wi].log_fn);
        }
    }
    LieSeries final_loop = path_ordered_product(l, walls, ccw_loop_crossings(l, walls), k);
    if (!lie_is_zero(final_loop)) throw std::logic_error("completion failed to cancel the loop product");
    return walls;
}

std::vector<Wall> attach_fan_functions(const Fan& f, const ScatterLattice& l, int k,
                                       std::vector<std::string>* warnings) {
    check_order(k);
    if (f.ambient_dim != l.n) throw std::invalid_argument("fan and lattice ranks differ");
    std::set<std::vector<IntVec>> facets;
    for (const SimplicialCone& c : f.cones) {
        int d = cone_dim(c);
        if (d == l.n) {
            for (size_t skip = 0; skip < c.rays.size(); ++skip) {
                std::vector<IntVec> rays;
                for (size_t i = 0; i < c.rays.size(); ++i)
                    if (i != skip) rays.push_back(c.rays[i]);
                facets.insert(make_cone(rays).rays);
            }
        } else if (d == l.n - 1) {
            facets.insert(c.rays);
        }
    }
    std::vector<Wall> walls;
    for (const auto& rays : facets) {
        QMat m;
        for (const IntVec& r : rays) {
            QVec row;
            for (long long x : r) row.push_back(rat(x));
            m.push_back(row);
        }
        std::vector<QVec> ns = nullspace(m);
        std::ostringstream label;
        for (const IntVec& r : rays) {
            label << "(";
            for (size_t i = 0; i < r.size(); ++i) label << (i ? "," : "") << r[i];
            label << ")";
        }
        if (ns.size() != 1) {
            if (warnings) warnings->push_back("facet " + label.str() + " does not span a hyperplane; skipped");
            continue;
        }
        IntVec d0 = primitive_from_rational(ns[0]);
        bool all_nonpos = true;
        for (long long x : d0) all_nonpos = all_nonpos && x <= 0;
        if (all_nonpos)
            for (long long& x : d0) x = -x;
        bool ok = true;
        for (long long x : d0) ok = ok && x >= 0;
        if (!ok) {
            if (warnings) warnings->push_back("facet " + label.str() + " has a mixed-sign normal; skipped");
            continue;
        }
        Wall w;
        w.d0 = d0;
        w.support_rays = rays;
        w.log_fn = dilog_series(d0, k);
        walls.push_back(std::move(w));
    }
    return walls;
}

}  // namespace gvfan
