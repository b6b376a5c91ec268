#include "gvfan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace gvfan {

namespace {

// rational vector -> primitive integer vector (clears denominators exactly)
IntVec primitivize_rational(const QVec& v) {
    Big lcm = 1;
    for (const auto& x : v) lcm = ::lcm(lcm, Big(x.get_den()));
    std::vector<Big> ints;
    ints.reserve(v.size());
    Big gcd = 0;
    for (const auto& x : v) {
        Big e = Big(x.get_num()) * (lcm / Big(x.get_den()));
        gcd = ::gcd(gcd, e);
        ints.push_back(e);
    }
    if (gcd == 0) throw std::invalid_argument("primitivize: zero vector");
    IntVec out;
    out.reserve(v.size());
    for (auto& e : ints) {
        Big r = e / gcd;
        if (!r.fits_slong_p()) throw std::overflow_error("primitivize: entry exceeds 64 bits");
        out.push_back(r.get_si());
    }
    return out;
}

QVec to_qvec(const IntVec& v) {
    QVec out;
    out.reserve(v.size());
    for (long long x : v) out.push_back(rat(x));
    return out;
}

QMat rays_as_columns(const SimplicialCone& c, int n) {
    QMat m = qmat_zero(n, c.rays.size());
    for (size_t j = 0; j < c.rays.size(); j++)
        for (int i = 0; i < n; i++) m[i][j] = rat(c.rays[j][i]);
    return m;
}

Rat dot(const QVec& a, const QVec& b) {
    Rat s = 0;
    for (size_t i = 0; i < a.size(); i++) s += a[i] * b[i];
    return s;
}

// one double-description step: cone(G) restricted to {x : row.x >= 0}
std::vector<QVec> dd_step(const std::vector<QVec>& gens, const QVec& row) {
    std::vector<QVec> plus, minus, zero;
    std::vector<Rat> dplus, dminus;
    for (const auto& g : gens) {
        Rat d = dot(row, g);
        int s = sign_of(d);
        if (s > 0) {
            plus.push_back(g);
            dplus.push_back(d);
        } else if (s < 0) {
            minus.push_back(g);
            dminus.push_back(d);
        } else {
            zero.push_back(g);
        }
    }
    std::vector<QVec> raw = plus;
    raw.insert(raw.end(), zero.begin(), zero.end());
    for (size_t p = 0; p < plus.size(); p++)
        for (size_t m = 0; m < minus.size(); m++) {
            QVec combo(row.size());
            // dplus[p] * minus[m] - dminus[m] * plus[p]: nonnegative combination
            bool nonzero = false;
            for (size_t i = 0; i < row.size(); i++) {
                combo[i] = dplus[p] * minus[m][i] - dminus[m] * plus[p][i];
                nonzero |= combo[i] != 0;
            }
            if (nonzero) raw.push_back(std::move(combo));
        }
    // dedup up to positive scaling, keeping entries small
    std::set<IntVec> seen;
    std::vector<QVec> out;
    for (const auto& g : raw) {
        IntVec prim = primitivize_rational(g);
        if (seen.insert(prim).second) out.push_back(to_qvec(prim));
    }
    if (out.size() > 20000) throw std::runtime_error("double description blow-up");
    return out;
}

// H-representation of a simplicial cone: equalities spanning the orthogonal
// complement and one inequality per ray coordinate
struct HRep {
    std::vector<QVec> eq;    // w.x = 0
    std::vector<QVec> ineq;  // a.x >= 0
};

HRep cone_hrep(const SimplicialCone& c, int n) {
    HRep h;
    const size_t m = c.rays.size();
    QMat r = rays_as_columns(c, n);
    QMat rt = qmat_transpose(r);
    h.eq = nullspace(rt);
    QMat lam;
    if (m == (size_t)n) {
        auto inv = inverse(r);
        if (!inv) throw std::logic_error("simplicial cone with dependent rays");
        lam = *inv;
    } else {
        // coordinates on span(r): (r^T r)^{-1} r^T
        QMat gram = qmat_mul(rt, r);
        auto ginv = inverse(gram);
        if (!ginv) throw std::logic_error("simplicial cone with dependent rays");
        lam = qmat_mul(*ginv, rt);
    }
    for (size_t i = 0; i < m; i++) h.ineq.push_back(lam[i]);
    return h;
}

}  // namespace

IntVec normalize_ray(const IntVec& v) { return primitive_vector(v); }

SimplicialCone make_cone(std::vector<IntVec> rays) {
    if (rays.empty()) throw std::invalid_argument("cone needs at least one ray");
    size_t n = rays[0].size();
    for (auto& r : rays) {
        if (r.size() != n) throw std::invalid_argument("ray dimension mismatch");
        r = normalize_ray(r);
    }
    std::sort(rays.begin(), rays.end());
    SimplicialCone c{std::move(rays)};
    QMat m = rays_as_columns(c, (int)n);
    if (rref(m) != c.rays.size()) throw std::invalid_argument("cone rays must be linearly independent");
    return c;
}

int cone_dim(const SimplicialCone& c) { return (int)c.rays.size(); }

bool cone_contains(const SimplicialCone& c, const QVec& p) {
    if (c.rays.empty() || p.size() != c.rays[0].size()) throw std::invalid_argument("dimension mismatch");
    QMat r = rays_as_columns(c, (int)p.size());
    auto sol = solve(r, p);
    if (!sol) return false;
    for (const auto& lambda : *sol)
        if (lambda < 0) return false;
    return true;
}

SimplicialCone seed_cone(const GSeed& s) {
    std::vector<IntVec> rays;
    for (int j = 0; j < s.n; j++) {
        IntVec col(s.n);
        for (int i = 0; i < s.n; i++) col[i] = s.gmat[i][j];
        rays.push_back(col);
    }
    return make_cone(std::move(rays));
}

Fan fan_from_seeds(const SeedSet& s) {
    Fan f;
    if (s.seeds.empty()) return f;
    f.ambient_dim = s.seeds[0].n;
    std::set<std::vector<IntVec>> seen;
    for (const GSeed& seed : s.seeds) {
        SimplicialCone c = seed_cone(seed);
        if (seen.insert(c.rays).second) f.cones.push_back(std::move(c));
    }
    return f;
}

std::vector<IntVec> fan_rays(const Fan& f) {
    std::set<IntVec> rays;
    for (const auto& c : f.cones) rays.insert(c.rays.begin(), c.rays.end());
    return {rays.begin(), rays.end()};
}

std::vector<IntVec> cone_intersection_rays(const SimplicialCone& a, const SimplicialCone& b, int n) {
    HRep ha = cone_hrep(a, n);
    HRep hb = cone_hrep(b, n);

    // start from a's rays (they satisfy a's constraints) and impose b's
    std::vector<QVec> gens;
    for (const auto& r : a.rays) gens.push_back(to_qvec(r));
    for (const auto& w : hb.eq) {
        gens = dd_step(gens, w);
        QVec neg(w.size());
        for (size_t i = 0; i < w.size(); i++) neg[i] = -w[i];
        gens = dd_step(gens, neg);
    }
    for (const auto& row : hb.ineq) gens = dd_step(gens, row);

    // extremality: a generator is an extreme ray iff its active constraints
    // pin down a one-dimensional solution space
    std::set<IntVec> out;
    for (const auto& g : gens) {
        QMat active;
        for (const auto* h : {&ha, &hb}) {
            for (const auto& w : h->eq) active.push_back(w);
            for (const auto& row : h->ineq)
                if (dot(row, g) == 0) active.push_back(row);
        }
        size_t rank = active.empty() ? 0 : rref(active);
        if ((int)rank == n - 1) out.insert(primitivize_rational(g));
    }
    return {out.begin(), out.end()};
}

FanValidity fan_is_valid(const Fan& f, size_t max_pairs) {
    FanValidity v;
    size_t checked = 0;
    for (size_t i = 0; i < f.cones.size() && checked < max_pairs; i++) {
        for (size_t j = i + 1; j < f.cones.size() && checked < max_pairs; j++) {
            checked++;
            auto rays = cone_intersection_rays(f.cones[i], f.cones[j], f.ambient_dim);
            for (const auto& r : rays) {
                bool in_i = std::binary_search(f.cones[i].rays.begin(), f.cones[i].rays.end(), r);
                bool in_j = std::binary_search(f.cones[j].rays.begin(), f.cones[j].rays.end(), r);
                if (!in_i || !in_j) {
                    v.valid = false;
                    v.cone_a = i;
                    v.cone_b = j;
                    std::ostringstream os;
                    os << "intersection ray (";
                    for (size_t t = 0; t < r.size(); t++) os << (t ? "," : "") << r[t];
                    os << ") is not a ray of cone " << (in_i ? j : i);
                    v.reason = os.str();
                    return v;
                }
            }
        }
    }
    return v;
}

Sampler sampler_from_string(const std::string& s) {
    if (s == "grid") return Sampler::grid;
    if (s == "fibonacci") return Sampler::fibonacci;
    if (s == "halton") return Sampler::halton;
    throw std::invalid_argument("unknown sampler: " + s);
}

std::string sampler_name(Sampler s) {
    switch (s) {
        case Sampler::grid: return "grid";
        case Sampler::fibonacci: return "fibonacci";
        default: return "halton";
    }
}

std::pair<long long, long long> rat_approx(double x, long long maxden) {
    // continued-fraction convergents h/k, stop before k exceeds maxden
    long long h = 1, hprev = 0, k = 0, kprev = 1;
    double v = x;
    for (int it = 0; it < 64; it++) {
        double fa = std::floor(v);
        if (fa > 9e17 || fa < -9e17) break;
        long long a = (long long)fa;
        long long hn = a * h + hprev, kn = a * k + kprev;
        if (kn > maxden) break;
        hprev = h;
        h = hn;
        kprev = k;
        k = kn;
        double frac = v - fa;
        if (frac < 1e-15) break;
        v = 1.0 / frac;
    }
    if (k == 0) return {x >= 0 ? 1 : -1, 1};  // should not happen for |x| <= 1
    return {h, k};
}

namespace {

std::vector<double> sample_direction(Sampler s, int n, size_t i, size_t total) {
    const double pi = 3.14159265358979323846;
    std::vector<double> d(n, 0.0);
    switch (s) {
        case Sampler::grid: {
            double theta = 2.0 * pi * (double)i / (double)total;
            d[0] = std::cos(theta);
            d[1] = std::sin(theta);
            break;
        }
        case Sampler::fibonacci: {
            double z = 1.0 - 2.0 * ((double)i + 0.5) / (double)total;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double golden = (std::sqrt(5.0) - 1.0) / 2.0;
            double phi = 2.0 * pi * std::fmod((double)i * golden, 1.0);
            d[0] = r * std::cos(phi);
            d[1] = r * std::sin(phi);
            d[2] = z;
            break;
        }
        case Sampler::halton: {
            static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
            double norm = 0;
            for (int c = 0; c < n; c++) {
                int base = primes[c % 12];
                double f = 1.0, u = 0.0;
                size_t idx = i + 1;
                while (idx > 0) {
                    f /= base;
                    u += f * (double)(idx % base);
                    idx /= base;
                }
                d[c] = 2.0 * u - 1.0;
                norm += d[c] * d[c];
            }
            if (norm < 1e-12) d[0] = 1.0;
            break;
        }
    }
    return d;
}

// exact integer data of one full-dimensional cone for the fast containment
// test: sign(det) and the adjugate, so that p in cone <=> detsign*(adj p) >= 0
struct ConeTester {
    bool fulldim = false;
    bool fits64 = false;
    int detsign = 0;
    IntMat adj;                    // when fits64
    std::vector<std::vector<Big>> adj_big;  // exact fallback
    const SimplicialCone* cone = nullptr;

    explicit ConeTester(const SimplicialCone& c, int n) : cone(&c) {
        if ((int)c.rays.size() != n) return;
        QMat r = rays_as_columns(c, n);
        Rat det = determinant(r);
        if (det == 0) throw std::logic_error("degenerate maximal cone");
        auto inv = inverse(r);
        fulldim = true;
        detsign = sign_of(det);
        adj_big.assign(n, std::vector<Big>(n));
        fits64 = true;
        for (int i = 0; i < n; i++)
            for (int j = 0; j < n; j++) {
                Rat e = det * (*inv)[i][j];
                if (e.get_den() != 1) throw std::logic_error("adjugate not integral");
                adj_big[i][j] = e.get_num();
                fits64 &= mpz_sizeinbase(adj_big[i][j].get_mpz_t(), 2) <= 40;
            }
        if (fits64) {
            adj.assign(n, IntVec(n));
            for (int i = 0; i < n; i++)
                for (int j = 0; j < n; j++) adj[i][j] = adj_big[i][j].get_si();
        }
    }

    bool contains_int(const std::vector<Big>& p, bool small_sample) const {
        const int n = (int)adj_big.size();
        if (!fulldim) {
            QVec q;
            for (const auto& x : p) q.emplace_back(x);
            return cone_contains(*cone, q);
        }
        if (fits64 && small_sample) {
            for (int i = 0; i < n; i++) {
                __int128 s = 0;
                for (int j = 0; j < n; j++) s += (__int128)adj[i][j] * p[j].get_si();
                if (detsign > 0 ? s < 0 : s > 0) return false;
            }
            return true;
        }
        for (int i = 0; i < n; i++) {
            Big s = 0;
            for (int j = 0; j < n; j++) s += adj_big[i][j] * p[j];
            if (detsign > 0 ? s < 0 : s > 0) return false;
        }
        return true;
    }
};

}  // namespace

CoverageReport coverage(const Fan& f, size_t samples, Sampler sampler, int threads) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    const int n = f.ambient_dim;
    if (sampler == Sampler::grid && n != 2) throw std::invalid_argument("grid sampler needs dimension 2");
    if (sampler == Sampler::fibonacci && n != 3) throw std::invalid_argument("fibonacci sampler needs dimension 3");
    if (n < 1) throw std::invalid_argument("empty fan");
    if (threads < 1) threads = 1;

    std::vector<ConeTester> testers;
    testers.reserve(f.cones.size());
    for (const auto& c : f.cones) testers.emplace_back(c, n);

    const long long maxden = 1000000;
    auto covered_at = [&](size_t i) -> bool {
        std::vector<double> d = sample_direction(sampler, n, i, samples);
        // per-coordinate rational approximation over a common denominator
        std::vector<std::pair<long long, long long>> pq(n);
        Big lcm = 1;
        for (int c = 0; c < n; c++) {
            pq[c] = rat_approx(d[c], maxden);
            lcm = ::lcm(lcm, Big((long)pq[c].second));
        }
        std::vector<Big> p(n);
        bool small = true;
        bool zero = true;
        for (int c = 0; c < n; c++) {
            p[c] = Big((long)pq[c].first) * (lcm / Big((long)pq[c].second));
            small &= mpz_sizeinbase(p[c].get_mpz_t(), 2) <= 62;
            zero &= p[c] == 0;
        }
        if (zero) return true;  // degenerate approximation of a tiny direction
        for (const auto& t : testers)
            if (t.contains_int(p, small)) return true;
        return false;
    };

    std::vector<size_t> counts(threads, 0);
    auto work = [&](int t) {
        size_t c = 0;
        for (size_t i = t; i < samples; i += threads) c += covered_at(i) ? 1 : 0;
        counts[t] = c;
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; t++) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    size_t covered = 0;
    for (size_t c : counts) covered += c;

    CoverageReport rep;
    rep.samples = samples;
    rep.covered = covered;
    rep.fraction = rat((long long)covered, (long long)samples);
    rep.method = sampler_name(sampler);
    return rep;
}

std::optional<IntVec> halfspace_detect(const Fan& f) {
    std::vector<IntVec> rays = fan_rays(f);
    if (rays.empty()) throw std::invalid_argument("fan has no rays");
    const int n = f.ambient_dim;

    // polar cone {v : v.r <= 0 for all rays}: double description from R^n
    std::vector<QVec> gens;
    for (int i = 0; i < n; i++) {
        QVec e(n, rat(0)), ne(n, rat(0));
        e[i] = rat(1);
        ne[i] = rat(-1);
        gens.push_back(e);
        gens.push_back(ne);
    }
    std::vector<QVec> rows;
    bool pointed = false;  // lineality of the intermediate cone = kernel of rows
    for (const auto& r : rays) {
        QVec row(n);
        for (int i = 0; i < n; i++) row[i] = rat(-r[i]);
        gens = dd_step(gens, row);
        rows.push_back(row);
        if (!pointed) {
            QMat m = rows;
            pointed = rref(m) == (size_t)n;
        }
        if (pointed) {
            // prune to extreme rays so redundant generators cannot pile up
            std::vector<QVec> keep;
            for (const auto& g : gens) {
                QMat active;
                for (const auto& w : rows)
                    if (dot(w, g) == 0) active.push_back(w);
                if (active.size() >= (size_t)(n - 1) && rref(active) == (size_t)(n - 1)) keep.push_back(g);
            }
            gens = std::move(keep);
        }
    }

    std::set<IntVec> prims;
    for (const auto& g : gens) {
        bool nonzero = false;
        for (const auto& x : g) nonzero |= x != 0;
        if (nonzero) prims.insert(primitivize_rational(g));
    }
    if (prims.empty()) return std::nullopt;

    IntVec sum(n, 0);
    for (const auto& p : prims)
        for (int i = 0; i < n; i++) sum[i] += p[i];
    IntVec v;
    bool sum_nonzero = false;
    for (long long x : sum) sum_nonzero |= x != 0;
    v = sum_nonzero ? normalize_ray(sum) : *prims.begin();

    // exact re-verification over every ray
    for (const auto& r : rays) {
        __int128 s = 0;
        for (int i = 0; i < n; i++) s += (__int128)v[i] * r[i];
        if (s > 0) throw std::logic_error("halfspace candidate fails verification");
    }
    return v;
}

}  // namespace gvfan
