#include "gvfan/seeds.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace gvfan {

namespace {

inline long long plus_part(long long z) { return z > 0 ? z : 0; }

// matrix mutation of a rectangular 2n x n block matrix at column k < n
IntMat mutate_btilde(const IntMat& bt, int n, int k) {
    IntMat out = bt;
    for (int i = 0; i < 2 * n; i++)
        for (int j = 0; j < n; j++) {
            if (i == k || j == k) {
                out[i][j] = -bt[i][j];
            } else {
                out[i][j] = bt[i][j] + sign_of(bt[i][k]) * plus_part(bt[i][k] * bt[k][j]);
            }
        }
    return out;
}

}  // namespace

GSeed initial_seed(const ExchangeMatrix& B) {
    check_exchange(B);
    GSeed s;
    s.n = B.n;
    s.btilde.assign(2 * B.n, IntVec(B.n, 0));
    s.gmat.assign(B.n, IntVec(B.n, 0));
    s.b0 = B.b;
    for (int i = 0; i < B.n; i++)
        for (int j = 0; j < B.n; j++) s.btilde[i][j] = B.b[i][j];
    for (int i = 0; i < B.n; i++) {
        s.btilde[B.n + i][i] = 1;
        s.gmat[i][i] = 1;
    }
    return s;
}

GSeed mutate_seed(const GSeed& s, int k) {
    if (k < 0 || k >= s.n) throw std::out_of_range("seed mutation index out of range");
    const int n = s.n;
    GSeed out = s;
    out.btilde = mutate_btilde(s.btilde, n, k);
    // new k-th g-vector from the pre-mutation data
    for (int r = 0; r < n; r++) {
        long long v = -s.gmat[r][k];
        for (int i = 0; i < n; i++) v += plus_part(s.btilde[i][k]) * s.gmat[r][i];
        for (int j = 0; j < n; j++) v -= plus_part(s.btilde[n + j][k]) * s.b0[r][j];
        out.gmat[r][k] = v;
    }
    out.trail.push_back(k);
    return out;
}

IntMat c_matrix(const GSeed& s) {
    IntMat c(s.n, IntVec(s.n, 0));
    for (int j = 0; j < s.n; j++)
        for (int i = 0; i < s.n; i++) c[j][i] = s.btilde[s.n + j][i];
    return c;
}

bool c_columns_sign_coherent(const GSeed& s) {
    for (int col = 0; col < s.n; col++) {
        bool pos = false, neg = false;
        for (int j = 0; j < s.n; j++) {
            long long v = s.btilde[s.n + j][col];
            pos |= v > 0;
            neg |= v < 0;
        }
        if (pos && neg) return false;
    }
    return true;
}

IntMat mutate_gmat_by_csign(const GSeed& s, int k) {
    if (k < 0 || k >= s.n) throw std::out_of_range("seed mutation index out of range");
    const int n = s.n;
    int pre = 0;
    for (int j = 0; j < n; j++) {
        int sg = sign_of(s.btilde[n + j][k]);
        if (sg == 0) continue;
        if (pre == 0) pre = sg;
        if (pre != sg) throw std::logic_error("c-column not sign-coherent");
    }
    if (pre == 0) throw std::logic_error("zero c-column");
    const long long eps = -pre;  // sign of the mutated column
    IntMat g = s.gmat;
    for (int r = 0; r < n; r++) {
        long long v = -s.gmat[r][k];
        for (int i = 0; i < n; i++) v += plus_part(eps * s.btilde[i][k]) * s.gmat[r][i];
        g[r][k] = v;
    }
    return g;
}

std::string seed_key(const GSeed& s) {
    // Two seeds define the same cluster when one is a relabeling of the
    // other: g-columns permuted by some sigma and the mutable block
    // conjugated by it.  The g-columns are distinct (gmat is invertible), so
    // sorting them fixes a canonical sigma; the frozen block is excluded
    // (it does not return to a relabeling when a cluster recurs).
    std::vector<int> ord(s.n);
    for (int j = 0; j < s.n; j++) ord[j] = j;
    auto gcol = [&](int j) {
        IntVec c(s.n);
        for (int r = 0; r < s.n; r++) c[r] = s.gmat[r][j];
        return c;
    };
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return gcol(a) < gcol(b); });
    std::ostringstream os;
    for (int j : ord) {
        for (int r = 0; r < s.n; r++) os << s.gmat[r][j] << ',';
        os << ';';
    }
    for (int i : ord) {
        for (int j : ord) os << s.btilde[i][j] << ',';
        os << ';';
    }
    return os.str();
}

SeedSet enumerate_seeds(const ExchangeMatrix& B, int depth, size_t max_seeds) {
    if (depth < 0) throw std::invalid_argument("depth must be >= 0");
    if (max_seeds < 1) throw std::invalid_argument("max_seeds must be >= 1");
    SeedSet out;
    out.depth = depth;

    GSeed root = initial_seed(B);
    std::unordered_set<std::string> visited{seed_key(root)};
    std::deque<GSeed> frontier{root};
    out.seeds.push_back(root);

    bool truncated = false;
    for (int layer = 0; layer < depth && !frontier.empty() && !truncated; layer++) {
        std::deque<GSeed> next;
        for (const GSeed& cur : frontier) {
            for (int k = 0; k < B.n && !truncated; k++) {
                GSeed child = mutate_seed(cur, k);
                std::string key = seed_key(child);
                if (visited.count(key)) continue;
                if (out.seeds.size() >= max_seeds) {
                    truncated = true;
                    break;
                }
                visited.insert(std::move(key));
                out.seeds.push_back(child);
                next.push_back(std::move(child));
            }
            if (truncated) break;
        }
        frontier = std::move(next);
    }
    out.complete = frontier.empty() && !truncated;
    return out;
}

}  // namespace gvfan
