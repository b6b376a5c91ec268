#include "gvfan/quiver.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace gvfan {

ExchangeMatrix make_exchange(int n) {
    ExchangeMatrix m;
    m.n = n;
    m.b.assign(n, IntVec(n, 0));
    return m;
}

ExchangeMatrix exchange_from_arrows(int n, const std::vector<std::array<long long, 3>>& arrows) {
    ExchangeMatrix m = make_exchange(n);
    for (const auto& a : arrows) {
        int i = (int)a[0], j = (int)a[1];
        long long w = a[2];
        if (i < 0 || i >= n || j < 0 || j >= n || i == j) throw std::invalid_argument("bad arrow");
        m.b[i][j] += w;
        m.b[j][i] -= w;
    }
    return m;
}

bool is_skew_symmetric(const ExchangeMatrix& m) {
    if ((int)m.b.size() != m.n) return false;
    for (int i = 0; i < m.n; i++) {
        if ((int)m.b[i].size() != m.n) return false;
        for (int j = 0; j < m.n; j++)
            if (m.b[i][j] != -m.b[j][i]) return false;
        if (m.b[i][i] != 0) return false;
    }
    return true;
}

void check_exchange(const ExchangeMatrix& m) {
    if (!is_skew_symmetric(m)) throw std::invalid_argument("exchange matrix must be skew-symmetric");
}

ExchangeMatrix mutate_quiver(const ExchangeMatrix& m, int k) {
    if (k < 0 || k >= m.n) throw std::out_of_range("mutation index out of range");
    ExchangeMatrix out = m;
    for (int i = 0; i < m.n; i++)
        for (int j = 0; j < m.n; j++) {
            if (i == k || j == k) {
                out.b[i][j] = -m.b[i][j];
            } else {
                __int128 prod = (__int128)m.b[i][k] * m.b[k][j];
                __int128 val = (__int128)m.b[i][j] + sign_of(m.b[i][k]) * std::max(prod, (__int128)0);
                if (val > INT64_MAX || val < INT64_MIN) throw std::overflow_error("mutation overflows 64-bit entries");
                out.b[i][j] = (long long)val;
            }
        }
    return out;
}

ExchangeMatrix opposite(const ExchangeMatrix& m) {
    ExchangeMatrix out = m;
    for (auto& row : out.b)
        for (auto& x : row) x = -x;
    return out;
}

ExchangeMatrix permute(const ExchangeMatrix& m, const std::vector<int>& perm) {
    ExchangeMatrix out = make_exchange(m.n);
    for (int i = 0; i < m.n; i++)
        for (int j = 0; j < m.n; j++) out.b[i][j] = m.b[perm[i]][perm[j]];
    return out;
}

namespace {

// Entries contributed when vertex v is placed at position p given the prefix:
// pairs (b[v][w], b[w][v]) for each already-placed w, in placement order.
IntVec contribution(const IntMat& b, const std::vector<int>& prefix, int v) {
    IntVec c;
    c.reserve(prefix.size() * 2);
    for (int w : prefix) {
        c.push_back(b[v][w]);
        c.push_back(b[w][v]);
    }
    return c;
}

struct CanonSearch {
    const IntMat& b;
    int n;
    std::vector<long long> row_invariant;  // coarse vertex invariant for candidate ordering
    std::vector<int> perm, best_perm;
    IntVec cur, best;
    bool have_best = false;

    explicit CanonSearch(const ExchangeMatrix& m) : b(m.b), n(m.n) {
        row_invariant.resize(n, 0);
        for (int v = 0; v < n; v++) {
            IntVec sorted_abs;
            for (int w = 0; w < n; w++) sorted_abs.push_back(std::llabs(b[v][w]));
            std::sort(sorted_abs.begin(), sorted_abs.end());
            long long h = 0;
            for (long long x : sorted_abs) h = h * 131 + x;
            row_invariant[v] = h;
        }
    }

    void run() {
        perm.clear();
        cur.clear();
        dfs();
    }

    void dfs() {
        size_t p = perm.size();
        if (p == (size_t)n) {
            if (!have_best || cur < best) {
                best = cur;
                best_perm = perm;
                have_best = true;
            }
            return;
        }
        std::vector<bool> used(n, false);
        for (int w : perm) used[w] = true;
        std::vector<std::pair<IntVec, int>> cands;
        for (int v = 0; v < n; v++) {
            if (used[v]) continue;
            cands.push_back({contribution(b, perm, v), v});
        }
        std::sort(cands.begin(), cands.end(), [&](const auto& x, const auto& y) {
            if (x.first != y.first) return x.first < y.first;
            if (row_invariant[x.second] != row_invariant[y.second])
                return row_invariant[x.second] < row_invariant[y.second];
            return x.second < y.second;
        });
        for (auto& [contrib, v] : cands) {
            size_t base = cur.size();
            cur.insert(cur.end(), contrib.begin(), contrib.end());
            // Prune only when the whole accumulated prefix already exceeds the
            // incumbent: every completion of such a prefix stays larger.  The
            // comparison must start from position 0 each time because a
            // strictly smaller entry in an earlier segment outweighs anything
            // appended later.
            bool prune = have_best &&
                         std::lexicographical_compare(best.begin(), best.begin() + cur.size(), cur.begin(), cur.end());
            if (!prune) {
                perm.push_back(v);
                dfs();
                perm.pop_back();
            }
            cur.resize(base);
        }
    }
};

}  // namespace

ExchangeMatrix canonical_form(const ExchangeMatrix& m) {
    check_exchange(m);
    if (m.n > 10) throw std::invalid_argument("canonical_form supports at most 10 vertices");
    if (m.n <= 1) return m;
    CanonSearch s(m);
    s.run();
    return permute(m, s.best_perm);
}

bool quivers_isomorphic(const ExchangeMatrix& a, const ExchangeMatrix& b) {
    if (a.n != b.n) return false;
    return canonical_form(a).b == canonical_form(b).b;
}

std::string matrix_key(const ExchangeMatrix& m) {
    std::ostringstream os;
    os << m.n;
    for (const auto& row : m.b)
        for (long long x : row) os << ',' << x;
    return os.str();
}

namespace {

bool hits_weight_rule(const ExchangeMatrix& m) {
    if (m.n < 3) return false;
    for (const auto& row : m.b)
        for (long long x : row)
            if (x >= 3 || x <= -3) return true;
    return false;
}

// permutation-invariant fallback key for n > 10: sorted rows of sorted entries
std::string invariant_key(const ExchangeMatrix& m) {
    std::vector<IntVec> rows = m.b;
    for (auto& r : rows) std::sort(r.begin(), r.end());
    std::sort(rows.begin(), rows.end());
    std::ostringstream os;
    for (const auto& r : rows)
        for (long long x : r) os << x << ',';
    return os.str();
}

}  // namespace

MutationClassReport mutation_class(const ExchangeMatrix& m, size_t max_nodes, bool keep_members) {
    check_exchange(m);
    if (max_nodes < 1) throw std::invalid_argument("max_nodes must be >= 1");
    MutationClassReport rep;
    const bool exact = m.n <= 10;
    rep.exact_up_to_iso = exact;

    auto key_of = [&](const ExchangeMatrix& q) { return exact ? matrix_key(canonical_form(q)) : invariant_key(q); };
    auto repr_of = [&](const ExchangeMatrix& q) { return exact ? canonical_form(q) : q; };

    if (hits_weight_rule(m)) {
        rep.verdict = ClassVerdict::infinite;
        rep.witness_matrix = m;
        rep.explored = 1;
        return rep;
    }

    struct Node {
        ExchangeMatrix repr;
        std::vector<int> trail;
    };
    std::deque<Node> frontier;
    std::unordered_set<std::string> visited;
    ExchangeMatrix root = repr_of(m);
    visited.insert(key_of(m));
    frontier.push_back({root, {}});
    if (keep_members) rep.members.push_back(root);

    while (!frontier.empty()) {
        Node node = std::move(frontier.front());
        frontier.pop_front();
        for (int k = 0; k < m.n; k++) {
            ExchangeMatrix child = mutate_quiver(node.repr, k);
            std::vector<int> trail = node.trail;
            trail.push_back(k);
            if (hits_weight_rule(child)) {
                rep.verdict = ClassVerdict::infinite;
                rep.witness = trail;
                rep.witness_matrix = child;
                rep.explored = visited.size();
                return rep;
            }
            std::string key = key_of(child);
            if (visited.count(key)) continue;
            if (visited.size() >= max_nodes) {
                rep.verdict = ClassVerdict::budget_exhausted;
                rep.explored = visited.size();
                return rep;
            }
            visited.insert(std::move(key));
            ExchangeMatrix crepr = repr_of(child);
            if (keep_members) rep.members.push_back(crepr);
            frontier.push_back({std::move(crepr), std::move(trail)});
        }
    }
    rep.verdict = ClassVerdict::finite;
    rep.class_size = visited.size();
    rep.explored = visited.size();
    return rep;
}

std::string classify(const ExchangeMatrix& m, size_t max_nodes) {
    check_exchange(m);
    if (m.n == 2) return "kronecker(" + std::to_string(std::llabs(m.b[0][1])) + ")";
    if (m.n <= 1) return "surface-or-unknown";
    MutationClassReport rep = mutation_class(m, max_nodes, true);
    if (rep.verdict == ClassVerdict::infinite) return "mutation-infinite";
    if (rep.verdict == ClassVerdict::budget_exhausted) return "budget-exhausted";
    std::unordered_set<std::string> keys;
    for (const auto& member : rep.members) keys.insert(matrix_key(member));
    for (const auto& name : exceptional_names()) {
        ExchangeMatrix q = named_quiver(name);
        if (q.n != m.n) continue;
        if (keys.count(matrix_key(canonical_form(q)))) return "exceptional(" + name + ")";
    }
    return "surface-or-unknown";
}

ExchangeMatrix kronecker_quiver(long long m) {
    return exchange_from_arrows(2, {{0, 1, m}});
}

ExchangeMatrix markov_quiver() {
    return exchange_from_arrows(3, {{0, 1, 2}, {1, 2, 2}, {2, 0, 2}});
}

ExchangeMatrix path_quiver(int n) {
    std::vector<std::array<long long, 3>> arrows;
    for (int i = 0; i + 1 < n; i++) arrows.push_back({i, i + 1, 1});
    return exchange_from_arrows(n, arrows);
}

ExchangeMatrix cycle_quiver(int n) {
    std::vector<std::array<long long, 3>> arrows;
    for (int i = 0; i < n; i++) arrows.push_back({i, (i + 1) % n, 1});
    return exchange_from_arrows(n, arrows);
}

std::vector<std::string> exceptional_names() {
    return {"E6", "E7", "E8", "tE6", "tE7", "tE8", "E6_11", "E7_11", "E8_11", "X6", "X7"};
}

ExchangeMatrix named_quiver(const std::string& name) {
    using A = std::vector<std::array<long long, 3>>;
    // Star-shaped members of the E family: vertex 0 is the center, arms feed
    // into it; arm vertices are numbered outward.
    if (name == "E6")
        return exchange_from_arrows(6, A{{2, 1, 1}, {1, 0, 1}, {3, 0, 1}, {5, 4, 1}, {4, 0, 1}});
    if (name == "E7")
        return exchange_from_arrows(7, A{{2, 1, 1}, {1, 0, 1}, {3, 0, 1}, {5, 4, 1}, {4, 0, 1}, {6, 5, 1}});
    if (name == "E8")
        return exchange_from_arrows(8, A{{2, 1, 1}, {1, 0, 1}, {3, 0, 1}, {5, 4, 1}, {4, 0, 1}, {6, 5, 1}, {7, 6, 1}});
    if (name == "tE6")
        return exchange_from_arrows(7, A{{2, 1, 1}, {1, 0, 1}, {3, 0, 1}, {5, 4, 1}, {4, 0, 1}, {6, 3, 1}});
    if (name == "tE7")
        return exchange_from_arrows(8,
                                    A{{2, 1, 1}, {1, 0, 1}, {3, 0, 1}, {5, 4, 1}, {4, 0, 1}, {6, 5, 1}, {7, 2, 1}});
    if (name == "tE8")
        return exchange_from_arrows(
            9, A{{2, 1, 1}, {1, 0, 1}, {3, 0, 1}, {5, 4, 1}, {4, 0, 1}, {6, 5, 1}, {7, 6, 1}, {8, 7, 1}});
    // Doubly extended types: vertices 0 = u, 1 = d joined by a double arrow
    // d => u, with u -> x -> d spokes carrying pendant chains.
    if (name == "E6_11")
        return exchange_from_arrows(8, A{{3, 2, 1},
                                         {0, 2, 1},
                                         {2, 1, 1},
                                         {0, 4, 1},
                                         {4, 1, 1},
                                         {1, 0, 2},
                                         {5, 4, 1},
                                         {7, 6, 1},
                                         {0, 6, 1},
                                         {6, 1, 1}});
    if (name == "E7_11")
        return exchange_from_arrows(9, A{{4, 3, 1},
                                         {3, 2, 1},
                                         {0, 2, 1},
                                         {2, 1, 1},
                                         {0, 5, 1},
                                         {5, 1, 1},
                                         {1, 0, 2},
                                         {7, 6, 1},
                                         {8, 7, 1},
                                         {0, 6, 1},
                                         {6, 1, 1}});
    if (name == "E8_11")
        return exchange_from_arrows(10, A{{3, 2, 1},
                                          {0, 2, 1},
                                          {2, 1, 1},
                                          {0, 4, 1},
                                          {4, 1, 1},
                                          {1, 0, 2},
                                          {6, 5, 1},
                                          {7, 6, 1},
                                          {0, 5, 1},
                                          {5, 1, 1},
                                          {8, 7, 1},
                                          {9, 8, 1}});
    // X types: triangles around a center, each with one double arrow.
    if (name == "X6")
        return exchange_from_arrows(6, A{{0, 1, 1}, {2, 0, 1}, {0, 3, 1}, {4, 0, 1}, {5, 0, 1}, {1, 2, 2}, {3, 4, 2}});
    if (name == "X7")
        return exchange_from_arrows(
            7, A{{0, 1, 1}, {2, 0, 1}, {0, 3, 1}, {4, 0, 1}, {0, 6, 1}, {5, 0, 1}, {1, 2, 2}, {3, 4, 2}, {6, 5, 2}});
    throw std::invalid_argument("unknown quiver name: " + name);
}

}  // namespace gvfan
