#include "gvfan/linalg.hpp"

#include <algorithm>
#include <cstdlib>

namespace gvfan {

QMat qmat_zero(size_t rows, size_t cols) {
    return QMat(rows, QVec(cols, Rat(0)));
}

QMat qmat_identity(size_t n) {
    QMat m = qmat_zero(n, n);
    for (size_t i = 0; i < n; i++) m[i][i] = 1;
    return m;
}

QMat qmat_mul(const QMat& a, const QMat& b) {
    size_t r = a.size(), inner = b.size(), c = inner ? b[0].size() : 0;
    QMat out = qmat_zero(r, c);
    for (size_t i = 0; i < r; i++)
        for (size_t k = 0; k < inner; k++) {
            if (a[i][k] == 0) continue;
            for (size_t j = 0; j < c; j++)
                if (b[k][j] != 0) out[i][j] += a[i][k] * b[k][j];
        }
    return out;
}

QVec qmat_apply(const QMat& a, const QVec& v) {
    QVec out(a.size(), Rat(0));
    for (size_t i = 0; i < a.size(); i++)
        for (size_t j = 0; j < v.size(); j++)
            if (a[i][j] != 0 && v[j] != 0) out[i] += a[i][j] * v[j];
    return out;
}

QMat qmat_transpose(const QMat& a) {
    if (a.empty()) return a;
    QMat out = qmat_zero(a[0].size(), a.size());
    for (size_t i = 0; i < a.size(); i++)
        for (size_t j = 0; j < a[0].size(); j++) out[j][i] = a[i][j];
    return out;
}

size_t rref(QMat& m, std::vector<size_t>* pivots) {
    if (pivots) pivots->clear();
    if (m.empty()) return 0;
    size_t rows = m.size(), cols = m[0].size();
    size_t rank = 0;
    for (size_t col = 0; col < cols && rank < rows; col++) {
        size_t piv = rank;
        while (piv < rows && m[piv][col] == 0) piv++;
        if (piv == rows) continue;
        std::swap(m[rank], m[piv]);
        Rat inv = 1 / m[rank][col];
        for (size_t j = col; j < cols; j++) m[rank][j] *= inv;
        for (size_t i = 0; i < rows; i++) {
            if (i == rank || m[i][col] == 0) continue;
            Rat f = m[i][col];
            for (size_t j = col; j < cols; j++) m[i][j] -= f * m[rank][j];
        }
        if (pivots) pivots->push_back(col);
        rank++;
    }
    return rank;
}

std::vector<QVec> nullspace(QMat a) {
    if (a.empty()) return {};
    size_t cols = a[0].size();
    std::vector<size_t> pivots;
    size_t rank = rref(a, &pivots);
    std::vector<bool> is_pivot(cols, false);
    for (size_t c : pivots) is_pivot[c] = true;
    std::vector<QVec> basis;
    for (size_t free = 0; free < cols; free++) {
        if (is_pivot[free]) continue;
        QVec v(cols, Rat(0));
        v[free] = 1;
        for (size_t r = 0; r < rank; r++) v[pivots[r]] = -a[r][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<QVec> solve(QMat a, QVec b) {
    size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    for (size_t i = 0; i < rows; i++) a[i].push_back(b[i]);
    std::vector<size_t> pivots;
    size_t rank = rref(a, &pivots);
    // inconsistent iff a pivot landed in the appended column
    if (rank > 0 && pivots.back() == cols) return std::nullopt;
    QVec x(cols, Rat(0));
    for (size_t r = 0; r < rank; r++) x[pivots[r]] = a[r][cols];
    return x;
}

std::optional<QMat> inverse(QMat a) {
    size_t n = a.size();
    for (size_t i = 0; i < n; i++) {
        a[i].resize(2 * n, Rat(0));
        a[i][n + i] = 1;
    }
    std::vector<size_t> pivots;
    size_t rank = rref(a, &pivots);
    if (rank < n || pivots[n - 1] != n - 1) return std::nullopt;
    QMat inv(n, QVec(n));
    for (size_t i = 0; i < n; i++)
        for (size_t j = 0; j < n; j++) inv[i][j] = a[i][n + j];
    return inv;
}

Rat determinant(QMat a) {
    size_t n = a.size();
    Rat det(1);
    for (size_t col = 0; col < n; col++) {
        size_t piv = col;
        while (piv < n && a[piv][col] == 0) piv++;
        if (piv == n) return Rat(0);
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = -det;
        }
        det *= a[col][col];
        Rat inv = 1 / a[col][col];
        for (size_t i = col + 1; i < n; i++) {
            if (a[i][col] == 0) continue;
            Rat f = a[i][col] * inv;
            for (size_t j = col; j < n; j++) a[i][j] -= f * a[col][j];
        }
    }
    return det;
}

QVec char_poly(const QMat& a) {
    size_t n = a.size();
    QVec c(n + 1, Rat(0));
    c[n] = 1;
    QMat m = qmat_zero(n, n);  // Faddeev-LeVerrier auxiliary
    for (size_t k = 1; k <= n; k++) {
        m = qmat_mul(a, m);
        for (size_t i = 0; i < n; i++) m[i][i] += c[n - k + 1];
        Rat tr(0);
        QMat am = qmat_mul(a, m);
        for (size_t i = 0; i < n; i++) tr += am[i][i];
        c[n - k] = -tr / Rat((long)k);
    }
    return c;
}

std::vector<Rat> rational_roots(const QVec& coeffs) {
    // clear denominators, strip trailing zeros and powers of t
    size_t deg = coeffs.size();
    while (deg > 0 && coeffs[deg - 1] == 0) deg--;
    std::vector<Rat> roots;
    if (deg == 0) return roots;
    size_t low = 0;
    while (low < deg && coeffs[low] == 0) low++;
    if (low > 0) roots.push_back(Rat(0));
    if (low == deg) return roots;

    Big denlcm(1);
    for (size_t i = low; i < deg; i++) {
        Big d = coeffs[i].get_den();
        denlcm = denlcm / gcd(denlcm, d) * d;
    }
    std::vector<Big> c;
    for (size_t i = low; i < deg; i++) c.push_back(Big(coeffs[i].get_num() * (denlcm / coeffs[i].get_den())));

    auto push_root = [&](Rat cand) {
        cand.canonicalize();
        if (std::find(roots.begin(), roots.end(), cand) == roots.end()) roots.push_back(cand);
    };
    if (c.size() == 2) {
        Big num = -c[0];
        push_root(Rat(num, c[1]));
        std::sort(roots.begin(), roots.end());
        return roots;
    }
    if (c.size() == 3) {
        // quadratic: rational roots exist iff the discriminant is a perfect square
        Big disc = c[1] * c[1] - 4 * c[0] * c[2];
        if (disc >= 0) {
            Big s = sqrt(disc);
            if (s * s == disc) {
                Big two_a = 2 * c[2];
                Big n1 = -c[1] + s, n2 = -c[1] - s;
                push_root(Rat(n1, two_a));
                push_root(Rat(n2, two_a));
            }
        }
        std::sort(roots.begin(), roots.end());
        return roots;
    }

    // the scan is capped so a pathological constant term cannot stall the
    // caller; divisors with both factors above the cap are not enumerated
    auto divisors = [](Big v) {
        std::vector<Big> out;
        v = abs(v);
        const long cap = 100000;
        for (Big d(1); d * d <= v && d <= cap; d++) {
            if (v % d == 0) {
                out.push_back(d);
                if (d * d != v) out.push_back(v / d);
            }
        }
        return out;
    };
    auto eval_zero = [&](const Rat& t) {
        Rat acc(0);
        for (size_t i = c.size(); i-- > 0;) acc = acc * t + Rat(c[i]);
        return acc == 0;
    };
    for (const Big& p : divisors(c.front()))
        for (const Big& q : divisors(c.back())) {
            Rat cand(p, q);
            cand.canonicalize();
            if (eval_zero(cand) && std::find(roots.begin(), roots.end(), cand) == roots.end()) roots.push_back(cand);
            cand = -cand;
            if (eval_zero(cand) && std::find(roots.begin(), roots.end(), cand) == roots.end()) roots.push_back(cand);
        }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace gvfan
