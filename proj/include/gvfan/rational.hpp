#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace gvfan {

using Rat = mpq_class;
using Big = mpz_class;

using IntVec = std::vector<long long>;
using IntMat = std::vector<IntVec>;

inline Rat rat(long long num, long long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rat r{Big((long)num), Big((long)den)};
    r.canonicalize();
    return r;
}

// "p/q" or plain integer "p"
inline std::string rat_to_string(const Rat& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Rat rat_from_string(const std::string& s) {
    Rat r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
    r.canonicalize();
    return r;
}

inline int sign_of(const Rat& r) { return sgn(r); }
inline int sign_of(const Big& z) { return sgn(z); }
inline int sign_of(long long v) { return v > 0 ? 1 : v < 0 ? -1 : 0; }

// divides by the gcd of entries; direction preserved, zero vector rejected
inline IntVec primitive_vector(IntVec v) {
    unsigned long long g = 0;
    for (long long x : v) g = std::gcd(g, (unsigned long long)(x < 0 ? -(unsigned long long)x : (unsigned long long)x));
    if (g == 0) throw std::invalid_argument("primitive_vector: zero vector");
    if (g > 1)
        for (auto& x : v) x /= (long long)g;
    return v;
}

inline std::vector<Big> to_big(const IntVec& v) {
    std::vector<Big> out;
    out.reserve(v.size());
    for (long long x : v) out.emplace_back((long)x);
    return out;
}

}  // namespace gvfan
