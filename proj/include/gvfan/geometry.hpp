#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gvfan/linalg.hpp"
#include "gvfan/seeds.hpp"

namespace gvfan {

// divides by the gcd of entries, direction preserved; throws on zero input
IntVec normalize_ray(const IntVec& v);

// Pointed cone spanned by linearly independent primitive rays, stored sorted.
struct SimplicialCone {
    std::vector<IntVec> rays;

    bool operator==(const SimplicialCone& o) const { return rays == o.rays; }
};

// primitivizes, sorts, and validates (nonzero, equal dims, independent)
SimplicialCone make_cone(std::vector<IntVec> rays);

int cone_dim(const SimplicialCone& c);

// exact: p is a nonnegative rational combination of the rays
bool cone_contains(const SimplicialCone& c, const QVec& p);

// rays = primitive g-columns of the seed
SimplicialCone seed_cone(const GSeed& s);

struct Fan {
    int ambient_dim = 0;
    std::vector<SimplicialCone> cones;  // maximal cones, deduplicated
};

Fan fan_from_seeds(const SeedSet& s);

// all distinct rays over all cones, sorted
std::vector<IntVec> fan_rays(const Fan& f);

// Extreme rays of the intersection of two simplicial cones, as primitive
// integer vectors, sorted.  Exact double description.
std::vector<IntVec> cone_intersection_rays(const SimplicialCone& a, const SimplicialCone& b, int ambient_dim);

struct FanValidity {
    bool valid = true;
    size_t cone_a = 0, cone_b = 0;  // first offending pair when invalid
    std::string reason;
};

// Pairwise: the intersection of two maximal cones must be a face of both,
// i.e. every extreme ray of the intersection is a ray of both cones.
// Checks at most max_pairs pairs (deterministic order) when the fan is large.
FanValidity fan_is_valid(const Fan& f, size_t max_pairs = SIZE_MAX);

enum class Sampler { grid, fibonacci, halton };
Sampler sampler_from_string(const std::string& s);
std::string sampler_name(Sampler s);

struct CoverageReport {
    Rat fraction;  // covered / samples, exact
    size_t samples = 0;
    size_t covered = 0;
    std::string method;
    std::optional<IntVec> halfspace_normal;
};

// Deterministic unit directions (grid: n=2 angular; fibonacci: n=3 sphere;
// halton: any n), each rationalized per coordinate by continued fractions
// with denominator <= 10^6, then tested exactly for membership in some
// maximal cone.  Boundary counts as covered.  Identical results for any
// thread count.
CoverageReport coverage(const Fan& f, size_t samples, Sampler sampler, int threads = 1);

// Nonzero primitive v with v.r <= 0 for every ray of the fan, if one exists.
// Deterministic choice: the generators of the polar cone are summed; if the
// sum vanishes (pure lineality) the lexicographically smallest generator is
// returned instead.  Output re-verified against all rays in integer
// arithmetic.
std::optional<IntVec> halfspace_detect(const Fan& f);

// best rational approximation p/q of x with q <= maxden (continued fractions)
std::pair<long long, long long> rat_approx(double x, long long maxden);

}  // namespace gvfan
