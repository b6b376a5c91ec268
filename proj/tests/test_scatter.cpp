#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <string>

#include "gvfan/quiver.hpp"
#include "gvfan/scatter.hpp"
#include "gvfan/seeds.hpp"

using namespace gvfan;

namespace {

const ScatterLattice& a2_lat() {
    static ScatterLattice l = make_lattice({{0, 1}, {-1, 0}});
    return l;
}

const ScatterLattice& k2_lat() {
    static ScatterLattice l = make_lattice({{0, 2}, {-2, 0}});
    return l;
}

LieSeries unit(const IntVec& d, int k) {
    LieSeries s = lie_zero(k);
    s.coeffs[d] = 1;
    return s;
}

LieSeries random_series(const ScatterLattice& l, int k, SplitRng& rng) {
    LieSeries s = lie_zero(k);
    size_t terms = (size_t)rng.uniform(1, 4);
    for (size_t t = 0; t < terms; ++t) {
        IntVec d(l.n, 0);
        long long deg = 0;
        for (int i = 0; i < l.n; ++i) {
            d[i] = rng.uniform(0, 2);
            deg += d[i];
        }
        if (deg == 0 || deg > k) continue;
        long long c = rng.uniform(-5, 5);
        if (c != 0) s.coeffs[d] += rat(c);
    }
    for (auto it = s.coeffs.begin(); it != s.coeffs.end();)
        it = (it->second == 0) ? s.coeffs.erase(it) : std::next(it);
    return s;
}

bool series_equal(const LieSeries& a, const LieSeries& b) {
    LieSeries d = a;
    for (const auto& [key, c] : b.coeffs) d.coeffs[key] -= c;
    return lie_is_zero(d);
}

}  // namespace

TEST_CASE("the form pairing and its dual map follow the quiver convention") {
    CHECK(pair_form(a2_lat(), {1, 0}, {0, 1}) == 1);
    CHECK(pair_form(a2_lat(), {0, 1}, {1, 0}) == -1);
    CHECK(pair_form(k2_lat(), {1, 0}, {0, 1}) == 2);
    CHECK(p_star(a2_lat(), {1, 1}) == IntVec{-1, 1});
    CHECK(p_star(k2_lat(), {2, 1}) == IntVec{-2, 4});
    CHECK_THROWS_AS(make_lattice({{0, 1}, {1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(make_lattice({{0, 1}}), std::invalid_argument);
}

TEST_CASE("the bracket multiplies coefficients by the form value") {
    LieSeries x1 = unit({1, 0}, 2), x2 = unit({0, 1}, 2);
    LieSeries b = bracket(a2_lat(), x1, x2, 2);
    REQUIRE(b.coeffs.size() == 1);
    CHECK(b.coeffs.at({1, 1}) == 1);

    LieSeries bk = bracket(k2_lat(), x1, x2, 2);
    CHECK(bk.coeffs.at({1, 1}) == 2);

    CHECK(lie_is_zero(bracket(a2_lat(), x1, x1, 2)));
    CHECK(lie_is_zero(bracket(a2_lat(), bracket(a2_lat(), x1, x2, 2), unit({1, 1}, 2), 2)));
}

TEST_CASE("bracket terms above the truncation order are dropped") {
    LieSeries x1 = unit({1, 0}, 1), x2 = unit({0, 1}, 1);
    CHECK(lie_is_zero(bracket(a2_lat(), x1, x2, 1)));

    // antisymmetry on a mixed series
    SplitRng rng(5);
    LieSeries a = random_series(a2_lat(), 4, rng), b = random_series(a2_lat(), 4, rng);
    LieSeries ab = bracket(a2_lat(), a, b, 4), ba = bracket(a2_lat(), b, a, 4);
    CHECK(series_equal(ab, lie_neg(ba)));
}

TEST_CASE("series validation rejects malformed input") {
    LieSeries ok = unit({1, 0}, 2);
    LieSeries wrong_order = unit({1, 0}, 3);
    CHECK_THROWS_AS(bracket(a2_lat(), ok, wrong_order, 2), std::invalid_argument);

    LieSeries neg = lie_zero(2);
    neg.coeffs[{-1, 1}] = 1;
    CHECK_THROWS_AS(bracket(a2_lat(), neg, ok, 2), std::invalid_argument);

    LieSeries zero_key = lie_zero(2);
    zero_key.coeffs[{0, 0}] = 1;
    CHECK_THROWS_AS(bch_mul(a2_lat(), zero_key, ok, 2), std::invalid_argument);

    LieSeries too_big = lie_zero(2);
    too_big.coeffs[{2, 1}] = 1;
    CHECK_THROWS_AS(bch_mul(a2_lat(), too_big, ok, 2), std::invalid_argument);

    CHECK_THROWS_AS(bch_mul(a2_lat(), ok, ok, 0), std::invalid_argument);
    CHECK_THROWS_AS(bch_mul(a2_lat(), ok, ok, 13), std::invalid_argument);
}

TEST_CASE("group multiplication in log coordinates has the expected low terms") {
    LieSeries x1 = unit({1, 0}, 2), x2 = unit({0, 1}, 2);
    LieSeries p = bch_mul(a2_lat(), x1, x2, 2);
    CHECK(p.coeffs.at({1, 0}) == 1);
    CHECK(p.coeffs.at({0, 1}) == 1);
    CHECK(p.coeffs.at({1, 1}) == rat(1, 2));

    LieSeries q = bch_mul(a2_lat(), x2, x1, 2);
    CHECK(q.coeffs.at({1, 1}) == rat(-1, 2));

    // identity element
    CHECK(series_equal(bch_mul(a2_lat(), x1, lie_zero(2), 2), x1));
    CHECK(series_equal(bch_mul(a2_lat(), lie_zero(2), x2, 2), x2));

    // top-degree series multiply additively: every bracket overflows
    LieSeries t1 = unit({2, 1}, 3), t2 = unit({1, 2}, 3);
    LieSeries tp = bch_mul(a2_lat(), t1, t2, 3);
    CHECK(tp.coeffs.size() == 2);
    CHECK(tp.coeffs.at({2, 1}) == 1);
    CHECK(tp.coeffs.at({1, 2}) == 1);
}

TEST_CASE("bch multiplication is associative and has exact inverses") {
    ScatterLattice r3 = make_lattice({{0, 1, -1}, {-1, 0, 2}, {1, -2, 0}});
    SplitRng rng(2026);
    for (int cs = 0; cs < 30; ++cs) {
        const ScatterLattice& l = (cs % 3 == 0) ? a2_lat() : (cs % 3 == 1) ? k2_lat() : r3;
        int k = 2 + cs % 4;  // 2..5
        SplitRng r = rng.split(cs);
        LieSeries a = random_series(l, k, r), b = random_series(l, k, r), c = random_series(l, k, r);
        LieSeries left = bch_mul(l, bch_mul(l, a, b, k), c, k);
        LieSeries right = bch_mul(l, a, bch_mul(l, b, c, k), k);
        CHECK(series_equal(left, right));
        CHECK(lie_is_zero(bch_mul(l, a, lie_neg(a), k)));
        CHECK(lie_is_zero(bch_mul(l, lie_neg(b), b, k)));
    }
}

TEST_CASE("initial walls carry the truncated dilogarithm series") {
    auto walls = initial_walls(a2_lat(), 3);
    REQUIRE(walls.size() == 2);
    CHECK(walls[0].d0 == IntVec{1, 0});
    CHECK(walls[0].support_rays.empty());  // full hyperplane
    CHECK(walls[0].log_fn.coeffs.at({1, 0}) == 1);
    CHECK(walls[0].log_fn.coeffs.at({2, 0}) == rat(-1, 4));
    CHECK(walls[0].log_fn.coeffs.at({3, 0}) == rat(1, 9));
    CHECK(walls[0].log_fn.coeffs.size() == 3);

    auto w1 = initial_walls(a2_lat(), 1);
    CHECK(w1[1].log_fn.coeffs.size() == 1);
    CHECK(w1[1].log_fn.coeffs.at({0, 1}) == 1);

    ScatterLattice r3 = make_lattice({{0, 1, 0}, {-1, 0, 1}, {0, -1, 0}});
    auto w3 = initial_walls(r3, 2);
    REQUIRE(w3.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(w3[i].d0[i] == 1);
        CHECK(degree_of(w3[i].d0) == 1);
    }
}

TEST_CASE("a counterclockwise loop crosses the initial lines in four points") {
    auto walls = initial_walls(a2_lat(), 2);
    auto cr = ccw_loop_crossings(a2_lat(), walls);
    REQUIRE(cr.size() == 4);
    CHECK(cr[0].wall == 0);
    CHECK(cr[0].sign == 1);
    CHECK(cr[1].wall == 1);
    CHECK(cr[1].sign == 1);
    CHECK(cr[2].wall == 0);
    CHECK(cr[2].sign == -1);
    CHECK(cr[3].wall == 1);
    CHECK(cr[3].sign == -1);
}

TEST_CASE("path ordered products fold the crossings from the right") {
    auto walls = initial_walls(a2_lat(), 2);
    CHECK(lie_is_zero(path_ordered_product(a2_lat(), walls, {}, 2)));

    // crossing a wall and recrossing it cancels exactly
    std::vector<Crossing> there_and_back = {{0, 1}, {0, -1}};
    CHECK(lie_is_zero(path_ordered_product(a2_lat(), walls, there_and_back, 2)));

    // full loop with only the initial walls is inconsistent at order 2
    LieSeries loop = path_ordered_product(a2_lat(), walls, ccw_loop_crossings(a2_lat(), walls), 2);
    REQUIRE(loop.coeffs.size() == 1);
    CHECK(loop.coeffs.at({1, 1}) == rat(-1));
}

TEST_CASE("completing the two initial lines inserts the pentagon ray") {
    auto walls = complete_rank2(a2_lat(), 8);
    REQUIRE(walls.size() == 3);
    const Wall& ins = walls[2];
    CHECK(ins.d0 == IntVec{1, 1});
    REQUIRE(ins.support_rays.size() == 1);
    CHECK(ins.support_rays[0] == IntVec{-1, 1});
    CHECK(series_equal(ins.log_fn, dilog_series({1, 1}, 8)));

    LieSeries loop = path_ordered_product(a2_lat(), walls, ccw_loop_crossings(a2_lat(), walls), 8);
    CHECK(lie_is_zero(loop));
}

TEST_CASE("order one and commuting forms need no corrections") {
    CHECK(complete_rank2(a2_lat(), 1).size() == 2);

    ScatterLattice flat = make_lattice({{0, 0}, {0, 0}});
    auto walls = complete_rank2(flat, 4);
    CHECK(walls.size() == 2);
    CHECK(lie_is_zero(path_ordered_product(flat, walls, ccw_loop_crossings(flat, walls), 4)));
}

TEST_CASE("the rank two completion of the doubled arrow is consistent") {
    auto walls = complete_rank2(k2_lat(), 6);
    LieSeries loop = path_ordered_product(k2_lat(), walls, ccw_loop_crossings(k2_lat(), walls), 6);
    CHECK(lie_is_zero(loop));

    std::set<IntVec> dirs;
    for (size_t i = 2; i < walls.size(); ++i) dirs.insert(walls[i].d0);
    CHECK(dirs == std::set<IntVec>{{1, 1}, {2, 1}, {1, 2}, {3, 2}, {2, 3}});

    // the central wall carries the log of (1 - z^{(1,1)})^{-2}
    const Wall* central = nullptr;
    for (const Wall& w : walls)
        if (w.d0 == IntVec{1, 1}) central = &w;
    REQUIRE(central != nullptr);
    CHECK(central->support_rays[0] == IntVec{-1, 1});
    CHECK(central->log_fn.coeffs.at({1, 1}) == 2);
    CHECK(central->log_fn.coeffs.at({2, 2}) == rat(1, 2));
    CHECK(central->log_fn.coeffs.at({3, 3}) == rat(2, 9));

    // side walls keep the plain dilog shape
    for (const Wall& w : walls)
        if (w.d0 == IntVec{2, 1}) {
            CHECK(w.log_fn.coeffs.at({2, 1}) == 1);
            CHECK(w.log_fn.coeffs.at({4, 2}) == rat(-1, 4));
        }
}

TEST_CASE("every wall function in a completion is supported on its direction") {
    for (const ScatterLattice* l : {&a2_lat(), &k2_lat()}) {
        auto walls = complete_rank2(*l, 6);
        for (const Wall& w : walls)
            for (const auto& [d, c] : w.log_fn.coeffs) {
                CHECK(c != 0);
                CHECK(normalize_ray(d) == w.d0);
            }
    }
}

TEST_CASE("fan facets receive dilog functions along their normals") {
    Fan pentagon;
    pentagon.ambient_dim = 2;
    for (auto rays : {std::vector<IntVec>{{1, 0}, {0, 1}}, {{0, 1}, {-1, 1}}, {{-1, 1}, {-1, 0}},
                      {{-1, 0}, {0, -1}}, {{0, -1}, {1, 0}}})
        pentagon.cones.push_back(make_cone(rays));

    std::vector<std::string> warnings;
    auto walls = attach_fan_functions(pentagon, a2_lat(), 4, &warnings);
    CHECK(warnings.empty());
    REQUIRE(walls.size() == 5);
    bool found = false;
    for (const Wall& w : walls) {
        REQUIRE(w.support_rays.size() == 1);
        if (w.support_rays[0] == IntVec{0, 1}) {
            found = true;
            CHECK(w.d0 == IntVec{1, 0});
        }
        for (const auto& [d, c] : w.log_fn.coeffs) CHECK(normalize_ray(d) == w.d0);
        CHECK(series_equal(w.log_fn, dilog_series(w.d0, 4)));
    }
    CHECK(found);
}

TEST_CASE("orthant facets give the coordinate hyperplane walls") {
    Fan orthant;
    orthant.ambient_dim = 3;
    orthant.cones.push_back(make_cone({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
    ScatterLattice r3 = make_lattice({{0, 1, 0}, {-1, 0, 1}, {0, -1, 0}});
    auto walls = attach_fan_functions(orthant, r3, 3);
    REQUIRE(walls.size() == 3);
    std::set<IntVec> dirs;
    for (const Wall& w : walls) dirs.insert(w.d0);
    CHECK(dirs == std::set<IntVec>{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
}

TEST_CASE("facets with mixed-sign normals are skipped with a warning") {
    Fan f;
    f.ambient_dim = 2;
    f.cones.push_back(make_cone({{1, 0}, {1, 1}}));
    std::vector<std::string> warnings;
    auto walls = attach_fan_functions(f, a2_lat(), 3, &warnings);
    REQUIRE(walls.size() == 1);
    CHECK(walls[0].d0 == IntVec{0, 1});
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("mixed-sign") != std::string::npos);
}

TEST_CASE("walls attached to a computed fan cover all shared facets") {
    SeedSet s = enumerate_seeds(kronecker_quiver(2), 2, 100000);
    Fan f = fan_from_seeds(s);
    REQUIRE(f.cones.size() == 5);
    std::vector<std::string> warnings;
    auto walls = attach_fan_functions(f, k2_lat(), 4, &warnings);
    CHECK(warnings.empty());
    CHECK(walls.size() == 6);
    std::set<IntVec> dirs;
    for (const Wall& w : walls) {
        dirs.insert(w.d0);
        CHECK(series_equal(w.log_fn, dilog_series(w.d0, 4)));
    }
    // normals: the coordinate directions from the initial cone's facets plus
    // mixed primitives from the deeper cones
    CHECK(dirs.count({1, 0}) == 1);
    CHECK(dirs.count({0, 1}) == 1);
    for (const IntVec& d : dirs) CHECK(degree_of(d) >= 1);
}
