#pragma once

#include <map>
#include <string>
#include <vector>

#include "gvfan/geometry.hpp"
#include "gvfan/linalg.hpp"
#include "gvfan/rng.hpp"

namespace gvfan {

// Skew-symmetric pairing {e_i, e_j} on the cocharacter lattice.  For a quiver
// this is #(arrows j -> i) - #(arrows i -> j).
struct ScatterLattice {
    int n = 0;
    IntMat form;  // n x n, skew-symmetric
};

ScatterLattice make_lattice(IntMat form);

long long pair_form(const ScatterLattice& l, const IntVec& d1, const IntVec& d2);

// p*(d) = {d, -} as a vector in the dual lattice
IntVec p_star(const ScatterLattice& l, const IntVec& d);

// sum of coordinates; the grading used for truncation
long long degree_of(const IntVec& d);

// Element of the graded Lie algebra spanned by x^d for d in N+ (nonzero,
// componentwise nonnegative), truncated: every key satisfies degree_of <= order.
struct LieSeries {
    int order = 0;
    std::map<IntVec, Rat> coeffs;
};

LieSeries lie_zero(int order);
LieSeries lie_neg(const LieSeries& a);
bool lie_is_zero(const LieSeries& a);
LieSeries lie_truncate(const LieSeries& a, int order);

// [x^{d1}, x^{d2}] = {d1,d2} x^{d1+d2}, extended bilinearly, terms of degree
// above the truncation dropped.  Orders of both arguments must equal k.
LieSeries bracket(const ScatterLattice& l, const LieSeries& a, const LieSeries& b, int k);

// log(exp(a) exp(b)) at truncation k, exact.  Dynkin's formula, reorganized
// as a sum over words with memoized right-nested brackets.
LieSeries bch_mul(const ScatterLattice& l, const LieSeries& a, const LieSeries& b, int k);

// Codimension-one cone with an attached group element in log coordinates.
// Empty support_rays means the whole hyperplane d0-perp.
struct Wall {
    IntVec d0;                   // primitive, in N+
    std::vector<IntVec> support_rays;
    LieSeries log_fn;            // keys are positive multiples of d0
};

// log of the dilogarithm element: sum over j >= 1, j*degree_of(d0) <= k of
// (-1)^{j-1} x^{j d0} / j^2
LieSeries dilog_series(const IntVec& d0, int k);

// one wall per basis direction e_i, full hyperplane support, dilog function
std::vector<Wall> initial_walls(const ScatterLattice& l, int k);

struct Crossing {
    size_t wall = 0;
    int sign = 1;  // +1 when crossed from the positive side of d0 to the negative
};

// Crossings of a counterclockwise loop around the origin starting inside the
// positive chamber, ordered by angle.  Rank 2 only.
std::vector<Crossing> ccw_loop_crossings(const ScatterLattice& l, const std::vector<Wall>& walls);

// fold of bch_mul over signed wall functions, rightmost crossing applied first
LieSeries path_ordered_product(const ScatterLattice& l, const std::vector<Wall>& walls,
                               const std::vector<Crossing>& crossings, int k);

// Order-by-order consistency completion for rank 2: starting from the initial
// walls, inserts rays (for primitive d, on the ray spanned by p*(d)) with
// log coefficients chosen so the full counterclockwise loop product vanishes
// at order k.  The returned list starts with the initial walls; inserted
// walls follow in insertion order (degree, then angle).
std::vector<Wall> complete_rank2(const ScatterLattice& l, int k);

// For every codimension-one face of the fan whose primitive normal lies in
// N+ up to sign, emit a wall carrying the dilog function in that direction.
// Faces with mixed-sign normals are skipped and reported in warnings.
std::vector<Wall> attach_fan_functions(const Fan& f, const ScatterLattice& l, int k,
                                       std::vector<std::string>* warnings = nullptr);

}  // namespace gvfan
