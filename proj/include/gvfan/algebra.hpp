#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gvfan/linalg.hpp"
#include "gvfan/rng.hpp"

namespace gvfan {

// Path algebra of a quiver with relations, truncated at a nilpotency bound.
// Paths compose right to left; a stored path lists its arrows in order of
// application, so composing w after u concatenates u's arrows then w's.
// P_i = e_i * Lambda is spanned by the basis paths with target i, and
// Hom(P_i, P_j) = e_j * Lambda * e_i acts by composing on the left.

struct Arrow {
    std::string name;
    int source = 0, target = 0;
};

struct RelationTerm {
    Rat coeff;
    std::vector<int> arrows;  // arrow indices, application order
};
using Relation = std::vector<RelationTerm>;

struct AlgebraPresentation {
    int vertices = 0;
    std::vector<Arrow> arrows;
    std::vector<Relation> relations;
    int nilpotency_bound = 1;  // every path of this length vanishes
};

// element of the algebra: sparse rational combination of basis path ids
using AlgElt = std::map<int, Rat>;

struct Algebra {
    AlgebraPresentation pres;
    // basis paths of the quotient, shortest representatives first
    std::vector<std::vector<int>> path_arrows;  // id -> arrows, application order
    std::vector<int> bsrc, btgt;                // per basis id
    std::vector<int> unit;                      // unit[v] = basis id of e_v
    std::vector<AlgElt> arrow_elt;              // reduced image of each arrow
    std::vector<std::vector<std::vector<int>>> block;  // block[i][j] = ids of e_j L e_i, sorted
    // mul_table[x][y] = reduction of x after y (empty when tgt(y) != src(x))
    std::vector<std::vector<AlgElt>> mul_table;
};

// Validates admissibility at the bound: every path of length nilpotency_bound
// must reduce to zero, otherwise throws naming a witness path.
Algebra make_algebra(const AlgebraPresentation& pres);

int algebra_dim(const Algebra& a);
std::string path_name(const Algebra& a, int basis_id);

AlgElt alg_mul(const Algebra& a, const AlgElt& later, const AlgElt& earlier);
// inverse of an element of e_v L e_v with nonzero unit coefficient
AlgElt alg_local_inverse(const Algebra& a, const AlgElt& x, int v);

// ready-made presentations used throughout the tests
AlgebraPresentation kronecker_algebra();               // 1 ==a,b==> 2
AlgebraPresentation linear_algebra_a2();               // 1 --a--> 2
AlgebraPresentation loop_algebra(int relation_power);  // one loop x, x^relation_power = 0

// --- two-term complexes of projectives -------------------------------------

// P^{-1} -> P^0 with multiplicities per vertex; summands of each term are
// expanded in vertex order (all copies of vertex 0 first, then vertex 1, ...).
// f[r][c] is the component from minus summand c to plus summand r, an element
// of e_{v_r} L e_{u_c}.
struct TwoTermComplex {
    IntVec m_minus, m_plus;
    std::vector<std::vector<AlgElt>> f;
};

std::vector<int> summand_vertices(const IntVec& m);
IntVec g_vector(const TwoTermComplex& x);
TwoTermComplex projective_complex(const Algebra& a, const IntVec& g);  // zero differential, g >= 0 or <= 0 per coordinate split
TwoTermComplex shifted_algebra(const Algebra& a);                      // Lambda -> 0

struct HomSpace {
    // coordinates: shift 0 concatenates the u^0 blocks then the u^{-1} blocks;
    // shift 1 is the space of maps X^{-1} -> Y^0.  Blocks run over
    // (plus/minus summand pairs) in row-major order, each contributing the
    // basis coordinates of its e_j L e_i.
    size_t space_dim = 0;  // dimension of the ambient coordinate space
    // columns: basis of chain maps.  For shift 1 every vector is a chain map
    // and the basis (the identity) is left empty.
    QMat chain_basis;
    QMat homotopy_sub;   // columns: spanning set of null-homotopic chain maps (zero columns dropped)
    size_t quotient_dim = 0;
};

HomSpace hom_complexes(const Algebra& a, const TwoTermComplex& x, const TwoTermComplex& y, int shift);
bool is_presilting(const Algebra& a, const TwoTermComplex& x);

TwoTermComplex random_complex(const Algebra& a, const IntVec& g, long long coeff_range, SplitRng& rng);

// min over sampled generic pairs of dim Hom(X_g, Sigma X_g'); the minimum is
// confirmed by at least two samples when trials allow
size_t e_invariant(const Algebra& a, const IntVec& g, const IntVec& gp, size_t trials, SplitRng& rng);

// cyl: U^{-1} (+) (H^{-1})^d -> U^0 (+) (H^0)^d, lower block triangular with a
// deterministic echelon basis f_1..f_d of Hom(U, Sigma H) in the corner;
// d = 0 returns U unchanged
TwoTermComplex cylinder(const Algebra& a, const TwoTermComplex& u, const TwoTermComplex& h);

struct Summand {
    TwoTermComplex cx;
    std::string status;  // "indecomposable" or "possibly-indecomposable"
    size_t end_dim = 0;       // dim End in the homotopy category
    size_t local_dim = 0;     // dim End / radical
};

// Krull-Schmidt splitting: strips contractible (P -> P) summands, then splits
// by Fitting decompositions of random endomorphisms over Q; leaves are
// certified local (End/rad one-dimensional) or flagged possibly-indecomposable
std::vector<Summand> decompose(const Algebra& a, const TwoTermComplex& x, SplitRng& rng, int budget = 12);

struct GenericSummand {
    IntVec g;
    int multiplicity = 0;
    std::string kind;  // "presilting", "band", or "unknown"
};

struct GenericDecomposition {
    bool stable = false;
    std::vector<GenericSummand> summands;       // when stable
    std::vector<std::string> observed;          // distinct sample outcomes, for diagnostics
};

GenericDecomposition generic_decomposition(const Algebra& a, const IntVec& g, size_t trials, long long coeff_range,
                                           SplitRng& rng);

}  // namespace gvfan
