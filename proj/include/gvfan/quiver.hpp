#pragma once

#include <array>
#include <string>
#include <vector>

#include "gvfan/rational.hpp"

namespace gvfan {

// Quiver without loops or 2-cycles, encoded by its skew-symmetric exchange
// matrix: b[i][j] = #arrows i->j - #arrows j->i.
struct ExchangeMatrix {
    int n = 0;
    IntMat b;

    bool operator==(const ExchangeMatrix& o) const { return n == o.n && b == o.b; }
};

ExchangeMatrix make_exchange(int n);
ExchangeMatrix exchange_from_arrows(int n, const std::vector<std::array<long long, 3>>& arrows);
bool is_skew_symmetric(const ExchangeMatrix& m);
void check_exchange(const ExchangeMatrix& m);  // throws std::invalid_argument

ExchangeMatrix mutate_quiver(const ExchangeMatrix& m, int k);
ExchangeMatrix opposite(const ExchangeMatrix& m);
ExchangeMatrix permute(const ExchangeMatrix& m, const std::vector<int>& perm);  // entry (i,j) <- b[perm[i]][perm[j]]

// Minimal matrix over all simultaneous row/column permutations, comparing
// entries in the order they get fixed while the permutation is extended one
// vertex at a time (staircase order).  Exhaustive with pruning; n <= 10 only.
ExchangeMatrix canonical_form(const ExchangeMatrix& m);
bool quivers_isomorphic(const ExchangeMatrix& a, const ExchangeMatrix& b);

std::string matrix_key(const ExchangeMatrix& m);

enum class ClassVerdict { finite, infinite, budget_exhausted };

struct MutationClassReport {
    ClassVerdict verdict = ClassVerdict::budget_exhausted;
    size_t class_size = 0;  // meaningful when finite
    size_t explored = 0;
    std::vector<int> witness;       // mutation trail to a matrix hitting the weight rule
    ExchangeMatrix witness_matrix;  // that matrix, when verdict == infinite
    bool exact_up_to_iso = true;    // false when n > 10 (hash-keyed dedup)
    std::vector<ExchangeMatrix> members;
};

// BFS over canonical forms, children by increasing vertex index.  For n >= 3
// any visited entry with |b[i][j]| >= 3 yields an immediate "infinite"
// verdict; n <= 2 classes are always finite.
MutationClassReport mutation_class(const ExchangeMatrix& m, size_t max_nodes, bool keep_members = false);

// kronecker(m) | exceptional(NAME) | mutation-infinite | surface-or-unknown |
// budget-exhausted
std::string classify(const ExchangeMatrix& m, size_t max_nodes);

ExchangeMatrix kronecker_quiver(long long m);
ExchangeMatrix markov_quiver();
ExchangeMatrix path_quiver(int n);  // linear A_n orientation 0->1->...->n-1
ExchangeMatrix cycle_quiver(int n);

std::vector<std::string> exceptional_names();  // E6..E8, E6~..E8~, E6_11.., X6, X7
ExchangeMatrix named_quiver(const std::string& name);

}  // namespace gvfan
