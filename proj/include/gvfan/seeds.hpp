#pragma once

#include <string>
#include <vector>

#include "gvfan/quiver.hpp"

namespace gvfan {

// Seed of the principal extension: btilde stacks the mutable n x n exchange
// block on top of the frozen block (row n+j tracks arrows from the frozen
// copy j' of vertex j).  Column j of gmat is the g-vector g_j of the j-th
// cluster variable.
struct GSeed {
    int n = 0;
    IntMat btilde;  // 2n x n
    IntMat gmat;    // n x n
    IntMat b0;      // exchange block of the *initial* seed, constant along mutation
    std::vector<int> trail;
};

// btilde = [B; I], gmat = I, b0 = B
GSeed initial_seed(const ExchangeMatrix& B);

// Extended matrix mutation on btilde (frozen rows mutate, frozen columns do
// not exist) and the g-vector update
//   g'_k = -g_k + sum_i [b_ik]_+ g_i - sum_j [c_jk]_+ b0_col_j
// with b the current mutable block and c the current frozen block, both read
// before mutating.  The subtracted columns come from the initial exchange
// block: reading them from the current block breaks involutivity after two
// steps and contradicts both independent oracles (c-sign recurrence, Laurent
// expansion), so that reading is rejected.
GSeed mutate_seed(const GSeed& s, int k);

// frozen block as an n x n matrix; column i is the c-vector c_i
IntMat c_matrix(const GSeed& s);

// every c-column is entirely >= 0 or entirely <= 0
bool c_columns_sign_coherent(const GSeed& s);

// Independent route to the same G-matrix:
//   g'_k = -g_k + sum_i [eps * b_ik]_+ g_i
// with eps the common sign of the k-th c-column *after* mutation (equal to
// minus the sign before, since mutation negates that column).  Throws if the
// column is not sign-coherent.
IntMat mutate_gmat_by_csign(const GSeed& s, int k);

struct SeedSet {
    std::vector<GSeed> seeds;
    int depth = 0;        // requested BFS radius
    bool complete = false;  // frontier emptied before the radius ran out
};

// Dedup key: the unordered collection of (g-column, mutable-exchange-column)
// pairs; two seeds with equal keys define the same cluster.
std::string seed_key(const GSeed& s);

// BFS to the given radius, children by increasing vertex, first-found trail
// kept.  Stops early (complete=false) when max_seeds is reached.
SeedSet enumerate_seeds(const ExchangeMatrix& B, int depth, size_t max_seeds);

}  // namespace gvfan
