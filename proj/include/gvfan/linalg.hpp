#pragma once

#include <optional>
#include <vector>

#include "gvfan/rational.hpp"

namespace gvfan {

// Dense rational matrices, row-major.  Everything here is exact.
using QMat = std::vector<std::vector<Rat>>;
using QVec = std::vector<Rat>;

QMat qmat_zero(size_t rows, size_t cols);
QMat qmat_identity(size_t n);
QMat qmat_mul(const QMat& a, const QMat& b);
QVec qmat_apply(const QMat& a, const QVec& v);
QMat qmat_transpose(const QMat& a);

// In-place reduced row echelon form.  Returns rank; pivot column of row r is
// stored in pivots[r].
size_t rref(QMat& m, std::vector<size_t>* pivots = nullptr);

// Basis of the right nullspace {x : Ax = 0}, one vector per free column,
// deterministic given the column order.
std::vector<QVec> nullspace(QMat a);

// Solves Ax = b exactly; empty when inconsistent.
std::optional<QVec> solve(QMat a, QVec b);

std::optional<QMat> inverse(QMat a);

Rat determinant(QMat a);

// Characteristic polynomial coefficients c_0..c_n with
// det(tI - A) = sum c_i t^i (monic, c_n = 1).  Faddeev-LeVerrier.
QVec char_poly(const QMat& a);

// All rational roots of a polynomial with rational coefficients
// (c_0 + c_1 t + ...), each listed once.
std::vector<Rat> rational_roots(const QVec& coeffs);

}  // namespace gvfan
