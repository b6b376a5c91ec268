#pragma once

#include <string>
#include <vector>

#include "gvfan/algebra.hpp"
#include "gvfan/geometry.hpp"
#include "gvfan/quiver.hpp"
#include "gvfan/scatter.hpp"
#include "gvfan/seeds.hpp"

namespace gvfan {

inline constexpr const char* kVersion = "1.0.0";

// throws std::runtime_error when the file cannot be read
std::string read_text_file(const std::string& path);
// writes to a sibling temp file, then renames over the target
void atomic_write_file(const std::string& path, const std::string& bytes);

// Quiver files.  Text: first line "n", then lines "i j w" meaning w arrows
// i->j, 0-indexed.  JSON: {"n": ..., "arrows": [[i,j,w], ...]}.  The two are
// told apart by the first non-space character.
ExchangeMatrix parse_quiver(const std::string& text);
ExchangeMatrix read_quiver_file(const std::string& path);
std::string quiver_to_json(const ExchangeMatrix& B);

// {"depth", "complete", "seeds": [{g_columns, b_mutable, c_matrix, trail}]}
std::string seedset_to_json(const SeedSet& s);
SeedSet parse_seedset(const std::string& text);

// {"ambient_dim", "maximal_cones": [[ray, ...], ...]}
std::string fan_to_json(const Fan& f);
Fan parse_fan(const std::string& text);
Fan read_fan_file(const std::string& path);

std::string coverage_to_json(const CoverageReport& r);

std::string class_report_to_json(const MutationClassReport& r);
MutationClassReport parse_class_report(const std::string& text);

// {"vertices", "arrows": [{name, source, target}], "relations":
//  [[{coefficient, path: [arrow names]}, ...], ...], "nilpotency_bound"}
// Coefficients are JSON integers or strings "p/q".
AlgebraPresentation parse_algebra(const std::string& text);
AlgebraPresentation read_algebra_file(const std::string& path);
std::string algebra_to_json(const AlgebraPresentation& p);

// {"m_minus", "m_plus", "blocks"}: blocks[r][c] lists the terms of the map
// from minus summand c into plus summand r as {coefficient, path}; an empty
// path means the unit at the summand's vertex.  blocks may be [] when either
// term vanishes.
std::string complex_to_json(const Algebra& a, const TwoTermComplex& x);
TwoTermComplex parse_complex(const Algebra& a, const std::string& text);
TwoTermComplex read_complex_file(const Algebra& a, const std::string& path);

std::string gdecomp_to_json(const GenericDecomposition& d);
std::string summands_to_json(const Algebra& a, const std::vector<Summand>& s);

// [{d0, support_rays, log_fn: [{d, num, den}]}]; empty support_rays means the
// whole hyperplane
std::string walls_to_json(const std::vector<Wall>& walls);

// A form file is a JSON square matrix [[...], ...], an object {"form": ...},
// or a quiver file (either quiver format); a quiver gives
// form[i][j] = #arrows j->i - #arrows i->j.
IntMat parse_form(const std::string& text);
IntMat read_form_file(const std::string& path);

IntVec parse_int_vector(const std::string& text);  // "a,b,..." -> IntVec

}  // namespace gvfan
