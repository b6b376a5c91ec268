#pragma once

#include <optional>
#include <string>

#include "gvfan/quiver.hpp"

namespace gvfan {

// Content-addressed key: hash of the quiver's canonical form (relabel
// invariant for n <= 10, raw matrix beyond), the label describing the
// computation and its budget, and the module version.  Any of these changing
// invalidates the entry.
std::string cache_key(const ExchangeMatrix& B, const std::string& label);

// nullopt when the directory is unset or has no entry for the key
std::optional<std::string> cache_load(const std::string& dir, const std::string& key);

// creates the directory if needed; write-then-rename
void cache_store(const std::string& dir, const std::string& key, const std::string& value);

}  // namespace gvfan
