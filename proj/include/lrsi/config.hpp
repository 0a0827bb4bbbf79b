#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "lrsi/surface.hpp"

namespace lrsi {

using json = nlohmann::json;

// Profile declaration, e.g. {"kind": "example1"} or
// {"kind": "spline_bumps", "bumps": [[amplitude, center, width], ...]}.
SurfaceProfile profile_from_json(const json& j);
json profile_to_json(const SurfaceProfile& p);

// 64-bit FNV-1a of the canonical (sorted-key, compact) JSON text, as 16 hex digits.
std::string config_hash(const json& j);

// Throws ConfigError naming the first key of `obj` not in `allowed`.
void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where);

}  // namespace lrsi
