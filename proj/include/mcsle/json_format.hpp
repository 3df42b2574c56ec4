#pragma once

#include <string>

#include <json.hpp>

namespace mcsle {

using Json = nlohmann::ordered_json;

/// Serializes with every floating-point number printed to 17 significant digits
/// (non-finite values become null). indent < 0 gives a single line.
std::string dump_json(const Json& j, int indent = 2);

}  // namespace mcsle
