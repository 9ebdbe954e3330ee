#pragma once

#include <string>
#include <vector>

#include "core/model.hpp"

namespace bdp {

// Binary checkpoint: magic + JSON header (version, kind, config, norm,
// split, tensor directory) + raw little-endian float64 payload. Round-trips
// bit-exactly.
std::vector<char> serialize_model(const Model& model);
Model deserialize_model(const std::vector<char>& bytes);

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace bdp
