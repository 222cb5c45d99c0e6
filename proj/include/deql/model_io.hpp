#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "deql/solvers.hpp"

namespace deql {

// Binary layout: "DEQLW001", n (u64 LE), n*n f64 LE row-major, UTF-8 JSON
// provenance trailer, trailer byte length (u64 LE).
inline constexpr char kModelMagic[8] = {'D', 'E', 'Q', 'L', 'W', '0', '0', '1'};

nlohmann::ordered_json provenance_to_json(const Provenance& p);
Provenance provenance_from_json(const nlohmann::json& j);

std::string encode_model(const WeightMatrix& model);
// Throws FormatError on a bad magic, truncated payload or inconsistent size.
WeightMatrix decode_model(const std::string& bytes);

void save_model(const std::filesystem::path& path, const WeightMatrix& model);
WeightMatrix load_model(const std::filesystem::path& path);

}  // namespace deql
