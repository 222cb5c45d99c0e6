#include "deql/model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "deql/errors.hpp"
#include "deql/version.hpp"

namespace deql {
namespace {

void put_u64(std::string& out, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

std::uint64_t get_u64(const std::string& in, std::size_t pos) {
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + k])) << (8 * k);
  return v;
}

}  // namespace

nlohmann::ordered_json provenance_to_json(const Provenance& p) {
  nlohmann::ordered_json j;
  j["spec_version"] = kSpecVersion;
  j["variant"] = to_string(p.variant);
  j["a"] = p.a;
  j["b"] = p.b;
  j["p"] = p.p;
  j["lambda"] = p.lambda;
  if (p.rank_k) j["rank_k"] = *p.rank_k;
  j["solver"] = to_string(p.solver);
  j["fallback_columns"] = p.fallback_columns;
  return j;
}

Provenance provenance_from_json(const nlohmann::json& j) {
  Provenance p;
  try {
    p.variant = parse_variant(j.at("variant").get<std::string>());
    p.a = j.at("a").get<double>();
    p.b = j.at("b").get<double>();
    p.p = j.at("p").get<double>();
    p.lambda = j.at("lambda").get<double>();
    if (j.contains("rank_k")) p.rank_k = j.at("rank_k").get<std::size_t>();
    p.solver = parse_solver_kind(j.at("solver").get<std::string>());
    if (j.contains("fallback_columns"))
      p.fallback_columns = j.at("fallback_columns").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model provenance: ") + e.what());
  }
  return p;
}

std::string encode_model(const WeightMatrix& model) {
  const std::size_t n = model.n();
  std::string out(kModelMagic, sizeof kModelMagic);
  put_u64(out, n);
  out.reserve(out.size() + n * n * 8 + 256);
  for (Eigen::Index r = 0; r < model.w.rows(); ++r)
    for (Eigen::Index c = 0; c < model.w.cols(); ++c)
      put_u64(out, std::bit_cast<std::uint64_t>(model.w(r, c)));
  const std::string trailer = provenance_to_json(model.provenance).dump();
  out += trailer;
  put_u64(out, trailer.size());
  return out;
}

WeightMatrix decode_model(const std::string& bytes) {
  if (bytes.size() < 24 || std::memcmp(bytes.data(), kModelMagic, 8) != 0)
    throw FormatError("model file: bad magic");
  const std::uint64_t n = get_u64(bytes, 8);
  const std::uint64_t trailer_len = get_u64(bytes, bytes.size() - 8);
  if (n > (1ULL << 20)) throw FormatError("model file: implausible dimension");
  const std::uint64_t payload = n * n * 8;
  if (16 + payload + trailer_len + 8 != bytes.size())
    throw FormatError("model file: size does not match dimension and trailer length");

  WeightMatrix model;
  const auto dim = static_cast<Eigen::Index>(n);
  model.w.resize(dim, dim);
  std::size_t pos = 16;
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c, pos += 8)
      model.w(r, c) = std::bit_cast<double>(get_u64(bytes, pos));
  nlohmann::json trailer;
  try {
    trailer = nlohmann::json::parse(bytes.substr(pos, trailer_len));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model file: bad trailer: ") + e.what());
  }
  model.provenance = provenance_from_json(trailer);
  return model;
}

void save_model(const std::filesystem::path& path, const WeightMatrix& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const auto bytes = encode_model(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

WeightMatrix load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_model(bytes);
}

}  // namespace deql
