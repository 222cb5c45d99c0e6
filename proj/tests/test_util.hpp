#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "deql/gram.hpp"
#include "deql/interactions.hpp"
#include "deql/synthetic.hpp"

namespace deql::testing {

// Dense R^T R by the naive triple loop; independent of the sparse kernels.
inline Matrix brute_force_gram(const InteractionMatrix& r) {
  const auto m = static_cast<Eigen::Index>(r.num_users());
  const auto n = static_cast<Eigen::Index>(r.num_items());
  Matrix dense = Matrix::Zero(m, n);
  for (const auto& [u, i] : r.entries()) dense(u, i) = 1.0;
  Matrix g = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = 0; l < n; ++l)
      for (Eigen::Index z = 0; z < m; ++z) g(k, l) += dense(z, k) * dense(z, l);
  return g;
}

inline GramBundle random_gram(std::size_t m, std::size_t n, double density, std::uint64_t seed) {
  return gram(random_interactions(m, n, density, seed));
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("deql_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace deql::testing
