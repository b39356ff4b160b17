#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "hotda/ingest.hpp"

namespace test_util {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("hotda_" + tag + "_" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Distance matrix from explicit 3-D coordinates, without rescaling.
inline hotda::DistanceMatrix euclidean(const std::vector<std::array<double, 3>>& pts, const std::string& id = "t") {
  const std::size_t n = pts.size();
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c) s += (pts[i][c] - pts[j][c]) * (pts[i][c] - pts[j][c]);
      w[i * n + j] = std::sqrt(s);
    }
  }
  return hotda::DistanceMatrix{id, n, std::move(w)};
}

/// Unit square with corners in cyclic order 0-1-2-3.
inline hotda::DistanceMatrix unit_square() {
  return euclidean({{{0, 0, 0}}, {{1, 0, 0}}, {{1, 1, 0}}, {{0, 1, 0}}}, "square");
}

/// Octahedron vertices (+-1 on each axis), scaled so that edges have length 1.
inline hotda::DistanceMatrix octahedron() {
  const double s = 1.0 / std::sqrt(2.0);
  return euclidean({{{s, 0, 0}}, {{-s, 0, 0}}, {{0, s, 0}}, {{0, -s, 0}}, {{0, 0, s}}, {{0, 0, -s}}}, "octa");
}

/// Random points in the unit cube; distances not rescaled, so all below 2.
inline hotda::DistanceMatrix random_cloud(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::array<double, 3>> pts(n);
  for (auto& p : pts) {
    for (double& c : p) c = u(gen);
  }
  return euclidean(pts, "cloud" + std::to_string(seed));
}

/// Planted-cycle cohort. Background nodes 4.. are uniform in [0, 2]^3 for every
/// subject. For label 0, nodes 0..3 form a slightly jittered unit square centered
/// at (6, 1, 1), far from the background; for label 1 they are ordinary
/// background nodes. Distances are divided by 4, so the square's side is 0.25 and
/// its diagonal 0.354: at eps = 0.3 the square is a hollow 4-cycle.
inline std::vector<hotda::CohortRecord> planted_cohort(std::size_t n_per_class, std::size_t n_nodes, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> cube(0.0, 2.0);
  std::uniform_real_distribution<double> jitter(-0.03, 0.03);
  const double square[4][2] = {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
  std::vector<hotda::CohortRecord> cohort;
  for (std::size_t s = 0; s < 2 * n_per_class; ++s) {
    const bool planted = s % 2 == 0;
    std::vector<std::array<double, 3>> pts(n_nodes);
    for (std::size_t v = 0; v < n_nodes; ++v) {
      if (planted && v < 4) {
        pts[v] = {6.0 + jitter(gen), 1.0 + square[v][0] + jitter(gen), 1.0 + square[v][1] + jitter(gen)};
      } else {
        pts[v] = {cube(gen), cube(gen), cube(gen)};
      }
    }
    auto d = euclidean(pts, "p" + std::to_string(s));
    for (double& w : d.w) w /= 4.0;
    cohort.push_back({d.subject_id, planted ? hotda::Label::Control : hotda::Label::Case, std::move(d)});
  }
  return cohort;
}

}  // namespace test_util
