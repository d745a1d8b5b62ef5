#pragma once

#include <Eigen/Dense>
#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <unistd.h>
#include <cmath>

#include "hardneg/rng.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("hardneg-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary | std::ios::trunc) << text;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Eigen::MatrixXd rows(std::initializer_list<std::initializer_list<double>> r) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline Eigen::MatrixXd random_matrix(hardneg::Rng& rng, Eigen::Index r, Eigen::Index c, double lo = -1.0,
                                     double hi = 1.0) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

inline Eigen::MatrixXd unit_rows(Eigen::MatrixXd m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i).normalize();
  return m;
}

inline void check_matrix(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want, double tol) {
  REQUIRE(got.rows() == want.rows());
  REQUIRE(got.cols() == want.cols());
  for (Eigen::Index i = 0; i < got.size(); ++i) {
    CHECK_MESSAGE(std::abs(got.data()[i] - want.data()[i]) <= tol, "entry ", i, ": ", got.data()[i], " vs ",
                  want.data()[i]);
  }
}

// |a - b| <= tol, reported with both values.
#define CHECK_NEAR(a, b, tol)                                                              \
  do {                                                                                     \
    const double check_near_a_ = (a), check_near_b_ = (b);                                 \
    CHECK_MESSAGE(std::abs(check_near_a_ - check_near_b_) <= (tol), #a " = ", check_near_a_, \
                  ", expected ", check_near_b_);                                           \
  } while (0)

}  // namespace testing
