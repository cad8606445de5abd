#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "attrdesc/attribute_model.hpp"
#include "attrdesc/fid.hpp"
#include "attrdesc/matrix.hpp"
#include "attrdesc/rng.hpp"
#include "attrdesc/schema_file.hpp"

namespace attrdesc::test {

inline std::filesystem::path profile_path(const std::string& name) {
  return std::filesystem::path(ATTRDESC_PROFILE_DIR) / name;
}

inline AttributeSchema vehiclex5() { return load_schema(profile_path("vehiclex5.schema")); }

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows * cols; ++i) m.data()[i] = rng.normal();
  return m;
}

/// A A^T + shift * I with A (d x d) standard normal; computed with plain loops.
inline Matrix random_psd(std::size_t d, Rng& rng, double shift = 0.0) {
  const Matrix a = random_matrix(d, d, rng);
  Matrix s(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += a(i, k) * a(j, k);
      s(i, j) = acc + (i == j ? shift : 0.0);
    }
  return s;
}

inline Matrix naive_multiply(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  return c;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("attrdesc_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Single linear attribute, convenient for small optimizer tests.
inline AttributeSchema linear_schema(double lo, double hi, std::vector<double> grid, double sigma = 0.0) {
  AttributeSchema s;
  AttributeDecl d;
  d.name = "x";
  d.kind = AttributeKind::linear;
  d.lo = lo;
  d.hi = hi;
  d.fixed_sigma = sigma;
  d.grid = std::move(grid);
  s.attributes.push_back(d);
  return s;
}

}  // namespace attrdesc::test
