#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fts {

// Repo-wide numerical tolerances.
// Structural tolerances guard invariants that should hold by construction
// (symmetry flags, Gram identities); arithmetic tolerances bound pure
// floating-point accumulation error.
inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kArithmeticTol = 1e-12;
inline constexpr double kEigResidualTol = 1e-8;
inline constexpr double kPsdClipTol = 1e-8;
inline constexpr double kRidgeFloor = 1e-12;
inline constexpr double kCorrRidge = 1e-10;

// Thrown on bad arguments / malformed inputs. CLI maps this to exit code 2.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on numerical degeneracy (repeated eigenvalues, zero variance,
// non-PSD correlation). CLI maps this to exit code 3.
class degeneracy_error : public std::runtime_error {
 public:
  explicit degeneracy_error(const std::string& what) : std::runtime_error(what) {}
};

// Dense row-major matrix, the only matrix type used in the project.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

}  // namespace fts
