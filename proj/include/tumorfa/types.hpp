#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tumorfa {

/// Dense row-major matrix. Small on purpose: the model only needs element
/// access, row views and shape checks.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  T* row(std::size_t r) { return data_.data() + r * cols_; }
  const T* row(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<T>& raw() { return data_; }
  const std::vector<T>& raw() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using BinaryMatrix = Matrix<std::uint8_t>;
using RealMatrix = Matrix<double>;
using CountMatrix = Matrix<std::int64_t>;

/// Observed read counts: n(s,t) variant reads out of N(s,t) mapped reads
/// for SNV s in sample t.
struct CountData {
  CountMatrix n;
  CountMatrix N;
  std::vector<std::string> snv_ids;
  std::vector<std::string> sample_ids;

  std::size_t num_snvs() const { return n.rows(); }
  std::size_t num_samples() const { return n.cols(); }

  /// Throws std::invalid_argument unless S, T >= 1 and 0 <= n <= N.
  void validate() const;

  /// Builds a CountData with generated ids ("snv1", "sample1", ...).
  static CountData from_matrices(CountMatrix n, CountMatrix N);
};

/// Prior hyperparameters.
struct Hyperparams {
  double r = 0.2;      // Geometric prior on C, support {1,2,...}
  double alpha = 3.0;  // mass of the finite feature-allocation prior
  double a = 0.5;      // Gamma shape of haplotype abundances
  double a0 = 0.5;     // Gamma shape of the background abundance
  double a00 = 1.0;    // Beta prior on p0
  double b00 = 100.0;
  int c_max = 15;

  void validate() const;

  /// Values used for the simulation study.
  static Hyperparams simulation_preset();
  /// Values used for the pancreatic cancer analysis.
  static Hyperparams pdac_preset();
};

/// One point of the parameter space for a given number of haplotypes C.
/// theta column 0 is the background haplotype.
struct ModelState {
  int C = 1;
  BinaryMatrix Z;      // S x C
  RealMatrix theta;    // T x (C+1), strictly positive
  double p0 = 0.01;

  std::size_t num_snvs() const { return Z.rows(); }
  std::size_t num_samples() const { return theta.rows(); }

  void validate() const;
  bool operator==(const ModelState&) const = default;
};

/// Row-normalized abundances; row t lies on the (C+1)-simplex.
struct WeightMatrix {
  RealMatrix w;

  static WeightMatrix from_theta(const RealMatrix& theta);
  double operator()(std::size_t t, std::size_t c) const { return w(t, c); }
};

}  // namespace tumorfa
