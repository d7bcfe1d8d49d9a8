#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "desirev/random.hpp"

namespace desirev {

struct NetworkDims {
  std::size_t input = 768;
  std::size_t hidden = 64;  ///< LSTM units per direction
  std::size_t dense = 64;
};

struct DropoutRates {
  double input = 0.1;      ///< LSTM input dropout
  double recurrent = 0.1;  ///< LSTM recurrent-state dropout
  double dense = 0.2;      ///< after the ReLU dense layer
};

/// Bidirectional LSTM over a (time x input) sequence, global max over time,
/// dense ReLU layer, dropout and a single sigmoid output unit.
///
/// All parameters live in one flat vector so optimizers and serialization
/// see a single buffer. Gate order inside each LSTM block is input, forget,
/// cell, output.
template <typename T>
class BiLstmClassifier {
 public:
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  explicit BiLstmClassifier(NetworkDims dims = {}, DropoutRates dropout = {});

  /// Glorot-uniform kernels, orthogonal recurrent kernels, zero biases with
  /// forget-gate bias 1.
  void initialize(std::uint64_t seed);

  [[nodiscard]] const NetworkDims& dims() const { return dims_; }
  [[nodiscard]] const DropoutRates& dropout() const { return dropout_; }
  [[nodiscard]] std::size_t parameter_count() const { return static_cast<std::size_t>(params_.size()); }
  [[nodiscard]] Vector& parameters() { return params_; }
  [[nodiscard]] const Vector& parameters() const { return params_; }

  /// Sigmoid output for one sequence, dropout disabled.
  [[nodiscard]] T predict(const Matrix& sequence) const;

  /// Binary cross-entropy for one example; adds d(loss)/d(params) scaled by
  /// `weight` into `gradient`. A null `rng` disables dropout.
  T accumulate_gradient(const Matrix& sequence, int label, Vector& gradient, Rng* rng, T weight = T(1)) const;

 private:
  struct Layout {
    std::size_t wx[2], wh[2], b[2];
    std::size_t w1, b1, w2, b2, total;
  };
  struct DirectionTrace;
  struct ForwardTrace;

  [[nodiscard]] Eigen::Map<const Matrix> view(std::size_t offset, std::size_t rows, std::size_t cols) const;
  void run_direction(int dir, const Matrix& x, const Matrix* input_masks, const Matrix* recurrent_masks,
                     DirectionTrace& trace) const;
  T forward(const Matrix& sequence, Rng* rng, ForwardTrace& trace) const;

  NetworkDims dims_;
  DropoutRates dropout_;
  Layout layout_{};
  Vector params_;
};

extern template class BiLstmClassifier<float>;
extern template class BiLstmClassifier<double>;

/// Adam with bias correction folded into the step size.
template <typename T>
class AdamOptimizer {
 public:
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  AdamOptimizer(std::size_t size, double learning_rate = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-7);

  void step(Vector& params, const Vector& gradient);
  [[nodiscard]] std::uint64_t iterations() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  Vector m_, v_;
  std::uint64_t t_ = 0;
};

extern template class AdamOptimizer<float>;
extern template class AdamOptimizer<double>;

}  // namespace desirev
