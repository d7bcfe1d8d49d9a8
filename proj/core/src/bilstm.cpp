#include "desirev/bilstm.hpp"

#include <cmath>

#include <Eigen/QR>

#include "desirev/error.hpp"

namespace desirev {

namespace {

template <typename T>
T sigmoid(T x) {
  return x >= T(0) ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
}

// -log(sigmoid(z)) computed without overflow.
template <typename T>
T softplus_neg(T z) {
  return z > T(0) ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

}  // namespace

template <typename T>
struct BiLstmClassifier<T>::DirectionTrace {
  Matrix gates;    // 4H x T, post-activation, processing order
  Matrix cells;    // H x (T + 1), column 0 is the zero initial state
  Matrix hiddens;  // H x (T + 1)
  Matrix tanh_c;   // H x T
  Matrix input_masks;      // D x 4 (empty without dropout)
  Matrix recurrent_masks;  // H x 4
};

template <typename T>
struct BiLstmClassifier<T>::ForwardTrace {
  DirectionTrace dir[2];
  Vector pooled;
  std::vector<Eigen::Index> argmax;  // processing step per pooled feature
  Vector dense_pre;
  Vector dense_mask;
  Vector dense_out;
  T logit = T(0);
};

template <typename T>
BiLstmClassifier<T>::BiLstmClassifier(NetworkDims dims, DropoutRates dropout) : dims_(dims), dropout_(dropout) {
  if (dims.input == 0 || dims.hidden == 0 || dims.dense == 0) throw ConfigError("network dimensions must be positive");
  const std::size_t D = dims.input, H = dims.hidden, K = dims.dense;
  std::size_t off = 0;
  for (int d = 0; d < 2; ++d) {
    layout_.wx[d] = off;
    off += 4 * H * D;
    layout_.wh[d] = off;
    off += 4 * H * H;
    layout_.b[d] = off;
    off += 4 * H;
  }
  layout_.w1 = off;
  off += K * 2 * H;
  layout_.b1 = off;
  off += K;
  layout_.w2 = off;
  off += K;
  layout_.b2 = off;
  off += 1;
  layout_.total = off;
  params_ = Vector::Zero(static_cast<Eigen::Index>(off));
}

template <typename T>
Eigen::Map<const typename BiLstmClassifier<T>::Matrix> BiLstmClassifier<T>::view(std::size_t offset, std::size_t rows,
                                                                               std::size_t cols) const {
  return Eigen::Map<const Matrix>(params_.data() + offset, static_cast<Eigen::Index>(rows),
                                  static_cast<Eigen::Index>(cols));
}

template <typename T>
void BiLstmClassifier<T>::initialize(std::uint64_t seed) {
  Rng rng(seed);
  const auto D = static_cast<Eigen::Index>(dims_.input);
  const auto H = static_cast<Eigen::Index>(dims_.hidden);
  const auto K = static_cast<Eigen::Index>(dims_.dense);
  auto glorot = [&](std::size_t offset, Eigen::Index fan_in, Eigen::Index fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (Eigen::Index i = 0; i < fan_in * fan_out; ++i) params_[static_cast<Eigen::Index>(offset) + i] = T(rng.uniform(-limit, limit));
  };
  params_.setZero();
  for (int d = 0; d < 2; ++d) {
    glorot(layout_.wx[d], D, 4 * H);
    Eigen::MatrixXd a(4 * H, H);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(4 * H, H);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(H).template triangularView<Eigen::Upper>();
    for (Eigen::Index c = 0; c < H; ++c) {
      if (r(c, c) < 0) q.col(c) *= -1.0;
    }
    Eigen::Map<Matrix>(params_.data() + layout_.wh[d], 4 * H, H) = q.cast<T>();
    // Forget-gate bias starts at one.
    params_.segment(static_cast<Eigen::Index>(layout_.b[d]) + H, H).setOnes();
  }
  glorot(layout_.w1, 2 * H, K);
  glorot(layout_.w2, K, 1);
}

template <typename T>
void BiLstmClassifier<T>::run_direction(int dir, const Matrix& x, const Matrix* input_masks,
                                        const Matrix* recurrent_masks, DirectionTrace& tr) const {
  const auto D = static_cast<Eigen::Index>(dims_.input);
  const auto H = static_cast<Eigen::Index>(dims_.hidden);
  const Eigen::Index steps = x.rows();
  const auto Wx = view(layout_.wx[dir], 4 * dims_.hidden, dims_.input);
  const auto Wh = view(layout_.wh[dir], 4 * dims_.hidden, dims_.hidden);
  const auto b = view(layout_.b[dir], 4 * dims_.hidden, 1);

  Matrix proj(4 * H, steps);
  if (input_masks) {
    for (int g = 0; g < 4; ++g) {
      const Matrix masked = Wx.middleRows(g * H, H).array().rowwise() * input_masks->col(g).transpose().array();
      proj.middleRows(g * H, H).noalias() = masked * x.transpose();
    }
  } else {
    proj.noalias() = Wx * x.transpose();
  }
  proj.colwise() += b.col(0);

  tr.gates.resize(4 * H, steps);
  tr.cells = Matrix::Zero(H, steps + 1);
  tr.hiddens = Matrix::Zero(H, steps + 1);
  tr.tanh_c.resize(H, steps);
  Vector pre(4 * H);
  for (Eigen::Index s = 0; s < steps; ++s) {
    const Eigen::Index t = dir == 0 ? s : steps - 1 - s;
    if (recurrent_masks) {
      for (int g = 0; g < 4; ++g) {
        pre.segment(g * H, H).noalias() =
            proj.col(t).segment(g * H, H) +
            Wh.middleRows(g * H, H) * (tr.hiddens.col(s).array() * recurrent_masks->col(g).array()).matrix();
      }
    } else {
      pre.noalias() = proj.col(t) + Wh * tr.hiddens.col(s);
    }
    auto gates = tr.gates.col(s);
    for (Eigen::Index j = 0; j < H; ++j) {
      gates[j] = sigmoid(pre[j]);
      gates[H + j] = sigmoid(pre[H + j]);
      gates[2 * H + j] = std::tanh(pre[2 * H + j]);
      gates[3 * H + j] = sigmoid(pre[3 * H + j]);
    }
    tr.cells.col(s + 1) = gates.segment(H, H).cwiseProduct(tr.cells.col(s)) +
                          gates.segment(0, H).cwiseProduct(gates.segment(2 * H, H));
    tr.tanh_c.col(s) = tr.cells.col(s + 1).array().tanh().matrix();
    tr.hiddens.col(s + 1) = gates.segment(3 * H, H).cwiseProduct(tr.tanh_c.col(s));
  }
  (void)D;
}

template <typename T>
T BiLstmClassifier<T>::forward(const Matrix& x, Rng* rng, ForwardTrace& tr) const {
  if (x.rows() < 1) throw TrainingError("empty input sequence");
  if (static_cast<std::size_t>(x.cols()) != dims_.input) {
    throw TrainingError("input dimension " + std::to_string(x.cols()) + " does not match the model's " +
                        std::to_string(dims_.input));
  }
  const auto D = static_cast<Eigen::Index>(dims_.input);
  const auto H = static_cast<Eigen::Index>(dims_.hidden);
  const auto K = static_cast<Eigen::Index>(dims_.dense);
  const Eigen::Index steps = x.rows();

  auto make_mask = [&](Eigen::Index rows, double rate) {
    Matrix m(rows, 4);
    const T keep_scale = T(1.0 / (1.0 - rate));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng->uniform() < rate ? T(0) : keep_scale;
    return m;
  };
  for (int d = 0; d < 2; ++d) {
    auto& dt = tr.dir[d];
    const bool in_drop = rng && dropout_.input > 0;
    const bool rec_drop = rng && dropout_.recurrent > 0;
    dt.input_masks = in_drop ? make_mask(D, dropout_.input) : Matrix();
    dt.recurrent_masks = rec_drop ? make_mask(H, dropout_.recurrent) : Matrix();
    run_direction(d, x, in_drop ? &dt.input_masks : nullptr, rec_drop ? &dt.recurrent_masks : nullptr, dt);
  }

  tr.pooled.resize(2 * H);
  tr.argmax.assign(static_cast<std::size_t>(2 * H), 0);
  for (int d = 0; d < 2; ++d) {
    const auto& hs = tr.dir[d].hiddens;
    for (Eigen::Index j = 0; j < H; ++j) {
      Eigen::Index best = 0;
      T value = hs(j, 1);
      for (Eigen::Index s = 1; s < steps; ++s) {
        if (hs(j, s + 1) > value) {
          value = hs(j, s + 1);
          best = s;
        }
      }
      tr.pooled[d * H + j] = value;
      tr.argmax[static_cast<std::size_t>(d * H + j)] = best;
    }
  }

  const auto W1 = view(layout_.w1, dims_.dense, 2 * dims_.hidden);
  const auto b1 = view(layout_.b1, dims_.dense, 1);
  const auto w2 = view(layout_.w2, dims_.dense, 1);
  const T b2 = params_[static_cast<Eigen::Index>(layout_.b2)];
  tr.dense_pre = W1 * tr.pooled + b1.col(0);
  tr.dense_mask = Vector::Ones(K);
  if (rng && dropout_.dense > 0) {
    const T keep_scale = T(1.0 / (1.0 - dropout_.dense));
    for (Eigen::Index k = 0; k < K; ++k) tr.dense_mask[k] = rng->uniform() < dropout_.dense ? T(0) : keep_scale;
  }
  tr.dense_out = tr.dense_pre.cwiseMax(T(0)).cwiseProduct(tr.dense_mask);
  tr.logit = w2.col(0).dot(tr.dense_out) + b2;
  return sigmoid(tr.logit);
}

template <typename T>
T BiLstmClassifier<T>::predict(const Matrix& sequence) const {
  ForwardTrace tr;
  return forward(sequence, nullptr, tr);
}

template <typename T>
T BiLstmClassifier<T>::accumulate_gradient(const Matrix& x, int label, Vector& gradient, Rng* rng, T weight) const {
  if (gradient.size() != params_.size()) gradient = Vector::Zero(params_.size());
  ForwardTrace tr;
  const T p = forward(x, rng, tr);
  const T y = label ? T(1) : T(0);
  const T loss = y > T(0) ? softplus_neg(tr.logit) : softplus_neg(-tr.logit);

  const auto H = static_cast<Eigen::Index>(dims_.hidden);
  const auto D = static_cast<Eigen::Index>(dims_.input);
  const auto K = static_cast<Eigen::Index>(dims_.dense);
  const Eigen::Index steps = x.rows();
  auto grad_view = [&](std::size_t offset, Eigen::Index rows, Eigen::Index cols) {
    return Eigen::Map<Matrix>(gradient.data() + offset, rows, cols);
  };

  const T dlogit = weight * (p - y);
  const auto w2 = view(layout_.w2, dims_.dense, 1);
  const auto W1 = view(layout_.w1, dims_.dense, 2 * dims_.hidden);
  grad_view(layout_.w2, K, 1).col(0) += dlogit * tr.dense_out;
  gradient[static_cast<Eigen::Index>(layout_.b2)] += dlogit;
  Vector dz1 = (dlogit * w2.col(0)).cwiseProduct(tr.dense_mask);
  for (Eigen::Index k = 0; k < K; ++k) {
    if (tr.dense_pre[k] <= T(0)) dz1[k] = T(0);
  }
  grad_view(layout_.w1, K, 2 * H).noalias() += dz1 * tr.pooled.transpose();
  grad_view(layout_.b1, K, 1).col(0) += dz1;
  const Vector dpooled = W1.transpose() * dz1;

  for (int d = 0; d < 2; ++d) {
    const auto& dt = tr.dir[d];
    const bool in_drop = dt.input_masks.size() > 0;
    const bool rec_drop = dt.recurrent_masks.size() > 0;
    const auto Wh = view(layout_.wh[d], 4 * dims_.hidden, dims_.hidden);

    Matrix dh_out = Matrix::Zero(H, steps);
    for (Eigen::Index j = 0; j < H; ++j) dh_out(j, tr.argmax[static_cast<std::size_t>(d * H + j)]) = dpooled[d * H + j];

    Matrix dA(4 * H, steps);
    Vector dh_next = Vector::Zero(H);
    Vector dc_next = Vector::Zero(H);
    for (Eigen::Index s = steps - 1; s >= 0; --s) {
      const auto gates = dt.gates.col(s);
      const auto i = gates.segment(0, H).array();
      const auto f = gates.segment(H, H).array();
      const auto g = gates.segment(2 * H, H).array();
      const auto o = gates.segment(3 * H, H).array();
      const auto tc = dt.tanh_c.col(s).array();
      const Eigen::Array<T, Eigen::Dynamic, 1> dh = dh_out.col(s).array() + dh_next.array();
      const Eigen::Array<T, Eigen::Dynamic, 1> dc = dh * o * (T(1) - tc.square()) + dc_next.array();
      dA.col(s).segment(0, H) = (dc * g * i * (T(1) - i)).matrix();
      dA.col(s).segment(H, H) = (dc * dt.cells.col(s).array() * f * (T(1) - f)).matrix();
      dA.col(s).segment(2 * H, H) = (dc * i * (T(1) - g.square())).matrix();
      dA.col(s).segment(3 * H, H) = (dh * tc * o * (T(1) - o)).matrix();
      dc_next = (dc * f).matrix();
      if (rec_drop) {
        dh_next.setZero();
        for (int q = 0; q < 4; ++q) {
          dh_next += (Wh.middleRows(q * H, H).transpose() * dA.col(s).segment(q * H, H))
                         .cwiseProduct(dt.recurrent_masks.col(q));
        }
      } else {
        dh_next.noalias() = Wh.transpose() * dA.col(s);
      }
    }

    // Inputs and previous hidden states in processing order.
    Matrix xs(steps, D);
    for (Eigen::Index s = 0; s < steps; ++s) xs.row(s) = x.row(d == 0 ? s : steps - 1 - s);
    const auto h_prev = dt.hiddens.leftCols(steps);

    auto gWx = grad_view(layout_.wx[d], 4 * H, D);
    auto gWh = grad_view(layout_.wh[d], 4 * H, H);
    if (in_drop) {
      for (int q = 0; q < 4; ++q) {
        const Matrix block = dA.middleRows(q * H, H) * xs;
        gWx.middleRows(q * H, H).array() += block.array().rowwise() * dt.input_masks.col(q).transpose().array();
      }
    } else {
      gWx.noalias() += dA * xs;
    }
    if (rec_drop) {
      for (int q = 0; q < 4; ++q) {
        const Matrix masked = h_prev.array().colwise() * dt.recurrent_masks.col(q).array();
        gWh.middleRows(q * H, H).noalias() += dA.middleRows(q * H, H) * masked.transpose();
      }
    } else {
      gWh.noalias() += dA * h_prev.transpose();
    }
    grad_view(layout_.b[d], 4 * H, 1).col(0) += dA.rowwise().sum();
  }
  return weight * loss;
}

template <typename T>
AdamOptimizer<T>::AdamOptimizer(std::size_t size, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      m_(Vector::Zero(static_cast<Eigen::Index>(size))),
      v_(Vector::Zero(static_cast<Eigen::Index>(size))) {}

template <typename T>
void AdamOptimizer<T>::step(Vector& params, const Vector& gradient) {
  ++t_;
  const double td = static_cast<double>(t_);
  const T step = T(lr_ * std::sqrt(1.0 - std::pow(beta2_, td)) / (1.0 - std::pow(beta1_, td)));
  m_ = T(beta1_) * m_ + T(1.0 - beta1_) * gradient;
  v_ = T(beta2_) * v_ + T(1.0 - beta2_) * gradient.cwiseAbs2();
  params.array() -= step * m_.array() / (v_.array().sqrt() + T(eps_));
}

template class BiLstmClassifier<float>;
template class BiLstmClassifier<double>;
template class AdamOptimizer<float>;
template class AdamOptimizer<double>;

}  // namespace desirev
