#include <cmath>
#include <fstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "desirev/bilstm.hpp"
#include "desirev/error.hpp"
#include "support.hpp"

using namespace desirev;
using desirev::testing::fixture;

namespace {

using Net = BiLstmClassifier<double>;

std::size_t closed_form_count(std::size_t D, std::size_t H, std::size_t K) {
  return 2 * 4 * (H * (D + H) + H) + (2 * H * K + K) + (K + 1);
}

// The closed-form pattern shared with the PyTorch reference script.
void fill_reference(Net& net, Net::Matrix& x, std::size_t T, std::size_t D) {
  auto& p = net.parameters();
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = 0.4 * std::sin(0.37 * static_cast<double>(i) + 0.11);
  x.resize(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(D));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 0.8 * std::sin(0.91 * static_cast<double>(i) + 0.5);
}

}  // namespace

TEST(BiLstm, ParameterCountMatchesPublishedFigure) {
  const BiLstmClassifier<float> net({768, 64, 64});
  EXPECT_EQ(net.parameter_count(), 434817u);
  EXPECT_EQ(net.parameter_count(), closed_form_count(768, 64, 64));
  EXPECT_EQ(net.parameter_count(), 2u * 4 * (64 * 832 + 64) + 8256 + 65);
}

TEST(BiLstm, ParameterCountClosedFormOnOtherShapes) {
  for (auto [D, H, K] : {std::tuple{4u, 2u, 3u}, std::tuple{10u, 7u, 5u}, std::tuple{1u, 1u, 1u}}) {
    EXPECT_EQ(Net({D, H, K}).parameter_count(), closed_form_count(D, H, K));
  }
  EXPECT_THROW(Net({0, 2, 2}), ConfigError);
}

TEST(BiLstm, MatchesPyTorchReference) {
  std::ifstream in(fixture("lstm_expected.json"));
  const auto ref = nlohmann::json::parse(in);
  const auto dims = ref["dims"].get<std::vector<std::size_t>>();
  Net net({dims[0], dims[1], dims[2]});
  ASSERT_EQ(net.parameter_count(), ref["parameter_count"].get<std::size_t>());
  Net::Matrix x;
  fill_reference(net, x, dims[3], dims[0]);
  EXPECT_NEAR(net.predict(x), ref["probability"].get<double>(), 1e-12);

  Net::Vector grad = Net::Vector::Zero(static_cast<Eigen::Index>(net.parameter_count()));
  const double loss = net.accumulate_gradient(x, 1, grad, nullptr);
  EXPECT_NEAR(loss, ref["loss_label_1"].get<double>(), 1e-12);
  const auto expected = ref["gradient_label_1"].get<std::vector<double>>();
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(grad[static_cast<Eigen::Index>(i)], expected[i], 1e-10) << "parameter " << i;
  }
}

TEST(BiLstm, GradientMatchesFiniteDifferences) {
  Net net({3, 4, 5});
  net.initialize(17);
  Rng rng(5);
  Net::Matrix x(7, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  for (int label : {0, 1}) {
    Net::Vector grad;
    net.accumulate_gradient(x, label, grad, nullptr);
    Net::Vector dummy;
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < net.parameters().size(); ++i) {
      Net probe = net;
      probe.parameters()[i] += h;
      const double up = probe.accumulate_gradient(x, label, dummy, nullptr);
      probe.parameters()[i] -= 2 * h;
      const double down = probe.accumulate_gradient(x, label, dummy, nullptr);
      const double numeric = (up - down) / (2 * h);
      EXPECT_NEAR(grad[i], numeric, 1e-6 + 1e-4 * std::abs(numeric)) << "parameter " << i << " label " << label;
    }
  }
}

TEST(BiLstm, GradientWithDropoutMatchesFiniteDifferencesUnderFixedMasks) {
  Net net({3, 2, 4}, {0.3, 0.3, 0.3});
  net.initialize(4);
  Rng data(1);
  Net::Matrix x(5, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = data.normal();
  // Same seed, same masks: the loss is then a fixed function of the weights.
  auto loss_at = [&](const Net& n, Net::Vector& g) {
    Rng rng(99);
    return n.accumulate_gradient(x, 1, g, &rng);
  };
  Net::Vector grad, dummy;
  loss_at(net, grad);
  for (Eigen::Index i = 0; i < net.parameters().size(); ++i) {
    Net probe = net;
    probe.parameters()[i] += 1e-6;
    const double up = loss_at(probe, dummy);
    probe.parameters()[i] -= 2e-6;
    const double down = loss_at(probe, dummy);
    EXPECT_NEAR(grad[i], (up - down) / 2e-6, 1e-6 + 1e-4 * std::abs(grad[i])) << "parameter " << i;
  }
}

TEST(BiLstm, InitializationFollowsKerasDefaults) {
  const std::size_t D = 6, H = 3, K = 4;
  Net net({D, H, K});
  net.initialize(8);
  const auto& p = net.parameters();
  const std::size_t block = 4 * H * D + 4 * H * H + 4 * H;
  for (std::size_t d = 0; d < 2; ++d) {
    const std::size_t wx = d * block, wh = wx + 4 * H * D, b = wh + 4 * H * H;
    const double limit = std::sqrt(6.0 / static_cast<double>(D + 4 * H));
    for (std::size_t i = 0; i < 4 * H * D; ++i) EXPECT_LE(std::abs(p[static_cast<Eigen::Index>(wx + i)]), limit);
    const Eigen::Map<const Eigen::MatrixXd> rec(p.data() + wh, 4 * H, H);
    EXPECT_TRUE((rec.transpose() * rec).isIdentity(1e-10));
    for (std::size_t j = 0; j < 4 * H; ++j) {
      EXPECT_EQ(p[static_cast<Eigen::Index>(b + j)], (j >= H && j < 2 * H) ? 1.0 : 0.0);
    }
  }
  Net again({D, H, K});
  again.initialize(8);
  EXPECT_EQ(again.parameters(), p);
}

TEST(BiLstm, RejectsMismatchedInput) {
  Net net({3, 2, 2});
  EXPECT_THROW((void)net.predict(Net::Matrix::Zero(4, 5)), TrainingError);
  EXPECT_THROW((void)net.predict(Net::Matrix::Zero(0, 3)), TrainingError);
}

TEST(Adam, FirstStepsMatchClosedForm) {
  AdamOptimizer<double> opt(1, 0.01, 0.9, 0.999, 1e-7);
  Eigen::VectorXd theta(1), g(1);
  theta << 1.0;
  double m = 0, v = 0, expected = 1.0;
  for (int t = 1; t <= 3; ++t) {
    const double grad = 0.5 * t;
    g << grad;
    opt.step(theta, g);
    m = 0.9 * m + 0.1 * grad;
    v = 0.999 * v + 0.001 * grad * grad;
    const double lr_t = 0.01 * std::sqrt(1 - std::pow(0.999, t)) / (1 - std::pow(0.9, t));
    expected -= lr_t * m / (std::sqrt(v) + 1e-7);
    EXPECT_NEAR(theta[0], expected, 1e-14);
  }
  EXPECT_EQ(opt.iterations(), 3u);
}
