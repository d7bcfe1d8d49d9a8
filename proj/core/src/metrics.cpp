#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "desirev/error.hpp"
#include "desirev/eval.hpp"

namespace desirev {

namespace {

ClassScores class_scores(std::span<const Desirability> gold, std::span<const Desirability> predicted,
                         Desirability cls) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool g = gold[i] == cls;
    const bool p = predicted[i] == cls;
    tp += g && p;
    fp += !g && p;
    fn += g && !p;
  }
  ClassScores s;
  s.support = tp + fn;
  s.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  s.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  s.f1 = s.precision + s.recall > 0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

}  // namespace

BinaryScores score(std::span<const Desirability> gold, std::span<const Desirability> predicted) {
  if (gold.size() != predicted.size()) {
    throw DataError("label vectors differ in length (" + std::to_string(gold.size()) + " vs " +
                    std::to_string(predicted.size()) + ")");
  }
  if (gold.empty()) throw DataError("cannot score empty label vectors");
  BinaryScores s;
  s.desirable = class_scores(gold, predicted, Desirability::desirable);
  s.undesirable = class_scores(gold, predicted, Desirability::undesirable);
  s.macro_precision = (s.desirable.precision + s.undesirable.precision) / 2.0;
  s.macro_recall = (s.desirable.recall + s.undesirable.recall) / 2.0;
  s.macro_f1 = (s.desirable.f1 + s.undesirable.f1) / 2.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) correct += gold[i] == predicted[i];
  s.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());
  return s;
}

double macro_f1(std::span<const Desirability> gold, std::span<const Desirability> predicted) {
  return score(gold, predicted).macro_f1;
}

PearsonResult pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("pearson_r: vectors differ in length");
  const std::size_t n = x.size();
  if (n < 3) throw DataError("pearson_r: need at least 3 observations, got " + std::to_string(n));
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw DataError("pearson_r: first variable has zero variance (all values equal)");
  if (syy == 0.0) throw DataError("pearson_r: second variable has zero variance (all values equal)");

  PearsonResult out;
  out.n = n;
  out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(n - 2);
  const double one_minus_r2 = 1.0 - out.r * out.r;
  if (one_minus_r2 <= 0.0) {
    out.p = 0.0;
  } else {
    const double t = std::abs(out.r) * std::sqrt(df / one_minus_r2);
    const boost::math::students_t dist(df);
    out.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
  }
  return out;
}

}  // namespace desirev
