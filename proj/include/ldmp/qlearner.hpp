#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ldmp/error.hpp"
#include "ldmp/rng.hpp"

namespace ldmp {

/// m x k value table: rows are recommendation states, columns actions.
template <typename Scalar>
using QTableT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using QTable = QTableT<double>;

/// One table per agent, all with the same (m, k).
template <typename Scalar>
using QTensorT = std::vector<QTableT<Scalar>>;
using QTensor = QTensorT<double>;

struct LearnerParams {
  double alpha = 0.1;
  double gamma = 0.0;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in (0, 1]");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw InputError("gamma must lie in [0, 1)");
  }
};

struct EpsilonSchedule {
  enum class Kind { Constant, LinearDecay };
  Kind kind = Kind::Constant;
  double start = 0.0;
  double end = 0.0;
  long horizon = 1;

  static EpsilonSchedule constant(double eps) { return {Kind::Constant, eps, eps, 1}; }
  static EpsilonSchedule linear(double start, double end, long horizon) {
    return {Kind::LinearDecay, start, end, horizon};
  }
  void validate() const;
};

/// Exploration rate at step t. LinearDecay interpolates start -> end over
/// [0, horizon]; t outside that range is clamped.
double epsilon_at(const EpsilonSchedule& schedule, long t);

struct InitScheme {
  enum class Kind { TwoRouteConstant, AlignedMatrix, MisalignedMatrix, UniformRandom, NashBelief };
  Kind kind = Kind::UniformRandom;
  double lo = -2.0;
  double hi = -1.5;

  static InitScheme two_route() { return {Kind::TwoRouteConstant, -1.5, -1.5}; }
  static InitScheme aligned() { return {Kind::AlignedMatrix, -2.0, -1.5}; }
  static InitScheme misaligned() { return {Kind::MisalignedMatrix, -2.0, -1.5}; }
  static InitScheme uniform(double lo = -2.0, double hi = -1.5) { return {Kind::UniformRandom, lo, hi}; }
  static InitScheme nash() { return {Kind::NashBelief, -2.0, -2.0}; }
};

std::string_view to_string(InitScheme::Kind kind);
InitScheme parse_init(std::string_view name);

/// Builds n tables of shape (m, k). Only UniformRandom consumes the rng.
QTensor init_qtensor(int n, int m, int k, const InitScheme& scheme, Rng& rng);

/// Lowest-index maximizer of row s.
template <typename Derived>
int greedy_action(const Eigen::MatrixBase<Derived>& table, Eigen::Index s) {
  if (s < 0 || s >= table.rows()) {
    throw InputError("state " + std::to_string(s) + " outside [0, " +
                     std::to_string(table.rows()) + ")");
  }
  int best = 0;
  for (Eigen::Index a = 1; a < table.cols(); ++a) {
    if (table(s, a) > table(s, best)) best = static_cast<int>(a);
  }
  return best;
}

/// epsilon-greedy on row s. Always consumes one uniform draw, plus one
/// integer draw when exploring, so the stream position depends only on
/// the outcome and not on the table contents.
template <typename Derived>
int select_action(const Eigen::MatrixBase<Derived>& table, Eigen::Index s, double epsilon, Rng& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(table.cols()) - 1);
    return pick(rng);
  }
  return greedy_action(table, s);
}

/// q[s,a] += alpha * (r + gamma * max_a' q[s_next,a'] - q[s,a]).
/// Returns the new q[s,a]; no other entry is touched.
template <typename Derived>
typename Derived::Scalar bellman_update(Eigen::MatrixBase<Derived>& table, Eigen::Index s,
                                        Eigen::Index a, typename Derived::Scalar reward,
                                        Eigen::Index s_next, const LearnerParams& params) {
  using Scalar = typename Derived::Scalar;
  const Scalar future = params.gamma == 0.0 ? Scalar(0) : Scalar(params.gamma) * table.row(s_next).maxCoeff();
  Scalar& q = table(s, a);
  q += Scalar(params.alpha) * (reward + future - q);
  return q;
}

}  // namespace ldmp
