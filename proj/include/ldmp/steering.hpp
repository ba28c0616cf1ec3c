#pragma once

// Reachability under argmax policies.
//
// For one agent with an m x k table, the reachable set is the set of
// actions that some recommendation makes greedy. Appending a row (Ext)
// can only grow that set, and if each new row's argmax has full support
// over the k actions, repeated extension reaches every action with
// probability -> 1. The joint reachable set of n agents is the product
// of the per-agent sets, so the steering potential |R(TQ)| / k^n is
// computed as a product in log space.
//
// The recommender's decision space grows as m^n and the space of
// q-tensors as C^(nmk); nothing here enumerates either.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldmp/action_set.hpp"
#include "ldmp/qlearner.hpp"

namespace ldmp {

/// Union over rows of each row's lowest-index argmax.
template <typename Derived>
ActionSet reachable_set(const Eigen::MatrixBase<Derived>& table) {
  if (table.rows() < 1) throw InputError("reachable set of a table with no rows");
  ActionSet out;
  for (Eigen::Index s = 0; s < table.rows(); ++s) out.insert(greedy_action(table, s));
  return out;
}

/// Appends v as row m. The first m rows are copied unchanged.
template <typename Derived, typename VDerived>
QTableT<typename Derived::Scalar> ext(const Eigen::MatrixBase<Derived>& table,
                                      const Eigen::MatrixBase<VDerived>& v) {
  if (v.size() != table.cols()) {
    throw InputError("ext: row length " + std::to_string(v.size()) + " != k=" +
                     std::to_string(table.cols()));
  }
  QTableT<typename Derived::Scalar> out(table.rows() + 1, table.cols());
  out.topRows(table.rows()) = table;
  for (Eigen::Index a = 0; a < table.cols(); ++a) out(table.rows(), a) = v(a);
  return out;
}

/// |R(TQ)| / |A^n| = prod_i |R(Q_i)| / k.
template <typename Scalar>
double steering_potential(const QTensorT<Scalar>& tensor) {
  if (tensor.empty()) throw InputError("steering potential of an empty tensor");
  const double log_k = std::log(static_cast<double>(tensor.front().cols()));
  double log_ratio = 0.0;
  for (const auto& table : tensor) log_ratio += std::log(static_cast<double>(reachable_set(table).size())) - log_k;
  return std::exp(log_ratio);
}

/// |R(TQ)| = prod_i |R(Q_i)| as an exact integer. Throws InputError when
/// the product does not fit in 64 bits.
template <typename Scalar>
std::uint64_t reachable_profile_count(const QTensorT<Scalar>& tensor) {
  std::uint64_t count = 1;
  for (const auto& table : tensor) {
    const auto size = static_cast<std::uint64_t>(reachable_set(table).size());
    if (__builtin_mul_overflow(count, size, &count)) throw InputError("reachable profile count overflows");
  }
  return count;
}

/// R(Q) is a subset of R(Ext(Q, v)). Always true; exposed for property checks.
template <typename Derived, typename VDerived>
bool check_theorem1(const Eigen::MatrixBase<Derived>& table, const Eigen::MatrixBase<VDerived>& v) {
  return reachable_set(table).subset_of(reachable_set(ext(table, v)));
}

/// Draws one candidate row of length k.
using RowSampler = std::function<Eigen::VectorXd(Rng&)>;

struct CoverageCurve {
  int k = 0;
  long trials = 0;
  /// coverage[m-1]: fraction of trials whose first m rows reach all k actions.
  std::vector<double> coverage;
  /// Empirical P(argmax v = a) over every sampled row.
  std::vector<double> argmax_frequency;
  /// False when some action was never an argmax: the full-support
  /// precondition looks violated and the curve need not approach 1.
  bool full_support = true;
};

/// Monte-Carlo reachability curve. Each trial starts from one sampled row
/// (m = 1) and extends up to m_max rows. Trial t uses its own stream
/// derived from (seed, t), so results do not depend on execution order.
CoverageCurve check_theorem2(int k, const RowSampler& sampler, int m_max, long trials,
                             std::uint64_t seed);

/// i.i.d. U(0, 1) entries; satisfies full support.
RowSampler uniform_row_sampler(int k);

}  // namespace ldmp
