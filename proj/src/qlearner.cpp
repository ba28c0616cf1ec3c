#include "ldmp/qlearner.hpp"

#include <algorithm>

namespace ldmp {

void EpsilonSchedule::validate() const {
  auto in_unit = [](double e) { return e >= 0.0 && e <= 1.0; };
  if (!in_unit(start) || !in_unit(end)) throw InputError("epsilon values must lie in [0, 1]");
  if (kind == Kind::LinearDecay && horizon < 1) throw InputError("epsilon decay horizon must be >= 1");
}

double epsilon_at(const EpsilonSchedule& schedule, long t) {
  if (schedule.kind == EpsilonSchedule::Kind::Constant) return schedule.start;
  const long clamped = std::clamp(t, 0L, schedule.horizon);
  const double frac = static_cast<double>(clamped) / static_cast<double>(schedule.horizon);
  return std::clamp(schedule.start + (schedule.end - schedule.start) * frac, 0.0, 1.0);
}

std::string_view to_string(InitScheme::Kind kind) {
  switch (kind) {
    case InitScheme::Kind::TwoRouteConstant: return "two-route";
    case InitScheme::Kind::AlignedMatrix: return "aligned";
    case InitScheme::Kind::MisalignedMatrix: return "misaligned";
    case InitScheme::Kind::UniformRandom: return "uniform";
    case InitScheme::Kind::NashBelief: return "nash";
  }
  return "?";
}

InitScheme parse_init(std::string_view name) {
  if (name == "two-route") return InitScheme::two_route();
  if (name == "aligned") return InitScheme::aligned();
  if (name == "misaligned") return InitScheme::misaligned();
  if (name == "uniform") return InitScheme::uniform();
  if (name == "nash") return InitScheme::nash();
  throw InputError("unknown init scheme '" + std::string(name) +
                   "' (expected two-route|aligned|misaligned|uniform|nash)");
}

QTensor init_qtensor(int n, int m, int k, const InitScheme& scheme, Rng& rng) {
  if (n < 1 || m < 1 || k < 1) throw InputError("q-tensor dimensions must be positive");

  QTable base(m, k);
  switch (scheme.kind) {
    case InitScheme::Kind::TwoRouteConstant:
      base.setConstant(-1.5);
      break;
    case InitScheme::Kind::NashBelief:
      base.setConstant(-2.0);
      break;
    case InitScheme::Kind::AlignedMatrix:
    case InitScheme::Kind::MisalignedMatrix: {
      if (m != 3 || k != 3) throw InputError("aligned/misaligned init requires m = k = 3");
      base.setConstant(-2.0);
      // aligned: row s prefers action s; misaligned: row s prefers s+1 (mod 3)
      const int shift = scheme.kind == InitScheme::Kind::AlignedMatrix ? 0 : 1;
      for (int s = 0; s < 3; ++s) base(s, (s + shift) % 3) = -1.5;
      break;
    }
    case InitScheme::Kind::UniformRandom: {
      if (!(scheme.lo <= scheme.hi)) throw InputError("uniform init needs lo <= hi");
      QTensor tensor(n, QTable(m, k));
      std::uniform_real_distribution<double> dist(scheme.lo, scheme.hi);
      for (auto& table : tensor) {
        for (Eigen::Index s = 0; s < m; ++s)
          for (Eigen::Index a = 0; a < k; ++a) table(s, a) = dist(rng);
      }
      return tensor;
    }
  }
  return QTensor(n, base);
}

}  // namespace ldmp
