#include "gossipsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gossipsim::analysis {

namespace {

constexpr double kEulersNumber = 2.718281828459045235360287471352662498;
constexpr int kMaxTtlSearch = 1000;

void require_fan_out_at_least_two(int fan_out) {
  if (fan_out < 2) {
    throw std::domain_error("fan_out must be at least 2 for this quantity");
  }
}

}  // namespace

void PushParams::validate() const {
  if (n < 2) throw std::domain_error("network size n must be at least 2");
  if (fan_out < 1) throw std::domain_error("fan_out must be at least 1");
  if (ttl < 0) throw std::domain_error("ttl must be nonnegative");
}

double phi(double x, const PushParams& params) {
  params.validate();
  if (x < 0.0) throw std::domain_error("phi: x must be nonnegative");
  const double n = params.n;
  return n * (1.0 - std::pow(1.0 - 1.0 / n, params.fan_out * x));
}

double psi(int r, const PushParams& params) {
  params.validate();
  if (r < 0) throw std::domain_error("psi: round must be nonnegative");
  double x = 1.0;
  for (int i = 0; i < r; ++i) x = phi(x, params);
  return x;
}

double lambert_w0(double x) {
  const double branch_point = -1.0 / kEulersNumber;
  if (x < branch_point) {
    // Tolerate rounding just below the branch point.
    if (x < branch_point - 1e-12 * std::max(1.0, std::fabs(x))) {
      throw std::domain_error("lambert_w0: argument below -1/e");
    }
    return -1.0;
  }
  if (x == 0.0) return 0.0;

  double w;
  if (x < 0.0) {
    // Series around the branch point, valid on [-1/e, 0).
    const double p = std::sqrt(std::max(0.0, 2.0 * (kEulersNumber * x + 1.0)));
    w = -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0;
  } else if (x > kEulersNumber) {
    const double lx = std::log(x);
    w = lx - std::log(lx);
  } else {
    w = std::log1p(x);
  }

  // Halley iteration on f(w) = w e^w - x.
  for (int i = 0; i < 100; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (std::fabs(f) <= 0.25e-12 * std::max(1.0, std::fabs(x))) break;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    w -= f / denom;
    if (w < -1.0) w = -1.0;  // stay on the principal branch
  }
  return w;
}

double carrying_capacity(int n, int fan_out) {
  PushParams{n, fan_out, 0}.validate();
  require_fan_out_at_least_two(fan_out);
  // Exact fixed point of phi. With c = -n*f*ln(1 - 1/n) the fixed-point
  // equation 1 - y = e^{-c y} solves to y = (c + W(-c e^{-c})) / c; using c
  // instead of the continuum approximation f keeps |phi(gamma) - gamma| at
  // machine precision for every n.
  const double c = -static_cast<double>(n) * fan_out * std::log1p(-1.0 / n);
  const double w = lambert_w0(-c * std::exp(-c));
  return n * (c + w) / c;
}

double logistic_bound(double t, int n, int fan_out) {
  PushParams{n, fan_out, 0}.validate();
  require_fan_out_at_least_two(fan_out);
  if (t < 0.0) throw std::domain_error("logistic_bound: t must be nonnegative");
  const double gamma = carrying_capacity(n, fan_out);
  // gamma * f^t / (gamma + f^t - 1), rearranged to stay finite for large t.
  return gamma / (1.0 + (gamma - 1.0) * std::pow(static_cast<double>(fan_out), -t));
}

double expected_digests(const PushParams& params) {
  params.validate();
  if (params.ttl < 1) throw std::domain_error("expected_digests: ttl must be at least 1");
  double x = 1.0;
  double sum = 0.0;
  for (int i = 0; i < params.ttl; ++i) {
    sum += x;
    x = phi(x, params);
  }
  return params.fan_out * sum;
}

double expected_digests_lower_bound(const PushParams& params) {
  params.validate();
  if (params.ttl < 1) throw std::domain_error("expected_digests_lower_bound: ttl must be at least 1");
  require_fan_out_at_least_two(params.fan_out);
  const double gamma = carrying_capacity(params.n, params.fan_out);
  const double f = params.fan_out;
  const double ratio = (gamma + std::pow(f, params.ttl - 1) - 1.0) / gamma;
  return gamma * f * std::log(ratio) / std::log(f);
}

namespace {

// Guaranteed digest-count lower bound: m_lb = f * sum_{t=0}^{ttl-1} X(t),
// with X(t) <= psi(t). Using it keeps the failure bound valid for the exact
// process; f^-t is tracked directly so large ttl stays finite.
double digest_count_lower_bound(int n, int fan_out, int ttl) {
  const double gamma = carrying_capacity(n, fan_out);
  const double inv_f = 1.0 / fan_out;
  double f_neg_t = 1.0;
  double sum = 0.0;
  for (int t = 0; t < ttl; ++t) {
    sum += gamma / (1.0 + (gamma - 1.0) * f_neg_t);
    f_neg_t *= inv_f;
  }
  return fan_out * sum;
}

double p_e_from_m(int n, double m) {
  const double log_bound = std::log(static_cast<double>(n)) + m * std::log1p(-1.0 / n);
  return std::min(1.0, std::exp(log_bound));
}

}  // namespace

double p_e_bound(const PushParams& params) {
  params.validate();
  if (params.ttl < 1) throw std::domain_error("p_e_bound: ttl must be at least 1");
  require_fan_out_at_least_two(params.fan_out);
  return p_e_from_m(params.n, digest_count_lower_bound(params.n, params.fan_out, params.ttl));
}

std::optional<int> min_ttl(int n, int fan_out, double p_e_target) {
  PushParams{n, fan_out, 1}.validate();
  require_fan_out_at_least_two(fan_out);
  if (!(p_e_target > 0.0 && p_e_target < 1.0)) {
    throw std::domain_error("min_ttl: p_e_target must lie in (0, 1)");
  }
  const double gamma = carrying_capacity(n, fan_out);
  const double inv_f = 1.0 / fan_out;
  double f_neg_t = 1.0;
  double sum = 0.0;
  for (int ttl = 1; ttl <= kMaxTtlSearch; ++ttl) {
    sum += gamma / (1.0 + (gamma - 1.0) * f_neg_t);
    f_neg_t *= inv_f;
    if (p_e_from_m(n, fan_out * sum) <= p_e_target) return ttl;
  }
  return std::nullopt;
}

AnalysisReport analyze(const PushParams& params) {
  params.validate();
  if (params.ttl < 1) throw std::domain_error("analyze: ttl must be at least 1");
  require_fan_out_at_least_two(params.fan_out);
  AnalysisReport report;
  report.gamma = carrying_capacity(params.n, params.fan_out);
  report.psi_trajectory.reserve(params.ttl + 1);
  double x = 1.0;
  for (int r = 0; r <= params.ttl; ++r) {
    report.psi_trajectory.push_back(x);
    x = phi(x, params);
  }
  report.expected_digests = expected_digests(params);
  report.p_e_bound = p_e_bound(params);
  return report;
}

TtlTable TtlTable::build(const std::vector<std::tuple<int, double, int>>& specs) {
  if (specs.empty()) throw std::domain_error("TtlTable: at least one entry required");
  TtlTable table;
  for (const auto& [n, p_e_target, fan_out] : specs) {
    const auto ttl = min_ttl(n, fan_out, p_e_target);
    if (!ttl) {
      throw std::domain_error("TtlTable: no ttl <= 1000 reaches the target for n=" +
                              std::to_string(n));
    }
    table.entries_.push_back({n, fan_out, p_e_target, *ttl});
  }
  std::sort(table.entries_.begin(), table.entries_.end(),
            [](const TtlTableEntry& a, const TtlTableEntry& b) { return a.n < b.n; });
  return table;
}

std::optional<TtlTableEntry> TtlTable::lookup(int n) const {
  for (const auto& entry : entries_) {
    if (entry.n >= n) return entry;
  }
  return std::nullopt;
}

}  // namespace gossipsim::analysis
