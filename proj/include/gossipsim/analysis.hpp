#pragma once

#include <optional>
#include <tuple>
#include <vector>

namespace gossipsim::analysis {

// Parameters of the counter-bounded push phase.
struct PushParams {
  int n = 100;       // network size, including the leader
  int fan_out = 4;   // peers targeted per forwarding action
  int ttl = 9;       // counter cap

  void validate() const;  // throws std::domain_error
};

// phi(x) = n * (1 - (1 - 1/n)^(fan_out * x)); expected newly-contacted peers
// when x peers each forward to fan_out targets.
double phi(double x, const PushParams& params);

// psi(0) = 1, psi(r + 1) = phi(psi(r)); expected informed population per round.
double psi(int r, const PushParams& params);

// Principal branch of the Lambert W function, w * e^w = x for x >= -1/e.
double lambert_w0(double x);

// Fixed point of phi and the limit of psi, via the principal Lambert-W
// branch: gamma = n (c + W(-c e^{-c})) / c with c = -n fan_out ln(1 - 1/n).
// Requires fan_out >= 2 (for fan_out = 1 the argument degenerates to the
// branch point and gamma collapses).
double carrying_capacity(int n, int fan_out);

// X(t) = gamma * fan_out^t / (gamma + fan_out^t - 1); logistic lower bound on
// psi at integer rounds. Requires fan_out >= 2, t >= 0.
double logistic_bound(double t, int n, int fan_out);

// m = fan_out * sum_{i=0}^{ttl-1} psi(i); expected forwarding messages over
// the whole push phase. Requires ttl >= 1.
double expected_digests(const PushParams& params);

// Closed-form integral lower bound on expected_digests. Requires fan_out >= 2.
double expected_digests_lower_bound(const PushParams& params);

// Upper bound on the probability that some peer misses the block during push:
// min(1, n * (1 - 1/n)^m_lb) with m_lb = fan_out * sum_{t<ttl} X(t). The
// logistic bound X(t) <= psi(t) keeps the chain a guaranteed bound rather
// than an estimate. Requires ttl >= 1, fan_out >= 2.
double p_e_bound(const PushParams& params);

// Smallest ttl with p_e_bound <= p_e_target, searched incrementally.
// Returns nullopt if no ttl <= 1000 reaches the target.
std::optional<int> min_ttl(int n, int fan_out, double p_e_target);

struct AnalysisReport {
  double gamma = 0.0;
  std::vector<double> psi_trajectory;  // psi(0) .. psi(ttl)
  double expected_digests = 0.0;
  double p_e_bound = 1.0;
};

AnalysisReport analyze(const PushParams& params);

struct TtlTableEntry {
  int n = 0;
  int fan_out = 0;
  double p_e_target = 0.0;
  int ttl = 0;
};

// Lookup table mapping a network size to a precomputed minimal ttl.
// lookup(n) returns the entry with the smallest table n >= the queried n.
class TtlTable {
 public:
  // Each spec is (n, p_e_target, fan_out).
  static TtlTable build(const std::vector<std::tuple<int, double, int>>& specs);

  std::optional<TtlTableEntry> lookup(int n) const;
  const std::vector<TtlTableEntry>& entries() const { return entries_; }

 private:
  std::vector<TtlTableEntry> entries_;  // sorted by n ascending
};

}  // namespace gossipsim::analysis
