#pragma once
// Lattice-walk primitives shared by the samplers and encoders:
//   * +-1 bridges of length 2l (uniform via shuffling),
//   * first-passage walks (n up-steps, n+l down-steps, first hit of -l at the
//     end) sampled exactly with the cycle lemma,
//   * two-sided reflected walks (nonnegative, forced up-step at 0),
//   * the discrete snake head driven by an integer walk,
//   * a Brownian first-passage time density used as a reference curve.
//
// A `Walk` stores the value sequence S(0..M), not the step sequence.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "bmaps/rng.hpp"

namespace bmaps {

using Walk = std::vector<int>;

inline bool has_unit_steps(const Walk& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    int d = s[i] - s[i - 1];
    if (d != 1 && d != -1) return false;
  }
  return true;
}

// Uniform +-1 bridge: 2l steps, l of each sign, S(0) = S(2l) = 0.
inline Walk sample_bridge(int l, Rng& rng) {
  if (l < 1) throw std::invalid_argument("bridge length must be positive");
  std::vector<int> steps(2 * l, 1);
  for (int i = l; i < 2 * l; ++i) steps[i] = -1;
  for (int i = 2 * l - 1; i > 0; --i)
    std::swap(steps[i], steps[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  Walk s(2 * l + 1, 0);
  for (int i = 0; i < 2 * l; ++i) s[i + 1] = s[i] + steps[i];
  return s;
}

inline bool is_bridge(const Walk& s) {
  return s.size() >= 3 && s.size() % 2 == 1 && s.front() == 0 &&
         s.back() == 0 && has_unit_steps(s);
}

// Times j in [0, 2l) with a down-step from j to j+1, in increasing order.
inline std::vector<int> down_step_times(const Walk& b0) {
  std::vector<int> js;
  for (std::size_t j = 0; j + 1 < b0.size(); ++j)
    if (b0[j + 1] < b0[j]) js.push_back(static_cast<int>(j));
  return js;
}

// Root labels (b(0), ..., b(l)): b(0) = b0(0) = 0 and b(k) = b0(j_k) where
// j_k is the k-th smallest down-step time.
inline std::vector<int> bridge_root_labels(const Walk& b0) {
  std::vector<int> js = down_step_times(b0);
  std::vector<int> b;
  b.reserve(js.size() + 1);
  b.push_back(b0.front());
  for (int j : js) b.push_back(b0[j]);
  return b;
}

// Rotations r of a +-1 step sequence (n ups, n+l downs) whose rotated walk
// first hits -l exactly at the final step. The cycle lemma guarantees there
// are exactly l such rotations for every arrangement.
inline std::vector<int> first_passage_rotations(const std::vector<int>& steps,
                                                int l) {
  int m = static_cast<int>(steps.size());
  std::vector<long long> s(m + 1, 0);
  for (int i = 0; i < m; ++i) s[i + 1] = s[i] + steps[i];
  if (s[m] != -l) throw std::invalid_argument("step sum must be -l");
  // Rotation r is valid iff the rotated partial sums stay strictly above -l
  // before the final step. Unrotated coordinates: the tail i in (r, m) must
  // stay above s[r] - l (for r >= 1 the wrap makes i = m count too, forcing
  // s[r] < 0), and the wrapped head i in [1, r) must stay above s[r].
  const long long big = 1LL << 60;
  std::vector<long long> suffix_min_inner(m + 1, big);  // min s[i], i in (r, m)
  for (int i = m - 2; i >= 0; --i)
    suffix_min_inner[i] = std::min(s[i + 1], suffix_min_inner[i + 1]);
  std::vector<int> valid;
  long long prefix_min = big;  // min s[i], i in [1, r)
  for (int r = 0; r < m; ++r) {
    long long tail_min = suffix_min_inner[r];
    if (r >= 1) tail_min = std::min(tail_min, s[m]);
    bool ok = tail_min > s[r] - l && prefix_min > s[r];
    if (ok) valid.push_back(r);
    if (r >= 1) prefix_min = std::min(prefix_min, s[r]);
  }
  return valid;
}

// Uniform walk with n up-steps and n+l down-steps conditioned to hit -l for
// the first time at step 2n+l (the contour of a uniform forest of l plane
// trees with n total edges). Exact via the cycle lemma.
inline Walk sample_first_passage_walk(int n, int l, Rng& rng) {
  if (n < 0 || l < 1) throw std::invalid_argument("need n >= 0, l >= 1");
  int m = 2 * n + l;
  std::vector<int> steps(m, 1);
  for (int i = n; i < m; ++i) steps[i] = -1;
  for (int i = m - 1; i > 0; --i)
    std::swap(steps[i], steps[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  std::vector<int> valid = first_passage_rotations(steps, l);
  if (static_cast<int>(valid.size()) != l)
    throw std::logic_error("cycle lemma violated: rotation count != l");
  int r = valid[rng.below(valid.size())];
  Walk s(m + 1, 0);
  for (int i = 0; i < m; ++i) s[i + 1] = s[i] + steps[(r + i) % m];
  return s;
}

inline bool is_first_passage_walk(const Walk& s, int l) {
  if (s.empty() || s.front() != 0 || s.back() != -l) return false;
  if (!has_unit_steps(s)) return false;
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (s[i] <= -l) return false;
  return true;
}

// Two-sided walk stored as values[origin + j] for j in [-left, right].
struct TwoSidedWalk {
  std::vector<int> values;
  int origin = 0;
  int at(int j) const { return values.at(static_cast<std::size_t>(origin + j)); }
  int left() const { return -origin; }
  int right() const { return static_cast<int>(values.size()) - 1 - origin; }
};

// Two-sided reflected simple random walk: value 0 at time 0, nonnegative,
// and from value 0 the next step (in either direction of exploration) is up
// with probability one. The two halves are independent. Windows drawn from
// the same base generator agree on overlaps, so enlarging a window extends
// the same realization.
inline TwoSidedWalk sample_reflected_bridge_window(int left, int right,
                                                   const Rng& base) {
  if (left < 0 || right < 0) throw std::invalid_argument("negative window");
  TwoSidedWalk w;
  w.values.assign(static_cast<std::size_t>(left + right + 1), 0);
  w.origin = left;
  Rng fwd = base.child(1);
  for (int j = 1; j <= right; ++j) {
    int prev = w.values[w.origin + j - 1];
    w.values[w.origin + j] = prev == 0 ? 1 : prev + fwd.pm1();
  }
  Rng bwd = base.child(2);
  for (int j = 1; j <= left; ++j) {
    int prev = w.values[w.origin - j + 1];
    w.values[w.origin - j] = prev == 0 ? 1 : prev + bwd.pm1();
  }
  return w;
}

// Depth process of a contour: D(i) = C(i) - min_{j<=i} C(j). Down-steps of C
// into new minima become flat steps of D at level zero.
inline Walk depth_from_contour(const Walk& c) {
  Walk d(c.size(), 0);
  int running_min = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    running_min = std::min(running_min, c[i]);
    d[i] = c[i] - running_min;
  }
  return d;
}

// Discrete snake head driven by an integer walk with steps in {-1, 0, +1}:
// at an up-step the head moves by an independent uniform step in {-1, 0, +1};
// otherwise it returns to its value at the last time the driver took the
// current value (0 if the value was never seen, e.g. the start).
inline Walk snake_head(const Walk& driver, Rng& rng) {
  Walk h(driver.size(), 0);
  std::unordered_map<int, int> last_at_value;
  if (driver.empty()) return h;
  last_at_value[driver[0]] = 0;
  for (std::size_t i = 1; i < driver.size(); ++i) {
    int step = driver[i] - driver[i - 1];
    if (step > 1 || step < -1)
      throw std::invalid_argument("snake driver steps must be in {-1,0,1}");
    if (step == 1) {
      h[i] = h[i - 1] + rng.u3();
    } else {
      auto it = last_at_value.find(driver[i]);
      h[i] = it == last_at_value.end() ? 0 : h[it->second];
    }
    last_at_value[driver[i]] = static_cast<int>(i);
  }
  return h;
}

// Density n -> (2*pi)^{-1/2} * a * n^{-3/2} * exp(-a^2 / (2n)): the continuous
// first-passage profile a walk started a above the target hits at time n.
inline double hitting_pmf_approx(double height, double time) {
  if (time <= 0) return 0.0;
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * height * std::pow(time, -1.5) *
         std::exp(-height * height / (2.0 * time));
}

}  // namespace bmaps
