#pragma once
// Exact samplers for the discrete random objects: conditioned walks, critical
// geometric Galton-Watson trees, uniform edge labels, uniform rooted pointed
// quadrangulations with boundary, and the first-passage density approximation
// used when comparing walk functionals against their continuum profiles.

#include <stdexcept>
#include <vector>

#include "bmaps/encoding.hpp"
#include "bmaps/rng.hpp"
#include "bmaps/schaeffer.hpp"
#include "bmaps/uihpq.hpp"
#include "bmaps/walks.hpp"

namespace bmaps {

// --- conditioned walks -------------------------------------------------------

// Uniform walk with n up-steps and n+l down-steps conditioned to first hit -l
// at the final step. Exact via the cycle lemma (O(length), no rejection).
inline Walk sample_conditioned_walk(int n, int l, Rng& rng) {
  return sample_first_passage_walk(n, l, rng);
}

// Rejection oracle for the same law: shuffle the step multiset until the
// result is a first-passage path. Exponentially slow in l; tests only.
inline Walk sample_conditioned_walk_rejection(int n, int l, Rng& rng) {
  if (n < 0 || l < 1) throw std::invalid_argument("need n >= 0, l >= 1");
  const int m = 2 * n + l;
  for (;;) {
    std::vector<int> steps(m, 1);
    for (int i = n; i < m; ++i) steps[i] = -1;
    for (int i = m - 1; i > 0; --i)
      std::swap(steps[i], steps[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    Walk s(m + 1, 0);
    for (int i = 0; i < m; ++i) s[i + 1] = s[i] + steps[i];
    if (is_first_passage_walk(s, l)) return s;
  }
}

// Two-sided reflected walk window with the pinned down-step indexing (the
// first down-step departure at nonnegative time has index 1).
inline ReflectedWalkWindow sample_reflected_walk_window(int K, const Rng& base) {
  return reflected_walk_window(K, base);
}

// --- Galton-Watson trees -----------------------------------------------------

// Plane tree in preorder (parent[v] < v, siblings in discovery order), plus
// the number of abandoned oversize attempts that preceded it.
struct GwTree {
  std::vector<int> parent;  // parent[0] = -1
  int resamples = 0;

  int n_vertices() const { return static_cast<int>(parent.size()); }
  int n_edges() const { return n_vertices() - 1; }
};

// Critical Galton-Watson tree, offspring distribution geometric with
// parameter 1/2 on {0,1,2,...}. The tree is a.s. finite but has infinite
// expected size, so a hard cap bounds each attempt; an attempt that exceeds
// the cap is abandoned and resampled (counted in `resamples`; the truncation
// bias is of order cap^{-1/2}).
inline GwTree sample_gw_tree_geometric(Rng& rng, int cap = 10'000'000) {
  if (cap < 1) throw std::invalid_argument("cap must be positive");
  GwTree out;
  for (;;) {
    out.parent.assign(1, -1);
    // Depth-first: children_left[d] = unstarted children of the vertex at
    // depth d on the current ancestor path.
    std::vector<int> path{0};
    std::vector<int> children_left{rng.geom_half()};
    bool overflow = false;
    while (!path.empty()) {
      if (children_left.back() == 0) {
        path.pop_back();
        children_left.pop_back();
        continue;
      }
      --children_left.back();
      if (static_cast<int>(out.parent.size()) >= cap) {
        overflow = true;
        break;
      }
      const int v = static_cast<int>(out.parent.size());
      out.parent.push_back(path.back());
      path.push_back(v);
      children_left.push_back(rng.geom_half());
    }
    if (!overflow) return out;
    ++out.resamples;
  }
}

// --- labels ------------------------------------------------------------------

// Uniform label function on a plane tree: the root carries root_label and
// each edge increment is i.i.d. uniform on {-1,0,+1}. Vertices are labeled in
// index order, which is preorder for parent arrays with parent[v] < v.
inline std::vector<int> sample_uniform_labels(const std::vector<int>& parent, int root_label,
                                              Rng& rng) {
  const int n = static_cast<int>(parent.size());
  if (n == 0) throw std::invalid_argument("tree must have a root");
  std::vector<int> label(n);
  label[0] = root_label;
  for (int v = 1; v < n; ++v) {
    if (parent[v] < 0 || parent[v] >= v)
      throw std::invalid_argument("parent array must satisfy 0 <= parent[v] < v");
    label[v] = label[parent[v]] + rng.u3();
  }
  return label;
}

inline LabeledTree sample_labeled_gw_tree(int root_label, Rng& rng, int cap = 10'000'000) {
  GwTree t = sample_gw_tree_geometric(rng, cap);
  LabeledTree out;
  out.parent = t.parent;
  out.label = sample_uniform_labels(t.parent, root_label, rng);
  return out;
}

// --- uniform rooted pointed quadrangulations with boundary --------------------

struct UniformQuadSample {
  QuadBuild build;       // map, per-corner vertex ids, chord targets
  TreedBridge encoding;  // the treed bridge that produced it
  int rejections = 0;    // degenerate encodings discarded before this draw
};

// Sample a rooted pointed quadrangulation with n interior faces and boundary
// length 2l: draw uniform treed bridges and reject the (degenerate) ones
// whose chord system is not planar. The law is exactly uniform over valid
// encodings (the conditional of the uniform treed bridge on a valid build).
inline UniformQuadSample sample_uniform_quad(int n, int l, Rng& rng) {
  if (n < 0 || l < 1) throw std::invalid_argument("need n >= 0, l >= 1");
  UniformQuadSample out;
  for (;;) {
    out.encoding = sample_treed_bridge(n, l, rng);
    out.build = build_quad(out.encoding);
    if (!out.build.degenerate) return out;
    ++out.rejections;
  }
}

// --- first-passage density approximation --------------------------------------

// Leading-order profile for the probability that a simple random walk,
// observed at time N at height s_N, first hits -m at time n:
//   (2*pi)^{-1/2} (s_N + m) (n - N)^{-3/2} exp(-(s_N + m)^2 / (2 (n - N))).
// This is the continuum first-passage density; as a lattice pmf it should be
// compared against span-2 histogram estimates (the walk has period 2, so the
// point mass at an admissible time is about twice this density).
inline double hitting_time_density(double m, double n, double s_N, double N) {
  return hitting_pmf_approx(s_N + m, n - N);
}

}  // namespace bmaps
