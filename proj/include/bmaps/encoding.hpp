#pragma once
// Discrete encoding objects: integer-labeled plane trees hanging off a +-1
// bridge ("treed bridges"), their contour/label processes, and exhaustive
// enumerators at small sizes used as ground truth in tests.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bmaps/rng.hpp"
#include "bmaps/walks.hpp"

namespace bmaps {

// Plane tree with integer vertex labels. Vertices are numbered in preorder
// (root = 0), so parent[v] < v and sibling order is the order of discovery;
// this makes the parent array a faithful encoding of the plane structure.
struct LabeledTree {
  std::vector<int> parent;  // parent[0] = -1
  std::vector<int> label;

  int n_vertices() const { return static_cast<int>(parent.size()); }
  int n_edges() const { return n_vertices() - 1; }
  bool operator==(const LabeledTree& o) const = default;
};

inline bool valid_labeled_tree(const LabeledTree& t) {
  if (t.parent.empty() || t.parent.size() != t.label.size()) return false;
  if (t.parent[0] != -1) return false;
  for (int v = 1; v < t.n_vertices(); ++v) {
    if (t.parent[v] < 0 || t.parent[v] >= v) return false;
    if (std::abs(t.label[v] - t.label[t.parent[v]]) > 1) return false;
  }
  return true;
}

inline std::vector<std::vector<int>> children_of(const std::vector<int>& parent) {
  std::vector<std::vector<int>> ch(parent.size());
  for (std::size_t v = 1; v < parent.size(); ++v) ch[parent[v]].push_back(static_cast<int>(v));
  return ch;  // preorder numbering keeps each list in plane (left-to-right) order
}

// Euler tour of the tree: vertex visited at each of the 2m+1 corner times.
inline std::vector<int> tree_tour(const LabeledTree& t) {
  auto ch = children_of(t.parent);
  std::vector<int> tour;
  tour.reserve(2 * t.n_edges() + 1);
  // iterative DFS emitting the vertex each time it is the active endpoint
  std::vector<std::size_t> next_child(t.parent.size(), 0);
  int v = 0;
  tour.push_back(0);
  while (true) {
    if (next_child[v] < ch[v].size()) {
      v = ch[v][next_child[v]++];
      tour.push_back(v);
    } else if (v != 0) {
      v = t.parent[v];
      tour.push_back(v);
    } else {
      break;
    }
  }
  return tour;
}

// A bridge with l labeled trees grafted at its down-steps plus a sign used
// to orient the root edge of the constructed map.
struct TreedBridge {
  Walk bridge;                    // b0(0..2l)
  std::vector<LabeledTree> trees; // tree k rooted at label b(k)
  int sign = -1;                  // -1 or +1

  int boundary_half_length() const { return static_cast<int>(trees.size()); }
  int area() const {
    int n = 0;
    for (const auto& t : trees) n += t.n_edges();
    return n;
  }
  bool operator==(const TreedBridge& o) const = default;
};

inline bool valid_treed_bridge(const TreedBridge& tb) {
  if (!is_bridge(tb.bridge)) return false;
  if (tb.sign != -1 && tb.sign != 1) return false;
  std::vector<int> b = bridge_root_labels(tb.bridge);
  if (tb.trees.size() + 1 != b.size()) return false;
  for (std::size_t k = 0; k < tb.trees.size(); ++k) {
    if (!valid_labeled_tree(tb.trees[k])) return false;
    if (tb.trees[k].label[0] != b[k]) return false;
  }
  return true;
}

// Contour exploration of the whole forest. With n total edges and l trees
// there are 2n+l corner times i = 0..2n+l-1; index 2n+l is a sentinel where
// the contour first reaches -l. Tree k occupies corner times [I(k), I(k+1)),
// its contour runs at height -k + depth, and the step into time I(k+1) is
// the transition down-step to the next tree.
struct ContourTriple {
  Walk C;                       // C(0..2n+l), C(2n+l) = -l
  Walk L;                       // vertex label under each corner; L(2n+l) = L(0) convention unused, size 2n+l
  std::vector<int> I;           // I(0..l), first hitting times of -k
  std::vector<int> corner_vertex;  // global vertex id per corner time (size 2n+l)
  std::vector<int> corner_tree;    // tree index per corner time (size 2n+l)
  std::vector<int> vertex_label;   // per global vertex id
  std::vector<int> tree_first_vertex;  // global id of tree k's root (size l)

  int n_corners() const { return static_cast<int>(corner_vertex.size()); }
  int n_vertices() const { return static_cast<int>(vertex_label.size()); }
};

inline ContourTriple contour_of(const TreedBridge& tb) {
  if (!valid_treed_bridge(tb)) throw std::invalid_argument("invalid treed bridge");
  const int l = tb.boundary_half_length();
  const int n = tb.area();
  const int m = 2 * n + l;
  ContourTriple ct;
  ct.C.reserve(m + 1);
  ct.L.reserve(m);
  ct.corner_vertex.reserve(m);
  ct.corner_tree.reserve(m);
  ct.I.assign(l + 1, 0);
  int offset = 0;
  for (int k = 0; k < l; ++k) {
    const LabeledTree& t = tb.trees[k];
    ct.I[k] = static_cast<int>(ct.corner_vertex.size());
    ct.tree_first_vertex.push_back(offset);
    std::vector<int> tour = tree_tour(t);
    std::vector<int> depth(t.n_vertices(), 0);
    for (int v = 1; v < t.n_vertices(); ++v) depth[v] = depth[t.parent[v]] + 1;
    for (int v : tour) {
      ct.C.push_back(-k + depth[v]);
      ct.L.push_back(t.label[v]);
      ct.corner_vertex.push_back(offset + v);
      ct.corner_tree.push_back(k);
    }
    for (int v = 0; v < t.n_vertices(); ++v) ct.vertex_label.push_back(t.label[v]);
    offset += t.n_vertices();
  }
  ct.C.push_back(-l);
  ct.I[l] = m;
  return ct;
}

// First hitting times I(k) = min{i : C(i) = -k} for k = 0..l where -l is the
// final value of the contour.
inline std::vector<int> infimum_times(const Walk& c) {
  if (c.empty() || c.front() != 0 || c.back() > 0)
    throw std::invalid_argument("contour must start at 0 and end at -l <= 0");
  int l = -c.back();
  std::vector<int> I(l + 1, -1);
  for (int i = 0; i < static_cast<int>(c.size()); ++i)
    if (c[i] <= 0 && I[-c[i]] == -1) I[-c[i]] = i;
  for (int k = 0; k <= l; ++k)
    if (I[k] == -1) throw std::invalid_argument("contour never reaches -k");
  return I;
}

// Inverse of contour_of on the tree side: rebuild the labeled forest from a
// first-passage contour and per-corner labels.
inline std::vector<LabeledTree> trees_from_contour(const Walk& c, const Walk& labels) {
  if (c.size() != labels.size() + 1)
    throw std::invalid_argument("need one label per corner time");
  std::vector<int> I = infimum_times(c);
  int l = -c.back();
  std::vector<LabeledTree> trees(l);
  for (int k = 0; k < l; ++k) {
    LabeledTree& t = trees[k];
    t.parent.push_back(-1);
    t.label.push_back(labels[I[k]]);
    std::vector<int> stack{0};
    for (int i = I[k] + 1; i < I[k + 1]; ++i) {
      if (c[i] > c[i - 1]) {
        int v = t.n_vertices();
        t.parent.push_back(stack.back());
        t.label.push_back(labels[i]);
        stack.push_back(v);
      } else {
        stack.pop_back();
        if (labels[i] != t.label[stack.back()])
          throw std::invalid_argument("labels inconsistent along contour");
      }
    }
    if (stack.size() != 1) throw std::logic_error("contour not balanced within tree");
  }
  return trees;
}

// Uniform treed bridge of area n and boundary half-length 2l: independent
// uniform bridge, uniform forest contour (cycle lemma), i.i.d. uniform edge
// increments realized through the discrete snake, and a fair sign.
inline TreedBridge sample_treed_bridge(int n, int l, Rng& rng) {
  TreedBridge tb;
  tb.bridge = sample_bridge(l, rng);
  std::vector<int> b = bridge_root_labels(tb.bridge);
  Walk c = sample_first_passage_walk(n, l, rng);
  Walk h = snake_head(depth_from_contour(c), rng);
  std::vector<int> I = infimum_times(c);
  Walk labels(c.size() - 1, 0);
  int k = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    while (k + 1 <= l && static_cast<int>(i) >= I[k + 1]) ++k;
    labels[i] = h[i] + b[k];
  }
  tb.trees = trees_from_contour(c, labels);
  tb.sign = rng.pm1();
  return tb;
}

// --- exhaustive enumerators (small sizes; ground truth for tests) ---

inline std::vector<Walk> enumerate_bridges(int l) {
  std::vector<Walk> out;
  int m = 2 * l;
  for (int mask = 0; mask < (1 << m); ++mask) {
    if (__builtin_popcount(mask) != l) continue;
    Walk s(m + 1, 0);
    for (int i = 0; i < m; ++i) s[i + 1] = s[i] + ((mask >> i) & 1 ? 1 : -1);
    out.push_back(s);
  }
  return out;
}

inline std::vector<Walk> enumerate_first_passage_walks(int n, int l) {
  std::vector<Walk> out;
  int m = 2 * n + l;
  for (long long mask = 0; mask < (1LL << m); ++mask) {
    if (__builtin_popcountll(mask) != n) continue;
    Walk s(m + 1, 0);
    for (int i = 0; i < m; ++i) s[i + 1] = s[i] + ((mask >> i) & 1 ? 1 : -1);
    if (is_first_passage_walk(s, l)) out.push_back(s);
  }
  return out;
}

// All treed bridges with n total tree edges and boundary half-length l,
// both signs. Size grows like C(2l,l) * (l/(2n+l)) C(2n+l,n) * 3^n * 2.
inline std::vector<TreedBridge> enumerate_treed_bridges(int n, int l) {
  std::vector<TreedBridge> out;
  std::vector<Walk> bridges = enumerate_bridges(l);
  std::vector<Walk> contours = enumerate_first_passage_walks(n, l);
  long long n_labelings = 1;
  for (int i = 0; i < n; ++i) n_labelings *= 3;
  for (const Walk& b0 : bridges) {
    std::vector<int> b = bridge_root_labels(b0);
    for (const Walk& c : contours) {
      for (long long code = 0; code < n_labelings; ++code) {
        // decode base-3 digits into per-up-step label increments along c
        Walk labels(c.size() - 1, 0);
        std::vector<int> tree_of(c.size() - 1, 0);
        std::vector<int> I = infimum_times(c);
        {
          int k = 0;
          for (std::size_t i = 0; i < labels.size(); ++i) {
            while (k + 1 <= l && static_cast<int>(i) >= I[k + 1]) ++k;
            tree_of[i] = k;
          }
        }
        long long rest = code;
        std::vector<int> last_label_at_depth;  // stack along the exploration
        labels[0] = b[0];
        last_label_at_depth = {labels[0]};
        for (std::size_t i = 1; i < labels.size(); ++i) {
          if (c[i] > c[i - 1]) {
            int inc = static_cast<int>(rest % 3) - 1;
            rest /= 3;
            labels[i] = last_label_at_depth.back() + inc;
            last_label_at_depth.push_back(labels[i]);
          } else if (tree_of[i] != tree_of[i - 1]) {
            last_label_at_depth = {b[tree_of[i]]};
            labels[i] = b[tree_of[i]];
          } else {
            last_label_at_depth.pop_back();
            labels[i] = last_label_at_depth.back();
          }
        }
        TreedBridge tb;
        tb.bridge = b0;
        tb.trees = trees_from_contour(c, labels);
        for (int sign : {-1, 1}) {
          tb.sign = sign;
          out.push_back(tb);
        }
      }
    }
  }
  return out;
}

}  // namespace bmaps
