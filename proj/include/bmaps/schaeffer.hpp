#pragma once
// Label-guided construction of rooted pointed quadrangulations with boundary
// from treed bridges, plus the interval bounds on graph distances that the
// corner labels provide.
//
// Geometry: the 2n+l corners of the treed bridge sit at positions 0..2n+l-1
// on a circle in contour order; every corner sends one chord to its successor
// (the next corner, cyclically, whose label is one lower), or to an extra
// vertex placed between positions 2n+l-1 and 0 when no such corner exists.
// Chords are non-crossing, so sorting the chord endpoints around each corner
// by cyclic position yields a planar rotation system.

#include <algorithm>
#include <climits>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "bmaps/encoding.hpp"
#include "bmaps/mapcore.hpp"

namespace bmaps {

// --- successors ------------------------------------------------------------

// Positions of each label value, ascending. m = number of corners.
struct LabelIndex {
  std::unordered_map<int, std::vector<int>> at_value;
  explicit LabelIndex(const Walk& labels) {
    for (int i = 0; i < static_cast<int>(labels.size()); ++i)
      at_value[labels[i]].push_back(i);
  }
  // First position strictly after i holding `value`, or -1.
  int next_after(int value, int i) const {
    auto it = at_value.find(value);
    if (it == at_value.end()) return -1;
    auto pos = std::upper_bound(it->second.begin(), it->second.end(), i);
    return pos == it->second.end() ? -1 : *pos;
  }
  // Smallest position holding `value`, or -1.
  int first(int value) const {
    auto it = at_value.find(value);
    return it == at_value.end() ? -1 : it->second.front();
  }
};

// Cyclic successor of corner i: first corner strictly after i (wrapping) with
// label labels[i]-1; -1 when no corner has that label anywhere.
inline int successor_cyclic(const Walk& labels, int i) {
  LabelIndex idx(labels);
  int s = idx.next_after(labels[i] - 1, i);
  if (s == -1) s = idx.first(labels[i] - 1);
  return s;
}

// All cyclic successors at once (O(m log m)).
inline std::vector<int> successors_cyclic(const Walk& labels) {
  LabelIndex idx(labels);
  std::vector<int> s(labels.size());
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    int t = idx.next_after(labels[i] - 1, i);
    if (t == -1) t = idx.first(labels[i] - 1);
    s[i] = t;
  }
  return s;
}

// Forward-only successors (half-plane variant): no wrap, -1 when unresolved.
inline std::vector<int> successors_forward(const Walk& labels) {
  LabelIndex idx(labels);
  std::vector<int> s(labels.size());
  for (int i = 0; i < static_cast<int>(labels.size()); ++i)
    s[i] = idx.next_after(labels[i] - 1, i);
  return s;
}

// A label multiset admits a planar chord realization only if label values
// descend in unit steps down to the minimum: a corner labeled v with no
// corner labeled v-1 anywhere (and v not the minimum) has nowhere to attach.
inline bool missing_intermediate_label(const Walk& labels) {
  if (labels.empty()) return false;
  std::unordered_map<int, char> seen;
  int lo = labels[0];
  for (int v : labels) {
    seen[v] = 1;
    lo = std::min(lo, v);
  }
  for (const auto& [v, _] : seen)
    if (v != lo && !seen.count(v - 1)) return true;
  return false;
}

// A chord whose cyclic scan wraps past position m-1 may jump over a corner
// with label <= L(i)-2 (the label sequence only guarantees unit descent on
// linear stretches). Such a chord strictly encloses a lower-labeled corner
// and cannot be drawn without crossing that corner's own chord.
inline bool has_wrapping_skip(const Walk& labels, const std::vector<int>& succ) {
  const int m = static_cast<int>(labels.size());
  std::vector<int> suffix_min(m + 1, INT_MAX), prefix_min(m + 1, INT_MAX);
  for (int i = m - 1; i >= 0; --i) suffix_min[i] = std::min(labels[i], suffix_min[i + 1]);
  for (int i = 0; i < m; ++i) prefix_min[i + 1] = std::min(labels[i], prefix_min[i]);
  for (int i = 0; i < m; ++i) {
    int s = succ[i];
    if (s <= i && s != -1) {  // scan wrapped around
      int inside = std::min(suffix_min[i + 1], prefix_min[s]);  // (i, m) and [0, s)
      if (inside <= labels[i] - 2) return true;
    }
  }
  return false;
}

// Every chord is drawn hugging the contour forward from i to succ[i]; the
// drawing is planar iff these forward intervals form a laminar family.
// Stack scan: chords ending at the extra vertex, and the tails of wrapping
// chords, run to the gap after position m-1 and never close.
inline bool chords_laminar(const std::vector<int>& succ) {
  const int m = static_cast<int>(succ.size());
  std::vector<int> remaining(m, 0);
  std::vector<int> stack;  // close positions, bottom to top; -2 = never closes
  int prev_wrap_close = INT_MAX;
  for (int i = 0; i < m; ++i) {
    if (succ[i] == -1) continue;
    ++remaining[succ[i]];
    if (succ[i] <= i) {  // wrapping chord: its head segment is open from the start
      if (succ[i] > prev_wrap_close) return false;  // two wrapping chords cross
      prev_wrap_close = succ[i];
    }
  }
  for (int i = 0; i < m; ++i)
    if (succ[i] != -1 && succ[i] <= i) stack.push_back(succ[i]);
  for (int p = 0; p < m; ++p) {
    while (!stack.empty() && stack.back() == p) {
      stack.pop_back();
      --remaining[p];
    }
    if (remaining[p] > 0) return false;  // a chord ending here is buried in the stack
    if (succ[p] > p)
      stack.push_back(succ[p]);
    else
      stack.push_back(-2);  // spoke to the extra vertex, or a wrapping tail
  }
  return true;
}

// --- construction ------------------------------------------------------------

struct QuadBuild {
  PlanarQuadMap map;
  // Map vertex id of the corner's tree vertex, per corner (= origin of its
  // out-dart). The extra vertex is map.marked_vertex.
  std::vector<int> corner_vertex;
  std::vector<int> successor;  // per corner; -1 means the extra vertex
  bool degenerate = false;     // chords cannot be drawn planar (label gap,
                               // wrapping skip, or crossing chord intervals)
  bool root_to_extra = false;  // root corner's chord goes to the extra vertex
};

// Build the rooted pointed quadrangulation encoded by a treed bridge.
// Dart 2i is the out-dart of corner i (origin = corner's vertex), dart 2i+1
// its twin. Root dart: out-dart of corner 0 when sign=-1, its twin otherwise.
// The outer face is the face on the left of dart 0.
inline QuadBuild build_quad(const TreedBridge& tb) {
  ContourTriple ct = contour_of(tb);
  const int m = ct.n_corners();
  if (m == 0) throw std::invalid_argument("treed bridge has no corners");
  QuadBuild out;
  out.successor = successors_cyclic(ct.L);
  out.degenerate = missing_intermediate_label(ct.L) ||
                   has_wrapping_skip(ct.L, out.successor) ||
                   !chords_laminar(out.successor);
  out.root_to_extra = (out.successor[0] == -1);

  const int D = 2 * m;
  std::vector<int> twin(D), next(D, -1);
  for (int i = 0; i < m; ++i) {
    twin[2 * i] = 2 * i + 1;
    twin[2 * i + 1] = 2 * i;
  }

  // In-chords per corner: sources j with successor(j) == c (or the extra
  // vertex for -1), gathered in source order.
  std::vector<std::vector<int>> sources(m);
  std::vector<int> extra_sources;
  for (int j = 0; j < m; ++j) {
    int s = out.successor[j];
    if (s == -1)
      extra_sources.push_back(j);
    else
      sources[s].push_back(j);
  }

  // Rotation: within a corner's wedge, counterclockwise runs from the
  // outgoing contour side to the incoming side: first the out-chord (it
  // leaves hugging the contour forward), then in-chords by ascending forward
  // offset of their source (a chord from further back arrives nested outside
  // one from nearer). Around a vertex visited several times, counterclockwise
  // passes the wedges in descending contour position. Stored `next` is the
  // clockwise rotation, i.e. the reverse cycle.
  std::vector<std::vector<int>> fans(ct.n_vertices() + 1);
  for (int c = m - 1; c >= 0; --c) {
    auto& fan = fans[ct.corner_vertex[c]];
    fan.push_back(2 * c);
    std::vector<std::pair<int, int>> items;
    for (int j : sources[c]) items.emplace_back((j - c + m) % m, 2 * j + 1);
    std::sort(items.begin(), items.end());
    for (const auto& [k, d] : items) fan.push_back(d);
  }
  {
    // Spokes hug forward to the gap after position m-1 where the extra vertex
    // sits; around it they appear in source order.
    auto& fan = fans[ct.n_vertices()];
    for (int j : extra_sources) fan.push_back(2 * j + 1);
  }
  for (const auto& fan : fans) {
    const int k = static_cast<int>(fan.size());
    for (int a = 0; a < k; ++a) next[fan[a]] = fan[(a - 1 + k) % k];
  }
  if (extra_sources.empty()) throw std::logic_error("no chord reaches the extra vertex");

  // The gap after position m-1 is the inner side of the last boundary wall.
  // The outer face is the one between that wall and the innermost chord
  // running into the gap (the last spoke or wrapping chord), on its
  // boundary-facing side.
  int gap_inner = -1;
  for (int c = 0; c < m; ++c)
    if (out.successor[c] == -1 || out.successor[c] <= c) gap_inner = c;
  const int root = tb.sign < 0 ? 0 : 1;
  out.map = build_map(std::move(twin), std::move(next), root,
                      /*marked_vertex=*/-1, /*exterior_dart=*/2 * gap_inner + 1,
                      /*marked_dart=*/2 * extra_sources[0] + 1);
  out.corner_vertex.resize(m);
  for (int c = 0; c < m; ++c) out.corner_vertex[c] = out.map.origin[2 * c];
  return out;
}

// --- boundary path -----------------------------------------------------------

// The boundary path: darts of the outer face in face order, starting at the
// terminal vertex of the root edge (the root dart's head). Closed walk of
// length = boundary length. The root edge itself may be interior; the walk
// starts at the first boundary dart clockwise around the root's head.
inline std::vector<int> boundary_path(const PlanarQuadMap& m) { return boundary_walk(m); }

// Vertices visited by a dart walk (origins, then the final head): one longer
// than the walk, first = last for a closed walk.
inline std::vector<int> walk_vertices(const PlanarQuadMap& m, const std::vector<int>& darts) {
  std::vector<int> vs;
  vs.reserve(darts.size() + 1);
  for (int d : darts) vs.push_back(m.origin[d]);
  if (!darts.empty()) vs.push_back(m.head(darts.back()));
  return vs;
}

// --- distance bounds from corner labels --------------------------------------

// Upper bound: chords from both corners to the deepest label between them
// meet within one step of each other.
inline int distance_upper_bound(const Walk& labels, int i1, int i2) {
  if (i1 > i2) std::swap(i1, i2);
  int lo = labels[i1];
  for (int i = i1; i <= i2; ++i) lo = std::min(lo, labels[i]);
  return labels[i1] + labels[i2] - 2 * lo + 2;
}

// Lower bound of cactus type. `anchors` are the contour times whose corners
// lie on the boundary (tree root first-visits). Both the anchors inside
// [i1,i2] and those outside, always together with the two endpoints, separate
// the corners; the distance is at least
//   labels[i1] + labels[i2] - 2 * max(min inside-set, min outside-set).
// The half-plane variant (`two_sided = false`) keeps only the inside set.
inline int cactus_lower_bound(const Walk& labels, const std::vector<int>& anchors,
                              int i1, int i2, bool two_sided = true) {
  if (i1 > i2) std::swap(i1, i2);
  const int m = static_cast<int>(labels.size());
  int min_in = std::min(labels[i1], labels[i2]);
  int min_out = min_in;
  for (int t : anchors) {
    if (t < 0 || t >= m) continue;
    if (t >= i1 && t <= i2)
      min_in = std::min(min_in, labels[t]);
    else
      min_out = std::min(min_out, labels[t]);
  }
  int best = two_sided ? std::max(min_in, min_out) : min_in;
  return labels[i1] + labels[i2] - 2 * best;
}

}  // namespace bmaps
