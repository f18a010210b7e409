#pragma once
// Half-plane quadrangulation windows.
//
// A two-sided reflected walk prescribes root labels at its down-step times;
// independent critical geometric(1/2) plane trees with uniform {-1,0,+1}
// edge-increment labels hang at those down-steps.  Every corner of the
// concatenated tree contour is chained forward to the next corner whose label
// is one less (no wrap-around, no extra vertex), and the map rooted at the
// arc leaving the last root corner of tree 0 is a half-plane quadrangulation.
//
// A window materializes trees k in [-K, K], each possibly truncated to a node
// budget (unexplored subtrees are "stubs": their root vertex and label are
// known, the contour interval below them is opaque).  The build draws exactly
// the arcs whose forward target is certain, tracks per-corner completeness
// (all true incident arcs drawn), and certifies via the anchored label lower
// bound a radius around the root-edge tail inside which the window agrees
// with the infinite map.  Enlarging K or the budget extends the same
// realization, because each walk direction and each tree has its own child
// stream of the base generator and trees grow depth-first.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bmaps/encoding.hpp"
#include "bmaps/mapcore.hpp"
#include "bmaps/rng.hpp"
#include "bmaps/walks.hpp"

namespace bmaps {

// --- reflected walk window with down-step bookkeeping ---

// Window of the two-sided reflected walk together with its down-step times
// j(k), ordered so that j(1) is the first j >= 0 followed by a down-step and
// j(0) is the last one before it.  b(k) is the walk value at j(k): the root
// label of tree k.  Tree indices k in [k_min, k_max] are covered.
struct ReflectedWalkWindow {
  TwoSidedWalk walk;
  int k_min = 0;
  int k_max = -1;
  std::vector<int> jk;  // j(k) at index k - k_min

  int j(int k) const {
    if (k < k_min || k > k_max) throw std::out_of_range("tree index outside walk window");
    return jk[k - k_min];
  }
  int b(int k) const { return walk.at(j(k)); }
};

// Samples the reflected walk just wide enough to know down-steps for trees
// k in [-K-1, K+1] (one spare anchor each side for boundary-time checks).
// Wider requests extend the same realization of `base`.
inline ReflectedWalkWindow reflected_walk_window(int K, const Rng& base) {
  if (K < 0) throw std::invalid_argument("window half-width must be >= 0");
  const int need = K + 2;  // down-steps strictly before time 0 / at or after it
  int width = 8 * need + 16;
  for (;;) {
    TwoSidedWalk w = sample_reflected_bridge_window(width, width, base);
    std::vector<int> neg, pos;  // down-step times j < 0 / j >= 0, ascending
    for (int j = -width; j < width; ++j)
      if (w.at(j + 1) - w.at(j) == -1) (j < 0 ? neg : pos).push_back(j);
    if (static_cast<int>(neg.size()) >= need && static_cast<int>(pos.size()) >= need) {
      ReflectedWalkWindow out;
      out.walk = std::move(w);
      out.k_min = -K - 1;
      out.k_max = K + 1;
      out.jk.reserve(out.k_max - out.k_min + 1);
      // k <= 0 indexes the down-steps before time 0 from the last backwards.
      for (int k = out.k_min; k <= 0; ++k) out.jk.push_back(neg[neg.size() - 1 + k]);
      for (int k = 1; k <= out.k_max; ++k) out.jk.push_back(pos[k - 1]);
      return out;
    }
    width *= 2;
  }
}

// --- budget-truncated critical trees ---

// Plane tree prefix: vertices are numbered in creation order of a depth-first
// expansion, so a larger budget extends the same arrays.  stub[v] = 1 means v
// exists (parent and label known) but its subtree was not explored.
struct WindowTree {
  LabeledTree t;
  std::vector<char> stub;

  int n_created() const { return t.n_vertices(); }
  bool fully_explored() const {
    for (char s : stub)
      if (s) return false;
    return true;
  }
};

// Critical geometric(1/2)-offspring tree with uniform {-1,0,+1} label
// increments, explored depth-first until `budget` vertices exist.  All draws
// for a vertex happen atomically at its expansion, so the draw sequence --
// and with it the realized tree -- does not depend on the budget.
inline WindowTree sample_gw_tree_budget(const Rng& stream, int root_label, int budget) {
  WindowTree w;
  w.t.parent = {-1};
  w.t.label = {root_label};
  w.stub = {1};
  Rng r = stream;
  int created = 1;
  std::vector<int> todo{0};  // unexpanded vertices, depth-first order on top
  while (!todo.empty() && created < budget) {
    int v = todo.back();
    todo.pop_back();
    w.stub[v] = 0;
    int m = r.geom_half();
    int first = created;
    for (int i = 0; i < m; ++i) {
      w.t.parent.push_back(v);
      w.t.label.push_back(w.t.label[v] + r.u3());
      w.stub.push_back(1);
      ++created;
    }
    for (int i = m - 1; i >= 0; --i) todo.push_back(first + i);
  }
  return w;
}

// Trees k in [-K, K] for the given walk window, tree k drawn from the child
// stream keyed by the zig-zag code of k so that the family is stable under
// enlarging K or the budget.
inline std::vector<WindowTree> sample_uihpq_trees(int K, int budget, const Rng& base,
                                                  const ReflectedWalkWindow& bw) {
  std::vector<WindowTree> trees;
  trees.reserve(2 * K + 1);
  for (int k = -K; k <= K; ++k) {
    std::uint64_t key = k >= 0 ? 2ull * static_cast<std::uint64_t>(k)
                               : 2ull * static_cast<std::uint64_t>(-k) - 1ull;
    trees.push_back(sample_gw_tree_budget(base.child(key), bw.b(k), budget));
  }
  return trees;
}

// --- the window build ---

struct UihpqWindow {
  int K = 0;

  // Slot stream: concatenated tree contours in k-order, one entry per visible
  // corner plus one opaque entry per stub subtree.
  std::vector<int> slot_vertex;  // window-global vertex id
  std::vector<int> slot_label;
  std::vector<int> slot_tree;   // tree index k
  std::vector<int> slot_depth;  // tree depth of the slot's vertex
  std::vector<char> slot_stub;
  std::vector<int> successor;           // resolved target slot, -1 otherwise
  std::vector<char> slot_in_complete;   // corner: every true in-arc source is drawn
  std::vector<char> slot_stub_blocked;  // unresolved/incomplete because of a stub
  std::vector<char> vertex_complete;    // window vertex: all true arcs drawn
  std::vector<int> vertex_label;        // window vertex -> label
  std::vector<int> tree_root_vertex;    // window vertex of the root of tree k, index k + K
  int root_slot = -1;                   // last corner of tree 0
  int n_window_vertices = 0;

  // Anchors: first slot and root label of tree k at index k + K; down-step
  // times j(k) for k from j_k_min as provided by the walk window.
  std::vector<int> anchor_slot;
  std::vector<int> anchor_label;
  std::vector<int> anchor_j;
  int j_k_min = 0;

  // Root component of the drawn arcs, rooted at the arc out of root_slot.
  bool built = false;
  PlanarQuadMap map;
  std::vector<int> map_vertex_of;     // window vertex -> map vertex or -1
  std::vector<int> window_vertex_of;  // map vertex -> window vertex
  int root_map_vertex = -1;           // tail of the root edge (root of tree 0)

  // Balls of this radius around root_map_vertex, and all distances realized
  // inside them, agree with the infinite map.  A certificate of zero makes no
  // claim beyond the root vertex itself.
  int certificate = 0;
  bool cert_limited_by_stub = false;
  int budget = 0;  // per-tree node budget this window was sampled with

  int n_slots() const { return static_cast<int>(slot_vertex.size()); }
  int anchor_down_step(int k) const {
    if (k < j_k_min || k - j_k_min >= static_cast<int>(anchor_j.size()))
      throw std::out_of_range("no down-step stored for tree index");
    return anchor_j[k - j_k_min];
  }
  // Pairs of vertices within this distance of root_map_vertex have exact
  // window distances: a path through any uncertified vertex already costs
  // more than the in-window distance between such a pair.
  int exact_pair_radius() const { return certificate / 2; }
};

// Anchored label lower bound on the distance between the vertices of two
// slots: at least L1 + L2 - 2m, where m is the minimum over both slot labels
// and the labels of every tree root whose first corner lies strictly between
// the slots.  Sound regardless of stubs, because tree-root labels come from
// the walk.
inline int window_cactus_bound(const UihpqWindow& w, int slot1, int slot2) {
  if (slot1 > slot2) std::swap(slot1, slot2);
  int lo = static_cast<int>(std::upper_bound(w.anchor_slot.begin(), w.anchor_slot.end(), slot1) -
                            w.anchor_slot.begin());
  int hi = static_cast<int>(std::lower_bound(w.anchor_slot.begin(), w.anchor_slot.end(), slot2) -
                            w.anchor_slot.begin());
  int m = std::min(w.slot_label[slot1], w.slot_label[slot2]);
  for (int a = lo; a < hi; ++a) m = std::min(m, w.anchor_label[a]);
  return w.slot_label[slot1] + w.slot_label[slot2] - 2 * m;
}

// Builds the window map from materialized trees and the walk window.
// `prior_certificate` may carry the certificate of a smaller window of the
// same realization: its guarantee stays true in any enlargement, which makes
// the returned radius monotone under doubling.
inline UihpqWindow build_uihpq_window(const std::vector<WindowTree>& trees,
                                      const ReflectedWalkWindow& bw,
                                      int prior_certificate = 0) {
  if (trees.empty() || trees.size() % 2 == 0)
    throw std::invalid_argument("need trees for k in [-K, K]");
  const int K = static_cast<int>(trees.size() / 2);
  if (bw.k_min > -K || bw.k_max < K)
    throw std::invalid_argument("walk window does not cover the tree range");

  UihpqWindow w;
  w.K = K;
  w.j_k_min = bw.k_min;
  w.anchor_j = bw.jk;

  // Global vertex numbering: trees in k-order, vertices in creation order.
  std::vector<int> voffset(trees.size() + 1, 0);
  for (std::size_t i = 0; i < trees.size(); ++i)
    voffset[i + 1] = voffset[i] + trees[i].n_created();
  w.n_window_vertices = voffset.back();

  // Slot stream: depth-first contour per tree, stub subtrees as one slot.
  int total_slots = 0;
  for (const auto& tr : trees) total_slots += 2 * tr.n_created() - 1;
  w.slot_vertex.reserve(total_slots);
  w.slot_label.reserve(total_slots);
  w.slot_tree.reserve(total_slots);
  w.slot_depth.reserve(total_slots);
  w.slot_stub.reserve(total_slots);
  w.anchor_slot.reserve(trees.size());
  w.anchor_label.reserve(trees.size());
  w.tree_root_vertex.reserve(trees.size());
  w.vertex_label.assign(w.n_window_vertices, 0);
  for (int k = -K; k <= K; ++k) {
    const WindowTree& tr = trees[k + K];
    if (tr.t.label[0] != bw.b(k))
      throw std::invalid_argument("tree root label disagrees with the walk down-step value");
    const int off = voffset[k + K];
    w.anchor_slot.push_back(w.n_slots());
    w.anchor_label.push_back(tr.t.label[0]);
    w.tree_root_vertex.push_back(off);
    for (int v = 0; v < tr.n_created(); ++v) w.vertex_label[off + v] = tr.t.label[v];
    auto emit = [&](int v, bool stub, int depth) {
      w.slot_vertex.push_back(off + v);
      w.slot_label.push_back(tr.t.label[v]);
      w.slot_tree.push_back(k);
      w.slot_depth.push_back(depth);
      w.slot_stub.push_back(stub ? 1 : 0);
    };
    if (tr.stub[0]) {
      emit(0, true, 0);
    } else {
      auto ch = children_of(tr.t.parent);
      std::vector<std::size_t> next_child(tr.t.parent.size(), 0);
      std::vector<int> depth(tr.t.parent.size(), 0);
      int v = 0;
      emit(0, false, 0);
      for (;;) {
        if (next_child[v] < ch[v].size()) {
          int c = ch[v][next_child[v]++];
          depth[c] = depth[v] + 1;
          if (tr.stub[c]) {
            emit(c, true, depth[c]);
            emit(v, false, depth[v]);
          } else {
            v = c;
            emit(v, false, depth[v]);
          }
        } else if (v != 0) {
          v = tr.t.parent[v];
          emit(v, false, depth[v]);
        } else {
          break;
        }
      }
    }
    if (k == 0) w.root_slot = w.n_slots() - 1;
  }
  const int M = w.n_slots();
  if (M != total_slots) throw std::logic_error("contour length disagrees with tree sizes");
  // The visible label stream can only step down by one at a time: tree edges
  // move labels by at most one, a stub interval begins and ends at the stub's
  // label, and consecutive root labels drop by at most one across tree gaps.
  for (int i = 0; i + 1 < M; ++i)
    if (w.slot_label[i + 1] < w.slot_label[i] - 1)
      throw std::logic_error("visible labels dropped by more than one");

  // First stub at or after each slot (M = none).
  std::vector<int> next_stub(M + 1, M);
  for (int i = M - 1; i >= 0; --i) next_stub[i] = w.slot_stub[i] ? i : next_stub[i + 1];

  // Forward successors: first later slot with label one less.  Because the
  // visible stream never skips a level going down, the first later slot with
  // label <= L-1 has label exactly L-1; it is certain unless an opaque
  // interval intervenes strictly before it (the target itself may be a stub:
  // the arc then ends at the stub vertex, whose first corner it hits).
  std::unordered_map<int, std::vector<int>> by_label;
  for (int i = 0; i < M; ++i) by_label[w.slot_label[i]].push_back(i);
  w.successor.assign(M, -1);
  w.slot_stub_blocked.assign(M, 0);
  for (int i = 0; i < M; ++i) {
    if (w.slot_stub[i]) continue;
    int target = -1;
    auto it = by_label.find(w.slot_label[i] - 1);
    if (it != by_label.end()) {
      auto pos = std::upper_bound(it->second.begin(), it->second.end(), i);
      if (pos != it->second.end()) target = *pos;
    }
    if (target != -1 && next_stub[i + 1] >= target) {
      w.successor[i] = target;
    } else if (next_stub[i + 1] < M && (target == -1 || next_stub[i + 1] < target)) {
      w.slot_stub_blocked[i] = 1;
    }
  }

  // In-arc completeness sweep.  T bounds from below the labels of contour
  // positions to the left whose forward chains could still be pending at the
  // current slot: +inf at the window edge (everything before it is unseen),
  // reset to the stub label at each opaque interval (its first and last
  // corners carry that label and its interior is unseen), and lowered by
  // every visible corner, which intercepts all chains aimed at or below its
  // label.  A corner's true in-arcs are then all certain exactly when T <= L.
  {
    long long T = std::numeric_limits<long long>::max();
    w.slot_in_complete.assign(M, 0);
    for (int i = 0; i < M; ++i) {
      const int L = w.slot_label[i];
      if (w.slot_stub[i]) {
        T = L;
      } else {
        if (T <= L) {
          w.slot_in_complete[i] = 1;
        } else if (next_stub[0] < i) {
          w.slot_stub_blocked[i] = 1;  // an opaque interval precedes this slot
        }
        T = std::min(T, static_cast<long long>(L));
      }
    }
  }

  // Vertex completeness: subtree explored, every corner resolved outward and
  // complete inward.
  w.vertex_complete.assign(w.n_window_vertices, 1);
  for (int i = 0; i < M; ++i)
    if (w.slot_stub[i] || w.successor[i] == -1 || !w.slot_in_complete[i])
      w.vertex_complete[w.slot_vertex[i]] = 0;

  if (w.root_slot < 0 || w.slot_stub[w.root_slot] || w.successor[w.root_slot] == -1) {
    w.certificate = std::max(0, prior_certificate);
    return w;  // root arc not drawable: no map, certificate only from prior
  }

  // Arcs and darts: arc a = (source corner, target slot); dart 2a leaves the
  // source corner, dart 2a+1 enters the target slot.
  std::vector<int> arc_src, arc_dst;
  std::vector<int> slot_arc(M, -1);
  for (int i = 0; i < M; ++i)
    if (w.successor[i] != -1) {
      slot_arc[i] = static_cast<int>(arc_src.size());
      arc_src.push_back(i);
      arc_dst.push_back(w.successor[i]);
    }
  const int A = static_cast<int>(arc_src.size());

  // Root component over the arc graph.
  const int root_vertex = w.slot_vertex[w.root_slot];
  std::vector<char> in_comp(w.n_window_vertices, 0);
  {
    std::vector<std::vector<int>> adj(w.n_window_vertices);
    for (int a = 0; a < A; ++a) {
      int u = w.slot_vertex[arc_src[a]];
      int v = w.slot_vertex[arc_dst[a]];
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    std::vector<int> stack{root_vertex};
    in_comp[root_vertex] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[u])
        if (!in_comp[v]) {
          in_comp[v] = 1;
          stack.push_back(v);
        }
    }
  }

  // Renumber kept arcs and assemble rotations.  Within one corner's wedge the
  // outgoing arc comes first, then incoming arcs in source order; around a
  // vertex the wedges are concatenated in decreasing slot order (arcs hug the
  // contour forward, so later corners wind further out).  Stored `next` is
  // the clockwise permutation: the reverse of the assembled fan.
  std::vector<int> arc_id(A, -1);
  int kept = 0;
  for (int a = 0; a < A; ++a)
    if (in_comp[w.slot_vertex[arc_src[a]]]) arc_id[a] = kept++;
  const int D = 2 * kept;

  std::vector<std::vector<int>> in_darts(M);
  for (int a = 0; a < A; ++a)
    if (arc_id[a] != -1) in_darts[arc_dst[a]].push_back(2 * arc_id[a] + 1);

  std::vector<std::vector<int>> slots_of(w.n_window_vertices);
  for (int i = 0; i < M; ++i)
    if (in_comp[w.slot_vertex[i]]) slots_of[w.slot_vertex[i]].push_back(i);

  std::vector<int> twin(D), next(D);
  for (int d = 0; d < D; d += 2) {
    twin[d] = d + 1;
    twin[d + 1] = d;
  }
  std::vector<int> fan;
  for (int v = 0; v < w.n_window_vertices; ++v) {
    const auto& sl = slots_of[v];
    if (sl.empty()) continue;
    fan.clear();
    for (auto it = sl.rbegin(); it != sl.rend(); ++it) {
      int i = *it;
      if (slot_arc[i] != -1 && arc_id[slot_arc[i]] != -1) fan.push_back(2 * arc_id[slot_arc[i]]);
      for (int d : in_darts[i]) fan.push_back(d);
    }
    const int kf = static_cast<int>(fan.size());
    for (int a = 0; a < kf; ++a) next[fan[a]] = fan[(a - 1 + kf) % kf];
  }

  const int root_dart = 2 * arc_id[slot_arc[w.root_slot]];
  w.map = build_map(std::move(twin), std::move(next), root_dart, /*marked_vertex=*/-1,
                    /*exterior_dart=*/root_dart + 1);
  w.built = true;

  // Window vertex <-> map vertex translation via the darts.
  w.map_vertex_of.assign(w.n_window_vertices, -1);
  w.window_vertex_of.assign(w.map.n_vertices, -1);
  for (int a = 0; a < A; ++a) {
    if (arc_id[a] == -1) continue;
    w.map_vertex_of[w.slot_vertex[arc_src[a]]] = w.map.origin[2 * arc_id[a]];
    w.map_vertex_of[w.slot_vertex[arc_dst[a]]] = w.map.origin[2 * arc_id[a] + 1];
  }
  for (int v = 0; v < w.n_window_vertices; ++v)
    if (w.map_vertex_of[v] != -1) w.window_vertex_of[w.map_vertex_of[v]] = v;
  w.root_map_vertex = w.map_vertex_of[root_vertex];

  // Certificate: walk any true shortest path out of the root; while it is
  // shorter than the drawn-graph distance to the nearest incomplete vertex,
  // every vertex passed is complete, so each next edge is drawn and the path
  // stays inside the window.  Hence all vertices within that distance minus
  // one are present with exact neighborhoods, and everything not yet drawn
  // (stub interiors, trees beyond the window) lies strictly further out.
  // The drawn-graph distance itself only overestimates true distances, so
  // the radius is sound, and it can only grow when the window grows.
  std::vector<char> vertex_stub_cause(w.n_window_vertices, 0);
  for (int i = 0; i < M; ++i)
    if (w.slot_stub[i] || w.slot_stub_blocked[i]) vertex_stub_cause[w.slot_vertex[i]] = 1;
  std::vector<int> root_dist = graph_distance(w.map, w.root_map_vertex);
  const int INF = std::numeric_limits<int>::max();
  int nearest = INF;
  bool stub_limited = false;
  for (int mv = 0; mv < w.map.n_vertices; ++mv) {
    int wv = w.window_vertex_of[mv];
    if (w.vertex_complete[wv]) continue;
    if (root_dist[mv] < nearest) {
      nearest = root_dist[mv];
      stub_limited = vertex_stub_cause[wv] != 0;
    } else if (root_dist[mv] == nearest) {
      stub_limited = stub_limited || vertex_stub_cause[wv] != 0;
    }
  }
  const int raw = nearest == INF ? 0 : std::max(0, nearest - 1);
  w.certificate = std::max(raw, std::max(0, prior_certificate));
  w.cert_limited_by_stub = stub_limited;
  return w;
}

// --- boundary segment (the windowed boundary path) ---

// Boundary vertices around time zero: verts[zero_pos + t] is the boundary
// vertex at boundary time t, with time 0 at the head of the root edge.  The
// walk extends in both directions while the vertices passed are certified
// complete (their rotations then agree with the infinite map) and ends on the
// first incomplete vertex either way, whose identity is still exact.
struct BoundarySegment {
  std::vector<int> verts;  // map vertex ids
  int zero_pos = 0;

  int lo() const { return -zero_pos; }
  int hi() const { return static_cast<int>(verts.size()) - 1 - zero_pos; }
  int at(int t) const { return verts.at(zero_pos + t); }
};

inline BoundarySegment boundary_segment(const UihpqWindow& w) {
  if (!w.built) throw std::invalid_argument("window has no map");
  const PlanarQuadMap& m = w.map;
  std::vector<int> prev(m.n_darts());
  for (int d = 0; d < m.n_darts(); ++d) prev[m.next[d]] = d;
  auto complete = [&](int map_v) { return w.vertex_complete[w.window_vertex_of[map_v]] != 0; };
  const int start = m.twin[m.root];  // its origin is the boundary vertex at time 0
  // Following the outer face orbit moves to earlier boundary times (the orbit
  // dart after twin(root) starts at the root tail, the vertex at time -1);
  // walking the orbit backwards moves to later ones.
  std::vector<int> back;
  for (int d = start;;) {
    int nd = m.next[m.twin[d]];
    if (nd == start) break;  // wrapped around the whole window orbit
    back.push_back(m.origin[nd]);
    if (!complete(m.origin[nd])) break;
    d = nd;
  }
  // Stepping forward from time t pivots on the rotation of the vertex at t
  // itself, so the forward walk needs the time-0 vertex to be complete.
  std::vector<int> fwd;
  if (complete(m.origin[start])) {
    for (int d = start;;) {
      int pd = m.twin[prev[d]];
      if (pd == start) break;
      fwd.push_back(m.origin[pd]);
      if (!complete(m.origin[pd])) break;
      d = pd;
    }
  }
  BoundarySegment seg;
  seg.verts.assign(back.rbegin(), back.rend());
  seg.zero_pos = static_cast<int>(back.size());
  seg.verts.push_back(m.origin[start]);
  seg.verts.insert(seg.verts.end(), fwd.begin(), fwd.end());
  return seg;
}

// --- ball code: canonical form of the radius-r root ball ---

// Traversal code of the submap induced by vertices within graph distance
// `radius` of the root-dart tail, explored from the root dart with the twin
// and induced-rotation generators.  Purely structural, so two windows agree
// on a radius exactly when their root balls agree as rooted rotation systems.
inline std::vector<int> ball_code(const PlanarQuadMap& m, int radius) {
  std::vector<int> dist = graph_distance(m, m.origin[m.root]);
  auto kept = [&](int d) { return dist[m.origin[d]] <= radius && dist[m.head(d)] <= radius; };
  if (radius < 0 || !kept(m.root)) return {-1};
  auto next_kept = [&](int d) {
    int e = m.next[d];
    while (!kept(e)) e = m.next[e];
    return e;  // terminates: d itself is kept
  };
  std::vector<int> canon(m.n_darts(), -1), order;
  canon[m.root] = 0;
  order.push_back(m.root);
  for (std::size_t qi = 0; qi < order.size(); ++qi) {
    int d = order[qi];
    for (int e : {m.twin[d], next_kept(d)})
      if (canon[e] == -1) {
        canon[e] = static_cast<int>(order.size());
        order.push_back(e);
      }
  }
  std::vector<int> code;
  code.reserve(2 * order.size() + 1);
  for (int d : order) {
    code.push_back(canon[m.twin[d]]);
    code.push_back(canon[next_kept(d)]);
  }
  code.push_back(radius);
  return code;
}

// --- samplers ---

// One window sample: walk window, trees, build.  Deterministic in (base, K,
// budget); a larger K or budget extends the same realization.
inline UihpqWindow sample_uihpq_window(int K, const Rng& base, int budget = 8192,
                                       int prior_certificate = 0) {
  ReflectedWalkWindow bw = reflected_walk_window(K, base.child(1));
  std::vector<WindowTree> trees = sample_uihpq_trees(K, budget, base.child(2), bw);
  UihpqWindow w = build_uihpq_window(trees, bw, prior_certificate);
  w.budget = budget;
  return w;
}

// Doubles the window until the certificate reaches `min_certificate`: the
// node budget when truncation limits it, both width and budget otherwise.
// Returns the first sufficient window; throws if the growth cap is hit.
inline UihpqWindow sample_uihpq_window_certified(const Rng& base, int min_certificate,
                                                 int K0 = 4, int budget0 = 1024,
                                                 int max_doublings = 24) {
  int K = std::max(1, K0);
  int budget = std::max(4, budget0);
  int prior = 0;
  for (int it = 0; it <= max_doublings; ++it) {
    UihpqWindow w = sample_uihpq_window(K, base, budget, prior);
    if (w.certificate >= min_certificate) return w;
    prior = w.certificate;
    if (!w.built) {
      K *= 2;  // the root arc was not drawable: either dimension may bind
      budget *= 2;
    } else if (w.cert_limited_by_stub) {
      budget *= 2;  // truncation binds: explore deeper, same width
    } else {
      K *= 2;  // width binds
    }
  }
  throw std::runtime_error("certified window did not reach the requested radius");
}

}  // namespace bmaps
