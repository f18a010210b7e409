#pragma once
// Boundary pruning of a quadrangulation with (general) boundary: split the
// map into a core whose boundary is a simple cycle plus the dangling parts
// pinched at single boundary vertices, with enough bookkeeping to reattach
// everything bit-exactly.  On top of that: harvesting certified parts from
// half-plane windows as i.i.d. free-Boltzmann samples, a pooled generator of
// such samples, re-rooting a fresh general-boundary map around a simple core,
// and the partial-sum process of (perimeter + 1) along the core boundary used
// to compare boundary clocks.
//
// Orientation conventions used throughout: the exterior face lies on the LEFT
// of its darts, so the exterior face orbit traverses the boundary with the
// map on its right ("backward").  The forward boundary walk (interior on the
// left) is the reversed orbit of the twins.  A cut corner is chosen by an
// anchor dart on the exterior face; the side of the cut is treated as the
// outside, which is what resolves pinches whose two visits straddle the cut.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "bmaps/mapcore.hpp"
#include "bmaps/rng.hpp"
#include "bmaps/uihpq.hpp"

namespace bmaps {

// One pinched-off component.  `map` is the standalone part, rooted at its
// first forward boundary dart (origin = the pinch vertex, interior on the
// left) with the exterior on that dart's twin side.  Vertex-only parts (the
// trivial atom) carry no map.
struct DanglingPart {
  PlanarQuadMap map;            // meaningful iff !vertex_only
  bool vertex_only = true;
  int attach_core_vertex = -1;  // pinch vertex, core vertex id
  int attach_part_vertex = -1;  // the same vertex inside `map`
  int lambda_time = -1;         // position along the core boundary walk
  int perimeter = 0;            // boundary-walk steps of the part (even)
  int interior_faces = 0;
  bool certified = false;       // pinch and every part vertex fully explored
  // Exact-reattachment bookkeeping: the core dart at the pinch vertex whose
  // clockwise successor is the part's dart fan, and the fan itself (part
  // dart ids, clockwise order; the block ends with `map.root`).
  int splice_after_core_dart = -1;
  std::vector<int> fan_part_darts;
  int marked_part_vertex = -1;  // original marked vertex if it fell inside
};

struct PruningResult {
  PlanarQuadMap core;               // boundary is a simple cycle
  std::vector<char> core_complete;  // per core vertex: fully explored?
  std::vector<DanglingPart> dangling;  // nontrivial parts, boundary order
  int e_s = -1;  // core root dart; its head is v0
  int v0 = -1;   // core vertex carrying the (possibly dangling) original root
  bool root_was_dangling = false;
  int root_part = -1;          // index into dangling when root_was_dangling
  int root_dart_in_part = -1;  // part dart id of the original root
  // Core boundary walk, one entry per boundary vertex (simple cycle), in
  // forward order starting at the cut corner.
  std::vector<int> lambda_s;       // core vertex ids
  int lambda_zero = -1;            // index of v0 in lambda_s
  std::vector<int> perim_at;       // part perimeter at each position (0: none)
  std::vector<int> dangling_at;    // index into dangling, or -1
  std::vector<char> certified_at;  // position fully explored (incl. its part)
  std::vector<int> out_dart_at;    // core dart leaving lambda_s[t] forward
};

namespace detail {

// Submap induced by a set of kept darts: rotations are the induced
// subsequences of the full clockwise orders.  Dart ids are compacted in
// increasing old-id order.
struct SubmapArrays {
  std::vector<int> twin, next;
  std::vector<int> new_dart;  // old dart -> new dart or -1
};

inline SubmapArrays induced_submap(const PlanarQuadMap& m, const std::vector<char>& keep) {
  const int D = m.n_darts();
  SubmapArrays s;
  s.new_dart.assign(D, -1);
  int nd = 0;
  for (int d = 0; d < D; ++d)
    if (keep[d]) s.new_dart[d] = nd++;
  s.twin.assign(nd, -1);
  s.next.assign(nd, -1);
  for (int v = 0; v < m.n_vertices; ++v) {
    const int deg = m.degree(v);
    const int start = m.vdart[m.vdart_start[v]];
    // Walk the full rotation once; link consecutive kept darts.
    int first_kept = -1, prev_kept = -1, d = start;
    for (int i = 0; i < deg; ++i, d = m.next[d]) {
      if (!keep[d]) continue;
      if (first_kept < 0)
        first_kept = d;
      else
        s.next[s.new_dart[prev_kept]] = s.new_dart[d];
      prev_kept = d;
    }
    if (first_kept >= 0) s.next[s.new_dart[prev_kept]] = s.new_dart[first_kept];
  }
  for (int d = 0; d < D; ++d) {
    if (!keep[d]) continue;
    if (!keep[m.twin[d]]) throw std::logic_error("induced submap would break an edge");
    s.twin[s.new_dart[d]] = s.new_dart[m.twin[d]];
  }
  return s;
}

// New vertex id of old vertex v in a submap, via any kept dart at v.
inline int submap_vertex(const PlanarQuadMap& m, const PlanarQuadMap& sub,
                         const SubmapArrays& s, int v) {
  for (int i = m.vdart_start[v]; i < m.vdart_start[v + 1]; ++i) {
    const int d = m.vdart[i];
    if (s.new_dart[d] >= 0) return sub.origin[s.new_dart[d]];
  }
  return -1;
}

}  // namespace detail

// A dart on the exterior face whose origin is not fully explored (smallest
// dart id), or -1 when every boundary vertex is complete.
inline int frontier_anchor(const PlanarQuadMap& m, const std::vector<char>& complete) {
  for (int d = 0; d < m.n_darts(); ++d)
    if (m.face_of[d] == m.exterior_face && !complete[m.origin[d]]) return d;
  return -1;
}

// Prune the map into core + dangling parts.  `anchor_dart` must lie on the
// exterior face; its origin's corner is the cut, treated as the outside.  By
// default the cut is placed at the root corner (fully-known finite maps).
// `complete` marks fully-explored vertices (empty: all complete).
inline PruningResult prune(const PlanarQuadMap& m, int anchor_dart = -1,
                           std::vector<char> complete = {}) {
  if (complete.empty()) complete.assign(m.n_vertices, 1);
  if (static_cast<int>(complete.size()) != m.n_vertices)
    throw std::invalid_argument("complete mask has wrong size");
  if (anchor_dart < 0) anchor_dart = boundary_start(m);
  if (anchor_dart < 0 || anchor_dart >= m.n_darts() ||
      m.face_of[anchor_dart] != m.exterior_face)
    throw std::invalid_argument("anchor dart must lie on the exterior face");

  // Exterior orbit from the anchor, then the forward boundary walk.
  std::vector<int> orb;
  for (int d = anchor_dart;;) {
    orb.push_back(d);
    d = m.face_next(d);
    if (d == anchor_dart) break;
  }
  const int B = static_cast<int>(orb.size());
  std::vector<int> fwd(B), u(B);
  for (int i = 0; i < B; ++i) fwd[i] = m.twin[orb[B - 1 - i]];
  for (int i = 0; i < B; ++i) u[i] = m.origin[fwd[i]];
  for (int i = 0; i < B; ++i)
    if (m.head(fwd[i]) != u[(i + 1) % B])
      throw std::logic_error("boundary walk is not a closed path");

  // Stack parse over consecutive-visit gaps.  A gap of a revisited vertex is
  // a true excursion exactly when every interior walk vertex is complete:
  // unexplored regions (frontier arcs and the holes left by truncated
  // subtrees) merge into the exterior face, so any hidden structure inside a
  // would-be excursion puts an incomplete vertex onto its stretch of the
  // walk.  A clean interior therefore proves both that the two visits are
  // consecutive boundary times of the pinch and that the enclosed region is
  // fully explored.  Gaps that fail the test do not close: their contents
  // stay with the core (as positions that can never certify) so that the
  // unexplored side is never swallowed into a fake part.  Accepted gaps
  // chain into runs; a vertex whose gaps are all accepted gets one run, the
  // classical excursion span.  Two accepted gaps can never interleave: true
  // excursions are laminar, and the failing side of an apparent interleaving
  // always contains an incomplete vertex.
  std::vector<int> badpre(B + 1, 0);
  for (int i = 0; i < B; ++i) badpre[i + 1] = badpre[i] + (complete[u[i]] ? 0 : 1);
  struct Run {
    int v, first, last;  // claims walk steps [first, last); closes at last
  };
  struct Ent {
    int v;
    int last;            // latest visit position
    int run_first = -1;  // start of the currently open run, -1 when none
    std::vector<Run> closed;  // runs cut short by a later rejected gap
  };
  std::vector<Ent> stack;
  std::vector<int> open(m.n_vertices, -1);
  std::vector<char> gap_rejected(m.n_vertices, 0);
  for (int i = 0; i < B; ++i) {
    const int v = u[i];
    if (open[v] < 0) {
      open[v] = static_cast<int>(stack.size());
      stack.push_back({v, i, -1, {}});
      continue;
    }
    Ent& e = stack[open[v]];
    if (badpre[i] - badpre[e.last + 1] == 0) {
      // Accepted: everything since the previous visit dangles at v.  Entries
      // opened inside are internal structure of the part, not parts.
      while (static_cast<int>(stack.size()) > open[v] + 1) {
        open[stack.back().v] = -1;
        stack.pop_back();
      }
      if (e.run_first < 0) e.run_first = e.last;
      e.last = i;
    } else {
      gap_rejected[v] = 1;
      if (e.run_first >= 0) {
        e.closed.push_back({v, e.run_first, e.last});
        e.run_first = -1;
      }
      e.last = i;
    }
  }
  // Runs of surviving entries are the dangling parts (popped entries lie
  // inside an accepted gap, so their runs were internal after all).
  std::vector<Run> runs;
  for (Ent& e : stack) {
    for (const Run& r : e.closed) runs.push_back(r);
    if (e.run_first >= 0) runs.push_back({e.v, e.run_first, e.last});
  }
  std::sort(runs.begin(), runs.end(),
            [](const Run& a, const Run& b) { return a.first < b.first; });

  // Each span's part is the region enclosed by its excursion loops.  Flood
  // interior faces outward from the faces on the inner side of the walk:
  // this also picks up pockets sealed behind faces with doubled corners at
  // the pinch, which a graph search from the walk vertices would miss.
  std::vector<int> face_part(m.n_faces, -1);
  std::vector<int> pos_of_fwd(m.n_darts(), -1);
  for (int i = 0; i < B; ++i) pos_of_fwd[fwd[i]] = i;
  const int S = static_cast<int>(runs.size());
  std::vector<int> faces_in_span(S, 0);
  for (int s = 0; s < S; ++s) {
    const Run& e = runs[s];
    std::vector<int> queue;  // darts of freshly flooded faces
    auto flood = [&](int d) {
      const int f = m.face_of[d];
      if (f == m.exterior_face)
        throw std::logic_error("excursion region floods the exterior");
      if (face_part[f] == s) return;
      if (face_part[f] != -1) throw std::logic_error("excursion regions overlap");
      face_part[f] = s;
      ++faces_in_span[s];
      int d2 = d;
      do {
        queue.push_back(d2);
        d2 = m.face_next(d2);
      } while (d2 != d);
    };
    for (int j = e.first; j < e.last; ++j)
      if (m.face_of[fwd[j]] != m.exterior_face) flood(fwd[j]);
    while (!queue.empty()) {
      const int d = queue.back();
      queue.pop_back();
      const int back = m.twin[d];
      if (m.face_of[back] == m.exterior_face) {
        const int j = pos_of_fwd[d];
        if (j < e.first || j >= e.last)
          throw std::logic_error("excursion region leaks past its span");
        continue;
      }
      flood(back);
    }
  }

  // Ownership per position and per vertex; pinches, and every vertex the
  // core walk still visits, stay with the core.
  std::vector<int> pos_span(B, -1);
  for (int s = 0; s < S; ++s)
    for (int j = runs[s].first; j < runs[s].last; ++j) {
      if (pos_span[j] != -1) throw std::logic_error("excursion spans overlap");
      pos_span[j] = s;
    }
  std::vector<int> v_part(m.n_vertices, -1);
  for (int d = 0; d < m.n_darts(); ++d)
    if (face_part[m.face_of[d]] >= 0)
      v_part[m.origin[d]] = face_part[m.face_of[d]];
  for (int s = 0; s < S; ++s)
    for (int j = runs[s].first + 1; j < runs[s].last; ++j) v_part[u[j]] = s;
  for (int i = 0; i < B; ++i)
    if (pos_span[i] < 0) v_part[u[i]] = -1;

  // A dart belongs to span s when either side of its edge does: a face of
  // the region, or a step of the excursion walk.
  auto dart_span = [&](int d) {
    int s = std::max(face_part[m.face_of[d]], face_part[m.face_of[m.twin[d]]]);
    if (s < 0 && pos_of_fwd[d] >= 0) s = pos_span[pos_of_fwd[d]];
    if (s < 0 && pos_of_fwd[m.twin[d]] >= 0) s = pos_span[pos_of_fwd[m.twin[d]]];
    return s;
  };

  PruningResult pr;

  // Where does the original root live?
  const int root_span = dart_span(m.root);
  pr.root_was_dangling = root_span >= 0;

  // Core submap: everything no span claims.
  std::vector<char> keep_core(m.n_darts(), 0);
  for (int d = 0; d < m.n_darts(); ++d) keep_core[d] = dart_span(d) < 0;
  const auto sc = detail::induced_submap(m, keep_core);

  // The re-rooted edge: the original root when it survives, otherwise the
  // forward boundary dart arriving at the pinch of the root's part.
  int e_s_old;
  if (!pr.root_was_dangling) {
    e_s_old = m.root;
  } else {
    e_s_old = fwd[(runs[root_span].first + B - 1) % B];
  }
  if (sc.new_dart[e_s_old] < 0) throw std::logic_error("re-rooted edge not in core");
  pr.core = build_map(sc.twin, sc.next, sc.new_dart[e_s_old], -1,
                      sc.new_dart[m.twin[e_s_old]]);
  pr.e_s = pr.core.root;
  pr.v0 = pr.core.head(pr.e_s);
  if (m.marked_vertex >= 0 && v_part[m.marked_vertex] < 0)
    pr.core.marked_vertex = detail::submap_vertex(m, pr.core, sc, m.marked_vertex);
  pr.core_complete.assign(pr.core.n_vertices, 0);
  for (int v = 0; v < m.n_vertices; ++v)
    if (v_part[v] < 0) {
      const int cv = detail::submap_vertex(m, pr.core, sc, v);
      if (cv >= 0) pr.core_complete[cv] = complete[v];
    }

  // Per-position boundary data, and the parts themselves.
  pr.lambda_s.resize(T);
  pr.perim_at.assign(T, 0);
  pr.dangling_at.assign(T, -1);
  pr.certified_at.assign(T, 0);
  pr.out_dart_at.resize(T);
  std::vector<int> span_at(T, -1);
  for (int s = 0; s < static_cast<int>(spans.size()); ++s) span_at[spans[s]] = s;
  const int v0_old = m.head(e_s_old);
  for (int t = 0; t < T; ++t) {
    const Ent& e = stack[t];
    pr.lambda_s[t] = detail::submap_vertex(m, pr.core, sc, e.v);
    pr.out_dart_at[t] = sc.new_dart[fwd[e.last]];
    if (pr.out_dart_at[t] < 0)
      throw std::logic_error("forward boundary dart missing from core");
    pr.certified_at[t] = complete[e.v];
    if (e.v == v0_old) pr.lambda_zero = t;
  }

  for (int s = 0; s < static_cast<int>(spans.size()); ++s) {
    const int t = spans[s];
    const Ent& e = stack[t];
    DanglingPart part;
    part.vertex_only = false;
    part.attach_core_vertex = pr.lambda_s[t];
    part.lambda_time = t;
    part.perimeter = e.last - e.first;
    if (part.perimeter % 2 != 0) throw std::logic_error("odd dangling perimeter");

    std::vector<char> keep(m.n_darts(), 0);
    for (int d = 0; d < m.n_darts(); ++d) keep[d] = dart_span(d) == s;
    const auto sp = detail::induced_submap(m, keep);
    part.map = build_map(sp.twin, sp.next, sp.new_dart[fwd[e.first]], -1,
                         sp.new_dart[m.twin[fwd[e.first]]]);
    part.attach_part_vertex = detail::submap_vertex(m, part.map, sp, e.v);
    if (m.marked_vertex >= 0 && v_part[m.marked_vertex] == s)
      part.marked_part_vertex = detail::submap_vertex(m, part.map, sp, m.marked_vertex);
    part.interior_faces = faces_in_span[s];
    if (part.map.n_edges() - part.map.n_vertices + 1 != part.interior_faces)
      throw std::logic_error("part region is not simply connected");

    // The part's dart fan at the pinch sits in one contiguous clockwise
    // block of the pinch's rotation; the core dart just before it is the
    // forward boundary dart leaving the pinch.
    int enter = -1;
    for (int i = m.vdart_start[e.v]; i < m.vdart_start[e.v + 1]; ++i) {
      const int d = m.vdart[i];
      if (!keep[d] && keep[m.next[d]]) {
        if (enter >= 0) throw std::logic_error("part fan is not contiguous");
        enter = d;
      }
    }
    if (enter != fwd[e.last])
      throw std::logic_error("fan splice dart is not the forward out-dart");
    part.splice_after_core_dart = sc.new_dart[enter];
    for (int d = m.next[enter]; keep[d]; d = m.next[d])
      part.fan_part_darts.push_back(sp.new_dart[d]);
    if (part.fan_part_darts.empty() || part.fan_part_darts.back() != part.map.root)
      throw std::logic_error("fan block does not end at the part root");

    part.certified = complete[e.v] != 0;
    for (int v = 0; v < m.n_vertices && part.certified; ++v)
      if (v_part[v] == s && !complete[v]) part.certified = false;
    pr.certified_at[t] = part.certified ? 1 : 0;
    pr.perim_at[t] = part.perimeter;
    pr.dangling_at[t] = static_cast<int>(pr.dangling.size());
    if (pr.root_was_dangling && s == root_span) {
      pr.root_part = pr.dangling_at[t];
      pr.root_dart_in_part = sp.new_dart[m.root];
    }
    pr.dangling.push_back(std::move(part));
  }
  return pr;
}

// Prune a sampled half-plane window: completeness comes from the window's
// per-vertex exploration state and the cut is placed at a frontier corner,
// declaring the unexplored side to be the outside.
inline PruningResult prune_window(const UihpqWindow& w) {
  if (!w.built) throw std::invalid_argument("window has no built map");
  std::vector<char> complete(w.map.n_vertices, 0);
  for (int mv = 0; mv < w.map.n_vertices; ++mv)
    complete[mv] = w.vertex_complete[w.window_vertex_of[mv]];
  int anchor = frontier_anchor(w.map, complete);
  if (anchor < 0) anchor = boundary_start(w.map);
  return prune(w.map, anchor, std::move(complete));
}

// Rebuild the original map from a pruning decomposition, bit-exactly up to
// relabeling (canonical codes match the input's).
inline PlanarQuadMap reattach_all(const PruningResult& pr) {
  std::vector<int> twin = pr.core.twin, next = pr.core.next;
  int marked_dart = -1;
  if (pr.core.marked_vertex >= 0)
    marked_dart = pr.core.vdart[pr.core.vdart_start[pr.core.marked_vertex]];
  int root = pr.root_was_dangling ? -1 : pr.core.root;
  for (int pi = 0; pi < static_cast<int>(pr.dangling.size()); ++pi) {
    const DanglingPart& p = pr.dangling[pi];
    const int off = static_cast<int>(twin.size());
    for (int d = 0; d < p.map.n_darts(); ++d) {
      twin.push_back(p.map.twin[d] + off);
      next.push_back(p.map.next[d] + off);
    }
    const int y = p.splice_after_core_dart;
    next[off + p.fan_part_darts.back()] = next[y];
    next[y] = off + p.fan_part_darts.front();
    if (p.marked_part_vertex >= 0)
      marked_dart = off + p.map.vdart[p.map.vdart_start[p.marked_part_vertex]];
    if (pr.root_was_dangling && pi == pr.root_part)
      root = off + pr.root_dart_in_part;
  }
  if (root < 0) throw std::invalid_argument("decomposition lost its root");
  return build_map(std::move(twin), std::move(next), root, -1,
                   pr.core.twin[pr.e_s], marked_dart);
}

// The sample standing at a certified boundary position: the pinched part
// where there is one, the trivial one-vertex atom elsewhere.
inline DanglingPart part_at(const PruningResult& pr, int t) {
  if (t < 0 || t >= static_cast<int>(pr.lambda_s.size()) || !pr.certified_at[t])
    throw std::invalid_argument("boundary position is not certified");
  if (pr.dangling_at[t] >= 0) return pr.dangling[pr.dangling_at[t]];
  DanglingPart atom;
  atom.attach_core_vertex = pr.lambda_s[t];
  atom.lambda_time = t;
  atom.certified = true;
  return atom;
}

// Certified boundary positions other than v0's yield independent
// free-Boltzmann samples.  Caution: over a fixed window this ensemble is
// size-censored (large parts are the ones that fail to certify), so
// distributional statistics should be collected through prune_certified_span
// / BoltzmannPool below, which force a fixed position range to certify.
inline std::vector<DanglingPart> harvest_boltzmann(const PruningResult& pr) {
  std::vector<DanglingPart> out;
  for (int t = 0; t < static_cast<int>(pr.lambda_s.size()); ++t)
    if (t != pr.lambda_zero && pr.certified_at[t]) out.push_back(part_at(pr, t));
  return out;
}

inline std::vector<DanglingPart> harvest_boltzmann(const UihpqWindow& w) {
  return harvest_boltzmann(prune_window(w));
}

// One half-plane realization, revealed until every pruned boundary position
// within `span` steps of the root (the closed range, v0 included) is
// certified.  A window is a deterministic function of (seed, K, budget) and
// growing either parameter extends the same realization, so the doubling
// ladder only uncovers more of a single infinite map: the parts standing at
// fixed positions are its true parts, free of the size censoring a fixed
// budget would impose (large parts are exactly the ones that fail to
// certify).  ok = false when the growth cap was hit first.
struct SpanPrune {
  UihpqWindow window;
  PruningResult pr;
  bool ok = false;
  int builds = 0;  // ladder steps taken
};

inline SpanPrune prune_certified_span(const Rng& base, int span, int K0 = 12,
                                      int budget0 = 2048, int max_doublings = 12) {
  SpanPrune out;
  int K = std::max(K0, span + 2);
  int budget = std::max(64, budget0);
  for (int it = 0; it <= max_doublings; ++it) {
    UihpqWindow w = sample_uihpq_window(K, base, budget);
    ++out.builds;
    if (w.built) {
      PruningResult pr = prune_window(w);
      const int P = static_cast<int>(pr.lambda_s.size());
      bool all = pr.lambda_zero - span >= 0 && pr.lambda_zero + span < P;
      for (int j = -span; all && j <= span; ++j)
        all = pr.certified_at[pr.lambda_zero + j] != 0;
      if (all) {
        out.window = std::move(w);
        out.pr = std::move(pr);
        out.ok = true;
        return out;
      }
    }
    if (!w.built || w.cert_limited_by_stub) budget *= 2;
    if (!w.built || !w.cert_limited_by_stub) K *= 2;
    // Memory guard: one fully drawn tree costs O(budget); give up on the
    // vanishing fraction of realizations that would need more than this.
    if (budget > (1 << 22) || K > (1 << 13)) break;
  }
  return out;
}

// Stream of i.i.d. free-Boltzmann samples: each fresh half-plane realization
// is revealed until the closed position range v0 +- span is certified, and
// exactly the 2*span non-root positions are harvested (v0 itself carries the
// size-biased root law and is skipped).  Harvesting fixed positions of a
// forcibly revealed stretch keeps the stream unbiased.
class BoltzmannPool {
 public:
  explicit BoltzmannPool(Rng base, int span = 2, int window_K = 12,
                         int tree_budget = 2048)
      : base_(base), span_(std::max(1, span)), window_K_(window_K),
        tree_budget_(tree_budget) {}

  DanglingPart next() {
    while (queue_.empty()) refill();
    DanglingPart p = std::move(queue_.front());
    queue_.pop_front();
    ++samples_drawn_;
    return p;
  }

  long long windows_used() const { return windows_used_; }
  long long samples_drawn() const { return samples_drawn_; }
  long long windows_abandoned() const { return windows_abandoned_; }

 private:
  void refill() {
    for (;;) {
      const Rng child = base_.child(static_cast<int>(seq_++));
      SpanPrune sp = prune_certified_span(child, span_, window_K_, tree_budget_);
      ++windows_used_;
      if (!sp.ok) {
        ++windows_abandoned_;  // growth cap hit; rarer than any test tolerance
        continue;
      }
      for (int j = -span_; j <= span_; ++j)
        if (j != 0) queue_.push_back(part_at(sp.pr, sp.pr.lambda_zero + j));
      return;
    }
  }

  Rng base_;
  std::uint64_t seq_ = 0;
  int span_, window_K_, tree_budget_;
  std::deque<DanglingPart> queue_;
  long long windows_used_ = 0, samples_drawn_ = 0, windows_abandoned_ = 0;
};

struct RerootResult {
  PlanarQuadMap map;
  std::vector<char> complete;  // per map vertex: fully explored?
  int anchor_dart = -1;        // frontier cut for pruning the result
  int root_part_perimeter = 0;
  bool root_is_core_edge = false;
  int pool_enlargements = 0;   // times the root pool had to be enlarged
  long long pool_draws = 0;
};

// Around a pruned core, attach fresh independent free-Boltzmann parts at
// every certified boundary position; at v0 the part is chosen from a pool of
// `root_pool_size` draws with probability proportional to perimeter + 1, and
// the root edge is then uniform among the chosen part's forward boundary
// darts together with the core root edge.
inline RerootResult reroot_uihpq_from_core(const PruningResult& pr, Rng& rng,
                                           BoltzmannPool& pool,
                                           int root_pool_size = 10000) {
  RerootResult out;
  std::vector<int> twin = pr.core.twin, next = pr.core.next;
  // complete[] intent per dart origin; resolved to vertex ids after build.
  std::vector<char> dart_complete(twin.size());
  for (int d = 0; d < static_cast<int>(twin.size()); ++d)
    dart_complete[d] = pr.core_complete[pr.core.origin[d]];

  // Size-biased root part.
  if (root_pool_size < 1) root_pool_size = 1;
  DanglingPart root_part;
  {
    std::vector<DanglingPart> cand;
    long long total = 0;
    bool any_nontrivial = false;
    for (int round = 0; round <= 5; ++round) {
      for (int i = 0; i < root_pool_size; ++i) {
        cand.push_back(pool.next());
        ++out.pool_draws;
        total += cand.back().perimeter + 1;
        any_nontrivial = any_nontrivial || !cand.back().vertex_only;
      }
      if (any_nontrivial) break;
      ++out.pool_enlargements;
    }
    long long r = static_cast<long long>(rng.below(static_cast<std::uint64_t>(total)));
    for (auto& c : cand) {
      r -= c.perimeter + 1;
      if (r < 0) {
        root_part = std::move(c);
        break;
      }
    }
  }
  out.root_part_perimeter = root_part.perimeter;

  int root = -1;
  const int T = static_cast<int>(pr.lambda_s.size());
  for (int t = 0; t < T; ++t) {
    if (!pr.certified_at[t]) continue;
    const bool at_v0 = t == pr.lambda_zero;
    DanglingPart part = at_v0 ? std::move(root_part) : pool.next();
    if (!at_v0) ++out.pool_draws;
    if (part.vertex_only) {
      if (at_v0) {
        root = pr.e_s;  // the only candidate: perimeter + 1 = 1
        out.root_is_core_edge = true;
      }
      continue;
    }
    const PlanarQuadMap& q = part.map;

    // Forward boundary walk of the part (interior on the left).
    std::vector<int> orb;
    for (int d = boundary_start(q);;) {
      orb.push_back(d);
      d = q.face_next(d);
      if (d == orb.front()) break;
    }
    const int P = static_cast<int>(orb.size());
    std::vector<int> pfwd(P);
    for (int i = 0; i < P; ++i) pfwd[i] = q.twin[orb[P - 1 - i]];

    // Attach vertex: uniform over distinct boundary vertices; its fan is cut
    // to end with its first forward out-dart.
    std::vector<int> bverts;
    {
      std::vector<char> seen(q.n_vertices, 0);
      for (int i = 0; i < P; ++i)
        if (!seen[q.origin[pfwd[i]]]) {
          seen[q.origin[pfwd[i]]] = 1;
          bverts.push_back(q.origin[pfwd[i]]);
        }
    }
    const int x = bverts[rng.below(static_cast<std::uint64_t>(bverts.size()))];
    int fx = -1;
    for (int i = 0; i < P && fx < 0; ++i)
      if (q.origin[pfwd[i]] == x) fx = pfwd[i];

    const int off = static_cast<int>(twin.size());
    for (int d = 0; d < q.n_darts(); ++d) {
      twin.push_back(q.twin[d] + off);
      next.push_back(q.next[d] + off);
      dart_complete.push_back(1);
    }
    const int y = pr.out_dart_at[t];
    next[off + fx] = next[y];
    next[y] = off + q.next[fx];

    if (at_v0) {
      const std::uint64_t r = rng.below(static_cast<std::uint64_t>(P + 1));
      if (r < static_cast<std::uint64_t>(P)) {
        root = off + pfwd[r];
      } else {
        root = pr.e_s;
        out.root_is_core_edge = true;
      }
    }
  }
  if (root < 0) throw std::logic_error("v0 position was not certified");

  out.map = build_map(std::move(twin), std::move(next), root, -1,
                      pr.core.twin[pr.e_s]);
  out.complete.assign(out.map.n_vertices, 0);
  for (int d = 0; d < out.map.n_darts(); ++d)
    out.complete[out.map.origin[d]] = dart_complete[d];
  out.anchor_dart = frontier_anchor(out.map, out.complete);
  return out;
}

// Partial sums of (perimeter + 1) along the certified stretch of the core
// boundary starting at v0, on the clock (2^{3/2}/3) sqrt(n) positions per
// unit time and vertical scale n^{-1/2}.  `backward` runs against the walk.
struct SigmaProcess {
  double inv_sqrt_n = 0;
  double clock = 0;
  std::vector<long long> cum;  // cum[k]: sum over the first k+1 positions

  double eval(double t) const {
    if (cum.empty() || t < 0) return 0.0;
    long long k = static_cast<long long>(std::floor(clock * t));
    if (k < 0) return 0.0;
    if (k >= static_cast<long long>(cum.size()))
      k = static_cast<long long>(cum.size()) - 1;
    return inv_sqrt_n * static_cast<double>(cum[static_cast<std::size_t>(k)]);
  }
  double max_time() const {
    return clock > 0 ? static_cast<double>(cum.size()) / clock : 0.0;
  }
};

inline SigmaProcess sigma_process(const PruningResult& pr, double n,
                                  bool backward = false) {
  if (n <= 0) throw std::invalid_argument("need a positive size scale");
  SigmaProcess s;
  s.inv_sqrt_n = 1.0 / std::sqrt(n);
  s.clock = std::pow(2.0, 1.5) / 3.0 * std::sqrt(n);
  const int T = static_cast<int>(pr.lambda_s.size());
  long long acc = 0;
  for (int k = 0; k < T; ++k) {
    const int t = backward ? pr.lambda_zero - k : pr.lambda_zero + k;
    if (t < 0 || t >= T || !pr.certified_at[t]) break;
    acc += pr.perim_at[t] + 1;
    s.cum.push_back(acc);
  }
  return s;
}

}  // namespace bmaps
