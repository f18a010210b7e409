#pragma once
// Combinatorial planar maps with boundary (rotation-system representation),
// the graph-metric engine, and finite curve-decorated metric measure spaces
// with truncation and rescaling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "bmaps/rng.hpp"

namespace bmaps {

// Planar map encoded by two permutations on darts (half-edges): `twin` (the
// edge involution) and `next` (clockwise next dart with the same origin).
// Faces are the orbits of d -> next[twin[d]]; each face lies on the left of
// its darts and consecutive face darts chain head-to-origin. Built once,
// immutable afterwards.
struct PlanarQuadMap {
  std::vector<int> twin;
  std::vector<int> next;
  int root = -1;             // oriented root dart, on the boundary edge
  int exterior_face = -1;    // face id of the outer face
  int marked_vertex = -1;    // distinguished vertex, -1 if none

  // derived by build():
  std::vector<int> origin;      // vertex id per dart
  std::vector<int> face_of;     // face id per dart
  std::vector<int> vdart_start; // CSR of darts per vertex ...
  std::vector<int> vdart;       // ... in discovery order
  std::vector<int> face_degree; // dart count per face
  int n_vertices = 0;
  int n_faces = 0;

  int n_darts() const { return static_cast<int>(twin.size()); }
  int n_edges() const { return n_darts() / 2; }
  int face_next(int d) const { return next[twin[d]]; }
  int head(int d) const { return origin[twin[d]]; }
  int degree(int v) const { return vdart_start[v + 1] - vdart_start[v]; }
  int boundary_length() const { return face_degree[exterior_face]; }
};

// Assemble the derived tables. `exterior_dart` names a dart whose face is the
// outer one (defaults to the root; pass twin(root) when the root's left side
// is an interior face).
inline PlanarQuadMap build_map(std::vector<int> twin, std::vector<int> next, int root,
                               int marked_vertex = -1, int exterior_dart = -1,
                               int marked_dart = -1) {
  PlanarQuadMap m;
  m.twin = std::move(twin);
  m.next = std::move(next);
  m.root = root;
  m.marked_vertex = marked_vertex;
  const int D = m.n_darts();
  if (D == 0 || D % 2 != 0) throw std::invalid_argument("dart count must be positive and even");
  for (int d = 0; d < D; ++d) {
    if (m.twin[d] < 0 || m.twin[d] >= D || m.twin[d] == d || m.twin[m.twin[d]] != d)
      throw std::invalid_argument("twin is not a fixed-point-free involution");
    if (m.next[d] < 0 || m.next[d] >= D) throw std::invalid_argument("next out of range");
  }
  {
    std::vector<char> hit(D, 0);
    for (int d = 0; d < D; ++d) hit[m.next[d]] = 1;
    for (int d = 0; d < D; ++d)
      if (!hit[d]) throw std::invalid_argument("next is not a permutation");
  }
  if (root < 0 || root >= D) throw std::invalid_argument("root out of range");

  m.origin.assign(D, -1);
  std::vector<int> order;  // darts grouped by vertex orbit
  order.reserve(D);
  std::vector<int> vstart{0};
  for (int d = 0; d < D; ++d) {
    if (m.origin[d] != -1) continue;
    int v = m.n_vertices++;
    int e = d;
    do {
      m.origin[e] = v;
      order.push_back(e);
      e = m.next[e];
    } while (e != d);
    vstart.push_back(static_cast<int>(order.size()));
  }
  m.vdart = std::move(order);
  m.vdart_start = std::move(vstart);

  m.face_of.assign(D, -1);
  for (int d = 0; d < D; ++d) {
    if (m.face_of[d] != -1) continue;
    int f = m.n_faces++;
    int deg = 0;
    int e = d;
    do {
      m.face_of[e] = f;
      ++deg;
      e = m.face_next(e);
    } while (e != d);
    m.face_degree.push_back(deg);
  }
  if (exterior_dart == -1) exterior_dart = root;
  m.exterior_face = m.face_of[exterior_dart];
  if (m.marked_vertex == -1 && marked_dart >= 0) m.marked_vertex = m.origin[marked_dart];
  if (m.marked_vertex >= m.n_vertices) throw std::invalid_argument("marked vertex out of range");
  return m;
}

// First boundary dart of the walk around the outer face: rotate clockwise
// around the head of the root dart, starting from the root edge, until a dart
// whose left face is the outer one. -1 when that vertex is not on the
// boundary. The root edge itself may be interior; only its head must touch
// the boundary.
inline int boundary_start(const PlanarQuadMap& m) {
  const int t = m.twin[m.root];
  int d = t;
  do {
    if (m.face_of[d] == m.exterior_face) return d;
    d = m.next[d];
  } while (d != t);
  return -1;
}

// Structural invariants: connectivity, Euler's relation, all-quad interior
// faces, and the head of the root dart lying on the outer face.
inline bool valid_quad_map(const PlanarQuadMap& m, std::string* why = nullptr) {
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  const int D = m.n_darts();
  // connectivity over the dart graph generated by twin and next
  std::vector<char> seen(D, 0);
  std::vector<int> stack{m.root};
  seen[m.root] = 1;
  int cnt = 0;
  while (!stack.empty()) {
    int d = stack.back();
    stack.pop_back();
    ++cnt;
    for (int e : {m.twin[d], m.next[d]}) {
      if (!seen[e]) {
        seen[e] = 1;
        stack.push_back(e);
      }
    }
  }
  if (cnt != D) return fail("map is not connected");
  int V = m.n_vertices, E = m.n_edges(), F = m.n_faces;
  if (V - E + F != 2) return fail("Euler relation fails");
  for (int f = 0; f < F; ++f)
    if (f != m.exterior_face && m.face_degree[f] != 4) return fail("interior face degree != 4");
  if (boundary_start(m) == -1) return fail("root head not on the outer face");
  if (m.boundary_length() % 2 != 0) return fail("odd boundary length");
  return true;
}

// Exterior-face walk as a dart sequence, starting at the head of the root
// dart (see boundary_start). Visits 2l darts; the vertex sequence of origins
// traces the boundary with multiplicity.
inline std::vector<int> boundary_walk(const PlanarQuadMap& m) {
  int start = boundary_start(m);
  if (start == -1) throw std::invalid_argument("root head not on the outer face");
  std::vector<int> walk;
  walk.reserve(m.boundary_length());
  int d = start;
  do {
    walk.push_back(d);
    d = m.face_next(d);
  } while (d != start);
  return walk;
}

inline std::vector<int> graph_distance(const PlanarQuadMap& m, int source) {
  std::vector<int> dist(m.n_vertices, -1);
  std::vector<int> queue;
  queue.reserve(m.n_vertices);
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    int v = queue[qi];
    for (int i = m.vdart_start[v]; i < m.vdart_start[v + 1]; ++i) {
      int u = m.head(m.vdart[i]);
      if (dist[u] == -1) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  for (int v = 0; v < m.n_vertices; ++v)
    if (dist[v] == -1) throw std::logic_error("graph_distance: disconnected map");
  return dist;
}

inline std::vector<double> degree_measure(const PlanarQuadMap& m) {
  std::vector<double> mu(m.n_vertices, 0.0);
  for (int v = 0; v < m.n_vertices; ++v) mu[v] = m.degree(v);
  return mu;
}

// Canonical relabeling of darts by breadth-first search from the root using
// the (twin, next) generators. Two rooted maps are isomorphic exactly when
// their codes agree; the code also pins the marked vertex and the outer face.
inline std::vector<int> canonical_code(const PlanarQuadMap& m) {
  const int D = m.n_darts();
  std::vector<int> canon(D, -1), order;
  order.reserve(D);
  canon[m.root] = 0;
  order.push_back(m.root);
  for (std::size_t qi = 0; qi < order.size(); ++qi) {
    int d = order[qi];
    for (int e : {m.twin[d], m.next[d]}) {
      if (canon[e] == -1) {
        canon[e] = static_cast<int>(order.size());
        order.push_back(e);
      }
    }
  }
  std::vector<int> code;
  code.reserve(2 * D + 3);
  for (int d : order) {
    code.push_back(canon[m.twin[d]]);
    code.push_back(canon[m.next[d]]);
  }
  int marked_rep = -1, ext_rep = D;
  for (int d = 0; d < D; ++d) {
    if (m.origin[d] == m.marked_vertex) marked_rep = std::min(marked_rep == -1 ? D : marked_rep, canon[d]);
    if (m.face_of[d] == m.exterior_face) ext_rep = std::min(ext_rep, canon[d]);
  }
  code.push_back(marked_rep);
  code.push_back(ext_rep);
  code.push_back(m.boundary_length());
  return code;
}

inline std::uint64_t canonical_hash(const PlanarQuadMap& m) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (int x : canonical_code(m)) h = detail::mix64(h ^ static_cast<std::uint64_t>(x + 2));
  return h;
}

// --- curve-decorated metric measure spaces (finite form) ---

struct CurveSample {
  double t;
  int point;
};

// Finite pointed space: explicit distance matrix, point measure, and a curve
// given by samples at strictly increasing times, extended constantly outside
// its interval. The basepoint is the curve value at time 0.
struct CurveDecoratedSpace {
  int n = 0;
  std::vector<double> dist;     // row-major n x n
  std::vector<double> measure;  // one weight per point
  std::vector<CurveSample> curve;

  double d(int i, int j) const { return dist[static_cast<std::size_t>(i) * n + j]; }
  double& d_mut(int i, int j) { return dist[static_cast<std::size_t>(i) * n + j]; }

  int curve_at(double t) const {
    if (curve.empty()) throw std::logic_error("space has no curve");
    if (t <= curve.front().t) return curve.front().point;
    int lo = 0, hi = static_cast<int>(curve.size()) - 1;
    while (lo < hi) {  // largest sample time <= t
      int mid = (lo + hi + 1) / 2;
      if (curve[mid].t <= t)
        lo = mid;
      else
        hi = mid - 1;
    }
    return curve[lo].point;
  }
  int basepoint() const { return curve_at(0.0); }

  double total_mass() const {
    double s = 0.0;
    for (double x : measure) s += x;
    return s;
  }
  double diameter() const {
    double mx = 0.0;
    for (double x : dist) mx = std::max(mx, x);
    return mx;
  }
};

inline bool valid_space(const CurveDecoratedSpace& s, double eps = 1e-9, std::string* why = nullptr) {
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (s.n <= 0 || s.dist.size() != static_cast<std::size_t>(s.n) * s.n) return fail("bad matrix shape");
  if (s.measure.size() != static_cast<std::size_t>(s.n)) return fail("bad measure size");
  for (int i = 0; i < s.n; ++i) {
    if (std::fabs(s.d(i, i)) > eps) return fail("nonzero diagonal");
    if (s.measure[i] < 0.0) return fail("negative mass");
    for (int j = 0; j < s.n; ++j) {
      if (s.d(i, j) < -eps) return fail("negative distance");
      if (std::fabs(s.d(i, j) - s.d(j, i)) > eps) return fail("asymmetric distance");
    }
  }
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j)
      for (int k = 0; k < s.n; ++k)
        if (s.d(i, j) > s.d(i, k) + s.d(k, j) + eps) return fail("triangle inequality fails");
  for (std::size_t i = 0; i + 1 < s.curve.size(); ++i)
    if (!(s.curve[i].t < s.curve[i + 1].t)) return fail("curve times not increasing");
  for (const auto& cs : s.curve)
    if (cs.point < 0 || cs.point >= s.n) return fail("curve point out of range");
  return true;
}

struct MeasuredBall {
  int center = -1;
  double radius = 0.0;
  std::vector<int> members;                 // closed ball, ties included
  std::vector<CurveSample> truncated_curve; // filled when center is the basepoint
};

inline MeasuredBall metric_ball(const CurveDecoratedSpace& s, int center, double r) {
  if (r < 0.0) throw std::invalid_argument("negative radius");
  MeasuredBall b;
  b.center = center;
  b.radius = r;
  for (int i = 0; i < s.n; ++i)
    if (s.d(center, i) <= r) b.members.push_back(i);
  if (!s.curve.empty() && s.basepoint() == center) {
    auto inside = [&](int p) { return s.d(center, p) <= r; };
    // index of the sample defining the curve value at time 0
    int idx0 = 0;
    for (std::size_t i = 0; i < s.curve.size() && s.curve[i].t <= 0.0; ++i) idx0 = static_cast<int>(i);
    int lo = idx0, hi = idx0;
    while (lo - 1 >= 0 && inside(s.curve[lo - 1].point)) --lo;
    while (hi + 1 < static_cast<int>(s.curve.size()) && inside(s.curve[hi + 1].point)) ++hi;
    b.truncated_curve.assign(s.curve.begin() + lo, s.curve.begin() + hi + 1);
  }
  return b;
}

inline MeasuredBall metric_ball(const PlanarQuadMap& m, int center, int r) {
  if (r < 0) throw std::invalid_argument("negative radius");
  MeasuredBall b;
  b.center = center;
  b.radius = r;
  std::vector<int> dist(m.n_vertices, -1);
  std::vector<int> queue{center};
  dist[center] = 0;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    int v = queue[qi];
    b.members.push_back(v);
    if (dist[v] == r) continue;
    for (int i = m.vdart_start[v]; i < m.vdart_start[v + 1]; ++i) {
      int u = m.head(m.vdart[i]);
      if (dist[u] == -1) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  std::sort(b.members.begin(), b.members.end());
  return b;
}

// Metric truncation at radius r around the basepoint: restrict points,
// distances and measure to the closed ball, and freeze the curve at its
// first exit from the ball on each side of time 0.
inline CurveDecoratedSpace truncate_space(const CurveDecoratedSpace& s, double r) {
  if (r <= 0.0) throw std::invalid_argument("truncation radius must be positive");
  MeasuredBall b = metric_ball(s, s.basepoint(), r);
  std::vector<int> reindex(s.n, -1);
  for (std::size_t i = 0; i < b.members.size(); ++i) reindex[b.members[i]] = static_cast<int>(i);
  CurveDecoratedSpace out;
  out.n = static_cast<int>(b.members.size());
  out.dist.resize(static_cast<std::size_t>(out.n) * out.n);
  out.measure.resize(out.n);
  for (int i = 0; i < out.n; ++i) {
    out.measure[i] = s.measure[b.members[i]];
    for (int j = 0; j < out.n; ++j) out.d_mut(i, j) = s.d(b.members[i], b.members[j]);
  }
  out.curve.reserve(b.truncated_curve.size());
  for (const auto& cs : b.truncated_curve) out.curve.push_back({cs.t, reindex[cs.point]});
  return out;
}

// Continuum-units view of a finite map window: distances scaled by
// (9/8)^{1/4} n^{-1/4}, mass deg/(2n) per vertex, and the boundary curve
// lambda reparametrized so eta(t) = lambda(c n^{1/2} t) with c = 2^{3/2}
// (or 2^{3/2}/3 when the boundary statistics are of simple type).
// `lambda` lists boundary vertices at consecutive integer positions and
// `lambda_origin` is the index holding position 0.
inline CurveDecoratedSpace rescale_uihpq(const PlanarQuadMap& m, const std::vector<int>& lambda,
                                         int lambda_origin, double n, bool simple_boundary = false) {
  if (n <= 0.0) throw std::invalid_argument("scale parameter must be positive");
  if (m.n_vertices > 6000) throw std::invalid_argument("matrix form limited to small windows");
  CurveDecoratedSpace out;
  out.n = m.n_vertices;
  out.dist.assign(static_cast<std::size_t>(out.n) * out.n, 0.0);
  const double unit = std::pow(9.0 / 8.0, 0.25) * std::pow(n, -0.25);
  for (int v = 0; v < out.n; ++v) {
    std::vector<int> dv = graph_distance(m, v);
    for (int u = 0; u < out.n; ++u) out.d_mut(v, u) = unit * dv[u];
  }
  out.measure = degree_measure(m);
  for (double& x : out.measure) x /= 2.0 * n;
  const double clock = (simple_boundary ? std::pow(2.0, 1.5) / 3.0 : std::pow(2.0, 1.5)) * std::sqrt(n);
  for (int i = 0; i < static_cast<int>(lambda.size()); ++i)
    out.curve.push_back({(i - lambda_origin) / clock, lambda[i]});
  return out;
}

}  // namespace bmaps
