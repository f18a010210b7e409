#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <vector>

#include "bmaps/mapcore.hpp"
#include "bmaps/pruning.hpp"
#include "bmaps/rng.hpp"
#include "bmaps/uihpq.hpp"

using namespace bmaps;

namespace {

// Quadrilateral 0-1-2-3 with a pendant quadrilateral 0-4-5-6 hanging at
// vertex 0.  Darts 2e, 2e+1 are the two sides of edge e; the exterior walk
// is an octagon visiting vertex 0 twice.
PlanarQuadMap pendant_map(int root, int exterior_dart) {
  std::vector<int> twin(16), next(16);
  for (int d = 0; d < 16; ++d) twin[d] = d ^ 1;
  next[0] = 15; next[15] = 8; next[8] = 7; next[7] = 0;  // vertex 0
  next[2] = 1; next[1] = 2;                              // vertex 1
  next[4] = 3; next[3] = 4;                              // vertex 2
  next[6] = 5; next[5] = 6;                              // vertex 3
  next[10] = 9; next[9] = 10;                            // vertex 4
  next[12] = 11; next[11] = 12;                          // vertex 5
  next[14] = 13; next[13] = 14;                          // vertex 6
  return build_map(twin, next, root, -1, exterior_dart);
}

PlanarQuadMap four_cycle() {
  std::vector<int> twin(8), next(8);
  for (int d = 0; d < 8; ++d) twin[d] = d ^ 1;
  next[0] = 7; next[7] = 0;
  next[2] = 1; next[1] = 2;
  next[4] = 3; next[3] = 4;
  next[6] = 5; next[5] = 6;
  return build_map(twin, next, 0, -1, 1);
}

// Three pendant edges at a hub; two of them dangle behind the hub when the
// root sits on the third.
PlanarQuadMap three_star() {
  std::vector<int> twin(6), next(6);
  for (int d = 0; d < 6; ++d) twin[d] = d ^ 1;
  next[0] = 2; next[2] = 4; next[4] = 0;  // hub
  next[1] = 1; next[3] = 3; next[5] = 5;
  return build_map(twin, next, 4, -1, 5);
}

std::vector<int> walk_vertices_of(const PlanarQuadMap& m) {
  std::vector<int> vs;
  for (int d : boundary_walk(m)) vs.push_back(m.origin[d]);
  return vs;
}

}  // namespace

TEST_CASE("pruning: pendant quadrilateral pinched at one boundary vertex") {
  const PlanarQuadMap m = pendant_map(0, 1);
  REQUIRE(valid_quad_map(m));
  REQUIRE(m.boundary_length() == 8);

  const PruningResult pr = prune(m);
  REQUIRE(pr.dangling.size() == 1);
  const DanglingPart& p = pr.dangling[0];
  REQUIRE_FALSE(p.vertex_only);
  REQUIRE(p.perimeter == 4);
  REQUIRE(p.interior_faces == 1);
  REQUIRE(p.map.n_edges() == 4);
  REQUIRE(p.map.boundary_length() == 4);
  REQUIRE(p.certified);
  REQUIRE(p.map.origin[p.map.root] == p.attach_part_vertex);

  REQUIRE_FALSE(pr.root_was_dangling);
  REQUIRE(pr.e_s == pr.core.root);
  REQUIRE(pr.core.n_edges() == 4);
  REQUIRE(pr.core.boundary_length() == 4);
  REQUIRE(canonical_code(pr.core) == canonical_code(four_cycle()));

  REQUIRE(pr.lambda_s.size() == 4);
  REQUIRE(pr.lambda_zero == 0);
  REQUIRE(pr.perim_at == std::vector<int>{0, 0, 0, 4});
  REQUIRE(pr.dangling_at == std::vector<int>{-1, -1, -1, 0});
  for (char c : pr.certified_at) REQUIRE(c == 1);
  REQUIRE(pr.lambda_s[3] == p.attach_core_vertex);

  // Forward out-darts chain head-to-origin around the core boundary.
  for (int t = 0; t < 4; ++t) {
    REQUIRE(pr.core.origin[pr.out_dart_at[t]] == pr.lambda_s[t]);
    REQUIRE(pr.core.head(pr.out_dart_at[t]) == pr.lambda_s[(t + 1) % 4]);
  }

  REQUIRE(canonical_code(reattach_all(pr)) == canonical_code(m));

  // Certified positions other than v0's: two bare vertices and the part.
  const auto h = harvest_boltzmann(pr);
  REQUIRE(h.size() == 3);
  int atoms = 0, nontrivial = 0;
  for (const auto& q : h) (q.vertex_only ? atoms : nontrivial)++;
  REQUIRE(atoms == 2);
  REQUIRE(nontrivial == 1);
}

TEST_CASE("pruning: root edge inside the pendant re-roots to the core") {
  const PlanarQuadMap m = pendant_map(8, 9);  // root dart 0 -> 4, dangling side
  REQUIRE(valid_quad_map(m));

  // Anchor on the old core side: the pendant dangles and carried the root.
  const PruningResult pr = prune(m, 1);
  REQUIRE(pr.root_was_dangling);
  REQUIRE(pr.dangling.size() == 1);
  REQUIRE(pr.root_part == 0);
  REQUIRE(pr.dangling[0].perimeter == 4);
  REQUIRE(canonical_code(pr.core) == canonical_code(four_cycle()));
  // The re-rooted edge arrives at the pinch: its head is v0.
  REQUIRE(pr.core.head(pr.e_s) == pr.v0);
  REQUIRE(pr.v0 == pr.dangling[0].attach_core_vertex);
  REQUIRE(pr.lambda_s[pr.lambda_zero] == pr.v0);
  // The original root dart is remembered inside the part.
  REQUIRE(pr.root_dart_in_part >= 0);
  REQUIRE(canonical_code(reattach_all(pr)) == canonical_code(m));
}

TEST_CASE("pruning: the cut corner decides which side dangles") {
  const PlanarQuadMap m = pendant_map(8, 9);
  // Anchor inside the pendant: now the other quadrilateral dangles.
  const int anchor = boundary_start(m);
  REQUIRE(m.face_of[anchor] == m.exterior_face);
  const PruningResult pr = prune(m, anchor);
  REQUIRE_FALSE(pr.root_was_dangling);
  REQUIRE(pr.dangling.size() == 1);
  REQUIRE(pr.dangling[0].perimeter == 4);
  REQUIRE(canonical_code(pr.core) ==
          canonical_code(build_map(std::vector<int>{1, 0, 3, 2, 5, 4, 7, 6},
                                   std::vector<int>{7, 2, 1, 4, 3, 6, 5, 0}, 0,
                                   -1, 1)));
  REQUIRE(canonical_code(reattach_all(pr)) == canonical_code(m));
}

TEST_CASE("pruning: already-simple boundaries come back untouched") {
  for (const PlanarQuadMap& m : {four_cycle()}) {
    const PruningResult pr = prune(m);
    REQUIRE(pr.dangling.empty());
    REQUIRE_FALSE(pr.root_was_dangling);
    REQUIRE(canonical_code(pr.core) == canonical_code(m));
    REQUIRE(pr.lambda_s.size() == static_cast<std::size_t>(m.boundary_length()));
    REQUIRE(canonical_code(reattach_all(pr)) == canonical_code(m));
  }
  // Single edge: the smallest boundary map.
  const PlanarQuadMap e = build_map(std::vector<int>{1, 0},
                                    std::vector<int>{0, 1}, 0, -1, 0);
  const PruningResult pr = prune(e);
  REQUIRE(pr.dangling.empty());
  REQUIRE(pr.lambda_s.size() == 2);
  REQUIRE(canonical_code(reattach_all(pr)) == canonical_code(e));
}

TEST_CASE("pruning: two pendants at one vertex merge into a single part") {
  const PlanarQuadMap m = three_star();
  const PruningResult pr = prune(m);
  REQUIRE(pr.dangling.size() == 1);
  const DanglingPart& p = pr.dangling[0];
  REQUIRE(p.perimeter == 4);
  REQUIRE(p.interior_faces == 0);
  REQUIRE(p.map.n_edges() == 2);
  REQUIRE(p.map.n_vertices == 3);
  REQUIRE(pr.core.n_edges() == 1);
  REQUIRE(canonical_code(reattach_all(pr)) == canonical_code(m));
}

TEST_CASE("pruning: window decompositions reattach bit-exactly") {
  int built = 0;
  long long positions = 0, perim_sum = 0;
  for (int i = 0; i < 24; ++i) {
    const UihpqWindow w = sample_uihpq_window(6, Rng(1728).child(i), 4096);
    if (!w.built) continue;  // the root arc is not always drawable
    ++built;
    const PruningResult pr = prune_window(w);

    // The core boundary is a simple cycle matching lambda_s.
    const auto vs = walk_vertices_of(pr.core);
    REQUIRE(vs.size() == pr.lambda_s.size());
    REQUIRE(std::set<int>(vs.begin(), vs.end()).size() == vs.size());

    // Quadrangulation bookkeeping on every part.
    int part_darts = 0;
    for (const DanglingPart& p : pr.dangling) {
      REQUIRE(p.perimeter % 2 == 0);
      REQUIRE(p.map.boundary_length() == p.perimeter);
      REQUIRE(p.map.n_edges() == 2 * p.interior_faces + p.perimeter / 2);
      REQUIRE(p.map.origin[p.map.root] == p.attach_part_vertex);
      part_darts += p.map.n_darts();
    }
    REQUIRE(pr.core.n_darts() + part_darts == w.map.n_darts());

    // Forward out-darts chain around the core boundary.
    const int T = static_cast<int>(pr.lambda_s.size());
    for (int t = 0; t < T; ++t) {
      REQUIRE(pr.core.origin[pr.out_dart_at[t]] == pr.lambda_s[t]);
      REQUIRE(pr.core.head(pr.out_dart_at[t]) == pr.lambda_s[(t + 1) % T]);
    }

    REQUIRE(canonical_code(reattach_all(pr)) == canonical_code(w.map));

    for (int t = 0; t < T; ++t)
      if (pr.certified_at[t]) {
        ++positions;
        perim_sum += pr.perim_at[t] + 1;
      }
  }
  REQUIRE(built >= 12);
  // Positions that happen to certify inside a fixed-budget window are few and
  // form a size-censored ensemble (big parts fail to certify), so no
  // distributional claim is made here; the unbiased statistics live in the
  // pool tests below.
  std::printf("[pruning] %lld certified positions, mean perim+1 = %.3f\n",
              positions,
              positions ? static_cast<double>(perim_sum) / positions : 0.0);
  REQUIRE(positions >= 5);
}

namespace {

struct HarvestStats {
  double mean = 0, se = 0, atom_freq = 0, two_gon_freq = 0;
  std::vector<int> edge_counts;
  long long windows = 0, abandoned = 0;
};

HarvestStats harvest_stats(std::uint64_t seed, int n) {
  BoltzmannPool pool(Rng(seed), /*span=*/3, /*window_K=*/12, /*tree_budget=*/1024);
  HarvestStats st;
  st.edge_counts.reserve(n);
  long long sum = 0;
  long double sumsq = 0;
  int atoms = 0, two_gons = 0;
  for (int i = 0; i < n; ++i) {
    const DanglingPart p = pool.next();
    const int w = p.perimeter + 1;
    sum += w;
    sumsq += static_cast<long double>(w) * w;
    if (p.vertex_only) {
      ++atoms;
      st.edge_counts.push_back(0);
    } else {
      if (p.perimeter == 2 && p.interior_faces == 0) ++two_gons;
      st.edge_counts.push_back(p.map.n_edges());
    }
  }
  st.mean = static_cast<double>(sum) / n;
  st.se = std::sqrt(std::max(0.0L, sumsq / n - static_cast<long double>(st.mean) * st.mean) / n);
  st.atom_freq = static_cast<double>(atoms) / n;
  st.two_gon_freq = static_cast<double>(two_gons) / n;
  st.windows = pool.windows_used();
  st.abandoned = pool.windows_abandoned();
  return st;
}

}  // namespace

TEST_CASE("harvest: part sizes follow the free Boltzmann profile") {
  const int N = 20000;
  const HarvestStats st = harvest_stats(0xb017, N);

  // Survival frequencies of the edge count over dyadic thresholds: the tail
  // exponent is -3/4.
  std::vector<int> ms{4, 8, 16, 32, 64};
  std::vector<double> logm, logp;
  for (int m : ms) {
    int c = 0;
    for (int e : st.edge_counts)
      if (e > m) ++c;
    REQUIRE(c > 50);
    logm.push_back(std::log(static_cast<double>(m)));
    logp.push_back(std::log(static_cast<double>(c) / N));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int K = static_cast<int>(ms.size());
  for (int i = 0; i < K; ++i) {
    sx += logm[i];
    sy += logp[i];
    sxx += logm[i] * logm[i];
    sxy += logm[i] * logp[i];
  }
  const double slope = (K * sxy - sx * sy) / (K * sxx - sx * sx);

  std::printf(
      "[harvest] mean perim+1 = %.4f (se %.4f), atom mass = %.4f, tail slope "
      "= %.3f (windows: %lld, abandoned: %lld)\n",
      st.mean, st.se, st.atom_freq, slope, st.windows, st.abandoned);
  REQUIRE(st.abandoned * 100 < st.windows);
  REQUIRE(std::abs(st.mean - 3.0) < std::max(0.1, 4.0 * st.se));
  REQUIRE(st.atom_freq > 0.25);
  REQUIRE(st.atom_freq < 0.75);
  // The bare vertex is the single most likely sample by a clear margin.
  REQUIRE(st.atom_freq > st.two_gon_freq + 0.1);
  REQUIRE(slope > -1.05);
  REQUIRE(slope < -0.45);

  // The atom mass is stable across seeds.
  const HarvestStats st2 = harvest_stats(0xcafe, N / 2);
  std::printf("[harvest] atom mass across seeds: %.4f vs %.4f\n", st.atom_freq,
              st2.atom_freq);
  REQUIRE(std::abs(st.atom_freq - st2.atom_freq) < 0.03);
}

TEST_CASE("re-rooting: the decomposition of the rebuilt map returns the core") {
  BoltzmannPool pool(Rng(0x5150), 2, 12, 1024);
  Rng rng(0xabcd01);
  int done = 0, root_on_core = 0;
  for (int i = 0; i < 8 && done < 6; ++i) {
    const SpanPrune sp = prune_certified_span(Rng(41).child(i), 1, 8, 2048);
    if (!sp.ok) continue;
    const PruningResult& pr = sp.pr;
    const RerootResult rr = reroot_uihpq_from_core(pr, rng, pool, 150);
    ++done;
    root_on_core += rr.root_is_core_edge ? 1 : 0;
    REQUIRE(valid_quad_map(rr.map));

    const int anchor = rr.anchor_dart >= 0 ? rr.anchor_dart : boundary_start(rr.map);
    const PruningResult pr2 = prune(rr.map, anchor, rr.complete);
    REQUIRE(canonical_code(pr2.core) == canonical_code(pr.core));
    REQUIRE(pr2.v0 == pr.v0);
    REQUIRE(pr2.e_s == pr.e_s);
  }
  REQUIRE(done == 6);
  std::printf("[reroot] %d rebuilds, root fell on the core edge %d times\n",
              done, root_on_core);
}

TEST_CASE("re-rooting: the root part is size-biased against the plain pool") {
  BoltzmannPool pool(Rng(0xfeed), 2, 12, 1024);
  Rng rng(0x77aa);

  // Plain pool atom mass.
  const int M = 3000;
  int pool_atoms = 0;
  for (int i = 0; i < M; ++i)
    if (pool.next().vertex_only) ++pool_atoms;
  const double pool_atom_freq = static_cast<double>(pool_atoms) / M;

  // Root-part atom mass under the perimeter-plus-one bias.
  PruningResult pr;
  bool have = false;
  for (int i = 0; i < 8 && !have; ++i) {
    SpanPrune sp = prune_certified_span(Rng(52).child(i), 1, 8, 2048);
    if (!sp.ok) continue;
    pr = std::move(sp.pr);
    have = true;
  }
  REQUIRE(have);
  const int R = 40;
  int root_atoms = 0;
  long long root_weight = 0;
  for (int i = 0; i < R; ++i) {
    const RerootResult rr = reroot_uihpq_from_core(pr, rng, pool, 250);
    if (rr.root_part_perimeter == 0 && rr.root_is_core_edge) ++root_atoms;
    root_weight += rr.root_part_perimeter + 1;
  }
  const double root_atom_freq = static_cast<double>(root_atoms) / R;
  const double root_mean = static_cast<double>(root_weight) / R;
  std::printf(
      "[reroot] atom mass: plain pool %.3f vs size-biased root %.3f; root "
      "mean perim+1 = %.2f\n",
      pool_atom_freq, root_atom_freq, root_mean);
  // The bias multiplies the atom mass by 1/E[perim+1] = 1/3 and pushes the
  // mean perimeter-plus-one above the unbiased value 3.
  REQUIRE(root_atom_freq < pool_atom_freq - 0.15);
  REQUIRE(root_mean > 3.0);
}

TEST_CASE("sigma: deterministic partial sums on the pendant example") {
  const PruningResult pr = prune(pendant_map(0, 1));
  const SigmaProcess s = sigma_process(pr, 4.0);
  // Positions carry perimeters 0,0,0,4 so the sums are 1,2,3,8, scaled by
  // n^{-1/2} = 1/2 on a clock of 2^{3/2}/3 * 2 positions per unit time.
  REQUIRE(s.cum == std::vector<long long>{1, 2, 3, 8});
  const double clock = std::pow(2.0, 1.5) / 3.0 * 2.0;
  REQUIRE(s.clock == Catch::Approx(clock));
  REQUIRE(s.eval(-1.0) == 0.0);
  REQUIRE(s.eval(0.0) == Catch::Approx(0.5));
  REQUIRE(s.eval(0.9) == Catch::Approx(1.0));
  REQUIRE(s.eval(100.0) == Catch::Approx(4.0));
  REQUIRE(s.max_time() == Catch::Approx(4.0 / clock));

  const SigmaProcess b = sigma_process(pr, 4.0, true);
  REQUIRE(b.cum == std::vector<long long>{1});
}

TEST_CASE("sigma: pooled window slope approaches two to the three-halves") {
  // Certify S positions on both sides of the root, pick n so the process
  // clock advances S steps per unit time, and read the slope at t = 1.  The
  // k = 0 term is the root part, whose size-biased perimeter has no finite
  // mean, so the estimator drops it; the remaining S terms per direction are
  // plain parts with mean perimeter-plus-one 3 and sigma(1) - sigma(0+)
  // estimates 2^{3/2} directly.
  const int S = 32;
  const double n = 9.0 * S * S / 8.0;
  long long total = 0;
  int samples = 0, skipped = 0;
  for (int i = 0; i < 16; ++i) {
    const SpanPrune sp = prune_certified_span(Rng(6001).child(i), S, 96, 2048);
    if (!sp.ok) {
      ++skipped;
      continue;
    }
    for (bool backward : {false, true}) {
      const SigmaProcess f = sigma_process(sp.pr, n, backward);
      REQUIRE(static_cast<int>(f.cum.size()) >= S + 1);
      for (std::size_t k = 1; k < f.cum.size(); ++k)
        REQUIRE(f.cum[k] > f.cum[k - 1]);
      REQUIRE(f.eval(0.5) > 0.0);
      REQUIRE(f.eval(1.0) >= f.eval(0.5));
      total += f.cum[S] - f.cum[0];
      ++samples;
    }
  }
  REQUIRE(skipped <= 2);
  REQUIRE(samples >= 28);
  const double per_pos = static_cast<double>(total) / (samples * S);
  const double slope = per_pos * std::pow(2.0, 1.5) / 3.0;
  std::printf("[sigma] slope estimate %.3f over %d spans (target %.3f)\n",
              slope, samples, std::pow(2.0, 1.5));
  REQUIRE(slope > 2.3);
  REQUIRE(slope < 3.4);
}
