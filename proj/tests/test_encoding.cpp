#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "bmaps/encoding.hpp"
#include "bmaps/rng.hpp"
#include "bmaps/stats.hpp"
#include "bmaps/walks.hpp"

using bmaps::LabeledTree;
using bmaps::Rng;
using bmaps::TreedBridge;
using bmaps::Walk;

namespace {

// Independent re-scan oracle for root labels: locate the k-th down-step by
// counting signs, then recompute the value there by summing prefix steps.
std::vector<int> root_labels_oracle(const Walk& b0) {
  int l = static_cast<int>(b0.size() - 1) / 2;
  std::vector<int> out{0};
  for (int k = 1; k <= l; ++k) {
    int seen = 0, jk = -1;
    for (std::size_t j = 0; j + 1 < b0.size(); ++j) {
      if (b0[j + 1] - b0[j] == -1 && ++seen == k) {
        jk = static_cast<int>(j);
        break;
      }
    }
    REQUIRE(jk >= 0);
    int value = 0;
    for (int j = 0; j < jk; ++j) value += b0[j + 1] - b0[j];
    out.push_back(value);
  }
  return out;
}

std::vector<int> serialize(const TreedBridge& tb) {
  std::vector<int> key(tb.bridge.begin(), tb.bridge.end());
  key.push_back(tb.sign);
  for (const auto& t : tb.trees) {
    key.push_back(-99);
    key.insert(key.end(), t.parent.begin(), t.parent.end());
    key.insert(key.end(), t.label.begin(), t.label.end());
  }
  return key;
}

}  // namespace

TEST_CASE("root labels agree with an independent re-scan oracle") {
  Rng rng(301);
  for (int l : {1, 2, 3, 4}) {
    for (int t = 0; t < 40; ++t) {
      Walk b0 = bmaps::sample_bridge(l, rng);
      REQUIRE(bmaps::bridge_root_labels(b0) == root_labels_oracle(b0));
    }
  }
}

TEST_CASE("tree tour visits corners in plane order") {
  LabeledTree path{{-1, 0, 1}, {0, 0, 0}};
  REQUIRE(bmaps::tree_tour(path) == std::vector<int>({0, 1, 2, 1, 0}));
  LabeledTree cherry{{-1, 0, 0}, {0, 0, 0}};
  REQUIRE(bmaps::tree_tour(cherry) == std::vector<int>({0, 1, 0, 2, 0}));
  LabeledTree point{{-1}, {5}};
  REQUIRE(bmaps::tree_tour(point) == std::vector<int>({0}));
}

TEST_CASE("treed bridge validation") {
  TreedBridge ok;
  ok.bridge = {0, 1, 0};
  ok.trees = {LabeledTree{{-1, 0}, {1, 2}}};  // root label must equal b(0) = 0
  ok.sign = -1;
  REQUIRE_FALSE(bmaps::valid_treed_bridge(ok));
  ok.trees[0].label = {0, 1};
  REQUIRE(bmaps::valid_treed_bridge(ok));
  ok.trees[0].label = {0, 2};  // label jump of 2 across an edge
  REQUIRE_FALSE(bmaps::valid_treed_bridge(ok));
  ok.trees[0].label = {0, 1};
  ok.sign = 0;
  REQUIRE_FALSE(bmaps::valid_treed_bridge(ok));
  ok.sign = 1;
  ok.bridge = {0, 1, 2};
  REQUIRE_FALSE(bmaps::valid_treed_bridge(ok));
}

TEST_CASE("contour of pinned small treed bridges") {
  SECTION("one empty tree") {
    TreedBridge tb;
    tb.bridge = {0, 1, 0};
    tb.trees = {LabeledTree{{-1}, {0}}};
    tb.sign = 1;
    auto ct = bmaps::contour_of(tb);
    REQUIRE(ct.C == Walk({0, -1}));
    REQUIRE(ct.I == std::vector<int>({0, 1}));
    REQUIRE(ct.L == Walk({0}));
    REQUIRE(ct.corner_vertex == std::vector<int>({0}));
  }
  SECTION("one one-edge tree") {
    TreedBridge tb;
    tb.bridge = {0, 1, 0};
    tb.trees = {LabeledTree{{-1, 0}, {0, 1}}};
    tb.sign = -1;
    auto ct = bmaps::contour_of(tb);
    REQUIRE(ct.C == Walk({0, 1, 0, -1}));
    REQUIRE(ct.I == std::vector<int>({0, 3}));
    REQUIRE(ct.L == Walk({0, 1, 0}));
    REQUIRE(ct.corner_vertex == std::vector<int>({0, 1, 0}));
  }
  SECTION("two trees, second empty") {
    TreedBridge tb;
    tb.bridge = {0, 1, 0, -1, 0};  // down-steps at j = 1, 2; b = (0, 1, 0)
    tb.trees = {LabeledTree{{-1, 0}, {1, 1}}, LabeledTree{{-1}, {1}}};
    REQUIRE_FALSE(bmaps::valid_treed_bridge(tb));  // tree 0 root label must be b(0) = 0
    tb.trees[0].label = {0, 1};
    tb.sign = 1;
    auto ct = bmaps::contour_of(tb);
    REQUIRE(ct.C == Walk({0, 1, 0, -1, -2}));
    REQUIRE(ct.I == std::vector<int>({0, 3, 4}));
    REQUIRE(ct.L == Walk({0, 1, 0, 1}));
    REQUIRE(ct.corner_vertex == std::vector<int>({0, 1, 0, 2}));
    REQUIRE(ct.corner_tree == std::vector<int>({0, 0, 0, 1}));
    REQUIRE(ct.tree_first_vertex == std::vector<int>({0, 2}));
  }
}

TEST_CASE("infimum times: pinned and property") {
  REQUIRE(bmaps::infimum_times({0, -1}) == std::vector<int>({0, 1}));
  REQUIRE(bmaps::infimum_times({0, 1, 0, -1}) == std::vector<int>({0, 3}));
  Rng rng(307);
  for (int t = 0; t < 40; ++t) {
    Walk c = bmaps::sample_first_passage_walk(10, 3, rng);
    auto I = bmaps::infimum_times(c);
    REQUIRE(I.size() == 4);
    for (int k = 0; k <= 3; ++k) {
      REQUIRE(c[I[k]] == -k);
      for (int i = 0; i < I[k]; ++i) REQUIRE(c[i] > -k);
    }
    REQUIRE(std::is_sorted(I.begin(), I.end()));
  }
}

TEST_CASE("sampled treed bridges are valid and round-trip through contours") {
  Rng rng(311);
  for (auto [n, l] : std::vector<std::pair<int, int>>{{0, 1}, {3, 1}, {5, 2}, {12, 4}}) {
    for (int t = 0; t < 25; ++t) {
      TreedBridge tb = bmaps::sample_treed_bridge(n, l, rng);
      REQUIRE(bmaps::valid_treed_bridge(tb));
      REQUIRE(tb.area() == n);
      REQUIRE(tb.boundary_half_length() == l);
      auto ct = bmaps::contour_of(tb);
      REQUIRE(ct.n_corners() == 2 * n + l);
      REQUIRE(ct.n_vertices() == n + l);
      REQUIRE(ct.C.back() == -l);
      REQUIRE(bmaps::infimum_times(ct.C) == ct.I);
      // every vertex appears under some corner
      std::set<int> seen(ct.corner_vertex.begin(), ct.corner_vertex.end());
      REQUIRE(static_cast<int>(seen.size()) == n + l);
      // labels under corners match per-vertex labels
      for (int i = 0; i < ct.n_corners(); ++i)
        REQUIRE(ct.L[i] == ct.vertex_label[ct.corner_vertex[i]]);
      // roots carry the bridge labels
      auto b = bmaps::bridge_root_labels(tb.bridge);
      for (int k = 0; k < l; ++k) REQUIRE(ct.L[ct.I[k]] == b[k]);
      REQUIRE(bmaps::trees_from_contour(ct.C, ct.L) == tb.trees);
    }
  }
}

TEST_CASE("snake-head labels match exact enumeration on a fixed excursion") {
  // driver (0,1,2,1,0): a path tree with 2 edges explored down-and-back;
  // labels (H(1), H(2)) are two independent uniform {-1,0,1} increments
  Rng rng(313);
  std::map<std::pair<int, int>, int> counts;
  const int trials = 18000;
  for (int t = 0; t < trials; ++t) {
    Walk h = bmaps::snake_head({0, 1, 2, 1, 0}, rng);
    REQUIRE(h[3] == h[1]);
    REQUIRE(h[4] == 0);
    ++counts[{h[1], h[2] - h[1]}];
  }
  REQUIRE(counts.size() == 9);
  std::vector<double> obs, expd;
  for (auto& [k, c] : counts) {
    obs.push_back(c);
    expd.push_back(trials / 9.0);
  }
  REQUIRE(bmaps::chi_square_test(obs, expd).p_value > 1e-4);
}

TEST_CASE("contour and shifted labels are independent of the bridge") {
  Rng rng(317);
  const int n = 1, l = 2, trials = 24000;
  auto bridges = bmaps::enumerate_bridges(l);
  auto contours = bmaps::enumerate_first_passage_walks(n, l);
  REQUIRE(bridges.size() == 6);
  REQUIRE(contours.size() == 2);
  std::map<std::pair<int, int>, int> joint;
  std::map<int, int> m1, m2;
  for (int t = 0; t < trials; ++t) {
    TreedBridge tb = bmaps::sample_treed_bridge(n, l, rng);
    auto ct = bmaps::contour_of(tb);
    int bi = static_cast<int>(std::find(bridges.begin(), bridges.end(), tb.bridge) - bridges.begin());
    int ci = static_cast<int>(std::find(contours.begin(), contours.end(), ct.C) - contours.begin());
    REQUIRE(bi < 6);
    REQUIRE(ci < 2);
    ++joint[{bi, ci}];
    ++m1[bi];
    ++m2[ci];
  }
  std::vector<double> obs, expd;
  for (int bi = 0; bi < 6; ++bi)
    for (int ci = 0; ci < 2; ++ci) {
      obs.push_back(joint[{bi, ci}]);
      expd.push_back(double(m1[bi]) * m2[ci] / trials);
    }
  // independence chi-square: dof = (6-1)(2-1) -> reduction 6+2-1
  REQUIRE(bmaps::chi_square_test(obs, expd, 7).p_value > 1e-4);
}

TEST_CASE("treed bridge enumeration counts and distinctness") {
  auto count_formula = [](int n, int l) {
    auto binom = [](int a, int b) {
      double r = 1.0;
      for (int i = 0; i < b; ++i) r = r * (a - i) / (i + 1);
      return static_cast<long long>(r + 0.5);
    };
    long long forests = binom(2 * n + l, n) * l / (2 * n + l);
    long long lab = 1;
    for (int i = 0; i < n; ++i) lab *= 3;
    return 2LL * binom(2 * l, l) * forests * lab;
  };
  for (auto [n, l] : std::vector<std::pair<int, int>>{{0, 1}, {1, 1}, {2, 1}, {0, 2}, {1, 2}, {2, 2}}) {
    auto all = bmaps::enumerate_treed_bridges(n, l);
    REQUIRE(static_cast<long long>(all.size()) == count_formula(n, l));
    std::set<std::vector<int>> keys;
    for (const auto& tb : all) {
      REQUIRE(bmaps::valid_treed_bridge(tb));
      REQUIRE(tb.area() == n);
      keys.insert(serialize(tb));
    }
    REQUIRE(keys.size() == all.size());
  }
  REQUIRE(bmaps::enumerate_treed_bridges(1, 1).size() == 12);
  REQUIRE(bmaps::enumerate_treed_bridges(1, 2).size() == 72);
}

TEST_CASE("uniformity of the treed bridge sampler at tiny size") {
  Rng rng(331);
  auto all = bmaps::enumerate_treed_bridges(1, 1);
  std::map<std::vector<int>, int> counts;
  const int trials = 24000;
  for (int t = 0; t < trials; ++t)
    ++counts[serialize(bmaps::sample_treed_bridge(1, 1, rng))];
  REQUIRE(counts.size() == all.size());
  std::vector<double> obs, expd;
  for (auto& [k, c] : counts) {
    obs.push_back(c);
    expd.push_back(double(trials) / all.size());
  }
  REQUIRE(bmaps::chi_square_test(obs, expd).p_value > 1e-4);
}
