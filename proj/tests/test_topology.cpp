#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "flexsim/rng.hpp"
#include "flexsim/topology.hpp"

using namespace flexsim;

TEST_CASE("complete graphs") {
  const BipartiteGraph g1 = build_complete(1);
  CHECK(g1.edge_count() == 1);
  CHECK(g1.has_edge(0, 0));

  const BipartiteGraph g3 = build_complete(3);
  CHECK(g3.edge_count() == 9);
  for (int q = 0; q < 3; ++q) CHECK(g3.queue_adj[q].size() == 3);
  CHECK(g3.avg_queue_degree() == doctest::Approx(3.0));

  CHECK(verify_expander(build_complete(2), 0.5, 2.0));
}

TEST_CASE("inflexible graphs") {
  const BipartiteGraph g2 = build_inflexible(2);
  CHECK(g2.edges() == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}});

  const BipartiteGraph g4 = build_inflexible(4);
  CHECK(g4.avg_queue_degree() == doctest::Approx(1.0));
  CHECK_FALSE(verify_expander(g4, 0.5, 2.0));
}

TEST_CASE("modular construction") {
  const auto part = contiguous_partition(4, 2);
  const BipartiteGraph g = build_modular(4, 2, part);
  CHECK(g.edge_count() == 8);
  CHECK(g.has_edge(0, 0));
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
  CHECK_FALSE(g.has_edge(0, 2));
  CHECK(g.has_edge(2, 2));
  CHECK(g.has_edge(3, 3));
  CHECK_FALSE(g.has_edge(3, 0));

  CHECK(build_modular(2, 2, contiguous_partition(2, 2)) == build_complete(2));
  CHECK_THROWS_AS(contiguous_partition(4, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_modular(4, 3, contiguous_partition(4, 2)), std::invalid_argument);

  // One full cluster of the 4/2 modular graph breaks (1/2, 2)-expansion.
  CHECK_FALSE(verify_expander(g, 0.5, 2.0));
}

TEST_CASE("random modular: determinism and single-cluster case") {
  for (std::uint64_t seed : {1ull, 7ull, 42ull})
    CHECK(build_random_modular(4, 4, seed).first == build_complete(4));

  const auto a = build_random_modular(8, 2, 123);
  const auto b = build_random_modular(8, 2, 123);
  CHECK(a.first == b.first);
  CHECK(a.second.queue_cluster == b.second.queue_cluster);
  CHECK(a.first == build_modular(8, 2, a.second));
}

TEST_CASE("random modular partition is uniform") {
  // Queue 0's cluster partner is uniform over the other 7 queues.
  const int trials = 10000;
  std::vector<int> partner_count(8, 0);
  for (int t = 0; t < trials; ++t) {
    const auto [g, part] = build_random_modular(8, 2, 1000 + t);
    const int cluster = part.queue_cluster[0];
    for (int q : part.queues_of[cluster])
      if (q != 0) ++partner_count[q];
  }
  const double p = 1.0 / 7.0;
  const double sigma = std::sqrt(p * (1 - p) / trials);
  for (int j = 1; j < 8; ++j) {
    const double freq = static_cast<double>(partner_count[j]) / trials;
    CHECK(std::abs(freq - p) <= 3.0 * sigma);
  }
}

TEST_CASE("random regular bipartite graphs") {
  CHECK(build_random_regular_bipartite(3, 3, 5) == build_complete(3));

  const BipartiteGraph m = build_random_regular_bipartite(5, 1, 9);
  std::set<int> servers;
  for (int q = 0; q < 5; ++q) {
    REQUIRE(m.queue_adj[q].size() == 1);
    servers.insert(m.queue_adj[q][0]);
  }
  CHECK(servers.size() == 5);  // perfect matching

  const BipartiteGraph g = build_random_regular_bipartite(6, 2, 11);
  for (int q = 0; q < 6; ++q) CHECK(g.queue_adj[q].size() == 2);
  for (int s = 0; s < 6; ++s) CHECK(g.server_adj[s].size() == 2);

  CHECK(build_random_regular_bipartite(64, 16, 3) == build_random_regular_bipartite(64, 16, 3));
  CHECK_THROWS_AS(build_random_regular_bipartite(4, 5, 1), std::invalid_argument);
}

TEST_CASE("degree audit over random (n, d, seed) triples") {
  Rng rng(2024);
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + static_cast<int>(rng.below(15));
    const int d = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const BipartiteGraph g = build_random_regular_bipartite(n, d, rng.next_u64());
    for (int q = 0; q < n; ++q) REQUIRE(static_cast<int>(g.queue_adj[q].size()) == d);
    for (int s = 0; s < n; ++s) REQUIRE(static_cast<int>(g.server_adj[s].size()) == d);
  }
}

TEST_CASE("erdos-renyi graphs") {
  CHECK(build_erdos_renyi_bipartite(5, 5.0, 3) == build_complete(5));
  CHECK_THROWS_AS(build_erdos_renyi_bipartite(5, 0.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_erdos_renyi_bipartite(5, 6.0, 3), std::invalid_argument);

  // Mean left degree ~ Binomial(n, d/n) mean over 50 seeds: 10 +- 3 sigma.
  const int n = 100, seeds = 50;
  double total = 0.0;
  for (int t = 0; t < seeds; ++t)
    total += build_erdos_renyi_bipartite(n, 10.0, 500 + t).avg_queue_degree();
  const double mean = total / seeds;
  const double sigma = std::sqrt(0.1 * 0.9 * n) / std::sqrt(static_cast<double>(seeds));
  CHECK(std::abs(mean - 10.0) <= 3.0 * sigma);
}

TEST_CASE("expanded modular product") {
  // A single cluster edge expands to one complete d_m x d_m block.
  const BipartiteGraph one_edge = BipartiteGraph::from_edges(1, 1, {{0, 0}});
  const BipartiteGraph block = build_expanded_modular(one_edge, 2);
  CHECK(block == build_complete(2));

  // Product with a perfect matching reproduces the modular architecture.
  for (int k : {2, 3}) {
    for (int d : {1, 2, 3}) {
      const BipartiteGraph product = build_expanded_modular(build_inflexible(k), d);
      CHECK(product == build_modular(k * d, d, contiguous_partition(k * d, d)));
    }
  }

  CHECK(build_expanded_modular(build_complete(2), 2) == build_complete(4));
  CHECK_THROWS_AS(build_expanded_modular(one_edge, 0), std::invalid_argument);
}

TEST_CASE("expander verification") {
  CHECK(verify_expander(build_complete(2), 0.5, 2.0));
  CHECK(verify_expander(build_complete(8), 0.5, 2.0));
  CHECK_FALSE(verify_expander(build_modular(8, 2, contiguous_partition(8, 2)), 0.5, 2.0));
  CHECK_FALSE(verify_expander(build_inflexible(8), 0.25, 2.0));

  // alpha = 1/n, beta = 1: singleton subsets only; true iff no isolated queue.
  const BipartiteGraph isolated =
      BipartiteGraph::from_edges(3, 3, {{0, 0}, {1, 1}});  // queue 2 isolated
  CHECK_FALSE(verify_expander(isolated, 1.0 / 3.0, 1.0));
  CHECK(verify_expander(build_inflexible(3), 1.0 / 3.0, 1.0));

  CHECK_THROWS_WITH_AS(verify_expander(build_inflexible(25), 0.5, 1.0),
                       doctest::Contains("too large"), std::invalid_argument);
  // Caller-supplied subset cap lifts the guard.
  CHECK(verify_expander(build_complete(30), 0.5, 2.0, 3));
}

TEST_CASE("expansion monotonicity in alpha and beta") {
  Rng rng(77);
  int verified = 0;
  for (int t = 0; t < 40; ++t) {
    const int n = 4 + static_cast<int>(rng.below(5));
    const int d = 2 + static_cast<int>(rng.below(3));
    const BipartiteGraph g =
        build_random_regular_bipartite(n, std::min(d, n), rng.next_u64());
    const double alpha = 0.3 + 0.4 * rng.uniform();
    const double beta = 1.0 + rng.uniform();
    if (!verify_expander(g, alpha, beta)) continue;
    ++verified;
    CHECK(verify_expander(g, alpha * 0.7, beta));
    CHECK(verify_expander(g, alpha, beta * 0.8));
    CHECK(verify_expander(g, alpha * 0.5, beta * 0.5));
  }
  CHECK(verified > 0);
}

TEST_CASE("expander existence degree bound") {
  CHECK(expander_degree_bound(0.25, 2.0) == doctest::Approx(9.3281).epsilon(1e-4));
  CHECK(expander_degree_bound(0.5, 1.0) == doctest::Approx(5.8854).epsilon(1e-4));
  CHECK_THROWS_AS(expander_degree_bound(0.5, 2.0), std::invalid_argument);  // alpha*beta = 1
  CHECK_THROWS_AS(expander_degree_bound(0.6, 2.0), std::invalid_argument);
}

TEST_CASE("theorem-1 style expansion parameters") {
  const ExpanderParams p = theorem1_params(1000, 100, 0.5);
  CHECK(p.rho_hat == doctest::Approx(0.941176).epsilon(1e-6));
  CHECK(p.gamma == doctest::Approx(0.970142).epsilon(1e-6));
  CHECK(p.beta_n == doctest::Approx(2.8583).epsilon(1e-3));
  CHECK(p.alpha == doctest::Approx(p.gamma / p.beta_n));
  CHECK(p.u_max == doctest::Approx(0.25 * p.beta_n));

  // rho -> 1: rho_hat -> 1 and beta_n -> 0.
  const ExpanderParams q = theorem1_params(1000, 100, 1.0 - 1e-9);
  CHECK(q.rho_hat == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(q.beta_n < 1e-7);
}

TEST_CASE("graph serialization round-trip") {
  Rng rng(31);
  for (int t = 0; t < 25; ++t) {
    const int n = 1 + static_cast<int>(rng.below(12));
    const double avg = 0.5 + rng.uniform() * (n - 0.5);
    const BipartiteGraph g = build_erdos_renyi_bipartite(n, avg, rng.next_u64());
    std::stringstream buf;
    write_graph(g, buf);
    CHECK(read_graph(buf) == g);
  }
}

TEST_CASE("malformed graph files are rejected") {
  std::stringstream bad1("tripartite 2 2\n1 1\n");
  CHECK_THROWS(read_graph(bad1));
  std::stringstream bad2("bipartite 2 2\n1 3\n");
  CHECK_THROWS(read_graph(bad2));
  std::stringstream bad3("bipartite 2 2\n1 1\n1 1\n");
  CHECK_THROWS(read_graph(bad3));
}
