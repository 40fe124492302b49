/*
 *  Copyright (C) 2026 The plscan Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles/betti_oracle.hpp"
#include "oracles/landscape_oracle.hpp"
#include "plscan/cohomology.hpp"
#include "plscan/homology.hpp"
#include "support/fixtures.hpp"

namespace plscan {
namespace {

PersistenceDiagram persistence_of(const PointCloud &cloud, int max_dim,
                                  PersistenceOptions options = {}) {
  return compute_persistence(build_filtration(cloud, max_dim), options);
}

TEST(Homology, TwoPoints) {
  const auto diag = persistence_of(PointCloud({{0.0, 0.0}, {0.0, 0.75}}), 2);
  const std::vector<PersistenceInterval> expected{{0, 0.0, 0.75}, {0, 0.0, kInfinity}};
  EXPECT_EQ(diag.intervals, expected);
}

TEST(Homology, SinglePoint) {
  const auto diag = persistence_of(PointCloud({{4.0, 2.0}}), 2);
  const std::vector<PersistenceInterval> expected{{0, 0.0, kInfinity}};
  EXPECT_EQ(diag.intervals, expected);
}

TEST(Homology, UnitSquare) {
  const auto diag = persistence_of(fixtures::unit_square(), 2);
  const std::vector<PersistenceInterval> expected{
      {0, 0.0, 1.0}, {0, 0.0, 1.0}, {0, 0.0, 1.0}, {0, 0.0, kInfinity}, {1, 1.0, std::sqrt(2.0)}};
  EXPECT_EQ(diag.intervals, expected);
}

TEST(Homology, EquilateralTriangleHasNoLoop) {
  const auto diag = persistence_of(fixtures::equilateral_triangle(), 2);
  EXPECT_TRUE(diag.in_dim(1).empty());
  EXPECT_EQ(diag.in_dim(0).size(), 3u);
  EXPECT_EQ(diag.essential_count(0), 1u);
}

TEST(Homology, MatchesBruteForceOracle) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng() % 7;
    const std::size_t dim = 1 + rng() % 3;
    const int max_dim = 1 + static_cast<int>(rng() % 3);
    const auto dist = distance_matrix(fixtures::random_cloud(rng, n, dim));
    const auto got = compute_persistence(build_filtration(dist, max_dim));
    EXPECT_EQ(got, oracle::brute_force_diagram(dist, max_dim))
        << "trial " << trial << " n=" << n << " max_dim=" << max_dim;
  }
}

TEST(Homology, TiedDistancesMatchOracle) {
  // Integer grid coordinates produce many equal diameters.
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::vector<double>> pts;
    const std::size_t n = 3 + rng() % 6;
    for (std::size_t i = 0; i < n; ++i)
      pts.push_back({static_cast<double>(rng() % 3), static_cast<double>(rng() % 3)});
    const auto dist = distance_matrix(PointCloud(pts));
    EXPECT_EQ(compute_persistence(build_filtration(dist, 2)), oracle::brute_force_diagram(dist, 2))
        << "trial " << trial;
  }
}

TEST(Homology, EulerCharacteristicOfFullSimplex) {
  std::mt19937_64 rng(33);
  for (std::size_t n = 1; n <= 7; ++n) {
    const auto filt = build_filtration(fixtures::random_cloud(rng, n, 3), static_cast<int>(n) - 1);
    const auto diag = compute_persistence(filt);
    long chi_simplices = 0, chi_essential = 0;
    for (const auto &s : filt.simplices)
      chi_simplices += s.dim() % 2 ? -1 : 1;
    for (const auto &iv : diag.intervals)
      if (iv.essential())
        chi_essential += iv.dim % 2 ? -1 : 1;
    EXPECT_EQ(chi_simplices, 1) << n;
    EXPECT_EQ(chi_essential, 1) << n;
  }
}

TEST(Homology, StableUnderSmallPerturbation) {
  // Landscapes are 1-Lipschitz in the bottleneck distance, which is at most
  // the largest change in pairwise distance (<= 2 * eta here).
  std::mt19937_64 rng(34);
  const double eta = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    const PointCloud cloud = fixtures::random_cloud(rng, 12, 3);
    std::vector<double> moved(cloud.coords().begin(), cloud.coords().end());
    for (double &c : moved)
      c += fixtures::uniform(rng, -eta, eta) / std::sqrt(3.0);
    const std::set<int> dims{0, 1};
    const auto a = landscape_tents(persistence_of(cloud, 2), dims);
    const auto b = landscape_tents(persistence_of(PointCloud(moved, 3), 2), dims);
    for (int i = 0; i <= 2000; ++i) {
      const double x = 1.5 * i / 2000.0;
      for (std::size_t k = 0; k < 4; ++k)
        EXPECT_LE(std::abs(oracle::kmax(a, k, x) - oracle::kmax(b, k, x)), 2 * eta + 1e-12);
    }
  }
}

TEST(Homology, PointOrderDoesNotMatter) {
  std::mt19937_64 rng(35);
  const PointCloud cloud = fixtures::random_cloud(rng, 25, 3);
  std::vector<std::size_t> perm(cloud.size());
  for (std::size_t i = 0; i < perm.size(); ++i)
    perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> shuffled;
  for (std::size_t i : perm)
    shuffled.insert(shuffled.end(), cloud[i].begin(), cloud[i].end());
  EXPECT_EQ(persistence_of(cloud, 2), persistence_of(PointCloud(shuffled, 3), 2));
}

TEST(Homology, ClearingAndStorageDoNotChangeResult) {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 5; ++trial) {
    const auto filt = build_filtration(fixtures::random_cloud(rng, 30, 3), 2);
    const auto reference = compute_persistence(filt, {.clearing = false, .storage = ColumnStorage::sparse});
    for (bool clearing : {false, true})
      for (auto storage : {ColumnStorage::sparse, ColumnStorage::dense, ColumnStorage::automatic})
        EXPECT_EQ(compute_persistence(filt, {.clearing = clearing, .storage = storage}), reference);
  }
}

TEST(Homology, IntervalsAreWellFormed) {
  std::mt19937_64 rng(37);
  const auto diag = persistence_of(fixtures::random_cloud(rng, 50, 3), 2);
  EXPECT_TRUE(std::is_sorted(diag.intervals.begin(), diag.intervals.end()));
  EXPECT_EQ(diag.essential_count(0), 1u);
  EXPECT_EQ(diag.in_dim(0).size(), 50u);
  for (const auto &iv : diag.intervals) {
    EXPECT_LT(iv.birth, iv.death);
    EXPECT_LE(iv.dim, 1);
  }
}

TEST(Homology, RejectsMalformedFiltrations) {
  auto filt = build_filtration(fixtures::unit_square(), 2);
  auto unsorted = filt;
  std::swap(unsorted.simplices[0], unsorted.simplices.back());
  EXPECT_THROW(compute_persistence(unsorted), StructuralError);

  auto missing = filt;
  missing.simplices.erase(missing.simplices.begin() + 4); // an edge
  EXPECT_THROW(compute_persistence(missing), StructuralError);

  auto late_face = filt;
  for (auto &s : late_face.simplices)
    if (s.dim() == 0 && s.vertices[0] == 3)
      s.value = 5.0;
  EXPECT_THROW(compute_persistence(late_face), StructuralError);
}

TEST(Cohomology, SmallCases) {
  EXPECT_TRUE(rips_persistence(DistanceMatrix(0), 2).intervals.empty());
  const std::vector<PersistenceInterval> lone{{0, 0.0, kInfinity}};
  EXPECT_EQ(rips_persistence(PointCloud({{4.0, 2.0}}), 2).intervals, lone);
  EXPECT_EQ(rips_persistence(fixtures::unit_square(), 2), persistence_of(fixtures::unit_square(), 2));
  EXPECT_THROW(rips_persistence(fixtures::unit_square(), -1), DomainError);
  EXPECT_THROW(rips_persistence(fixtures::unit_square(), 2, -1.0), DomainError);
}

TEST(Cohomology, MatchesBruteForceOracle) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    const std::size_t dim = 1 + rng() % 3;
    const int max_dim = static_cast<int>(rng() % 4);
    const auto dist = distance_matrix(fixtures::random_cloud(rng, n, dim));
    EXPECT_EQ(rips_persistence(dist, max_dim), oracle::brute_force_diagram(dist, max_dim))
        << "trial " << trial << " n=" << n << " max_dim=" << max_dim;
  }
}

TEST(Cohomology, TiedDistancesMatchBoundaryReduction) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::vector<double>> pts;
    const std::size_t n = 3 + rng() % 12;
    for (std::size_t i = 0; i < n; ++i)
      pts.push_back({static_cast<double>(rng() % 3), static_cast<double>(rng() % 3),
                     static_cast<double>(rng() % 2)});
    const auto dist = distance_matrix(PointCloud(pts));
    for (int max_dim : {1, 2, 3})
      EXPECT_EQ(rips_persistence(dist, max_dim), compute_persistence(build_filtration(dist, max_dim)))
          << "trial " << trial << " max_dim=" << max_dim;
  }
}

TEST(Cohomology, MatchesBoundaryReductionOnWindowSizedClouds) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 6; ++trial) {
    const auto dist = distance_matrix(fixtures::random_cloud(rng, 30 + rng() % 25, 1 + rng() % 4));
    EXPECT_EQ(rips_persistence(dist, 2), compute_persistence(build_filtration(dist, 2)))
        << "trial " << trial;
  }
  const auto dist = distance_matrix(fixtures::random_cloud(rng, 16, 3));
  EXPECT_EQ(rips_persistence(dist, 4), compute_persistence(build_filtration(dist, 4)));
}

TEST(Cohomology, ThresholdMatchesBoundaryReduction) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const auto dist = distance_matrix(fixtures::random_cloud(rng, 5 + rng() % 20, 2));
    const double cap = fixtures::uniform(rng, 0.1, 0.8);
    EXPECT_EQ(rips_persistence(dist, 2, cap), compute_persistence(build_filtration(dist, 2, cap)))
        << "trial " << trial;
  }
}

TEST(Cohomology, EnginesAgreeThroughRipsDiagram) {
  std::mt19937_64 rng(45);
  const PointCloud cloud = fixtures::random_cloud(rng, 20, 2);
  EXPECT_EQ(rips_diagram(cloud, 3, std::nullopt, PersistenceEngine::cohomology),
            rips_diagram(cloud, 3, std::nullopt, PersistenceEngine::boundary));
}

} // namespace
} // namespace plscan
