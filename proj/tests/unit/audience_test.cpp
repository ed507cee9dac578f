#include "audbandit/audience.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "audbandit/errors.hpp"
#include "audbandit/random.hpp"

namespace audbandit {
namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an audbandit::Error";
  return Errc::kInvalidArgument;
}

TEST(BuildPartition, TwoOverlappingAudiencesGiveThreeCells) {
  PopulationModel pop;
  pop.set_mass(AudienceSet::of({1}), 1);
  pop.set_mass(AudienceSet::of({1, 2}), 1);
  pop.set_mass(AudienceSet::of({2}), 1);
  const Partition p = build_partition(2, pop);
  ASSERT_EQ(p.num_cells(), 3);
  // Ascending bit pattern: {TA1}=01, {TA2}=10, {TA1,TA2}=11.
  EXPECT_EQ(p.cell(0).membership, AudienceSet::of({1}));
  EXPECT_EQ(p.cell(1).membership, AudienceSet::of({2}));
  EXPECT_EQ(p.cell(2).membership, AudienceSet::of({1, 2}));
  const int overlap = p.find(AudienceSet::of({1, 2}));
  const int ta1_only = p.find(AudienceSet::of({1}));
  const int ta2_only = p.find(AudienceSet::of({2}));
  EXPECT_DOUBLE_EQ(p.cond_prob(ta1_only, 0), 0.5);
  EXPECT_DOUBLE_EQ(p.cond_prob(overlap, 0), 0.5);
  EXPECT_DOUBLE_EQ(p.cond_prob(overlap, 1), 0.5);
  EXPECT_DOUBLE_EQ(p.cond_prob(ta2_only, 1), 0.5);
  EXPECT_DOUBLE_EQ(p.cond_prob(ta2_only, 0), 0.0);
  EXPECT_DOUBLE_EQ(p.cond_prob(ta1_only, 1), 0.0);
}

TEST(BuildPartition, SingleAudienceIdentity) {
  PopulationModel pop;
  pop.set_mass(AudienceSet::of({1}), 7);
  const Partition p = build_partition(1, pop);
  ASSERT_EQ(p.num_cells(), 1);
  EXPECT_DOUBLE_EQ(p.cond_prob(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(p.arrival_share(0), 1.0);
}

TEST(BuildPartition, ThreeAudiencesEnumeratedByHand) {
  PopulationModel pop;
  pop.set_mass(AudienceSet::of({1}), 1);
  pop.set_mass(AudienceSet::of({1, 2}), 1);
  pop.set_mass(AudienceSet::of({2}), 1);
  pop.set_mass(AudienceSet::of({3}), 2);
  const Partition p = build_partition(3, pop);
  ASSERT_EQ(p.num_cells(), 4);
  const int ta3 = p.find(AudienceSet::of({3}));
  EXPECT_DOUBLE_EQ(p.cond_prob(ta3, 2), 1.0);
  EXPECT_EQ(p.overlap_set(2), std::vector<int>{ta3});
  // TA1 = {TA1 only, TA1&TA2}, each half.
  EXPECT_EQ(p.overlap_set(0).size(), 2U);
  EXPECT_DOUBLE_EQ(p.cond_prob(p.find(AudienceSet::of({1})), 0), 0.5);
  EXPECT_DOUBLE_EQ(p.arrival_share(ta3), 0.4);
}

TEST(BuildPartition, ZeroMassCellsAreDropped) {
  const Partition p = build_partition(2, overlap_geometry(0.0));
  EXPECT_EQ(p.num_cells(), 2);
  EXPECT_EQ(p.find(AudienceSet::of({1, 2})), -1);
}

TEST(BuildPartition, Errors) {
  EXPECT_EQ(code_of([] { build_partition(2, PopulationModel{}); }), Errc::kEmptyPopulation);
  PopulationModel zeros;
  zeros.set_mass(AudienceSet::of({1}), 0.0);
  EXPECT_EQ(code_of([&] { build_partition(1, zeros); }), Errc::kEmptyPopulation);
  PopulationModel missing_ta2;
  missing_ta2.set_mass(AudienceSet::of({1}), 1.0);
  missing_ta2.set_mass(AudienceSet::of({2}), 0.0);
  EXPECT_EQ(code_of([&] { build_partition(2, missing_ta2); }), Errc::kNoPopulationForAudience);
  PopulationModel beyond_k;
  beyond_k.set_mass(AudienceSet::of({3}), 1.0);
  EXPECT_EQ(code_of([&] { build_partition(2, beyond_k); }), Errc::kInvalidDimensions);
  EXPECT_EQ(code_of([] { build_partition(0, overlap_geometry(0.5)); }), Errc::kInvalidDimensions);
  EXPECT_EQ(code_of([] { PopulationModel m; m.set_mass(AudienceSet::of({1}), -1.0); }),
            Errc::kInvalidArgument);
}

TEST(AssignContext, ExactMembershipMatch) {
  const Partition p = build_partition(2, overlap_geometry(0.5));
  EXPECT_EQ(p.cell(assign_context(AudienceSet::of({1, 2}), p)).membership, AudienceSet::of({1, 2}));
  EXPECT_EQ(assign_context(AudienceSet::of({1}), p), 0);
  EXPECT_EQ(code_of([&] { assign_context(AudienceSet{}, p); }), Errc::kUnknownContext);
  const Partition disjoint = build_partition(2, overlap_geometry(0.0));
  EXPECT_EQ(code_of([&] { assign_context(AudienceSet::of({1, 2}), disjoint); }), Errc::kUnknownContext);
}

TEST(OverlapGeometry, ConditionalShares) {
  const Partition half = build_partition(2, overlap_geometry(0.5));
  const int both = half.find(AudienceSet::of({1, 2}));
  EXPECT_DOUBLE_EQ(half.cond_prob(both, 0), 0.5);

  const Partition none = build_partition(2, overlap_geometry(0.0));
  EXPECT_DOUBLE_EQ(none.cond_prob(none.find(AudienceSet::of({1})), 0), 1.0);
  EXPECT_DOUBLE_EQ(none.cond_prob(none.find(AudienceSet::of({2})), 1), 1.0);

  const Partition high = build_partition(2, overlap_geometry(0.9));
  EXPECT_NEAR(high.cond_prob(high.find(AudienceSet::of({1})), 0), 0.1, 1e-15);
  EXPECT_NEAR(high.cond_prob(high.find(AudienceSet::of({1, 2})), 1), 0.9, 1e-15);

  EXPECT_EQ(code_of([] { overlap_geometry(1.0); }), Errc::kInvalidOverlap);
  EXPECT_EQ(code_of([] { overlap_geometry(-0.1); }), Errc::kInvalidOverlap);
  EXPECT_EQ(code_of([] { overlap_geometry(std::nan("")); }), Errc::kInvalidOverlap);
}

// Random populations over up to 5 TAs: columns of p(j|k) sum to one, the
// support of each column is exactly O(k), and every positive-mass membership
// maps to its own cell.
TEST(PartitionProperty, ColumnStochasticAndCovering) {
  Rng rng(12345);
  std::uniform_int_distribution<int> pick_k(1, 5);
  std::uniform_real_distribution<double> mass(0.0, 3.0);
  std::bernoulli_distribution keep(0.6);
  for (int trial = 0; trial < 300; ++trial) {
    const int k_count = pick_k(rng);
    PopulationModel pop;
    const std::uint32_t limit = 1U << k_count;
    for (std::uint32_t bits = 1; bits < limit; ++bits) {
      if (keep(rng)) pop.set_mass(AudienceSet(bits), mass(rng));
    }
    for (int k = 0; k < k_count; ++k) pop.set_mass(AudienceSet(1U << k), 0.5 + mass(rng));

    const Partition p = build_partition(k_count, pop);
    for (int k = 0; k < k_count; ++k) {
      EXPECT_NEAR(p.cond_prob().col(k).sum(), 1.0, 1e-12);
      for (int j = 0; j < p.num_cells(); ++j) {
        const bool in_overlap = std::find(p.overlap_set(k).begin(), p.overlap_set(k).end(), j) !=
                                p.overlap_set(k).end();
        EXPECT_EQ(p.cond_prob(j, k) > 0.0, in_overlap);
        EXPECT_EQ(in_overlap, p.cell(j).membership.contains(k));
      }
    }
    std::vector<int> hit(p.num_cells(), 0);
    for (const auto& [membership, m] : pop.cells()) {
      if (m > 0.0) ++hit[assign_context(membership, p)];
    }
    for (int h : hit) EXPECT_EQ(h, 1);
  }
}

// With positive masses on all three cells of the two-TA geometry, no share p
// of overlap users sent to TA1 makes both assembled TAs representative.
TEST(PartitionProperty, NoRepresentativeSplitOfOverlapUsers) {
  const double masses[][3] = {{1, 1, 1}, {0.2, 3, 0.7}, {5, 0.1, 2}, {1, 9, 1}};
  for (const auto& m : masses) {
    const double n1 = m[0], n2 = m[1], n3 = m[2];
    const double target_ta1 = n2 / (n2 + n1);
    const double target_ta2 = n2 / (n2 + n3);
    bool found = false;
    for (int step = 0; step <= 1000; ++step) {
      const double p = step / 1000.0;
      const double share_ta1 = p * n2 / (p * n2 + n1);
      const double share_ta2 = (1 - p) * n2 / ((1 - p) * n2 + n3);
      if (std::abs(share_ta1 - target_ta1) < 1e-9 && std::abs(share_ta2 - target_ta2) < 1e-9) {
        found = true;
      }
    }
    EXPECT_FALSE(found);
  }
}

TEST(AudienceSet, LabelsAndIds) {
  const AudienceSet s = AudienceSet::of({2, 1});
  EXPECT_EQ(s.label(), "{TA1,TA2}");
  EXPECT_EQ(s.ids(), (std::vector<int>{1, 2}));
  EXPECT_EQ(s.size(), 2);
  EXPECT_EQ(code_of([] { AudienceSet::of({0}); }), Errc::kInvalidDimensions);
}

}  // namespace
}  // namespace audbandit
