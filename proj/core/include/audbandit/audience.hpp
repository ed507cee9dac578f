#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace audbandit {

// Maximum number of target audiences a partition can span. The number of
// disjoint cells grows as 2^K - 1.
inline constexpr int kMaxAudiences = 16;

// A set of target audiences, stored as a bit mask (bit k set <=> TA k+1 is a
// member). Target audiences are 0-based in code and 1-based in all output.
class AudienceSet {
 public:
  constexpr AudienceSet() = default;
  constexpr explicit AudienceSet(std::uint32_t bits) : bits_(bits) {}

  // Builds a set from 1-based target-audience ids, as users and config
  // files name them.
  static AudienceSet of(std::initializer_list<int> ids);
  static AudienceSet of(const std::vector<int>& ids);

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(int audience) const { return (bits_ >> audience) & 1U; }
  int size() const;
  // 1-based ids in ascending order.
  std::vector<int> ids() const;
  // "{TA1,TA2}"
  std::string label() const;

  AudienceSet with(int audience) const { return AudienceSet(bits_ | (1U << audience)); }

  friend constexpr auto operator<=>(AudienceSet, AudienceSet) = default;

 private:
  std::uint32_t bits_ = 0;
};

// Unnormalized population weight of every membership pattern.
class PopulationModel {
 public:
  void set_mass(AudienceSet membership, double mass);
  double mass(AudienceSet membership) const;
  const std::map<AudienceSet, double>& cells() const { return cells_; }

 private:
  std::map<AudienceSet, double> cells_;
};

struct DisjointAudience {
  AudienceSet membership;
  double mass = 0.0;
};

// Disjoint audiences (DAs) induced by K possibly overlapping target audiences
// (TAs), together with the conditional membership probabilities p(j|k).
class Partition {
 public:
  Partition() = default;

  int num_audiences() const { return num_audiences_; }
  int num_cells() const { return static_cast<int>(cells_.size()); }

  const std::vector<DisjointAudience>& cells() const { return cells_; }
  const DisjointAudience& cell(int j) const { return cells_.at(j); }

  // p(j|k); J x K, each column sums to one.
  const Eigen::MatrixXd& cond_prob() const { return cond_prob_; }
  double cond_prob(int j, int k) const { return cond_prob_(j, k); }

  // DA indices contained in TA k.
  const std::vector<int>& overlap_set(int k) const { return overlap_sets_.at(k); }

  // Share of the whole tested population that falls in cell j.
  double arrival_share(int j) const { return arrival_share_.at(j); }
  const std::vector<double>& arrival_shares() const { return arrival_share_; }

  // Index of the cell with exactly this membership, or -1.
  int find(AudienceSet membership) const;

  friend Partition build_partition(int num_audiences, const PopulationModel& population);

 private:
  int num_audiences_ = 0;
  std::vector<DisjointAudience> cells_;
  Eigen::MatrixXd cond_prob_;
  std::vector<std::vector<int>> overlap_sets_;
  std::vector<double> arrival_share_;
};

// Cells with positive mass become DAs, ordered by ascending membership bit
// pattern. Throws EmptyPopulation or NoPopulationForTA.
Partition build_partition(int num_audiences, const PopulationModel& population);

// Maps a user's TA membership to its DA index. Throws UnknownContext.
int assign_context(AudienceSet user_membership, const Partition& partition);

// Two equal-size TAs whose overlap holds share q of each:
// masses {TA1 only: 1-q, both: q, TA2 only: 1-q}. Throws InvalidOverlap.
PopulationModel overlap_geometry(double q);

}  // namespace audbandit
