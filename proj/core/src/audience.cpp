#include "audbandit/audience.hpp"

#include <bit>
#include <cmath>

#include "audbandit/errors.hpp"

namespace audbandit {

AudienceSet AudienceSet::of(std::initializer_list<int> ids) {
  return of(std::vector<int>(ids));
}

AudienceSet AudienceSet::of(const std::vector<int>& ids) {
  std::uint32_t bits = 0;
  for (int id : ids) {
    if (id < 1 || id > kMaxAudiences) {
      throw Error(Errc::kInvalidDimensions,
                  "target audience id " + std::to_string(id) + " out of range");
    }
    bits |= 1U << (id - 1);
  }
  return AudienceSet(bits);
}

int AudienceSet::size() const { return std::popcount(bits_); }

std::vector<int> AudienceSet::ids() const {
  std::vector<int> out;
  for (int k = 0; k < 32; ++k) {
    if (contains(k)) out.push_back(k + 1);
  }
  return out;
}

std::string AudienceSet::label() const {
  std::string out = "{";
  bool first = true;
  for (int id : ids()) {
    if (!first) out += ",";
    out += "TA" + std::to_string(id);
    first = false;
  }
  return out + "}";
}

void PopulationModel::set_mass(AudienceSet membership, double mass) {
  if (membership.empty()) {
    throw Error(Errc::kInvalidArgument, "population cell with empty membership");
  }
  if (!std::isfinite(mass) || mass < 0.0) {
    throw Error(Errc::kInvalidArgument,
                "population mass for " + membership.label() + " must be finite and >= 0");
  }
  cells_[membership] = mass;
}

double PopulationModel::mass(AudienceSet membership) const {
  auto it = cells_.find(membership);
  return it == cells_.end() ? 0.0 : it->second;
}

int Partition::find(AudienceSet membership) const {
  for (int j = 0; j < num_cells(); ++j) {
    if (cells_[j].membership == membership) return j;
  }
  return -1;
}

Partition build_partition(int num_audiences, const PopulationModel& population) {
  if (num_audiences < 1 || num_audiences > kMaxAudiences) {
    throw Error(Errc::kInvalidDimensions,
                "number of target audiences must be in 1.." + std::to_string(kMaxAudiences));
  }
  const std::uint32_t allowed =
      num_audiences == 32 ? ~0U : ((1U << num_audiences) - 1U);

  Partition p;
  p.num_audiences_ = num_audiences;
  double total = 0.0;
  // std::map iterates in ascending bit-pattern order.
  for (const auto& [membership, mass] : population.cells()) {
    if ((membership.bits() & ~allowed) != 0) {
      throw Error(Errc::kInvalidDimensions,
                  "population cell " + membership.label() + " references a TA beyond K=" +
                      std::to_string(num_audiences));
    }
    if (mass > 0.0) {
      p.cells_.push_back({membership, mass});
      total += mass;
    }
  }
  if (p.cells_.empty()) {
    throw Error(Errc::kEmptyPopulation, "no population cell has positive mass");
  }

  const int num_cells = static_cast<int>(p.cells_.size());
  p.cond_prob_ = Eigen::MatrixXd::Zero(num_cells, num_audiences);
  p.overlap_sets_.assign(num_audiences, {});
  for (int k = 0; k < num_audiences; ++k) {
    double ta_mass = 0.0;
    for (int j = 0; j < num_cells; ++j) {
      if (p.cells_[j].membership.contains(k)) {
        ta_mass += p.cells_[j].mass;
        p.overlap_sets_[k].push_back(j);
      }
    }
    if (!(ta_mass > 0.0)) {
      throw Error(Errc::kNoPopulationForAudience,
                  "target audience TA" + std::to_string(k + 1) + " has zero population mass");
    }
    for (int j : p.overlap_sets_[k]) {
      p.cond_prob_(j, k) = p.cells_[j].mass / ta_mass;
    }
  }
  p.arrival_share_.reserve(num_cells);
  for (const auto& cell : p.cells_) p.arrival_share_.push_back(cell.mass / total);
  return p;
}

int assign_context(AudienceSet user_membership, const Partition& partition) {
  if (user_membership.empty()) {
    throw Error(Errc::kUnknownContext, "user belongs to no target audience");
  }
  const int j = partition.find(user_membership);
  if (j < 0) {
    throw Error(Errc::kUnknownContext,
                "no disjoint audience with membership " + user_membership.label());
  }
  return j;
}

PopulationModel overlap_geometry(double q) {
  if (!(q >= 0.0 && q < 1.0)) {
    throw Error(Errc::kInvalidOverlap, "overlap share must lie in [0,1), got " + std::to_string(q));
  }
  PopulationModel population;
  population.set_mass(AudienceSet::of({1}), 1.0 - q);
  population.set_mass(AudienceSet::of({1, 2}), q);
  population.set_mass(AudienceSet::of({2}), 1.0 - q);
  return population;
}

}  // namespace audbandit
