#include <algorithm>
#include <map>
#include <numeric>

#include "desirev/error.hpp"
#include "desirev/eval.hpp"
#include "desirev/random.hpp"

namespace desirev {

std::string_view to_string(FoldGrouping g) { return g == FoldGrouping::revision ? "revision" : "student"; }

FoldGrouping parse_fold_grouping(std::string_view s) {
  if (s == "revision") return FoldGrouping::revision;
  if (s == "student") return FoldGrouping::student;
  throw ConfigError("unknown fold grouping '" + std::string(s) + "' (expected revision or student)");
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (auto f : fold_of) ++sizes[f];
  return sizes;
}

FoldPlan make_folds(std::span<const TrainingInstance> instances, std::size_t k, std::uint64_t seed,
                    FoldGrouping grouping) {
  if (k < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (instances.size() < k) {
    throw DataError("cannot make " + std::to_string(k) + " folds from " + std::to_string(instances.size()) +
                    " instances");
  }
  for (const auto& inst : instances) {
    if (inst.is_augmented()) throw DataError("folds must be built from original instances only");
  }

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.grouping = grouping;
  plan.fold_of.assign(instances.size(), 0);
  Rng rng(seed);

  if (grouping == FoldGrouping::revision) {
    // Deal each shuffled class round-robin, continuing the rotation across
    // classes so that overall fold sizes differ by at most one.
    std::size_t next = 0;
    for (auto label : {Desirability::desirable, Desirability::undesirable}) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < instances.size(); ++i) {
        if (instances[i].label == label) members.push_back(i);
      }
      rng.shuffle(members.begin(), members.end());
      for (auto idx : members) plan.fold_of[idx] = next++ % k;
    }
    return plan;
  }

  std::map<std::string, std::vector<std::size_t>> by_student;
  for (std::size_t i = 0; i < instances.size(); ++i) by_student[instances[i].student_id].push_back(i);
  if (by_student.size() < k) {
    throw DataError("student-grouped folds need at least " + std::to_string(k) + " students");
  }
  std::vector<const std::vector<std::size_t>*> groups;
  for (const auto& [_, members] : by_student) groups.push_back(&members);
  rng.shuffle(groups.begin(), groups.end());
  std::stable_sort(groups.begin(), groups.end(), [](auto a, auto b) { return a->size() > b->size(); });
  std::vector<std::size_t> sizes(k, 0);
  for (const auto* members : groups) {
    const auto target = static_cast<std::size_t>(std::min_element(sizes.begin(), sizes.end()) - sizes.begin());
    for (auto idx : *members) plan.fold_of[idx] = target;
    sizes[target] += members->size();
  }
  return plan;
}

}  // namespace desirev
