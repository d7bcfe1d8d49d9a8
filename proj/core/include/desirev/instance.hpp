#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "desirev/context.hpp"
#include "desirev/corpus.hpp"
#include "desirev/revisions.hpp"

namespace desirev {

struct ContextTexts {
  std::string context1;
  std::string context2;
  friend bool operator==(const ContextTexts&, const ContextTexts&) = default;
};

/// One classifier example: the revision sentence pair plus whatever side
/// inputs the model variants may need.
struct TrainingInstance {
  std::string id;
  std::string student_id;
  std::size_t row = 0;
  Purpose purpose = Purpose::evidence;
  Operation operation = Operation::modify;
  RevisionCode code = RevisionCode::relevant;
  std::string original;  ///< empty for added revisions
  std::string revised;   ///< empty for deleted revisions
  std::optional<ContextTexts> simple_context;
  std::optional<ContextTexts> longer_context;
  std::optional<std::string> feedback;
  Desirability label = Desirability::undesirable;
  /// Set for synthetic variants: id of the original instance they came from.
  std::optional<std::string> source_id;

  [[nodiscard]] bool is_augmented() const { return source_id.has_value(); }
  /// The original this instance derives from (its own id when it is original).
  [[nodiscard]] const std::string& origin_id() const { return source_id ? *source_id : id; }
  friend bool operator==(const TrainingInstance&, const TrainingInstance&) = default;
};

std::string instance_id(const std::string& student_id, std::size_t row);

struct InstanceOptions {
  std::optional<Purpose> purpose;
  bool with_contexts = true;
};

/// Turns every evidence/reasoning revision of the corpus into an instance, in
/// corpus order then row order.
std::vector<TrainingInstance> build_instances(const std::vector<EssayPair>& pairs, const InstanceOptions& options = {});

std::string serialize_instance(const TrainingInstance& inst);
TrainingInstance parse_instance(std::string_view json_line);
void save_instances(const std::filesystem::path& path, const std::vector<TrainingInstance>& instances);
std::vector<TrainingInstance> load_instances(const std::filesystem::path& path);

/// Stable digest over ids, labels and texts.
std::string fingerprint(const std::vector<TrainingInstance>& instances);

}  // namespace desirev
