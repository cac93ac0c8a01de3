#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "tiltkit/annotation/task.hpp"

namespace tiltkit::hub {

// Policies and annotation tasks persisted as JSON files under
//   <data-dir>/policies/<encoded id>.json
//   <data-dir>/tasks/<encoded id>.json
// Submissions to one task are serialized; different tasks proceed in
// parallel.
class AnnotationStore {
 public:
  explicit AnnotationStore(std::filesystem::path data_dir);

  // Re-adding identical text under the same id returns the stored policy;
  // different text under an existing id throws ConflictError. Without an
  // id, one is derived from the SHA-256 of the body.
  annotation::PolicyText add_policy(std::string body, std::optional<std::string> id = {},
                                    std::optional<std::string> source_url = {});
  annotation::PolicyText policy(const std::string& id) const;

  // Throws NotFoundError for an unknown policy, ConflictError for a taken
  // task id.
  annotation::AnnotationTask create_task(const std::string& policy_id, std::optional<std::string> task_id = {},
                                         std::string country = "DE");
  annotation::AnnotationTask task(const std::string& id) const;

  annotation::AnnotationTask submit(const std::string& task_id, const annotation::Submission& submission);

 private:
  std::filesystem::path policy_file(const std::string& id) const;
  std::filesystem::path task_file(const std::string& id) const;
  std::shared_ptr<std::mutex> lock_for(const std::string& key);

  std::filesystem::path policies_dir_;
  std::filesystem::path tasks_dir_;
  std::mutex locks_mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

}  // namespace tiltkit::hub
