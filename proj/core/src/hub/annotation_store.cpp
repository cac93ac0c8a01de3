#include "tiltkit/hub/annotation_store.hpp"

#include "tiltkit/error.hpp"
#include "tiltkit/hub/store.hpp"
#include "tiltkit/util/fs.hpp"
#include "tiltkit/util/sha256.hpp"
#include "tiltkit/util/text.hpp"

namespace tiltkit::hub {

namespace fs = std::filesystem;

namespace {

void check_id(const std::string& id, const char* what) {
  if (id.empty()) throw ValidationError(std::string(what) + " id must not be empty", "id");
}

}  // namespace

AnnotationStore::AnnotationStore(fs::path data_dir)
    : policies_dir_(data_dir / "policies"), tasks_dir_(data_dir / "tasks") {
  std::error_code ec;
  fs::create_directories(policies_dir_, ec);
  if (!ec) fs::create_directories(tasks_dir_, ec);
  if (ec) throw IoError("cannot create data directory: " + ec.message(), data_dir.string());
}

fs::path AnnotationStore::policy_file(const std::string& id) const { return policies_dir_ / (encode_id(id) + ".json"); }

fs::path AnnotationStore::task_file(const std::string& id) const { return tasks_dir_ / (encode_id(id) + ".json"); }

std::shared_ptr<std::mutex> AnnotationStore::lock_for(const std::string& key) {
  std::lock_guard guard(locks_mutex_);
  auto& slot = locks_[key];
  if (!slot) slot = std::make_shared<std::mutex>();
  return slot;
}

annotation::PolicyText AnnotationStore::add_policy(std::string body, std::optional<std::string> id,
                                                   std::optional<std::string> source_url) {
  const auto policy_id = id ? *id : "policy-" + util::sha256_hex(body).substr(0, 12);
  check_id(policy_id, "policy");
  auto policy = annotation::make_policy(policy_id, std::move(body), std::move(source_url));

  const auto lock = lock_for("policy:" + policy_id);
  std::lock_guard guard(*lock);
  const auto file = policy_file(policy_id);
  if (fs::exists(file)) {
    auto stored = annotation::policy_from_json(util::parse_json(util::read_file(file)));
    if (stored.body != policy.body) {
      throw ConflictError("policy '" + policy_id + "' already exists with different text", "id");
    }
    return stored;
  }
  util::write_file_atomic(file, annotation::to_json(policy).dump());
  return policy;
}

annotation::PolicyText AnnotationStore::policy(const std::string& id) const {
  const auto file = policy_file(id);
  if (id.empty() || !fs::exists(file)) throw NotFoundError("no policy with id '" + id + "'", id);
  return annotation::policy_from_json(util::parse_json(util::read_file(file)));
}

annotation::AnnotationTask AnnotationStore::create_task(const std::string& policy_id,
                                                        std::optional<std::string> task_id, std::string country) {
  const auto text = policy(policy_id);
  const auto lock = lock_for("task-create");
  std::lock_guard guard(*lock);

  std::string id;
  if (task_id) {
    id = *task_id;
    check_id(id, "task");
    if (fs::exists(task_file(id))) throw ConflictError("task '" + id + "' already exists", "id");
  } else {
    for (int n = 1;; ++n) {
      id = policy_id + "-task-" + std::to_string(n);
      if (!fs::exists(task_file(id))) break;
    }
  }
  auto task = annotation::create_task(text, id, std::move(country));
  util::write_file_atomic(task_file(id), annotation::to_json(task).dump());
  return task;
}

annotation::AnnotationTask AnnotationStore::task(const std::string& id) const {
  const auto file = task_file(id);
  if (id.empty() || !fs::exists(file)) throw NotFoundError("no task with id '" + id + "'", id);
  return annotation::task_from_json(util::parse_json(util::read_file(file)));
}

annotation::AnnotationTask AnnotationStore::submit(const std::string& task_id,
                                                   const annotation::Submission& submission) {
  const auto lock = lock_for("task:" + task_id);
  std::lock_guard guard(*lock);
  auto current = task(task_id);
  auto updated = annotation::submit(current, policy(current.policy_id), submission);
  util::write_file_atomic(task_file(task_id), annotation::to_json(updated).dump());
  return updated;
}

}  // namespace tiltkit::hub
