#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "tiltkit/hub/filter.hpp"
#include "tiltkit/tilt/document.hpp"

namespace tiltkit::hub {

struct StoreRecord {
  tilt::TiltDocument doc;
  util::Timestamp stored_at{};
  std::string etag;  // == doc.meta.hash

  bool operator==(const StoreRecord&) const = default;
};

struct QueryHit {
  std::string id;
  std::int64_t version = 0;
  std::vector<std::string> matched_paths;

  bool operator==(const QueryHit&) const = default;
};

// Versioned document store on the local filesystem:
//
//   <data-dir>/documents/<encoded id>/v<version>.tilt   canonical form
//   <data-dir>/documents/index.json                     id -> latest version
//
// Every version file is written to a temporary file, fsynced and renamed,
// so an acknowledged put survives a crash. The index is rebuilt from the
// version files on open. Reads run concurrently; writes are serialized per
// document id.
class DocumentStore {
 public:
  explicit DocumentStore(std::filesystem::path data_dir);

  DocumentStore(const DocumentStore&) = delete;
  DocumentStore& operator=(const DocumentStore&) = delete;

  // Throws ValidationError, VersionConflictError (version not greater than
  // the stored latest) or IoError. Returns the etag.
  std::string put(const tilt::TiltDocument& doc);

  // Latest version when `version` is empty. Throws NotFoundError.
  StoreRecord fetch(std::string_view id, std::optional<std::int64_t> version = {}) const;

  std::vector<std::int64_t> versions(std::string_view id) const;

  // Latest version of every document, ordered by id.
  std::vector<StoreRecord> latest() const;

  std::vector<std::string> ids() const;

  // Full-scan filter over latest versions, ordered by id. Throws
  // BadFilterError.
  std::vector<QueryHit> query(const FilterExpr& filter) const;

  // Removes every version of `id`. Throws NotFoundError.
  void remove(std::string_view id);

  const std::filesystem::path& data_dir() const { return data_dir_; }

 private:
  std::filesystem::path document_dir(std::string_view id) const;
  std::shared_ptr<std::mutex> lock_for(const std::string& id);
  void write_index() const;

  std::filesystem::path data_dir_;
  std::filesystem::path documents_dir_;

  mutable std::shared_mutex mutex_;
  std::map<std::string, std::vector<StoreRecord>, std::less<>> documents_;  // versions ascending

  std::mutex id_locks_mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> id_locks_;
  mutable std::mutex index_mutex_;
};

// JSON used for filter evaluation and query responses: the canonical
// structure with meta.hash filled in.
nlohmann::json query_view(const tilt::TiltDocument& doc);

// Directory-safe encoding of a document id ([A-Za-z0-9_-] kept, everything
// else percent-encoded).
std::string encode_id(std::string_view id);
std::optional<std::string> decode_id(std::string_view encoded);

}  // namespace tiltkit::hub
