#include "tiltkit/hub/store.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <cctype>

#include "tiltkit/error.hpp"
#include "tiltkit/tilt/codec.hpp"
#include "tiltkit/util/fs.hpp"

namespace tiltkit::hub {

namespace fs = std::filesystem;

namespace {

util::Timestamp modification_time(const fs::path& path) {
  struct stat st {};
  if (::stat(path.c_str(), &st) != 0) throw IoError("cannot stat file", path.string());
  using namespace std::chrono;
  return util::Timestamp{duration_cast<milliseconds>(seconds{st.st_mtim.tv_sec} + nanoseconds{st.st_mtim.tv_nsec})};
}

std::optional<std::int64_t> version_from_filename(const std::string& name) {
  if (name.size() < 7 || name[0] != 'v' || !name.ends_with(".tilt")) return std::nullopt;
  const auto digits = name.substr(1, name.size() - 6);
  if (digits.empty() || digits.size() > 18 || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
    return std::nullopt;
  }
  return std::stoll(digits);
}

}  // namespace

std::string encode_id(std::string_view id) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : id) {
    if (std::isalnum(c) || c == '_' || c == '-') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

std::optional<std::string> decode_id(std::string_view encoded) {
  std::string out;
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] != '%') {
      out.push_back(encoded[i]);
      continue;
    }
    if (i + 2 >= encoded.size()) return std::nullopt;
    const auto hex = std::string(encoded.substr(i + 1, 2));
    if (!std::isxdigit(static_cast<unsigned char>(hex[0])) ||
        !std::isxdigit(static_cast<unsigned char>(hex[1]))) {
      return std::nullopt;
    }
    out.push_back(static_cast<char>(std::stoi(hex, nullptr, 16)));
    i += 2;
  }
  return out;
}

nlohmann::json query_view(const tilt::TiltDocument& doc) {
  auto j = tilt::to_json(doc);
  j["meta"]["hash"] = doc.meta.hash;
  return j;
}

DocumentStore::DocumentStore(fs::path data_dir)
    : data_dir_(std::move(data_dir)), documents_dir_(data_dir_ / "documents") {
  std::error_code ec;
  fs::create_directories(documents_dir_, ec);
  if (ec) throw IoError("cannot create data directory: " + ec.message(), documents_dir_.string());

  for (const auto& entry : fs::directory_iterator(documents_dir_)) {
    if (!entry.is_directory()) continue;
    const auto id = decode_id(entry.path().filename().string());
    if (!id) continue;
    std::vector<StoreRecord> records;
    for (const auto& file : fs::directory_iterator(entry.path())) {
      const auto name = file.path().filename().string();
      if (name.starts_with(".tmp-")) {
        // Left behind by a write that never reached its rename.
        fs::remove(file.path(), ec);
        continue;
      }
      const auto version = version_from_filename(name);
      if (!version) continue;
      auto doc = tilt::parse(util::read_file(file.path()));
      if (doc.meta.id != *id || doc.meta.version != *version) {
        throw IoError("stored document does not match its location", file.path().string());
      }
      records.push_back(StoreRecord{doc, modification_time(file.path()), doc.meta.hash});
    }
    if (records.empty()) continue;
    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.doc.meta.version < b.doc.meta.version; });
    documents_.emplace(*id, std::move(records));
  }
  write_index();
}

fs::path DocumentStore::document_dir(std::string_view id) const { return documents_dir_ / encode_id(id); }

std::shared_ptr<std::mutex> DocumentStore::lock_for(const std::string& id) {
  std::lock_guard guard(id_locks_mutex_);
  auto& slot = id_locks_[id];
  if (!slot) slot = std::make_shared<std::mutex>();
  return slot;
}

void DocumentStore::write_index() const {
  nlohmann::json index = nlohmann::json::object();
  {
    std::shared_lock read(mutex_);
    for (const auto& [id, records] : documents_) index[id] = records.back().doc.meta.version;
  }
  std::lock_guard guard(index_mutex_);
  util::write_file_atomic(documents_dir_ / "index.json", index.dump(1) + "\n");
}

std::string DocumentStore::put(const tilt::TiltDocument& input) {
  tilt::TiltDocument doc = tilt::seal(input);
  tilt::validate(doc);

  const auto id_lock = lock_for(doc.meta.id);
  std::lock_guard write_guard(*id_lock);
  {
    std::shared_lock read(mutex_);
    if (auto it = documents_.find(doc.meta.id); it != documents_.end()) {
      const auto latest = it->second.back().doc.meta.version;
      if (doc.meta.version <= latest) {
        throw VersionConflictError("document '" + doc.meta.id + "' is at version " + std::to_string(latest) +
                                       "; version " + std::to_string(doc.meta.version) + " is not newer",
                                   "meta/version");
      }
    }
  }

  const auto dir = document_dir(doc.meta.id);
  std::error_code ec;
  const bool created = fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create document directory: " + ec.message(), dir.string());
  if (created) util::fsync_directory(documents_dir_);
  const auto file = dir / ("v" + std::to_string(doc.meta.version) + ".tilt");
  util::write_file_atomic(file, tilt::canonicalize(doc));
  StoreRecord record{doc, modification_time(file), doc.meta.hash};

  {
    std::unique_lock write(mutex_);
    documents_[doc.meta.id].push_back(record);
  }
  write_index();
  return record.etag;
}

StoreRecord DocumentStore::fetch(std::string_view id, std::optional<std::int64_t> version) const {
  std::shared_lock read(mutex_);
  auto it = documents_.find(id);
  if (it == documents_.end()) throw NotFoundError("no document with id '" + std::string(id) + "'", std::string(id));
  if (!version) return it->second.back();
  for (const auto& record : it->second) {
    if (record.doc.meta.version == *version) return record;
  }
  throw NotFoundError("document '" + std::string(id) + "' has no version " + std::to_string(*version),
                      std::string(id));
}

std::vector<std::int64_t> DocumentStore::versions(std::string_view id) const {
  std::shared_lock read(mutex_);
  auto it = documents_.find(id);
  if (it == documents_.end()) throw NotFoundError("no document with id '" + std::string(id) + "'", std::string(id));
  std::vector<std::int64_t> out;
  for (const auto& record : it->second) out.push_back(record.doc.meta.version);
  return out;
}

std::vector<StoreRecord> DocumentStore::latest() const {
  std::shared_lock read(mutex_);
  std::vector<StoreRecord> out;
  out.reserve(documents_.size());
  for (const auto& [id, records] : documents_) out.push_back(records.back());
  return out;
}

std::vector<std::string> DocumentStore::ids() const {
  std::shared_lock read(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, records] : documents_) out.push_back(id);
  return out;
}

std::vector<QueryHit> DocumentStore::query(const FilterExpr& filter) const {
  validate_filter(filter);
  std::vector<QueryHit> hits;
  for (const auto& record : latest()) {
    if (auto paths = evaluate_filter(filter, query_view(record.doc))) {
      hits.push_back(QueryHit{record.doc.meta.id, record.doc.meta.version, std::move(*paths)});
    }
  }
  return hits;
}

void DocumentStore::remove(std::string_view id) {
  const auto id_lock = lock_for(std::string(id));
  std::lock_guard write_guard(*id_lock);
  {
    std::unique_lock write(mutex_);
    auto it = documents_.find(id);
    if (it == documents_.end()) throw NotFoundError("no document with id '" + std::string(id) + "'", std::string(id));
    documents_.erase(it);
  }
  std::error_code ec;
  fs::remove_all(document_dir(id), ec);
  if (ec) throw IoError("cannot remove document directory: " + ec.message(), document_dir(id).string());
  write_index();
}

}  // namespace tiltkit::hub
