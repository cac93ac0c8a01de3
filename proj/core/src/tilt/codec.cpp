#include "tiltkit/tilt/codec.hpp"

#include <regex>
#include <set>

#include "tiltkit/error.hpp"
#include "tiltkit/util/countries.hpp"
#include "tiltkit/util/sha256.hpp"
#include "tiltkit/util/text.hpp"

namespace tiltkit::tilt {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "/" + key;
}

// Strict view over one JSON object: tracks the field path for error
// messages and rejects keys the schema does not know.
class ObjectReader {
 public:
  ObjectReader(const json& value, std::string path, std::initializer_list<std::string_view> known)
      : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) fail(path_, "expected an object");
    const std::set<std::string_view> allowed(known);
    for (const auto& [key, unused] : value_.items()) {
      if (!allowed.count(key)) fail(join(path_, key), "unknown field");
    }
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& message) {
    throw ValidationError((path.empty() ? std::string("document") : path) + ": " + message, path);
  }

  std::string at(std::string_view key) const { return join(path_, std::string(key)); }

  const json* find(std::string_view key) const {
    auto it = value_.find(key);
    if (it == value_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  const json& require(std::string_view key) const {
    const json* v = find(key);
    if (!v) fail(at(key), "required field missing");
    return *v;
  }

  std::string string(std::string_view key) const { return as_string(require(key), at(key)); }

  std::string string_or(std::string_view key, std::string fallback) const {
    const json* v = find(key);
    return v ? as_string(*v, at(key)) : fallback;
  }

  std::optional<std::string> optional_string(std::string_view key) const {
    const json* v = find(key);
    if (!v) return std::nullopt;
    return as_string(*v, at(key));
  }

  bool boolean(std::string_view key) const {
    const json& v = require(key);
    if (!v.is_boolean()) fail(at(key), "expected a boolean");
    return v.get<bool>();
  }

  const json* array(std::string_view key) const {
    const json* v = find(key);
    if (v && !v->is_array()) fail(at(key), "expected an array");
    return v;
  }

  static std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

 private:
  const json& value_;
  std::string path_;
};

void check_non_empty(const std::string& value, const std::string& path) {
  if (value.empty()) ObjectReader::fail(path, "must not be empty");
}

void check_country(const std::string& value, const std::string& path) {
  if (!util::is_alpha2_country(value)) {
    ObjectReader::fail(path, "'" + value + "' is not an ISO 3166-1 alpha-2 country code");
  }
}

Timestamp read_timestamp(const ObjectReader& r, std::string_view key) {
  const std::string text = r.string(key);
  auto ts = util::parse_rfc3339(text);
  if (!ts) ObjectReader::fail(r.at(key), "'" + text + "' is not an RFC 3339 timestamp");
  return *ts;
}

ContactPoint read_contact(const json& v, const std::string& path) {
  ObjectReader r(v, path, {"name", "email", "phone"});
  ContactPoint c;
  c.name = r.string("name");
  c.email = r.optional_string("email");
  c.phone = r.optional_string("phone");
  if (c.email && c.email->empty()) ObjectReader::fail(r.at("email"), "must not be empty");
  if (c.phone && c.phone->empty()) ObjectReader::fail(r.at("phone"), "must not be empty");
  if (!c.email && !c.phone) ObjectReader::fail(path, "contact point needs an email or a phone");
  return c;
}

Meta read_meta(const json& v, const std::string& path) {
  ObjectReader r(v, path, {"id", "name", "version", "created", "modified", "language", "hash"});
  Meta m;
  m.id = r.string("id");
  check_non_empty(m.id, r.at("id"));
  m.name = r.string("name");
  const json& version = r.require("version");
  if (!version.is_number_integer()) ObjectReader::fail(r.at("version"), "expected an integer");
  m.version = version.get<std::int64_t>();
  if (m.version < 1) ObjectReader::fail(r.at("version"), "must be >= 1");
  m.created = read_timestamp(r, "created");
  m.modified = read_timestamp(r, "modified");
  if (m.modified < m.created) ObjectReader::fail(r.at("modified"), "must not precede created");
  m.language = r.string("language");
  static const std::regex kLanguage("^[a-z]{2}$");
  if (!std::regex_match(m.language, kLanguage)) {
    ObjectReader::fail(r.at("language"), "expected a two-letter ISO 639-1 code");
  }
  m.hash = r.string_or("hash", "");
  static const std::regex kHash("^[0-9a-f]{64}$");
  if (!m.hash.empty() && !std::regex_match(m.hash, kHash)) {
    ObjectReader::fail(r.at("hash"), "expected 64 lowercase hex digits or an empty string");
  }
  return m;
}

Controller read_controller(const json& v, const std::string& path) {
  ObjectReader r(v, path, {"name", "address", "country", "representative"});
  Controller c;
  c.name = r.string("name");
  check_non_empty(c.name, r.at("name"));
  c.address = r.string_or("address", "");
  c.country = r.string("country");
  check_country(c.country, r.at("country"));
  if (const json* rep = r.find("representative")) c.representative = read_contact(*rep, r.at("representative"));
  return c;
}

Purpose read_purpose(const json& v, const std::string& path) {
  ObjectReader r(v, path, {"description", "legalBasis", "legitimateInterest"});
  Purpose p;
  p.description = r.string("description");
  p.legal_basis = r.optional_string("legalBasis");
  if (p.legal_basis) check_non_empty(*p.legal_basis, r.at("legalBasis"));
  p.legitimate_interest = r.optional_string("legitimateInterest");
  return p;
}

Recipient read_recipient(const json& v, const std::string& path) {
  ObjectReader r(v, path, {"name", "category", "country"});
  Recipient rec;
  rec.name = r.string("name");
  check_non_empty(rec.name, r.at("name"));
  rec.category = r.string_or("category", "");
  rec.country = r.string("country");
  check_country(rec.country, r.at("country"));
  return rec;
}

Storage read_storage(const json& v, const std::string& path) {
  ObjectReader r(v, path, {"kind", "value"});
  Storage s;
  const std::string kind = r.string("kind");
  if (kind == "duration") {
    s.kind = StorageKind::kDuration;
  } else if (kind == "criterion") {
    s.kind = StorageKind::kCriterion;
  } else {
    ObjectReader::fail(r.at("kind"), "expected 'duration' or 'criterion'");
  }
  s.value = r.string("value");
  if (s.kind == StorageKind::kDuration && !util::is_iso8601_duration(s.value)) {
    ObjectReader::fail(r.at("value"), "'" + s.value + "' is not an ISO 8601 duration");
  }
  if (s.kind == StorageKind::kCriterion) check_non_empty(s.value, r.at("value"));
  return s;
}

template <typename T, typename Fn>
std::vector<T> read_list(const ObjectReader& r, std::string_view key, Fn&& read_item) {
  std::vector<T> out;
  if (const json* arr = r.array(key)) {
    const std::string base = r.at(key);
    for (std::size_t i = 0; i < arr->size(); ++i) {
      out.push_back(read_item((*arr)[i], base + "/" + std::to_string(i)));
    }
  }
  return out;
}

DataDisclosed read_data_disclosed(const json& v, const std::string& path) {
  ObjectReader r(v, path, {"category", "purposes", "recipients", "storage", "requirementNote"});
  DataDisclosed d;
  d.category = r.string("category");
  check_non_empty(d.category, r.at("category"));
  d.purposes = read_list<Purpose>(r, "purposes", read_purpose);
  d.recipients = read_list<Recipient>(r, "recipients", read_recipient);
  if (const json* s = r.find("storage")) d.storage = read_storage(*s, r.at("storage"));
  d.requirement_note = r.optional_string("requirementNote");
  return d;
}

ThirdCountryTransfer read_transfer(const json& v, const std::string& path) {
  ObjectReader r(v, path, {"country", "adequacyDecision", "safeguards"});
  ThirdCountryTransfer t;
  t.country = r.string("country");
  check_country(t.country, r.at("country"));
  t.adequacy_decision = r.boolean("adequacyDecision");
  t.safeguards = r.optional_string("safeguards");
  return t;
}

RightEntry read_right(const json& v, const std::string& path) {
  ObjectReader r(v, path, {"available", "description"});
  RightEntry e;
  e.available = r.boolean("available");
  e.description = r.optional_string("description");
  return e;
}

RightsInfo read_rights(const json& v, const std::string& path) {
  ObjectReader r(v, path,
                 {"access", "rectification", "erasure", "restriction", "portability", "objection",
                  "withdrawConsent", "complaintAuthority"});
  RightsInfo rights;
  for (std::string_view key : {"access", "rectification", "erasure", "restriction", "portability",
                               "objection", "withdrawConsent"}) {
    if (const json* e = r.find(key)) *find_right(rights, key) = read_right(*e, r.at(key));
  }
  if (const json* c = r.find("complaintAuthority")) {
    rights.complaint_authority = read_contact(*c, r.at("complaintAuthority"));
  }
  return rights;
}

AdmInfo read_adm(const json& v, const std::string& path) {
  ObjectReader r(v, path, {"inUse", "logicDescription", "consequences"});
  AdmInfo a;
  a.in_use = r.boolean("inUse");
  a.logic_description = r.optional_string("logicDescription");
  a.consequences = r.optional_string("consequences");
  return a;
}

json contact_json(const ContactPoint& c) {
  json out = json::object();
  out["name"] = c.name;
  if (c.email) out["email"] = *c.email;
  if (c.phone) out["phone"] = *c.phone;
  return out;
}

json right_json(const RightEntry& e) {
  json out = json::object();
  out["available"] = e.available;
  if (e.description) out["description"] = *e.description;
  return out;
}

}  // namespace

TiltDocument from_json(const json& value) {
  ObjectReader r(value, "",
                 {"meta", "controller", "dpo", "dataDisclosed", "thirdCountryTransfers", "rights",
                  "automatedDecisionMaking", "sources"});
  TiltDocument doc;
  doc.meta = read_meta(r.require("meta"), "meta");
  doc.controller = read_controller(r.require("controller"), "controller");
  if (const json* dpo = r.find("dpo")) doc.dpo = read_contact(*dpo, "dpo");
  doc.data_disclosed = read_list<DataDisclosed>(r, "dataDisclosed", read_data_disclosed);
  doc.third_country_transfers = read_list<ThirdCountryTransfer>(r, "thirdCountryTransfers", read_transfer);
  if (const json* rights = r.find("rights")) doc.rights = read_rights(*rights, "rights");
  if (const json* adm = r.find("automatedDecisionMaking")) {
    doc.automated_decision_making = read_adm(*adm, "automatedDecisionMaking");
  }
  doc.sources = read_list<std::string>(r, "sources", [](const json& v, const std::string& path) {
    return ObjectReader::as_string(v, path);
  });

  const std::string supplied = doc.meta.hash;
  doc.meta.hash = compute_hash(doc);
  if (!supplied.empty() && supplied != doc.meta.hash) {
    throw ValidationError("meta/hash: does not match the canonical content hash " + doc.meta.hash,
                          "meta/hash");
  }
  return doc;
}

TiltDocument parse(std::string_view text) { return from_json(util::parse_json(text)); }

json to_json(const TiltDocument& doc) {
  json out = json::object();

  json meta = json::object();
  meta["id"] = doc.meta.id;
  meta["name"] = doc.meta.name;
  meta["version"] = doc.meta.version;
  meta["created"] = util::format_rfc3339(doc.meta.created);
  meta["modified"] = util::format_rfc3339(doc.meta.modified);
  meta["language"] = doc.meta.language;
  meta["hash"] = "";
  out["meta"] = std::move(meta);

  json controller = json::object();
  controller["name"] = doc.controller.name;
  controller["address"] = doc.controller.address;
  controller["country"] = doc.controller.country;
  if (doc.controller.representative) controller["representative"] = contact_json(*doc.controller.representative);
  out["controller"] = std::move(controller);

  if (doc.dpo) out["dpo"] = contact_json(*doc.dpo);

  json disclosed = json::array();
  for (const auto& d : doc.data_disclosed) {
    json entry = json::object();
    entry["category"] = d.category;
    json purposes = json::array();
    for (const auto& p : d.purposes) {
      json pj = json::object();
      pj["description"] = p.description;
      if (p.legal_basis) pj["legalBasis"] = *p.legal_basis;
      if (p.legitimate_interest) pj["legitimateInterest"] = *p.legitimate_interest;
      purposes.push_back(std::move(pj));
    }
    entry["purposes"] = std::move(purposes);
    json recipients = json::array();
    for (const auto& rec : d.recipients) {
      recipients.push_back({{"name", rec.name}, {"category", rec.category}, {"country", rec.country}});
    }
    entry["recipients"] = std::move(recipients);
    if (d.storage) {
      entry["storage"] = {{"kind", d.storage->kind == StorageKind::kDuration ? "duration" : "criterion"},
                          {"value", d.storage->value}};
    }
    if (d.requirement_note) entry["requirementNote"] = *d.requirement_note;
    disclosed.push_back(std::move(entry));
  }
  out["dataDisclosed"] = std::move(disclosed);

  json transfers = json::array();
  for (const auto& t : doc.third_country_transfers) {
    json tj = json::object();
    tj["country"] = t.country;
    tj["adequacyDecision"] = t.adequacy_decision;
    if (t.safeguards) tj["safeguards"] = *t.safeguards;
    transfers.push_back(std::move(tj));
  }
  out["thirdCountryTransfers"] = std::move(transfers);

  json rights = json::object();
  for (std::string_view key : {"access", "rectification", "erasure", "restriction", "portability",
                               "objection", "withdrawConsent"}) {
    if (const auto& entry = *find_right(doc.rights, key)) rights[std::string(key)] = right_json(*entry);
  }
  if (doc.rights.complaint_authority) rights["complaintAuthority"] = contact_json(*doc.rights.complaint_authority);
  out["rights"] = std::move(rights);

  if (const auto& adm = doc.automated_decision_making) {
    json aj = json::object();
    aj["inUse"] = adm->in_use;
    if (adm->logic_description) aj["logicDescription"] = *adm->logic_description;
    if (adm->consequences) aj["consequences"] = *adm->consequences;
    out["automatedDecisionMaking"] = std::move(aj);
  }

  out["sources"] = doc.sources;
  return out;
}

std::string canonicalize(const TiltDocument& doc) {
  // nlohmann's default object type is an ordered std::map, so dump() emits
  // keys sorted bytewise.
  return to_json(doc).dump();
}

std::string compute_hash(const TiltDocument& doc) { return util::sha256_hex(canonicalize(doc)); }

TiltDocument seal(TiltDocument doc) {
  doc.meta.hash = compute_hash(doc);
  return doc;
}

void validate(const TiltDocument& doc) {
  json j = to_json(doc);
  j["meta"]["hash"] = doc.meta.hash;
  from_json(j);
}

std::vector<std::string> non_normative_legal_bases(const TiltDocument& doc) {
  std::vector<std::string> paths;
  for (std::size_t i = 0; i < doc.data_disclosed.size(); ++i) {
    const auto& purposes = doc.data_disclosed[i].purposes;
    for (std::size_t j = 0; j < purposes.size(); ++j) {
      if (purposes[j].legal_basis && !classify_legal_basis(*purposes[j].legal_basis).normative) {
        paths.push_back("dataDisclosed/" + std::to_string(i) + "/purposes/" + std::to_string(j) +
                        "/legalBasis");
      }
    }
  }
  return paths;
}

}  // namespace tiltkit::tilt
