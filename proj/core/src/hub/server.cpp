#include "tiltkit/hub/server.hpp"

#include <httplib.h>

#include <charconv>

#include "tiltkit/annotation/export.hpp"
#include "tiltkit/annotation/suggest.hpp"
#include "tiltkit/error.hpp"
#include "tiltkit/hub/annotation_store.hpp"
#include "tiltkit/hub/qa.hpp"
#include "tiltkit/hub/store.hpp"
#include "tiltkit/score/score.hpp"
#include "tiltkit/tilt/codec.hpp"
#include "tiltkit/tilt/completeness.hpp"
#include "tiltkit/tilt/diff.hpp"
#include "tiltkit/util/text.hpp"

namespace tiltkit::hub {

namespace {

using nlohmann::json;

int status_for(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::kInput:
      if (e.name() == "ValidationError" || e.name() == "UnknownCategoryError" || e.name() == "SpanBoundsError" ||
          e.name() == "MissingSpanError" || e.name() == "EmptyPolicyError" || e.name() == "PathError") {
        return 422;
      }
      return 400;
    case ErrorCategory::kNotFound:
      return 404;
    case ErrorCategory::kConflict:
      return 409;
    case ErrorCategory::kIo:
    case ErrorCategory::kExecution:
      return 500;
  }
  return 500;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view name, const std::string& message,
                const std::string& path = {}) {
  send_json(res, status, {{"error", name}, {"message", message}, {"path", path}});
}

std::int64_t int_param(const httplib::Request& req, const char* name) {
  const auto text = req.get_param_value(name);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError(std::string("query parameter '") + name + "' must be an integer", name);
  }
  return value;
}

std::optional<std::int64_t> optional_int_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return int_param(req, name);
}

std::optional<std::string> optional_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

json body_json(const httplib::Request& req) { return util::parse_json(req.body); }

std::string string_field(const json& j, const char* key, bool required, const std::string& fallback = {}) {
  if (!j.contains(key) || j[key].is_null()) {
    if (required) throw ValidationError(std::string("missing '") + key + "'", key);
    return fallback;
  }
  if (!j[key].is_string()) throw ValidationError(std::string("'") + key + "' must be a string", key);
  return j[key].get<std::string>();
}

annotation::Submission submission_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("submission must be a JSON object", "");
  annotation::Submission s;
  s.field = string_field(j, "field", true);
  if (!j.contains("present") || !j["present"].is_boolean()) throw ValidationError("'present' must be a boolean", "present");
  s.present = j["present"].get<bool>();
  s.annotator = string_field(j, "annotator", false, "anonymous");
  if (j.contains("at") && !j["at"].is_null()) {
    const auto at = util::parse_rfc3339(string_field(j, "at", true));
    if (!at) throw ValidationError("'at' must be an RFC 3339 timestamp", "at");
    s.at = *at;
  } else {
    s.at = util::now();
  }
  if (j.contains("spans")) {
    if (!j["spans"].is_array()) throw ValidationError("'spans' must be an array", "spans");
    for (std::size_t i = 0; i < j["spans"].size(); ++i) {
      const auto& span = j["spans"][i];
      const auto path = "spans/" + std::to_string(i);
      if (!span.is_object() || !span.contains("start") || !span.contains("end") ||
          !span["start"].is_number_unsigned() || !span["end"].is_number_unsigned()) {
        throw ValidationError("span needs non-negative integer 'start' and 'end'", path);
      }
      s.spans.push_back({span["start"].get<std::size_t>(), span["end"].get<std::size_t>()});
    }
  }
  return s;
}

}  // namespace

struct HubServer::Impl {
  explicit Impl(ServerOptions opts) : options(std::move(opts)), documents(options.data_dir), annotations(options.data_dir) {
    if (options.signals_file) signals = score::SignalsTable::load(options.signals_file->string());
    routes();
  }

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  // Runs a handler and turns library errors into JSON error responses.
  static httplib::Server::Handler guarded(Handler fn) {
    return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const SyntaxError& e) {
        send_error(res, 400, e.name(), e.what(), e.path());
      } catch (const Error& e) {
        send_error(res, status_for(e), e.name(), e.what(), e.path());
      } catch (const std::exception& e) {
        send_error(res, 500, "InternalError", e.what());
      }
    };
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type, If-Match");
      res.status = 204;
    });

    server.Get("/health", guarded([](const auto&, auto& res) { send_json(res, 200, {{"status", "ok"}}); }));

    server.Put("/documents/:id", guarded([this](const auto& req, auto& res) {
      const auto id = req.path_params.at("id");
      auto doc = tilt::parse(req.body);
      if (doc.meta.id != id) throw ValidationError("meta.id '" + doc.meta.id + "' does not match the URL", "meta/id");
      const auto etag = documents.put(doc);
      res.set_header("ETag", "\"" + etag + "\"");
      send_json(res, 201, {{"id", id}, {"version", doc.meta.version}, {"etag", etag}});
    }));

    server.Get("/documents", guarded([this](const auto& req, auto& res) {
      const auto filter = parse_filter(req.has_param("filter") ? req.get_param_value("filter") : "");
      json out = json::array();
      for (const auto& hit : documents.query(filter)) {
        out.push_back({{"id", hit.id}, {"version", hit.version}, {"matchedPaths", hit.matched_paths}});
      }
      send_json(res, 200, out);
    }));

    server.Get("/documents/:id", guarded([this](const auto& req, auto& res) {
      const auto record = documents.fetch(req.path_params.at("id"), optional_int_param(req, "version"));
      res.set_header("ETag", "\"" + record.etag + "\"");
      res.set_header("X-Stored-At", util::format_rfc3339(record.stored_at));
      send_json(res, 200, query_view(record.doc));
    }));

    server.Get("/documents/:id/versions", guarded([this](const auto& req, auto& res) {
      send_json(res, 200, {{"id", req.path_params.at("id")}, {"versions", documents.versions(req.path_params.at("id"))}});
    }));

    server.Delete("/documents/:id", guarded([this](const auto& req, auto& res) {
      documents.remove(req.path_params.at("id"));
      res.status = 204;
    }));

    server.Get("/documents/:id/completeness", guarded([this](const auto& req, auto& res) {
      const auto record = documents.fetch(req.path_params.at("id"), optional_int_param(req, "version"));
      send_json(res, 200, tilt::to_json(tilt::check_completeness(record.doc)));
    }));

    server.Get("/documents/:id/diff", guarded([this](const auto& req, auto& res) {
      const auto& id = req.path_params.at("id");
      const auto from = documents.fetch(id, int_param(req, "from"));
      const auto to = documents.fetch(id, int_param(req, "to"));
      send_json(res, 200, tilt::to_json(tilt::diff(from.doc, to.doc)));
    }));

    server.Get("/documents/:id/score", guarded([this](const auto& req, auto& res) {
      const auto record = documents.fetch(req.path_params.at("id"), optional_int_param(req, "version"));
      const auto domain = optional_param(req, "domain").value_or(score::domain_of(record.doc));
      const auto found = signals.lookup(domain);
      const auto sig = found.value_or(score::ExternalSignals{});
      send_json(res, 200,
                {{"domain", domain},
                 {"signalsFound", found.has_value()},
                 {"report", score::to_json(score::compute_score(record.doc, sig))},
                 {"summary", score::to_json(score::summarize(record.doc, sig))}});
    }));

    server.Post("/documents/:id/answers", guarded([this](const auto& req, auto& res) {
      const auto intent = intent_from_json(body_json(req));
      const auto record = documents.fetch(req.path_params.at("id"));
      send_json(res, 200, to_json(answer_question(record.doc, intent)));
    }));

    server.Post("/policies", guarded([this](const auto& req, auto& res) {
      const auto j = body_json(req);
      if (!j.is_object()) throw ValidationError("policy request must be a JSON object", "");
      std::optional<std::string> id;
      std::optional<std::string> source;
      if (j.contains("id")) id = string_field(j, "id", true);
      if (j.contains("sourceUrl")) source = string_field(j, "sourceUrl", true);
      const auto policy = annotations.add_policy(string_field(j, "text", true), id, source);
      send_json(res, 201, annotation::to_json(policy));
    }));

    server.Get("/policies/:id", guarded([this](const auto& req, auto& res) {
      send_json(res, 200, annotation::to_json(annotations.policy(req.path_params.at("id"))));
    }));

    server.Post("/tasks", guarded([this](const auto& req, auto& res) {
      const auto j = body_json(req);
      if (!j.is_object()) throw ValidationError("task request must be a JSON object", "");
      std::optional<std::string> id;
      if (j.contains("id")) id = string_field(j, "id", true);
      const auto task = annotations.create_task(string_field(j, "policyId", true), id, string_field(j, "country", false, "DE"));
      send_json(res, 201, annotation::to_json(task));
    }));

    server.Get("/tasks/:id", guarded([this](const auto& req, auto& res) {
      send_json(res, 200, annotation::to_json(annotations.task(req.path_params.at("id"))));
    }));

    server.Get("/tasks/:id/next", guarded([this](const auto& req, auto& res) {
      const auto task = annotations.task(req.path_params.at("id"));
      const auto question = annotation::next_question(task, req.has_param("lang") ? req.get_param_value("lang") : "en");
      json out{{"done", !question.has_value()}, {"progress", task.progress()}};
      out["question"] = question ? annotation::to_json(*question) : json(nullptr);
      send_json(res, 200, out);
    }));

    server.Post("/tasks/:id/submissions", guarded([this](const auto& req, auto& res) {
      const auto submission = submission_from_json(body_json(req));
      send_json(res, 200, annotation::to_json(annotations.submit(req.path_params.at("id"), submission)));
    }));

    server.Get("/tasks/:id/suggestions", guarded([this](const auto& req, auto& res) {
      const auto task = annotations.task(req.path_params.at("id"));
      const auto policy = annotations.policy(task.policy_id);
      if (!req.has_param("field")) throw ValidationError("query parameter 'field' is required", "field");
      json out = json::array();
      for (const auto& s : annotation::suggest(task, policy, req.get_param_value("field"))) out.push_back(annotation::to_json(s));
      send_json(res, 200, out);
    }));

    server.Get("/tasks/:id/export", guarded([this](const auto& req, auto& res) {
      const auto task = annotations.task(req.path_params.at("id"));
      const auto policy = annotations.policy(task.policy_id);
      annotation::MetaSeed seed;
      seed.id = optional_param(req, "id").value_or(task.id);
      seed.name = optional_param(req, "name").value_or(task.id);
      seed.language = optional_param(req, "language").value_or("en");
      seed.country = optional_param(req, "country");
      const auto doc = annotation::export_tilt(task, policy, seed);
      auto body = tilt::to_json(doc);
      body["meta"]["hash"] = doc.meta.hash;
      send_json(res, 200, body);
    }));

    if (options.ui_dir) {
      if (!server.set_mount_point("/ui", options.ui_dir->string())) {
        throw IoError("UI directory does not exist", options.ui_dir->string());
      }
    } else {
      server.Get("/ui(/.*)?", [](const auto&, auto& res) {
        send_error(res, 404, "NotFoundError", "no UI directory configured; start the hub with --ui-dir", "");
      });
    }
  }

  ServerOptions options;
  DocumentStore documents;
  AnnotationStore annotations;
  score::SignalsTable signals;
  httplib::Server server;
};

HubServer::HubServer(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

HubServer::~HubServer() = default;

int HubServer::bind() {
  auto& o = impl_->options;
  if (o.port == 0) {
    const int port = impl_->server.bind_to_any_port(o.host);
    if (port < 0) throw IoError("cannot bind to " + o.host);
    return port;
  }
  if (!impl_->server.bind_to_port(o.host, o.port)) {
    throw IoError("cannot bind to " + o.host + ":" + std::to_string(o.port));
  }
  return o.port;
}

void HubServer::run() { impl_->server.listen_after_bind(); }

void HubServer::stop() { impl_->server.stop(); }

}  // namespace tiltkit::hub
