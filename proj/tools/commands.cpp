#include "commands.hpp"

#include <csignal>
#include <filesystem>
#include <iostream>

#include "tiltkit/archive/analyzer.hpp"
#include "tiltkit/dsar/descriptor.hpp"
#include "tiltkit/dsar/engine.hpp"
#include "tiltkit/dsar/mock_driver.hpp"
#include "tiltkit/dsar/registry.hpp"
#include "tiltkit/error.hpp"
#include "tiltkit/hub/qa.hpp"
#include "tiltkit/hub/server.hpp"
#include "tiltkit/hub/store.hpp"
#include "tiltkit/score/score.hpp"
#include "tiltkit/tilt/codec.hpp"
#include "tiltkit/tilt/completeness.hpp"
#include "tiltkit/tilt/diff.hpp"
#include "tiltkit/util/fs.hpp"
#include "tiltkit/util/text.hpp"

namespace tiltkit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void print_json(const json& j) {
  std::cout << j.dump(2, ' ', false, json::error_handler_t::replace) << '\n';
}

tilt::TiltDocument load_document(const std::string& file) { return tilt::parse(util::read_file(file)); }

json document_view(const tilt::TiltDocument& doc) {
  auto j = tilt::to_json(doc);
  j["meta"]["hash"] = doc.meta.hash;
  return j;
}

std::string describe(const std::optional<json>& value) {
  if (!value) return "-";
  return value->dump(-1, ' ', false, json::error_handler_t::replace);
}

hub::HubServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    const std::string message = e.what();
    std::cerr << e.name() << ": " << message;
    if (!e.path().empty() && message.find(e.path()) == std::string::npos) std::cerr << " (at " << e.path() << ")";
    std::cerr << '\n';
    switch (e.category()) {
      case ErrorCategory::kIo:
        return kIoError;
      case ErrorCategory::kExecution:
        return kExecutionError;
      default:
        return kFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "InternalError: " << e.what() << '\n';
    return kIoError;
  }
}

int tilt_validate(const std::string& file, Output out) {
  const auto doc = load_document(file);
  const auto warnings = tilt::non_normative_legal_bases(doc);
  if (out.json) {
    print_json({{"valid", true},
                {"id", doc.meta.id},
                {"version", doc.meta.version},
                {"hash", doc.meta.hash},
                {"nonNormativeLegalBases", warnings}});
    return kOk;
  }
  std::cout << "valid: " << doc.meta.id << " version " << doc.meta.version << '\n';
  std::cout << "hash: " << doc.meta.hash << '\n';
  for (const auto& w : warnings) std::cout << "warning: legal basis is not a GDPR reference: " << w << '\n';
  return kOk;
}

int tilt_completeness(const std::string& file, Output out) {
  const auto report = tilt::check_completeness(load_document(file));
  if (out.json) {
    auto j = tilt::to_json(report);
    j["missingCount"] = report.missing_count();
    print_json(j);
  } else {
    for (const auto& item : report.items) {
      std::cout << item.key << "  " << tilt::to_string(item.status);
      std::cout << std::string(16 - tilt::to_string(item.status).size(), ' ') << tilt::describe_checklist_item(item.key);
      if (item.evidence_path) std::cout << "  [" << *item.evidence_path << "]";
      std::cout << '\n';
    }
    std::cout << report.missing_count() << " missing\n";
  }
  return report.missing_count() == 0 ? kOk : kFailure;
}

int tilt_diff(const std::string& old_file, const std::string& new_file, Output out) {
  const auto delta = tilt::diff(load_document(old_file), load_document(new_file));
  if (out.json) {
    print_json(tilt::to_json(delta));
    return kOk;
  }
  for (const auto& e : delta.entries) {
    std::cout << tilt::to_string(e.op) << ' ' << e.path << ": " << describe(e.before) << " -> " << describe(e.after)
              << '\n';
  }
  if (delta.entries.empty()) std::cout << "no differences\n";
  return kOk;
}

int tilt_hash(const std::string& file, Output out) {
  const auto doc = load_document(file);
  if (out.json) {
    print_json({{"id", doc.meta.id}, {"hash", doc.meta.hash}});
  } else {
    std::cout << doc.meta.hash << '\n';
  }
  return kOk;
}

int tilt_canonicalize(const std::string& file) {
  std::cout << tilt::canonicalize(load_document(file)) << '\n';
  return kOk;
}

int hub_serve(const ServeOptions& options) {
  hub::ServerOptions so;
  so.host = options.host;
  so.port = options.port;
  so.data_dir = options.data_dir;
  if (options.signals) so.signals_file = *options.signals;
  if (options.ui_dir) so.ui_dir = *options.ui_dir;
  hub::HubServer server(so);
  const int port = server.bind();
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::cout << "listening on http://" << options.host << ':' << port << std::endl;
  server.run();
  g_server = nullptr;
  return kOk;
}

int hub_put(const std::string& data_dir, const std::string& file, Output out) {
  hub::DocumentStore store(data_dir);
  const auto doc = load_document(file);
  const auto etag = store.put(doc);
  if (out.json) {
    print_json({{"id", doc.meta.id}, {"version", doc.meta.version}, {"etag", etag}});
  } else {
    std::cout << "stored " << doc.meta.id << " version " << doc.meta.version << " etag " << etag << '\n';
  }
  return kOk;
}

int hub_get(const std::string& data_dir, const std::string& id, std::optional<long long> version) {
  hub::DocumentStore store(data_dir);
  print_json(document_view(store.fetch(id, version).doc));
  return kOk;
}

int hub_query(const std::string& data_dir, const std::string& filter, Output out) {
  hub::DocumentStore store(data_dir);
  const auto hits = store.query(hub::parse_filter(filter));
  if (out.json) {
    json j = json::array();
    for (const auto& h : hits) j.push_back({{"id", h.id}, {"version", h.version}, {"matchedPaths", h.matched_paths}});
    print_json(j);
    return kOk;
  }
  for (const auto& h : hits) std::cout << h.id << " v" << h.version << '\n';
  return kOk;
}

int hub_ask(const std::string& data_dir, const std::string& id, const std::string& intent,
            std::optional<std::string> category, Output out) {
  hub::DocumentStore store(data_dir);
  json request{{"kind", intent}};
  if (category) request["params"] = {{"category", *category}};
  const auto answer = hub::answer_question(store.fetch(id).doc, hub::intent_from_json(request));
  if (out.json) {
    print_json(hub::to_json(answer));
  } else {
    std::cout << answer.answer_text << '\n';
    for (const auto& p : answer.evidence_paths) std::cout << "  evidence: " << p << '\n';
  }
  return kOk;
}

int score(const std::string& file, std::optional<std::string> signals_file, std::optional<std::string> domain,
          Output out) {
  const auto doc = load_document(file);
  score::SignalsTable table;
  if (signals_file) table = score::SignalsTable::load(*signals_file);
  const auto lookup_domain = domain.value_or(score::domain_of(doc));
  const auto found = table.lookup(lookup_domain);
  if (signals_file && !found) {
    std::cerr << "warning: no signals for domain '" << lookup_domain << "'; scoring with empty signals\n";
  }
  const auto signals = found.value_or(score::ExternalSignals{});
  const auto report = score::compute_score(doc, signals);
  const auto card = score::summarize(doc, signals);
  if (out.json) {
    print_json({{"domain", lookup_domain},
                {"signalsFound", found.has_value()},
                {"report", score::to_json(report)},
                {"summary", score::to_json(card)}});
    return kOk;
  }
  std::cout << "score: " << report.score << " (" << score::to_string(report.label) << ")\n";
  for (const auto& e : report.breakdown) std::cout << "  " << e.code << ' ' << e.points << '\n';
  std::cout << "controller: " << card.controller_name << '\n'
            << "third-country transfers: " << card.transfer_count << '\n'
            << "automated decision-making: " << (card.adm_in_use ? "yes" : "no") << '\n'
            << "trackers: " << card.tracker_count << '\n'
            << "missing disclosures: " << card.missing_disclosures << '\n';
  return kOk;
}

int dsar_validate(const std::string& file, Output out) {
  const auto d = dsar::validate_descriptor(util::read_file(file));
  if (out.json) {
    print_json({{"valid", true}, {"service", d.service}, {"domain", d.domain}, {"steps", d.steps.size()},
                {"descriptorHash", dsar::descriptor_hash(d)}});
  } else {
    std::cout << "valid: " << d.service << " (" << d.domain << "), " << d.steps.size() << " steps\n";
  }
  return kOk;
}

int dsar_run(const DsarRunOptions& o, Output out) {
  const auto descriptor = dsar::validate_descriptor(util::read_file(o.descriptor));
  if (!o.driver.starts_with("mock:")) {
    throw ValidationError("unsupported driver '" + o.driver + "'; only mock:<fixture> is available", "driver");
  }
  auto driver = dsar::MockDriver::from_json(util::parse_json(util::read_file(o.driver.substr(5))));
  const auto identity = dsar::identity_from_json(util::parse_json(util::read_file(o.identity)));

  const fs::path out_dir = o.out_dir;
  const auto state_file = out_dir / "driver-state.json";
  std::optional<dsar::DsarSession> resume;
  if (o.resume) {
    resume = dsar::session_from_json(util::parse_json(util::read_file(*o.resume)));
    if (fs::exists(state_file)) driver.restore(util::parse_json(util::read_file(state_file)));
  }

  // Mock sites run on simulated time.
  dsar::VirtualClock clock;
  dsar::ExecuteOptions options;
  options.clock = &clock;
  options.detach_on_poll = o.detach;
  const auto session = dsar::execute(descriptor, driver, identity, out_dir / "artifacts", resume, options);

  fs::create_directories(out_dir);
  util::write_file_atomic(out_dir / "session.json", dsar::to_json(session).dump(2) + "\n");
  util::write_file_atomic(state_file, driver.snapshot().dump(2) + "\n");

  if (out.json) {
    print_json(dsar::to_json(session));
  } else {
    std::cout << "status: " << dsar::to_string(session.status) << " at step " << session.step_index << " of "
              << descriptor.steps.size() << '\n';
    for (const auto& a : session.artifacts) std::cout << "artifact: " << a.local_path << " (" << a.byte_length << " bytes)\n";
    if (session.failure) {
      std::cout << "failed at step " << session.failure->step_index << ": " << session.failure->reason << '\n';
    }
    std::cout << "session: " << (out_dir / "session.json").string() << '\n';
  }
  return session.status == dsar::SessionStatus::kFailed ? kExecutionError : kOk;
}

int dsar_lookup(const std::string& domain, const std::string& registry_file, Output out) {
  const auto registry = dsar::load_registry(registry_file);
  const auto record = dsar::registry_lookup(registry, domain);
  if (out.json) {
    print_json(record ? dsar::to_json(*record) : json(nullptr));
  } else if (record) {
    std::cout << record->service << " (" << record->domain << ")\n"
              << "request: " << record->request_url << '\n'
              << "difficulty: " << record->difficulty << '\n';
    if (!record->notes.empty()) std::cout << "notes: " << record->notes << '\n';
  } else {
    std::cout << "no registry entry for " << domain << '\n';
  }
  return record ? kOk : kFailure;
}

int archive_analyze(const std::string& dir, std::optional<std::string> service, unsigned threads, Output out) {
  const auto manifest = archive::ingest(dir, service, threads);
  const auto profile = archive::profile(manifest, threads);
  for (const auto& w : manifest.warnings) std::cerr << "warning: " << w << '\n';
  if (out.json) {
    print_json({{"manifest", archive::to_json(manifest)}, {"profile", archive::to_json(profile)}});
    return kOk;
  }
  std::cout << "service: " << profile.service << '\n';
  for (const auto& f : manifest.files) {
    std::cout << "  " << f.relative_path << "  " << archive::to_string(f.kind) << "  " << f.record_count << '\n';
  }
  for (const auto& [kind, count] : profile.counts_by_kind) std::cout << kind << ": " << count << '\n';
  if (profile.earliest) {
    std::cout << "span: " << util::format_rfc3339(*profile.earliest) << " .. " << util::format_rfc3339(*profile.latest)
              << '\n';
  }
  for (const auto& [month, count] : profile.monthly_histogram) std::cout << "  " << month << "  " << count << '\n';
  std::cout << "total bytes: " << profile.total_bytes << '\n';
  return kOk;
}

int archive_risk(const std::string& dir, std::optional<std::string> service, unsigned threads, Output out) {
  const auto entry = archive::scoreboard_entry(archive::profile(archive::ingest(dir, service, threads), threads));
  if (out.json) {
    print_json({{"riskFactor", entry.risk_factor}});
  } else {
    std::cout << entry.risk_factor << '\n';
  }
  return kOk;
}

int archive_scoreboard(const std::string& dir, std::optional<std::string> service, unsigned threads) {
  print_json(archive::to_json(archive::scoreboard_entry(archive::profile(archive::ingest(dir, service, threads), threads))));
  return kOk;
}

}  // namespace tiltkit::cli
