#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "commands.hpp"

namespace cli = tiltkit::cli;

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* value = std::getenv(name);
  return value && *value ? std::string(value) : std::move(fallback);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tiltkit: transparency documents, privacy scoring, DSAR automation and archive analysis"};
  app.name("tiltkit");
  app.require_subcommand(1);

  cli::Output out;
  std::function<int()> action;
  auto json_flag = [&](CLI::App* cmd) { cmd->add_flag("--json", out.json, "Machine-readable output"); };

  // tilt
  auto* tilt = app.add_subcommand("tilt", "Validate, check and compare transparency documents");
  tilt->require_subcommand(1);
  std::string file;
  std::string other_file;
  {
    auto* cmd = tilt->add_subcommand("validate", "Parse and validate a document");
    cmd->add_option("file", file, "Document file")->required();
    json_flag(cmd);
    cmd->callback([&] { action = [&] { return cli::tilt_validate(file, out); }; });
  }
  {
    auto* cmd = tilt->add_subcommand("completeness", "Run the disclosure checklist (exit 1 when items are missing)");
    cmd->add_option("file", file, "Document file")->required();
    json_flag(cmd);
    cmd->callback([&] { action = [&] { return cli::tilt_completeness(file, out); }; });
  }
  {
    auto* cmd = tilt->add_subcommand("diff", "Structural diff between two documents");
    cmd->add_option("old", file, "Old document")->required();
    cmd->add_option("new", other_file, "New document")->required();
    json_flag(cmd);
    cmd->callback([&] { action = [&] { return cli::tilt_diff(file, other_file, out); }; });
  }
  {
    auto* cmd = tilt->add_subcommand("hash", "Print the content hash");
    cmd->add_option("file", file, "Document file")->required();
    json_flag(cmd);
    cmd->callback([&] { action = [&] { return cli::tilt_hash(file, out); }; });
  }
  {
    auto* cmd = tilt->add_subcommand("canonicalize", "Print the canonical form");
    cmd->add_option("file", file, "Document file")->required();
    cmd->callback([&] { action = [&] { return cli::tilt_canonicalize(file); }; });
  }

  // hub
  auto* hub = app.add_subcommand("hub", "Document store and REST service");
  hub->require_subcommand(1);
  std::string data_dir;
  auto data_dir_option = [&](CLI::App* cmd) {
    cmd->add_option("--data-dir", data_dir, "Data directory (env TILT_HUB_DATA_DIR)");
  };
  auto resolved_data_dir = [&] { return data_dir.empty() ? env_or("TILT_HUB_DATA_DIR", "tilt-hub-data") : data_dir; };
  cli::ServeOptions serve;
  std::optional<int> port;
  std::optional<long long> version;
  std::string id;
  std::string filter;
  std::string intent;
  std::optional<std::string> category;
  {
    auto* cmd = hub->add_subcommand("serve", "Run the REST service");
    cmd->add_option("--port", port, "Port, 0 for any free port (env TILT_HUB_PORT, default 8080)");
    data_dir_option(cmd);
    cmd->add_option("--host", serve.host, "Bind address")->default_val("127.0.0.1");
    cmd->add_option("--signals", serve.signals, "Signals file for the score endpoint");
    cmd->add_option("--ui-dir", serve.ui_dir, "Static annotation UI served under /ui/");
    cmd->callback([&] {
      action = [&] {
        serve.data_dir = resolved_data_dir();
        if (port) {
          serve.port = *port;
        } else {
          const auto text = env_or("TILT_HUB_PORT", "8080");
          try {
            serve.port = std::stoi(text);
          } catch (const std::exception&) {
            std::cerr << "TILT_HUB_PORT is not a port number: " << text << '\n';
            return cli::kUsage;
          }
        }
        return cli::hub_serve(serve);
      };
    });
  }
  {
    auto* cmd = hub->add_subcommand("put", "Store a document version");
    cmd->add_option("file", file, "Document file")->required();
    data_dir_option(cmd);
    json_flag(cmd);
    cmd->callback([&] { action = [&] { return cli::hub_put(resolved_data_dir(), file, out); }; });
  }
  {
    auto* cmd = hub->add_subcommand("get", "Print a stored document (always JSON)");
    cmd->add_option("id", id, "Document id")->required();
    cmd->add_option("--version", version, "Version (default latest)");
    data_dir_option(cmd);
    json_flag(cmd);
    cmd->callback([&] { action = [&] { return cli::hub_get(resolved_data_dir(), id, version); }; });
  }
  {
    auto* cmd = hub->add_subcommand("query", "Filter the latest versions, e.g. 'automatedDecisionMaking/inUse eq true'");
    cmd->add_option("filter", filter, "Filter expression (empty matches everything)");
    data_dir_option(cmd);
    json_flag(cmd);
    cmd->callback([&] { action = [&] { return cli::hub_query(resolved_data_dir(), filter, out); }; });
  }
  {
    auto* cmd = hub->add_subcommand("ask", "Answer a question about a stored document");
    cmd->add_option("id", id, "Document id")->required();
    cmd->add_option("intent", intent, "CONTROLLER_IDENTITY, THIRD_COUNTRY_TRANSFERS, PURPOSES_FOR_CATEGORY, "
                                      "RETENTION_FOR_CATEGORY, ADM_IN_USE or RIGHTS_SUMMARY")
        ->required();
    cmd->add_option("--category", category, "Data category for the *_FOR_CATEGORY intents");
    data_dir_option(cmd);
    json_flag(cmd);
    cmd->callback([&] { action = [&] { return cli::hub_ask(resolved_data_dir(), id, intent, category, out); }; });
  }

  // score
  std::optional<std::string> signals;
  std::optional<std::string> domain;
  {
    auto* cmd = app.add_subcommand("score", "Privacy score and summary card for a document");
    cmd->add_option("file", file, "Document file")->required();
    cmd->add_option("--signals", signals, "Signals file (JSON keyed by domain)");
    cmd->add_option("--domain", domain, "Domain to look up (default: host of the first source)");
    json_flag(cmd);
    cmd->callback([&] { action = [&] { return cli::score(file, signals, domain, out); }; });
  }

  // dsar
  auto* dsar = app.add_subcommand("dsar", "Data subject access request descriptors");
  dsar->require_subcommand(1);
  cli::DsarRunOptions run;
  std::string registry;
  {
    auto* cmd = dsar->add_subcommand("validate", "Validate a descriptor");
    cmd->add_option("file", file, "Descriptor file (.dara.json)")->required();
    json_flag(cmd);
    cmd->callback([&] { action = [&] { return cli::dsar_validate(file, out); }; });
  }
  {
    auto* cmd = dsar->add_subcommand("run", "Execute a descriptor (exit 3 when the session fails)");
    cmd->add_option("file", run.descriptor, "Descriptor file")->required();
    cmd->add_option("--driver", run.driver, "Site driver, mock:<fixture.json>")->required();
    cmd->add_option("--identity", run.identity, "Identity file with EMAIL and FULL_NAME")->required();
    cmd->add_option("--out", run.out_dir, "Output directory for artifacts and session state")->required();
    cmd->add_option("--resume", run.resume, "Session file to resume");
    cmd->add_flag("--detach", run.detach, "Stop with status waiting instead of sleeping between polls");
    json_flag(cmd);
    cmd->callback([&] { action = [&] { return cli::dsar_run(run, out); }; });
  }
  {
    auto* cmd = dsar->add_subcommand("lookup", "Find the registry entry for a domain (exit 1 when absent)");
    cmd->add_option("domain", domain, "Domain")->required();
    cmd->add_option("--registry", registry, "Registry file")->required();
    json_flag(cmd);
    cmd->callback([&] { action = [&] { return cli::dsar_lookup(*domain, registry, out); }; });
  }

  // archive
  auto* archive = app.add_subcommand("archive", "Analyze an unpacked data export");
  archive->require_subcommand(1);
  std::optional<std::string> service;
  unsigned threads = 1;
  auto archive_options = [&](CLI::App* cmd) {
    cmd->add_option("dir", file, "Export directory")->required();
    cmd->add_option("--service", service, "Service name (default: directory name)");
    cmd->add_option("--threads", threads, "Files read in parallel")->default_val(1)->check(CLI::Range(1u, 256u));
  };
  {
    auto* cmd = archive->add_subcommand("analyze", "Print manifest and profile");
    archive_options(cmd);
    json_flag(cmd);
    cmd->callback([&] { action = [&] { return cli::archive_analyze(file, service, threads, out); }; });
  }
  {
    auto* cmd = archive->add_subcommand("risk", "Print the risk factor");
    archive_options(cmd);
    json_flag(cmd);
    cmd->callback([&] { action = [&] { return cli::archive_risk(file, service, threads, out); }; });
  }
  {
    auto* cmd = archive->add_subcommand("scoreboard", "Print the anonymized scoreboard entry (JSON)");
    archive_options(cmd);
    json_flag(cmd);
    cmd->callback([&] { action = [&] { return cli::archive_scoreboard(file, service, threads); }; });
  }

  if (argc > 1 && argv[1][0] != '-') {
    const std::string command = argv[1];
    const auto known = app.get_subcommands([&](CLI::App* sub) { return sub->get_name() == command; });
    if (known.empty()) {
      std::cerr << "unknown command '" << command << "'\n\n" << app.help();
      return cli::kUsage;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return cli::kUsage;
  }
  if (!action) {
    std::cerr << app.help();
    return cli::kUsage;
  }
  return cli::guarded(action);
}
