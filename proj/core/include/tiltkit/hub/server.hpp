#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace tiltkit::hub {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path data_dir = "tilt-hub-data";
  std::optional<std::filesystem::path> signals_file;
  // Static files of the annotation UI, served under /ui/.
  std::optional<std::filesystem::path> ui_dir;
};

// REST front end over DocumentStore and AnnotationStore.
class HubServer {
 public:
  // Opens the stores; throws IoError or SignalsError.
  explicit HubServer(ServerOptions options);
  ~HubServer();

  HubServer(const HubServer&) = delete;
  HubServer& operator=(const HubServer&) = delete;

  // Binds the listening socket and returns the port. Throws IoError.
  int bind();
  // Serves until stop(); bind() must have succeeded.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tiltkit::hub
