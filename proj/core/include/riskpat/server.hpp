#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "riskpat/api.hpp"

namespace riskpat {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  bool cors = true;
  // County geometry served at /geo/counties.geojson; read once at startup.
  std::optional<std::filesystem::path> geojson_path;
};

std::string gzip_compress(std::string_view data);

// Read-only HTTP front end over an api::Context.
class Server {
 public:
  // Throws Error if the geometry file cannot be read.
  Server(std::shared_ptr<const api::Context> ctx, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds the listening socket and returns the bound port. Throws Error
  // when the address is unavailable.
  int bind();
  // Serves until stop(); call bind() first.
  void run();
  // Safe from any thread; in-flight responses complete first.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace riskpat
