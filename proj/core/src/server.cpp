#include "riskpat/server.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <zlib.h>

#include "riskpat/error.hpp"

namespace riskpat {

std::string gzip_compress(std::string_view data) {
  z_stream zs{};
  // windowBits 15 + 16 selects the gzip wrapper.
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) !=
      Z_OK) {
    throw Error("gzip: deflateInit2 failed");
  }
  std::string out;
  out.resize(deflateBound(&zs, static_cast<uLong>(data.size())));
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const auto written = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error("gzip: deflate failed");
  out.resize(written);
  return out;
}

struct Server::Impl {
  std::shared_ptr<const api::Context> ctx;
  ServerOptions options;
  std::optional<std::string> geojson;
  httplib::Server http;
  int port = -1;
  std::atomic<bool> running{false};
  std::atomic<bool> stopping{false};
};

namespace {

bool accepts_gzip(const httplib::Request& req) {
  const auto enc = req.get_header_value("Accept-Encoding");
  return enc.find("gzip") != std::string::npos;
}

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

}  // namespace

Server::Server(std::shared_ptr<const api::Context> ctx, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->ctx = std::move(ctx);
  impl_->options = std::move(options);
  if (impl_->options.geojson_path) {
    std::ifstream in(*impl_->options.geojson_path, std::ios::binary);
    if (!in) throw Error("cannot read geometry file " + impl_->options.geojson_path->string());
    std::ostringstream buf;
    buf << in.rdbuf();
    impl_->geojson = buf.str();
  }

  auto& http = impl_->http;
  // httplib defaults to SO_REUSEPORT, which lets a second server share a busy port.
  http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  if (impl_->options.cors) {
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
    http.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
    });
  }

  Impl* impl = impl_.get();
  http.Get(R"(/api/.*)", [impl](const httplib::Request& req, httplib::Response& res) {
    const auto r = api::handle(*impl->ctx, req.path);
    send_json(res, r.status, r.body);
  });
  http.Get("/geo/counties.geojson", [impl](const httplib::Request& req, httplib::Response& res) {
    if (!impl->geojson) {
      send_json(res, 404, api::error("not_found", "no geometry configured"));
      return;
    }
    res.set_header("Cache-Control", "public, max-age=86400");
    res.set_header("Vary", "Accept-Encoding");
    if (accepts_gzip(req)) {
      res.set_header("Content-Encoding", "gzip");
      res.set_content(gzip_compress(*impl->geojson), "application/geo+json");
    } else {
      res.set_content(*impl->geojson, "application/geo+json");
    }
  });
  http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 404) {
      send_json(res, 404, api::error("not_found", "no route for " + req.path));
    } else {
      send_json(res, res.status, api::error("http_error", httplib::status_message(res.status)));
    }
  });
  http.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "unknown error";
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          message = e.what();
        } catch (...) {
        }
        send_json(res, 500, api::error("internal", message));
      });
}

Server::~Server() { stop(); }

int Server::bind() {
  auto& o = impl_->options;
  if (o.port == 0) {
    impl_->port = impl_->http.bind_to_any_port(o.host);
  } else if (impl_->http.bind_to_port(o.host, o.port)) {
    impl_->port = o.port;
  }
  if (impl_->port <= 0) {
    throw Error("cannot listen on " + o.host + ":" + std::to_string(o.port));
  }
  return impl_->port;
}

void Server::run() {
  if (impl_->port <= 0) throw Error("server: bind() before run()");
  impl_->running = true;
  if (!impl_->stopping) impl_->http.listen_after_bind();
  impl_->running = false;
}

void Server::stop() {
  if (!impl_) return;
  impl_->stopping = true;
  if (impl_->running) {
    impl_->http.wait_until_ready();
    impl_->http.stop();
  }
}

}  // namespace riskpat
