#pragma once

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include <json.hpp>

namespace tvflow::service {

struct Response {
  int status = 200;
  nlohmann::json body;
};

struct Session;

/// In-memory session store behind the `/api/v1/` endpoints. `handle` is the
/// whole protocol; `serve` only binds it to a socket. Requests to one session
/// are serialized, distinct sessions run concurrently.
///
///   POST   /api/v1/sessions                      {"model"} | {"app", "budget"}
///   GET    /api/v1/sessions
///   GET    /api/v1/sessions/{id}
///   DELETE /api/v1/sessions/{id}
///   GET    /api/v1/sessions/{id}/scenarios       PUT with a scenario document
///   GET    /api/v1/sessions/{id}/context         PUT with a name, CSV texts or object
///   GET    /api/v1/sessions/{id}/thresholds      PUT with a name or object
///   POST   /api/v1/sessions/{id}/verify
///   GET    /api/v1/sessions/{id}/runs            GET .../runs/{n}
///   POST   /api/v1/sessions/{id}/edits           one edit; 409 when rejected
///   GET    /api/v1/sessions/{id}/versions
///   GET    /api/v1/sessions/{id}/model           ?version=n
///   GET    /api/v1/sessions/{id}/diff            ?from=a&to=b (run ids)
///   POST   /api/v1/snapshot                      needs a snapshot path
class Service {
 public:
  explicit Service(std::optional<std::string> snapshot_path = std::nullopt);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// `target` is the request path, optionally followed by a query string.
  Response handle(std::string_view method, std::string_view target, std::string_view body);

  nlohmann::json snapshot() const;
  /// Replaces all sessions with the ones in `doc`; throws ParseError.
  void restore(const nlohmann::json& doc);

  const std::optional<std::string>& snapshot_path() const { return snapshot_path_; }

 private:
  std::shared_ptr<Session> find(const std::string& id) const;

  std::optional<std::string> snapshot_path_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::size_t next_session_ = 1;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::string> static_dir;  // served at "/" when set
};

/// cpp-httplib front end for a Service.
class HttpServer {
 public:
  HttpServer(Service& service, ServeOptions options);
  ~HttpServer();

  /// Binds the socket; port 0 picks a free one. Returns the port or -1.
  int bind();
  /// Serves until stop(); call after bind().
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// bind() + listen(). Returns false when binding fails.
bool serve(Service& service, const ServeOptions& options);

}  // namespace tvflow::service
