#include "tvflow/service.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include <httplib.h>

#include "tvflow/crawler.hpp"
#include "tvflow/effort.hpp"
#include "tvflow/error.hpp"
#include "tvflow/interaction_model.hpp"
#include "tvflow/json_io.hpp"
#include "tvflow/scenario.hpp"
#include "tvflow/simulator.hpp"
#include "tvflow/verifier.hpp"

namespace tvflow::service {

using nlohmann::json;

struct ModelVersion {
  std::size_t id = 0;
  std::shared_ptr<const InteractionModel> model;
  std::optional<std::size_t> parent;
  json edit;  // null for the first version
};

struct Run {
  std::size_t id = 0;
  std::size_t model_version = 0;
  json context;
  json thresholds;
  json result;  // to_json(SuiteResult)
};

struct Session {
  std::mutex mutex;
  std::string id;
  std::vector<ModelVersion> versions;  // versions[i].id == i + 1; the last is current
  std::vector<Scenario> scenarios;
  Context context = builtin_context("adjusted");
  Thresholds thresholds = builtin_thresholds("adjusted");
  std::vector<Run> runs;  // append-only

  std::size_t current_version() const { return versions.back().id; }
  const InteractionModel& model() const { return *versions.back().model; }
};

namespace {

struct HttpError : Error {
  HttpError(int status, std::string msg) : Error(std::move(msg)), status(status) {}
  int status;
};

Response error_response(int status, const std::string& message,
                        const std::vector<std::string>& problems = {}) {
  json body = {{"error", message}};
  if (!problems.empty()) body["problems"] = problems;
  return {status, std::move(body)};
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    std::size_t j = i;
    while (j < path.size() && path[j] != '/') ++j;
    if (j > i) out.emplace_back(path.substr(i, j - i));
    i = j;
  }
  return out;
}

std::map<std::string, std::string> parse_query(std::string_view q) {
  std::map<std::string, std::string> out;
  std::size_t i = 0;
  while (i <= q.size()) {
    std::size_t amp = q.find('&', i);
    if (amp == std::string_view::npos) amp = q.size();
    const std::string_view part = q.substr(i, amp - i);
    if (!part.empty()) {
      const std::size_t eq = part.find('=');
      if (eq == std::string_view::npos) {
        out.emplace(std::string(part), "");
      } else {
        out.emplace(std::string(part.substr(0, eq)), std::string(part.substr(eq + 1)));
      }
    }
    i = amp + 1;
  }
  return out;
}

std::size_t parse_id(const std::string& s, const char* what) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw HttpError(400, std::string(what) + " must be a positive integer");
  }
  return v;
}

json parse_body(std::string_view body) {
  if (body.empty()) return json::object();
  std::istringstream in{std::string(body)};
  return json_io::parse_text(in, "request body");
}

json session_summary(const Session& s) {
  return {{"session", s.id},
          {"model_version", s.current_version()},
          {"nodes", s.model().node_count()},
          {"edges", s.model().edge_count()},
          {"scenarios", s.scenarios.size()},
          {"context", s.context.name},
          {"thresholds", s.thresholds.name},
          {"runs", s.runs.size()}};
}

json run_json(const Run& r) {
  json out = r.result;
  out["run"] = r.id;
  out["model_version"] = r.model_version;
  out["context"] = r.context;
  out["thresholds"] = r.thresholds;
  return out;
}

// Per-scenario deltas between two stored runs.
json diff_runs(const Run& a, const Run& b) {
  auto index = [](const Run& r) {
    std::map<std::string, const json*> out;
    for (const auto& rep : r.result.at("reports")) out[rep.at("scenario").get<std::string>()] = &rep;
    return out;
  };
  auto effort = [](const json* rep) -> json {
    if (!rep || rep->at("path").is_null()) return nullptr;
    return rep->at("path").at("effort_ms");
  };
  auto length = [](const json* rep) -> json {
    if (!rep || rep->at("path").is_null()) return nullptr;
    return rep->at("path").at("length");
  };
  auto rules = [](const json* rep) {
    std::set<std::string> out;
    if (rep) {
      for (const auto& f : rep->at("findings")) out.insert(f.at("rule").get<std::string>());
    }
    return out;
  };
  auto delta = [](const json& x, const json& y) -> json {
    if (!x.is_number() || !y.is_number()) return nullptr;
    return y.get<double>() - x.get<double>();
  };

  const auto ia = index(a), ib = index(b);
  std::vector<std::string> ids;
  for (const auto& rep : a.result.at("reports")) ids.push_back(rep.at("scenario"));
  for (const auto& rep : b.result.at("reports")) {
    if (!ia.count(rep.at("scenario"))) ids.push_back(rep.at("scenario"));
  }

  json rows = json::array();
  for (const auto& id : ids) {
    const json* ra = ia.count(id) ? ia.at(id) : nullptr;
    const json* rb = ib.count(id) ? ib.at(id) : nullptr;
    const auto fa = rules(ra), fb = rules(rb);
    json added = json::array(), removed = json::array();
    for (const auto& r : fb) {
      if (!fa.count(r)) added.push_back(r);
    }
    for (const auto& r : fa) {
      if (!fb.count(r)) removed.push_back(r);
    }
    rows.push_back({{"scenario", id},
                    {"effort_from", effort(ra)},
                    {"effort_to", effort(rb)},
                    {"effort_delta", delta(effort(ra), effort(rb))},
                    {"length_from", length(ra)},
                    {"length_to", length(rb)},
                    {"length_delta", delta(length(ra), length(rb))},
                    {"findings_added", std::move(added)},
                    {"findings_removed", std::move(removed)}});
  }
  return {{"from", a.id},
          {"to", b.id},
          {"model_version_from", a.model_version},
          {"model_version_to", b.model_version},
          {"scenarios", std::move(rows)}};
}

Response handle_session(Session& s, std::string_view method, const std::vector<std::string>& seg,
                        const std::map<std::string, std::string>& query, std::string_view body) {
  // seg[0] = "sessions", seg[1] = id, seg[2...] = resource
  const std::string resource = seg.size() > 2 ? seg[2] : "";
  auto with_version = [&](json j, int status = 200) {
    j["model_version"] = s.current_version();
    return Response{status, std::move(j)};
  };

  if (resource.empty()) {
    if (method == "GET") return {200, session_summary(s)};
  } else if (resource == "scenarios" && seg.size() == 3) {
    if (method == "PUT") s.scenarios = json_io::scenarios_from_json(parse_body(body));
    if (method == "GET" || method == "PUT") return with_version(json_io::to_json(s.scenarios));
  } else if (resource == "context" && seg.size() == 3) {
    if (method == "PUT") s.context = json_io::context_from_json(parse_body(body));
    if (method == "GET" || method == "PUT") return with_version({{"context", json_io::to_json(s.context)}});
  } else if (resource == "thresholds" && seg.size() == 3) {
    if (method == "PUT") s.thresholds = thresholds_from_json(parse_body(body));
    if (method == "GET" || method == "PUT") return with_version({{"thresholds", to_json(s.thresholds)}});
  } else if (resource == "verify" && seg.size() == 3 && method == "POST") {
    const SuiteResult suite = verify_suite(s.model(), s.scenarios, s.context, s.thresholds);
    Run run{s.runs.size() + 1, s.current_version(), json_io::to_json(s.context),
            to_json(s.thresholds), to_json(suite)};
    s.runs.push_back(std::move(run));
    return {200, run_json(s.runs.back())};
  } else if (resource == "runs" && method == "GET") {
    if (seg.size() == 3) {
      json list = json::array();
      for (const auto& r : s.runs) {
        list.push_back({{"run", r.id},
                        {"model_version", r.model_version},
                        {"context", r.context.at("name")},
                        {"thresholds", r.thresholds.at("name")},
                        {"summary", r.result.at("summary")}});
      }
      return with_version({{"runs", std::move(list)}});
    }
    if (seg.size() == 4) {
      const std::size_t n = parse_id(seg[3], "run id");
      if (n == 0 || n > s.runs.size()) throw HttpError(404, "no run " + seg[3]);
      return {200, run_json(s.runs[n - 1])};
    }
  } else if (resource == "edits" && seg.size() == 3 && method == "POST") {
    const json doc = parse_body(body);
    const ModelEdit e = edit_from_json(doc);
    try {
      auto next = std::make_shared<const InteractionModel>(apply_edit(s.model(), e));
      s.versions.push_back({s.versions.size() + 1, std::move(next), s.current_version(), to_json(e)});
    } catch (const ValidationError& err) {
      Response r = error_response(409, err.what(), err.problems());
      r.body["model_version"] = s.current_version();
      return r;
    } catch (const UnknownIdError& err) {
      Response r = error_response(404, err.what());
      r.body["model_version"] = s.current_version();
      return r;
    }
    return with_version({{"edit", to_json(e)}, {"parent_version", *s.versions.back().parent}}, 201);
  } else if (resource == "versions" && seg.size() == 3 && method == "GET") {
    json list = json::array();
    for (const auto& v : s.versions) {
      list.push_back({{"version", v.id},
                      {"parent", v.parent ? json(*v.parent) : json(nullptr)},
                      {"edit", v.edit}});
    }
    return with_version({{"versions", std::move(list)}});
  } else if (resource == "model" && seg.size() == 3 && method == "GET") {
    std::size_t v = s.current_version();
    if (auto it = query.find("version"); it != query.end()) v = parse_id(it->second, "version");
    if (v == 0 || v > s.versions.size()) throw HttpError(404, "no model version " + std::to_string(v));
    return {200, {{"model_version", v}, {"model", json_io::to_json(*s.versions[v - 1].model)}}};
  } else if (resource == "diff" && seg.size() == 3 && method == "GET") {
    if (s.runs.size() < 2 && !(query.count("from") && query.count("to"))) {
      throw HttpError(409, "diff needs two runs");
    }
    std::size_t from = s.runs.size() - 1, to = s.runs.size();
    if (auto it = query.find("from"); it != query.end()) from = parse_id(it->second, "from");
    if (auto it = query.find("to"); it != query.end()) to = parse_id(it->second, "to");
    for (std::size_t id : {from, to}) {
      if (id == 0 || id > s.runs.size()) throw HttpError(404, "no run " + std::to_string(id));
    }
    return with_version(diff_runs(s.runs[from - 1], s.runs[to - 1]));
  }
  throw HttpError(404, "no route " + std::string(method) + " " + resource);
}

std::shared_ptr<Session> create_session(const json& doc, std::string id, json& extra) {
  if (!doc.is_object()) throw ParseError("/", "expected an object");
  auto s = std::make_shared<Session>();
  s->id = std::move(id);
  InteractionModel model = [&] {
    if (doc.contains("model")) {
      return InteractionModel::from_document(json_io::model_document_from_json(doc.at("model")));
    }
    if (doc.contains("app")) {
      CrawlConfig config;
      if (doc.contains("budget")) {
        const double b = json_io::require_number(doc, "budget", "");
        if (b < 1 || b != static_cast<double>(static_cast<std::size_t>(b))) {
          throw ValidationError({"node budget must be >= 1"});
        }
        config.node_budget = static_cast<std::size_t>(b);
      }
      CrawlResult run = crawl(sim::app_from_json(doc.at("app")), config);
      extra["crawl"] = to_json(run.stats);
      return std::move(run.model);
    }
    throw ParseError("/", "expected 'model' or 'app'");
  }();
  s->versions.push_back({1, std::make_shared<const InteractionModel>(std::move(model)), {}, nullptr});
  if (doc.contains("scenarios")) s->scenarios = json_io::scenarios_from_json(doc.at("scenarios"));
  if (doc.contains("context")) s->context = json_io::context_from_json(doc.at("context"));
  if (doc.contains("thresholds")) s->thresholds = thresholds_from_json(doc.at("thresholds"));
  return s;
}

}  // namespace

Service::Service(std::optional<std::string> snapshot_path)
    : snapshot_path_(std::move(snapshot_path)) {
  if (snapshot_path_) {
    std::ifstream in(*snapshot_path_);
    if (in) restore(json_io::parse_text(in, "snapshot"));
  }
}

Service::~Service() = default;

std::shared_ptr<Session> Service::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw HttpError(404, "no session '" + id + "'");
  return it->second;
}

Response Service::handle(std::string_view method, std::string_view target, std::string_view body) {
  std::string_view path = target, query_text;
  if (auto q = target.find('?'); q != std::string_view::npos) {
    path = target.substr(0, q);
    query_text = target.substr(q + 1);
  }
  const auto all = split_path(path);
  if (all.size() < 2 || all[0] != "api" || all[1] != "v1") return error_response(404, "not found");
  const std::vector<std::string> seg(all.begin() + 2, all.end());
  const auto query = parse_query(query_text);

  try {
    if (seg.size() == 1 && seg[0] == "sessions") {
      if (method == "GET") {
        std::vector<std::shared_ptr<Session>> list;
        {
          std::shared_lock lock(sessions_mutex_);
          for (const auto& [id, s] : sessions_) list.push_back(s);
        }
        json out = json::array();
        for (const auto& s : list) {
          std::lock_guard lock(s->mutex);
          out.push_back(session_summary(*s));
        }
        return {200, {{"sessions", std::move(out)}}};
      }
      if (method == "POST") {
        const json doc = parse_body(body);
        std::string id;
        {
          std::unique_lock lock(sessions_mutex_);
          id = "s" + std::to_string(next_session_++);
        }
        json extra = json::object();
        auto s = create_session(doc, id, extra);
        json out = session_summary(*s);
        out.update(extra);
        std::unique_lock lock(sessions_mutex_);
        sessions_.emplace(id, std::move(s));
        return {201, std::move(out)};
      }
    }
    if (seg.size() >= 2 && seg[0] == "sessions") {
      if (seg.size() == 2 && method == "DELETE") {
        std::unique_lock lock(sessions_mutex_);
        if (sessions_.erase(seg[1]) == 0) throw HttpError(404, "no session '" + seg[1] + "'");
        return {200, {{"deleted", seg[1]}}};
      }
      auto s = find(seg[1]);
      std::lock_guard lock(s->mutex);
      return handle_session(*s, method, seg, query, body);
    }
    if (seg.size() == 1 && seg[0] == "snapshot" && method == "POST") {
      if (!snapshot_path_) throw HttpError(409, "server started without a snapshot path");
      const json doc = snapshot();
      std::ofstream out(*snapshot_path_);
      if (!out) throw HttpError(500, "cannot write snapshot '" + *snapshot_path_ + "'");
      out << doc.dump(2) << '\n';
      return {200, {{"snapshot", *snapshot_path_}, {"sessions", doc.at("sessions").size()}}};
    }
    return error_response(404, "no route " + std::string(method) + " " + std::string(path));
  } catch (const HttpError& e) {
    return error_response(e.status, e.what());
  } catch (const ValidationError& e) {
    return error_response(400, e.what(), e.problems());
  } catch (const ParseError& e) {
    return error_response(400, e.what());
  } catch (const UnknownIdError& e) {
    return error_response(400, e.what());
  } catch (const Error& e) {
    return error_response(400, e.what());
  } catch (const json::exception& e) {
    return error_response(400, e.what());
  }
}

json Service::snapshot() const {
  std::vector<std::shared_ptr<Session>> list;
  std::size_t next = 0;
  {
    std::shared_lock lock(sessions_mutex_);
    for (const auto& [id, s] : sessions_) list.push_back(s);
    next = next_session_;
  }
  json sessions = json::array();
  for (const auto& s : list) {
    std::lock_guard lock(s->mutex);
    json versions = json::array();
    for (const auto& v : s->versions) {
      versions.push_back({{"version", v.id},
                          {"parent", v.parent ? json(*v.parent) : json(nullptr)},
                          {"edit", v.edit},
                          {"model", json_io::to_json(*v.model)}});
    }
    json runs = json::array();
    for (const auto& r : s->runs) runs.push_back(run_json(r));
    sessions.push_back({{"id", s->id},
                        {"versions", std::move(versions)},
                        {"scenarios", json_io::to_json(s->scenarios)},
                        {"context", json_io::to_json(s->context)},
                        {"thresholds", to_json(s->thresholds)},
                        {"runs", std::move(runs)}});
  }
  return {{"next_session", next}, {"sessions", std::move(sessions)}};
}

void Service::restore(const json& doc) {
  std::map<std::string, std::shared_ptr<Session>> loaded;
  try {
    for (const auto& js : doc.at("sessions")) {
      auto s = std::make_shared<Session>();
      s->id = js.at("id").get<std::string>();
      for (const auto& jv : js.at("versions")) {
        ModelVersion v;
        v.id = jv.at("version").get<std::size_t>();
        if (!jv.at("parent").is_null()) v.parent = jv.at("parent").get<std::size_t>();
        v.edit = jv.at("edit");
        v.model = std::make_shared<const InteractionModel>(
            InteractionModel::from_document(json_io::model_document_from_json(jv.at("model"))));
        if (v.id != s->versions.size() + 1) throw ParseError("/sessions", "version ids out of order");
        s->versions.push_back(std::move(v));
      }
      if (s->versions.empty()) throw ParseError("/sessions", "session without a model version");
      s->scenarios = json_io::scenarios_from_json(js.at("scenarios"));
      s->context = json_io::context_from_json(js.at("context"));
      s->thresholds = thresholds_from_json(js.at("thresholds"));
      for (const auto& jr : js.at("runs")) {
        Run r;
        r.id = jr.at("run").get<std::size_t>();
        r.model_version = jr.at("model_version").get<std::size_t>();
        r.context = jr.at("context");
        r.thresholds = jr.at("thresholds");
        r.result = {{"reports", jr.at("reports")},
                    {"errors", jr.at("errors")},
                    {"summary", jr.at("summary")}};
        if (r.model_version == 0 || r.model_version > s->versions.size()) {
          throw ParseError("/sessions", "run references a missing model version");
        }
        s->runs.push_back(std::move(r));
      }
      loaded.emplace(s->id, std::move(s));
    }
    std::unique_lock lock(sessions_mutex_);
    sessions_ = std::move(loaded);
    next_session_ = doc.at("next_session").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ParseError("snapshot", e.what());
  }
}

struct HttpServer::Impl {
  Impl(Service& s, ServeOptions o) : service(s), options(std::move(o)) {}
  Service& service;
  ServeOptions options;
  httplib::Server server;
};

HttpServer::HttpServer(Service& service, ServeOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  auto bridge = [this](const httplib::Request& req, httplib::Response& res) {
    const Response r = impl_->service.handle(req.method, req.target, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(2), "application/json");
  };
  const std::string pattern = R"(/api/v1/.*)";
  impl_->server.Get(pattern, bridge);
  impl_->server.Post(pattern, bridge);
  impl_->server.Put(pattern, bridge);
  impl_->server.Delete(pattern, bridge);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind() {
  if (impl_->options.static_dir &&
      !impl_->server.set_mount_point("/", *impl_->options.static_dir)) {
    return -1;
  }
  if (impl_->options.port == 0) return impl_->server.bind_to_any_port(impl_->options.host);
  return impl_->server.bind_to_port(impl_->options.host, impl_->options.port)
             ? impl_->options.port
             : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

bool serve(Service& service, const ServeOptions& options) {
  HttpServer server(service, options);
  if (server.bind() < 0) return false;
  return server.listen();
}

}  // namespace tvflow::service
