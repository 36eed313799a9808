#pragma once

#include <chrono>
#include <cstddef>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "galex/context.hpp"
#include "galex/error.hpp"
#include "galex/lattice.hpp"
#include "galex/navigation.hpp"
#include "galex/subhierarchy.hpp"
#include "galex/variability.hpp"

namespace galex {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string context_path;
  std::size_t max_concepts = 10'000'000;
  std::string static_dir;
  std::chrono::seconds session_idle{30 * 60};

  void validate() const {
    if (port < 1 || port > 65535) throw Error(ErrorCode::BadRequest, "port must be in [1, 65535]");
    if (max_concepts < 1) throw Error(ErrorCode::BadRequest, "concept ceiling must be >= 1");
  }
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

inline int http_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::UnknownConcept:
    case ErrorCode::UnknownAttribute:
    case ErrorCode::UnknownObject:
    case ErrorCode::UnknownSession: return 404;
    case ErrorCode::NotAdjacent: return 409;
    case ErrorCode::CapacityExceeded: return 500;
    default: return 400;
  }
}

/// In-memory sessions with idle expiry. Each session has its own lock so
/// operations on one session are serialized while others proceed.
class SessionTable {
 public:
  using Clock = std::chrono::steady_clock;

  explicit SessionTable(std::chrono::seconds idle) : idle_(idle), rng_(std::random_device{}()) {}

  std::string create(NavigationSession session) {
    std::unique_lock lock(mu_);
    purge_locked();
    std::string id;
    do {
      id = fresh_id();
    } while (sessions_.count(id));
    sessions_.emplace(id, std::make_shared<Entry>(std::move(session), Clock::now()));
    return id;
  }

  /// Runs `f(session)` under the session's lock.
  template <typename F>
  auto with(const std::string& id, F&& f) {
    std::shared_ptr<Entry> entry;
    {
      std::unique_lock lock(mu_);
      purge_locked();
      auto it = sessions_.find(id);
      if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "session '" + id + "'");
      entry = it->second;
    }
    std::lock_guard session_lock(entry->mu);
    entry->last_used = Clock::now();
    return f(entry->session);
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return sessions_.size();
  }

 private:
  struct Entry {
    Entry(NavigationSession s, Clock::time_point t) : session(std::move(s)), last_used(t) {}
    std::mutex mu;
    NavigationSession session;
    Clock::time_point last_used;
  };

  void purge_locked() {
    const auto now = Clock::now();
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      std::unique_lock entry_lock(it->second->mu, std::try_to_lock);
      if (entry_lock.owns_lock() && now - it->second->last_used > idle_)
        it = sessions_.erase(it);
      else
        ++it;
    }
  }

  std::string fresh_id() {
    static constexpr char kHex[] = "0123456789abcdef";
    std::uniform_int_distribution<int> nib(0, 15);
    std::string id(16, '0');
    for (char& c : id) c = kHex[nib(rng_)];
    return id;
  }

  std::chrono::seconds idle_;
  mutable std::shared_mutex mu_;
  std::mt19937_64 rng_;
  std::unordered_map<std::string, std::shared_ptr<Entry>> sessions_;
};

/// JSON API over one context. `handle` is transport-independent; `listen`
/// binds it to HTTP.
class Service {
 public:
  Service(const FormalContext& ctx, ServiceConfig cfg)
      : cfg_(validated(std::move(cfg))),
        lattice_(std::make_shared<const ConceptLattice>(build_lattice(ctx, {cfg_.max_concepts}))),
        sessions_(cfg_.session_idle) {
    lattice_json_ = nlohmann::ordered_json(lattice_to_json(*lattice_)).dump();
    context_json_ = context_to_json(ctx).dump();
    report_json_ = report_to_json(ctx, build_report(*lattice_)).dump();
  }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Loads the context named by `cfg.context_path`.
  static std::unique_ptr<Service> from_config(ServiceConfig cfg) {
    cfg.validate();
    std::ifstream in(cfg.context_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::BadRequest, "cannot open context file '" + cfg.context_path + "'");
    const auto ctx = parse_context(in, format_for_path(cfg.context_path));
    return std::make_unique<Service>(ctx, std::move(cfg));
  }

  const ConceptLattice& lattice() const noexcept { return *lattice_; }
  const ServiceConfig& config() const noexcept { return cfg_; }
  const SessionTable& sessions() const noexcept { return sessions_; }

  Response handle(std::string_view method, std::string_view target, std::string_view body = {}) {
    try {
      return route(method, target, body);
    } catch (const Error& e) {
      return error_response(http_status(e.code()), std::string(code_name(e.code())), e.detail());
    } catch (const nlohmann::json::exception& e) {
      return error_response(400, "BadRequest", e.what());
    } catch (const std::exception& e) {
      return error_response(500, "Internal", e.what());
    }
  }

  /// Binds and serves until stop(). Returns false if binding failed.
  bool listen() {
    install_routes();
    return server_.listen(cfg_.host, cfg_.port);
  }
  /// Binds to an ephemeral port and returns it; follow with listen_after_bind().
  int bind_any_port() {
    install_routes();
    return server_.bind_to_any_port(cfg_.host);
  }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }

 private:
  static ServiceConfig validated(ServiceConfig cfg) {
    cfg.validate();
    return cfg;
  }

  static Response json_response(int status, const nlohmann::ordered_json& j) { return {status, j.dump()}; }
  static Response error_response(int status, const std::string& code, const std::string& detail) {
    nlohmann::ordered_json j;
    j["error"] = code;
    j["detail"] = detail;
    return json_response(status, j);
  }

  static std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> parts;
    std::size_t i = 0;
    while (i < path.size()) {
      while (i < path.size() && path[i] == '/') ++i;
      std::size_t j = i;
      while (j < path.size() && path[j] != '/') ++j;
      if (j > i) parts.push_back(path.substr(i, j - i));
      i = j;
    }
    return parts;
  }

  static std::map<std::string, std::string> parse_query(std::string_view q) {
    std::map<std::string, std::string> out;
    std::size_t i = 0;
    while (i <= q.size() && !q.empty()) {
      std::size_t amp = q.find('&', i);
      if (amp == std::string_view::npos) amp = q.size();
      std::string_view kv = q.substr(i, amp - i);
      if (!kv.empty()) {
        const auto eq = kv.find('=');
        if (eq == std::string_view::npos)
          out[httplib::detail::decode_url(std::string(kv), true)] = "";
        else
          out[httplib::detail::decode_url(std::string(kv.substr(0, eq)), true)] =
              httplib::detail::decode_url(std::string(kv.substr(eq + 1)), true);
      }
      i = amp + 1;
      if (amp == q.size()) break;
    }
    return out;
  }

  static std::size_t parse_id(std::string_view s, ErrorCode on_error) {
    std::size_t v = 0;
    if (s.empty() || s.size() > 18) throw Error(on_error, "bad id '" + std::string(s) + "'");
    for (char c : s) {
      if (c < '0' || c > '9') throw Error(on_error, "bad id '" + std::string(s) + "'");
      v = v * 10 + static_cast<std::size_t>(c - '0');
    }
    return v;
  }

  static bool truthy(const std::map<std::string, std::string>& q, const std::string& key) {
    auto it = q.find(key);
    return it != q.end() && (it->second.empty() || it->second == "1" || it->second == "true");
  }

  nlohmann::ordered_json session_view(const NavigationSession& s, const std::string& id) const {
    auto j = session_to_json(s, id);
    j["concept"] = concept_view(s.current());
    j["moves"] = moves_to_json(*lattice_, s.available_moves());
    return j;
  }

  nlohmann::ordered_json concept_view(ConceptId id) const {
    auto j = concept_to_json(*lattice_, lattice_->reduced_labels(), id);
    j["upper_covers"] = lattice_->upper_covers(id);
    j["lower_covers"] = lattice_->lower_covers(id);
    return j;
  }

  static ConceptId target_of(std::string_view body) {
    const auto doc = nlohmann::json::parse(body.empty() ? std::string_view("{}") : body);
    if (!doc.contains("target") || !doc["target"].is_number_unsigned())
      throw Error(ErrorCode::BadRequest, "body must be {\"target\": <concept id>}");
    return doc["target"].get<ConceptId>();
  }

  Response route(std::string_view method, std::string_view target, std::string_view body) {
    const auto qpos = target.find('?');
    const auto path = split_path(target.substr(0, qpos));
    const auto query = parse_query(qpos == std::string_view::npos ? std::string_view{} : target.substr(qpos + 1));
    const bool get = method == "GET";
    const bool post = method == "POST";

    if (path.size() < 2 || path[0] != "api") return error_response(404, "NotFound", std::string(target));
    const auto& what = path[1];

    if (what == "context" && path.size() == 2 && get) return {200, context_json_};
    if (what == "lattice" && path.size() == 2 && get) return {200, lattice_json_};
    if (what == "concepts" && path.size() == 3 && get)
      return json_response(200, concept_view(parse_id(path[2], ErrorCode::UnknownConcept)));
    if (what == "report" && path.size() == 2 && get) {
      if (!truthy(query, "exhaustive")) return {200, report_json_};
      return json_response(200, report_to_json(lattice_->context(), build_report(*lattice_, {true})));
    }
    if (what == "subhierarchy" && path.size() == 2 && get) return json_response(200, subhierarchy(query));
    if (what == "classify" && path.size() == 2 && post) {
      const auto doc = nlohmann::json::parse(body.empty() ? std::string_view("{}") : body);
      const auto names = doc.at("attributes").get<std::vector<std::string>>();
      const auto attrs = lattice_->context().attributes_named(names);
      const auto cls = classify_configuration(*lattice_, attrs);
      nlohmann::ordered_json j;
      j["class"] = kind_name(cls.kind);
      j["witness"] = cls.witness ? nlohmann::ordered_json(*cls.witness) : nlohmann::ordered_json(nullptr);
      j["completion"] = cls.completion ? nlohmann::ordered_json(lattice_->context().names_of(*cls.completion))
                                       : nlohmann::ordered_json(nullptr);
      return json_response(200, j);
    }
    if (what == "sessions") return sessions_route(method, path, body);
    if (get || post) return error_response(404, "NotFound", std::string(target));
    return error_response(405, "MethodNotAllowed", std::string(method));
  }

  nlohmann::ordered_json subhierarchy(const std::map<std::string, std::string>& query) const {
    auto kind_it = query.find("kind");
    std::string kind = kind_it == query.end() ? "aoc" : kind_it->second;
    std::transform(kind.begin(), kind.end(), kind.begin(), [](unsigned char c) { return std::tolower(c); });
    if (kind == "aoc") return poset_to_json(*lattice_, aoc_poset(*lattice_));
    if (kind == "ac") return poset_to_json(*lattice_, ac_poset(*lattice_));
    if (kind == "oc") return poset_to_json(*lattice_, oc_poset(*lattice_));
    if (kind == "iceberg") {
      auto n_it = query.find("n");
      if (n_it == query.end()) throw Error(ErrorCode::InvalidThreshold, "iceberg requires n");
      const auto& s = n_it->second;
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || s.size() > 18)
        throw Error(ErrorCode::InvalidThreshold, "n must be a positive integer");
      return poset_to_json(*lattice_, iceberg(*lattice_, std::stoull(s)));
    }
    throw Error(ErrorCode::BadRequest, "unknown kind '" + kind + "'");
  }

  Response sessions_route(std::string_view method, const std::vector<std::string_view>& path, std::string_view body) {
    const bool get = method == "GET";
    const bool post = method == "POST";
    if (path.size() == 2) {
      if (!post) return error_response(405, "MethodNotAllowed", std::string(method));
      std::optional<ConceptId> at;
      if (!body.empty()) {
        const auto doc = nlohmann::json::parse(body);
        if (doc.contains("at") && !doc["at"].is_null()) at = doc["at"].get<ConceptId>();
      }
      NavigationSession s(lattice_, at);
      auto view_source = s;
      const std::string id = sessions_.create(std::move(s));
      return json_response(201, session_view(view_source, id));
    }
    const std::string id(path[2]);
    if (path.size() == 3 && get)
      return sessions_.with(id, [&](NavigationSession& s) { return json_response(200, session_view(s, id)); });
    if (path.size() != 4) return error_response(404, "NotFound", "unknown session route");
    const auto& action = path[3];
    if (action == "moves" && get)
      return sessions_.with(id, [&](NavigationSession& s) {
        return json_response(200, moves_to_json(*lattice_, s.available_moves()));
      });
    if (action == "reachable" && get)
      return sessions_.with(id, [&](NavigationSession& s) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& [o, c] : s.reachable_configurations())
          arr.push_back({{"object", lattice_->context().object_name(o)}, {"concept", c}});
        return json_response(200, arr);
      });
    if ((action == "move" || action == "jump") && post) {
      const ConceptId target = target_of(body);
      return sessions_.with(id, [&](NavigationSession& s) {
        const Move m = action == "move" ? s.apply_move(target) : s.jump(target);
        auto j = session_view(s, id);
        j["delta"] = move_to_json(*lattice_, m);
        return json_response(200, j);
      });
    }
    return error_response(404, "NotFound", "unknown session route");
  }

  void install_routes() {
    if (routes_installed_) return;
    routes_installed_ = true;
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
      std::string target = req.path;
      if (!req.params.empty()) {
        target += '?';
        bool first = true;
        for (const auto& [k, v] : req.params) {
          if (!first) target += '&';
          first = false;
          target += httplib::detail::encode_query_param(k) + "=" + httplib::detail::encode_query_param(v);
        }
      }
      const Response r = handle(req.method, target, req.body);
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    };
    server_.Get(R"(/api/.*)", forward);
    server_.Post(R"(/api/.*)", forward);
    server_.Put(R"(/api/.*)", forward);
    server_.Delete(R"(/api/.*)", forward);
    if (!cfg_.static_dir.empty()) server_.set_mount_point("/", cfg_.static_dir);
  }

  ServiceConfig cfg_;
  std::shared_ptr<const ConceptLattice> lattice_;
  SessionTable sessions_;
  std::string lattice_json_;
  std::string context_json_;
  std::string report_json_;
  httplib::Server server_;
  bool routes_installed_ = false;
};

}  // namespace galex
