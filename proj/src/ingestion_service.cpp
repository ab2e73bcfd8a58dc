#include "collector/ingestion_service.hpp"

#include <spdlog/spdlog.h>

#include <charconv>
#include <limits>
#include <mutex>

#include "collector/auth.hpp"
#include "httplib.h"

namespace collector {
namespace {

constexpr std::int64_t kMinTime = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t kMaxTime = std::numeric_limits<std::int64_t>::max();

std::int64_t parse_time_param(const httplib::Request& req, const char* name, std::int64_t fallback) {
  if (!req.has_param(name)) return fallback;
  const auto text = req.get_param_value(name);
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kSchemaViolation, name, "expected integer milliseconds");
  }
  return value;
}

std::string session_cookie(const httplib::Request& req) {
  // Several Cookie headers may be present.
  const auto count = req.get_header_value_count("Cookie");
  for (std::size_t i = 0; i < count; ++i) {
    if (auto value = cookie_value(req.get_header_value("Cookie", i), kSessionCookie)) return *value;
  }
  return {};
}

void reply_error(httplib::Response& res, const Error& error) {
  res.status = http_status(error.code());
  res.set_content(error.wire_text(), "text/plain");
}

void reply_ok(httplib::Response& res) {
  res.status = 200;
  res.set_content("ok", "text/plain");
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadCredentials:
    case ErrorCode::kNotAuthenticated: return 401;
    case ErrorCode::kForbidden: return 403;
    case ErrorCode::kUnknownUser: return 404;
    case ErrorCode::kStorageFailure: return 500;
    default: return 400;
  }
}

void set_log_level(std::string_view level) {
  spdlog::set_level(spdlog::level::from_str(std::string(level)));
}

std::optional<std::string> raw_query_param(std::string_view target, std::string_view name) {
  const auto question = target.find('?');
  if (question == std::string_view::npos) return std::nullopt;
  auto query = target.substr(question + 1);
  if (const auto hash = query.find('#'); hash != std::string_view::npos) query = query.substr(0, hash);
  while (!query.empty()) {
    const auto amp = query.find('&');
    const auto pair = query.substr(0, amp);
    const auto eq = pair.find('=');
    const auto key = pair.substr(0, eq);
    if (key == name) {
      return std::string(eq == std::string_view::npos ? std::string_view{} : pair.substr(eq + 1));
    }
    if (amp == std::string_view::npos) break;
    query = query.substr(amp + 1);
  }
  return std::nullopt;
}

std::optional<std::string> cookie_value(std::string_view header, std::string_view name) {
  while (!header.empty()) {
    const auto semi = header.find(';');
    auto item = header.substr(0, semi);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    const auto eq = item.find('=');
    if (eq != std::string_view::npos && item.substr(0, eq) == name) {
      auto value = item.substr(eq + 1);
      while (!value.empty() && value.back() == ' ') value.remove_suffix(1);
      return std::string(value);
    }
    if (semi == std::string_view::npos) break;
    header.remove_prefix(semi + 1);
  }
  return std::nullopt;
}

IngestionService::IngestionService(EventStore& store, ServiceConfig config)
    : store_(store), config_(std::move(config)) {
  if (config_.admin_user.empty()) return;
  if (!auth::is_valid_username(config_.admin_user)) throw Error(ErrorCode::kInvalidUsername, "admin-user");
  if (config_.admin_pass.size() < auth::kMinPasswordLength) throw Error(ErrorCode::kWeakPassword, "admin-pass");
  if (const auto existing = store_.find_user(config_.admin_user)) {
    if (!auth::verify_password(existing->password_digest, config_.admin_pass)) {
      throw Error(ErrorCode::kBadCredentials, "admin-pass", "stored admin account has a different password");
    }
    return;
  }
  store_.add_user(UserAccount{config_.admin_user, auth::hash_password(config_.admin_pass), now_ms()});
}

void IngestionService::register_user(std::string_view username, std::string_view password) {
  if (!auth::is_valid_username(username)) throw Error(ErrorCode::kInvalidUsername);
  if (password.size() < auth::kMinPasswordLength) throw Error(ErrorCode::kWeakPassword);
  if (store_.find_user(username)) throw Error(ErrorCode::kDuplicateUser);
  store_.add_user(UserAccount{std::string(username), auth::hash_password(password), now_ms()});
}

SessionToken IngestionService::login(std::string_view username, std::string_view password) {
  const auto account = auth::is_valid_username(username) ? store_.find_user(username) : std::nullopt;
  if (!account) {
    auth::simulate_password_check(password);
    throw Error(ErrorCode::kBadCredentials);
  }
  if (!auth::verify_password(account->password_digest, password)) throw Error(ErrorCode::kBadCredentials);

  SessionToken session{auth::new_session_token(), account->username, now_ms()};
  std::unique_lock lock(sessions_mutex_);
  sessions_.emplace(session.token, session);
  return session;
}

void IngestionService::logout(std::string_view token) {
  std::unique_lock lock(sessions_mutex_);
  sessions_.erase(std::string(token));
}

std::optional<std::string> IngestionService::session_user(std::string_view token) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(std::string(token));
  if (it == sessions_.end()) return std::nullopt;
  return it->second.username;
}

std::size_t IngestionService::active_sessions() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

std::string IngestionService::authenticate(std::string_view token) const {
  if (token.empty()) throw Error(ErrorCode::kNotAuthenticated);
  auto user = session_user(token);
  if (!user) throw Error(ErrorCode::kNotAuthenticated);
  return *user;
}

std::uint64_t IngestionService::ingest(std::string_view token, std::string_view kind, std::string_view wire) {
  const auto user = authenticate(token);
  const auto parsed_kind = parse_event_kind(kind);
  if (!parsed_kind) throw Error(ErrorCode::kSchemaViolation, "type", "expected keystroke or mouse");
  if (wire.size() > config_.max_data_bytes) {
    throw Error(ErrorCode::kSchemaViolation, "data",
                "exceeds " + std::to_string(config_.max_data_bytes) + " bytes");
  }
  const auto envelope = decode_envelope(*parsed_kind, wire);
  return store_.append(user, envelope, now_ms());
}

std::string IngestionService::export_events(std::string_view token, std::string_view user, EventKind kind,
                                            std::int64_t from_ms, std::int64_t to_ms, FileFormat format) const {
  const auto requester = authenticate(token);
  const bool is_admin = !config_.admin_user.empty() && requester == config_.admin_user;
  if (requester != user && !is_admin) throw Error(ErrorCode::kForbidden);
  if (from_ms >= to_ms) throw Error(ErrorCode::kBadRange, "from");

  const auto events = store_.scan(user, kind, from_ms, to_ms);
  std::vector<EventEnvelope> records;
  records.reserve(events.size());
  for (const auto& e : events) records.push_back(e.envelope);
  return format_records(kind, records, format);
}

void IngestionService::note_rejection(std::string_view route, const std::exception& error) {
  rejected_.fetch_add(1);
  spdlog::warn("rejected {}: {}", route, error.what());
}

void IngestionService::install_routes(httplib::Server& server) {
  // One small GET per event: avoid Nagle stalls and per-request reconnects.
  server.set_tcp_nodelay(true);
  server.set_keep_alive_max_count(10'000);
  // httplib's default adds SO_REUSEPORT, which lets a second server silently
  // share the port. Keep only SO_REUSEADDR so a busy port fails the bind.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });

  // Wrap a handler so every collector::Error becomes its status and code text.
  auto guarded = [this](std::string_view route, auto handler) {
    return [this, route, handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const Error& e) {
        note_rejection(route, e);
        reply_error(res, e);
      } catch (const std::exception& e) {
        note_rejection(route, e);
        reply_error(res, Error(ErrorCode::kStorageFailure));
      }
    };
  };

  server.Get("/register", guarded("/register", [this](const httplib::Request& req, httplib::Response& res) {
               register_user(req.get_param_value("uname"), req.get_param_value("pwd"));
               spdlog::info("registered user {}", req.get_param_value("uname"));
               reply_ok(res);
             }));

  server.Get("/login", guarded("/login", [this](const httplib::Request& req, httplib::Response& res) {
               const auto session = login(req.get_param_value("uname"), req.get_param_value("pwd"));
               res.set_header("Set-Cookie", std::string(kSessionCookie) + "=" + session.token + "; Path=/; HttpOnly");
               reply_ok(res);
             }));

  server.Get("/logout", guarded("/logout", [this](const httplib::Request& req, httplib::Response& res) {
               logout(session_cookie(req));
               res.set_header("Set-Cookie", std::string(kSessionCookie) + "=; Path=/; Max-Age=0; HttpOnly");
               reply_ok(res);
             }));

  server.Get("/collect", guarded("/collect", [this](const httplib::Request& req, httplib::Response& res) {
               const auto data = raw_query_param(req.target, "data");
               const auto token = session_cookie(req);
               if (token.empty()) throw Error(ErrorCode::kNotAuthenticated);
               if (!data) throw Error(ErrorCode::kSchemaViolation, "data", "missing parameter");
               ingest(token, req.get_param_value("type"), *data);
               reply_ok(res);
             }));

  server.Get("/export", guarded("/export", [this](const httplib::Request& req, httplib::Response& res) {
               const auto kind = parse_event_kind(req.get_param_value("kind"));
               if (!kind) throw Error(ErrorCode::kSchemaViolation, "kind", "expected keystroke or mouse");
               const auto format_text = req.has_param("format") ? req.get_param_value("format") : "jsonl";
               const auto format = parse_file_format(format_text);
               if (!format) throw Error(ErrorCode::kSchemaViolation, "format", "expected jsonl or csv");
               const auto from = parse_time_param(req, "from", kMinTime);
               const auto to = parse_time_param(req, "to", kMaxTime);
               auto body = export_events(session_cookie(req), req.get_param_value("user"), *kind, from, to, *format);
               res.status = 200;
               res.set_content(std::move(body), *format == FileFormat::kCsv ? "text/csv" : "application/x-ndjson");
             }));
}

}  // namespace collector
