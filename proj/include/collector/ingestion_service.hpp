#pragma once

// Registration, cookie sessions, validated ingestion and export over HTTP.
//
// Routes (all GET, plain-text responses except /export):
//   /register?uname=&pwd=
//   /login?uname=&pwd=           sets cookie uname=<opaque token>
//   /logout                      clears the cookie, invalidates the token
//   /collect?type=&data=<wire>   keystroke|mouse
//   /export?user=&kind=&from=&to=&format=jsonl|csv

#include <atomic>
#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "collector/error.hpp"
#include "collector/event_store.hpp"
#include "collector/record_io.hpp"

namespace httplib {
class Server;
}

namespace collector {

struct ServiceConfig {
  std::string admin_user;  // empty disables the admin account
  std::string admin_pass;
  std::size_t max_data_bytes = 4096;
};

struct SessionToken {
  std::string token;
  std::string username;
  std::int64_t issued_ms = 0;
};

inline constexpr std::string_view kSessionCookie = "uname";

class IngestionService {
 public:
  /// Creates the admin account in `store` on first start. Throws if the
  /// configured admin credentials are invalid or disagree with the stored account.
  IngestionService(EventStore& store, ServiceConfig config);

  void register_user(std::string_view username, std::string_view password);

  /// Throws kBadCredentials for an unknown user and a wrong password alike.
  SessionToken login(std::string_view username, std::string_view password);

  /// Idempotent; unknown tokens are ignored.
  void logout(std::string_view token);

  /// Decodes `wire` and appends it to the session user's stream. Returns the seq.
  std::uint64_t ingest(std::string_view token, std::string_view kind, std::string_view wire);

  /// Records of `kind` for `user` with client timestamp in [from_ms, to_ms), in
  /// append order. Only the user themself or the admin may export.
  std::string export_events(std::string_view token, std::string_view user, EventKind kind, std::int64_t from_ms,
                            std::int64_t to_ms, FileFormat format) const;

  std::optional<std::string> session_user(std::string_view token) const;
  std::size_t active_sessions() const;
  std::size_t rejected_count() const noexcept { return rejected_.load(); }

  void install_routes(httplib::Server& server);

 private:
  std::string authenticate(std::string_view token) const;
  void note_rejection(std::string_view route, const std::exception& error);

  EventStore& store_;
  ServiceConfig config_;
  mutable std::shared_mutex sessions_mutex_;
  std::unordered_map<std::string, SessionToken> sessions_;
  std::atomic<std::size_t> rejected_{0};
};

/// Extracts the raw (still percent-encoded) value of `name` from a request
/// target such as "/collect?type=mouse&data=%7B...". Nullopt if absent.
std::optional<std::string> raw_query_param(std::string_view target, std::string_view name);

/// Value of cookie `name` from a Cookie header, if present.
std::optional<std::string> cookie_value(std::string_view header, std::string_view name);

/// HTTP status used for each error code.
int http_status(ErrorCode code);

/// Sets the process-wide log level ("trace" .. "off").
void set_log_level(std::string_view level);

}  // namespace collector
