#pragma once

// HTTP client for the collector routes, holding the session cookie between
// calls the way the extension's background script does.

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "collector/event_model.hpp"
#include "collector/record_io.hpp"

namespace collector {

/// Transport failure (connection refused, timeout); HTTP error statuses are
/// returned as responses instead.
class ClientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HttpReply {
  int status = 0;
  std::string body;

  bool ok() const noexcept { return status == 200; }
};

class CollectorClient {
 public:
  /// `base_url` like "http://127.0.0.1:8080".
  explicit CollectorClient(const std::string& base_url);
  ~CollectorClient();
  CollectorClient(CollectorClient&&) noexcept;
  CollectorClient& operator=(CollectorClient&&) noexcept;

  HttpReply register_user(std::string_view username, std::string_view password);
  /// Keeps the session cookie on success.
  HttpReply login(std::string_view username, std::string_view password);
  /// Drops the session cookie regardless of the reply.
  HttpReply logout();
  HttpReply collect(const EventEnvelope& envelope);
  HttpReply export_events(std::string_view user, EventKind kind, std::int64_t from_ms, std::int64_t to_ms,
                          FileFormat format);

  /// Sends an arbitrary GET target (already encoded) with the session cookie.
  HttpReply get(const std::string& target);

  bool has_session() const noexcept { return !cookie_.empty(); }
  /// Replaces the session cookie; empty clears it.
  void set_session_cookie(std::string token) { cookie_ = std::move(token); }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::string cookie_;
};

}  // namespace collector
