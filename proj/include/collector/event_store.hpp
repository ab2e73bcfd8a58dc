#pragma once

// Per-user append-only event streams. Each (user, kind) pair is its own
// stream with a dense sequence starting at 1. Scans filter by client
// timestamp (down_ms / t_ms) over a half-open window but always return
// events in sequence order, never reordered by time.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "collector/event_model.hpp"

namespace collector {

struct UserAccount {
  std::string username;
  std::string password_digest;
  std::int64_t created_ms = 0;

  friend bool operator==(const UserAccount&, const UserAccount&) = default;
};

struct StoredEvent {
  std::uint64_t seq = 0;
  std::int64_t arrival_ms = 0;
  EventEnvelope envelope;

  friend bool operator==(const StoredEvent&, const StoredEvent&) = default;
};

/// Storage backend behind the ingestion service. Implementations are
/// thread-safe; scans see a consistent prefix of every stream.
class EventStore {
 public:
  virtual ~EventStore() = default;

  /// Throws kDuplicateUser if the name is taken.
  virtual void add_user(const UserAccount& account) = 0;
  virtual std::optional<UserAccount> find_user(std::string_view username) const = 0;

  /// Appends to the (user, envelope.kind()) stream and returns its seq.
  /// Throws kUnknownUser, kInvariantViolation or kStorageFailure.
  virtual std::uint64_t append(std::string_view user, const EventEnvelope& envelope,
                               std::int64_t arrival_ms) = 0;

  /// Throws kBadRange when from_ms >= to_ms, kUnknownUser for unknown users.
  virtual std::vector<StoredEvent> scan(std::string_view user, EventKind kind, std::int64_t from_ms,
                                        std::int64_t to_ms) const = 0;

  virtual std::size_t event_count(std::string_view user, EventKind kind) const = 0;
  virtual std::size_t total_events() const = 0;

  /// Forces appended data to stable storage.
  virtual void flush() = 0;
};

struct LogStoreOptions {
  bool sync_every_append = false;  // fsync after each record, not just on flush/close
  // Snapshot for offline readers: the file must exist, is never modified, and
  // a torn final line is ignored rather than truncated. Writes throw.
  bool read_only = false;
};

/// Single-file log-structured store. Every account and event is one JSON line;
/// the in-memory index is rebuilt on open. A torn final line left by a crash
/// is truncated away; any other corrupt line fails the open with kStorageFailure.
std::unique_ptr<EventStore> open_log_store(const std::filesystem::path& path, LogStoreOptions options = {});

/// Volatile store with the same semantics, for tests and dry runs.
std::unique_ptr<EventStore> make_memory_store();

std::int64_t now_ms();

}  // namespace collector
