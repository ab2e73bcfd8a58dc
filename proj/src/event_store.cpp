#include "collector/event_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "collector/error.hpp"
#include "json.hpp"

namespace collector {

std::int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

namespace {

using nlohmann::json;

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

struct StreamKey {
  std::string user;
  EventKind kind;

  auto operator<=>(const StreamKey&) const = default;
};

class LogEventStore final : public EventStore {
 public:
  LogEventStore() = default;

  LogEventStore(const std::filesystem::path& path, LogStoreOptions options) : options_(options) {
    if (options_.read_only && !std::filesystem::exists(path)) {
      throw Error(ErrorCode::kStorageFailure, "", "no store at " + path.string());
    }
    load(path);
    if (options_.read_only) return;
    fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0600);
    if (fd_ < 0) throw Error(ErrorCode::kStorageFailure, "", errno_text("open"));
  }

  ~LogEventStore() override {
    if (fd_ >= 0) {
      ::fsync(fd_);
      ::close(fd_);
    }
  }

  LogEventStore(const LogEventStore&) = delete;
  LogEventStore& operator=(const LogEventStore&) = delete;

  void add_user(const UserAccount& account) override {
    std::unique_lock lock(mutex_);
    if (users_.contains(account.username)) throw Error(ErrorCode::kDuplicateUser);
    json line = {{"op", "user"},
                 {"name", account.username},
                 {"digest", account.password_digest},
                 {"created", account.created_ms}};
    write_line(line.dump());
    users_.emplace(account.username, account);
  }

  std::optional<UserAccount> find_user(std::string_view username) const override {
    std::shared_lock lock(mutex_);
    const auto it = users_.find(std::string(username));
    if (it == users_.end()) return std::nullopt;
    return it->second;
  }

  std::uint64_t append(std::string_view user, const EventEnvelope& envelope, std::int64_t arrival_ms) override {
    validate(envelope);
    std::unique_lock lock(mutex_);
    if (!users_.contains(std::string(user))) throw Error(ErrorCode::kUnknownUser, "user");
    auto& stream = streams_[StreamKey{std::string(user), envelope.kind()}];
    const std::uint64_t seq = stream.size() + 1;
    std::string line = R"({"op":"event","user":)" + json(user).dump() + R"(,"kind":")" +
                       std::string(to_string(envelope.kind())) + R"(","seq":)" + std::to_string(seq) +
                       R"(,"arrival":)" + std::to_string(arrival_ms) + R"(,"record":)" +
                       canonical_json(envelope) + "}";
    write_line(line);
    stream.push_back(StoredEvent{seq, arrival_ms, envelope});
    ++total_;
    return seq;
  }

  std::vector<StoredEvent> scan(std::string_view user, EventKind kind, std::int64_t from_ms,
                                std::int64_t to_ms) const override {
    if (from_ms >= to_ms) throw Error(ErrorCode::kBadRange, "from");
    std::shared_lock lock(mutex_);
    if (!users_.contains(std::string(user))) throw Error(ErrorCode::kUnknownUser, "user");
    std::vector<StoredEvent> out;
    const auto it = streams_.find(StreamKey{std::string(user), kind});
    if (it == streams_.end()) return out;
    for (const auto& event : it->second) {
      const auto t = event.envelope.client_timestamp();
      if (t >= from_ms && t < to_ms) out.push_back(event);
    }
    return out;
  }

  std::size_t event_count(std::string_view user, EventKind kind) const override {
    std::shared_lock lock(mutex_);
    const auto it = streams_.find(StreamKey{std::string(user), kind});
    return it == streams_.end() ? 0 : it->second.size();
  }

  std::size_t total_events() const override {
    std::shared_lock lock(mutex_);
    return total_;
  }

  void flush() override {
    std::unique_lock lock(mutex_);
    if (fd_ >= 0 && ::fsync(fd_) != 0) throw Error(ErrorCode::kStorageFailure, "", errno_text("fsync"));
  }

 private:
  void write_line(std::string line) {
    if (options_.read_only) throw Error(ErrorCode::kStorageFailure, "", "store opened read-only");
    if (fd_ < 0) return;
    line.push_back('\n');
    std::size_t written = 0;
    while (written < line.size()) {
      const auto n = ::write(fd_, line.data() + written, line.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::kStorageFailure, "", errno_text("write"));
      }
      written += static_cast<std::size_t>(n);
    }
    if (options_.sync_every_append && ::fsync(fd_) != 0) {
      throw Error(ErrorCode::kStorageFailure, "", errno_text("fsync"));
    }
  }

  void load(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return;

    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kStorageFailure, "", "cannot read " + path.string());
    const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < content.size()) {
      const auto end = content.find('\n', pos);
      if (end == std::string::npos) {
        // Torn final write (or one still in progress, for a reader); drop it.
        if (!options_.read_only) {
          std::filesystem::resize_file(path, pos, ec);
          if (ec) throw Error(ErrorCode::kStorageFailure, "", "truncate: " + ec.message());
        }
        break;
      }
      ++line_no;
      try {
        replay(std::string_view(content).substr(pos, end - pos));
      } catch (const std::exception& e) {
        throw Error(ErrorCode::kStorageFailure, "",
                    path.string() + " line " + std::to_string(line_no) + ": " + e.what());
      }
      pos = end + 1;
    }
  }

  void replay(std::string_view text) {
    const json line = json::parse(text);
    const auto op = line.at("op").get<std::string>();
    if (op == "user") {
      UserAccount account{line.at("name").get<std::string>(), line.at("digest").get<std::string>(),
                          line.at("created").get<std::int64_t>()};
      if (!users_.emplace(account.username, account).second) throw std::runtime_error("duplicate user record");
      return;
    }
    if (op != "event") throw std::runtime_error("unknown op '" + op + "'");
    const auto user = line.at("user").get<std::string>();
    const auto kind = parse_event_kind(line.at("kind").get<std::string>());
    if (!kind) throw std::runtime_error("unknown kind");
    if (!users_.contains(user)) throw std::runtime_error("event for unknown user");
    auto& stream = streams_[StreamKey{user, *kind}];
    const auto seq = line.at("seq").get<std::uint64_t>();
    if (seq != stream.size() + 1) throw std::runtime_error("sequence gap");
    stream.push_back(StoredEvent{seq, line.at("arrival").get<std::int64_t>(),
                                 parse_record_json(*kind, line.at("record").dump())});
    ++total_;
  }

  LogStoreOptions options_;
  int fd_ = -1;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, UserAccount> users_;
  std::map<StreamKey, std::vector<StoredEvent>> streams_;
  std::size_t total_ = 0;
};

}  // namespace

std::unique_ptr<EventStore> open_log_store(const std::filesystem::path& path, LogStoreOptions options) {
  return std::make_unique<LogEventStore>(path, options);
}

std::unique_ptr<EventStore> make_memory_store() { return std::make_unique<LogEventStore>(); }

}  // namespace collector
