#include "collector/client.hpp"

#include "httplib.h"

namespace collector {

struct CollectorClient::Impl {
  explicit Impl(const std::string& base_url) : http(base_url) {
    // Targets are encoded by us; httplib must not touch them again.
    http.set_url_encode(false);
    http.set_keep_alive(true);
    http.set_tcp_nodelay(true);
    http.set_connection_timeout(5, 0);
    http.set_read_timeout(30, 0);
  }
  httplib::Client http;
};

CollectorClient::CollectorClient(const std::string& base_url) : impl_(std::make_unique<Impl>(base_url)) {
  if (!impl_->http.is_valid()) throw ClientError("invalid target URL '" + base_url + "'");
}

CollectorClient::~CollectorClient() = default;
CollectorClient::CollectorClient(CollectorClient&&) noexcept = default;
CollectorClient& CollectorClient::operator=(CollectorClient&&) noexcept = default;

HttpReply CollectorClient::get(const std::string& target) {
  httplib::Headers headers;
  if (!cookie_.empty()) headers.emplace("Cookie", "uname=" + cookie_);
  auto result = impl_->http.Get(target, headers);
  if (!result) throw ClientError("GET " + target.substr(0, target.find('?')) + ": " + httplib::to_string(result.error()));
  return HttpReply{result->status, result->body};
}

HttpReply CollectorClient::register_user(std::string_view username, std::string_view password) {
  return get("/register?uname=" + percent_encode(username) + "&pwd=" + percent_encode(password));
}

HttpReply CollectorClient::login(std::string_view username, std::string_view password) {
  const std::string target = "/login?uname=" + percent_encode(username) + "&pwd=" + percent_encode(password);
  auto result = impl_->http.Get(target);
  if (!result) throw ClientError("GET /login: " + httplib::to_string(result.error()));
  if (result->status == 200) {
    const auto header = result->get_header_value("Set-Cookie");
    const auto start = header.find("uname=");
    if (start != std::string::npos) {
      const auto value_start = start + 6;
      cookie_ = header.substr(value_start, header.find(';', value_start) - value_start);
    }
  }
  return HttpReply{result->status, result->body};
}

HttpReply CollectorClient::logout() {
  auto reply = get("/logout");
  cookie_.clear();
  return reply;
}

HttpReply CollectorClient::collect(const EventEnvelope& envelope) {
  return get("/collect?type=" + std::string(to_string(envelope.kind())) + "&data=" + encode_envelope(envelope));
}

HttpReply CollectorClient::export_events(std::string_view user, EventKind kind, std::int64_t from_ms,
                                         std::int64_t to_ms, FileFormat format) {
  return get("/export?user=" + percent_encode(user) + "&kind=" + std::string(to_string(kind)) +
             "&from=" + std::to_string(from_ms) + "&to=" + std::to_string(to_ms) +
             "&format=" + std::string(to_string(format)));
}

}  // namespace collector
