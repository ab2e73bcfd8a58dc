#include "collector/event_model.hpp"

#include <limits>
#include <utility>

#include "collector/error.hpp"
#include "json.hpp"

namespace collector {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::array<std::string_view, 8> kActionNames = {
    "move", "left_down", "left_up", "right_down", "right_up", "wheel_roll", "wheel_down", "wheel_up"};

// Wire key -> record field name used in error reports.
struct FieldSpec {
  std::string_view wire;
  std::string_view field;
};

constexpr std::array<FieldSpec, 8> kKeystrokeFields = {{{"code", "code"},
                                                        {"key", "key"},
                                                        {"down", "down_ms"},
                                                        {"up", "up_ms"},
                                                        {"ctrl", "ctrl"},
                                                        {"alt", "alt"},
                                                        {"shift", "shift"},
                                                        {"caps", "caps"}}};

constexpr std::array<FieldSpec, 4> kMouseFields = {{{"action", "action"}, {"x", "x"}, {"y", "y"}, {"t", "t_ms"}}};

template <std::size_t N>
void check_field_set(const json& object, const std::array<FieldSpec, N>& fields) {
  for (const auto& spec : fields) {
    if (!object.contains(spec.wire)) {
      throw Error(ErrorCode::kSchemaViolation, std::string(spec.field), "missing field");
    }
  }
  for (const auto& item : object.items()) {
    bool known = false;
    for (const auto& spec : fields) known = known || item.key() == spec.wire;
    if (!known) throw Error(ErrorCode::kSchemaViolation, item.key(), "unexpected field");
  }
}

std::string get_string(const json& object, const FieldSpec& spec) {
  const json& value = object.at(spec.wire);
  if (!value.is_string()) {
    throw Error(ErrorCode::kSchemaViolation, std::string(spec.field), "expected string");
  }
  return value.get<std::string>();
}

std::int64_t get_integer(const json& object, const FieldSpec& spec) {
  const json& value = object.at(spec.wire);
  if (value.is_number_integer() && !value.is_number_unsigned()) {
    return value.get<std::int64_t>();
  }
  if (value.is_number_unsigned()) {
    const auto u = value.get<std::uint64_t>();
    if (u <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      return static_cast<std::int64_t>(u);
    }
  }
  throw Error(ErrorCode::kSchemaViolation, std::string(spec.field), "expected 64-bit integer");
}

bool get_flag(const json& object, const FieldSpec& spec) {
  const json& value = object.at(spec.wire);
  if (value.is_number_integer()) {
    const auto v = value.get<std::int64_t>();
    if (v == 0 || v == 1) return v == 1;
  }
  throw Error(ErrorCode::kSchemaViolation, std::string(spec.field), "expected 0 or 1");
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  return kind == EventKind::kKeystroke ? "keystroke" : "mouse";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  if (text == "keystroke") return EventKind::kKeystroke;
  if (text == "mouse") return EventKind::kMouse;
  return std::nullopt;
}

std::string_view to_string(MouseAction action) {
  const auto index = static_cast<std::size_t>(action);
  return index < kActionNames.size() ? kActionNames[index] : "invalid";
}

std::optional<MouseAction> parse_mouse_action(std::string_view text) {
  for (std::size_t i = 0; i < kActionNames.size(); ++i) {
    if (kActionNames[i] == text) return static_cast<MouseAction>(i);
  }
  return std::nullopt;
}

std::int64_t EventEnvelope::client_timestamp() const noexcept {
  if (const auto* k = keystroke()) return k->down_ms;
  return mouse()->t_ms;
}

std::optional<std::size_t> utf8_length(std::string_view text) {
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (lead < 0x80) {
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      extra = 1;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      extra = 2;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      extra = 3;
      cp = lead & 0x07;
    } else {
      return std::nullopt;
    }
    if (i + extra >= text.size() && extra > 0) return std::nullopt;
    for (std::size_t j = 1; j <= extra; ++j) {
      const auto cont = static_cast<unsigned char>(text[i + j]);
      if ((cont & 0xC0) != 0x80) return std::nullopt;
      cp = (cp << 6) | (cont & 0x3F);
    }
    // Reject overlong forms, surrogates and out-of-range scalars.
    constexpr std::uint32_t kMinForLength[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLength[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return std::nullopt;
    }
    i += extra + 1;
    ++count;
  }
  return count;
}

void validate(const KeystrokeRecord& record) {
  if (record.code.empty() || !utf8_length(record.code)) {
    throw Error(ErrorCode::kInvariantViolation, "code", "must be a non-empty UTF-8 string");
  }
  if (record.key.empty() || !utf8_length(record.key)) {
    throw Error(ErrorCode::kInvariantViolation, "key", "must be a non-empty UTF-8 string");
  }
  if (record.up_ms < record.down_ms) {
    throw Error(ErrorCode::kInvariantViolation, "up_ms", "earlier than down_ms");
  }
}

void validate(const MouseRecord& record) {
  if (static_cast<std::size_t>(record.action) >= kActionNames.size()) {
    throw Error(ErrorCode::kInvariantViolation, "action", "unknown mouse action");
  }
  if (record.x < 0) throw Error(ErrorCode::kInvariantViolation, "x", "negative page coordinate");
  if (record.y < 0) throw Error(ErrorCode::kInvariantViolation, "y", "negative page coordinate");
}

void validate(const EventEnvelope& envelope) {
  if (const auto* k = envelope.keystroke()) {
    validate(*k);
  } else {
    validate(*envelope.mouse());
  }
}

std::string canonical_json(const EventEnvelope& envelope) {
  ordered_json out = ordered_json::object();
  if (const auto* k = envelope.keystroke()) {
    out["code"] = k->code;
    out["key"] = k->key;
    out["down"] = k->down_ms;
    out["up"] = k->up_ms;
    out["ctrl"] = k->ctrl ? 1 : 0;
    out["alt"] = k->alt ? 1 : 0;
    out["shift"] = k->shift ? 1 : 0;
    out["caps"] = k->caps ? 1 : 0;
  } else {
    const auto& m = *envelope.mouse();
    out["action"] = to_string(m.action);
    out["x"] = m.x;
    out["y"] = m.y;
    out["t"] = m.t_ms;
  }
  return out.dump();
}

EventEnvelope parse_record_json(EventKind kind, std::string_view text) {
  json object;
  try {
    object = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedWire, "data", e.what());
  }
  if (!object.is_object()) throw Error(ErrorCode::kSchemaViolation, "data", "expected a JSON object");

  if (kind == EventKind::kKeystroke) {
    check_field_set(object, kKeystrokeFields);
    KeystrokeRecord record;
    record.code = get_string(object, kKeystrokeFields[0]);
    record.key = get_string(object, kKeystrokeFields[1]);
    record.down_ms = get_integer(object, kKeystrokeFields[2]);
    record.up_ms = get_integer(object, kKeystrokeFields[3]);
    record.ctrl = get_flag(object, kKeystrokeFields[4]);
    record.alt = get_flag(object, kKeystrokeFields[5]);
    record.shift = get_flag(object, kKeystrokeFields[6]);
    record.caps = get_flag(object, kKeystrokeFields[7]);
    validate(record);
    return EventEnvelope(std::move(record));
  }

  check_field_set(object, kMouseFields);
  MouseRecord record;
  const auto action = parse_mouse_action(get_string(object, kMouseFields[0]));
  if (!action) throw Error(ErrorCode::kInvariantViolation, "action", "unknown mouse action");
  record.action = *action;
  record.x = get_integer(object, kMouseFields[1]);
  record.y = get_integer(object, kMouseFields[2]);
  record.t_ms = get_integer(object, kMouseFields[3]);
  validate(record);
  return EventEnvelope(record);
}

std::string percent_encode(std::string_view raw) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(raw.size() * 3);
  for (const char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    const bool unreserved = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                            (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.' || c == '~';
    if (unreserved) {
      out.push_back(ch);
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0x0F]);
    }
  }
  return out;
}

std::string percent_decode(std::string_view encoded) {
  std::string out;
  out.reserve(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] != '%') {
      out.push_back(encoded[i]);
      continue;
    }
    if (i + 2 >= encoded.size()) {
      throw Error(ErrorCode::kMalformedWire, "data", "truncated percent escape");
    }
    const int hi = hex_value(encoded[i + 1]);
    const int lo = hex_value(encoded[i + 2]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::kMalformedWire, "data", "invalid percent escape");
    out.push_back(static_cast<char>((hi << 4) | lo));
    i += 2;
  }
  return out;
}

std::string encode_envelope(const EventEnvelope& envelope) {
  return percent_encode(canonical_json(envelope));
}

EventEnvelope decode_envelope(EventKind kind, std::string_view wire) {
  return parse_record_json(kind, percent_decode(wire));
}

}  // namespace collector
