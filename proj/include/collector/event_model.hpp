#pragma once

// Captured keyboard/mouse events and their wire encoding.
//
// The wire string is the single representation shared by the browser
// extension and the ingestion service: the record's canonical JSON (fixed
// field order, booleans as 0/1, no whitespace), percent-encoded so it can be
// appended to a GET query as `data=<wire>`.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace collector {

enum class EventKind { kKeystroke, kMouse };

enum class MouseAction {
  kMove,
  kLeftDown,
  kLeftUp,
  kRightDown,
  kRightUp,
  kWheelRoll,
  kWheelDown,  // middle button press
  kWheelUp,    // middle button release
};

inline constexpr std::array<MouseAction, 8> kAllMouseActions = {
    MouseAction::kMove,      MouseAction::kLeftDown,  MouseAction::kLeftUp,
    MouseAction::kRightDown, MouseAction::kRightUp,   MouseAction::kWheelRoll,
    MouseAction::kWheelDown, MouseAction::kWheelUp};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

std::string_view to_string(MouseAction action);
std::optional<MouseAction> parse_mouse_action(std::string_view text);

/// One physical key press/release. Timestamps are client milliseconds since
/// the Unix epoch; modifier flags are sampled at keydown.
struct KeystrokeRecord {
  std::string code;  // physical key, e.g. "KeyD"
  std::string key;   // logical value, e.g. "d"
  std::int64_t down_ms = 0;
  std::int64_t up_ms = 0;
  bool ctrl = false;
  bool alt = false;
  bool shift = false;
  bool caps = false;

  friend bool operator==(const KeystrokeRecord&, const KeystrokeRecord&) = default;
};

/// One mouse action at a document-relative (page) position.
struct MouseRecord {
  MouseAction action = MouseAction::kMove;
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t t_ms = 0;

  friend bool operator==(const MouseRecord&, const MouseRecord&) = default;
};

/// A keystroke or mouse record. The kind is derived from the payload, so the
/// two can never disagree.
class EventEnvelope {
 public:
  EventEnvelope(KeystrokeRecord record) : payload_(std::move(record)) {}
  EventEnvelope(MouseRecord record) : payload_(record) {}

  EventKind kind() const noexcept {
    return std::holds_alternative<KeystrokeRecord>(payload_) ? EventKind::kKeystroke
                                                             : EventKind::kMouse;
  }
  const KeystrokeRecord* keystroke() const noexcept {
    return std::get_if<KeystrokeRecord>(&payload_);
  }
  const MouseRecord* mouse() const noexcept { return std::get_if<MouseRecord>(&payload_); }

  /// down_ms for keystrokes, t_ms for mouse records.
  std::int64_t client_timestamp() const noexcept;

  friend bool operator==(const EventEnvelope&, const EventEnvelope&) = default;

 private:
  std::variant<KeystrokeRecord, MouseRecord> payload_;
};

/// Number of Unicode code points in `text`, or nullopt if it is not valid UTF-8.
std::optional<std::size_t> utf8_length(std::string_view text);

// Throw Error(kInvariantViolation, <field>) on the first violated invariant.
void validate(const KeystrokeRecord& record);
void validate(const MouseRecord& record);
void validate(const EventEnvelope& envelope);

/// Canonical JSON of the payload. The envelope must be valid.
std::string canonical_json(const EventEnvelope& envelope);

/// Parse a canonical-JSON record of the given kind. Field order is not
/// significant, but the field set and types are.
/// Throws kMalformedWire, kSchemaViolation or kInvariantViolation.
EventEnvelope parse_record_json(EventKind kind, std::string_view json);

/// RFC 3986 percent-encoding; only unreserved characters pass through.
std::string percent_encode(std::string_view raw);
/// Inverse of percent_encode. '+' is literal. Throws kMalformedWire on a bad escape.
std::string percent_decode(std::string_view encoded);

std::string encode_envelope(const EventEnvelope& envelope);
EventEnvelope decode_envelope(EventKind kind, std::string_view wire);

}  // namespace collector
