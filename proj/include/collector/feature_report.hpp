#pragma once

// Feature files: the keystroke and mouse pipelines composed end to end and
// serialised as CSV (with header) or JSONL.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "collector/event_model.hpp"
#include "collector/record_io.hpp"

namespace collector {

class EventStore;

enum class FeatureMode { kBigraph, kMouseSpeed };

std::string_view to_string(FeatureMode mode);
std::optional<FeatureMode> parse_feature_mode(std::string_view text);

inline constexpr std::string_view kBigraphCsvHeader =
    "user,first,second,down1,up1,down2,up2,dwell1,dwell2,flight,dd";
inline constexpr std::string_view kMouseSpeedCsvHeader = "user,type_a,type_b,distance,elapsed,speed";

struct ReportSummary {
  std::size_t segments = 0;       // bigraph mode only
  std::size_t rows = 0;
  std::size_t skipped_pairs = 0;  // mouse mode only
};

/// segment_keystrokes -> extract_bigraphs over `records`, one row per bigraph.
ReportSummary write_bigraph_features(std::ostream& out, std::string_view user,
                                     std::span<const KeystrokeRecord> records, FileFormat format);

/// Stable sort by t_ms, then mouse_speeds, one row per feature.
ReportSummary write_mouse_speed_features(std::ostream& out, std::string_view user,
                                         std::span<const MouseRecord> records, FileFormat format);

/// Runs the pipeline for `mode` over envelopes of the matching kind; others are ignored.
ReportSummary write_features(std::ostream& out, std::string_view user, FeatureMode mode,
                             std::span<const EventEnvelope> records, FileFormat format);

/// Scans [from_ms, to_ms) of the user's keystroke stream and renders bigraph features.
std::string keystroke_feature_report(const EventStore& store, std::string_view user, std::int64_t from_ms,
                                     std::int64_t to_ms, FileFormat format);

/// Same for the mouse stream and speed features.
std::string mouse_feature_report(const EventStore& store, std::string_view user, std::int64_t from_ms,
                                 std::int64_t to_ms, FileFormat format);

}  // namespace collector
