#include "collector/feature_report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <vector>

#include "collector/csv.hpp"
#include "collector/event_store.hpp"
#include "collector/features.hpp"
#include "json.hpp"

namespace collector {
namespace {

std::string fixed6(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

std::vector<EventEnvelope> envelopes_of(const std::vector<StoredEvent>& events) {
  std::vector<EventEnvelope> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back(e.envelope);
  return out;
}

}  // namespace

std::string_view to_string(FeatureMode mode) {
  return mode == FeatureMode::kBigraph ? "bigraph" : "mouse-speed";
}

std::optional<FeatureMode> parse_feature_mode(std::string_view text) {
  if (text == "bigraph") return FeatureMode::kBigraph;
  if (text == "mouse-speed") return FeatureMode::kMouseSpeed;
  return std::nullopt;
}

ReportSummary write_bigraph_features(std::ostream& out, std::string_view user,
                                     std::span<const KeystrokeRecord> records, FileFormat format) {
  ReportSummary summary;
  if (format == FileFormat::kCsv) out << kBigraphCsvHeader << '\n';
  const auto segments = segment_keystrokes({records.begin(), records.end()});
  summary.segments = segments.size();
  for (const auto& segment : segments) {
    for (const auto& f : extract_bigraphs(segment)) {
      ++summary.rows;
      if (format == FileFormat::kCsv) {
        const std::string row[] = {std::string(user),        f.first_key,
                                   f.second_key,             std::to_string(f.down1_ms),
                                   std::to_string(f.up1_ms), std::to_string(f.down2_ms),
                                   std::to_string(f.up2_ms), std::to_string(f.dwell1_ms),
                                   std::to_string(f.dwell2_ms), std::to_string(f.flight_ms),
                                   std::to_string(f.dd_ms)};
        out << csv::format_row(row) << '\n';
      } else {
        nlohmann::ordered_json j;
        j["user"] = user;
        j["first"] = f.first_key;
        j["second"] = f.second_key;
        j["down1"] = f.down1_ms;
        j["up1"] = f.up1_ms;
        j["down2"] = f.down2_ms;
        j["up2"] = f.up2_ms;
        j["dwell1"] = f.dwell1_ms;
        j["dwell2"] = f.dwell2_ms;
        j["flight"] = f.flight_ms;
        j["dd"] = f.dd_ms;
        out << j.dump() << '\n';
      }
    }
  }
  return summary;
}

ReportSummary write_mouse_speed_features(std::ostream& out, std::string_view user,
                                         std::span<const MouseRecord> records, FileFormat format) {
  std::vector<MouseRecord> sorted(records.begin(), records.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const MouseRecord& a, const MouseRecord& b) { return a.t_ms < b.t_ms; });
  const auto result = mouse_speeds(sorted);

  ReportSummary summary;
  summary.skipped_pairs = result.skipped_pairs;
  if (format == FileFormat::kCsv) out << kMouseSpeedCsvHeader << '\n';
  for (const auto& f : result.features) {
    ++summary.rows;
    if (format == FileFormat::kCsv) {
      const std::string row[] = {std::string(user),
                                 std::string(to_string(f.type_pair.first)),
                                 std::string(to_string(f.type_pair.second)),
                                 fixed6(f.distance_px),
                                 std::to_string(f.elapsed_ms),
                                 fixed6(f.speed_px_per_s)};
      out << csv::format_row(row) << '\n';
    } else {
      nlohmann::ordered_json j;
      j["user"] = user;
      j["type_a"] = to_string(f.type_pair.first);
      j["type_b"] = to_string(f.type_pair.second);
      j["distance"] = f.distance_px;
      j["elapsed"] = f.elapsed_ms;
      j["speed"] = f.speed_px_per_s;
      out << j.dump() << '\n';
    }
  }
  return summary;
}

ReportSummary write_features(std::ostream& out, std::string_view user, FeatureMode mode,
                             std::span<const EventEnvelope> records, FileFormat format) {
  if (mode == FeatureMode::kBigraph) {
    std::vector<KeystrokeRecord> keys;
    for (const auto& e : records) {
      if (const auto* k = e.keystroke()) keys.push_back(*k);
    }
    return write_bigraph_features(out, user, keys, format);
  }
  std::vector<MouseRecord> moves;
  for (const auto& e : records) {
    if (const auto* m = e.mouse()) moves.push_back(*m);
  }
  return write_mouse_speed_features(out, user, moves, format);
}

std::string keystroke_feature_report(const EventStore& store, std::string_view user, std::int64_t from_ms,
                                     std::int64_t to_ms, FileFormat format) {
  const auto events = envelopes_of(store.scan(user, EventKind::kKeystroke, from_ms, to_ms));
  std::ostringstream out;
  write_features(out, user, FeatureMode::kBigraph, events, format);
  return out.str();
}

std::string mouse_feature_report(const EventStore& store, std::string_view user, std::int64_t from_ms,
                                 std::int64_t to_ms, FileFormat format) {
  const auto events = envelopes_of(store.scan(user, EventKind::kMouse, from_ms, to_ms));
  std::ostringstream out;
  write_features(out, user, FeatureMode::kMouseSpeed, events, format);
  return out.str();
}

}  // namespace collector
