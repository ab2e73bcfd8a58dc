#include "collector/features.hpp"

#include <algorithm>
#include <cmath>

namespace collector {

bool is_space_key(const KeystrokeRecord& record) { return record.key == " "; }

bool is_function_key(const KeystrokeRecord& record) {
  const auto length = utf8_length(record.key);
  return length.value_or(record.key.size()) > 1;
}

std::vector<KeystrokeSegment> segment_keystrokes(std::vector<KeystrokeRecord> events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const KeystrokeRecord& a, const KeystrokeRecord& b) { return a.down_ms < b.down_ms; });

  std::vector<KeystrokeSegment> segments;
  KeystrokeSegment current;
  auto close_current = [&] {
    if (!current.letters.empty()) segments.push_back(std::move(current));
    current = KeystrokeSegment{};
  };

  for (std::size_t i = 0; i < events.size(); ++i) {
    if (i > 0) {
      const auto& previous = events[i - 1];
      const bool long_gap = events[i].down_ms - previous.down_ms > kSegmentGapMs;
      if (long_gap || is_space_key(previous)) close_current();
    }
    if (!is_space_key(events[i]) && !is_function_key(events[i])) {
      // A dropped function key must not bridge a long pause between letters.
      if (!current.letters.empty() && events[i].down_ms - current.letters.back().down_ms > kSegmentGapMs) {
        close_current();
      }
      current.letters.push_back(std::move(events[i]));
    }
  }
  close_current();
  return segments;
}

BigraphFeature make_bigraph(const KeystrokeRecord& first, const KeystrokeRecord& second) {
  BigraphFeature f;
  f.first_key = first.key;
  f.second_key = second.key;
  f.down1_ms = first.down_ms;
  f.up1_ms = first.up_ms;
  f.down2_ms = second.down_ms;
  f.up2_ms = second.up_ms;
  f.dwell1_ms = f.up1_ms - f.down1_ms;
  f.dwell2_ms = f.up2_ms - f.down2_ms;
  f.flight_ms = f.down2_ms - f.up1_ms;
  f.dd_ms = f.down2_ms - f.down1_ms;
  return f;
}

std::vector<BigraphFeature> extract_bigraphs(const KeystrokeSegment& segment) {
  std::vector<BigraphFeature> features;
  const auto& letters = segment.letters;
  if (letters.size() < 2) return features;
  features.reserve(letters.size() - 1);
  for (std::size_t i = 0; i + 1 < letters.size(); ++i) {
    features.push_back(make_bigraph(letters[i], letters[i + 1]));
  }
  return features;
}

MouseSpeedResult mouse_speeds(std::span<const MouseRecord> events) {
  MouseSpeedResult result;
  if (events.size() < 2) return result;
  result.features.reserve(events.size() - 1);
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    const auto& a = events[i];
    const auto& b = events[i + 1];
    const std::int64_t elapsed = b.t_ms - a.t_ms;
    if (elapsed <= 0) {
      ++result.skipped_pairs;
      continue;
    }
    MouseSpeedFeature f;
    f.type_pair = {a.action, b.action};
    f.distance_px = std::hypot(static_cast<double>(b.x - a.x), static_cast<double>(b.y - a.y));
    f.elapsed_ms = elapsed;
    f.speed_px_per_s = f.distance_px * 1000.0 / static_cast<double>(elapsed);
    result.features.push_back(f);
  }
  return result;
}

SpeedProfile speed_profile(std::span<const MouseSpeedFeature> features) {
  SpeedProfile profile;
  std::map<ActionPair, double> sums;
  for (const auto& f : features) {
    auto [it, inserted] = profile.try_emplace(f.type_pair);
    SpeedStats& stats = it->second;
    if (inserted) {
      stats.min = f.speed_px_per_s;
      stats.max = f.speed_px_per_s;
    } else {
      stats.min = std::min(stats.min, f.speed_px_per_s);
      stats.max = std::max(stats.max, f.speed_px_per_s);
    }
    ++stats.count;
    sums[f.type_pair] += f.speed_px_per_s;
  }
  for (auto& [pair, stats] : profile) stats.mean = sums[pair] / static_cast<double>(stats.count);
  return profile;
}

}  // namespace collector
