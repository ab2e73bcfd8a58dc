#pragma once

// Biometric features over captured streams: keystroke segmentation into
// word-like sets, bigraph timings within a set, and mouse movement speeds
// between consecutive events.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "collector/event_model.hpp"

namespace collector {

/// A set starts afresh when the down-down gap to the previous keystroke
/// exceeds this many milliseconds (strictly).
inline constexpr std::int64_t kSegmentGapMs = 1000;

/// True for the space bar (key value " ").
bool is_space_key(const KeystrokeRecord& record);

/// True when the DOM key value is longer than one code point ("Shift",
/// "Enter", "F5", "Dead", ...). Single characters, including digits and
/// punctuation, are letters.
bool is_function_key(const KeystrokeRecord& record);

struct KeystrokeSegment {
  std::vector<KeystrokeRecord> letters;
};

/// Splits a keystroke stream into sets. The stream is stable-sorted by
/// down_ms first. Boundaries are found on the unfiltered stream; space and
/// function keys are dropped afterwards and empty sets are discarded. Two
/// letters more than 1 s apart never share a set, even when a dropped
/// function key sits between them.
std::vector<KeystrokeSegment> segment_keystrokes(std::vector<KeystrokeRecord> events);

struct BigraphFeature {
  std::string first_key;
  std::string second_key;
  std::int64_t down1_ms = 0;
  std::int64_t up1_ms = 0;
  std::int64_t down2_ms = 0;
  std::int64_t up2_ms = 0;
  std::int64_t dwell1_ms = 0;  // up1 - down1
  std::int64_t dwell2_ms = 0;  // up2 - down2
  std::int64_t flight_ms = 0;  // down2 - up1, negative under rollover
  std::int64_t dd_ms = 0;      // down2 - down1

  friend bool operator==(const BigraphFeature&, const BigraphFeature&) = default;
};

BigraphFeature make_bigraph(const KeystrokeRecord& first, const KeystrokeRecord& second);

/// One feature per consecutive letter pair: max(0, n - 1) entries.
std::vector<BigraphFeature> extract_bigraphs(const KeystrokeSegment& segment);

using ActionPair = std::pair<MouseAction, MouseAction>;

struct MouseSpeedFeature {
  ActionPair type_pair;
  double distance_px = 0.0;
  std::int64_t elapsed_ms = 0;
  double speed_px_per_s = 0.0;
};

struct MouseSpeedResult {
  std::vector<MouseSpeedFeature> features;
  std::size_t skipped_pairs = 0;  // consecutive pairs with elapsed <= 0
};

/// Distance, elapsed time and speed for each consecutive pair of `events`
/// in the order given. Pairs whose elapsed time is not positive are skipped
/// and counted.
MouseSpeedResult mouse_speeds(std::span<const MouseRecord> events);

struct SpeedStats {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

using SpeedProfile = std::map<ActionPair, SpeedStats>;

SpeedProfile speed_profile(std::span<const MouseSpeedFeature> features);

}  // namespace collector
