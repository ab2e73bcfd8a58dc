#pragma once

// Synthetic typing and pointer sessions driven through the collector's HTTP
// routes, standing in for a human using the browser extension.
//
// Profile files are plain `key = value` lines; '#' starts a comment.
//
//   seed         = 42                  # RNG seed (unsigned 64-bit)
//   start_ms     = 1700000000000       # first keydown / mouse origin time
//   words        = This Is The Text    # typed with a space between words
//   inter_key_ms = 120..280            # down-down gap range, inclusive
//   dwell_ms     = 60..120             # key hold range, inclusive
//   mouse        = move 10 20 8..16    # action x y elapsed-range; one line per step
//
// A single number is accepted wherever a range is expected.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "collector/event_model.hpp"

namespace collector {

class CollectorClient;

struct IntRange {
  std::int64_t min = 0;
  std::int64_t max = 0;

  friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct MouseStep {
  MouseAction action = MouseAction::kMove;
  std::int64_t x = 0;
  std::int64_t y = 0;
  IntRange elapsed_ms;  // time since the previous step (or start_ms)

  friend bool operator==(const MouseStep&, const MouseStep&) = default;
};

struct SimulationProfile {
  std::vector<std::string> words;
  IntRange inter_key_ms{120, 280};
  IntRange dwell_ms{60, 120};
  std::vector<MouseStep> mouse_path;
  std::uint64_t seed = 1;
  std::int64_t start_ms = 1'700'000'000'000;

  friend bool operator==(const SimulationProfile&, const SimulationProfile&) = default;
};

/// Throws std::invalid_argument on an empty or inverted range, a non-positive
/// inter-key gap, or negative coordinates.
void validate(const SimulationProfile& profile);

/// Throws LineError naming the offending line.
SimulationProfile parse_profile(std::istream& in);
SimulationProfile load_profile(const std::string& path);

/// DOM `code` value for a typed character ("KeyT", "Digit4", "Space", ...).
std::string key_code_for(std::string_view character);

/// Deterministic event stream for the profile, in the order the extension
/// would send it: keystrokes ordered by release time, then the mouse path.
/// Upper-case letters are typed with a held Shift key, which is captured too.
std::vector<EventEnvelope> generate_session(const SimulationProfile& profile);

struct SimulationResult {
  std::size_t sent = 0;
  std::size_t accepted = 0;
};

/// Registers (an existing account is fine), logs in, sends the session over
/// /collect and logs out. Throws ClientError or std::runtime_error on
/// transport or authentication failure.
SimulationResult run_simulation(const SimulationProfile& profile, CollectorClient& client,
                                std::string_view username, std::string_view password);

}  // namespace collector
