#include "collector/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "collector/client.hpp"
#include "collector/record_io.hpp"

namespace collector {
namespace {

std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  return text;
}

template <typename T>
T parse_number(std::string_view text, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument(std::string("invalid ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

IntRange parse_range(std::string_view text, const char* what) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    const auto v = parse_number<std::int64_t>(trim(text), what);
    return {v, v};
  }
  return {parse_number<std::int64_t>(trim(text.substr(0, dots)), what),
          parse_number<std::int64_t>(trim(text.substr(dots + 2)), what)};
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) words.push_back(word);
  return words;
}

MouseStep parse_mouse_step(std::string_view text) {
  const auto parts = split_words(text);
  if (parts.size() != 4) throw std::invalid_argument("mouse step needs: action x y elapsed");
  const auto action = parse_mouse_action(parts[0]);
  if (!action) throw std::invalid_argument("unknown mouse action '" + parts[0] + "'");
  return MouseStep{*action, parse_number<std::int64_t>(parts[1], "x"), parse_number<std::int64_t>(parts[2], "y"),
                   parse_range(parts[3], "elapsed")};
}

// Splits UTF-8 text into code point substrings.
std::vector<std::string> characters_of(std::string_view word) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < word.size()) {
    const auto lead = static_cast<unsigned char>(word[i]);
    std::size_t len = lead < 0x80 ? 1 : (lead & 0xE0) == 0xC0 ? 2 : (lead & 0xF0) == 0xE0 ? 3 : 4;
    len = std::min(len, word.size() - i);
    out.emplace_back(word.substr(i, len));
    i += len;
  }
  return out;
}

class RangeSampler {
 public:
  explicit RangeSampler(std::uint64_t seed) : rng_(seed) {}

  // Modulo mapping keeps the sequence identical across standard libraries.
  std::int64_t operator()(const IntRange& range) {
    const auto span = static_cast<std::uint64_t>(range.max - range.min) + 1;
    return range.min + static_cast<std::int64_t>(rng_() % span);
  }

 private:
  std::mt19937_64 rng_;
};

void check_range(const IntRange& range, std::int64_t floor, const char* what) {
  if (range.min > range.max) throw std::invalid_argument(std::string(what) + ": min exceeds max");
  if (range.min < floor) {
    throw std::invalid_argument(std::string(what) + ": minimum must be at least " + std::to_string(floor));
  }
}

}  // namespace

void validate(const SimulationProfile& profile) {
  check_range(profile.inter_key_ms, 1, "inter_key_ms");
  check_range(profile.dwell_ms, 0, "dwell_ms");
  for (const auto& step : profile.mouse_path) {
    check_range(step.elapsed_ms, 0, "mouse elapsed");
    if (step.x < 0 || step.y < 0) throw std::invalid_argument("mouse step has negative page coordinates");
  }
  for (const auto& word : profile.words) {
    if (!utf8_length(word)) throw std::invalid_argument("word is not valid UTF-8");
  }
}

SimulationProfile parse_profile(std::istream& in) {
  SimulationProfile profile;
  profile.words.clear();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    try {
      const auto eq = text.find('=');
      if (eq == std::string_view::npos) throw std::invalid_argument("expected key = value");
      const auto key = trim(text.substr(0, eq));
      const auto value = trim(text.substr(eq + 1));
      if (key == "seed") {
        profile.seed = parse_number<std::uint64_t>(value, "seed");
      } else if (key == "start_ms") {
        profile.start_ms = parse_number<std::int64_t>(value, "start_ms");
      } else if (key == "words") {
        const auto words = split_words(value);
        profile.words.insert(profile.words.end(), words.begin(), words.end());
      } else if (key == "inter_key_ms") {
        profile.inter_key_ms = parse_range(value, "inter_key_ms");
      } else if (key == "dwell_ms") {
        profile.dwell_ms = parse_range(value, "dwell_ms");
      } else if (key == "mouse") {
        profile.mouse_path.push_back(parse_mouse_step(value));
      } else {
        throw std::invalid_argument("unknown key '" + std::string(key) + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw LineError(line_no, e.what());
    }
  }
  try {
    validate(profile);
  } catch (const std::invalid_argument& e) {
    throw LineError(line_no, e.what());
  }
  return profile;
}

SimulationProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile " + path);
  return parse_profile(in);
}

std::string key_code_for(std::string_view character) {
  if (character.size() == 1) {
    const char c = character.front();
    if (c >= 'a' && c <= 'z') return std::string("Key") + static_cast<char>(c - 'a' + 'A');
    if (c >= 'A' && c <= 'Z') return std::string("Key") + c;
    if (c >= '0' && c <= '9') return std::string("Digit") + c;
    switch (c) {
      case ' ': return "Space";
      case ',': return "Comma";
      case '.': return "Period";
      case '-': return "Minus";
      case '=': return "Equal";
      case ';': return "Semicolon";
      case '\'': return "Quote";
      case '/': return "Slash";
      case '\\': return "Backslash";
      case '[': return "BracketLeft";
      case ']': return "BracketRight";
      case '`': return "Backquote";
      default: break;
    }
  }
  return "Unidentified";
}

std::vector<EventEnvelope> generate_session(const SimulationProfile& profile) {
  validate(profile);
  RangeSampler sample(profile.seed);

  std::vector<KeystrokeRecord> keys;
  std::int64_t last_down = profile.start_ms;
  bool first = true;
  auto type = [&](const std::string& character) {
    const std::int64_t gap = first ? 0 : sample(profile.inter_key_ms);
    first = false;
    const std::int64_t down = last_down + gap;
    const std::int64_t up = down + sample(profile.dwell_ms);
    last_down = down;

    const bool upper = character.size() == 1 && character[0] >= 'A' && character[0] <= 'Z';
    if (upper) {
      // Shift goes down inside the preceding gap and is released after the letter.
      const std::int64_t lead = gap > 0 ? std::max<std::int64_t>(1, gap / 3) : 0;
      keys.push_back(KeystrokeRecord{"ShiftLeft", "Shift", down - lead, up + 10, false, false, true, false});
    }
    keys.push_back(KeystrokeRecord{key_code_for(character), character, down, up, false, false, upper, false});
  };

  for (std::size_t w = 0; w < profile.words.size(); ++w) {
    if (w > 0) type(" ");
    for (const auto& character : characters_of(profile.words[w])) type(character);
  }
  std::stable_sort(keys.begin(), keys.end(),
                   [](const KeystrokeRecord& a, const KeystrokeRecord& b) { return a.up_ms < b.up_ms; });

  std::vector<EventEnvelope> events;
  events.reserve(keys.size() + profile.mouse_path.size());
  for (auto& k : keys) events.emplace_back(std::move(k));

  std::int64_t t = profile.start_ms;
  for (const auto& step : profile.mouse_path) {
    t += sample(step.elapsed_ms);
    events.emplace_back(MouseRecord{step.action, step.x, step.y, t});
  }
  return events;
}

SimulationResult run_simulation(const SimulationProfile& profile, CollectorClient& client,
                                std::string_view username, std::string_view password) {
  const auto events = generate_session(profile);

  const auto registered = client.register_user(username, password);
  if (!registered.ok() && registered.body != "DuplicateUser") {
    throw std::runtime_error("register failed: " + registered.body);
  }
  const auto logged_in = client.login(username, password);
  if (!logged_in.ok()) throw std::runtime_error("login failed: " + logged_in.body);

  SimulationResult result;
  for (const auto& event : events) {
    const auto reply = client.collect(event);
    ++result.sent;
    if (reply.ok()) {
      ++result.accepted;
    } else if (reply.status == 401) {
      throw std::runtime_error("session rejected by server: " + reply.body);
    }
  }
  client.logout();
  return result;
}

}  // namespace collector
