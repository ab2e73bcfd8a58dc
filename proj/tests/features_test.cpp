#include "collector/features.hpp"

#include <cmath>
#include <optional>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"

using namespace collector;
using collector::testing::Rng;

namespace {

KeystrokeRecord letter(std::string key, std::int64_t down, std::int64_t up) {
  return KeystrokeRecord{"Key" + key, std::move(key), down, up, false, false, false, false};
}

KeystrokeRecord named(std::string key, std::int64_t down, std::int64_t up) {
  return KeystrokeRecord{key, std::move(key), down, up, false, false, false, false};
}

KeystrokeRecord space(std::int64_t down, std::int64_t up) {
  return KeystrokeRecord{"Space", " ", down, up, false, false, false, false};
}

std::string spell(const KeystrokeSegment& segment) {
  std::string out;
  for (const auto& k : segment.letters) out += k.key;
  return out;
}

// "This Is The Text" with a held Shift before each capital, ~150 ms between keys.
std::vector<KeystrokeRecord> this_is_the_text() {
  std::vector<KeystrokeRecord> keys;
  std::int64_t t = 10'000;
  const std::string words[] = {"This", "Is", "The", "Text"};
  for (std::size_t w = 0; w < 4; ++w) {
    if (w > 0) {
      keys.push_back(space(t, t + 70));
      t += 150;
    }
    for (const char c : words[w]) {
      if (c >= 'A' && c <= 'Z') {
        auto shift = named("Shift", t - 40, t + 90);
        shift.code = "ShiftLeft";
        shift.shift = true;
        keys.push_back(shift);
      }
      auto k = letter(std::string(1, c), t, t + 80);
      k.shift = c >= 'A' && c <= 'Z';
      keys.push_back(k);
      t += 150;
    }
  }
  return keys;
}

}  // namespace

TEST_CASE("function-key predicate") {
  CHECK(is_function_key(named("Shift", 0, 1)));
  CHECK(is_function_key(named("Enter", 0, 1)));
  CHECK(is_function_key(named("F5", 0, 1)));
  CHECK_FALSE(is_function_key(letter("a", 0, 1)));
  CHECK_FALSE(is_function_key(named("7", 0, 1)));
  CHECK_FALSE(is_function_key(named(",", 0, 1)));
  CHECK_FALSE(is_function_key(named("\xC3\xA9", 0, 1)));  // é is one character
  CHECK_FALSE(is_function_key(space(0, 1)));
  CHECK(is_space_key(space(0, 1)));
}

TEST_CASE("This Is The Text yields four sets") {
  const auto segments = segment_keystrokes(this_is_the_text());
  REQUIRE(segments.size() == 4);
  CHECK(spell(segments[0]) == "This");
  CHECK(spell(segments[1]) == "Is");
  CHECK(spell(segments[2]) == "The");
  CHECK(spell(segments[3]) == "Text");
}

TEST_CASE("empty input gives no segments") { CHECK(segment_keystrokes({}).empty()); }

TEST_CASE("the one-second rule is strict") {
  SUBCASE("999 ms") {
    const auto s = segment_keystrokes({letter("a", 0, 50), letter("b", 999, 1050)});
    REQUIRE(s.size() == 1);
    CHECK(spell(s[0]) == "ab");
  }
  SUBCASE("1000 ms stays in one set") {
    const auto s = segment_keystrokes({letter("a", 0, 50), letter("b", 1000, 1050)});
    REQUIRE(s.size() == 1);
    CHECK(spell(s[0]) == "ab");
  }
  SUBCASE("1001 ms starts a new set") {
    const auto s = segment_keystrokes({letter("a", 0, 50), letter("b", 1001, 1050)});
    REQUIRE(s.size() == 2);
    CHECK(spell(s[0]) == "a");
    CHECK(spell(s[1]) == "b");
  }
  SUBCASE("gap measured between function key and letter too") {
    // Shift at 500 bridges nothing: a->Shift is 500, Shift->b is 1001.
    const auto s = segment_keystrokes({letter("a", 0, 50), named("Shift", 500, 1600), letter("b", 1501, 1550)});
    REQUIRE(s.size() == 2);
  }
  SUBCASE("a dropped function key does not bridge a long letter gap") {
    // a->Shift 600, Shift->B 600: no raw boundary, but a and B are 1200 apart.
    const auto s = segment_keystrokes({letter("a", 0, 50), named("Shift", 600, 1300), letter("B", 1200, 1250)});
    REQUIRE(s.size() == 2);
    CHECK(spell(s[0]) == "a");
    CHECK(spell(s[1]) == "B");
  }
  SUBCASE("a function key between letters 1000 ms apart keeps one set") {
    const auto s = segment_keystrokes({letter("a", 0, 50), named("Shift", 600, 1100), letter("B", 1000, 1050)});
    REQUIRE(s.size() == 1);
  }
}

TEST_CASE("space and long gap together produce one boundary") {
  const auto s = segment_keystrokes({letter("a", 0, 50), space(100, 150), letter("b", 5000, 5050)});
  REQUIRE(s.size() == 2);
  CHECK(spell(s[0]) == "a");
  CHECK(spell(s[1]) == "b");
}

TEST_CASE("leading, trailing and repeated spaces leave no empty sets") {
  const auto s = segment_keystrokes(
      {space(0, 10), space(50, 60), letter("a", 100, 150), space(200, 210), space(250, 260), letter("b", 300, 350),
       space(400, 410)});
  REQUIRE(s.size() == 2);
  CHECK(spell(s[0]) == "a");
  CHECK(spell(s[1]) == "b");
}

TEST_CASE("stream of only function keys yields nothing") {
  CHECK(segment_keystrokes({named("Shift", 0, 10), named("Control", 20, 30), named("Enter", 40, 50)}).empty());
}

TEST_CASE("unsorted input is stable-sorted by down_ms") {
  auto b = letter("b", 100, 150);
  auto a = letter("a", 0, 50);
  auto a2 = letter("c", 100, 160);  // ties with b, keeps input order after b
  const auto s = segment_keystrokes({b, a, a2});
  REQUIRE(s.size() == 1);
  CHECK(spell(s[0]) == "abc");
}

TEST_CASE("bigraphs of The") {
  KeystrokeSegment the{{letter("T", 0, 90), letter("h", 120, 200), letter("e", 260, 330)}};
  const auto bigraphs = extract_bigraphs(the);
  REQUIRE(bigraphs.size() == 2);
  CHECK(bigraphs[0].first_key == "T");
  CHECK(bigraphs[0].second_key == "h");
  CHECK(bigraphs[1].first_key == "h");
  CHECK(bigraphs[1].second_key == "e");
  CHECK(bigraphs[1].down1_ms == 120);
  CHECK(bigraphs[1].up1_ms == 200);
  CHECK(bigraphs[1].down2_ms == 260);
  CHECK(bigraphs[1].up2_ms == 330);
}

TEST_CASE("single letter has no bigraphs") {
  CHECK(extract_bigraphs(KeystrokeSegment{{letter("a", 0, 10)}}).empty());
  CHECK(extract_bigraphs(KeystrokeSegment{}).empty());
}

TEST_CASE("four-letter segment intervals match hand computation") {
  // Values computed independently (python) from T(1000,1090) e(1150,1230)
  // x(1210,1300) t(1400,1460); e->x is a rollover.
  KeystrokeSegment text{{letter("T", 1000, 1090), letter("e", 1150, 1230), letter("x", 1210, 1300),
                         letter("t", 1400, 1460)}};
  const auto b = extract_bigraphs(text);
  REQUIRE(b.size() == 3);
  struct Expected {
    std::int64_t dwell1, dwell2, flight, dd;
  };
  const Expected expected[] = {{90, 80, 60, 150}, {80, 90, -20, 60}, {90, 60, 100, 190}};
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(b[i].dwell1_ms == expected[i].dwell1);
    CHECK(b[i].dwell2_ms == expected[i].dwell2);
    CHECK(b[i].flight_ms == expected[i].flight);
    CHECK(b[i].dd_ms == expected[i].dd);
  }
}

TEST_CASE("property: partition, boundary and bigraph invariants over random streams") {
  Rng rng(1234);
  for (int run = 0; run < 1000; ++run) {
    const auto stream = collector::testing::random_keystroke_stream(rng, 60);
    const auto segments = segment_keystrokes(stream);

    // Agreement with the set-numbering oracle.
    const auto expected = collector::testing::oracle_segments(stream);
    REQUIRE(segments.size() == expected.size());
    for (std::size_t i = 0; i < segments.size(); ++i) CHECK(segments[i].letters == expected[i]);

    // Partition: concatenation equals the sorted stream minus spaces/function keys.
    auto sorted = stream;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.down_ms < b.down_ms; });
    std::vector<KeystrokeRecord> kept;
    for (const auto& k : sorted) {
      if (!is_space_key(k) && !is_function_key(k)) kept.push_back(k);
    }
    std::vector<KeystrokeRecord> concatenated;
    for (const auto& s : segments) {
      CHECK_FALSE(s.letters.empty());
      concatenated.insert(concatenated.end(), s.letters.begin(), s.letters.end());
    }
    CHECK(concatenated == kept);

    // Boundaries: inside a set no gap exceeds 1 s; between sets the
    // unfiltered stream shows a long gap or a space, or the letters
    // themselves are more than 1 s apart.
    std::size_t position = 0;  // index into `sorted`
    std::optional<std::size_t> last_of_previous;
    for (const auto& s : segments) {
      for (std::size_t i = 1; i < s.letters.size(); ++i) {
        CHECK(s.letters[i].down_ms - s.letters[i - 1].down_ms <= kSegmentGapMs);
      }
      while (!(sorted[position] == s.letters.front())) ++position;
      const std::size_t first = position;
      if (last_of_previous) {
        bool separated = s.letters.front().down_ms - sorted[*last_of_previous].down_ms > kSegmentGapMs;
        for (std::size_t i = *last_of_previous + 1; i <= first; ++i) {
          separated = separated || sorted[i].down_ms - sorted[i - 1].down_ms > kSegmentGapMs || is_space_key(sorted[i - 1]);
        }
        CHECK(separated);
      }
      while (!(sorted[position] == s.letters.back())) ++position;
      last_of_previous = position;
    }

    for (const auto& s : segments) {
      const auto bigraphs = extract_bigraphs(s);
      CHECK(bigraphs.size() == (s.letters.size() < 2 ? 0 : s.letters.size() - 1));
      for (const auto& b : bigraphs) {
        CHECK(b.dwell1_ms == b.up1_ms - b.down1_ms);
        CHECK(b.dwell2_ms == b.up2_ms - b.down2_ms);
        CHECK(b.flight_ms == b.down2_ms - b.up1_ms);
        CHECK(b.dd_ms == b.down2_ms - b.down1_ms);
        CHECK(b.dwell1_ms >= 0);
        CHECK(b.dwell2_ms >= 0);
        CHECK(b.dd_ms >= 0);
      }
    }
  }
}

TEST_CASE("3-4-5 pair gives exactly 50 px/s") {
  const std::vector<MouseRecord> events = {{MouseAction::kMove, 0, 0, 0}, {MouseAction::kMove, 3, 4, 100}};
  const auto result = mouse_speeds(events);
  REQUIRE(result.features.size() == 1);
  CHECK(result.features[0].distance_px == 5.0);
  CHECK(result.features[0].elapsed_ms == 100);
  CHECK(result.features[0].speed_px_per_s == 50.0);
  CHECK(result.features[0].type_pair == ActionPair{MouseAction::kMove, MouseAction::kMove});
}

TEST_CASE("stationary pointer has zero speed") {
  const std::vector<MouseRecord> events = {{MouseAction::kLeftDown, 40, 40, 0}, {MouseAction::kLeftUp, 40, 40, 50}};
  const auto result = mouse_speeds(events);
  REQUIRE(result.features.size() == 1);
  CHECK(result.features[0].distance_px == 0.0);
  CHECK(result.features[0].speed_px_per_s == 0.0);
  CHECK(result.features[0].type_pair == ActionPair{MouseAction::kLeftDown, MouseAction::kLeftUp});
}

TEST_CASE("non-positive elapsed pairs are skipped and counted") {
  const std::vector<MouseRecord> events = {{MouseAction::kMove, 0, 0, 10},
                                           {MouseAction::kMove, 5, 0, 10},
                                           {MouseAction::kMove, 9, 3, 5},
                                           {MouseAction::kMove, 9, 3, 15}};
  const auto result = mouse_speeds(events);
  CHECK(result.skipped_pairs == 2);
  REQUIRE(result.features.size() == 1);
  CHECK(result.features[0].elapsed_ms == 10);
  CHECK(mouse_speeds(std::vector<MouseRecord>{}).features.empty());
  CHECK(mouse_speeds(std::vector<MouseRecord>{{MouseAction::kMove, 1, 1, 1}}).features.empty());
}

TEST_CASE("property: mouse speeds agree with the brute-force oracle") {
  Rng rng(99);
  for (int run = 0; run < 100; ++run) {
    const auto stream = collector::testing::random_mouse_stream(rng, 1000);
    std::size_t oracle_skipped = 0;
    const auto expected = collector::testing::brute_force_speeds(stream, oracle_skipped);
    const auto actual = mouse_speeds(stream);
    REQUIRE(actual.features.size() == expected.size());
    CHECK(actual.skipped_pairs == oracle_skipped);
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const auto& a = actual.features[i];
      const auto& e = expected[i];
      CHECK(a.type_pair == ActionPair{e.from, e.to});
      CHECK(a.elapsed_ms == e.elapsed);
      CHECK(std::abs(a.distance_px - e.distance) <= 1e-9 * std::max(1.0, e.distance));
      CHECK(std::abs(a.speed_px_per_s - e.speed) <= 1e-9 * std::max(1.0, e.speed));
      CHECK(a.speed_px_per_s >= 0.0);
      CHECK((a.speed_px_per_s == 0.0) == (a.distance_px == 0.0));
    }
  }
}

TEST_CASE("property: scaling coordinates scales distance and speed") {
  Rng rng(5);
  for (int run = 0; run < 50; ++run) {
    auto stream = collector::testing::random_mouse_stream(rng, 300);
    const std::int64_t k = collector::testing::uniform(rng, 2, 50);
    auto scaled = stream;
    for (auto& e : scaled) {
      e.x *= k;
      e.y *= k;
    }
    const auto base = mouse_speeds(stream);
    const auto big = mouse_speeds(scaled);
    REQUIRE(base.features.size() == big.features.size());
    for (std::size_t i = 0; i < base.features.size(); ++i) {
      const double kd = static_cast<double>(k);
      CHECK(std::abs(big.features[i].distance_px - kd * base.features[i].distance_px) <=
            1e-9 * std::max(1.0, kd * base.features[i].distance_px));
      CHECK(std::abs(big.features[i].speed_px_per_s - kd * base.features[i].speed_px_per_s) <=
            1e-9 * std::max(1.0, kd * base.features[i].speed_px_per_s));
    }
  }
}

TEST_CASE("speed profile") {
  SUBCASE("empty") { CHECK(speed_profile({}).empty()); }
  SUBCASE("single pair type") {
    std::vector<MouseSpeedFeature> features(7, MouseSpeedFeature{{MouseAction::kMove, MouseAction::kMove}, 1.0, 10, 100.0});
    const auto profile = speed_profile(features);
    REQUIRE(profile.size() == 1);
    CHECK(profile.begin()->second.count == 7);
    CHECK(profile.begin()->second.mean == doctest::Approx(100.0));
  }
  SUBCASE("mixed three pair types match hand computation") {
    // move(0,0)@0 move(30,40)@100 move(30,40)@150 left_down(36,48)@200 left_up(36,48)@250
    const std::vector<MouseRecord> events = {{MouseAction::kMove, 0, 0, 0},
                                             {MouseAction::kMove, 30, 40, 100},
                                             {MouseAction::kMove, 30, 40, 150},
                                             {MouseAction::kLeftDown, 36, 48, 200},
                                             {MouseAction::kLeftUp, 36, 48, 250}};
    const auto profile = speed_profile(mouse_speeds(events).features);
    REQUIRE(profile.size() == 3);
    const auto& mm = profile.at({MouseAction::kMove, MouseAction::kMove});
    CHECK(mm.count == 2);
    CHECK(mm.mean == doctest::Approx(250.0).epsilon(1e-12));
    CHECK(mm.min == 0.0);
    CHECK(mm.max == doctest::Approx(500.0).epsilon(1e-12));
    const auto& md = profile.at({MouseAction::kMove, MouseAction::kLeftDown});
    CHECK(md.count == 1);
    CHECK(md.mean == doctest::Approx(200.0).epsilon(1e-12));
    const auto& du = profile.at({MouseAction::kLeftDown, MouseAction::kLeftUp});
    CHECK(du.count == 1);
    CHECK(du.mean == 0.0);
  }
}
