#include <doctest.h>

#include <sstream>

#include "phase/codec.hpp"
#include "phase/rng.hpp"

using namespace phase;

namespace {

// two-row day: one row of real values, one all-missing
std::vector<DaySequence> tiny_dataset() {
  DaySequence seq;
  seq.entity = "10.0.0.1";
  seq.date = "2025-03-03";
  seq.label = 1;
  MinuteRow row;
  row[0] = std::string("44321");  // orig_port
  row[1] = std::string("443");    // resp_port
  row[2] = std::string("udp");    // proto
  row[4] = std::string("SF");     // conn_state
  row[5] = std::string("T");
  row[6] = std::string("F");
  row[8] = 2.5;        // duration
  row[15] = 100.0;     // resp_pkts
  row[16] = 3.0;       // norm_vol
  MinuteRow row2;
  row2[2] = std::string("tcp");
  row2[15] = 247192000.0;
  row2[16] = 1.0;
  seq.rows = {row, row2, MinuteRow{}};  // third row all missing
  return {seq};
}

}  // namespace

TEST_CASE("vocabularies number tokens lexicographically, ports numerically") {
  auto codec = FeatureCodec::fit(tiny_dataset());
  CHECK(codec.vocabulary(2) == std::vector<std::string>{"tcp", "udp"});
  // numeric port ordering: 443 before 44321 despite lexicographic order
  CHECK(codec.vocabulary(1) == std::vector<std::string>{"443"});
  DaySequence two_ports = tiny_dataset()[0];
  two_ports.rows[1][1] = std::string("80");
  auto codec2 = FeatureCodec::fit({two_ports});
  CHECK(codec2.vocabulary(1) == std::vector<std::string>{"80", "443"});
}

TEST_CASE("scaling contract: [-1, 247192000] maps to [0, 1] exactly") {
  auto codec = FeatureCodec::fit(tiny_dataset());
  // missing cells fill with -1, so the fitted min is -1
  CHECK(codec.range_min(15) == -1.0);
  CHECK(codec.range_max(15) == 247192000.0);
  CHECK(codec.scale(15, -1.0) == 0.0);
  CHECK(codec.scale(15, 247192000.0) == 1.0);
}

TEST_CASE("mid-range scaling matches the direct formula") {
  auto codec = FeatureCodec::fit(tiny_dataset());
  const double x = 12345678.0;
  const double expected = (x - codec.range_min(15)) / (codec.range_max(15) - codec.range_min(15));
  CHECK(codec.scale(15, x) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("degenerate features scale to zero") {
  auto data = tiny_dataset();
  // norm_vol is present twice with different values; force a constant feature
  data[0].rows[0][16] = 5.0;
  data[0].rows[1][16] = 5.0;
  data[0].rows.resize(2);  // no missing rows -> min == max == 5
  auto codec = FeatureCodec::fit(data);
  CHECK(codec.range_min(16) == 5.0);
  CHECK(codec.range_max(16) == 5.0);
  CHECK(codec.scale(16, 5.0) == 0.0);
  CHECK(codec.scale(16, 123.0) == 0.0);
}

TEST_CASE("transform output stays in [0,1] and missing maps through -1") {
  auto data = tiny_dataset();
  auto codec = FeatureCodec::fit(data);
  auto m = codec.transform(data[0]);
  REQUIRE(m.shape == std::vector<std::size_t>{3, kFeatureCount});
  for (double v : m.data) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  // all-missing row encodes the -1 sentinel, scaled to the bottom of range
  for (std::size_t f = 0; f < kFeatureCount; ++f) CHECK(m(2, f) == codec.scale(f, -1.0));
}

TEST_CASE("unseen tokens map to the missing sentinel, never abort") {
  auto data = tiny_dataset();
  auto codec = FeatureCodec::fit(data);
  DaySequence probe = data[0];
  probe.rows[0][2] = std::string("icmp");  // unseen at fit time
  auto m = codec.transform(probe);
  CHECK(m(0, 2) == codec.scale(2, -1.0));
}

TEST_CASE("fit is invariant to sequence order") {
  auto data = tiny_dataset();
  DaySequence second = data[0];
  second.entity = "10.0.0.2";
  second.rows[0][2] = std::string("icmp");
  std::vector<DaySequence> forward = {data[0], second};
  std::vector<DaySequence> reversed = {second, data[0]};
  auto a = FeatureCodec::fit(forward);
  auto b = FeatureCodec::fit(reversed);
  CHECK(a == b);
}

TEST_CASE("transform rejects mismatched row counts") {
  auto data = tiny_dataset();
  auto codec = FeatureCodec::fit(data);
  DaySequence wrong = data[0];
  wrong.rows.push_back(MinuteRow{});
  CHECK_THROWS_AS(codec.transform(wrong), PhaseError);
}

TEST_CASE("empty input is an error") {
  CHECK_THROWS_AS(FeatureCodec::fit({}), PhaseError);
}

TEST_CASE("save/load round trip preserves transforms bit for bit") {
  auto data = tiny_dataset();
  auto codec = FeatureCodec::fit(data);
  std::ostringstream out;
  codec.save(out);
  std::istringstream in(out.str());
  auto loaded = FeatureCodec::load(in);
  CHECK(loaded == codec);

  auto before = codec.transform(data[0]);
  auto after = loaded.transform(data[0]);
  CHECK(before == after);

  // serialization is byte-stable
  std::ostringstream out2;
  loaded.save(out2);
  CHECK(out.str() == out2.str());
}

TEST_CASE("version gate rejects tampered files") {
  auto codec = FeatureCodec::fit(tiny_dataset());
  std::ostringstream out;
  codec.save(out);
  auto text = out.str();
  auto pos = text.find("\"version\": 1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 12, "\"version\": 9");
  std::istringstream in(text);
  CHECK_THROWS_AS(FeatureCodec::load(in), PhaseError);
}

TEST_CASE("empty-vocabulary feature survives the round trip") {
  auto data = tiny_dataset();
  // history (index 7) never appears in the fixture
  auto codec = FeatureCodec::fit(data);
  CHECK(codec.vocabulary(7).empty());
  std::ostringstream out;
  codec.save(out);
  std::istringstream in(out.str());
  auto loaded = FeatureCodec::load(in);
  CHECK(loaded.vocabulary(7).empty());
  CHECK(loaded == codec);
}

TEST_CASE("inverse translation recovers tokens and the -1 sentinel") {
  auto codec = FeatureCodec::fit(tiny_dataset());
  CHECK(codec.translate(15, 0.0) == "-1");  // encoded 0 recovers the -1 sentinel
  CHECK(codec.translate(2, codec.scale(2, 0.0)) == "tcp");
  CHECK(codec.translate(2, codec.scale(2, 1.0)) == "udp");
  CHECK(codec.translate(2, 0.0) == "-1");  // encoded bottom = missing
}
