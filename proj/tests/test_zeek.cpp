#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "phase/zeek.hpp"

using namespace phase;

namespace {

ParseResult parse_fixture_tsv() {
  std::ifstream in(PHASE_FIXTURES_DIR "/conn10.log");
  REQUIRE(in.good());
  return parse_tsv(in);
}

ParseResult parse_fixture_jsonl() {
  std::ifstream in(PHASE_FIXTURES_DIR "/conn10.jsonl");
  REQUIRE(in.good());
  return parse_json_lines(in);
}

}  // namespace

TEST_CASE("tsv fixture parses cleanly") {
  auto result = parse_fixture_tsv();
  CHECK(result.records.size() == 10);
  CHECK(result.issues.empty());

  const auto& r0 = result.records[0];
  CHECK(r0.ts == doctest::Approx(1700000000.5));
  CHECK(r0.orig_addr == "10.0.0.1");
  CHECK(r0.resp_port == 443);
  CHECK(r0.proto == "tcp");
  CHECK(r0.service.value() == "ssl");
  CHECK(r0.local_orig == Ternary::True);
  CHECK(r0.resp_pkts == 74);

  // '-' cells stay unset
  const auto& r2 = result.records[2];
  CHECK_FALSE(r2.duration.has_value());
  CHECK_FALSE(r2.orig_bytes.has_value());
  CHECK_FALSE(r2.resp_bytes.has_value());
  CHECK(r2.conn_state == "S0");

  // '(empty)' maps to an empty string, not unset
  const auto& r7 = result.records[7];
  CHECK(r7.service.has_value());
  CHECK(r7.service->empty());

  // unset bool column is the third state
  CHECK(result.records[5].local_orig == Ternary::Unset);
  CHECK(result.records[5].local_resp == Ternary::Unset);
}

TEST_CASE("tsv and json-lines parsers agree on equivalent content") {
  auto tsv = parse_fixture_tsv();
  auto jsonl = parse_fixture_jsonl();
  REQUIRE(tsv.records.size() == jsonl.records.size());
  for (std::size_t i = 0; i < tsv.records.size(); ++i) CHECK(tsv.records[i] == jsonl.records[i]);
}

TEST_CASE("record order is preserved") {
  auto result = parse_fixture_tsv();
  for (std::size_t i = 1; i < result.records.size(); ++i)
    CHECK(result.records[i - 1].ts <= result.records[i].ts);
}

TEST_CASE("json-lines round trip is lossless") {
  auto original = parse_fixture_tsv();
  std::ostringstream dump;
  write_json_lines(original.records, dump);
  std::istringstream in(dump.str());
  auto reparsed = parse_json_lines(in);
  CHECK(reparsed.issues.empty());
  REQUIRE(reparsed.records.size() == original.records.size());
  for (std::size_t i = 0; i < original.records.size(); ++i)
    CHECK(reparsed.records[i] == original.records[i]);

  // dumping again gives identical bytes
  std::ostringstream dump2;
  write_json_lines(reparsed.records, dump2);
  CHECK(dump.str() == dump2.str());
}

TEST_CASE("tsv round trip through the emitter") {
  auto original = parse_fixture_tsv();
  std::ostringstream tsv_out;
  write_tsv(original.records, tsv_out);
  std::istringstream in(tsv_out.str());
  auto reparsed = parse_tsv(in);
  CHECK(reparsed.issues.empty());
  REQUIRE(reparsed.records.size() == original.records.size());
  for (std::size_t i = 0; i < original.records.size(); ++i)
    CHECK(reparsed.records[i] == original.records[i]);
}

TEST_CASE("bad data lines are collected, not fatal") {
  std::istringstream in(
      "#separator \\x09\n"
      "#fields\tts\tid.orig_h\tid.orig_p\tid.resp_h\tid.resp_p\tproto\tconn_state\n"
      "1.5\ta\t1\tb\t2\ttcp\tSF\n"
      "2.5\ta\t1\tb\ttcp\tSF\n"                       // wrong column count
      "3.5\ta\t99999\tb\t2\ttcp\tSF\n"                // port out of range
      "bogus\ta\t1\tb\t2\ttcp\tSF\n"                  // bad timestamp
      "4.5\ta\t1\tb\t2\ttcp\tSF\n");
  auto result = parse_tsv(in);
  CHECK(result.records.size() == 2);
  REQUIRE(result.issues.size() == 3);
  CHECK(result.issues[0].line == 4);
  CHECK(result.issues[1].line == 5);
  CHECK(result.issues[2].line == 6);
}

TEST_CASE("missing #fields directive is fatal") {
  std::istringstream no_fields("#separator \\x09\n");
  CHECK_THROWS_AS(parse_tsv(no_fields), PhaseError);

  std::istringstream data_first("1.5\ta\t1\tb\t2\ttcp\tSF\n");
  CHECK_THROWS_AS(parse_tsv(data_first), PhaseError);
}

TEST_CASE("invalid json lines are collected") {
  std::istringstream in(
      "{\"ts\":1.0,\"id.orig_h\":\"a\",\"id.orig_p\":443,\"id.resp_h\":\"b\","
      "\"id.resp_p\":1,\"proto\":\"tcp\",\"conn_state\":\"SF\"}\n"
      "not json at all\n"
      "{\"ts\":2.0}\n");
  auto result = parse_json_lines(in);
  CHECK(result.records.size() == 1);
  CHECK(result.records[0].orig_port == 443);
  CHECK(result.records[0].missed_bytes == 0);
  CHECK_FALSE(result.records[0].duration.has_value());
  CHECK(result.issues.size() == 2);
}

TEST_CASE("pseudonymization is a deterministic injection") {
  auto key = PseudonymKey::from_hex(std::string(64, 'a'), "salt");
  auto records = parse_fixture_tsv().records;
  auto original = records;

  auto table = pseudonymize(records, key);

  // same address -> same pseudonym, applied consistently
  REQUIRE(records.size() == original.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].orig_addr == table.at(original[i].orig_addr));
    CHECK(records[i].resp_addr == table.at(original[i].resp_addr));
    // every non-address field is untouched
    ConnRecord masked = records[i];
    masked.orig_addr = original[i].orig_addr;
    masked.resp_addr = original[i].resp_addr;
    CHECK(masked == original[i]);
  }

  // distinct addresses -> distinct pseudonyms
  std::set<std::string> pseudonyms;
  for (const auto& [addr, pseud] : table) pseudonyms.insert(pseud);
  CHECK(pseudonyms.size() == table.size());

  // run-twice oracle
  auto records2 = original;
  auto table2 = pseudonymize(records2, key);
  CHECK(table == table2);
  for (std::size_t i = 0; i < records.size(); ++i) CHECK(records[i] == records2[i]);

  // a different key gives a different mapping
  auto other_key = PseudonymKey::from_hex(std::string(64, 'b'), "salt");
  auto records3 = original;
  auto table3 = pseudonymize(records3, other_key);
  CHECK(table != table3);
}

TEST_CASE("pseudonym key validation") {
  CHECK_THROWS_AS(PseudonymKey::from_hex("abc", ""), PhaseError);
  CHECK_THROWS_AS(PseudonymKey::from_hex(std::string(64, 'z'), ""), PhaseError);
}
