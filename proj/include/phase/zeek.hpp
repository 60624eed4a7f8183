#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phase/common.hpp"

namespace phase {

// One validated Zeek conn.log entry. Only the modeled fields are kept;
// uid and any other columns are parsed and dropped.
struct ConnRecord {
  double ts = 0.0;  // seconds since epoch
  std::string orig_addr;
  std::string resp_addr;
  int orig_port = 0;
  int resp_port = 0;
  std::string proto;
  std::optional<std::string> service;
  std::optional<double> duration;
  std::optional<std::uint64_t> orig_bytes;
  std::optional<std::uint64_t> resp_bytes;
  std::string conn_state;
  Ternary local_orig = Ternary::Unset;
  Ternary local_resp = Ternary::Unset;
  std::uint64_t missed_bytes = 0;
  std::optional<std::string> history;
  std::uint64_t orig_pkts = 0;
  std::uint64_t orig_ip_bytes = 0;
  std::uint64_t resp_pkts = 0;
  std::uint64_t resp_ip_bytes = 0;

  bool operator==(const ConnRecord&) const = default;
};

struct ParseIssue {
  std::size_t line = 0;
  std::string message;
};

struct ParseResult {
  std::vector<ConnRecord> records;
  std::vector<ParseIssue> issues;  // skipped data lines, order preserved
};

// Zeek TSV with '#separator' / '#fields' / '#types' directives. A missing or
// malformed directive header is fatal; bad data lines are collected and
// skipped.
ParseResult parse_tsv(std::istream& in);

// JSON-lines with Zeek key names ("id.orig_p", ...). Unknown keys ignored,
// invalid lines collected and skipped.
ParseResult parse_json_lines(std::istream& in);

// Canonical JSON-lines dump: one object per record, keys sorted, unset
// optionals omitted. parse_json_lines(dump(r)) == r.
std::string record_to_json(const ConnRecord& r);
void write_json_lines(const std::vector<ConnRecord>& records, std::ostream& out);

// Zeek-style TSV emitter for the modeled field set.
void write_tsv(const std::vector<ConnRecord>& records, std::ostream& out);

struct PseudonymKey {
  std::array<std::uint8_t, 32> key{};
  std::vector<std::uint8_t> salt;

  static PseudonymKey from_hex(std::string_view key_hex, std::string_view salt);
};

// Deterministic keyed address rewriting (HMAC-SHA256, truncated hex output).
// Same (key, address) always maps to the same pseudonym; distinct addresses
// get distinct pseudonyms. Returns the address -> pseudonym table.
std::map<std::string, std::string> pseudonymize(std::vector<ConnRecord>& records,
                                                const PseudonymKey& key);

}  // namespace phase
