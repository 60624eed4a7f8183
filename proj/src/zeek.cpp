#include "phase/zeek.hpp"

#include <openssl/hmac.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace phase {

namespace {

using json = nlohmann::ordered_json;

constexpr std::string_view kUnset = "-";

bool parse_double(std::string_view s, double& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && std::isfinite(out);
}

bool parse_u64(std::string_view s, std::uint64_t& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_port(std::string_view s, int& out) {
  std::uint64_t v = 0;
  if (!parse_u64(s, v) || v > 65535) return false;
  out = static_cast<int>(v);
  return true;
}

// Field setters shared by the TSV and JSON parsers. Returns false on a
// value that fails validation.
struct RecordBuilder {
  ConnRecord rec;
  bool has_ts = false, has_orig_addr = false, has_resp_addr = false;
  bool has_orig_port = false, has_resp_port = false;
  bool has_proto = false, has_conn_state = false;
  std::string error;

  bool set(std::string_view field, std::string_view value) {
    if (value == kUnset) return true;  // unset sentinel: leave field absent
    if (field == "ts") {
      if (!parse_double(value, rec.ts) || rec.ts <= 0.0) return fail(field, value);
      has_ts = true;
    } else if (field == "id.orig_h") {
      rec.orig_addr = value;
      has_orig_addr = !rec.orig_addr.empty();
    } else if (field == "id.resp_h") {
      rec.resp_addr = value;
      has_resp_addr = !rec.resp_addr.empty();
    } else if (field == "id.orig_p") {
      if (!parse_port(value, rec.orig_port)) return fail(field, value);
      has_orig_port = true;
    } else if (field == "id.resp_p") {
      if (!parse_port(value, rec.resp_port)) return fail(field, value);
      has_resp_port = true;
    } else if (field == "proto") {
      rec.proto = value;
      has_proto = true;
    } else if (field == "service") {
      rec.service = std::string(value);
    } else if (field == "duration") {
      double d = 0;
      if (!parse_double(value, d) || d < 0.0) return fail(field, value);
      rec.duration = d;
    } else if (field == "orig_bytes") {
      std::uint64_t v = 0;
      if (!parse_u64(value, v)) return fail(field, value);
      rec.orig_bytes = v;
    } else if (field == "resp_bytes") {
      std::uint64_t v = 0;
      if (!parse_u64(value, v)) return fail(field, value);
      rec.resp_bytes = v;
    } else if (field == "conn_state") {
      rec.conn_state = value;
      has_conn_state = true;
    } else if (field == "local_orig") {
      if (value == "T") rec.local_orig = Ternary::True;
      else if (value == "F") rec.local_orig = Ternary::False;
      else return fail(field, value);
    } else if (field == "local_resp") {
      if (value == "T") rec.local_resp = Ternary::True;
      else if (value == "F") rec.local_resp = Ternary::False;
      else return fail(field, value);
    } else if (field == "missed_bytes") {
      if (!parse_u64(value, rec.missed_bytes)) return fail(field, value);
    } else if (field == "history") {
      rec.history = std::string(value);
    } else if (field == "orig_pkts") {
      if (!parse_u64(value, rec.orig_pkts)) return fail(field, value);
    } else if (field == "orig_ip_bytes") {
      if (!parse_u64(value, rec.orig_ip_bytes)) return fail(field, value);
    } else if (field == "resp_pkts") {
      if (!parse_u64(value, rec.resp_pkts)) return fail(field, value);
    } else if (field == "resp_ip_bytes") {
      if (!parse_u64(value, rec.resp_ip_bytes)) return fail(field, value);
    }
    // unknown fields (uid, tunnel_parents, ...) are dropped
    return true;
  }

  bool fail(std::string_view field, std::string_view value) {
    error = "bad value '" + std::string(value) + "' for field '" + std::string(field) + "'";
    return false;
  }

  bool finish() {
    if (!has_ts) return missing("ts");
    if (!has_orig_addr) return missing("id.orig_h");
    if (!has_resp_addr) return missing("id.resp_h");
    if (!has_orig_port) return missing("id.orig_p");
    if (!has_resp_port) return missing("id.resp_p");
    if (!has_proto) return missing("proto");
    if (!has_conn_state) return missing("conn_state");
    return true;
  }

  bool missing(std::string_view field) {
    error = "required field '" + std::string(field) + "' is missing or unset";
    return false;
  }
};

char decode_separator(std::string_view spec) {
  if (spec.size() == 4 && spec.substr(0, 2) == "\\x") {
    unsigned value = 0;
    if (std::sscanf(std::string(spec.substr(2)).c_str(), "%2x", &value) == 1)
      return static_cast<char>(value);
  }
  if (spec.size() == 1) return spec[0];
  fail_data("unsupported #separator directive: '" + std::string(spec) + "'");
}

}  // namespace

ParseResult parse_tsv(std::istream& in) {
  ParseResult result;
  char sep = '\t';
  std::string unset = "-";
  std::string empty = "(empty)";
  std::vector<std::string> fields;
  bool saw_fields = false;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto body = std::string_view(line).substr(1);
      if (body.rfind("separator", 0) == 0) {
        auto rest = trim_view(body.substr(9));
        sep = decode_separator(rest);
      } else if (body.rfind("unset_field", 0) == 0) {
        unset = std::string(trim_view(body.substr(11)));
      } else if (body.rfind("empty_field", 0) == 0) {
        empty = std::string(trim_view(body.substr(11)));
      } else if (body.rfind("fields", 0) == 0) {
        auto rest = body.substr(6);
        if (rest.empty() || rest[0] != sep)
          fail_data("malformed #fields directive at line " + std::to_string(lineno));
        fields.clear();
        for (auto f : split_view(rest.substr(1), sep)) fields.emplace_back(f);
        if (fields.empty())
          fail_data("empty #fields directive at line " + std::to_string(lineno));
        saw_fields = true;
      }
      // #types, #open, #close, #path, #set_separator: no action needed
      continue;
    }
    if (!saw_fields)
      fail_data("data before #fields directive at line " + std::to_string(lineno));

    auto cells = split_view(line, sep);
    if (cells.size() != fields.size()) {
      result.issues.push_back({lineno, "expected " + std::to_string(fields.size()) +
                                           " columns, got " + std::to_string(cells.size())});
      continue;
    }
    RecordBuilder b;
    bool ok = true;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      std::string_view value = cells[i];
      if (value == unset) value = kUnset;
      else if (value == empty) value = "";
      if (!b.set(fields[i], value)) {
        ok = false;
        break;
      }
    }
    if (ok && !b.finish()) ok = false;
    if (!ok) {
      result.issues.push_back({lineno, b.error});
      continue;
    }
    result.records.push_back(std::move(b.rec));
  }
  if (!saw_fields) fail_data("missing #fields directive in TSV header");
  return result;
}

ParseResult parse_json_lines(std::istream& in) {
  ParseResult result;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto trimmed = trim_view(line);
    if (trimmed.empty()) continue;
    json obj = json::parse(trimmed, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      result.issues.push_back({lineno, "invalid JSON object"});
      continue;
    }
    RecordBuilder b;
    bool ok = true;
    for (auto& [key, value] : obj.items()) {
      std::string text;
      if (value.is_string()) {
        text = value.get<std::string>();
      } else if (value.is_boolean()) {
        text = value.get<bool>() ? "T" : "F";
      } else if (value.is_number_unsigned()) {
        text = std::to_string(value.get<std::uint64_t>());
      } else if (value.is_number_integer()) {
        text = std::to_string(value.get<std::int64_t>());
      } else if (value.is_number_float()) {
        text = format_double(value.get<double>());
      } else if (value.is_null()) {
        continue;  // null == unset
      } else {
        continue;  // arrays/objects are not modeled fields
      }
      if (!b.set(key, text)) {
        ok = false;
        break;
      }
    }
    if (ok && !b.finish()) ok = false;
    if (!ok) {
      result.issues.push_back({lineno, b.error});
      continue;
    }
    result.records.push_back(std::move(b.rec));
  }
  return result;
}

std::string record_to_json(const ConnRecord& r) {
  nlohmann::json obj;  // std::map-backed: keys serialize sorted
  obj["ts"] = r.ts;
  obj["id.orig_h"] = r.orig_addr;
  obj["id.resp_h"] = r.resp_addr;
  obj["id.orig_p"] = r.orig_port;
  obj["id.resp_p"] = r.resp_port;
  obj["proto"] = r.proto;
  if (r.service) obj["service"] = *r.service;
  if (r.duration) obj["duration"] = *r.duration;
  if (r.orig_bytes) obj["orig_bytes"] = *r.orig_bytes;
  if (r.resp_bytes) obj["resp_bytes"] = *r.resp_bytes;
  obj["conn_state"] = r.conn_state;
  if (r.local_orig != Ternary::Unset) obj["local_orig"] = r.local_orig == Ternary::True;
  if (r.local_resp != Ternary::Unset) obj["local_resp"] = r.local_resp == Ternary::True;
  obj["missed_bytes"] = r.missed_bytes;
  if (r.history) obj["history"] = *r.history;
  obj["orig_pkts"] = r.orig_pkts;
  obj["orig_ip_bytes"] = r.orig_ip_bytes;
  obj["resp_pkts"] = r.resp_pkts;
  obj["resp_ip_bytes"] = r.resp_ip_bytes;
  return obj.dump();
}

void write_json_lines(const std::vector<ConnRecord>& records, std::ostream& out) {
  for (const auto& r : records) out << record_to_json(r) << '\n';
}

void write_tsv(const std::vector<ConnRecord>& records, std::ostream& out) {
  static constexpr std::string_view header =
      "#separator \\x09\n"
      "#set_separator\t,\n"
      "#empty_field\t(empty)\n"
      "#unset_field\t-\n"
      "#path\tconn\n"
      "#fields\tts\tid.orig_h\tid.orig_p\tid.resp_h\tid.resp_p\tproto\tservice\tduration\t"
      "orig_bytes\tresp_bytes\tconn_state\tlocal_orig\tlocal_resp\tmissed_bytes\thistory\t"
      "orig_pkts\torig_ip_bytes\tresp_pkts\tresp_ip_bytes\n"
      "#types\ttime\taddr\tport\taddr\tport\tenum\tstring\tinterval\tcount\tcount\tstring\t"
      "bool\tbool\tcount\tstring\tcount\tcount\tcount\tcount\n";
  out << header;
  auto num = [](double v) { return format_double(v); };
  for (const auto& r : records) {
    out << num(r.ts) << '\t' << r.orig_addr << '\t' << r.orig_port << '\t' << r.resp_addr
        << '\t' << r.resp_port << '\t' << r.proto << '\t'
        << (r.service ? (r.service->empty() ? "(empty)" : *r.service) : "-") << '\t'
        << (r.duration ? num(*r.duration) : "-") << '\t'
        << (r.orig_bytes ? std::to_string(*r.orig_bytes) : "-") << '\t'
        << (r.resp_bytes ? std::to_string(*r.resp_bytes) : "-") << '\t' << r.conn_state
        << '\t' << ternary_token(r.local_orig) << '\t' << ternary_token(r.local_resp) << '\t'
        << r.missed_bytes << '\t'
        << (r.history ? (r.history->empty() ? "(empty)" : *r.history) : "-") << '\t'
        << r.orig_pkts << '\t' << r.orig_ip_bytes << '\t' << r.resp_pkts << '\t'
        << r.resp_ip_bytes << '\n';
  }
  out << "#close\n";
}

PseudonymKey PseudonymKey::from_hex(std::string_view key_hex, std::string_view salt) {
  PseudonymKey k;
  if (key_hex.size() != 64) fail_usage("pseudonym key must be 64 hex characters (32 bytes)");
  for (std::size_t i = 0; i < 32; ++i) {
    unsigned byte = 0;
    if (std::sscanf(std::string(key_hex.substr(2 * i, 2)).c_str(), "%2x", &byte) != 1)
      fail_usage("pseudonym key is not valid hex");
    k.key[i] = static_cast<std::uint8_t>(byte);
  }
  k.salt.assign(salt.begin(), salt.end());
  return k;
}

namespace {

std::string pseudonym_for(const PseudonymKey& key, const std::string& address) {
  std::vector<std::uint8_t> msg(key.salt);
  msg.insert(msg.end(), address.begin(), address.end());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.key.data(), static_cast<int>(key.key.size()), msg.data(), msg.size(),
       digest, &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(32);
  for (unsigned i = 0; i < 16 && i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> pseudonymize(std::vector<ConnRecord>& records,
                                                const PseudonymKey& key) {
  std::map<std::string, std::string> table;
  std::map<std::string, std::string> reverse;  // pseudonym -> address, collision guard
  auto lookup = [&](const std::string& addr) -> const std::string& {
    auto it = table.find(addr);
    if (it != table.end()) return it->second;
    std::string p = pseudonym_for(key, addr);
    auto [rit, inserted] = reverse.emplace(p, addr);
    if (!inserted && rit->second != addr)
      fail_data("pseudonym collision between '" + addr + "' and '" + rit->second + "'");
    return table.emplace(addr, std::move(p)).first->second;
  };
  for (auto& r : records) {
    r.orig_addr = lookup(r.orig_addr);
    r.resp_addr = lookup(r.resp_addr);
  }
  return table;
}

}  // namespace phase
