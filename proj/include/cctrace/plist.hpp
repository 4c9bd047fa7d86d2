#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cctrace/detail/bytes.hpp"
#include "cctrace/errors.hpp"

// XML property-list subset used by configuration profiles: dict, array,
// string, integer, real, true/false, data (base64), date (kept as text).
// The writer emits the classic plist DTD header with tab indentation.

namespace cctrace::plist {

class Value;
using Array = std::vector<Value>;
using Dict = std::map<std::string, Value>;

class Value {
 public:
  enum class Kind { boolean, integer, real, string, data, array, dict };

  Value() : v_(Dict{}) {}
  Value(bool b) : v_(b) {}
  Value(int i) : v_(static_cast<std::int64_t>(i)) {}
  Value(std::int64_t i) : v_(i) {}
  Value(std::uint64_t u) : v_(static_cast<std::int64_t>(u)) {}
  Value(double d) : v_(d) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(std::vector<std::uint8_t> data) : v_(std::move(data)) {}
  Value(Array a) : v_(std::move(a)) {}
  Value(Dict d) : v_(std::move(d)) {}

  Kind kind() const { return static_cast<Kind>(v_.index()); }
  bool is_dict() const { return kind() == Kind::dict; }
  bool is_array() const { return kind() == Kind::array; }
  bool is_integer() const { return kind() == Kind::integer; }
  bool is_string() const { return kind() == Kind::string; }

  bool as_bool() const { return get<bool>("boolean"); }
  std::int64_t as_integer() const { return get<std::int64_t>("integer"); }
  double as_real() const { return get<double>("real"); }
  const std::string& as_string() const { return get<std::string>("string"); }
  const std::vector<std::uint8_t>& as_data() const { return get<std::vector<std::uint8_t>>("data"); }
  const Array& as_array() const { return get<Array>("array"); }
  const Dict& as_dict() const { return get<Dict>("dict"); }
  Dict& as_dict() {
    if (!is_dict()) throw Error(Errc::malformed_plist, "value is not a dict");
    return std::get<Dict>(v_);
  }

  /// Dict lookup; nullptr when absent or when this is not a dict.
  const Value* find(const std::string& key) const {
    if (!is_dict()) return nullptr;
    auto& d = std::get<Dict>(v_);
    auto it = d.find(key);
    return it == d.end() ? nullptr : &it->second;
  }

  friend bool operator==(const Value&, const Value&) = default;

 private:
  template <typename T>
  const T& get(const char* want) const {
    if (auto* p = std::get_if<T>(&v_)) return *p;
    throw Error(Errc::malformed_plist, std::string("value is not a ") + want);
  }

  std::variant<bool, std::int64_t, double, std::string, std::vector<std::uint8_t>, Array, Dict> v_;
};

namespace detail_plist {

struct Parser {
  std::string_view s;
  std::size_t i = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(Errc::malformed_plist, why + " near byte " + std::to_string(i), i);
  }

  bool eof() const { return i >= s.size(); }
  char peek() const { return s[i]; }

  void skip_ws() {
    while (!eof() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
  }

  // Whitespace, <?...?>, <!-- ... -->, <!DOCTYPE ...>
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (i + 1 >= s.size() || s[i] != '<') return;
      if (s[i + 1] == '?') {
        auto end = s.find("?>", i);
        if (end == std::string_view::npos) fail("unterminated processing instruction");
        i = end + 2;
      } else if (s.compare(i, 4, "<!--") == 0) {
        auto end = s.find("-->", i);
        if (end == std::string_view::npos) fail("unterminated comment");
        i = end + 3;
      } else if (s[i + 1] == '!') {
        auto end = s.find('>', i);
        if (end == std::string_view::npos) fail("unterminated declaration");
        i = end + 1;
      } else {
        return;
      }
    }
  }

  struct Tag {
    std::string name;
    bool closing = false;
    bool self_closing = false;
  };

  Tag read_tag() {
    skip_misc();
    if (eof() || s[i] != '<') fail("expected a tag");
    ++i;
    Tag t;
    if (!eof() && s[i] == '/') {
      t.closing = true;
      ++i;
    }
    std::size_t start = i;
    while (!eof() && s[i] != '>' && s[i] != '/' && s[i] != ' ' && s[i] != '\t' && s[i] != '\n' &&
           s[i] != '\r')
      ++i;
    t.name.assign(s.substr(start, i - start));
    if (t.name.empty()) fail("empty tag name");
    // skip attributes
    while (!eof() && s[i] != '>' && s[i] != '/') ++i;
    if (!eof() && s[i] == '/') {
      t.self_closing = true;
      ++i;
    }
    if (eof() || s[i] != '>') fail("unterminated tag");
    ++i;
    return t;
  }

  void expect_close(const std::string& name) {
    Tag t = read_tag();
    if (!t.closing || t.name != name) fail("expected </" + name + ">");
  }

  std::string read_text_until_tag() {
    std::string out;
    while (!eof() && s[i] != '<') {
      if (s[i] == '&') {
        out.push_back(read_entity());
      } else {
        out.push_back(s[i]);
        ++i;
      }
    }
    return out;
  }

  char read_entity() {
    auto end = s.find(';', i);
    if (end == std::string_view::npos || end - i > 12) fail("unterminated entity");
    std::string_view e = s.substr(i + 1, end - i - 1);
    i = end + 1;
    if (e == "lt") return '<';
    if (e == "gt") return '>';
    if (e == "amp") return '&';
    if (e == "quot") return '"';
    if (e == "apos") return '\'';
    if (!e.empty() && e[0] == '#') {
      std::uint64_t code = 0;
      if (e.size() > 1 && (e[1] == 'x' || e[1] == 'X')) {
        auto v = cctrace::detail::parse_u64("0x" + std::string(e.substr(2)));
        if (!v) fail("bad numeric entity");
        code = *v;
      } else {
        auto v = cctrace::detail::parse_u64(std::string(e.substr(1)));
        if (!v) fail("bad numeric entity");
        code = *v;
      }
      if (code > 0x7F) fail("non-ASCII numeric entity unsupported");
      return static_cast<char>(code);
    }
    fail("unknown entity &" + std::string(e) + ";");
  }

  Value parse_value(const Tag& t) {
    if (t.name == "dict") return parse_dict(t);
    if (t.name == "array") return parse_array(t);
    if (t.name == "string" || t.name == "date") {
      if (t.self_closing) return Value(std::string());
      std::string text = read_text_until_tag();
      expect_close(t.name);
      return Value(std::move(text));
    }
    if (t.name == "integer") {
      if (t.self_closing) fail("empty <integer/>");
      std::string text = read_text_until_tag();
      expect_close("integer");
      return Value(parse_integer(text));
    }
    if (t.name == "real") {
      if (t.self_closing) fail("empty <real/>");
      std::string text = read_text_until_tag();
      expect_close("real");
      try {
        return Value(std::stod(text));
      } catch (const std::exception&) {
        fail("bad real '" + text + "'");
      }
    }
    if (t.name == "true") {
      if (!t.self_closing) expect_close("true");
      return Value(true);
    }
    if (t.name == "false") {
      if (!t.self_closing) expect_close("false");
      return Value(false);
    }
    if (t.name == "data") {
      if (t.self_closing) return Value(std::vector<std::uint8_t>{});
      std::string text = read_text_until_tag();
      expect_close("data");
      auto bytes = cctrace::detail::base64_decode(text);
      if (!bytes) fail("bad base64 in <data>");
      return Value(std::move(*bytes));
    }
    fail("unexpected element <" + t.name + ">");
  }

  std::int64_t parse_integer(const std::string& text) {
    std::string_view v = text;
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
    bool neg = false;
    if (!v.empty() && (v[0] == '-' || v[0] == '+')) {
      neg = v[0] == '-';
      v.remove_prefix(1);
    }
    auto mag = cctrace::detail::parse_u64(v);
    if (!mag) fail("bad integer '" + text + "'");
    // Two's-complement convention: magnitudes above INT64_MAX wrap, so
    // <integer>-1</integer> round-trips with the cctool -1 mask shorthand.
    std::uint64_t u = *mag;
    return static_cast<std::int64_t>(neg ? ~u + 1 : u);
  }

  Value parse_dict(const Tag& open) {
    Dict d;
    if (open.self_closing) return Value(std::move(d));
    for (;;) {
      skip_misc();
      Tag t = read_tag();
      if (t.closing) {
        if (t.name != "dict") fail("expected </dict>");
        return Value(std::move(d));
      }
      if (t.name != "key") fail("expected <key> inside <dict>");
      std::string key = t.self_closing ? std::string() : read_text_until_tag();
      if (!t.self_closing) expect_close("key");
      skip_misc();
      Tag vt = read_tag();
      if (vt.closing) fail("missing value for key '" + key + "'");
      d.insert_or_assign(std::move(key), parse_value(vt));
    }
  }

  Value parse_array(const Tag& open) {
    Array a;
    if (open.self_closing) return Value(std::move(a));
    for (;;) {
      skip_misc();
      Tag t = read_tag();
      if (t.closing) {
        if (t.name != "array") fail("expected </array>");
        return Value(std::move(a));
      }
      a.push_back(parse_value(t));
    }
  }
};

inline void escape_text(std::string& out, std::string_view text) {
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
}

inline void write_value(std::string& out, const Value& v, int depth) {
  auto indent = [&] { out.append(static_cast<std::size_t>(depth), '\t'); };
  switch (v.kind()) {
    case Value::Kind::boolean:
      indent();
      out += v.as_bool() ? "<true/>\n" : "<false/>\n";
      break;
    case Value::Kind::integer:
      indent();
      out += "<integer>" + std::to_string(v.as_integer()) + "</integer>\n";
      break;
    case Value::Kind::real: {
      indent();
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", v.as_real());
      out += "<real>";
      out += buf;
      out += "</real>\n";
      break;
    }
    case Value::Kind::string:
      indent();
      out += "<string>";
      escape_text(out, v.as_string());
      out += "</string>\n";
      break;
    case Value::Kind::data:
      indent();
      out += "<data>" + cctrace::detail::base64_encode(v.as_data()) + "</data>\n";
      break;
    case Value::Kind::array: {
      const auto& a = v.as_array();
      indent();
      if (a.empty()) {
        out += "<array/>\n";
        break;
      }
      out += "<array>\n";
      for (const auto& e : a) write_value(out, e, depth + 1);
      indent();
      out += "</array>\n";
      break;
    }
    case Value::Kind::dict: {
      const auto& d = v.as_dict();
      indent();
      if (d.empty()) {
        out += "<dict/>\n";
        break;
      }
      out += "<dict>\n";
      for (const auto& [k, e] : d) {
        out.append(static_cast<std::size_t>(depth + 1), '\t');
        out += "<key>";
        escape_text(out, k);
        out += "</key>\n";
        write_value(out, e, depth + 1);
      }
      indent();
      out += "</dict>\n";
      break;
    }
  }
}

}  // namespace detail_plist

/// Parses one XML plist document. Throws Error(MalformedPlist) on anything
/// that is not a well-formed plist of the supported subset.
inline Value parse(std::string_view xml) {
  detail_plist::Parser p{xml};
  p.skip_misc();
  auto t = p.read_tag();
  bool wrapped = t.name == "plist";
  if (wrapped) {
    if (t.self_closing) p.fail("empty <plist/>");
    p.skip_misc();
    t = p.read_tag();
  }
  if (t.closing) p.fail("expected a value element");
  Value root = p.parse_value(t);
  if (wrapped) p.expect_close("plist");
  p.skip_misc();
  if (!p.eof()) p.fail("trailing content after document");
  return root;
}

/// Serializes a full document: XML prolog, plist 1.0 DTD, tab indentation.
/// Dict keys come out in lexicographic order, so output is deterministic.
inline std::string write_document(const Value& root) {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out +=
      "<!DOCTYPE plist PUBLIC \"-//Apple//DTD PLIST 1.0//EN\" "
      "\"http://www.apple.com/DTDs/PropertyList-1.0.dtd\">\n";
  out += "<plist version=\"1.0\">\n";
  detail_plist::write_value(out, root, 0);
  out += "</plist>\n";
  return out;
}

}  // namespace cctrace::plist
