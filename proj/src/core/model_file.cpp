#include "model_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "error.hpp"

namespace dualdiv {

namespace {

struct Value {
  bool is_array = false;
  double number = 0.0;
  std::vector<Value> items;
};

class Parser {
 public:
  Parser(const std::string& text, int line) : s_(text), line_(line) {}

  Value value() {
    skip_space();
    if (peek() == '[') return array();
    return Value{false, number(), {}};
  }

  void expect_end() {
    skip_space();
    if (pos_ != s_.size()) error("unexpected trailing characters");
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void skip_space() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  Value array() {
    ++pos_;  // '['
    Value v;
    v.is_array = true;
    skip_space();
    if (peek() == ']') {
      ++pos_;
      return v;
    }
    for (;;) {
      v.items.push_back(value());
      skip_space();
      const char c = peek();
      ++pos_;
      if (c == ']') return v;
      if (c != ',') error("expected ',' or ']' in array");
      skip_space();
      if (peek() == ']') {  // trailing comma
        ++pos_;
        return v;
      }
    }
  }

  double number() {
    std::size_t start = pos_;
    if (peek() == '+') start = ++pos_;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if ((c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.' ||
          c == 'e' || c == 'E' || c == '_') {
        ++pos_;
      } else {
        break;
      }
    }
    std::string token = s_.substr(start, pos_ - start);
    std::erase(token, '_');
    double out = 0.0;
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), out);
    if (token.empty() || ec != std::errc() ||
        ptr != token.data() + token.size())
      error("invalid number '" + token + "'");
    return out;
  }

  [[noreturn]] void error(const std::string& msg) const {
    std::ostringstream os;
    os << "line " << line_ << ": " << msg;
    fail(ErrorCode::Parse, os.str());
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_;
};

int bracket_balance(const std::string& s) {
  int depth = 0;
  bool comment = false;
  for (char c : s) {
    if (c == '\n') comment = false;
    if (c == '#') comment = true;
    if (comment) continue;
    if (c == '[') ++depth;
    if (c == ']') --depth;
  }
  return depth;
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double as_number(const std::string& key, const Value& v) {
  if (v.is_array) fail(ErrorCode::Parse, "key '" + key + "' must be a number");
  return v.number;
}

std::vector<double> as_vector(const std::string& key, const Value& v) {
  if (!v.is_array) fail(ErrorCode::Parse, "key '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& item : v.items) {
    if (item.is_array)
      fail(ErrorCode::Parse, "key '" + key + "' must be a flat array");
    out.push_back(item.number);
  }
  return out;
}

}  // namespace

ModelParams parse_model_text(const std::string& text) {
  std::map<std::string, Value> entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const int first_line = line_no;
    const auto hash = line.find('#');
    const std::string body = strip(line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "line " << line_no << ": expected 'key = value'";
      fail(ErrorCode::Parse, os.str());
    }
    const std::string key = strip(body.substr(0, eq));
    std::string rhs = body.substr(eq + 1);
    while (bracket_balance(rhs) > 0) {
      std::string more;
      if (!std::getline(in, more)) {
        std::ostringstream os;
        os << "line " << first_line << ": unterminated array for '" << key
           << "'";
        fail(ErrorCode::Parse, os.str());
      }
      ++line_no;
      rhs += "\n" + more;
    }
    static const char* const kKeys[] = {"drift_d", "sigma", "lambda",
                                        "q",       "alpha", "T"};
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      std::ostringstream os;
      os << "line " << first_line << ": unknown key '" << key << "'";
      fail(ErrorCode::Parse, os.str());
    }
    if (entries.count(key)) {
      std::ostringstream os;
      os << "line " << first_line << ": duplicate key '" << key << "'";
      fail(ErrorCode::Parse, os.str());
    }
    Parser p(rhs, first_line);
    Value v = p.value();
    p.expect_end();
    entries.emplace(key, std::move(v));
  }

  auto get = [&](const char* key) -> const Value& {
    const auto it = entries.find(key);
    if (it == entries.end())
      fail(ErrorCode::Parse, std::string("missing key '") + key + "'");
    return it->second;
  };

  ModelParams m;
  m.drift_d = as_number("drift_d", get("drift_d"));
  m.sigma = as_number("sigma", get("sigma"));
  m.lambda = as_number("lambda", get("lambda"));
  m.q = as_number("q", get("q"));
  m.alpha = as_vector("alpha", get("alpha"));
  const Value& T = get("T");
  if (!T.is_array) fail(ErrorCode::Parse, "key 'T' must be an array of rows");
  for (const auto& row : T.items) m.T.push_back(as_vector("T", row));
  return m;
}

ModelParams load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorCode::Io, "cannot read model file '" + path + "'");
  return parse_model_text(buf.str());
}

}  // namespace dualdiv
