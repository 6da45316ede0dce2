#include "knotrace/spec_io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "knotrace/error.hpp"

namespace knotrace {

namespace {

struct Line {
  int number;
  std::string_view text;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<Line> significant_lines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    ++number;
    std::string_view line = text.substr(pos, end - pos);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) out.push_back({number, line});
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw Error(ErrorCode::ParseError, fmt::format("line {}: {}", line, what));
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view token, int line) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && token.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(line, fmt::format("'{}' is not a decimal number", token));
  return v;
}

// Parses a loop starting at lines[pos]; advances pos past it.
FourierLoop parse_loop_at(const std::vector<Line>& lines, std::size_t& pos, const ParseOptions& options,
                          int last_line) {
  if (pos >= lines.size()) fail(last_line + 1, "expected 'degree N'");
  const Line& header = lines[pos];
  const auto words = split_ws(header.text);
  if (words.size() != 2 || words[0] != "degree") fail(header.number, "expected 'degree N'");
  int degree = 0;
  {
    const auto [ptr, ec] = std::from_chars(words[1].data(), words[1].data() + words[1].size(), degree);
    if (ec != std::errc() || ptr != words[1].data() + words[1].size()) {
      fail(header.number, fmt::format("'{}' is not an integer degree", words[1]));
    }
  }
  if (degree < 1) fail(header.number, "degree must be >= 1");
  if (degree > options.max_degree) {
    fail(header.number, fmt::format("degree {} exceeds the cap {}", degree, options.max_degree));
  }
  ++pos;

  const std::size_t row = static_cast<std::size_t>(2 * degree + 1);
  std::vector<double> flat;
  flat.reserve(3 * row);
  static constexpr char kAxes[3] = {'x', 'y', 'z'};
  for (char axis : kAxes) {
    if (pos >= lines.size()) {
      fail(lines.empty() ? last_line + 1 : lines.back().number + 1, fmt::format("missing '{}:' line", axis));
    }
    const Line& l = lines[pos];
    if (l.text.size() < 2 || l.text[0] != axis || l.text[1] != ':') {
      fail(l.number, fmt::format("expected '{}:' line", axis));
    }
    const auto tokens = split_ws(l.text.substr(2));
    if (tokens.size() != row) {
      fail(l.number, fmt::format("'{}:' needs {} numbers (c0 then a_k b_k for k=1..{}), got {}", axis, row, degree,
                                 tokens.size()));
    }
    for (auto tok : tokens) flat.push_back(parse_double(tok, l.number));
    ++pos;
  }
  return FourierLoop(degree, std::move(flat));
}

int last_line_number(std::string_view text) {
  int n = 1;
  for (char c : text) n += c == '\n';
  return n;
}

void append_loop(std::string& out, const FourierLoop& loop) {
  out += fmt::format("degree {}\n", loop.degree());
  static constexpr char kAxes[3] = {'x', 'y', 'z'};
  for (int a = 0; a < 3; ++a) {
    out += kAxes[a];
    out += ':';
    for (double c : loop.axis(a)) out += fmt::format(" {}", c);
    out += '\n';
  }
}

}  // namespace

FourierLoop parse_knot_spec(std::string_view text, const ParseOptions& options) {
  const auto lines = significant_lines(text);
  std::size_t pos = 0;
  FourierLoop loop = parse_loop_at(lines, pos, options, last_line_number(text));
  if (pos != lines.size()) fail(lines[pos].number, "unexpected trailing content");
  return loop;
}

IsotopyFamily parse_isotopy_spec(std::string_view text, const ParseOptions& options) {
  const auto lines = significant_lines(text);
  const int last = last_line_number(text);
  std::vector<Keyframe> frames;
  std::size_t pos = 0;
  while (pos < lines.size()) {
    const Line& header = lines[pos];
    const auto words = split_ws(header.text);
    if (words.size() != 2 || words[0] != "keyframe" || words[1].substr(0, 2) != "t=") {
      fail(header.number, "expected 'keyframe t=<float>'");
    }
    const double t = parse_double(words[1].substr(2), header.number);
    ++pos;
    FourierLoop loop = parse_loop_at(lines, pos, options, last);
    if (!frames.empty() && loop.degree() != frames.front().loop.degree()) {
      fail(header.number, "all keyframes must share one degree");
    }
    frames.push_back({t, std::move(loop)});
  }
  if (frames.size() < 2) fail(last, "an isotopy spec needs at least two keyframes");
  try {
    return IsotopyFamily(std::move(frames));
  } catch (const Error& e) {
    fail(last, e.what());
  }
}

std::string format_knot_spec(const FourierLoop& loop) {
  std::string out;
  append_loop(out, loop);
  return out;
}

std::string format_isotopy_spec(const IsotopyFamily& family) {
  std::string out;
  for (const auto& k : family.keyframes()) {
    out += fmt::format("keyframe t={}\n", k.t);
    append_loop(out, k.loop);
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace knotrace
