#include "knotrace/diagram.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <numeric>

#include "knotrace/error.hpp"

namespace knotrace {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedCode, what); }

int out_half(int p) { return 2 * p; }
int in_half(int p) { return 2 * p + 1; }

// Counterclockwise half-edge order at one crossing.
std::array<int, 4> rotation(int over_passage, int under_passage, int sign) {
  if (sign > 0) return {out_half(over_passage), out_half(under_passage), in_half(over_passage), in_half(under_passage)};
  return {out_half(over_passage), in_half(under_passage), in_half(over_passage), out_half(under_passage)};
}

}  // namespace

Diagram Diagram::from_passages(std::vector<Passage> passages, std::vector<int> signs) {
  const int c = static_cast<int>(signs.size());
  const int n = static_cast<int>(passages.size());
  if (n != 2 * c) malformed(fmt::format("{} passages for {} crossings", n, c));
  for (int s : signs)
    if (s != 1 && s != -1) malformed("crossing signs must be +1 or -1");

  // Relabel by first appearance and check the two-visit invariant.
  std::vector<int> label(static_cast<std::size_t>(c), -1);
  std::vector<int> overs(static_cast<std::size_t>(c), 0);
  std::vector<int> unders(static_cast<std::size_t>(c), 0);
  int next = 0;
  for (int p = 0; p < n; ++p) {
    const int id = passages[p].crossing;
    if (id < 0 || id >= c) malformed(fmt::format("passage {} names crossing {} out of range", p, id));
    if (label[id] < 0) label[id] = next++;
    (passages[p].over ? overs : unders)[id] += 1;
  }
  for (int id = 0; id < c; ++id) {
    if (overs[id] != 1 || unders[id] != 1) {
      malformed(fmt::format("crossing {} is visited {} times over and {} times under", id, overs[id], unders[id]));
    }
  }
  Diagram d;
  d.signs_.assign(static_cast<std::size_t>(c), 0);
  for (int id = 0; id < c; ++id) d.signs_[label[id]] = signs[id];
  for (auto& p : passages) p.crossing = label[p.crossing];
  d.passages_ = std::move(passages);

  d.where_.assign(static_cast<std::size_t>(c), {-1, -1});
  for (int p = 0; p < n; ++p) d.where_[d.passages_[p].crossing][d.passages_[p].over ? 0 : 1] = p;

  if (c == 0) {
    d.segment_arc_ = {};
    return d;
  }

  // Faces: arrive along a half-edge, leave along its clockwise neighbour.
  std::vector<int> cw(static_cast<std::size_t>(2 * n));
  for (int id = 0; id < c; ++id) {
    const auto rot = rotation(d.where_[id][0], d.where_[id][1], d.signs_[id]);
    for (int k = 0; k < 4; ++k) cw[rot[k]] = rot[(k + 3) % 4];
  }
  auto arrival = [n](int dart) {
    const int s = dart / 2;
    return dart % 2 == 0 ? in_half((s + 1) % n) : out_half(s);
  };
  auto leaving = [n](int half) {
    const int p = half / 2;
    return half % 2 == 0 ? 2 * p : 2 * ((p - 1 + n) % n) + 1;
  };
  std::vector<bool> seen(static_cast<std::size_t>(2 * n), false);
  for (int start = 0; start < 2 * n; ++start) {
    if (seen[start]) continue;
    Face f;
    int dart = start;
    while (!seen[dart]) {
      seen[dart] = true;
      f.darts.push_back(dart);
      dart = leaving(cw[arrival(dart)]);
    }
    if (dart != start) malformed("inconsistent rotation system");
    d.faces_.push_back(std::move(f));
  }
  if (static_cast<int>(d.faces_.size()) != c + 2) {
    malformed(fmt::format("signs and crossing order are not planar ({} faces, expected {})", d.faces_.size(), c + 2));
  }

  // Arcs start at under passages.
  d.segment_arc_.assign(static_cast<std::size_t>(n), -1);
  int first_under = 0;
  while (d.passages_[first_under].over) ++first_under;
  int arc = -1;
  for (int k = 0; k < n; ++k) {
    const int p = (first_under + k) % n;
    if (!d.passages_[p].over) ++arc;
    d.segment_arc_[p] = arc;
  }
  return d;
}

int Diagram::dart_head(int dart) const {
  const int n = segment_count();
  const int s = dart / 2;
  return passages_[dart % 2 == 0 ? (s + 1) % n : s].crossing;
}

int Diagram::dart_tail(int dart) const {
  const int n = segment_count();
  const int s = dart / 2;
  return passages_[dart % 2 == 0 ? s : (s + 1) % n].crossing;
}

CrossingView Diagram::crossing_view(int crossing) const {
  const int n = segment_count();
  const int po = where_[crossing][0];
  const int pu = where_[crossing][1];
  CrossingView v;
  v.over_arc = segment_arc_[po];
  v.under_in_arc = segment_arc_[(pu - 1 + n) % n];
  v.under_out_arc = segment_arc_[pu];
  v.sign = signs_[crossing];
  // Both signs list (in under, over, out under, over); only which over end is
  // incoming differs.
  v.ends = {v.under_in_arc, v.over_arc, v.under_out_arc, v.over_arc};
  return v;
}

std::uint64_t Diagram::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(static_cast<std::uint64_t>(passages_.size()));
  for (const auto& p : passages_) mix(static_cast<std::uint64_t>(p.crossing) * 2 + (p.over ? 1 : 0));
  for (int s : signs_) mix(s > 0 ? 3 : 5);
  return h;
}

std::string format_gauss(const Diagram& d) {
  std::string out;
  for (const auto& p : d.passages()) {
    if (!out.empty()) out += ' ';
    out += fmt::format("{}{}{}", p.over ? 'O' : 'U', p.crossing + 1, d.sign(p.crossing) > 0 ? '+' : '-');
  }
  return out;
}

Diagram parse_gauss(std::string_view text) {
  std::vector<Passage> passages;
  std::vector<int> signs;
  std::vector<long> labels;  // external label per internal id
  std::vector<int> visits;
  std::size_t i = 0;
  int token = 0;
  while (true) {
    while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ',')) ++i;
    if (i >= text.size()) break;
    ++token;
    const char kind = text[i];
    if (kind != 'O' && kind != 'U' && kind != 'o' && kind != 'u') {
      malformed(fmt::format("token {}: expected O or U, got '{}'", token, kind));
    }
    ++i;
    const std::size_t digits = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == digits) malformed(fmt::format("token {}: missing crossing number", token));
    const long label = std::stol(std::string(text.substr(digits, i - digits)));
    int sign = 0;
    if (i < text.size() && text[i] == '+') {
      sign = 1;
      ++i;
    } else if (i < text.size() && text[i] == '-') {
      sign = -1;
      ++i;
    } else if (text.substr(i, 3) == "\xE2\x88\x92") {
      sign = -1;
      i += 3;
    } else {
      malformed(fmt::format("token {}: missing sign", token));
    }
    if (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != ',') {
      malformed(fmt::format("token {}: trailing characters", token));
    }
    auto it = std::find(labels.begin(), labels.end(), label);
    int id;
    if (it == labels.end()) {
      id = static_cast<int>(labels.size());
      labels.push_back(label);
      signs.push_back(sign);
      visits.push_back(0);
    } else {
      id = static_cast<int>(it - labels.begin());
      if (signs[id] != sign) malformed(fmt::format("token {}: crossing {} changes sign", token, label));
    }
    const bool over = kind == 'O' || kind == 'o';
    for (const auto& p : passages) {
      if (p.crossing == id && p.over == over) {
        malformed(fmt::format("token {}: crossing {} appears twice as {}", token, label, over ? 'O' : 'U'));
      }
    }
    if (++visits[id] > 2) malformed(fmt::format("token {}: crossing {} appears more than twice", token, label));
    passages.push_back({id, over});
  }
  for (std::size_t id = 0; id < labels.size(); ++id) {
    if (visits[id] != 2) malformed(fmt::format("crossing {} appears only once", labels[id]));
  }
  return Diagram::from_passages(std::move(passages), std::move(signs));
}

std::string format_pd(const Diagram& d) {
  const int n = d.segment_count();
  auto in_label = [n](int p) { return p == 0 ? n : p; };
  auto out_label = [](int p) { return p + 1; };
  std::string out;
  for (int c = 0; c < d.crossing_count(); ++c) {
    const auto [po, pu] = d.passages_of(c);
    const int i = in_label(pu);
    const int k = out_label(pu);
    const int j = d.sign(c) > 0 ? out_label(po) : in_label(po);
    const int l = d.sign(c) > 0 ? in_label(po) : out_label(po);
    if (!out.empty()) out += ' ';
    out += fmt::format("X[{},{},{},{}]", i, j, k, l);
  }
  return out;
}

Diagram parse_pd(std::string_view text) {
  std::vector<std::array<long, 4>> xs;
  std::size_t i = 0;
  while (true) {
    while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ',')) ++i;
    if (i >= text.size()) break;
    const int pos = static_cast<int>(xs.size()) + 1;
    if (text[i] != 'X') malformed(fmt::format("crossing {}: expected 'X'", pos));
    ++i;
    if (i >= text.size() || (text[i] != '[' && text[i] != '(')) malformed(fmt::format("crossing {}: expected '['", pos));
    const char close = text[i] == '[' ? ']' : ')';
    ++i;
    std::array<long, 4> x{};
    for (int k = 0; k < 4; ++k) {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      const std::size_t start = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (i == start) malformed(fmt::format("crossing {}: expected a label", pos));
      x[k] = std::stol(std::string(text.substr(start, i - start)));
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      const char want = k == 3 ? close : ',';
      if (i >= text.size() || text[i] != want) malformed(fmt::format("crossing {}: expected '{}'", pos, want));
      ++i;
    }
    xs.push_back(x);
  }
  const int c = static_cast<int>(xs.size());
  const long n = 2L * c;
  if (c == 0) return Diagram();
  std::vector<int> count(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& x : xs) {
    for (long v : x) {
      if (v < 1 || v > n) malformed(fmt::format("label {} outside 1..{}", v, n));
      ++count[v];
    }
  }
  for (long v = 1; v <= n; ++v)
    if (count[v] != 2) malformed(fmt::format("label {} appears {} times", v, count[v]));

  auto next = [n](long e) { return e % n + 1; };
  // head[e] = passage at the end of edge e.
  std::vector<Passage> head(static_cast<std::size_t>(n) + 1, Passage{-1, false});
  std::vector<int> signs(static_cast<std::size_t>(c));
  for (int id = 0; id < c; ++id) {
    const auto [a, j, k, l] = xs[id];
    if (k != next(a)) malformed(fmt::format("crossing {}: under-strand {} -> {} is not consecutive", id + 1, a, k));
    long over_in;
    if (c == 1) {
      // Two edges: the under-strand leaves along k, which comes back as the over-strand.
      over_in = k;
      if (j == a) {
        signs[id] = 1;
      } else if (l == a) {
        signs[id] = -1;
      } else {
        malformed("crossing 1: inconsistent labels");
      }
    } else if (j == next(l)) {
      over_in = l;
      signs[id] = 1;
    } else if (l == next(j)) {
      over_in = j;
      signs[id] = -1;
    } else {
      malformed(fmt::format("crossing {}: over-strand {} / {} is not consecutive", id + 1, j, l));
    }
    if (head[a].crossing >= 0 || head[over_in].crossing >= 0) {
      malformed(fmt::format("crossing {}: an edge enters two crossings", id + 1));
    }
    head[a] = {id, false};
    head[over_in] = {id, true};
  }
  std::vector<Passage> passages(static_cast<std::size_t>(n));
  for (long e = 1; e <= n; ++e) {
    if (head[e].crossing < 0) malformed(fmt::format("edge {} enters no crossing", e));
    passages[e % n] = head[e];
  }
  return Diagram::from_passages(std::move(passages), std::move(signs));
}

int writhe(const Diagram& d) {
  return std::accumulate(d.signs().begin(), d.signs().end(), 0);
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) throw Error(ErrorCode::InvalidArgument, "coloring count overflows 64 bits");
  return a * b;
}

}  // namespace

std::uint64_t fox_colorings(const Diagram& d, int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "colorings need n >= 2");
  const int rows = d.crossing_count();
  const int cols = d.arc_count();
  if (rows == 0) return static_cast<std::uint64_t>(n);
  const long mod = n;
  std::vector<std::vector<long>> a(static_cast<std::size_t>(rows), std::vector<long>(static_cast<std::size_t>(cols), 0));
  auto add = [mod](long& x, long v) { x = ((x + v) % mod + mod) % mod; };
  for (int c = 0; c < rows; ++c) {
    const CrossingView v = d.crossing_view(c);
    add(a[c][v.over_arc], 2);
    add(a[c][v.under_in_arc], -1);
    add(a[c][v.under_out_arc], -1);
  }

  // Diagonalise over Z/n with division-with-remainder steps; each step is
  // invertible mod n, so the solution count of the diagonal system is that of
  // the original.
  const int diag = std::min(rows, cols);
  std::vector<long> pivots;
  for (int t = 0; t < diag; ++t) {
    // Smallest nonzero entry of the remaining block becomes the pivot.
    auto place_smallest = [&](bool whole_block) {
      long best = 0;
      int br = -1;
      int bc = -1;
      for (int r = t; r < rows; ++r) {
        for (int c = t; c < cols; ++c) {
          if (!whole_block && r != t && c != t) continue;
          if (a[r][c] != 0 && (best == 0 || a[r][c] < best)) {
            best = a[r][c];
            br = r;
            bc = c;
          }
        }
      }
      if (br < 0) return false;
      std::swap(a[t], a[br]);
      for (auto& row : a) std::swap(row[t], row[bc]);
      return true;
    };
    if (!place_smallest(true)) break;
    while (true) {
      bool clean = true;
      const long p = a[t][t];
      for (int r = t + 1; r < rows; ++r) {
        if (a[r][t] == 0) continue;
        const long q = a[r][t] / p;
        for (int c = t; c < cols; ++c) add(a[r][c], -q * a[t][c]);
        if (a[r][t] != 0) clean = false;
      }
      for (int c = t + 1; c < cols; ++c) {
        if (a[t][c] == 0) continue;
        const long q = a[t][c] / p;
        for (int r = t; r < rows; ++r) add(a[r][c], -q * a[r][t]);
        if (a[t][c] != 0) clean = false;
      }
      if (clean) break;
      place_smallest(false);
    }
    pivots.push_back(a[t][t]);
  }
  std::uint64_t count = 1;
  for (int t = 0; t < cols; ++t) {
    const long p = t < static_cast<int>(pivots.size()) ? pivots[t] : 0;
    count = checked_mul(count, static_cast<std::uint64_t>(std::gcd(p, mod)));
  }
  return count;
}

std::vector<int> canonical_code(const Diagram& d) {
  const int n = d.segment_count();
  std::vector<int> best;
  std::vector<int> code(static_cast<std::size_t>(n) + 1);
  std::vector<int> relabel(static_cast<std::size_t>(d.crossing_count()));
  for (int dir = 0; dir < 2; ++dir) {
    for (int r = 0; r < n; ++r) {
      std::fill(relabel.begin(), relabel.end(), -1);
      int next = 0;
      code[0] = d.crossing_count();
      for (int k = 0; k < n; ++k) {
        const int p = dir == 0 ? (r + k) % n : ((r - k) % n + n) % n;
        const Passage& q = d.passages()[p];
        if (relabel[q.crossing] < 0) relabel[q.crossing] = next++;
        code[k + 1] = relabel[q.crossing] * 4 + (q.over ? 2 : 0) + (d.sign(q.crossing) > 0 ? 1 : 0);
      }
      if (best.empty() || code < best) best = code;
    }
  }
  if (best.empty()) best = {0};
  return best;
}

Diagram canonical_form(const Diagram& d) {
  const std::vector<int> code = canonical_code(d);
  std::vector<Passage> passages;
  std::vector<int> signs(static_cast<std::size_t>(code[0]), 0);
  for (std::size_t k = 1; k < code.size(); ++k) {
    const int label = code[k] / 4;
    passages.push_back({label, (code[k] & 2) != 0});
    signs[static_cast<std::size_t>(label)] = (code[k] & 1) ? 1 : -1;
  }
  return Diagram::from_passages(std::move(passages), std::move(signs));
}

bool isomorphic(const Diagram& a, const Diagram& b) {
  if (a.crossing_count() != b.crossing_count()) return false;
  return canonical_code(a) == canonical_code(b);
}

}  // namespace knotrace
