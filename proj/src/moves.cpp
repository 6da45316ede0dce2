#include "knotrace/moves.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <set>

#include "knotrace/error.hpp"

namespace knotrace {

std::string_view to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::R1Add: return "R1_add";
    case MoveKind::R1Remove: return "R1_remove";
    case MoveKind::R2Add: return "R2_add";
    case MoveKind::R2Remove: return "R2_remove";
    case MoveKind::R3: return "R3";
  }
  return "?";
}

namespace {

// New diagram with extra passages spliced into segments (after passage s)
// and crossings appended.
Diagram splice(const Diagram& d, const std::vector<std::vector<Passage>>& inserts, const std::vector<int>& new_signs) {
  std::vector<Passage> out;
  const int n = d.segment_count();
  for (int p = 0; p < n; ++p) {
    out.push_back(d.passages()[p]);
    for (const auto& q : inserts[p]) out.push_back(q);
  }
  if (n == 0)
    for (const auto& q : inserts[0]) out.push_back(q);
  std::vector<int> signs = d.signs();
  signs.insert(signs.end(), new_signs.begin(), new_signs.end());
  return Diagram::from_passages(std::move(out), std::move(signs));
}

// Drop every passage of the given crossings.
Diagram remove_crossings(const Diagram& d, std::vector<int> gone) {
  std::sort(gone.begin(), gone.end());
  std::vector<int> relabel(static_cast<std::size_t>(d.crossing_count()), -1);
  std::vector<int> signs;
  for (int c = 0; c < d.crossing_count(); ++c) {
    if (std::binary_search(gone.begin(), gone.end(), c)) continue;
    relabel[c] = static_cast<int>(signs.size());
    signs.push_back(d.sign(c));
  }
  std::vector<Passage> out;
  for (const auto& p : d.passages())
    if (relabel[p.crossing] >= 0) out.push_back({relabel[p.crossing], p.over});
  return Diagram::from_passages(std::move(out), std::move(signs));
}

bool segment_over_at_start(const Diagram& d, int s) { return d.passages()[s].over; }
bool segment_over_at_end(const Diagram& d, int s) { return d.passages()[(s + 1) % d.segment_count()].over; }

// Darts of each face; the unknot has two single-dart faces in this view.
std::vector<std::vector<int>> face_darts(const Diagram& d) {
  if (d.crossing_count() == 0) return {{0}, {1}};
  std::vector<std::vector<int>> out;
  for (const auto& f : d.faces()) out.push_back(f.darts);
  return out;
}

void r1_add_sites(const Diagram& d, std::vector<MoveSite>& out) {
  const int segments = std::max(1, d.segment_count());
  for (int s = 0; s < segments; ++s) {
    for (int sign : {1, -1}) {
      for (int first_over : {1, 0}) {
        out.push_back({MoveKind::R1Add, {s, sign, first_over},
                       fmt::format("{}{}", sign > 0 ? '+' : '-', first_over ? 'O' : 'U'), d.fingerprint()});
      }
    }
  }
}

void r1_remove_sites(const Diagram& d, std::vector<MoveSite>& out) {
  // Both lobes of a one-crossing diagram are curls, entered from opposite
  // passages, so a crossing can carry two variants.
  std::set<std::pair<int, bool>> seen;
  for (const auto& f : d.faces()) {
    if (f.darts.size() != 1) continue;
    const int c = d.dart_head(f.darts[0]);
    // The curl starts at the passage opening the monogon's segment.
    const bool first_over = d.passages()[f.darts[0] / 2].over;
    if (!seen.insert({c, first_over}).second) continue;
    out.push_back({MoveKind::R1Remove, {c}, fmt::format("{}{}", d.sign(c) > 0 ? '+' : '-', first_over ? 'O' : 'U'),
                   d.fingerprint()});
  }
}

void r2_add_sites(const Diagram& d, std::vector<MoveSite>& out) {
  const auto faces = face_darts(d);
  for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
    const auto& darts = faces[f];
    const int k = static_cast<int>(darts.size());
    for (int i = 0; i < k; ++i) {
      for (int j = i; j < k; ++j) {
        if (i != j && darts[i] / 2 == darts[j] / 2) continue;
        for (int p_over : {1, 0}) {
          out.push_back({MoveKind::R2Add, {f, i, j, p_over}, p_over ? "over" : "under", d.fingerprint()});
        }
      }
    }
  }
}

void r2_remove_sites(const Diagram& d, std::vector<MoveSite>& out) {
  std::set<std::pair<int, int>> seen;
  for (const auto& f : d.faces()) {
    if (f.darts.size() != 2) continue;
    const int c1 = d.dart_head(f.darts[0]);
    const int c2 = d.dart_head(f.darts[1]);
    if (c1 == c2) continue;
    const int s1 = f.darts[0] / 2;
    const int s2 = f.darts[1] / 2;
    const bool o1a = segment_over_at_start(d, s1), o1b = segment_over_at_end(d, s1);
    const bool o2a = segment_over_at_start(d, s2), o2b = segment_over_at_end(d, s2);
    if (o1a != o1b || o2a != o2b || o1a == o2a) continue;
    const auto key = std::minmax(c1, c2);
    if (!seen.insert({key.first, key.second}).second) continue;
    out.push_back({MoveKind::R2Remove, {key.first, key.second}, o1a ? "over" : "under", d.fingerprint()});
  }
}

void r3_sites(const Diagram& d, std::vector<MoveSite>& out) {
  for (const auto& f : d.faces()) {
    if (f.darts.size() != 3) continue;
    std::array<int, 3> seg{};
    std::array<int, 3> cross{};
    for (int k = 0; k < 3; ++k) {
      seg[k] = f.darts[k] / 2;
      cross[k] = d.dart_head(f.darts[k]);
    }
    if (cross[0] == cross[1] || cross[1] == cross[2] || cross[0] == cross[2]) continue;
    if (seg[0] == seg[1] || seg[1] == seg[2] || seg[0] == seg[2]) continue;
    std::sort(seg.begin(), seg.end());
    // A side is above another if it is the over strand at their shared crossing.
    std::array<int, 3> overs{};
    for (int k = 0; k < 3; ++k) {
      overs[k] = (segment_over_at_start(d, seg[k]) ? 1 : 0) + (segment_over_at_end(d, seg[k]) ? 1 : 0);
    }
    std::array<int, 3> sorted = overs;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != std::array<int, 3>{0, 1, 2}) continue;  // cyclic: no strand lies over both others
    std::string tag;
    for (int k = 0; k < 3; ++k) tag += overs[k] == 2 ? 'T' : overs[k] == 1 ? 'M' : 'B';
    out.push_back({MoveKind::R3, {seg[0], seg[1], seg[2]}, tag, d.fingerprint()});
  }
}

}  // namespace

std::vector<MoveSite> enumerate_move_sites(const Diagram& d, MoveKind kind) {
  std::vector<MoveSite> out;
  switch (kind) {
    case MoveKind::R1Add: r1_add_sites(d, out); break;
    case MoveKind::R1Remove: r1_remove_sites(d, out); break;
    case MoveKind::R2Add: r2_add_sites(d, out); break;
    case MoveKind::R2Remove: r2_remove_sites(d, out); break;
    case MoveKind::R3: r3_sites(d, out); break;
  }
  return out;
}

Diagram apply_move(const Diagram& d, const MoveSite& site) {
  if (site.fingerprint != d.fingerprint()) {
    throw Error(ErrorCode::StaleSite, fmt::format("{} site was enumerated from another diagram", to_string(site.kind)));
  }
  const int n = d.segment_count();
  const int c = d.crossing_count();
  std::vector<std::vector<Passage>> inserts(static_cast<std::size_t>(std::max(1, n)));
  switch (site.kind) {
    case MoveKind::R1Add: {
      const int s = site.data.at(0);
      const bool first_over = site.data.at(2) != 0;
      inserts[s] = {{c, first_over}, {c, !first_over}};
      return splice(d, inserts, {site.data.at(1)});
    }
    case MoveKind::R1Remove: return remove_crossings(d, {site.data.at(0)});
    case MoveKind::R2Remove: return remove_crossings(d, {site.data.at(0), site.data.at(1)});
    case MoveKind::R2Add: {
      const auto faces = face_darts(d);
      const auto& darts = faces.at(site.data.at(0));
      const int di = darts.at(site.data.at(1));
      const int dj = darts.at(site.data.at(2));
      const bool p_over = site.data.at(3) != 0;
      const int a = c;
      const int b = c + 1;
      const int dir_i = di % 2 == 0 ? 1 : -1;
      const int dir_j = dj % 2 == 0 ? 1 : -1;
      const int sign_a = (p_over ? 1 : -1) * dir_i * dir_j;
      // Passages are listed in dart order and flipped for backward darts.
      auto place = [&inserts](int dart, std::vector<Passage> seq) {
        if (dart % 2 == 1) std::reverse(seq.begin(), seq.end());
        auto& slot = inserts[dart / 2];
        slot.insert(slot.end(), seq.begin(), seq.end());
      };
      if (di == dj) {
        place(di, {{a, p_over}, {b, p_over}, {b, !p_over}, {a, !p_over}});
      } else {
        place(di, {{a, p_over}, {b, p_over}});
        place(dj, {{b, !p_over}, {a, !p_over}});
      }
      return splice(d, inserts, {sign_a, -sign_a});
    }
    case MoveKind::R3: {
      std::vector<Passage> out = d.passages();
      for (int s : site.data) std::swap(out[s], out[(s + 1) % n]);
      return Diagram::from_passages(std::move(out), d.signs());
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown move kind");
}

int writhe_change(const Diagram& d, const MoveSite& site) {
  if (site.kind == MoveKind::R1Add) return site.data.at(1);
  if (site.kind == MoveKind::R1Remove) return -d.sign(site.data.at(0));
  return 0;
}

}  // namespace knotrace
