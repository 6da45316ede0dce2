#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace knotrace {

/// One visit of the knot to a crossing.
struct Passage {
  int crossing;
  bool over;
  friend bool operator==(const Passage&, const Passage&) = default;
};

/// A face of the diagram on the sphere: the cyclic list of darts on its
/// boundary, with the face on the left of every dart.  Dart 2s runs along
/// segment s in the knot's direction, dart 2s+1 against it.
struct Face {
  std::vector<int> darts;
};

/// The four arc-ends at a crossing, counterclockwise from the incoming under-strand.
struct CrossingView {
  int over_arc;
  int under_in_arc;
  int under_out_arc;
  int sign;
  std::array<int, 4> ends;
};

/// Oriented knot diagram stored as its signed Gauss sequence.
///
/// Passage s and passage s+1 (cyclically) bound segment s, so a diagram with
/// C crossings has 2C passages and 2C segments.  Crossings are labelled
/// 0..C-1 in order of first appearance.  At a crossing of sign +1 the
/// half-edges run counterclockwise as (out over, out under, in over,
/// in under); for sign -1 as (out over, in under, in over, out under).
/// Construction checks that every crossing is visited once over and once
/// under and that the induced rotation system is planar (C + 2 faces).
class Diagram {
 public:
  /// The crossingless unknot.
  Diagram() = default;

  /// Validates and relabels.  Throws MALFORMED_CODE.
  static Diagram from_passages(std::vector<Passage> passages, std::vector<int> signs);

  int crossing_count() const { return static_cast<int>(signs_.size()); }
  int segment_count() const { return static_cast<int>(passages_.size()); }
  const std::vector<Passage>& passages() const { return passages_; }
  const std::vector<int>& signs() const { return signs_; }
  int sign(int crossing) const { return signs_[static_cast<std::size_t>(crossing)]; }

  /// Passage indices {over, under} of a crossing.
  std::array<int, 2> passages_of(int crossing) const { return where_[static_cast<std::size_t>(crossing)]; }

  /// Faces on the sphere; empty for the unknot (which has two, left and right of the circle).
  const std::vector<Face>& faces() const { return faces_; }
  /// Crossing reached at the head of a dart.
  int dart_head(int dart) const;
  int dart_tail(int dart) const;

  /// Arcs are maximal runs of segments between under passages.  The unknot has one.
  int arc_count() const { return crossing_count() == 0 ? 1 : crossing_count(); }
  int arc_of_segment(int segment) const { return segment_arc_[static_cast<std::size_t>(segment)]; }
  CrossingView crossing_view(int crossing) const;

  /// Hash of the stored code; changes whenever the diagram does.
  std::uint64_t fingerprint() const;

  /// Same stored code (the derived faces and arcs follow from it).
  friend bool operator==(const Diagram& a, const Diagram& b) {
    return a.passages_ == b.passages_ && a.signs_ == b.signs_;
  }

 private:
  std::vector<Passage> passages_;
  std::vector<int> signs_;
  std::vector<std::array<int, 2>> where_;
  std::vector<Face> faces_;
  std::vector<int> segment_arc_;
};

/// `O1+ U2+ ...`, crossings numbered from 1; the unknot prints as "".
std::string format_gauss(const Diagram& d);
/// Accepts '+', '-' and U+2212 as signs.  Throws MALFORMED_CODE with the token position.
Diagram parse_gauss(std::string_view text);

/// `X[i,j,k,l] ...` with segments labelled 1..2C and ends listed
/// counterclockwise from the incoming under-strand.
std::string format_pd(const Diagram& d);
/// Accepts X[...] or X(...) separated by whitespace or commas.
Diagram parse_pd(std::string_view text);

int writhe(const Diagram& d);

/// Number of Fox n-colorings, constant colorings included.
std::uint64_t fox_colorings(const Diagram& d, int n);

/// Minimal code over basepoint rotations and both orientations.
std::vector<int> canonical_code(const Diagram& d);
/// The diagram re-read from its canonical code: isomorphic diagrams give equal results.
Diagram canonical_form(const Diagram& d);
bool isomorphic(const Diagram& a, const Diagram& b);

}  // namespace knotrace
