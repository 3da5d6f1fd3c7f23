#ifndef JV2_SEEDLAB_HPP
#define JV2_SEEDLAB_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "jv2/geometry.hpp"
#include "jv2/rulebook.hpp"

namespace jv2 {

struct SeedSpec {
  std::vector<MachineType> types;

  std::size_t size() const { return types.size(); }
  /// "2-2-2" form.
  std::string text() const;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

class SeedParseError : public std::invalid_argument {
 public:
  SeedParseError(const std::string& what, std::size_t token) : std::invalid_argument(what), token_(token) {}
  /// 1-based index of the offending token (0 when the whole seed is at fault).
  std::size_t token() const { return token_; }

 private:
  std::size_t token_;
};

/// Raised when a seed walks through a type pair with no fold angle.
class UndefinedFoldError : public std::invalid_argument {
 public:
  UndefinedFoldError(MachineType left, MachineType right, std::size_t index);
  MachineType left() const { return left_; }
  MachineType right() const { return right_; }
  std::size_t index() const { return index_; }

 private:
  MachineType left_;
  MachineType right_;
  std::size_t index_;
};

/// Digits 1..4 separated by '-', whitespace tolerated. At least three machines.
SeedSpec parseSeed(std::string_view text);

struct FoldPlan {
  std::vector<Vec2d> vertices;  // machine middles of the ideal fold
  std::vector<int> turnAngles;  // degrees, turn after machine i (towards i+1, wrapping)
  int totalTurn = 0;
  bool closed = false;
  double closureDistance = 0.0;
  double closureHeadingErrorDeg = 0.0;

  int corners() const;
};

/// Turtle walk: emit position, advance one pitch, turn CCW by the fold angle to the next
/// machine. Closed iff the turns sum to exactly 360 degrees and the walk returns to the
/// origin within 1e-9. Throws UndefinedFoldError on a pair with no fold angle.
FoldPlan predictFold(const SeedSpec& spec, double pitch = 2.0);

struct MachineMeshing {
  std::size_t edge = 0;      // index of the polygon side the machine sits on
  std::uint8_t bendLocation = 3;
  bool upBondable = false;   // some same-length side of a copy offers a compatible partner
};

struct ValidationReport {
  bool closed = false;
  int totalTurn = 0;
  int corners = 0;
  std::vector<std::vector<std::size_t>> edges;  // machine indices per side, in order
  std::vector<MachineMeshing> machines;
  std::vector<std::size_t> meshableEdges;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
  std::string text() const;
};

ValidationReport validateSeed(const SeedSpec& spec);

enum class ShapeKind { Triangle, Square, Rectangle, Hexagon, Octagon };

struct Shape {
  ShapeKind kind = ShapeKind::Triangle;
  int width = 0;  // rectangle only: machines on the long (type-2) sides
  int height = 0; // rectangle only: machines on the short (type-4) sides
};

/// "triangle", "square", "hexagon", "octagon", "rectangle:WxH".
Shape parseShape(std::string_view text);

/// Seed folding into the requested polygon with `sideExpansion` machines per side.
/// A side of n machines is its corner type at both ends with n-2 type-1 extenders between.
/// Sides of exactly two machines cannot be built and are rejected.
SeedSpec compileShape(const Shape& shape, int sideExpansion);

}  // namespace jv2

#endif  // JV2_SEEDLAB_HPP
