#include "jv2/seedlab.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace jv2 {

std::string SeedSpec::text() const {
  std::string out;
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (i > 0) out += '-';
    out += char('0' + types[i].value());
  }
  return out;
}

UndefinedFoldError::UndefinedFoldError(MachineType left, MachineType right, std::size_t index)
    : std::invalid_argument("no fold angle for adjacent types " + std::to_string(left.value()) + "-" +
                            std::to_string(right.value()) + " at machines " + std::to_string(index + 1) + "," +
                            std::to_string(index + 2)),
      left_(left),
      right_(right),
      index_(index) {}

SeedSpec parseSeed(std::string_view text) {
  SeedSpec spec;
  std::size_t token = 1;
  std::string current;
  const auto flush = [&] {
    if (current.empty()) throw SeedParseError("empty token at position " + std::to_string(token), token);
    if (current.size() != 1 || !std::isdigit(static_cast<unsigned char>(current[0]))) {
      throw SeedParseError("token " + std::to_string(token) + " ('" + current + "') is not a machine type", token);
    }
    const int v = current[0] - '0';
    if (v < 1 || v > 4) {
      throw SeedParseError("token " + std::to_string(token) + " has type " + current + ", expected 1..4", token);
    }
    spec.types.push_back(MachineType::of(v));
    current.clear();
    ++token;
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == '-') {
      flush();
    } else {
      current += c;
    }
  }
  flush();
  if (spec.types.size() < 3) {
    throw SeedParseError("a seed needs at least 3 machines, got " + std::to_string(spec.types.size()), 0);
  }
  return spec;
}

int FoldPlan::corners() const {
  return int(std::count_if(turnAngles.begin(), turnAngles.end(), [](int a) { return a != 0; }));
}

FoldPlan predictFold(const SeedSpec& spec, double pitch) {
  const std::size_t n = spec.types.size();
  FoldPlan plan;
  Vec2d pos = Vec2d::Zero();
  int headingDeg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    plan.vertices.push_back(pos);
    const double h = degToRad(double(headingDeg % 360));
    pos += pitch * Vec2d(std::cos(h), std::sin(h));
    const MachineType l = spec.types[i];
    const MachineType r = spec.types[(i + 1) % n];
    const auto turn = foldAngle(l, r);
    if (!turn) throw UndefinedFoldError(l, r, i);
    plan.turnAngles.push_back(*turn);
    headingDeg += *turn;
  }
  plan.totalTurn = headingDeg;
  plan.closureDistance = pos.norm();
  const int residual = headingDeg % 360;
  plan.closureHeadingErrorDeg = double(residual > 180 ? 360 - residual : residual);
  plan.closed = plan.totalTurn == 360 && plan.closureDistance <= 1e-9;
  return plan;
}

namespace {

std::uint8_t cyclicBendLocation(const SeedSpec& spec, std::size_t i) {
  const std::size_t n = spec.types.size();
  return bendLocation(spec.types[(i + n - 1) % n], spec.types[(i + 1) % n]);
}

}  // namespace

ValidationReport validateSeed(const SeedSpec& spec) {
  ValidationReport report;
  const std::size_t n = spec.types.size();
  if (n < 3) {
    report.errors.push_back("a seed needs at least 3 machines");
    return report;
  }

  std::vector<int> turns(n, 0);
  bool anglesDefined = true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = foldAngle(spec.types[i], spec.types[(i + 1) % n]);
    if (!a) {
      anglesDefined = false;
      report.errors.push_back(UndefinedFoldError(spec.types[i], spec.types[(i + 1) % n], i).what());
    } else {
      turns[i] = *a;
    }
  }
  if (anglesDefined) {
    const FoldPlan plan = predictFold(spec);
    report.closed = plan.closed;
    report.totalTurn = plan.totalTurn;
    report.corners = plan.corners();
    if (!plan.closed) {
      std::ostringstream msg;
      msg << "does not fold into a closed shape (total turn " << plan.totalTurn << " degrees, end "
          << plan.closureDistance << " from start)";
      report.errors.push_back(msg.str());
    }
  }

  // Sides run between corners; a machine sits on the side that ends at the next corner.
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (turns[(i + n - 1) % n] != 0) {
      start = i;
      break;
    }
  }
  report.machines.resize(n);
  std::vector<std::size_t> side;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = (start + k) % n;
    side.push_back(i);
    if (turns[i] != 0 || k + 1 == n) {
      report.edges.push_back(side);
      side.clear();
    }
  }
  for (std::size_t e = 0; e < report.edges.size(); ++e) {
    for (std::size_t i : report.edges[e]) {
      report.machines[i].edge = e;
      report.machines[i].bendLocation = cyclicBendLocation(spec, i);
    }
  }

  // Two copies of the phene mesh along sides of equal length, the partner side running the
  // opposite way.
  for (std::size_t e = 0; e < report.edges.size(); ++e) {
    const auto& mine = report.edges[e];
    bool edgeMeshable = false;
    for (const auto& theirs : report.edges) {
      if (theirs.size() != mine.size()) continue;
      for (std::size_t k = 0; k < mine.size(); ++k) {
        const std::size_t a = mine[k];
        const std::size_t b = theirs[theirs.size() - 1 - k];
        if (pheneUpBondAllowed(spec.types[a], spec.types[b]) &&
            bendLocationBondAllowed(report.machines[a].bendLocation, report.machines[b].bendLocation)) {
          report.machines[a].upBondable = true;
          edgeMeshable = true;
        }
      }
    }
    if (edgeMeshable) report.meshableEdges.push_back(e);
  }

  if (std::none_of(report.machines.begin(), report.machines.end(), [](const MachineMeshing& m) { return m.upBondable; })) {
    report.warnings.push_back("no machine can up-bond to a copy of this phene; it will not mesh");
  }
  if (std::all_of(spec.types.begin(), spec.types.end(), [](MachineType t) { return t.value() == 3; })) {
    report.warnings.push_back("all machines are type 3; the phenes could not form a mesh");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!report.machines[i].upBondable && spec.types[i].isStraight()) {
      report.warnings.push_back("machine " + std::to_string(i + 1) + " (type 1 extender) does not bond in the mesh");
    }
  }
  return report;
}

std::string ValidationReport::text() const {
  std::ostringstream out;
  out << (closed ? "closed" : "open") << ", total turn " << totalTurn << ", corners " << corners << "\n";
  for (std::size_t e = 0; e < edges.size(); ++e) {
    out << "side " << e + 1 << ":";
    for (std::size_t i : edges[e]) {
      out << " m" << i + 1 << (machines[i].upBondable ? "(bond)" : "(none)");
    }
    out << "\n";
  }
  for (const auto& w : warnings) out << "warning: " << w << "\n";
  for (const auto& e : errors) out << "error: " << e << "\n";
  return out.str();
}

Shape parseShape(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  if (s == "triangle") return {ShapeKind::Triangle};
  if (s == "square") return {ShapeKind::Square};
  if (s == "hexagon") return {ShapeKind::Hexagon};
  if (s == "octagon") return {ShapeKind::Octagon};
  const std::string prefix = "rectangle:";
  if (s.rfind(prefix, 0) == 0) {
    const std::string dims = s.substr(prefix.size());
    const auto x = dims.find('x');
    if (x != std::string::npos) {
      try {
        std::size_t used = 0;
        const int w = std::stoi(dims.substr(0, x), &used);
        if (used != x) throw std::invalid_argument("width");
        const std::string hs = dims.substr(x + 1);
        const int h = std::stoi(hs, &used);
        if (used != hs.size()) throw std::invalid_argument("height");
        return {ShapeKind::Rectangle, w, h};
      } catch (const std::exception&) {
      }
    }
    throw std::invalid_argument("rectangle needs the form rectangle:WxH, got '" + std::string(text) + "'");
  }
  throw std::invalid_argument("unknown shape '" + std::string(text) +
                              "' (triangle, square, rectangle:WxH, hexagon, octagon)");
}

namespace {

void appendSide(std::vector<MachineType>& out, int cornerType, int length) {
  if (length == 2) throw std::invalid_argument("a side of exactly two machines cannot fold");
  if (length < 1) throw std::invalid_argument("side length must be positive");
  out.push_back(MachineType::of(cornerType));
  if (length == 1) return;
  for (int i = 0; i < length - 2; ++i) out.push_back(MachineType::of(1));
  out.push_back(MachineType::of(cornerType));
}

}  // namespace

SeedSpec compileShape(const Shape& shape, int sideExpansion) {
  if (sideExpansion < 1) throw std::invalid_argument("side expansion must be at least 1");
  if (sideExpansion == 2) throw std::invalid_argument("side expansion 2 is not supported: sides of two machines cannot fold");
  std::vector<MachineType> types;
  switch (shape.kind) {
    case ShapeKind::Triangle:
      for (int i = 0; i < 3; ++i) appendSide(types, 2, sideExpansion);
      break;
    case ShapeKind::Square:
      for (int i = 0; i < 2; ++i) {
        appendSide(types, 4, sideExpansion);
        appendSide(types, 2, sideExpansion);
      }
      break;
    case ShapeKind::Hexagon:
      for (int i = 0; i < 6; ++i) appendSide(types, 4, sideExpansion);
      break;
    case ShapeKind::Octagon:
      for (int i = 0; i < 4; ++i) {
        appendSide(types, 2, sideExpansion);
        appendSide(types, 3, sideExpansion);
      }
      break;
    case ShapeKind::Rectangle: {
      if (shape.width < 1 || shape.height < 1) throw std::invalid_argument("rectangle sides must be positive");
      if (shape.width == shape.height) {
        throw std::invalid_argument("rectangle needs distinct side lengths; use square for equal sides");
      }
      const int w = shape.width * sideExpansion;
      const int h = shape.height * sideExpansion;
      for (int i = 0; i < 2; ++i) {
        appendSide(types, 2, w);
        appendSide(types, 4, h);
      }
      // Start the seed at the last machine of a long side so the short side sits second.
      std::rotate(types.begin(), types.begin() + (w - 1), types.end());
      break;
    }
  }
  SeedSpec spec{types};
  if (spec.size() < 3 || !predictFold(spec).closed) {
    throw std::invalid_argument("shape/expansion combination does not produce a closed seed");
  }
  return spec;
}

}  // namespace jv2
