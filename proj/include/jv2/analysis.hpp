#ifndef JV2_ANALYSIS_HPP
#define JV2_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jv2/engine.hpp"

namespace jv2 {

enum class StrandClass { Free, Gene, Phene };

const char* strandClassName(StrandClass c);

/// A strand reconstructed from the bonds. Nothing in the simulation stores these.
struct StrandInfo {
  std::vector<MachineId> members;  // left to right; a loop starts at its smallest id
  StrandClass kind = StrandClass::Free;
  bool loop = false;
  std::optional<std::size_t> meshComponent;  // phenes only
};

/// Every machine appears in exactly one strand (free machines as singletons). Strands are
/// ordered by first member. Mesh components connect phenes through up bonds and are numbered
/// in order of their smallest phene. Throws IntegrityError on asymmetric bonds.
std::vector<StrandInfo> deriveStrands(std::span<const MachineState> machines);

struct SummaryRecord {
  std::uint64_t timestep = 0;
  std::size_t freeMachines = 0;
  std::size_t strandCount = 0;      // non-free strands
  std::size_t phenesFolded = 0;
  std::size_t phenesInMesh = 0;     // phenes with the in-mesh flag
  std::size_t genesRemaining = 0;   // unfolded strands of two or more machines
  std::size_t largestMeshSize = 0;  // phenes in the largest mesh component
  std::size_t machinesInStrands = 0;
  std::uint64_t shatters = 0;
  std::uint64_t unfolds = 0;
};

SummaryRecord summarize(const World& world);

/// Phenes that are closed loops of exactly `size` machines.
std::size_t countClosedPhenes(std::span<const StrandInfo> strands, std::size_t size);

std::string summaryHeader();
std::string summaryRow(const SummaryRecord& r);

/// True once there are no free machines and every strand except the seed gene is a phene,
/// all in one mesh.
bool allMeshed(const World& world);

}  // namespace jv2

#endif  // JV2_ANALYSIS_HPP
