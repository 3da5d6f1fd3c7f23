#include "jv2/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace jv2 {

const char* strandClassName(StrandClass c) {
  switch (c) {
    case StrandClass::Free: return "free";
    case StrandClass::Gene: return "gene";
    case StrandClass::Phene: return "phene";
  }
  return "?";
}

std::vector<StrandInfo> deriveStrands(std::span<const MachineState> machines) {
  const std::size_t n = machines.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (BondSlot s : kAllSlots) {
      const auto& o = machines[i].bonds[s];
      if (o && (*o >= n || machines[*o].bonds[partnerSlot(s)] != MachineId(i))) {
        throw IntegrityError("asymmetric " + std::string(slotName(s)) + " bond at machine " + std::to_string(i));
      }
    }
  }

  std::vector<StrandInfo> strands;
  std::vector<std::size_t> strandOfMachine(n, SIZE_MAX);
  for (std::size_t i = 0; i < n; ++i) {
    if (strandOfMachine[i] != SIZE_MAX) continue;
    StrandInfo info;
    info.members = strandOf(machines, MachineId(i));
    const MachineState& first = machines[info.members.front()];
    info.loop = info.members.size() > 1 && first.bonds.left.has_value();
    const bool anyFolded = std::any_of(info.members.begin(), info.members.end(),
                                       [&](MachineId m) { return machines[m].internal.folded; });
    if (info.members.size() == 1 && first.bonds.empty()) {
      info.kind = StrandClass::Free;
    } else {
      info.kind = anyFolded ? StrandClass::Phene : StrandClass::Gene;
    }
    for (MachineId m : info.members) {
      if (strandOfMachine[m] != SIZE_MAX) throw IntegrityError("machine " + std::to_string(m) + " is in two strands");
      strandOfMachine[m] = strands.size();
    }
    strands.push_back(std::move(info));
  }
  // Strands were discovered in order of their lowest unvisited id, which is their smallest member
  // for chains; sort explicitly so loops rotated to their minimum also line up.
  std::vector<std::size_t> order(strands.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return strands[a].members.front() < strands[b].members.front();
  });
  std::vector<StrandInfo> sorted;
  std::vector<std::size_t> newIndex(strands.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    newIndex[order[k]] = k;
    sorted.push_back(std::move(strands[order[k]]));
  }
  for (auto& s : strandOfMachine) s = newIndex[s];

  // Union-find over phene strands joined by up bonds.
  std::vector<std::size_t> parent(sorted.size());
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto& up = machines[i].bonds.up;
    if (!up) continue;
    const std::size_t a = strandOfMachine[i];
    const std::size_t b = strandOfMachine[*up];
    if (sorted[a].kind != StrandClass::Phene || sorted[b].kind != StrandClass::Phene) continue;
    const std::size_t ra = find(a);
    const std::size_t rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::vector<std::size_t> label(sorted.size(), SIZE_MAX);
  std::size_t next = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (sorted[k].kind != StrandClass::Phene) continue;
    const std::size_t r = find(k);
    if (label[r] == SIZE_MAX) label[r] = next++;
    sorted[k].meshComponent = label[r];
  }
  return sorted;
}

std::size_t countClosedPhenes(std::span<const StrandInfo> strands, std::size_t size) {
  return std::size_t(std::count_if(strands.begin(), strands.end(), [&](const StrandInfo& s) {
    return s.kind == StrandClass::Phene && s.loop && s.members.size() == size;
  }));
}

SummaryRecord summarize(const World& world) {
  SummaryRecord r;
  r.timestep = world.stepNumber;
  r.shatters = world.tally.shatters;
  r.unfolds = world.tally.unfolds;
  const auto strands = deriveStrands(world.machines);
  std::vector<std::size_t> meshSizes;
  for (const StrandInfo& s : strands) {
    if (s.kind == StrandClass::Free) {
      ++r.freeMachines;
      continue;
    }
    ++r.strandCount;
    r.machinesInStrands += s.members.size();
    if (s.kind == StrandClass::Gene) {
      if (s.members.size() >= 2) ++r.genesRemaining;
      continue;
    }
    ++r.phenesFolded;
    if (std::any_of(s.members.begin(), s.members.end(), [&](MachineId m) { return world.machines[m].internal.inMesh; })) {
      ++r.phenesInMesh;
    }
    const std::size_t c = *s.meshComponent;
    if (meshSizes.size() <= c) meshSizes.resize(c + 1, 0);
    ++meshSizes[c];
  }
  if (!meshSizes.empty()) r.largestMeshSize = *std::max_element(meshSizes.begin(), meshSizes.end());
  return r;
}

std::string summaryHeader() {
  return "timestep  free  strands  phenes  inMesh  genes  largestMesh  shatters  unfolds";
}

std::string summaryRow(const SummaryRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%8llu  %4zu  %7zu  %6zu  %6zu  %5zu  %11zu  %8llu  %7llu",
                static_cast<unsigned long long>(r.timestep), r.freeMachines, r.strandCount, r.phenesFolded,
                r.phenesInMesh, r.genesRemaining, r.largestMeshSize, static_cast<unsigned long long>(r.shatters),
                static_cast<unsigned long long>(r.unfolds));
  return buf;
}

bool allMeshed(const World& world) {
  const auto strands = deriveStrands(world.machines);
  std::optional<std::size_t> mesh;
  for (const StrandInfo& s : strands) {
    if (s.kind == StrandClass::Gene && world.machines[s.members.front()].internal.seedGene) continue;
    if (s.kind != StrandClass::Phene) return false;
    if (mesh && *mesh != *s.meshComponent) return false;
    mesh = s.meshComponent;
  }
  return mesh.has_value();
}

}  // namespace jv2
