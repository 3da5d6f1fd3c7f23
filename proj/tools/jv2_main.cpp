// jv2: run, validate, compile, render, summarize.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "jv2/analysis.hpp"
#include "jv2/config.hpp"
#include "jv2/engine.hpp"
#include "jv2/render.hpp"
#include "jv2/seedlab.hpp"
#include "jv2/trace.hpp"

namespace fs = std::filesystem;
using namespace jv2;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIntegrity = 2;

void writeText(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

int runCommand(const ConfigFlags& flags) {
  const RunConfig config = loadConfig(flags, std::getenv("JV2_CONFIG"));
  const SeedSpec seed = parseSeed(config.seedText);
  const ValidationReport report = validateSeed(seed);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  if (!report.ok()) {
    for (const auto& e : report.errors) std::cerr << "error: " << e << "\n";
    return kExitValidation;
  }

  const fs::path out(config.outputDir);
  fs::create_directories(out);
  writeText(out / "config.json", toJson(config).dump(2) + "\n");

  World world = initWorld(worldConfig(config), seed);
  TraceWriter trace((out / "trace.jsonl").string());
  std::ofstream summary(out / "summary.txt");
  summary << summaryHeader() << "\n" << summaryRow(summarize(world)) << "\n";

  const auto snapshot = [&](const World& w) {
    const fs::path dir = out / "snapshots";
    fs::create_directories(dir);
    const std::string stem = "step-" + std::to_string(w.stepNumber);
    saveCheckpoint(w, (dir / (stem + ".jv2s")).string());
    writeText(dir / (stem + ".svg"), renderFrame(w));
    summary << summaryRow(summarize(w)) << "\n";
  };

  RunOptions options;
  options.maxSteps = config.maxSteps;
  options.keepEvents = false;
  options.observers.push_back([&](const World& w, std::span<const Event> events) {
    trace.write(events);
    if (config.snapshotEvery > 0 && w.stepNumber % config.snapshotEvery == 0) snapshot(w);
  });
  if (config.stopWhen == StopRule::AllMeshed) {
    options.stopWhen = [](const World& w) { return w.stepNumber % 1000 == 0 && allMeshed(w); };
  }
  const RunResult result = run(world, options);
  trace.flush();

  saveCheckpoint(world, (out / "final.jv2s").string());
  writeText(out / "final.svg", renderFrame(world));
  const SummaryRecord last = summarize(world);
  summary << summaryRow(last) << "\n";
  std::cout << summaryHeader() << "\n" << summaryRow(last) << "\n";
  if (result.stoppedEarly) std::cout << "stopped early at step " << world.stepNumber << "\n";
  return 0;
}

int validateCommand(const std::string& text, bool json) {
  const ValidationReport report = validateSeed(parseSeed(text));
  if (json) {
    nlohmann::ordered_json j;
    j["seed"] = text;
    j["closed"] = report.closed;
    j["totalTurn"] = report.totalTurn;
    j["corners"] = report.corners;
    j["edges"] = report.edges;
    std::vector<bool> bondable;
    for (const auto& m : report.machines) bondable.push_back(m.upBondable);
    j["upBondable"] = bondable;
    j["meshableEdges"] = report.meshableEdges;
    j["warnings"] = report.warnings;
    j["errors"] = report.errors;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << report.text();
  }
  return report.ok() ? 0 : kExitValidation;
}

int renderCommand(const std::string& checkpointPath, const std::string& outPath) {
  const World world = loadCheckpoint(checkpointPath);
  const std::string svg = renderFrame(world);
  if (outPath.empty()) {
    std::cout << svg;
  } else {
    writeText(outPath, svg);
  }
  return 0;
}

int summarizeCommand(const std::vector<std::string>& checkpoints, const std::string& tracePath) {
  if (!checkpoints.empty()) {
    std::cout << summaryHeader() << "\n";
    for (const auto& path : checkpoints) std::cout << summaryRow(summarize(loadCheckpoint(path))) << "\n";
  }
  if (!tracePath.empty()) {
    std::map<std::string, std::size_t> counts;
    std::map<std::string, std::uint64_t> first;
    std::uint64_t lastStep = 0;
    for (const Event& e : readTrace(tracePath)) {
      const std::string kind = eventKindName(e.kind);
      ++counts[kind];
      first.try_emplace(kind, e.step);
      lastStep = e.step;
    }
    std::cout << "event              count   first step\n";
    for (const auto& [kind, n] : counts) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%-16s %7zu %12llu", kind.c_str(), n, static_cast<unsigned long long>(first[kind]));
      std::cout << buf << "\n";
    }
    std::cout << "last event at step " << lastStep << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"JohnnyVon-style self-replicating machine simulator"};
  app.require_subcommand(1);

  ConfigFlags flags;
  std::string seedOpt, container, outDir, configPath;
  std::uint64_t steps = 0, rngSeed = 0, snapshotEvery = 0;
  auto* run = app.add_subcommand("run", "simulate a soup of machines around a seed gene");
  auto* seedFlag = run->add_option("--seed", seedOpt, "seed gene, e.g. 2-2-2");
  run->add_option("--free", flags.free, "free machines TYPE=COUNT (repeatable)");
  auto* stepsFlag = run->add_option("--steps", steps, "number of steps");
  auto* rngFlag = run->add_option("--rng-seed", rngSeed, "random seed");
  auto* containerFlag = run->add_option("--container", container, "container size WxH");
  auto* snapFlag = run->add_option("--snapshot-every", snapshotEvery, "checkpoint + SVG every N steps (0 = never)");
  auto* outFlag = run->add_option("--out", outDir, "output directory");
  auto* configFlag = run->add_option("--config", configPath, "JSON config file (falls back to $JV2_CONFIG)");
  run->add_option("--param", flags.params, "KEY=VALUE override (repeatable)");

  std::string validateSeedText;
  bool validateJson = false;
  auto* validate = app.add_subcommand("validate", "report whether a seed folds and meshes");
  validate->add_option("seed", validateSeedText, "seed gene")->required();
  validate->add_flag("--json", validateJson, "structured output");

  std::string shapeText;
  int expansion = 1;
  auto* compile = app.add_subcommand("compile", "seed gene for a polygon");
  compile->add_option("shape", shapeText, "triangle, square, rectangle:WxH, hexagon, octagon")->required();
  compile->add_option("--expansion", expansion, "machines per side");

  std::string renderIn, renderOut;
  auto* render = app.add_subcommand("render", "SVG frame of a checkpoint");
  render->add_option("checkpoint", renderIn, "checkpoint file")->required();
  render->add_option("-o,--output", renderOut, "SVG file (stdout if omitted)");

  std::vector<std::string> summaryCheckpoints;
  std::string summaryTrace;
  auto* summarize = app.add_subcommand("summarize", "Table-style summary of checkpoints or a trace");
  summarize->add_option("--checkpoint", summaryCheckpoints, "checkpoint file(s)");
  summarize->add_option("--trace", summaryTrace, "trace file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (*seedFlag) flags.seed = seedOpt;
      if (*stepsFlag) flags.steps = steps;
      if (*rngFlag) flags.rngSeed = rngSeed;
      if (*containerFlag) flags.container = container;
      if (*snapFlag) flags.snapshotEvery = snapshotEvery;
      if (*outFlag) flags.outputDir = outDir;
      if (*configFlag) flags.configPath = configPath;
      return runCommand(flags);
    }
    if (*validate) return validateCommand(validateSeedText, validateJson);
    if (*compile) {
      std::cout << compileShape(parseShape(shapeText), expansion).text() << "\n";
      return 0;
    }
    if (*render) return renderCommand(renderIn, renderOut);
    if (*summarize) {
      if (summaryCheckpoints.empty() && summaryTrace.empty()) {
        std::cerr << "summarize needs --checkpoint or --trace\n";
        return kExitValidation;
      }
      return summarizeCommand(summaryCheckpoints, summaryTrace);
    }
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return kExitIntegrity;
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
