// Degrades one procedural scene with every operator, writes the pairs as PNG
// and scores an oracle restoration (the clean image) per task.
//
// usage: degbench_demo [out_dir] [severity]

#include <cstdio>
#include <filesystem>
#include <string>

#include "degbench/core/image_io.hpp"
#include "degbench/core/scene.hpp"
#include "degbench/degradations/apply.hpp"
#include "degbench/metrics/backends.hpp"
#include "degbench/metrics/heuristic.hpp"
#include "degbench/metrics/scores.hpp"

using namespace degbench;

int main(int argc, char** argv) {
  const std::filesystem::path out = argc > 1 ? argv[1] : "demo_out";
  const double severity = argc > 2 ? std::stod(argv[2]) : 0.6;
  std::filesystem::create_directories(out);

  const ImageBuffer clean = calibration_scene(7, 384, 256);
  const Plane depth = calibration_depth(7, 384, 256);
  save_image(clean, out / "clean.png", ImageFormat::png);

  ApplyContext ctx;
  ctx.depth = &depth;
  const SeverityMap map = default_severity_map();
  const MsSsimDistance distance;

  std::printf("%-12s %8s %8s %8s %8s\n", "task", "LPS", "score", "RS", "FS");
  for (TaskKind t : kAllTasks) {
    const SeedTree seed(2024, {static_cast<std::uint32_t>(task_index(t))});
    const ImageBuffer degraded = synthesize(clean, t, severity, map, seed, ctx).image;
    save_image(degraded, out / (std::string(task_name(t)) + ".png"), ImageFormat::png);

    const double lps = distance.dist(degraded, "degraded", clean, "clean").lps;
    if (!heuristic_supports(t)) {
      std::printf("%-12s %8.3f %8s %8s %8s\n", std::string(task_name(t)).c_str(), lps, "-", "-", "-");
      continue;
    }
    const double before = heuristic_degradation_score(degraded, t);
    const double rs = heuristic_degradation_score(clean, t) - before;
    std::printf("%-12s %8.3f %8.3f %8.3f %8.3f\n", std::string(task_name(t)).c_str(), lps, before, rs,
                final_score(lps, rs));
  }
  std::printf("wrote %zu images to %s\n", kAllTasks.size() + 1, out.string().c_str());
  return 0;
}
