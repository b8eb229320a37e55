// Writes synthetic gradient raster sequences for the lane-demo command.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "sls/errors.h"
#include "sls/lane_vision.h"

int main(int argc, char** argv) {
  CLI::App app{"Render a synthetic drive as a gradient raster sequence"};
  sls::DriveSpec spec;
  std::string out_path;
  app.add_option("--width", spec.width);
  app.add_option("--height", spec.height);
  app.add_option("--lane-width", spec.lane_width);
  app.add_option("--start-offset", spec.start_offset);
  app.add_option("--drift", spec.drift_per_frame, "Columns per frame, positive = moving right");
  app.add_option("--top-scale", spec.top_scale);
  app.add_option("--frames", spec.frames);
  app.add_option("--out", out_path, "Output file (default: stdout)");
  CLI11_PARSE(app, argc, argv);

  try {
    const std::string text = sls::WriteRasterSequence(sls::RenderDriveSequence(spec));
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream(out_path, std::ios::binary) << text;
    }
  } catch (const sls::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
