#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sls/events.h"

namespace sls {

// Row-major grid of non-negative gradient magnitudes.
class GradientImage {
 public:
  // Throws ConfigError on zero dimensions, a size mismatch or negative values.
  GradientImage(int width, int height, std::vector<double> magnitudes);
  // All-zero image.
  GradientImage(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<double>& magnitudes() const { return magnitudes_; }

  double at(int x, int y) const { return magnitudes_[Index(x, y)]; }
  void set(int x, int y, double magnitude);

  // Copy with every pixel moved dx columns right; pixels leaving the image
  // are dropped.
  GradientImage ShiftedX(int dx) const;

  friend bool operator==(const GradientImage&, const GradientImage&) = default;

 private:
  std::size_t Index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<double> magnitudes_;
};

// Line x_c * cos(theta) + y_c * sin(theta) = rho, with (x_c, y_c) measured
// from the image center (width / 2, height / 2) and y pointing down.
struct HoughLine {
  double rho = 0.0;
  double theta_deg = 0.0;
  std::int64_t score = 0;

  friend bool operator==(const HoughLine&, const HoughLine&) = default;
};

struct HoughParams {
  double rho_res = 1.0;
  double theta_res_deg = 1.0;
  std::int64_t threshold = 30;
};

// Dense vote grid indexed [theta_bin][rho_bin].
class HoughAccumulator {
 public:
  // Throws ConfigError on non-positive or non-finite resolutions,
  // theta_res_deg above 180 or threshold below 1.
  HoughAccumulator(const GradientImage& image, const HoughParams& params);

  int theta_bins() const { return theta_bins_; }
  int rho_bins() const { return rho_bins_; }
  double theta_of(int theta_bin) const { return theta_bin * params_.theta_res_deg; }
  double rho_of(int rho_bin) const { return (rho_bin - rho_bins_ / 2) * params_.rho_res; }
  std::int64_t votes(int theta_bin, int rho_bin) const {
    return votes_[static_cast<std::size_t>(theta_bin) * rho_bins_ + rho_bin];
  }
  std::int64_t total_votes() const;

  // Local maxima with at least params.threshold votes, highest first.
  std::vector<HoughLine> Peaks() const;

 private:
  bool WrapsAround() const;
  // Votes of a neighbor bin, following the theta wrap (rho flips sign) when
  // the theta bins tile exactly 180 degrees. nullopt outside the grid.
  std::optional<std::int64_t> Neighbor(int theta_bin, int rho_bin) const;

  HoughParams params_;
  int theta_bins_ = 0;
  int rho_bins_ = 0;
  std::vector<std::int64_t> votes_;
};

// Every pixel votes round(magnitude) in each theta bin.
std::vector<HoughLine> HoughTransform(const GradientImage& image, const HoughParams& params = {});

// Lateral offset (signed pixels, positive = right of center) where line meets
// the row at centered height y_c. nullopt for lines parallel to that row.
std::optional<double> OffsetAtRow(const HoughLine& line, double y_c);

// Fixed-capacity window of nearest-marking offsets, newest last. nullopt
// entries mark frames without a qualifying line.
class LaneMemory {
 public:
  // Throws ConfigError on capacity 0 or image_height < 1.
  LaneMemory(std::size_t capacity, int image_height);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return window_.size(); }
  const std::deque<std::optional<double>>& window() const { return window_; }
  // Centered y of the bottom image row.
  double bottom_row() const { return bottom_row_; }
  // Frames pushed since construction, including evicted ones.
  std::uint64_t frames_seen() const { return frames_seen_; }

  void Push(std::optional<double> offset);

 private:
  friend std::optional<LaneChangeEvent> DetectLaneChange(LaneMemory& memory, double min_span);

  std::size_t capacity_;
  double bottom_row_;
  std::deque<std::optional<double>> window_;
  std::uint64_t frames_seen_ = 0;
  // Detector state.
  bool armed_ = true;
  std::optional<std::uint64_t> last_crossing_;
  std::uint64_t emitted_at_ = 0;
};

// Lines within this many degrees of vertical count as lane markings.
inline constexpr double kMarkingMaxTiltDeg = 30.0;

// Pushes the bottom-row offset of the qualifying line nearest the center.
void UpdateMemory(LaneMemory& memory, const std::vector<HoughLine>& lines);

// Reports a lane change when the newest monotone run of offsets crosses zero
// with a total traversal of at least min_span. Consecutive offsets min_span
// or more apart belong to different markings and split the run. Each crossing is reported at
// most once, and after a report the detector stays disarmed until an offset
// beyond min_span / 4 from the center is observed. Offsets moving from
// positive to negative mean the vehicle moved right. Throws ConfigError when
// min_span <= 0.
std::optional<LaneChangeEvent> DetectLaneChange(LaneMemory& memory, double min_span);

// Straight marking from (x_top, row 0) to (x_bottom, last row), in image
// columns.
struct Marking {
  double x_top = 0.0;
  double x_bottom = 0.0;
};

struct RoadGeometry {
  int width = 0;
  int height = 0;
  std::vector<Marking> markings;
};

// One unit-magnitude pixel per row along each marking. Throws ConfigError on
// bad dimensions or markings leaving the image.
GradientImage RenderSyntheticRoad(const RoadGeometry& geometry);

// Frames of a forward camera while the vehicle drifts sideways. Lane
// markings sit lane_width apart, the one at frame 0 nearest the right of
// center at start_offset (bottom-row offset), and all of them move
// -drift_per_frame columns per frame (positive drift = vehicle moving right).
// Markings converge toward the top of the image by top_scale; markings
// leaving the image are not drawn.
struct DriveSpec {
  int width = 160;
  int height = 60;
  double lane_width = 60.0;
  double start_offset = 30.0;
  double drift_per_frame = 0.0;
  double top_scale = 0.5;
  int frames = 40;
};

std::vector<GradientImage> RenderDriveSequence(const DriveSpec& spec);

// Text raster sequence: "width height frames" header, then per frame
// `height` lines of `width` space-separated integer magnitudes.
std::vector<GradientImage> ParseRasterSequence(std::istream& in);
std::string WriteRasterSequence(const std::vector<GradientImage>& frames);

struct LanePipelineParams {
  HoughParams hough;
  std::size_t memory_capacity = 15;
  double min_span = 20.0;
};

struct FrameResult {
  std::size_t frame = 0;
  std::optional<double> offset;
  std::optional<LaneChangeEvent> lane_change;
};

// Runs the lane tracker frame by frame. Frames must share dimensions
// (ConfigError otherwise).
std::vector<FrameResult> RunLanePipeline(const std::vector<GradientImage>& frames,
                                         const LanePipelineParams& params = {});

}  // namespace sls
