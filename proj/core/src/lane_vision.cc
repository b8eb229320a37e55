#include "sls/lane_vision.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>
#include <string>

#include "sls/errors.h"

namespace sls {
namespace {

// Exact values on the axes so that half-integer rho never depends on libm.
void CosSin(double theta_deg, double& c, double& s) {
  if (theta_deg == 0.0) {
    c = 1.0;
    s = 0.0;
  } else if (theta_deg == 90.0) {
    c = 0.0;
    s = 1.0;
  } else {
    const double rad = theta_deg * std::numbers::pi / 180.0;
    c = std::cos(rad);
    s = std::sin(rad);
  }
}

std::int64_t QuantizedVotes(double magnitude) {
  return static_cast<std::int64_t>(std::llround(magnitude));
}

}  // namespace

GradientImage::GradientImage(int width, int height, std::vector<double> magnitudes)
    : width_(width), height_(height), magnitudes_(std::move(magnitudes)) {
  if (width_ < 1 || height_ < 1) {
    throw ConfigError("gradient image dimensions must be at least 1x1");
  }
  if (magnitudes_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
    throw ConfigError("gradient image holds " + std::to_string(magnitudes_.size()) +
                      " values, expected " + std::to_string(width_ * height_));
  }
  for (double m : magnitudes_) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw ConfigError("gradient magnitudes must be finite and non-negative");
    }
  }
}

GradientImage::GradientImage(int width, int height)
    : GradientImage(width, height,
                    std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) *
                                        static_cast<std::size_t>(std::max(height, 0)))) {}

void GradientImage::set(int x, int y, double magnitude) {
  if (x < 0 || x >= width_ || y < 0 || y >= height_) {
    throw ConfigError("pixel (" + std::to_string(x) + ", " + std::to_string(y) +
                      ") is outside the image");
  }
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) {
    throw ConfigError("gradient magnitudes must be finite and non-negative");
  }
  magnitudes_[Index(x, y)] = magnitude;
}

GradientImage GradientImage::ShiftedX(int dx) const {
  GradientImage shifted(width_, height_);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      const int target = x + dx;
      if (target >= 0 && target < width_) shifted.magnitudes_[Index(target, y)] = at(x, y);
    }
  }
  return shifted;
}

HoughAccumulator::HoughAccumulator(const GradientImage& image, const HoughParams& params)
    : params_(params) {
  if (!(params.rho_res > 0.0) || !std::isfinite(params.rho_res)) {
    throw ConfigError("rho resolution must be positive");
  }
  if (!(params.theta_res_deg > 0.0) || !(params.theta_res_deg <= 180.0)) {
    throw ConfigError("theta resolution must be in (0, 180] degrees");
  }
  if (params.threshold < 1) throw ConfigError("vote threshold must be at least 1");

  theta_bins_ = static_cast<int>(std::ceil(180.0 / params.theta_res_deg - 1e-9));
  const double half_w = image.width() / 2.0;
  const double half_h = image.height() / 2.0;
  const int rho_half = static_cast<int>(std::ceil(std::hypot(half_w, half_h) / params.rho_res));
  rho_bins_ = 2 * rho_half + 1;
  votes_.assign(static_cast<std::size_t>(theta_bins_) * rho_bins_, 0);

  std::vector<double> cosines(theta_bins_);
  std::vector<double> sines(theta_bins_);
  for (int t = 0; t < theta_bins_; ++t) CosSin(theta_of(t), cosines[t], sines[t]);

  for (int y = 0; y < image.height(); ++y) {
    const double yc = y - half_h;
    for (int x = 0; x < image.width(); ++x) {
      const std::int64_t vote = QuantizedVotes(image.at(x, y));
      if (vote == 0) continue;
      const double xc = x - half_w;
      for (int t = 0; t < theta_bins_; ++t) {
        const double rho = xc * cosines[t] + yc * sines[t];
        const auto bin = static_cast<int>(std::llround(rho / params.rho_res)) + rho_half;
        votes_[static_cast<std::size_t>(t) * rho_bins_ + std::clamp(bin, 0, rho_bins_ - 1)] +=
            vote;
      }
    }
  }
}

std::int64_t HoughAccumulator::total_votes() const {
  std::int64_t total = 0;
  for (std::int64_t v : votes_) total += v;
  return total;
}

bool HoughAccumulator::WrapsAround() const {
  return std::abs(theta_bins_ * params_.theta_res_deg - 180.0) < 1e-9;
}

std::vector<HoughLine> HoughAccumulator::Peaks() const {
  struct Candidate {
    int theta_bin;
    int rho_bin;
    std::int64_t score;
  };
  std::vector<Candidate> peaks;
  const bool wraps = WrapsAround();
  for (int t = 0; t < theta_bins_; ++t) {
    for (int r = 0; r < rho_bins_; ++r) {
      const std::int64_t score = votes(t, r);
      if (score < params_.threshold) continue;
      bool is_peak = true;
      for (int dt = -1; dt <= 1 && is_peak; ++dt) {
        for (int dr = -1; dr <= 1 && is_peak; ++dr) {
          if (dt == 0 && dr == 0) continue;
          int nt = t + dt;
          int nr = r + dr;
          if (nt < 0 || nt >= theta_bins_) {
            if (!wraps || theta_bins_ == 1) continue;
            nt = nt < 0 ? theta_bins_ - 1 : 0;
            nr = rho_bins_ - 1 - nr;
          }
          if (nr < 0 || nr >= rho_bins_) continue;
          // Plateaus resolve to their first bin in scan order.
          const bool earlier = nt < t || (nt == t && nr < r);
          const std::int64_t other = votes(nt, nr);
          is_peak = earlier ? score > other : score >= other;
        }
      }
      if (is_peak) peaks.push_back({t, r, score});
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });

  std::vector<HoughLine> lines;
  lines.reserve(peaks.size());
  for (const Candidate& p : peaks) {
    lines.push_back({rho_of(p.rho_bin), theta_of(p.theta_bin), p.score});
  }
  return lines;
}

std::vector<HoughLine> HoughTransform(const GradientImage& image, const HoughParams& params) {
  return HoughAccumulator(image, params).Peaks();
}

std::optional<double> OffsetAtRow(const HoughLine& line, double y_c) {
  double c = 0.0;
  double s = 0.0;
  CosSin(line.theta_deg, c, s);
  if (std::abs(c) < 1e-9) return std::nullopt;
  return (line.rho - y_c * s) / c;
}

LaneMemory::LaneMemory(std::size_t capacity, int image_height)
    : capacity_(capacity), bottom_row_((image_height - 1) - image_height / 2.0) {
  if (capacity == 0) throw ConfigError("lane memory capacity must be at least 1 frame");
  if (image_height < 1) throw ConfigError("image height must be at least 1");
}

void LaneMemory::Push(std::optional<double> offset) {
  if (window_.size() == capacity_) window_.pop_front();
  window_.push_back(offset);
  ++frames_seen_;
}

void UpdateMemory(LaneMemory& memory, const std::vector<HoughLine>& lines) {
  std::optional<double> nearest;
  for (const HoughLine& line : lines) {
    const double tilt = std::min(line.theta_deg, 180.0 - line.theta_deg);
    if (tilt > kMarkingMaxTiltDeg) continue;
    const std::optional<double> offset = OffsetAtRow(line, memory.bottom_row());
    if (offset && (!nearest || std::abs(*offset) < std::abs(*nearest))) nearest = offset;
  }
  memory.Push(nearest);
}

std::optional<LaneChangeEvent> DetectLaneChange(LaneMemory& memory, double min_span) {
  if (!(min_span > 0.0)) throw ConfigError("min_span must be positive");

  struct Sample {
    std::uint64_t frame;
    double offset;
  };
  std::vector<Sample> samples;
  const std::uint64_t first_frame = memory.frames_seen_ - memory.window_.size();
  for (std::size_t i = 0; i < memory.window_.size(); ++i) {
    if (memory.window_[i]) samples.push_back({first_frame + i, *memory.window_[i]});
  }
  if (samples.empty()) return std::nullopt;

  const Sample& latest = samples.back();
  if (!memory.armed_) {
    if (latest.frame > memory.emitted_at_ && std::abs(latest.offset) > min_span / 4.0) {
      memory.armed_ = true;
    }
    // The rearming sample may itself complete a crossing, so fall through.
    if (!memory.armed_) return std::nullopt;
  }

  // Newest monotone run, equal steps allowed. A step of min_span or more means
  // the nearest marking switched to another line, which also ends the run.
  std::size_t start = samples.size() - 1;
  int direction = 0;
  while (start > 0) {
    const double step = samples[start].offset - samples[start - 1].offset;
    const int step_dir = (step > 0.0) - (step < 0.0);
    if (std::abs(step) >= min_span) break;
    if (step_dir != 0 && direction != 0 && step_dir != direction) break;
    if (step_dir != 0) direction = step_dir;
    --start;
  }

  const double from = samples[start].offset;
  const double to = latest.offset;
  const bool moved_right = from > 0.0 && to < 0.0;
  const bool moved_left = from < 0.0 && to > 0.0;
  if (!(moved_right || moved_left) || std::abs(from - to) < min_span) return std::nullopt;

  // A crossing is identified by its first sample on the far side of zero.
  std::uint64_t crossing = latest.frame;
  for (std::size_t i = start; i < samples.size(); ++i) {
    if ((moved_right && samples[i].offset < 0.0) || (moved_left && samples[i].offset > 0.0)) {
      crossing = samples[i].frame;
      break;
    }
  }
  if (memory.last_crossing_ && crossing <= *memory.last_crossing_) return std::nullopt;

  memory.armed_ = false;
  memory.last_crossing_ = crossing;
  memory.emitted_at_ = latest.frame;
  return LaneChangeEvent{moved_right ? Side::kRight : Side::kLeft};
}

GradientImage RenderSyntheticRoad(const RoadGeometry& geometry) {
  if (geometry.width < 1 || geometry.height < 1) {
    throw ConfigError("road image dimensions must be at least 1x1");
  }
  GradientImage image(geometry.width, geometry.height);
  const double max_x = geometry.width - 1;
  for (const Marking& marking : geometry.markings) {
    for (double x : {marking.x_top, marking.x_bottom}) {
      if (!(x >= 0.0 && x <= max_x)) {
        throw ConfigError("marking column " + std::to_string(x) + " lies outside [0, " +
                          std::to_string(geometry.width - 1) + "]");
      }
    }
    for (int y = 0; y < geometry.height; ++y) {
      const double frac = geometry.height == 1 ? 0.0 : static_cast<double>(y) / (geometry.height - 1);
      const double x = marking.x_top + (marking.x_bottom - marking.x_top) * frac;
      image.set(static_cast<int>(std::lround(x)), y, 1.0);
    }
  }
  return image;
}

std::vector<GradientImage> RenderDriveSequence(const DriveSpec& spec) {
  if (!(spec.lane_width > 0.0)) throw ConfigError("lane width must be positive");
  if (spec.frames < 1) throw ConfigError("a drive sequence needs at least one frame");
  const double center = spec.width / 2.0;
  const double max_x = spec.width - 1;
  std::vector<GradientImage> frames;
  frames.reserve(static_cast<std::size_t>(spec.frames));
  for (int f = 0; f < spec.frames; ++f) {
    const double shift = spec.start_offset - spec.drift_per_frame * f;
    // Lowest lane index whose marking can still be on screen.
    const auto first = static_cast<long>(std::floor((-center - shift) / spec.lane_width));
    RoadGeometry geometry{spec.width, spec.height, {}};
    for (long k = first;; ++k) {
      const double offset = shift + static_cast<double>(k) * spec.lane_width;
      const double x_bottom = center + offset;
      if (x_bottom > max_x) break;
      const double x_top = center + spec.top_scale * offset;
      const auto on_screen = [&](double x) { return std::lround(x) >= 0 && std::lround(x) <= max_x; };
      if (!on_screen(x_bottom) || !on_screen(x_top)) continue;
      geometry.markings.push_back({std::round(x_top), std::round(x_bottom)});
    }
    frames.push_back(RenderSyntheticRoad(geometry));
  }
  return frames;
}

namespace {

std::vector<long long> ParseIntegers(const std::string& line, int line_no) {
  std::vector<long long> values;
  std::size_t pos = 0;
  while (pos < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[pos]))) {
      ++pos;
      continue;
    }
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    long long value = 0;
    auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, value);
    if (ec != std::errc() || ptr != line.data() + end) {
      throw ParseError(line_no, static_cast<int>(pos) + 1,
                       "expected an integer, got '" + line.substr(pos, end - pos) + "'");
    }
    values.push_back(value);
    pos = end;
  }
  return values;
}

bool IsBlank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

}  // namespace

std::vector<GradientImage> ParseRasterSequence(std::istream& in) {
  std::string line;
  int line_no = 0;
  const auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!IsBlank(line)) return true;
    }
    return false;
  };

  if (!next_line()) throw ParseError(line_no, 0, "missing 'width height frames' header");
  const std::vector<long long> header = ParseIntegers(line, line_no);
  if (header.size() != 3) {
    throw ParseError(line_no, 1, "header must be 'width height frames'");
  }
  const long long width = header[0];
  const long long height = header[1];
  const long long frames = header[2];
  if (width < 1 || height < 1 || width > 1 << 14 || height > 1 << 14) {
    throw ParseError(line_no, 1, "image dimensions must be between 1 and 16384");
  }
  if (frames < 1) throw ParseError(line_no, 1, "sequence holds no frames");

  std::vector<GradientImage> sequence;
  for (long long f = 0; f < frames; ++f) {
    std::vector<double> pixels;
    pixels.reserve(static_cast<std::size_t>(width * height));
    for (long long row = 0; row < height; ++row) {
      if (!next_line()) {
        throw ParseError(line_no, 0,
                         "frame " + std::to_string(f) + " ends after " + std::to_string(row) +
                             " of " + std::to_string(height) + " rows");
      }
      const std::vector<long long> values = ParseIntegers(line, line_no);
      if (static_cast<long long>(values.size()) != width) {
        throw ParseError(line_no, 1,
                         "row holds " + std::to_string(values.size()) + " values, expected " +
                             std::to_string(width));
      }
      for (long long v : values) {
        if (v < 0) throw ParseError(line_no, 1, "gradient magnitudes must be non-negative");
        pixels.push_back(static_cast<double>(v));
      }
    }
    sequence.emplace_back(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
  }
  if (next_line()) throw ParseError(line_no, 1, "unexpected data after the last frame");
  return sequence;
}

std::string WriteRasterSequence(const std::vector<GradientImage>& frames) {
  if (frames.empty()) throw ConfigError("cannot write an empty raster sequence");
  std::ostringstream out;
  out << frames.front().width() << ' ' << frames.front().height() << ' ' << frames.size() << '\n';
  for (const GradientImage& frame : frames) {
    if (frame.width() != frames.front().width() || frame.height() != frames.front().height()) {
      throw ConfigError("raster frames must share dimensions");
    }
    for (int y = 0; y < frame.height(); ++y) {
      for (int x = 0; x < frame.width(); ++x) {
        if (x > 0) out << ' ';
        out << std::llround(frame.at(x, y));
      }
      out << '\n';
    }
  }
  return out.str();
}

std::vector<FrameResult> RunLanePipeline(const std::vector<GradientImage>& frames,
                                         const LanePipelineParams& params) {
  std::vector<FrameResult> results;
  if (frames.empty()) return results;
  LaneMemory memory(params.memory_capacity, frames.front().height());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].width() != frames.front().width() ||
        frames[i].height() != frames.front().height()) {
      throw ConfigError("frame " + std::to_string(i) + " differs in size from frame 0");
    }
    UpdateMemory(memory, HoughTransform(frames[i], params.hough));
    results.push_back(FrameResult{.frame = i,
                                  .offset = memory.window().back(),
                                  .lane_change = DetectLaneChange(memory, params.min_span)});
  }
  return results;
}

}  // namespace sls
