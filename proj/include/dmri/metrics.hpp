#pragma once

#include "dmri/sequence.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dmri {

enum struct PeakMode
{
  RefMax,  // PEAK = max |x|
  Fixed255 // both inputs rescaled so max |x| maps to 255, PEAK = 255
};

/// 10 log10(PEAK^2 / MSE) over magnitude images; +inf when the magnitudes match exactly.
double psnr(DynamicSequence const &x, DynamicSequence const &xhat, PeakMode mode = PeakMode::RefMax);

enum struct RmseAveraging
{
  PerFrame, // RMSE of each frame, averaged over frames
  Global    // one RMSE over the whole sequence
};

struct RmseOptions
{
  RmseAveraging averaging = RmseAveraging::PerFrame;
  // Multiplies both inputs; defaults to 1 / max |x| so the reference peaks at 1.
  std::optional<double> scale;
};

double rmse(DynamicSequence const &x, DynamicSequence const &xhat, RmseOptions const &options = {});

/// Labelled (index, value) series; indices strictly increasing, values finite or +inf.
class MetricSeries
{
public:
  explicit MetricSeries(std::string label)
    : label_{std::move(label)}
  {
  }

  void push(double index, double value);

  std::string const &label() const { return label_; }
  std::vector<std::pair<double, double>> const &points() const { return points_; }
  std::size_t size() const { return points_.size(); }

private:
  std::string label_;
  std::vector<std::pair<double, double>> points_;
};

struct SweepEntry
{
  double ratio;
  std::reference_wrapper<DynamicSequence const> reconstruction;
  std::reference_wrapper<DynamicSequence const> reference;
};

/// PSNR and RMSE series ordered by sampling ratio.
std::pair<MetricSeries, MetricSeries> psnr_rmse_sweep(std::span<SweepEntry const> results);

/**
 * CSV with header "index,<label>..." and one row per distinct index; a series
 * without a point at an index leaves that cell blank. Values use 17
 * significant digits, +inf is written as "inf".
 */
std::string series_to_csv(std::span<MetricSeries const> series);

std::string format_value(double v);

} // namespace dmri
