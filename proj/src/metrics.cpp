#include "dmri/metrics.hpp"

#include "dmri/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace dmri {

namespace {

double magnitude_sse(std::span<Cx const> a, std::span<Cx const> b, double scale)
{
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double const d = scale * std::abs(a[k]) - scale * std::abs(b[k]);
    sum += d * d;
  }
  return sum;
}

} // namespace

double psnr(DynamicSequence const &x, DynamicSequence const &xhat, PeakMode mode)
{
  require_same_shape(x.shape(), xhat.shape(), "psnr");
  double const ref_peak = x.max_magnitude();
  double scale = 1.0;
  double peak = ref_peak;
  if (mode == PeakMode::Fixed255) {
    scale = ref_peak > 0.0 ? 255.0 / ref_peak : 1.0;
    peak = 255.0;
  }
  double const mse = magnitude_sse(x.values(), xhat.values(), scale) / static_cast<double>(x.size());
  if (mse == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return 10.0 * std::log10(peak * peak / mse);
}

double rmse(DynamicSequence const &x, DynamicSequence const &xhat, RmseOptions const &options)
{
  require_same_shape(x.shape(), xhat.shape(), "rmse");
  double const ref_peak = x.max_magnitude();
  double const scale = options.scale.value_or(ref_peak > 0.0 ? 1.0 / ref_peak : 1.0);
  auto const s = x.shape();
  if (options.averaging == RmseAveraging::Global) {
    return std::sqrt(magnitude_sse(x.values(), xhat.values(), scale) / static_cast<double>(x.size()));
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < s.frames; ++t) {
    sum += std::sqrt(magnitude_sse(x.frame(t), xhat.frame(t), scale) / static_cast<double>(s.frame_size()));
  }
  return sum / static_cast<double>(s.frames);
}

void MetricSeries::push(double index, double value)
{
  if (!std::isfinite(index)) {
    throw ValidationError(fmt::format("series '{}': index must be finite", label_));
  }
  if (!points_.empty() && !(index > points_.back().first)) {
    throw ValidationError(
      fmt::format("series '{}': index {} does not follow {}", label_, index, points_.back().first));
  }
  if (!(std::isfinite(value) || value == std::numeric_limits<double>::infinity())) {
    throw ValidationError(fmt::format("series '{}': value {} is neither finite nor +inf", label_, value));
  }
  points_.emplace_back(index, value);
}

std::pair<MetricSeries, MetricSeries> psnr_rmse_sweep(std::span<SweepEntry const> results)
{
  if (results.empty()) {
    throw EmptyInputError("psnr_rmse_sweep needs at least one result");
  }
  MetricSeries psnr_series("psnr_db");
  MetricSeries rmse_series("rmse");
  for (auto const &entry : results) {
    if (psnr_series.size() > 0 && !(entry.ratio > psnr_series.points().back().first)) {
      throw ValidationError(fmt::format("sweep ratios must be strictly increasing, got {} after {}", entry.ratio,
                                        psnr_series.points().back().first));
    }
    psnr_series.push(entry.ratio, psnr(entry.reference.get(), entry.reconstruction.get()));
    rmse_series.push(entry.ratio, rmse(entry.reference.get(), entry.reconstruction.get()));
  }
  return {std::move(psnr_series), std::move(rmse_series)};
}

std::string format_value(double v)
{
  if (v == std::numeric_limits<double>::infinity()) {
    return "inf";
  }
  if (v == -std::numeric_limits<double>::infinity()) {
    return "-inf";
  }
  return fmt::format("{:.17g}", v);
}

namespace {

std::string quote_field(std::string const &field)
{
  if (field.find_first_of(",\"\r\n") == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
  return out;
}

} // namespace

std::string series_to_csv(std::span<MetricSeries const> series)
{
  if (series.empty()) {
    throw EmptyInputError("series_to_csv needs at least one series");
  }
  std::string out = "index";
  std::set<double> indices;
  for (auto const &s : series) {
    out += ',';
    out += quote_field(s.label());
    for (auto const &[index, value] : s.points()) {
      indices.insert(index);
    }
  }
  out += '\n';

  std::vector<std::size_t> cursor(series.size(), 0);
  for (double const index : indices) {
    out += format_value(index);
    for (std::size_t k = 0; k < series.size(); ++k) {
      out += ',';
      auto const &points = series[k].points();
      if (cursor[k] < points.size() && points[cursor[k]].first == index) {
        out += format_value(points[cursor[k]].second);
        ++cursor[k];
      }
    }
    out += '\n';
  }
  return out;
}

} // namespace dmri
