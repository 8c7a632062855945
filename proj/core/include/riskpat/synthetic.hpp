#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "riskpat/dataset.hpp"

namespace riskpat::synthetic {

// Counties x N(0,1) features; each planted cell is the conjunction of the
// top empirical tercile of its features, and its members' targets are
// shifted by `shift` standard deviations.
struct PlantedOptions {
  std::size_t counties = 3000;
  std::size_t features = 20;
  std::vector<std::vector<std::size_t>> cells = {{0, 1, 2}};
  double shift = 2.0;
  std::uint64_t seed = 1;
  // Permute the targets after planting, destroying any feature association.
  bool shuffle_target = false;
};

struct PlantedCell {
  std::vector<std::size_t> features;
  std::vector<std::size_t> rows;  // ascending
};

struct PlantedData {
  DataMatrix matrix;
  std::vector<PlantedCell> cells;
};

PlantedData generate_planted(const PlantedOptions& options);

// Row set of values at or above the discretizer's upper tercile cut.
std::vector<std::size_t> top_tercile_rows(std::span<const double> column);

double jaccard(std::vector<std::size_t> a, std::vector<std::size_t> b);

struct GrowthOptions {
  std::vector<Date> dates;
  double national_increment = 10.0;  // mean increment per period over all counties
  double factor = 2.5;               // member increment relative to the national one
  // Members held at zero until `late_start`, then growing at the member rate.
  std::vector<std::size_t> late_risers;
  std::size_t late_start = 1;
  std::uint64_t seed = 7;
};

// Cumulative series for every matrix county. Members of the given row set
// gain factor * g per period and everybody else gains enough less that the
// all-county mean increment is exactly g (late risers aside, see tests).
TargetTimeSeries generate_growth(const DataMatrix& matrix, const std::vector<std::size_t>& members,
                                 const GrowthOptions& options);

}  // namespace riskpat::synthetic
