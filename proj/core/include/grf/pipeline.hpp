#pragma once

#include <string>
#include <vector>

#include "grf/align.hpp"
#include "grf/dataset.hpp"

namespace grf {

/// Full preprocessing of one measurement: jump-reference clock alignment,
/// low-pass filtering (20 Hz IMU, 30 Hz GRF), GRF downsampling to 500 Hz and
/// body-weight normalization, template step segmentation between the jump
/// references, 200-sample window extraction, and phase alignment.
std::vector<Step> preprocess_measurement(const DatasetIndex& index,
                                         const CollectionInfo& collection,
                                         const MeasurementInfo& measurement);

struct PreprocessOutcome {
  StepStore store;
  /// One line per measurement that failed alignment/segmentation and was
  /// skipped; the run continues.
  std::vector<std::string> warnings;
};

PreprocessOutcome preprocess_dataset(const DatasetIndex& index);

}  // namespace grf
