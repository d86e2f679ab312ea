#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "repdays/clustering.hpp"
#include "repdays/dataset.hpp"
#include "repdays/dtw.hpp"
#include "repdays/ingest.hpp"
#include "repdays/metrics.hpp"
#include "repdays/synth.hpp"

namespace repdays {

// Every reader throws FormatError on malformed input. Doubles are written with
// round-trip precision so a write/read cycle is lossless.

void write_dataset_json(const Dataset& ds, std::ostream& out);
Dataset read_dataset_json(std::istream& in);

void write_exclusions_json(const std::vector<Exclusion>& exclusions, std::ostream& out);
std::vector<Exclusion> read_exclusions_json(std::istream& in);

/// Hourly CSV in the format parse_csv reads (`timestamp,<var>,...`).
void write_hourly_csv(const Dataset& ds, std::ostream& out);

void write_labels_json(const SynthConfig& cfg, const std::vector<DayLabel>& labels, std::ostream& out);
std::vector<DayLabel> read_labels_json(std::istream& in);

struct DistanceMatrixFile {
  DistanceMatrix matrix;
  std::vector<std::string> variables;
  std::vector<double> weights;
  std::optional<std::size_t> window;
  std::vector<Date> dates;
};

/// Text format: `key,values...` header lines (n, variables, weights, window,
/// dates), then the strict lower triangle row-major, one matrix row per line.
void write_distance_matrix(const DistanceMatrixFile& file, std::ostream& out);
DistanceMatrixFile read_distance_matrix(std::istream& in);

/// Assignments are keyed by date and cluster ids are 1-based in the file.
void write_model_json(const ClusterModel& model, const Dataset& ds, std::ostream& out);
/// Re-attaches a model to `ds`; every dataset date must appear in the file.
ClusterModel read_model_json(std::istream& in, const Dataset& ds);

void write_validation_json(const ValidationReport& r, const Dataset& ds, const ClusterModel& model,
                           std::ostream& out);
void write_validation_csv(const ValidationReport& r, std::ostream& out);

void write_sweep_json(const MetricSweep& s, std::ostream& out);
void write_sweep_csv(const MetricSweep& s, std::ostream& out);
MetricSweep read_sweep_csv(std::istream& in);

/// %.17g, with "-0" folded to "0".
std::string format_exact(double x);

}  // namespace repdays
