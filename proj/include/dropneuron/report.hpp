#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dropneuron/compression.hpp"
#include "dropneuron/matrix.hpp"
#include "dropneuron/train.hpp"

namespace dropneuron {

/// Fixed-width table: per-layer nonzero weights, per-position surviving
/// neurons, totals, compression rate and the metric with and without
/// pruning. Numbers carry 6 significant digits.
std::string format_report(const CompressionReport& report, std::string_view title, std::string_view metric_name);

/// key=value lines with full precision, one fact per line.
std::string report_key_values(const CompressionReport& report, std::string_view metric_name);

/// epoch,cost,data_loss,l1,l2,li,lo,test_metric
std::string train_record_csv(const TrainRecord& record);

/// Binary PGM (P5), one pixel per weight, rows = fan_in. 255 where nonzero.
std::string sparsity_pgm(const Matrix& weights);
/// Same geometry; |w| scaled so the largest magnitude in the layer is 255.
std::string magnitude_pgm(const Matrix& weights);

/// %.6g
std::string sig6(double v);

void write_text(const std::filesystem::path& path, std::string_view content);

}  // namespace dropneuron
