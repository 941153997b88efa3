#include "dropneuron/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "dropneuron/errors.hpp"

namespace dropneuron {

namespace {

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string pgm_header(const Matrix& w) {
  // Width is fan_out, height fan_in, matching the storage layout.
  return "P5\n" + std::to_string(w.cols()) + " " + std::to_string(w.rows()) + "\n255\n";
}

}  // namespace

std::string sig6(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string format_report(const CompressionReport& r, std::string_view title, std::string_view metric_name) {
  std::ostringstream os;
  auto row = [&os](const std::string& label, std::size_t part, std::size_t whole, double fraction) {
    os << pad(label, 7) << pad(std::to_string(part), 16) << " / " << std::to_string(whole)
       << pad(sig6(100.0 * fraction), 18 - std::to_string(whole).size()) << "\n";
  };
  os << title << "\n\n";
  os << "Weights        nonzero / total            %\n";
  for (std::size_t k = 0; k < r.layers.size(); ++k) {
    row("W" + std::to_string(k + 1), r.layers[k].nonzero, r.layers[k].total, r.layers[k].fraction());
  }
  row("total", r.weights_total.nonzero, r.weights_total.total, r.weights_total.fraction());
  os << "\nNeurons          alive / total            %\n";
  for (std::size_t p = 0; p < r.neurons.size(); ++p) {
    const std::string label = p == 0 ? "input" : (p + 1 == r.neurons.size() ? "output" : "h" + std::to_string(p));
    row(label, r.neurons[p].alive, r.neurons[p].total, r.neurons[p].fraction());
  }
  row("total", r.neurons_total.alive, r.neurons_total.total, r.neurons_total.fraction());
  os << "\noutputs with a nonzero incoming column: " << r.outputs_connected.alive << " / "
     << r.outputs_connected.total << "\n";
  os << "surviving weights: " << r.surviving_weight_count << " of " << r.dense_weight_count << "\n";
  os << "compression rate: " << sig6(r.compression_rate) << "\n";
  os << "\n" << metric_name << " (no prune): " << sig6(r.metric_before) << "\n";
  os << metric_name << " (pruned):   " << sig6(r.metric_after) << "\n";
  return os.str();
}

std::string report_key_values(const CompressionReport& r, std::string_view metric_name) {
  std::ostringstream os;
  for (std::size_t k = 0; k < r.layers.size(); ++k) {
    const std::string p = "layer" + std::to_string(k + 1) + ".";
    os << p << "weights_nonzero=" << r.layers[k].nonzero << "\n";
    os << p << "weights_total=" << r.layers[k].total << "\n";
    os << p << "weights_percent=" << full(100.0 * r.layers[k].fraction()) << "\n";
  }
  os << "weights_nonzero=" << r.weights_total.nonzero << "\n";
  os << "weights_total=" << r.weights_total.total << "\n";
  os << "weights_percent=" << full(100.0 * r.weights_total.fraction()) << "\n";
  for (std::size_t p = 0; p < r.neurons.size(); ++p) {
    const std::string key = "position" + std::to_string(p) + ".";
    os << key << "neurons_alive=" << r.neurons[p].alive << "\n";
    os << key << "neurons_total=" << r.neurons[p].total << "\n";
    os << key << "neurons_percent=" << full(100.0 * r.neurons[p].fraction()) << "\n";
  }
  os << "neurons_alive=" << r.neurons_total.alive << "\n";
  os << "neurons_total=" << r.neurons_total.total << "\n";
  os << "neurons_percent=" << full(100.0 * r.neurons_total.fraction()) << "\n";
  os << "outputs_connected=" << r.outputs_connected.alive << "\n";
  os << "dense_weight_count=" << r.dense_weight_count << "\n";
  os << "surviving_weight_count=" << r.surviving_weight_count << "\n";
  os << "compression_rate=" << full(r.compression_rate) << "\n";
  os << "metric=" << metric_name << "\n";
  os << "metric_no_prune=" << full(r.metric_before) << "\n";
  os << "metric_pruned=" << full(r.metric_after) << "\n";
  return os.str();
}

std::string train_record_csv(const TrainRecord& record) {
  std::ostringstream os;
  os << "epoch,cost,data_loss,l1,l2,li,lo,test_metric\n";
  for (const auto& e : record.epochs) {
    os << e.epoch << ',' << full(e.cost) << ',' << full(e.data_loss) << ',' << full(e.penalties.l1) << ','
       << full(e.penalties.l2) << ',' << full(e.penalties.li) << ',' << full(e.penalties.lo) << ',';
    if (e.test_metric) os << full(*e.test_metric);
    os << '\n';
  }
  return os.str();
}

std::string sparsity_pgm(const Matrix& w) {
  std::string out = pgm_header(w);
  for (double v : w.values()) out.push_back(v != 0.0 ? static_cast<char>(255) : '\0');
  return out;
}

std::string magnitude_pgm(const Matrix& w) {
  std::string out = pgm_header(w);
  double top = 0.0;
  for (double v : w.values()) top = std::max(top, std::abs(v));
  for (double v : w.values()) {
    const double s = top > 0.0 ? std::abs(v) / top : 0.0;
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * s))));
  }
  return out;
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace dropneuron
