#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "kminlab/asymptotics.hpp"
#include "kminlab/energy.hpp"
#include "kminlab/groundstate.hpp"
#include "kminlab/minimizer.hpp"

namespace kminlab::io {

/// KFLD field file: ASCII header "KFLD 1 nx ny hx hy ox oy\n" followed by
/// nx*ny little-endian IEEE doubles, row-major (j outer, i inner), masked-out
/// nodes stored as 0.
void write_kfld(const std::filesystem::path& path, const energy::Field& field);

struct KfldData {
  int nx = 0, ny = 0;
  double hx = 0, hy = 0, ox = 0, oy = 0;
  std::vector<double> values;
};
KfldData read_kfld(const std::filesystem::path& path);

/// Ground-state CSV: columns r,Q,Qprime; footer rows mass, grad_norm,
/// quartic, q0 and one moment_<p> row per requested moment.
void write_profile_csv(const std::filesystem::path& path,
                       const groundstate::RadialProfile& profile,
                       const std::vector<std::pair<double, double>>& moments);

struct ProfileFile {
  groundstate::RadialProfile profile;
  std::vector<std::pair<double, double>> moments;
};
ProfileFile read_profile_csv(const std::filesystem::path& path);

/// One sweep.csv row; scalars only (fields go to .kfld).
struct SweepRow {
  double b = 0;
  bool valid = false;      // row completed (crash-safety marker)
  bool converged = false;
  int iterations = 0;
  double energy = 0, kinetic = 0, kirchhoff = 0, potential = 0, quartic = 0, u4_integral = 0;
  double mu = 0, eps = 0, max_x = 0, max_y = 0, max_value = 0;
  double drift = 0, grad_norm = 0;
  std::string error;
};

SweepRow make_sweep_row(const minimizer::SweepEntry& entry);

/// Incremental sweep writer: header + metadata up front, one flushed row per
/// completed entry.
class SweepWriter {
 public:
  SweepWriter(const std::filesystem::path& path, const std::string& config_line, double beta,
              double beta_star);
  void write_row(const SweepRow& row);

 private:
  std::ofstream out_;
};

struct SweepFile {
  std::string config_line;
  double beta = 0, beta_star = 0;
  std::vector<SweepRow> rows;
};
SweepFile read_sweep_csv(const std::filesystem::path& path);

void write_report_csv(const std::filesystem::path& path,
                      const std::vector<asymptotics::ReportRow>& rows,
                      const asymptotics::RegimePrediction& pred);

/// Canonical %.17g text for a double (round-trips exactly).
std::string format_double(double v);

/// Stable FNV-1a 64-bit content hash, hex-encoded.
std::string content_hash(const std::string& text);

}  // namespace kminlab::io
