#include "kminlab/io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fmt/format.h>
#include <sstream>

#include "kminlab/errors.hpp"

namespace kminlab::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return fmt::format("{:016x}", h);
}

namespace {

double parse_num(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(fmt::format("{}: bad number '{}'", what, s));
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

void write_le_doubles(std::ofstream& out, const std::vector<double>& v) {
  static_assert(std::endian::native == std::endian::little || true);
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  } else {
    for (double d : v) {
      auto bits = std::bit_cast<std::uint64_t>(d);
      char b[8];
      for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
      out.write(b, 8);
    }
  }
}

}  // namespace

void write_kfld(const fs::path& path, const energy::Field& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  const auto& g = *field.grid;
  out << "KFLD 1 " << g.nx << ' ' << g.ny << ' ' << format_double(g.hx) << ' '
      << format_double(g.hy) << ' ' << format_double(g.ox) << ' ' << format_double(g.oy)
      << '\n';
  write_le_doubles(out, field.values);
  if (!out) throw IoError(fmt::format("write failed for '{}'", path.string()));
}

KfldData read_kfld(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic;
  int version = 0;
  KfldData d;
  hs >> magic >> version >> d.nx >> d.ny >> d.hx >> d.hy >> d.ox >> d.oy;
  if (magic != "KFLD" || version != 1 || !hs || d.nx <= 0 || d.ny <= 0)
    throw IoError(fmt::format("'{}' is not a KFLD v1 file", path.string()));
  d.values.resize(static_cast<size_t>(d.nx) * d.ny);
  in.read(reinterpret_cast<char*>(d.values.data()),
          static_cast<std::streamsize>(d.values.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(d.values.size() * sizeof(double)))
    throw IoError(fmt::format("'{}' truncated", path.string()));
  if constexpr (std::endian::native != std::endian::little) {
    for (double& v : d.values) {
      auto bits = std::bit_cast<std::uint64_t>(v);
      std::uint64_t sw = 0;
      for (int i = 0; i < 8; ++i) sw |= ((bits >> (8 * i)) & 0xff) << (8 * (7 - i));
      v = std::bit_cast<double>(sw);
    }
  }
  return d;
}

void write_profile_csv(const fs::path& path, const groundstate::RadialProfile& profile,
                       const std::vector<std::pair<double, double>>& moments) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << "r,Q,Qprime\n";
  for (size_t i = 0; i < profile.r_nodes.size(); ++i)
    out << format_double(profile.r_nodes[i]) << ',' << format_double(profile.q_values[i]) << ','
        << format_double(profile.q_prime[i]) << '\n';
  out << "mass," << format_double(profile.mass) << ",\n";
  out << "grad_norm," << format_double(profile.grad_norm) << ",\n";
  out << "quartic," << format_double(profile.quartic) << ",\n";
  out << "q0," << format_double(profile.q_at_zero) << ",\n";
  for (auto& [p, m] : moments)
    out << "moment_" << format_double(p) << ',' << format_double(m) << ",\n";
  if (!out) throw IoError(fmt::format("write failed for '{}'", path.string()));
}

ProfileFile read_profile_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  ProfileFile f;
  std::string line;
  std::getline(in, line);
  if (line.rfind("r,Q,Qprime", 0) != 0)
    throw IoError(fmt::format("'{}' is not a ground-state CSV", path.string()));
  auto& p = f.profile;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cols = split_csv(line);
    if (cols.size() < 2) throw IoError(fmt::format("'{}': malformed row '{}'", path.string(), line));
    const std::string& c0 = cols[0];
    if (!c0.empty() && (std::isdigit(static_cast<unsigned char>(c0[0])) || c0[0] == '-' ||
                        c0[0] == '+' || c0[0] == '.')) {
      if (cols.size() < 3)
        throw IoError(fmt::format("'{}': malformed sample row '{}'", path.string(), line));
      p.r_nodes.push_back(parse_num(cols[0], "profile r"));
      p.q_values.push_back(parse_num(cols[1], "profile Q"));
      p.q_prime.push_back(parse_num(cols[2], "profile Qprime"));
    } else if (c0 == "mass") {
      p.mass = parse_num(cols[1], "profile mass");
    } else if (c0 == "grad_norm") {
      p.grad_norm = parse_num(cols[1], "profile grad_norm");
    } else if (c0 == "quartic") {
      p.quartic = parse_num(cols[1], "profile quartic");
    } else if (c0 == "q0") {
      p.q_at_zero = parse_num(cols[1], "profile q0");
    } else if (c0.rfind("moment_", 0) == 0) {
      f.moments.emplace_back(parse_num(c0.substr(7), "moment exponent"),
                             parse_num(cols[1], "moment value"));
    } else {
      throw IoError(fmt::format("'{}': unknown footer row '{}'", path.string(), c0));
    }
  }
  if (p.r_nodes.empty()) throw IoError(fmt::format("'{}': no samples", path.string()));
  p.r_max = p.r_nodes.back();
  return f;
}

SweepRow make_sweep_row(const minimizer::SweepEntry& entry) {
  SweepRow r;
  r.b = entry.b;
  r.valid = true;
  if (entry.failed) {
    r.error = entry.error;
    for (char& c : r.error)
      if (c == ',' || c == '\n') c = ';';
    return r;
  }
  const auto& res = entry.result;
  r.converged = res.converged;
  r.iterations = res.iterations;
  r.energy = res.breakdown.total;
  r.kinetic = res.breakdown.kinetic;
  r.kirchhoff = res.breakdown.kirchhoff;
  r.potential = res.breakdown.potential;
  r.quartic = res.breakdown.quartic;
  r.u4_integral = res.breakdown.u4_integral;
  r.mu = res.breakdown.mu;
  r.eps = res.eps_b;
  r.max_x = res.max_x;
  r.max_y = res.max_y;
  r.max_value = res.max_value;
  r.drift = res.constraint_drift;
  r.grad_norm = res.grad_norm;
  return r;
}

SweepWriter::SweepWriter(const fs::path& path, const std::string& config_line, double beta,
                         double beta_star)
    : out_(path) {
  if (!out_) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out_ << "# kminlab-sweep v1\n";
  out_ << "# config: " << config_line << '\n';
  out_ << "# beta: " << format_double(beta) << " beta_star: " << format_double(beta_star)
       << '\n';
  out_ << "b,valid,converged,iterations,energy,kinetic,kirchhoff,potential,quartic,"
          "u4_integral,mu,eps,max_x,max_y,max_value,drift,grad_norm,error\n";
  out_.flush();
}

void SweepWriter::write_row(const SweepRow& r) {
  out_ << format_double(r.b) << ',' << (r.valid ? 1 : 0) << ',' << (r.converged ? 1 : 0) << ','
       << r.iterations << ',' << format_double(r.energy) << ',' << format_double(r.kinetic)
       << ',' << format_double(r.kirchhoff) << ',' << format_double(r.potential) << ','
       << format_double(r.quartic) << ',' << format_double(r.u4_integral) << ','
       << format_double(r.mu) << ',' << format_double(r.eps) << ',' << format_double(r.max_x)
       << ',' << format_double(r.max_y) << ',' << format_double(r.max_value) << ','
       << format_double(r.drift) << ',' << format_double(r.grad_norm) << ',' << r.error << '\n';
  out_.flush();
}

SweepFile read_sweep_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  SweepFile f;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# config: ", 0) == 0) f.config_line = line.substr(10);
      if (line.rfind("# beta: ", 0) == 0) {
        std::istringstream ss(line.substr(8));
        std::string tag;
        ss >> f.beta >> tag >> f.beta_star;
      }
      continue;
    }
    if (!header_seen && line.rfind("b,", 0) == 0) {
      header_seen = true;
      continue;
    }
    auto cols = split_csv(line);
    if (cols.size() < 18) continue;  // partial row from an interrupted run
    SweepRow r;
    r.b = parse_num(cols[0], "sweep b");
    r.valid = cols[1] == "1";
    r.converged = cols[2] == "1";
    r.iterations = static_cast<int>(parse_num(cols[3], "sweep iterations"));
    r.energy = parse_num(cols[4], "sweep energy");
    r.kinetic = parse_num(cols[5], "sweep kinetic");
    r.kirchhoff = parse_num(cols[6], "sweep kirchhoff");
    r.potential = parse_num(cols[7], "sweep potential");
    r.quartic = parse_num(cols[8], "sweep quartic");
    r.u4_integral = parse_num(cols[9], "sweep u4");
    r.mu = parse_num(cols[10], "sweep mu");
    r.eps = parse_num(cols[11], "sweep eps");
    r.max_x = parse_num(cols[12], "sweep max_x");
    r.max_y = parse_num(cols[13], "sweep max_y");
    r.max_value = parse_num(cols[14], "sweep max_value");
    r.drift = parse_num(cols[15], "sweep drift");
    r.grad_norm = parse_num(cols[16], "sweep grad_norm");
    r.error = cols[17];
    f.rows.push_back(std::move(r));
  }
  if (!header_seen) throw IoError(fmt::format("'{}' has no sweep header", path.string()));
  return f;
}

void write_report_csv(const fs::path& path, const std::vector<asymptotics::ReportRow>& rows,
                      const asymptotics::RegimePrediction& pred) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << "# kminlab-report v1\n";
  out << "# regime: " << asymptotics::regime_name(pred.regime) << " p: " << format_double(pred.p)
      << " lambda: " << format_double(pred.lambda) << " kappa: " << format_double(pred.kappa)
      << '\n';
  out << "# energy_normalizer: " << pred.energy_normalizer_desc
      << " | eps_normalizer: " << pred.eps_normalizer_desc
      << " | dist_normalizer: " << pred.dist_normalizer_desc << '\n';
  out << "# limits: energy " << format_double(pred.energy_limit) << " eps "
      << format_double(pred.eps_limit) << " dist " << format_double(pred.dist_limit) << '\n';
  out << "b,e,e_normalized,predicted_limit,eps,eps_normalized,dist,dist_normalized,"
         "gn_ratio,trial_upper,converged\n";
  for (const auto& r : rows)
    out << format_double(r.b) << ',' << format_double(r.e) << ','
        << format_double(r.e_normalized) << ',' << format_double(r.predicted_limit) << ','
        << format_double(r.eps) << ',' << format_double(r.eps_normalized) << ','
        << format_double(r.dist) << ',' << format_double(r.dist_normalized) << ','
        << format_double(r.gn_ratio) << ',' << format_double(r.trial_upper) << ','
        << (r.converged ? 1 : 0) << '\n';
  if (!out) throw IoError(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace kminlab::io
