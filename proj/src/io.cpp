#include "multicopy/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "multicopy/fitkit.hpp"

namespace multicopy::io {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

double get_real(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError("missing field '" + key + "' in " + where);
  const json& v = j.at(key);
  if (!v.is_number()) throw ValidationError("field '" + key + "' in " + where + " must be a number");
  return v.get<double>();
}

double get_real_or(const json& j, const std::string& key, double fallback, const std::string& where) {
  return j.contains(key) ? get_real(j, key, where) : fallback;
}

long long get_integer(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_integer())
    throw ValidationError("field '" + key + "' in " + where + " must be an integer");
  return v.get<long long>();
}

std::vector<int> grid_from_json(const json& j) {
  if (j.is_array()) {
    std::vector<int> grid;
    for (const json& v : j) {
      if (!v.is_number_integer()) throw ValidationError("n_grid entries must be integers");
      grid.push_back(v.get<int>());
    }
    return grid;
  }
  reject_unknown_keys(j, {"min", "max", "count", "spacing"}, "n_grid");
  if (!j.contains("min") || !j.contains("max"))
    throw ValidationError("n_grid range needs 'min' and 'max'");
  const int lo = static_cast<int>(get_integer(j, "min", "n_grid"));
  const int hi = static_cast<int>(get_integer(j, "max", "n_grid"));
  const std::string spacing = j.value("spacing", std::string("linear"));
  if (spacing == "linear") {
    if (j.contains("count")) throw ValidationError("'count' applies to log spacing only");
    if (hi < lo) throw ValidationError("n_grid max < min");
    std::vector<int> grid;
    for (int n = lo; n <= hi; ++n) grid.push_back(n);
    return grid;
  }
  if (spacing == "log") {
    if (!j.contains("count")) throw ValidationError("log-spaced n_grid needs 'count'");
    return fitkit::log_spaced_grid(lo, hi, static_cast<int>(get_integer(j, "count", "n_grid")));
  }
  throw ValidationError("n_grid spacing must be 'linear' or 'log'");
}

}  // namespace

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_real(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw ValidationError("not a number: '" + text + "'");
  return v;
}

json spec_to_json(const InputEnsembleSpec& spec) {
  return {{"x0", spec.x0},
          {"r0", spec.r0},
          {"sigma_r", spec.sigma_r},
          {"sigma_x0", spec.sigma_x0},
          {"sigma_thermal", spec.sigma_thermal}};
}

InputEnsembleSpec spec_from_json(const json& j) {
  const std::string where = "spec";
  reject_unknown_keys(j, {"x0", "r0", "sigma_r", "sigma_x0", "sigma_thermal"}, where);
  InputEnsembleSpec spec;
  spec.x0 = get_real(j, "x0", where);
  spec.r0 = get_real(j, "r0", where);
  spec.sigma_r = get_real(j, "sigma_r", where);
  spec.sigma_x0 = get_real_or(j, "sigma_x0", 0.0, where);
  spec.sigma_thermal = get_real_or(j, "sigma_thermal", 0.0, where);
  return validate_spec(spec);
}

json arch_to_json(const ArchitectureSpec& arch) {
  json j;
  switch (arch.kind) {
    case ArchKind::Classical: j["kind"] = "classical"; break;
    case ArchKind::PyramidalEquivalent: j["kind"] = "pyramidal"; break;
    case ArchKind::FixedLoopOptimized: j["kind"] = "loop_optimized"; break;
    case ArchKind::FixedLoopRule:
      if (arch.rule.kind == TransmittanceRule::Kind::OneMinusInverseN) {
        j["kind"] = "loop_one_minus_inv_n";
      } else {
        j["kind"] = "loop_constant";
        j["t"] = arch.rule.t;
      }
      break;
    case ArchKind::MeasurementInduced:
      j["kind"] = "measurement_induced";
      j["mode"] = arch.mode == MeasurementMode::Conditional ? "conditional" : "feedforward";
      break;
    case ArchKind::HarmonicMean: j["kind"] = "harmonic"; break;
  }
  j["loss_eta"] = arch.loss_eta;
  return j;
}

ArchitectureSpec arch_from_json(const json& j) {
  const std::string where = "architecture";
  reject_unknown_keys(j, {"kind", "t", "mode", "loss_eta"}, where);
  if (!j.contains("kind") || !j.at("kind").is_string())
    throw ValidationError("architecture needs a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (j.contains("t") && kind != "loop_constant")
    throw ValidationError("'t' applies to kind loop_constant only");
  if (j.contains("mode") && kind != "measurement_induced")
    throw ValidationError("'mode' applies to kind measurement_induced only");

  ArchitectureSpec arch;
  if (kind == "classical") {
    arch = ArchitectureSpec::classical();
  } else if (kind == "pyramidal") {
    arch = ArchitectureSpec::pyramidal();
  } else if (kind == "loop_optimized") {
    arch = ArchitectureSpec::loop_optimized();
  } else if (kind == "loop_constant") {
    arch = ArchitectureSpec::loop_constant(get_real(j, "t", where));
  } else if (kind == "loop_one_minus_inv_n") {
    arch = ArchitectureSpec::loop_one_minus_inverse_n();
  } else if (kind == "measurement_induced") {
    const std::string mode = j.value("mode", std::string("conditional"));
    if (mode != "conditional" && mode != "feedforward")
      throw ValidationError("measurement_induced mode must be 'conditional' or 'feedforward'");
    arch = ArchitectureSpec::measurement_induced(
        mode == "conditional" ? MeasurementMode::Conditional : MeasurementMode::Feedforward);
  } else if (kind == "harmonic") {
    arch = ArchitectureSpec::harmonic();
  } else {
    throw ValidationError("unknown architecture kind '" + kind + "'");
  }
  arch.loss_eta = get_real_or(j, "loss_eta", 1.0, where);
  return validate_arch(arch);
}

std::vector<montecarlo::SweepConfig> sweeps_from_json(const json& j) {
  const std::string where = "config";
  reject_unknown_keys(j,
                      {"spec", "arch", "architectures", "n_grid", "reps", "master_seed", "backend",
                       "x_m_policy", "stream_tag"},
                      where);
  for (const char* key : {"spec", "n_grid", "master_seed"}) {
    if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "' in config");
  }
  if (j.contains("arch") == j.contains("architectures"))
    throw ValidationError("config needs exactly one of 'arch' or 'architectures'");

  montecarlo::SweepConfig base;
  base.spec = spec_from_json(j.at("spec"));
  base.n_grid = grid_from_json(j.at("n_grid"));
  if (j.contains("reps")) base.reps = static_cast<int>(get_integer(j, "reps", where));
  const json& seed = j.at("master_seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
    throw ValidationError("master_seed must be a non-negative integer");
  base.master_seed = seed.get<std::uint64_t>();
  if (j.contains("backend")) {
    const std::string b = j.at("backend").get<std::string>();
    if (b == "closed_form") {
      base.backend = montecarlo::Backend::ClosedForm;
    } else if (b == "network") {
      base.backend = montecarlo::Backend::Network;
    } else {
      throw ValidationError("backend must be 'closed_form' or 'network'");
    }
  }
  if (j.contains("x_m_policy")) {
    const json& p = j.at("x_m_policy");
    if (p.is_string() && p.get<std::string>() == "equals_x0") {
      base.x_m_policy = {};
    } else if (p.is_object()) {
      reject_unknown_keys(p, {"fixed"}, "x_m_policy");
      base.x_m_policy = {montecarlo::XmPolicy::Kind::Fixed, get_real(p, "fixed", "x_m_policy")};
    } else {
      throw ValidationError("x_m_policy must be \"equals_x0\" or {\"fixed\": value}");
    }
  }
  if (j.contains("stream_tag")) base.stream_tag = j.at("stream_tag").get<std::string>();

  std::vector<json> archs;
  if (j.contains("arch")) {
    archs.push_back(j.at("arch"));
  } else {
    if (!j.at("architectures").is_array() || j.at("architectures").empty())
      throw ValidationError("'architectures' must be a non-empty array");
    for (const json& a : j.at("architectures")) archs.push_back(a);
  }

  std::vector<montecarlo::SweepConfig> out;
  for (const json& a : archs) {
    montecarlo::SweepConfig c = base;
    c.arch = arch_from_json(a);
    montecarlo::validate_config(c);
    out.push_back(std::move(c));
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in '" + path + "': " + e.what());
  }
}

std::string backend_name(montecarlo::Backend backend) {
  return backend == montecarlo::Backend::ClosedForm ? "closed_form" : "network";
}

void write_csv_header(std::ostream& os) { os << kCsvHeader << '\n'; }

void write_csv_rows(std::ostream& os, const montecarlo::SweepConfig& config,
                    const std::vector<SnrStats>& stats) {
  for (const SnrStats& s : stats) {
    os << config.arch.tag() << ',' << s.n_copies << ',' << s.reps << ',' << s.seed << ','
       << format_real(s.mean_snr) << ',' << format_real(s.std_snr) << ',' << format_real(s.gir)
       << ',' << format_real(s.nf) << ',' << backend_name(config.backend) << ','
       << format_real(config.arch.loss_eta) << ',' << format_real(config.spec.x0) << ','
       << format_real(config.spec.r0) << ',' << format_real(config.spec.sigma_r) << '\n';
  }
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  std::string available;
  for (const std::string& h : header) available += (available.empty() ? "" : ", ") + h;
  throw ValidationError("no column '" + name + "'; available columns: " + available);
}

bool CsvTable::has_column(const std::string& name) const {
  for (const std::string& h : header)
    if (h == name) return true;
  return false;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = split_line(line);
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != table.header.size())
      throw ValidationError("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(table.header.size()));
    table.rows.push_back(std::move(cells));
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_csv(in);
}

}  // namespace multicopy::io
