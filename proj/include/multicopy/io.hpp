// File formats: JSON sweep configs, CSV sweep output, JSON fit reports.
//
// CSV header (exact):
//   arch,N,reps,seed,mean_snr,std_snr,gir,nf,backend,eta,x0,r0,sigma_r
// Reals use 17 significant digits; infinities print as "inf".
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "multicopy/core.hpp"
#include "multicopy/montecarlo.hpp"

namespace multicopy::io {

inline constexpr const char* kCsvHeader =
    "arch,N,reps,seed,mean_snr,std_snr,gir,nf,backend,eta,x0,r0,sigma_r";

std::string format_real(double v);

/// Parses a real written by format_real (accepts "inf", "-inf", "nan").
double parse_real(const std::string& text);

nlohmann::json spec_to_json(const InputEnsembleSpec& spec);
/// Strict: unknown keys and missing x0/r0/sigma_r are ValidationErrors.
InputEnsembleSpec spec_from_json(const nlohmann::json& j);

nlohmann::json arch_to_json(const ArchitectureSpec& arch);
ArchitectureSpec arch_from_json(const nlohmann::json& j);

/// One SweepConfig per listed architecture (`architectures` array or a
/// single `arch` object). Unknown keys are errors at every level.
std::vector<montecarlo::SweepConfig> sweeps_from_json(const nlohmann::json& j);

/// Reads a JSON file; IoError when unreadable, ValidationError when malformed.
nlohmann::json read_json_file(const std::string& path);

std::string backend_name(montecarlo::Backend backend);

void write_csv_header(std::ostream& os);
void write_csv_rows(std::ostream& os, const montecarlo::SweepConfig& config,
                    const std::vector<SnrStats>& stats);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index or ValidationError listing the available columns.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

}  // namespace multicopy::io
