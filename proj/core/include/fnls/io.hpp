#pragma once

#include "fnls/kernel.hpp"
#include "fnls/noise.hpp"
#include "fnls/solver.hpp"
#include "fnls/spectral.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace fnls::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest text that reads back to the same double (17 significant digits).
std::string format_double(double x);

/// Writes to `path.tmp` and renames over `path`; throws IoError.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Header t_0,...,t_n then one row per replicate.
std::string paths_csv(const ScalarPathSet& paths);
/// index,x[,y],re,im
std::string field_csv(const ComplexField& u);
/// t,mass,h1,hamiltonian,cemetery; cemetery rows carry no values.
std::string diagnostics_csv(const Trajectory& traj);

/// Per-row CSV text helper.
std::string join_row(const std::vector<double>& values);

}  // namespace fnls::io
