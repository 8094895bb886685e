#include "fnls/io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fnls::io {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + ": " + std::strerror(errno));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " into place");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string join_row(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

std::string paths_csv(const ScalarPathSet& paths) {
  std::string out;
  const int n = paths.grid.steps();
  for (int k = 0; k <= n; ++k) {
    if (k) out += ',';
    out += "t_" + std::to_string(k);
  }
  out += '\n';
  std::vector<double> row(n + 1);
  for (int r = 0; r < paths.replicates(); ++r) {
    for (int k = 0; k <= n; ++k) row[k] = paths.values(r, k);
    out += join_row(row);
    out += '\n';
  }
  return out;
}

std::string field_csv(const ComplexField& u) {
  std::string out = u.grid.dim() == 1 ? "index,x,re,im\n" : "index,x,y,re,im\n";
  for (int j = 0; j < u.grid.size(); ++j) {
    std::vector<double> row{u.grid.coordinate(j, 0)};
    if (u.grid.dim() == 2) row.push_back(u.grid.coordinate(j, 1));
    row.push_back(u.values[j].real());
    row.push_back(u.values[j].imag());
    out += std::to_string(j) + ',' + join_row(row) + '\n';
  }
  return out;
}

std::string diagnostics_csv(const Trajectory& traj) {
  std::string out = "t,mass,h1,hamiltonian,cemetery\n";
  for (const auto& d : traj.diagnostics) {
    out += format_double(d.t);
    if (d.cemetery) {
      out += ",,,,1\n";
    } else {
      out += ',' + join_row({d.mass, d.h1, d.hamiltonian}) + ",0\n";
    }
  }
  return out;
}

}  // namespace fnls::io
