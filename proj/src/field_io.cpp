#include "curveforge/field_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace curveforge {

namespace {

void parse_csv_header(std::istream& in, int& dim, int& n, int& nodes) {
  std::string line;
  if (!std::getline(in, line) ||
      std::sscanf(line.c_str(), "# torus dim=%d points=%d nodes=%d", &dim, &n, &nodes) != 3)
    throw std::runtime_error("read_csv: missing metadata line");
  std::getline(in, line);  // column header row
}

void write_csv_header(std::ostream& out, const TorusGrid& g, int nodes, bool with_time) {
  out << "# torus dim=" << g.dim() << " points=" << g.points_per_axis() << " nodes=" << nodes
      << "\n";
  static const char* names[kMaxDim] = {"x", "y", "z", "w"};
  for (int a = 0; a < g.dim(); ++a) out << names[a] << ",";
  if (with_time) out << "t,";
  out << "value\n";
}

void append_rows(std::ostream& out, const GridField& f, const double* t) {
  char buf[32];
  double x[kMaxDim];
  for (std::size_t p = 0; p < f.grid.total_points(); ++p) {
    f.grid.coordinates(p, x);
    for (int a = 0; a < f.grid.dim(); ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", x[a]);
      out << buf << ",";
    }
    if (t) {
      std::snprintf(buf, sizeof buf, "%.17g", *t);
      out << buf << ",";
    }
    std::snprintf(buf, sizeof buf, "%.17g", f.samples[static_cast<Eigen::Index>(p)]);
    out << buf << "\n";
  }
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("binary field: truncated header");
  return v;
}

void read_f64(std::istream& in, double* dst, std::size_t count) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw std::runtime_error("binary field: truncated data");
}

}  // namespace

void write_csv(const std::string& path, const GridField& f) {
  auto out = open_out(path);
  write_csv_header(out, f.grid, 0, false);
  append_rows(out, f, nullptr);
}

void write_csv(const std::string& path, const SpaceTimeField& f) {
  auto out = open_out(path);
  write_csv_header(out, f.grid, f.node_count(), true);
  for (int j = 0; j < f.node_count(); ++j) {
    const GridField node = f.at_node(j);
    const double t = f.time_nodes[j];
    append_rows(out, node, &t);
  }
}

namespace {

// Reads the (coordinates..., [t,], value) rows; coordinates are implied by
// row order, so only the trailing columns are consumed.
void read_rows(std::istream& in, int columns, bool with_time, std::vector<double>& time_col,
               std::vector<double>& value_col) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(row, cell, ',')) cells.push_back(std::strtod(cell.c_str(), nullptr));
    if (static_cast<int>(cells.size()) != columns)
      throw std::runtime_error("read_csv: wrong column count");
    value_col.push_back(cells.back());
    if (with_time) time_col.push_back(cells[columns - 2]);
  }
}

}  // namespace

GridField read_grid_csv(const std::string& path) {
  auto in = open_in(path);
  int dim = 0, n = 0, nodes = 0;
  parse_csv_header(in, dim, n, nodes);
  if (nodes != 0) throw std::runtime_error("read_grid_csv: file holds a space-time field");
  TorusGrid g(dim, n);
  std::vector<double> times, values;
  read_rows(in, dim + 1, false, times, values);
  if (values.size() != g.total_points()) throw std::runtime_error("read_grid_csv: row count");
  GridField f(g);
  for (std::size_t p = 0; p < values.size(); ++p) f.samples[static_cast<Eigen::Index>(p)] = values[p];
  return f;
}

SpaceTimeField read_spacetime_csv(const std::string& path) {
  auto in = open_in(path);
  int dim = 0, n = 0, nodes = 0;
  parse_csv_header(in, dim, n, nodes);
  if (nodes <= 0) throw std::runtime_error("read_spacetime_csv: file holds a plain field");
  TorusGrid g(dim, n);
  std::vector<double> times, values;
  read_rows(in, dim + 2, true, times, values);
  if (values.size() != g.total_points() * static_cast<std::size_t>(nodes))
    throw std::runtime_error("read_spacetime_csv: row count");
  Eigen::VectorXd node_times(nodes);
  for (int j = 0; j < nodes; ++j) node_times[j] = times[static_cast<std::size_t>(j) * g.total_points()];
  SpaceTimeField f(g, node_times);
  std::size_t r = 0;
  for (int j = 0; j < nodes; ++j)
    for (std::size_t p = 0; p < g.total_points(); ++p)
      f.values(static_cast<Eigen::Index>(p), j) = values[r++];
  return f;
}

void write_binary(const std::string& path, const GridField& f) {
  auto out = open_out(path, std::ios::binary);
  write_u32(out, static_cast<std::uint32_t>(f.grid.dim()));
  write_u32(out, static_cast<std::uint32_t>(f.grid.points_per_axis()));
  write_u32(out, 0);
  out.write(reinterpret_cast<const char*>(f.samples.data()),
            static_cast<std::streamsize>(f.samples.size() * sizeof(double)));
}

void write_binary(const std::string& path, const SpaceTimeField& f) {
  auto out = open_out(path, std::ios::binary);
  write_u32(out, static_cast<std::uint32_t>(f.grid.dim()));
  write_u32(out, static_cast<std::uint32_t>(f.grid.points_per_axis()));
  write_u32(out, static_cast<std::uint32_t>(f.node_count()));
  out.write(reinterpret_cast<const char*>(f.time_nodes.data()),
            static_cast<std::streamsize>(f.time_nodes.size() * sizeof(double)));
  for (int j = 0; j < f.node_count(); ++j) {
    Eigen::VectorXd col = f.values.col(j);
    out.write(reinterpret_cast<const char*>(col.data()),
              static_cast<std::streamsize>(col.size() * sizeof(double)));
  }
}

GridField read_grid_binary(const std::string& path) {
  auto in = open_in(path, std::ios::binary);
  const int dim = static_cast<int>(read_u32(in));
  const int n = static_cast<int>(read_u32(in));
  const int nodes = static_cast<int>(read_u32(in));
  if (nodes != 0) throw std::runtime_error("read_grid_binary: file holds a space-time field");
  TorusGrid g(dim, n);
  GridField f(g);
  read_f64(in, f.samples.data(), g.total_points());
  return f;
}

SpaceTimeField read_spacetime_binary(const std::string& path) {
  auto in = open_in(path, std::ios::binary);
  const int dim = static_cast<int>(read_u32(in));
  const int n = static_cast<int>(read_u32(in));
  const int nodes = static_cast<int>(read_u32(in));
  if (nodes <= 0) throw std::runtime_error("read_spacetime_binary: file holds a plain field");
  TorusGrid g(dim, n);
  Eigen::VectorXd node_times(nodes);
  read_f64(in, node_times.data(), static_cast<std::size_t>(nodes));
  SpaceTimeField f(g, node_times);
  std::vector<double> col(g.total_points());
  for (int j = 0; j < nodes; ++j) {
    read_f64(in, col.data(), col.size());
    for (std::size_t p = 0; p < col.size(); ++p)
      f.values(static_cast<Eigen::Index>(p), j) = col[p];
  }
  return f;
}

bool binary_is_spacetime(const std::string& path) {
  auto in = open_in(path, std::ios::binary);
  read_u32(in);
  read_u32(in);
  return read_u32(in) > 0;
}

}  // namespace curveforge
