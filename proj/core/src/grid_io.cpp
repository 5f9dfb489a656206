#include "plap/grid_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "plap/errors.hpp"

namespace plap {

namespace {

struct Row {
  double x, y, v;
};

void put_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v & 0xffu), static_cast<unsigned char>((v >> 8) & 0xffu),
                              static_cast<unsigned char>((v >> 16) & 0xffu),
                              static_cast<unsigned char>((v >> 24) & 0xffu)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw ConfigError("binary grid: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_csv(std::ostream& os, const GridFunction& u, const std::vector<std::string>& metadata) {
  for (const auto& line : metadata) os << "# " << line << '\n';
  os << "x,y,value\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  const Grid& g = *u.grid;
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (!g.active(k)) continue;
    os << g.node(k).x() << ',' << g.node(k).y() << ',' << u.values[k] << '\n';
  }
}

GridFunction read_csv(std::istream& is) {
  std::vector<Row> rows;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line.rfind("x,y,value", 0) != 0) {
        throw ConfigError("csv: expected header 'x,y,value', got '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    std::istringstream ls(line);
    Row r{};
    char c1 = 0, c2 = 0;
    if (!(ls >> r.x >> c1 >> r.y >> c2 >> r.v) || c1 != ',' || c2 != ',') {
      throw ConfigError("csv: malformed row at line " + std::to_string(line_no));
    }
    rows.push_back(r);
  }
  if (!header_seen || rows.empty()) throw ConfigError("csv: no data rows");

  std::size_t center_row = 0;
  for (const auto& r : rows) {
    if (std::abs(r.y) < 1e-12) ++center_row;
  }
  if (center_row < 5) throw ConfigError("csv: cannot infer grid size (no y == 0 row)");
  const int n = static_cast<int>(center_row) - 1;
  const std::size_t full = static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1);
  const bool disk = rows.size() != full;
  GridPtr grid = build_grid(n, disk);

  GridFunction u(grid);
  std::size_t r = 0;
  for (std::size_t k = 0; k < grid->node_count(); ++k) {
    if (!grid->active(k)) continue;
    if (r >= rows.size()) throw ConfigError("csv: row count does not match an n = " + std::to_string(n) + " grid");
    const Vec2 x(rows[r].x, rows[r].y);
    if ((x - grid->node(k)).norm() > 1e-9 * grid->h()) {
      throw ConfigError("csv: row " + std::to_string(r) + " coordinates do not match grid node order");
    }
    if (!std::isfinite(rows[r].v)) throw ConfigError("csv: non-finite value in row " + std::to_string(r));
    u.values[k] = rows[r].v;
    ++r;
  }
  if (r != rows.size()) throw ConfigError("csv: row count does not match an n = " + std::to_string(n) + " grid");
  return u;
}

void write_csv_file(const std::string& path, const GridFunction& u, const std::vector<std::string>& metadata) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  write_csv(os, u, metadata);
}

GridFunction read_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open '" + path + "' for reading");
  return read_csv(is);
}

void write_binary(std::ostream& os, const GridFunction& u) {
  put_u32(os, static_cast<std::uint32_t>(u.grid->n()));
  put_u32(os, u.grid->disk() ? 1u : 0u);
  static_assert(std::numeric_limits<double>::is_iec559);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double v = u.grid->active(k) ? u.values[k] : 0.0;
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 8; ++b) os.put(static_cast<char>((bits >> (8 * b)) & 0xffu));
  }
}

GridFunction read_binary(std::istream& is) {
  const auto n = static_cast<int>(get_u32(is));
  const auto mask = get_u32(is);
  if (mask > 1) throw ConfigError("binary grid: mask flag must be 0 or 1");
  GridPtr grid = build_grid(n, mask == 1);
  std::vector<double> values(grid->node_count());
  for (auto& v : values) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw ConfigError("binary grid: truncated payload");
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(b[k]) << (8 * k);
    std::memcpy(&v, &bits, sizeof v);
  }
  return GridFunction(grid, std::move(values));
}

}  // namespace plap
