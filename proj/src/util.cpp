#include "fracp/util.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fracp {

namespace {
std::atomic<int> g_workers{0};  // 0 = not yet resolved

int env_workers() {
  const char* v = std::getenv("FRACP_THREADS");
  if (!v) return 1;
  int k = std::atoi(v);
  return k >= 1 ? k : 1;
}
}  // namespace

int worker_count() {
  int k = g_workers.load(std::memory_order_relaxed);
  if (k == 0) {
    k = env_workers();
    g_workers.store(k, std::memory_order_relaxed);
  }
  return k;
}

void set_worker_count(int k) {
  g_workers.store(k >= 1 ? k : 1, std::memory_order_relaxed);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double normal01(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

State smoothed_noise(int n, std::mt19937_64& rng, int passes) {
  State u(n);
  for (int i = 0; i < n; ++i) u[i] = normal01(rng);
  State v(n);
  for (int pass = 0; pass < passes; ++pass) {
    for (int i = 0; i < n; ++i) {
      const double left = i > 0 ? u[i - 1] : 0.0;
      const double right = i + 1 < n ? u[i + 1] : 0.0;
      v[i] = 0.25 * left + 0.5 * u[i] + 0.25 * right;
    }
    u.swap(v);
  }
  return u;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ',';
    out << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_g17(row[c]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.columns.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": not a number: '" + cell + "'");
      }
    }
    if (row.size() != table.columns.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": wrong column count");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace fracp
