#ifndef FRACP_UTIL_HPP
#define FRACP_UTIL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fracp {

using State = Eigen::VectorXd;

/// Number of workers for the O(n^2) kernel sums. Defaults to 1 (deterministic);
/// overridden by set_worker_count (CLI --threads) or the FRACP_THREADS variable.
int worker_count();
void set_worker_count(int k);

/// Portable deterministic uniform double in [0,1) from a 64-bit engine.
double uniform01(std::mt19937_64& rng);

/// Deterministic standard normal (Box-Muller on uniform01), portable across
/// standard library implementations.
double normal01(std::mt19937_64& rng);

/// White noise smoothed by repeated [1,2,1]/4 averaging with zero end padding.
State smoothed_noise(int n, std::mt19937_64& rng, int passes);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_g17(double v);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

}  // namespace fracp

#endif
