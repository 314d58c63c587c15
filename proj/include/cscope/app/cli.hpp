#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cscope/app/serialize.hpp"

namespace cscope {

/// Every resolved setting of a run; embedded in each report.
struct RunConfig {
  std::string command;
  double R0 = 1.0;
  double T = -1.0;  // < 0: command default
  int K1 = 0;       // 0: dimension default
  int K2 = 0;
  double rho1 = 0.75;
  double rho2 = 0.75;
  double delta = 1.0;
  double beta = 0.1;
  double C1 = 1.0;
  double C2 = 1.0;
  double M = 1.0;
  std::string scales;
  std::vector<double> scale_list;
  std::uint64_t seed = 1;
  int budget = 4;
  std::string in;
  std::string out;
  std::string format;
  // series synthesis
  std::string generator;
  int n = 32;
  int nz = 0;  // 0: same as n
  double L = 0.0;  // 0: 2 pi
  int steps = 8;
  std::map<std::string, double> params;
  // command specific
  int dim = 1;
  double R = 1.0;
  std::string kind = "uniform";
  std::vector<double> x0{0.0, 0.0, 0.0};
  double t_eval = -1.0;
  long samples = 1000000;
  double threshold = 0.1;
};

Json to_json(const RunConfig& c);

/// Parses "lo:hi:Nlog", "lo:hi:Nlin" or a comma-separated list.
std::vector<double> parse_scales(const std::string& spec);

/// Runs one command line. Returns the process exit code: 0 success,
/// 2 invalid input or flags, 3 file errors, 1 anything else.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Target value and tolerance of the demo global-average comparison.
inline constexpr double kDemoTarget = -0.003880;
inline constexpr double kDemoTolerance = 2e-4;

}  // namespace cscope
