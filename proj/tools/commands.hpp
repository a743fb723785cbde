#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mms/io.hpp"

namespace mms::cli {

// Exit codes.
inline constexpr int kPass = 0;
inline constexpr int kInvariantFailure = 2;
inline constexpr int kInputError = 3;

struct RunConfig {
  std::string command;
  std::string in;            // instance directory; empty means build `geometry`
  std::string geometry = "segment";
  std::size_t size = 21;
  double eps = 0.0;          // 0: command default (0.5 for eval, 0.1 otherwise)
  double theta = -1.0;       // < 0: take the geometry's codimension
  double p = 2.0;
  double sigma = 0.1;
  double c = 0.0;            // 0: 3 / eps
  std::vector<double> delta_grid;  // empty: {eps, eps^2, eps^3}
  int K = 12;
  int J = 3;
  std::size_t budget = 22;
  std::string out = "out";
  std::uint64_t seed = 1;
  std::size_t functions = 20;
  std::string suite = "lipschitz";  // lipschitz | constant
  double R = 1.0;
  std::string fault;         // verify: "partition" perturbs one weight
  // cantor example
  double cantor_theta = 1.5;
  int cantor_K = 6;
};

// One test function with its Lipschitz constant.
struct TestFunction {
  Field f;
  double lip = 0.0;
};

// f(x) = a sin(w d(x, y0) + phi) + b d(x, y1) with parameters drawn from a
// 64-bit Mersenne twister; the same seed gives the same suite everywhere.
// With coordinates the anchors y0, y1 are arbitrary points of the bounding
// box, otherwise they are points of the space.
std::vector<TestFunction> lipschitz_suite(const Space& space, std::size_t count,
                                          std::uint64_t seed);

struct EvalRow {
  std::size_t id = 0;
  double lip = 0.0;
  double CN = 0.0, BSN = 0.0, BN = 0.0, N = 0.0;
  double bn_osc = 0.0;
};

struct EvalResult {
  std::vector<EvalRow> rows;
  std::string csv;
  io::json summary;
};

// Geometry from cfg.in or, when empty, from cfg.geometry / cfg.size.
io::Instance resolve_instance(const RunConfig& cfg);
// The instance's own sequence if it has one, else the ADR recipe.
MeasureSequence sequence_for(const io::Instance& inst, double eps, double theta, int K);

EvalResult run_eval(const RunConfig& cfg);

int cmd_example(const RunConfig& cfg);
int cmd_eval(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);
int cmd_extend(const RunConfig& cfg);
int cmd_potentials(const RunConfig& cfg);

// Dispatch on cfg.command; library errors map to kInputError.
int run(const RunConfig& cfg);

}  // namespace mms::cli
