#pragma once

#include <cstdint>
#include <vector>

#include "asep/common.hpp"
#include "asep/qfunc.hpp"

namespace asep {

struct LatticeState {
  int left = 0;
  int right = 0;
  std::vector<std::uint8_t> occ;
  std::vector<int> pos;  // particle sites, unordered
  long flux0 = 0;        // net 1 -> 0 crossings
  double time = 0.0;

  bool occupied(int x) const { return x >= left && x <= right && occ[x - left]; }
  int count_upto(int x) const;  // N_x within the window
  int height_flux(int x) const;
};

LatticeState init_halfflat(int left, int right);

// splitmix64 stream keyed by (seed, replica); replicas never share state.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t replica);
  std::uint64_t next();
  double uniform();  // in (0,1)
  double exponential(double rate);

 private:
  std::uint64_t s_;
};

void run_until(LatticeState& st, double t, const ModelParams& mp, Stream& rng);

struct Observable {
  enum class Kind { tau_pow_N, qtilde_product, etau_of_zeta_tauN, height_indicator };
  Kind kind = Kind::tau_pow_N;
  int k = 1;
  std::vector<int> xs;  // one site, or the increasing tuple for qtilde_product
  double zeta = 0.0;
  int threshold = 0;

  static Observable tau_pow_N(int k, int x);
  static Observable qtilde_product(std::vector<int> xs);
  static Observable etau(double zeta, int x);
  static Observable height_indicator(int x, int threshold);

  int max_site() const;
  int min_site() const;
  double eval(const LatticeState& st, const ModelParams& mp) const;
  // Evaluation from an occupancy bitmask over [left, left + 63].
  double eval_mask(std::uint64_t mask, int left, const ModelParams& mp) const;
};

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct Window {
  int left = 0;
  int right = 0;
};

// Default window [x - W, x + W] with W = ceil(4t) + 32, widened to contain 0.
Window default_window(const std::vector<Observable>& obs, double t);

std::vector<McEstimate> mc_expectations(const std::vector<Observable>& obs, double t, const ModelParams& mp,
                                        long samples, std::uint64_t seed, const Window* window = nullptr);
McEstimate mc_expectation(const Observable& obs, double t, const ModelParams& mp, long samples,
                          std::uint64_t seed, const Window* window = nullptr);

inline constexpr long kMaxCtmcStates = 2'000'000;

struct CtmcResult {
  std::vector<double> values;
  long states = 0;
  int poisson_terms = 0;
};

// Exact expectations by uniformization on the half-flat window.
CtmcResult ctmc_exact_expectations(const std::vector<Observable>& obs, double t, const ModelParams& mp,
                                   Window window, double tol = 1e-12);
double ctmc_exact_expectation(const Observable& obs, double t, const ModelParams& mp, Window window,
                              double tol = 1e-12);
long ctmc_state_count(Window window);

}  // namespace asep
