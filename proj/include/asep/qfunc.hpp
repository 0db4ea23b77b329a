#pragma once

#include "asep/common.hpp"

namespace asep {

struct ModelParams {
  double p = 0.0;
  double q = 0.0;
  double tau = 0.0;
  double gamma = 0.0;

  static ModelParams from_tau(double tau);
  static ModelParams from_p(double p);
};

struct QTruncation {
  double tol = 1e-14;
  int max_terms = 4096;
};

struct PochResult {
  cplx value;
  double tail_bound = 0.0;  // bound on |true - value| / |value|
  int terms = 0;
};

PochResult poch_inf_ex(cplx a, double q, const QTruncation& trunc = {});
cplx poch_inf(cplx a, double q, const QTruncation& trunc = {});

cplx q_gamma(cplx x, double q, const QTruncation& trunc = {});
double q_factorial(int m, double q);
double q_binomial(int n, int k, double q);
cplx q_exp(cplx x, double q, const QTruncation& trunc = {});

// (q;q)_l for finite l
double q_poch_finite(double q, int l);

// tau^s on the principal branch
cplx tau_pow(double tau, cplx s);

cplx germ_f(cplx w, cplx n, int x, double t, const ModelParams& mp);
cplx germ_g(cplx w, cplx n, const ModelParams& mp, const QTruncation& trunc = {});
cplx germ_h0(cplx z, cplx s1, cplx s2, const ModelParams& mp, const QTruncation& trunc = {});
cplx germ_h(cplx w1, cplx w2, cplx n1, cplx n2, const ModelParams& mp,
            const QTruncation& trunc = {});

}  // namespace asep
