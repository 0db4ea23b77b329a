// asep_exact: command-line front end for the half-flat ASEP evaluators.

#include <chrono>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include <fmt/format.h>

#include "asep/airy.hpp"
#include "asep/bose.hpp"
#include "asep/common.hpp"
#include "asep/exact.hpp"
#include "asep/sim.hpp"
#include "asep/verify.hpp"
#include "table.hpp"

#ifndef ASEP_VERSION
#define ASEP_VERSION "dev"
#endif

using namespace asep;
using cli::Cell;
using cli::Table;

namespace {

struct Common {
  std::string format = "csv";
  std::string out;
};

struct Model {
  std::optional<double> tau, p;
  ModelParams params() const { return tau ? ModelParams::from_tau(*tau) : ModelParams::from_p(*p); }
};

void add_model(CLI::App* sub, Model& m) {
  auto* g = sub->add_option_group("model", "exactly one of --tau / --p");
  g->add_option("--tau", m.tau, "tau = p / q in (0,1)");
  g->add_option("--p", m.p, "left jump rate, q = 1 - p");
  g->require_option(1);
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--format", c.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  sub->add_option("--out", c.out, "output file (default stdout)");
}

class Output {
 public:
  Output(const Common& c, std::vector<std::string> cols) {
    if (!c.out.empty()) {
      f_ = std::fopen(c.out.c_str(), "w");
      if (!f_) throw DomainError("cannot open " + c.out);
    }
    table_ = std::make_unique<Table>(std::move(cols), c.format == "jsonl" ? cli::Format::jsonl : cli::Format::csv,
                                     f_ ? f_ : stdout);
  }
  ~Output() {
    if (f_) std::fclose(f_);
  }
  Table& operator*() { return *table_; }
  Table* operator->() { return table_.get(); }

 private:
  std::FILE* f_ = nullptr;
  std::unique_ptr<Table> table_;
};

std::vector<std::pair<std::string, Cell>> base_header(const std::string& cmd) {
  return {{"program", std::string("asep_exact")},
          {"version", std::string(ASEP_VERSION)},
          {"command", cmd},
          {"threads", static_cast<long>(worker_cap() > 0 ? worker_cap() : omp_get_max_threads())}};
}

std::string join(const std::vector<int>& v, const char* sep = ";") { return fmt::format("{}", fmt::join(v, sep)); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// moment

struct MomentArgs {
  Model model;
  Common io;
  std::vector<int> k{1}, x{0};
  std::vector<double> t{1.0};
  std::vector<int> xs;
  std::string method = "halfflat";
  int nodes = 0, max_nodes = 512;
};

int cmd_moment(const MomentArgs& a) {
  EvalParams ev;
  ev.params = a.model.params();
  ev.nodes = a.nodes;
  ev.max_nodes = a.max_nodes;
  Output out(a.io, {"k_or_m", "x", "t", "method", "value", "value_im", "err", "truncation_warning", "runtime_s"});
  auto h = base_header("moment");
  h.push_back({"tau", ev.params.tau});
  h.push_back({"nodes", static_cast<long>(ev.nodes)});
  h.push_back({"max_nodes", static_cast<long>(ev.max_nodes)});
  out->header(h);
  auto emit = [&](long k, const std::string& x, double t, const std::string& m, const MomentResult& r, double s) {
    out->row({k, x, t, m, r.value.real(), r.value.imag(), r.err_estimate, r.truncation_warning, s});
  };
  for (double t : a.t) {
    if (a.method == "qtilde") {
      if (a.xs.empty()) throw DomainError("--method qtilde needs --xs");
      auto t0 = std::chrono::steady_clock::now();
      MomentResult r = qtilde_moments(a.xs, t, ev);
      emit(static_cast<long>(a.xs.size()), join(a.xs), t, "qtilde", r, seconds_since(t0));
      continue;
    }
    std::vector<std::string> methods;
    if (a.method == "all")
      methods = {"nested", "partition", "halfflat"};
    else
      methods = {a.method};
    for (int k : a.k)
      for (int x : a.x)
        for (const std::string& m : methods) {
          auto t0 = std::chrono::steady_clock::now();
          MomentResult r = m == "nested"      ? nested_moment(k, x, t, ev)
                           : m == "partition" ? partition_moment(k, x, t, ev)
                                              : halfflat_moment(k, x, t, ev);
          emit(k, std::to_string(x), t, m, r, seconds_since(t0));
        }
  }
  return 0;
}

// simulate / ctmc-oracle

struct ObsArgs {
  std::string observable = "tau-pow";
  std::vector<int> k{1};
  int x = 0;
  std::vector<int> xs;
  double zeta = -0.2;
  int threshold = 0;

  std::vector<Observable> build() const {
    std::vector<Observable> obs;
    if (observable == "tau-pow")
      for (int kk : k) obs.push_back(Observable::tau_pow_N(kk, x));
    else if (observable == "etau")
      obs.push_back(Observable::etau(zeta, x));
    else if (observable == "qtilde") {
      if (xs.empty()) throw DomainError("--observable qtilde needs --xs");
      obs.push_back(Observable::qtilde_product(xs));
    } else
      obs.push_back(Observable::height_indicator(x, threshold));
    return obs;
  }
};

std::string describe(const Observable& o) {
  switch (o.kind) {
    case Observable::Kind::tau_pow_N: return fmt::format("tau^({}N_{})", o.k, o.xs[0]);
    case Observable::Kind::etau_of_zeta_tauN: return fmt::format("e_tau({}tau^N_{})", o.zeta, o.xs[0]);
    case Observable::Kind::qtilde_product: return fmt::format("Qtilde[{}]", join(o.xs));
    case Observable::Kind::height_indicator: return fmt::format("1[h_{}>={}]", o.xs[0], o.threshold);
  }
  return "?";
}

void add_observable(CLI::App* sub, ObsArgs& o) {
  sub->add_option("--observable", o.observable, "tau-pow, etau, qtilde or height")
      ->check(CLI::IsMember({"tau-pow", "etau", "qtilde", "height"}));
  sub->add_option("--k", o.k, "powers k for tau-pow")->delimiter(',');
  sub->add_option("--x", o.x, "site");
  sub->add_option("--xs", o.xs, "sites for qtilde")->delimiter(',');
  sub->add_option("--zeta", o.zeta, "argument of e_tau");
  sub->add_option("--threshold", o.threshold, "height threshold");
}

struct SimArgs {
  Model model;
  Common io;
  ObsArgs obs;
  double t = 1.0;
  long samples = 100000;
  std::uint64_t seed = 0;
  std::optional<int> left, right;
};

int cmd_simulate(const SimArgs& a) {
  std::vector<Observable> obs = a.obs.build();
  ModelParams mp = a.model.params();
  Window w{};
  const Window* wp = nullptr;
  if (a.left || a.right) {
    if (!(a.left && a.right)) throw DomainError("--left and --right go together");
    w = {*a.left, *a.right};
    wp = &w;
  }
  Window shown = wp ? w : default_window(obs, a.t);
  Output out(a.io, {"observable", "t", "mean", "stderr", "samples"});
  auto h = base_header("simulate");
  h.push_back({"tau", mp.tau});
  h.push_back({"seed", std::to_string(a.seed)});
  h.push_back({"samples", a.samples});
  h.push_back({"window", fmt::format("[{},{}]", shown.left, shown.right)});
  out->header(h);
  std::vector<McEstimate> est = mc_expectations(obs, a.t, mp, a.samples, a.seed, wp);
  for (std::size_t i = 0; i < obs.size(); ++i) out->row({describe(obs[i]), a.t, est[i].mean, est[i].stderr_, a.samples});
  return 0;
}

struct CtmcArgs {
  Model model;
  Common io;
  ObsArgs obs;
  double t = 0.25;
  int left = -6, right = 8;
  double tol = 1e-12;
};

int cmd_ctmc(const CtmcArgs& a) {
  std::vector<Observable> obs = a.obs.build();
  ModelParams mp = a.model.params();
  Window w{a.left, a.right};
  Output out(a.io, {"observable", "t", "mean", "stderr", "states"});
  auto h = base_header("ctmc-oracle");
  h.push_back({"tau", mp.tau});
  h.push_back({"window", fmt::format("[{},{}]", w.left, w.right)});
  h.push_back({"tol", a.tol});
  // Refuse before any output.
  long states = ctmc_state_count(w);
  if (states > kMaxCtmcStates)
    throw GuardError(fmt::format("window has {} states, limit {}", states, kMaxCtmcStates));
  out->header(h);
  CtmcResult r = ctmc_exact_expectations(obs, a.t, mp, w, a.tol);
  for (std::size_t i = 0; i < obs.size(); ++i) out->row({describe(obs[i]), a.t, r.values[i], 0.0, r.states});
  return 0;
}

// laplace

struct LaplaceArgs {
  Model model;
  Common io;
  double zeta_re = -0.2, zeta_im = 0.0;
  int x = 2;
  double t = 0.5;
  std::string rep = "both";
  int m_max = 20, k_cap = 4, k_max = 2;
  MbOptions mb;
};

int cmd_laplace(const LaplaceArgs& a) {
  EvalParams ev;
  ev.params = a.model.params();
  cplx zeta(a.zeta_re, a.zeta_im);
  Output out(a.io, {"rep", "zeta", "zeta_im", "x", "t", "value", "value_im", "err", "tail", "truncation_warning",
                    "runtime_s"});
  auto h = base_header("laplace");
  h.push_back({"tau", ev.params.tau});
  h.push_back({"m_max", static_cast<long>(a.m_max)});
  h.push_back({"k_max", static_cast<long>(a.k_max)});
  h.push_back({"mb_nodes", static_cast<long>(a.mb.nodes)});
  out->header(h);
  auto emit = [&](const char* rep, const LaplaceResult& r, double s) {
    out->row({std::string(rep), a.zeta_re, a.zeta_im, static_cast<long>(a.x), a.t, r.value.real(), r.value.imag(),
              r.err_estimate, r.tail_estimate, r.truncation_warning, s});
  };
  if (a.rep != "mb") {
    auto t0 = std::chrono::steady_clock::now();
    LaplaceResult r = tau_laplace_series(zeta, a.x, a.t, a.m_max, ev, a.k_cap);
    emit("series", r, seconds_since(t0));
  }
  if (a.rep != "series") {
    auto t0 = std::chrono::steady_clock::now();
    LaplaceResult r = tau_laplace_mb(zeta, a.x, a.t, a.k_max, ev, a.mb);
    emit("mb", r, seconds_since(t0));
  }
  return 0;
}

// bose

struct BoseArgs {
  Common io;
  int k = 1;
  double theta = 0.0;
  std::vector<double> x{0.0};
  double t = 1.0;
  std::string mode = "auto";
  int nodes = 16;
  double panel = 1.0;
};

int cmd_bose(const BoseArgs& a) {
  BoseParams bp;
  bp.theta = a.theta;
  QuadratureRule rule = bose_rule();
  rule.nodes_per_piece = a.nodes;
  rule.panel_length = a.panel;
  std::string mode = a.mode;
  std::vector<double> xs = a.x;
  if (mode == "auto") mode = (xs.size() == 1 && a.k > 1) ? "collapsed" : "tilted";
  if (mode != "collapsed" && xs.size() == 1 && a.k > 1) xs.assign(a.k, xs[0]);
  if (mode != "collapsed" && static_cast<int>(xs.size()) != a.k)
    throw DomainError(fmt::format("--k {} needs {} coordinates in --x", a.k, a.k));
  Output out(a.io, {"k", "x", "t", "theta", "mode", "value", "value_im", "err", "truncation_warning", "runtime_s"});
  auto h = base_header("bose");
  h.push_back({"nodes", static_cast<long>(rule.nodes_per_piece)});
  h.push_back({"panel_length", rule.panel_length});
  out->header(h);
  auto t0 = std::chrono::steady_clock::now();
  MomentResult r = mode == "collapsed"    ? she_halfflat_moment_collapsed(a.k, xs[0], a.t, bp, rule)
                   : mode == "narrow-wedge" ? narrow_wedge_moment(xs, a.t, rule)
                                            : delta_bose_moment(xs, a.t, bp, rule);
  std::string xstr = fmt::format("{}", fmt::join(xs, ";"));
  if (mode == "collapsed") xstr = cli::num17(xs[0]);
  out->row({static_cast<long>(a.k), xstr, a.t, a.theta, mode, r.value.real(), r.value.imag(), r.err_estimate,
            r.truncation_warning, seconds_since(t0)});
  return 0;
}

// airy21

struct AiryArgs {
  Common io;
  std::vector<double> x{0.0}, r{0.0};
  KernelSpec spec;
  NystromGrid grid;
};

int cmd_airy21(const AiryArgs& a) {
  Output out(a.io, {"x", "r", "cdf", "runtime_s"});
  auto h = base_header("airy21");
  h.push_back({"nystrom_n", static_cast<long>(a.grid.n)});
  h.push_back({"nystrom_span", a.grid.span});
  h.push_back({"ray_nodes", static_cast<long>(a.spec.nodes_per_ray)});
  h.push_back({"ray_length", a.spec.ray_length});
  out->header(h);
  for (double x : a.x)
    for (double r : a.r) {
      auto t0 = std::chrono::steady_clock::now();
      double v = halfflat_limit_cdf(x, r, a.spec, a.grid);
      out->row({x, r, v, seconds_since(t0)});
    }
  return 0;
}

// verify

struct VerifyArgs {
  Common io;
  std::string suite = "all";
  double tol_scale = 1.0;
};

int cmd_verify(const VerifyArgs& a) {
  Output out(a.io, {"criterion", "check", "pass", "value", "tol", "detail"});
  auto h = base_header("verify");
  h.push_back({"suite", a.suite});
  h.push_back({"tol_scale", a.tol_scale});
  out->header(h);
  bool ok = true;
  for (int id : suite_criteria(a.suite)) {
    CriterionResult cr = run_criterion(id, a.tol_scale);
    for (const Check& c : cr.checks) out->row({static_cast<long>(id), c.name, c.pass, c.value, c.tol, c.detail});
    std::fprintf(stderr, "criterion %d %s: %s (%.1f s)\n", id, cr.title.c_str(), cr.pass() ? "PASS" : "FAIL",
                 cr.seconds);
    ok = ok && cr.pass();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact formulas, oracles and limits for half-flat ASEP"};
  app.set_version_flag("--version", std::string(ASEP_VERSION));
  app.set_config("--config", "", "key = value file; [section] per subcommand; flags override it");
  app.require_subcommand(1);

  MomentArgs mo;
  auto* sm = app.add_subcommand("moment", "E[tau^{kN_x(t)}] or E[prod Qtilde] from the contour formulas");
  add_model(sm, mo.model);
  add_common(sm, mo.io);
  sm->add_option("--k", mo.k, "moment order(s)")->delimiter(',');
  sm->add_option("--x", mo.x, "site(s)")->delimiter(',');
  sm->add_option("--t", mo.t, "time(s)")->delimiter(',');
  sm->add_option("--xs", mo.xs, "increasing sites for --method qtilde")->delimiter(',');
  sm->add_option("--method", mo.method)->check(CLI::IsMember({"nested", "partition", "halfflat", "qtilde", "all"}));
  sm->add_option("--nodes", mo.nodes, "nodes per contour (0 = automatic)");
  sm->add_option("--max-nodes", mo.max_nodes);

  SimArgs si;
  auto* ss = app.add_subcommand("simulate", "Monte Carlo estimates");
  add_model(ss, si.model);
  add_common(ss, si.io);
  add_observable(ss, si.obs);
  ss->add_option("--t", si.t);
  ss->add_option("--samples", si.samples);
  ss->add_option("--seed", si.seed)->required();
  ss->add_option("--left", si.left);
  ss->add_option("--right", si.right);

  CtmcArgs ct;
  auto* sc = app.add_subcommand("ctmc-oracle", "exact expectations on a finite window");
  add_model(sc, ct.model);
  add_common(sc, ct.io);
  add_observable(sc, ct.obs);
  sc->add_option("--t", ct.t);
  sc->add_option("--left", ct.left);
  sc->add_option("--right", ct.right);
  sc->add_option("--tol", ct.tol);

  LaplaceArgs la;
  auto* sl = app.add_subcommand("laplace", "E[e_tau(zeta tau^{N_x(t)})]");
  add_model(sl, la.model);
  add_common(sl, la.io);
  sl->add_option("--zeta", la.zeta_re);
  sl->add_option("--zeta-im", la.zeta_im);
  sl->add_option("--x", la.x);
  sl->add_option("--t", la.t);
  sl->add_option("--rep", la.rep)->check(CLI::IsMember({"series", "mb", "both"}));
  sl->add_option("--m-max", la.m_max);
  sl->add_option("--k-cap", la.k_cap);
  sl->add_option("--k-max", la.k_max);
  sl->add_option("--mb-nodes", la.mb.nodes);
  sl->add_option("--mb-T", la.mb.T);
  sl->add_option("--mb-h", la.mb.h);

  BoseArgs bo;
  auto* sb = app.add_subcommand("bose", "delta Bose gas moments");
  add_common(sb, bo.io);
  sb->add_option("--k", bo.k);
  sb->add_option("--theta", bo.theta);
  sb->add_option("--x", bo.x, "one point (coincident) or k increasing points")->delimiter(',');
  sb->add_option("--t", bo.t);
  sb->add_option("--mode", bo.mode)->check(CLI::IsMember({"auto", "tilted", "collapsed", "narrow-wedge"}));
  sb->add_option("--nodes", bo.nodes);
  sb->add_option("--panel", bo.panel);

  AiryArgs ai;
  auto* sa = app.add_subcommand("airy21", "det(I - K) on [2^{1/3} r, inf) over an (x, r) grid");
  add_common(sa, ai.io);
  sa->add_option("--x", ai.x)->delimiter(',');
  sa->add_option("--r", ai.r)->delimiter(',');
  sa->add_option("--n", ai.grid.n);
  sa->add_option("--span", ai.grid.span);
  sa->add_option("--ray-nodes", ai.spec.nodes_per_ray);
  sa->add_option("--ray-length", ai.spec.ray_length);

  VerifyArgs ve;
  auto* sv = app.add_subcommand("verify", "acceptance battery");
  add_common(sv, ve.io);
  sv->add_option("--suite", ve.suite)->check(CLI::IsMember({"identities", "moments", "laplace", "bose", "airy", "all"}));
  sv->add_option("--tol-scale", ve.tol_scale)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    apply_thread_env();
    if (sm->parsed()) return cmd_moment(mo);
    if (ss->parsed()) return cmd_simulate(si);
    if (sc->parsed()) return cmd_ctmc(ct);
    if (sl->parsed()) return cmd_laplace(la);
    if (sb->parsed()) return cmd_bose(bo);
    if (sa->parsed()) return cmd_airy21(ai);
    if (sv->parsed()) return cmd_verify(ve);
  } catch (const ConsistencyError& e) {
    std::fprintf(stderr, "consistency check failed: %s\n", e.what());
    return 1;
  } catch (const GuardError& e) {
    std::fprintf(stderr, "guard: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 2;
  }
  return 2;
}
