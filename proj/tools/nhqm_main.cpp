// nhqm -- command-line front end for the non-Hermitian quantum mechanics
// toolkit: operator builders, classification, metric-context expectations,
// para-unitary evolution, brachistochrone timing, and observable-geometric
// phase reports.

#include <CLI11.hpp>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <thread>

#include "nhqm/born.hpp"
#include "nhqm/geophase.hpp"
#include "nhqm/io.hpp"

using nlohmann::json;
using namespace nhqm;

namespace {

double default_tol() {
  if (const char* env = std::getenv("NHQM_DEFAULT_TOL")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && v > 0.0) return v;
  }
  return 1e-8;
}

struct Grid {
  std::string name;
  std::vector<double> values;
};

Grid parse_grid(const std::string& spec) {
  auto eq = spec.find('=');
  auto c1 = spec.find(':');
  auto c2 = spec.find(':', c1 + 1);
  if (eq == std::string::npos || c1 == std::string::npos || c2 == std::string::npos ||
      !(eq < c1 && c1 < c2))
    fail(Errc::GridParseError, "grid spec must be name=start:stop:step: " + spec);
  Grid g;
  g.name = spec.substr(0, eq);
  double start, stop, step;
  try {
    start = std::stod(spec.substr(eq + 1, c1 - eq - 1));
    stop = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    step = std::stod(spec.substr(c2 + 1));
  } catch (const std::exception&) {
    fail(Errc::GridParseError, "grid spec has non-numeric fields: " + spec);
  }
  if (step <= 0.0) fail(Errc::GridParseError, "grid step must be positive: " + spec);
  for (double v = start; v <= stop + 1e-12 * std::max(1.0, std::abs(stop)); v += step)
    g.values.push_back(v);
  return g;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) fail(Errc::ParseError, "cannot write " + out_path);
  f << text;
}

/// Evaluate fn over [0, n) with `jobs` workers; results land by index, so
/// the assembled output is independent of completion order.
template <typename Fn>
std::vector<std::string> ordered_sweep(std::size_t n, int jobs, Fn fn) {
  std::vector<std::string> rows(n);
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(n == 0 ? 1 : n)));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) rows[i] = fn(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) rows[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

std::string csv_row(const std::vector<double>& vals) {
  std::string row;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) row += ",";
    row += io::format_double(vals[i]);
  }
  row += "\n";
  return row;
}

json phase_report_json(const PhaseAnalysis& pa, const std::optional<InvarianceReport>& inv) {
  json rep;
  rep["tau"] = pa.report.tau;
  rep["theta"] = io::cvec_list(pa.report.theta);
  rep["dynamical"] = io::cvec_list(pa.report.dynamical);
  rep["beta"] = io::cvec_list(pa.report.beta);
  rep["windings"] = pa.report.branch_windings;
  rep["holonomy_diag"] = io::cvec_list(pa.report.holonomy_diag);
  rep["cycle_defect"] = pa.cycle.cycle_defect;
  if (inv) {
    rep["invariance"] = {{"trials", inv->trials},
                         {"reparam_deviation", inv->reparam_deviation},
                         {"gauge_deviation", inv->gauge_deviation},
                         {"measurement_deviation", inv->measurement_deviation},
                         {"canonical_new_o0_deviation", inv->canonical_new_o0_deviation}};
  } else {
    rep["invariance"] = {{"trials", 0}};
  }
  return rep;
}

std::function<CMat(double)> parse_builder(const std::string& spec) {
  auto colon = spec.find(':');
  std::string name = spec.substr(0, colon);
  std::map<std::string, double> kv;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos)
        fail(Errc::ParseError, "builder option must be key=value: " + item);
      kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
  }
  auto need = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) fail(Errc::ParseError, "builder " + name + " needs " + key + "=");
    return it->second;
  };
  if (name == "minus-sigma-z" || name == "sigma-z" || name == "sigma-x") {
    double omega = need("omega");
    auto tri = deformed_pauli(omega);
    CMat h = (name == "sigma-x") ? tri[0] : tri[2];
    if (name == "minus-sigma-z") h = -h;
    return [h](double) { return h; };
  }
  if (name == "twolevel") {
    auto tl = two_level_hamiltonian(need("r"), need("theta"), need("gamma"));
    CMat h = tl.h;
    return [h](double) { return h; };
  }
  fail(Errc::ParseError, "unknown builder: " + name);
}

json classification_json(const Classification& c) {
  json j;
  j["kind"] = kind_name(c.kind);
  j["spectrum"] = io::cvec_list(c.spectrum);
  j["diagnostics"] = c.diagnostics;
  if (c.witness_metric) j["witness_metric"] = io::matrix_to_json(c.witness_metric->g);
  return j;
}

// ---------------------------------------------------------------------------
// verify --suite paper: regression table for the worked qubit and two-level
// reference values

struct VerifyCase {
  std::string name;
  std::function<bool()> run;
};

bool near(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol; }

std::vector<VerifyCase> paper_suite() {
  std::vector<VerifyCase> cases;
  auto add = [&](std::string name, std::function<bool()> fn) {
    cases.push_back({std::move(name), std::move(fn)});
  };

  add("born example: <A>_{psi,G} = 0 and <A>_psi = 3i/2", [] {
    CMat a(2, 2);
    a << Complex(0, 0), Complex(1, 0), Complex(4, 0), Complex(0, 0);
    CMat gm(2, 2);
    gm << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(0.25, 0);
    MetricOp g = MetricOp::from_matrix(gm);
    CVec psi(2);
    psi << Complex(1, 0) / std::sqrt(2.0), Complex(0, -1) / std::sqrt(2.0);
    return near(expect(a, g, psi), {0, 0}, 1e-12) &&
           near(expect_naive(a, psi), {0, 1.5}, 1e-12);
  });

  add("born example: G^(1/2) A G^(-1/2) = 2 sigma_x", [] {
    CMat a(2, 2);
    a << Complex(0, 0), Complex(1, 0), Complex(4, 0), Complex(0, 0);
    CMat gm(2, 2);
    gm << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(0.25, 0);
    CMat two_sx(2, 2);
    two_sx << Complex(0, 0), Complex(2, 0), Complex(2, 0), Complex(0, 0);
    return op_norm(hermitianize(a, MetricOp::from_matrix(gm)) - two_sx) < 1e-12;
  });

  add("deformed Pauli commutation relations", [] {
    for (double w : {-1.2, -0.8, -0.4, 0.0, 0.4, 0.8, 1.2}) {
      auto [sx, sy, sz] = deformed_pauli(w);
      Complex i(0, 1);
      if (op_norm(CMat(sx * sy) - i * sz) > 1e-12) return false;
      if (op_norm(CMat(sy * sz) - i * sx) > 1e-12) return false;
      if (op_norm(CMat(sz * sx) - i * sy) > 1e-12) return false;
    }
    return true;
  });

  add("deformed sigma_x eigenstates and duals", [] {
    double w = 0.3, c = std::cos(w);
    auto sys = eig_general(deformed_pauli(w)[0]);
    CVec em(2), ep(2), dm(2), dp(2);
    em << Complex(1, 0) / std::sqrt(2.0), -std::exp(Complex(0, -w)) / std::sqrt(2.0);
    ep << Complex(1, 0) / std::sqrt(2.0), std::exp(Complex(0, w)) / std::sqrt(2.0);
    dp << std::exp(Complex(0, w)) / (std::sqrt(2.0) * c), Complex(1, 0) / (std::sqrt(2.0) * c);
    dm << std::exp(Complex(0, -w)) / (std::sqrt(2.0) * c), Complex(-1, 0) / (std::sqrt(2.0) * c);
    return (sys.right.col(0) - em).norm() < 1e-12 && (sys.right.col(1) - ep).norm() < 1e-12 &&
           (sys.left.col(0) - dm).norm() < 1e-12 && (sys.left.col(1) - dp).norm() < 1e-12;
  });

  add("metric of the deformed pair and its square root", [] {
    for (double w : {0.25, 0.6, 1.0}) {
      double c = std::cos(w), s = std::sin(w);
      CMat closed_g(2, 2);
      closed_g << Complex(1, 0) / (c * c), Complex(0, s) / (c * c),
                 Complex(0, -s) / (c * c), Complex(1, 0) / (c * c);
      MetricOp gx = metric_from_eigensystem(eig_general(deformed_pauli(w)[0]));
      MetricOp gz = metric_from_eigensystem(eig_general(deformed_pauli(w)[2]));
      if (op_norm(gx.g - closed_g) > 1e-10 || op_norm(gz.g - closed_g) > 1e-10) return false;
      CMat plus(2, 2), minus(2, 2);
      plus << Complex(1, 0), Complex(0, 1), Complex(0, -1), Complex(1, 0);
      minus << Complex(1, 0), Complex(0, -1), Complex(0, 1), Complex(1, 0);
      CMat closed = std::sqrt(1 + s) / (2 * c) * plus + std::sqrt(1 - s) / (2 * c) * minus;
      if (op_norm(gx.sqrt - closed) > 1e-10) return false;
    }
    return true;
  });

  add("hermitianized deformed sigma_z is diag(1,-1)", [] {
    for (double w : {0.3, 0.9}) {
      auto [sx, sy, sz] = deformed_pauli(w);
      MetricOp g = metric_from_eigensystem(eig_general(sz));
      CMat dz(2, 2);
      dz << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0);
      if (op_norm(hermitianize(sz, g) - dz) > 1e-10) return false;
    }
    return true;
  });

  add("hermitianized deformed sigma_x keeps spectrum {-1,+1}", [] {
    // similarity invariance fixes the spectrum at {-1,+1}; the direct
    // product of the closed-form square roots is the regression target
    for (double w : {0.3, 0.9}) {
      auto [sx, sy, sz] = deformed_pauli(w);
      MetricOp g = metric_from_eigensystem(eig_general(sx));
      auto spec = eig_general(hermitianize(sx, g)).eigenvalues;
      if (!near(spec(0), {-1, 0}, 1e-10) || !near(spec(1), {1, 0}, 1e-10)) return false;
    }
    return true;
  });

  add("Bloch expectations <sigma^w_z> = cos(theta), <sigma_y> = sin(theta)sin(phi)", [] {
    auto bloch = [](double th, double ph) {
      CVec v(2);
      v << Complex(std::cos(th / 2), 0), std::exp(Complex(0, ph)) * std::sin(th / 2);
      return v;
    };
    for (double w : {0.35, 0.85}) {
      auto [sx, sy, sz] = deformed_pauli(w);
      MetricOp gz = metric_from_eigensystem(eig_general(sz));
      for (double th : {0.4, 1.9}) {
        for (double ph : {0.2, 2.6}) {
          CVec psi = bloch(th, ph);
          if (!near(expect(sz, gz, psi), {std::cos(th), 0}, 1e-10)) return false;
          if (!near(expect_naive(sy, psi), {std::sin(th) * std::sin(ph), 0}, 1e-10))
            return false;
        }
      }
    }
    return true;
  });

  add("two-level Hamiltonian: eigenvalues, metric, expectation", [] {
    double r = 1.0, th = M_PI / 6, ga = 2.0;
    auto tl = two_level_hamiltonian(r, th, ga);
    double disc = std::sqrt(ga * ga - r * r * std::sin(th) * std::sin(th));
    if (std::abs(tl.lambda_plus - (r * std::cos(th) + disc)) > 1e-12) return false;
    auto sys = eig_general(tl.h);
    MetricOp g = metric_from_eigensystem(sys);
    double cp = std::cos(tl.phi), sp = std::sin(tl.phi);
    CMat closed_g(2, 2);
    closed_g << Complex(1, 0) / (cp * cp), Complex(0, -sp) / (cp * cp),
               Complex(0, sp) / (cp * cp), Complex(1, 0) / (cp * cp);
    if (op_norm(g.g - closed_g) > 1e-10) return false;
    CVec psi(2);
    psi << Complex(0.6, 0), Complex(0, 0.8);
    Complex ab = psi(0) * std::conj(psi(1)) + std::conj(psi(0)) * psi(1);
    Complex closed_val = r * std::cos(th) + ga * std::abs(cp) * ab;
    return near(expect(tl.h, g, psi), closed_val, 1e-10);
  });

  add("metric dependence of the delta = 1/4 example", [] {
    CMat a(2, 2);
    a << Complex(0.625, 0), Complex(-0.375, 0), Complex(0.375, 0), Complex(-0.625, 0);
    CMat m1(2, 2), m2(2, 2);
    m1 << Complex(9, 0), Complex(-3, 0), Complex(-3, 0), Complex(1, 0);
    m2 << Complex(1, 0), Complex(-3, 0), Complex(-3, 0), Complex(9, 0);
    CVec e0(2);
    e0 << Complex(1, 0), Complex(0, 0);
    MetricOp g11 = MetricOp::from_matrix(m1 + m2);
    MetricOp g110 = MetricOp::from_matrix(m1 + 10.0 * m2);
    if (!is_metric_for(g11, a, 1e-10) || !is_metric_for(g110, a, 1e-10)) return false;
    return std::abs(expect(a, g11, e0) - expect(a, g110, e0)) > 1e-3;
  });

  add("norm bound of the para-unitary group", [] {
    auto [sx, sy, sz] = deformed_pauli(0.8);
    auto sys = eig_general(sx);
    MetricOp g = metric_from_eigensystem(sys);
    double bound = op_norm(g.inv_sqrt) * op_norm(g.sqrt);
    for (double t : {-4.0, -0.5, 1.5, 7.0})
      if (op_norm(group(sys, t)) > bound + 1e-9) return false;
    return true;
  });

  add("transfer-time formula against simulated first passage", [] {
    auto res = brachistochrone(0.9, -M_PI / 2, 1.0);
    if (std::abs(res.t_transfer - (2.0 * res.phi + M_PI) / res.omega) > 1e-14) return false;
    return std::abs(res.t_simulated - res.t_transfer) < 1e-6;
  });

  add("transfer time tends to zero at fixed gap", [] {
    double prev = std::numeric_limits<double>::infinity();
    for (double r : {0.0, 3.0, 30.0}) {
      auto res = brachistochrone(r, -M_PI / 2, std::sqrt(1.0 + r * r));
      if (res.t_transfer >= prev) return false;
      prev = res.t_transfer;
    }
    return prev < 0.05;
  });

  add("qubit cycle: tau = pi and closed-form complex phases", [] {
    double w = 0.3, phi = 0.7;
    auto tri = deformed_pauli(w);
    CMat hm = -tri[2];
    CMat x0(2, 2);
    x0 << Complex(std::cos(phi), 0), Complex(std::sin(phi), 0),
          Complex(std::sin(phi), 0), Complex(-std::cos(phi), 0);
    PhaseAnalysis pa = analyze_phases([hm](double) { return hm; }, x0, 4.0, 16000, 2);
    Complex b1(M_PI * (1 + std::cos(phi) / std::cos(w)),
               M_PI * std::sin(w) * std::sin(phi) / std::cos(w));
    Complex b2(M_PI * (1 - std::cos(phi) / std::cos(w)),
               -M_PI * std::sin(w) * std::sin(phi) / std::cos(w));
    return std::abs(pa.cycle.tau - M_PI) < 1e-8 && near(pa.report.beta(1), b1, 1e-5) &&
           near(pa.report.beta(0), b2, 1e-5) &&
           near(pa.report.holonomy_diag(1), std::exp(Complex(0, 1) * b1), 1e-6) &&
           near(pa.report.holonomy_diag(0), std::exp(Complex(0, 1) * b2), 1e-6);
  });

  add("biorthogonal expectation equals the metric quotient", [] {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      CMat v(3, 3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) v(i, j) = Complex(gauss(rng), gauss(rng));
      if (cond2(v) > 1e3) continue;
      CVec lam(3);
      for (int i = 0; i < 3; ++i) lam(i) = Complex(gauss(rng), 0);
      auto sys = eig_general(v * lam.asDiagonal() * v.inverse());
      CMat f(3, 3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) f(i, j) = Complex(gauss(rng), gauss(rng));
      f = 0.5 * (f + f.adjoint()).eval();
      CMat t = sys.right * f * sys.left.adjoint();
      MetricOp g = metric_from_eigensystem(sys);
      CVec psi(3);
      for (int i = 0; i < 3; ++i) psi(i) = Complex(gauss(rng), gauss(rng));
      Complex lhs = biorthogonal_expect(t, sys, psi);
      Complex rhs = expect(t, g, CVec(g.sqrt * psi));
      if (std::abs(lhs - rhs) > 1e-9 * std::max(1.0, std::abs(lhs))) return false;
    }
    return true;
  });

  return cases;
}

int run_verify(const std::string& suite) {
  if (suite != "paper") fail(Errc::ParseError, "unknown suite: " + suite);
  auto cases = paper_suite();
  int failures = 0;
  for (const auto& c : cases) {
    bool ok = false;
    std::string note;
    try {
      ok = c.run();
    } catch (const Error& e) {
      note = std::string("  [") + e.code_name() + "] " + e.what();
    }
    if (!ok) ++failures;
    std::cout << (ok ? "PASS  " : "FAIL  ") << c.name << note << "\n";
  }
  std::cout << cases.size() - failures << "/" << cases.size()
            << " regression checks passed\n";
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"non-Hermitian quantum mechanics toolkit"};
  app.require_subcommand(1);
  double tol = default_tol();

  auto* make = app.add_subcommand("make", "build operators in the JSON matrix format");
  std::string make_kind, make_out;
  double mk_omega = 0.0, mk_r = 0.0, mk_theta = 0.0, mk_gamma = 1.0;
  make->add_option("kind", make_kind, "pauli | twolevel")->required();
  make->add_option("--omega", mk_omega, "deformation angle, |omega| < pi/2");
  make->add_option("--r", mk_r);
  make->add_option("--theta", mk_theta);
  make->add_option("--gamma", mk_gamma);
  make->add_option("--out", make_out, "output file (pauli: one file per matrix)");

  auto* cls = app.add_subcommand("classify", "operator classification with witness metric");
  std::string cls_input;
  cls->add_option("--input", cls_input)->required();
  cls->add_option("--tol", tol);

  auto* exp_cmd = app.add_subcommand("expect", "metric-context expectation of an observable");
  std::string exp_obs, exp_metric = "auto", exp_state, exp_format = "json", exp_out;
  exp_cmd->add_option("--obs", exp_obs)->required();
  exp_cmd->add_option("--metric", exp_metric, "auto | identity | G.json");
  exp_cmd->add_option("--state", exp_state)->required();
  exp_cmd->add_option("--format", exp_format)->check(CLI::IsMember({"json", "csv"}));
  exp_cmd->add_option("--out", exp_out);

  auto* evo = app.add_subcommand("evolve", "propagate a state under h(t) = H");
  std::string evo_ham, evo_state, evo_out;
  double evo_t = 1.0;
  int evo_steps = 1000, evo_order = 2;
  evo->add_option("--ham", evo_ham)->required();
  evo->add_option("--t", evo_t)->required();
  evo->add_option("--steps", evo_steps);
  evo->add_option("--order", evo_order)->check(CLI::IsMember({2, 4}));
  evo->add_option("--state", evo_state)->required();
  evo->add_option("--out", evo_out);

  auto* bra = app.add_subcommand("brachistochrone", "two-level transfer-time analysis");
  double br_r = 0.0, br_theta = 0.0, br_gamma = 1.0;
  int br_steps_per_unit = 1000, br_jobs = 1;
  std::string br_sweep, br_out;
  bra->add_option("--r", br_r);
  bra->add_option("--theta", br_theta);
  bra->add_option("--gamma", br_gamma);
  bra->add_option("--steps-per-unit", br_steps_per_unit);
  bra->add_option("--sweep", br_sweep, "grid spec name=start:stop:step over r|theta|gamma");
  bra->add_option("--jobs", br_jobs, "sweep worker threads");
  bra->add_option("--out", br_out);

  auto* ph = app.add_subcommand("phase", "observable-geometric phase report");
  std::string ph_ham, ph_builder, ph_x0, ph_out, ph_sweep;
  double ph_bloch_phi = std::numeric_limits<double>::quiet_NaN();
  double ph_horizon = 10.0;
  int ph_steps = 20000, ph_order = 2, ph_invariance = 0, ph_jobs = 1;
  unsigned ph_seed = 1234;
  ph->add_option("--ham", ph_ham, "Hamiltonian matrix file");
  ph->add_option("--builder", ph_builder, "e.g. minus-sigma-z:omega=0.3");
  ph->add_option("--x0", ph_x0, "observable matrix file");
  ph->add_option("--bloch-phi", ph_bloch_phi, "spin observable at Bloch angle phi");
  ph->add_option("--horizon", ph_horizon);
  ph->add_option("--steps", ph_steps);
  ph->add_option("--order", ph_order)->check(CLI::IsMember({2, 4}));
  ph->add_option("--invariance", ph_invariance, "invariance-suite trials");
  ph->add_option("--seed", ph_seed);
  ph->add_option("--sweep", ph_sweep, "omega grid (builder mode only)");
  ph->add_option("--jobs", ph_jobs, "sweep worker threads");
  ph->add_option("--out", ph_out);

  auto* ver = app.add_subcommand("verify", "run the built-in regression suite");
  std::string ver_suite = "paper";
  ver->add_option("--suite", ver_suite);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*make) {
      if (make_kind == "pauli") {
        auto tri = deformed_pauli(mk_omega);
        if (make_out.empty()) {
          json j = {{"sigma_x", io::matrix_to_json(tri[0])},
                    {"sigma_y", io::matrix_to_json(tri[1])},
                    {"sigma_z", io::matrix_to_json(tri[2])}};
          std::cout << j.dump(2) << "\n";
        } else {
          const char* tags[] = {"x", "y", "z"};
          for (int k = 0; k < 3; ++k)
            io::write_json_file(make_out + "_" + tags[k] + ".json", io::matrix_to_json(tri[k]));
        }
      } else if (make_kind == "twolevel") {
        auto tl = two_level_hamiltonian(mk_r, mk_theta, mk_gamma);
        if (tl.broken)
          std::cerr << "{\"warning\":\"broken regime: spectrum is complex\"}" << "\n";
        if (make_out.empty())
          std::cout << io::matrix_to_json(tl.h).dump(2) << "\n";
        else
          io::write_json_file(make_out, io::matrix_to_json(tl.h));
      } else {
        fail(Errc::ParseError, "unknown make kind: " + make_kind);
      }
      return 0;
    }

    if (*cls) {
      Classification c = classify(io::read_matrix_file(cls_input), tol);
      std::cout << classification_json(c).dump(2) << "\n";
      bool observable = c.kind == OperatorKind::Hermitian ||
                        c.kind == OperatorKind::ParaHermitianNonHermitian;
      return observable ? 0 : 2;
    }

    if (*exp_cmd) {
      CMat a = io::read_matrix_file(exp_obs);
      CVec psi = io::read_vector_file(exp_state);
      MetricOp g = MetricOp::identity_metric(static_cast<int>(a.rows()));
      if (exp_metric == "auto")
        g = metric_from_eigensystem(para_hermitian_eigensystem(a, tol));
      else if (exp_metric != "identity")
        g = MetricOp::from_matrix(io::read_matrix_file(exp_metric));
      Complex val = expect(a, g, psi);
      Complex naive = expect_naive(a, psi);
      if (exp_format == "csv") {
        std::string text = "expectation_re,expectation_im,naive_re,naive_im\n" +
                           csv_row({val.real(), val.imag(), naive.real(), naive.imag()});
        emit(exp_out, text);
      } else {
        json j = {{"expectation", io::complex_to_json(val)},
                  {"naive", io::complex_to_json(naive)}};
        emit(exp_out, j.dump(2) + "\n");
      }
      return 0;
    }

    if (*evo) {
      CMat h = io::read_matrix_file(evo_ham);
      CVec psi0 = io::read_vector_file(evo_state);
      Propagator p = make_propagator([&h](double) { return h; }, evo_t, evo_steps, evo_order);
      auto traj = evolve_state(p, psi0);
      std::string text = "t";
      for (int i = 0; i < p.dim; ++i)
        text += ",re" + std::to_string(i) + ",im" + std::to_string(i);
      text += ",norm\n";
      for (std::size_t k = 0; k < traj.size(); ++k) {
        std::vector<double> row{p.grid[k]};
        for (int i = 0; i < p.dim; ++i) {
          row.push_back(traj[k](i).real());
          row.push_back(traj[k](i).imag());
        }
        row.push_back(traj[k].norm());
        text += csv_row(row);
      }
      emit(evo_out, text);
      return 0;
    }

    if (*bra) {
      const std::string header =
          "r,theta,gamma,omega,phi,t_analytic,t_simulated,hermitian_bound\n";
      auto row_of = [&](const BrachistochroneResult& res) {
        return csv_row({res.r, res.theta, res.gamma, res.omega, res.phi, res.t_transfer,
                        res.t_simulated, res.hermitian_bound});
      };
      std::string text = header;
      if (br_sweep.empty()) {
        text += row_of(brachistochrone(br_r, br_theta, br_gamma, br_steps_per_unit));
      } else {
        Grid grid = parse_grid(br_sweep);
        if (grid.name != "r" && grid.name != "theta" && grid.name != "gamma")
          fail(Errc::GridParseError, "brachistochrone sweep name must be r|theta|gamma");
        auto rows = ordered_sweep(grid.values.size(), br_jobs, [&](std::size_t i) {
          double v = grid.values[i];
          double r = br_r, th = br_theta, ga = br_gamma;
          if (grid.name == "r") r = v;
          else if (grid.name == "theta") th = v;
          else ga = v;
          return row_of(brachistochrone(r, th, ga, br_steps_per_unit));
        });
        for (const auto& row : rows) text += row;
      }
      emit(br_out, text);
      return 0;
    }

    if (*ph) {
      CMat x0;
      if (!ph_x0.empty()) {
        x0 = io::read_matrix_file(ph_x0);
      } else if (std::isfinite(ph_bloch_phi)) {
        x0.resize(2, 2);
        x0 << Complex(std::cos(ph_bloch_phi), 0), Complex(std::sin(ph_bloch_phi), 0),
              Complex(std::sin(ph_bloch_phi), 0), Complex(-std::cos(ph_bloch_phi), 0);
      } else {
        fail(Errc::ParseError, "phase needs --x0 or --bloch-phi");
      }

      if (!ph_sweep.empty()) {
        if (ph_builder.empty())
          fail(Errc::GridParseError, "phase sweep requires --builder with an omega option");
        Grid grid = parse_grid(ph_sweep);
        if (grid.name != "omega")
          fail(Errc::GridParseError, "phase sweep name must be omega");
        auto base = ph_builder.substr(0, ph_builder.find(':'));
        std::string text = "omega,tau";
        int d = static_cast<int>(x0.rows());
        for (int n = 0; n < d; ++n)
          text += ",beta" + std::to_string(n) + "_re,beta" + std::to_string(n) + "_im";
        text += "\n";
        auto rows = ordered_sweep(grid.values.size(), ph_jobs, [&](std::size_t i) {
          double w = grid.values[i];
          auto h = parse_builder(base + ":omega=" + io::format_double(w));
          PhaseAnalysis pa = analyze_phases(h, x0, ph_horizon, ph_steps, ph_order);
          std::vector<double> row{w, pa.report.tau};
          for (int n = 0; n < d; ++n) {
            row.push_back(pa.report.beta(n).real());
            row.push_back(pa.report.beta(n).imag());
          }
          return csv_row(row);
        });
        for (const auto& row : rows) text += row;
        emit(ph_out, text);
        return 0;
      }

      std::function<CMat(double)> h;
      if (!ph_builder.empty()) {
        h = parse_builder(ph_builder);
      } else if (!ph_ham.empty()) {
        CMat hm = io::read_matrix_file(ph_ham);
        h = [hm](double) { return hm; };
      } else {
        fail(Errc::ParseError, "phase needs --ham or --builder");
      }
      PhaseAnalysis pa = analyze_phases(h, x0, ph_horizon, ph_steps, ph_order);
      std::optional<InvarianceReport> inv;
      if (ph_invariance > 0) inv = invariance_suite(pa.cycle, h, ph_invariance, ph_seed);
      emit(ph_out, phase_report_json(pa, inv).dump(2) + "\n");
      return 0;
    }

    if (*ver) return run_verify(ver_suite);
  } catch (const Error& e) {
    json env = {{"code", e.code_name()}, {"message", e.what()}};
    json diag = json::object();
    for (const auto& [k, v] : e.diagnostics()) diag[k] = v;
    env["diagnostics"] = diag;
    std::cerr << env.dump() << "\n";
    return (e.code() == Errc::ParseError || e.code() == Errc::GridParseError) ? 1 : 2;
  } catch (const std::exception& e) {
    json env = {{"code", "Internal"}, {"message", e.what()}};
    std::cerr << env.dump() << "\n";
    return 1;
  }
  return 0;
}
