// Command-line front end: characteristic-value and energy sweeps as CSV,
// single-state wavefunction grids, charge-cluster reduction, and the
// self-verification suite (shooting + quadrature oracles).
//
// Exit codes: 0 ok, 1 verification/convergence failure, 2 usage error,
// 3 domain error (no bound state).

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dipion/mathieu.hpp"
#include "dipion/multipole.hpp"
#include "dipion/oracle.hpp"
#include "dipion/spectrum.hpp"

namespace {

using dipion::spectrum::EvalMethod;

constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, x);
  return buf;
}

// Tabular payload shared by all sweep commands; cells are empty where no
// bound state exists.
struct Table {
  std::vector<std::string> header;
  std::vector<std::string> col_fmt;  // printf format per column
  std::vector<std::vector<std::optional<double>>> rows;
};

void write_csv(std::ostream& os, const Table& t) {
  for (size_t j = 0; j < t.header.size(); ++j)
    os << (j ? "," : "") << t.header[j];
  os << "\n";
  for (const auto& row : t.rows) {
    for (size_t j = 0; j < row.size(); ++j) {
      if (j) os << ",";
      if (row[j]) os << fmt(t.col_fmt[j].c_str(), *row[j]);
    }
    os << "\n";
  }
}

void write_json(std::ostream& os, const Table& t) {
  nlohmann::json out;
  out["header"] = t.header;
  auto& rows = out["rows"];
  rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& cell : row) {
      if (cell)
        jr.push_back(*cell);
      else
        jr.push_back(nullptr);
    }
    rows.push_back(std::move(jr));
  }
  os << out.dump(2) << "\n";
}

void emit(std::ostream& os, const Table& t, bool as_json) {
  if (as_json)
    write_json(os, t);
  else
    write_csv(os, t);
}

// To honor deterministic output with independent sweep points, rows are
// computed in parallel but stored by index and written in input order.
void fill_rows_parallel(Table& t, int count,
                        const std::function<std::vector<std::optional<double>>(int)>& row_fn) {
  t.rows.assign(count, {});
  const unsigned workers =
      std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()), count);
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          t.rows[i] = row_fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Output sink: stdout by default, --out redirects to a file.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::invalid_argument("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

int run_critical(int m_max, double tol, const std::string& out, bool as_json) {
  Table t;
  t.header = {"m", "D_crit"};
  t.col_fmt = {"%.0f", "%.6f"};
  fill_rows_parallel(t, m_max + 1, [&](int m) -> std::vector<std::optional<double>> {
    return {double(m), dipion::spectrum::critical_dipole(m, tol)};
  });
  Sink sink(out);
  emit(sink.stream(), t, as_json);
  return 0;
}

int run_charvals(double p_min, double p_max, int steps, double tol, const std::string& out,
                 bool as_json) {
  Table t;
  t.header = {"p", "a_0", "a_2", "a_4", "a_6", "a_8"};
  t.col_fmt.assign(6, "%.12g");
  const double dp = (p_max - p_min) / (steps - 1);
  fill_rows_parallel(t, steps, [&](int i) -> std::vector<std::optional<double>> {
    const double p = p_min + i * dp;
    std::vector<std::optional<double>> row{p};
    for (int m = 0; m <= 4; ++m)
      row.emplace_back(dipion::mathieu::char_value_matrix(m, p, tol).a);
    return row;
  });
  Sink sink(out);
  emit(sink.stream(), t, as_json);
  return 0;
}

int run_energies(int m, const std::vector<int>& n_list, double d_min, double d_max, int steps,
                 EvalMethod method, double tol, const std::string& out, bool as_json) {
  for (int n : n_list) {
    if (n < m) {
      std::cerr << "error: n = " << n << " is below m = " << m << " (need n >= m)\n";
      return kExitUsage;
    }
  }
  if (m == 0 && d_max > 0.0) {
    std::cerr << "error: no bound states exist for m = 0 at any D > 0\n";
    return kExitDomain;
  }
  Table t;
  t.header = {"D"};
  t.col_fmt.assign(1 + n_list.size(), "%.12g");
  for (int n : n_list) t.header.push_back("E_" + std::to_string(n));
  const double dd = (d_max - d_min) / (steps - 1);
  fill_rows_parallel(t, steps, [&](int i) -> std::vector<std::optional<double>> {
    const double D = d_min + i * dd;
    std::vector<std::optional<double>> row{D};
    for (int n : n_list) {
      try {
        row.emplace_back(dipion::spectrum::energy(n, m, D, method, tol).energy);
      } catch (const dipion::spectrum::NoBoundStateError&) {
        row.emplace_back(std::nullopt);
      }
    }
    return row;
  });
  Sink sink(out);
  emit(sink.stream(), t, as_json);
  return 0;
}

int run_wavefunction(int n, int m, double D, EvalMethod method, double tol, double r_max,
                     int r_steps, int theta_steps, const std::string& out, bool as_json) {
  const auto state = dipion::spectrum::energy(n, m, D, method, tol);
  const auto sol =
      dipion::mathieu::char_value_matrix(state.m, dipion::spectrum::p_from_dipole(D), tol);
  if (r_max <= 0.0) {
    // cover the bulk of |psi|^2: past the peak of r^(2 lambda) e^(-2 beta r)
    // until the envelope has dropped by e^-26
    const double grow = 2.0 * (state.n_r + state.lambda);
    r_max = (grow + 2.0) / (2.0 * state.beta);
    while (2.0 * state.beta * r_max - grow * std::log(r_max + 1.0) < 26.0) r_max *= 1.2;
  }

  Table t;
  t.header = {"r", "theta", "psi"};
  t.col_fmt.assign(3, "%.12g");
  const double dr = r_max / (r_steps - 1);
  const double dtheta = 2.0 * M_PI / theta_steps;
  t.rows.reserve(size_t(r_steps) * theta_steps);

  // one radius per parallel unit, flattened afterwards in input order
  std::vector<std::vector<std::vector<std::optional<double>>>> per_radius(r_steps);
  std::atomic<int> next{0};
  const unsigned workers =
      std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()), r_steps);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < r_steps; i = next.fetch_add(1)) {
        const double r = i * dr;
        auto& rows = per_radius[i];
        rows.reserve(theta_steps);
        for (int j = 0; j < theta_steps; ++j) {
          const double theta = j * dtheta;
          rows.push_back({r, theta, dipion::spectrum::wavefunction_eval(state, sol, r, theta)});
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& rows : per_radius)
    for (auto& row : rows) t.rows.push_back(std::move(row));

  Sink sink(out);
  emit(sink.stream(), t, as_json);
  return 0;
}

int run_reduce(const std::string& path, const std::string& out, bool as_json) {
  dipion::multipole::ChargeCluster cluster;
  try {
    cluster = dipion::multipole::load_cluster_file(path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (cluster.charges.empty()) {
    std::cerr << "error: cluster has no charges\n";
    return kExitUsage;
  }
  const auto red = dipion::multipole::reduce(cluster);
  Sink sink(out);
  auto& os = sink.stream();
  if (as_json) {
    nlohmann::json j;
    j["Q"] = red.Q;
    j["D"] = red.D;
    j["axis"] = {red.axis[0], red.axis[1]};
    os << j.dump(2) << "\n";
  } else {
    os << "Q = " << fmt("%.6g", red.Q) << "\n";
    os << "D = " << fmt("%.6g", red.D) << "\n";
    os << "axis = (" << fmt("%.6g", red.axis[0]) << ", " << fmt("%.6g", red.axis[1]) << ")\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify: run the brute-force oracles against the analytic pipeline and
// print one line per check.

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

void run_state_checks(int n, int m, double D, bool inject_fault, double norm_tol,
                      std::vector<Check>& checks) {
  const auto state = dipion::spectrum::energy(n, m, D, EvalMethod::matrix);
  double e_closed = state.energy;
  if (inject_fault) e_closed *= 1.0 + 1e-3;

  char label[96];
  std::snprintf(label, sizeof(label), "n=%d m=%d D=%-9.6g", n, m, D);

  {
    const auto cfg = dipion::oracle::shooting_config_for(state.E_theta, state.n_r);
    const double e_shot = dipion::oracle::radial_eigenvalue_shoot(state.E_theta, state.n_r, cfg);
    const double rel = std::abs(e_shot - e_closed) / std::abs(e_closed);
    Check c;
    c.name = std::string("shooting     ") + label;
    c.pass = rel <= 1e-6;
    c.detail = "rel_dE=" + fmt("%.2e", rel);
    checks.push_back(std::move(c));
  }
  {
    const auto sol =
        dipion::mathieu::char_value_matrix(m, dipion::spectrum::p_from_dipole(D));
    const auto q = dipion::oracle::norm_quadrature(state, sol, norm_tol);
    const double dev = std::abs(q.value - 1.0);
    Check c;
    c.name = std::string("norm         ") + label;
    c.pass = dev <= 1e-6;
    c.detail = "|I-1|=" + fmt("%.2e", dev);
    checks.push_back(std::move(c));
  }
}

void run_convergence_check(int m, double p, const std::vector<int>& K_list,
                           std::vector<Check>& checks) {
  const auto report = dipion::oracle::convergence_report(m, p, K_list);
  // successive differences must fall until they reach the eigensolver
  // rounding floor (a few ulps of the matrix norm), then stay below it
  const double eps = std::numeric_limits<double>::epsilon();
  bool ok = true;
  double final_delta = 0.0;
  double prev_delta = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < report.size(); ++i) {
    const double delta = std::abs(report[i].second - report[i - 1].second);
    const double K = report[i].first;
    const double floor = eps * (4.0 * K * K + 2.0 * std::sqrt(2.0) * std::abs(p));
    if (delta > prev_delta && delta > floor) ok = false;
    prev_delta = std::max(delta, floor);
    final_delta = delta;
  }
  const double K_last = report.back().first;
  const double floor_last =
      eps * (4.0 * K_last * K_last + 2.0 * std::sqrt(2.0) * std::abs(p));
  if (final_delta > std::max(1e-12, floor_last)) ok = false;
  char label[96];
  std::snprintf(label, sizeof(label), "m=%d p=%-9.6g K=%d..%d", m, p, int(report.front().first),
                int(K_last));
  Check c;
  c.name = std::string("convergence  ") + label;
  c.pass = ok;
  c.detail = "final_delta=" + fmt("%.2e", final_delta) + " floor=" + fmt("%.2e", floor_last);
  checks.push_back(std::move(c));
}

int run_verify(bool quick, bool inject_fault) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Check> checks;

  const std::vector<int> ms = quick ? std::vector<int>{1} : std::vector<int>{1, 2, 3};
  const std::vector<double> fractions =
      quick ? std::vector<double>{0.0, 0.5} : std::vector<double>{0.0, 0.5, 0.9};
  const int n_span = quick ? 2 : 3;
  const double norm_tol = quick ? 1e-8 : 1e-9;

  for (int m : ms) {
    const double d_crit = dipion::spectrum::critical_dipole(m);
    for (double f : fractions)
      for (int dn = 0; dn < n_span; ++dn)
        run_state_checks(m + dn, m, f * d_crit, inject_fault, norm_tol, checks);
  }

  if (quick) {
    run_convergence_check(1, 21.3, {25, 50, 100, 200}, checks);
  } else {
    run_convergence_check(1, 21.3, {25, 50, 100, 200, 400}, checks);
    run_convergence_check(0, 5.0, {25, 50, 100, 200}, checks);
    run_convergence_check(7, 700.0, {64, 128, 256, 512}, checks);
  }

  int failed = 0;
  for (const auto& c : checks) {
    if (!c.pass) ++failed;
    std::printf("%-46s %s   %s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL", c.detail.c_str());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("VERIFY: %s (%zu checks, %d failed, %.1f s)\n", failed == 0 ? "PASS" : "FAIL",
              checks.size(), failed, secs);
  return failed == 0 ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bound states of a planar ion carrying a point dipole:\n"
               "Mathieu characteristic values, energy spectra, wavefunctions,\n"
               "charge-cluster reduction, and a self-verification suite."};
  app.require_subcommand(1);

  const std::map<std::string, EvalMethod> method_map{{"series", EvalMethod::series},
                                                     {"matrix", EvalMethod::matrix},
                                                     {"auto", EvalMethod::automatic}};

  // critical
  auto* c_crit = app.add_subcommand("critical", "Critical dipole moment per angular number m");
  int m_max = 7;
  double crit_tol = 1e-10;
  std::string crit_out;
  bool crit_json = false;
  c_crit->add_option("--m-max", m_max, "largest m")->check(CLI::Range(0, 64));
  c_crit->add_option("--tol", crit_tol, "root tolerance on D");
  c_crit->add_option("--out", crit_out, "output path (default stdout)");
  c_crit->add_flag("--json", crit_json, "emit JSON instead of CSV");

  // charvals
  auto* c_char = app.add_subcommand("charvals",
                                    "Characteristic values a_0..a_8 over a range of p");
  double p_min = 0.0, p_max = 30.0;
  int char_steps = 121;
  double char_tol = 1e-10;
  std::string char_out;
  bool char_json = false;
  c_char->add_option("--p-min", p_min, "start of p range");
  c_char->add_option("--p-max", p_max, "end of p range");
  c_char->add_option("--steps", char_steps, "number of rows")->check(CLI::Range(2, 1000000));
  c_char->add_option("--tol", char_tol, "eigenvalue tolerance");
  c_char->add_option("--out", char_out, "output path (default stdout)");
  c_char->add_flag("--json", char_json, "emit JSON instead of CSV");

  // energies
  auto* c_en = app.add_subcommand("energies", "Energy sweep E_n(D) at fixed m");
  int en_m = 1;
  std::vector<int> n_list;
  double d_min = 0.0, d_max = 7.0;
  int en_steps = 101;
  double en_tol = 1e-10;
  EvalMethod en_method = EvalMethod::automatic;
  std::string en_out;
  bool en_json = false;
  c_en->add_option("--m", en_m, "angular number m")->check(CLI::Range(0, 64));
  c_en->add_option("--n", n_list, "principal numbers n (comma separated)")
      ->required()
      ->delimiter(',');
  c_en->add_option("--d-min", d_min, "start of D range");
  c_en->add_option("--d-max", d_max, "end of D range");
  c_en->add_option("--steps", en_steps, "number of rows")->check(CLI::Range(2, 1000000));
  c_en->add_option("--method", en_method, "series|matrix|auto")
      ->transform(CLI::CheckedTransformer(method_map, CLI::ignore_case));
  c_en->add_option("--tol", en_tol, "eigenvalue tolerance");
  c_en->add_option("--out", en_out, "output path (default stdout)");
  c_en->add_flag("--json", en_json, "emit JSON instead of CSV");

  // wavefunction
  auto* c_wf = app.add_subcommand("wavefunction", "Normalized wavefunction on an (r, theta) grid");
  int wf_n = 1, wf_m = 1;
  double wf_d = 0.0;
  double wf_rmax = 0.0;
  int wf_rsteps = 101, wf_tsteps = 64;
  double wf_tol = 1e-10;
  EvalMethod wf_method = EvalMethod::automatic;
  std::string wf_out;
  bool wf_json = false;
  c_wf->add_option("--n", wf_n, "principal number n")->required();
  c_wf->add_option("--m", wf_m, "angular number m")->required();
  c_wf->add_option("--d", wf_d, "dipole moment D");
  c_wf->add_option("--r-max", wf_rmax, "radial extent (default: auto from the state)");
  c_wf->add_option("--r-steps", wf_rsteps, "radial grid points")->check(CLI::Range(2, 100000));
  c_wf->add_option("--theta-steps", wf_tsteps, "angular grid points")
      ->check(CLI::Range(4, 100000));
  c_wf->add_option("--method", wf_method, "series|matrix|auto")
      ->transform(CLI::CheckedTransformer(method_map, CLI::ignore_case));
  c_wf->add_option("--tol", wf_tol, "eigenvalue tolerance");
  c_wf->add_option("--out", wf_out, "output path (default stdout)");
  c_wf->add_flag("--json", wf_json, "emit JSON instead of CSV");

  // reduce
  auto* c_red = app.add_subcommand("reduce", "Reduce a charge cluster to (Q, D, axis)");
  std::string red_path;
  std::string red_out;
  bool red_json = false;
  c_red->add_option("path", red_path, "cluster JSON file")->required();
  c_red->add_option("--out", red_out, "output path (default stdout)");
  c_red->add_flag("--json", red_json, "emit JSON instead of text");

  // verify
  auto* c_ver = app.add_subcommand("verify", "Cross-check closed forms against the oracles");
  bool quick = false;
  bool inject_fault = false;
  c_ver->add_flag("--quick", quick, "reduced grid, a few seconds");
  c_ver->add_flag("--inject-fault", inject_fault, "")->group("");  // test hook, hidden

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(c_crit)) return run_critical(m_max, crit_tol, crit_out, crit_json);
    if (app.got_subcommand(c_char))
      return run_charvals(p_min, p_max, char_steps, char_tol, char_out, char_json);
    if (app.got_subcommand(c_en))
      return run_energies(en_m, n_list, d_min, d_max, en_steps, en_method, en_tol, en_out,
                          en_json);
    if (app.got_subcommand(c_wf))
      return run_wavefunction(wf_n, wf_m, wf_d, wf_method, wf_tol, wf_rmax, wf_rsteps, wf_tsteps,
                              wf_out, wf_json);
    if (app.got_subcommand(c_red)) return run_reduce(red_path, red_out, red_json);
    if (app.got_subcommand(c_ver)) return run_verify(quick, inject_fault);
  } catch (const dipion::spectrum::NoBoundStateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const dipion::mathieu::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerify;
  } catch (const dipion::spectrum::BracketError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerify;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}
