#include "kinlab/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <unistd.h>

#include <fmt/format.h>

#include "kinlab/fiberlimit.hpp"
#include "kinlab/montecarlo.hpp"
#include "kinlab/semigroup.hpp"
#include "kinlab/transport.hpp"

namespace kinlab {

using json = nlohmann::ordered_json;

void Table::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw InvalidInput("table row does not match the header");
  rows.push_back(std::move(row));
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

namespace {

std::string num(double v) { return format_double(v); }
std::string num(Index v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }

json vec_json(const Vec& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(std::isfinite(v[i]) ? json(v[i]) : json());
  return a;
}

json mat_json(const Mat& m) {
  json a = json::array();
  for (Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
  return a;
}

json scalar(double v) { return std::isfinite(v) ? json(v) : json(); }

KineticModel make_model(const RunConfig& c) {
  const MomentumGrid grid(c.lattice.d_lat, c.lattice.n_per_axis);
  return KineticModel(DispersionLaw::cosine(c.lattice.d_lat, c.lattice.amplitudes), grid,
                      SpectralDensity::analytic(c.reservoir));
}

std::vector<std::string> momentum_columns(const std::string& prefix, int d) {
  std::vector<std::string> out;
  for (int a = 0; a < d; ++a) out.push_back(d == 1 ? prefix : fmt::format("{}_{}", prefix, a));
  return out;
}

void append_point(std::vector<std::string>& row, const Vec& k) {
  for (Index a = 0; a < k.size(); ++a) row.push_back(num(k[a]));
}

std::vector<double> db_omegas() {
  // 200 frequencies in [-3, 3], zero excluded
  std::vector<double> w;
  for (int j = 0; j < 200; ++j) w.push_back(-3.0 + 6.0 * (j + 0.5) / 200.0);
  return w;
}

CommandResult cmd_rates(const RunConfig& c) {
  const KineticModel model = make_model(c);
  const MomentumGrid& g = model.grid();
  const JumpRateTable& t = model.table();
  CommandResult r;
  r.table.columns = {"i", "j"};
  for (auto& s : momentum_columns("k_i", g.dim())) r.table.columns.push_back(s);
  for (auto& s : momentum_columns("k_j", g.dim())) r.table.columns.push_back(s);
  for (const char* s : {"eps_i", "eps_j", "rate"}) r.table.columns.push_back(s);
  for (Index i = 0; i < g.size(); ++i)
    for (Index j = 0; j < g.size(); ++j) {
      std::vector<std::string> row{num(i), num(j)};
      append_point(row, g.point(i));
      append_point(row, g.point(j));
      row.push_back(num(t.energies[i]));
      row.push_back(num(t.energies[j]));
      row.push_back(num(t.rates(i, j)));
      r.table.add(std::move(row));
    }
  const double a0 = min_escape_rate(t);
  r.summary["a0"] = a0;
  r.summary["max_escape_rate"] = t.escape.maxCoeff();
  r.summary["max_rate"] = t.rates.maxCoeff();
  r.summary["points"] = g.size();
  r.message = fmt::format("a0 = {:.10g}, max escape rate = {:.10g}", a0, t.escape.maxCoeff());
  return r;
}

CommandResult cmd_spectral_density(const RunConfig& c) {
  const SpectralDensity sd = SpectralDensity::analytic(c.reservoir);
  const auto omegas = db_omegas();
  const DetailedBalanceReport db = check_detailed_balance(sd, omegas);
  std::unique_ptr<CorrelationTable> oracle;
  std::string oracle_note = "available";
  try {
    oracle = std::make_unique<CorrelationTable>(c.reservoir);
  } catch (const OracleUnavailable& e) {
    oracle_note = e.what();
  }
  CommandResult r;
  r.table.columns = {"omega", "psi", "psi_minus", "db_violation", "psi_oracle", "oracle_rel_err"};
  double worst_oracle = 0.0;
  const double beta = c.reservoir.beta;
  for (double w : omegas) {
    const double p = sd(w), m = sd(-w);
    const double viol = std::abs(std::exp(beta * w) * p - m) / m;
    double o = std::nan(""), rel = std::nan("");
    if (oracle) {
      o = oracle->fourier(w);
      rel = std::abs(o - p) / std::abs(p);
      worst_oracle = std::max(worst_oracle, rel);
    }
    r.table.add({num(w), num(p), num(m), num(viol), num(o), num(rel)});
  }
  r.summary["db_max_violation"] = scalar(db.max_violation);
  r.summary["db_threshold"] = db.threshold;
  r.summary["oracle"] = oracle_note;
  r.summary["oracle_max_rel_err"] = oracle ? scalar(worst_oracle) : json();
  const bool ok = db.pass && (!oracle || worst_oracle < 1e-5);
  r.exit_code = ok ? kExitOk : kExitValidation;
  r.message = fmt::format("detailed balance {:.3e}, oracle {}", db.max_violation,
                          oracle ? fmt::format("{:.3e}", worst_oracle) : std::string("unavailable"));
  return r;
}

CommandResult cmd_ness(const RunConfig& c) {
  const KineticModel model = make_model(c);
  const StationaryState st = stationary_state(model, c.chi());
  const Vec gibbs = model.gibbs();
  CommandResult r;
  r.table.columns = {"i"};
  for (auto& s : momentum_columns("k", model.dim())) r.table.columns.push_back(s);
  for (const char* s : {"eps", "zeta", "gibbs"}) r.table.columns.push_back(s);
  for (Index i = 0; i < model.size(); ++i) {
    std::vector<std::string> row{num(i)};
    append_point(row, model.grid().point(i));
    row.push_back(num(model.energies()[i]));
    row.push_back(num(st.zeta[i]));
    row.push_back(num(gibbs[i]));
    r.table.add(std::move(row));
  }
  r.summary["gap"] = st.gap;
  r.summary["residual"] = st.residual;
  r.summary["velocity"] = vec_json(velocity(st, model));
  r.summary["min_zeta"] = st.zeta.minCoeff();
  r.message = fmt::format("gap = {:.10g}, residual = {:.3e}", st.gap, st.residual);
  return r;
}

CommandResult cmd_spectrum(const RunConfig& c) {
  const KineticModel model = make_model(c);
  const SpectrumReport sp = full_spectrum(model.generator(c.chi()));
  std::vector<Index> order(sp.eigenvalues.size());
  for (Index i = 0; i < sp.eigenvalues.size(); ++i) order[i] = i;
  // deterministic order: by real part descending, then imaginary part
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const cplx x = sp.eigenvalues[a], y = sp.eigenvalues[b];
    return x.real() != y.real() ? x.real() > y.real() : x.imag() < y.imag();
  });
  CommandResult r;
  r.table.columns = {"index", "re", "im"};
  for (Index i = 0; i < static_cast<Index>(order.size()); ++i)
    r.table.add({num(i), num(sp.eigenvalues[order[i]].real()), num(sp.eigenvalues[order[i]].imag())});
  r.summary["gap"] = sp.gap;
  r.summary["max_re_nonzero"] = sp.max_re_nonzero;
  r.summary["count_right_of_half_gap"] = sp.count_right_of_half_gap;
  r.message = fmt::format("gap = {:.10g}", sp.gap);
  return r;
}

CommandResult cmd_evolve(const RunConfig& c) {
  const KineticModel model = make_model(c);
  const Vec chi = c.chi();
  const StationaryState st = stationary_state(model, chi);
  const double a0 = min_escape_rate(model.table());
  const double t_end = c.evolve.t_end > 0.0 ? c.evolve.t_end : 5.0 / a0;
  std::vector<double> times;
  for (int j = 0; j < c.evolve.samples; ++j) times.push_back(t_end * j / (c.evolve.samples - 1));
  // start from the uniform density with unit mass
  const Vec f0 = Vec::Constant(model.size(), 1.0 / (model.weight() * model.size()));
  const EvolutionResult ev = evolve(model, chi, f0, times, c.evolve.method, &st.zeta);
  CommandResult r;
  r.table.columns = {"t", "mass", "distance", "min_value"};
  double mass_defect = 0.0;
  for (std::size_t j = 0; j < ev.times.size(); ++j) {
    r.table.add({num(ev.times[j]), num(ev.mass[j]), num(ev.distance[j]), num(ev.states[j].minCoeff())});
    mass_defect = std::max(mass_defect, std::abs(ev.mass[j] - 1.0));
  }
  r.summary["method"] = ev.method;
  r.summary["fallback"] = ev.fallback;
  r.summary["t_end"] = t_end;
  r.summary["mass_defect"] = mass_defect;
  r.summary["final_distance"] = ev.distance.back();
  r.exit_code = mass_defect < 1e-8 ? kExitOk : kExitValidation;
  r.message = fmt::format("{}: mass defect {:.3e}, final distance {:.3e}", ev.method, mass_defect, ev.distance.back());
  return r;
}

CommandResult cmd_transport(const RunConfig& c) {
  const KineticModel model = make_model(c);
  const Vec chi = c.chi();
  const BranchTracker branch(model, chi);
  const VelocityCheck vc = velocity_crosscheck(branch);
  const Mat d_rs = diffusion_rs(branch.state(), model);
  const FdDiffusion d_fd = diffusion_fd(branch);
  const bool at_rest = chi.cwiseAbs().maxCoeff() == 0.0;
  Mat d_gk;
  if (at_rest) d_gk = green_kubo(model).D;

  CommandResult r;
  r.table.columns = {"quantity", "i", "j", "value"};
  for (Index i = 0; i < vc.v_state.size(); ++i) r.table.add({"v", num(i), "", num(vc.v_state[i])});
  for (Index i = 0; i < vc.v_branch.size(); ++i) r.table.add({"v_branch", num(i), "", num(vc.v_branch[i])});
  auto add_mat = [&](const char* name, const Mat& m) {
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) r.table.add({name, num(i), num(j), num(m(i, j))});
  };
  add_mat("D_rs", d_rs);
  add_mat("D_fd", d_fd.D);
  if (at_rest) add_mat("D_gk", d_gk);

  const double scale = d_rs.cwiseAbs().maxCoeff();
  double spread = (d_rs - d_fd.D).cwiseAbs().maxCoeff() / scale;
  if (at_rest) spread = std::max(spread, (d_rs - d_gk).cwiseAbs().maxCoeff() / scale);
  r.summary["velocity"] = vec_json(vc.v_state);
  r.summary["velocity_branch_diff"] = vc.max_abs_diff;
  r.summary["D_rs"] = mat_json(d_rs);
  r.summary["D_fd"] = mat_json(d_fd.D);
  r.summary["D_gk"] = at_rest ? mat_json(d_gk) : json();
  r.summary["diffusion_rel_spread"] = spread;
  r.summary["gap"] = branch.state().gap;
  r.exit_code = spread < 1e-5 ? kExitOk : kExitValidation;
  r.message = fmt::format("v[0] = {:.10g}, D[0,0] = {:.10g}, spread {:.3e}", vc.v_state[0], d_rs(0, 0), spread);
  return r;
}

CommandResult cmd_einstein(const RunConfig& c) {
  const KineticModel model = make_model(c);
  const EinsteinReport e = einstein_check(model);
  CommandResult r;
  r.table.columns = {"i", "j", "mobility", "beta_D"};
  for (Index i = 0; i < e.mobility.rows(); ++i)
    for (Index j = 0; j < e.mobility.cols(); ++j)
      r.table.add({num(i), num(j), num(e.mobility(i, j)), num(e.beta_D(i, j))});
  r.summary["einstein_rel_err"] = e.rel_err;
  r.summary["pass"] = e.pass;
  r.exit_code = e.pass ? kExitOk : kExitValidation;
  r.message = fmt::format("einstein relative error {:.3e}", e.rel_err);
  return r;
}

CommandResult cmd_greenkubo(const RunConfig& c) {
  const KineticModel model = make_model(c);
  const GreenKubo gk = green_kubo(model);
  CommandResult r;
  r.table.columns = {"i", "j", "D_closed", "D_quadrature", "C0"};
  for (Index i = 0; i < gk.D.rows(); ++i)
    for (Index j = 0; j < gk.D.cols(); ++j)
      r.table.add({num(i), num(j), num(gk.D(i, j)), num(gk.D_quadrature(i, j)), num(gk.C0(i, j))});
  const double rel = (gk.D - gk.D_quadrature).cwiseAbs().maxCoeff() / gk.D.cwiseAbs().maxCoeff();
  r.summary["D"] = mat_json(gk.D);
  r.summary["D_quadrature"] = mat_json(gk.D_quadrature);
  r.summary["horizon"] = gk.horizon;
  r.summary["decay_rate"] = gk.decay_rate;
  r.summary["gap"] = gk.gap;
  r.summary["quadrature_rel_diff"] = rel;
  r.exit_code = rel < 1e-5 ? kExitOk : kExitValidation;
  r.message = fmt::format("D[0,0] = {:.10g} (quadrature {:.10g})", gk.D(0, 0), gk.D_quadrature(0, 0));
  return r;
}

CommandResult cmd_large_field(const RunConfig& c) {
  if (c.lattice.d_lat != 1) throw UnsupportedConfiguration("large-field needs lattice.d_lat = 1");
  const KineticModel model = make_model(c);
  const LargeFieldScan scan = large_field_scan(model, c.probes.large_field);
  CommandResult r;
  r.table.columns = {"chi", "v", "D", "chi_v", "chi_D", "band_ratio", "ok", "error"};
  bool all_ok = true;
  for (const auto& row : scan.rows) {
    r.table.add({num(row.chi), num(row.v), num(row.D), num(row.chi * row.v), num(row.chi * row.D),
                 num(row.band_ratio), row.ok ? "1" : "0",
                 row.error});
    all_ok = all_ok && row.ok;
  }
  r.summary["last_ratio"] = scalar(scan.last_ratio);
  r.summary["last_variation"] = scalar(scan.last_variation);
  r.summary["all_rows_ok"] = all_ok;
  r.exit_code = all_ok ? kExitOk : kExitValidation;
  r.message = fmt::format("v ratio over the last doubling {:.4f}, chi v variation {:.4f}", scan.last_ratio,
                          scan.last_variation);
  return r;
}

CommandResult cmd_mc(const RunConfig& c) {
  const KineticModel model = make_model(c);
  const Vec chi = c.chi();
  const JumpProcess process = make_jump_process(model, chi);
  McSettings s;
  s.n_traj = c.mc.n_traj;
  s.horizon = c.mc.horizon;
  s.seed = c.mc.seed;
  s.burn_in = c.mc.burn_in;
  const McEstimate est = ensemble_run(process, s);
  const StationaryState st = stationary_state(model, chi, {.compute_gap = false});
  const Vec reference = st.zeta * model.weight();
  const Vec v = velocity(st, model);
  const Mat d = diffusion_rs(st, model);

  CommandResult r;
  r.table.columns = {"quantity", "i", "j", "value", "stderr", "spectral"};
  for (Index i = 0; i < est.v_hat.size(); ++i)
    r.table.add({"v", num(i), "", num(est.v_hat[i]), num(est.v_stderr[i]), num(v[i])});
  for (Index i = 0; i < est.D_hat.rows(); ++i)
    for (Index j = 0; j < est.D_hat.cols(); ++j)
      r.table.add({"D", num(i), num(j), num(est.D_hat(i, j)), num(est.D_stderr(i, j)), num(d(i, j))});
  for (Index i = 0; i < est.histogram.size(); ++i)
    r.table.add({"histogram", num(i), "", num(est.histogram[i]), "", num(reference[i])});
  const double tv = total_variation(est.histogram, reference);
  r.summary["n_traj"] = est.n_traj;
  r.summary["v_hat"] = vec_json(est.v_hat);
  r.summary["v_stderr"] = vec_json(est.v_stderr);
  r.summary["v_spectral"] = vec_json(v);
  r.summary["D_hat"] = mat_json(est.D_hat);
  r.summary["D_stderr"] = mat_json(est.D_stderr);
  r.summary["D_spectral"] = mat_json(d);
  r.summary["tv_to_stationary"] = tv;
  r.summary["acceptance"] = est.acceptance;
  r.summary["mean_jumps"] = est.mean_jumps;
  r.message = fmt::format("v_hat[0] = {:.6g} +- {:.2g} (spectral {:.6g}), TV = {:.4f}", est.v_hat[0],
                          est.v_stderr[0], v[0], tv);
  return r;
}

CommandResult cmd_kinetic_limit(const RunConfig& c) {
  const KineticModel model = make_model(c);
  const KineticLimitTable t = kinetic_limit_error(model, c.probes.lambdas, c.kappa(), c.chi());
  CommandResult r;
  r.table.columns = {"lambda", "residual", "residual_rel", "dist_to_m", "free_error"};
  for (const auto& row : t.rows)
    r.table.add({num(row.lambda), num(row.residual), num(row.residual_rel), num(row.dist_to_m), num(row.free_error)});
  r.summary["order"] = t.order;
  r.summary["free_order"] = t.free_order;
  r.summary["monotone"] = t.monotone;
  r.summary["final_residual"] = t.rows.back().residual;
  r.summary["final_dist_to_m"] = t.rows.back().dist_to_m;
  r.message = fmt::format("order {:.3f}, monotone {}{}", t.order, t.monotone ? "yes" : "no",
                          t.monotone ? "" : " (flagged)");
  return r;
}

CommandResult cmd_validate(const RunConfig& c) {
  const KineticModel model = make_model(c);
  CommandResult r;
  r.table.columns = {"check", "value", "threshold", "pass"};
  bool all = true;
  auto check = [&](const std::string& name, double value, double threshold, bool pass) {
    r.table.add({name, num(value), num(threshold), pass ? "1" : "0"});
    r.summary[name] = scalar(value);
    all = all && pass;
  };
  const double a0 = min_escape_rate(model.table());
  check("a0", a0, 0.0, a0 > 0.0);
  const DetailedBalanceReport db = check_detailed_balance(model.density(), db_omegas());
  check("detailed_balance", db.max_violation, db.threshold, db.pass);
  const AssumptionAReport aa = check_assumption_A(model.law(), model.grid());
  check("assumption_a_worst_max", aa.worst_max, 1e-10, aa.holds);

  const Vec chi = c.chi();
  const Mat m = model.generator(chi);
  const double norm = norm_inf(m);
  const double conservation = (Vec::Ones(model.size()).transpose() * m).cwiseAbs().maxCoeff() / norm;
  check("conservation", conservation, 1e-10, conservation < 1e-10);
  Mat off = model.gain();
  off.diagonal().setZero();
  check("gain_min_offdiag", off.minCoeff(), 0.0, off.minCoeff() >= 0.0);
  const Mat m0 = model.generator(Vec(Vec::Zero(model.dim())));
  const double gibbs_res = (m0 * model.gibbs()).cwiseAbs().maxCoeff() / norm_inf(m0);
  check("gibbs_stationarity", gibbs_res, 1e-10, gibbs_res < 1e-10);
  const StationaryState st = stationary_state(model, chi);
  check("gap", st.gap, 0.0, st.gap > 0.0);
  check("stationary_residual", st.residual, 1e-10 * norm, st.residual < 1e-10 * norm);

  r.summary["pass"] = all;
  r.exit_code = all ? kExitOk : kExitValidation;
  r.message = fmt::format("a0 = {:.10g}, gap = {:.10g}, detailed balance residual = {:.3e}{}", a0, st.gap,
                          db.max_violation, all ? "" : " (FAILED)");
  return r;
}

const std::map<std::string, std::function<CommandResult(const RunConfig&)>>& registry() {
  static const std::map<std::string, std::function<CommandResult(const RunConfig&)>> r = {
      {"rates", cmd_rates},
      {"spectral-density", cmd_spectral_density},
      {"ness", cmd_ness},
      {"spectrum", cmd_spectrum},
      {"evolve", cmd_evolve},
      {"transport", cmd_transport},
      {"einstein", cmd_einstein},
      {"greenkubo", cmd_greenkubo},
      {"large-field", cmd_large_field},
      {"mc", cmd_mc},
      {"kinetic-limit", cmd_kinetic_limit},
      {"validate", cmd_validate},
  };
  return r;
}

json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json o = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      char* end = nullptr;
      const double v = std::strtod(row[i].c_str(), &end);
      const bool numeric = !row[i].empty() && end && *end == '\0';
      o[t.columns[i]] = numeric ? (std::isfinite(v) ? json(v) : json()) : json(row[i]);
    }
    rows.push_back(std::move(o));
  }
  return rows;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"rates",     "spectral-density", "ness",        "spectrum",
                                                 "evolve",    "transport",        "einstein",    "greenkubo",
                                                 "large-field", "mc",             "kinetic-limit", "validate"};
  return names;
}

CommandResult run_command(const std::string& command, const RunConfig& config) {
  const auto it = registry().find(command);
  if (it == registry().end()) throw ConfigError(fmt::format("unknown command '{}'", command));
  return it->second(config);
}

std::string render_csv(const Table& table, const std::string& command, const std::string& fingerprint) {
  std::string out = fmt::format("# kinlab command={} fingerprint={}\n", command, fingerprint);
  auto cell = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  };
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + cell(table.columns[i]);
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell(row[i]);
    out += '\n';
  }
  return out;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + fmt::format(".tmp{}", static_cast<long>(::getpid()));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(fmt::format("cannot open {} for writing", tmp.string()));
    f << content;
    f.flush();
    if (!f) throw Error(fmt::format("write to {} failed", tmp.string()));
  }
  fs::rename(tmp, target);
}

int dispatch(const std::string& command, const RunConfig& config, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  const std::string fingerprint = config_fingerprint(config);
  const auto start = std::chrono::steady_clock::now();
  CommandResult result;
  try {
    result = run_command(command, config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidInput& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnsupportedConfiguration& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitValidation;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const fs::path data = config.output.path.empty() ? fs::path(command + ".csv") : fs::path(config.output.path);
  fs::path summary_path = data;
  summary_path.replace_extension(".json");
  if (summary_path == data && config.output.format == "csv") summary_path += ".summary.json";

  json summary;
  summary["command"] = command;
  summary["fingerprint"] = fingerprint;
  summary["wall_time_s"] = wall;
  summary["exit_code"] = result.exit_code;
  for (auto& [k, v] : result.summary.items()) summary[k] = v;
  try {
    if (config.output.format == "csv") {
      write_atomic(data.string(), render_csv(result.table, command, fingerprint));
      summary["table"] = data.string();
    } else {
      summary["columns"] = result.table.columns;
      summary["rows"] = table_json(result.table);
    }
    write_atomic(summary_path.string(), summary.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << '\n';
    return kExitValidation;
  }
  out << command << ": " << result.message << '\n';
  if (config.output.format == "csv") out << "  table   " << data.string() << '\n';
  out << "  summary " << summary_path.string() << '\n';
  return result.exit_code;
}

}  // namespace kinlab
