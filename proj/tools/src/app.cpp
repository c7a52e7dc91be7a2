#include "chargedamp/app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <variant>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "chargedamp/scenario_io.hpp"

namespace chargedamp::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Outputs {
 public:
  Outputs(fs::path dir, RunReport& report) : dir_(std::move(dir)), report_(report) { fs::create_directories(dir_); }

  template <class Writer>
  void write(const std::string& name, Writer&& writer, std::ios::openmode mode = {}) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::out | std::ios::trunc | mode);
    if (!out) throw Error(fmt::format("cannot write '{}'", p.string()));
    writer(out);
    if (!out) throw Error(fmt::format("write failed for '{}'", p.string()));
    report_.outputs.push_back(p);
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  RunReport& report_;
};

Check make_check(std::string name, double measured, double tolerance) {
  return {std::move(name), std::isfinite(measured) && measured <= tolerance, measured, tolerance, {}};
}

std::string g17(double v) { return fmt::format("{:.17g}", v); }

Scenario load(const RunRequest& req) {
  if (!req.scenario_path) throw ConfigError("a scenario file is required for '" + req.command + "'", "");
  return load_scenario(*req.scenario_path, req.overrides);
}

template <class F>
auto launch(unsigned threads, F&& f) {
  return std::async(threads > 1 ? std::launch::async : std::launch::deferred, std::forward<F>(f));
}

double max_position_deviation(const Trajectory& a, const Trajectory& b, double& scale) {
  double dev = 0.0;
  scale = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    scale = std::max(scale, std::hypot(a[i].x, a[i].y));
    dev = std::max(dev, std::hypot(a[i].x - b[i].x, a[i].y - b[i].y));
  }
  return dev;
}

void simulate_classical(const RunRequest& req, Outputs& out, RunReport& rep) {
  const auto vs = validate_scenario(load(req));
  const auto grid = TimeGrid::for_scenario(*vs);
  auto fn = launch(req.threads, [&] { return integrate_newtonian(vs, grid); });
  const auto vm = integrate_variable_mass(vs, grid);
  const auto nt = fn.get();
  out.write("newtonian.csv", [&](std::ostream& o) { write_trajectory_csv(o, nt); });
  out.write("variable_mass.csv", [&](std::ostream& o) { write_trajectory_csv(o, vm); });
  rep.log.push_back(fmt::format("{} samples over [{:g}, {:g}] s", grid.size(), grid.front(), grid.back()));
}

void simulate_canonical(const RunRequest& req, Outputs& out, RunReport& rep) {
  const auto vs = validate_scenario(load(req));
  const auto grid = TimeGrid::for_scenario(*vs);
  const auto series = solve_parameters(vs, grid);
  const auto traj = classical_trajectory_canonical(vs, grid);
  out.write("canonical_trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(o, traj); });
  out.write("parameters.csv", [&](std::ostream& o) { write_parameter_csv(o, series); });
  out.write("maps.csv", [&](std::ostream& o) { write_map_csv(o, series); });

  double defect = 0.0;
  for (const auto& p : series) defect = std::max(defect, symplectic_defect(assemble_map(p.trans, p.shear, p.t)));
  rep.checks.push_back(make_check("max |M^T J M - J|", defect, 1e-10));
  const auto h = hyperbola_residual(series, *vs);
  double worst = 0.0;
  for (double r : h.residual) worst = std::max(worst, std::abs(r));
  rep.checks.push_back(make_check(fmt::format("max |hyperbola residual| ({} skipped)", h.skipped), worst, 1e-8));
}

std::vector<double> packet_times(const RunRequest& req, const Scenario& s) {
  if (!req.times.empty()) return req.times;
  std::vector<double> t;
  for (int k = 0; k < 10; ++k) t.push_back(s.t_start + (s.t_end - s.t_start) * k / 9.0);
  return t;
}

void simulate_packet(const RunRequest& req, Outputs& out, RunReport& rep) {
  const auto vs = validate_scenario(load(req));
  if (req.grid_points < 2) throw ConfigError("grid points must be at least 2", "grid");
  const PacketSpec spec = packet_for_scenario(*vs);
  const auto states = evolve_packet(vs, spec, TimeGrid::from_samples(packet_times(req, *vs)));

  std::vector<double> norms;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& st = states[i];
    const auto g = centered_grid(st.zeta_R, 4.0 * st.sigma, req.grid_points);
    const auto d = sample_density(g, st);
    norms.push_back(trapezoid_2d(g, d));
    if (req.binary_density) {
      out.write(fmt::format("density_{}.bin", i), [&](std::ostream& o) { write_density_binary(o, g, d, st.t); },
                std::ios::binary);
    } else {
      out.write(fmt::format("density_{}.csv", i), [&](std::ostream& o) { write_density_csv(o, g, d); });
    }
  }
  out.write("packet_summary.csv", [&](std::ostream& o) {
    o << "t,sigma,zeta_x,zeta_y,norm\n";
    for (std::size_t i = 0; i < states.size(); ++i) {
      const auto& st = states[i];
      o << fmt::format("{},{},{},{},{}\n", g17(st.t), g17(st.sigma), g17(st.zeta_R.x), g17(st.zeta_R.y), g17(norms[i]));
    }
  });
  double worst = 0.0;
  for (double n : norms) worst = std::max(worst, std::abs(n - 1.0));
  rep.checks.push_back(make_check(fmt::format("max |norm - 1| over {} times (8 sigma box)", norms.size()), worst, 1e-6));
}

void green_check(const RunRequest& req, Outputs& out, RunReport& rep) {
  const auto vs = validate_scenario(load(req));
  std::vector<double> times = req.times;
  if (times.empty()) times = {vs->t_start + 5e-12, vs->t_start + 20e-12};
  std::vector<double> grid_times{vs->t_start};
  for (double t : times) {
    if (t > vs->t_start) grid_times.push_back(t);
  }
  std::sort(grid_times.begin(), grid_times.end());
  grid_times.erase(std::unique(grid_times.begin(), grid_times.end()), grid_times.end());
  const auto states = evolve_packet(vs, packet_for_scenario(*vs), TimeGrid::from_samples(grid_times));

  std::string csv = "t,sin_delta,max_relative_error,refinement_change\n";
  for (std::size_t k = 1; k < states.size(); ++k) {
    const auto& st = states[k];
    const auto targets = centered_grid(st.zeta_R, 4.0 * st.sigma, 64);
    const auto green = propagate_via_green(st, targets);
    const auto closed = sample_psi(targets, st);
    double peak = 0.0;
    for (const auto& v : closed) peak = std::max(peak, std::abs(v));
    double worst = 0.0;
    for (std::size_t i = 0; i < closed.size(); ++i) {
      if (std::abs(closed[i]) > 1e-3 * peak) worst = std::max(worst, std::abs(green.psi[i] - closed[i]) / std::abs(closed[i]));
    }
    csv += fmt::format("{},{},{},{}\n", g17(st.t), g17(std::sin(st.shear.delta)), g17(worst), g17(green.refinement_change));
    rep.checks.push_back(make_check(fmt::format("t = {:g} s: max relative |psi_green - psi|", st.t), worst, 1e-4));
  }
  out.write("green_check.csv", [&](std::ostream& o) { o << csv; });
}

void compare(const RunRequest& req, Outputs& out, RunReport& rep) {
  const auto vs = validate_scenario(load(req));
  const auto grid = TimeGrid::for_scenario(*vs);
  const PacketSpec spec = packet_for_scenario(*vs);

  auto f_newton = launch(req.threads, [&] { return integrate_newtonian(vs, grid); });
  auto f_canon = launch(req.threads, [&] { return classical_trajectory_canonical(vs, grid); });
  auto f_packet = launch(req.threads, [&] { return evolve_packet(vs, spec, grid); });
  FigureInputs fig;
  fig.ltdmm = integrate_variable_mass(vs, grid);
  fig.newtonian = f_newton.get();
  const auto canon = f_canon.get();
  const auto packets = f_packet.get();
  for (const auto& st : packets) {
    fig.packet_center.push_back(st.zeta_R);
    fig.packet_center_velocity.push_back(packet_center_velocity(st, *vs));
  }

  out.write("newtonian.csv", [&](std::ostream& o) { write_trajectory_csv(o, fig.newtonian); });
  out.write("variable_mass.csv", [&](std::ostream& o) { write_trajectory_csv(o, fig.ltdmm); });
  out.write("canonical_trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(o, canon); });
  for (auto& p : emit_figure_data(out.dir(), fig)) rep.outputs.push_back(std::move(p));

  double scale = 0.0;
  const double dev = max_position_deviation(fig.ltdmm, canon, scale);
  rep.checks.push_back(make_check("canonical vs direct, max |dr| / max |r|", scale > 0 ? dev / scale : dev, 1e-6));

  json summary;
  summary["samples"] = grid.size();
  summary["t_end"] = grid.back();
  summary["canonical_max_position_deviation"] = dev;
  summary["trajectory_scale"] = scale;
  const auto& vn = fig.newtonian.back();
  const auto& vl = fig.ltdmm.back();
  summary["newtonian_final_velocity"] = {vn.vx, vn.vy};
  summary["variable_mass_final_velocity"] = {vl.vx, vl.vy};
  if (std::holds_alternative<LinearMass>(vs->mass_model)) {
    const Vec2 v_inf = stationary_velocity_ltdmm(*vs);
    const double vinf = std::hypot(v_inf.x, v_inf.y);
    const double en = std::hypot(vn.vx - v_inf.x, vn.vy - v_inf.y) / vinf;
    const double el = std::hypot(vl.vx - v_inf.x, vl.vy - v_inf.y) / vinf;
    summary["stationary_velocity"] = {v_inf.x, v_inf.y};
    summary["newtonian_relative_deviation"] = en;
    summary["variable_mass_relative_deviation"] = el;
    const auto tn = settling_time(fig.newtonian, v_inf);
    const auto tl = settling_time(fig.ltdmm, v_inf);
    summary["newtonian_settling_time"] = tn ? json(*tn) : json(nullptr);
    summary["variable_mass_settling_time"] = tl ? json(*tl) : json(nullptr);
    rep.checks.push_back(make_check("newtonian final velocity vs stationary, relative", en, 5e-3));
    rep.checks.push_back(make_check("variable-mass final velocity vs stationary, relative", el, 5e-3));
  }
  out.write("summary.json", [&](std::ostream& o) { o << summary.dump(2) << '\n'; });
}

void verify(const RunRequest& req, Outputs& out, RunReport& rep) {
  AcceptanceOptions opts;
  if (req.scenario_path) opts.gaas = load_scenario(*req.scenario_path, req.overrides);
  std::string text;
  for (const auto& r : run_acceptance(opts)) {
    const std::string line = r.summary_line();
    rep.log.push_back(line);
    text += line + '\n';
    for (const auto& c : r.checks) {
      Check prefixed = c;
      prefixed.name = fmt::format("criterion {}: {}", r.id, c.name);
      rep.checks.push_back(std::move(prefixed));
    }
    if (!r.error.empty()) rep.checks.push_back({fmt::format("criterion {}: raised", r.id), false, 1.0, 0.0, r.error});
    rep.checks.push_back({fmt::format("criterion {}: runtime, s", r.id), r.runtime <= r.runtime_budget, r.runtime,
                          r.runtime_budget, {}});
  }
  out.write("acceptance.txt", [&](std::ostream& o) { o << text; });
}

json to_json(const RunReport& rep) {
  json j;
  j["command"] = rep.command;
  j["wall_time"] = rep.wall_time;
  j["outputs"] = json::array();
  for (const auto& p : rep.outputs) j["outputs"].push_back(p.string());
  j["checks"] = json::array();
  for (const auto& c : rep.checks) {
    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"measured", c.measured}, {"tolerance", c.tolerance},
                           {"detail", c.detail}});
  }
  j["all_passed"] = rep.all_passed();
  return j;
}

void write_csv_rows(std::ostream& o, const std::string& header, std::size_t n,
                    const std::function<std::string(std::size_t)>& row) {
  o << header << '\n';
  for (std::size_t i = 0; i < n; ++i) o << row(i) << '\n';
}

}  // namespace

bool RunReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::vector<std::string> commands() {
  return {"simulate-classical", "simulate-canonical", "simulate-packet", "green-check", "compare", "verify"};
}

RunReport run(const RunRequest& req) {
  using Handler = void (*)(const RunRequest&, Outputs&, RunReport&);
  const std::pair<const char*, Handler> table[] = {
      {"simulate-classical", simulate_classical}, {"simulate-canonical", simulate_canonical},
      {"simulate-packet", simulate_packet},       {"green-check", green_check},
      {"compare", compare},                       {"verify", verify},
  };
  const auto it = std::find_if(std::begin(table), std::end(table), [&](const auto& e) { return req.command == e.first; });
  if (it == std::end(table)) throw ConfigError(fmt::format("unknown command '{}'", req.command), "command");
  if (req.scenario_path && !fs::exists(*req.scenario_path)) {
    throw ConfigError(fmt::format("scenario file '{}' does not exist", req.scenario_path->string()), "scenario");
  }

  RunReport rep;
  rep.command = req.command;
  const auto start = std::chrono::steady_clock::now();
  Outputs out(req.output_dir, rep);
  it->second(req, out, rep);
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const fs::path report_path = req.output_dir / "run_report.json";
  rep.outputs.push_back(report_path);
  std::ofstream o(report_path, std::ios::trunc);
  o << to_json(rep).dump(2) << '\n';
  if (!o) throw Error(fmt::format("cannot write '{}'", report_path.string()));
  return rep;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const WrongModelError*>(&e)) {
    return validation_failure;
  }
  return solver_failure;
}

std::vector<fs::path> emit_figure_data(const fs::path& dir, const FigureInputs& in) {
  fs::create_directories(dir);
  const std::size_t n = std::min(in.newtonian.size(), in.ltdmm.size());
  const bool packet = in.packet_center.size() >= n && in.packet_center_velocity.size() >= n;
  std::vector<fs::path> written;
  auto emit = [&](const std::string& name, const std::string& header, const std::function<std::string(std::size_t)>& row) {
    const fs::path p = dir / name;
    std::ofstream o(p, std::ios::trunc);
    write_csv_rows(o, header, n, row);
    if (!o) throw Error(fmt::format("cannot write '{}'", p.string()));
    written.push_back(p);
  };
  const auto& N = in.newtonian;
  const auto& L = in.ltdmm;
  const auto& C = in.packet_center;
  const auto& V = in.packet_center_velocity;

  emit("fig1.csv", packet ? "t,x_newtonian,y_newtonian,x_variable_mass,y_variable_mass,x_packet,y_packet"
                          : "t,x_newtonian,y_newtonian,x_variable_mass,y_variable_mass",
       [&](std::size_t i) {
         std::string r = fmt::format("{},{},{},{},{}", g17(L[i].t), g17(N[i].x), g17(N[i].y), g17(L[i].x), g17(L[i].y));
         if (packet) r += fmt::format(",{},{}", g17(C[i].x), g17(C[i].y));
         return r;
       });
  emit("fig2.csv", packet ? "t,vx_newtonian,vy_newtonian,vx_variable_mass,vy_variable_mass,vx_packet,vy_packet"
                          : "t,vx_newtonian,vy_newtonian,vx_variable_mass,vy_variable_mass",
       [&](std::size_t i) {
         std::string r = fmt::format("{},{},{},{},{}", g17(L[i].t), g17(N[i].vx), g17(N[i].vy), g17(L[i].vx), g17(L[i].vy));
         if (packet) r += fmt::format(",{},{}", g17(V[i].x), g17(V[i].y));
         return r;
       });
  emit("fig3.csv", "t,vx,vy", [&](std::size_t i) { return fmt::format("{},{},{}", g17(N[i].t), g17(N[i].vx), g17(N[i].vy)); });
  emit("fig4.csv", packet ? "t,vx,vy,vx_packet,vy_packet" : "t,vx,vy", [&](std::size_t i) {
    std::string r = fmt::format("{},{},{}", g17(L[i].t), g17(L[i].vx), g17(L[i].vy));
    if (packet) r += fmt::format(",{},{}", g17(V[i].x), g17(V[i].y));
    return r;
  });
  return written;
}

}  // namespace chargedamp::app
