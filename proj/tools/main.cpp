// Copyright 2026 The terradyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// terradyn command line: simulate, optimize-terrain, cloud2height, eval,
// gradcheck, plot, scenario. Exit codes: 0 success, 2 input error, 3
// numerical failure.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "terradyn/eval.hpp"
#include "terradyn/io.hpp"
#include "terradyn/optim.hpp"
#include "terradyn/plot.hpp"
#include "terradyn/scenarios.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace terradyn;

namespace {

struct GlobalOpts {
  double dt = 0.01;
  double duration = 5.0;
  std::string contact = "vertical";
  unsigned seed = 0;
  std::string out_dir = ".";
  // Which global flags the user actually passed; config files fill the rest.
  bool dt_set = false, duration_set = false, contact_set = false;
};

ContactModelKind parse_contact(const std::string& s) {
  if (s == "vertical") return ContactModelKind::kVertical;
  if (s == "normal") return ContactModelKind::kNormal;
  throw InputError("unknown contact model '" + s +
                   "'; expected vertical or normal");
}

fs::path out_path(const GlobalOpts& g, const std::string& name) {
  fs::path p(name);
  return p.is_absolute() ? p : fs::path(g.out_dir) / p;
}

// One manifest next to the command's first output.
struct ManifestScope {
  RunManifest m;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  void input(const fs::path& p) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a_digest(read_file(p))));
    m.input_digests.emplace_back(p.string(), buf);
  }
  void output(const fs::path& p) { m.outputs.push_back(p.string()); }
  void write() {
    if (m.outputs.empty()) return;
    m.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    fs::path p(m.outputs.front());
    p += ".manifest.json";
    write_manifest(m, p);
  }
};

RigidState state_from_file(const fs::path& p) {
  Trajectory t = load_trajectory(p);
  return t.samples.front().state;
}

// Scenario config sidecar: waypoint + timing + contact, so simulate can be
// pointed at a scenario without re-typing everything.
void apply_config(const fs::path& path, GlobalOpts& g, WaypointControl& u,
                  bool waypoint_set) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  try {
    if (!waypoint_set && j.contains("waypoint")) {
      u.x_g = j["waypoint"].at("x").get<double>();
      u.y_g = j["waypoint"].at("y").get<double>();
      u.phi_g = j["waypoint"].at("phi").get<double>();
    }
    if (!g.dt_set && j.contains("dt")) g.dt = j["dt"].get<double>();
    if (!g.duration_set && j.contains("duration"))
      g.duration = j["duration"].get<double>();
    if (!g.contact_set && j.contains("contact"))
      g.contact = j["contact"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

int cmd_scenario(const GlobalOpts& g, const std::string& name, bool list) {
  if (list) {
    for (const auto& n : scenario_names()) std::cout << n << "\n";
    return 0;
  }
  Scenario sc = make_scenario(name, g.seed);
  fs::create_directories(g.out_dir);
  ManifestScope man;
  man.m.command = "scenario " + name;
  ordered_json cfg;
  cfg["waypoint"] = {{"x", sc.waypoint.x_g},
                     {"y", sc.waypoint.y_g},
                     {"phi", sc.waypoint.phi_g}};
  cfg["dt"] = sc.cfg.dt;
  cfg["duration"] = sc.cfg.duration;
  cfg["contact"] =
      sc.contact == ContactModelKind::kVertical ? "vertical" : "normal";
  cfg["seed"] = g.seed;
  man.m.config_json = cfg.dump();

  fs::path robot_p = out_path(g, name + "_robot.json");
  fs::path map_p = out_path(g, name + "_map.csv");
  fs::path state_p = out_path(g, name + "_state.csv");
  fs::path cfg_p = out_path(g, name + "_config.json");
  save_robot(sc.robot, robot_p);
  save_heightmap(sc.map, map_p);
  Trajectory t0;
  t0.samples.push_back({0.0, sc.s0});
  save_trajectory(t0, state_p);
  write_file_atomic(cfg_p, cfg.dump(2) + "\n");
  man.output(robot_p);
  man.output(map_p);
  man.output(state_p);
  man.output(cfg_p);
  man.write();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"terradyn: differentiable rigid-body/terrain simulation"};
  app.require_subcommand(1);

  GlobalOpts g;
  auto* dt_opt = app.add_option("--dt", g.dt, "Integration step [s]");
  auto* dur_opt = app.add_option("--duration", g.duration, "Rollout span [s]");
  auto* con_opt =
      app.add_option("--contact", g.contact, "Contact model: vertical|normal");
  app.add_option("--seed", g.seed, "Scenario noise seed");
  app.add_option("--out-dir", g.out_dir, "Directory for relative outputs");

  // --- scenario ---
  auto* sc_cmd = app.add_subcommand("scenario", "Generate a built-in scenario");
  std::string sc_name;
  bool sc_list = false;
  sc_cmd->add_option("name", sc_name, "Scenario name");
  sc_cmd->add_flag("--list", sc_list, "List scenario names");

  // --- simulate ---
  auto* sim_cmd = app.add_subcommand("simulate", "Roll out the forward model");
  std::string sim_robot, sim_map, sim_state, sim_config;
  std::string sim_out = "trajectory.csv", sim_forces;
  std::vector<double> sim_waypoint;
  int sim_stride = 1;
  bool sim_gyro = false;
  sim_cmd->add_option("--robot", sim_robot, "Robot model JSON")->required();
  sim_cmd->add_option("--map", sim_map, "Heightmap CSV")->required();
  sim_cmd->add_option("--state", sim_state,
                      "Initial state (first row of a trajectory CSV)");
  sim_cmd->add_option("--config", sim_config, "Scenario config JSON");
  sim_cmd->add_option("--waypoint", sim_waypoint, "Goal x y phi")->expected(3);
  sim_cmd->add_option("--out", sim_out, "Output trajectory CSV");
  sim_cmd->add_option("--forces", sim_forces, "Optional per-point force CSV");
  sim_cmd->add_option("--record-stride", sim_stride, "Record every Nth step");
  sim_cmd->add_flag("--gyroscopic", sim_gyro, "Include the gyroscopic torque");

  // --- cloud2height ---
  auto* c2h_cmd =
      app.add_subcommand("cloud2height", "Grid a point cloud into a heightmap");
  std::string c2h_cloud, c2h_out = "map.csv";
  int c2h_nx = 0, c2h_ny = 0;
  double c2h_res = 0.1, c2h_e0 = 1000.0, c2h_d0 = 50.0;
  std::vector<double> c2h_origin{0.0, 0.0};
  c2h_cmd->add_option("--cloud", c2h_cloud, "Point cloud (x y z lines)")
      ->required();
  c2h_cmd->add_option("--nx", c2h_nx, "Grid cells in x")->required();
  c2h_cmd->add_option("--ny", c2h_ny, "Grid cells in y")->required();
  c2h_cmd->add_option("--res", c2h_res, "Cell size [m]");
  c2h_cmd->add_option("--origin", c2h_origin, "Grid origin x y")->expected(2);
  c2h_cmd->add_option("--e0", c2h_e0, "Default elasticity");
  c2h_cmd->add_option("--d0", c2h_d0, "Default damping");
  c2h_cmd->add_option("--out", c2h_out, "Output heightmap CSV");

  // --- optimize-terrain ---
  auto* opt_cmd = app.add_subcommand("optimize-terrain",
                                     "Recover terrain from a trajectory");
  std::string opt_gt, opt_robot, opt_init = "flat";
  std::string opt_out = "optimized_map.csv", opt_report = "report.csv";
  std::string opt_optimizer = "adam";
  int opt_iters = 200;
  double opt_lr = 0.02, opt_chunk = 1.0, opt_wx = 1.0, opt_wr = 0.0;
  opt_cmd->add_option("--gt", opt_gt, "Ground-truth trajectory CSV")
      ->required();
  opt_cmd->add_option("--robot", opt_robot, "Robot model JSON")->required();
  opt_cmd->add_option("--init", opt_init, "flat or file:<map.csv>");
  opt_cmd->add_option("--iters", opt_iters, "Iterations");
  opt_cmd->add_option("--lr", opt_lr, "Learning rate");
  opt_cmd->add_option("--chunk", opt_chunk, "Chunk duration [s]");
  opt_cmd->add_option("--optimizer", opt_optimizer, "adam|gd");
  opt_cmd->add_option("--wx", opt_wx, "Position loss weight");
  opt_cmd->add_option("--wR", opt_wr, "Rotation loss weight");
  opt_cmd->add_option("--out", opt_out, "Output heightmap CSV");
  opt_cmd->add_option("--report", opt_report, "Loss curve CSV (iter,loss)");

  // --- eval ---
  auto* ev_cmd =
      app.add_subcommand("eval", "Tracking errors per terrain source");
  std::string ev_gt, ev_robot, ev_out = "eval.csv";
  std::vector<std::string> ev_maps;
  double ev_chunk = 1.0;
  ev_cmd->add_option("--gt", ev_gt, "Ground-truth trajectory CSV")->required();
  ev_cmd->add_option("--robot", ev_robot, "Robot model JSON")->required();
  ev_cmd->add_option("--map", ev_maps, "name=map.csv (repeatable)")
      ->required();
  ev_cmd->add_option("--chunk", ev_chunk, "Chunk duration [s]");
  ev_cmd->add_option("--out", ev_out, "Output CSV");

  // --- gradcheck ---
  auto* gc_cmd = app.add_subcommand(
      "gradcheck", "Finite-difference validation on random instances");
  int gc_trials = 20;
  double gc_eps = 1e-5, gc_tol = 1e-4;
  std::string gc_out = "gradcheck.csv";
  gc_cmd->add_option("--trials", gc_trials, "Number of random instances");
  gc_cmd->add_option("--eps", gc_eps, "Finite-difference step");
  gc_cmd->add_option("--tol", gc_tol, "Relative error tolerance");
  gc_cmd->add_option("--out", gc_out, "Report CSV");

  // --- plot ---
  auto* pl_cmd = app.add_subcommand("plot", "Deterministic SVG/PGM renders");
  std::string pl_loss, pl_traj, pl_gt, pl_map, pl_out = "plot.svg";
  std::string pl_mode = "xy";
  pl_cmd->add_option("--loss", pl_loss, "Loss report CSV (iter,loss)");
  pl_cmd->add_option("--traj", pl_traj, "Predicted trajectory CSV");
  pl_cmd->add_option("--gt", pl_gt, "Ground-truth trajectory CSV");
  pl_cmd->add_option("--map", pl_map, "Heightmap CSV (PGM output)");
  pl_cmd->add_option("--mode", pl_mode, "Trajectory plot mode: xy|zt");
  pl_cmd->add_option("--out", pl_out, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  g.dt_set = dt_opt->count() > 0;
  g.duration_set = dur_opt->count() > 0;
  g.contact_set = con_opt->count() > 0;

  try {
    if (*sc_cmd) {
      if (!sc_list && sc_name.empty())
        throw InputError("scenario: provide a name or --list");
      return cmd_scenario(g, sc_name, sc_list);
    }

    fs::create_directories(g.out_dir);

    if (*sim_cmd) {
      ManifestScope man;
      man.m.command = "simulate";
      RobotModel model = load_robot(sim_robot);
      HeightMap map = load_heightmap(sim_map);
      man.input(sim_robot);
      man.input(sim_map);
      RigidState s0;
      if (!sim_state.empty()) {
        s0 = state_from_file(sim_state);
        man.input(sim_state);
      }
      WaypointControl u{};
      bool waypoint_set = sim_waypoint.size() == 3;
      if (waypoint_set) u = {sim_waypoint[0], sim_waypoint[1], sim_waypoint[2]};
      if (!sim_config.empty()) {
        apply_config(sim_config, g, u, waypoint_set);
        man.input(sim_config);
      }
      SimConfig cfg;
      cfg.dt = g.dt;
      cfg.duration = g.duration;
      cfg.record_stride = sim_stride;
      ordered_json cj;
      cj["dt"] = cfg.dt;
      cj["duration"] = cfg.duration;
      cj["contact"] = g.contact;
      cj["waypoint"] = {{"x", u.x_g}, {"y", u.y_g}, {"phi", u.phi_g}};
      man.m.config_json = cj.dump();

      Rollout r = simulate(s0, map, u, model, cfg, parse_contact(g.contact),
                           !sim_forces.empty(), sim_gyro);
      fs::path outp = out_path(g, sim_out);
      save_trajectory(r.trajectory, outp);
      man.output(outp);
      if (!sim_forces.empty()) {
        std::string csv = "t,point,fx,fy,fz,contact\n";
        for (std::size_t k = 0; k < r.forces.size(); ++k) {
          double t = r.trajectory.samples[k].t;
          const ForceSet& fset = r.forces[k];
          for (std::size_t p = 0; p < fset.forces.size(); ++p)
            csv += format_double(t) + "," + std::to_string(p) + "," +
                   format_double(fset.forces[p].x) + "," +
                   format_double(fset.forces[p].y) + "," +
                   format_double(fset.forces[p].z) + "," +
                   std::to_string(int(fset.contact[p])) + "\n";
        }
        fs::path fp = out_path(g, sim_forces);
        write_file_atomic(fp, csv);
        man.output(fp);
      }
      man.write();
      return 0;
    }

    if (*c2h_cmd) {
      ManifestScope man;
      man.m.command = "cloud2height";
      std::vector<Vec3d> cloud = load_cloud(c2h_cloud);
      man.input(c2h_cloud);
      GridSpec grid;
      grid.nx = c2h_nx;
      grid.ny = c2h_ny;
      grid.resolution = c2h_res;
      grid.origin_x = c2h_origin[0];
      grid.origin_y = c2h_origin[1];
      HeightMap map = cloud_to_heightmap(cloud, grid, c2h_e0, c2h_d0);
      fs::path outp = out_path(g, c2h_out);
      save_heightmap(map, outp);
      man.output(outp);
      man.write();
      return 0;
    }

    if (*opt_cmd) {
      ManifestScope man;
      man.m.command = "optimize-terrain";
      Trajectory gt = load_trajectory(opt_gt);
      RobotModel model = load_robot(opt_robot);
      man.input(opt_gt);
      man.input(opt_robot);
      HeightMap init;
      if (opt_init == "flat") {
        init = flat_initial_map(gt, model);
      } else if (opt_init.rfind("file:", 0) == 0) {
        std::string p = opt_init.substr(5);
        init = load_heightmap(p);
        man.input(p);
      } else {
        throw InputError("--init must be 'flat' or 'file:<map.csv>'");
      }
      SimConfig cfg;
      cfg.dt = g.dt;
      OptimHyper hyper;
      hyper.learning_rate = opt_lr;
      hyper.iterations = opt_iters;
      hyper.chunk_duration = opt_chunk;
      hyper.contact = parse_contact(g.contact);
      hyper.weights = {opt_wx, opt_wr};
      if (opt_optimizer == "adam")
        hyper.optimizer = OptimizerKind::kAdam;
      else if (opt_optimizer == "gd")
        hyper.optimizer = OptimizerKind::kGradientDescent;
      else
        throw InputError("--optimizer must be adam or gd");
      ordered_json cj;
      cj["iters"] = opt_iters;
      cj["lr"] = opt_lr;
      cj["chunk"] = opt_chunk;
      cj["contact"] = g.contact;
      cj["optimizer"] = opt_optimizer;
      man.m.config_json = cj.dump();

      OptimReport rep = optimize_terrain(gt, init, model, cfg, hyper);
      fs::path outp = out_path(g, opt_out);
      save_heightmap(rep.final_map, outp);
      man.output(outp);
      std::string csv = "iter,loss\n";
      for (std::size_t k = 0; k < rep.loss_curve.size(); ++k)
        csv += std::to_string(k) + "," + format_double(rep.loss_curve[k]) +
               "\n";
      fs::path repp = out_path(g, opt_report);
      write_file_atomic(repp, csv);
      man.output(repp);
      man.write();
      return 0;
    }

    if (*ev_cmd) {
      ManifestScope man;
      man.m.command = "eval";
      Trajectory gt = load_trajectory(ev_gt);
      RobotModel model = load_robot(ev_robot);
      man.input(ev_gt);
      man.input(ev_robot);
      std::vector<std::pair<std::string, HeightMap>> sources;
      for (const auto& spec : ev_maps) {
        auto pos = spec.find('=');
        if (pos == std::string::npos)
          throw InputError("--map expects name=path, got '" + spec + "'");
        sources.emplace_back(spec.substr(0, pos),
                             load_heightmap(spec.substr(pos + 1)));
        man.input(spec.substr(pos + 1));
      }
      SimConfig cfg;
      cfg.dt = g.dt;
      auto rows = compare_encoders(gt, sources, model, cfg,
                                   parse_contact(g.contact), ev_chunk);
      std::string csv = "source,delta_x_m,delta_R_deg,N\n";
      for (const auto& [name, rep] : rows)
        csv += name + "," + format_double(rep.delta_x) + "," +
               format_double(rep.delta_R_deg) + "," + std::to_string(rep.n) +
               "\n";
      fs::path outp = out_path(g, ev_out);
      write_file_atomic(outp, csv);
      man.output(outp);
      man.write();
      return 0;
    }

    if (*gc_cmd) {
      ManifestScope man;
      man.m.command = "gradcheck";
      std::string csv = "trial,entries,max_rel_error,status\n";
      bool all_ok = true;
      int checked = 0;
      for (int k = 0; k < gc_trials; ++k) {
        GradCheckProblem p = random_smooth_problem(g.seed + k);
        GradCheckReport rep = grad_check(p, gc_eps, gc_tol);
        std::string status = rep.boundary_skipped
                                 ? "skipped"
                                 : (rep.passed ? "pass" : "fail");
        if (!rep.boundary_skipped) {
          ++checked;
          all_ok = all_ok && rep.passed;
        }
        csv += std::to_string(k) + "," + std::to_string(rep.entries.size()) +
               "," + format_double(rep.max_rel_error) + "," + status + "\n";
      }
      fs::path outp = out_path(g, gc_out);
      write_file_atomic(outp, csv);
      man.output(outp);
      man.write();
      std::cout << (all_ok ? "gradcheck passed" : "gradcheck FAILED") << " ("
                << checked << "/" << gc_trials << " instances checked)\n";
      if (!all_ok) return 3;
      return 0;
    }

    if (*pl_cmd) {
      ManifestScope man;
      man.m.command = "plot";
      fs::path outp = out_path(g, pl_out);
      if (!pl_map.empty()) {
        HeightMap map = load_heightmap(pl_map);
        man.input(pl_map);
        write_file_atomic(outp, heightmap_to_pgm(map));
      } else if (!pl_loss.empty()) {
        std::string text = read_file(pl_loss);
        man.input(pl_loss);
        Series s;
        s.label = "loss";
        std::istringstream in(text);
        std::string line;
        std::getline(in, line);
        if (line != "iter,loss" && line != "iter,loss\r")
          throw InputError(pl_loss + ": expected header 'iter,loss'");
        while (std::getline(in, line)) {
          if (line.empty()) continue;
          auto pos = line.find(',');
          if (pos == std::string::npos)
            throw InputError(pl_loss + ": malformed row '" + line + "'");
          s.x.push_back(std::stod(line.substr(0, pos)));
          s.y.push_back(std::stod(line.substr(pos + 1)));
        }
        write_file_atomic(outp,
                          svg_line_plot({s}, "iteration", "loss"));
      } else if (!pl_traj.empty()) {
        Trajectory pred = load_trajectory(pl_traj);
        man.input(pl_traj);
        std::vector<Series> series;
        auto to_series = [&](const Trajectory& t, const std::string& label,
                             const std::string& color) {
          Series s;
          s.label = label;
          s.color = color;
          for (const auto& smp : t.samples) {
            if (pl_mode == "zt") {
              s.x.push_back(smp.t);
              s.y.push_back(smp.state.x.z);
            } else {
              s.x.push_back(smp.state.x.x);
              s.y.push_back(smp.state.x.y);
            }
          }
          return s;
        };
        series.push_back(to_series(pred, "predicted", "#d62728"));
        if (!pl_gt.empty()) {
          Trajectory gt = load_trajectory(pl_gt);
          man.input(pl_gt);
          series.push_back(to_series(gt, "ground truth", "#1f77b4"));
        }
        const char* xl = pl_mode == "zt" ? "t [s]" : "x [m]";
        const char* yl = pl_mode == "zt" ? "z [m]" : "y [m]";
        write_file_atomic(outp, svg_line_plot(series, xl, yl));
      } else {
        throw InputError("plot: provide one of --loss, --traj or --map");
      }
      man.output(outp);
      man.write();
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
