#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "conecusp/parallel.hpp"
#include "conecusp/schwarzian.hpp"

namespace conecusp::cli {

namespace {

namespace fs = std::filesystem;

Json pt(Complex z) { return Json::array({z.real(), z.imag()}); }

Json disc_json(const Disc& d) { return Json{{"center", pt(d.center)}, {"radius", d.radius}}; }

struct Instance {
  InstanceConfig cfg;
  MeromorphicSum h;
  Disc domain;
  bool mask_domain = false;
  Complex base{};
  double truncation_error = 0.0;
};

Instance prepare(const InstanceConfig& cfg) {
  const MeromorphicSum source = cfg.source();
  const Rect& w = cfg.window;
  const Complex mid(0.5 * (w.x_min + w.x_max), 0.5 * (w.y_min + w.y_max));
  Disc domain;
  bool mask = true;
  if (cfg.domain) {
    domain = *cfg.domain;
  } else if (cfg.has_generator()) {
    domain = Disc{mid, 0.5 * std::min(w.width(), w.height())};
  } else {
    domain = Disc{mid, 0.5 * std::hypot(w.width(), w.height())};
    mask = false;
  }
  double err = 0.0;
  MeromorphicSum h = source;
  if (!source.is_finite()) {
    auto t = truncate(source, domain, cfg.tolerances.get("tail_tol"));
    err = t.error;
    h = std::move(t.sum);
  }
  const Complex base = cfg.base_point ? *cfg.base_point : default_base_point(h);
  return Instance{cfg, std::move(h), domain, mask, base, err};
}

Json instance_json(const Instance& inst) {
  Json j;
  j["source"] = inst.cfg.has_generator() ? inst.cfg.generator : std::string("terms");
  j["terms"] = inst.h.size();
  j["truncation_error"] = inst.truncation_error;
  j["domain"] = disc_json(inst.domain);
  j["base_point"] = pt(inst.base);
  return j;
}

ZeroSearchOptions zero_options(const Tolerances& tol) {
  ZeroSearchOptions z;
  z.tol = tol.get("zero_tol");
  z.tail_tol = tol.get("tail_tol");
  return z;
}

Lambda0Estimate lambda0_of(const Instance& inst) {
  return estimate_lambda0(DevelopingMap(inst.h, inst.base), inst.domain,
                          inst.cfg.tolerances.get("lambda0_resolution"));
}

Json lambda0_json(const Lambda0Estimate& e) {
  return Json{{"value", e.value},
              {"grid_resolution", e.grid_resolution},
              {"margin", e.margin},
              {"argmax", pt(e.argmax)},
              {"points", e.points}};
}

double resolve_lambda(const Instance& inst, const Lambda0Estimate& est) {
  return inst.cfg.lambda ? *inst.cfg.lambda : est.value + 1.0;
}

std::vector<SingularityReport> classify(const Instance& inst) {
  ClassifyOptions opt;
  opt.class_tol = inst.cfg.tolerances.get("class_tol");
  opt.zeros = zero_options(inst.cfg.tolerances);
  return classify_all(inst.h, inst.domain, opt);
}

Json cmd_classify(const Instance& inst, std::string& log) {
  const auto reports = classify(inst);
  const auto est = lambda0_of(inst);
  Json sing = Json::array();
  Json cones = Json::array();
  Json flags = Json::array();
  int cusps = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    sing.push_back(to_json(r));
    if (r.kind == SingularityKind::Cusp) ++cusps;
    if (r.kind == SingularityKind::Cone) {
      cones.push_back(Json{{"location", pt(r.location)}, {"theta", r.theta}, {"angle", r.angle()}});
    }
    if (r.flag) flags.push_back(i);
  }
  log += "classify: " + std::to_string(cusps) + " cusps, " + std::to_string(cones.size()) +
         " cones, " + std::to_string(flags.size()) + " flagged\n";
  Json j;
  j["command"] = "classify";
  j["instance"] = instance_json(inst);
  j["singularities"] = sing;
  j["divisor"] = Json{{"cusps", cusps}, {"cones", cones}};
  j["lambda0"] = lambda0_json(est);
  j["flags"] = flags;
  return j;
}

Json cmd_zeros(const Instance& inst, std::string& log) {
  const auto zs = locate_zeros(inst.h, inst.domain, zero_options(inst.cfg.tolerances));
  Json list = Json::array();
  int total = 0;
  for (const auto& z : zs) {
    list.push_back(Json{{"location", pt(z.location)},
                        {"multiplicity", z.multiplicity},
                        {"residual", z.refinement_residual}});
    total += z.multiplicity;
  }
  const int poles = poles_inside(inst.h, inst.domain.center, inst.domain.radius);
  log += "zeros: " + std::to_string(total) + " with multiplicity, " + std::to_string(poles) +
         " poles inside\n";
  Json j;
  j["command"] = "zeros";
  j["instance"] = instance_json(inst);
  j["zeros"] = list;
  j["zero_count"] = total;
  j["poles_inside"] = poles;
  return j;
}

Json cmd_lambda0(const Instance& inst, std::string& log) {
  const auto est = lambda0_of(inst);
  log += "lambda0: " + format_double(est.value) + " over " + std::to_string(est.points) +
         " points\n";
  Json j;
  j["command"] = "lambda0";
  j["instance"] = instance_json(inst);
  j["lambda0"] = lambda0_json(est);
  j["lambda_auto"] = est.value + 1.0;
  return j;
}

std::vector<Complex> check_points(const Instance& inst, const std::vector<Complex>& singular,
                                  std::size_t count, std::uint64_t seed) {
  const Rect& w = inst.cfg.window;
  const double clearance = std::max(inst.cfg.spacing, 1e-3);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(w.x_min, w.x_max), uy(w.y_min, w.y_max);
  std::vector<Complex> out;
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 1000 * count) {
      throw ConfigError("window and domain leave no room for curvature check points");
    }
    const Complex z(ux(rng), uy(rng));
    if (std::abs(z - inst.domain.center) >= inst.domain.radius) continue;
    bool ok = true;
    for (const Complex s : singular) ok = ok && std::abs(z - s) > clearance;
    if (ok) out.push_back(z);
  }
  return out;
}

double nearest_other(const std::vector<Complex>& singular, Complex p) {
  double d = std::numeric_limits<double>::infinity();
  for (const Complex s : singular) {
    if (s != p) d = std::min(d, std::abs(s - p));
  }
  return d;
}

Json cmd_verify(const Instance& inst, const RunOptions& opt, int& exit_code, std::string& log) {
  const Tolerances& tol = inst.cfg.tolerances;
  const auto est = lambda0_of(inst);
  const double lambda = resolve_lambda(inst, est);
  const double min_im = lambda - est.value;
  if (!(min_im > 0.0)) {
    throw NumericalError(ErrorKind::HalfPlaneViolation,
                         "Im f = " + format_double(min_im) + " at (" +
                             format_double(est.argmax.real()) + ", " +
                             format_double(est.argmax.imag()) + ") for lambda " +
                             format_double(lambda));
  }
  const DevelopingMap map(inst.h, inst.base);
  const DensityField field(map, lambda);
  const auto reports = classify(inst);

  std::vector<Complex> singular;
  for (const auto& t : inst.h.terms()) singular.push_back(t.pole);
  for (const auto& r : reports) {
    if (r.source == SingularitySource::ZeroOfH) singular.push_back(r.location);
  }

  Json checks = Json::array();
  bool all_ok = true;
  auto add = [&](Json check) {
    all_ok = all_ok && check["passed"].get<bool>();
    checks.push_back(std::move(check));
  };

  {
    std::size_t flagged = 0;
    for (const auto& r : reports) flagged += r.flag ? 1 : 0;
    add(Json{{"name", "classification"},
             {"passed", flagged == 0},
             {"singularities", reports.size()},
             {"flagged", flagged}});
  }

  {
    bool real_residues = true;
    for (const auto& t : inst.h.terms()) real_residues = real_residues && t.residue.imag() == 0.0;
    const double mtol = tol.get("monodromy_tol");
    Json items = Json::array();
    bool ok = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < inst.h.size(); ++i) {
      const auto& t = inst.h.terms()[i];
      if (std::abs(t.pole - inst.domain.center) >= inst.domain.radius) continue;
      const auto m = monodromy(inst.h, i);
      const double expected = kTwoPi * t.residue.real();
      const double dev = std::abs(m.translation - expected);
      const bool item_ok = dev < mtol && (!real_residues || std::abs(m.raw.imag()) < 1e-9);
      ok = ok && item_ok;
      worst = std::max(worst, dev);
      items.push_back(Json{{"pole", pt(t.pole)},
                           {"translation", m.translation},
                           {"expected", expected},
                           {"raw", pt(m.raw)},
                           {"passed", item_ok}});
    }
    add(Json{{"name", "monodromy"},
             {"passed", ok},
             {"max_deviation", worst},
             {"threshold", mtol},
             {"items", items}});
  }

  {
    const auto pts = check_points(inst, singular, inst.cfg.verify_points, opt.seed);
    const auto rep = curvature_check(field, pts, 0.0, singular);
    const double ctol = tol.get("curvature_tol");
    add(Json{{"name", "curvature"},
             {"passed", rep.max_abs_deviation < ctol},
             {"max_abs_deviation", rep.max_abs_deviation},
             {"threshold", ctol},
             {"points", rep.nodes_tested},
             {"seed", opt.seed}});
  }

  {
    const double cone_tol = tol.get("cone_tol");
    const double cusp_max = tol.get("cusp_theta_max");
    Json items = Json::array();
    bool ok = true;
    for (const auto& r : reports) {
      if (r.kind == SingularityKind::Regular) continue;
      const double d = nearest_other(singular, r.location);
      const bool cusp = r.kind == SingularityKind::Cusp;
      const double r1 = std::min(cusp ? 1e-3 : 0.02, 0.25 * d);
      const auto est_theta = measure_cone_angle(field, r.location, r1, 0.5 * r1);
      const bool item_ok = cusp ? est_theta.theta < cusp_max
                                : std::abs(est_theta.theta - r.theta) <= cone_tol * r.theta;
      ok = ok && item_ok;
      items.push_back(Json{{"location", pt(r.location)},
                           {"kind", std::string(to_string(r.kind))},
                           {"theta", r.theta},
                           {"measured", est_theta.theta},
                           {"radii", Json::array({r1, 0.5 * r1})},
                           {"passed", item_ok}});
    }
    add(Json{{"name", "cone_angles"}, {"passed", ok}, {"items", items}});
  }

  std::size_t passed = 0;
  for (const auto& c : checks) passed += c["passed"].get<bool>() ? 1 : 0;
  log += "verify: " + std::to_string(passed) + "/" + std::to_string(checks.size()) +
         " checks passed\n";
  exit_code = all_ok ? 0 : 1;

  Json j;
  j["command"] = "verify";
  j["instance"] = instance_json(inst);
  j["lambda"] = lambda;
  j["lambda0"] = lambda0_json(est);
  j["half_plane_margin"] = min_im;
  j["checks"] = checks;
  j["passed"] = all_ok;
  return j;
}

Json cmd_grid(const Instance& inst, const RunOptions& opt, std::string& log) {
  if (!opt.out_dir) throw ConfigError("grid needs --out DIR");
  const auto est = lambda0_of(inst);
  const double lambda = resolve_lambda(inst, est);
  const DensityField field(DevelopingMap(inst.h, inst.base), lambda);
  GridOptions go;
  for (const auto& z : locate_zeros(inst.h, inst.domain, zero_options(inst.cfg.tolerances))) {
    go.zeros.push_back(z.location);
  }
  go.locate = false;
  if (inst.mask_domain) go.domain = inst.domain;
  const MetricGrid grid = sample_grid(field, inst.cfg.window, inst.cfg.spacing, go);

  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("grid.csv", grid_csv(grid));
  Json j;
  j["command"] = "grid";
  j["instance"] = instance_json(inst);
  j["lambda"] = lambda;
  j["origin"] = pt(grid.origin);
  j["spacing"] = grid.spacing;
  j["nx"] = grid.nx;
  j["ny"] = grid.ny;
  j["masked_fraction"] = grid.masked_fraction();
  Json names = Json::array({"grid.csv"});
  if (inst.cfg.pgm) {
    double lo = 0.0, hi = 0.0;
    files.emplace_back("grid.pgm", grid_pgm(grid, lo, hi));
    const Json side{{"u_min", lo},    {"u_max", hi},           {"nx", grid.nx},
                    {"ny", grid.ny},  {"origin", pt(grid.origin)}, {"spacing", grid.spacing},
                    {"masked_value", 0}, {"first_row", "y_max"}};
    files.emplace_back("grid.pgm.json", to_text(side));
    names.push_back("grid.pgm");
    names.push_back("grid.pgm.json");
  }
  j["files"] = names;

  std::error_code ec;
  fs::create_directories(*opt.out_dir, ec);
  if (ec) throw IoError("cannot create '" + *opt.out_dir + "': " + ec.message());
  for (const auto& [name, bytes] : files) write_atomic((fs::path(*opt.out_dir) / name).string(), bytes);
  log += "grid: " + std::to_string(grid.nx) + "x" + std::to_string(grid.ny) + " nodes, masked " +
         format_double(grid.masked_fraction()) + "\n";
  return j;
}

Json cmd_rouche(const RunOptions& opt, std::string& log) {
  if (opt.n_max < 2) throw ConfigError("rouche needs N_max >= 2");
  Json reports = Json::array();
  for (int n = 2; n <= opt.n_max; ++n) {
    const auto r = rouche_report(n);
    log += "rouche: N=" + std::to_string(n) + (r.inequality_holds ? " holds" : " fails") +
           ", zeros " + std::to_string(r.zero_count_fN) + "/" + std::to_string(r.zero_count_h0) +
           "\n";
    reports.push_back(to_json(r));
  }
  Json j;
  j["command"] = "rouche";
  j["n_max"] = opt.n_max;
  j["reports"] = reports;
  return j;
}

Json error_json(const std::string& kind, const std::string& message, int code) {
  return Json{{"error", Json{{"kind", kind}, {"message", message}}}, {"exit_code", code}};
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"classify", "rouche", "verify",
                                                 "grid",     "zeros",  "lambda0"};
  return names;
}

Json to_json(const SingularityReport& r) {
  return Json{{"location", pt(r.location)},
              {"kind", std::string(to_string(r.kind))},
              {"theta", r.theta},
              {"angle", r.angle()},
              {"c2", pt(r.c2)},
              {"indicial", Json::array({r.indicial.first, r.indicial.second})},
              {"source", std::string(to_string(r.source))},
              {"flag", r.flag}};
}

Json to_json(const RoucheReport& r) {
  return Json{{"N", r.N},
              {"r_N", r.r_N},
              {"min_fN", r.min_fN},
              {"max_gN_bound", r.max_gN_bound},
              {"sampled_max_gN", r.sampled_max_gN},
              {"inequality_holds", r.inequality_holds},
              {"zero_count_fN", r.zero_count_fN},
              {"zero_count_h0", r.zero_count_h0},
              {"fN_lower_bound", r.fN_lower_bound},
              {"gN_exact_bound", r.gN_exact_bound},
              {"truncation_error", r.truncation_error},
              {"retained_terms", r.retained_terms}};
}

RoucheReport rouche_report(int N, std::size_t samples) {
  if (N < 1) throw std::invalid_argument("rouche_report: N must be positive");
  RoucheReport rep;
  rep.N = N;
  rep.r_N = 1.0 - 1.0 / (2.0 * N);
  const double r = rep.r_N;

  std::vector<Term> head;
  for (int j = 1; j <= N; ++j) head.push_back({H0Generator::residue(j), H0Generator::pole(j)});
  const MeromorphicSum fN(head);
  const auto trunc = truncate(MeromorphicSum::h0(N + 1), Disc{0.0, r}, 1e-10);
  rep.truncation_error = trunc.error;
  rep.retained_terms = trunc.last_index;
  const MeromorphicSum gN(std::vector<Term>(trunc.sum.terms().begin() + N, trunc.sum.terms().end()));

  std::vector<double> f_abs(samples), g_abs(samples);
  parallel_for(samples, [&](std::size_t k) {
    const Complex z = std::polar(r, kTwoPi * static_cast<double>(k) / static_cast<double>(samples));
    f_abs[k] = std::abs(eval(fN, z).value);
    g_abs[k] = std::abs(eval(gN, z).value);
  });
  rep.min_fN = *std::min_element(f_abs.begin(), f_abs.end());
  rep.sampled_max_gN = *std::max_element(g_abs.begin(), g_abs.end());

  double partial = 0.0;
  for (int j = N; j >= 1; --j) partial += 1.0 / (static_cast<double>(j) * j);
  rep.max_gN_bound = kPi * kPi / 6.0 - partial;
  rep.gN_exact_bound = H0Generator().tail_abs_bound(static_cast<std::size_t>(N), Disc{0.0, r});
  rep.fN_lower_bound = H0Generator::residue(1) / r;
  rep.inequality_holds = rep.min_fN > rep.max_gN_bound;

  const Circle c(0.0, r, 256);
  rep.zero_count_fN = winding_count(fN, c).count + poles_inside(fN, 0.0, r);
  rep.zero_count_h0 = winding_count(trunc.sum, c).count + poles_inside(trunc.sum, 0.0, r);
  return rep;
}

std::string grid_csv(const MetricGrid& grid) {
  std::string out = "x,y,u,masked\n";
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const std::size_t k = iy * grid.nx + ix;
      const Complex z = grid.node(ix, iy);
      out += format_double(z.real());
      out += ',';
      out += format_double(z.imag());
      out += ',';
      if (grid.mask[k]) {
        out += ",1\n";
      } else {
        out += format_double(grid.u[k]);
        out += ",0\n";
      }
    }
  }
  return out;
}

std::string grid_pgm(const MetricGrid& grid, double& u_min, double& u_max) {
  u_min = std::numeric_limits<double>::infinity();
  u_max = -u_min;
  for (std::size_t k = 0; k < grid.u.size(); ++k) {
    if (grid.mask[k]) continue;
    u_min = std::min(u_min, grid.u[k]);
    u_max = std::max(u_max, grid.u[k]);
  }
  if (!(u_max >= u_min)) u_min = u_max = 0.0;
  const double span = u_max - u_min;
  std::string out = "P5\n" + std::to_string(grid.nx) + " " + std::to_string(grid.ny) + "\n255\n";
  for (std::size_t row = 0; row < grid.ny; ++row) {
    const std::size_t iy = grid.ny - 1 - row;
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const std::size_t k = iy * grid.nx + ix;
      int level = 0;
      if (!grid.mask[k] && span > 0.0) {
        level = static_cast<int>(std::lround(255.0 * (grid.u[k] - u_min) / span));
      }
      out += static_cast<char>(std::clamp(level, 0, 255));
    }
  }
  return out;
}

void write_atomic(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + tmp + "' for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.close();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write to '" + tmp + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

Outcome run(const std::string& command, const RunOptions& options) {
  Outcome o;
  const auto& names = command_names();
  try {
    if (std::find(names.begin(), names.end(), command) == names.end()) {
      throw ConfigError("unknown command '" + command + "'");
    }
    if (options.threads < 1) throw ConfigError("--threads must be at least 1");
    set_thread_count(options.threads);
    Json report;
    if (command == "rouche") {
      report = cmd_rouche(options, o.err);
    } else {
      InstanceConfig cfg;
      if (options.config_path) {
        cfg = load_config(*options.config_path);
      } else if (options.config_text) {
        cfg = parse_config(*options.config_text);
      } else {
        throw ConfigError(command + " needs --config PATH");
      }
      for (const auto& t : options.tol_overrides) apply_tolerance_override(cfg.tolerances, t);
      const Instance inst = prepare(cfg);
      if (command == "classify") report = cmd_classify(inst, o.err);
      if (command == "zeros") report = cmd_zeros(inst, o.err);
      if (command == "lambda0") report = cmd_lambda0(inst, o.err);
      if (command == "verify") report = cmd_verify(inst, options, o.exit_code, o.err);
      if (command == "grid") report = cmd_grid(inst, options, o.err);
    }
    o.out = to_text(report);
    if (options.out_dir) {
      std::error_code ec;
      fs::create_directories(*options.out_dir, ec);
      if (ec) throw IoError("cannot create '" + *options.out_dir + "': " + ec.message());
      write_atomic((fs::path(*options.out_dir) / (command + ".json")).string(), o.out);
    }
  } catch (const ConfigError& e) {
    o = Outcome{2, "", o.err + to_text(error_json("ConfigError", e.what(), 2))};
  } catch (const std::invalid_argument& e) {
    o = Outcome{2, "", o.err + to_text(error_json("ConfigError", e.what(), 2))};
  } catch (const NumericalError& e) {
    o = Outcome{3, "", o.err + to_text(error_json(std::string(to_string(e.kind())), e.what(), 3))};
  } catch (const IoError& e) {
    o = Outcome{4, "", o.err + to_text(error_json("IoError", e.what(), 4))};
  } catch (const fs::filesystem_error& e) {
    o = Outcome{4, "", o.err + to_text(error_json("IoError", e.what(), 4))};
  } catch (const std::exception& e) {
    o = Outcome{3, "", o.err + to_text(error_json("InternalError", e.what(), 3))};
  }
  set_thread_count(1);
  return o;
}

}  // namespace conecusp::cli
