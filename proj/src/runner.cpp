#include "magdirac/runner.hpp"

#include <fmt/format.h>
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <json.hpp>
#include <ostream>

#include "magdirac/dirac.hpp"
#include "magdirac/kernels.hpp"
#include "magdirac/multipliers.hpp"
#include "magdirac/propagators.hpp"

namespace magdirac {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct BasisInfo {
  fs::path cache_dir;
  bool cache_hit = false;
};

std::shared_ptr<const PolarGrid> make_grid(const RunConfig& cfg) {
  const double R = cfg.R ? *cfg.R : default_radius(cfg.field.B0, cfg.K, cfg.L);
  return std::make_shared<const PolarGrid>(
      build_polar_grid(R, cfg.Nr, effective_ntheta(cfg.Ntheta, cfg.K)));
}

ModeBasis load_or_build(const RunConfig& cfg, BasisInfo& info, std::ostream& log) {
  auto grid = make_grid(cfg);
  info.cache_dir = resolve_cache_dir(cfg);
  const auto modes = info.cache_dir / "basis_modes.txt";
  const auto radial = info.cache_dir / "basis_radial.txt";
  if (auto cached = ModeBasis::load(modes, radial, cfg.field, cfg.K, cfg.L, grid)) {
    info.cache_hit = true;
    log << "basis: loaded " << modes.string() << "\n";
    return std::move(*cached);
  }
  log << fmt::format("basis: building K={} L={} R={} Nr={} Ntheta={}\n", cfg.K, cfg.L, grid->R(),
                     grid->Nr(), grid->Ntheta());
  auto basis = ModeBasis::build(cfg.field, cfg.K, cfg.L, grid);
  std::error_code ec;
  fs::create_directories(info.cache_dir, ec);
  if (ec) throw Error(Errc::IoError, fmt::format("cannot create {}: {}", info.cache_dir.string(), ec.message()));
  basis.save(modes, radial);
  return basis;
}

// Tracks tolerance misses of a check task so the CSV is complete before the
// task reports failure.
struct CheckLog {
  int failures = 0;
  std::string first;

  bool note(bool ok, const std::string& what) {
    if (!ok && failures++ == 0) first = what;
    return ok;
  }
};

std::string pass(bool ok) { return ok ? "pass" : "fail"; }

EstimateReport task_spectrum(const ModeBasis& basis) {
  EstimateReport r;
  r.name = "spectrum";
  r.header = {"k", "ell", "lambda", "norm", "landau_level"};
  for (int k = -basis.K(); k <= basis.K(); ++k)
    for (int l = 0; l <= basis.L(); ++l) {
      const ModeIndex idx{k, l};
      r.rows.push_back({std::to_string(k), std::to_string(l),
                        format_number(basis.eigenvalue(idx)),
                        format_number(basis.norm_constant(idx)),
                        std::to_string(kernels::landau_level(idx))});
    }
  return r;
}

EstimateReport task_heat(const RunConfig& cfg, const ModeBasis& basis, CheckLog& chk) {
  constexpr double tol = 1e-5;
  const auto pairs = probe_pairs(2.0, 1.5, 24);
  EstimateReport r;
  r.name = "heat-check";
  r.header = {"t", "pairs", "max_rel_error", "max_abs_error", "tolerance", "status"};
  for (double t : cfg.times) {
    const auto c = heat_kernel_crosscheck(t, basis, pairs);
    const bool ok = chk.note(c.max_rel_error < tol, fmt::format("heat kernel at t={}", t));
    r.rows.push_back({format_number(t), std::to_string(c.pairs), format_number(c.max_rel_error),
                      format_number(c.max_abs_error), format_number(tol), pass(ok)});
  }
  return r;
}

EstimateReport task_schrodinger(const RunConfig& cfg, const ModeBasis& basis, CheckLog& chk) {
  constexpr double tol = 1e-3;
  constexpr double anti_tol = 1e-12;
  const auto pairs = probe_pairs(2.0, 2.0, 24);
  EstimateReport r;
  r.name = "schrodinger-check";
  r.header = {"t", "formula", "measured_sup", "measured_min", "naive_sup", "rel_error", "levels",
              "status"};
  for (double t : cfg.times) {
    const auto c = schrodinger_kernel_crosscheck(t, basis, pairs);
    const bool ok = chk.note(c.rel_error < tol, fmt::format("dispersive constant at t={}", t));
    r.rows.push_back({format_number(t), format_number(c.formula), format_number(c.measured_sup),
                      format_number(c.measured_min), format_number(c.naive_sup),
                      format_number(c.rel_error), std::to_string(c.levels), pass(ok)});
  }
  // e^{-i (pi/B0) H} = -I since every eigenvalue is an odd multiple of B0.
  const auto fam = random_family(cfg.field, cfg.K, cfg.L, 1, 12, cfg.seed);
  const auto u = schrodinger_apply(std::numbers::pi / cfg.field.B0, fam[0]);
  const double anti = (u + fam[0]).l2_norm();
  chk.note(anti < anti_tol, "anti-periodicity");
  r.metadata.push_back({"antiperiodicity_error", format_number(anti)});
  return r;
}

EstimateReport task_subordination(CheckLog& chk) {
  struct Case {
    double x;
    cplx y;
    double tol;
  };
  const Case cases[] = {{1.0, 1.0, 1e-8}, {4.0, 2.0, 1e-8}, {9.0, 0.5, 1e-8}, {1.0, {0.1, -5.0}, 1e-6}};
  EstimateReport r;
  r.name = "subordination-check";
  r.header = {"x_tilde", "y_re", "y_im", "residual", "nodes", "tolerance", "status"};
  for (const auto& c : cases) {
    SubordinationSample s;
    s.x_tilde = c.x;
    s.y = c.y;
    const auto q = subordination_rhs(s);
    const double res = subordination_residual(s);
    const bool ok = chk.note(res < c.tol, fmt::format("subordination at x={} y={}", c.x, c.y.real()));
    r.rows.push_back({format_number(c.x), format_number(c.y.real()), format_number(c.y.imag()),
                      format_number(res), std::to_string(q.nodes), format_number(c.tol), pass(ok)});
  }
  return r;
}

EstimateReport task_dirac(const RunConfig& cfg, const ModeBasis& basis, CheckLog& chk) {
  EstimateReport r;
  r.name = "dirac-check";
  r.header = {"check", "k", "ell", "m", "t", "value", "tolerance", "status"};
  auto row = [&](const std::string& check, int k, int l, double t, double v, double tol) {
    const bool ok = chk.note(v < tol, fmt::format("{} at k={} ell={}", check, k, l));
    r.rows.push_back({check, std::to_string(k), std::to_string(l), format_number(cfg.field.m),
                      format_number(t), format_number(v), format_number(tol), pass(ok)});
  };

  const auto table = ladder_coefficients(basis);
  const auto exact = ladder_coefficients_exact(cfg.field, cfg.K, cfg.L);
  double diff = 0.0;
  auto compare = [&](const LadderEntry& a, const LadderEntry& b) {
    if (a.in_range && b.in_range) diff = std::max(diff, std::abs(a.coef - b.coef));
  };
  for (std::size_t f = 0; f < table.minus.size(); ++f) {
    compare(table.minus[f], exact.minus[f]);
    compare(table.plus[f], exact.plus[f]);
  }
  row("ladder-vs-exact", 0, 0, 0.0, diff, 1e-6);
  row("ladder-leakage", 0, 0, 0.0, table.max_leakage, 1e-8);

  for (int k = -cfg.K; k <= cfg.K; ++k)
    for (int l = 0; l <= cfg.L; ++l) {
      if (!is_interior({k, l}, cfg.K, cfg.L)) continue;
      SpinorCoefficients up(cfg.field, cfg.K, cfg.L);
      up.upper(k, l) = 1.0;
      SpinorCoefficients down(cfg.field, cfg.K, cfg.L);
      down.lower(k, l) = 1.0;
      row("squaring-upper", k, l, 0.0, squaring_residual(up, table), 1e-6);
      row("squaring-lower", k, l, 0.0, squaring_residual(down, table), 1e-6);
    }

  if (cfg.field.m == 0.0) {
    for (int k = -cfg.K; k <= 0; ++k) {
      SpinorCoefficients z(cfg.field, cfg.K, cfg.L);
      z.upper(k, 0) = 1.0;
      row("zero-mode-image", k, 0, 0.0, apply_dirac(z, table).norm(), 1e-8);
      for (double t : cfg.times)
        row("zero-mode-evolution", k, 0, t, (evolve_dirac(t, z, table) - z).norm(), 1e-8);
    }
  }

  const auto def = deficiency_window_check();
  auto list = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
    return "{" + s + "}";
  };
  r.metadata = {{"deficiency_window1", list(def.window1)},
                {"deficiency_window2", list(def.window2)},
                {"deficiency_intersection", list(def.intersection)}};
  return r;
}

EstimateReport task_decay(const RunConfig& cfg) {
  std::vector<int> js;
  for (int j = cfg.j_min; j <= cfg.j_max; ++j) js.push_back(j);
  const auto grid = log_time_grid(cfg.t_scaled_min, cfg.t_scaled_max, cfg.t_points);
  EstimateReport out;
  for (Spin spin : cfg.spins) {
    const auto rep = to_report(decay_scan(js, grid, cfg.field, spin));
    out.name = rep.name;
    out.header = rep.header;
    out.rows.insert(out.rows.end(), rep.rows.begin(), rep.rows.end());
    for (const auto& [k, v] : rep.metadata) out.metadata.push_back({to_string(spin) + "." + k, v});
  }
  return out;
}

EstimateReport task_bernstein(const RunConfig& cfg) {
  std::vector<int> js;
  for (int j = cfg.j_min; j <= cfg.j_max; ++j) js.push_back(j);
  const auto rows = bernstein_scan(js, cfg.pairs, cfg.field);
  auto rep = to_report(rows);
  for (const auto& [q, p] : cfg.pairs)
    rep.metadata.push_back({fmt::format("spread_{}_{}", format_number(q), format_number(p)),
                            format_number(ratio_spread(rows, q, p))});
  return rep;
}

EstimateReport task_strichartz(const RunConfig& cfg) {
  std::vector<StrichartzRow> rows;
  for (const auto& [q, p] : cfg.pairs)
    for (Flow flow : cfg.flows)
      for (int j = cfg.j_min; j <= cfg.j_max; ++j)
        rows.push_back(strichartz_norm(q, p, j, cfg.T, point_source(j, cfg.field), flow));
  return to_report(rows);
}

EstimateReport task_norms(const RunConfig& cfg, const ModeBasis& basis) {
  const auto fam = random_family(cfg.field, cfg.K, cfg.L, cfg.family_size, cfg.family_modes, cfg.seed);
  EstimateReport out;
  for (double s : cfg.s_list) {
    const auto rep = to_report(norm_equivalence_scan(fam, s, basis));
    out.name = rep.name;
    out.header = rep.header;
    out.rows.insert(out.rows.end(), rep.rows.begin(), rep.rows.end());
  }
  return out;
}

EstimateReport task_square(const RunConfig& cfg, const ModeBasis& basis) {
  const auto fam = random_family(cfg.field, cfg.K, cfg.L, cfg.family_size, cfg.family_modes, cfg.seed);
  EstimateReport r;
  r.name = "square-check";
  r.header = {"id", "p", "lhs", "rhs", "ratio"};
  for (double p : cfg.p_list)
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const auto res = square_function_check(synthesize(fam[i], basis), p, basis);
      r.rows.push_back({std::to_string(i), format_number(p), format_number(res.lhs),
                        format_number(res.rhs), format_number(res.ratio)});
    }
  return r;
}

bool needs_basis(Task t) {
  switch (t) {
    case Task::Spectrum:
    case Task::HeatCheck:
    case Task::SchrodingerCheck:
    case Task::DiracCheck:
    case Task::NormCheck:
    case Task::SquareCheck:
      return true;
    default:
      return false;
  }
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  return std::to_string(secs);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw Error(Errc::IoError, fmt::format("cannot write {}", path.string()));
}

}  // namespace

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::ParseError:
    case Errc::ValidationError:
      return 2;
    case Errc::IoError:
      return 4;
    default:
      return 3;
  }
}

fs::path resolve_cache_dir(const RunConfig& cfg) {
  if (cfg.cache) return *cfg.cache;
  if (const char* env = std::getenv("MAGDIRAC_CACHE"); env && *env) return env;
  return cfg.out / "cache";
}

void write_error_record(const fs::path& dir, const Error& e) {
  try {
    json j;
    j["error"] = to_string(e.code());
    j["message"] = e.what();
    j["exit_code"] = exit_code_for(e.code());
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream f(dir / "error.json");
    f << j.dump(2) << "\n";
  } catch (...) {
  }
}

void run_task(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw Error(Errc::IoError, fmt::format("cannot create {}: {}", cfg.out.string(), ec.message()));
  fs::remove(cfg.out / "error.json", ec);

  BasisInfo info;
  std::optional<ModeBasis> basis;
  if (needs_basis(cfg.task)) basis.emplace(load_or_build(cfg, info, log));

  CheckLog chk;
  EstimateReport rep;
  switch (cfg.task) {
    case Task::Spectrum: rep = task_spectrum(*basis); break;
    case Task::HeatCheck: rep = task_heat(cfg, *basis, chk); break;
    case Task::SchrodingerCheck: rep = task_schrodinger(cfg, *basis, chk); break;
    case Task::SubordinationCheck: rep = task_subordination(chk); break;
    case Task::DiracCheck: rep = task_dirac(cfg, *basis, chk); break;
    case Task::DecayScan: rep = task_decay(cfg); break;
    case Task::BernsteinScan: rep = task_bernstein(cfg); break;
    case Task::StrichartzScan: rep = task_strichartz(cfg); break;
    case Task::NormCheck: rep = task_norms(cfg, *basis); break;
    case Task::SquareCheck: rep = task_square(cfg, *basis); break;
  }

  const auto csv = cfg.out / (to_string(cfg.task) + ".csv");
  rep.write_csv(csv);
  log << fmt::format("wrote {} ({} rows)\n", csv.string(), rep.rows.size());

  json meta;
  meta["task"] = to_string(cfg.task);
  meta["csv"] = csv.filename().string();
  meta["columns"] = rep.header;
  meta["rows"] = rep.rows.size();
  json m = json::object();
  for (const auto& [k, v] : rep.metadata) m[k] = v;
  meta["metadata"] = m;
  meta["config"] = cfg.canonical();
  if (basis) {
    meta["basis"] = {{"R", basis->grid().R()},
                     {"Nr", basis->grid().Nr()},
                     {"Ntheta", basis->grid().Ntheta()},
                     {"K", basis->K()},
                     {"L", basis->L()},
                     {"cache_dir", info.cache_dir.string()},
                     {"cache_hit", info.cache_hit}};
  }
  meta["threads"] = omp_get_max_threads();
  meta["checks_failed"] = chk.failures;
  meta["generated_at_unix"] = timestamp();
  write_text(cfg.out / "run.json", meta.dump(2) + "\n");

  if (chk.failures)
    throw Error(Errc::CheckFailed,
                fmt::format("{} tolerance miss(es), first: {}", chk.failures, chk.first));
}

int run(const RunConfig& cfg, std::ostream& log) {
  try {
    run_task(cfg, log);
    return 0;
  } catch (const Error& e) {
    write_error_record(cfg.out, e);
    log << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    const Error wrapped(Errc::IoError, e.what());
    write_error_record(cfg.out, wrapped);
    log << e.what() << "\n";
    return exit_code_for(wrapped.code());
  }
}

}  // namespace magdirac
