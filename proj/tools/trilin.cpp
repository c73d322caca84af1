#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "trilin/config.hpp"
#include "trilin/constants.hpp"
#include "trilin/csv.hpp"
#include "trilin/errors.hpp"
#include "trilin/manifest.hpp"
#include "trilin/modes.hpp"
#include "trilin/observe.hpp"
#include "trilin/parallel.hpp"
#include "trilin/scenarios.hpp"
#include "trilin/version.hpp"

namespace {

namespace fs = std::filesystem;
using trilin::ConfigError;
using trilin::config::Settings;
using trilin::constants::rad_to_khz;
using trilin::csv::Cell;
using trilin::csv::format_double;

struct Clock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

void apply_thread_env() {
  const char* env = std::getenv("TRILIN_THREADS");
  if (!env || !*env) return;
  int n = 0;
  auto res = std::from_chars(env, env + std::string_view(env).size(), n);
  if (res.ec != std::errc{} || *res.ptr != '\0' || n < 1)
    throw ConfigError("TRILIN_THREADS must be a positive integer");
  trilin::parallel::set_thread_cap(unsigned(n));
}

// Flag storage shared by the subcommands. CLI11 options bind to these
// fields; presence is checked through the returned Option handles so flags
// override file values only when actually given.
struct Cli {
  std::string config_path;
  std::string out_dir;
  bool seedless = false;

  double mass_u = 0.0, charge_e = 0.0;
  double omega_x_khz = 0.0, omega_y_khz = 0.0, omega_z_khz = 0.0;
  std::vector<int> truncation;
  std::int64_t dimension_cap = 0;
  double delta_park_khz = 0.0;
  std::string method;
  double tol = 0.0;
  int max_krylov_dim = 0;

  bool resonance_ratio = false;
  double delta_khz = 0.0;  // modes: optional detuning override

  std::string scenario;
  bool use_defaults = false;
  int fock_n = 0;
  double nbar = 0.0;
  std::string initial;
  int points = 0;
  double xi_tau_max = 0.0;
  double tau_max_ms = 0.0;
  double half_span_xi = 0.0;

  std::string tomo_input;
  double omega0_khz = 0.0;
  std::string kind, probe_mode, inversion;
  int ncut = 0;

  CLI::Option* o_trunc = nullptr;
  CLI::Option* o_cap = nullptr;
  CLI::Option* o_park = nullptr;
  CLI::Option* o_method = nullptr;
  CLI::Option* o_tol = nullptr;
  CLI::Option* o_kdim = nullptr;
  CLI::Option* o_delta = nullptr;
  CLI::Option* o_fock = nullptr;
  CLI::Option* o_nbar = nullptr;
  CLI::Option* o_initial = nullptr;
  CLI::Option* o_points = nullptr;
  CLI::Option* o_xi_tau = nullptr;
  CLI::Option* o_tau_ms = nullptr;
  CLI::Option* o_span = nullptr;
  CLI::Option* o_omega0 = nullptr;
  CLI::Option* o_kind = nullptr;
  CLI::Option* o_probe_mode = nullptr;
  CLI::Option* o_ncut = nullptr;
  CLI::Option* o_inversion = nullptr;
};

// Both modes and run take trap flags; each subcommand keeps its own option
// handles so presence checks consult the subcommand that actually parsed.
struct TrapOpts {
  CLI::Option* mass = nullptr;
  CLI::Option* charge = nullptr;
  CLI::Option* wx = nullptr;
  CLI::Option* wy = nullptr;
  CLI::Option* wz = nullptr;
};

void add_common_flags(CLI::App* cmd, Cli& f) {
  cmd->add_option("--config", f.config_path, "JSON config file");
  cmd->add_option("--out", f.out_dir, "Output directory");
  cmd->add_flag("--seedless", f.seedless,
                "Reserved; the tool has no randomness to seed");
}

TrapOpts add_trap_flags(CLI::App* cmd, Cli& f) {
  TrapOpts o;
  o.mass = cmd->add_option("--mass-u", f.mass_u, "Ion mass, atomic mass units");
  o.charge = cmd->add_option("--charge-e", f.charge_e,
                             "Ion charge, elementary charges");
  o.wx = cmd->add_option("--omega-x-khz", f.omega_x_khz, "Radial x trap frequency");
  o.wy = cmd->add_option("--omega-y-khz", f.omega_y_khz, "Radial y trap frequency");
  o.wz = cmd->add_option("--omega-z-khz", f.omega_z_khz, "Axial trap frequency");
  return o;
}

void add_run_flags(CLI::App* cmd, Cli& f) {
  f.o_trunc = cmd->add_option("--truncation", f.truncation,
                              "Fock cutoffs n_max_a,n_max_b,n_max_c")
                  ->delimiter(',');
  f.o_cap = cmd->add_option("--dimension-cap", f.dimension_cap,
                            "Refuse bases larger than this");
  f.o_park = cmd->add_option("--delta-park-khz", f.delta_park_khz,
                             "Parked detuning before the quench");
  f.o_method = cmd->add_option("--method", f.method, "Propagator: dense or krylov");
  f.o_tol = cmd->add_option("--tol", f.tol, "Krylov error budget");
  f.o_kdim = cmd->add_option("--max-krylov-dim", f.max_krylov_dim,
                             "Krylov subspace size");
  cmd->add_flag("--defaults", f.use_defaults,
                "Run with built-in defaults (explicit marker; this is also "
                "the behavior with no flags)");
  f.o_fock = cmd->add_option("--fock", f.fock_n, "Fock occupation of the field mode");
  f.o_nbar = cmd->add_option("--nbar", f.nbar, "Coherent-state mean occupation");
  f.o_initial = cmd->add_option("--initial", f.initial,
                                "Field preparation: fock or coherent");
  f.o_points = cmd->add_option("--points", f.points, "Time grid size");
  f.o_xi_tau = cmd->add_option("--xi-tau-max", f.xi_tau_max,
                               "Hold-time span, units of 1/xi");
  f.o_tau_ms = cmd->add_option("--tau-max-ms", f.tau_max_ms,
                               "Hold-time span, ms (exchange)");
  f.o_span = cmd->add_option("--half-span-xi", f.half_span_xi,
                             "Detuning scan half width, units of xi");
}

void apply_shared(Settings& s, const Cli& f, const TrapOpts& o) {
  if (!f.config_path.empty()) s.load_file(f.config_path);
  if (o.mass->count()) s.mass_u = f.mass_u;
  if (o.charge->count()) s.charge_e = f.charge_e;
  if (o.wx->count()) s.omega_x_khz = f.omega_x_khz;
  if (o.wy->count()) s.omega_y_khz = f.omega_y_khz;
  if (o.wz->count()) s.omega_z_khz = f.omega_z_khz;
}

void apply_run(Settings& s, const Cli& f) {
  if (f.o_trunc->count()) {
    if (f.truncation.size() != 3)
      throw ConfigError("--truncation needs exactly three values a,b,c");
    s.n_max_a = f.truncation[0];
    s.n_max_b = f.truncation[1];
    s.n_max_c = f.truncation[2];
  }
  if (f.o_cap->count()) s.dimension_cap = f.dimension_cap;
  if (f.o_park->count()) s.delta_park_khz = f.delta_park_khz;
  if (f.o_method->count()) s.method = f.method;
  if (f.o_tol->count()) s.krylov_tol = f.tol;
  if (f.o_kdim->count()) s.max_krylov_dim = f.max_krylov_dim;
  if (f.o_fock->count()) {
    s.jc_fock_n = f.fock_n;
    s.jc_initial = "fock";
  }
  if (f.o_nbar->count()) {
    if (f.scenario == "pdc") {
      s.pdc_nbar = f.nbar;
    } else {
      s.jc_nbar = f.nbar;
      if (!f.o_initial->count()) s.jc_initial = "coherent";
    }
  }
  if (f.o_initial->count()) s.jc_initial = f.initial;
  if (f.o_points->count()) {
    s.ac_points = s.exchange_points = s.jc_points = s.pdc_points = f.points;
  }
  if (f.o_xi_tau->count()) {
    s.jc_xi_tau_max = f.xi_tau_max;
    s.pdc_xi_tau_max = f.xi_tau_max;
  }
  if (f.o_tau_ms->count()) s.exchange_tau_max_ms = f.tau_max_ms;
  if (f.o_span->count()) s.ac_half_span_xi = f.half_span_xi;
}

trilin::hilbert::Truncation scenario_truncation(const Settings& s,
                                                const std::string& scenario) {
  if (auto t = s.truncation()) return *t;
  trilin::hilbert::Truncation t;
  t.dimension_cap = s.dimension_cap;
  if (scenario == "avoided-crossing") {
    t.n_max_a = t.n_max_b = t.n_max_c = 1;
  } else if (scenario == "pdc") {
    t.n_max_a = t.n_max_b = t.n_max_c = 25;
  } else {
    t.n_max_a = t.n_max_b = t.n_max_c = 10;
    if (scenario == "jc" && s.jc_initial == "coherent") t.n_max_c = 25;
  }
  return t;
}

void print_modes_table(const trilin::modes::ModeSystem& sys) {
  auto line = [](const char* name, double rad_s, double khz) {
    std::cout << name << "," << format_double(rad_s) << ","
              << format_double(khz) << "\n";
  };
  std::cout << "quantity,rad_s,khz\n";
  line("omega_a", sys.omega_a, rad_to_khz(sys.omega_a));
  line("omega_b", sys.omega_b, rad_to_khz(sys.omega_b));
  line("omega_c", sys.omega_c, rad_to_khz(sys.omega_c));
  line("delta", sys.delta, rad_to_khz(sys.delta));
  line("xi", sys.xi, rad_to_khz(sys.xi));
  std::cout << "xi_over_pi_khz,," << format_double(sys.xi / trilin::constants::pi / 1.0e3)
            << "\n";
  std::cout << "spacing_m," << format_double(sys.spacing) << ",\n";
}

int cmd_modes(const Cli& f, const TrapOpts& trap_opts) {
  if (f.resonance_ratio) {
    std::cout << format_double(trilin::modes::resonance_ratio()) << "\n";
    return 0;
  }
  Clock clock;
  Settings s;
  apply_shared(s, f, trap_opts);

  std::optional<double> override_delta;
  if (f.o_delta->count())
    override_delta = trilin::constants::khz_to_rad(f.delta_khz);
  trilin::modes::ModeSystem sys =
      trilin::modes::build_mode_system(s.trap(), override_delta);
  print_modes_table(sys);

  if (!f.out_dir.empty()) {
    fs::path dir(f.out_dir);
    fs::create_directories(dir);
    const std::string manifest_name = "modes_manifest.json";
    trilin::csv::Writer w(dir / "modes.csv", manifest_name,
                          {"omega_a_rad_s", "omega_b_rad_s", "omega_c_rad_s",
                           "delta_rad_s", "xi_rad_s", "omega_a_khz",
                           "omega_b_khz", "omega_c_khz", "delta_khz", "xi_khz",
                           "xi_over_pi_khz", "spacing_m"});
    w.row({sys.omega_a, sys.omega_b, sys.omega_c, sys.delta, sys.xi,
           rad_to_khz(sys.omega_a), rad_to_khz(sys.omega_b),
           rad_to_khz(sys.omega_c), rad_to_khz(sys.delta), rad_to_khz(sys.xi),
           sys.xi / trilin::constants::pi / 1.0e3, sys.spacing});
    w.commit();

    trilin::manifest::Builder m;
    m.command = "modes";
    m.resolved_config = s.echo("modes");
    if (f.o_delta->count())
      m.resolved_config["delta_override_khz"] = f.delta_khz;
    if (!f.config_path.empty())
      m.inputs.emplace_back(
          fs::path(f.config_path).filename().string(),
          trilin::manifest::hash_label(trilin::manifest::fnv1a64_file(f.config_path)));
    m.outputs.emplace_back("modes.csv", trilin::manifest::hash_label(
                                            trilin::manifest::fnv1a64_file(
                                                dir / "modes.csv")));
    m.duration_s = clock.seconds();
    m.write(dir / manifest_name);
  }
  return 0;
}

void write_record_csv(trilin::csv::Writer& w,
                      const trilin::scenarios::EvolutionRecord& rec) {
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    w.row({rec.times[i], rec.xi_tau[i], rec.means[i][0], rec.means[i][1],
           rec.means[i][2]});
  }
}

int cmd_run(const Cli& f, const TrapOpts& trap_opts) {
  Clock clock;
  Settings s;
  apply_shared(s, f, trap_opts);
  apply_run(s, f);

  const std::string scenario = f.scenario;
  fs::path dir(f.out_dir.empty() ? "." : f.out_dir);
  fs::create_directories(dir);

  trilin::hilbert::Truncation trunc = scenario_truncation(s, scenario);
  s.n_max_a = trunc.n_max_a;
  s.n_max_b = trunc.n_max_b;
  s.n_max_c = trunc.n_max_c;
  s.dimension_cap = trunc.dimension_cap;

  trilin::scenarios::ScenarioBase base;
  base.trap = s.trap();
  base.truncation = trunc;
  base.delta_park = s.delta_park();
  base.propagator = s.propagator();

  std::string stem = scenario == "avoided-crossing" ? "avoided_crossing" : scenario;
  const std::string manifest_name = stem + "_manifest.json";

  trilin::manifest::Builder m;
  m.command = "run " + scenario;
  if (!f.config_path.empty())
    m.inputs.emplace_back(
        fs::path(f.config_path).filename().string(),
        trilin::manifest::hash_label(trilin::manifest::fnv1a64_file(f.config_path)));

  std::vector<fs::path> written;
  auto add_output = [&](const fs::path& p) { written.push_back(p); };

  if (scenario == "avoided-crossing") {
    trilin::scenarios::AvoidedCrossingConfig cfg;
    static_cast<trilin::scenarios::ScenarioBase&>(cfg) = base;
    cfg.half_span_xi = s.ac_half_span_xi;
    cfg.points = s.ac_points;
    auto res = trilin::scenarios::run_avoided_crossing(cfg);

    trilin::csv::Writer w(dir / "avoided_crossing.csv", manifest_name,
                          {"delta_khz", "eig_lower_khz", "eig_upper_khz",
                           "gap_khz", "probe_offset_lower_khz",
                           "probe_offset_upper_khz"});
    for (const auto& row : res.rows) {
      w.row({rad_to_khz(row.delta), rad_to_khz(row.lower), rad_to_khz(row.upper),
             rad_to_khz(row.gap), rad_to_khz(row.probe_lower),
             rad_to_khz(row.probe_upper)});
    }
    w.commit();
    add_output(w.path());
    m.extra["system"] = {{"xi_rad_s", res.system.xi},
                         {"xi_over_pi_khz", res.system.xi / trilin::constants::pi / 1.0e3}};
  } else if (scenario == "exchange") {
    trilin::scenarios::ExchangeConfig cfg;
    static_cast<trilin::scenarios::ScenarioBase&>(cfg) = base;
    if (s.exchange_tau_max_ms > 0.0) cfg.tau_max = s.exchange_tau_max_ms * 1.0e-3;
    cfg.points = s.exchange_points;
    auto res = trilin::scenarios::run_energy_exchange(cfg);

    s.exchange_tau_max_ms = res.record.times.back() * 1.0e3;
    trilin::csv::Writer w(dir / "exchange_means.csv", manifest_name,
                          {"tau_s", "xi_tau", "mean_na", "mean_nb", "mean_nc"});
    write_record_csv(w, res.record);
    w.commit();
    add_output(w.path());
    m.extra["system"] = {{"xi_rad_s", res.system.xi},
                         {"xi_over_pi_khz", res.system.xi / trilin::constants::pi / 1.0e3}};
    m.extra["leakage"] = {{"initial", res.record.leakage.empty() ? 0.0 : res.record.leakage.front()},
                          {"flagged", res.record.leakage_flagged}};
  } else if (scenario == "jc") {
    trilin::scenarios::JaynesCummingsConfig cfg;
    static_cast<trilin::scenarios::ScenarioBase&>(cfg) = base;
    if (s.jc_initial == "fock") {
      cfg.initial = trilin::scenarios::JaynesCummingsConfig::Initial::fock;
    } else if (s.jc_initial == "coherent") {
      cfg.initial = trilin::scenarios::JaynesCummingsConfig::Initial::coherent;
    } else {
      throw ConfigError("jc initial must be fock or coherent");
    }
    cfg.fock_n = s.jc_fock_n;
    cfg.nbar = s.jc_nbar;
    cfg.xi_tau_max = s.jc_xi_tau_max;
    cfg.points = s.jc_points;
    auto res = trilin::scenarios::run_jaynes_cummings(cfg);

    s.jc_xi_tau_max = res.record.xi_tau.back();
    s.jc_points = int(res.record.times.size());
    trilin::csv::Writer w(dir / "jc_means.csv", manifest_name,
                          {"tau_s", "xi_tau", "mean_na", "mean_nb", "mean_nc"});
    write_record_csv(w, res.record);
    w.commit();
    add_output(w.path());

    if (res.fitted_omega) {
      trilin::csv::Writer wf(dir / "jc_fit.csv", manifest_name,
                             {"fock_n", "omega_fit_rad_s", "omega_fit_khz",
                              "omega_theory_rad_s", "ratio_fit_over_theory"});
      wf.row({std::int64_t(s.jc_fock_n), *res.fitted_omega,
              rad_to_khz(*res.fitted_omega), *res.theory_omega,
              *res.fitted_omega / *res.theory_omega});
      wf.commit();
      add_output(wf.path());
    }
    m.extra["system"] = {{"xi_rad_s", res.system.xi},
                         {"xi_over_pi_khz", res.system.xi / trilin::constants::pi / 1.0e3}};
    m.extra["leakage"] = {{"initial", res.record.leakage.empty() ? 0.0 : res.record.leakage.front()},
                          {"flagged", res.record.leakage_flagged}};
  } else if (scenario == "pdc") {
    trilin::scenarios::PdcConfig cfg;
    static_cast<trilin::scenarios::ScenarioBase&>(cfg) = base;
    cfg.nbar = s.pdc_nbar;
    cfg.xi_tau_max = s.pdc_xi_tau_max;
    cfg.points = s.pdc_points;
    auto res = trilin::scenarios::run_pdc_depleted(cfg);

    trilin::csv::Writer w(dir / "pdc_summary.csv", manifest_name,
                          {"tau_s", "xi_tau", "mean_na", "mean_nb", "mean_nc",
                           "geometric_residual_b", "geometric_residual_c"});
    for (std::size_t i = 0; i < res.record.times.size(); ++i) {
      w.row({res.record.times[i], res.record.xi_tau[i], res.record.means[i][0],
             res.record.means[i][1], res.record.means[i][2],
             res.geometric_residual_b[i], res.geometric_residual_c[i]});
    }
    w.commit();
    add_output(w.path());

    trilin::csv::Writer wd(dir / "pdc_distributions.csv", manifest_name,
                           {"tau_s", "mode", "n", "p"});
    for (std::size_t i = 0; i < res.record.times.size(); ++i) {
      for (int mi = 0; mi < 3; ++mi) {
        const auto& dist = res.record.distributions[i][mi];
        for (std::size_t n = 0; n < dist.p.size(); ++n) {
          wd.row({res.record.times[i],
                  std::string(trilin::hilbert::mode_name(trilin::hilbert::Mode(mi))),
                  std::int64_t(n), dist.p[n]});
        }
      }
    }
    wd.commit();
    add_output(wd.path());
    m.extra["system"] = {{"xi_rad_s", res.system.xi},
                         {"xi_over_pi_khz", res.system.xi / trilin::constants::pi / 1.0e3}};
    m.extra["leakage"] = {{"initial", res.record.leakage.empty() ? 0.0 : res.record.leakage.front()},
                          {"flagged", res.record.leakage_flagged}};
  } else {
    throw ConfigError("unknown scenario '" + scenario +
                      "'; expected avoided-crossing, exchange, jc, or pdc");
  }

  m.resolved_config = s.echo(scenario);
  for (const fs::path& p : written)
    m.outputs.emplace_back(p.filename().string(),
                           trilin::manifest::hash_label(
                               trilin::manifest::fnv1a64_file(p)));
  m.duration_s = clock.seconds();
  m.write(dir / manifest_name);
  return 0;
}

int cmd_tomography(const Cli& f) {
  Clock clock;
  Settings s;
  if (!f.config_path.empty()) s.load_file(f.config_path);
  if (f.o_omega0->count()) s.tomo_omega0_khz = f.omega0_khz;
  if (f.o_kind->count()) s.tomo_kind = f.kind;
  if (f.o_probe_mode->count()) s.tomo_mode = f.probe_mode;
  if (f.o_ncut->count()) s.tomo_ncut = f.ncut;
  if (f.o_inversion->count()) s.tomo_method = f.inversion;

  trilin::observe::SidebandSignal signal;
  if (s.tomo_kind == "blue") {
    signal.kind = trilin::observe::SidebandKind::blue;
  } else if (s.tomo_kind == "red") {
    signal.kind = trilin::observe::SidebandKind::red;
  } else {
    throw ConfigError("tomography kind must be blue or red");
  }
  if (s.tomo_mode == "a") signal.mode = trilin::hilbert::Mode::a;
  else if (s.tomo_mode == "b") signal.mode = trilin::hilbert::Mode::b;
  else if (s.tomo_mode == "c") signal.mode = trilin::hilbert::Mode::c;
  else throw ConfigError("tomography mode must be a, b, or c");
  signal.omega0 = trilin::constants::khz_to_rad(s.tomo_omega0_khz);

  trilin::csv::Table table = trilin::csv::read(f.tomo_input);
  std::size_t tcol = table.column("time_s");
  std::size_t pcol = table.column("probability");
  for (const auto& row : table.rows) {
    signal.times.push_back(trilin::csv::parse_double(row[tcol]));
    signal.excited.push_back(trilin::csv::parse_double(row[pcol]));
  }

  trilin::observe::InversionMethod method;
  if (s.tomo_method == "nnls") {
    method = trilin::observe::InversionMethod::nnls;
  } else if (s.tomo_method == "fourier") {
    method = trilin::observe::InversionMethod::fourier;
  } else {
    throw ConfigError("tomography method must be nnls or fourier");
  }

  auto rec = trilin::observe::reconstruct_distribution(signal, s.tomo_ncut, method);

  fs::path dir(f.out_dir.empty() ? "." : f.out_dir);
  fs::create_directories(dir);
  const std::string manifest_name = "tomography_manifest.json";
  trilin::csv::Writer w(dir / "distribution.csv", manifest_name, {"n", "p"});
  for (std::size_t n = 0; n < rec.distribution.p.size(); ++n)
    w.row({std::int64_t(n), rec.distribution.p[n]});
  w.commit();

  std::cout << "n_levels," << rec.distribution.p.size() << "\n"
            << "mean," << format_double(rec.distribution.mean) << "\n"
            << "condition_number," << format_double(rec.diagnostics.condition_number)
            << "\n"
            << "residual_l2," << format_double(rec.diagnostics.residual_l2) << "\n"
            << "nyquist_ok," << (rec.diagnostics.nyquist_ok ? "true" : "false")
            << "\n";

  trilin::manifest::Builder m;
  m.command = "tomography";
  m.resolved_config = s.echo("tomography");
  m.inputs.emplace_back(
      fs::path(f.tomo_input).filename().string(),
      trilin::manifest::hash_label(trilin::manifest::fnv1a64_file(f.tomo_input)));
  if (!f.config_path.empty())
    m.inputs.emplace_back(
        fs::path(f.config_path).filename().string(),
        trilin::manifest::hash_label(trilin::manifest::fnv1a64_file(f.config_path)));
  m.outputs.emplace_back("distribution.csv",
                         trilin::manifest::hash_label(
                             trilin::manifest::fnv1a64_file(dir / "distribution.csv")));
  m.extra["diagnostics"] = {{"nyquist_ok", rec.diagnostics.nyquist_ok},
                            {"max_dt_s", rec.diagnostics.max_dt},
                            {"nyquist_dt_s", rec.diagnostics.nyquist_dt},
                            {"condition_number", rec.diagnostics.condition_number},
                            {"residual_l2", rec.diagnostics.residual_l2},
                            {"mean", rec.distribution.mean}};
  m.duration_s = clock.seconds();
  m.write(dir / manifest_name);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-mode trilinear coupling simulator for trapped-ion chains"};
  app.set_version_flag("--version", trilin::version);
  app.require_subcommand(1);

  Cli f;

  CLI::App* modes = app.add_subcommand("modes", "Normal modes and coupling rate");
  add_common_flags(modes, f);
  TrapOpts modes_trap = add_trap_flags(modes, f);
  f.o_delta = modes->add_option("--delta-khz", f.delta_khz,
                                "Tune the tilt mode to this detuning");
  modes->add_flag("--resonance-ratio", f.resonance_ratio,
                  "Print the resonant omega_z / omega_x ratio and exit");

  CLI::App* run = app.add_subcommand("run", "Run a scripted experiment");
  run->add_option("scenario", f.scenario,
                  "avoided-crossing | exchange | jc | pdc")
      ->required();
  add_common_flags(run, f);
  TrapOpts run_trap = add_trap_flags(run, f);
  add_run_flags(run, f);

  CLI::App* tomo = app.add_subcommand("tomography",
                                      "Invert a sideband signal to phonon populations");
  tomo->add_option("--input", f.tomo_input, "CSV with time_s, probability columns")
      ->required();
  add_common_flags(tomo, f);
  f.o_omega0 = tomo->add_option("--omega0-khz", f.omega0_khz,
                                "Bare probe Rabi frequency");
  f.o_kind = tomo->add_option("--kind", f.kind, "Sideband: blue or red");
  f.o_probe_mode = tomo->add_option("--mode", f.probe_mode, "Probed mode: a, b, or c");
  f.o_ncut = tomo->add_option("--ncut", f.ncut, "Highest level in the inversion");
  f.o_inversion = tomo->add_option("--method", f.inversion,
                                   "Inversion: nnls or fourier");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    apply_thread_env();
    if (modes->parsed()) return cmd_modes(f, modes_trap);
    if (run->parsed()) return cmd_run(f, run_trap);
    if (tomo->parsed()) return cmd_tomography(f);
    return 2;
  } catch (const trilin::IllConditioned& e) {
    std::cerr << "error: " << e.what()
              << "\nhint: extend the time window or add samples\n";
    return 4;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const trilin::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
