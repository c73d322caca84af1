#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "trilin/dynamics.hpp"
#include "trilin/hilbert.hpp"
#include "trilin/modes.hpp"

namespace trilin::config {

// Everything the CLI can be told, in file units: ordinary kHz for
// frequencies, ms for absolute times, dimensionless elsewhere. Conversion
// to rad/s and seconds happens in the accessors, nowhere else. Precedence
// is defaults (the initializers here), then an optional JSON file, then
// command-line flags; the CLI applies the last layer.
struct Settings {
  double mass_u = 171.0;
  double charge_e = 1.0;
  double omega_x_khz = 1056.0;
  double omega_y_khz = 976.0;
  double omega_z_khz = 587.0;

  int n_max_a = -1, n_max_b = -1, n_max_c = -1;  // -1: scenario default
  std::int64_t dimension_cap = 5'000'000;

  double delta_park_khz = -44.0;

  std::string method = "dense";  // dense | krylov
  double krylov_tol = 1.0e-10;
  int max_krylov_dim = 30;

  double ac_half_span_xi = 10.0;
  int ac_points = 201;

  double exchange_tau_max_ms = -1.0;  // < 0: 3 population cycles
  int exchange_points = 601;

  std::string jc_initial = "fock";  // fock | coherent
  int jc_fock_n = 0;
  double jc_nbar = 1.8;
  double jc_xi_tau_max = -1.0;  // < 0: scenario default
  int jc_points = -1;

  double pdc_nbar = 3.7;
  double pdc_xi_tau_max = 3.0;
  int pdc_points = 31;

  double tomo_omega0_khz = 10.0;
  std::string tomo_kind = "blue";  // blue | red
  std::string tomo_mode = "a";     // a | b | c
  int tomo_ncut = 12;
  std::string tomo_method = "nnls";  // nnls | fourier

  // Applies a JSON config file on top of the current values. Unknown keys
  // are a ConfigError, as are type mismatches.
  void load_file(const std::filesystem::path& path);

  // Resolved configuration in file units, for the manifest. Only the
  // sections the given scenario consumes are included; "" means the shared
  // sections only.
  nlohmann::ordered_json echo(const std::string& scenario) const;

  modes::TrapConfig trap() const;
  // Explicit truncation, or nullopt when all three n_max are unset.
  // Setting only some of them is an error.
  std::optional<hilbert::Truncation> truncation() const;
  double delta_park() const;  // rad/s
  dynamics::Propagator propagator() const;
};

}  // namespace trilin::config
