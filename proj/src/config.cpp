#include "trilin/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "trilin/constants.hpp"
#include "trilin/errors.hpp"

namespace trilin::config {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      std::ostringstream msg;
      msg << "config: unknown key '" << item.key() << "' in " << where;
      throw ConfigError(msg.str());
    }
  }
}

template <typename T>
void get_to(const json& obj, const char* key, T& out, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    it->get_to(out);
  } catch (const json::exception&) {
    std::ostringstream msg;
    msg << "config: bad value for '" << key << "' in " << where;
    throw ConfigError(msg.str());
  }
}

}  // namespace

void Settings::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);  // allow comments
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(doc, "top level",
             {"trap", "truncation", "delta_park_khz", "propagator",
              "avoided_crossing", "exchange", "jc", "pdc", "tomography"});

  if (doc.contains("trap")) {
    const json& trap = doc["trap"];
    check_keys(trap, "trap",
               {"mass_u", "charge_e", "omega_x_khz", "omega_y_khz", "omega_z_khz"});
    get_to(trap, "mass_u", mass_u, "trap");
    get_to(trap, "charge_e", charge_e, "trap");
    get_to(trap, "omega_x_khz", omega_x_khz, "trap");
    get_to(trap, "omega_y_khz", omega_y_khz, "trap");
    get_to(trap, "omega_z_khz", omega_z_khz, "trap");
  }
  if (doc.contains("truncation")) {
    const json& tr = doc["truncation"];
    check_keys(tr, "truncation",
               {"n_max_a", "n_max_b", "n_max_c", "dimension_cap"});
    get_to(tr, "n_max_a", n_max_a, "truncation");
    get_to(tr, "n_max_b", n_max_b, "truncation");
    get_to(tr, "n_max_c", n_max_c, "truncation");
    get_to(tr, "dimension_cap", dimension_cap, "truncation");
  }
  get_to(doc, "delta_park_khz", delta_park_khz, "top level");
  if (doc.contains("propagator")) {
    const json& pr = doc["propagator"];
    check_keys(pr, "propagator", {"method", "tol", "max_krylov_dim"});
    get_to(pr, "method", method, "propagator");
    get_to(pr, "tol", krylov_tol, "propagator");
    get_to(pr, "max_krylov_dim", max_krylov_dim, "propagator");
  }
  if (doc.contains("avoided_crossing")) {
    const json& ac = doc["avoided_crossing"];
    check_keys(ac, "avoided_crossing", {"half_span_xi", "points"});
    get_to(ac, "half_span_xi", ac_half_span_xi, "avoided_crossing");
    get_to(ac, "points", ac_points, "avoided_crossing");
  }
  if (doc.contains("exchange")) {
    const json& ex = doc["exchange"];
    check_keys(ex, "exchange", {"tau_max_ms", "points"});
    get_to(ex, "tau_max_ms", exchange_tau_max_ms, "exchange");
    get_to(ex, "points", exchange_points, "exchange");
  }
  if (doc.contains("jc")) {
    const json& jc = doc["jc"];
    check_keys(jc, "jc", {"initial", "fock_n", "nbar", "xi_tau_max", "points"});
    get_to(jc, "initial", jc_initial, "jc");
    get_to(jc, "fock_n", jc_fock_n, "jc");
    get_to(jc, "nbar", jc_nbar, "jc");
    get_to(jc, "xi_tau_max", jc_xi_tau_max, "jc");
    get_to(jc, "points", jc_points, "jc");
  }
  if (doc.contains("pdc")) {
    const json& pdc = doc["pdc"];
    check_keys(pdc, "pdc", {"nbar", "xi_tau_max", "points"});
    get_to(pdc, "nbar", pdc_nbar, "pdc");
    get_to(pdc, "xi_tau_max", pdc_xi_tau_max, "pdc");
    get_to(pdc, "points", pdc_points, "pdc");
  }
  if (doc.contains("tomography")) {
    const json& tomo = doc["tomography"];
    check_keys(tomo, "tomography",
               {"omega0_khz", "kind", "mode", "n_cut", "method"});
    get_to(tomo, "omega0_khz", tomo_omega0_khz, "tomography");
    get_to(tomo, "kind", tomo_kind, "tomography");
    get_to(tomo, "mode", tomo_mode, "tomography");
    get_to(tomo, "n_cut", tomo_ncut, "tomography");
    get_to(tomo, "method", tomo_method, "tomography");
  }
}

nlohmann::ordered_json Settings::echo(const std::string& scenario) const {
  nlohmann::ordered_json j;
  if (scenario == "tomography") {
    j["tomography"] = {{"omega0_khz", tomo_omega0_khz},
                       {"kind", tomo_kind},
                       {"mode", tomo_mode},
                       {"n_cut", tomo_ncut},
                       {"method", tomo_method}};
    return j;
  }
  j["trap"] = {{"mass_u", mass_u},
               {"charge_e", charge_e},
               {"omega_x_khz", omega_x_khz},
               {"omega_y_khz", omega_y_khz},
               {"omega_z_khz", omega_z_khz}};
  if (scenario == "modes") return j;
  j["truncation"] = {{"n_max_a", n_max_a},
                     {"n_max_b", n_max_b},
                     {"n_max_c", n_max_c},
                     {"dimension_cap", dimension_cap}};
  j["delta_park_khz"] = delta_park_khz;
  j["propagator"] = {{"method", method},
                     {"tol", krylov_tol},
                     {"max_krylov_dim", max_krylov_dim}};
  if (scenario == "avoided-crossing")
    j["avoided_crossing"] = {{"half_span_xi", ac_half_span_xi},
                             {"points", ac_points}};
  if (scenario == "exchange")
    j["exchange"] = {{"tau_max_ms", exchange_tau_max_ms},
                     {"points", exchange_points}};
  if (scenario == "jc")
    j["jc"] = {{"initial", jc_initial},
               {"fock_n", jc_fock_n},
               {"nbar", jc_nbar},
               {"xi_tau_max", jc_xi_tau_max},
               {"points", jc_points}};
  if (scenario == "pdc")
    j["pdc"] = {{"nbar", pdc_nbar},
                {"xi_tau_max", pdc_xi_tau_max},
                {"points", pdc_points}};
  return j;
}

modes::TrapConfig Settings::trap() const {
  if (!(mass_u > 0.0)) throw ConfigError("config: mass_u must be positive");
  modes::TrapConfig t;
  t.mass = mass_u * constants::atomic_mass;
  t.charge = charge_e * constants::elementary_charge;
  t.omega_x = constants::khz_to_rad(omega_x_khz);
  t.omega_y = constants::khz_to_rad(omega_y_khz);
  t.omega_z = constants::khz_to_rad(omega_z_khz);
  t.validate();
  return t;
}

std::optional<hilbert::Truncation> Settings::truncation() const {
  bool any = n_max_a >= 0 || n_max_b >= 0 || n_max_c >= 0;
  bool all = n_max_a >= 0 && n_max_b >= 0 && n_max_c >= 0;
  if (!any) return std::nullopt;
  if (!all)
    throw ConfigError("config: set all of n_max_a, n_max_b, n_max_c or none");
  return hilbert::Truncation{n_max_a, n_max_b, n_max_c, dimension_cap};
}

double Settings::delta_park() const {
  return constants::khz_to_rad(delta_park_khz);
}

dynamics::Propagator Settings::propagator() const {
  dynamics::Propagator p;
  if (method == "dense") {
    p.method = dynamics::Propagator::Method::dense;
  } else if (method == "krylov") {
    p.method = dynamics::Propagator::Method::krylov;
  } else {
    throw ConfigError("config: propagator method must be dense or krylov");
  }
  if (!(krylov_tol > 0.0)) throw ConfigError("config: tol must be positive");
  p.tol = krylov_tol;
  p.max_krylov_dim = max_krylov_dim;
  return p;
}

}  // namespace trilin::config
