#include "mirrorstate/params.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace mirrorstate {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Unit { plain, hz };  // hz fields are converted to rad/s on load

struct FieldDesc {
  const char* key;
  double PhysicalParams::* member;
  Unit unit;
  bool required;
};

const FieldDesc kFields[] = {
    {"laser_power", &PhysicalParams::laser_power, Unit::plain, true},
    {"optical_decay", &PhysicalParams::optical_decay, Unit::hz, true},
    {"cavity_freq", &PhysicalParams::cavity_freq, Unit::hz, true},
    {"detuning_norm", &PhysicalParams::detuning_norm, Unit::plain, true},
    {"mirror_mass", &PhysicalParams::mirror_mass, Unit::plain, true},
    {"cavity_length", &PhysicalParams::cavity_length, Unit::plain, true},
    {"beam_length", &PhysicalParams::beam_length, Unit::plain, true},
    {"offset", &PhysicalParams::offset, Unit::plain, true},
    {"pendulum_freq", &PhysicalParams::pendulum_freq, Unit::hz, true},
    {"moment_of_inertia", &PhysicalParams::moment_of_inertia, Unit::plain, true},
    {"flexural_rigidity", &PhysicalParams::flexural_rigidity, Unit::plain, true},
    {"loss_factor", &PhysicalParams::loss_factor, Unit::plain, true},
    {"beam_density", &PhysicalParams::beam_density, Unit::plain, true},
    {"coupling", &PhysicalParams::coupling, Unit::hz, true},
    {"bath_temp", &PhysicalParams::bath_temp, Unit::plain, true},
    {"mech_decay", &PhysicalParams::mech_decay, Unit::hz, true},
    {"mech_decay_rot", &PhysicalParams::mech_decay_rot, Unit::hz, true},
    {"feedback_decay", &PhysicalParams::feedback_decay, Unit::hz, true},
    {"thermal_photons", &PhysicalParams::thermal_photons, Unit::plain, true},
    {"detection_eff", &PhysicalParams::detection_eff, Unit::plain, false},
    {"gravity", &PhysicalParams::gravity, Unit::plain, true},
    {"hbar", &PhysicalParams::hbar, Unit::plain, true},
    {"k_B", &PhysicalParams::k_B, Unit::plain, true},
    {"c", &PhysicalParams::c, Unit::plain, true},
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

void require_positive(double v, const char* key) {
  if (!(v > 0.0))
    throw ConfigError(std::string(key) + " must be positive");
}

void validate(const PhysicalParams& p) {
  if (!(p.laser_power >= 0)) throw ConfigError("laser_power must be non-negative");
  require_positive(p.optical_decay, "optical_decay");
  require_positive(p.cavity_freq, "cavity_freq");
  require_positive(p.mirror_mass, "mirror_mass");
  require_positive(p.cavity_length, "cavity_length");
  require_positive(p.beam_length, "beam_length");
  require_positive(p.offset, "offset");
  require_positive(p.pendulum_freq, "pendulum_freq");
  require_positive(p.moment_of_inertia, "moment_of_inertia");
  require_positive(p.flexural_rigidity, "flexural_rigidity");
  require_positive(p.beam_density, "beam_density");
  if (!(p.coupling >= 0)) throw ConfigError("coupling must be non-negative");
  require_positive(p.bath_temp, "bath_temp");
  require_positive(p.mech_decay, "mech_decay");
  require_positive(p.mech_decay_rot, "mech_decay_rot");
  require_positive(p.feedback_decay, "feedback_decay");
  if (!(p.thermal_photons >= 0)) throw ConfigError("thermal_photons must be non-negative");
  if (!(p.detection_eff >= 0.0 && p.detection_eff <= 1.0))
    throw ConfigError("detection_eff must be in [0, 1]");
  if (!(p.loss_factor > 0.0 && p.loss_factor < 1.0))
    throw ConfigError("loss_factor must be in (0, 1)");
  require_positive(p.gravity, "gravity");
  require_positive(p.hbar, "hbar");
  require_positive(p.k_B, "k_B");
  require_positive(p.c, "c");
}

}  // namespace

LoadResult load_params(const std::string& config_text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(config_text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (kv.count(key)) throw ConfigError("duplicate key: " + key);
    kv[key] = val;
  }

  LoadResult out;
  for (const auto& f : kFields) {
    auto it = kv.find(f.key);
    if (it == kv.end()) {
      if (f.required) throw ConfigError(std::string("missing key: ") + f.key);
      out.warnings.push_back(
          "detection_eff not specified; defaulting to 1.0 (perfect detection)");
      out.params.*(f.member) = 1.0;
      continue;
    }
    const std::string& text = it->second;
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
      throw ConfigError(std::string("invalid value for ") + f.key + ": '" + text + "'");
    if (f.unit == Unit::hz) v *= kTwoPi;
    out.params.*(f.member) = v;
    kv.erase(it);
  }
  if (!kv.empty()) throw ConfigError("unknown key: " + kv.begin()->first);

  validate(out.params);
  return out;
}

LoadResult load_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_params(ss.str());
}

namespace {

// Find an Hz value whose reload (multiplication by 2*pi) restores the stored
// rad/s double exactly.
double hz_for_roundtrip(double rad_per_s) {
  if (rad_per_s == 0.0) return 0.0;
  double y = rad_per_s / kTwoPi;
  for (int i = 0; i < 8; ++i) {
    double back = y * kTwoPi;
    if (back == rad_per_s) return y;
    y = std::nextafter(y, back < rad_per_s ? HUGE_VAL : -HUGE_VAL);
  }
  throw ConfigError("cannot serialize frequency losslessly");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string save_config(const PhysicalParams& p) {
  std::ostringstream out;
  for (const auto& f : kFields) {
    double v = p.*(f.member);
    if (f.unit == Unit::hz) v = hz_for_roundtrip(v);
    out << f.key << " = " << fmt(v) << "\n";
  }
  return out.str();
}

DerivedConstants derive_constants(const PhysicalParams& p,
                                  std::vector<std::string>* warnings) {
  DerivedConstants d;
  d.tension = p.mirror_mass * p.gravity;
  d.beta = std::sqrt(d.tension / p.flexural_rigidity);
  d.drive_amplitude =
      std::sqrt(2.0 * p.laser_power * p.optical_decay / (p.hbar * p.cavity_freq));
  d.detuning = -2.0 * p.optical_decay * p.detuning_norm;
  if (warnings && d.beta * p.beam_length < 100.0)
    warnings->push_back("beta*ell < 100; closed-form steady state assumes beta*ell >> 1");
  return d;
}

}  // namespace mirrorstate
