#include "mirrorstate/runner.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "mirrorstate/io.hpp"
#include "mirrorstate/pipeline.hpp"

namespace mirrorstate {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double opt_double(const std::map<std::string, std::string>& m, const std::string& k,
                  double fallback) {
  auto it = m.find(k);
  if (it == m.end()) return fallback;
  return std::stod(it->second);
}

std::string opt_str(const std::map<std::string, std::string>& m, const std::string& k,
                    const std::string& fallback) {
  auto it = m.find(k);
  return it == m.end() ? fallback : it->second;
}

PipelineOptions pipeline_options(const RunManifest& man) {
  PipelineOptions o;
  auto eta = man.options.find("eta");
  if (eta != man.options.end()) o.eta = std::stod(eta->second);
  std::string backend = opt_str(man.options, "backend", "residues");
  if (backend == "quadrature")
    o.backend = Backend::quadrature;
  else if (backend != "residues")
    throw std::invalid_argument("unknown backend: " + backend);
  std::string conv = opt_str(man.options, "nc-convention", "steady-state");
  if (conv == "quadratic-delta")
    o.convention = PhotonConvention::quadratic_delta;
  else if (conv != "steady-state")
    throw std::invalid_argument("unknown nc-convention: " + conv);
  std::string xi = opt_str(man.options, "xi", "flat");
  if (xi == "flat")
    o.xi = XiMode::flat;
  else if (xi != "pole-local")
    throw std::invalid_argument("unknown xi mode: " + xi);
  return o;
}

DiscardSet discard_option(const RunManifest& man) {
  std::string d = opt_str(man.options, "discard", "none");
  if (d == "none") return DiscardSet::none;
  if (d == "rotational") return DiscardSet::rotational;
  if (d == "pendulum") return DiscardSet::pendulum;
  throw std::invalid_argument("unknown discard set: " + d);
}

Artifact steady_cmd(const PhysicalParams& p, const RunManifest& man) {
  double delta = opt_double(man.options, "delta", p.detuning_norm);
  int n = (int)opt_double(man.options, "sigma-samples", 101);
  PipelineOptions o = pipeline_options(man);
  PhotonConvention conv = o.convention;
  SteadyState st = steady_state(p, delta, conv);

  CsvBuilder csv({"sigma_cm", "Xbar_exact_cm", "Xbar_approx_cm"});
  for (int i = 0; i < n; ++i) {
    double s = p.beam_length * i / (n - 1.0);
    csv.row({s, beam_profile_exact(p, delta, s, conv),
             beam_profile_approx(p, delta, s, conv)});
  }
  CsvBuilder summary({"n_c", "qbar_cm", "Phibar_rad"});
  summary.row({st.photon_number, st.qbar, st.phibar});
  return {"steady.csv", csv.str() + summary.str()};
}

Artifact modes_cmd(const PhysicalParams& p, const RunManifest& man) {
  auto deltas = parse_range(opt_str(man.options, "delta-range", "0.01:1.0:50"));
  PipelineOptions o = pipeline_options(man);
  CsvBuilder csv({"delta", "w0p_Hz", "w0m_Hz", "gamma_r_Hz"});
  std::vector<std::array<double, 4>> rows(deltas.size());
  parallel_for((int)deltas.size(), [&](int i) {
    NormalModes nm = normal_modes(p, couplings_lowfreq(p, deltas[i], o.convention));
    rows[i] = {deltas[i], nm.omega0_plus / kTwoPi, nm.omega0_minus / kTwoPi,
               nm.gamma_r_pendulum / kTwoPi};
  });
  for (auto& r : rows) csv.row({r[0], r[1], r[2], r[3]});
  return {"modes.csv", csv.str()};
}

Artifact spectra_cmd(const PhysicalParams& p, const RunManifest& man) {
  double delta = opt_double(man.options, "delta", p.detuning_norm);
  auto freqs = parse_range(opt_str(man.options, "freq-range", "1:2000:200"));
  PipelineOptions o = pipeline_options(man);
  PhysicalParams pp = p;
  if (o.eta) pp.detection_eff = *o.eta;
  TwoModeSpectra s = build_spectra(pp, delta, o.convention);
  CsvBuilder csv({"freq_Hz", "S_XAXA", "ReS_XAdq", "ImS_XAdq", "ReS_XAdphi",
                  "ImS_XAdphi", "S_dqdq", "S_dpdp", "S_dphidphi", "S_dPidPi"});
  for (double f : freqs) {
    double w = kTwoPi * f;
    auto sq = s.S_XA_dq(w);
    auto sp = s.S_XA_dphi(w);
    csv.row({f, s.S_XAXA(w), sq.real(), sq.imag(), sp.real(), sp.imag(), s.S_dqdq(w),
             s.S_dpdp(w), s.S_dphidphi(w), s.S_dPidPi(w)});
  }
  return {"spectra.csv", csv.str()};
}

Target parse_target(const std::string& t) {
  if (t == "dq") return Target::dq;
  if (t == "dp") return Target::dp;
  if (t == "dphi") return Target::dphi;
  if (t == "dpi") return Target::dpi;
  throw std::invalid_argument("unknown filter target: " + t);
}

Artifact filter_cmd(const PhysicalParams& p, const RunManifest& man) {
  double delta = opt_double(man.options, "delta", p.detuning_norm);
  Target t = parse_target(opt_str(man.options, "target", "dq"));
  auto freqs = parse_range(opt_str(man.options, "freq-range", "1:2000:200"));
  Pipeline pl = Pipeline::build(p, delta, pipeline_options(man));
  CsvBuilder csv({"freq_Hz", "ReH", "ImH", "absH"});
  for (double f : freqs) {
    auto h = pl.filters.H(t, kTwoPi * f);
    csv.row({f, h.real(), h.imag(), std::abs(h)});
  }
  return {"filter.csv", csv.str()};
}

Artifact covariance_cmd(const PhysicalParams& p, const RunManifest& man) {
  double delta = opt_double(man.options, "delta", p.detuning_norm);
  DiscardSet discard = discard_option(man);
  std::string which = opt_str(man.options, "filter", "two-mode");
  double N = opt_double(man.options, "ngamma", 1.0);
  Pipeline pl = Pipeline::build(p, delta, pipeline_options(man));

  std::string out;
  auto print_mat = [&out](const std::string& name, const CovMat2& v) {
    out += name + ":\n";
    out += "  [ " + format_sig(v.v11) + "  " + format_sig(v.v12) + " ]\n";
    out += "  [ " + format_sig(v.v12) + "  " + format_sig(v.v22) + " ]\n";
  };
  if (which == "two-mode") {
    CovMat2 vc = pl.normalized_Vc(discard);
    CovMat2 vr = pl.normalized_Vr(discard);
    print_mat("normalized V_c (dq, dp)", vc);
    out += "purity(V_c) = " + format_sig(purity(vc)) + "\n";
    print_mat("normalized V_r (dphi, dPi)", vr);
    out += "purity(V_r) = " + format_sig(purity(vr)) + "\n";
  } else if (which == "one-mode") {
    CovMat2 v = normalize_covariance(pl.mismatched(N, discard), pl.params,
                                     pl.pendulum_freq());
    print_mat("normalized V'_c (one-mode filter, N = " + format_sig(N) + ")", v);
    out += "purity(V'_c) = " + format_sig(purity(v)) + "\n";
  } else {
    throw std::invalid_argument("unknown filter kind: " + which);
  }
  return {"covariance.txt", out};
}

Artifact sweep_cmd(const PhysicalParams& p, const RunManifest& man) {
  auto deltas = parse_range(opt_str(man.options, "delta-range", "0.02:1.0:50"));
  DiscardSet discard = discard_option(man);
  std::string which = opt_str(man.options, "filter", "two-mode");
  double N = opt_double(man.options, "ngamma", 1.0);
  PipelineOptions o = pipeline_options(man);

  CsvBuilder csv({"delta", "Vqq_norm", "Vqp_norm", "Vpp_norm", "purity"});
  std::vector<std::array<double, 5>> rows(deltas.size());
  parallel_for((int)deltas.size(), [&](int i) {
    Pipeline pl = Pipeline::build(p, deltas[i], o);
    CovMat2 v = which == "two-mode"
                    ? pl.normalized_Vc(discard)
                    : normalize_covariance(pl.mismatched(N, discard), pl.params,
                                           pl.pendulum_freq());
    rows[i] = {deltas[i], v.v11, v.v12, v.v22, purity(v)};
  });
  for (auto& r : rows) csv.row({r[0], r[1], r[2], r[3], r[4]});
  return {"sweep.csv", csv.str()};
}

Artifact nscan_cmd(const PhysicalParams& p, const RunManifest& man) {
  double delta = opt_double(man.options, "delta", p.detuning_norm);
  auto Ns = parse_range(opt_str(man.options, "n-range", "1:100:200"));
  DiscardSet discard = discard_option(man);
  PipelineOptions o = pipeline_options(man);
  Pipeline pl = Pipeline::build(p, delta, o);

  CsvBuilder csv({"N", "purity"});
  std::vector<std::array<double, 2>> rows(Ns.size());
  parallel_for((int)Ns.size(), [&](int i) {
    rows[i] = {Ns[i], pl.purity_mismatched(Ns[i], discard)};
  });
  for (auto& r : rows) csv.row({r[0], r[1]});
  return {"nscan.csv", csv.str()};
}

Artifact wigner_cmd(const PhysicalParams& p, const RunManifest& man) {
  double delta = opt_double(man.options, "delta", p.detuning_norm);
  std::string mode = opt_str(man.options, "mode", "pendulum");
  std::string which = opt_str(man.options, "filter", "two");
  DiscardSet discard = discard_option(man);
  Pipeline pl = Pipeline::build(p, delta, pipeline_options(man));

  std::vector<LabeledEllipse> curves;
  if (mode == "rotational") {
    curves.push_back(
        {wigner_ellipse(pl.normalized_Vr(discard)), "rotational (two-mode)", "blue"});
  } else if (mode == "pendulum") {
    if (which == "two" || which == "all")
      curves.push_back(
          {wigner_ellipse(pl.normalized_Vc(discard)), "two-mode filter", "red"});
    if (which == "one" || which == "all")
      curves.push_back({wigner_ellipse(normalize_covariance(
                            pl.mismatched(1.0, discard), pl.params, pl.pendulum_freq())),
                        "one-mode filter", "green"});
    if (which == "all") {
      double N418 = p.mech_decay_rot / p.mech_decay;
      curves.push_back({wigner_ellipse(normalize_covariance(
                            pl.mismatched(N418, discard), pl.params, pl.pendulum_freq())),
                        "one-mode filter, scaled dissipation", "orange"});
    }
    if (curves.empty()) throw std::invalid_argument("unknown filter kind: " + which);
  } else {
    throw std::invalid_argument("unknown mode: " + mode);
  }
  std::string x = mode == "rotational" ? "dphi (vacuum units)" : "dq (vacuum units)";
  std::string y = mode == "rotational" ? "dPi (vacuum units)" : "dp (vacuum units)";
  return {"wigner.svg", wigner_svg(curves, x, y)};
}

Artifact negativity_cmd(const PhysicalParams& p, const RunManifest& man) {
  auto deltas = parse_range(opt_str(man.options, "delta-range", "0.01:0.6:30"));
  double ratio = opt_double(man.options, "kappa-ratio", 3.0);
  PipelineOptions o = pipeline_options(man);
  PhysicalParams pp = p;
  if (o.eta) pp.detection_eff = *o.eta;

  CsvBuilder csv({"delta", "EN", "nu_tilde"});
  std::vector<std::array<double, 3>> rows(deltas.size());
  parallel_for((int)deltas.size(), [&](int i) {
    EntanglementResult r = negativity(pp, deltas[i], ratio, o.convention);
    rows[i] = {deltas[i], r.log_negativity, r.nu_tilde};
  });
  for (auto& r : rows) csv.row({r[0], r[1], r[2]});
  return {"negativity.csv", csv.str()};
}

std::vector<Artifact> preset_cmd(const PhysicalParams& p, const RunManifest& man) {
  std::string name = opt_str(man.options, "preset", "");
  PipelineOptions o = pipeline_options(man);
  double N418 = p.mech_decay_rot / p.mech_decay;

  if (name == "fig8") {
    auto deltas = parse_range(opt_str(man.options, "delta-range", "0.02:1.0:50"));
    CsvBuilder csv({"delta", "purity_two_mode", "purity_one_mode", "purity_one_mode_418G"});
    std::vector<std::array<double, 4>> rows(deltas.size());
    parallel_for((int)deltas.size(), [&](int i) {
      Pipeline pl = Pipeline::build(p, deltas[i], o);
      rows[i] = {deltas[i], pl.purity_two_mode(), pl.purity_mismatched(1.0),
                 pl.purity_mismatched(N418)};
    });
    for (auto& r : rows) csv.row({r[0], r[1], r[2], r[3]});
    return {{"fig8_purity.csv", csv.str()}};
  }
  if (name == "fig9") {
    RunManifest m2 = man;
    m2.options["mode"] = "pendulum";
    m2.options["filter"] = "all";
    Artifact a = wigner_cmd(p, m2);
    a.name = "fig9_wigner_pendulum.svg";
    return {a};
  }
  if (name == "fig10") {
    RunManifest m2 = man;
    m2.options["mode"] = "rotational";
    Artifact a = wigner_cmd(p, m2);
    a.name = "fig10_wigner_rotational.svg";
    return {a};
  }
  if (name == "fig11") {
    RunManifest m2 = man;
    if (!m2.options.count("n-range")) m2.options["n-range"] = "1:20:20";
    m2.options["discard"] = "rotational";
    Artifact a = nscan_cmd(p, m2);
    a.name = "fig11_nscan_discarded.csv";
    return {a};
  }
  if (name == "fig12") {
    Artifact a = negativity_cmd(p, man);
    a.name = "fig12_negativity.csv";
    return {a};
  }
  throw std::invalid_argument("unknown preset: " + name);
}

}  // namespace

std::vector<double> parse_range(const std::string& spec) {
  size_t c1 = spec.find(':');
  if (c1 == std::string::npos) return {std::stod(spec)};
  size_t c2 = spec.find(':', c1 + 1);
  if (c2 == std::string::npos) throw std::invalid_argument("range must be a:b:n");
  double a = std::stod(spec.substr(0, c1));
  double b = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
  int n = std::stoi(spec.substr(c2 + 1));
  if (n < 1) throw std::invalid_argument("range count must be >= 1");
  std::vector<double> out;
  if (n == 1) {
    out.push_back(a);
    return out;
  }
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1.0));
  return out;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  int workers = (int)std::min<unsigned>(std::thread::hardware_concurrency(), 8);
  if (workers <= 1 || n <= 2) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["config"] = config_path;
  j["subcommand"] = subcommand;
  nlohmann::ordered_json opts;
  for (const auto& [k, v] : options) opts[k] = v;
  j["options"] = opts;
  return j.dump(2) + "\n";
}

RunOutput run(const PhysicalParams& params, const RunManifest& man) {
  RunOutput out;
  out.manifest_json = man.to_json();
  const std::string& cmd = man.subcommand;
  if (cmd == "steady")
    out.artifacts.push_back(steady_cmd(params, man));
  else if (cmd == "modes")
    out.artifacts.push_back(modes_cmd(params, man));
  else if (cmd == "spectra")
    out.artifacts.push_back(spectra_cmd(params, man));
  else if (cmd == "filter")
    out.artifacts.push_back(filter_cmd(params, man));
  else if (cmd == "covariance")
    out.artifacts.push_back(covariance_cmd(params, man));
  else if (cmd == "sweep")
    out.artifacts.push_back(sweep_cmd(params, man));
  else if (cmd == "nscan")
    out.artifacts.push_back(nscan_cmd(params, man));
  else if (cmd == "wigner")
    out.artifacts.push_back(wigner_cmd(params, man));
  else if (cmd == "negativity")
    out.artifacts.push_back(negativity_cmd(params, man));
  else if (cmd == "preset") {
    for (auto& a : preset_cmd(params, man)) out.artifacts.push_back(std::move(a));
  } else {
    throw std::invalid_argument("unknown subcommand: " + cmd);
  }
  return out;
}

}  // namespace mirrorstate
