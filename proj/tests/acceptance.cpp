// Acceptance suite: runs every exit criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. The exit status is the number of
// failed criteria; reference values that the model does not reproduce under
// the documented conventions are reported honestly rather than re-tuned.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include "mirrorstate/analysis.hpp"
#include "mirrorstate/pipeline.hpp"
#include "mirrorstate/wiener.hpp"

using namespace mirrorstate;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double secs() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int id, bool pass, const std::string& what, double secs) {
  std::printf("%s criterion %2d: %s  [%.1f s]\n", pass ? "PASS" : "FAIL", id,
              what.c_str(), secs);
  if (!pass) ++failures;
}

double rel(double a, double b) {
  double s = std::max(std::abs(a), std::abs(b));
  return s == 0 ? 0 : std::abs(a - b) / s;
}

double min_eig(const CovMat2& v) {
  double tr = v.v11 + v.v22, det = v.v11 * v.v22 - v.v12 * v.v12;
  return 0.5 * (tr - std::sqrt(tr * tr - 4.0 * det));
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void fft(std::vector<std::complex<double>>& a) {
  size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * std::numbers::pi / (double)len;
    std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k], v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

}  // namespace

int main() {
  PhysicalParams table = load_params_file(TABLE1_CFG).params;

  // 1: pendulum coefficient frequency without light
  {
    Timer t;
    PhysicalParams dark = table;
    dark.laser_power = 0.0;
    double f = std::sqrt(couplings_lowfreq(dark, 0.0).omega_AR2) / kTwoPi;
    report(1, std::abs(f - 4.99) / 4.99 < 5e-3,
           fmt("pendulum frequency %.4f Hz vs 4.99 Hz (0.5%%)", f), t.secs());
  }

  // 2: rotational frequency
  {
    Timer t;
    double f = std::sqrt(couplings_lowfreq(table, 0.2).Delta_BR2) / kTwoPi;
    report(2, std::abs(f - 27.0) / 27.0 < 2e-2,
           fmt("rotational frequency %.4f Hz vs 27 Hz (2%%)", f), t.secs());
  }

  // 3: structural damping law and the 4.18 ratio
  {
    Timer t;
    std::vector<double> lw, lg;
    for (double d = 0.002; d < 0.04; d *= 1.12) {
      NormalModes nm = normal_modes(table, d);
      double f = nm.omega0_pendulum / kTwoPi;
      if (f < 180.0 || f > 650.0) continue;
      lw.push_back(std::log(nm.omega0_pendulum));
      lg.push_back(std::log(nm.gamma_r_pendulum));
    }
    double n = lw.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lw.size(); ++i) {
      sx += lw[i];
      sy += lg[i];
      sxx += lw[i] * lw[i];
      sxy += lw[i] * lg[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    PhysicalParams dark = table;
    dark.laser_power = 0.0;
    LowFreqCouplings c0 = couplings_lowfreq(dark, 0.0);
    double ratio =
        table.loss_factor * (-c0.omega_AI2) / (2.0 * table.pendulum_freq) /
        table.mech_decay;
    bool pass = n >= 5 && std::abs(slope + 1.0) < 1e-2 &&
                std::abs(ratio - 4.18) / 4.18 < 1e-2;
    report(3, pass,
           fmt("log-log dissipation slope %.4f (want -1 +- 0.01), "
               "rate ratio %.4f vs 4.18 (1%%)",
               slope, ratio),
           t.secs());
  }

  // 4: factorization identity and backend agreement
  {
    Timer t;
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> ud(0.01, 1.0), ue(0.5, 1.0);
    double worst_id = 0, worst_backend = 0;
    for (int trial = 0; trial < 20; ++trial) {
      PhysicalParams p = table;
      p.detection_eff = ue(rng);
      TwoModeSpectra s = build_spectra(p, ud(rng));
      QuarticFactor qf = spectral_factorize(s);
      num::Poly J = J_hat_poly(s);
      num::Poly prod = qf.Fp_hat * qf.Fp_hat.conj_coeffs();
      double xmax = kTwoPi * 1e4 / s.W0;
      for (int i = 0; i <= 1000; ++i) {
        double x = -xmax + 2.0 * xmax * i / 1000.0;
        double jv = (double)J(num::cplx(x)).real();
        double pv = (double)prod(num::cplx(x)).real();
        worst_id = std::max(worst_id, std::abs(pv - jv) / std::abs(jv));
      }
      QuarticFactor qc = factorize_coefficient_system(s);
      for (int i = 0; i < 4; ++i)
        worst_backend = std::max(worst_backend,
                                 std::abs(qf.ABCD[i] - qc.ABCD[i]) /
                                     std::abs(qf.ABCD[i]));
    }
    report(4, worst_id < 1e-10 && worst_backend < 1e-8,
           fmt("max |F'F'* - J|/J = %.2e (want < 1e-10), backend gap %.2e "
               "(want < 1e-8)",
               worst_id, worst_backend),
           t.secs());
  }

  // 5: residue vs adaptive-quadrature equivalence, six entries, 20 points
  {
    Timer t;
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> ud(0.03, 1.0), ue(0.5, 1.0);
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
      PhysicalParams p = table;
      p.detection_eff = ue(rng);
      Pipeline pl = Pipeline::build(p, ud(rng), {});
      auto cc = pl.covariances();
      double vals[6] = {cc.Vc.v11, cc.Vc.v12, cc.Vc.v22,
                        cc.Vr.v11, cc.Vr.v12, cc.Vr.v22};
      for (int e = 0; e < 6; ++e)
        worst = std::max(worst, rel(vals[e], quadrature_oracle(pl.filters, e)));
    }
    report(5, worst < 1e-6,
           fmt("max backend disagreement %.2e over 120 entries (want < 1e-6)", worst),
           t.secs());
  }

  // 6: purity triple at delta = 0.2 with the eta calibration protocol
  {
    Timer t;
    auto triple = [&](double eta) {
      PhysicalParams p = table;
      p.detection_eff = eta;
      Pipeline pl = Pipeline::build(p, 0.2, {});
      return std::array<double, 3>{pl.purity_two_mode(), pl.purity_mismatched(1.0),
                                   pl.purity_mismatched(37.0)};
    };
    const double ref[3] = {0.6088, 0.3461, 0.4027};
    auto a = triple(1.0);
    bool pass10 = rel(a[0], ref[0]) < 0.10 && rel(a[1], ref[1]) < 0.10 &&
                  rel(a[2], ref[2]) < 0.10;
    std::string msg =
        fmt("eta=1: purities %.4f/%.4f/%.4f vs refs 0.6088/0.3461/0.4027", a[0], a[1],
            a[2]);
    bool pass = pass10;
    if (!pass10) {
      double best_eta = -1;
      for (double eta = 0.5; eta <= 1.0001; eta += 0.025) {
        auto b = triple(eta);
        if (rel(b[0], ref[0]) < 0.03 && rel(b[1], ref[1]) < 0.03 &&
            rel(b[2], ref[2]) < 0.03) {
          best_eta = eta;
          break;
        }
      }
      pass = best_eta > 0;
      msg += best_eta > 0 ? fmt("; calibrated eta = %.3f matches at 3%%", best_eta)
                          : "; no eta in [0.5, 1] matches all three at 3%";
    }
    report(6, pass, msg, t.secs());
  }

  // 7: eta-independent orderings
  {
    Timer t;
    bool order = true;
    for (double d = 0.05; d < 1.0; d += 0.1) {
      Pipeline pl = Pipeline::build(table, d, {});
      if (!(pl.purity_two_mode() > pl.purity_mismatched(1.0))) order = false;
    }
    Pipeline pl = Pipeline::build(table, 0.2, {});
    double eig = min_eig(pl.normalized_Vc());
    int maxima = 0, argmax = 0;
    {
      std::vector<double> pu;
      for (int N = 1; N <= 100; N += 1) pu.push_back(pl.purity_mismatched(N));
      double best = 0;
      for (size_t i = 0; i < pu.size(); ++i)
        if (pu[i] > best) {
          best = pu[i];
          argmax = (int)i + 1;
        }
      for (size_t i = 1; i + 1 < pu.size(); ++i)
        if (pu[i] > pu[i - 1] && pu[i] > pu[i + 1]) ++maxima;
    }
    bool interior = maxima == 1 && argmax > 1 && argmax < 100;
    bool pass = order && eig < 1.0 && interior;
    report(7, pass,
           fmt("two-mode > one-mode ordering %s; min eigenvalue at 0.2 = %.3f "
               "(want < 1); N-scan interior maxima %d at N=%d",
               order ? "holds" : "violated", eig, maxima, argmax),
           t.secs());
  }

  // 8: pole discarding
  {
    Timer t;
    double worst = 0;
    for (int i = 1; i <= 10; ++i) {
      double d = 0.1 * i;
      Pipeline pl = Pipeline::build(table, d, {});
      CovMat2 two = pl.covariances(DiscardSet::rotational).Vc;
      CovMat2 one = pl.mismatched(1.0, DiscardSet::rotational);
      worst = std::max({worst, rel(two.v11, one.v11), rel(two.v12, one.v12),
                        rel(two.v22, one.v22)});
    }
    // dissipation-matched comparison, for the record
    double worst418 = 0;
    {
      double N418 = table.mech_decay_rot / table.mech_decay;
      for (int i = 1; i <= 10; ++i) {
        Pipeline pl = Pipeline::build(table, 0.1 * i, {});
        CovMat2 two = pl.covariances(DiscardSet::rotational).Vc;
        CovMat2 one = pl.mismatched(N418, DiscardSet::rotational);
        worst418 = std::max({worst418, rel(two.v11, one.v11), rel(two.v12, one.v12),
                             rel(two.v22, one.v22)});
      }
    }
    Pipeline pl = Pipeline::build(table, 0.2, {});
    int argmax = 0;
    double best = 0;
    for (int N = 1; N <= 20; ++N) {
      double pu = pl.purity_mismatched(N, DiscardSet::rotational);
      if (pu > best) {
        best = pu;
        argmax = N;
      }
    }
    bool pass = worst <= 1e-4 && argmax == 4;
    report(8, pass,
           fmt("discarded-pole gap (bare filter) %.2e (want <= 1e-4; "
               "dissipation-matched filter gives %.2e); discarded scan peaks at N=%d "
               "(want 4)",
               worst, worst418, argmax),
           t.secs());
  }

  // 9: negativity region
  {
    Timer t;
    bool inside_pos = true;
    for (double d : {0.05, 0.1, 0.2, 0.3})
      if (!(negativity(table, d, 3.0).log_negativity > 0.0)) inside_pos = false;
    bool edges_zero = negativity(table, 0.01, 3.0).log_negativity == 0.0 &&
                      negativity(table, 0.5, 3.0).log_negativity == 0.0;
    report(9, inside_pos && edges_zero,
           fmt("E_N > 0 on [0.05, 0.3]: %s; E_N = 0 at 0.01 and 0.5: %s",
               inside_pos ? "yes" : "no", edges_zero ? "yes" : "no"),
           t.secs());
  }

  // 10: property suite
  {
    Timer t;
    bool psd = true, spectra_ok = true;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ud(0.03, 1.0), ue(0.5, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
      PhysicalParams p = table;
      p.detection_eff = ue(rng);
      Pipeline pl = Pipeline::build(p, ud(rng), {});
      for (const CovMat2& v : {pl.normalized_Vc(), pl.normalized_Vr()}) {
        double det = v.v11 * v.v22 - v.v12 * v.v12;
        if (!(v.v11 > 0 && v.v22 > 0 && det > 0 && std::sqrt(det) >= 1.0 - 1e-9))
          psd = false;
      }
      const TwoModeSpectra& s = pl.spectra;
      for (double f : {1.0, 27.0, 100.0, 1455.0, 9000.0}) {
        double w = kTwoPi * f;
        if (!(s.S_XAXA(w) > 0) || rel(s.S_XAXA(w), s.S_XAXA(-w)) > 1e-10 ||
            rel(s.S_dqdq(w), s.S_dqdq(-w)) > 1e-10 || !(s.S_dphidphi(w) >= 0))
          spectra_ok = false;
      }
    }
    // causal impulse response of the position filter; the exactly-causal
    // first- and second-order large-frequency asymptotes are subtracted so
    // spectrum truncation does not mask the measurement
    WienerFilters wf = synthesize_filters(build_spectra(table, 0.2));
    double rmax = 0;
    for (auto r : wf.factor.roots) rmax = std::max(rmax, std::abs(r));
    const size_t n = 1 << 17;
    double wmax = 512.0 * rmax, g = 0.1 * rmax;
    std::complex<double> E = wf.H(Target::dq, 1e10) * 1e10;
    std::complex<double> E2 = (wf.H(Target::dq, 1e8) * 1e8 - E) * 1e8;
    std::vector<std::complex<double>> h(n);
    double total = 0;
    for (size_t i = 0; i < n; ++i) {
      double w = -wmax + i * (2.0 * wmax / n);
      std::complex<double> Hw = wf.H(Target::dq, w);
      total += std::norm(Hw);
      std::complex<double> zg(w, g);
      h[i] = Hw - E / zg - (E2 + std::complex<double>(0, g) * E) / (zg * zg);
    }
    fft(h);
    double neg = 0;
    for (size_t k = n / 2; k < n; ++k) neg += std::norm(h[k]);
    bool causal = neg / total < 1e-6;

    report(10, psd && spectra_ok && causal,
           fmt("covariances physical: %s; spectra real/even/nonnegative: %s; "
               "filter impulse response causal to %.1e",
               psd ? "yes" : "no", spectra_ok ? "yes" : "no", neg / total),
           t.secs());
  }

  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures;
}
