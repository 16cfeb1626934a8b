// Copyright 2026 The spinmbqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "spinmbqc/spinmbqc.hpp"

using namespace spinmbqc;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = true;
  std::string info;    // measured values, always printed
  std::string detail;  // reasons for failure

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DmrgConfig dmrg_config(std::size_t max_bond = 100) {
  DmrgConfig c;
  c.max_bond = max_bond;
  c.seed = 1;
  return c;
}

Mps<cplx> ground(const HamiltonianSpec& spec, std::size_t max_bond = 100) {
  const auto r = ground_state(spec, dmrg_config(max_bond));
  if (!r.converged) std::printf("  note: DMRG did not converge for %s\n", spec.key().c_str());
  return r.state;
}

double oracle_rz(const Mps<cplx>& g, double theta) {
  const auto p = Protocol::rz(theta);
  return fidelity_from_rho(enumerate_rho_u(dense_state(g), p), p.gate());
}

double raw_rz(const Mps<cplx>& g, double theta) { return rz_fidelity_expansion(g, theta).diagnostics.raw_value; }

Verdict aklt_closed_form() {
  Verdict v;
  double worst = 0;
  for (std::size_t L = 2; L <= 8; ++L) {
    const auto g = aklt_mps<cplx>(L);
    for (int k = 0; k < 16; ++k) {
      const double t = 2 * kPi * k / 16;
      const double want = 1 - (1 - std::cos(t)) / (2 * std::pow(3.0, double(L)));
      worst = std::max(worst, std::abs(raw_rz(g, t) - want));
    }
  }
  v.require(worst <= 1e-9, fmt("max deviation %.2e > 1e-9", worst));
  v.info = fmt("L=2..8, 16 angles, max deviation %.2e", worst);
  return v;
}

Verdict oracle_equivalence() {
  Verdict v;
  std::vector<HamiltonianSpec> specs;
  double worst = 0;
  std::size_t states = 0;
  for (std::size_t L = 1; L <= 5; ++L) {
    specs.push_back(HamiltonianSpec::aklt(L));
    for (double a : {-0.5, 0.0, 0.5}) specs.push_back(HamiltonianSpec::blbq(L, a));
    for (auto [j, d] : {std::pair{1.0, 0.0}, {2.0, -1.0}, {1.0, -2.0}}) specs.push_back(HamiltonianSpec::xxz(L, j, d));
  }
  for (const auto& spec : specs) {
    const auto g = spec.kind == ModelKind::aklt ? aklt_mps<cplx>(spec.L) : ground(spec);
    ++states;
    const double fi = identity_fidelity(g);
    const double di = std::abs(fi - oracle_rz(g, 0));
    worst = std::max(worst, di);
    for (double t : {kPi / 4, kPi / 2, kPi}) {
      const double d = std::abs(raw_rz(g, t) - oracle_rz(g, t));
      worst = std::max(worst, d);
      if (d > 1e-6) v.require(false, fmt("%s theta=%.4f delta %.2e", spec.key().c_str(), t, d));
    }
    if (di > 1e-6) v.require(false, fmt("%s identity delta %.2e", spec.key().c_str(), di));
  }
  v.info = fmt("%zu states, 4 gates each, max |formula - oracle| %.2e", states, worst);
  return v;
}

Verdict identity_in_haldane_phase() {
  Verdict v;
  std::string values;
  for (auto [j, d] : {std::pair{1.0, 0.0}, {1.0, -1.0}, {2.0, 0.0}}) {
    const double f = identity_fidelity(ground(HamiltonianSpec::xxz(12, j, d)));
    values += fmt("F_I(%g,%g)=%.6f ", j, d, f);
    v.require(f >= 0.999, fmt("F_I(J=%g, D=%g) = %.6f < 0.999", j, d, f));
  }
  const double f = identity_fidelity(ground(HamiltonianSpec::xxz(12, 1, 5)));
  values += fmt("F_I(1,5)=%.4f", f);
  v.require(f <= 0.9, fmt("large-D F_I = %.4f > 0.9", f));
  v.info = values;
  return v;
}

Verdict blbq_scan() {
  Verdict v;
  std::vector<double> alpha;
  for (int k = 0; k <= 20; ++k) alpha.push_back(-1 + 0.1 * k);
  // The 21-point grid misses the valence-bond point, so it is sampled in addition.
  alpha.push_back(1.0 / 3.0);
  std::sort(alpha.begin(), alpha.end());
  const std::size_t c = std::find(alpha.begin(), alpha.end(), 1.0 / 3.0) - alpha.begin();
  const std::map<std::string, double> gates{{"T", kPi / 4}, {"S", kPi / 2}, {"Z", kPi}};
  std::map<std::string, std::vector<double>> f;
  for (double a : alpha) {
    const auto g = ground(HamiltonianSpec::blbq(7, a));
    for (const auto& [name, t] : gates) f[name].push_back(raw_rz(g, t));
  }
  std::string peak;
  for (const auto& [name, t] : gates) {
    const auto& y = f[name];
    v.require(std::abs(y[c] - 1) <= 1e-5, fmt("%s at 1/3: %.8f", name.c_str(), y[c]));
    for (std::size_t k = 1; k <= 3; ++k) {
      v.require(y[c - k] < y[c - k + 1], fmt("%s not increasing toward 1/3 at alpha=%.2f", name.c_str(), alpha[c - k]));
      v.require(y[c + k] < y[c + k - 1], fmt("%s not decreasing past 1/3 at alpha=%.2f", name.c_str(), alpha[c + k]));
    }
    // Exact valence-bond value for comparison.
    const double aklt = 1 - (1 - std::cos(t)) / (2 * std::pow(3.0, 7.0));
    peak += fmt("%s %.8f (valence-bond value %.8f, neighbours %.4f..%.4f); ", name.c_str(), y[c], aklt, y[c - 3],
                y[c + 3]);
  }
  v.info = "L=7, 21+1 alphas; at 1/3 " + peak;
  return v;
}

struct ScanPoint {
  double x, s_gate, s_closed, fi, g_corr, g_fail;
  std::vector<double> closed_delta;
};

std::vector<ScanPoint> xxz_scan(const std::vector<std::pair<double, double>>& jd) {
  std::vector<ScanPoint> out;
  for (auto [j, d] : jd) {
    const auto g = ground(HamiltonianSpec::xxz(12, j, d));
    ScanPoint p;
    p.x = 0;
    p.s_gate = raw_rz(g, kPi / 2);
    p.fi = identity_fidelity(g);
    p.g_corr = g_corr(g);
    p.g_fail = g_fail(g);
    for (double t : {kPi / 4, kPi / 2, kPi}) {
      const double closed = rz_fidelity_haldane(g, t).diagnostics.raw_value;
      p.closed_delta.push_back(std::abs(closed - raw_rz(g, t)));
    }
    out.push_back(p);
  }
  return out;
}

std::vector<double> d_grid, j_grid;
std::vector<ScanPoint> d_scan, j_scan;

Verdict phase_scans() {
  Verdict v;
  std::vector<std::pair<double, double>> jd;
  for (int k = 0; k <= 40; ++k) d_grid.push_back(-4 + 0.1 * k);
  for (double d : d_grid) jd.emplace_back(1.0, d);
  d_scan = xxz_scan(jd);
  jd.clear();
  for (int k = 0; k <= 25; ++k) j_grid.push_back(1 + 0.1 * k);
  for (double j : j_grid) jd.emplace_back(j, 0.0);
  j_scan = xxz_scan(jd);

  auto peak = [](const std::vector<ScanPoint>& s) {
    return std::max_element(s.begin(), s.end(), [](auto& a, auto& b) { return a.s_gate < b.s_gate; }) - s.begin();
  };
  const auto dp = peak(d_scan), jp = peak(j_scan);
  const double dx = d_grid[dp], jx = j_grid[jp];
  v.require(dx >= -3.3 && dx <= -2.4, fmt("D peak at %.2f", dx));
  v.require(d_scan[dp].s_gate >= 0.985, fmt("D peak value %.5f", d_scan[dp].s_gate));
  v.require(jx >= 2.3 && jx <= 3.1, fmt("J peak at %.2f", jx));
  v.require(j_scan[jp].s_gate >= 0.985, fmt("J peak value %.5f", j_scan[jp].s_gate));
  v.info = fmt("S gate peaks at D=%.2f (%.5f) and J=%.2f (%.5f)", dx, d_scan[dp].s_gate, jx, j_scan[jp].s_gate);
  return v;
}

Verdict closed_form_agreement() {
  Verdict v;
  std::size_t n = 0;
  double worst = 0;
  for (const auto* scan : {&d_scan, &j_scan}) {
    for (const auto& p : *scan) {
      if (!(p.fi > 0.999)) continue;
      ++n;
      for (double d : p.closed_delta) worst = std::max(worst, d);
    }
  }
  v.require(n > 0, "no Haldane-phase points in the scans");
  v.require(worst <= 1e-5, fmt("max |closed form - expansion| %.2e > 1e-5", worst));
  v.info = fmt("%zu Haldane-phase points, T/S/Z gates, max delta %.2e", n, worst);
  return v;
}

Verdict diagnostics_limits() {
  Verdict v;
  // d_grid runs upward from -4, so walk it backwards from 0 down to -2.8.
  std::size_t steps = 0;
  for (std::size_t k = d_grid.size() - 1; k > 0 && d_grid[k - 1] >= -2.8 - 1e-9; --k) {
    ++steps;
    const double here = d_scan[k].g_fail, next = d_scan[k - 1].g_fail;
    v.require(next <= here + 1e-6, fmt("g_fail rises from %.6g to %.6g at D=%.2f", here, next, d_grid[k - 1]));
  }
  const auto dp = std::max_element(d_scan.begin(), d_scan.end(),
                                   [](auto& a, auto& b) { return a.s_gate < b.s_gate; }) -
                  d_scan.begin();
  v.require(d_scan[dp].g_corr <= -0.97, fmt("g_corr at the peak %.5f", d_scan[dp].g_corr));
  double worst = 0;
  for (std::size_t L = 1; L <= 10; ++L) {
    worst = std::max(worst, std::abs(g_fail(aklt_mps<cplx>(L)) - std::pow(3.0, -double(L))));
  }
  v.require(worst <= 1e-12, fmt("g_fail(AKLT) off by %.2e", worst));
  v.info = fmt("g_fail over %zu steps (%.2e -> %.2e), g_corr at peak %.5f, AKLT g_fail error %.1e", steps,
                   d_scan.back().g_fail, d_scan[d_grid.size() - 1 - steps].g_fail, d_scan[dp].g_corr, worst);
  return v;
}

Verdict blocked_unitary() {
  Verdict v;
  std::string values;
  for (auto [j, d] : {std::pair{1.0, -10.0}, {10.0, 0.0}}) {
    const auto g = ground(HamiltonianSpec::blocked(9, j, d, 1));
    auto f = [&](double t, double p, double l) { return unitary_fidelity(g, t, p, l).diagnostics.raw_value; };
    const double a = f(kPi / 2, kPi / 2, kPi / 2), b = f(kPi / 2, kPi / 8, kPi / 4), id = f(0, 0, 0),
                 full = f(kPi, kPi, kPi);
    v.require(a > 0.99, fmt("(J,D)=(%g,%g) (pi/2,pi/2,pi/2): %.5f", j, d, a));
    v.require(b > 0.99, fmt("(J,D)=(%g,%g) (pi/2,pi/8,pi/4): %.5f", j, d, b));
    v.require(std::abs(id - 1) <= 1e-5, fmt("(J,D)=(%g,%g) identity: %.8f", j, d, id));
    values += fmt("(J,D)=(%g,%g): %.5f %.5f id=%.7f (pi,pi,pi)=%.5f; ", j, d, a, b, id, full);

    const auto small = ground(HamiltonianSpec::blocked(3, j, d, 0));
    const auto p = Protocol::unitary(kPi, kPi, kPi);
    const double oracle = fidelity_from_rho(enumerate_rho_u(dense_state(small), p), p.gate());
    const double formula = unitary_fidelity(small, kPi, kPi, kPi).diagnostics.raw_value;
    v.require(std::abs(oracle - formula) <= 1e-6,
              fmt("L=3 (pi,pi,pi) formula %.8f vs oracle %.8f", formula, oracle));
    values += fmt("L=3 delta %.1e; ", std::abs(oracle - formula));
  }
  v.info = values;
  return v;
}

Verdict property_suites() {
  Verdict v;
  const std::string filter =
      "MeasurementBasis.*:Byproducts.*:Stabilizers.*:OperatorIdentities.*:TMunu.*:ExpectString.*:Dense.*:"
      "ExpectMpo.*:Dmrg.DeterministicGivenSeed:Dmrg.VarianceAndSweepHistory";
  const std::string cmd = std::string("\"") + SPINMBQC_UNIT_TESTS + "\" --gtest_brief=1 --gtest_filter='" + filter +
                          "' 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    v.require(false, "cannot start the unit test binary");
    return v;
  }
  std::string output;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) output += buf;
  const int status = pclose(pipe);
  v.require(status == 0, "property tests failed:\n" + output);
  const auto pos = output.find("tests from");
  if (pos != std::string::npos) {
    const auto start = output.rfind('\n', pos);
    v.info = output.substr(start == std::string::npos ? 0 : start + 1, output.find('\n', pos) - start - 1);
  }
  return v;
}

Verdict coarse_map() {
  Verdict v;
  std::vector<double> js, ds;
  for (int k = 0; k < 9; ++k) js.push_back(-4 + 1.25 * k);
  for (int k = 0; k < 9; ++k) ds.push_back(-3 + 1.0 * k);
  std::map<std::pair<double, double>, double> fi;
  std::printf("  identity fidelity, L=10 (rows D, columns J)\n  %6s", "");
  for (double j : js) std::printf(" %6.2f", j);
  std::printf("\n");
  for (auto it = ds.rbegin(); it != ds.rend(); ++it) {
    std::printf("  %6.2f", *it);
    for (double j : js) {
      const double f = identity_fidelity(ground(HamiltonianSpec::xxz(10, j, *it)));
      fi[{j, *it}] = f;
      std::printf(" %6.3f", f);
    }
    std::printf("\n");
  }
  v.require(fi.at({1, 0}) > 0.99, fmt("F_I(1,0) = %.4f", fi.at({1, 0})));
  v.require(fi.at({-4, 0}) < 0.5, fmt("F_I(-4,0) = %.4f", fi.at({-4, 0})));
  v.require(fi.at({1, 5}) < 0.5, fmt("F_I(1,5) = %.4f", fi.at({1, 5})));
  v.info = fmt("F_I(1,0)=%.4f F_I(-4,0)=%.4f F_I(1,5)=%.4f", fi.at({1, 0}), fi.at({-4, 0}), fi.at({1, 5}));
  return v;
}

struct Criterion {
  std::string name;
  double budget_s;
  std::function<Verdict()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"1 AKLT closed form", 5, aklt_closed_form},
      {"2 oracle equivalence", 120, oracle_equivalence},
      {"3 identity fidelity in the Haldane phase", 300, identity_in_haldane_phase},
      {"4 BLBQ alpha scan", 600, blbq_scan},
      {"5 XXZ D and J scans", 1800, phase_scans},
      {"6 closed form agreement", 1, closed_form_agreement},
      {"7 diagnostics limits", 5, diagnostics_limits},
      {"8 blocked chain unitaries", 1200, blocked_unitary},
      {"9 property suites", 120, property_suites},
      {"coarse (J, D) map", 1800, coarse_map},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(s < c.budget_s, fmt("took %.1f s, budget %.0f s", s, c.budget_s));
    failed += v.pass ? 0 : 1;
    std::printf("%s criterion %s: %s%s%s [%.1f s]\n", v.pass ? "PASS" : "FAIL", c.name.c_str(), v.info.c_str(),
                v.pass ? "" : " | failed: ", v.detail.c_str(), s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu acceptance checks failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
