// One PASS/FAIL line per acceptance criterion. Reports of the statistical
// criteria are written to the directory given as the first argument
// (default: acceptance_reports).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <string>

#include "oracles.hpp"
#include "permchar/permchar.hpp"

using namespace permchar;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::filesystem::path report_dir = "acceptance_reports";

Permutation random_permutation(std::size_t n, Rng& g) {
  std::vector<std::uint32_t> image(n);
  for (std::size_t k = 0; k < n; ++k) image[k] = static_cast<std::uint32_t>(k);
  for (std::size_t k = n; k > 1; --k) std::swap(image[k - 1], image[g() % k]);
  return Permutation::from_image(std::move(image));
}

ModifiedPermMatrix random_matrix(std::size_t n, Rng& g) {
  const auto p = random_permutation(n, g);
  return ModifiedPermMatrix::build(p, sample_unit_entries(n, g));
}

Complex random_in_disk(Rng& g, double radius) {
  const double r = radius * std::sqrt(uniform_half_open(g));
  return std::polar(r, 2 * std::numbers::pi * uniform_half_open(g));
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string verdict_detail(const Report& r) {
  std::string s;
  for (const auto& v : r.verdicts) {
    if (!s.empty()) s += "; ";
    s += v.check + " = " + format_double(v.value) + " (" + v.relation + " " + format_double(v.threshold) + ")" +
         (v.pass ? "" : " FAILED");
  }
  return s;
}

Outcome from_report(const Report& r) {
  emit_report(r, (report_dir / (r.experiment + ".json")).string(), ReportFormat::json);
  return {r.passed(), verdict_detail(r)};
}

Outcome criterion_1() {
  auto g = make_rng(1001, 0, Stream::entries);
  double worst = 0.0;
  for (std::size_t n = 1; n <= 8; ++n) {
    for (int t = 0; t < 200; ++t) {
      const auto m = random_matrix(n, g);
      for (int k = 0; k < 5; ++k) {
        const Complex x = random_in_disk(g, 2.0);
        const Complex det = oracle::char_poly(m, x);
        worst = std::max(worst, std::abs(char_poly_eval(m, x) - det) / (1.0 + std::abs(det)));
      }
    }
  }
  return {worst < 1e-9, "max |cycle product - det| / (1 + |det|) = " + fmt("%.3g", worst)};
}

Outcome criterion_2() {
  double worst_tilde = 0.0, worst_counts = 0.0, worst_alpha = 0.0;
  auto g = make_rng(1002, 0, Stream::entries);
  std::vector<Complex> zs(20);
  for (auto& z : zs) z = random_in_disk(g, 3.0);
  const std::vector<AlphaFixedPoint> alphas{named_alpha("golden"), named_alpha("sqrt2"), named_alpha("e")};
  for (std::size_t n = 1; n <= 8; ++n) {
    const double dn = static_cast<double>(n);
    for (int t = 0; t < 50; ++t) {
      const auto m = random_matrix(n, g);
      if (!has_no_unit_eigenvalue(m)) continue;
      for (const auto& z : zs) {
        const Complex x = std::exp(Complex(0, 2 * std::numbers::pi) * z / dn);
        const Complex ref = oracle::char_poly(m, x) / oracle::char_poly(m, 1.0);
        worst_tilde = std::max(worst_tilde, std::abs(xi_tilde_n(m, z) - ref) / (1.0 + std::abs(ref)));
      }
      const auto& p = m.permutation();
      const auto plain = ModifiedPermMatrix::plain(p);
      for (const auto& a : alphas) {
        const Complex y = std::polar(1.0, 2 * std::numbers::pi * a.value());
        for (const auto& z : zs) {
          const Complex x = y * std::exp(Complex(0, 2 * std::numbers::pi) * z / dn);
          const Complex ref = oracle::char_poly(plain, x) / oracle::char_poly(plain, y);
          worst_alpha = std::max(worst_alpha, std::abs(xi_n_alpha(p, a, z) - ref) / (1.0 + std::abs(ref)));
        }
      }
    }
    // Count-based evaluation on a grown virtual permutation with a segment.
    for (int t = 0; t < 50; ++t) {
      const auto w = geometric_weights(0.7, 0.5, 20);
      const auto layout = SpaceLayout::from(w);
      auto gp = make_rng(1002, 1000 * n + t, Stream::points);
      auto gm = make_rng(1002, 1000 * n + t, Stream::marks);
      auto gs = make_rng(1002, 1000 * n + t, Stream::segment_marks);
      GrowingPermutation s(layout.circle_count());
      grow_to(s, layout, n, gp);
      CycleMarks marks;
      marks.u = sample_circle_marks(layout.circle_count(), gm);
      extend_segment_marks(marks, s.segment().size(), gs);
      std::vector<Complex> entries(n, Complex(1.0, 0.0));
      for (std::size_t j = 1; j <= s.circle_count(); ++j) {
        if (!s.circle(j).empty()) entries[s.circle(j).front().label - 1] = marks.u[j - 1];
      }
      for (std::size_t k = 0; k < s.segment().size(); ++k) entries[s.segment()[k] - 1] = marks.v[k];
      const auto m = ModifiedPermMatrix::build(s.realize(), entries);
      const auto counts = s.counts();
      for (const auto& z : zs) {
        const Complex x = std::exp(Complex(0, 2 * std::numbers::pi) * z / dn);
        const Complex ref = oracle::char_poly(m, x) / oracle::char_poly(m, 1.0);
        worst_counts = std::max(worst_counts, std::abs(xi_tilde_n(counts, marks, z) - ref) / (1.0 + std::abs(ref)));
      }
    }
  }
  const double worst = std::max({worst_tilde, worst_counts, worst_alpha});
  return {worst < 1e-9, "max relative error: xi~_n (matrix) " + fmt("%.3g", worst_tilde) + ", xi~_n (counts) " +
                            fmt("%.3g", worst_counts) + ", xi_n,alpha " + fmt("%.3g", worst_alpha)};
}

Outcome criterion_3() {
  auto g = make_rng(1003, 0, Stream::entries);
  int bad = 0;
  double worst_s2 = 0.0, least_s1 = 1e300;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(g() % 32);
    auto m = random_matrix(n + 1, g);
    while (!has_no_unit_eigenvalue(m)) m = random_matrix(n + 1, g);
    const auto proj = project_matrix(m);
    oracle::Mat diff = oracle::dense(m);
    diff.topLeftCorner(n, n) -= oracle::dense(proj);
    diff(n, n) -= 1.0;
    const auto sv = oracle::singular_values(diff);
    const double s2 = sv.size() > 1 ? sv(1) : 0.0;
    worst_s2 = std::max(worst_s2, s2);
    least_s1 = std::min(least_s1, sv(0));
    const bool ok = s2 < 1e-10 && sv(0) > 1e-3 && has_no_unit_eigenvalue(proj) &&
                    proj.permutation() == remove_top(m.permutation());
    bad += !ok;
  }
  const Complex z1 = std::polar(1.0, 0.4), z2 = std::polar(1.0, 1.3), z3 = std::polar(1.0, -2.2);
  const std::vector<Complex> e{z1, z2, z3};
  const auto n3 = project_matrix(ModifiedPermMatrix::build(Permutation::from_cycles(3, {{1, 2, 3}}), e));
  const double ex = std::max({std::abs(n3.at(0, 0)), std::abs(n3.at(1, 1)), std::abs(n3.at(0, 1) - z2 * z3),
                              std::abs(n3.at(1, 0) - z1)});
  return {bad == 0 && ex < 1e-12, std::to_string(bad) + " failures of 500; max sigma2 " + fmt("%.3g", worst_s2) +
                                      ", min sigma1 " + fmt("%.3g", least_s1) + "; 3x3 example error " +
                                      fmt("%.3g", ex)};
}

PointLocation at_degrees(const SpaceLayout& layout, std::size_t j, double degrees) {
  double turn = std::fmod(degrees, 360.0) / 360.0;
  if (turn < 0) turn += 1.0;
  return PointLocation::on_circle(j, turn * layout.perimeter(j));
}

Outcome criterion_4() {
  int broken = 0;
  for (double theta : {0.5, 1.0, 2.0}) {
    for (int t = 0; t < 100; ++t) {
      auto gw = make_rng(1004, t, Stream::weights);
      auto gp = make_rng(1004, t, Stream::points);
      const auto layout = SpaceLayout::from(sample_pd(theta, gw));
      GrowingPermutation s(layout.circle_count());
      Permutation prev;
      for (std::size_t n = 1; n <= 300; ++n) {
        grow_to(s, layout, n, gp);
        auto cur = s.realize();
        if (n > 1 && remove_top(cur) != prev) {
          ++broken;
          break;
        }
        prev = std::move(cur);
      }
    }
  }
  const auto halving = SpaceLayout::from(geometric_weights(1.0, 0.5, 8));
  GrowingPermutation a(halving.circle_count());
  for (const auto& p : {at_degrees(halving, 2, 55), at_degrees(halving, 1, 20), at_degrees(halving, 2, -40),
                        at_degrees(halving, 1, -110), at_degrees(halving, 4, 130), at_degrees(halving, 1, 175)}) {
    a.insert(p);
  }
  WeightVector w;
  for (int j = 1; j <= 8; ++j) w.values.push_back(std::pow(3.0, -j));
  const auto thirds = SpaceLayout::from(w);
  GrowingPermutation b(thirds.circle_count());
  for (const auto& p : {at_degrees(thirds, 1, 20), PointLocation::on_segment(0.45), PointLocation::on_segment(0.1),
                        at_degrees(thirds, 3, 55), at_degrees(thirds, 1, 175), at_degrees(thirds, 1, -70)}) {
    b.insert(p);
  }
  const auto ea = a.realize().to_string(), eb = b.realize().to_string();
  const bool ok = broken == 0 && ea == "(1 3)(2 6 4)(5)" && eb == "(1 5 6)(2)(3)(4)";
  return {ok, std::to_string(broken) + " incoherent paths of 300; examples " + ea + ", " + eb};
}

Outcome criterion_5() {
  const std::uint64_t trials = 1000000;
  double worst_z = 0.0;
  for (double theta : {0.5, 1.0, 2.0}) {
    struct Pair {
      std::uint32_t s3 = 0, s4 = 0;
    };
    auto encode = [](const Permutation& p) {
      std::uint32_t code = 0;
      for (auto v : p.image()) code = code * 8 + v;
      return code;
    };
    const auto draws = parallel_trials<Pair>(trials, 0, [&](std::uint64_t t) {
      auto gw = make_rng(1005, t, Stream::weights);
      auto gp = make_rng(1005, t, Stream::points);
      const auto layout = SpaceLayout::from(sample_pd(theta, gw));
      GrowingPermutation s(layout.circle_count());
      grow_to(s, layout, 3, gp);
      Pair out;
      out.s3 = encode(s.realize());
      grow_to(s, layout, 4, gp);
      out.s4 = encode(s.realize());
      return out;
    });
    for (std::size_t n : {3u, 4u}) {
      std::map<std::uint32_t, double> counts;
      for (const auto& d : draws) counts[n == 3 ? d.s3 : d.s4] += 1.0;
      std::vector<std::uint32_t> image(n);
      for (std::size_t k = 0; k < n; ++k) image[k] = static_cast<std::uint32_t>(k);
      do {
        const auto p = Permutation::from_image(image);
        const double prob = ewens_pmf(p, theta);
        const double se = std::sqrt(prob * (1 - prob) / static_cast<double>(trials));
        const double freq = counts[encode(p)] / static_cast<double>(trials);
        worst_z = std::max(worst_z, std::abs(freq - prob) / se);
      } while (std::next_permutation(image.begin(), image.end()));
    }
  }
  return {worst_z < 4.0, "max |freq - Ewens pmf| in standard errors over S_3, S_4 and three theta = " +
                             fmt("%.3f", worst_z)};
}

Outcome criterion_6() { return from_report(run_modified_convergence(default_config("converge-modified"))); }

Outcome criterion_7() { return from_report(run_alpha_convergence(default_config("converge-alpha"))); }

Outcome criterion_8() { return from_report(run_growth_scan(default_config("growth"))); }

Outcome criterion_9() { return from_report(run_general_measure(default_config("general"))); }

Outcome criterion_10() {
  bool pass = true;
  std::string detail;
  auto multi = default_config("test-multinomial");
  multi.experiment = "test-multinomial";
  auto equi = default_config("test-equidistribution");
  auto small = default_config("small-denominators");
  auto diag = default_config("diagnostics");
  diag.rho = 0.8;
  diag.theta = 1.0;
  for (const auto& r : {test_multinomial(multi), test_equidistribution(equi), test_small_denominators(small),
                        run_decay_diagnostics(diag)}) {
    const auto o = from_report(r);
    pass &= o.pass;
    detail += (detail.empty() ? "" : " | ") + r.experiment + ": " + o.detail;
  }
  return {pass, detail};
}

Outcome criterion_11() {
  std::vector<ExperimentConfig> configs;
  auto add = [&](const std::string& e, auto&& tweak) {
    auto c = default_config(e);
    tweak(c);
    configs.push_back(c);
  };
  add("converge-modified", [](auto& c) {
    c.trials = 20;
    c.n_schedule = {256, 1024};
  });
  add("converge-alpha", [](auto& c) { c.trials = 200; });
  add("growth", [](auto& c) { c.trials = 50; });
  add("general", [](auto& c) {
    c.trials = 100;
    c.n_schedule = {1024};
  });
  add("test-multinomial", [](auto& c) { c.trials = 10000; });
  add("test-equidistribution", [](auto& c) { c.trials = 1000; });
  add("small-denominators", [](auto& c) { c.trials = 10000; });
  add("diagnostics", [](auto& c) { c.trials = 20; });
  int differing = 0;
  std::string which;
  for (auto c : configs) {
    std::string first;
    for (std::size_t threads : {1u, 8u, 1u, 8u}) {
      c.threads = threads;
      const auto r = run_experiment(c);
      const auto bytes = render_report(r, ReportFormat::json) + render_report(r, ReportFormat::csv);
      if (first.empty()) first = bytes;
      else if (bytes != first) {
        ++differing;
        which += " " + c.experiment;
        break;
      }
    }
  }
  return {differing == 0, std::to_string(configs.size()) + " experiments x threads {1, 8, 1, 8}; " +
                              std::to_string(differing) + " differing" + which};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) report_dir = argv[1];
  std::filesystem::create_directories(report_dir);
  struct Entry {
    int id;
    std::function<Outcome()> run;
    double limit_seconds;
  };
  const std::vector<Entry> entries{{1, criterion_1, 10},   {2, criterion_2, 30},   {3, criterion_3, 30},
                                   {4, criterion_4, 10},   {5, criterion_5, 120},  {6, criterion_6, 600},
                                   {7, criterion_7, 600},  {8, criterion_8, 120},  {9, criterion_9, 900},
                                   {10, criterion_10, 600}, {11, criterion_11, 0}};
  int failed = 0;
  for (const auto& e : entries) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = e.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = e.limit_seconds <= 0 || secs < e.limit_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %2d %-22s %s  %s [%.1f s%s]\n", e.id, criterion_name(e.id), pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(entries.size()) - failed, entries.size());
  return failed == 0 ? 0 : 1;
}
