// permchar command-line interface.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "permchar/permchar.hpp"

using namespace permchar;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
  std::string out;
  std::string format = "json";
  std::string config;
  std::vector<std::string> settings;
};

void write_output(const Globals& g, const std::string& text) {
  if (g.out.empty()) std::cout << text;
  else write_text_file(g.out, text);
}

std::uint64_t seed_of(const Globals& g) { return g.seed.value_or(42); }

// Experiment config: defaults, then --config file, then --set pairs, then
// the global flags.
ExperimentConfig experiment_config(const Globals& g, const std::string& experiment) {
  auto c = default_config(experiment);
  if (!g.config.empty()) apply_config_file(c, g.config);
  for (const auto& s : g.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParameterError("--set expects key=value, got '" + s + "'");
    apply_setting(c, detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)));
  }
  c.experiment = experiment;
  if (g.seed) c.seed = *g.seed;
  if (g.threads) c.threads = g.threads;
  return c;
}

ReportFormat report_format(const Globals& g) { return g.format == "csv" ? ReportFormat::csv : ReportFormat::json; }

WeightVector weights_for(const std::string& file, double theta, std::uint64_t seed) {
  if (!file.empty()) return weights_from_json(read_json_file(file));
  auto g = make_rng(seed, 0, Stream::weights);
  return sample_pd(theta, g);
}

int run_report(const Globals& g, const std::string& experiment) {
  const auto r = run_experiment(experiment_config(g, experiment));
  write_output(g, render_report(r, report_format(g)));
  for (const auto& v : r.verdicts) {
    std::fprintf(stderr, "[%s] criterion %d %s: %s = %s (%s %s)\n", v.pass ? "PASS" : "FAIL", v.criterion,
                 criterion_name(v.criterion), v.check.c_str(), format_double(v.value).c_str(), v.relation.c_str(),
                 format_double(v.threshold).c_str());
  }
  return r.passed() ? 0 : 2;
}

// Fast internal consistency checks.
int selftest(const Globals& g) {
  int failed = 0;
  auto check = [&](const char* name, bool ok) {
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", name);
    failed += !ok;
  };

  {
    const auto layout = SpaceLayout::from(geometric_weights(1.0, 0.5, 8));
    auto at = [&](std::size_t j, double deg) {
      double t = std::fmod(deg, 360.0) / 360.0;
      if (t < 0) t += 1.0;
      return PointLocation::on_circle(j, t * layout.perimeter(j));
    };
    GrowingPermutation s(layout.circle_count());
    for (const auto& p : {at(2, 55), at(1, 20), at(2, -40), at(1, -110), at(4, 130), at(1, 175)}) s.insert(p);
    check("worked example (1 3)(2 6 4)(5)", s.realize().to_string() == "(1 3)(2 6 4)(5)");
    check("remove_top", remove_top(s.realize()).to_string() == "(1 3)(2 4)(5)");
  }
  {
    auto gp = make_rng(seed_of(g), 0, Stream::points);
    auto gw = make_rng(seed_of(g), 0, Stream::weights);
    const auto layout = SpaceLayout::from(sample_pd(1.0, gw));
    GrowingPermutation s(layout.circle_count());
    Permutation prev;
    bool ok = true;
    for (std::size_t n = 1; n <= 200; ++n) {
      grow_to(s, layout, n, gp);
      auto cur = s.realize();
      if (n > 1) ok &= remove_top(cur) == prev;
      prev = std::move(cur);
    }
    check("virtual permutation coherence", ok);
  }
  {
    const Complex z1 = std::polar(1.0, 0.4), z2 = std::polar(1.0, 1.3), z3 = std::polar(1.0, -2.2);
    const std::vector<Complex> e{z1, z2, z3};
    const auto m = ModifiedPermMatrix::build(Permutation::from_cycles(3, {{1, 2, 3}}), e);
    const auto n = project_matrix(m);
    check("projection of a 3-cycle", std::abs(n.at(0, 1) - z2 * z3) < 1e-12 && std::abs(n.at(1, 0) - z1) < 1e-12);
    check("characteristic polynomial recursion", char_poly_recursion_check(m, n, Complex(0.3, 1.7)) < 1e-12);
  }
  {
    double total = 0.0;
    std::vector<std::uint32_t> image{0, 1, 2, 3};
    do total += ewens_pmf(Permutation::from_image(image), 0.7);
    while (std::next_permutation(image.begin(), image.end()));
    check("Ewens pmf sums to one on S_4", std::abs(total - 1.0) < 1e-12);
  }
  {
    double worst = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double a = k / 100.0;
      worst = std::max(worst, std::abs(alpha_shift_coefficient(a) - alpha_shift_coefficient_tan(a)) /
                                  std::abs(alpha_shift_coefficient_tan(a)));
    }
    check("tan identity", worst < 1e-12);
    check("13 golden mod 1", std::abs(frac_mult(named_alpha("golden"), 13) - 0.03444185374863) < 1e-12);
    check("golden type estimate near 1", estimate_type(named_alpha("golden"), 100000).estimate < 1.05);
  }
  {
    PoissonPoints pts;
    pts.nonnegative = {2.0};
    pts.negative = {-2.0};
    const Complex z(0.7, 0.2);
    check("symmetric Poisson pair", std::abs(poisson_product(pts, z) - (1.0 - z * z / 4.0)) < 1e-15);
  }
  {
    auto c = default_config("converge-alpha");
    c.trials = 50;
    c.n_schedule = {512};
    c.seed = seed_of(g);
    c.threads = 1;
    const auto a = render_report(run_experiment(c), ReportFormat::json);
    c.threads = 4;
    const auto b = render_report(run_experiment(c), ReportFormat::json);
    check("report independent of thread count", a == b);
  }
  std::printf("%d checks failed\n", failed);
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"permchar: characteristic polynomials of random virtual permutation matrices"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--threads", g.threads, "Worker threads (0 = hardware)");
  app.add_option("--out", g.out, "Output file (default: stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--config", g.config, "key=value config file")->check(CLI::ExistingFile);
  app.add_option("--set", g.settings, "Config override key=value (repeatable)");

  std::function<int()> action;

  double theta = 1.0;
  std::string measure = "nabla_prime";
  double y0 = 0.5;
  auto* sample = app.add_subcommand("sample", "Draw a weight vector");
  sample->add_option("--theta", theta, "Poisson-Dirichlet parameter");
  sample->add_option("--measure", measure)->check(CLI::IsMember({"nabla_prime", "general"}));
  sample->add_option("--y0", y0, "Circle mass for general measures");
  sample->callback([&] {
    action = [&] {
      auto c = default_config("sample");
      c.theta = theta;
      c.y0 = y0;
      c.seed = seed_of(g);
      c.measure = measure == "general" ? MeasureKind::general : MeasureKind::nabla_prime;
      c.general_weights = "pd";
      c.validate();
      const auto w = trial_weights(c, 0);
      if (g.format == "csv") {
        std::string out = "j,value\n";
        for (std::size_t j = 0; j < w.size(); ++j) out += std::to_string(j + 1) + ',' + format_double(w.values[j]) + '\n';
        write_output(g, out);
      } else {
        write_output(g, to_json(w).dump(2) + '\n');
      }
      return 0;
    };
  });

  std::uint64_t n = 100;
  std::string weights_file, emit;
  auto* grow = app.add_subcommand("grow", "Grow a virtual permutation to size n");
  grow->add_option("--n", n, "Target size")->required();
  grow->add_option("--theta", theta, "Poisson-Dirichlet parameter");
  grow->add_option("--weights", weights_file, "Weight vector JSON")->check(CLI::ExistingFile);
  grow->add_option("--emit", emit, "Write the cycles JSON here");
  grow->callback([&] {
    action = [&] {
      const auto w = weights_for(weights_file, theta, seed_of(g));
      const auto layout = SpaceLayout::from(w);
      GrowingPermutation s(layout.circle_count());
      auto gp = make_rng(seed_of(g), 0, Stream::points);
      grow_to(s, layout, n, gp);
      auto j = to_json(s.realize());
      const auto c = s.counts();
      j["ell"] = c.ell;
      j["p_n"] = c.p_n;
      const auto text = j.dump(2) + '\n';
      if (!emit.empty()) write_text_file(emit, text);
      else write_output(g, text);
      return 0;
    };
  });

  std::string perm_file;
  bool project = false;
  auto* matrix = app.add_subcommand("matrix", "Modified permutation matrix with uniform unit entries");
  matrix->add_option("--n", n, "Size when growing a fresh permutation");
  matrix->add_option("--theta", theta, "Poisson-Dirichlet parameter");
  matrix->add_option("--perm", perm_file, "Permutation (cycles JSON) to decorate")->check(CLI::ExistingFile);
  matrix->add_flag("--project", project, "Apply the rank-one projection once");
  matrix->callback([&] {
    action = [&] {
      Permutation p;
      if (!perm_file.empty()) {
        p = permutation_from_json(read_json_file(perm_file));
      } else {
        const auto layout = SpaceLayout::from(weights_for({}, theta, seed_of(g)));
        GrowingPermutation s(layout.circle_count());
        auto gp = make_rng(seed_of(g), 0, Stream::points);
        grow_to(s, layout, n, gp);
        p = s.realize();
      }
      auto ge = make_rng(seed_of(g), 0, Stream::entries);
      auto m = ModifiedPermMatrix::build(p, sample_unit_entries(p.size(), ge));
      if (project) m = project_matrix(m);
      write_output(g, to_json(m).dump(2) + '\n');
      return 0;
    };
  });

  Grid grid;
  double re_c = 0.0, im_c = 0.0, tol = std::numeric_limits<double>::infinity();
  std::uint64_t finite_n = 0;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate the limit (or the size-n ratio) on a grid");
  evaluate->add_option("--weights", weights_file, "Weight vector JSON")->check(CLI::ExistingFile);
  evaluate->add_option("--theta", theta, "Poisson-Dirichlet parameter");
  evaluate->add_option("--center-re", re_c);
  evaluate->add_option("--center-im", im_c);
  evaluate->add_option("--half-width", grid.half_width);
  evaluate->add_option("--resolution", grid.resolution);
  evaluate->add_option("--tol", tol, "Fail when the tail bound reaches this");
  evaluate->add_option("--n", finite_n, "Evaluate the size-n ratio of a coupled permutation instead");
  evaluate->callback([&] {
    action = [&] {
      grid.center = {re_c, im_c};
      const auto w = weights_for(weights_file, theta, seed_of(g));
      auto gm = make_rng(seed_of(g), 0, Stream::marks);
      std::uint64_t resampled = 0;
      CycleMarks marks;
      marks.u = trial_marks(w.size(), gm, resampled);
      std::vector<GridValue> rows;
      if (finite_n == 0) {
        for (const auto& z : grid.points()) {
          const auto v = xi_tilde_inf(w, marks.u, z, tol);
          rows.push_back({z, v.value, v.tail_bound});
        }
      } else {
        const auto layout = SpaceLayout::from(w);
        GrowingPermutation s(layout.circle_count());
        auto gp = make_rng(seed_of(g), 0, Stream::points);
        grow_to(s, layout, finite_n, gp);
        const auto counts = s.counts();
        auto gs = make_rng(seed_of(g), 0, Stream::segment_marks);
        extend_segment_marks(marks, counts.p_n, gs);
        for (const auto& z : grid.points()) rows.push_back({z, xi_tilde_n(counts, marks, z), 0.0});
      }
      if (g.format == "csv") {
        write_output(g, grid_csv(rows));
      } else {
        Json j = Json::array();
        for (const auto& r : rows) {
          j.push_back({{"re_z", r.z.real()},
                       {"im_z", r.z.imag()},
                       {"re_val", r.value.real()},
                       {"im_val", r.value.imag()},
                       {"tail_bound", r.tail_bound}});
        }
        write_output(g, j.dump(2) + '\n');
      }
      return 0;
    };
  });

  std::string alpha_name = "golden";
  std::uint64_t scan = 1000000;
  auto* alpha = app.add_subcommand("alpha", "Continued fraction and type estimate of an angle");
  alpha->add_option("--name", alpha_name, "golden, sqrt2, sqrt3, e or p/q");
  alpha->add_option("--scan", scan, "Scan bound N for the type estimate");
  alpha->callback([&] {
    action = [&] {
      const auto a = parse_alpha(alpha_name);
      write_output(g, to_json(a, estimate_type(a, scan)).dump(2) + '\n');
      return 0;
    };
  });

  for (const char* name : {"converge-modified", "converge-alpha", "growth", "general", "test-multinomial",
                           "test-equidistribution", "small-denominators", "diagnostics"}) {
    auto* sub = app.add_subcommand(name, std::string("Run the ") + name + " experiment and write its report");
    sub->callback([&, name] { action = [&, name] { return run_report(g, name); }; });
  }

  auto* self = app.add_subcommand("selftest", "Quick internal consistency checks");
  self->callback([&] { action = [&] { return selftest(g); }; });

  CLI11_PARSE(app, argc, argv);
  try {
    return action ? action() : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
