#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <kicktop/runner/config.hpp>
#include <kicktop/runner/experiments.hpp>
#include <kicktop/runner/parallel.hpp>

using namespace kicktop;
using Catch::Approx;

namespace {

RawConfig make_config(std::string kind,
                      std::initializer_list<std::pair<std::string, std::string>> kv) {
  RawConfig raw;
  raw.kind = std::move(kind);
  for (const auto& [k, v] : kv) raw.values[k] = v;
  return raw;
}

// strips volatile metadata (wall time) so tables can be compared for
// bit-identical content
std::string stable_dump(const ResultTable& t) {
  std::ostringstream os;
  t.write(os);
  std::string text = os.str(), out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line))
    if (line.find("wall_time_s") == std::string::npos) out += line + "\n";
  return out;
}

} // namespace

TEST_CASE("config text parses sections, comments and lists") {
  std::istringstream in("# a comment\n[entropy-time]\nk = 1 # inline\np= pi/2\n"
                        "w = 0.01, 0.1 ,0.5\nstate = 2.25 1.1 ; 2.25 2.5\n");
  const RawConfig cfg = parse_config_text(in, "test");
  REQUIRE(cfg.kind == "entropy-time");
  REQUIRE(cfg.values.at("k") == "1");
  const ConfigView view(cfg, {"k", "p", "w", "state"});
  REQUIRE(view.number("p") == Approx(std::numbers::pi / 2));
  REQUIRE(view.list("w") == std::vector<double>{0.01, 0.1, 0.5});
  const auto states = view.state_list("state");
  REQUIRE(states.size() == 2);
  REQUIRE(states[1].second == Approx(2.5));
}

TEST_CASE("config rejects malformed input") {
  std::istringstream no_section("k = 1\n");
  REQUIRE_THROWS_AS(parse_config_text(no_section, "t"), ConfigError);
  std::istringstream two_sections("[a]\n[b]\n");
  REQUIRE_THROWS_AS(parse_config_text(two_sections, "t"), ConfigError);
  std::istringstream dup("[a]\nk = 1\nk = 2\n");
  REQUIRE_THROWS_AS(parse_config_text(dup, "t"), ConfigError);
  std::istringstream noeq("[a]\nk 1\n");
  REQUIRE_THROWS_AS(parse_config_text(noeq, "t"), ConfigError);
}

TEST_CASE("unknown keys are errors") {
  const RawConfig raw = make_config("entropy-time", {{"k", "1"},
                                                     {"N", "6"},
                                                     {"state", "2.25 1.1"},
                                                     {"bogus", "1"}});
  REQUIRE_THROWS_WITH(run_entropy_time(raw), Catch::Matchers::ContainsSubstring("bogus"));
}

TEST_CASE("angle parsing understands pi") {
  REQUIRE(parse_angle("2.25") == 2.25);
  REQUIRE(parse_angle("pi") == Approx(std::numbers::pi));
  REQUIRE(parse_angle("pi/2") == Approx(std::numbers::pi / 2));
  REQUIRE(parse_angle("4pi/11") == Approx(4.0 * std::numbers::pi / 11));
  REQUIRE(parse_angle("-pi/3") == Approx(-std::numbers::pi / 3));
  REQUIRE(parse_angle("0.5pi") == Approx(0.5 * std::numbers::pi));
  REQUIRE_THROWS_AS(parse_angle("zzz"), ConfigError);
  REQUIRE_THROWS_AS(parse_angle("1.5qq"), ConfigError);
}

TEST_CASE("state presets") {
  REQUIRE(state_preset("k1-regular") == std::pair{2.25, 1.1});
  REQUIRE(state_preset("k3-regular") == std::pair{2.25, 2.5});
  REQUIRE_THROWS_AS(state_preset("k9"), ConfigError);
}

TEST_CASE("ordered parallel map is deterministic and propagates errors") {
  auto square = [](std::size_t i) { return double(i) * double(i); };
  const auto serial = ordered_parallel_map(100, 1, square);
  const auto parallel = ordered_parallel_map(100, 8, square);
  REQUIRE(serial == parallel);

  REQUIRE_THROWS_AS(ordered_parallel_map(10, 4,
                                         [](std::size_t i) -> double {
                                           if (i == 7) throw std::runtime_error("boom");
                                           return 0.0;
                                         }),
                    std::runtime_error);
}

TEST_CASE("result table formatting") {
  ResultTable t;
  t.columns = {"a[1]", "b[1]"};
  t.add_meta("key", "value");
  t.add_row({1.0, 0.123456789012345});
  REQUIRE_THROWS_AS(t.add_row({1.0}), std::invalid_argument);
  std::ostringstream os;
  t.write(os);
  const std::string text = os.str();
  REQUIRE(text.find("# key = value") != std::string::npos);
  REQUIRE(text.find("a[1]\tb[1]") != std::string::npos);
  REQUIRE(text.find("0.123456789012") != std::string::npos); // 12 significant digits
}

TEST_CASE("identical config and seed give identical tables") {
  const RawConfig raw = make_config("entropy-time", {{"k", "1"},
                                                     {"N", "8"},
                                                     {"w", "0.5"},
                                                     {"kicks", "40"},
                                                     {"realizations", "4"},
                                                     {"seed", "777"},
                                                     {"state", "2.25 1.1"},
                                                     {"threads", "3"}});
  const auto a = run_entropy_time(raw);
  const auto b = run_entropy_time(raw);
  REQUIRE(stable_dump(a.table) == stable_dump(b.table));
  // thread count must not change the numbers
  RawConfig serial = raw;
  serial.values["threads"] = "1";
  const auto c = run_entropy_time(serial);
  for (std::size_t i = 0; i < a.table.rows.size(); ++i)
    for (std::size_t j = 0; j < 3; ++j) REQUIRE(a.table.rows[i][j] == c.table.rows[i][j]);
}

TEST_CASE("clean fast path matches the full engine at w=0") {
  const RawConfig fast = make_config(
      "entropy-time", {{"k", "3"}, {"N", "8"}, {"kicks", "100"}, {"state", "2.25 1.1"}});
  // force the disordered path with w tiny enough to be physically identical
  const RawConfig full = make_config("entropy-time", {{"k", "3"},
                                                      {"N", "8"},
                                                      {"w", "1e-300"},
                                                      {"kicks", "100"},
                                                      {"realizations", "1"},
                                                      {"seed", "1"},
                                                      {"state", "2.25 1.1"}});
  const auto a = run_entropy_time(fast);
  const auto b = run_entropy_time(full);
  for (std::size_t i = 0; i < a.table.rows.size(); ++i)
    REQUIRE(a.table.rows[i][1] == Approx(b.table.rows[i][1]).margin(1e-8));
}

TEST_CASE("entropy run with disorder reports spread across realizations") {
  const RawConfig raw = make_config("entropy-time", {{"k", "6"},
                                                     {"N", "6"},
                                                     {"w", "0.5"},
                                                     {"kicks", "30"},
                                                     {"realizations", "6"},
                                                     {"seed", "9"},
                                                     {"preset", "k6-chaotic"},
                                                     {"q", "3"}});
  const auto out = run_entropy_time(raw);
  REQUIRE(out.table.rows.size() == 31);
  REQUIRE(out.table.rows[0][1] == Approx(0.0).margin(1e-12)); // product state
  double late = 0.0;
  for (std::size_t i = 25; i < 31; ++i) late = std::max(late, out.table.rows[i][1]);
  REQUIRE(late > 0.5); // q=3 cut approaches the random-state value
  bool any_err = false;
  for (const auto& row : out.table.rows) any_err = any_err || row[2] > 0.0;
  REQUIRE(any_err);
}

TEST_CASE("entropy run demands a seed only when disorder is present") {
  RawConfig raw = make_config("entropy-time", {{"k", "1"},
                                               {"N", "6"},
                                               {"w", "0.1"},
                                               {"kicks", "5"},
                                               {"realizations", "2"},
                                               {"state", "2.25 1.1"}});
  REQUIRE_THROWS_AS(run_entropy_time(raw), ConfigError);
  raw.values["seed"] = "5";
  REQUIRE_NOTHROW(run_entropy_time(raw));
}

TEST_CASE("revival scan emits rescaled time columns") {
  const RawConfig raw = make_config("revival-scan", {{"k", "1"},
                                                     {"N_list", "16, 36"},
                                                     {"kicks", "20"},
                                                     {"state", "2.25 1.1"}});
  const auto out = run_revival_scan(raw);
  REQUIRE(out.table.rows.size() == 2 * 21);
  const auto& row = out.table.rows[5]; // N=16, n=5
  REQUIRE(row[0] == 16.0);
  REQUIRE(row[1] == 5.0);
  REQUIRE(row[2] == Approx(5.0 / 4.0));
  REQUIRE(row[3] == Approx(5.0 / 16.0));
}

TEST_CASE("chi runs: time trace and w scan") {
  const RawConfig time_cfg = make_config("chi-time", {{"k", "6"},
                                                      {"N", "6"},
                                                      {"w", "0"},
                                                      {"kicks", "20"},
                                                      {"state", "2.25 1.1"}});
  const auto chi_t = run_chi_time(time_cfg);
  for (const auto& row : chi_t.table.rows) REQUIRE(row[1] == Approx(1.0).margin(1e-10));

  const RawConfig scan = make_config("chi-vs-w", {{"k", "6"},
                                                  {"N", "6"},
                                                  {"w_list", "0.01, 0.8"},
                                                  {"kicks", "60"},
                                                  {"realizations", "4"},
                                                  {"seed", "21"},
                                                  {"state", "2.25 1.1"}});
  const auto chi_w = run_chi_vs_w(scan);
  REQUIRE(chi_w.table.rows.size() == 2);
  REQUIRE(chi_w.table.rows[0][1] > 0.9);  // tiny disorder stays symmetric
  REQUIRE(chi_w.table.rows[1][1] < 0.35); // strong disorder escapes
}

TEST_CASE("classical compare rejects disorder and tracks the quantum curve") {
  RawConfig raw = make_config("classical-compare", {{"k", "1"},
                                                    {"N", "100"},
                                                    {"kicks", "40"},
                                                    {"points", "4000"},
                                                    {"seed", "3"},
                                                    {"state", "2.25 1.1"}});
  const auto out = run_classical_compare(raw);
  REQUIRE(out.table.rows.size() == 41);
  for (const auto& row : out.table.rows) REQUIRE(std::abs(row[3]) < 0.05);

  raw.values["w"] = "0.1";
  REQUIRE_THROWS_AS(run_classical_compare(raw), ConfigError);
}

TEST_CASE("phase space grid covers the sphere and shows the k=1 islands") {
  const RawConfig raw = make_config("phase-space", {{"k", "1"},
                                                    {"N", "8"},
                                                    {"grid", "8x8"},
                                                    {"kicks", "400"},
                                                    {"state", "0 0"}});
  // 'state' is unused by phase-space; it must be rejected as unknown
  REQUIRE_THROWS_AS(run_phase_space(raw), ConfigError);

  const RawConfig ok = make_config(
      "phase-space", {{"k", "1"}, {"N", "8"}, {"grid", "8x8"}, {"kicks", "400"}});
  const auto out = run_phase_space(ok);
  REQUIRE(out.table.rows.size() == 64);
  // the cell nearest the (pi/2, pi/2) fixed point stays low-entropy
  double fixed_val = 1.0, grid_max = 0.0, best = 1e9;
  for (const auto& row : out.table.rows) {
    const double d =
        std::hypot(row[0] - std::numbers::pi / 2, row[1] - std::numbers::pi / 2);
    if (d < best) {
      best = d;
      fixed_val = row[2];
    }
    grid_max = std::max(grid_max, row[2]);
  }
  REQUIRE(fixed_val < 0.5 * grid_max);
}

TEST_CASE("fit experiment reads a table and recovers parameters") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "kicktop_test";
  fs::create_directories(dir);
  const std::string data_path = (dir / "curve.tsv").string();
  {
    std::ofstream f(data_path);
    f << "# synthetic\nn[kicks]\tS1[1]\n";
    for (int n = 0; n <= 60; n += 2)
      f << n << "\t" << regular_model(n, RegularFit{0.35, 0.25, 100}) << "\n";
  }
  const RawConfig raw = make_config(
      "fit", {{"model", "regular"}, {"data", data_path}, {"N", "100"}, {"guess", "0.5, 0.1"}});
  const auto out = run_fit(raw);
  double s_inf = 0, alpha = 0;
  for (const auto& [k, v] : out.table.metadata) {
    if (k == "fit.S_inf") s_inf = std::stod(v);
    if (k == "fit.alpha") alpha = std::stod(v);
  }
  REQUIRE(s_inf == Approx(0.35).margin(1e-4));
  REQUIRE(alpha == Approx(0.25).margin(1e-4));
  fs::remove_all(dir);
}

TEST_CASE("spacing run on a tiny system produces a normalized histogram") {
  const RawConfig raw = make_config("spacing-stats", {{"k", "0.5"},
                                                      {"p", "4pi/11"},
                                                      {"N", "7"},
                                                      {"w", "8"},
                                                      {"realizations", "2"},
                                                      {"seed", "11"},
                                                      {"bins", "25"}});
  const auto out = run_spacing(raw);
  REQUIRE(out.table.rows.size() == 25);
  double ks_p = -1, ks_c = -1;
  for (const auto& [k, v] : out.table.metadata) {
    if (k == "ks_poisson") ks_p = std::stod(v);
    if (k == "ks_coe") ks_c = std::stod(v);
  }
  REQUIRE(ks_p >= 0.0);
  REQUIRE(ks_c >= 0.0);
  REQUIRE(out.extra.size() == 1);
  REQUIRE(out.extra[0].first == ".density");
  // density integrates to one over (-pi, pi]
  double integral = 0.0;
  for (const auto& row : out.extra[0].second.rows)
    integral += row[1] * 2.0 * std::numbers::pi / out.extra[0].second.rows.size();
  REQUIRE(integral == Approx(1.0).margin(1e-6));
}

TEST_CASE("weak disorder keeps revivals aligned at n/N; strong disorder kills them") {
  // revival dips survive w=0.01 and sit near the same n/N across sizes
  std::vector<double> dip_x;
  for (const char* N : {"10", "12", "14"}) {
    const long n_int = std::stol(N);
    const RawConfig raw = make_config("entropy-time", {{"k", "1"},
                                                       {"N", N},
                                                       {"w", "0.01"},
                                                       {"kicks", std::to_string(4 * n_int)},
                                                       {"realizations", "10"},
                                                       {"seed", "55"},
                                                       {"preset", "k1-regular"}});
    const auto out = run_entropy_time(raw);
    double plateau = 0.0;
    int count = 0;
    double dip = 1e9, where = 0.0;
    for (const auto& row : out.table.rows) {
      const double x = row[0] / double(n_int);
      if (x >= 1.0 && x <= 2.0) {
        plateau += row[1];
        ++count;
      }
      if (x >= 2.0 && row[1] < dip) {
        dip = row[1];
        where = x;
      }
    }
    plateau /= count;
    REQUIRE(plateau - dip > 0.03); // a real revival dip
    dip_x.push_back(where);
  }
  const double spread = *std::max_element(dip_x.begin(), dip_x.end()) -
                        *std::min_element(dip_x.begin(), dip_x.end());
  REQUIRE(spread < 0.15);

  // w=5: no revivals, pinned at the random-state value
  const RawConfig strong = make_config("entropy-time", {{"k", "1"},
                                                        {"N", "14"},
                                                        {"w", "5"},
                                                        {"kicks", "1000"},
                                                        {"realizations", "5"},
                                                        {"seed", "56"},
                                                        {"preset", "k1-regular"}});
  const auto out = run_entropy_time(strong);
  double late = 0.0, late_min = 1e9;
  int count = 0;
  for (const auto& row : out.table.rows)
    if (row[0] >= 100) {
      late += row[1];
      late_min = std::min(late_min, row[1]);
      ++count;
    }
  late /= count;
  REQUIRE(late == Approx(0.5).margin(0.01));
  REQUIRE(late_min > 0.45);
}

TEST_CASE("fitted diffusion constant grows with disorder strength") {
  std::vector<double> fitted_d;
  for (const char* w : {"1", "2", "3"}) {
    const RawConfig raw = make_config("entropy-time", {{"k", "1"},
                                                       {"N", "10"},
                                                       {"w", w},
                                                       {"kicks", "150"},
                                                       {"realizations", "8"},
                                                       {"seed", "606"},
                                                       {"preset", "k1-regular"}});
    const auto out = run_entropy_time(raw);
    FitData data;
    for (const auto& row : out.table.rows) {
      data.n.push_back(row[0]);
      data.s.push_back(row[1]);
    }
    const FitResult fit = fit_noisy(data);
    fitted_d.push_back(fit.params[1]);
  }
  REQUIRE(fitted_d[0] < fitted_d[1]);
  REQUIRE(fitted_d[1] < fitted_d[2]);
}

TEST_CASE("experiment dispatch and unknown kinds") {
  REQUIRE_THROWS_AS(run_experiment(make_config("no-such-kind", {})), ConfigError);
  const RawConfig raw = make_config(
      "entropy-time", {{"k", "1"}, {"N", "6"}, {"kicks", "3"}, {"state", "2.25 1.1"}});
  REQUIRE_NOTHROW(run_experiment(raw));
}

TEST_CASE("capacity guards surface as capacity errors") {
  const RawConfig raw = make_config("deff-vs-w", {{"k", "6"},
                                                  {"N", "15"},
                                                  {"w_list", "0"},
                                                  {"realizations", "1"},
                                                  {"seed", "1"},
                                                  {"state", "2.25 1.1"}});
  REQUIRE_THROWS_AS(run_deff(raw), CapacityError);
}
