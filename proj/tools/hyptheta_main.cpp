// Command line entry point: enumeration censuses, Goepel group
// classification with caching, exact identity batteries, and numeric
// period/theta verification, all emitting one versioned JSON report per
// run.  Exit code 0 iff every check in the run passed.

#include <CLI11.hpp>

#include <hyptheta/goepel.hpp>
#include <hyptheta/report.hpp>
#include <hyptheta/rng.hpp>
#include <hyptheta/theta.hpp>
#include <hyptheta/thomae.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace hyptheta {
namespace {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Closed-form characteristic counts: multiplicity m corresponds to
// partition sides of size g+1-2m, halving the balanced case.
long long expected_multiplicity_count(int g, int m) {
  int side = g + 1 - 2 * m;
  if (side < 0) return 0;
  long long c = binomial(2 * g + 2, side);
  return side == g + 1 ? c / 2 : c;
}

std::string resolve_cache_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("HYPTHETA_CACHE_DIR"); env && *env) return env;
  return ".hyptheta-cache";
}

std::vector<GoepelGroup> load_groups(int g, int r, const std::string& cache_dir, bool use_cache) {
  if (!use_cache) return enumerate_groups(g, r);
  std::filesystem::path dir(cache_dir);
  std::filesystem::path file = dir / ("goepel-g" + std::to_string(g) + "-r" + std::to_string(r) +
                                      ".cache");
  if (auto cached = read_group_cache(file.string(), g, r)) return std::move(*cached);
  std::vector<GoepelGroup> groups = enumerate_groups(g, r);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (!ec) write_group_cache(file.string(), groups);
  return groups;
}

// Roots may be given inline ("0,1,2,3" with entries p/q or decimal) or
// as a path to a file with one value per line.
std::vector<double> parse_roots(const std::string& spec) {
  std::string text = spec;
  if (std::filesystem::exists(spec)) {
    std::ifstream in(spec);
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  for (char& ch : text)
    if (ch == ',' || ch == '\n' || ch == '\t') ch = ' ';
  std::vector<double> roots;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    std::size_t slash = tok.find('/');
    if (slash != std::string::npos) {
      double num = std::stod(tok.substr(0, slash));
      double den = std::stod(tok.substr(slash + 1));
      if (den == 0) throw std::invalid_argument("zero denominator in root " + tok);
      roots.push_back(num / den);
    } else {
      roots.push_back(std::stod(tok));
    }
  }
  return roots;
}

std::vector<double> default_curve(int g) {
  std::vector<double> roots;
  for (int i = 0; i <= 2 * g + 1; ++i) roots.push_back(static_cast<double>(i));
  return roots;
}

// ---------------------------------------------------------------------------
// census

void run_census(RunReport& rep, int g) {
  ParityCensus parity = parity_census(g);
  rep.add_exact("census/parity", {{"genus", g}},
                Json{{"even", (1ll << (g - 1)) * ((1ll << g) + 1)},
                     {"odd", (1ll << (g - 1)) * ((1ll << g) - 1)}},
                Json{{"even", parity.even}, {"odd", parity.odd}});
  Json expected = Json::object(), observed = Json::object();
  for (auto& [m, count] : multiplicity_census(g)) {
    observed["m" + std::to_string(m)] = count;
    expected["m" + std::to_string(m)] = expected_multiplicity_count(g, m);
  }
  rep.add_exact("census/multiplicity", {{"genus", g}}, expected, observed);
}

// ---------------------------------------------------------------------------
// goepel

void run_goepel(RunReport& rep, int g, int r, const std::string& cache_dir, bool use_cache) {
  std::vector<GoepelGroup> groups = load_groups(g, r, cache_dir, use_cache);
  rep.add_exact("goepel/group-count", {{"genus", g}, {"rank", r}}, isotropic_subgroup_count(g, r),
                static_cast<long long>(groups.size()));
  WhollyEvenClassification cls = classify_wholly_even(g, r, groups);
  rep.add_flag("goepel/coset-census", {{"genus", g}, {"rank", r}}, cls.census_ok);

  if (g == 3 && r == 3) {
    rep.add_exact("goepel/wholly-even-split", {{"genus", g}, {"rank", r}},
                  Json{{"plain", 105}, {"singular", 30}},
                  Json{{"plain", static_cast<long long>(cls.plain.size())},
                       {"singular", static_cast<long long>(cls.singular.size())}});
    const RankGStructureReport& st = cached_rank_g_report(3);
    rep.add_flag("goepel/structure", {{"genus", g}, {"rank", r}}, st.ok);
    rep.add_exact("goepel/construction-grid", {{"genus", g}, {"rank", r}},
                  Json{{"constructions", 210}, {"distinct", 30}, {"hits", 7}},
                  Json{{"constructions", st.constructions},
                       {"distinct", st.distinct_constructed},
                       {"hits", st.min_hits == st.max_hits ? st.min_hits : -1}});
  } else if (g == 3 && r == 2) {
    rep.add_exact("goepel/triple-split", {{"genus", g}, {"rank", r}},
                  Json{{"plain", 210}, {"one_singular", 105}},
                  Json{{"plain", cls.plain_groups}, {"one_singular", cls.one_singular_groups}});
    const Rank2StructureReport& st = cached_rank2_report();
    rep.add_flag("goepel/structure", {{"genus", g}, {"rank", r}}, st.ok);
  } else if (g == 4 && r == 4) {
    long long two_singular = 0, one_singular = 0;
    for (auto& [profile, count] : cls.profile_census) {
      int singulars = 0;
      for (auto& [m, mult_count] : profile)
        if (m >= 2) singulars += mult_count;
      if (singulars == 1) one_singular += count;
      if (singulars == 2) two_singular += count;
    }
    rep.add_exact("goepel/wholly-even-split", {{"genus", g}, {"rank", r}},
                  Json{{"plain", 945}, {"two_singular", 1350}, {"one_singular", 0}},
                  Json{{"plain", static_cast<long long>(cls.plain.size())},
                       {"two_singular", two_singular},
                       {"one_singular", one_singular}});
    const RankGStructureReport& st = cached_rank_g_report(4);
    rep.add_flag("goepel/structure", {{"genus", g}, {"rank", r}}, st.ok);
    long long per_pair = st.kappa_census.empty() ? -1 : st.kappa_census.begin()->second;
    for (auto& [pair, count] : st.kappa_census)
      if (count != per_pair) per_pair = -1;
    rep.add_exact("goepel/kappa-census", {{"genus", g}, {"rank", r}},
                  Json{{"pairs", 45}, {"systems_per_pair", 30}},
                  Json{{"pairs", static_cast<long long>(st.kappa_census.size())},
                       {"systems_per_pair", per_pair}});
  } else {
    rep.add_flag("goepel/coset-census-only", {{"genus", g}, {"rank", r}}, cls.census_ok);
  }
}

// ---------------------------------------------------------------------------
// identities

void run_identities(RunReport& rep, int g, int trials, std::uint64_t seed) {
  SplitMix64 rng(seed);
  for (int trial = 0; trial < trials; ++trial) {
    RootSystem roots = random_integer_roots(g, rng);
    Json root_list = Json::array();
    for (const Rat& e : roots.e) root_list.push_back(e.get_str());
    for (const std::string& name : identity_names(g)) {
      IdentityReport ir = verify_identity(name, roots);
      rep.add_exact("identity/" + name,
                    {{"genus", g}, {"trial", trial}, {"roots", root_list}},
                    Json{{"pass", true}, {"sign", 1}},
                    Json{{"pass", ir.pass && ir.exponents_match}, {"sign", ir.sign}})
          .params["cases"] = ir.cases;
    }
  }
  if (g == 3) {
    RootSystem roots = random_integer_roots(3, rng);
    I1Properties props = check_I1_properties(roots, rng);
    rep.add_exact("identity/I1-properties", {{"genus", g}},
                  Json{{"translation", true},
                       {"homogeneity", true},
                       {"moebius", true},
                       {"witnesses_agree", true},
                       {"asymmetric", true}},
                  Json{{"translation", props.translation},
                       {"homogeneity", props.homogeneity},
                       {"moebius", props.moebius},
                       {"witnesses_agree", props.witnesses_agree},
                       {"asymmetric", props.asymmetric}});
  }
}

// ---------------------------------------------------------------------------
// numeric

bool check_selected(const std::vector<std::string>& checks, const std::string& name) {
  for (const std::string& c : checks)
    if (c == "all" || c == name) return true;
  return false;
}

void run_numeric(RunReport& rep, const std::vector<double>& roots,
                 const std::vector<std::string>& checks, int digits) {
  double series_tol = std::pow(10.0, -digits);
  series_tol = std::min(1e-7, std::max(1e-15, series_tol));
  PeriodData pd = compute_periods(roots, 1e-12);
  int g = pd.g;
  Json base{{"genus", g}};

  if (check_selected(checks, "periods")) {
    rep.add_residual("numeric/tau-symmetry", base, pd.tau_symmetry_residual, 1e-8);
    double scale = (pd.omega.transpose() * pd.omega_prime).cwiseAbs().maxCoeff();
    rep.add_residual("numeric/bilinear-relation", base, pd.bilinear_residual / scale, 1e-8);
    rep.add_flag("numeric/im-tau-positive", Json{{"genus", g}, {"lambda_min", pd.min_im_eigenvalue}},
                 pd.min_im_eigenvalue > 0);
    rep.add_residual("numeric/quadrature-doubling", base, pd.quadrature_error, 1e-10);
    AbelCertificate cert = abel_certificate(pd);
    rep.add_flag("numeric/branch-point-parities", Json{{"genus", g}, {"mismatches", cert.mismatches}},
                 cert.pass);
    rep.add_residual("numeric/branch-point-residual", base, cert.max_residual, 1e-6);
  }

  if (g == 1 && check_selected(checks, "agm")) {
    Complex tau_agm = genus1_tau_agm(pd.roots);
    rep.add_residual("numeric/agm-cross-check", base, std::abs(pd.tau(0, 0) - tau_agm), 1e-10);
  }

  if (check_selected(checks, "thomae")) {
    std::vector<ThomaeOrderCheck> orders = verify_thomae(pd, series_tol);
    for (const ThomaeOrderCheck& chk : orders) {
      if (chk.cases == 0) continue;
      Json params{{"genus", g},
                  {"order", chk.order},
                  {"cases", chk.cases},
                  {"eps", {chk.eps_first.real(), chk.eps_first.imag()}}};
      rep.add_residual("numeric/thomae-order" + std::to_string(chk.order) + "-residual", params,
                       chk.max_rel_residual, 1e-6);
      rep.add_residual("numeric/thomae-order" + std::to_string(chk.order) + "-unimodular", params,
                       chk.max_abs_dev, 1e-6);
      rep.add_residual("numeric/thomae-order" + std::to_string(chk.order) + "-eighth-root", params,
                       chk.max_eighth_dev, 1e-6);
      rep.add_residual("numeric/thomae-order" + std::to_string(chk.order) + "-constancy", params,
                       chk.max_spread, 1e-6);
    }
  }

  if (g >= 3 && check_selected(checks, "vanishing")) {
    VanishingScan scan = scan_even_constants(pd.tau, 1e-6, series_tol);
    rep.add_exact("numeric/vanishing-count",
                  Json{{"genus", g},
                       {"threshold", scan.threshold},
                       {"largest_vanishing", scan.largest_vanishing},
                       {"smallest_surviving", scan.smallest_surviving}},
                  g == 3 ? 1 : 10, scan.count);
  }

  if (check_selected(checks, "heat")) {
    Char even = char_zero(g);
    rep.add_residual("numeric/heat-equation", base, heat_equation_residual(pd.tau, even), 1e-6);
  }

  if (g >= 2 && g <= 3 && check_selected(checks, "transform")) {
    std::vector<Symplectic> gammas{sp_exchange(g), sp_mul(sp_exchange(g), sp_shear(g, 1, g))};
    double worst_single = 0;
    for (const Symplectic& s : gammas)
      for (std::uint32_t code = 0; code < (1u << (2 * g)); ++code) {
        Char c = char_from_code(g, code);
        if (is_odd(c) || multiplicity(c) != 0) continue;
        worst_single = std::max(
            worst_single, check_monomial_transform(pd.tau, s, {c}, "single", series_tol).dev8);
      }
    rep.add_residual("numeric/transform-degree1", base, worst_single, 1e-6);
    if (g == 3) {
      std::vector<Char> plains;
      for (const Char& c : cached_rank_g_report(3).witnesses.front().elements)
        if (multiplicity(c) == 0) plains.push_back(c);
      std::vector<Char> all_plain;
      for (std::uint32_t code = 0; code < 64; ++code) {
        Char c = char_from_code(3, code);
        if (!is_odd(c) && multiplicity(c) == 0) all_plain.push_back(c);
      }
      double worst_grad = 0, worst_mono = 0;
      for (const Symplectic& s : gammas) {
        worst_mono = std::max(worst_mono,
                              check_monomial_transform(pd.tau, s,
                                                       {all_plain.begin(), all_plain.begin() + 8},
                                                       "plain8", series_tol)
                                  .dev8);
        for (const TransformCheck& chk :
             {check_gradient_transform(pd.tau, s, k_char(3), {}, "singular1", series_tol),
              check_gradient_transform(pd.tau, s, k_char(3), plains, "system8", series_tol),
              check_gradient_transform(pd.tau, s, k_char(3), all_plain, "chi18", series_tol)})
          worst_grad = std::max(worst_grad, std::max(chk.dev8, chk.residual));
      }
      rep.add_residual("numeric/transform-degree8", base, worst_mono, 1e-6);
      rep.add_residual("numeric/transform-gradient", base, worst_grad, 1e-6);
    }
  }

  if (g == 3 && check_selected(checks, "chi")) {
    ChiFormCheck chk = chi_forms_genus3(pd, series_tol);
    rep.add_residual("numeric/chi18-display", Json{{"genus", g}, {"variants", chk.variants}},
                     chk.chi18_rel, 1e-6);
    rep.add_residual("numeric/chi4-display", base, chk.chi4_rho_rel, 1e-6);
    rep.add_residual("numeric/chi4-mutual", base, chk.chi4_mutual_rel, 1e-8);
  }
}

}  // namespace
}  // namespace hyptheta

int main(int argc, char** argv) {
  using namespace hyptheta;
  CLI::App app{"Theta characteristic combinatorics and hyperelliptic verification"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_path, cache_dir_flag, roots_spec, checks_spec = "all";
  bool timing = false, no_cache = false;
  int genus = 3, rank = 3, trials = 3, digits = 12;
  std::uint64_t seed = 1;
  app.add_option("--out", out_path, "write the JSON report to this path (default stdout)");
  app.add_flag("--timing", timing, "include wall clock milliseconds in the report");

  CLI::App* census = app.add_subcommand("census", "characteristic counts by parity/multiplicity");
  census->add_option("--genus", genus, "genus, 1..4")->required()->check(CLI::Range(1, 4));

  CLI::App* goepel = app.add_subcommand("goepel", "Goepel group enumeration and classification");
  goepel->add_option("--genus", genus, "genus, 1..4")->required()->check(CLI::Range(1, 4));
  goepel->add_option("--rank", rank, "subgroup rank")->required()->check(CLI::Range(1, 4));
  goepel->add_flag("--no-cache", no_cache, "skip the enumeration cache");
  goepel->add_option("--cache-dir", cache_dir_flag, "cache directory");

  CLI::App* identities = app.add_subcommand("identities", "exact polynomial identity battery");
  identities->add_option("--genus", genus, "genus, 3 or 4")->required()->check(CLI::Range(3, 4));
  identities->add_option("--trials", trials, "random root tuples per identity")
      ->check(CLI::PositiveNumber);
  identities->add_option("--seed", seed, "random seed");

  CLI::App* numeric = app.add_subcommand("numeric", "period matrix and theta series checks");
  numeric->add_option("--roots", roots_spec, "inline list ('0,1,2/1,...') or file path");
  numeric->add_option("--genus", genus, "genus for the default curve when --roots is omitted")
      ->check(CLI::Range(1, 4));
  numeric->add_option("--checks", checks_spec,
                      "comma list of periods,agm,thomae,vanishing,heat,transform,chi or all");
  numeric->add_option("--digits", digits, "series precision target, >= 10")
      ->check(CLI::Range(10, 15));

  CLI::App* report = app.add_subcommand("report", "full verification battery");
  report->add_option("--trials", trials, "identity trials")->check(CLI::PositiveNumber);
  report->add_option("--seed", seed, "identity seed");
  report->add_flag("--no-cache", no_cache, "skip the enumeration cache");
  report->add_option("--cache-dir", cache_dir_flag, "cache directory");

  CLI11_PARSE(app, argc, argv);

  auto started = std::chrono::steady_clock::now();
  RunReport rep;
  try {
    if (census->parsed()) {
      rep.command = "census";
      rep.config = {{"genus", genus}};
      run_census(rep, genus);
    } else if (goepel->parsed()) {
      rep.command = "goepel";
      std::string cache_dir = resolve_cache_dir(cache_dir_flag);
      rep.config = {{"genus", genus}, {"rank", rank}, {"cache", !no_cache},
                    {"cache_dir", cache_dir}};
      run_goepel(rep, genus, rank, cache_dir, !no_cache);
    } else if (identities->parsed()) {
      rep.command = "identities";
      rep.config = {{"genus", genus}, {"trials", trials}, {"seed", seed}};
      run_identities(rep, genus, trials, seed);
    } else if (numeric->parsed()) {
      std::vector<double> roots =
          roots_spec.empty() ? default_curve(genus) : parse_roots(roots_spec);
      std::vector<std::string> checks;
      std::string token;
      std::istringstream cs(checks_spec);
      while (std::getline(cs, token, ','))
        if (!token.empty()) checks.push_back(token);
      rep.command = "numeric";
      rep.config = {{"roots", roots}, {"checks", checks}, {"digits", digits}};
      run_numeric(rep, roots, checks, digits);
    } else if (report->parsed()) {
      rep.command = "report";
      std::string cache_dir = resolve_cache_dir(cache_dir_flag);
      rep.config = {{"trials", trials}, {"seed", seed}, {"cache", !no_cache},
                    {"cache_dir", cache_dir}};
      for (int g = 1; g <= 4; ++g) run_census(rep, g);
      run_goepel(rep, 3, 3, cache_dir, !no_cache);
      run_goepel(rep, 3, 2, cache_dir, !no_cache);
      run_goepel(rep, 4, 4, cache_dir, !no_cache);
      run_identities(rep, 3, trials, seed);
      run_identities(rep, 4, trials, seed);
      for (int g = 1; g <= 4; ++g) run_numeric(rep, default_curve(g), {"all"}, 12);
    }
  } catch (const std::exception& ex) {
    rep.add_flag("run/error", {{"what", ex.what()}}, false);
  }
  if (timing) {
    auto elapsed = std::chrono::steady_clock::now() - started;
    rep.wall_ms = std::chrono::duration<double, std::milli>(elapsed).count();
  }
  rep.write(out_path);
  return rep.pass() ? 0 : 1;
}
