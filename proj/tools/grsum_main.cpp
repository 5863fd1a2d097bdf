// grsum: generalized Riemann sums over arithmetic point sets, primitive
// Pythagorean triples, and cut-and-project quasicrystals.
//
// Exit codes: 0 = success (and every numeric check passed its tolerance),
// 2 = a check missed its tolerance, 1 = usage or input error.  All float
// output uses 12 significant digits; runs are byte-identical for identical
// configurations (including --seed).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "grsum/arith.hpp"
#include "grsum/core.hpp"
#include "grsum/fourier.hpp"
#include "grsum/pythagoras.hpp"
#include "grsum/scheme_io.hpp"

using namespace grsum;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct Cell {
  std::string text;
  nlohmann::json value;
};

Cell cell(double v) { return {fmt(v), v}; }
Cell cell(long long v) { return {std::to_string(v), v}; }
Cell cell(int v) { return {std::to_string(v), v}; }
Cell cell(const std::string& s) { return {s, s}; }
Cell cell(bool b) { return {b ? "true" : "false", b}; }

struct RunOutput {
  std::string subcommand;
  std::map<std::string, std::string> config;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::json summary = nlohmann::json::object();
  bool pass = true;

  void add_row(std::vector<Cell> r) { rows.push_back(std::move(r)); }

  void write(const std::string& format, std::ostream& os) const {
    if (format == "json") {
      nlohmann::json j;
      j["tool"] = "grsum";
      j["subcommand"] = subcommand;
      j["config"] = config;
      j["columns"] = columns;
      nlohmann::json jr = nlohmann::json::array();
      for (const auto& row : rows) {
        nlohmann::json one = nlohmann::json::array();
        for (const auto& c : row) one.push_back(c.value);
        jr.push_back(std::move(one));
      }
      j["rows"] = std::move(jr);
      j["summary"] = summary;
      j["pass"] = pass;
      os << j.dump(2) << "\n";
      return;
    }
    os << "# tool=grsum\n# subcommand=" << subcommand << "\n";
    for (const auto& [k, v] : config) os << "# " << k << "=" << v << "\n";
    for (auto it = summary.begin(); it != summary.end(); ++it) {
      os << "# summary." << it.key() << "=";
      if (it->is_string())
        os << it->get<std::string>();
      else
        os << it->dump();
      os << "\n";
    }
    os << "# pass=" << (pass ? "true" : "false") << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
      os << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        os << row[i].text << (i + 1 < row.size() ? "," : "\n");
    }
  }
};

int finish(const RunOutput& out, const std::string& format, const std::string& output_path,
           bool is_check) {
  if (output_path.empty()) {
    out.write(format, std::cout);
  } else {
    std::ofstream f(output_path);
    if (!f) {
      std::cerr << "error: cannot open output file " << output_path << "\n";
      return 1;
    }
    out.write(format, f);
  }
  return (is_check && !out.pass) ? 2 : 0;
}

std::vector<RationalCoord> parse_rational_vector(const std::string& s, int expect_dim) {
  std::vector<RationalCoord> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    long long num = 0, den = 1;
    const auto slash = item.find('/');
    if (slash == std::string::npos) {
      num = std::stoll(item);
    } else {
      num = std::stoll(item.substr(0, slash));
      den = std::stoll(item.substr(slash + 1));
    }
    out.push_back(reduce_fraction(num, den));
  }
  if (expect_dim > 0 && static_cast<int>(out.size()) != expect_dim)
    throw CLI::ValidationError("rational vector must have " + std::to_string(expect_dim) +
                               " components");
  return out;
}

std::unique_ptr<PointSource> make_set(const std::string& name) {
  if (name == "z2") return std::make_unique<IntegerLattice>(2);
  if (name == "z3") return std::make_unique<IntegerLattice>(3);
  if (name == "prim2") return std::make_unique<PrimitiveLattice>(PrimitiveSetKind::prim, 2);
  if (name == "prim3") return std::make_unique<PrimitiveLattice>(PrimitiveSetKind::prim, 3);
  if (name == "primstar2")
    return std::make_unique<PrimitiveLattice>(PrimitiveSetKind::prim_star, 2);
  if (name == "oddprim2")
    return std::make_unique<PrimitiveLattice>(PrimitiveSetKind::odd_prim, 2);
  if (name == "fibonacci")
    return std::make_unique<ModelSetSource>(CutProjectScheme::fibonacci());
  if (name.rfind("scheme:", 0) == 0)
    return std::make_unique<ModelSetSource>(load_scheme(name.substr(7)));
  throw CLI::ValidationError("unknown --set " + name);
}

double known_density(const std::string& name, const PointSource& src) {
  if (name == "z2" || name == "z3") return 1.0;
  if (name == "prim2") return 1.0 / zeta(2, 1e-12);
  if (name == "prim3") return 1.0 / zeta(3, 1e-12);
  if (name == "primstar2") return 4.0 / (std::numbers::pi * std::numbers::pi);
  if (name == "oddprim2") return 2.0 / (std::numbers::pi * std::numbers::pi);
  const auto* ms = dynamic_cast<const ModelSetSource*>(&src);
  if (ms) return ms->scheme().density();
  return std::numeric_limits<double>::quiet_NaN();
}

CutProjectScheme scheme_by_name(const std::string& name) {
  if (name == "fibonacci") return CutProjectScheme::fibonacci();
  return load_scheme(name);
}

std::string env_threads() {
  const char* v = std::getenv("GRSUM_THREADS");
  return v ? v : "default";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized Riemann sums, primitive lattice points, Pythagorean triples, "
               "and cut-and-project model sets"};
  app.require_subcommand(1);

  std::string format = "csv", output_path;
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--output", output_path, "write output to this file instead of stdout");

  // ---- density ----------------------------------------------------------
  auto* cmd_density = app.add_subcommand("density", "constant-density estimate of a point set");
  std::string den_set = "prim2", den_f = "ball";
  double den_eps_max = 1.0 / 16, den_eps_min = 1.0 / 4096, den_tol = 0.01;
  cmd_density->add_option("--set", den_set,
                          "z2|z3|prim2|prim3|primstar2|oddprim2|fibonacci|scheme:<file>")
      ->capture_default_str();
  cmd_density->add_option("--f", den_f, "test function: ball or box")
      ->check(CLI::IsMember({"ball", "box"}))
      ->capture_default_str();
  cmd_density->add_option("--eps-max", den_eps_max, "largest epsilon")->capture_default_str();
  cmd_density->add_option("--eps-min", den_eps_min, "smallest epsilon")->capture_default_str();
  cmd_density->add_option("--tol", den_tol, "relative tolerance against the known density")
      ->capture_default_str();

  // ---- coprime ----------------------------------------------------------
  auto* cmd_coprime = app.add_subcommand("coprime", "fraction of coprime pairs up to N");
  long long cop_n = 10000;
  double cop_tol = 0.005;
  cmd_coprime->add_option("--n", cop_n, "range bound N")->capture_default_str();
  cmd_coprime->add_option("--tol", cop_tol, "relative tolerance against 6/pi^2")
      ->capture_default_str();

  // ---- ppt --------------------------------------------------------------
  auto* cmd_ppt = app.add_subcommand("ppt", "enumerate primitive Pythagorean triples");
  long long ppt_zmax = 125;
  std::string ppt_fixture;
  cmd_ppt->add_option("--zmax", ppt_zmax, "largest hypotenuse")->capture_default_str();
  cmd_ppt->add_option("--fixture", ppt_fixture, "CSV of rows N,x,y,z to verify against");

  // ---- lehmer -----------------------------------------------------------
  auto* cmd_lehmer = app.add_subcommand("lehmer", "hypotenuse ratio z_N / N");
  long long leh_n = 100;
  double leh_expect = 0.0, leh_tol = 0.0;
  cmd_lehmer->add_option("--n", leh_n, "index N")->capture_default_str();
  auto* leh_expect_opt = cmd_lehmer->add_option("--expect", leh_expect, "expected ratio");
  cmd_lehmer->add_option("--tol", leh_tol, "absolute tolerance for --expect")
      ->capture_default_str();

  // ---- sector -----------------------------------------------------------
  auto* cmd_sector = app.add_subcommand("sector", "count coprime odd-difference pairs in a sector");
  long long sec_n = 1000000;
  double sec_alpha = 0.0, sec_beta = 1.0, sec_tol = 0.02;
  cmd_sector->add_option("--n", sec_n, "norm bound m^2+n^2 <= N")->capture_default_str();
  cmd_sector->add_option("--alpha", sec_alpha, "lower slope")->capture_default_str();
  cmd_sector->add_option("--beta", sec_beta, "upper slope")->capture_default_str();
  cmd_sector->add_option("--tol", sec_tol, "relative tolerance against the sector limit")
      ->capture_default_str();

  // ---- equidist ---------------------------------------------------------
  auto* cmd_eq = app.add_subcommand("equidist", "rational circle points in an arc");
  double eq_t1 = 0.0, eq_t2 = std::numbers::pi / 4;
  long long eq_hmax = 100000;
  double eq_tol = 0.02;
  cmd_eq->add_option("--theta1", eq_t1, "arc start")->capture_default_str();
  cmd_eq->add_option("--theta2", eq_t2, "arc end")->capture_default_str();
  cmd_eq->add_option("--hmax", eq_hmax, "height bound")->capture_default_str();
  cmd_eq->add_option("--tol", eq_tol, "relative tolerance")->capture_default_str();

  // ---- fermat -----------------------------------------------------------
  auto* cmd_fermat = app.add_subcommand("fermat", "hypotenuse-multiplicity characterization");
  long long fer_zmax = 10000;
  cmd_fermat->add_option("--zmax", fer_zmax, "largest hypotenuse to verify")
      ->capture_default_str();

  // ---- iep --------------------------------------------------------------
  auto* cmd_iep = app.add_subcommand("iep", "exact inclusion-exclusion identity checks");
  long long iep_count = 100, iep_seed = 1, iep_rmax = 20;
  cmd_iep->add_option("--count", iep_count, "number of randomized functions")
      ->capture_default_str();
  cmd_iep->add_option("--seed", iep_seed, "random seed")->capture_default_str();
  cmd_iep->add_option("--radius-max", iep_rmax, "max support radius")->capture_default_str();

  // ---- derange ----------------------------------------------------------
  auto* cmd_der = app.add_subcommand("derange", "derangement count and 1/e bound");
  int der_n = 12;
  cmd_der->add_option("--n", der_n, "permutation size")->capture_default_str();

  // ---- poisson ----------------------------------------------------------
  auto* cmd_poi = app.add_subcommand("poisson", "Gaussian Poisson summation check on Z^d");
  int poi_d = 1;
  double poi_t = 1.0, poi_tol = 1e-10, poi_rdir = 0.0, poi_rdual = 0.0;
  std::string poi_eta;
  cmd_poi->add_option("--dim", poi_d, "lattice dimension")->capture_default_str();
  cmd_poi->add_option("--t", poi_t, "Gaussian parameter of e^{-pi t |x|^2}")
      ->capture_default_str();
  cmd_poi->add_option("--eta", poi_eta, "rational twist, e.g. 1/3,0");
  cmd_poi->add_option("--r-direct", poi_rdir, "direct-side truncation radius (0 = auto)")
      ->capture_default_str();
  cmd_poi->add_option("--r-dual", poi_rdual, "dual-side truncation radius (0 = auto)")
      ->capture_default_str();
  cmd_poi->add_option("--tol", poi_tol, "absolute tolerance on |lhs - rhs|")
      ->capture_default_str();

  // ---- modelset ---------------------------------------------------------
  auto* cmd_ms = app.add_subcommand("modelset", "enumerate a cut-and-project model set");
  std::string ms_scheme = "fibonacci";
  double ms_radius = 50.0, ms_gap_ratio = (1.0 + std::sqrt(5.0)) / 2.0, ms_gap_tol = 1e-9;
  bool ms_check_gaps = false;
  cmd_ms->add_option("--scheme", ms_scheme, "fibonacci or a scheme JSON file")
      ->capture_default_str();
  cmd_ms->add_option("--radius", ms_radius, "physical enumeration radius")->capture_default_str();
  cmd_ms->add_flag("--check-gaps", ms_check_gaps,
                   "verify the gap set has two lengths with the expected ratio (d = 1)");
  cmd_ms->add_option("--expected-gap-ratio", ms_gap_ratio, "expected long/short gap ratio")
      ->capture_default_str();
  cmd_ms->add_option("--gap-tol", ms_gap_tol, "tolerance on the gap ratio")
      ->capture_default_str();

  // ---- spectrum ---------------------------------------------------------
  auto* cmd_spec = app.add_subcommand("spectrum", "diffraction amplitudes of a model set");
  std::string spec_scheme = "fibonacci";
  double spec_cutoff = 8.0, spec_floor = 1e-3;
  cmd_spec->add_option("--scheme", spec_scheme, "fibonacci or a scheme JSON file")
      ->capture_default_str();
  cmd_spec->add_option("--cutoff", spec_cutoff, "physical frequency cutoff")
      ->capture_default_str();
  cmd_spec->add_option("--floor", spec_floor, "amplitude floor")->capture_default_str();

  // ---- primqc -----------------------------------------------------------
  auto* cmd_pq = app.add_subcommand(
      "primqc", "near-quasicrystal expansion of the primitive lattice points");
  long long pq_n = 8;
  double pq_radius = 6.0, pq_rel_tol = 0.01;
  std::string pq_center = "0,0", pq_cutoffs = "4,8,16,32";
  bool pq_export = false;
  double pq_export_cutoff = 2.0;
  cmd_pq->add_option("--n", pq_n, "Mobius truncation level N")->capture_default_str();
  cmd_pq->add_option("--bump-radius", pq_radius, "test bump radius")->capture_default_str();
  cmd_pq->add_option("--center", pq_center, "bump center x,y")->capture_default_str();
  cmd_pq->add_option("--cutoffs", pq_cutoffs, "comma list of frequency cutoffs")
      ->capture_default_str();
  cmd_pq->add_option("--rel-tol", pq_rel_tol, "final |err|/|lhs| tolerance")
      ->capture_default_str();
  cmd_pq->add_flag("--export", pq_export, "export Lambda_N amplitudes instead of the check");
  cmd_pq->add_option("--export-cutoff", pq_export_cutoff, "frequency cutoff for --export")
      ->capture_default_str();

  // ---- twisted ----------------------------------------------------------
  auto* cmd_tw = app.add_subcommand("twisted", "twisted density of the primitive lattice points");
  std::string tw_eta = "1/2,0";
  double tw_eps_max = 1.0 / 16, tw_eps_min = 1.0 / 1024, tw_tol = 0.03;
  cmd_tw->add_option("--eta", tw_eta, "rational twist vector")->capture_default_str();
  cmd_tw->add_option("--eps-max", tw_eps_max, "largest epsilon")->capture_default_str();
  cmd_tw->add_option("--eps-min", tw_eps_min, "smallest epsilon")->capture_default_str();
  cmd_tw->add_option("--tol", tw_tol, "relative tolerance against a(eta)")
      ->capture_default_str();

  for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; })) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    RunOutput out;
    out.config["format"] = format;
    out.config["threads"] = env_threads();
    bool is_check = false;

    if (cmd_density->parsed()) {
      out.subcommand = "density";
      is_check = true;
      auto src = make_set(den_set);
      const int d = src->dimension();
      TestFunction f = den_f == "ball"
                           ? TestFunction::ball_indicator(std::vector<double>(d, 0.0), 1.0)
                           : TestFunction::box_indicator(std::vector<double>(d, 0.0),
                                                         std::vector<double>(d, 1.0));
      auto est = estimate_density(f, *src, default_eps_schedule(den_eps_max, den_eps_min));
      out.config["set"] = den_set;
      out.config["f"] = den_f;
      out.config["eps_max"] = fmt(den_eps_max);
      out.config["eps_min"] = fmt(den_eps_min);
      out.config["tol"] = fmt(den_tol);
      out.columns = {"epsilon", "sum_re", "sum_im", "density_re", "density_im"};
      for (std::size_t i = 0; i < est.epsilons.size(); ++i)
        out.add_row({cell(est.epsilons[i]), cell(est.scaled_sums[i].real()),
                     cell(est.scaled_sums[i].imag()), cell(est.density_samples[i].real()),
                     cell(est.density_samples[i].imag())});
      const double target = known_density(den_set, *src);
      const double got = est.extrapolated.real();
      const double rel = std::abs(got - target) / std::abs(target);
      out.summary["integral"] = est.integral;
      out.summary["extrapolated_re"] = got;
      out.summary["extrapolated_im"] = est.extrapolated.imag();
      out.summary["error_estimate"] = est.error_estimate;
      out.summary["target"] = target;
      out.summary["rel_error"] = rel;
      out.summary["tol"] = den_tol;
      out.pass = rel <= den_tol;
      if (!out.pass)
        std::cerr << "density check failed: expected " << fmt(target) << " got " << fmt(got)
                  << " tolerance " << fmt(den_tol) << "\n";
    } else if (cmd_coprime->parsed()) {
      out.subcommand = "coprime";
      is_check = true;
      const Rational q = coprime_fraction(cop_n);
      const double got = to_double(q);
      const double target = 6.0 / (std::numbers::pi * std::numbers::pi);
      const double rel = std::abs(got - target) / target;
      out.config["n"] = std::to_string(cop_n);
      out.config["tol"] = fmt(cop_tol);
      out.columns = {"n", "fraction", "value"};
      std::ostringstream frac;
      frac << q;
      out.add_row({cell(cop_n), cell(frac.str()), cell(got)});
      out.summary["value"] = got;
      out.summary["target"] = target;
      out.summary["rel_error"] = rel;
      out.summary["tol"] = cop_tol;
      out.pass = rel <= cop_tol;
      if (!out.pass)
        std::cerr << "coprime check failed: expected " << fmt(target) << " got " << fmt(got)
                  << " tolerance " << fmt(cop_tol) << "\n";
    } else if (cmd_ppt->parsed()) {
      out.subcommand = "ppt";
      const auto list = enumerate_ppt(ppt_zmax);
      out.config["zmax"] = std::to_string(ppt_zmax);
      out.config["fixture"] = ppt_fixture.empty() ? "none" : ppt_fixture;
      out.columns = {"N", "x", "y", "z"};
      for (std::size_t i = 0; i < list.size(); ++i)
        out.add_row({cell(static_cast<long long>(i + 1)), cell(list[i].x), cell(list[i].y),
                     cell(list[i].z)});
      out.summary["count"] = static_cast<long long>(list.size());
      if (!ppt_fixture.empty()) {
        is_check = true;
        std::ifstream in(ppt_fixture);
        if (!in) throw std::runtime_error("cannot open fixture " + ppt_fixture);
        std::string line;
        std::getline(in, line);
        long long mismatches = 0, checked = 0;
        while (std::getline(in, line)) {
          if (line.empty()) continue;
          std::replace(line.begin(), line.end(), ',', ' ');
          std::istringstream ss(line);
          long long N, x, y, z;
          ss >> N >> x >> y >> z;
          ++checked;
          if (N < 1 || N > static_cast<long long>(list.size()) ||
              list[static_cast<std::size_t>(N - 1)].x != x ||
              list[static_cast<std::size_t>(N - 1)].y != y ||
              list[static_cast<std::size_t>(N - 1)].z != z) {
            ++mismatches;
            std::cerr << "fixture mismatch at N=" << N << "\n";
          }
        }
        out.summary["fixture_rows"] = checked;
        out.summary["fixture_mismatches"] = mismatches;
        out.pass = mismatches == 0;
      }
    } else if (cmd_lehmer->parsed()) {
      out.subcommand = "lehmer";
      const double ratio = lehmer_ratio(leh_n);
      out.config["n"] = std::to_string(leh_n);
      out.columns = {"N", "z_N", "ratio"};
      out.add_row({cell(leh_n), cell(static_cast<long long>(std::llround(ratio * leh_n))),
                   cell(ratio)});
      out.summary["ratio"] = ratio;
      out.summary["two_pi"] = 2.0 * std::numbers::pi;
      out.summary["gap_to_two_pi"] = std::abs(ratio - 2.0 * std::numbers::pi);
      if (*leh_expect_opt) {
        is_check = true;
        out.config["expect"] = fmt(leh_expect);
        out.config["tol"] = fmt(leh_tol);
        out.pass = std::abs(ratio - leh_expect) <= leh_tol;
        if (!out.pass)
          std::cerr << "lehmer check failed: expected " << fmt(leh_expect) << " got "
                    << fmt(ratio) << " tolerance " << fmt(leh_tol) << "\n";
      }
    } else if (cmd_sector->parsed()) {
      out.subcommand = "sector";
      is_check = true;
      const long long c = sector_count(sec_n, sec_alpha, sec_beta);
      const double ratio = static_cast<double>(c) / static_cast<double>(sec_n);
      const double limit = 2.0 / (std::numbers::pi * std::numbers::pi) *
                           std::atan((sec_beta - sec_alpha) / (1.0 + sec_alpha * sec_beta));
      const double rel = std::abs(ratio - limit) / limit;
      out.config["n"] = std::to_string(sec_n);
      out.config["alpha"] = fmt(sec_alpha);
      out.config["beta"] = fmt(sec_beta);
      out.config["tol"] = fmt(sec_tol);
      out.columns = {"n", "count", "ratio", "limit"};
      out.add_row({cell(sec_n), cell(c), cell(ratio), cell(limit)});
      out.summary["count"] = c;
      out.summary["ratio"] = ratio;
      out.summary["limit"] = limit;
      out.summary["rel_error"] = rel;
      out.summary["tol"] = sec_tol;
      out.pass = rel <= sec_tol;
      if (!out.pass)
        std::cerr << "sector check failed: expected " << fmt(limit) << " got " << fmt(ratio)
                  << " tolerance " << fmt(sec_tol) << "\n";
    } else if (cmd_eq->parsed()) {
      out.subcommand = "equidist";
      is_check = true;
      const auto st = equidistribution_stat(eq_t1, eq_t2, eq_hmax);
      const double asym = 2.0 * (eq_t2 - eq_t1) / (std::numbers::pi * std::numbers::pi) *
                          static_cast<double>(eq_hmax);
      const double rel_ratio = std::abs(st.ratio - st.expected) / st.expected;
      const double rel_count = std::abs(static_cast<double>(st.count) - asym) / asym;
      out.config["theta1"] = fmt(eq_t1);
      out.config["theta2"] = fmt(eq_t2);
      out.config["hmax"] = std::to_string(eq_hmax);
      out.config["tol"] = fmt(eq_tol);
      out.columns = {"count", "total", "ratio", "expected", "asymptotic_count"};
      out.add_row({cell(st.count), cell(st.total), cell(st.ratio), cell(st.expected), cell(asym)});
      out.summary["count"] = st.count;
      out.summary["ratio"] = st.ratio;
      out.summary["expected"] = st.expected;
      out.summary["rel_error_ratio"] = rel_ratio;
      out.summary["rel_error_count"] = rel_count;
      out.summary["tol"] = eq_tol;
      out.pass = rel_ratio <= eq_tol && rel_count <= eq_tol;
      if (!out.pass)
        std::cerr << "equidist check failed: ratio " << fmt(st.ratio) << " expected "
                  << fmt(st.expected) << " tolerance " << fmt(eq_tol) << "\n";
    } else if (cmd_fermat->parsed()) {
      out.subcommand = "fermat";
      is_check = true;
      const auto fc = fermat_characterization_check(fer_zmax);
      out.config["zmax"] = std::to_string(fer_zmax);
      out.columns = {"z", "multiplicity", "expected"};
      for (const auto& m : fc.mismatches)
        out.add_row({cell(m.z), cell(m.multiplicity), cell(m.expected)});
      out.summary["consistent"] = fc.consistent;
      out.summary["mismatches"] = static_cast<long long>(fc.mismatches.size());
      out.pass = fc.consistent;
      if (!out.pass)
        std::cerr << "fermat check failed: " << fc.mismatches.size() << " mismatches\n";
    } else if (cmd_iep->parsed()) {
      out.subcommand = "iep";
      is_check = true;
      out.config["count"] = std::to_string(iep_count);
      out.config["seed"] = std::to_string(iep_seed);
      out.config["radius_max"] = std::to_string(iep_rmax);
      out.columns = {"case", "identity", "d", "lhs", "rhs", "equal"};
      std::mt19937_64 rng(static_cast<std::uint64_t>(iep_seed));
      std::uniform_int_distribution<long long> radius(1, iep_rmax);
      std::uniform_int_distribution<long long> coordd(-iep_rmax / 2, iep_rmax / 2);
      std::uniform_int_distribution<int> num(1, 7), den(1, 5), kind(0, 1);
      bool all = true;
      auto record = [&](long long idx, const char* name, int d, const IdentityCheck& r) {
        std::ostringstream l, rr;
        l << r.lhs;
        rr << r.rhs;
        out.add_row({cell(idx), cell(std::string(name)), cell(d), cell(l.str()), cell(rr.str()),
                     cell(r.equal)});
        all = all && r.equal;
      };
      for (long long i = 0; i < iep_count; ++i) {
        const Rational scale(num(rng), den(rng));
        LatticeFunction f;
        if (kind(rng) == 0) {
          std::vector<long long> lo(2), hi(2);
          for (int ax = 0; ax < 2; ++ax) {
            const long long a = coordd(rng), b = coordd(rng);
            lo[static_cast<std::size_t>(ax)] = std::min(a, b);
            hi[static_cast<std::size_t>(ax)] = std::max(a, b);
          }
          f = lattice_box_indicator(lo, hi, scale);
        } else {
          f = lattice_ball_indicator({coordd(rng) / 2, coordd(rng) / 2}, radius(rng), scale);
        }
        record(i, "mobius", 2, iep_mobius_identity_check(f, 2));
        record(i, "odd", 2, iep_odd_identity_check(f));
        if (i % 4 == 0) {
          auto f3 = lattice_ball_indicator({0, 0, 0}, std::min<long long>(radius(rng), 10), scale);
          record(i, "mobius", 3, iep_mobius_identity_check(f3, 3));
        }
      }
      out.summary["all_equal"] = all;
      out.pass = all;
      if (!all) std::cerr << "iep check failed: an identity came out unequal\n";
    } else if (cmd_der->parsed()) {
      out.subcommand = "derange";
      is_check = true;
      const auto st = derangement_stats(der_n);
      out.config["n"] = std::to_string(der_n);
      out.columns = {"n", "count", "probability"};
      std::ostringstream cnt, prob;
      cnt << st.count;
      prob << st.probability;
      out.add_row({cell(der_n), cell(cnt.str()), cell(prob.str())});
      // exact bound |D_n/n! - 1/e| < 1/(n+1)! via an alternating-series
      // interval for 1/e
      const int m = der_n + 8;
      Rational s = 0, term = 1;
      for (int k = 0; k <= m; ++k) {
        s += (k % 2 == 0) ? term : -term;
        term /= (k + 1);
      }
      Rational bound = 1;
      for (int k = 2; k <= der_n + 1; ++k) bound /= k;
      const bool ok = rational_abs(st.probability - s) + term < bound;
      out.summary["probability"] = to_double(st.probability);
      out.summary["one_over_e"] = std::exp(-1.0);
      out.summary["bound_holds"] = ok;
      out.pass = ok;
      if (!ok)
        std::cerr << "derange check failed: expected |p - 1/e| < 1/(n+1)!\n";
    } else if (cmd_poi->parsed()) {
      out.subcommand = "poisson";
      is_check = true;
      std::vector<double> eta;
      std::string eta_desc = "0";
      if (!poi_eta.empty()) {
        eta_desc = poi_eta;
        for (const auto& rc : parse_rational_vector(poi_eta, poi_d))
          eta.push_back(static_cast<double>(rc.first) / static_cast<double>(rc.second));
      }
      double eta_norm = 0.0;
      for (double e : eta) eta_norm += e * e;
      eta_norm = std::sqrt(eta_norm);
      const double rdir = poi_rdir > 0 ? poi_rdir : 8.0 / std::sqrt(poi_t) + 2.0;
      const double rdual = poi_rdual > 0 ? poi_rdual : 8.0 * std::sqrt(poi_t) + eta_norm + 2.0;
      const auto r = poisson_check(GaussianFunction{poi_t}, Lattice::integer(poi_d), eta, rdir,
                                   rdual);
      out.config["dim"] = std::to_string(poi_d);
      out.config["t"] = fmt(poi_t);
      out.config["eta"] = eta_desc;
      out.config["r_direct"] = fmt(rdir);
      out.config["r_dual"] = fmt(rdual);
      out.config["tol"] = fmt(poi_tol);
      out.columns = {"lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_err"};
      out.add_row({cell(r.lhs.real()), cell(r.lhs.imag()), cell(r.rhs.real()),
                   cell(r.rhs.imag()), cell(r.abs_err)});
      out.summary["abs_err"] = r.abs_err;
      out.summary["tol"] = poi_tol;
      out.pass = r.abs_err < poi_tol;
      if (!out.pass)
        std::cerr << "poisson check failed: expected abs_err < " << fmt(poi_tol) << " got "
                  << fmt(r.abs_err) << "\n";
    } else if (cmd_ms->parsed()) {
      out.subcommand = "modelset";
      auto scheme = scheme_by_name(ms_scheme);
      ModelSetSource src(scheme);
      const auto pts = src.enumerate(ms_radius);
      out.config["scheme"] = ms_scheme;
      out.config["radius"] = fmt(ms_radius);
      out.config["check_gaps"] = ms_check_gaps ? "true" : "false";
      out.columns.clear();
      for (int i = 0; i < scheme.physical_dim(); ++i)
        out.columns.push_back("x_" + std::to_string(i + 1));
      for (const auto& p : pts) {
        std::vector<Cell> row;
        for (double v : p.coords) row.push_back(cell(v));
        out.add_row(std::move(row));
      }
      out.summary["count"] = static_cast<long long>(pts.size());
      out.summary["density"] = scheme.density();
      out.summary["density_warning"] = scheme.density_warning();
      if (ms_check_gaps) {
        is_check = true;
        if (scheme.physical_dim() != 1)
          throw std::runtime_error("--check-gaps requires a one-dimensional model set");
        std::map<long long, double> clusters;
        for (std::size_t i = 1; i < pts.size(); ++i) {
          const double g = pts[i].coords[0] - pts[i - 1].coords[0];
          clusters[static_cast<long long>(std::llround(g * 1e6))] = g;
        }
        out.summary["gap_count"] = static_cast<long long>(clusters.size());
        if (clusters.size() == 2) {
          const double lo = clusters.begin()->second, hi = clusters.rbegin()->second;
          out.summary["gap_short"] = lo;
          out.summary["gap_long"] = hi;
          out.summary["gap_ratio"] = hi / lo;
          out.pass = std::abs(hi / lo - ms_gap_ratio) <= ms_gap_tol;
        } else {
          out.pass = false;
        }
        if (!out.pass)
          std::cerr << "modelset gap check failed: expected two gaps of ratio "
                    << fmt(ms_gap_ratio) << " tolerance " << fmt(ms_gap_tol) << "\n";
      }
    } else if (cmd_spec->parsed()) {
      out.subcommand = "spectrum";
      auto scheme = scheme_by_name(spec_scheme);
      const auto entries = qc_spectrum(scheme, spec_cutoff, spec_floor);
      out.config["scheme"] = spec_scheme;
      out.config["cutoff"] = fmt(spec_cutoff);
      out.config["floor"] = fmt(spec_floor);
      out.columns.clear();
      for (int i = 0; i < scheme.physical_dim(); ++i)
        out.columns.push_back("xi_" + std::to_string(i + 1));
      out.columns.push_back("re_a");
      out.columns.push_back("im_a");
      for (const auto& e : entries) {
        std::vector<Cell> row;
        for (double v : e.xi) row.push_back(cell(v));
        row.push_back(cell(e.amplitude.real()));
        row.push_back(cell(e.amplitude.imag()));
        out.add_row(std::move(row));
      }
      out.summary["entries"] = static_cast<long long>(entries.size());
      out.summary["a0"] = entries.empty() ? 0.0 : entries[0].amplitude.real();
    } else if (cmd_pq->parsed()) {
      out.subcommand = "primqc";
      out.config["n"] = std::to_string(pq_n);
      if (pq_export) {
        out.config["export"] = "true";
        out.config["export_cutoff"] = fmt(pq_export_cutoff);
        const auto pe = prim_expansion(2, pq_n, pq_export_cutoff);
        out.columns = {"xi_1", "xi_2", "re_a", "im_a", "n_xi"};
        for (const auto& e : pe.entries) {
          std::vector<Cell> row;
          for (const auto& rc : e.xi)
            row.push_back(cell(static_cast<double>(rc.first) / static_cast<double>(rc.second)));
          row.push_back(cell(e.a_N));
          row.push_back(cell(0.0));
          row.push_back(cell(e.n_xi));
          out.add_row(std::move(row));
        }
        out.summary["entries"] = static_cast<long long>(pe.entries.size());
        out.summary["mertens"] = pe.mertens;
      } else {
        is_check = true;
        const auto center = parse_rational_vector(pq_center, 2);
        std::vector<double> c;
        for (const auto& rc : center)
          c.push_back(static_cast<double>(rc.first) / static_cast<double>(rc.second));
        auto bump = TestFunction::smooth_bump(c, pq_radius);
        out.config["bump_radius"] = fmt(pq_radius);
        out.config["center"] = pq_center;
        out.config["cutoffs"] = pq_cutoffs;
        out.config["rel_tol"] = fmt(pq_rel_tol);
        out.columns = {"cutoff", "lhs", "rhs", "abs_err", "tail_estimate"};
        std::vector<double> cutoffs;
        {
          std::stringstream ss(pq_cutoffs);
          std::string item;
          while (std::getline(ss, item, ',')) cutoffs.push_back(std::stod(item));
        }
        double prev = std::numeric_limits<double>::infinity();
        bool decreasing = true;
        double final_rel = 0.0;
        long long mertens = 0;
        for (double cutoff : cutoffs) {
          const auto r = prim_poisson_check(2, bump, pq_n, cutoff);
          out.add_row({cell(cutoff), cell(r.lhs), cell(r.rhs), cell(r.abs_err),
                       cell(r.tail_estimate)});
          decreasing = decreasing && r.abs_err < prev;
          prev = r.abs_err;
          final_rel = r.abs_err / std::abs(r.lhs);
          mertens = r.mertens;
        }
        out.summary["mertens"] = mertens;
        out.summary["strictly_decreasing"] = decreasing;
        out.summary["final_rel_error"] = final_rel;
        out.summary["rel_tol"] = pq_rel_tol;
        out.pass = decreasing && final_rel < pq_rel_tol;
        if (!out.pass)
          std::cerr << "primqc check failed: decreasing=" << decreasing << " final rel "
                    << fmt(final_rel) << " tolerance " << fmt(pq_rel_tol) << "\n";
      }
    } else if (cmd_tw->parsed()) {
      out.subcommand = "twisted";
      is_check = true;
      const auto eta = parse_rational_vector(tw_eta, 2);
      auto ball = TestFunction::ball_indicator({0.0, 0.0}, 1.0);
      auto est = twisted_density_check(2, eta, ball, default_eps_schedule(tw_eps_max, tw_eps_min));
      const double target = twisted_density_target(2, eta);
      const double rel = std::abs(est.extrapolated - std::complex<double>(target, 0.0)) /
                         std::abs(target);
      out.config["eta"] = tw_eta;
      out.config["eps_max"] = fmt(tw_eps_max);
      out.config["eps_min"] = fmt(tw_eps_min);
      out.config["tol"] = fmt(tw_tol);
      out.columns = {"epsilon", "density_re", "density_im"};
      for (std::size_t i = 0; i < est.epsilons.size(); ++i)
        out.add_row({cell(est.epsilons[i]), cell(est.density_samples[i].real()),
                     cell(est.density_samples[i].imag())});
      out.summary["extrapolated_re"] = est.extrapolated.real();
      out.summary["extrapolated_im"] = est.extrapolated.imag();
      out.summary["target"] = target;
      out.summary["rel_error"] = rel;
      out.summary["tol"] = tw_tol;
      out.pass = rel <= tw_tol;
      if (!out.pass)
        std::cerr << "twisted check failed: expected " << fmt(target) << " got "
                  << fmt(est.extrapolated.real()) << " tolerance " << fmt(tw_tol) << "\n";
    }

    return finish(out, format, output_path, is_check);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
