// Acceptance checks 1-11.  One PASS/FAIL line per criterion; exit status is
// the number of failed criteria.

#include "cflab/catalog.hpp"
#include "cflab/commands.hpp"
#include "cflab/constants.hpp"
#include "cflab/contfrac.hpp"
#include "cflab/diagnostics.hpp"
#include "cflab/exact.hpp"
#include "cflab/io.hpp"
#include "cflab/statistics.hpp"

#include <gmpxx.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace cflab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Scratch {
  fs::path root;
  Scratch() {
    root = fs::temp_directory_path() / ("cflab_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Scratch() { fs::remove_all(root); }
  fs::path dir(const std::string& name) const { return root / name; }
};

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fmt(double v, int precision = 10) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Random p/q in (0, 1) with exactly `digits` digits in q.
BigRational random_unit_rational(gmp_randclass& rng, std::size_t digits) {
  const BigInt lo = pow10(digits - 1);
  const BigInt den = lo + rng.get_z_range(pow10(digits) - lo);
  const BigInt num = 1 + rng.get_z_range(den - 1);
  return {num, den};
}

// Log-uniform digit counts in [1, max_digits] for numerator and denominator.
BigRational random_rational(gmp_randclass& rng, std::size_t max_digits) {
  auto digits = [&] {
    const double u = mpf_class(rng.get_f(53)).get_d();
    return 1 + static_cast<std::size_t>(std::pow(static_cast<double>(max_digits), u)) % max_digits;
  };
  const BigInt num = rng.get_z_range(pow10(digits()));
  const BigInt den = 1 + rng.get_z_range(pow10(digits()));
  return {num, den};
}

// ---------------------------------------------------------------------------

Outcome c1(const Scratch& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto dir = s.dir("c1");
  const auto r = cli({"sum", "mersenne", "12", "--precision", "52", "--out", dir.string()});
  const double t = elapsed(t0);
  const std::string expected = "0.5164541789407885653304873429715228588159685534154197";
  const std::string got = r.code == 0 ? read_text_file(dir / "run_decimal.txt") : "";
  // tail beyond 12 terms: sum_{p >= 521} 2^{-p+1} < 2^{-519}
  const bool tail_ok = r.out.find("tail beyond 12 terms < 1e-156") != std::string::npos;
  const bool pass = got == expected + "\n" && tail_ok && t < 1.0;
  return {pass, "digits " + std::string(got == expected + "\n" ? "match" : "differ") + ", tail < 1e-156: " +
                    (tail_ok ? "yes" : "no") + ", " + fmt(t, 3) + " s"};
}

Outcome c2(const Scratch& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto dir = s.dir("c2");
  const auto r = cli({"cf", "mersenne", "18", "--out", dir.string()});
  const double t = elapsed(t0);
  if (r.code != 0) return {false, "cf failed: " + r.err};
  std::istringstream in(read_text_file(dir / "run_cf.txt"));
  const CFExpansion cf = read_cf_text(in);
  const bool prefix = cf.quotients.size() >= 3 && cf.quotients[0] == 1 && cf.quotients[1] == 1 &&
                      cf.quotients[2] == 14;
  return {prefix && t < 5.0, "a1..a3 = " + cf.quotients[0].get_str() + ", " + cf.quotients[1].get_str() + ", " +
                                 cf.quotients[2].get_str() + " of " + std::to_string(cf.quotients.size()) +
                                 " quotients, " + fmt(t, 3) + " s"};
}

Outcome c3(const Scratch& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto dir = s.dir("c3");
  const auto r = cli({"um", "--terms", "13", "--digits", "47", "--out", dir.string()});
  const double t = elapsed(t0);
  const std::string expected = "0.31824815840584486942596202748140694243806236564";
  const bool match = r.code == 0 && read_text_file(dir / "run_um_decimal.txt") == expected + "\n";
  return {match && t < 10.0, std::string(match ? "47 digits match" : "mismatch") + ", " + fmt(t, 3) + " s"};
}

Outcome c4(const Scratch& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto dir = s.dir("c4");
  const auto r = cli({"um", "--terms", "20", "--out", dir.string()});
  const double t = elapsed(t0);
  if (r.code != 0) return {false, "um failed: " + r.err};
  // reference rows for k = 3..20 (9 significant figures compared)
  const std::vector<std::pair<std::size_t, std::string>> table{
      {3, "2.131173743e-6"},   {4, "1.320662319e-10"},   {5, "1.968416969e-18"},
      {6, "1.145786956e-28"},  {7, "4.168364565e-40"},   {8, "9.038699842e-59"},
      {9, "1.699990496e-95"},  {17, "9.32543401e-4439"}, {18, "1.38891910e-6375"},
      {19, "3.81534516e-8936"}, {20, "4.67942175e-11599"}};
  std::map<std::size_t, std::string> ours;
  std::istringstream in(read_text_file(dir / "run_um_table.csv"));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto a = line.find(','), b = line.rfind(',');
    ours[std::stoul(line.substr(0, a))] = line.substr(b + 1);
  }
  auto key = [](const std::string& v) {
    const auto e = v.find('e');
    std::string mant = v.substr(0, e);
    mant.erase(mant.find('.'), 1);
    return std::make_pair(mant.substr(0, 9), std::stol(v.substr(e + 1)));
  };
  std::size_t matched = 0;
  std::string first_bad;
  for (const auto& [k, v] : table) {
    if (ours.count(k) && key(ours[k]) == key(v)) {
      ++matched;
    } else if (first_bad.empty()) {
      first_bad = " (k = " + std::to_string(k) + ": " + (ours.count(k) ? ours[k] : "missing") + ")";
    }
  }
  return {matched == table.size() && t < 60.0,
          std::to_string(matched) + "/" + std::to_string(table.size()) + " rows match" + first_bad + ", k=3 " +
              ours[3] + ", k=20 " + ours[20] + ", " + fmt(t, 3) + " s"};
}

Outcome c5(const Scratch&) {
  const double levy = levy_constant();
  const KhinchinEstimate k = khinchin_constant(1e-6);
  // independent bracket from the partial product: P <= K <= P e^{tail}
  const KhinchinEstimate p = khinchin_partial_product(1000000);
  const bool bracket = p.value <= k.value + k.error_bound && k.value - k.error_bound <= p.value + p.error_bound;
  const bool pass = std::abs(levy - 3.27582291872) <= 1e-11 && std::abs(k.value - 2.685452) <= 1e-6 &&
                    k.error_bound <= 1e-6 && bracket;
  return {pass, "L = " + fmt(levy, 15) + ", K = " + fmt(k.value, 12) + " +/- " + fmt(k.error_bound, 3) + " (" +
                    std::to_string(k.terms) + " series terms), product bracket [" + fmt(p.value, 10) + ", " +
                    fmt(p.value + p.error_bound, 10) + "]"};
}

Outcome c6(const Scratch&) {
  const auto& cat = MersenneCatalog::builtin();
  const Mod4Census m = mod4_census(cat);
  const bool pass = cat.size() == 47 && cat.max() == 43112609 && m.one_mod_4 == 27 && m.three_mod_4 == 19 &&
                    m.other == 1;
  return {pass, std::to_string(cat.size()) + " entries, max " + std::to_string(cat.max()) + ", census (" +
                    std::to_string(m.one_mod_4) + ", " + std::to_string(m.three_mod_4) + ", " +
                    std::to_string(m.other) + ")"};
}

Outcome c7(const Scratch&) {
  const WagstaffFit w = wagstaff_fit(MersenneCatalog::builtin());
  const double c = static_cast<double>(WagstaffConstants::from_gamma(constants::kGammaEightDecimals).c);
  const double c_full = static_cast<double>(WagstaffConstants::from_gamma(constants::kEulerGamma).c);
  const bool pass = std::abs(w.fit.slope - 0.3854) <= 0.0005 && std::abs(w.fit.intercept - 0.6691) <= 0.005 &&
                    std::abs(c - 2.101893933) <= 1e-8;
  return {pass, "slope " + fmt(w.fit.slope, 6) + ", intercept " + fmt(w.fit.intercept, 6) +
                    ", c(gamma = 0.57721566) = " + fmt(c, 11) + " (full gamma gives " + fmt(c_full, 11) + ")"};
}

Outcome c8(const Scratch& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto dir = s.dir("c8");
  const auto r = cli({"diagnostics", "--terms", "47", "--log-domain", "--out", dir.string()});
  const double t = elapsed(t0);
  if (r.code != 0) return {false, "diagnostics failed: " + r.err};
  const auto j = nlohmann::json::parse(read_text_file(dir / "run_diagnostics.json"));
  const auto& last = j["records"][46];
  const double q47 = last["log10_q"].get<double>();
  const double bound = last["log10_wagstaff_bound"].get<double>();
  std::vector<std::size_t> violations;
  for (const auto& rec : j["records"]) {
    const std::size_t n = rec["n"].get<std::size_t>();
    if (n >= 3 && !rec["wagstaff_holds"].get<bool>()) violations.push_back(n);
  }
  const bool q_ok = q47 >= 86789810.0 && q47 <= 86789810.9;
  const bool b_ok = bound >= 82034318.0 && bound <= 82034318.2;
  std::string v = "none";
  if (!violations.empty()) {
    v.clear();
    for (auto n : violations) v += (v.empty() ? "" : ",") + std::to_string(n);
    // the exact comparison for the first offender
    const auto cf = cf_from_quotient_sequence(SequenceSpec{}, violations.front());
    const auto c = convergents(cf.cf);
    v += " (exact: Q_" + std::to_string(violations.front()) + " = " + c.back().q.get_str() +
         (wagstaff_bound_holds_exact(c.back().q, violations.front(), WagstaffConstants::reference()) ? " >" : " <") +
         " 2^" + fmt(static_cast<double>(j["records"][violations.front() - 1]["log10_wagstaff_bound"].get<double>() /
                                         std::log10(2.0)), 6) + ")";
  }
  return {q_ok && b_ok && violations.empty() && t < 60.0,
          "log10 Q47 = " + fmt(q47, 15) + ", log10 bound = " + fmt(bound, 15) + ", bound violated for n in [3, 47]: " +
              v + ", " + fmt(t, 3) + " s"};
}

Outcome c9(const Scratch&) {
  std::vector<std::string> notes;
  bool pass = true;

  // (a) round trip and (b) error sandwich on the same 1000 rationals
  {
    gmp_randclass rng(gmp_randinit_default);
    rng.seed(20240901);
    std::size_t round_trip = 0, sandwich_fail = 0, checked = 0, max_digits = 0;
    for (int i = 0; i < 1000; ++i) {
      const BigRational r = i % 100 == 0 ? BigRational(rng.get_z_range(pow10(10000)), 1 + rng.get_z_range(pow10(10000)))
                                         : random_rational(rng, 10000);
      max_digits = std::max({max_digits, r.numerator().get_str().size(), r.denominator().get_str().size()});
      const CFExpansion cf = cf_expand_rational(r);
      if (from_cf(cf) == r) ++round_trip;
      // 1/(Q_n (Q_n + Q_{n+1})) < |r - P_n/Q_n| < 1/(Q_n Q_{n+1}), cross-multiplied:
      //   q < d (Q_n + Q_{n+1})  and  d Q_{n+1} < q,  d = |p Q_n - q P_n|.
      // Strict for n <= N - 2; at n = N - 1 the upper bound is attained.
      ConvergentStream st(cf.a0);
      const std::size_t N = cf.quotients.size();
      BigInt d;
      for (std::size_t n = 0; n + 2 <= N; ++n) {
        const BigInt q_n = st.q(), p_n = st.p();
        st.push(cf.quotients[n]);
        d = abs(r.numerator() * q_n - r.denominator() * p_n);
        ++checked;
        if (!(r.denominator() < d * (q_n + st.q()) && d * st.q() < r.denominator())) ++sandwich_fail;
      }
      if (N >= 1) {
        const BigInt q_n = st.q(), p_n = st.p();
        st.push(cf.quotients[N - 1]);
        d = abs(r.numerator() * q_n - r.denominator() * p_n);
        ++checked;
        if (!(d * st.q() == r.denominator())) ++sandwich_fail;
      }
    }
    const bool a = round_trip == 1000, b = sandwich_fail == 0;
    pass = pass && a && b;
    notes.push_back("(a) round trip " + std::to_string(round_trip) + "/1000 (largest part " +
                    std::to_string(max_digits) + " digits)");
    notes.push_back("(b) sandwich " + std::to_string(checked - sandwich_fail) + "/" + std::to_string(checked) +
                    " convergents");
  }

  // (c) Gauss-Kuzmin and (d) K(n), L(n) on 20 random 10^4-digit rationals
  {
    std::size_t gk_seeds = 0, kl_seeds = 0, gk_cells = 0;
    double worst_k = 0, worst_l = 0;
    for (unsigned seed = 1; seed <= 20; ++seed) {
      gmp_randclass rng(gmp_randinit_default);
      rng.seed(seed);
      const CFExpansion cf = cf_expand_rational(random_unit_rational(rng, 10000));
      const GaussKuzminHistogram h = gauss_kuzmin_histogram(cf.quotients, 20);
      const double total = static_cast<double>(h.total);
      bool all = true;
      for (std::uint64_t m = 1; m <= 20; ++m) {
        const double p = gauss_kuzmin_probability(m);
        const double sigma = std::sqrt(p * (1 - p) / total);
        const bool in = std::abs(h.frequency(m) - p) <= 3 * sigma;
        gk_cells += in;
        all = all && in;
      }
      gk_seeds += all;
      const double K = running_khinchin(cf, cf.quotients.size()).back().value;
      const double L = running_levy(cf, cf.quotients.size()).back().value;
      worst_k = std::max(worst_k, std::abs(K - constants::kKhinchin));
      worst_l = std::max(worst_l, std::abs(L - constants::kLevy));
      kl_seeds += std::abs(K - constants::kKhinchin) <= 0.05 && std::abs(L - constants::kLevy) <= 0.1;
    }
    const bool c = gk_seeds >= 19, d = kl_seeds >= 19;
    pass = pass && c && d;
    notes.push_back("(c) Gauss-Kuzmin all m <= 20 within 3 sigma in " + std::to_string(gk_seeds) +
                    "/20 seeds (" + std::to_string(gk_cells) + "/400 cells)");
    notes.push_back("(d) K, L within tolerance in " + std::to_string(kl_seeds) + "/20 seeds (worst |K(n)-K| " +
                    fmt(worst_k, 3) + ", |L(n)-L| " + fmt(worst_l, 3) + ")");
  }

  // (e) delta(u_M; n) bracketed for n <= 20, from a 30000-digit value of u_M
  {
    const auto um = cf_from_quotient_sequence(SequenceSpec{}, 23, 30000);
    const DecimalApprox value = *um.decimal;
    const auto deltas = tsr_delta_series(value.as_rational(), value.precision, um.cf, 1, 20);
    std::size_t inside = 0;
    double mean = 0;
    for (const auto& d : deltas) {
      inside += d.bracketed;
      mean += d.delta;
    }
    mean /= static_cast<double>(deltas.size());
    const bool e = inside == deltas.size() && deltas.size() == 20;
    pass = pass && e;
    notes.push_back("(e) delta bracketed " + std::to_string(inside) + "/" + std::to_string(deltas.size()) +
                    ", mean delta(n = 1..20) " + fmt(mean, 6));
  }

  std::string detail;
  for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
  return {pass, detail};
}

Outcome c10(const Scratch& s) {
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(100000);
  const BigInt lo = pow10(99999);
  const BigInt num = lo + rng.get_z_range(pow10(100000) - lo);
  const BigInt den = lo + rng.get_z_range(pow10(100000) - lo);
  const BigRational r(num, den);

  auto t0 = std::chrono::steady_clock::now();
  const CFExpansion cf = cf_expand_rational(r);
  const double t = elapsed(t0);
  const bool round_trip = from_cf(cf) == r;

  // checkpoint / resume through the CLI: cf and stats, interrupted vs one-shot
  const std::string rat = r.str();
  const auto one = s.dir("c10_one"), two = s.dir("c10_two");
  bool identical = true;
  std::string why;
  auto run = [&](std::vector<std::string> args) {
    const auto res = cli(args);
    if (res.code != 0) {
      identical = false;
      why += " [" + args[0] + " exit " + std::to_string(res.code) + ": " + res.err + "]";
    }
    return res;
  };
  run({"cf", "--rational", rat, "--out", one.string()});
  run({"cf", "--rational", rat, "--out", two.string(), "--stop-after", "40000"});
  run({"resume", (two / "run.checkpoint").string()});
  identical = identical && read_text_file(one / "run_cf.txt") == read_text_file(two / "run_cf.txt");

  const auto cf_file = (one / "run_cf.txt").string();
  const std::vector<std::string> stats{"stats", "--cf", cf_file, "--which", "khinchin,levy,signs,records,kuzmin",
                                       "--stride", "100", "--name", "st"};
  auto with = [&](const fs::path& out, std::vector<std::string> extra) {
    auto a = stats;
    a.push_back("--out");
    a.push_back(out.string());
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  };
  run(with(one, {}));
  run(with(two, {"--stop-after", "5000"}));
  run({"resume", (two / "st.checkpoint").string()});
  for (const char* f : {"st_khinchin.csv", "st_levy.csv", "st_signs.csv", "st_records.csv", "st_kuzmin.csv"}) {
    if (read_text_file(one / f) != read_text_file(two / f)) {
      identical = false;
      why += std::string(" [") + f + " differs]";
    }
  }

  return {t < 120.0 && round_trip && identical,
          std::to_string(cf.quotients.size()) + " quotients in " + fmt(t, 3) + " s, round trip " +
              (round_trip ? "ok" : "FAILED") + ", resumed cf and stats outputs " +
              (identical ? "byte-identical" : "differ") + why};
}

Outcome c11(const Scratch& s) {
  const auto exps = scaled_exponents(MersenneCatalog::builtin().exponents(), 210, 33219);
  std::string list;
  for (auto e : exps) list += (list.empty() ? "" : ",") + std::to_string(e);
  const auto dir = s.dir("c11");
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = cli({"stats", "dyadic", std::to_string(exps.size()), "--exponents", list, "--which",
                      "khinchin,levy", "--stride", "10", "--name", "dyadic", "--out", dir.string()});
  const auto c = cli({"cf", "dyadic", std::to_string(exps.size()), "--exponents", list, "--name", "dyadic",
                      "--out", dir.string()});
  const double t = elapsed(t0);
  if (r.code != 0 || c.code != 0) return {false, "pipeline failed: " + r.err + c.err};

  const auto summary = nlohmann::json::parse(read_text_file(dir / "dyadic_cf_summary.json"));
  const std::size_t largest_digits = summary["largest_digits"].get<std::size_t>();
  const std::size_t count = summary["quotients"].get<std::size_t>();
  std::size_t k_rows = 0, l_rows = 0;
  bool finite = true;
  std::string last_k, last_l;
  for (const auto& [file, rows, last] : {std::tuple{"dyadic_khinchin.csv", &k_rows, &last_k},
                                         std::tuple{"dyadic_levy.csv", &l_rows, &last_l}}) {
    std::istringstream in(read_text_file(dir / file));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      ++*rows;
      const auto a = line.find(','), b = line.find(',', a + 1);
      const double v = std::stod(line.substr(a + 1, b - a - 1));
      finite = finite && std::isfinite(v) && v > 0;
      *last = line.substr(a + 1, b - a - 1);
    }
  }
  const std::size_t expected_rows = count / 10 + (count % 10 != 0);
  const bool pass = largest_digits > 1000 && k_rows == expected_rows && l_rows == expected_rows && finite;
  return {pass, std::to_string(exps.size()) + " dyadic terms (max exponent " + std::to_string(exps.back()) + "), " +
                    std::to_string(count) + " quotients, largest " + std::to_string(largest_digits) +
                    " digits at index " + std::to_string(summary["largest_index"].get<std::size_t>()) + ", " +
                    std::to_string(k_rows) + " K2/L2 rows, final K2 = " + last_k + ", L2 = " + last_l + ", " +
                    fmt(t, 3) + " s"};
}

}  // namespace

int main() {
  Scratch scratch;
  const std::vector<std::pair<const char*, std::function<Outcome(const Scratch&)>>> criteria{
      {"1 sum digits", c1},          {"2 cf prefix", c2},        {"3 u_M digits", c3},
      {"4 inverse-square table", c4}, {"5 constants", c5},       {"6 catalog facts", c6},
      {"7 Wagstaff fit", c7},        {"8 growth bound", c8},     {"9 desk-scale properties", c9},
      {"10 performance and resume", c10}, {"11 dyadic contrast", c11}};
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn(scratch);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail << std::endl;
  }
  std::cout << (11 - failed) << "/11 criteria pass" << std::endl;
  return failed;
}
