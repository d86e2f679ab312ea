// Acceptance checks on seeded data. Prints one PASS/FAIL line per criterion
// and exits non-zero if any criterion fails.

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "repdays/cli.hpp"
#include "repdays/clustering.hpp"
#include "repdays/dtw.hpp"
#include "repdays/error.hpp"
#include "repdays/ingest.hpp"
#include "repdays/metrics.hpp"
#include "repdays/report.hpp"
#include "repdays/synth.hpp"
#include "test_support.hpp"

using namespace repdays;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and thresholds.
constexpr double kDtwTol = 1e-12;
constexpr int kDtwPairs = 1000;
constexpr double kDtwSeconds = 60.0;
constexpr int kAhcMatrices = 100;
constexpr std::size_t kAhcMaxN = 50;
constexpr double kScoreTol = 1e-12;
constexpr double kIndexTol = 1e-9;
constexpr std::uint64_t kSeed = 42;
constexpr std::size_t kDays = 730;
constexpr double kOutlierP = 0.02;
constexpr std::size_t kK = 14;
constexpr std::size_t kSmallCluster = 3;
constexpr double kAverageIsolates = 0.60;
constexpr double kKMeansIsolatesAtMost = 0.20;
constexpr double kSmallestRatio = 5.0;
constexpr double kSweepSeconds = 600.0;
constexpr int kKMeansSeeds = 5;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("criterion %d: %s  %s (%s)\n", id, pass ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Synthetic {
  Dataset ds;
  std::vector<DayLabel> labels;
  DistanceMatrix dm;
};

const Synthetic& synthetic() {
  static const Synthetic s = [] {
    auto r = generate(SynthConfig::standard(kSeed, kDays, kOutlierP));
    Synthetic out{normalize(r.dataset), r.labels, {}};
    out.dm = distance_matrix(out.ds);
    return out;
  }();
  return s;
}

void criterion1() {
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<std::size_t> len(2, 7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  const auto t0 = Clock::now();
  for (int t = 0; t < kDtwPairs; ++t) {
    std::vector<double> a(len(gen)), b(len(gen));
    for (auto& x : a) x = u(gen);
    for (auto& x : b) x = u(gen);
    worst = std::max(worst, std::abs(dtw_distance(a, b) - brute_force_dtw(a, b)));
  }
  const double secs = seconds_since(t0);
  report(1, worst <= kDtwTol && secs < kDtwSeconds, "DTW equals brute force on 1000 random pairs",
         "max |diff| " + fmt("%.3g", worst) + ", " + fmt("%.2f", secs) + " s");
}

void criterion2() {
  const double a = dtw_distance(std::vector<double>{0, 0, 1}, std::vector<double>{0, 1, 1});
  const double b = dtw_distance(std::vector<double>{0, 2}, std::vector<double>{0, 0});
  report(2, a == 0.0 && b == 2.0 / 3.0, "DTW hand cases", "got " + fmt("%.17g", a) + " and " + fmt("%.17g", b));
}

void criterion3() {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<std::size_t> size(2, kAhcMaxN);
  int mismatches = 0;
  double worst_height = 0;
  for (int t = 0; t < kAhcMatrices; ++t) {
    // even trials use small integers so ties are frequent and heights are exact sums
    const bool integer = t % 2 == 0;
    auto dm = testing::random_matrix(size(gen), gen, integer);
    for (auto linkage : {Linkage::Complete, Linkage::Average}) {
      const auto got = ahc(dm, linkage).merges;
      const auto want = testing::naive_ahc(dm, linkage);
      bool same = got.size() == want.size();
      for (std::size_t s = 0; same && s < want.size(); ++s) {
        same = got[s].left == want[s].left && got[s].right == want[s].right && got[s].size == want[s].size;
        const double dh = std::abs(got[s].distance - want[s].distance);
        if (integer) same = same && dh == 0.0;
        worst_height = std::max(worst_height, dh);
      }
      mismatches += !same;
    }
  }
  report(3, mismatches == 0 && worst_height <= kScoreTol, "AHC merge sequences equal the naive reference",
         std::to_string(mismatches) + " mismatching of " + std::to_string(2 * kAhcMatrices) +
             ", max height diff " + fmt("%.3g", worst_height));
}

void criterion4() {
  const auto& s = synthetic();
  double worst_score = 0;
  for (auto method : {Method::AhcAverage, Method::AhcComplete, Method::KMeans}) {
    auto model = method == Method::KMeans ? kmeans(s.ds, kK, {kSeed, 10, 300})
                                          : fit_ahc(s.ds, s.dm, *linkage_of(method), kK);
    const auto r = validate(s.ds, model);
    double ss = 0, cs = 0;
    for (std::size_t i = 0; i < s.ds.size(); ++i) ss += r.mc[i] - r.ma[i];
    ss /= double(s.ds.size());
    for (const auto& members : model.members)
      for (auto i : members) cs = std::max(cs, r.ma[i]);
    worst_score = std::max({worst_score, std::abs(ss - r.ss), std::abs(cs - r.cs)});
  }

  std::mt19937_64 gen(4);
  double worst_index = 0;
  for (int t = 0; t < 20; ++t) {
    auto ds = testing::random_dataset(20, 2, 400 + t);
    const std::size_t k = 2 + t % 8;
    std::vector<std::size_t> labels(20);
    for (std::size_t i = 0; i < 20; ++i) labels[i] = i < k ? i : gen() % k;
    auto m = make_model(ds, labels, Method::AhcAverage);
    const auto& l = m.assignments;
    worst_index = std::max({worst_index, std::abs(calinski_harabasz(ds, m) - testing::ch_definition(ds, l)),
                            std::abs(davies_bouldin(ds, m) - testing::db_definition(ds, l)),
                            std::abs(silhouette(ds, m) - testing::silhouette_definition(ds, l))});
  }
  report(4, worst_score <= kScoreTol && worst_index <= kIndexTol, "SS/CS and CH/DB/silhouette recomputation",
         "SS/CS max diff " + fmt("%.3g", worst_score) + ", index max diff " + fmt("%.3g", worst_index));
}

void criterion5() {
  auto r = generate(SynthConfig::standard(kSeed, 40, kOutlierP));
  auto ds = normalize(r.dataset);
  const std::size_t n = ds.size();
  auto dm = distance_matrix(ds);
  auto ahc_model = fit_ahc(ds, dm, Linkage::Average, n);
  auto km = kmeans(ds, n, {kSeed, 10, 300});
  const auto v = validate(ds, ahc_model);
  bool silhouette_refused = false;
  try {
    silhouette(ds, ahc_model);
  } catch (const ArgumentError&) {
    silhouette_refused = true;
  }
  const double km_inertia = *km.params.inertia;
  const bool pass = v.cs == 0.0 && km_inertia == 0.0 && silhouette_refused && !v.silhouette;
  report(5, pass, "K = N identities", "CS " + fmt("%g", v.cs) + ", k-means inertia " + fmt("%g", km_inertia) +
                                          ", silhouette " + (silhouette_refused ? "refused" : "computed"));
}

void criterion6() {
  const auto& s = synthetic();
  auto avg = fit_ahc(s.ds, s.dm, Linkage::Average, kK);
  auto km = kmeans(s.ds, kK, {kSeed, 10, 300});

  auto isolated = [&](const ClusterModel& m) {
    std::size_t outliers = 0, small = 0;
    for (std::size_t i = 0; i < s.ds.size(); ++i)
      if (s.labels[i].outlier) {
        ++outliers;
        small += m.members[m.assignments[i]].size() <= kSmallCluster;
      }
    return double(small) / double(outliers);
  };
  auto smallest = [](const ClusterModel& m) {
    std::size_t x = SIZE_MAX;
    for (const auto& c : m.members) x = std::min(x, c.size());
    return x;
  };
  const double avg_iso = isolated(avg), km_iso = isolated(km);
  const double avg_coh = seasonal_coherence(avg, s.ds), km_coh = seasonal_coherence(km, s.ds);
  const std::size_t avg_min = smallest(avg), km_min = smallest(km);
  const bool a = avg_iso >= kAverageIsolates && km_iso <= kKMeansIsolatesAtMost;
  const bool b = avg_coh >= km_coh;
  const bool c = double(km_min) >= kSmallestRatio * double(avg_min);
  report(6, a && b && c, "average linkage isolates outliers, k-means spreads days",
         std::string("(a) ") + (a ? "ok" : "fail") + " avg " + fmt("%.2f", avg_iso) + " kmeans " +
             fmt("%.2f", km_iso) + "; (b) " + (b ? "ok" : "fail") + " coherence " + fmt("%.3f", avg_coh) +
             " vs " + fmt("%.3f", km_coh) + "; (c) " + (c ? "ok" : "fail") + " smallest " +
             std::to_string(km_min) + " vs " + std::to_string(avg_min));
}

void criterion7() {
  const auto t0 = Clock::now();
  auto r = generate(SynthConfig::standard(kSeed, kDays, kOutlierP));
  auto ds = normalize(r.dataset);
  auto dm = distance_matrix(ds);
  SweepOptions opts;
  opts.k_min = 2;
  opts.k_max = 20;
  opts.kmeans = {kSeed, 10, 300};
  auto sw = sweep(ds, dm, opts);
  const double secs = seconds_since(t0);

  auto series = [&](Method m, bool want_ss) {
    std::vector<double> k, y;
    for (const auto& row : sw.rows)
      if (row.method == m && row.ok) {
        k.push_back(double(row.k));
        y.push_back(want_ss ? row.ss : row.cs);
      }
    return std::pair{k, y};
  };
  auto rho = [&](Method m, bool want_ss) {
    auto [k, y] = series(m, want_ss);
    return k.size() == 19 ? spearman(k, y) : 1.0;
  };
  const double ss_avg = rho(Method::AhcAverage, true);
  const double cs_avg = rho(Method::AhcAverage, false);
  const double cs_complete = rho(Method::AhcComplete, false);
  const bool pass = ss_avg < 0 && cs_avg < 0 && cs_complete < 0 && secs < kSweepSeconds;
  report(7, pass, "sweep trends over K = 2..20",
         "rho(SS, K) avg " + fmt("%.3f", ss_avg) + ", rho(CS, K) avg " + fmt("%.3f", cs_avg) + " complete " +
             fmt("%.3f", cs_complete) + ", " + fmt("%.1f", secs) + " s");
}

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = testing::slurp(e.path());
  return files;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "repdays");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  return cli::run_cli(int(argv.size()), argv.data(), out, std::cerr);
}

void criterion8() {
  const fs::path root = REPDAYS_SCRATCH;
  bool ok = true;
  for (const char* name : {"a", "b"}) {
    const auto dir = testing::fresh_dir(root / name).string();
    ok = ok && cli({"synth", "--out", dir, "--seed", "42", "--days", "730"}) == 0;
    ok = ok && cli({"run", "--out", dir, "--k", "14"}) == 0;
    ok = ok && cli({"sweep", "--out", dir, "--k-range", "2..20", "--seed", "42"}) == 0;
  }
  const auto ta = tree(root / "a"), tb = tree(root / "b");
  const bool identical = ok && ta == tb && !ta.empty();

  const auto& s = synthetic();
  std::set<std::vector<std::size_t>> partitions;
  for (int seed = 1; seed <= kKMeansSeeds; ++seed)
    partitions.insert(kmeans(s.ds, kK, {std::uint64_t(seed), 1, 300}).assignments);
  report(8, identical && partitions.size() >= 2, "determinism",
         std::string(identical ? "identical" : "different") + " trees over " + std::to_string(ta.size()) +
             " files; " + std::to_string(partitions.size()) + " distinct k-means partitions from 5 seeds");
}

std::size_t histogram_panels(const boost::property_tree::ptree& node) {
  std::size_t n = 0;
  for (const auto& [name, child] : node) {
    if (name == "g" && child.get<std::string>("<xmlattr>.class", "") == "panel histogram") ++n;
    n += histogram_panels(child);
  }
  return n;
}

void criterion9() {
  const auto& s = synthetic();
  std::array<std::size_t, 12> per_month{};
  for (const auto& d : s.ds.days) ++per_month[d.date.month - 1];
  std::size_t reports = 0, broken = 0;
  auto check = [&](const ClusterModel& m) {
    ++reports;
    const auto r = build_report(m, s.ds, &s.dm);
    std::size_t members = 0;
    std::array<std::size_t, 12> months{};
    bool ok = r.clusters.size() == m.k;
    for (const auto& c : r.clusters) {
      members += c.member_count;
      std::size_t hist = 0;
      for (std::size_t b = 0; b < 12; ++b) {
        hist += c.histogram[b];
        months[b] += c.histogram[b];
      }
      ok = ok && hist == c.member_count;
    }
    ok = ok && members == s.ds.size() && months == per_month;
    std::stringstream svg;
    emit_svg(r, svg);
    try {
      boost::property_tree::ptree t;
      boost::property_tree::read_xml(svg, t);
      ok = ok && histogram_panels(t) == m.k;
    } catch (const std::exception&) {
      ok = false;
    }
    broken += !ok;
  };
  for (std::size_t k = 2; k <= 20; ++k) {
    check(fit_ahc(s.ds, s.dm, Linkage::Average, k));
    check(fit_ahc(s.ds, s.dm, Linkage::Complete, k));
  }
  check(kmeans(s.ds, kK, {kSeed, 10, 300}));
  report(9, broken == 0, "report histograms conserve days; SVG has K histogram panels",
         std::to_string(reports - broken) + " of " + std::to_string(reports) + " reports consistent");
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  std::printf("%d of 9 criteria failed (%.1f s)\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
