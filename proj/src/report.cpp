#include "repdays/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

#include "json.hpp"

#include "repdays/error.hpp"
#include "repdays/ingest.hpp"

namespace repdays {

using nlohmann::json;

std::string format_sig6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  std::string s = buf;
  if (s == "-0") s = "0";
  return s;
}

double round_sig6(double x) { return std::strtod(format_sig6(x).c_str(), nullptr); }

std::vector<MonthCounts> monthly_histogram(const ClusterModel& model, const Dataset& ds) {
  if (model.assignments.size() != ds.size()) throw ArgumentError("monthly_histogram: model does not match dataset");
  std::vector<MonthCounts> out(model.k, MonthCounts{});
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const unsigned month = ds.days[i].date.month;
    ++out.at(model.assignments[i])[month - 1];
  }
  return out;
}

double seasonal_coherence(const ClusterModel& model, const Dataset& ds) {
  const auto hist = monthly_histogram(model, ds);
  std::size_t present = 0, coherent = 0;
  for (std::size_t month = 0; month < 12; ++month) {
    std::size_t total = 0, largest = 0;
    for (const auto& h : hist) {
      total += h[month];
      largest = std::max(largest, h[month]);
    }
    if (total == 0) continue;
    ++present;
    // largest / total > 2/3 without rounding
    if (3 * largest > 2 * total) ++coherent;
  }
  return present == 0 ? 0.0 : double(coherent) / double(present);
}

namespace {

std::vector<std::vector<double>> profile_rows(const ProfileMatrix& m, const Dataset& ds, bool denormalize) {
  std::vector<std::vector<double>> out(m.vars(), std::vector<double>(m.hours()));
  for (std::size_t v = 0; v < m.vars(); ++v)
    for (std::size_t h = 0; h < m.hours(); ++h) {
      double x = m(h, v);
      if (denormalize) x = denormalize_value(x, (*ds.normalization)[v]);
      out[v][h] = round_sig6(x);
    }
  return out;
}

}  // namespace

ScenarioReport build_report(const ClusterModel& model, const Dataset& ds, const DistanceMatrix* dm,
                            const ReportOptions& opts) {
  if (model.assignments.size() != ds.size()) throw ArgumentError("build_report: model does not match dataset");
  if (ds.days.empty()) throw ArgumentError("build_report: empty dataset");
  if (opts.denormalize && !ds.normalized()) throw ArgumentError("build_report: cannot denormalize a raw dataset");
  if (opts.representative == Representative::Medoid) {
    if (!dm) throw ArgumentError("build_report: medoid representatives need a distance matrix");
    if (dm->size() != ds.size()) throw ArgumentError("build_report: distance matrix does not match dataset");
  }
  const auto centroids = model.centroids.size() == model.k ? model.centroids : compute_centroids(ds, model.members);
  const auto hist = monthly_histogram(model, ds);

  ScenarioReport r;
  r.method = to_string(model.method);
  r.k = model.k;
  r.n_days = ds.size();
  r.variables = ds.variable_names;
  r.first_day = ds.days.front().date;
  r.last_day = ds.days.back().date;
  r.representative = opts.representative == Representative::Centroid ? "centroid" : "medoid";
  r.denormalized = opts.denormalize;
  r.seasonal_coherence = round_sig6(seasonal_coherence(model, ds));

  for (std::size_t c = 0; c < model.k; ++c) {
    ClusterSummary s;
    s.id = c + 1;
    s.member_count = model.members[c].size();
    s.histogram = hist[c];
    for (std::size_t i : model.members[c]) {
      s.member_dates.push_back(ds.days[i].date);
      s.member_profiles.push_back(profile_rows(ds.days[i].matrix, ds, opts.denormalize));
    }
    if (dm) s.medoid = ds.days[medoid(*dm, model.members[c])].date;
    if (opts.representative == Representative::Medoid) {
      s.representative = profile_rows(ds.days[medoid(*dm, model.members[c])].matrix, ds, opts.denormalize);
    } else {
      s.representative = profile_rows(centroids[c], ds, opts.denormalize);
    }
    r.clusters.push_back(std::move(s));
  }
  return r;
}

void emit_json(const ScenarioReport& r, std::ostream& out) {
  json j;
  j["method"] = r.method;
  j["k"] = r.k;
  j["n_days"] = r.n_days;
  j["variables"] = r.variables;
  j["first_day"] = r.first_day.iso();
  j["last_day"] = r.last_day.iso();
  j["representative"] = r.representative;
  j["denormalized"] = r.denormalized;
  j["seasonal_coherence"] = r.seasonal_coherence;
  j["clusters"] = json::array();
  for (const auto& c : r.clusters) {
    json jc;
    jc["id"] = c.id;
    jc["member_count"] = c.member_count;
    jc["histogram"] = c.histogram;
    jc["medoid"] = c.medoid ? json(c.medoid->iso()) : json(nullptr);
    jc["member_dates"] = json::array();
    for (const auto& d : c.member_dates) jc["member_dates"].push_back(d.iso());
    jc["representative"] = c.representative;
    jc["member_profiles"] = c.member_profiles;
    j["clusters"].push_back(std::move(jc));
  }
  out << j.dump(1) << '\n';
}

namespace {

Date date_field(const json& j) {
  auto d = Date::parse(j.get<std::string>());
  if (!d) throw FormatError("invalid date '" + j.get<std::string>() + "'");
  return *d;
}

}  // namespace

ScenarioReport parse_report_json(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
    ScenarioReport r;
    r.method = j.at("method").get<std::string>();
    r.k = j.at("k").get<std::size_t>();
    r.n_days = j.at("n_days").get<std::size_t>();
    r.variables = j.at("variables").get<std::vector<std::string>>();
    r.first_day = date_field(j.at("first_day"));
    r.last_day = date_field(j.at("last_day"));
    r.representative = j.at("representative").get<std::string>();
    r.denormalized = j.at("denormalized").get<bool>();
    r.seasonal_coherence = j.at("seasonal_coherence").get<double>();
    for (const auto& jc : j.at("clusters")) {
      ClusterSummary c;
      c.id = jc.at("id").get<std::size_t>();
      c.member_count = jc.at("member_count").get<std::size_t>();
      c.histogram = jc.at("histogram").get<MonthCounts>();
      if (!jc.at("medoid").is_null()) c.medoid = date_field(jc.at("medoid"));
      for (const auto& d : jc.at("member_dates")) c.member_dates.push_back(date_field(d));
      c.representative = jc.at("representative").get<std::vector<std::vector<double>>>();
      c.member_profiles = jc.at("member_profiles").get<std::vector<std::vector<std::vector<double>>>>();
      r.clusters.push_back(std::move(c));
    }
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("report JSON: ") + e.what());
  }
}

void emit_csv(const ScenarioReport& r, std::ostream& out) {
  out << "kind,cluster,month,variable,hour,value\n";
  for (const auto& c : r.clusters) {
    for (std::size_t m = 0; m < 12; ++m) out << "histogram," << c.id << ',' << m + 1 << ",,," << c.histogram[m] << '\n';
    for (std::size_t v = 0; v < c.representative.size(); ++v)
      for (std::size_t h = 0; h < c.representative[v].size(); ++h)
        out << "representative," << c.id << ",," << r.variables.at(v) << ',' << h + 1 << ','
            << format_sig6(c.representative[v][h]) << '\n';
  }
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string fixed2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

constexpr double kPanelW = 160, kPanelH = 80, kGap = 14, kHeader = 18, kMargin = 20, kTitle = 34;
constexpr std::size_t kColumns = 7;
constexpr const char* kMonthLetters = "JFMAMJJASOND";

}  // namespace

void emit_svg(const ScenarioReport& r, std::ostream& out) {
  const std::size_t m = r.variables.size();
  const std::size_t k = r.clusters.size();
  const std::size_t cols = std::max<std::size_t>(1, std::min(k, kColumns));
  const std::size_t grid_rows = (k + cols - 1) / cols;
  const double block_h = kHeader + double(m + 1) * (kPanelH + kGap);
  const double width = 2 * kMargin + double(cols) * (kPanelW + kGap);
  const double height = kTitle + kMargin + double(grid_rows) * (block_h + kGap);

  // Shared y-range per variable so panels are comparable across clusters.
  std::vector<std::pair<double, double>> range(m, {0.0, 1.0});
  if (r.denormalized) {
    for (std::size_t v = 0; v < m; ++v) {
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& c : r.clusters) {
        for (double x : c.representative[v]) lo = std::min(lo, x), hi = std::max(hi, x);
        for (const auto& p : c.member_profiles)
          for (double x : p[v]) lo = std::min(lo, x), hi = std::max(hi, x);
      }
      if (!(hi > lo)) hi = lo + 1.0;
      range[v] = {lo, hi};
    }
  }

  auto polyline = [&](const std::vector<double>& ys, std::size_t v, double x0, double y0) {
    std::string pts;
    const double span = range[v].second - range[v].first;
    for (std::size_t h = 0; h < ys.size(); ++h) {
      const double px = x0 + kPanelW * (ys.size() > 1 ? double(h) / double(ys.size() - 1) : 0.5);
      const double py = y0 + kPanelH * (1.0 - (ys[h] - range[v].first) / span);
      if (!pts.empty()) pts += ' ';
      pts += fixed2(px) + ',' + fixed2(py);
    }
    return pts;
  };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed2(width) << "\" height=\"" << fixed2(height)
      << "\" viewBox=\"0 0 " << fixed2(width) << ' ' << fixed2(height) << "\" font-family=\"sans-serif\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << fixed2(width) << "\" height=\"" << fixed2(height)
      << "\" fill=\"#ffffff\"/>\n";
  out << "<text x=\"" << fixed2(kMargin) << "\" y=\"22\" font-size=\"15\">"
      << xml_escape(r.method + ", K = " + std::to_string(r.k) + ", " + std::to_string(r.n_days) + " days (" +
                    r.first_day.iso() + " to " + r.last_day.iso() + "), representative: " + r.representative)
      << "</text>\n";

  for (std::size_t ci = 0; ci < k; ++ci) {
    const auto& c = r.clusters[ci];
    const double bx = kMargin + double(ci % cols) * (kPanelW + kGap);
    const double by = kTitle + double(ci / cols) * (block_h + kGap);
    out << "<g class=\"cluster\" id=\"cluster-" << c.id << "\">\n";
    out << "<text x=\"" << fixed2(bx) << "\" y=\"" << fixed2(by + 13) << "\" font-size=\"12\" font-weight=\"bold\">"
        << "Cluster " << c.id << " (n=" << c.member_count << ")</text>\n";

    for (std::size_t v = 0; v < m; ++v) {
      const double py = by + kHeader + double(v) * (kPanelH + kGap);
      out << "<g class=\"panel profile\" data-variable=\"" << xml_escape(r.variables[v]) << "\">\n";
      out << "<rect x=\"" << fixed2(bx) << "\" y=\"" << fixed2(py) << "\" width=\"" << fixed2(kPanelW)
          << "\" height=\"" << fixed2(kPanelH) << "\" fill=\"none\" stroke=\"#999999\" stroke-width=\"0.5\"/>\n";
      out << "<text x=\"" << fixed2(bx + 3) << "\" y=\"" << fixed2(py + 10) << "\" font-size=\"9\" fill=\"#555555\">"
          << xml_escape(r.variables[v]) << "</text>\n";
      for (std::size_t p = 0; p < c.member_profiles.size(); ++p) {
        const unsigned month = c.member_dates[p].month;
        out << "<polyline fill=\"none\" stroke=\"hsl(" << (month - 1) * 30
            << ",70%,50%)\" stroke-opacity=\"0.3\" stroke-width=\"0.6\" points=\""
            << polyline(c.member_profiles[p][v], v, bx, py) << "\"/>\n";
      }
      out << "<polyline fill=\"none\" stroke=\"#000000\" stroke-width=\"2\" points=\""
          << polyline(c.representative[v], v, bx, py) << "\"/>\n";
      out << "</g>\n";
    }

    const double hy = by + kHeader + double(m) * (kPanelH + kGap);
    const std::size_t peak = std::max<std::size_t>(1, *std::max_element(c.histogram.begin(), c.histogram.end()));
    const double bar_w = kPanelW / 12.0;
    out << "<g class=\"panel histogram\" data-cluster=\"" << c.id << "\">\n";
    out << "<rect x=\"" << fixed2(bx) << "\" y=\"" << fixed2(hy) << "\" width=\"" << fixed2(kPanelW)
        << "\" height=\"" << fixed2(kPanelH) << "\" fill=\"none\" stroke=\"#999999\" stroke-width=\"0.5\"/>\n";
    for (std::size_t mo = 0; mo < 12; ++mo) {
      const double h = (kPanelH - 12) * double(c.histogram[mo]) / double(peak);
      const double x = bx + double(mo) * bar_w;
      out << "<rect x=\"" << fixed2(x + 1) << "\" y=\"" << fixed2(hy + kPanelH - 12 - h) << "\" width=\""
          << fixed2(bar_w - 2) << "\" height=\"" << fixed2(h) << "\" fill=\"hsl(" << mo * 30
          << ",70%,50%)\"><title>" << c.histogram[mo] << "</title></rect>\n";
      out << "<text x=\"" << fixed2(x + bar_w / 2) << "\" y=\"" << fixed2(hy + kPanelH - 2)
          << "\" font-size=\"8\" text-anchor=\"middle\">" << kMonthLetters[mo] << "</text>\n";
    }
    out << "</g>\n</g>\n";
  }
  out << "</svg>\n";
}

}  // namespace repdays
