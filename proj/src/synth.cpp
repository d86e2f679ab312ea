#include "repdays/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "repdays/error.hpp"
#include "repdays/rng.hpp"

namespace repdays {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kYear = 365.25;

double bump(double h, double center, double width) {
  const double z = (h - center) / width;
  return std::exp(-0.5 * z * z);
}

int day_of_year(const Date& d) {
  const Date jan1{d.year, 1, 1};
  return int((d.to_sys_days() - jan1.to_sys_days()).count());
}

// Per-variable state carried across days (weather persistence).
struct VariableState {
  double persistence = 0.0;
};

void fill_solar(const VariableSpec& spec, double season, Rng& rng, VariableState& state,
                bool event, ProfileMatrix& m, std::size_t col) {
  const double noon = 12.5;
  const double half_width = 6.0 + 1.2 * season;
  const double peak =
      spec.level * (1.0 + spec.seasonal_amplitude * season) / (1.0 + spec.seasonal_amplitude);

  state.persistence = 0.6 * state.persistence + 0.04 * rng.normal();
  double clear = std::clamp(1.0 - std::abs(state.persistence), 0.75, 1.0);
  if (rng.bernoulli(spec.disturbance_probability)) clear *= rng.uniform(0.6, 0.9);

  // Cloud event: whole-day overcast, or a deep dropout lasting a few hours.
  double overcast = 1.0;
  double dip_center = -100.0, dip_width = 0.0, dip_depth = 1.0;
  if (event) {
    if (rng.bernoulli(0.5)) {
      overcast = rng.uniform(0.1, 0.35);
    } else {
      dip_center = rng.uniform(noon - 3.0, noon + 3.0);
      dip_width = rng.uniform(2.0, 3.5);
      dip_depth = rng.uniform(0.0, 0.15);
    }
  }

  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    const double t = double(h) + 0.5;
    const double x = (t - (noon - half_width)) / (2.0 * half_width);
    double v = 0.0;
    if (x > 0.0 && x < 1.0) {
      v = peak * std::pow(std::sin(kPi * x), 1.2) * clear * overcast;
      if (std::abs(t - dip_center) <= dip_width) v *= dip_depth;
      v += spec.noise * spec.level * rng.normal();
      v = std::max(v, 0.0);
    }
    m(h, col) = v;
  }
}

void fill_load(const VariableSpec& spec, double season, Rng& rng, VariableState& state, bool event,
               ProfileMatrix& m, std::size_t col) {
  const double level = spec.level * (1.0 + spec.seasonal_amplitude * season);
  const double summer_weight = 0.5 * (season + 1.0);
  const double evening_peak = 17.0 + 1.5 * (1.0 - summer_weight);

  state.persistence = 0.7 * state.persistence + 0.03 * rng.normal();
  const double shift = rng.bernoulli(spec.disturbance_probability) ? rng.uniform(-0.1, 0.1) : 0.0;
  // day-to-day schedule variation moves the whole shape by up to 1.5 hours
  const double jitter = rng.uniform(-1.5, 1.5);

  double spike = 0.0, spike_center = -100.0, spike_width = 0.0, scale = 1.0;
  if (event) {
    if (rng.bernoulli(0.6)) {
      spike = rng.uniform(0.45, 0.8);
      spike_center = rng.uniform(9.0, 21.0);
      spike_width = rng.uniform(1.5, 4.0);
    } else {
      scale = rng.uniform(0.5, 0.65);
    }
  }

  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    const double t = double(h) - jitter;
    const double summer = bump(t, evening_peak, 4.0);
    const double winter = 0.6 * bump(t, 7.5, 1.5) + 0.8 * bump(t, 19.0, 2.0);
    const double shape = summer_weight * summer + (1.0 - summer_weight) * winter;
    double v = level * (1.0 + spec.diurnal_amplitude * (shape - 0.3) + state.persistence + shift);
    v *= scale;
    v += spike * spec.level * bump(t, spike_center, spike_width);
    v += spec.noise * spec.level * rng.normal();
    m(h, col) = v;
  }
}

void fill_wind(const VariableSpec& spec, double season, Rng& rng, VariableState& state, bool event,
               ProfileMatrix& m, std::size_t col) {
  const double level = spec.level * (1.0 + spec.seasonal_amplitude * season);
  state.persistence = 0.8 * state.persistence + 0.15 * rng.normal();
  double day_factor = std::exp(state.persistence);
  if (rng.bernoulli(spec.disturbance_probability)) day_factor *= rng.uniform(0.5, 0.8);
  const double lull = event ? rng.uniform(0.0, 0.15) : 1.0;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    const double t = double(h);
    double v = level * day_factor * (1.0 + spec.diurnal_amplitude * std::cos(2.0 * kPi * (t - 3.0) / 24.0));
    v = v * lull + spec.noise * spec.level * rng.normal();
    m(h, col) = std::max(v, 0.0);
  }
}

}  // namespace

std::string to_string(VariableKind k) {
  switch (k) {
    case VariableKind::Load: return "load";
    case VariableKind::Solar: return "solar";
    case VariableKind::Wind: return "wind";
  }
  return "unknown";
}

VariableKind variable_kind_from_string(const std::string& s) {
  if (s == "load") return VariableKind::Load;
  if (s == "solar") return VariableKind::Solar;
  if (s == "wind") return VariableKind::Wind;
  throw ArgumentError("unknown variable kind '" + s + "'");
}

SynthConfig SynthConfig::standard(std::uint64_t seed, std::size_t n_days, double outlier_probability,
                                  bool with_wind) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.n_days = n_days;
  const std::size_t kinds = with_wind ? 3 : 2;
  // split the day-level probability evenly: 1 - (1 - q)^kinds = p
  const double q = 1.0 - std::pow(1.0 - outlier_probability, 1.0 / double(kinds));
  cfg.variables.push_back({"load", VariableKind::Load, 3000.0, 0.35, 0.35, 196.0, 0.015, q, 0.1});
  cfg.variables.push_back({"solar", VariableKind::Solar, 1200.0, 0.0, 0.25, 172.0, 0.02, q, 0.25});
  if (with_wind) cfg.variables.push_back({"wind", VariableKind::Wind, 400.0, 0.3, 0.2, 80.0, 0.05, q, 0.1});
  return cfg;
}

void SynthConfig::validate() const {
  if (n_days < 1) throw ArgumentError("synth: n_days must be at least 1");
  if (variables.empty()) throw ArgumentError("synth: no variables configured");
  if (!start.valid()) throw ArgumentError("synth: invalid start date");
  for (const auto& v : variables) {
    if (v.name.empty()) throw ArgumentError("synth: variable without a name");
    if (!(v.event_probability >= 0.0 && v.event_probability <= 1.0))
      throw ArgumentError("synth: event probability of '" + v.name + "' outside [0, 1]");
    if (!(v.disturbance_probability >= 0.0 && v.disturbance_probability <= 1.0))
      throw ArgumentError("synth: disturbance probability of '" + v.name + "' outside [0, 1]");
    if (!(v.noise >= 0.0)) throw ArgumentError("synth: negative noise level for '" + v.name + "'");
    if (!(v.level > 0.0)) throw ArgumentError("synth: level of '" + v.name + "' must be positive");
  }
  for (std::size_t i = 0; i < variables.size(); ++i)
    for (std::size_t j = i + 1; j < variables.size(); ++j)
      if (variables[i].name == variables[j].name)
        throw ArgumentError("synth: duplicate variable name '" + variables[i].name + "'");
}

double SynthConfig::day_outlier_probability() const {
  double none = 1.0;
  for (const auto& v : variables) none *= 1.0 - v.event_probability;
  return 1.0 - none;
}

SynthResult generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const std::size_t m = cfg.variables.size();

  SynthResult out;
  for (const auto& v : cfg.variables) out.dataset.variable_names.push_back(v.name);
  std::vector<VariableState> states(m);

  for (std::size_t i = 0; i < cfg.n_days; ++i) {
    const Date date = cfg.start.plus_days(int(i));
    const int doy = day_of_year(date);
    DayProfile day{date, ProfileMatrix(kHoursPerDay, m), out.dataset.variable_names};
    DayLabel label{date, false, {}};
    for (std::size_t v = 0; v < m; ++v) {
      const auto& spec = cfg.variables[v];
      const double season = std::cos(2.0 * kPi * (double(doy) - spec.seasonal_peak_doy) / kYear);
      const bool event = rng.uniform() < spec.event_probability;
      if (event) {
        label.outlier = true;
        switch (spec.kind) {
          case VariableKind::Load: label.events.push_back(spec.name + ":spike"); break;
          case VariableKind::Solar: label.events.push_back(spec.name + ":cloud"); break;
          case VariableKind::Wind: label.events.push_back(spec.name + ":lull"); break;
        }
      }
      switch (spec.kind) {
        case VariableKind::Load: fill_load(spec, season, rng, states[v], event, day.matrix, v); break;
        case VariableKind::Solar: fill_solar(spec, season, rng, states[v], event, day.matrix, v); break;
        case VariableKind::Wind: fill_wind(spec, season, rng, states[v], event, day.matrix, v); break;
      }
    }
    out.dataset.days.push_back(std::move(day));
    out.labels.push_back(std::move(label));
  }
  return out;
}

}  // namespace repdays
