#include "logem/levy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "logem/errors.hpp"

namespace logem {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) {
    fail(ErrorKind::Configuration, std::string(field) + " must be finite");
  }
}

void validate_family(const JumpLaw::Family& family) {
  std::visit(overloaded{
                 [](const UniformLaw& u) {
                   require_finite(u.lo, "uniform.lo");
                   require_finite(u.hi, "uniform.hi");
                   if (!(u.lo < u.hi)) {
                     fail(ErrorKind::Configuration, "uniform.hi must exceed uniform.lo");
                   }
                 },
                 [](const ShiftedExponentialLaw& e) {
                   require_finite(e.scale, "shifted_exponential.scale");
                   require_finite(e.shift, "shifted_exponential.shift");
                   if (!(e.scale > 0.0)) {
                     fail(ErrorKind::Configuration,
                          "shifted_exponential.scale must be > 0");
                   }
                 },
                 [](const TwoPointLaw& t) {
                   require_finite(t.z1, "two_point.z1");
                   require_finite(t.z2, "two_point.z2");
                   require_finite(t.prob1, "two_point.prob1");
                   if (t.prob1 < 0.0 || t.prob1 > 1.0) {
                     fail(ErrorKind::Configuration, "two_point.prob1 must lie in [0, 1]");
                   }
                 },
             },
             family);
}

// Seed material for one component stream. seed_seq is fully specified by
// the standard, so the engine state is portable.
std::mt19937_64 component_engine(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t component) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(component),
                    static_cast<std::uint32_t>(component >> 32)};
  return std::mt19937_64(seq);
}

// 53 random bits mapped to the open interval (0, 1).
double next_uniform(std::mt19937_64& engine) {
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

void check_component(const JumpRealization& r, std::size_t j) {
  if (j >= r.components()) {
    fail(ErrorKind::Usage, "component index " + std::to_string(j) + " out of range (" +
                               std::to_string(r.components()) + " components)");
  }
}

// ∫_a^b (1 + z)^q dz for 0 <= a <= b.
double positive_power_integral(double a, double b, double q) {
  return (std::pow(1.0 + b, q + 1.0) - std::pow(1.0 + a, q + 1.0)) / (q + 1.0);
}

}  // namespace

JumpLaw::JumpLaw(Family family, std::optional<double> r_neg) : family_(family) {
  validate_family(family_);
  const double lo = support_min();
  r_neg_ = r_neg.value_or(std::min(0.0, lo));
  require_finite(r_neg_, "R_neg");
  if (r_neg_ > 0.0) {
    fail(ErrorKind::Configuration, "R_neg must be <= 0");
  }
  if (lo < r_neg_) {
    fail(ErrorKind::Configuration,
         "R_neg exceeds the support minimum " + std::to_string(lo) + " of the law");
  }
}

double JumpLaw::support_min() const {
  return std::visit(overloaded{
                        [](const UniformLaw& u) { return u.lo; },
                        [](const ShiftedExponentialLaw& e) { return e.shift; },
                        [](const TwoPointLaw& t) {
                          if (t.prob1 == 1.0) return t.z1;
                          if (t.prob1 == 0.0) return t.z2;
                          return std::min(t.z1, t.z2);
                        },
                    },
                    family_);
}

double JumpLaw::support_max() const {
  return std::visit(overloaded{
                        [](const UniformLaw& u) { return u.hi; },
                        [](const ShiftedExponentialLaw&) {
                          return std::numeric_limits<double>::infinity();
                        },
                        [](const TwoPointLaw& t) {
                          if (t.prob1 == 1.0) return t.z1;
                          if (t.prob1 == 0.0) return t.z2;
                          return std::max(t.z1, t.z2);
                        },
                    },
                    family_);
}

double JumpLaw::mean() const {
  return std::visit(overloaded{
                        [](const UniformLaw& u) { return 0.5 * (u.lo + u.hi); },
                        [](const ShiftedExponentialLaw& e) { return e.shift + e.scale; },
                        [](const TwoPointLaw& t) {
                          return t.prob1 * t.z1 + (1.0 - t.prob1) * t.z2;
                        },
                    },
                    family_);
}

double JumpLaw::variance() const {
  return std::visit(overloaded{
                        [](const UniformLaw& u) {
                          const double w = u.hi - u.lo;
                          return w * w / 12.0;
                        },
                        [](const ShiftedExponentialLaw& e) { return e.scale * e.scale; },
                        [](const TwoPointLaw& t) {
                          const double d = t.z1 - t.z2;
                          return t.prob1 * (1.0 - t.prob1) * d * d;
                        },
                    },
                    family_);
}

bool JumpLaw::in_support(double z) const {
  return std::visit(overloaded{
                        [z](const UniformLaw& u) { return z >= u.lo && z <= u.hi; },
                        [z](const ShiftedExponentialLaw& e) {
                          return z >= e.shift && std::isfinite(z);
                        },
                        [z](const TwoPointLaw& t) {
                          return (t.prob1 > 0.0 && z == t.z1) ||
                                 (t.prob1 < 1.0 && z == t.z2);
                        },
                    },
                    family_);
}

double JumpLaw::quantile(double u) const {
  return std::visit(overloaded{
                        [u](const UniformLaw& l) { return l.lo + (l.hi - l.lo) * u; },
                        [u](const ShiftedExponentialLaw& e) {
                          return e.shift - e.scale * std::log1p(-u);
                        },
                        [u](const TwoPointLaw& t) { return u < t.prob1 ? t.z1 : t.z2; },
                    },
                    family_);
}

void LevyComponentSpec::validate() const {
  if (!std::isfinite(rate) || rate < 0.0) {
    fail(ErrorKind::Configuration, "rate must be finite and >= 0");
  }
}

JumpRealization::JumpRealization(double horizon, std::vector<std::vector<JumpEvent>> events)
    : horizon_(horizon), events_(std::move(events)) {
  for (std::size_t j = 0; j < events_.size(); ++j) {
    double prev = 0.0;
    for (const auto& e : events_[j]) {
      if (!(e.time > prev) || e.time > horizon_ || !std::isfinite(e.mark)) {
        fail(ErrorKind::Usage, "component " + std::to_string(j) +
                                   ": event times must be strictly increasing in (0, horizon]");
      }
      prev = e.time;
    }
  }
}

std::span<const JumpEvent> JumpRealization::events(std::size_t j) const {
  return events_.at(j);
}

std::size_t JumpRealization::total_events() const noexcept {
  std::size_t n = 0;
  for (const auto& c : events_) n += c.size();
  return n;
}

std::uint64_t JumpRealization::fingerprint() const noexcept {
  // FNV-1a over the raw bit patterns.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(std::bit_cast<std::uint64_t>(horizon_));
  for (const auto& c : events_) {
    mix(c.size());
    for (const auto& e : c) {
      mix(std::bit_cast<std::uint64_t>(e.time));
      mix(std::bit_cast<std::uint64_t>(e.mark));
    }
  }
  return h;
}

JumpRealization sample_jump_realization(std::span<const LevyComponentSpec> specs,
                                        double horizon, std::uint64_t seed,
                                        std::uint64_t stream_index) {
  if (specs.empty()) fail(ErrorKind::Usage, "at least one Levy component is required");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    fail(ErrorKind::Usage, "horizon must be finite and > 0");
  }
  std::vector<std::vector<JumpEvent>> events(specs.size());
  for (std::size_t j = 0; j < specs.size(); ++j) {
    const auto& spec = specs[j];
    try {
      spec.validate();
    } catch (const Error& e) {
      throw e.with_context("levy[" + std::to_string(j) + "]");
    }
    if (spec.rate == 0.0) continue;
    auto engine = component_engine(seed, stream_index, j);
    double t = 0.0;
    while (true) {
      t -= std::log1p(-next_uniform(engine)) / spec.rate;
      if (t > horizon) break;
      const double z = spec.law.quantile(next_uniform(engine));
      if (z < spec.law.r_neg()) {
        fail(ErrorKind::Usage, "sampled mark below the support floor R_neg");
      }
      // a tiny gap can round away at large t
      if (!events[j].empty() && !(t > events[j].back().time)) continue;
      events[j].push_back({t, z});
    }
  }
  return JumpRealization(horizon, std::move(events));
}

std::span<const JumpEvent> events_in(const JumpRealization& r, std::size_t j, double s,
                                     double t) {
  check_component(r, j);
  if (!(s >= 0.0) || !(s <= t)) {
    fail(ErrorKind::Usage, "events_in requires 0 <= s <= t");
  }
  const auto all = r.events(j);
  auto by_time = [](double v, const JumpEvent& e) { return v < e.time; };
  const auto first = std::upper_bound(all.begin(), all.end(), s, by_time);
  const auto last = std::upper_bound(first, all.end(), t, by_time);
  return {first, last};
}

double increment(const JumpRealization& r, std::size_t j, double s, double t) {
  check_component(r, j);
  if (t > r.horizon()) fail(ErrorKind::Usage, "increment interval exceeds the horizon");
  double sum = 0.0;
  for (const auto& e : events_in(r, j, s, t)) sum += e.mark;
  return sum;
}

double moment_integral(const JumpLaw& law, double rate, double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) fail(ErrorKind::Usage, "moment order q must be >= 1");
  if (rate == 0.0) return 0.0;
  const double per_jump = std::visit(
      overloaded{
          [q](const UniformLaw& u) {
            double integral = 0.0;
            if (u.lo >= 0.0) {
              integral = positive_power_integral(u.lo, u.hi, q);
            } else if (u.hi <= 0.0) {
              integral = positive_power_integral(-u.hi, -u.lo, q);
            } else {
              integral = positive_power_integral(0.0, u.hi, q) +
                         positive_power_integral(0.0, -u.lo, q);
            }
            return integral / (u.hi - u.lo);
          },
          [q](const TwoPointLaw& t) {
            return t.prob1 * std::pow(1.0 + std::abs(t.z1), q) +
                   (1.0 - t.prob1) * std::pow(1.0 + std::abs(t.z2), q);
          },
          [q](const ShiftedExponentialLaw& e) {
            // y = (z - shift) / scale ~ Exp(1); the |z| kink sits at y0.
            // Log space keeps the far tail at 0 instead of inf * 0.
            auto integrand = [&](double y) {
              return std::exp(q * std::log1p(std::abs(e.shift + e.scale * y)) - y);
            };
            constexpr double tol = 1e-12;
            const double y0 = e.shift < 0.0 ? -e.shift / e.scale : 0.0;
            double head = 0.0;
            if (y0 > 0.0) {
              boost::math::quadrature::tanh_sinh<double> finite;
              head = finite.integrate(integrand, 0.0, y0, tol);
            }
            boost::math::quadrature::exp_sinh<double> tail;
            const double rest =
                tail.integrate([&](double v) { return integrand(y0 + v); }, tol);
            return head + rest;
          },
      },
      law.family());
  return rate * per_jump;
}

nlohmann::json realization_to_json(const JumpRealization& r) {
  auto out = nlohmann::json::array();
  for (std::size_t j = 0; j < r.components(); ++j) {
    for (const auto& e : r.events(j)) {
      out.push_back({{"component", j}, {"time", e.time}, {"mark", e.mark}});
    }
  }
  return out;
}

JumpRealization realization_from_json(const nlohmann::json& j, double horizon,
                                      std::size_t components) {
  std::vector<std::vector<JumpEvent>> events(components);
  for (const auto& rec : j) {
    const auto c = rec.at("component").get<std::size_t>();
    if (c >= components) fail(ErrorKind::Usage, "record component out of range");
    events[c].push_back({rec.at("time").get<double>(), rec.at("mark").get<double>()});
  }
  return JumpRealization(horizon, std::move(events));
}

}  // namespace logem
