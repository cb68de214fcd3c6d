#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace logem {

struct UniformLaw {
  double lo = 0.0;
  double hi = 1.0;
};

/// shift + Exp(mean = scale)
struct ShiftedExponentialLaw {
  double scale = 1.0;
  double shift = 0.0;
};

/// z1 with probability prob1, otherwise z2.
struct TwoPointLaw {
  double z1 = 0.0;
  double prob1 = 1.0;
  double z2 = 0.0;
};

/// Distribution of the jump marks Y_{j,k}. Its support must be bounded
/// below by `r_neg` (<= 0), the left end of the mark space [-R, inf).
class JumpLaw {
 public:
  using Family = std::variant<UniformLaw, ShiftedExponentialLaw, TwoPointLaw>;

  /// Validates the family parameters. When `r_neg` is omitted it defaults
  /// to min(0, support_min()). Throws ErrorKind::Configuration.
  explicit JumpLaw(Family family, std::optional<double> r_neg = std::nullopt);

  const Family& family() const noexcept { return family_; }
  double r_neg() const noexcept { return r_neg_; }

  double support_min() const;
  /// +infinity for shifted_exponential.
  double support_max() const;
  double mean() const;
  double variance() const;
  bool in_support(double z) const;

  /// Inverse-CDF transform of a uniform variate u in [0, 1).
  double quantile(double u) const;

 private:
  Family family_;
  double r_neg_;
};

struct LevyComponentSpec {
  double rate = 0.0;  // Poisson intensity, events per unit time
  JumpLaw law;

  /// Throws ErrorKind::Configuration naming "rate".
  void validate() const;
};

struct JumpEvent {
  double time;
  double mark;

  friend bool operator==(const JumpEvent&, const JumpEvent&) = default;
};

/// One sampled compound-Poisson driving path per component: events with
/// strictly increasing times in (0, horizon].
class JumpRealization {
 public:
  JumpRealization() = default;
  JumpRealization(double horizon, std::vector<std::vector<JumpEvent>> events);

  double horizon() const noexcept { return horizon_; }
  std::size_t components() const noexcept { return events_.size(); }
  std::span<const JumpEvent> events(std::size_t j) const;
  std::size_t total_events() const noexcept;

  /// Stable 64-bit digest of horizon, times and marks (bitwise).
  std::uint64_t fingerprint() const noexcept;

  friend bool operator==(const JumpRealization&, const JumpRealization&) = default;

 private:
  double horizon_ = 0.0;
  std::vector<std::vector<JumpEvent>> events_;
};

/// Exact simulation via exponential interarrivals; a pure function of
/// (specs, horizon, seed, stream_index). Component j uses its own engine.
JumpRealization sample_jump_realization(std::span<const LevyComponentSpec> specs,
                                        double horizon, std::uint64_t seed,
                                        std::uint64_t stream_index);

/// Z_j(t) - Z_j(s): sum of marks with event time in (s, t].
double increment(const JumpRealization& r, std::size_t j, double s, double t);

/// Events of component j with time in (s, t], time-ordered.
std::span<const JumpEvent> events_in(const JumpRealization& r, std::size_t j,
                                     double s, double t);

/// ∫ (1 + |z|)^q ν(dz) with ν = rate * law, q >= 1.
double moment_integral(const JumpLaw& law, double rate, double q);

/// JSON array of {component, time, mark} records.
nlohmann::json realization_to_json(const JumpRealization& r);
JumpRealization realization_from_json(const nlohmann::json& j, double horizon,
                                      std::size_t components);

}  // namespace logem
