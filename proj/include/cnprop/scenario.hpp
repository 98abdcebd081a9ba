#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cnprop/analysis.hpp"
#include "cnprop/lattice.hpp"
#include "cnprop/physics.hpp"
#include "cnprop/propagator.hpp"

namespace cnprop {

struct SourceConfig {
  double s0 = 5.0;
  /// Ramp time of S(t); empty for a constant amplitude.
  std::optional<double> ramp;
  /// Drive frequency; empty derives it from p0 (linearized dispersion under
  /// absorbing boundaries, p0^2 / 2 otherwise).
  std::optional<double> omega;
  double p0 = 5.0;
  /// Source position, mapped to the cell containing it.
  double x = 0.0;

  bool operator==(const SourceConfig&) const = default;
};

/// One scalar config key swept over count evenly spaced values.
struct SweepSpec {
  std::string key;
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 1;

  bool operator==(const SweepSpec&) const = default;
};

/// Fully resolved scenario. Every field maps to one dotted key of the
/// key-value config format (see config_keys()).
struct RunConfig {
  double x_min = -20.0;
  double x_max = 20.0;
  std::size_t n_sites = 1000;

  double t0 = 0.0;
  double dt = 0.002;
  std::size_t n_steps = 2000;

  BoundaryMode boundary = BoundaryMode::Dirichlet;
  double abc_alpha1 = 24.0;
  double abc_alpha2 = 25.0;

  bool packet_enabled = false;
  PacketSpec packet{-10.0, 7.0, 1.0};

  PotentialKind potential = PotentialKind::Free;
  /// Empty matches the height to p0^2 / 2.
  std::optional<double> potential_v0;
  double potential_xb = 2.0;

  bool source_enabled = false;
  SourceConfig source;

  Strategy strategy = Strategy::TridiagonalSolve;
  std::size_t frame_stride = 100;
  std::string output;

  /// Probability-in-interval series, recorded at every frame.
  std::optional<double> interval_a;
  std::optional<double> interval_b;
  /// Steady-state comparison region, with the exclusion radius in grid spacings.
  std::optional<double> steady_a;
  std::optional<double> steady_b;
  double steady_exclusion = 2.0;
  bool transmission = false;
  std::optional<double> monitor_x;
  std::size_t settle_max_steps = 200000;

  std::optional<SweepSpec> sweep;

  bool operator==(const RunConfig&) const = default;
};

/// Dotted keys in canonical order.
std::vector<std::string> config_keys();

/// Parses a key-value document (`key = value`, `#` comments) on top of base.
/// Unknown or repeated keys and malformed values throw ConfigError.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// Sets one key from its textual value. Throws ConfigError.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);
std::string get_config_value(const RunConfig& config, std::string_view key);

/// Canonical text form with every key materialized.
std::string serialize_config(const RunConfig& config);

/// Throws ConfigError describing the first violated constraint.
void validate(const RunConfig& config);

struct Preset {
  std::string name;
  std::string description;
  RunConfig config;
};

/// Scenarios fig1 .. fig7.
const std::vector<Preset>& list_presets();
/// Throws ConfigError for unknown names.
const Preset& find_preset(std::string_view name);

struct SweepPoint {
  double value = 0.0;
  double t_numeric = 0.0;
  std::optional<double> t_analytic;
  std::size_t settle_steps = 0;
};

struct RunReport {
  std::size_t steps_run = 0;
  std::size_t frame_count = 0;
  double initial_norm = 0.0;
  double final_norm = 0.0;
  double max_step_drift = 0.0;
  double cumulative_drift = 0.0;
  /// Norm after each step, starting with the initial state.
  std::vector<double> norms;
  /// (time, probability) per frame when an interval is configured.
  std::vector<std::pair<double, double>> interval_probability;
  std::optional<double> omega;
  std::optional<double> steady_state_error;
  std::optional<TransmissionEstimate> transmission;
  std::optional<double> transmission_analytic;
  std::vector<SweepPoint> sweep;
  double step_seconds = 0.0;
  double seconds_per_step = 0.0;
  std::vector<std::string> warnings;
};

/// Receives records in step order.
class RecordSink {
 public:
  virtual ~RecordSink() = default;
  virtual void header(const RunConfig&) {}
  virtual void frame(std::size_t /*step*/, double /*time*/, const WaveFunction&) {}
  virtual void sweep_point(const RunConfig&, const SweepPoint&) {}
  virtual void summary(const RunReport&) {}
};

/// Newline-delimited JSON records: header, frame*, sweep_point*, summary.
class JsonLinesWriter : public RecordSink {
 public:
  explicit JsonLinesWriter(std::ostream& out) : out_(out) {}

  void header(const RunConfig& config) override;
  void frame(std::size_t step, double time, const WaveFunction& psi) override;
  void sweep_point(const RunConfig& config, const SweepPoint& point) override;
  void summary(const RunReport& report) override;

  /// Error record for a failed run.
  void error(std::string_view code, std::string_view message);

 private:
  std::ostream& out_;
};

/// Runs the scenario (or its sweep) and streams records to sink.
RunReport run(const RunConfig& config, RecordSink* sink = nullptr);

/// Effective drive frequency for the configured source.
double resolved_omega(const RunConfig& config);
/// Effective barrier or well magnitude.
double resolved_v0(const RunConfig& config);

}  // namespace cnprop
