#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mbloch/envelope_model.hpp"
#include "mbloch/model_core.hpp"
#include "mbloch/newton_sim.hpp"
#include "mbloch/protocol_runner.hpp"

namespace mbloch::cli {

enum class OutputFormat { Csv, Json };

/// `points` evenly spaced values from start to stop inclusive.
struct LinearGrid {
  double start{0};
  double stop{0};
  int points{0};
  friend bool operator==(const LinearGrid&, const LinearGrid&) = default;
};

using Grid = std::variant<LinearGrid, std::vector<double>>;

std::vector<double> expand(const Grid& grid);

struct SpectrumProtocol {
  Grid dk;
  friend bool operator==(const SpectrumProtocol&, const SpectrumProtocol&) = default;
};

/// Initial envelopes (a0, b0), converted with prepare_state.
struct EnvelopeInitial {
  std::complex<double> a{1, 0};
  std::complex<double> b{0, 0};
  friend bool operator==(const EnvelopeInitial&, const EnvelopeInitial&) = default;
};

using InitialCondition = std::variant<NewtonState<double>, EnvelopeInitial>;

struct SimulateProtocol {
  DetuningSpec<double> detuning{ConstantDetuning<double>{}};
  ForceSpec<double> force{NoForce<double>{}};
  InitialCondition initial{EnvelopeInitial{}};
  double tEnd{0};
  int stepsPerCarrierPeriod{200};
  int stride{1};
  friend bool operator==(const SimulateProtocol&, const SimulateProtocol&) = default;
};

struct RabiProtocol {
  double tMax{0};
  int samples{401};
  friend bool operator==(const RabiProtocol&, const RabiProtocol&) = default;
};

struct RamseyProtocol {
  Grid waits;
  friend bool operator==(const RamseyProtocol&, const RamseyProtocol&) = default;
};

struct HahnProtocol {
  Grid waits;
  HahnFinalPulse finalPulse{HahnFinalPulse::ThreeHalvesPi};
  friend bool operator==(const HahnProtocol&, const HahnProtocol&) = default;
};

struct CompareProtocol {
  std::vector<double> ratios;
  int samples{401};
  double delta{0};
  friend bool operator==(const CompareProtocol&, const CompareProtocol&) = default;
};

using Protocol =
    std::variant<SpectrumProtocol, SimulateProtocol, RabiProtocol, RamseyProtocol, HahnProtocol, CompareProtocol>;

/// Subcommand name of the protocol ("spectrum", "simulate", ...).
std::string_view protocol_name(const Protocol& p);

struct NewtonSettings {
  int stepsPerCarrierPeriod{200};
  int windowPeriods{1};
  friend bool operator==(const NewtonSettings&, const NewtonSettings&) = default;
};

struct OutputSpec {
  std::string path;  ///< empty: standard output
  OutputFormat format{OutputFormat::Csv};
  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

/// One run of the tool. Drive gamma is taken from system.gamma.
struct RunConfig {
  SystemParams<double> system;
  double driveA{0};
  double driveDelta{0};
  Protocol protocol{RabiProtocol{}};
  Model model{Model::BlochExact};
  NewtonSettings newton;
  OutputSpec output;

  DriveParams<double> drive() const { return {driveA, driveDelta, system.gamma}; }
  NewtonRealization realization() const {
    return {system, newton.stepsPerCarrierPeriod, newton.windowPeriods};
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ValidationError on malformed or out-of-range input.
RunConfig parse_config(const nlohmann::json& doc);
nlohmann::json to_json(const RunConfig& config);

OutputFormat parse_format(std::string_view name);
std::string_view format_name(OutputFormat f);

}  // namespace mbloch::cli
