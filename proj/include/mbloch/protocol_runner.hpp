#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "mbloch/bloch_engine.hpp"
#include "mbloch/envelope_model.hpp"
#include "mbloch/model_core.hpp"

namespace mbloch {

/// Rectangular drive pulse. A is signed: -A rotates about +x instead of -x.
struct Pulse {
  double A{0};
  double delta{0};
  double duration{0};
};

/// Free evolution; the same as a Pulse with A = 0.
struct Wait {
  double delta{0};
  double duration{0};
};

using Segment = std::variant<Pulse, Wait>;

double segment_duration(const Segment& seg);
DriveParams<double> segment_drive(const Segment& seg, double gamma);

struct PulseSequence {
  std::vector<Segment> segments;
  double gamma{0};
};

enum class Model { BlochExact, EnvelopeRWA, NewtonFull };

/// "bloch", "rwa", "newton"
std::string_view model_name(Model m);
Model parse_model(std::string_view name);

/// What the NewtonFull layer needs beyond the pulse sequence: the physical
/// oscillators plus integration and demodulation resolution. The sequence's
/// gamma overrides params.gamma.
struct NewtonRealization {
  SystemParams<double> params;
  int stepsPerCarrierPeriod{200};
  int windowPeriods{1};
};

struct ProtocolResult {
  std::vector<double> t;
  std::vector<double> popA;
  std::vector<double> popB;
  std::vector<BlochVector<double>> bloch;
  Model model{Model::BlochExact};
};

/// Applies the segments in order starting from `initial` at t = 0. The result
/// holds the initial sample followed by samplesPerSegment evenly spaced
/// samples per segment, the last of which is the segment's end state.
///
/// NewtonFull realizes every segment as dk(t) = -2 Omega0 m A cos(w t) with a
/// single global drive clock w = DeltaOmega - delta, so all segments must share
/// one delta.
ProtocolResult run_sequence(const PulseSequence& seq, const BlochVector<double>& initial, int samplesPerSegment,
                            Model model, const std::optional<NewtonRealization>& newton = std::nullopt);

/// Continuous drive from the north pole over [0, tMax], `samples` points
/// including both endpoints.
ProtocolResult rabi_scan(const DriveParams<double>& drive, double tMax, int samples, Model model,
                         const std::optional<NewtonRealization>& newton = std::nullopt);

/// Final state of one sequence per entry of a waiting-time grid.
struct ScanResult {
  std::vector<double> T;
  std::vector<double> popA;
  std::vector<double> popB;
  std::vector<BlochVector<double>> bloch;
  Model model{Model::BlochExact};
};

/// pi/2 pulse, wait T, pi/2 pulse; pulses last (pi/2)/|A|.
PulseSequence ramsey_sequence(const DriveParams<double>& drive, double T);

enum class HahnFinalPulse {
  ThreeHalvesPi,  ///< duration 3 pi/(2A) with the same A
  NegatedHalfPi,  ///< duration pi/(2A) with -A
};

/// pi/2 pulse, wait T/2, pi pulse, wait T/2, closing 3pi/2 rotation.
PulseSequence hahn_sequence(const DriveParams<double>& drive, double T,
                            HahnFinalPulse finalPulse = HahnFinalPulse::ThreeHalvesPi);

/// Grid points are independent and may run concurrently; output order follows
/// the grid.
ScanResult ramsey_scan(const DriveParams<double>& drive, std::span<const double> tGrid, Model model,
                       const std::optional<NewtonRealization>& newton = std::nullopt);

ScanResult hahn_scan(const DriveParams<double>& drive, std::span<const double> tGrid, Model model,
                     const std::optional<NewtonRealization>& newton = std::nullopt,
                     HahnFinalPulse finalPulse = HahnFinalPulse::ThreeHalvesPi);

struct CompareOptions {
  int stepsPerCarrierPeriod{200};
  int windowPeriods{1};
  int samples{401};
  double delta{0};
};

struct CompareEntry {
  double ratio{0};  ///< A / Omega0
  double A{0};
  double duration{0};
  double maxDiscrepancy{0};
};

struct CompareReport {
  std::vector<CompareEntry> entries;
  bool monotonicIncreasing{false};
};

/// For each A/Omega0 ratio, runs a Rabi flop (duration 2 pi/A; 100 carrier
/// periods when A = 0) on the NewtonFull and BlochExact layers and records the
/// largest absolute population difference. gamma comes from params.
CompareReport compare_layers(const SystemParams<double>& params, std::span<const double> ratios,
                             const CompareOptions& options = {});

}  // namespace mbloch
