#include "mbloch/protocol_runner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <numbers>
#include <string>
#include <thread>

#include "mbloch/errors.hpp"
#include "mbloch/newton_sim.hpp"

namespace mbloch {
namespace {

constexpr double kPi = std::numbers::pi;

struct SamplePoint {
  std::size_t segment;
  double local;   // time since segment start
  double global;  // time since sequence start
};

void validate_sequence(const PulseSequence& seq, int samplesPerSegment) {
  if (seq.segments.empty()) throw ValidationError("pulse sequence is empty");
  if (samplesPerSegment < 1) throw ValidationError("samplesPerSegment must be >= 1");
  if (!std::isfinite(seq.gamma) || seq.gamma < 0) throw ValidationError("gamma must be finite and >= 0");
  for (const auto& seg : seq.segments) {
    const double d = segment_duration(seg);
    if (!std::isfinite(d)) throw ValidationError("segment duration must be finite");
    if (d < 0) throw ValidationError("segment duration must be non-negative");
    const auto drive = segment_drive(seg, seq.gamma);
    if (!std::isfinite(drive.A) || !std::isfinite(drive.delta)) throw ValidationError("segment drive must be finite");
  }
}

std::vector<double> segment_starts(const PulseSequence& seq) {
  std::vector<double> starts;
  starts.reserve(seq.segments.size() + 1);
  double t = 0;
  for (const auto& seg : seq.segments) {
    starts.push_back(t);
    t += segment_duration(seg);
  }
  starts.push_back(t);
  return starts;
}

std::vector<SamplePoint> sample_points(const PulseSequence& seq, const std::vector<double>& starts, int perSegment) {
  std::vector<SamplePoint> pts;
  pts.reserve(seq.segments.size() * static_cast<std::size_t>(perSegment));
  for (std::size_t i = 0; i < seq.segments.size(); ++i) {
    const double d = segment_duration(seq.segments[i]);
    for (int j = 1; j <= perSegment; ++j) {
      const double local = d * static_cast<double>(j) / perSegment;
      pts.push_back({i, local, starts[i] + local});
    }
  }
  return pts;
}

void push_sample(ProtocolResult& out, double t, const BlochVector<double>& s, double popA, double popB) {
  out.t.push_back(t);
  out.bloch.push_back(s);
  out.popA.push_back(popA);
  out.popB.push_back(popB);
}

ProtocolResult run_bloch(const PulseSequence& seq, const BlochVector<double>& initial,
                         const std::vector<SamplePoint>& pts) {
  ProtocolResult out;
  out.model = Model::BlochExact;
  auto pops = populations(initial);
  push_sample(out, 0.0, initial, pops(0), pops(1));

  BlochVector<double> segStart = initial;
  std::size_t current = 0;
  for (const auto& pt : pts) {
    while (current < pt.segment) {
      segStart = propagate_bloch_segment(segStart, segment_drive(seq.segments[current], seq.gamma),
                                         segment_duration(seq.segments[current]));
      ++current;
    }
    const auto s = propagate_bloch_segment(segStart, segment_drive(seq.segments[current], seq.gamma), pt.local);
    pops = populations(s);
    push_sample(out, pt.global, s, pops(0), pops(1));
  }
  return out;
}

ProtocolResult run_rwa(const PulseSequence& seq, const BlochVector<double>& initial,
                       const std::vector<SamplePoint>& pts) {
  ProtocolResult out;
  out.model = Model::EnvelopeRWA;
  Vector2c<double> segStart = from_bloch(initial);
  push_sample(out, 0.0, to_bloch(segStart), std::norm(segStart(0)), std::norm(segStart(1)));

  std::size_t current = 0;
  for (const auto& pt : pts) {
    while (current < pt.segment) {
      segStart = analytic_solution(segStart, segment_drive(seq.segments[current], seq.gamma),
                                   segment_duration(seq.segments[current]));
      ++current;
    }
    const auto psi = analytic_solution(segStart, segment_drive(seq.segments[current], seq.gamma), pt.local);
    push_sample(out, pt.global, to_bloch(psi), std::norm(psi(0)), std::norm(psi(1)));
  }
  return out;
}

Vector2c<double> interpolate(const EnvelopeSeries<double>& env, double t) {
  const auto& ts = env.t;
  if (t <= ts.front()) return {env.a.front(), env.b.front()};
  if (t >= ts.back()) return {env.a.back(), env.b.back()};
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
  return {(1 - w) * env.a[lo] + w * env.a[hi], (1 - w) * env.b[lo] + w * env.b[hi]};
}

ProtocolResult run_newton(const PulseSequence& seq, const BlochVector<double>& initial,
                          const std::vector<double>& starts, const std::vector<SamplePoint>& pts,
                          const NewtonRealization& realization) {
  const double delta = segment_drive(seq.segments.front(), seq.gamma).delta;
  for (const auto& seg : seq.segments)
    if (segment_drive(seg, seq.gamma).delta != delta)
      throw ValidationError("NewtonFull needs one drive clock: all segments must share delta");
  if (realization.windowPeriods < 0) throw ConfigurationError("windowPeriods must be >= 0");

  SystemParams<double> params = realization.params;
  params.gamma = seq.gamma;
  validate(params);
  const auto freqs = derive_frequencies(params);
  const double omegaDrive = freqs.deltaOmegaExact - delta;

  std::vector<double> amplitudes;
  amplitudes.reserve(seq.segments.size());
  for (const auto& seg : seq.segments) amplitudes.push_back(segment_drive(seg, seq.gamma).A);

  const double total = starts.back();
  const auto detuning = [&, scale = -2 * freqs.omega0 * params.m](double t) {
    if (t < 0 || t >= total) return 0.0;
    // last segment whose start is <= t; zero-length segments are skipped naturally
    const auto it = std::upper_bound(starts.begin(), starts.end() - 1, t);
    const std::size_t idx = static_cast<std::size_t>(it - starts.begin()) - 1;
    return scale * amplitudes[idx] * std::cos(omegaDrive * t);
  };

  const Vector2c<double> psi0 = from_bloch(initial);
  const auto state0 = prepare_state(params, psi0(0), psi0(1), 0.0);
  const double carrierPeriod = 2 * kPi / freqs.omega0;
  const double tEnd = total + (realization.windowPeriods + 1) * carrierPeriod;
  const auto traj = integrate_with(params, detuning, [](double) { return 0.0; }, state0, tEnd,
                                   realization.stepsPerCarrierPeriod);
  const auto env = demodulate(traj, freqs.omega0, realization.windowPeriods, omegaDrive);

  ProtocolResult out;
  out.model = Model::NewtonFull;
  const auto record = [&](double t) {
    const Vector2c<double> psi = interpolate(env, t);
    push_sample(out, t, to_bloch(psi), std::norm(psi(0)), std::norm(psi(1)));
  };
  record(0.0);
  for (const auto& pt : pts) record(pt.global);
  return out;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  pool.clear();  // joins
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

ScanResult final_states(std::span<const double> tGrid, Model model,
                        const std::function<PulseSequence(double)>& build,
                        const std::optional<NewtonRealization>& newton) {
  for (double T : tGrid)
    if (!std::isfinite(T) || T < 0) throw ValidationError("waiting times must be finite and non-negative");

  ScanResult out;
  out.model = model;
  const std::size_t n = tGrid.size();
  out.T.assign(tGrid.begin(), tGrid.end());
  out.popA.resize(n);
  out.popB.resize(n);
  out.bloch.resize(n);
  const BlochVector<double> north(0, 0, 1);
  parallel_for(n, [&](std::size_t i) {
    const auto r = run_sequence(build(tGrid[i]), north, 1, model, newton);
    out.popA[i] = r.popA.back();
    out.popB[i] = r.popB.back();
    out.bloch[i] = r.bloch.back();
  });
  return out;
}

}  // namespace

double segment_duration(const Segment& seg) {
  return std::visit([](const auto& s) { return s.duration; }, seg);
}

DriveParams<double> segment_drive(const Segment& seg, double gamma) {
  if (const auto* p = std::get_if<Pulse>(&seg)) return {p->A, p->delta, gamma};
  return {0.0, std::get<Wait>(seg).delta, gamma};
}

std::string_view model_name(Model m) {
  switch (m) {
    case Model::BlochExact:
      return "bloch";
    case Model::EnvelopeRWA:
      return "rwa";
    case Model::NewtonFull:
      return "newton";
  }
  return "bloch";
}

Model parse_model(std::string_view name) {
  if (name == "bloch") return Model::BlochExact;
  if (name == "rwa") return Model::EnvelopeRWA;
  if (name == "newton") return Model::NewtonFull;
  throw ValidationError("unknown model '" + std::string(name) + "' (expected bloch, rwa or newton)");
}

ProtocolResult run_sequence(const PulseSequence& seq, const BlochVector<double>& initial, int samplesPerSegment,
                            Model model, const std::optional<NewtonRealization>& newton) {
  validate_sequence(seq, samplesPerSegment);
  if (!initial.allFinite()) throw ValidationError("initial Bloch vector must be finite");
  const auto starts = segment_starts(seq);
  const auto pts = sample_points(seq, starts, samplesPerSegment);
  switch (model) {
    case Model::BlochExact:
      return run_bloch(seq, initial, pts);
    case Model::EnvelopeRWA:
      return run_rwa(seq, initial, pts);
    case Model::NewtonFull:
      if (!newton) throw ConfigurationError("NewtonFull model requires system parameters");
      return run_newton(seq, initial, starts, pts, *newton);
  }
  throw ValidationError("unknown model");
}

ProtocolResult rabi_scan(const DriveParams<double>& drive, double tMax, int samples, Model model,
                         const std::optional<NewtonRealization>& newton) {
  if (!(tMax > 0)) throw ValidationError("rabi_scan: tMax must be positive");
  if (samples < 2) throw ValidationError("rabi_scan: need at least 2 samples");
  PulseSequence seq{{Pulse{drive.A, drive.delta, tMax}}, drive.gamma};
  return run_sequence(seq, BlochVector<double>(0, 0, 1), samples - 1, model, newton);
}

PulseSequence ramsey_sequence(const DriveParams<double>& drive, double T) {
  if (!(drive.A != 0) || !std::isfinite(drive.A)) throw ValidationError("Ramsey: pi/2 pulse undefined for A = 0");
  const double tHalfPi = (kPi / 2) / std::abs(drive.A);
  return {{Pulse{drive.A, drive.delta, tHalfPi}, Wait{drive.delta, T}, Pulse{drive.A, drive.delta, tHalfPi}},
          drive.gamma};
}

PulseSequence hahn_sequence(const DriveParams<double>& drive, double T, HahnFinalPulse finalPulse) {
  if (!(drive.A > 0) || !std::isfinite(drive.A)) throw ValidationError("Hahn echo requires A > 0");
  const double tHalfPi = (kPi / 2) / drive.A;
  const Pulse closing = finalPulse == HahnFinalPulse::ThreeHalvesPi ? Pulse{drive.A, drive.delta, 3 * tHalfPi}
                                                                     : Pulse{-drive.A, drive.delta, tHalfPi};
  return {{Pulse{drive.A, drive.delta, tHalfPi}, Wait{drive.delta, T / 2}, Pulse{drive.A, drive.delta, 2 * tHalfPi},
           Wait{drive.delta, T / 2}, closing},
          drive.gamma};
}

ScanResult ramsey_scan(const DriveParams<double>& drive, std::span<const double> tGrid, Model model,
                       const std::optional<NewtonRealization>& newton) {
  ramsey_sequence(drive, 0.0);  // validates A
  return final_states(tGrid, model, [&](double T) { return ramsey_sequence(drive, T); }, newton);
}

ScanResult hahn_scan(const DriveParams<double>& drive, std::span<const double> tGrid, Model model,
                     const std::optional<NewtonRealization>& newton, HahnFinalPulse finalPulse) {
  hahn_sequence(drive, 0.0, finalPulse);
  return final_states(tGrid, model, [&](double T) { return hahn_sequence(drive, T, finalPulse); }, newton);
}

CompareReport compare_layers(const SystemParams<double>& params, std::span<const double> ratios,
                             const CompareOptions& options) {
  if (ratios.empty()) throw ValidationError("compare: ratio grid is empty");
  if (options.samples < 2) throw ValidationError("compare: need at least 2 samples");
  const auto freqs = derive_frequencies(params);
  const NewtonRealization realization{params, options.stepsPerCarrierPeriod, options.windowPeriods};

  CompareReport report;
  report.entries.resize(ratios.size());
  parallel_for(ratios.size(), [&](std::size_t i) {
    const double ratio = ratios[i];
    if (!std::isfinite(ratio) || ratio < 0) throw ValidationError("compare: ratios must be finite and >= 0");
    const double A = ratio * freqs.omega0;
    const double duration = A > 0 ? 2 * kPi / A : 100 * 2 * kPi / freqs.omega0;
    const DriveParams<double> drive{A, options.delta, params.gamma};
    const auto newton = rabi_scan(drive, duration, options.samples, Model::NewtonFull, realization);
    const auto exact = rabi_scan(drive, duration, options.samples, Model::BlochExact);
    double worst = 0;
    for (std::size_t j = 0; j < exact.t.size(); ++j) {
      worst = std::max(worst, std::abs(newton.popA[j] - exact.popA[j]));
      worst = std::max(worst, std::abs(newton.popB[j] - exact.popB[j]));
    }
    report.entries[i] = {ratio, A, duration, worst};
  });

  report.monotonicIncreasing = true;
  for (std::size_t i = 1; i < report.entries.size(); ++i)
    if (!(report.entries[i].maxDiscrepancy > report.entries[i - 1].maxDiscrepancy)) report.monotonicIncreasing = false;
  return report;
}

}  // namespace mbloch
