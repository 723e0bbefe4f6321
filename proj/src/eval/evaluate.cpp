#include "toffe/eval/evaluate.hpp"

#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "toffe/sim/random.hpp"

namespace toffe {

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

EvalReport evaluate(const std::vector<LabeledSequence>& sequences, CascadeModels& models,
                    const SpeedBinTable& table, const models::WindowConfig& window, const CascadeConfig& cascade) {
  if (!models.ofpd) throw std::invalid_argument("evaluate: missing OFPD model");
  EvalReport report;
  report.dt = window.dt;
  double pix = 0.0, dir = 0.0, speed = 0.0, spikes = 0.0;
  std::size_t correct = 0;
  for (const LabeledSequence& ls : sequences) {
    const Sequence& seq = ls.sequence;
    if (seq.ground_truth.empty()) throw std::out_of_range("evaluate: sequence " + ls.id + " has no ground truth");
    SequenceReport sr;
    sr.id = ls.id;
    for (std::uint64_t t0 : models::tile_windows(0, seq.ground_truth.back().t + 1, window.dt)) {
      const GroundTruthSample& gt = models::window_ground_truth(seq.ground_truth, t0, window.dt);
      const auto [first, last] = window_range(seq.events, t0, window.dt);
      const BinnedVolume volume = bin_events(std::span<const Event>(seq.events.data() + first, last - first), t0,
                                             window.dt, window.bins, window.height, window.width);
      CascadeTrace trace;
      const auto flows = cascade_infer(volume, models.ofs, *models.ofpd, table, cascade, &trace);

      WindowRecord rec;
      rec.sequence = ls.id;
      rec.t_start = t0;
      rec.gt_bin = gt.speed_bin;
      rec.detections = static_cast<int>(flows.size());
      for (const CascadeStage& st : trace.stages) rec.spike_pixels += static_cast<int>(st.output.count());
      const ObjectFlow* best = nullptr;
      for (const ObjectFlow& f : flows) {
        ++report.detections_per_bin[f.speed_bin];
        if (!best || f.support > best->support || (f.support == best->support && f.speed_bin > best->speed_bin)) {
          best = &f;
        }
      }
      ++sr.windows;
      if (best) {
        rec.pred_bin = best->speed_bin;
        rec.error = window_errors(*best, gt);
        ++sr.matched;
        sr.pixE += rec.error.pix;
        sr.dirE += rec.error.dir;
        sr.speedE += rec.error.speed;
        pix += rec.error.pix;
        dir += rec.error.dir;
        speed += rec.error.speed;
      }
      if (rec.pred_bin == rec.gt_bin) {
        ++sr.correct_bin;
        ++correct;
      }
      spikes += rec.spike_pixels;
      report.records.push_back(rec);
    }
    report.windows += sr.windows;
    report.matched += sr.matched;
    if (sr.matched) {
      const double n = static_cast<double>(sr.matched);
      sr.pixE /= n;
      sr.dirE /= n;
      sr.speedE /= n;
    }
    report.sequences.push_back(sr);
  }
  if (report.matched) {
    const double n = static_cast<double>(report.matched);
    report.pixE = pix / n;
    report.dirE = dir / n;
    report.speedE = speed / n;
  }
  if (report.windows) {
    report.bin_accuracy = static_cast<double>(correct) / static_cast<double>(report.windows);
    report.mean_spike_pixels = spikes / static_cast<double>(report.windows);
  }
  return report;
}

std::vector<EvalReport> dt_sweep(const std::vector<LabeledSequence>& sequences,
                                 const std::vector<std::uint64_t>& dts,
                                 std::map<std::uint64_t, CascadeModels>& models, const SpeedBinTable& table,
                                 const models::WindowConfig& base, const CascadeConfig& cascade) {
  std::vector<EvalReport> reports;
  for (std::uint64_t dt : dts) {
    auto it = models.find(dt);
    if (it == models.end()) throw std::out_of_range(fmt::format("dt_sweep: no models for dt={} us", dt));
    models::WindowConfig w = base;
    w.dt = dt;
    reports.push_back(evaluate(sequences, it->second, table, w, cascade));
  }
  return reports;
}

std::vector<EvalReport> noise_sweep(const std::vector<LabeledSequence>& sequences,
                                    const std::vector<double>& noise_rates, CascadeModels& models,
                                    const SpeedBinTable& table, const models::WindowConfig& window,
                                    std::uint64_t seed, const CascadeConfig& cascade) {
  std::vector<EvalReport> reports;
  for (double rate : noise_rates) {
    std::vector<LabeledSequence> noisy = sequences;
    if (rate > 0.0) {
      for (LabeledSequence& ls : noisy) {
        inject_noise(ls.sequence.events, {window.width, window.height}, 0, ls.sequence.ground_truth.back().t + 1,
                     rate, derive_seed(seed, fmt::format("noise/{}/{}", rate, ls.id)));
      }
    }
    EvalReport r = evaluate(noisy, models, table, window, cascade);
    r.noise_rate = rate;
    reports.push_back(std::move(r));
  }
  return reports;
}

SweepRow sweep_row(const EvalReport& report) { return {report.dt, report.pixE, report.dirE, report.speedE}; }

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  auto out = open_csv(path);
  out << "dt,pixE,dirE,speedE\n";
  for (const SweepRow& r : rows) out << fmt::format("{},{},{},{}\n", r.dt, r.pixE, r.dirE, r.speedE);
}

void print_sweep(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << fmt::format("{:>8} {:>10} {:>10} {:>10}\n", "dt", "pixE", "dirE", "speedE");
  for (const SweepRow& r : rows) {
    out << fmt::format("{:>8} {:>10.3f} {:>10.3f} {:>10.3f}\n", fmt::format("dt{}", r.dt), r.pixE, r.dirE, r.speedE);
  }
}

void write_report_csv(const std::filesystem::path& path, const EvalReport& report) {
  auto out = open_csv(path);
  out << "sequence,windows,matched,bin_accuracy,pixE,dirE,speedE\n";
  for (const SequenceReport& s : report.sequences) {
    const double acc = s.windows ? static_cast<double>(s.correct_bin) / static_cast<double>(s.windows) : 0.0;
    out << fmt::format("{},{},{},{},{},{},{}\n", s.id, s.windows, s.matched, acc, s.pixE, s.dirE, s.speedE);
  }
  out << fmt::format("ALL,{},{},{},{},{},{}\n", report.windows, report.matched, report.bin_accuracy, report.pixE,
                     report.dirE, report.speedE);
}

void write_windows_csv(const std::filesystem::path& path, const EvalReport& report) {
  auto out = open_csv(path);
  out << "sequence,t_start_us,gt_bin,pred_bin,detections,spike_pixels,pixE,dirE,speedE\n";
  for (const WindowRecord& r : report.records) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.sequence, r.t_start, r.gt_bin, r.pred_bin, r.detections,
                       r.spike_pixels, r.error.pix, r.error.dir, r.error.speed);
  }
}

}  // namespace toffe
