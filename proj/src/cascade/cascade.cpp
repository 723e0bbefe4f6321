#include "toffe/cascade/cascade.hpp"

#include <algorithm>
#include <string>

#include "toffe/cascade/morphology.hpp"

namespace toffe {

std::vector<ObjectFlow> cascade_infer(const BinnedVolume& volume, const std::vector<models::OfsModel>& ofs,
                                      models::OfpdModel& ofpd, const SpeedBinTable& table,
                                      const CascadeConfig& config, CascadeTrace* trace) {
  for (std::size_t i = 0; i < ofs.size(); ++i) {
    const int bin = ofs[i].speed_bin();
    if (bin < 1 || bin > table.size()) throw CascadeError("cascade: OFS model for unknown bin " + std::to_string(bin));
    if (i > 0 && bin >= ofs[i - 1].speed_bin()) {
      throw CascadeError("cascade: OFS models must be ordered by strictly descending bin");
    }
  }
  if (ofpd.config().height != volume.height() || ofpd.config().width != volume.width()) {
    throw CascadeError("cascade: OFPD input size differs from volume");
  }

  struct Detection {
    int bin;
    BinaryGrid region;
    BinnedVolume input;
    int support;
  };
  std::vector<Detection> detections;
  BinnedVolume inp = volume;
  for (const models::OfsModel& model : ofs) {
    BinaryGrid out = model.forward(inp).aggregate;
    const BinaryGrid closed = close(out, config.close_kernel);
    const int support = static_cast<int>(out.count());
    if (support >= config.min_support) detections.push_back({model.speed_bin(), closed, inp, support});
    BinaryGrid mask = closed;
    for (std::size_t i = 0; i < mask.size(); ++i) mask.set(i, !closed[i]);
    BinnedVolume next = apply_mask(inp, mask);
    if (trace) trace->stages.push_back({model.speed_bin(), std::move(inp), std::move(out)});
    inp = std::move(next);
  }

  std::vector<ObjectFlow> flows;
  for (const Detection& d : detections) {
    const models::OfpdPrediction p = ofpd.predict(models::ofpd_input(d.input, &d.region));
    ObjectFlow f;
    f.center = p.center;
    f.direction = p.direction;
    f.speed_bin = d.bin;
    f.representative_speed = table.representative_speed(d.bin);
    f.support = d.support;
    flows.push_back(f);
  }
  std::sort(flows.begin(), flows.end(), [](const ObjectFlow& a, const ObjectFlow& b) { return a.speed_bin < b.speed_bin; });
  return flows;
}

}  // namespace toffe
