#include "tunnelswarm/pfddr.hpp"

#include <algorithm>

namespace tunnelswarm {

std::string_view to_string(PfddrCategory c) {
  switch (c) {
    case PfddrCategory::Sensing: return "sensing";
    case PfddrCategory::Locomotion: return "motor";
    case PfddrCategory::Excavation: return "excavation";
  }
  return "unknown";
}

double median(std::vector<double> values) {
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

void SampleArray::push(double v) {
  data_[next_] = v;
  next_ = (next_ + 1) % kCapacity;
  size_ = std::min(size_ + 1, kCapacity);
}

void SampleArray::clear() {
  next_ = 0;
  size_ = 0;
}

std::vector<double> SampleArray::values() const {
  return std::vector<double>(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(size_));
}

double SampleArray::median() const { return tunnelswarm::median(values()); }

Thresholds Thresholds::from(const SimConstants& c) {
  const double k = c.threshold_multiplier * c.battery_capacity;
  Thresholds t;
  t.excavation = k * kExcavationBaseRate;
  t.locomotion[locomotion_index(WheelPattern::One, false)] = k * kWheelBaseRate;
  t.locomotion[locomotion_index(WheelPattern::Both, false)] = k * 2.0 * kWheelBaseRate;
  t.locomotion[locomotion_index(WheelPattern::One, true)] = k * 2.0 * kWheelBaseRate;
  t.locomotion[locomotion_index(WheelPattern::Both, true)] = k * 4.0 * kWheelBaseRate;
  t.sensing = 0.0;
  return t;
}

PfddrMonitor::PfddrMonitor(const SimConstants& c) : thresholds_(Thresholds::from(c)) {}

std::vector<PfddrCategory> PfddrMonitor::accumulate_tick(const PfddrTick& in) {
  bool pushed = false;
  if (in.handshake_bit && !flagged(PfddrCategory::Sensing)) {
    sensing_.push(static_cast<double>(*in.handshake_bit));
    pushed = true;
  }

  if (ticks_ == 0) {
    wheels_ = in.wheels;
    loaded_ = in.loaded;
    excavating_ = in.excavating;
    mixed_ = false;
    loco_sum_ = 0.0;
    exc_sum_ = 0.0;
  } else if (in.wheels != wheels_ || in.loaded != loaded_ || in.excavating != excavating_) {
    mixed_ = true;
  }
  loco_sum_ += in.locomotion_rate;
  exc_sum_ += in.excavation_rate;
  if (++ticks_ == kWindow) {
    pushed = close_window() || pushed;
    ticks_ = 0;
  }
  if (!pushed) return {};
  return detect();
}

bool PfddrMonitor::close_window() {
  if (mixed_) return false;
  bool pushed = false;
  if (excavating_ && !flagged(PfddrCategory::Excavation)) {
    excavation_.push(exc_sum_ / kWindow);
    pushed = true;
  }
  if (wheels_ != WheelPattern::None && !flagged(PfddrCategory::Locomotion)) {
    locomotion_[locomotion_index(wheels_, loaded_)].push(loco_sum_ / kWindow);
    pushed = true;
  }
  return pushed;
}

std::vector<PfddrCategory> PfddrMonitor::detect() {
  std::vector<PfddrCategory> raised;
  auto raise = [&](PfddrCategory c) {
    flags_[index(c)] = true;
    raised.push_back(c);
  };
  if (!flagged(PfddrCategory::Sensing) && sensing_.full() &&
      sensing_.median() > thresholds_.sensing) {
    raise(PfddrCategory::Sensing);
  }
  if (!flagged(PfddrCategory::Locomotion)) {
    for (std::size_t i = 0; i < locomotion_.size(); ++i) {
      if (locomotion_[i].full() && locomotion_[i].median() > thresholds_.locomotion[i]) {
        raise(PfddrCategory::Locomotion);
        break;
      }
    }
  }
  if (!flagged(PfddrCategory::Excavation) && excavation_.full() &&
      excavation_.median() > thresholds_.excavation) {
    raise(PfddrCategory::Excavation);
  }
  return raised;
}

std::optional<PfddrCategory> PfddrMonitor::first_flag() const {
  for (auto c : kPfddrCategories) {
    if (flagged(c)) return c;
  }
  return std::nullopt;
}

void PfddrMonitor::complete_maintenance(PfddrCategory c, DegradationState& state, bool in_zone) {
  if (!in_zone) throw NotInZone("maintenance requires the robot to be in the maintenance zone");
  if (!flagged(c)) throw NotFlagged("category is not flagged");
  switch (c) {
    case PfddrCategory::Sensing:
      state.dc_s = 0.0;
      sensing_.clear();
      break;
    case PfddrCategory::Locomotion:
      state.dc_l = 0.0;
      state.dc_r = 0.0;
      for (auto& a : locomotion_) a.clear();
      break;
    case PfddrCategory::Excavation:
      state.dc_E = 0.0;
      excavation_.clear();
      break;
  }
  flags_[index(c)] = false;
}

double dc_snapshot(PfddrCategory c, const DegradationState& state) {
  switch (c) {
    case PfddrCategory::Sensing: return state.dc_s;
    case PfddrCategory::Locomotion: return std::max(state.dc_l, state.dc_r);
    case PfddrCategory::Excavation: return state.dc_E;
  }
  return 0.0;
}

}  // namespace tunnelswarm
