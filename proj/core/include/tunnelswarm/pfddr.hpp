#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "tunnelswarm/constants.hpp"
#include "tunnelswarm/degradation.hpp"

namespace tunnelswarm {

enum class PfddrCategory { Sensing, Locomotion, Excavation };

inline constexpr std::array<PfddrCategory, 3> kPfddrCategories = {
    PfddrCategory::Sensing, PfddrCategory::Locomotion, PfddrCategory::Excavation};

/// CSV label: "sensing", "motor" or "excavation".
std::string_view to_string(PfddrCategory c);

/// Payload fraction of robot mass above which locomotion samples count as loaded.
inline constexpr double kLoadedPayloadFraction = 0.25;

class NotInZone : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NotFlagged : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Median of a non-empty range; even lengths average the two middle values.
double median(std::vector<double> values);

class SampleArray {
 public:
  static constexpr std::size_t kCapacity = 50;

  void push(double v);
  void clear();
  bool full() const { return size_ == kCapacity; }
  std::size_t size() const { return size_; }
  double median() const;
  std::vector<double> values() const;

 private:
  std::array<double, kCapacity> data_{};
  std::size_t next_ = 0;
  std::size_t size_ = 0;
};

enum class WheelPattern { None, One, Both };

/// Index into the locomotion arrays: {One, Both} x {Unloaded, Loaded}.
inline std::size_t locomotion_index(WheelPattern p, bool loaded) {
  return (p == WheelPattern::Both ? 2u : 0u) + (loaded ? 1u : 0u);
}

struct Thresholds {
  double excavation = 0.0;
  std::array<double, 4> locomotion{};  // by locomotion_index
  double sensing = 0.0;

  /// Each power threshold is the multiplier times the undegraded rate.
  static Thresholds from(const SimConstants& c);
};

struct PfddrTick {
  double locomotion_rate = 0.0;
  WheelPattern wheels = WheelPattern::None;
  bool loaded = false;
  bool excavating = false;
  double excavation_rate = 0.0;
  std::optional<int> handshake_bit;
};

class PfddrMonitor {
 public:
  static constexpr int kWindow = 10;

  explicit PfddrMonitor(const SimConstants& c = {});

  /// Feeds one controller tick. Returns the categories newly flagged by it.
  std::vector<PfddrCategory> accumulate_tick(const PfddrTick& in);
  /// Categories whose full array crosses its threshold and are not yet flagged.
  std::vector<PfddrCategory> detect();

  bool flagged(PfddrCategory c) const { return flags_[index(c)]; }
  bool any_flag() const { return flags_[0] || flags_[1] || flags_[2]; }
  std::optional<PfddrCategory> first_flag() const;

  /// Zeroes the category's coefficients, clears its arrays and its flag.
  void complete_maintenance(PfddrCategory c, DegradationState& state, bool in_zone);

  const SampleArray& sensing_array() const { return sensing_; }
  const SampleArray& excavation_array() const { return excavation_; }
  const SampleArray& locomotion_array(std::size_t i) const { return locomotion_[i]; }
  const Thresholds& thresholds() const { return thresholds_; }

 private:
  static std::size_t index(PfddrCategory c) { return static_cast<std::size_t>(c); }
  bool close_window();

  Thresholds thresholds_;
  SampleArray sensing_;
  SampleArray excavation_;
  std::array<SampleArray, 4> locomotion_;
  std::array<bool, 3> flags_{};

  int ticks_ = 0;
  bool mixed_ = false;
  WheelPattern wheels_ = WheelPattern::None;
  bool loaded_ = false;
  bool excavating_ = false;
  double loco_sum_ = 0.0;
  double exc_sum_ = 0.0;
};

/// The coefficient reported when a category is flagged.
double dc_snapshot(PfddrCategory c, const DegradationState& state);

}  // namespace tunnelswarm
