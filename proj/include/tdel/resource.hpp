#pragma once

#include <chrono>
#include <cstdint>

namespace tdel {

/// Current and peak resident set size in bytes, from /proc/self/status
/// (VmRSS / VmHWM), falling back to getrusage for the peak.
std::uint64_t current_rss_bytes();
std::uint64_t peak_rss_bytes();

/// Resets the kernel's peak-RSS watermark to the current RSS. Returns false
/// when the kernel does not allow it.
bool reset_peak_rss();

struct StageUsage {
  double seconds = 0.0;
  std::uint64_t rss_at_start = 0;
  std::uint64_t peak_rss = 0;  // process peak observed during the stage
  bool peak_is_stage_local = false;
};

/// Wall-clock plus peak-memory meter for one pipeline stage.
class StageMeter {
 public:
  StageMeter();
  StageUsage finish() const;

 private:
  std::chrono::steady_clock::time_point start_;
  std::uint64_t rss_at_start_;
  bool reset_ok_;
};

}  // namespace tdel
