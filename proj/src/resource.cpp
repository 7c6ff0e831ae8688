#include "tdel/resource.hpp"

#include <sys/resource.h>

#include <fstream>
#include <string>

namespace tdel {

namespace {

std::uint64_t status_field_kb(const char* key) {
  std::ifstream in("/proc/self/status");
  std::string line;
  const std::string prefix = std::string(key) + ":";
  while (std::getline(in, line)) {
    if (line.compare(0, prefix.size(), prefix) == 0) return std::stoull(line.substr(prefix.size()));
  }
  return 0;
}

}  // namespace

std::uint64_t current_rss_bytes() { return status_field_kb("VmRSS") * 1024; }

std::uint64_t peak_rss_bytes() {
  if (auto kb = status_field_kb("VmHWM"); kb > 0) return kb * 1024;
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;
}

bool reset_peak_rss() {
  std::ofstream out("/proc/self/clear_refs");
  if (!out) return false;
  out << "5";
  out.flush();
  return static_cast<bool>(out);
}

StageMeter::StageMeter()
    : start_(std::chrono::steady_clock::now()),
      rss_at_start_(current_rss_bytes()),
      reset_ok_(reset_peak_rss()) {}

StageUsage StageMeter::finish() const {
  StageUsage u;
  u.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  u.rss_at_start = rss_at_start_;
  u.peak_rss = peak_rss_bytes();
  u.peak_is_stage_local = reset_ok_;
  return u;
}

}  // namespace tdel
