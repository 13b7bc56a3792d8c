#pragma once

#include <functional>
#include <string_view>

namespace udn {

using WarningSink = std::function<void(std::string_view)>;

// Non-fatal conditions (LoS-probability jumps at piece boundaries, exact to
// upper-bound fallbacks, undersized simulation discs) are reported here.
// The default sink writes to stderr. Thread-safe.
void warn(std::string_view message);

/// Installs a new sink and returns the previous one. An empty sink silences warnings.
WarningSink set_warning_sink(WarningSink sink);

/// Restores the previous sink on scope exit.
class ScopedWarningSink {
 public:
  explicit ScopedWarningSink(WarningSink sink) : previous_(set_warning_sink(std::move(sink))) {}
  ~ScopedWarningSink() { set_warning_sink(std::move(previous_)); }
  ScopedWarningSink(const ScopedWarningSink&) = delete;
  ScopedWarningSink& operator=(const ScopedWarningSink&) = delete;

 private:
  WarningSink previous_;
};

}  // namespace udn
