#pragma once

#include <optional>
#include <string>

namespace ltavg {

enum class StabilityLabel { Stable, Unstable, Indeterminate };

inline std::string to_string(StabilityLabel l) {
  switch (l) {
    case StabilityLabel::Stable: return "stable";
    case StabilityLabel::Unstable: return "unstable";
    case StabilityLabel::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

/// Stability classification of one parameter point, with method provenance.
struct Verdict {
  StabilityLabel label = StabilityLabel::Indeterminate;
  std::optional<double> bound_value;  // U when the certificate solve succeeded
  std::string method;                 // sos | floquet-general | floquet-simplified | dns
  int dv = 0, ds = 0;
  double wall_time = 0.0;
  std::string detail;
};

}  // namespace ltavg
