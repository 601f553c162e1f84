#pragma once

namespace tlrcool {

enum class Verdict { stable, marginal, unstable };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::marginal: return "marginal";
    default: return "unstable";
  }
}

}
