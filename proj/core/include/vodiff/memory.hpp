#pragma once

#include <vector>

#include "vodiff/order_function.hpp"

namespace vodiff {

enum class MemoryClass { kShort, kLong, kNone };

/** Memory diagnosis for one mode-change time T.
 *
 * The old mode alone is active on (0, t_low), the new mode alone on
 * (t_high, inf), and both mix on (t_low, t_high).  Long memory means
 * t_high = inf (the old mode never disappears); class none means
 * t_low = t_high = T (mu = 1, nu = 0: no window at all). */
struct MemoryWindow {
    double mode_change_time;
    MemoryClass memory_class;
    double t_low;
    double t_high;  // +inf for long memory

    bool has_mixing() const { return t_high > t_low; }
};

struct MemoryReport {
    std::vector<MemoryWindow> windows;  // one per breakpoint of the order function
};

const char* to_string(MemoryClass c);

/** Classifies the memory regime of every mode change:
 *   nu > 0, mu != 0:  short, t_low = T/(mu+nu), t_high = T/mu
 *   nu < 0, mu+nu != 0: short, t_low = T/mu, t_high = T/(mu+nu)
 *   nu = 0, 0 < mu < 1: short with empty mixing window, t_low = t_high = T/mu
 *   nu = 0, mu = 1:   none (t_low = t_high = T)
 *   mu = 0 or mu+nu = 0: long (t_high = inf)
 * Rejects mu = nu = 0 (degenerate operator). */
MemoryReport classify_memory(const OrderFunction& of, const LHParams& lh);

}  // namespace vodiff
