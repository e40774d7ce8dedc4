#include "vodiff/memory.hpp"

#include <limits>
#include <stdexcept>

namespace vodiff {

const char* to_string(MemoryClass c) {
    switch (c) {
        case MemoryClass::kShort: return "short";
        case MemoryClass::kLong: return "long";
        case MemoryClass::kNone: return "none";
    }
    return "?";
}

MemoryReport classify_memory(const OrderFunction& of, const LHParams& lh) {
    lh.validate();
    if (lh.mu == 0.0 && lh.nu == 0.0)
        throw std::domain_error("classify_memory: mu = nu = 0 leaves the operator order pinned "
                                "at beta(0); degenerate, rejected");
    const double inf = std::numeric_limits<double>::infinity();
    MemoryReport report;
    for (double T : of.breakpoints()) {
        MemoryWindow w;
        w.mode_change_time = T;
        if (lh.mu == 0.0 || lh.mu + lh.nu == 0.0) {
            w.memory_class = MemoryClass::kLong;
            w.t_low = (lh.mu == 0.0) ? T / lh.nu : T / lh.mu;
            w.t_high = inf;
        } else if (lh.nu > 0.0) {
            w.memory_class = MemoryClass::kShort;
            w.t_low = T / (lh.mu + lh.nu);
            w.t_high = T / lh.mu;
        } else if (lh.nu < 0.0) {
            w.memory_class = MemoryClass::kShort;
            w.t_low = T / lh.mu;
            w.t_high = T / (lh.mu + lh.nu);
        } else {  // nu == 0
            w.memory_class = (lh.mu == 1.0) ? MemoryClass::kNone : MemoryClass::kShort;
            w.t_low = w.t_high = T / lh.mu;
        }
        report.windows.push_back(w);
    }
    return report;
}

}  // namespace vodiff
