#pragma once

#include <string>
#include <string_view>

namespace aasplat::core {

/// A rational resolution factor, restricted to {1/4, 1/2, 1, 2, 4}.
struct Factor {
    int num = 1;
    int den = 1;

    static Factor parse(std::string_view text);
    static bool supported(int num, int den) noexcept;

    double value() const noexcept { return static_cast<double>(num) / den; }
    bool is_downsample() const noexcept { return num < den; }
    bool is_upsample() const noexcept { return num > den; }
    bool is_identity() const noexcept { return num == den; }
    /// Integer magnification ratio (>= 1) regardless of direction.
    int ratio() const noexcept { return num > den ? num / den : den / num; }

    /// "0.25", "0.5", "1", "2", "4".
    std::string label() const;

    friend bool operator==(const Factor&, const Factor&) = default;
};

}  // namespace aasplat::core
