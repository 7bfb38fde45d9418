#include "aasplat/core/factor.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "aasplat/error.hpp"

namespace aasplat::core {

bool Factor::supported(int num, int den) noexcept {
    return (num == 1 && (den == 1 || den == 2 || den == 4)) || (den == 1 && (num == 2 || num == 4));
}

Factor Factor::parse(std::string_view text) {
    const auto fail = [&] {
        throw InvalidArgument("unsupported resolution factor '" + std::string(text) +
                              "' (expected one of 1/4, 1/2, 1, 2, 4)");
    };
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        int num = 0;
        int den = 0;
        auto a = std::from_chars(text.data(), text.data() + slash, num);
        auto b = std::from_chars(text.data() + slash + 1, text.data() + text.size(), den);
        if (a.ec != std::errc{} || b.ec != std::errc{} || a.ptr != text.data() + slash ||
            b.ptr != text.data() + text.size() || !supported(num, den)) {
            fail();
        }
        return {num, den};
    }
    double v = 0.0;
    auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) {
        fail();
    }
    for (const Factor f : {Factor{1, 4}, Factor{1, 2}, Factor{1, 1}, Factor{2, 1}, Factor{4, 1}}) {
        if (std::abs(f.value() - v) < 1e-9) {
            return f;
        }
    }
    fail();
    return {};
}

std::string Factor::label() const {
    if (den == 1) {
        return std::to_string(num);
    }
    return den == 2 ? "0.5" : "0.25";
}

}  // namespace aasplat::core
