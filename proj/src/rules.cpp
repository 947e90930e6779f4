#include "cubesum/rules.hpp"

#include <stdexcept>

namespace cubesum {
namespace rules {

namespace {

bool prime_at_least(uint32_t p, uint32_t low) {
    return p >= low && arith::is_prime(static_cast<uint64_t>(p));
}

std::string case_name(Case c) {
    return "case " + std::to_string(static_cast<int>(c));
}

} // namespace

std::optional<TrustedVerdict> modularity_even_x(Case c, uint32_t p) {
    if (c != Case::C1 && c != Case::C2)
        return std::nullopt;
    if (!prime_at_least(p, 7))
        return std::nullopt;
    return TrustedVerdict{
        "modularity-even-x",
        "modular method: the Frey curve attached to a solution with x even "
        "would correspond to a weight-2 newform at a level supported on "
        "{2, 3}, and every such space is empty",
        case_name(c) + " (x even), p = " + std::to_string(p) +
            " prime, p >= 7"};
}

std::optional<TrustedVerdict> modularity_power_of_two(Case c, uint32_t r,
                                                      uint32_t p) {
    if (c != Case::C3)
        return std::nullopt;
    if (!prime_at_least(p, 5))
        return std::nullopt;
    if (r < 4 || (r & (r - 1)) != 0)
        return std::nullopt; // need r = 2^k with k >= 2
    const uint32_t k = static_cast<uint32_t>(__builtin_ctz(r));
    return TrustedVerdict{
        "modularity-power-of-two",
        "modular method: with c = 2 r^2 = 2^(2k+1) the level of the mod-p "
        "representation stays supported on {2, 3}, where no compatible "
        "weight-2 newform exists",
        case_name(c) + ", r = 2^" + std::to_string(k) + " with k >= 2, p = " +
            std::to_string(p) + " prime, p >= 5"};
}

std::optional<ChabautyFixture> chabauty_fixture(Case c, uint32_t p) {
    if (p != 5 || c == Case::C4)
        return std::nullopt;

    std::vector<CurvePoint> pts;
    pts.push_back({true, 0, 0});
    if (c == Case::C3) {
        const Int X = 9, Y = 324;
        if (Y * Y != 2 * (arith::pow_int(X, 5) - arith::pow_int(Int(3), 8)))
            throw std::logic_error(
                "fixture point fails its curve equation");
        pts.push_back({false, X, Y});
        pts.push_back({false, X, -Y});
    }
    return ChabautyFixture{
        TrustedVerdict{
            "chabauty-p5",
            "Chabauty-type determination of all rational points on the "
            "genus-2 quintic models of the p = 5 equations for cases 1-3",
            case_name(c) + ", p = 5"},
        pts};
}

} // namespace rules
} // namespace cubesum
