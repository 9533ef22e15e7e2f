#include "specgconv/linalg.hpp"

namespace specgconv {

std::uint64_t content_hash(const Matrix& a, std::uint64_t salt) {
    std::uint64_t h = 1469598103934665603ULL ^ salt;
    auto mix = [&h](const unsigned char* bytes, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ULL;
        }
    };
    const std::int64_t shape[2] = {a.rows(), a.cols()};
    mix(reinterpret_cast<const unsigned char*>(shape), sizeof(shape));
    mix(reinterpret_cast<const unsigned char*>(a.data()), sizeof(double) * static_cast<std::size_t>(a.size()));
    return h;
}

} // namespace specgconv
