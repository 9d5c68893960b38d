#pragma once

#include <httplib.h>

#include <cstddef>

namespace edgar::mock {

/// httplib answers 416 when a range runs past the end; real servers send the tail.
inline void clamp_ranges(const httplib::Request& req, std::size_t size)
{
    for (auto& [first, last] : const_cast<httplib::Request&>(req).ranges) {
        const auto end = static_cast<ssize_t>(size);
        if (first >= 0 && first < end && last >= end) {
            last = end - 1;
        }
    }
}

} // namespace edgar::mock
