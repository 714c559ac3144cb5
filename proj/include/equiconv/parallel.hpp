#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace equiconv {

enum class Exec { Serial, Parallel };

// Calls f(i) for i in [0, n). The parallel path rethrows the exception of the
// lowest failing index, so error reporting matches the serial path.
template <class F>
void for_each_index(std::size_t n, Exec exec, F&& f) {
    if (exec == Exec::Serial) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace equiconv
