#pragma once

#include <cstddef>

namespace qtm {

enum class Exec { serial, parallel };

// loop body must be safe to run concurrently for distinct indices
template <class F>
void parallel_for(std::size_t n, Exec exec, F&& f)
{
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::size_t i = 0; i < n; ++i) f(i);
    } else {
        for (std::size_t i = 0; i < n; ++i) f(i);
    }
}

}  // namespace qtm
