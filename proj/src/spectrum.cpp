#include "floqhhg/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "floqhhg/errors.hpp"

namespace floqhhg {

std::vector<double> jittered_grid(double lo, double hi, std::size_t count)
{
    if (count == 0 || !(hi > lo))
        throw DomainError("jittered_grid: need hi > lo and count >= 1");
    const double step = (hi - lo) / static_cast<double>(count);
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i)
        g[i] = lo + (static_cast<double>(i) + 0.5) * step;
    return g;
}

std::vector<std::size_t> local_maxima(const std::vector<double>& values)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < values.size(); ++i)
        if (values[i] > values[i - 1] && values[i] > values[i + 1])
            out.push_back(i);
    return out;
}

std::size_t nearest_index(const std::vector<double>& grid, double x)
{
    if (grid.empty())
        throw DomainError("nearest_index: empty grid");
    const auto it = std::min_element(grid.begin(), grid.end(),
                                     [x](double p, double q) { return std::abs(p - x) < std::abs(q - x); });
    return static_cast<std::size_t>(it - grid.begin());
}

} // namespace floqhhg
