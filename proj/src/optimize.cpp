#include "sim/optimize.hpp"

#include "sim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sim {

namespace {

using Vec = std::vector<double>;

Vec clampToBox(Vec x, const Vec& lo, const Vec& hi) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    return x;
}

} // namespace

NelderMeadResult nelder_mead_bounded(const std::function<double(const Vec&)>& f, const Vec& lo,
                                     const Vec& hi, const NelderMeadOptions& opt) {
    const std::size_t n = lo.size();
    if (n == 0 || hi.size() != n) throw ConfigError("nelder_mead: bad bounds");
    for (std::size_t i = 0; i < n; ++i)
        if (hi[i] < lo[i]) throw ConfigError("nelder_mead: lower bound exceeds upper bound");

    NelderMeadResult result;
    auto eval = [&](const Vec& x) {
        ++result.evals;
        return f(x);
    };

    bool degenerate = true;
    for (std::size_t i = 0; i < n; ++i) degenerate = degenerate && lo[i] == hi[i];
    if (degenerate) {
        result.x = lo;
        result.f = eval(lo);
        return result;
    }

    // Deterministic initial simplex: box center plus quarter-range offsets.
    std::vector<Vec> xs;
    std::vector<double> fs;
    Vec center(n);
    for (std::size_t i = 0; i < n; ++i) center[i] = 0.5 * (lo[i] + hi[i]);
    xs.push_back(center);
    for (std::size_t i = 0; i < n; ++i) {
        Vec v = center;
        const double span = hi[i] - lo[i];
        v[i] += span != 0.0 ? 0.25 * span : 0.1;
        xs.push_back(clampToBox(std::move(v), lo, hi));
    }
    for (const auto& x : xs) fs.push_back(eval(x));

    auto order = [&] {
        std::vector<std::size_t> idx(xs.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return fs[a] < fs[b]; });
        std::vector<Vec> x2;
        std::vector<double> f2;
        for (auto i : idx) {
            x2.push_back(xs[i]);
            f2.push_back(fs[i]);
        }
        xs.swap(x2);
        fs.swap(f2);
    };

    constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    while (result.evals < opt.maxEvals) {
        order();
        double spread = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            spread = std::max(spread, std::abs(xs.back()[i] - xs.front()[i]));
        if (spread < opt.xTol && std::abs(fs.back() - fs.front()) < opt.fTol) break;

        Vec centroid(n, 0.0);
        for (std::size_t k = 0; k + 1 < xs.size(); ++k)
            for (std::size_t i = 0; i < n; ++i) centroid[i] += xs[k][i];
        for (std::size_t i = 0; i < n; ++i) centroid[i] /= static_cast<double>(n);

        auto blend = [&](double c) {
            Vec v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = centroid[i] + c * (centroid[i] - xs.back()[i]);
            return clampToBox(std::move(v), lo, hi);
        };

        Vec xr = blend(alpha);
        const double fr = eval(xr);
        if (fr < fs.front()) {
            Vec xe = blend(gamma);
            const double fe = eval(xe);
            if (fe < fr) {
                xs.back() = std::move(xe);
                fs.back() = fe;
            } else {
                xs.back() = std::move(xr);
                fs.back() = fr;
            }
        } else if (fr < fs[fs.size() - 2]) {
            xs.back() = std::move(xr);
            fs.back() = fr;
        } else {
            Vec xc = blend(-rho);
            const double fc = eval(xc);
            if (fc < fs.back()) {
                xs.back() = std::move(xc);
                fs.back() = fc;
            } else {
                for (std::size_t k = 1; k < xs.size(); ++k) {
                    for (std::size_t i = 0; i < n; ++i)
                        xs[k][i] = xs.front()[i] + sigma * (xs[k][i] - xs.front()[i]);
                    xs[k] = clampToBox(std::move(xs[k]), lo, hi);
                    fs[k] = eval(xs[k]);
                    if (result.evals >= opt.maxEvals) break;
                }
            }
        }
    }
    order();
    result.x = xs.front();
    result.f = fs.front();
    return result;
}

} // namespace sim
