// reference.hpp - slow, independent re-derivations used as test oracles.
//  Nothing here calls into the code paths it is used to check.
#ifndef SPIKEALLOC_TESTS_REFERENCE_HPP
#define SPIKEALLOC_TESTS_REFERENCE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "spikealloc/scenario.hpp"

namespace spikealloc::reference
{

// Rates straight from the defining formulas, column max taken explicitly.
inline std::vector<std::vector<double>> gamma(const Scenario &s)
{
    std::vector<std::vector<double>> g(s.n_vehicles, std::vector<double>(s.m_tasks));
    for (std::size_t j = 0; j < s.m_tasks; ++j)
    {
        double col_max = 0.0;
        for (std::size_t i = 0; i < s.n_vehicles; ++i)
        {
            col_max = std::max(col_max, s.ttc(i, j));
        }
        for (std::size_t i = 0; i < s.n_vehicles; ++i)
        {
            const double t = 1.0 - s.ttc(i, j) / col_max;
            g[i][j] = s.weights.w_p * s.priority[j] + s.weights.w_s * s.success[j] +
                    s.weights.w_t * t;
        }
    }
    return g;
}

// Diminishing-returns reward: sort each task's vehicles, halve per position.
inline double reward(const std::vector<std::vector<double>> &g,
        const std::vector<int> &tasks)
{
    double total = 0.0;
    const std::size_t m = g.empty() ? 0 : g[0].size();
    for (std::size_t j = 0; j < m; ++j)
    {
        std::vector<std::pair<double, std::size_t>> on_task;
        for (std::size_t i = 0; i < tasks.size(); ++i)
        {
            if (tasks[i] == static_cast<int>(j) + 1)
            {
                on_task.push_back({g[i][j], i});
            }
        }
        std::sort(on_task.begin(), on_task.end(), [](auto a, auto b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        double weight = 1.0;
        for (const auto &[gij, i] : on_task)
        {
            total += weight * gij;
            weight /= 2.0;
        }
    }
    return total;
}

// Recursive enumeration of every vehicle -> {0..M} assignment.
inline void for_each_allocation(std::size_t n, std::size_t m,
        const std::function<void(const std::vector<int> &)> &visit)
{
    std::vector<int> tasks(n, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == n)
        {
            visit(tasks);
            return;
        }
        for (std::size_t t = 0; t <= m; ++t)
        {
            tasks[i] = static_cast<int>(t);
            rec(i + 1);
        }
    };
    rec(0);
}

struct FixedStepEvent
{
    double time;
    std::size_t vehicle;
    std::size_t task;
};

// Fixed-step integration of the accumulate-and-fire dynamics. Each step
//  advances every potential by rate * dt; when some neuron would cross the
//  threshold inside the step, the step is cut at the earliest crossing
//  (linear interpolation), the winner is applied, and stepping resumes.
inline std::vector<FixedStepEvent> fixed_step_events(
        const std::vector<std::vector<double>> &g, double threshold, double dt)
{
    const std::size_t n = g.size();
    const std::size_t m = n ? g[0].size() : 0;
    std::vector<std::vector<double>> v(n, std::vector<double>(m, 0.0));
    std::vector<int> locked(n, 0);
    std::vector<int> on_task(m, 0);
    std::vector<FixedStepEvent> events;
    double clock = 0.0;

    auto rate = [&](std::size_t i, std::size_t j) {
        if (locked[i])
        {
            return 0.0;
        }
        double r = g[i][j];
        for (int k = 0; k < on_task[j]; ++k)
        {
            r *= 0.5;
        }
        return r;
    };
    auto active = [&] {
        for (std::size_t i = 0; i < n; ++i)
        {
            for (std::size_t j = 0; j < m; ++j)
            {
                if (rate(i, j) > 0.0)
                {
                    return true;
                }
            }
        }
        return false;
    };

    while (active())
    {
        double first_frac = 2.0;
        std::size_t wi = 0;
        std::size_t wj = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            for (std::size_t j = 0; j < m; ++j)
            {
                const double r = rate(i, j);
                if (r <= 0.0 || v[i][j] + r * dt < threshold)
                {
                    continue;
                }
                const double frac = std::max(0.0, (threshold - v[i][j]) / (r * dt));
                if (frac < first_frac)
                {
                    first_frac = frac;
                    wi = i;
                    wj = j;
                }
            }
        }
        const double h = first_frac <= 1.0 ? first_frac * dt : dt;
        for (std::size_t i = 0; i < n; ++i)
        {
            for (std::size_t j = 0; j < m; ++j)
            {
                v[i][j] += rate(i, j) * h;
            }
        }
        clock += h;
        if (first_frac <= 1.0)
        {
            events.push_back({clock, wi, wj});
            locked[wi] = 1;
            ++on_task[wj];
        }
    }
    return events;
}

// Small seeded helpers for hand-rolled property tests.
inline double uniform(std::mt19937_64 &rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::vector<int> random_allocation(std::mt19937_64 &rng, std::size_t n,
        std::size_t m)
{
    std::vector<int> a(n);
    for (auto &t : a)
    {
        t = static_cast<int>(std::uniform_int_distribution<std::size_t>(0, m)(rng));
    }
    return a;
}

} // namespace spikealloc::reference

#endif
