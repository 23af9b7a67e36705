#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "spikealloc/error.hpp"
#include "spikealloc/scenario.hpp"

namespace spikealloc
{

namespace
{

std::string index_path(const char *name, std::size_t i)
{
    return std::string(name) + "[" + std::to_string(i) + "]";
}

std::string index_path(const char *name, std::size_t i, std::size_t j)
{
    return index_path(name, i) + "[" + std::to_string(j) + "]";
}

// Portable mapping of a 64-bit draw onto [lo, hi]; std distributions are
//  implementation-defined, the engine sequence is not.
double draw(std::mt19937_64 &engine, const Range &range)
{
    const double unit = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    return range.lo + unit * (range.hi - range.lo);
}

} // namespace

void RateWeights::validate() const
{
    const auto check = [](double w, const char *name) {
        if (!(w >= 0.0 && w <= 1.0))
        {
            throw ValidationError(name, "weight must lie in [0, 1]");
        }
    };
    check(w_p, "weights.w_p");
    check(w_s, "weights.w_s");
    check(w_t, "weights.w_t");
}

std::optional<std::size_t> Allocation::task_of(std::size_t vehicle) const
{
    const int t = tasks_.at(vehicle);
    if (t == 0)
    {
        return std::nullopt;
    }
    return static_cast<std::size_t>(t - 1);
}

void Allocation::assign(std::size_t vehicle, std::size_t task)
{
    tasks_.at(vehicle) = static_cast<int>(task) + 1;
}

std::size_t Allocation::assigned_count() const
{
    return static_cast<std::size_t>(
            std::count_if(tasks_.begin(), tasks_.end(),
                    [](int t) { return t != 0; }));
}

std::string Allocation::to_string() const
{
    std::string out = "[";
    for (std::size_t i = 0; i < tasks_.size(); ++i)
    {
        if (i > 0)
        {
            out += ' ';
        }
        out += std::to_string(tasks_[i]);
    }
    out += ']';
    return out;
}

Allocation Allocation::parse(std::string_view text)
{
    std::string cleaned(text);
    for (char &c : cleaned)
    {
        if (c == '[' || c == ']' || c == ',')
        {
            c = ' ';
        }
    }
    std::istringstream in(cleaned);
    std::vector<int> tasks;
    std::string token;
    while (in >> token)
    {
        std::size_t used = 0;
        int value = 0;
        try
        {
            value = std::stoi(token, &used);
        }
        catch (const std::exception &)
        {
            used = 0;
        }
        if (used != token.size() || value < 0)
        {
            throw ValidationError("allocation",
                    "expected non-negative task numbers, got '" + token + "'");
        }
        tasks.push_back(value);
    }
    if (tasks.empty())
    {
        throw ValidationError("allocation", "empty allocation");
    }
    return Allocation(std::move(tasks));
}

void Scenario::validate() const
{
    if (n_vehicles == 0)
    {
        throw ValidationError("n_vehicles", "must be positive");
    }
    if (m_tasks == 0)
    {
        throw ValidationError("m_tasks", "must be positive");
    }
    if (priority.size() != m_tasks)
    {
        throw DimensionError("tasks", "priority has " +
                        std::to_string(priority.size()) + " entries, expected " +
                        std::to_string(m_tasks));
    }
    if (success.size() != m_tasks)
    {
        throw DimensionError("tasks", "success has " +
                        std::to_string(success.size()) + " entries, expected " +
                        std::to_string(m_tasks));
    }
    if (ttc.rows() != n_vehicles)
    {
        throw DimensionError("vehicles", "ttc has " +
                        std::to_string(ttc.rows()) + " rows, expected " +
                        std::to_string(n_vehicles));
    }
    if (ttc.cols() != m_tasks)
    {
        throw DimensionError("tasks", "ttc has " + std::to_string(ttc.cols()) +
                        " columns, expected " + std::to_string(m_tasks));
    }
    if (connectivity.rows() != n_vehicles)
    {
        throw DimensionError("vehicles", "connectivity has " +
                        std::to_string(connectivity.rows()) +
                        " rows, expected " + std::to_string(n_vehicles));
    }
    if (connectivity.cols() != m_tasks)
    {
        throw DimensionError("tasks", "connectivity has " +
                        std::to_string(connectivity.cols()) +
                        " columns, expected " + std::to_string(m_tasks));
    }
    for (std::size_t j = 0; j < m_tasks; ++j)
    {
        if (!(priority[j] >= 0.0) || !std::isfinite(priority[j]))
        {
            throw ValidationError(index_path("priority", j),
                    "must be finite and >= 0");
        }
        if (!(success[j] >= 0.0 && success[j] <= 1.0))
        {
            throw ValidationError(index_path("success", j),
                    "must lie in [0, 1]");
        }
    }
    for (std::size_t i = 0; i < n_vehicles; ++i)
    {
        bool any = false;
        for (std::size_t j = 0; j < m_tasks; ++j)
        {
            const double t = ttc(i, j);
            if (!(t > 0.0) || !std::isfinite(t))
            {
                throw ValidationError(index_path("ttc", i, j),
                        "must be finite and > 0");
            }
            const auto c = connectivity(i, j);
            if (c > 1)
            {
                throw ValidationError(index_path("connectivity", i, j),
                        "must be 0 or 1");
            }
            any = any || c == 1;
        }
        if (!any && !allow_unassignable)
        {
            throw ValidationError(index_path("connectivity", i),
                    "vehicle has no compatible task (set allow_unassignable)");
        }
    }
    weights.validate();
}

Scenario make_scenario(std::vector<double> priority, std::vector<double> success,
        Matrix<double> ttc, RateWeights weights)
{
    Scenario s;
    s.n_vehicles = ttc.rows();
    s.m_tasks = ttc.cols();
    s.priority = std::move(priority);
    s.success = std::move(success);
    s.connectivity = Matrix<std::uint8_t>(ttc.rows(), ttc.cols(), 1);
    s.ttc = std::move(ttc);
    s.weights = weights;
    s.validate();
    return s;
}

Matrix<double> compute_ttc(const Matrix<double> &tta, std::span<const double> tot)
{
    if (tta.cols() != tot.size())
    {
        throw DimensionError("tasks", "tta has " + std::to_string(tta.cols()) +
                        " task columns but tot has " +
                        std::to_string(tot.size()) + " entries");
    }
    Matrix<double> out(tta.rows(), tta.cols());
    for (std::size_t i = 0; i < tta.rows(); ++i)
    {
        for (std::size_t j = 0; j < tta.cols(); ++j)
        {
            const double arrival = tta(i, j);
            if (!(arrival >= 0.0))
            {
                throw ValidationError(index_path("tta", i, j), "must be >= 0");
            }
            if (!(tot[j] >= 0.0))
            {
                throw ValidationError(index_path("tot", j), "must be >= 0");
            }
            if (arrival == 0.0 && tot[j] == 0.0)
            {
                throw ValidationError(index_path("ttc", i, j),
                        "tta and tot are both zero");
            }
            out(i, j) = arrival + tot[j];
        }
    }
    return out;
}

Matrix<double> time_reward(const Matrix<double> &ttc)
{
    Matrix<double> out(ttc.rows(), ttc.cols());
    for (std::size_t j = 0; j < ttc.cols(); ++j)
    {
        double column_max = 0.0;
        for (std::size_t i = 0; i < ttc.rows(); ++i)
        {
            const double t = ttc(i, j);
            if (!(t > 0.0) || !std::isfinite(t))
            {
                throw ValidationError(index_path("ttc", i, j),
                        "must be finite and > 0");
            }
            column_max = std::max(column_max, t);
        }
        for (std::size_t i = 0; i < ttc.rows(); ++i)
        {
            // The max entry divides to exactly 1.0, so its reward is exactly 0.
            out(i, j) = 1.0 - ttc(i, j) / column_max;
        }
    }
    return out;
}

Matrix<double> base_rates(const Scenario &scenario)
{
    scenario.validate();
    const Matrix<double> t = time_reward(scenario.ttc);
    const RateWeights &w = scenario.weights;
    Matrix<double> gamma(scenario.n_vehicles, scenario.m_tasks);
    for (std::size_t i = 0; i < scenario.n_vehicles; ++i)
    {
        for (std::size_t j = 0; j < scenario.m_tasks; ++j)
        {
            gamma(i, j) = w.w_p * scenario.priority[j] +
                    w.w_s * scenario.success[j] + w.w_t * t(i, j);
        }
    }
    return gamma;
}

RewardEvaluator::RewardEvaluator(const Scenario &scenario)
        : n_vehicles_(scenario.n_vehicles), m_tasks_(scenario.m_tasks),
          gamma_(base_rates(scenario)), connectivity_(scenario.connectivity),
          by_task_(scenario.m_tasks)
{
    for (std::size_t j = 0; j < m_tasks_; ++j)
    {
        auto &entries = by_task_[j];
        for (std::size_t i = 0; i < n_vehicles_; ++i)
        {
            entries.push_back({static_cast<int>(i), gamma_(i, j)});
        }
        std::stable_sort(entries.begin(), entries.end(),
                [](const Entry &a, const Entry &b) { return a.gamma > b.gamma; });
    }
}

double RewardEvaluator::task_contribution(std::size_t task,
        std::span<const int> task_numbers) const
{
    const int task_number = static_cast<int>(task) + 1;
    double sum = 0.0;
    int k = 0;
    for (const Entry &e : by_task_[task])
    {
        if (task_numbers[static_cast<std::size_t>(e.vehicle)] == task_number)
        {
            sum += std::ldexp(e.gamma, -k);
            ++k;
        }
    }
    return sum;
}

double RewardEvaluator::operator()(std::span<const int> task_numbers) const
{
    double total = 0.0;
    for (std::size_t j = 0; j < m_tasks_; ++j)
    {
        total += task_contribution(j, task_numbers);
    }
    return total;
}

double RewardEvaluator::evaluate(const Allocation &allocation) const
{
    if (allocation.size() != n_vehicles_)
    {
        throw DimensionError("vehicles", "allocation has " +
                        std::to_string(allocation.size()) +
                        " entries, expected " + std::to_string(n_vehicles_));
    }
    for (std::size_t i = 0; i < n_vehicles_; ++i)
    {
        const int t = allocation.task_numbers()[i];
        if (t < 0 || static_cast<std::size_t>(t) > m_tasks_)
        {
            throw ValidationError(index_path("allocation", i),
                    "task number " + std::to_string(t) + " out of range 0.." +
                            std::to_string(m_tasks_));
        }
        if (t != 0 && connectivity_(i, static_cast<std::size_t>(t - 1)) == 0)
        {
            throw ConstraintError(i, static_cast<std::size_t>(t - 1),
                    "vehicle " + std::to_string(i + 1) +
                            " may not serve task " + std::to_string(t));
        }
    }
    return (*this)(allocation.task_numbers());
}

double reward(const Scenario &scenario, const Allocation &allocation)
{
    return RewardEvaluator(scenario).evaluate(allocation);
}

void ValueRanges::validate() const
{
    const auto check = [](const Range &r, const char *name) {
        if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.hi < r.lo)
        {
            throw ConfigError(std::string(name) + " range [" +
                    std::to_string(r.lo) + ", " + std::to_string(r.hi) +
                    "] is invalid");
        }
    };
    check(priority, "priority");
    check(success, "success");
    check(ttc, "ttc");
    if (priority.lo < 0.0)
    {
        throw ConfigError("priority range must be non-negative");
    }
    if (success.lo < 0.0 || success.hi > 1.0)
    {
        throw ConfigError("success range must lie within [0, 1]");
    }
    if (!(ttc.lo > 0.0))
    {
        throw ConfigError("ttc range lower bound must be > 0");
    }
}

Scenario generate_scenario(std::uint64_t seed, std::size_t n_vehicles,
        std::size_t m_tasks, const ValueRanges &ranges,
        const RateWeights &weights)
{
    if (n_vehicles == 0 || m_tasks == 0)
    {
        throw ConfigError("scenario size must be at least 1x1");
    }
    ranges.validate();
    weights.validate();

    std::mt19937_64 engine(seed);
    std::vector<double> priority(m_tasks);
    std::vector<double> success(m_tasks);
    for (auto &p : priority)
    {
        p = draw(engine, ranges.priority);
    }
    for (auto &s : success)
    {
        s = draw(engine, ranges.success);
    }
    Matrix<double> ttc(n_vehicles, m_tasks);
    for (double &t : ttc.flat())
    {
        t = draw(engine, ranges.ttc);
    }
    return make_scenario(std::move(priority), std::move(success), std::move(ttc),
            weights);
}

} // namespace spikealloc
