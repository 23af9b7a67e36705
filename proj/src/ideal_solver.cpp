#include <cmath>
#include <iomanip>
#include <limits>
#include <string>

#include "spikealloc/error.hpp"
#include "spikealloc/ideal_solver.hpp"

namespace spikealloc
{

SolverState::SolverState(std::size_t n_vehicles, std::size_t m_tasks)
        : potential(n_vehicles, m_tasks, 0.0), tau(n_vehicles, 1),
          d_count(m_tasks, 0), beta(m_tasks, 1.0)
{
}

void SolverState::assign(std::size_t vehicle, std::size_t task)
{
    tau[vehicle] = 0;
    ++d_count[task];
    beta[task] = std::ldexp(1.0, -static_cast<int>(d_count[task]));
}

Matrix<double> effective_rates(const Matrix<double> &gamma,
        const Matrix<std::uint8_t> &connectivity, std::span<const double> beta,
        std::span<const std::uint8_t> tau)
{
    if (connectivity.rows() != gamma.rows() || tau.size() != gamma.rows())
    {
        throw DimensionError("vehicles",
                "gamma, connectivity and tau disagree on vehicle count");
    }
    if (connectivity.cols() != gamma.cols() || beta.size() != gamma.cols())
    {
        throw DimensionError("tasks",
                "gamma, connectivity and beta disagree on task count");
    }
    Matrix<double> rates(gamma.rows(), gamma.cols());
    for (std::size_t i = 0; i < gamma.rows(); ++i)
    {
        for (std::size_t j = 0; j < gamma.cols(); ++j)
        {
            rates(i, j) = static_cast<double>(connectivity(i, j)) * beta[j] *
                    static_cast<double>(tau[i]) * gamma(i, j);
        }
    }
    return rates;
}

SolveResult solve_rates(const Matrix<double> &gamma,
        const Matrix<std::uint8_t> &connectivity, double threshold)
{
    if (!(threshold > 0.0) || !std::isfinite(threshold))
    {
        throw ConfigError("firing threshold must be finite and > 0");
    }
    const std::size_t n = gamma.rows();
    const std::size_t m = gamma.cols();

    SolverState state(n, m);
    SolveResult result;
    result.allocation = Allocation::unassigned(n);

    Matrix<double> rates = effective_rates(gamma, connectivity, state.beta, state.tau);
    for (std::size_t i = 0; i < n; ++i)
    {
        bool any = false;
        for (std::size_t j = 0; j < m; ++j)
        {
            any = any || rates(i, j) > 0.0;
        }
        if (!any)
        {
            result.unassignable.push_back(i);
        }
    }

    for (;;)
    {
        // Next firing neuron. Row-major scan with a strict "earlier by more
        //  than the tolerance" test keeps the lowest (vehicle, task) on ties.
        double best_dt = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        std::size_t best_j = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            if (state.tau[i] == 0)
            {
                continue;
            }
            for (std::size_t j = 0; j < m; ++j)
            {
                const double a = rates(i, j);
                if (a <= 0.0)
                {
                    continue;
                }
                const double remaining = threshold - state.potential(i, j);
                const double dt = remaining > 0.0 ? remaining / a : 0.0;
                if (dt < best_dt - kFireTimeTieTolerance)
                {
                    best_dt = dt;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (!std::isfinite(best_dt))
        {
            break;
        }

        for (std::size_t k = 0; k < rates.size(); ++k)
        {
            state.potential.flat()[k] += best_dt * rates.flat()[k];
        }
        state.potential(best_i, best_j) = threshold;
        state.clock += best_dt;
        state.assign(best_i, best_j);
        result.allocation.assign(best_i, best_j);
        result.events.push_back({state.clock, best_i, best_j});
        rates = effective_rates(gamma, connectivity, state.beta, state.tau);
    }
    return result;
}

SolveResult solve(const Scenario &scenario, double threshold)
{
    return solve_rates(base_rates(scenario), scenario.connectivity, threshold);
}

void write_event_log(std::ostream &out, const SolveResult &result)
{
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << "# spikealloc-events v1\n";
    out << "time,vehicle,task\n";
    out << std::setprecision(17);
    for (const FireEvent &e : result.events)
    {
        out << e.time << ',' << e.vehicle + 1 << ',' << e.task + 1 << '\n';
    }
    out.flags(flags);
    out.precision(precision);
}

} // namespace spikealloc
