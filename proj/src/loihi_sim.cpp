#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spikealloc/error.hpp"
#include "spikealloc/loihi_sim.hpp"

namespace spikealloc
{

namespace
{

constexpr std::int64_t kMaxThreshold = std::int64_t{1} << 30;

int round_half_up(double x)
{
    return static_cast<int>(std::floor(x + 0.5));
}

} // namespace

void NetworkConfig::validate() const
{
    if (input_period < 2 || input_period % 2 != 0)
    {
        throw ConfigError("input_period must be an even number >= 2, got " +
                std::to_string(input_period));
    }
    if (control_period * 2 != input_period)
    {
        throw ConfigError("control_period must be input_period / 2");
    }
    if (threshold_acc <= 0 || threshold_acc > kMaxThreshold)
    {
        throw ConfigError("threshold_acc must lie in [1, 2^30]");
    }
    if (potential_floor > 0 || potential_floor < -kMaxThreshold)
    {
        throw ConfigError("potential_floor must lie in [-2^30, 0]");
    }
    if (max_ticks <= 0)
    {
        throw ConfigError("max_ticks must be positive");
    }
    if (weight_max != 255)
    {
        throw ConfigError("weight_max is fixed at 255");
    }
}

const char *layer_name(Layer layer)
{
    switch (layer)
    {
    case Layer::input:
        return "input";
    case Layer::accumulation:
        return "accumulation";
    case Layer::control:
        return "control";
    }
    return "?";
}

Matrix<int> quantize_rates(const Matrix<double> &gamma,
        const Matrix<std::uint8_t> &connectivity, const NetworkConfig &cfg)
{
    if (gamma.rows() != connectivity.rows() || gamma.cols() != connectivity.cols())
    {
        throw DimensionError("vehicles",
                "gamma and connectivity shapes disagree");
    }
    double max_rate = 0.0;
    for (std::size_t k = 0; k < gamma.size(); ++k)
    {
        const double g = gamma.flat()[k];
        if (!(g >= 0.0) || !std::isfinite(g))
        {
            throw ValidationError("gamma", "rates must be finite and >= 0");
        }
        if (connectivity.flat()[k] != 0)
        {
            max_rate = std::max(max_rate, g);
        }
    }
    if (max_rate <= 0.0)
    {
        throw ValidationError("gamma", "cannot quantize an all-zero rate matrix");
    }
    Matrix<int> w(gamma.rows(), gamma.cols(), 0);
    for (std::size_t k = 0; k < gamma.size(); ++k)
    {
        const double g = gamma.flat()[k];
        if (connectivity.flat()[k] == 0 || g <= 0.0)
        {
            continue;
        }
        w.flat()[k] = std::clamp(round_half_up(cfg.weight_max * g / max_rate), 1,
                cfg.weight_max);
    }
    return w;
}

Network::Network(const Scenario &scenario, const NetworkConfig &cfg)
        : n_vehicles_(scenario.n_vehicles), m_tasks_(scenario.m_tasks), cfg_(cfg),
          gamma_(base_rates(scenario)),
          vehicle_ctrl_weight_(-cfg.weight_max),
          potential_(scenario.n_vehicles, scenario.m_tasks, 0),
          fired_(scenario.n_vehicles, scenario.m_tasks, 0),
          armed_at_(scenario.n_vehicles + scenario.m_tasks),
          last_voltages_(scenario.n_vehicles * scenario.m_tasks, 0),
          pending_control_(scenario.n_vehicles + scenario.m_tasks, 0)
{
    cfg_.validate();
    acc_weights_ = quantize_rates(gamma_, scenario.connectivity, cfg_);
    task_ctrl_weights_ = Matrix<int>(n_vehicles_, m_tasks_, 0);
    for (std::size_t k = 0; k < acc_weights_.size(); ++k)
    {
        // -round(w / 4), halves rounded up
        task_ctrl_weights_.flat()[k] = -((acc_weights_.flat()[k] + 2) / 4);
    }
}

AccFire Network::pair_of(std::size_t accumulation_index) const
{
    if (accumulation_index == 0 || accumulation_index > n_accumulation())
    {
        throw std::out_of_range("accumulation index out of range");
    }
    const std::size_t k = accumulation_index - 1;
    return {k / m_tasks_, k % m_tasks_};
}

TickEvents Network::step()
{
    if (tick_ >= cfg_.max_ticks)
    {
        throw Error("network stepped past max_ticks (" +
                std::to_string(cfg_.max_ticks) + ")");
    }
    TickEvents ev;
    ev.tick = tick_;

    // Input layer: bias-driven, all input neurons spike together.
    ev.input_spike = tick_ % cfg_.input_period == 0;

    // Accumulation layer integrates what the previous tick emitted.
    for (std::size_t i = 0; i < n_vehicles_; ++i)
    {
        const bool vehicle_inhibit = pending_control_[vehicle_control(i)] != 0;
        for (std::size_t j = 0; j < m_tasks_; ++j)
        {
            std::int64_t &v = potential_(i, j);
            std::int64_t &trace = last_voltages_[i * m_tasks_ + j];
            if (fired_(i, j))
            {
                trace = v;
                continue;
            }
            std::int64_t delta = 0;
            if (pending_input_)
            {
                delta += acc_weights_(i, j);
            }
            if (vehicle_inhibit)
            {
                delta += vehicle_ctrl_weight_;
            }
            if (pending_control_[task_control(j)] != 0)
            {
                delta += task_ctrl_weights_(i, j);
            }
            v = std::max(cfg_.potential_floor, v + delta);
            trace = v;
            if (v >= cfg_.threshold_acc)
            {
                ev.accumulation_fires.push_back({i, j});
                v = 0;
                fired_(i, j) = 1;
            }
        }
    }

    // Control layer: arm on a delivered accumulation spike, then fire every
    //  control_period ticks (recurrent self-excitation).
    for (const AccFire &f : pending_acc_)
    {
        for (const std::size_t c : {vehicle_control(f.vehicle), task_control(f.task)})
        {
            if (!armed_at_[c])
            {
                armed_at_[c] = tick_;
            }
        }
    }
    std::vector<std::uint8_t> control_out(n_control(), 0);
    for (std::size_t c = 0; c < n_control(); ++c)
    {
        if (armed_at_[c] && (tick_ - *armed_at_[c]) % cfg_.control_period == 0)
        {
            control_out[c] = 1;
            ev.control_fires.push_back(c);
        }
    }

    pending_input_ = ev.input_spike;
    pending_acc_ = ev.accumulation_fires;
    pending_control_ = std::move(control_out);
    ++tick_;
    return ev;
}

Network build_network(const Scenario &scenario, const NetworkConfig &cfg)
{
    return Network(scenario, cfg);
}

Resolution resolve_conflicts(std::span<const AccFire> fires,
        const Matrix<double> &gamma, std::vector<std::uint8_t> &assigned)
{
    std::vector<AccFire> order(fires.begin(), fires.end());
    std::sort(order.begin(), order.end(), [&](const AccFire &a, const AccFire &b) {
        const double ga = gamma(a.vehicle, a.task);
        const double gb = gamma(b.vehicle, b.task);
        if (ga != gb)
        {
            return ga > gb;
        }
        if (a.vehicle != b.vehicle)
        {
            return a.vehicle < b.vehicle;
        }
        return a.task < b.task;
    });
    Resolution out;
    for (const AccFire &f : order)
    {
        if (assigned.at(f.vehicle) != 0)
        {
            out.discarded.push_back(f);
            continue;
        }
        assigned[f.vehicle] = 1;
        out.admitted.push_back(f);
    }
    return out;
}

SimResult run(Network &network, const RunOptions &options)
{
    const std::size_t n = network.n_vehicles();
    const std::size_t m = network.m_tasks();
    SimResult result;
    result.allocation = Allocation::unassigned(n);
    result.total_neurons = network.total_neurons();
    if (options.record_voltage)
    {
        result.voltage_trace.resize(network.n_accumulation());
    }

    // Vehicles that can fire at all; the run ends when each has a winner.
    std::vector<std::uint8_t> assigned(n, 0);
    std::size_t outstanding = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        bool any = false;
        for (std::size_t j = 0; j < m; ++j)
        {
            any = any || network.acc_weights()(i, j) > 0;
        }
        if (any)
        {
            ++outstanding;
        }
        else
        {
            assigned[i] = 1; // never competes
        }
    }

    while (outstanding > 0)
    {
        if (network.tick() >= network.config().max_ticks)
        {
            result.timed_out = true;
            break;
        }
        const TickEvents ev = network.step();
        ++result.ticks;

        if (options.record_voltage)
        {
            const auto v = network.last_voltages();
            for (std::size_t k = 0; k < v.size(); ++k)
            {
                result.voltage_trace[k].push_back(static_cast<std::int32_t>(v[k]));
            }
        }
        if (options.record_raster)
        {
            if (ev.input_spike)
            {
                for (std::size_t k = 1; k <= network.n_input(); ++k)
                {
                    result.raster.push_back({ev.tick, Layer::input, k});
                }
            }
            for (const AccFire &f : ev.accumulation_fires)
            {
                result.raster.push_back({ev.tick, Layer::accumulation,
                        network.accumulation_index(f.vehicle, f.task)});
            }
            for (const std::size_t c : ev.control_fires)
            {
                result.raster.push_back({ev.tick, Layer::control, c + 1});
            }
        }
        if (ev.accumulation_fires.empty())
        {
            continue;
        }

        Resolution res = resolve_conflicts(ev.accumulation_fires, network.gamma(),
                assigned);
        for (const AccFire &f : res.admitted)
        {
            result.allocation.assign(f.vehicle, f.task);
            --outstanding;
        }
        for (const AccFire &f : ev.accumulation_fires)
        {
            const bool admitted = std::find(res.admitted.begin(),
                    res.admitted.end(), f) != res.admitted.end();
            result.fires.push_back({ev.tick, f, admitted});
        }
        if (ev.accumulation_fires.size() > 1)
        {
            result.conflicts.push_back(
                    {ev.tick, ev.accumulation_fires, std::move(res)});
        }
    }
    return result;
}

SimResult run(const Scenario &scenario, const NetworkConfig &cfg,
        const RunOptions &options)
{
    Network network(scenario, cfg);
    return run(network, options);
}

void write_raster(std::ostream &out, const SimResult &result)
{
    out << "# spikealloc-raster v1\n";
    out << "tick,layer,neuron_id\n";
    for (const RasterEntry &e : result.raster)
    {
        out << e.tick << ',' << layer_name(e.layer) << ',' << e.neuron << '\n';
    }
}

void write_voltage_trace(std::ostream &out, const SimResult &result)
{
    out << "# spikealloc-voltage v1\n";
    out << "tick,neuron_id,potential\n";
    for (std::int64_t t = 0; t < result.ticks; ++t)
    {
        for (std::size_t k = 0; k < result.voltage_trace.size(); ++k)
        {
            out << t << ',' << k + 1 << ','
                << result.voltage_trace[k][static_cast<std::size_t>(t)] << '\n';
        }
    }
}

} // namespace spikealloc
