// loihi_sim.hpp - discrete-tick simulator of the three-layer allocation
//  network as it is laid out on a Loihi-style chip.
//
// Layers:
//   input         N*M constant spikers, one spike every input_period ticks
//   accumulation  N*M integrate-and-fire neurons, one per vehicle-task pair,
//                 fed one-to-one from the input layer with integer weights
//   control       N vehicle neurons then M task neurons; an accumulation
//                 spike arms both controls of its pair, and an armed control
//                 fires every control_period ticks from then on
//
// Vehicle control i inhibits every accumulation neuron of vehicle i with
//  weight -255. Task control j inhibits accumulation neuron (i, j) with
//  -round(w_ij / 4); firing at twice the input rate this halves its net
//  gain. Every layer-to-layer hop costs one tick.
//
// Accumulation neurons are listed V1T1, V1T2, ..., V1TM, V2T1, ..., VNTM.
#ifndef SPIKEALLOC_LOIHI_SIM_HPP
#define SPIKEALLOC_LOIHI_SIM_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "spikealloc/matrix.hpp"
#include "spikealloc/scenario.hpp"

namespace spikealloc
{

struct NetworkConfig
{
    int input_period{4};
    int control_period{2};
    std::int64_t threshold_acc{25'500};
    std::int64_t potential_floor{-(std::int64_t{1} << 20)};
    std::int64_t max_ticks{1'000'000};
    int weight_max{255};

    void validate() const;
};

enum class Layer
{
    input,
    accumulation,
    control,
};

const char *layer_name(Layer layer);

struct AccFire
{
    std::size_t vehicle;
    std::size_t task;

    bool operator==(const AccFire &) const = default;
};

struct TickEvents
{
    std::int64_t tick{0};
    bool input_spike{false};
    std::vector<AccFire> accumulation_fires;
    std::vector<std::size_t> control_fires; // control-layer index, 0-based
};

// w_ij = round_half_up(weight_max * Gamma_ij / max(Gamma * CM)), at least 1
//  where Gamma_ij * CM_ij > 0 and exactly 0 where it is 0.
Matrix<int> quantize_rates(const Matrix<double> &gamma,
        const Matrix<std::uint8_t> &connectivity, const NetworkConfig &cfg);

class Network
{
public:
    Network(const Scenario &scenario, const NetworkConfig &cfg);

    [[nodiscard]] std::size_t n_vehicles() const noexcept { return n_vehicles_; }
    [[nodiscard]] std::size_t m_tasks() const noexcept { return m_tasks_; }
    [[nodiscard]] std::size_t n_input() const noexcept { return n_vehicles_ * m_tasks_; }
    [[nodiscard]] std::size_t n_accumulation() const noexcept
    {
        return n_vehicles_ * m_tasks_;
    }
    [[nodiscard]] std::size_t n_control() const noexcept
    {
        return n_vehicles_ + m_tasks_;
    }
    [[nodiscard]] std::size_t total_neurons() const noexcept
    {
        return n_input() + n_accumulation() + n_control();
    }

    // 1-based position of pair (vehicle, task) in the accumulation list
    [[nodiscard]] std::size_t accumulation_index(std::size_t vehicle,
            std::size_t task) const noexcept
    {
        return vehicle * m_tasks_ + task + 1;
    }
    [[nodiscard]] AccFire pair_of(std::size_t accumulation_index) const;
    [[nodiscard]] std::size_t vehicle_control(std::size_t vehicle) const noexcept
    {
        return vehicle;
    }
    [[nodiscard]] std::size_t task_control(std::size_t task) const noexcept
    {
        return n_vehicles_ + task;
    }

    [[nodiscard]] const NetworkConfig &config() const noexcept { return cfg_; }
    [[nodiscard]] const Matrix<double> &gamma() const noexcept { return gamma_; }
    [[nodiscard]] const Matrix<int> &acc_weights() const noexcept { return acc_weights_; }
    [[nodiscard]] const Matrix<int> &task_ctrl_weights() const noexcept
    {
        return task_ctrl_weights_;
    }
    [[nodiscard]] int vehicle_ctrl_weight() const noexcept { return vehicle_ctrl_weight_; }
    // Control neurons fire on a single accumulation spike; the recurrent
    //  self-connection (delay control_period) re-fires them from then on.
    [[nodiscard]] int control_threshold() const noexcept { return 1; }
    [[nodiscard]] int control_recurrent_weight() const noexcept { return 1; }

    [[nodiscard]] std::int64_t tick() const noexcept { return tick_; }
    [[nodiscard]] std::int64_t potential(std::size_t vehicle, std::size_t task) const
    {
        return potential_(vehicle, task);
    }
    [[nodiscard]] bool has_fired(std::size_t vehicle, std::size_t task) const
    {
        return fired_(vehicle, task) != 0;
    }
    [[nodiscard]] bool control_armed(std::size_t control) const
    {
        return armed_at_.at(control).has_value();
    }

    // Advance one synchronous tick. Throws Error once max_ticks is reached.
    TickEvents step();

    // Potentials of the last step before any fire reset, V1T1..VNTM order.
    [[nodiscard]] std::span<const std::int64_t> last_voltages() const noexcept
    {
        return last_voltages_;
    }

private:
    std::size_t n_vehicles_;
    std::size_t m_tasks_;
    NetworkConfig cfg_;
    Matrix<double> gamma_;
    Matrix<int> acc_weights_;
    Matrix<int> task_ctrl_weights_;
    int vehicle_ctrl_weight_;

    std::int64_t tick_{0};
    Matrix<std::int64_t> potential_;
    Matrix<std::uint8_t> fired_;
    std::vector<std::optional<std::int64_t>> armed_at_;
    std::vector<std::int64_t> last_voltages_;

    // Spikes emitted last tick, delivered this tick.
    bool pending_input_{false};
    std::vector<AccFire> pending_acc_;
    std::vector<std::uint8_t> pending_control_;
};

Network build_network(const Scenario &scenario, const NetworkConfig &cfg = {});

struct Resolution
{
    std::vector<AccFire> admitted;  // admission order
    std::vector<AccFire> discarded;
};

// Admit same-tick fires one at a time by descending unquantized Gamma (ties:
//  lower vehicle, then lower task). A fire whose vehicle is already taken,
//  by an earlier tick (assigned[i] != 0) or by an earlier admission in this
//  group, is discarded. assigned is updated in place.
Resolution resolve_conflicts(std::span<const AccFire> fires,
        const Matrix<double> &gamma, std::vector<std::uint8_t> &assigned);

struct RasterEntry
{
    std::int64_t tick;
    Layer layer;
    std::size_t neuron; // 1-based within its layer
};

struct FireRecord
{
    std::int64_t tick;
    AccFire pair;
    bool admitted;
};

struct ConflictGroup
{
    std::int64_t tick;
    std::vector<AccFire> fires;
    Resolution resolution;
};

struct RunOptions
{
    bool record_raster{true};
    bool record_voltage{true};
};

struct SimResult
{
    Allocation allocation;
    std::vector<FireRecord> fires;        // every accumulation fire
    std::vector<ConflictGroup> conflicts; // same-tick groups of size > 1
    std::vector<RasterEntry> raster;
    // voltage_trace[k] is the series of accumulation neuron k + 1, one value
    //  per simulated tick
    std::vector<std::vector<std::int32_t>> voltage_trace;
    std::int64_t ticks{0};
    bool timed_out{false};
    std::size_t total_neurons{0};
};

SimResult run(const Scenario &scenario, const NetworkConfig &cfg = {},
        const RunOptions &options = {});
SimResult run(Network &network, const RunOptions &options = {});

// "tick,layer,neuron_id"
void write_raster(std::ostream &out, const SimResult &result);
// "tick,neuron_id,potential", accumulation layer only
void write_voltage_trace(std::ostream &out, const SimResult &result);

} // namespace spikealloc

#endif
