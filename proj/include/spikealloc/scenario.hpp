// scenario.hpp - allocation problem data model: scenario, rate weights,
//  allocations, the rate equations and the reward used to score allocations.
//
// Indexing convention: vehicle i and task j are 0-based everywhere in code.
//  Allocation stores 1-based task numbers with 0 meaning "unassigned" so it
//  prints the way allocation results are usually reported ("[4 1 1 3]").
#ifndef SPIKEALLOC_SCENARIO_HPP
#define SPIKEALLOC_SCENARIO_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spikealloc/matrix.hpp"

namespace spikealloc
{

struct RateWeights
{
    double w_p{0.45}; // priority
    double w_s{0.1};  // probability of success
    double w_t{0.5};  // time reward

    void validate() const;
    bool operator==(const RateWeights &) const = default;
};

class Allocation
{
public:
    Allocation() = default;
    explicit Allocation(std::vector<int> task_numbers)
            : tasks_(std::move(task_numbers))
    {
    }

    static Allocation unassigned(std::size_t n_vehicles)
    {
        return Allocation(std::vector<int>(n_vehicles, 0));
    }

    [[nodiscard]] std::size_t size() const noexcept { return tasks_.size(); }
    // 0-based task of vehicle i, or nullopt when unassigned
    [[nodiscard]] std::optional<std::size_t> task_of(std::size_t vehicle) const;
    void assign(std::size_t vehicle, std::size_t task);
    void unassign(std::size_t vehicle) { tasks_.at(vehicle) = 0; }
    [[nodiscard]] bool is_assigned(std::size_t vehicle) const
    {
        return tasks_.at(vehicle) != 0;
    }
    [[nodiscard]] std::size_t assigned_count() const;
    [[nodiscard]] std::span<const int> task_numbers() const noexcept
    {
        return tasks_;
    }

    // "[4 1 1 3]"
    [[nodiscard]] std::string to_string() const;
    // Accepts "[4 1 1 3]", "4 1 1 3" or "4,1,1,3".
    static Allocation parse(std::string_view text);

    bool operator==(const Allocation &) const = default;
    // Lexicographic over the task-number array, vehicle 1 first.
    auto operator<=>(const Allocation &) const = default;

private:
    std::vector<int> tasks_;
};

struct Scenario
{
    std::size_t n_vehicles{0};
    std::size_t m_tasks{0};
    std::vector<double> priority;      // [M], >= 0
    std::vector<double> success;       // [M], in [0, 1]
    Matrix<double> ttc;                // [N][M], > 0
    Matrix<std::uint8_t> connectivity; // [N][M], 0/1
    RateWeights weights;
    // Must be set when some vehicle has an all-zero connectivity row.
    bool allow_unassignable{false};

    // Throws DimensionError/ValidationError on the first violated invariant.
    void validate() const;
    [[nodiscard]] bool compatible(std::size_t vehicle, std::size_t task) const
    {
        return connectivity(vehicle, task) != 0;
    }

    bool operator==(const Scenario &) const = default;
};

// Scenario with all-ones connectivity and default weights, validated.
Scenario make_scenario(std::vector<double> priority, std::vector<double> success,
        Matrix<double> ttc, RateWeights weights = {});

// TTC = TTA + TOT, elementwise over vehicles.
Matrix<double> compute_ttc(const Matrix<double> &tta, std::span<const double> tot);

// T_ij = 1 - TTC_ij / max_i TTC_ij. The column max gets exactly 0.
Matrix<double> time_reward(const Matrix<double> &ttc);

// Gamma_ij = w_p P_j + w_s S_j + w_t T_ij (connectivity not applied).
Matrix<double> base_rates(const Scenario &scenario);

// Reward of an allocation. Per task, assigned vehicles are sorted by Gamma
//  descending (ties: lower vehicle index first) and the k-th one contributes
//  2^-k * Gamma. Tasks are summed in ascending order.
//
// All reward numbers in the project come from this class so that equal
//  allocations always score bit-identically, whichever code path asks.
class RewardEvaluator
{
public:
    explicit RewardEvaluator(const Scenario &scenario);

    // Unchecked hot path: task_numbers holds 0..M per vehicle and every
    //  assigned pair must be compatible. Equals the sum of
    //  task_contribution(j) over ascending j, bit for bit.
    [[nodiscard]] double operator()(std::span<const int> task_numbers) const;
    [[nodiscard]] double task_contribution(std::size_t task,
            std::span<const int> task_numbers) const;
    // Checked: size and connectivity are verified.
    [[nodiscard]] double evaluate(const Allocation &allocation) const;

    [[nodiscard]] const Matrix<double> &gamma() const noexcept { return gamma_; }
    [[nodiscard]] std::size_t n_vehicles() const noexcept { return n_vehicles_; }
    [[nodiscard]] std::size_t m_tasks() const noexcept { return m_tasks_; }

private:
    struct Entry
    {
        int vehicle;
        double gamma;
    };
    std::size_t n_vehicles_;
    std::size_t m_tasks_;
    Matrix<double> gamma_;
    Matrix<std::uint8_t> connectivity_;
    std::vector<std::vector<Entry>> by_task_; // vehicles by Gamma descending
};

double reward(const Scenario &scenario, const Allocation &allocation);

struct Range
{
    double lo;
    double hi;
};

struct ValueRanges
{
    Range priority{0.0, 1.0};
    Range success{0.0, 1.0};
    Range ttc{1.0, 10.0};

    void validate() const;
};

// Deterministic for a fixed seed. Connectivity is all ones.
Scenario generate_scenario(std::uint64_t seed, std::size_t n_vehicles,
        std::size_t m_tasks, const ValueRanges &ranges = {},
        const RateWeights &weights = {});

// Scenario file I/O. Format: see docs/scenario_format.md.
Scenario parse_scenario(std::string_view text);
std::string format_scenario(const Scenario &scenario);
Scenario load_scenario(const std::string &path);
void save_scenario(const Scenario &scenario, const std::string &path);

} // namespace spikealloc

#endif
