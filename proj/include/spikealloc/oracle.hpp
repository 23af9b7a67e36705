// oracle.hpp - exhaustive search over every allocation of a scenario.
//
// The space is enumerated as a mixed-radix counter with one digit per
//  vehicle, vehicle 1 the least significant. Digit 0 means unassigned and
//  digits 1..k walk the vehicle's compatible tasks in ascending order, so a
//  fully connected N x M scenario has exactly (M + 1)^N candidates.
//  Enumeration is split into contiguous index chunks that are scored
//  independently and reduced in chunk order.
#ifndef SPIKEALLOC_ORACLE_HPP
#define SPIKEALLOC_ORACLE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "spikealloc/scenario.hpp"

namespace spikealloc
{

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::uint64_t kDefaultSearchBudget = 100'000'000;

// (m_tasks + 1)^n_vehicles: each vehicle picks one task or none.
BigInt solution_count(std::size_t n_vehicles, std::size_t m_tasks);

struct OracleOptions
{
    std::uint64_t budget{kDefaultSearchBudget};
    bool override_budget{false};
    unsigned chunks{0}; // 0 = one per hardware thread
};

class SolutionSpace
{
public:
    explicit SolutionSpace(const Scenario &scenario);

    // Exact size of the feasible space (product of per-vehicle radices).
    [[nodiscard]] const BigInt &size() const noexcept { return size_; }
    // Throws BudgetError when size() exceeds the budget and no override.
    void check_budget(const OracleOptions &options) const;

    // Task numbers of the index-th candidate. index < size().
    void decode(std::uint64_t index, std::vector<int> &task_numbers) const;
    [[nodiscard]] std::uint64_t encode(const Allocation &allocation) const;

    [[nodiscard]] std::size_t n_vehicles() const noexcept { return radix_.size(); }
    [[nodiscard]] std::uint32_t radix(std::size_t vehicle) const { return radix_[vehicle]; }
    // Task number for digit d of vehicle i; digit 0 is always 0.
    [[nodiscard]] int task_number(std::size_t vehicle, std::uint32_t digit) const
    {
        return digit_task_[vehicle][digit];
    }

private:
    std::vector<std::uint32_t> radix_;
    std::vector<std::vector<int>> digit_task_;
    BigInt size_;
};

struct SearchResult
{
    Allocation allocation;
    double reward{0.0};
    std::uint64_t visited{0};
};

struct RankCounts
{
    std::uint64_t strictly_better{0};
    std::uint64_t visited{0};
};

// Highest-reward allocation; ties go to the lexicographically smallest
//  task-number array.
SearchResult search_best(const Scenario &scenario, const OracleOptions &options = {});

// Candidates in [begin, end) whose reward is strictly above reward.
RankCounts count_better(const RewardEvaluator &evaluator,
        const SolutionSpace &space, double reward, std::uint64_t begin,
        std::uint64_t end);
// Same over the whole space, split into `chunks` contiguous ranges that run
//  on their own threads.
RankCounts count_better_partitioned(const RewardEvaluator &evaluator,
        const SolutionSpace &space, double reward, unsigned chunks);

struct RankReport
{
    BigInt rank;  // 1 + number of strictly better allocations
    BigInt total; // feasible space size
    int percentile_hundredths{0};
    double percentile{0.0};
    double best_reward{0.0};
    Allocation best_allocation;
    double candidate_reward{0.0};
    Allocation candidate;
};

RankReport rank_allocation(const Scenario &scenario, const Allocation &candidate,
        const OracleOptions &options = {});
// Ranks several candidates in one enumeration pass.
std::vector<RankReport> rank_allocations(const Scenario &scenario,
        std::span<const Allocation> candidates, const OracleOptions &options = {});

// 10000 for rank 1, otherwise floor(10000 * (total - rank) / total).
int percentile_hundredths(const BigInt &rank, const BigInt &total);
// "99.96", "100.00"
std::string format_percentile(int hundredths);

} // namespace spikealloc

#endif
