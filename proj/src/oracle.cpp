#include <algorithm>
#include <cstdio>
#include <thread>

#include "spikealloc/error.hpp"
#include "spikealloc/oracle.hpp"

namespace spikealloc
{

namespace
{

unsigned resolve_chunks(unsigned requested)
{
    if (requested > 0)
    {
        return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Walks a contiguous index range, updating only the per-task reward terms
//  touched by each odometer step.
class Scanner
{
public:
    Scanner(const RewardEvaluator &evaluator, const SolutionSpace &space,
            std::uint64_t start)
            : evaluator_(evaluator), space_(space),
              digits_(space.n_vehicles(), 0), contrib_(evaluator.m_tasks(), 0.0),
              dirty_(evaluator.m_tasks(), 0)
    {
        space_.decode(start, tasks_);
        std::uint64_t rest = start;
        for (std::size_t i = 0; i < digits_.size(); ++i)
        {
            digits_[i] = static_cast<std::uint32_t>(rest % space_.radix(i));
            rest /= space_.radix(i);
        }
        for (std::size_t j = 0; j < contrib_.size(); ++j)
        {
            contrib_[j] = evaluator_.task_contribution(j, tasks_);
        }
    }

    [[nodiscard]] double reward() const
    {
        double total = 0.0;
        for (const double c : contrib_)
        {
            total += c;
        }
        return total;
    }

    [[nodiscard]] const std::vector<int> &tasks() const noexcept { return tasks_; }

    void advance()
    {
        for (std::size_t i = 0; i < digits_.size(); ++i)
        {
            mark(tasks_[i]);
            if (++digits_[i] == space_.radix(i))
            {
                digits_[i] = 0;
                tasks_[i] = 0;
                continue;
            }
            tasks_[i] = space_.task_number(i, digits_[i]);
            mark(tasks_[i]);
            break;
        }
        for (const std::size_t j : touched_)
        {
            contrib_[j] = evaluator_.task_contribution(j, tasks_);
            dirty_[j] = 0;
        }
        touched_.clear();
    }

private:
    void mark(int task_number)
    {
        if (task_number == 0)
        {
            return;
        }
        const auto j = static_cast<std::size_t>(task_number - 1);
        if (!dirty_[j])
        {
            dirty_[j] = 1;
            touched_.push_back(j);
        }
    }

    const RewardEvaluator &evaluator_;
    const SolutionSpace &space_;
    std::vector<std::uint32_t> digits_;
    std::vector<int> tasks_;
    std::vector<double> contrib_;
    std::vector<std::uint8_t> dirty_;
    std::vector<std::size_t> touched_;
};

struct ChunkBest
{
    double reward{-1.0};
    std::vector<int> tasks;
    std::uint64_t visited{0};
};

bool better(double reward, const std::vector<int> &tasks, const ChunkBest &best)
{
    if (best.tasks.empty())
    {
        return true;
    }
    if (reward != best.reward)
    {
        return reward > best.reward;
    }
    return std::lexicographical_compare(tasks.begin(), tasks.end(),
            best.tasks.begin(), best.tasks.end());
}

ChunkBest best_in_range(const RewardEvaluator &evaluator,
        const SolutionSpace &space, std::uint64_t begin, std::uint64_t end)
{
    ChunkBest best;
    if (begin >= end)
    {
        return best;
    }
    Scanner scan(evaluator, space, begin);
    for (std::uint64_t idx = begin;;)
    {
        const double r = scan.reward();
        if (better(r, scan.tasks(), best))
        {
            best.reward = r;
            best.tasks = scan.tasks();
        }
        ++best.visited;
        if (++idx == end)
        {
            break;
        }
        scan.advance();
    }
    return best;
}

template <typename Result, typename Fn>
std::vector<Result> run_chunks(std::uint64_t total, unsigned chunks, Fn fn)
{
    chunks = static_cast<unsigned>(
            std::min<std::uint64_t>(chunks, std::max<std::uint64_t>(total, 1)));
    std::vector<Result> results(chunks);
    std::vector<std::thread> workers;
    const std::uint64_t base = total / chunks;
    const std::uint64_t extra = total % chunks;
    std::uint64_t begin = 0;
    for (unsigned c = 0; c < chunks; ++c)
    {
        const std::uint64_t end = begin + base + (c < extra ? 1 : 0);
        if (chunks == 1)
        {
            results[c] = fn(begin, end);
        }
        else
        {
            workers.emplace_back([&results, &fn, c, begin, end] {
                results[c] = fn(begin, end);
            });
        }
        begin = end;
    }
    for (auto &w : workers)
    {
        w.join();
    }
    return results;
}

} // namespace

BigInt solution_count(std::size_t n_vehicles, std::size_t m_tasks)
{
    BigInt count = 1;
    for (std::size_t i = 0; i < n_vehicles; ++i)
    {
        count *= BigInt(m_tasks + 1);
    }
    return count;
}

SolutionSpace::SolutionSpace(const Scenario &scenario)
        : radix_(scenario.n_vehicles), digit_task_(scenario.n_vehicles), size_(1)
{
    scenario.validate();
    for (std::size_t i = 0; i < scenario.n_vehicles; ++i)
    {
        digit_task_[i].push_back(0);
        for (std::size_t j = 0; j < scenario.m_tasks; ++j)
        {
            if (scenario.compatible(i, j))
            {
                digit_task_[i].push_back(static_cast<int>(j) + 1);
            }
        }
        radix_[i] = static_cast<std::uint32_t>(digit_task_[i].size());
        size_ *= radix_[i];
    }
}

void SolutionSpace::check_budget(const OracleOptions &options) const
{
    const BigInt limit = options.override_budget
            ? BigInt(std::numeric_limits<std::uint64_t>::max())
            : BigInt(options.budget);
    if (size_ > limit)
    {
        const std::string count = size_.str();
        throw BudgetError(count, "solution space has " + count +
                        " candidates, above the search budget of " +
                        limit.str() +
                        (options.override_budget ? ""
                                                 : " (use --budget-override)"));
    }
}

void SolutionSpace::decode(std::uint64_t index, std::vector<int> &task_numbers) const
{
    task_numbers.resize(radix_.size());
    for (std::size_t i = 0; i < radix_.size(); ++i)
    {
        task_numbers[i] = digit_task_[i][index % radix_[i]];
        index /= radix_[i];
    }
}

std::uint64_t SolutionSpace::encode(const Allocation &allocation) const
{
    if (allocation.size() != radix_.size())
    {
        throw DimensionError("vehicles", "allocation length does not match");
    }
    std::uint64_t index = 0;
    for (std::size_t k = radix_.size(); k-- > 0;)
    {
        const auto &digits = digit_task_[k];
        const auto it = std::find(digits.begin(), digits.end(),
                allocation.task_numbers()[k]);
        if (it == digits.end())
        {
            throw ValidationError("allocation[" + std::to_string(k) + "]",
                    "task is not available to this vehicle");
        }
        index = index * radix_[k] + static_cast<std::uint64_t>(it - digits.begin());
    }
    return index;
}

SearchResult search_best(const Scenario &scenario, const OracleOptions &options)
{
    const SolutionSpace space(scenario);
    space.check_budget(options);
    const RewardEvaluator evaluator(scenario);
    const auto total = space.size().convert_to<std::uint64_t>();

    const auto parts = run_chunks<ChunkBest>(total, resolve_chunks(options.chunks),
            [&](std::uint64_t b, std::uint64_t e) {
                return best_in_range(evaluator, space, b, e);
            });
    ChunkBest best;
    std::uint64_t visited = 0;
    for (const ChunkBest &p : parts)
    {
        visited += p.visited;
        if (!p.tasks.empty() && better(p.reward, p.tasks, best))
        {
            best.reward = p.reward;
            best.tasks = p.tasks;
        }
    }
    return {Allocation(best.tasks), best.reward, visited};
}

RankCounts count_better(const RewardEvaluator &evaluator,
        const SolutionSpace &space, double reward, std::uint64_t begin,
        std::uint64_t end)
{
    RankCounts counts;
    if (begin >= end)
    {
        return counts;
    }
    Scanner scan(evaluator, space, begin);
    for (std::uint64_t idx = begin;;)
    {
        if (scan.reward() > reward)
        {
            ++counts.strictly_better;
        }
        ++counts.visited;
        if (++idx == end)
        {
            break;
        }
        scan.advance();
    }
    return counts;
}

RankCounts count_better_partitioned(const RewardEvaluator &evaluator,
        const SolutionSpace &space, double reward, unsigned chunks)
{
    const auto total = space.size().convert_to<std::uint64_t>();
    const auto parts = run_chunks<RankCounts>(total, resolve_chunks(chunks),
            [&](std::uint64_t b, std::uint64_t e) {
                return count_better(evaluator, space, reward, b, e);
            });
    RankCounts sum;
    for (const RankCounts &p : parts)
    {
        sum.strictly_better += p.strictly_better;
        sum.visited += p.visited;
    }
    return sum;
}

std::vector<RankReport> rank_allocations(const Scenario &scenario,
        std::span<const Allocation> candidates, const OracleOptions &options)
{
    const SolutionSpace space(scenario);
    space.check_budget(options);
    const RewardEvaluator evaluator(scenario);

    std::vector<double> rewards;
    for (const Allocation &c : candidates)
    {
        rewards.push_back(evaluator.evaluate(c));
    }

    struct Partial
    {
        ChunkBest best;
        std::vector<std::uint64_t> better;
    };
    const auto total = space.size().convert_to<std::uint64_t>();
    const auto parts = run_chunks<Partial>(total, resolve_chunks(options.chunks),
            [&](std::uint64_t b, std::uint64_t e) {
                Partial p;
                p.better.assign(rewards.size(), 0);
                if (b >= e)
                {
                    return p;
                }
                Scanner scan(evaluator, space, b);
                for (std::uint64_t idx = b;;)
                {
                    const double r = scan.reward();
                    if (better(r, scan.tasks(), p.best))
                    {
                        p.best.reward = r;
                        p.best.tasks = scan.tasks();
                    }
                    for (std::size_t k = 0; k < rewards.size(); ++k)
                    {
                        p.better[k] += r > rewards[k] ? 1 : 0;
                    }
                    ++p.best.visited;
                    if (++idx == e)
                    {
                        break;
                    }
                    scan.advance();
                }
                return p;
            });

    ChunkBest best;
    std::vector<std::uint64_t> better_counts(rewards.size(), 0);
    for (const Partial &p : parts)
    {
        if (!p.best.tasks.empty() && better(p.best.reward, p.best.tasks, best))
        {
            best.reward = p.best.reward;
            best.tasks = p.best.tasks;
        }
        for (std::size_t k = 0; k < rewards.size(); ++k)
        {
            better_counts[k] += p.better[k];
        }
    }

    std::vector<RankReport> reports;
    for (std::size_t k = 0; k < candidates.size(); ++k)
    {
        RankReport r;
        r.candidate = candidates[k];
        r.candidate_reward = rewards[k];
        r.best_allocation = Allocation(best.tasks);
        r.best_reward = best.reward;
        r.rank = BigInt(better_counts[k]) + 1;
        r.total = space.size();
        r.percentile_hundredths = percentile_hundredths(r.rank, r.total);
        r.percentile = r.percentile_hundredths / 100.0;
        reports.push_back(std::move(r));
    }
    return reports;
}

RankReport rank_allocation(const Scenario &scenario, const Allocation &candidate,
        const OracleOptions &options)
{
    return rank_allocations(scenario, std::span(&candidate, 1), options).front();
}

int percentile_hundredths(const BigInt &rank, const BigInt &total)
{
    if (total <= 0 || rank < 1 || rank > total)
    {
        throw ValidationError("rank", "rank must lie in [1, total]");
    }
    if (rank == 1)
    {
        return 10'000;
    }
    const BigInt scaled = BigInt(10'000) * (total - rank) / total;
    return scaled.convert_to<int>();
}

std::string format_percentile(int hundredths)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%d.%02d", hundredths / 100, hundredths % 100);
    return buf;
}

} // namespace spikealloc
