// report.hpp - result tables: rank reports and the benchmark harness.
#ifndef SPIKEALLOC_REPORT_HPP
#define SPIKEALLOC_REPORT_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spikealloc/loihi_sim.hpp"
#include "spikealloc/oracle.hpp"
#include "spikealloc/scenario.hpp"

namespace spikealloc
{

struct ProblemSize
{
    std::size_t n_vehicles;
    std::size_t m_tasks;

    // "NxM"; throws ConfigError unless both sides are positive integers
    static ProblemSize parse(const std::string &text);
    [[nodiscard]] std::string to_string() const;
    bool operator==(const ProblemSize &) const = default;
};

// Baseline (exhaustive optimum) next to the candidate, one CSV row.
void write_rank_report(std::ostream &out, const RankReport &report,
        ProblemSize size, const std::string &solver);

struct BenchRecord
{
    std::uint64_t seed{0};
    ProblemSize size{0, 0};
    std::string solver; // "ideal" or "loihi"
    double wall_ms{0.0};
    Allocation allocation;
    double reward{0.0};
    std::optional<RankReport> rank; // empty when over budget
    std::string status{"ok"};       // "ok", "timeout", "over-budget", "error: ..."
};

struct BenchSummary
{
    ProblemSize size;
    std::size_t trials{0};
    std::size_t neurons{0};
    std::string solution_count;
    // per solver: median/min percentile over ranked trials and mean wall time
    struct Solver
    {
        std::string name;
        std::size_t ranked{0};
        std::size_t failures{0};
        std::optional<double> median_percentile;
        std::optional<double> min_percentile;
        double mean_wall_ms{0.0};
    };
    std::vector<Solver> solvers;
    double mean_oracle_ms{0.0};
};

struct BenchOptions
{
    std::vector<ProblemSize> sizes;
    std::size_t trials{1};
    std::uint64_t seed{1};
    ValueRanges ranges;
    RateWeights weights;
    double ideal_threshold{1.0};
    NetworkConfig loihi;
    OracleOptions oracle;
};

struct BenchResult
{
    std::vector<BenchRecord> records;
    std::vector<BenchSummary> summaries;
};

// Trial t of every size uses scenario seed (seed + t).
BenchResult run_bench(const BenchOptions &options);

double median(std::vector<double> values);

void write_bench_table(std::ostream &out, const BenchResult &result, bool timing);
void write_bench_json(std::ostream &out, const BenchResult &result, bool timing);
void write_bench_records(std::ostream &out, const BenchResult &result, bool timing);

} // namespace spikealloc

#endif
