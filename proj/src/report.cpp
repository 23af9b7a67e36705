#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "spikealloc/error.hpp"
#include "spikealloc/ideal_solver.hpp"
#include "spikealloc/report.hpp"

namespace spikealloc
{

namespace
{

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string opt_fixed(const std::optional<double> &v, int digits)
{
    return v ? fixed(*v, digits) : "n/a";
}

template <typename Fn> double time_ms(Fn &&fn)
{
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

} // namespace

ProblemSize ProblemSize::parse(const std::string &text)
{
    const auto x = text.find_first_of("xX");
    const auto parse_side = [&](const std::string &side) -> std::size_t {
        if (side.empty() || side.size() > 6 ||
                !std::all_of(side.begin(), side.end(),
                        [](char c) { return c >= '0' && c <= '9'; }))
        {
            throw ConfigError("size must look like NxM, got '" + text + "'");
        }
        const auto v = static_cast<std::size_t>(std::stoul(side));
        if (v == 0)
        {
            throw ConfigError("size '" + text + "' must be at least 1x1");
        }
        return v;
    };
    if (x == std::string::npos)
    {
        throw ConfigError("size must look like NxM, got '" + text + "'");
    }
    return {parse_side(text.substr(0, x)), parse_side(text.substr(x + 1))};
}

std::string ProblemSize::to_string() const
{
    return std::to_string(n_vehicles) + "x" + std::to_string(m_tasks);
}

void write_rank_report(std::ostream &out, const RankReport &report,
        ProblemSize size, const std::string &solver)
{
    out << "# spikealloc-rank v1\n";
    out << "size,baseline_reward,baseline_result,solver,candidate_reward,"
           "candidate_result,rank,total,percentile\n";
    out << size.to_string() << ',' << fixed(report.best_reward, 6) << ','
        << report.best_allocation.to_string() << ',' << solver << ','
        << fixed(report.candidate_reward, 6) << ','
        << report.candidate.to_string() << ',' << report.rank.str() << ','
        << report.total.str() << ','
        << format_percentile(report.percentile_hundredths) << '\n';
}

double median(std::vector<double> values)
{
    if (values.empty())
    {
        throw std::invalid_argument("median of an empty set");
    }
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1)
    {
        return values[mid];
    }
    return (values[mid - 1] + values[mid]) / 2.0;
}

BenchResult run_bench(const BenchOptions &options)
{
    if (options.sizes.empty())
    {
        throw ConfigError("bench needs at least one size");
    }
    if (options.trials == 0)
    {
        throw ConfigError("bench needs at least one trial");
    }
    BenchResult result;
    for (const ProblemSize &size : options.sizes)
    {
        BenchSummary summary;
        summary.size = size;
        summary.trials = options.trials;
        summary.neurons = 2 * size.n_vehicles * size.m_tasks + size.n_vehicles +
                size.m_tasks;
        summary.solution_count = solution_count(size.n_vehicles, size.m_tasks).str();

        std::vector<BenchRecord> ideal_records;
        std::vector<BenchRecord> loihi_records;
        double oracle_ms_total = 0.0;
        std::size_t oracle_runs = 0;

        for (std::size_t t = 0; t < options.trials; ++t)
        {
            const std::uint64_t seed = options.seed + t;
            const Scenario scenario = generate_scenario(seed, size.n_vehicles,
                    size.m_tasks, options.ranges, options.weights);
            const RewardEvaluator evaluator(scenario);

            BenchRecord ideal;
            ideal.seed = seed;
            ideal.size = size;
            ideal.solver = "ideal";
            BenchRecord loihi = ideal;
            loihi.solver = "loihi";
            SolveResult solved;
            ideal.wall_ms = time_ms(
                    [&] { solved = solve(scenario, options.ideal_threshold); });
            ideal.allocation = solved.allocation;
            ideal.reward = evaluator.evaluate(ideal.allocation);

            try
            {
                SimResult sim;
                loihi.wall_ms = time_ms([&] {
                    sim = run(scenario, options.loihi, RunOptions{false, false});
                });
                loihi.allocation = sim.allocation;
                loihi.reward = evaluator.evaluate(loihi.allocation);
                if (sim.timed_out)
                {
                    loihi.status = "timeout";
                }
            }
            catch (const std::exception &err)
            {
                loihi.allocation = Allocation::unassigned(size.n_vehicles);
                loihi.status = std::string("error: ") + err.what();
            }

            try
            {
                const Allocation candidates[] = {ideal.allocation, loihi.allocation};
                std::vector<RankReport> ranks;
                oracle_ms_total += time_ms([&] {
                    ranks = rank_allocations(scenario, candidates, options.oracle);
                });
                ++oracle_runs;
                ideal.rank = ranks[0];
                if (loihi.status == "ok")
                {
                    loihi.rank = ranks[1];
                }
            }
            catch (const BudgetError &)
            {
                ideal.status = "over-budget";
                if (loihi.status == "ok")
                {
                    loihi.status = "over-budget";
                }
            }
            ideal_records.push_back(ideal);
            loihi_records.push_back(loihi);
        }

        for (const auto *records : {&ideal_records, &loihi_records})
        {
            BenchSummary::Solver s;
            s.name = records->front().solver;
            std::vector<double> percentiles;
            double wall = 0.0;
            for (const BenchRecord &r : *records)
            {
                wall += r.wall_ms;
                if (r.rank)
                {
                    percentiles.push_back(r.rank->percentile);
                }
                if (r.status != "ok")
                {
                    ++s.failures;
                }
            }
            s.ranked = percentiles.size();
            s.mean_wall_ms = wall / static_cast<double>(records->size());
            if (!percentiles.empty())
            {
                s.median_percentile = median(percentiles);
                s.min_percentile =
                        *std::min_element(percentiles.begin(), percentiles.end());
            }
            summary.solvers.push_back(std::move(s));
            result.records.insert(result.records.end(), records->begin(),
                    records->end());
        }
        summary.mean_oracle_ms =
                oracle_runs ? oracle_ms_total / static_cast<double>(oracle_runs) : 0.0;
        result.summaries.push_back(std::move(summary));
    }
    return result;
}

void write_bench_table(std::ostream &out, const BenchResult &result, bool timing)
{
    out << "# spikealloc-bench v1\n";
    out << "size,trials,solutions,neurons,solver,ranked,failures,"
           "median_percentile,min_percentile";
    if (timing)
    {
        out << ",mean_wall_ms,mean_oracle_ms";
    }
    out << '\n';
    for (const BenchSummary &s : result.summaries)
    {
        for (const BenchSummary::Solver &solver : s.solvers)
        {
            out << s.size.to_string() << ',' << s.trials << ','
                << s.solution_count << ',' << s.neurons << ',' << solver.name
                << ',' << solver.ranked << ',' << solver.failures << ','
                << opt_fixed(solver.median_percentile, 2) << ','
                << opt_fixed(solver.min_percentile, 2);
            if (timing)
            {
                out << ',' << fixed(solver.mean_wall_ms, 3) << ','
                    << fixed(s.mean_oracle_ms, 3);
            }
            out << '\n';
        }
    }
}

void write_bench_json(std::ostream &out, const BenchResult &result, bool timing)
{
    nlohmann::ordered_json doc;
    doc["format"] = "spikealloc-bench";
    doc["version"] = 1;
    doc["summaries"] = nlohmann::ordered_json::array();
    for (const BenchSummary &s : result.summaries)
    {
        nlohmann::ordered_json row;
        row["size"] = s.size.to_string();
        row["trials"] = s.trials;
        row["solutions"] = s.solution_count;
        row["neurons"] = s.neurons;
        row["solvers"] = nlohmann::ordered_json::array();
        for (const BenchSummary::Solver &solver : s.solvers)
        {
            nlohmann::ordered_json js;
            js["name"] = solver.name;
            js["ranked"] = solver.ranked;
            js["failures"] = solver.failures;
            js["median_percentile"] = solver.median_percentile
                    ? nlohmann::ordered_json(*solver.median_percentile)
                    : nlohmann::ordered_json();
            js["min_percentile"] = solver.min_percentile
                    ? nlohmann::ordered_json(*solver.min_percentile)
                    : nlohmann::ordered_json();
            if (timing)
            {
                js["mean_wall_ms"] = solver.mean_wall_ms;
            }
            row["solvers"].push_back(std::move(js));
        }
        if (timing)
        {
            row["mean_oracle_ms"] = s.mean_oracle_ms;
        }
        doc["summaries"].push_back(std::move(row));
    }
    out << doc.dump(2) << '\n';
}

void write_bench_records(std::ostream &out, const BenchResult &result, bool timing)
{
    out << "# spikealloc-bench-records v1\n";
    out << "seed,size,solver,allocation,reward,rank,total,percentile,status";
    if (timing)
    {
        out << ",wall_ms";
    }
    out << '\n';
    for (const BenchRecord &r : result.records)
    {
        out << r.seed << ',' << r.size.to_string() << ',' << r.solver << ','
            << r.allocation.to_string() << ',' << fixed(r.reward, 6) << ','
            << (r.rank ? r.rank->rank.str() : "n/a") << ','
            << (r.rank ? r.rank->total.str() : "n/a") << ','
            << (r.rank ? format_percentile(r.rank->percentile_hundredths) : "n/a")
            << ',' << r.status;
        if (timing)
        {
            out << ',' << fixed(r.wall_ms, 3);
        }
        out << '\n';
    }
}

} // namespace spikealloc
