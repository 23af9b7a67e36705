#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spikealloc/cli.hpp"
#include "spikealloc/error.hpp"
#include "spikealloc/ideal_solver.hpp"
#include "spikealloc/loihi_sim.hpp"
#include "spikealloc/oracle.hpp"
#include "spikealloc/report.hpp"

namespace spikealloc::cli
{

namespace
{

namespace fs = std::filesystem;

std::string out_dir()
{
    const char *dir = std::getenv(kOutDirEnv);
    return (dir && *dir) ? dir : ".";
}

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::vector<double> split_reals(const std::string &text, std::size_t expected,
        const char *what)
{
    std::vector<double> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
    {
        try
        {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size())
            {
                throw std::invalid_argument(item);
            }
        }
        catch (const std::exception &)
        {
            throw ConfigError(std::string(what) + ": '" + item + "' is not a number");
        }
    }
    if (values.size() != expected)
    {
        throw ConfigError(std::string(what) + " expects " +
                std::to_string(expected) + " comma-separated values");
    }
    return values;
}

RateWeights parse_weights(const std::string &text)
{
    const auto w = split_reals(text, 3, "--weights");
    RateWeights weights{w[0], w[1], w[2]};
    try
    {
        weights.validate();
    }
    catch (const ValidationError &err)
    {
        throw ConfigError(std::string("--weights: ") + err.what());
    }
    return weights;
}

Range parse_range(const std::string &text, const char *what)
{
    const auto v = split_reals(text, 2, what);
    return {v[0], v[1]};
}

ValueRanges parse_ranges(const std::string &priority, const std::string &success,
        const std::string &ttc)
{
    ValueRanges ranges;
    if (!priority.empty())
    {
        ranges.priority = parse_range(priority, "--priority");
    }
    if (!success.empty())
    {
        ranges.success = parse_range(success, "--success");
    }
    if (!ttc.empty())
    {
        ranges.ttc = parse_range(ttc, "--ttc");
    }
    ranges.validate();
    return ranges;
}

void write_file(const std::string &path, const std::string &text)
{
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file || !(file << text))
    {
        throw Error("cannot write '" + path + "'");
    }
}

template <typename Fn> double time_ms(Fn &&fn)
{
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

// Flags shared by solve and rank.
struct EngineFlags
{
    std::string engine{"ideal"};
    double threshold{1.0};
    std::int64_t threshold_acc{NetworkConfig{}.threshold_acc};
    int input_period{NetworkConfig{}.input_period};
    std::int64_t max_ticks{NetworkConfig{}.max_ticks};
    std::string weights;

    void add_to(CLI::App &cmd)
    {
        cmd.add_option("--engine", engine, "Solver engine")
                ->check(CLI::IsMember({"ideal", "loihi"}))
                ->capture_default_str();
        cmd.add_option("--threshold", threshold,
                   "Ideal solver firing threshold")
                ->capture_default_str();
        cmd.add_option("--threshold-acc", threshold_acc,
                   "Loihi accumulation threshold")
                ->capture_default_str();
        cmd.add_option("--input-period", input_period,
                   "Loihi ticks between input spikes (even)")
                ->capture_default_str();
        cmd.add_option("--max-ticks", max_ticks, "Loihi tick limit")
                ->capture_default_str();
        cmd.add_option("--weights", weights,
                "Override rate weights as wp,ws,wt");
    }

    [[nodiscard]] NetworkConfig network() const
    {
        NetworkConfig cfg;
        cfg.input_period = input_period;
        cfg.control_period = input_period / 2;
        cfg.threshold_acc = threshold_acc;
        cfg.max_ticks = max_ticks;
        cfg.validate();
        return cfg;
    }

    [[nodiscard]] Scenario load(const std::string &path) const
    {
        Scenario s = load_scenario(path);
        if (!weights.empty())
        {
            s.weights = parse_weights(weights);
        }
        return s;
    }
};

struct EngineRun
{
    Allocation allocation;
    double wall_ms{0.0};
    std::size_t events{0};
    std::optional<SolveResult> ideal;
    std::optional<SimResult> loihi;
};

EngineRun run_engine(const Scenario &scenario, const EngineFlags &flags,
        bool record)
{
    EngineRun r;
    if (flags.engine == "ideal")
    {
        SolveResult solved;
        r.wall_ms = time_ms([&] { solved = solve(scenario, flags.threshold); });
        r.allocation = solved.allocation;
        r.events = solved.events.size();
        r.ideal = std::move(solved);
    }
    else
    {
        const NetworkConfig cfg = flags.network();
        SimResult sim;
        r.wall_ms = time_ms(
                [&] { sim = run(scenario, cfg, RunOptions{record, record}); });
        r.allocation = sim.allocation;
        r.events = sim.fires.size();
        r.loihi = std::move(sim);
    }
    return r;
}

int cmd_gen(std::uint64_t seed, const std::string &size_text,
        const std::string &out_path, const std::string &weights,
        const ValueRanges &ranges, std::ostream &out)
{
    const ProblemSize size = ProblemSize::parse(size_text);
    const RateWeights w = weights.empty() ? RateWeights{} : parse_weights(weights);
    const Scenario scenario =
            generate_scenario(seed, size.n_vehicles, size.m_tasks, ranges, w);
    const std::string path = !out_path.empty()
            ? out_path
            : (fs::path(out_dir()) / ("scenario_" + size.to_string() + "_s" +
                                             std::to_string(seed) + ".txt"))
                      .string();
    save_scenario(scenario, path);
    out << path << '\n';
    return exit_ok;
}

int cmd_solve(const std::string &path, const EngineFlags &flags, bool trace,
        const std::string &trace_prefix, bool timing, std::ostream &out,
        std::ostream &err)
{
    const Scenario scenario = flags.load(path);
    const EngineRun r = run_engine(scenario, flags, trace);
    const double reward = RewardEvaluator(scenario).evaluate(r.allocation);

    out << "# spikealloc-solve v1\n";
    out << "engine: " << flags.engine << '\n';
    out << "size: " << ProblemSize{scenario.n_vehicles, scenario.m_tasks}.to_string()
        << '\n';
    out << "allocation: " << r.allocation.to_string() << '\n';
    out << "reward: " << fixed(reward, 6) << '\n';
    out << "events: " << r.events << '\n';
    if (r.ideal)
    {
        out << "unassignable: " << r.ideal->unassignable.size() << '\n';
    }
    if (r.loihi)
    {
        out << "ticks: " << r.loihi->ticks << '\n';
        out << "neurons: " << r.loihi->total_neurons << '\n';
        out << "conflicts: " << r.loihi->conflicts.size() << '\n';
        out << "status: " << (r.loihi->timed_out ? "timeout" : "ok") << '\n';
    }
    if (timing)
    {
        out << "wall_ms: " << fixed(r.wall_ms, 3) << '\n';
    }

    if (trace)
    {
        const std::string prefix = !trace_prefix.empty()
                ? trace_prefix
                : (fs::path(out_dir()) /
                          (fs::path(path).stem().string() + "_" + flags.engine))
                          .string();
        if (r.ideal)
        {
            std::ostringstream events;
            write_event_log(events, *r.ideal);
            write_file(prefix + ".events.csv", events.str());
            out << "trace: " << prefix << ".events.csv\n";
        }
        if (r.loihi)
        {
            std::ostringstream raster;
            write_raster(raster, *r.loihi);
            write_file(prefix + ".raster.csv", raster.str());
            std::ostringstream voltage;
            write_voltage_trace(voltage, *r.loihi);
            write_file(prefix + ".voltage.csv", voltage.str());
            out << "trace: " << prefix << ".raster.csv\n";
            out << "trace: " << prefix << ".voltage.csv\n";
        }
    }
    if (r.loihi && r.loihi->timed_out)
    {
        err << "spikealloc: loihi run timed out after " << r.loihi->ticks
            << " ticks; allocation is partial\n";
        return exit_timeout;
    }
    return exit_ok;
}

int cmd_rank(const std::string &path, const EngineFlags &flags,
        const std::string &alloc_text, const OracleOptions &oracle,
        std::ostream &out, std::ostream &err)
{
    const Scenario scenario = flags.load(path);
    Allocation candidate;
    std::string solver = "given";
    bool timed_out = false;
    if (!alloc_text.empty())
    {
        candidate = Allocation::parse(alloc_text);
    }
    else
    {
        const EngineRun r = run_engine(scenario, flags, false);
        candidate = r.allocation;
        solver = flags.engine;
        timed_out = r.loihi && r.loihi->timed_out;
    }
    const RankReport report = rank_allocation(scenario, candidate, oracle);
    write_rank_report(out, report,
            ProblemSize{scenario.n_vehicles, scenario.m_tasks}, solver);
    if (timed_out)
    {
        err << "spikealloc: loihi run timed out; ranked the partial allocation\n";
        return exit_timeout;
    }
    return exit_ok;
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Spiking-neuron asset allocation: solvers, simulator and "
                 "exhaustive oracle",
            "spikealloc"};
    app.require_subcommand(1);

    // gen
    auto *gen = app.add_subcommand("gen", "Generate a random scenario file");
    std::uint64_t gen_seed = 1;
    std::string gen_size;
    std::string gen_out;
    std::string gen_weights;
    std::string gen_priority;
    std::string gen_success;
    std::string gen_ttc;
    gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
    gen->add_option("--size", gen_size, "Problem size NxM (vehicles x tasks)")
            ->required();
    gen->add_option("--out", gen_out, "Output file");
    gen->add_option("--weights", gen_weights, "Rate weights wp,ws,wt");
    gen->add_option("--priority", gen_priority, "Priority range lo,hi");
    gen->add_option("--success", gen_success, "Success range lo,hi");
    gen->add_option("--ttc", gen_ttc, "Completion-time range lo,hi");

    // solve
    auto *solve_cmd = app.add_subcommand("solve", "Solve a scenario");
    std::string solve_path;
    EngineFlags solve_flags;
    bool solve_trace = false;
    std::string solve_out;
    bool solve_no_timing = false;
    solve_cmd->add_option("scenario", solve_path, "Scenario file")->required();
    solve_flags.add_to(*solve_cmd);
    solve_cmd->add_flag("--trace", solve_trace,
            "Write event log (ideal) or raster and voltage traces (loihi)");
    solve_cmd->add_option("--out", solve_out, "Trace file prefix");
    solve_cmd->add_flag("--no-timing", solve_no_timing, "Omit wall-clock times");

    // rank
    auto *rank_cmd = app.add_subcommand("rank",
            "Rank an allocation against the full solution space");
    std::string rank_path;
    EngineFlags rank_flags;
    std::string rank_alloc;
    OracleOptions rank_oracle;
    rank_cmd->add_option("scenario", rank_path, "Scenario file")->required();
    rank_flags.add_to(*rank_cmd);
    rank_cmd->add_option("--alloc", rank_alloc,
            "Allocation to rank, e.g. \"[4 1 1 3]\" (default: run --engine)");
    rank_cmd->add_option("--budget", rank_oracle.budget, "Search budget")
            ->capture_default_str();
    rank_cmd->add_flag("--budget-override", rank_oracle.override_budget,
            "Search even above the budget");

    // bench
    auto *bench_cmd = app.add_subcommand("bench",
            "Benchmark both engines against the oracle");
    std::string bench_sizes = "3x3,4x4,5x5,6x6";
    std::size_t bench_trials = 20;
    std::uint64_t bench_seed = 1;
    std::string bench_out;
    std::string bench_format = "csv";
    std::string bench_records;
    std::string bench_weights;
    bool bench_no_timing = false;
    std::string bench_priority;
    std::string bench_success;
    std::string bench_ttc;
    BenchOptions bench;
    bench_cmd->add_option("--sizes,--size", bench_sizes,
                     "Comma-separated sizes NxM")
            ->capture_default_str();
    bench_cmd->add_option("--trials", bench_trials, "Trials per size")
            ->capture_default_str();
    bench_cmd->add_option("--seed", bench_seed, "Base seed")->capture_default_str();
    bench_cmd->add_option("--out", bench_out, "Write the table here");
    bench_cmd->add_option("--format", bench_format, "Table format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
    bench_cmd->add_option("--records", bench_records,
            "Also write per-trial records (csv)");
    bench_cmd->add_option("--weights", bench_weights, "Rate weights wp,ws,wt");
    bench_cmd->add_option("--priority", bench_priority, "Priority range lo,hi");
    bench_cmd->add_option("--success", bench_success, "Success range lo,hi");
    bench_cmd->add_option("--ttc", bench_ttc, "Completion-time range lo,hi");
    bench_cmd->add_option("--budget", bench.oracle.budget, "Search budget")
            ->capture_default_str();
    bench_cmd->add_flag("--budget-override", bench.oracle.override_budget,
            "Search even above the budget");
    bench_cmd->add_flag("--no-timing", bench_no_timing, "Omit wall-clock columns");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try
    {
        if (*gen)
        {
            const ValueRanges ranges =
                    parse_ranges(gen_priority, gen_success, gen_ttc);
            return cmd_gen(gen_seed, gen_size, gen_out, gen_weights, ranges, out);
        }
        if (*solve_cmd)
        {
            return cmd_solve(solve_path, solve_flags, solve_trace, solve_out,
                    !solve_no_timing, out, err);
        }
        if (*rank_cmd)
        {
            return cmd_rank(rank_path, rank_flags, rank_alloc, rank_oracle, out,
                    err);
        }
        if (*bench_cmd)
        {
            std::stringstream sizes(bench_sizes);
            std::string item;
            while (std::getline(sizes, item, ','))
            {
                bench.sizes.push_back(ProblemSize::parse(item));
            }
            bench.ranges = parse_ranges(bench_priority, bench_success, bench_ttc);
            bench.trials = bench_trials;
            bench.seed = bench_seed;
            for (const ProblemSize &size : bench.sizes)
            {
                const BigInt count = solution_count(size.n_vehicles, size.m_tasks);
                if (!bench.oracle.override_budget && count > bench.oracle.budget)
                {
                    throw BudgetError(count.str(),
                            "size " + size.to_string() + " has " + count.str() +
                                    " candidates, above the search budget of " +
                                    std::to_string(bench.oracle.budget) +
                                    " (use --budget-override)");
                }
            }
            if (!bench_weights.empty())
            {
                bench.weights = parse_weights(bench_weights);
            }
            const BenchResult result = run_bench(bench);
            const bool timing = !bench_no_timing;
            std::ostringstream table;
            if (bench_format == "json")
            {
                write_bench_json(table, result, timing);
            }
            else
            {
                write_bench_table(table, result, timing);
            }
            if (bench_out.empty())
            {
                out << table.str();
            }
            else
            {
                write_file(bench_out, table.str());
                out << bench_out << '\n';
            }
            if (!bench_records.empty())
            {
                std::ostringstream records;
                write_bench_records(records, result, timing);
                write_file(bench_records, records.str());
                out << bench_records << '\n';
            }
            return exit_ok;
        }
    }
    catch (const ConfigError &e)
    {
        err << "spikealloc: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const BudgetError &e)
    {
        err << "spikealloc: " << e.what() << '\n';
        return exit_budget;
    }
    catch (const std::exception &e)
    {
        err << "spikealloc: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_usage;
}

} // namespace spikealloc::cli
