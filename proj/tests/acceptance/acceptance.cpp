// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//  criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "reference.hpp"
#include "spikealloc/cli.hpp"
#include "spikealloc/ideal_solver.hpp"
#include "spikealloc/loihi_sim.hpp"
#include "spikealloc/oracle.hpp"
#include "spikealloc/scenario.hpp"

using namespace spikealloc;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace
{

int failures = 0;

void report(int id, const std::string &name, bool pass, const std::string &detail)
{
    std::cout << (pass ? "PASS" : "FAIL") << "  [" << id << "] " << name << "  ("
              << detail << ")" << std::endl;
    failures += pass ? 0 : 1;
}

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char *pattern, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

// --- 1 ---------------------------------------------------------------------

void solution_space_counts()
{
    const std::pair<std::size_t, const char *> table[] = {{2, "9"}, {4, "625"},
            {6, "117649"}, {8, "43046721"}, {10, "25937424601"}};
    const auto start = Clock::now();
    bool exact = true;
    for (const auto &[size, expected] : table)
    {
        exact = exact && solution_count(size, size).str() == expected;
    }
    const double ms = seconds_since(start) * 1e3;
    report(1, "solution-space counts", exact && ms < 1.0,
            std::string(exact ? "5/5 exact" : "mismatch") + ", " + fmt("%.4f", ms) +
                    " ms");
}

// --- 2 ---------------------------------------------------------------------

void neuron_counts()
{
    const std::pair<std::size_t, std::size_t> table[] = {
            {2, 12}, {3, 24}, {4, 40}, {5, 60}, {6, 84}, {7, 112}, {8, 144}};
    int exact = 0;
    for (const auto &[size, expected] : table)
    {
        const Network net = build_network(generate_scenario(size, size, size));
        exact += net.total_neurons() == expected &&
                expected == 2 * size * size + 2 * size;
    }
    report(2, "neuron counts", exact == 7, std::to_string(exact) + "/7 exact");
}

// --- 3 ---------------------------------------------------------------------

void percentile_arithmetic()
{
    struct Row
    {
        BigInt rank;
        BigInt total;
        std::string expected;
    };
    const Row rows[] = {{3, 7776, "99.96"}, {100, 117649, "99.91"},
            {7843, 43046721, "99.98"}, {1, 625, "100.00"}, {1, 7776, "100.00"}};
    int exact = 0;
    for (const Row &r : rows)
    {
        exact += format_percentile(percentile_hundredths(r.rank, r.total)) == r.expected;
    }
    // and through rank_allocation itself: the optimum of any scenario is rank 1
    const Scenario s = generate_scenario(21, 4, 4);
    const RankReport top = rank_allocation(s, search_best(s).allocation);
    exact += top.rank == 1 && top.percentile_hundredths == 10000 &&
            top.percentile == 100.0;
    report(3, "percentile arithmetic", exact == 6, std::to_string(exact) + "/6 exact");
}

// --- 4 ---------------------------------------------------------------------

void oracle_ground_truth()
{
    int scenarios = 0;
    int good = 0;
    for (std::size_t n = 1; n <= 6; ++n)
    {
        for (std::size_t m = 1; m <= 6; ++m)
        {
            for (std::uint64_t seed = 1; seed <= 3; ++seed)
            {
                const Scenario s = generate_scenario(1000 * n + 10 * m + seed, n, m);
                const SearchResult best = search_best(s);
                const RankReport top = rank_allocation(s, best.allocation);
                const RewardEvaluator eval(s);
                const SolutionSpace space(s);
                const auto total = static_cast<std::uint64_t>(space.size());
                const double probe = solve(s).allocation == best.allocation
                        ? top.candidate_reward
                        : eval.evaluate(solve(s).allocation);
                const RankCounts seq = count_better(eval, space, probe, 0, total);
                const RankCounts par = count_better_partitioned(eval, space, probe, 4);
                ++scenarios;
                good += top.rank == 1 && best.visited == total &&
                        seq.strictly_better == par.strictly_better &&
                        seq.visited == par.visited;
            }
        }
    }

    const Scenario six = generate_scenario(6, 6, 6);
    auto start = Clock::now();
    (void)rank_allocation(six, solve(six).allocation);
    const double t6 = seconds_since(start);

    const Scenario eight = generate_scenario(8, 8, 8);
    start = Clock::now();
    const RankReport r8 = rank_allocation(eight, solve(eight).allocation);
    const double t8 = seconds_since(start);

    report(4, "oracle ground truth",
            good == scenarios && t6 < 1.0 && t8 < 300.0 && r8.total == 43046721,
            std::to_string(good) + "/" + std::to_string(scenarios) +
                    " scenarios up to 6x6; 6x6 rank " + fmt("%.3f", t6) +
                    " s; 8x8 rank " + fmt("%.1f", t8) + " s");
}

// --- 5 ---------------------------------------------------------------------

void solver_quality()
{
    std::vector<int> pct;
    for (std::uint64_t seed = 1; seed <= 100; ++seed)
    {
        const Scenario s = generate_scenario(seed, 5, 5);
        pct.push_back(rank_allocation(s, solve(s).allocation).percentile_hundredths);
    }
    std::sort(pct.begin(), pct.end());
    const double median = (pct[49] + pct[50]) / 200.0;
    const double minimum = pct.front() / 100.0;
    const auto optimal = std::count(pct.begin(), pct.end(), 10000);
    report(5, "solver quality on 100 5x5 scenarios",
            median >= 99.9 && minimum >= 99.0,
            "median " + fmt("%.3f", median) + " (need >= 99.9), min " +
                    fmt("%.2f", minimum) + " (need >= 99.0), optimal " +
                    std::to_string(optimal) + "/100");
}

// --- 6 ---------------------------------------------------------------------

void event_driven_correctness()
{
    int agree = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed)
    {
        const Scenario s = generate_scenario(600 + seed, 3, 3);
        const auto g = reference::gamma(s);
        double gmax = 0.0;
        for (const auto &row : g)
        {
            gmax = std::max(gmax, *std::max_element(row.begin(), row.end()));
        }
        const double dt = 1e-4 / gmax;
        const auto oracle = reference::fixed_step_events(g, 1.0, dt);
        const SolveResult r = solve(s);
        bool same = oracle.size() == r.events.size();
        for (std::size_t k = 0; same && k < oracle.size(); ++k)
        {
            const double diff = std::abs(oracle[k].time - r.events[k].time);
            worst = std::max(worst, diff / dt);
            same = oracle[k].vehicle == r.events[k].vehicle &&
                    oracle[k].task == r.events[k].task && diff <= dt;
        }
        agree += same;
    }
    report(6, "event-driven vs fixed-step integration", agree == 50,
            std::to_string(agree) + "/50 event-for-event, worst time gap " +
                    fmt("%.2e", worst) + " dt");
}

// --- 7 ---------------------------------------------------------------------

void scale_invariance()
{
    int agree = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed)
    {
        const std::size_t size = 2 + seed % 5;
        const Scenario s = generate_scenario(700 + seed, size, size);
        const Matrix<double> gamma = base_rates(s);
        const SolveResult base = solve_rates(gamma, s.connectivity);
        bool same = true;
        for (const double c : {0.1, 1.0, 37.5})
        {
            Matrix<double> scaled = gamma;
            for (double &g : scaled.flat())
            {
                g *= c;
            }
            const SolveResult r = solve_rates(scaled, s.connectivity);
            same = same && r.events.size() == base.events.size();
            for (std::size_t k = 0; same && k < r.events.size(); ++k)
            {
                const double expected = base.events[k].time / c;
                const double rel = std::abs(r.events[k].time - expected) / expected;
                worst = std::max(worst, rel);
                same = r.events[k].vehicle == base.events[k].vehicle &&
                        r.events[k].task == base.events[k].task && rel <= 1e-9;
            }
        }
        agree += same;
    }
    report(7, "scale invariance", agree == 50,
            std::to_string(agree) + "/50 scenarios x 3 scales, worst relative time error " +
                    fmt("%.2e", worst));
}

// --- 8 ---------------------------------------------------------------------

void beta_tau_audit()
{
    int audited = 0;
    int clean = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed)
    {
        const Scenario s = generate_scenario(800 + seed, 1 + seed % 6, 1 + seed / 17);
        const Matrix<double> gamma = base_rates(s);
        const SolveResult r = solve(s);

        SolverState state(s.n_vehicles, s.m_tasks);
        std::vector<int> seen(s.n_vehicles, 0);
        std::vector<int> on_task(s.m_tasks, 0);
        bool ok = true;
        for (const FireEvent &e : r.events)
        {
            ok = ok && seen[e.vehicle]++ == 0;
            ++on_task[e.task];
            state.assign(e.vehicle, e.task);
            const Matrix<double> a =
                    effective_rates(gamma, s.connectivity, state.beta, state.tau);
            for (std::size_t i = 0; i < s.n_vehicles; ++i)
            {
                for (std::size_t j = 0; j < s.m_tasks; ++j)
                {
                    const double expected =
                            seen[i] ? 0.0 : std::ldexp(gamma(i, j), -on_task[j]);
                    ok = ok && a(i, j) == expected;
                }
            }
        }
        ++audited;
        clean += ok;
    }
    report(8, "beta/tau audit", clean == audited,
            std::to_string(clean) + "/" + std::to_string(audited) +
                    " replayed logs exact, no vehicle assigned twice");
}

// --- 9 ---------------------------------------------------------------------

// Net gain per input period of a competing neuron once its task control is
//  armed, measured over whole periods before it fires. Returns the largest
//  deviation from w - 2*round(w/4), or -1 if nothing could be measured.
long slope_deviation(const Scenario &s, std::size_t leader_task, std::size_t vehicle)
{
    NetworkConfig cfg;
    cfg.threshold_acc = 2550;
    Network net(s, cfg);
    const int w = net.acc_weights()(vehicle, leader_task);
    const long expected = w - 2 * ((w + 2) / 4);
    while (!net.control_armed(net.task_control(leader_task)) && net.tick() < 10'000)
    {
        (void)net.step();
    }
    (void)net.step();
    long worst = -1;
    std::int64_t start = net.potential(vehicle, leader_task);
    for (int period = 0; period < 6; ++period)
    {
        for (int k = 0; k < 4; ++k)
        {
            (void)net.step();
        }
        if (net.has_fired(vehicle, leader_task) ||
                net.control_armed(net.vehicle_control(vehicle)))
        {
            break;
        }
        const std::int64_t now = net.potential(vehicle, leader_task);
        worst = std::max(worst, std::abs(static_cast<long>(now - start) - expected));
        start = now;
    }
    return worst;
}

// Ideal dynamics with the halving capped at one: what a latched control
//  neuron firing at a fixed rate can realise.
Allocation saturated_beta_solve(const Matrix<double> &gamma)
{
    const std::size_t n = gamma.rows();
    const std::size_t m = gamma.cols();
    Matrix<double> v(n, m, 0.0);
    std::vector<int> locked(n, 0);
    std::vector<int> taken(m, 0);
    Allocation alloc = Allocation::unassigned(n);
    for (;;)
    {
        double best = INFINITY;
        std::size_t bi = 0;
        std::size_t bj = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            for (std::size_t j = 0; j < m; ++j)
            {
                const double rate = locked[i] ? 0.0 : gamma(i, j) * (taken[j] ? 0.5 : 1.0);
                if (rate <= 0.0)
                {
                    continue;
                }
                const double t = std::max(0.0, (1.0 - v(i, j)) / rate);
                if (t < best - 1e-12)
                {
                    best = t;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (!std::isfinite(best))
        {
            return alloc;
        }
        for (std::size_t i = 0; i < n; ++i)
        {
            for (std::size_t j = 0; j < m; ++j)
            {
                v(i, j) += best * (locked[i] ? 0.0 : gamma(i, j) * (taken[j] ? 0.5 : 1.0));
            }
        }
        locked[bi] = 1;
        taken[bj] = 1;
        alloc.assign(bi, bj);
    }
}

void loihi_fidelity()
{
    // (a) hand-built 2x2 cases: vehicle 1 leads on the measured task
    struct Hand
    {
        Scenario scenario;
        std::size_t task;
    };
    const Hand hands[] = {
            {make_scenario({1.0, 0.2}, {0.0, 0.0}, Matrix<double>{{1, 1}, {5, 10}},
                     RateWeights{0.5, 0.0, 1.0}),
                    0},
            {make_scenario({0.2, 1.0}, {0.0, 0.0}, Matrix<double>{{1, 1}, {10, 4}},
                     RateWeights{0.5, 0.0, 1.0}),
                    1},
            {make_scenario({1.0, 0.1}, {1.0, 0.5}, Matrix<double>{{2, 9}, {6, 9}}), 0},
    };
    long worst_slope = 0;
    bool measured = true;
    for (const Hand &h : hands)
    {
        const long dev = slope_deviation(h.scenario, h.task, 1);
        measured = measured && dev >= 0;
        worst_slope = std::max(worst_slope, dev);
    }
    report(9, "(a) slope halving after task-control arming",
            measured && worst_slope <= 1,
            "3 hand 2x2 cases, worst deviation " + std::to_string(worst_slope) +
                    " per input period");

    // (b) vehicle lockout over 1e5 ticks
    long late_fires = 0;
    int locked_vehicles = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed)
    {
        NetworkConfig cfg;
        cfg.max_ticks = 200'000;
        Network net(generate_scenario(900 + seed, 3, 3), cfg);
        std::vector<std::int64_t> locked_at(3, -1);
        for (int t = 0; t < 100'000; ++t)
        {
            const TickEvents ev = net.step();
            for (const AccFire &f : ev.accumulation_fires)
            {
                if (locked_at[f.vehicle] >= 0 && ev.tick > locked_at[f.vehicle])
                {
                    ++late_fires;
                }
            }
            for (std::size_t i = 0; i < 3; ++i)
            {
                if (locked_at[i] < 0 && net.control_armed(net.vehicle_control(i)))
                {
                    locked_at[i] = ev.tick;
                    ++locked_vehicles;
                }
            }
        }
    }
    report(9, "(b) vehicle lockout", late_fires == 0 && locked_vehicles == 9,
            std::to_string(locked_vehicles) + " locked vehicles, " +
                    std::to_string(late_fires) + " fires after locking in 1e5 ticks");

    // (c) cross-engine agreement at threshold 100 * weight_max
    const NetworkConfig cfg;
    int agree = 0;
    int saturated_agree = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed)
    {
        const Scenario s = generate_scenario(seed, 4, 4);
        const Allocation loihi = run(s, cfg, RunOptions{false, false}).allocation;
        agree += loihi == solve(s).allocation;
        saturated_agree += loihi == saturated_beta_solve(base_rates(s));
    }
    report(9, "(c) loihi/ideal agreement on 100 4x4 scenarios", agree >= 95,
            std::to_string(agree) + "/100 (need >= 95) at threshold " +
                    std::to_string(cfg.threshold_acc) +
                    "; against ideal with halving capped at one: " +
                    std::to_string(saturated_agree) + "/100");

    // (d) engineered all-equal rates
    const Scenario equal = make_scenario({0.5, 0.5}, {0.5, 0.5},
            Matrix<double>{{3, 3}, {3, 3}});
    const SimResult r = run(equal);
    std::size_t widest = 0;
    for (const ConflictGroup &g : r.conflicts)
    {
        widest = std::max(widest, g.fires.size());
    }
    bool valid = r.allocation.assigned_count() == 2;
    try
    {
        (void)RewardEvaluator(equal).evaluate(r.allocation);
    }
    catch (const std::exception &)
    {
        valid = false;
    }
    report(9, "(d) simultaneous fires resolve to a valid allocation",
            widest >= 2 && valid,
            std::to_string(widest) + " neurons fired together, resolved to " +
                    r.allocation.to_string());
}

// --- 10 --------------------------------------------------------------------

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string run_cli(const std::vector<std::string> &args)
{
    std::vector<const char *> argv{"spikealloc"};
    for (const auto &a : args)
    {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return std::to_string(code) + "\n" + out.str() + err.str();
}

// Runs every command once in a fresh directory; returns all output bytes.
std::map<std::string, std::string> command_outputs(const fs::path &dir)
{
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string scen = (dir / "s.txt").string();
    const std::string prefix = (dir / "trace").string();
    std::map<std::string, std::string> out;
    out["gen"] = run_cli({"gen", "--seed", "42", "--size", "4x4", "--out", scen});
    out["solve-ideal"] = run_cli({"solve", scen, "--trace", "--out", prefix + "_i",
            "--no-timing"});
    out["solve-loihi"] = run_cli({"solve", scen, "--engine", "loihi", "--trace", "--out",
            prefix + "_l", "--no-timing"});
    out["rank"] = run_cli({"rank", scen, "--engine", "loihi"});
    out["bench"] = run_cli({"bench", "--sizes", "3x3,4x4", "--trials", "5", "--seed",
            "42", "--records", (dir / "records.csv").string(), "--no-timing"});
    out["bench-json"] = run_cli({"bench", "--sizes", "3x3", "--trials", "3", "--format",
            "json", "--no-timing"});
    for (const auto &entry : fs::directory_iterator(dir))
    {
        out["file:" + entry.path().filename().string()] = slurp(entry.path());
    }
    return out;
}

void round_trip_and_determinism()
{
    int identical = 0;
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 100; ++trial)
    {
        const Scenario s = generate_scenario(rng(), 1 + rng() % 8, 1 + rng() % 8);
        identical += parse_scenario(format_scenario(s)) == s;
    }

    const fs::path root = fs::temp_directory_path() / "spikealloc_acceptance";
    const auto first = command_outputs(root);
    const auto second = command_outputs(root);
    fs::remove_all(root);
    report(10, "round-trip and determinism", identical == 100 && first == second,
            std::to_string(identical) + "/100 scenarios round-trip; " +
                    std::to_string(first.size()) + " outputs " +
                    (first == second ? "byte-identical" : "differ") + " across two runs");
}

} // namespace

int main()
{
    solution_space_counts();
    neuron_counts();
    percentile_arithmetic();
    oracle_ground_truth();
    solver_quality();
    event_driven_correctness();
    scale_invariance();
    beta_tau_audit();
    loihi_fidelity();
    round_trip_and_determinism();
    std::cout << (failures == 0 ? "all criteria passed"
                                : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
