// ideal_solver.hpp - exact event-driven solver for the spiking allocation
//  dynamics.
//
// One integrate-to-threshold neuron per vehicle-task pair accumulates at
//  rate A_ij = CM_ij * beta_j * tau_i * Gamma_ij. The neuron that reaches the
//  threshold first claims its pair: tau_i drops to 0 (vehicle locked) and
//  beta_j halves (task less attractive). Potentials are never reset; only
//  their slopes change. Firing times are computed in closed form, so there is
//  no time step.
#ifndef SPIKEALLOC_IDEAL_SOLVER_HPP
#define SPIKEALLOC_IDEAL_SOLVER_HPP

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "spikealloc/matrix.hpp"
#include "spikealloc/scenario.hpp"

namespace spikealloc
{

// Fire times closer than this are treated as simultaneous and ordered by
//  vehicle index, then task index.
inline constexpr double kFireTimeTieTolerance = 1e-12;

struct SolverState
{
    Matrix<double> potential;         // [N][M]
    std::vector<std::uint8_t> tau;    // [N], 1 = unassigned
    std::vector<unsigned> d_count;    // [M], vehicles already on task j
    std::vector<double> beta;         // [M], 2^-d_count
    double clock{0.0};

    SolverState(std::size_t n_vehicles, std::size_t m_tasks);
    void assign(std::size_t vehicle, std::size_t task);
};

struct FireEvent
{
    double time;
    std::size_t vehicle; // 0-based
    std::size_t task;    // 0-based

    bool operator==(const FireEvent &) const = default;
};

struct SolveResult
{
    Allocation allocation;
    std::vector<FireEvent> events;        // firing order
    std::vector<std::size_t> unassignable; // 0-based vehicles left at 0
};

// A_ij = CM_ij * beta_j * tau_i * Gamma_ij
Matrix<double> effective_rates(const Matrix<double> &gamma,
        const Matrix<std::uint8_t> &connectivity, std::span<const double> beta,
        std::span<const std::uint8_t> tau);

SolveResult solve(const Scenario &scenario, double threshold = 1.0);

// Same dynamics from explicit rates; used by solve() and by callers that
//  want to rescale Gamma directly.
SolveResult solve_rates(const Matrix<double> &gamma,
        const Matrix<std::uint8_t> &connectivity, double threshold = 1.0);

// "time,vehicle,task" rows (1-based vehicle/task) under a version header.
void write_event_log(std::ostream &out, const SolveResult &result);

} // namespace spikealloc

#endif
