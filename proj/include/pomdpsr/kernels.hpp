#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pomdpsr/model.hpp"

namespace pomdpsr {

/// Execution policy for the data-parallel sweeps. Both produce identical results:
/// every sweep is a Jacobi update where each output row depends only on the input.
enum class Exec { Serial, Parallel };

/// Runs body(i) for i in [0, n) and returns the max of the returned values.
/// Parallel uses an OpenMP static schedule when the library was built with OpenMP.
double parallel_max(int n, Exec exec, const std::function<double(int)>& body);

/// Rows of P(s', o | s, a) grouped by observation, precomputed once per model.
class JointTable {
  public:
    explicit JointTable(const PomdpModel& model);

    struct Group {
        ObsId obs;
        std::size_t begin;
        std::size_t end;
    };

    std::span<const Group> groups(StateId s, ActionId a) const {
        const auto row = static_cast<std::size_t>(s) * num_actions_ + a;
        return {groups_.data() + group_offsets_[row], group_offsets_[row + 1] - group_offsets_[row]};
    }
    const SparseEntry& entry(std::size_t k) const { return entries_[k]; }

  private:
    int num_actions_;
    std::vector<std::size_t> group_offsets_;
    std::vector<Group> groups_;
    std::vector<SparseEntry> entries_;  // (s', P(s', o | s, a))
};

namespace kernels {

// Vectors are stored action-major: values[a * |S| + s].

/// alpha_a(s) <- R(s,a) + gamma sum_s' T(s'|s,a) alpha_a(s'). Returns the max-norm change.
double blind_sweep(const PomdpModel& m, std::span<const double> in, std::span<double> out, Exec exec);

/// alpha_a(s) <- R(s,a) + gamma sum_s' T(s'|s,a) max_a' alpha_a'(s').
double qmdp_sweep(const PomdpModel& m, std::span<const double> in, std::span<double> out, Exec exec);

/**
 * alpha_a(s) <- R(s,a) + gamma sum_o max_{g in gamma_set} sum_s' P(s',o|s,a) g(s').
 *
 * gamma_set holds |G| vectors of length |S| back to back. `in` is only used to
 * report the max-norm change against `out`.
 */
double fib_sweep(const PomdpModel& m, const JointTable& joint, std::span<const double> gamma_set,
                 std::span<const double> in, std::span<double> out, Exec exec);

}  // namespace kernels

}  // namespace pomdpsr
