#include "pomdpsr/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace pomdpsr {

namespace {

std::string row_label(const char* what, int row, int num_actions) {
    std::ostringstream os;
    os << what << " row (" << row / num_actions << ", " << row % num_actions << ")";
    return os.str();
}

}  // namespace

double PomdpModel::transition_prob(StateId s, ActionId a, StateId next) const {
    for (const auto& e : transitions(s, a))
        if (e.index == next) return e.prob;
    return 0.0;
}

double PomdpModel::observation_prob(StateId next, ActionId a, ObsId o) const {
    for (const auto& e : observations(next, a))
        if (e.index == o) return e.prob;
    return 0.0;
}

PomdpModel::Builder::Builder(int num_states, int num_actions, int num_observations, double discount)
    : num_states_(num_states),
      num_actions_(num_actions),
      num_observations_(num_observations),
      discount_(discount),
      rewards_(static_cast<std::size_t>(std::max(num_states, 0)) * std::max(num_actions, 0), 0.0),
      terminal_(static_cast<std::size_t>(std::max(num_states, 0)), 0) {
    if (num_states <= 0 || num_actions <= 0 || num_observations <= 0)
        throw ModelError("model dimensions must be positive");
    if (!(discount >= 0.0 && discount < 1.0)) throw ModelError("discount must lie in [0, 1)");
}

PomdpModel::Builder& PomdpModel::Builder::transition(StateId s, ActionId a, StateId next, double p) {
    if (s < 0 || s >= num_states_ || next < 0 || next >= num_states_ || a < 0 || a >= num_actions_)
        throw ModelError("transition index out of range");
    transitions_.push_back({s * num_actions_ + a, next, p});
    return *this;
}

PomdpModel::Builder& PomdpModel::Builder::observation(StateId next, ActionId a, ObsId o, double p) {
    if (next < 0 || next >= num_states_ || o < 0 || o >= num_observations_ || a < 0 || a >= num_actions_)
        throw ModelError("observation index out of range");
    observations_.push_back({next * num_actions_ + a, o, p});
    return *this;
}

PomdpModel::Builder& PomdpModel::Builder::reward(StateId s, ActionId a, double r) {
    if (s < 0 || s >= num_states_ || a < 0 || a >= num_actions_) throw ModelError("reward index out of range");
    if (!std::isfinite(r)) throw ModelError("reward must be finite");
    rewards_[static_cast<std::size_t>(s) * num_actions_ + a] = r;
    return *this;
}

PomdpModel::Builder& PomdpModel::Builder::terminal(StateId s) {
    if (s < 0 || s >= num_states_) throw ModelError("terminal state out of range");
    terminal_[s] = 1;
    return *this;
}

namespace {

// Sorts triplets into CSR rows, merging duplicates and dropping exact zeros.
void pack_rows(std::vector<std::pair<int, SparseEntry>> items, std::size_t num_rows, std::vector<std::size_t>& offsets,
               std::vector<SparseEntry>& entries) {
    std::sort(items.begin(), items.end(), [](const auto& x, const auto& y) {
        return x.first != y.first ? x.first < y.first : x.second.index < y.second.index;
    });
    offsets.assign(num_rows + 1, 0);
    entries.clear();
    entries.reserve(items.size());
    std::size_t i = 0;
    for (std::size_t row = 0; row < num_rows; ++row) {
        offsets[row] = entries.size();
        while (i < items.size() && items[i].first == static_cast<int>(row)) {
            SparseEntry e = items[i].second;
            ++i;
            while (i < items.size() && items[i].first == static_cast<int>(row) && items[i].second.index == e.index) {
                e.prob += items[i].second.prob;
                ++i;
            }
            if (e.prob != 0.0) entries.push_back(e);
        }
    }
    offsets[num_rows] = entries.size();
}

void validate_rows(const std::vector<std::size_t>& offsets, const std::vector<SparseEntry>& entries, int num_actions,
                   const char* what) {
    for (std::size_t row = 0; row + 1 < offsets.size(); ++row) {
        double sum = 0.0;
        for (std::size_t k = offsets[row]; k < offsets[row + 1]; ++k) {
            const double p = entries[k].prob;
            if (!(p >= 0.0 && p <= 1.0 + kRowSumTolerance))
                throw ModelError(row_label(what, static_cast<int>(row), num_actions) + " has a probability outside [0,1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance)
            throw ModelError(row_label(what, static_cast<int>(row), num_actions) + " sums to " + std::to_string(sum));
    }
}

}  // namespace

PomdpModel PomdpModel::Builder::build() const {
    PomdpModel m;
    m.num_states_ = num_states_;
    m.num_actions_ = num_actions_;
    m.num_observations_ = num_observations_;
    m.discount_ = discount_;
    const std::size_t rows = static_cast<std::size_t>(num_states_) * num_actions_;

    std::vector<std::pair<int, SparseEntry>> items;
    items.reserve(transitions_.size());
    for (const auto& t : transitions_) items.push_back({t.row, SparseEntry{t.col, t.p}});
    pack_rows(std::move(items), rows, m.trans_offsets_, m.trans_entries_);
    validate_rows(m.trans_offsets_, m.trans_entries_, num_actions_, "transition");

    items.clear();
    for (const auto& t : observations_) items.push_back({t.row, SparseEntry{t.col, t.p}});
    pack_rows(std::move(items), rows, m.obs_offsets_, m.obs_entries_);
    validate_rows(m.obs_offsets_, m.obs_entries_, num_actions_, "observation");

    m.rewards_ = rewards_;
    m.terminal_ = terminal_;
    m.has_terminal_ = std::any_of(terminal_.begin(), terminal_.end(), [](auto t) { return t != 0; });
    m.min_reward_ = *std::min_element(rewards_.begin(), rewards_.end());
    m.max_reward_ = *std::max_element(rewards_.begin(), rewards_.end());
    return m;
}

PomdpSr::PomdpSr(PomdpModel m, double cost) : model(std::move(m)), request_cost(cost) {
    if (!(cost > 0.0)) throw ModelError("request cost must be strictly positive");
}

Belief::Belief(std::vector<Entry> entries, Phase phase) : phase_(phase) {
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) { return x.first < y.first; });
    std::vector<Entry> merged;
    merged.reserve(entries.size());
    for (const auto& e : entries) {
        if (e.first < 0) throw ModelError("belief state index must be non-negative");
        if (!(e.second >= 0.0) || !std::isfinite(e.second)) throw ModelError("belief mass must be finite and non-negative");
        if (!merged.empty() && merged.back().first == e.first)
            merged.back().second += e.second;
        else
            merged.push_back(e);
    }
    double total = 0.0;
    for (const auto& e : merged) total += e.second;
    if (!(total > 0.0)) throw ModelError("belief has no mass");
    entries_.reserve(merged.size());
    for (const auto& e : merged) {
        if (e.second / total >= kBeliefPruneThreshold) entries_.push_back(e);
    }
    total = 0.0;
    for (const auto& e : entries_) total += e.second;
    for (auto& e : entries_) e.second /= total;
}

Belief Belief::uniform(std::span<const StateId> states, Phase phase) {
    std::vector<Entry> entries;
    entries.reserve(states.size());
    for (StateId s : states) entries.emplace_back(s, 1.0);
    return Belief(std::move(entries), phase);
}

double Belief::operator[](StateId s) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                               [](const Entry& e, StateId key) { return e.first < key; });
    return (it != entries_.end() && it->first == s) ? it->second : 0.0;
}

std::vector<StateId> Belief::support() const {
    std::vector<StateId> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.first);
    return out;
}

Belief corner_belief(StateId s, Phase phase) { return Belief({{s, 1.0}}, phase); }

std::vector<double> obs_distribution(const PomdpModel& model, const Belief& b, ActionId a) {
    std::vector<double> dist(model.num_observations(), 0.0);
    for (const auto& [s, ps] : b.entries()) {
        for (const auto& t : model.transitions(s, a)) {
            const double w = ps * t.prob;
            for (const auto& o : model.observations(t.index, a)) dist[o.index] += w * o.prob;
        }
    }
    return dist;
}

double obs_probability(const PomdpModel& model, const Belief& b, ActionId a, ObsId o) {
    double p = 0.0;
    for (const auto& [s, ps] : b.entries()) {
        for (const auto& t : model.transitions(s, a)) p += ps * t.prob * model.observation_prob(t.index, a, o);
    }
    return p;
}

Belief belief_update(const PomdpModel& model, const Belief& b, ActionId a, ObsId o) {
    std::vector<Belief::Entry> next;
    for (const auto& [s, ps] : b.entries()) {
        for (const auto& t : model.transitions(s, a)) {
            const double po = model.observation_prob(t.index, a, o);
            if (po > 0.0) next.emplace_back(t.index, ps * t.prob * po);
        }
    }
    double total = 0.0;
    for (const auto& e : next) total += e.second;
    if (!(total > 0.0)) throw ImpossibleObservation("observation " + std::to_string(o) + " has zero probability");
    return Belief(std::move(next), b.phase());
}

double belief_reward(const PomdpModel& model, const Belief& b, ActionId a) {
    double r = 0.0;
    for (const auto& [s, ps] : b.entries()) r += ps * model.reward(s, a);
    return r;
}

BeliefUpdater::BeliefUpdater(const PomdpModel& model)
    : model_(&model),
      joint_(static_cast<std::size_t>(model.num_observations()) * model.num_states(), 0.0),
      touched_(model.num_observations()),
      obs_mass_(model.num_observations(), 0.0) {}

std::vector<BeliefBranch> BeliefUpdater::successors(const Belief& b, ActionId a, Phase child_phase) {
    const int num_states = model_->num_states();
    for (const auto& [s, ps] : b.entries()) {
        for (const auto& t : model_->transitions(s, a)) {
            const double w = ps * t.prob;
            for (const auto& o : model_->observations(t.index, a)) {
                double& cell = joint_[static_cast<std::size_t>(o.index) * num_states + t.index];
                if (cell == 0.0) touched_[o.index].push_back(t.index);
                cell += w * o.prob;
                obs_mass_[o.index] += w * o.prob;
            }
        }
    }
    std::vector<BeliefBranch> out;
    for (int o = 0; o < model_->num_observations(); ++o) {
        auto& touched = touched_[o];
        if (touched.empty()) continue;
        const double mass = obs_mass_[o];
        double* row = joint_.data() + static_cast<std::size_t>(o) * num_states;
        if (mass > 0.0) {
            std::sort(touched.begin(), touched.end());
            std::vector<Belief::Entry> entries;
            entries.reserve(touched.size());
            double kept = 0.0;
            for (StateId s : touched) {
                const double p = row[s] / mass;
                if (p >= kBeliefPruneThreshold) {
                    entries.emplace_back(s, p);
                    kept += p;
                }
            }
            for (auto& e : entries) e.second /= kept;
            out.push_back({o, mass, Belief(std::move(entries), child_phase, Belief::Trusted{})});
        }
        for (StateId s : touched) row[s] = 0.0;
        touched.clear();
        obs_mass_[o] = 0.0;
    }
    return out;
}

}  // namespace pomdpsr
