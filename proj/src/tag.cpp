#include <cstdlib>

#include "pomdpsr/envs.hpp"

namespace pomdpsr {

TagLayout::TagLayout() {
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 10; ++x) coords_.emplace_back(x, y);
    for (int y = 2; y < 5; ++y)
        for (int x = 5; x < 8; ++x) coords_.emplace_back(x, y);

    auto find = [&](int x, int y) {
        for (int c = 0; c < kCells; ++c) {
            if (coords_[c].first == x && coords_[c].second == y) return c;
        }
        return -1;
    };
    constexpr int dx[4] = {0, 0, 1, -1};
    constexpr int dy[4] = {1, -1, 0, 0};
    neighbors_.resize(kCells);
    for (int c = 0; c < kCells; ++c) {
        for (int a = 0; a < 4; ++a) {
            const int nb = find(coords_[c].first + dx[a], coords_[c].second + dy[a]);
            neighbors_[c][a] = nb < 0 ? c : nb;
        }
    }
}

int TagLayout::distance(int a, int b) const { return std::abs(x(a) - x(b)) + std::abs(y(a) - y(b)); }

std::vector<std::pair<int, double>> TagLayout::prey_moves(int prey, int agent, double stay) const {
    const int d = distance(prey, agent);
    std::vector<int> away;
    for (int a = 0; a < 4; ++a) {
        const int nb = neighbor(prey, a);
        if (nb != prey && distance(nb, agent) > d) away.push_back(nb);
    }
    if (away.empty()) return {{prey, 1.0}};
    std::vector<std::pair<int, double>> out{{prey, stay}};
    const double share = (1.0 - stay) / static_cast<double>(away.size());
    for (int nb : away) out.emplace_back(nb, share);
    return out;
}

PomdpModel tag(const TagParams& prm) {
    const TagLayout L;
    constexpr int cells = TagLayout::kCells;
    const StateId term = L.terminal();
    PomdpModel::Builder b(term + 1, 5, cells + 1, prm.discount);
    for (ActionId a = 0; a < 5; ++a) {
        b.transition(term, a, term, 1.0);
        b.observation(term, a, TagLayout::kSameTileObservation, 1.0);
    }
    b.terminal(term);

    for (int agent = 0; agent < cells; ++agent) {
        for (int prey = 0; prey < cells; ++prey) {
            const StateId s = L.state(agent, prey);
            const auto moves = L.prey_moves(prey, agent, prm.prey_stay_probability);
            for (ActionId a = 0; a < 5; ++a) {
                if (a == TagLayout::Tag && agent == prey) {
                    b.transition(s, a, term, 1.0);
                    b.reward(s, a, 10.0);
                } else {
                    const int next_agent = a == TagLayout::Tag ? agent : L.neighbor(agent, a);
                    for (const auto& [p2, pr] : moves) b.transition(s, a, L.state(next_agent, p2), pr);
                    b.reward(s, a, a == TagLayout::Tag ? -10.0 : -1.0);
                }
                b.observation(s, a, agent == prey ? TagLayout::kSameTileObservation : agent, 1.0);
            }
        }
    }
    return b.build();
}

Environment tag_env(const TagParams& params) {
    const TagLayout L;
    std::vector<Belief::Entry> all;
    for (StateId s = 0; s < L.terminal(); ++s) all.emplace_back(s, 1.0);
    auto belief_for = [L](StateId s) {
        std::vector<Belief::Entry> entries;
        for (int prey = 0; prey < TagLayout::kCells; ++prey) entries.emplace_back(L.state(L.agent_of(s), prey), 1.0);
        return Belief(entries);
    };
    return Environment{"tag", PomdpSr(tag(params), params.request_cost), Belief(all), belief_for, {}};
}

}  // namespace pomdpsr
