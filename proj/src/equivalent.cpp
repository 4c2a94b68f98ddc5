#include "pomdpsr/equivalent.hpp"

#include <cmath>

namespace pomdpsr {

EquivalentPomdp to_equivalent_pomdp(const PomdpSr& p) {
    const PomdpModel& m = p.model;
    const int ns = m.num_states();
    const int na = m.num_actions();
    const int no = m.num_observations();
    const double gamma = m.discount();
    const double gamma_eq = std::sqrt(gamma);

    const ActionId request = na;
    const ActionId no_request = na + 1;
    const ObsId marker = no + ns;

    PomdpModel::Builder b(2 * ns, na + 2, no + ns + 1, gamma_eq);
    std::vector<std::vector<ActionId>> legal(2 * ns);

    for (StateId s = 0; s < ns; ++s) {
        const StateId s0 = s;
        const StateId s1 = ns + s;

        // Request-decision phase: the next state is the same state in the action phase.
        legal[s0] = {request, no_request};
        b.transition(s0, request, s1, 1.0);
        b.transition(s0, no_request, s1, 1.0);
        b.reward(s0, request, -p.request_cost / gamma_eq);
        b.reward(s0, no_request, 0.0);
        for (ActionId a = 0; a < na; ++a) {
            b.transition(s0, a, s0, 1.0);
            b.reward(s0, a, 0.0);
        }

        // Action phase: original dynamics into the request-decision phase.
        legal[s1].resize(na);
        for (ActionId a = 0; a < na; ++a) {
            legal[s1][a] = a;
            for (const auto& t : m.transitions(s, a)) b.transition(s1, a, t.index, t.prob);
            b.reward(s1, a, m.reward(s, a));
        }
        b.transition(s1, request, s1, 1.0);
        b.transition(s1, no_request, s1, 1.0);

        // Observations are emitted by the state entered.
        // Entering s1 after a request reveals s; after no-request, the marker.
        b.observation(s1, request, no + s, 1.0);
        b.observation(s1, no_request, marker, 1.0);
        for (ActionId a = 0; a < na; ++a) b.observation(s1, a, marker, 1.0);
        // Entering s0 through an environmental action uses the original observation model.
        for (ActionId a = 0; a < na; ++a) {
            for (const auto& o : m.observations(s, a)) b.observation(s0, a, o.index, o.prob);
        }
        b.observation(s0, request, marker, 1.0);
        b.observation(s0, no_request, marker, 1.0);

        if (m.is_terminal(s)) {
            b.terminal(s0);
            b.terminal(s1);
        }
    }
    return EquivalentPomdp(b.build(), std::move(legal), ns, na, no);
}

}  // namespace pomdpsr
