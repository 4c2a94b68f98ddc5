#include <algorithm>
#include <sstream>

#include "pomdpsr/envs.hpp"

namespace pomdpsr {

namespace {

constexpr int kWall = -1;
constexpr int kExit = -2;
constexpr int kDeltaRow[4] = {-1, 1, 0, 0};
constexpr int kDeltaCol[4] = {0, 0, -1, 1};

}  // namespace

RobotDeliveryLayout::RobotDeliveryLayout(int n) : n_(n), width_(2 * n - 1) {
    if (n < 1) throw ModelError("RobotDelivery needs at least one corridor");
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < width_; ++c) cells_.push_back({r, c});
    for (int i = 0; i < n; ++i) {
        cells_.push_back({-1, 2 * i});
        cells_.push_back({-2, 2 * i});
    }
    cells_.push_back({3, n - 1});
}

int RobotDeliveryLayout::find(int row, int col) const {
    for (int i = 0; i < num_positions(); ++i) {
        if (cells_[i].row == row && cells_[i].col == col) return i;
    }
    return kWall;
}

int RobotDeliveryLayout::move(int position, ActionId a) const {
    const int row = cells_[position].row + kDeltaRow[a];
    const int col = cells_[position].col + kDeltaCol[a];
    if (row == 1 && col == -1) return kExit;
    return find(row, col);
}

int RobotDeliveryLayout::wall_count(int position) const {
    int walls = 0;
    for (ActionId a = 0; a < 4; ++a) walls += move(position, a) == kWall ? 1 : 0;
    return walls;
}

int RobotDeliveryLayout::pickup_index(int position) const {
    const int offset = position - 3 * width_;
    if (offset < 0 || offset >= 2 * n_ || offset % 2 == 0) return -1;
    return offset / 2;
}

std::string RobotDeliveryLayout::ascii_map() const {
    std::ostringstream out;
    for (int r = -3; r <= 4; ++r) {
        for (int c = -2; c <= width_; ++c) {
            char ch = '#';
            if (r == 1 && c == -1) {
                ch = 'E';
            } else {
                const int p = find(r, c);
                if (p == delivery())
                    ch = 'D';
                else if (p == start())
                    ch = 'A';
                else if (p >= 0 && pickup_index(p) >= 0)
                    ch = static_cast<char>('1' + pickup_index(p) % 9);
                else if (p >= 0)
                    ch = '.';
            }
            out << ch;
        }
        out << '\n';
    }
    return out.str();
}

std::string RobotDeliveryLayout::state_legend() const {
    std::ostringstream out;
    out << "state,row,col,cell,status\n";
    for (StateId s = 0; s + 1 < num_states(); ++s) {
        const int p = position_of(s);
        const int st = status_of(s);
        std::string cell = "room";
        if (p == delivery())
            cell = "delivery";
        else if (pickup_index(p) >= 0)
            cell = "pickup" + std::to_string(pickup_index(p) + 1);
        else if (p >= 3 * width_)
            cell = "corridor";
        std::string status;
        if (st < n_)
            status = "at_pickup" + std::to_string(st + 1);
        else if (st == waiting())
            status = "waiting";
        else if (st == carried())
            status = "carried";
        else
            status = "none";
        out << s << ',' << cells_[p].row << ',' << cells_[p].col << ',' << cell << ',' << status << '\n';
    }
    out << terminal() << ",,,exit,terminal\n";
    return out.str();
}

PomdpSr robot_delivery(const RobotDeliveryParams& prm) {
    if (prm.f < 0.0 || prm.f >= 1.0) throw ModelError("failure probability must be in [0,1)");
    if (prm.t <= 0.0 || prm.t > 1.0) throw ModelError("transfer probability must be in (0,1]");
    if (prm.e <= 0.0 || prm.e > 1.0) throw ModelError("no-respawn probability must be in (0,1]");
    const RobotDeliveryLayout L(prm.n);
    const int n = prm.n;
    const int ns = L.num_states();
    PomdpModel::Builder b(ns, 4, 5, prm.discount);

    const StateId term = L.terminal();
    for (ActionId a = 0; a < 4; ++a) {
        b.transition(term, a, term, 1.0);
        b.observation(term, a, RobotDeliveryLayout::kSpecialObservation, 1.0);
    }
    b.terminal(term);

    std::vector<std::pair<int, double>> agent;
    std::vector<std::pair<int, double>> status;
    for (int pos = 0; pos < L.num_positions(); ++pos) {
        for (int st = 0; st < L.num_statuses(); ++st) {
            const StateId s = L.state(pos, st);
            for (ActionId a = 0; a < 4; ++a) {
                const int target = L.move(pos, a);
                agent.clear();
                double exit_prob = 0.0;
                if (target == kWall) {
                    agent.emplace_back(pos, 1.0);
                } else if (target == kExit) {
                    exit_prob = 1.0 - prm.f;
                    if (prm.f > 0.0) agent.emplace_back(pos, prm.f);
                } else if (target == L.delivery() || L.pickup_index(target) >= 0) {
                    agent.emplace_back(target, 1.0);
                } else {
                    agent.emplace_back(target, 1.0 - prm.f);
                    if (prm.f > 0.0) agent.emplace_back(pos, prm.f);
                }

                double reward = exit_prob * prm.exit_reward;
                status.clear();
                const bool delivering = st == L.carried() && target == L.delivery();
                if (delivering) {
                    reward += prm.delivery_reward;
                    status.emplace_back(L.none(), prm.e);
                    if (prm.t < 1.0) status.emplace_back(L.waiting(), (1.0 - prm.e) * (1.0 - prm.t));
                    for (int i = 0; i < n; ++i) status.emplace_back(i, (1.0 - prm.e) * prm.t / n);
                } else if (st < n && L.pickup_index(pos) == st) {
                    status.emplace_back(L.carried(), 1.0);
                } else if (st == L.waiting()) {
                    if (prm.t < 1.0) status.emplace_back(L.waiting(), 1.0 - prm.t);
                    for (int i = 0; i < n; ++i) status.emplace_back(i, prm.t / n);
                } else {
                    status.emplace_back(st, 1.0);
                }

                if (exit_prob > 0.0) b.transition(s, a, term, exit_prob);
                for (const auto& [p2, pa] : agent) {
                    for (const auto& [st2, ps] : status) {
                        if (pa * ps > 0.0) b.transition(s, a, L.state(p2, st2), pa * ps);
                    }
                }
                b.reward(s, a, reward);

                const bool special = pos == L.delivery() || (st < n && L.pickup_index(pos) == st);
                b.observation(s, a, special ? RobotDeliveryLayout::kSpecialObservation : L.wall_count(pos), 1.0);
            }
        }
    }
    return PomdpSr(b.build(), prm.request_cost);
}

Environment robot_delivery_env(const RobotDeliveryParams& params) {
    const RobotDeliveryLayout L(params.n);
    std::vector<Belief::Entry> entries;
    for (int i = 0; i < params.n; ++i) entries.emplace_back(L.state(L.start(), i), 1.0);
    Environment env{"robot-delivery-" + std::to_string(params.n), robot_delivery(params), Belief(entries), {}, {}};
    env.realized_reward = [L, params](StateId s, ActionId a, StateId next) {
        if (s == L.terminal()) return 0.0;
        const int pos = L.position_of(s);
        const int target = L.move(pos, a);
        if (target == kExit) return next == L.terminal() ? params.exit_reward : 0.0;
        const bool delivering = L.status_of(s) == L.carried() && target == L.delivery();
        return delivering ? params.delivery_reward : 0.0;
    };
    return env;
}

}  // namespace pomdpsr
