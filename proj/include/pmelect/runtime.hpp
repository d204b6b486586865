#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "boundary_comm.hpp"

namespace pmelect {

enum class ScheduleKind : std::uint8_t { Synchronous, SequentialRoundRobin, SequentialRandom, AsyncRandomSubset };

struct ScheduleMode {
    ScheduleKind kind = ScheduleKind::Synchronous;
    int fairness_window = 0;  // 0 picks the mode default

    static ScheduleMode synchronous() { return {ScheduleKind::Synchronous, 0}; }
    static ScheduleMode round_robin() { return {ScheduleKind::SequentialRoundRobin, 0}; }
    static ScheduleMode sequential_random(int f = 0) { return {ScheduleKind::SequentialRandom, f}; }
    static ScheduleMode async_subset(int f = 0) { return {ScheduleKind::AsyncRandomSubset, f}; }

    int window(int n) const {
        switch (kind) {
            case ScheduleKind::Synchronous: return 1;
            case ScheduleKind::SequentialRoundRobin: return n;
            case ScheduleKind::SequentialRandom: return fairness_window > 0 ? std::max(fairness_window, n) : 2 * n;
            case ScheduleKind::AsyncRandomSubset: return fairness_window > 0 ? fairness_window : 3 * n;
        }
        return n;
    }
};

inline const char* mode_name(ScheduleKind k) {
    switch (k) {
        case ScheduleKind::Synchronous: return "sync";
        case ScheduleKind::SequentialRoundRobin: return "seqrr";
        case ScheduleKind::SequentialRandom: return "seqrand";
        case ScheduleKind::AsyncRandomSubset: return "async";
    }
    return "?";
}

inline ScheduleMode parse_mode(const std::string& s) {
    if (s == "sync") return ScheduleMode::synchronous();
    if (s == "seqrr") return ScheduleMode::round_robin();
    if (s == "seqrand") return ScheduleMode::sequential_random();
    if (s == "async") return ScheduleMode::async_subset();
    throw std::invalid_argument("unknown mode '" + s + "'");
}

struct Metrics {
    std::uint64_t ticks = 0;
    std::uint64_t activation_units = 0;
    std::uint64_t activations = 0;
    std::uint64_t messages_sent = 0;
    std::uint64_t merges = 0;
    std::uint64_t comparisons = 0;
    std::map<NodeCoord, std::uint64_t> rounds_per_component;  // keyed by the coordinating root
    std::uint64_t max_same_kind_in_flight = 0;                 // per directed edge and kind
};

class NonQuiescent : public std::runtime_error {
public:
    NonQuiescent(std::uint64_t budget, Metrics m)
        : std::runtime_error("no quiescence within " + std::to_string(budget) + " ticks"), metrics(std::move(m)) {}
    Metrics metrics;
};

inline std::uint64_t default_tick_budget() {
    if (const char* env = std::getenv("PM_ELECT_TICK_BUDGET")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && v > 0) return v;
    }
    return 200'000'000ULL;
}

template <class Msg>
struct Envelope {
    Msg msg;
    int from = 0;
    int to = 0;
    PortId send_port = 0;  // sender side
    PortId recv_port = 0;  // receiver side
};

// Side effects a transition can report to the observer.
struct ActivationEvents {
    std::uint64_t merges = 0;
    std::uint64_t comparisons = 0;
    std::uint64_t rounds = 0;
};

template <class P>
class World;

template <class P>
class Activation {
public:
    using State = typename P::State;
    using Message = typename P::Message;
    using Env = Envelope<Message>;

    int self() const { return self_; }
    const LocalView& view() const { return world_->views_[static_cast<std::size_t>(self_)]; }
    const State& old() const { return world_->states_[static_cast<std::size_t>(self_)]; }
    State& state() { return *next_; }
    std::span<const Env> inbox() const { return world_->inboxes_[static_cast<std::size_t>(self_)]; }

    // Pre-tick snapshot of the neighbour behind port p (must be occupied).
    const State& neighbor(PortId p) const {
        return world_->states_[static_cast<std::size_t>(view().nbr[static_cast<std::size_t>(p)])];
    }
    const LocalView& neighbor_view(PortId p) const {
        return world_->views_[static_cast<std::size_t>(view().nbr[static_cast<std::size_t>(p)])];
    }
    std::span<const Env> neighbor_inbox(PortId p) const {
        return world_->inboxes_[static_cast<std::size_t>(view().nbr[static_cast<std::size_t>(p)])];
    }

    void send(PortId p, const Message& m) {
        const int to = view().nbr[static_cast<std::size_t>(p)];
        world_->staged_.push_back(Env{m, self_, to, p, view().rev[static_cast<std::size_t>(p)]});
    }

    ActivationEvents& events() { return world_->events_; }

    // Observer-only tag linking the hops of one boundary message.
    std::uint32_t new_trace_id() { return ++world_->trace_ids_; }

private:
    friend class World<P>;
    Activation(World<P>* w, int self, State* next) : world_(w), self_(self), next_(next) {}
    World<P>* world_;
    int self_;
    State* next_;
};

template <class P>
class World {
public:
    using State = typename P::State;
    using Message = typename P::Message;
    using Env = Envelope<Message>;
    using TraceSink = std::function<void(const std::string&)>;
    using SendObserver = std::function<void(const Env&)>;

    World(Configuration config, std::uint64_t seed) : config_(std::move(config)), seed_(seed), rng_(seed) {
        assign_chirality_from_seed(config_);
        const ValidationResult v = validate(config_);
        if (!v.ok()) throw InvalidConfiguration(v);
        views_ = build_local_views(config_);
        const std::size_t n = config_.nodes.size();
        states_.resize(n);
        for (std::size_t i = 0; i < n; ++i) P::init(states_[i], views_[i]);
        inboxes_.resize(n);
        last_active_.assign(n, 0);
        seen_in_unit_.assign(n, 0);
    }

    int size() const { return static_cast<int>(states_.size()); }
    const Configuration& config() const { return config_; }
    const std::vector<LocalView>& views() const { return views_; }
    const std::vector<State>& states() const { return states_; }
    const State& state(int i) const { return states_[static_cast<std::size_t>(i)]; }
    const std::vector<std::vector<Env>>& inboxes() const { return inboxes_; }
    const Metrics& metrics() const { return metrics_; }
    std::uint64_t in_flight() const { return in_flight_; }

    void set_trace(TraceSink sink) { trace_ = std::move(sink); }
    void set_send_observer(SendObserver obs) { on_send_ = std::move(obs); }

    // Longest run of consecutive ticks any particle went without activation.
    void track_idle(bool on) { track_idle_ = on; }
    std::uint64_t max_idle_observed() const { return max_idle_; }

    // Returns true if any state changed or any message was sent.
    bool step(const ScheduleMode& mode) {
        const int n = size();
        pick(mode, n);
        std::vector<std::pair<int, State>> next;
        next.reserve(active_.size());
        bool changed = false;
        std::string transitions;
        for (int i : active_) {
            State s = states_[static_cast<std::size_t>(i)];
            Activation<P> act(this, i, &s);
            events_ = {};
            P::activate(act);
            metrics_.merges += events_.merges;
            metrics_.comparisons += events_.comparisons;
            if (events_.rounds) metrics_.rounds_per_component[coord(i)] += events_.rounds;
            if (!(s == states_[static_cast<std::size_t>(i)])) {
                changed = true;
                if (trace_) {
                    const std::string a = P::phase_name(states_[static_cast<std::size_t>(i)]);
                    const std::string b = P::phase_name(s);
                    if (a != b) transitions += " " + to_string(coord(i)) + ":" + a + "->" + b;
                }
            }
            next.emplace_back(i, std::move(s));
        }
        for (auto& [i, s] : next) {
            states_[static_cast<std::size_t>(i)] = std::move(s);
            in_flight_ -= inboxes_[static_cast<std::size_t>(i)].size();
            inboxes_[static_cast<std::size_t>(i)].clear();
        }
        in_flight_ += staged_.size();
        const bool sent = !staged_.empty();
        std::string msgs;
        for (auto& e : staged_) {
            if (trace_) {
                msgs += " ";
                msgs += P::message_name(e.msg);
                msgs += " " + to_string(coord(e.from)) + "p" + std::to_string(e.send_port) + "->" +
                        to_string(coord(e.to)) + "p" + std::to_string(e.recv_port);
            }
            if (on_send_) on_send_(e);
            auto& box = inboxes_[static_cast<std::size_t>(e.to)];
            std::uint64_t same = 1;
            for (const auto& o : box)
                if (o.from == e.from && P::kind_of(o.msg) == P::kind_of(e.msg)) ++same;
            if (same > metrics_.max_same_kind_in_flight) metrics_.max_same_kind_in_flight = same;
            box.push_back(std::move(e));
        }
        metrics_.messages_sent += staged_.size();
        staged_.clear();
        metrics_.activations += active_.size();
        for (int i : active_) last_active_[static_cast<std::size_t>(i)] = metrics_.ticks + 1;
        if (track_idle_) {
            for (int i = 0; i < n; ++i) max_idle_ = std::max(max_idle_, idle(i, metrics_.ticks + 1));
        }
        for (int i : active_) {
            if (!seen_in_unit_[static_cast<std::size_t>(i)]) {
                seen_in_unit_[static_cast<std::size_t>(i)] = 1;
                ++seen_count_;
            }
        }
        dirty_ = dirty_ || changed || sent || in_flight_ > 0;
        if (trace_) {
            std::string line = "t=" + std::to_string(metrics_.ticks) + " act=";
            for (std::size_t k = 0; k < active_.size(); ++k) {
                if (k) line += ",";
                line += to_string(coord(active_[k]));
            }
            line += " tr=[" + (transitions.empty() ? std::string() : transitions.substr(1)) + "]";
            line += " msg=[" + (msgs.empty() ? std::string() : msgs.substr(1)) + "]";
            trace_(line);
        }
        ++metrics_.ticks;
        if (seen_count_ == n) {
            ++metrics_.activation_units;
            std::fill(seen_in_unit_.begin(), seen_in_unit_.end(), 0);
            seen_count_ = 0;
            quiet_units_ = dirty_ ? 0 : quiet_units_ + 1;
            dirty_ = false;
        }
        return changed || sent;
    }

    std::uint64_t quiet_units() const { return quiet_units_; }

    // Steps until stability_window consecutive activation units pass without change or traffic.
    Metrics run_to_quiescence(const ScheduleMode& mode, std::uint64_t stability_window,
                              std::uint64_t tick_budget = default_tick_budget()) {
        while (quiet_units_ < stability_window) {
            if (metrics_.ticks >= tick_budget) throw NonQuiescent(tick_budget, metrics_);
            step(mode);
        }
        return metrics_;
    }

    NodeCoord coord(int i) const { return config_.nodes[static_cast<std::size_t>(i)]; }

    Metrics& mutable_metrics() { return metrics_; }

private:
    friend class Activation<P>;

    // Ticks without activation before tick t.
    std::uint64_t idle(int i, std::uint64_t t) const { return t - last_active_[static_cast<std::size_t>(i)]; }

    void pick(const ScheduleMode& mode, int n) {
        active_.clear();
        const int f = mode.window(n);
        switch (mode.kind) {
            case ScheduleKind::Synchronous:
                for (int i = 0; i < n; ++i) active_.push_back(i);
                break;
            case ScheduleKind::SequentialRoundRobin:
                active_.push_back(static_cast<int>(metrics_.ticks % static_cast<std::uint64_t>(n)));
                break;
            case ScheduleKind::SequentialRandom: {
                // Earliest-deadline forcing keeps every particle inside the window.
                int pickd = -1;
                std::uint64_t worst = 0;
                for (int i = 0; i < n; ++i) {
                    const std::uint64_t a = idle(i, metrics_.ticks);
                    if (a + static_cast<std::uint64_t>(n) >= static_cast<std::uint64_t>(f) && (pickd < 0 || a > worst)) {
                        pickd = i;
                        worst = a;
                    }
                }
                if (pickd < 0) pickd = static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng_));
                active_.push_back(pickd);
                break;
            }
            case ScheduleKind::AsyncRandomSubset: {
                std::bernoulli_distribution coin(0.5);
                for (int i = 0; i < n; ++i) {
                    const bool forced = idle(i, metrics_.ticks) + 1 >= static_cast<std::uint64_t>(f);
                    if (coin(rng_) || forced) active_.push_back(i);
                }
                if (active_.empty()) active_.push_back(std::uniform_int_distribution<int>(0, n - 1)(rng_));
                break;
            }
        }
    }

    Configuration config_;
    std::uint64_t seed_;
    std::mt19937_64 rng_;
    std::vector<LocalView> views_;
    std::vector<State> states_;
    std::vector<std::vector<Env>> inboxes_;
    std::vector<Env> staged_;
    std::vector<int> active_;
    std::vector<std::uint64_t> last_active_;  // tick index after the particle's latest activation
    std::uint64_t in_flight_ = 0;
    bool track_idle_ = false;
    std::vector<std::uint8_t> seen_in_unit_;
    int seen_count_ = 0;
    bool dirty_ = true;
    std::uint64_t quiet_units_ = 0;
    std::uint64_t max_idle_ = 0;
    Metrics metrics_;
    ActivationEvents events_;
    std::uint32_t trace_ids_ = 0;
    TraceSink trace_;
    SendObserver on_send_;
};

}  // namespace pmelect
