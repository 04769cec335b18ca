#include "redsim/toy_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace redsim::toy {

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
} // namespace

StateVector two_particle_singlet() {
    Vec v = Vec::Zero(4);
    v[1] = kInvSqrt2;  // |1+,2->
    v[2] = -kInvSqrt2; // |1-,2+>
    return StateVector(std::move(v), {2, 2});
}

StateVector two_particle_basis(int theta1_sign, int theta2_sign) {
    if (std::abs(theta1_sign) != 1 || std::abs(theta2_sign) != 1)
        throw std::invalid_argument("two_particle_basis: signs must be +-1");
    const Index i1 = theta1_sign == 1 ? 0 : 1;
    const Index i2 = theta2_sign == 1 ? 0 : 1;
    Vec v = Vec::Zero(4);
    v[i1 * 2 + i2] = 1.0;
    return StateVector(std::move(v), {2, 2});
}

StateVector one_particle_state(Complex plus_amp, Complex minus_amp) {
    Vec v(2);
    v << plus_amp, minus_amp;
    return StateVector(std::move(v), {2});
}

void ScenarioConfig::validate() const {
    if (particles.empty() || particles.size() > 2)
        throw std::invalid_argument("ScenarioConfig: one or two particles supported");
    for (const auto& wl : particles)
        if (std::abs(wl.velocity) >= 1.0)
            throw std::invalid_argument("ScenarioConfig: world line not time-like");
    const Index want = particles.size() == 1 ? 2 : 4;
    if (initial_state.dim() != want)
        throw std::invalid_argument("ScenarioConfig: initial state has wrong dimension");
    if (!initial_state.is_normalized())
        throw std::invalid_argument("ScenarioConfig: initial state not normalized");
    if (particles.size() == 2 &&
        initial_state.overlap(two_particle_singlet()) < 1.0 - kAlgebraicTol)
        throw std::invalid_argument(
            "ScenarioConfig: two-particle runs require the anticorrelated preparation");
    for (const auto& app : apparatuses) {
        if (app.particle >= particles.size())
            throw std::invalid_argument("ScenarioConfig: apparatus measures missing particle");
        const double on_line = particles[app.particle].position_at(app.location.t);
        if (std::abs(on_line - app.location.x) > 1e-9)
            throw std::invalid_argument("ScenarioConfig: apparatus off its particle's world line");
        if (app.location.t < sigma0.time_at(app.location.x) - 1e-12)
            throw std::invalid_argument("ScenarioConfig: apparatus below the initial surface");
    }
    for (std::size_t i = 0; i < apparatuses.size(); ++i)
        for (std::size_t j = i + 1; j < apparatuses.size(); ++j)
            if (apparatuses[i].id == apparatuses[j].id)
                throw std::invalid_argument("ScenarioConfig: duplicate apparatus id");
}

const Apparatus& ScenarioConfig::apparatus(const std::string& id) const {
    for (const auto& app : apparatuses)
        if (app.id == id) return app;
    throw std::out_of_range("ScenarioConfig: no apparatus named " + id);
}

ScenarioConfig ScenarioConfig::with_switch(const std::string& id, bool on) const {
    ScenarioConfig out = *this;
    for (auto& app : out.apparatuses)
        if (app.id == id) {
            app.on = on;
            return out;
        }
    throw std::out_of_range("ScenarioConfig: no apparatus named " + id);
}

bool EventLog::has(const std::string& id) const { return outcomes_.count(id) > 0; }

const LoggedOutcome& EventLog::at(const std::string& id) const {
    const auto it = outcomes_.find(id);
    if (it == outcomes_.end()) throw std::out_of_range("EventLog: no outcome for " + id);
    return it->second;
}

void EventLog::record(const std::string& id, int value, const Point& where) {
    if (value != 1 && value != -1) throw std::invalid_argument("EventLog: outcome must be +-1");
    const auto it = outcomes_.find(id);
    if (it != outcomes_.end()) {
        if (it->second.value != value)
            throw std::logic_error("EventLog: conflicting rewrite for " + id);
        return;
    }
    outcomes_.emplace(id, LoggedOutcome{value, where});
}

void EventLog::set_pair_branch(int particle1_value) {
    if (particle1_value != 1 && particle1_value != -1)
        throw std::invalid_argument("EventLog: branch must be +-1");
    if (pair_branch_ && *pair_branch_ != particle1_value)
        throw std::logic_error("EventLog: conflicting pair branch");
    pair_branch_ = particle1_value;
}

namespace {

std::vector<const Apparatus*> crossed_on_devices(const ScenarioConfig& cfg,
                                                 const SpacelikeSurface& sigma) {
    std::vector<const Apparatus*> crossed;
    for (const auto& app : cfg.apparatuses)
        if (app.on && in_volume(app.location, sigma, cfg.sigma0)) crossed.push_back(&app);
    std::sort(crossed.begin(), crossed.end(),
              [](const Apparatus* a, const Apparatus* b) { return a->location.t < b->location.t; });
    return crossed;
}

int pair_value_for(const Apparatus& app, int particle1_value) {
    return app.particle == 0 ? particle1_value : -particle1_value;
}

} // namespace

StateVector state_on_surface(const ScenarioConfig& cfg, const SpacelikeSurface& sigma,
                             EventLog& log, Rng& rng) {
    cfg.validate();
    const auto crossed = crossed_on_devices(cfg, sigma);
    if (crossed.empty()) return cfg.initial_state;

    if (cfg.particles.size() == 1) {
        int value = 0;
        for (const auto& app : cfg.apparatuses)
            if (log.has(app.id)) value = log.at(app.id).value;
        if (value == 0) {
            const double p_plus = std::norm(cfg.initial_state.amplitudes()[0]);
            value = rng.bernoulli(p_plus) ? 1 : -1;
        }
        for (const Apparatus* app : crossed) log.record(app->id, value, app->location);
        return one_particle_state(value == 1 ? 1.0 : 0.0, value == 1 ? 0.0 : 1.0);
    }

    // Anticorrelated pair: one shared coin, equal probabilities.
    if (!log.pair_branch()) log.set_pair_branch(rng.bernoulli(0.5) ? 1 : -1);
    const int branch = *log.pair_branch();
    for (const Apparatus* app : crossed)
        log.record(app->id, pair_value_for(*app, branch), app->location);
    return two_particle_basis(branch, -branch);
}

PropertyVerdict property_at(const Point& p, std::size_t particle, const ScenarioConfig& cfg,
                            EventLog& log, Rng& rng) {
    if (particle >= cfg.particles.size())
        throw std::out_of_range("property_at: no such particle");
    const SpacelikeSurface sigma_p = past_cone_surface(p, cfg.sigma0);
    const StateVector psi = state_on_surface(cfg, sigma_p, log, rng);
    const double p_plus = [&] {
        if (cfg.particles.size() == 1) return std::norm(psi.amplitudes()[0]);
        double mass = 0.0;
        for (Index i = 0; i < 4; ++i) {
            const Index sign_bit = particle == 0 ? i / 2 : i % 2;
            if (sign_bit == 0) mass += std::norm(psi.amplitudes()[i]);
        }
        return mass;
    }();
    if (p_plus >= 1.0 - kStructuralTol) return PropertyVerdict{true, 1};
    if (p_plus <= kStructuralTol) return PropertyVerdict{true, -1};
    return PropertyVerdict{false, 0};
}

ApparatusEvent apparatus_event_at(const std::string& id, double t, const ScenarioConfig& cfg,
                                  EventLog& log, Rng& rng) {
    const Apparatus& app = cfg.apparatus(id);
    const Point q{app.location.x, t}; // devices sit still in this frame
    const SpacelikeSurface sigma_q = past_cone_surface(q, cfg.sigma0);
    if (!app.on || !in_volume(app.location, sigma_q, cfg.sigma0)) return ApparatusEvent::Ready;
    state_on_surface(cfg, sigma_q, log, rng); // fixes the outcome if still open
    return log.at(id).value == 1 ? ApparatusEvent::Plus : ApparatusEvent::Minus;
}

ParameterIndependenceStats stats_parameter_independence(const ScenarioConfig& cfg,
                                                        std::size_t n_trials, Rng& rng) {
    cfg.validate();
    if (cfg.particles.size() != 2 || cfg.apparatuses.size() != 2 ||
        cfg.apparatuses[0].particle == cfg.apparatuses[1].particle)
        throw std::invalid_argument(
            "stats_parameter_independence: need one apparatus per particle");

    const bool first_is_left = cfg.apparatuses[0].location.x <= cfg.apparatuses[1].location.x;
    const std::string left_id = first_is_left ? cfg.apparatuses[0].id : cfg.apparatuses[1].id;
    const std::string right_id = first_is_left ? cfg.apparatuses[1].id : cfg.apparatuses[0].id;

    double top = cfg.sigma0.time_at(0.0);
    for (const auto& app : cfg.apparatuses) top = std::max(top, app.location.t);
    const SpacelikeSurface above = SpacelikeSurface::constant_time(top + 1.0);

    ParameterIndependenceStats stats;
    stats.trials = n_trials;
    std::size_t counts[2][2][2] = {};
    std::uint64_t stream = 0;
    for (int side = 0; side < 2; ++side) {
        const std::string& own = side == 0 ? left_id : right_id;
        const std::string& other = side == 0 ? right_id : left_id;
        for (int g_other = 0; g_other < 2; ++g_other) {
            ScenarioConfig variant = cfg.with_switch(own, true).with_switch(other, g_other == 1);
            for (std::size_t trial = 0; trial < n_trials; ++trial) {
                Rng trial_rng = rng.split(stream++);
                EventLog log;
                state_on_surface(variant, above, log, trial_rng);
                const int v = log.at(own).value;
                ++counts[side][g_other][v == 1 ? 0 : 1];
                if (g_other == 1 && log.at(other).value == v) ++stats.same_outcome_both_on;
            }
        }
    }
    for (int side = 0; side < 2; ++side)
        for (int g = 0; g < 2; ++g)
            for (int o = 0; o < 2; ++o)
                stats.p[side][g][o] =
                    static_cast<double>(counts[side][g][o]) / static_cast<double>(n_trials);
    return stats;
}

ClaimVerdict counterfactual_classify(const CounterfactualClaim& claim, const ScenarioConfig& cfg,
                                     const EventLog& log) {
    if (claim.asserted_outcome != 1 && claim.asserted_outcome != -1)
        throw std::invalid_argument("counterfactual_classify: asserted outcome must be +-1");
    if (!log.has(claim.fixed_outcome_id))
        throw std::invalid_argument("counterfactual_classify: claim leans on no registered outcome");
    cfg.apparatus(claim.fixed_outcome_id); // must name a real device

    if (!claim.hypothetical_apparatus) return ClaimVerdict::Legitimate;

    const Point fixed = log.at(claim.fixed_outcome_id).where;
    switch (spacetime::relate(fixed, *claim.hypothetical_apparatus)) {
        case spacetime::CausalRelation::TimelikeFuture:
        case spacetime::CausalRelation::LightlikeFuture:
            return ClaimVerdict::Legitimate;
        default:
            // A supposed device space-like to the registered outcome (or
            // preceding it) would alter facts the outcome already depends on.
            return ClaimVerdict::Illegitimate;
    }
}

void HiddenVariableModel::validate() const {
    if (only_right_outcome.empty() || only_right_outcome.size() != both_on_right_outcome.size())
        throw std::invalid_argument("HiddenVariableModel: outcome tables must align");
    for (std::size_t k = 0; k < size(); ++k)
        if (std::abs(only_right_outcome[k]) != 1 || std::abs(both_on_right_outcome[k]) != 1)
            throw std::invalid_argument("HiddenVariableModel: outcomes must be +-1");
    if (flip_set().empty())
        throw std::invalid_argument(
            "HiddenVariableModel: switching the left device never changes any right outcome; "
            "the model is local");
}

std::vector<std::size_t> HiddenVariableModel::plus_set() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < size(); ++k)
        if (only_right_outcome[k] == 1) out.push_back(k);
    return out;
}

std::vector<std::size_t> HiddenVariableModel::flip_set() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < size(); ++k)
        if (only_right_outcome[k] == 1 && both_on_right_outcome[k] == -1) out.push_back(k);
    return out;
}

std::vector<HvDisagreement> hv_counterfactual_demo(const HiddenVariableModel& model) {
    model.validate();
    std::vector<HvDisagreement> report;
    for (std::size_t lambda : model.flip_set()) {
        HvDisagreement d;
        d.lambda = lambda;
        d.same_lambda_right = model.both_on_right_outcome[lambda]; // -1 by construction
        d.same_lambda_left = -d.same_lambda_right;                 // +1
        for (std::size_t k = 0; k < model.size(); ++k)
            if (model.both_on_right_outcome[k] == 1) d.same_outcome_worlds.push_back(k);
        d.selection_includes_minus_worlds = false;
        for (std::size_t k : d.same_outcome_worlds)
            if (model.only_right_outcome[k] == -1) d.selection_includes_minus_worlds = true;
        d.same_outcome_left_prediction = -1; // anticorrelated with right = +1
        d.criteria_disagree =
            d.same_outcome_worlds.empty() ||
            d.same_outcome_left_prediction != d.same_lambda_left;
        report.push_back(std::move(d));
    }
    return report;
}

} // namespace redsim::toy
