#include "arw/coupling.hpp"

#include <stdexcept>

namespace arw {

namespace {

void require_same_torus(const Configuration& eta0, const Configuration& xi0) {
    if (!(eta0.domain() == xi0.domain()))
        throw std::invalid_argument("coupled configurations must share one domain");
    if (eta0.domain().boundary() != Boundary::Torus)
        throw std::invalid_argument("the embedding stage runs on a torus");
}

}  // namespace

EmbeddingTrace embedding_stage(const Configuration& eta0, const Configuration& xi0,
                               const InstructionField& field, std::int64_t round_cap,
                               RoundOrder order) {
    require_same_torus(eta0, xi0);
    if (round_cap <= 0) throw std::invalid_argument("round cap must be positive");
    for (std::int64_t site = 0; site < xi0.site_count(); ++site)
        if (xi0.state(site).is_sleeping())
            throw std::invalid_argument("xi0 must be an active configuration");

    EmbeddingTrace trace{EmbeddingTrace::Termination::Embedded,
                         0,
                         {},
                         eta0,
                         Odometer(eta0.domain()),
                         0};
    Configuration& eta = trace.eta_prime;
    Odometer& h = trace.h0_prime;
    const std::int64_t n_sites = eta.site_count();

    std::vector<std::int64_t> selected;
    for (std::int64_t round = 1; round <= round_cap; ++round) {
        selected.clear();
        for (std::int64_t i = 0; i < n_sites; ++i) {
            const std::int64_t site = order == RoundOrder::Raster ? i : n_sites - 1 - i;
            if (eta.state(site) > xi0.state(site)) selected.push_back(site);
        }
        if (selected.empty()) {
            trace.rounds = round - 1;
            return trace;
        }
        // Every selected site holds a particle (its state exceeds an element
        // of N_s), so these topplings are all acceptable; sleeping sites get
        // woken by force.
        for (std::int64_t site : selected) {
            if (eta.state(site).is_sleeping()) ++trace.forced_wakes;
            topple(eta, h, field, site);
        }
        trace.round_sizes.push_back(static_cast<std::int64_t>(selected.size()));
    }
    trace.rounds = round_cap;
    trace.termination = EmbeddingTrace::Termination::RoundCapExceeded;
    return trace;
}

EmbeddingVerdict verify_embedding(const EmbeddingTrace& trace, const Configuration& xi0) {
    if (!trace.embedded())
        return {EmbeddingVerdict::Result::NotApplicable, 0};
    std::int64_t violations = 0;
    for (std::int64_t site = 0; site < xi0.site_count(); ++site)
        if (trace.eta_prime.state(site) > xi0.state(site)) ++violations;
    return {violations == 0 ? EmbeddingVerdict::Result::Pass
                            : EmbeddingVerdict::Result::Fail,
            violations};
}

CouplingReport coupled_stabilize(const Configuration& eta0, const Configuration& xi0,
                                 const InstructionField& field, const CouplingCaps& caps) {
    require_same_torus(eta0, xi0);
    CouplingReport report;
    report.density_eta = eta0.density();
    report.density_xi = xi0.density();

    const EmbeddingTrace trace = embedding_stage(eta0, xi0, field, caps.round_cap);
    report.rounds = trace.rounds;
    report.stage1_embedded = trace.embedded();
    if (!report.stage1_embedded) return report;
    report.max_h0 = trace.h0_prime.max();

    const InstructionField tail = shifted_field(field, trace.h0_prime);
    StabilizeOptions options;
    options.cap = caps.topple_cap;

    Configuration xi = xi0;
    Odometer h1(xi.domain());
    if (!stabilize(xi, h1, tail, nullptr, options).stable()) return report;
    report.max_h1 = h1.max();

    Configuration emb = trace.eta_prime;
    Odometer m_emb(emb.domain());
    if (!stabilize(emb, m_emb, tail, nullptr, options).stable()) return report;

    Configuration direct = eta0;
    Odometer m_direct(direct.domain());
    if (!stabilize(direct, m_direct, field, nullptr, options).stable()) return report;
    report.complete = true;

    // eta0' <= xi0 plus odometer monotonicity gives the first bound; adding
    // the stage-1 odometer gives the bound for the original configuration.
    report.embedded_violations = m_emb.violations_above(h1);
    Odometer budget = trace.h0_prime;
    budget.add(h1);
    report.direct_violations = m_direct.violations_above(budget);
    report.embedded_bound_holds = report.embedded_violations == 0;
    report.direct_bound_holds = report.direct_violations == 0;
    return report;
}

}  // namespace arw
