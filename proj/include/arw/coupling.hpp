#pragma once

#include <cstdint>
#include <vector>

#include "arw/configuration.hpp"
#include "arw/instruction_field.hpp"
#include "arw/odometer.hpp"
#include "arw/toppling.hpp"

namespace arw {

/// Outcome of stage 1: starting from eta0, every site where the running
/// configuration exceeds xi0 (in the site-state order, so a sleeping
/// particle over an empty site counts) is toppled once per round until no
/// site exceeds.  The final odometer h0' counts the rounds each site was
/// selected.
struct EmbeddingTrace {
    enum class Termination { Embedded, RoundCapExceeded };
    Termination termination = Termination::Embedded;
    std::int64_t rounds = 0;
    std::vector<std::int64_t> round_sizes;  // |A_k| per executed round
    Configuration eta_prime;                // eta0'
    Odometer h0_prime;                      // h0'
    std::uint64_t forced_wakes = 0;         // acceptable-only topplings used

    bool embedded() const { return termination == Termination::Embedded; }
};

enum class RoundOrder { Raster, ReverseRaster };

/// Stage 1 of the two-stage coupling.  Both configurations must live on the
/// same torus; xi0 must be an active configuration.
EmbeddingTrace embedding_stage(const Configuration& eta0, const Configuration& xi0,
                               const InstructionField& field, std::int64_t round_cap,
                               RoundOrder order = RoundOrder::Raster);

struct EmbeddingVerdict {
    enum class Result { Pass, Fail, NotApplicable };
    Result result;
    std::int64_t violations = 0;  // sites with eta0'(x) > xi0(x)
};

/// Pointwise eta0' <= xi0 check; NotApplicable when stage 1 hit its round cap.
EmbeddingVerdict verify_embedding(const EmbeddingTrace& trace, const Configuration& xi0);

struct CouplingCaps {
    std::int64_t round_cap = 100'000;
    std::uint64_t topple_cap = 0;  // 0 = stabilize default
};

/// Stage 1 + stage 2 with the bound checks.  Stage 2 stabilizes xi0 and
/// eta0' under the shifted field and independently stabilizes eta0 under the
/// original field; the report records whether the embedded odometer stays
/// below h1' and the direct odometer below h0' + h1', pointwise.
struct CouplingReport {
    bool stage1_embedded = false;
    bool complete = false;  // all three stabilizations finished within caps
    std::int64_t rounds = 0;
    std::uint64_t max_h0 = 0;
    std::uint64_t max_h1 = 0;
    std::int64_t embedded_violations = 0;  // sites with m_emb > h1'
    std::int64_t direct_violations = 0;    // sites with m_direct > h0' + h1'
    bool embedded_bound_holds = false;
    bool direct_bound_holds = false;
    double density_eta = 0.0;
    double density_xi = 0.0;
};

CouplingReport coupled_stabilize(const Configuration& eta0, const Configuration& xi0,
                                 const InstructionField& field,
                                 const CouplingCaps& caps = {});

}  // namespace arw
