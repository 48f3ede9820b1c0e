#include "arw/initial_states.hpp"

#include <cmath>
#include <stdexcept>

#include "arw/rng.hpp"

namespace arw {

namespace {

// Inverse-CDF Poisson sample from one uniform variate.
std::int32_t poisson_inverse(double mean, double u) {
    if (mean <= 0.0) return 0;
    double p = std::exp(-mean);
    double cdf = p;
    std::int32_t k = 0;
    while (u >= cdf && k < 10'000) {
        ++k;
        p *= mean / k;
        cdf += p;
    }
    return k;
}

void add_particles(Configuration& config, std::int64_t site, std::int32_t n) {
    if (n <= 0) return;
    const SiteState current = config.state(site);
    config.set_state(site, SiteState::active(current.particles() + n));
}

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::Poisson: return "poisson";
        case Family::Bernoulli: return "bernoulli";
        case Family::PeriodicPattern: return "periodic";
        case Family::BlockRenewal: return "blockrenewal";
    }
    return "poisson";
}

Family family_from_name(const std::string& name) {
    if (name == "poisson") return Family::Poisson;
    if (name == "bernoulli") return Family::Bernoulli;
    if (name == "periodic") return Family::PeriodicPattern;
    if (name == "blockrenewal") return Family::BlockRenewal;
    throw std::invalid_argument("unknown family '" + name +
                                "' (poisson|bernoulli|periodic|blockrenewal)");
}

std::vector<std::int32_t> synthesize_pattern(double zeta, const Domain& domain) {
    // Balanced occupancies: over one period of length P, site i carries
    // floor((i+1)k/P) - floor(ik/P) of the k = zeta*P particles.
    for (std::int32_t period = 1; period <= domain.side(0); ++period) {
        bool divides = true;
        for (std::int32_t axis = 0; axis < domain.dim(); ++axis)
            if (domain.side(axis) % period != 0) divides = false;
        if (!divides) continue;
        const double exact = zeta * period;
        const double rounded = std::round(exact);
        if (std::abs(exact - rounded) > 1e-9 * std::max(1.0, exact)) continue;
        const std::int64_t k = static_cast<std::int64_t>(rounded);
        std::vector<std::int32_t> pattern(static_cast<std::size_t>(period));
        for (std::int64_t i = 0; i < period; ++i)
            pattern[static_cast<std::size_t>(i)] =
                static_cast<std::int32_t>((i + 1) * k / period - i * k / period);
        return pattern;
    }
    throw std::invalid_argument("no period dividing the domain sides represents density " +
                                std::to_string(zeta) + " exactly");
}

Configuration generate(const InitialStateSpec& spec, const Domain& domain) {
    if (spec.zeta < 0.0) throw std::invalid_argument("density must be nonnegative");
    Configuration config(domain);
    const std::int64_t n_sites = domain.site_count();
    const std::uint64_t key =
        rng::combine(domain.geometry_key(), rng::kPurposeInitialState);

    auto site_uniform = [&](std::int64_t site) {
        return rng::to_unit(
            rng::threefry2x64(static_cast<std::uint64_t>(site), 0, spec.seed, key).x0);
    };
    // One auxiliary stream per spec for translates and block draws.
    rng::CounterStream aux(spec.seed, rng::kPurposeInitialState, key);

    switch (spec.family) {
        case Family::Poisson: {
            for (std::int64_t site = 0; site < n_sites; ++site)
                add_particles(config, site, poisson_inverse(spec.zeta, site_uniform(site)));
            break;
        }
        case Family::Bernoulli: {
            if (spec.zeta > 1.0)
                throw std::invalid_argument("Bernoulli occupancies cannot exceed density 1");
            for (std::int64_t site = 0; site < n_sites; ++site)
                if (site_uniform(site) < spec.zeta) add_particles(config, site, 1);
            break;
        }
        case Family::PeriodicPattern: {
            const std::vector<std::int32_t> pattern =
                spec.pattern.empty() ? synthesize_pattern(spec.zeta, domain) : spec.pattern;
            const auto period = static_cast<std::int64_t>(pattern.size());
            if (period == 0) throw std::invalid_argument("empty pattern");
            for (std::int32_t axis = 0; axis < domain.dim(); ++axis)
                if (domain.side(axis) % period != 0)
                    throw std::invalid_argument(
                        "pattern period " + std::to_string(period) +
                        " does not divide side " + std::to_string(domain.side(axis)));
            std::int64_t sum = 0;
            for (std::int32_t c : pattern) {
                if (c < 0) throw std::invalid_argument("pattern occupancies must be >= 0");
                sum += c;
            }
            if (std::abs(static_cast<double>(sum) / static_cast<double>(period) - spec.zeta) >
                1e-9)
                throw std::invalid_argument("pattern mean does not match the target density");
            // Uniform translate keeps the tiling family translation invariant.
            const std::int64_t translate =
                static_cast<std::int64_t>(aux.next_below(static_cast<std::uint64_t>(period)));
            for (std::int64_t site = 0; site < n_sites; ++site)
                add_particles(config, site,
                              pattern[static_cast<std::size_t>((site + translate) % period)]);
            break;
        }
        case Family::BlockRenewal: {
            // Blocks of length 2m: with probability zeta/ceil(zeta) the first
            // m sites carry 2*ceil(zeta) particles each, else the block is
            // empty; a uniform phase makes the law translation invariant.
            const std::int32_t m = spec.block_half;
            if (m < 1) throw std::invalid_argument("block half-length must be >= 1");
            const std::int64_t block = 2 * static_cast<std::int64_t>(m);
            if (n_sites % block != 0)
                throw std::invalid_argument("block length " + std::to_string(block) +
                                            " does not divide the site count");
            if (spec.zeta > 0.0) {
                const auto level = static_cast<std::int32_t>(std::ceil(spec.zeta - 1e-12));
                const double dense_prob = spec.zeta / level;
                if (dense_prob > 1.0 + 1e-12)
                    throw std::invalid_argument("unreachable block density");
                const std::int64_t phase =
                    static_cast<std::int64_t>(aux.next_below(static_cast<std::uint64_t>(block)));
                const std::int64_t n_blocks = n_sites / block;
                for (std::int64_t b = 0; b < n_blocks; ++b) {
                    if (aux.next_unit() >= dense_prob) continue;
                    for (std::int64_t i = 0; i < m; ++i) {
                        const std::int64_t site = (b * block + phase + i) % n_sites;
                        add_particles(config, site, 2 * level);
                    }
                }
            }
            break;
        }
    }
    return config;
}

double measured_density(const Configuration& config) {
    return config.density();
}

}  // namespace arw
