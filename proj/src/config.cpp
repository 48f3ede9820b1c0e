#include "arw/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace arw {

namespace {

struct RawEntry {
    std::string section;
    std::string key;
    std::string value;
    int line;
    int column;  // of the key
};

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

int levenshtein(const std::string& a, const std::string& b) {
    std::vector<int> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        int diag = row[0];
        row[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const int subst = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
            diag = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, subst});
        }
    }
    return row[b.size()];
}

const std::vector<std::string> kSections = {"run",    "domain", "model",
                                            "init",   "drive",  "scan",
                                            "couple", "gillespie", "estimate",
                                            "engine"};

const std::vector<std::pair<std::string, std::vector<std::string>>> kKeys = {
    {"run", {"kind", "seed", "out"}},
    {"domain", {"dim", "size", "boundary"}},
    {"model", {"lambda", "kernel"}},
    {"init", {"family", "zeta", "pattern", "block_half"}},
    {"drive", {"u_grid", "replicas"}},
    {"scan", {"zeta_grid", "replicas"}},
    {"couple", {"zeta1", "zeta2", "seeds", "round_cap"}},
    {"gillespie", {"zeta", "horizon", "record_events"}},
    {"estimate", {"input"}},
    {"engine", {"scheduler", "cap", "threads"}},
};

const std::vector<std::string>& keys_of(const std::string& section) {
    for (const auto& [name, keys] : kKeys)
        if (name == section) return keys;
    static const std::vector<std::string> none;
    return none;
}

[[noreturn]] void fail(const RawEntry& e, const std::string& message) {
    throw ConfigError(e.line, e.column, message);
}

double parse_double(const RawEntry& e) {
    if (e.value == "inf") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        fail(e, "key '" + e.key + "': '" + e.value + "' is not a number");
    }
}

std::int64_t parse_int(const RawEntry& e) {
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        fail(e, "key '" + e.key + "': '" + e.value + "' is not an integer");
    }
}

std::uint64_t parse_u64(const RawEntry& e) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        fail(e, "key '" + e.key + "': '" + e.value + "' is not a nonnegative integer");
    }
}

bool parse_bool(const RawEntry& e) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    fail(e, "key '" + e.key + "': expected true or false");
}

template <typename T, typename Fn>
std::vector<T> parse_list(const std::string& value, Fn item) {
    std::vector<T> out;
    std::istringstream in(value);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trimmed(tok);
        if (!tok.empty()) out.push_back(item(tok));
    }
    return out;
}

}  // namespace

std::string nearest_match(const std::string& word, const std::vector<std::string>& options) {
    std::string best;
    int best_cost = std::numeric_limits<int>::max();
    for (const auto& option : options) {
        const int cost = levenshtein(word, option);
        if (cost < best_cost) {
            best_cost = cost;
            best = option;
        }
    }
    return best_cost <= std::max<int>(2, static_cast<int>(word.size()) / 2) ? best : "";
}

std::vector<double> parse_grid(const std::string& text) {
    const auto first_colon = text.find(':');
    if (first_colon == std::string::npos) {
        return parse_list<double>(text, [](const std::string& t) { return std::stod(t); });
    }
    const auto second_colon = text.find(':', first_colon + 1);
    if (second_colon == std::string::npos)
        throw std::invalid_argument("grid '" + text + "' must be lo:hi:step or a comma list");
    const double lo = std::stod(text.substr(0, first_colon));
    const double hi = std::stod(text.substr(first_colon + 1, second_colon - first_colon - 1));
    const double step = std::stod(text.substr(second_colon + 1));
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
    std::vector<double> out;
    for (double v = lo; v <= hi + 1e-9 * step; v += step) out.push_back(v);
    return out;
}

RunConfig parse_config(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    std::vector<RawEntry> entries;
    while (std::getline(in, line)) {
        ++lineno;
        std::string body = line;
        if (const auto hash = body.find('#'); hash != std::string::npos) body.erase(hash);
        const std::string t = trimmed(body);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(lineno, 1, "unterminated section header");
            section = trimmed(t.substr(1, t.size() - 2));
            if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
                const std::string hint = nearest_match(section, kSections);
                throw ConfigError(lineno, 1,
                                  "unknown section '" + section + "'" +
                                      (hint.empty() ? "" : "; did you mean '" + hint + "'?"));
            }
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError(lineno, 1, "expected key = value");
        if (section.empty())
            throw ConfigError(lineno, 1, "key outside any [section]");
        const std::string key = trimmed(body.substr(0, eq));
        const int column = static_cast<int>(body.find_first_not_of(" \t")) + 1;
        const auto& known = keys_of(section);
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            const std::string hint = nearest_match(key, known);
            throw ConfigError(lineno, column,
                              "unknown key '" + key + "' in [" + section + "]" +
                                  (hint.empty() ? "" : "; did you mean '" + hint + "'?"));
        }
        entries.push_back({section, key, trimmed(body.substr(eq + 1)), lineno, column});
    }

    RunConfig config;
    bool dim_seen = false;
    std::int64_t dim_value = 0;
    for (const RawEntry& e : entries) {
        const std::string where = e.section + "." + e.key;
        if (where == "run.kind") {
            static const std::vector<std::string> kinds = {"drive",  "scan",     "gillespie",
                                                           "couple", "selftest", "estimate"};
            if (std::find(kinds.begin(), kinds.end(), e.value) == kinds.end()) {
                const std::string hint = nearest_match(e.value, kinds);
                fail(e, "unknown experiment kind '" + e.value + "'" +
                            (hint.empty() ? "" : "; did you mean '" + hint + "'?"));
            }
            config.kind = e.value;
        } else if (where == "run.seed") {
            config.seed = parse_u64(e);
        } else if (where == "run.out") {
            config.out_dir = e.value;
        } else if (where == "domain.dim") {
            dim_value = parse_int(e);
            dim_seen = true;
            if (dim_value < 1 || dim_value > 8) fail(e, "key 'dim' must lie in 1..8");
        } else if (where == "domain.size") {
            try {
                config.sides = parse_list<std::int32_t>(e.value, [](const std::string& t) {
                    return static_cast<std::int32_t>(std::stol(t));
                });
            } catch (const std::exception&) {
                fail(e, "key 'size': expected a comma list of side lengths");
            }
            if (config.sides.empty()) fail(e, "key 'size' must list at least one side");
            for (std::int32_t s : config.sides)
                if (s < 2) fail(e, "key 'size': sides must be >= 2");
        } else if (where == "domain.boundary") {
            try {
                config.boundary = boundary_from_name(e.value);
            } catch (const std::exception& ex) {
                fail(e, ex.what());
            }
        } else if (where == "model.lambda") {
            config.lambda = parse_double(e);
            if (!(config.lambda > 0.0)) fail(e, "key 'lambda' must be positive");
        } else if (where == "model.kernel") {
            config.kernel_spec = e.value;
        } else if (where == "init.family") {
            try {
                config.init.family = family_from_name(e.value);
            } catch (const std::exception& ex) {
                fail(e, ex.what());
            }
        } else if (where == "init.zeta") {
            config.init.zeta = parse_double(e);
            if (config.init.zeta < 0.0) fail(e, "key 'zeta' must be >= 0");
        } else if (where == "init.pattern") {
            config.init.pattern =
                parse_list<std::int32_t>(e.value, [](const std::string& t) {
                    return static_cast<std::int32_t>(std::stol(t));
                });
        } else if (where == "init.block_half") {
            config.init.block_half = static_cast<std::int32_t>(parse_int(e));
            if (config.init.block_half < 1) fail(e, "key 'block_half' must be >= 1");
        } else if (where == "drive.u_grid") {
            try {
                config.u_grid = parse_grid(e.value);
            } catch (const std::exception& ex) {
                fail(e, ex.what());
            }
        } else if (where == "drive.replicas") {
            config.drive_replicas = static_cast<int>(parse_int(e));
            if (config.drive_replicas < 1) fail(e, "key 'replicas' must be >= 1");
        } else if (where == "scan.zeta_grid") {
            try {
                config.zeta_grid = parse_grid(e.value);
            } catch (const std::exception& ex) {
                fail(e, ex.what());
            }
            for (double z : config.zeta_grid)
                if (z < 0.0) fail(e, "key 'zeta_grid' values must be >= 0");
        } else if (where == "scan.replicas") {
            config.scan_replicas = static_cast<int>(parse_int(e));
            if (config.scan_replicas < 1) fail(e, "key 'replicas' must be >= 1");
        } else if (where == "couple.zeta1") {
            config.couple_zeta1 = parse_double(e);
            if (config.couple_zeta1 < 0.0) fail(e, "key 'zeta1' must be >= 0");
        } else if (where == "couple.zeta2") {
            config.couple_zeta2 = parse_double(e);
            if (config.couple_zeta2 < 0.0) fail(e, "key 'zeta2' must be >= 0");
        } else if (where == "couple.seeds") {
            config.couple_seeds = static_cast<int>(parse_int(e));
            if (config.couple_seeds < 1) fail(e, "key 'seeds' must be >= 1");
        } else if (where == "couple.round_cap") {
            config.couple_round_cap = parse_int(e);
            if (config.couple_round_cap < 1) fail(e, "key 'round_cap' must be >= 1");
        } else if (where == "gillespie.zeta") {
            config.gillespie_zeta = parse_double(e);
            if (config.gillespie_zeta < 0.0) fail(e, "key 'zeta' must be >= 0");
        } else if (where == "gillespie.horizon") {
            config.gillespie_horizon = parse_double(e);
            if (!(config.gillespie_horizon > 0.0)) fail(e, "key 'horizon' must be positive");
        } else if (where == "gillespie.record_events") {
            config.gillespie_record_events = parse_bool(e);
        } else if (where == "estimate.input") {
            config.estimate_input = e.value;
        } else if (where == "engine.scheduler") {
            try {
                config.scheduler = scheduler_from_name(e.value);
            } catch (const std::exception& ex) {
                fail(e, ex.what());
            }
        } else if (where == "engine.cap") {
            config.cap = parse_u64(e);
        } else if (where == "engine.threads") {
            config.threads = static_cast<int>(parse_int(e));
            if (config.threads < 0) fail(e, "key 'threads' must be >= 0");
        }
    }
    if (dim_seen && dim_value != static_cast<std::int64_t>(config.sides.size())) {
        if (config.sides.size() == 1) {
            config.sides.assign(static_cast<std::size_t>(dim_value), config.sides[0]);
        } else {
            throw ConfigError(0, 0, "domain.dim disagrees with the number of sides");
        }
    }
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

}  // namespace arw
