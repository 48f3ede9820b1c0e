#include "arw/snapshot.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace arw {

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("snapshot: " + what);
}

}  // namespace

std::string snapshot_dump(const Configuration& config) {
    const Domain& domain = config.domain();
    std::ostringstream out;
    out << "arw " << domain.describe() << '\n';
    const std::int64_t per_line = domain.side(0);
    for (std::int64_t site = 0; site < config.site_count(); ++site) {
        out << config.state(site).token();
        out << (((site + 1) % per_line == 0) ? '\n' : ' ');
    }
    return out.str();
}

Configuration snapshot_parse(const std::string& text) {
    std::istringstream in(text);
    std::string magic, dim_field, sides_field, boundary_field;
    if (!(in >> magic >> dim_field >> sides_field >> boundary_field) || magic != "arw")
        fail("bad header, expected 'arw d=<d> L=<sides> boundary=<b>'");
    if (dim_field.rfind("d=", 0) != 0 || sides_field.rfind("L=", 0) != 0 ||
        boundary_field.rfind("boundary=", 0) != 0)
        fail("bad header fields");
    const int dim = std::stoi(dim_field.substr(2));
    std::vector<std::int32_t> sides;
    std::istringstream side_list(sides_field.substr(2));
    std::string token;
    while (std::getline(side_list, token, ','))
        sides.push_back(static_cast<std::int32_t>(std::stol(token)));
    if (static_cast<int>(sides.size()) != dim)
        fail("header declares " + std::to_string(dim) + " axes but lists " +
             std::to_string(sides.size()) + " side lengths");

    Configuration config(Domain(sides, boundary_from_name(boundary_field.substr(9))));
    for (std::int64_t site = 0; site < config.site_count(); ++site) {
        if (!(in >> token))
            fail("expected " + std::to_string(config.site_count()) +
                 " site tokens, got " + std::to_string(site));
        if (token == "0") continue;
        if (token == "s") {
            config.set_state(site, SiteState::sleeping());
            continue;
        }
        std::size_t used = 0;
        long n = 0;
        try {
            n = std::stol(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size() || n < 1)
            fail("bad site token '" + token + "' at raster index " + std::to_string(site));
        config.set_state(site, SiteState::active(static_cast<std::int32_t>(n)));
    }
    if (in >> token) fail("trailing token '" + token + "' after last site");
    return config;
}

void snapshot_save(const Configuration& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << snapshot_dump(config);
}

Configuration snapshot_load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return snapshot_parse(text.str());
}

}  // namespace arw
