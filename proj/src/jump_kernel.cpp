#include "arw/jump_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace arw {

namespace {

constexpr double kProbTolerance = 1e-12;

bool all_zero(const std::vector<std::int32_t>& v) {
    return std::all_of(v.begin(), v.end(), [](std::int32_t c) { return c == 0; });
}

}  // namespace

std::optional<std::int64_t> lattice_index(
    std::int32_t dim, const std::vector<std::vector<std::int32_t>>& vectors) {
    // Column-style integer reduction: bring the generator matrix to a
    // triangular basis with Euclidean steps, then read off |det|.
    const std::size_t d = static_cast<std::size_t>(dim);
    std::vector<std::vector<std::int64_t>> cols;
    for (const auto& v : vectors) {
        cols.emplace_back(v.begin(), v.end());
    }
    std::size_t rank = 0;
    std::int64_t det = 1;
    for (std::size_t row = 0; row < d; ++row) {
        // Euclidean elimination across columns on this row.
        while (true) {
            std::size_t pivot = cols.size();
            for (std::size_t j = rank; j < cols.size(); ++j) {
                if (cols[j][row] == 0) continue;
                if (pivot == cols.size() ||
                    std::llabs(cols[j][row]) < std::llabs(cols[pivot][row]))
                    pivot = j;
            }
            if (pivot == cols.size()) break;  // row is all zero past rank
            std::swap(cols[rank], cols[pivot]);
            bool reduced_all = true;
            for (std::size_t j = rank + 1; j < cols.size(); ++j) {
                if (cols[j][row] == 0) continue;
                const std::int64_t q = cols[j][row] / cols[rank][row];
                for (std::size_t i = 0; i < d; ++i) cols[j][i] -= q * cols[rank][i];
                if (cols[j][row] != 0) reduced_all = false;
            }
            if (reduced_all) break;
        }
        if (rank < cols.size() && cols[rank][row] != 0) {
            det *= cols[rank][row];
            ++rank;
        }
    }
    if (rank < d) return std::nullopt;
    return std::llabs(det);
}

std::optional<std::string> JumpKernel::validate(std::int32_t dim,
                                                const std::vector<Entry>& entries) {
    if (dim < 1) return "kernel dimension must be >= 1";
    if (entries.empty()) return "kernel support is empty";
    double total = 0.0;
    std::vector<std::vector<std::int32_t>> support;
    for (const auto& entry : entries) {
        if (entry.offset.size() != static_cast<std::size_t>(dim))
            return "kernel offset arity does not match dimension";
        if (all_zero(entry.offset)) return "kernel offsets must be nonzero";
        if (!(entry.prob > 0.0)) return "kernel probabilities must be strictly positive";
        total += entry.prob;
        support.push_back(entry.offset);
    }
    if (std::abs(total - 1.0) > kProbTolerance) {
        std::ostringstream out;
        out << "kernel probabilities sum to " << total << ", not 1";
        return out.str();
    }
    const auto index = lattice_index(dim, support);
    if (!index)
        return "kernel support does not span Z^d (rank-deficient sublattice)";
    if (*index != 1) {
        std::ostringstream out;
        out << "kernel support generates a sublattice of index " << *index;
        return out.str();
    }
    return std::nullopt;
}

JumpKernel::JumpKernel(std::string id, std::int32_t dim, std::vector<Entry> entries)
    : id_(std::move(id)), dim_(dim), entries_(std::move(entries)) {
    if (auto issue = validate(dim_, entries_))
        throw std::invalid_argument("kernel '" + id_ + "': " + *issue);
}

JumpKernel JumpKernel::nearest_neighbor(std::int32_t dim) {
    std::vector<Entry> entries;
    const double p = 1.0 / (2.0 * dim);
    for (std::int32_t axis = 0; axis < dim; ++axis) {
        for (std::int32_t sign : {+1, -1}) {
            Entry e;
            e.offset.assign(dim, 0);
            e.offset[axis] = sign;
            e.prob = p;
            entries.push_back(std::move(e));
        }
    }
    return JumpKernel("nn", dim, std::move(entries));
}

JumpKernel JumpKernel::biased_1d(double bias) {
    if (!(bias > 0.0 && bias < 1.0))
        throw std::invalid_argument("bias must lie strictly between 0 and 1");
    std::ostringstream id;
    id << "biased:" << bias;
    return JumpKernel(id.str(), 1, {{{+1}, bias}, {{-1}, 1.0 - bias}});
}

JumpKernel JumpKernel::parse(const std::string& text, std::int32_t dim, std::string id) {
    std::vector<Entry> entries;
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        Entry e;
        std::int32_t c;
        for (std::int32_t axis = 0; axis < dim; ++axis) {
            if (!(fields >> c)) {
                if (axis == 0 && fields.eof()) { e.offset.clear(); break; }
                throw std::invalid_argument("kernel line " + std::to_string(lineno) +
                                            ": expected " + std::to_string(dim) +
                                            " offset coordinates");
            }
            e.offset.push_back(c);
        }
        if (e.offset.empty()) continue;  // blank or comment line
        if (!(fields >> e.prob))
            throw std::invalid_argument("kernel line " + std::to_string(lineno) +
                                        ": expected a probability");
        entries.push_back(std::move(e));
    }
    return JumpKernel(std::move(id), dim, std::move(entries));
}

JumpKernel JumpKernel::from_spec(const std::string& spec, std::int32_t dim) {
    if (spec == "nn") return nearest_neighbor(dim);
    if (spec.rfind("biased:", 0) == 0) {
        if (dim != 1)
            throw std::invalid_argument("builtin biased kernel is one-dimensional");
        return biased_1d(std::stod(spec.substr(7)));
    }
    std::ifstream in(spec);
    if (!in)
        throw std::invalid_argument("kernel spec '" + spec +
                                    "' is neither a builtin (nn, biased:<p>) nor a readable file");
    std::ostringstream text;
    text << in.rdbuf();
    auto stem = spec;
    if (auto slash = stem.find_last_of('/'); slash != std::string::npos)
        stem.erase(0, slash + 1);
    return parse(text.str(), dim, stem);
}

}  // namespace arw
