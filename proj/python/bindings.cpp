#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "arw/configuration.hpp"
#include "arw/coupling.hpp"
#include "arw/experiments.hpp"
#include "arw/initial_states.hpp"
#include "arw/instruction_field.hpp"
#include "arw/jump_kernel.hpp"
#include "arw/snapshot.hpp"
#include "arw/toppling.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

arw::Domain make_domain(const std::vector<std::int32_t>& sides, const std::string& boundary) {
    return arw::Domain(sides, arw::boundary_from_name(boundary));
}

py::dict report_dict(const arw::StabilizeReport& report) {
    return py::dict("topplings"_a = report.topplings, "dissipated"_a = report.dissipated,
                    "slept"_a = report.slept, "jumps"_a = report.jumps,
                    "stable"_a = report.stable(), "cap"_a = report.cap);
}

py::object instruction_obj(const arw::InstructionField& field, arw::Instruction ins) {
    if (ins.is_sleep()) return py::str("sleep");
    const auto offset = field.offset_of(ins);
    py::tuple t(offset.size());
    for (std::size_t i = 0; i < offset.size(); ++i) t[i] = offset[i];
    return t;
}

arw::InitialStateSpec make_spec(const std::string& family, double zeta, std::uint64_t seed,
                                const std::vector<std::int32_t>& pattern,
                                std::int32_t block_half) {
    arw::InitialStateSpec spec;
    spec.family = arw::family_from_name(family);
    spec.zeta = zeta;
    spec.seed = seed;
    spec.pattern = pattern;
    spec.block_half = block_half;
    return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Activated-random-walk simulation core";

    py::class_<arw::SiteState>(m, "SiteState")
        .def_static("empty", &arw::SiteState::empty)
        .def_static("sleeping", &arw::SiteState::sleeping)
        .def_static("active", &arw::SiteState::active, "n"_a)
        .def_property_readonly("particles", &arw::SiteState::particles)
        .def_property_readonly("active_particles", &arw::SiteState::active_particles)
        .def("incremented", &arw::SiteState::incremented)
        .def("decremented", &arw::SiteState::decremented)
        .def("slept", &arw::SiteState::slept)
        .def("__eq__", [](arw::SiteState a, arw::SiteState b) { return a == b; })
        .def("__lt__", [](arw::SiteState a, arw::SiteState b) { return a < b; })
        .def("__repr__", [](arw::SiteState s) { return "SiteState(" + s.token() + ")"; });

    py::class_<arw::Domain>(m, "Domain")
        .def(py::init(&make_domain), "sides"_a, "boundary"_a = "torus")
        .def_property_readonly("dim", &arw::Domain::dim)
        .def_property_readonly("sides",
                               [](const arw::Domain& d) { return d.sides(); })
        .def_property_readonly("site_count", &arw::Domain::site_count)
        .def_property_readonly(
            "boundary",
            [](const arw::Domain& d) { return arw::boundary_name(d.boundary()); })
        .def("resolve_jump",
             [](const arw::Domain& d, std::int64_t site,
                const std::vector<std::int32_t>& offset) -> py::object {
                 const auto target = d.resolve_jump(site, offset);
                 if (!target) return py::none();
                 return py::int_(*target);
             },
             "site"_a, "offset"_a)
        .def("__repr__", [](const arw::Domain& d) { return "Domain(" + d.describe() + ")"; });

    py::class_<arw::JumpKernel>(m, "JumpKernel")
        .def(py::init([](std::int32_t dim,
                         const std::vector<std::pair<std::vector<std::int32_t>, double>>& table,
                         const std::string& id) {
                 std::vector<arw::JumpKernel::Entry> entries;
                 for (const auto& [offset, prob] : table)
                     entries.push_back({offset, prob});
                 return arw::JumpKernel(id, dim, std::move(entries));
             }),
             "dim"_a, "table"_a, "id"_a = "custom")
        .def_static("nearest_neighbor", &arw::JumpKernel::nearest_neighbor, "dim"_a)
        .def_static("biased_1d", &arw::JumpKernel::biased_1d, "bias"_a)
        .def_property_readonly("id", &arw::JumpKernel::id)
        .def_property_readonly("dim", &arw::JumpKernel::dim)
        .def_static("validate",
                    [](std::int32_t dim,
                       const std::vector<std::pair<std::vector<std::int32_t>, double>>& table)
                        -> py::object {
                        std::vector<arw::JumpKernel::Entry> entries;
                        for (const auto& [offset, prob] : table)
                            entries.push_back({offset, prob});
                        const auto issue = arw::JumpKernel::validate(dim, entries);
                        if (!issue) return py::none();
                        return py::str(*issue);
                    },
                    "dim"_a, "table"_a);

    py::class_<arw::Configuration>(m, "Configuration")
        .def(py::init<arw::Domain>(), "domain"_a)
        .def_property_readonly("domain", &arw::Configuration::domain)
        .def_property_readonly("site_count", &arw::Configuration::site_count)
        .def_property_readonly("particle_total", &arw::Configuration::particle_total)
        .def_property_readonly("active_total", &arw::Configuration::active_total)
        .def_property_readonly("density", &arw::Configuration::density)
        .def("state", &arw::Configuration::state, "site"_a)
        .def("set_state", &arw::Configuration::set_state, "site"_a, "state"_a)
        .def("__eq__", [](const arw::Configuration& a, const arw::Configuration& b) {
            return a == b;
        });

    py::class_<arw::Odometer>(m, "Odometer")
        .def(py::init<const arw::Domain&>(), "domain"_a)
        .def("count", &arw::Odometer::count, "site"_a)
        .def_property_readonly("total", &arw::Odometer::total)
        .def_property_readonly("max", &arw::Odometer::max)
        .def("pointwise_leq", &arw::Odometer::pointwise_leq, "other"_a)
        .def("__eq__",
             [](const arw::Odometer& a, const arw::Odometer& b) { return a == b; });

    py::class_<arw::InstructionField>(m, "InstructionField")
        .def(py::init<std::uint64_t, double, arw::JumpKernel, arw::Domain>(), "seed"_a,
             "lambda_"_a, "kernel"_a, "domain"_a)
        .def_property_readonly("seed", &arw::InstructionField::seed)
        .def_property_readonly("lambda_", &arw::InstructionField::lambda)
        .def_property_readonly("sleep_probability",
                               &arw::InstructionField::sleep_probability)
        .def("instruction_at",
             [](const arw::InstructionField& f, std::int64_t site, std::uint64_t index) {
                 return instruction_obj(f, f.instruction_at(site, index));
             },
             "site"_a, "index"_a)
        .def("shifted", &arw::InstructionField::shifted, "h0"_a);

    m.def("snapshot_dump", &arw::snapshot_dump, "config"_a);
    m.def("snapshot_parse", &arw::snapshot_parse, "text"_a);

    m.def("generate",
          [](const std::string& family, double zeta, std::uint64_t seed,
             const arw::Domain& domain, const std::vector<std::int32_t>& pattern,
             std::int32_t block_half) {
              return arw::generate(make_spec(family, zeta, seed, pattern, block_half),
                                   domain);
          },
          "family"_a, "zeta"_a, "seed"_a, "domain"_a,
          "pattern"_a = std::vector<std::int32_t>{}, "block_half"_a = 4);
    m.def("measured_density", &arw::measured_density, "config"_a);

    m.def("is_legal", &arw::is_legal, "config"_a, "site"_a);
    m.def("is_acceptable", &arw::is_acceptable, "config"_a, "site"_a);
    m.def("topple",
          [](arw::Configuration& config, arw::Odometer& odometer,
             const arw::InstructionField& field, std::int64_t site) -> py::object {
              const auto effect = arw::topple(config, odometer, field, site);
              if (!effect) return py::none();
              const char* kind = effect->kind == arw::ToppleEffect::Kind::Slept
                                     ? "slept"
                                     : effect->kind == arw::ToppleEffect::Kind::Moved
                                           ? "moved"
                                           : "exited";
              return py::dict("site"_a = effect->site, "kind"_a = kind,
                              "target"_a = effect->target,
                              "was_legal"_a = effect->was_legal);
          },
          "config"_a, "odometer"_a, "field"_a, "site"_a);
    m.def("stabilize",
          [](arw::Configuration& config, arw::Odometer& odometer,
             const arw::InstructionField& field, const std::string& scheduler,
             std::uint64_t cap) {
              arw::StabilizeOptions options;
              options.scheduler = arw::scheduler_from_name(scheduler);
              options.cap = cap;
              return report_dict(arw::stabilize(config, odometer, field, nullptr, options));
          },
          "config"_a, "odometer"_a, "field"_a, "scheduler"_a = "fifo", "cap"_a = 0);
    m.def("apply_sequence",
          [](arw::Configuration& config, arw::Odometer& odometer,
             const arw::InstructionField& field, const std::vector<std::int64_t>& alpha) {
              const auto result = arw::apply_sequence(config, odometer, field, alpha);
              return py::dict("acceptable"_a = result.acceptable(),
                              "all_legal"_a = result.all_legal,
                              "steps"_a = result.steps.size(),
                              "abort_index"_a = result.abort_index
                                  ? py::object(py::int_(*result.abort_index))
                                  : py::object(py::none()));
          },
          "config"_a, "odometer"_a, "field"_a, "alpha"_a);

    m.def("coupled_stabilize",
          [](const arw::Configuration& eta0, const arw::Configuration& xi0,
             const arw::InstructionField& field, std::int64_t round_cap) {
              arw::CouplingCaps caps;
              caps.round_cap = round_cap;
              const arw::CouplingReport r = arw::coupled_stabilize(eta0, xi0, field, caps);
              return py::dict("stage1_embedded"_a = r.stage1_embedded,
                              "complete"_a = r.complete, "rounds"_a = r.rounds,
                              "max_h0"_a = r.max_h0, "max_h1"_a = r.max_h1,
                              "embedded_bound_holds"_a = r.embedded_bound_holds,
                              "direct_bound_holds"_a = r.direct_bound_holds,
                              "embedded_violations"_a = r.embedded_violations,
                              "direct_violations"_a = r.direct_violations);
          },
          "eta0"_a, "xi0"_a, "field"_a, "round_cap"_a = 100000);

    m.def("drive",
          [](const arw::Domain& box, double lambda, const arw::JumpKernel& kernel,
             const std::vector<double>& u_grid, int replicas, std::uint64_t seed) {
              const arw::DriveCurve curve =
                  arw::drive(box, lambda, kernel, u_grid, replicas, seed);
              return py::dict("u"_a = curve.u_grid, "zeta_mean"_a = curve.zeta_mean,
                              "zeta_se"_a = curve.zeta_se);
          },
          "box"_a, "lambda_"_a, "kernel"_a, "u_grid"_a, "replicas"_a, "seed"_a);
    m.def("gillespie_run",
          [](arw::Configuration& config, const arw::InstructionField& field,
             double horizon) {
              arw::GillespieOptions options;
              options.time_horizon = horizon;
              const arw::GillespieTrace trace = arw::gillespie_run(config, field, options);
              return py::dict("events"_a = trace.event_count,
                              "final_time"_a = trace.final_time,
                              "stable"_a = trace.reached_stability,
                              "transitions"_a = trace.transitions);
          },
          "config"_a, "field"_a,
          "horizon"_a = std::numeric_limits<double>::infinity());
    m.def("fit_breakpoint",
          [](const std::vector<double>& u, const std::vector<double>& zeta) {
              return arw::fit_breakpoint(u, zeta);
          },
          "u"_a, "zeta"_a);
}
