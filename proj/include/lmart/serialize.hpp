#pragma once

// JSON codecs for the martingale/1, gundy/1, weaktype/1 and suite/1 schemas,
// plus the step-function schema with exact "p/q" breakpoints and the CSV
// emitter.  nlohmann::json keeps object keys sorted and prints doubles with
// shortest round-trip formatting, so emitted documents are byte-stable.

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lmart/errors.hpp"
#include "lmart/expectation.hpp"
#include "lmart/gundy.hpp"
#include "lmart/harness.hpp"
#include "lmart/martingale.hpp"
#include "lmart/riemann.hpp"
#include "lmart/riesz.hpp"
#include "lmart/weaktype.hpp"

namespace lmart {

using njson = nlohmann::json;

inline njson to_json(const Element& e) { return njson(e.values); }

inline njson space_to_json(const SpacePtr& sp) {
    require_space(sp);
    return njson{{"weights", sp->weights}};
}

inline njson partition_to_json(const Partition& p) { return njson(p.blocks); }

inline njson filtration_to_json(const Filtration& f) {
    njson parts = njson::array();
    for (const auto& lvl : f.levels) parts.push_back(partition_to_json(lvl));
    return njson{{"partitions", parts}};
}

inline njson mask_to_json(const BandMask& m) {
    njson out = njson::array();
    for (std::size_t i = 0; i < m.size(); ++i) out.push_back(m[i]);
    return out;
}

inline njson stopping_time_to_json(const StoppingTime& tau) {
    njson masks = njson::array();
    for (const auto& m : tau.masks) masks.push_back(mask_to_json(m));
    return njson{{"masks", masks}};
}

inline njson martingale_to_json(const Martingale& f) {
    njson values = njson::array();
    for (const auto& v : f.values) values.push_back(to_json(v));
    return njson{{"schema", "martingale/1"},
                 {"space", space_to_json(f.space())},
                 {"filtration", filtration_to_json(f.filtration)},
                 {"values", values}};
}

namespace detail {

inline const njson& field(const njson& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) fail(errc::parse_error, std::string("missing field '") + key + "'");
    return *it;
}

}  // namespace detail

inline SpacePtr space_from_json(const njson& j) {
    try {
        return make_space(detail::field(j, "weights").get<std::vector<double>>());
    } catch (const njson::exception& e) {
        fail(errc::parse_error, std::string("bad space: ") + e.what());
    }
}

inline Filtration filtration_from_json(const njson& j, const SpacePtr& sp) {
    std::vector<Partition> levels;
    try {
        for (const auto& part : detail::field(j, "partitions"))
            levels.push_back(make_partition(sp, part.get<std::vector<std::vector<int>>>()));
    } catch (const njson::exception& e) {
        fail(errc::parse_error, std::string("bad filtration: ") + e.what());
    }
    return make_filtration(std::move(levels));
}

inline Martingale martingale_from_json(const njson& j) {
    if (detail::field(j, "schema").get<std::string>() != "martingale/1")
        fail(errc::parse_error, "expected schema martingale/1");
    SpacePtr sp = space_from_json(detail::field(j, "space"));
    Filtration filt = filtration_from_json(detail::field(j, "filtration"), sp);
    std::vector<Element> values;
    try {
        for (const auto& row : detail::field(j, "values"))
            values.push_back(make_element(sp, row.get<std::vector<double>>()));
    } catch (const njson::exception& e) {
        fail(errc::parse_error, std::string("bad values: ") + e.what());
    }
    if (values.size() != filt.depth())
        fail(errc::parse_error, "value count must match the filtration depth");
    return Martingale{std::move(filt), std::move(values)};
}

inline njson step_function_to_json(const StepFunction& f) {
    njson cuts = njson::array();
    for (const auto& c : f.partition.cuts) cuts.push_back(rat_to_string(c));
    njson pieces = njson::array();
    for (const auto& p : f.pieces) pieces.push_back(to_json(p));
    return njson{{"schema", "stepfunction/1"},
                 {"space", space_to_json(f.space())},
                 {"a", rat_to_string(f.partition.a())},
                 {"b", rat_to_string(f.partition.b())},
                 {"cuts", cuts},
                 {"pieces", pieces}};
}

inline StepFunction step_function_from_json(const njson& j) {
    if (detail::field(j, "schema").get<std::string>() != "stepfunction/1")
        fail(errc::parse_error, "expected schema stepfunction/1");
    SpacePtr sp = space_from_json(detail::field(j, "space"));
    std::vector<Rat> cuts;
    try {
        for (const auto& c : detail::field(j, "cuts")) cuts.push_back(rat_from_string(c.get<std::string>()));
    } catch (const njson::exception& e) {
        fail(errc::parse_error, std::string("bad cuts: ") + e.what());
    }
    Partition1D part = make_partition1d(std::move(cuts));
    if (rat_from_string(detail::field(j, "a").get<std::string>()) != part.a() ||
        rat_from_string(detail::field(j, "b").get<std::string>()) != part.b())
        fail(errc::parse_error, "interval endpoints disagree with the cuts");
    std::vector<Element> pieces;
    try {
        for (const auto& p : detail::field(j, "pieces"))
            pieces.push_back(make_element(sp, p.get<std::vector<double>>()));
    } catch (const njson::exception& e) {
        fail(errc::parse_error, std::string("bad pieces: ") + e.what());
    }
    return make_step_function(std::move(part), std::move(pieces));
}

inline njson report_to_json(const InequalityReport& rep) {
    njson out = njson::array();
    for (const auto& r : rep.items)
        out.push_back(njson{{"name", r.name}, {"lhs", to_json(r.lhs)}, {"rhs", to_json(r.rhs)},
                            {"ratio", r.ratio}});
    return out;
}

inline njson gundy_to_json(const GundyDecomposition& d) {
    njson out{{"schema", "gundy/1"},
              {"lambda", d.lambda},
              {"path", d.nonnegative_path ? "nonnegative" : "signed"},
              {"space", space_to_json(d.f.space())},
              {"filtration", filtration_to_json(d.f.filtration)},
              {"report", report_to_json(d.diagnostics)},
              {"reconstruction_ok", reconstructs(d, d.f)}};
    auto seq = [](const std::vector<Element>& xs) {
        njson a = njson::array();
        for (const auto& x : xs) a.push_back(to_json(x));
        return a;
    };
    out["f"] = seq(d.f.values);
    out["u"] = seq(d.u.values);
    out["v"] = seq(d.v.values);
    out["w"] = seq(d.w.values);
    if (d.internals) {
        const GundyInternals& in = *d.internals;
        out["r_masks"] = stopping_time_to_json(in.stop_r)["masks"];
        // s_masks and tau_masks carry the time-0 band first: the lookahead
        // driver may already stop before the first increment.
        njson s = njson::array(), tau = njson::array();
        s.push_back(mask_to_json(in.s0));
        for (const auto& m : in.stop_s.masks) s.push_back(mask_to_json(m));
        tau.push_back(mask_to_json(in.tau0));
        for (const auto& m : in.stop_tau.masks) tau.push_back(mask_to_json(m));
        out["s_masks"] = s;
        out["tau_masks"] = tau;
        out["epsilon"] = seq(in.eps);
        out["y"] = seq(in.y);
        out["g"] = seq(in.g);
    }
    if (d.pos_part) out["positive_part"] = gundy_to_json(*d.pos_part);
    if (d.neg_part) out["negative_part"] = gundy_to_json(*d.neg_part);
    return out;
}

inline njson class_a_item_to_json(const ClassAItem& item) {
    njson out{{"constant", item.constant}, {"worst_index", item.worst_index}};
    if (item.worst_index >= 0) {
        out["worst_lhs"] = to_json(item.worst_lhs);
        out["worst_rhs"] = to_json(item.worst_rhs);
    }
    return out;
}

inline njson class_a_to_json(const ClassAReport& rep) {
    return njson{{"op", rep.op_name},
                 {"quasi_linearity", class_a_item_to_json(rep.quasi_linearity)},
                 {"band_domination", class_a_item_to_json(rep.band_domination)},
                 {"l1_increment", class_a_item_to_json(rep.l1_increment)},
                 {"l2", class_a_item_to_json(rep.l2)}};
}

// out_path is deliberately not echoed: the report must not depend on where it
// is written.
inline njson config_to_json(const HarnessConfig& cfg) {
    return njson{{"seed", cfg.seed},          {"omega_size", cfg.omega_size},
                 {"depth", cfg.depth},        {"trials", cfg.trials},
                 {"lambda_grid", cfg.lambda_grid}, {"tol", cfg.tol},
                 {"nonneg_only", cfg.nonneg_only}};
}

inline njson suite_report_to_json(const SuiteReport& rep) {
    njson checks = njson::array();
    for (const auto& c : rep.checks)
        checks.push_back(njson{{"name", c.name},
                               {"trials", c.trials},
                               {"failures", c.failures},
                               {"max_ratio", c.max_ratio},
                               {"worst_seed", c.worst_seed}});
    return njson{{"schema", "suite/1"},
                 {"config", config_to_json(rep.config)},
                 {"checks", checks},
                 {"pass", rep.pass}};
}

struct WeakTypeCsvRow {
    double lambda;
    double ratio;
    int component;
    long trial;
};

inline std::string weaktype_csv(const std::vector<WeakTypeCsvRow>& rows) {
    std::ostringstream out;
    out << "lambda,ratio,component,trial\n";
    for (const auto& r : rows)
        out << njson(r.lambda).dump() << ',' << njson(r.ratio).dump() << ',' << r.component << ','
            << r.trial << '\n';
    return out.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot open '" + path + "' for writing");
    out << content;
    if (!out.good()) fail(errc::io_error, "write to '" + path + "' failed");
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace lmart
