#pragma once

// Text formats: sweep tables as CSV or JSON, instances as JSON for replay.

#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "rendezvous/core.hpp"
#include "rendezvous/simengine.hpp"
#include "rendezvous/theory.hpp"

namespace rendezvous::io {

using nlohmann::json;

inline constexpr const char* kSweepHeader =
    "setting,algorithm,N,n1,n2,n12,jaccard,experiments,slots,ettr_mean,ettr_ci95,mttr_mean,mttr_max,censored,"
    "theory_ettr";

inline constexpr const char* kTheoryHeader =
    "n1,n2,n12,jaccard,random_ettr,lower_bound,lsh2_limit,lsh3_approx_prob,lsh3_approx_ettr,lsh4_approx_ettr,"
    "t0_bound";

/// Fixed-precision rendering; output must be byte-stable across runs.
inline std::string fmt(double v, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << kSweepHeader << '\n';
    for (const auto& r : result.rows) {
        os << setting_name(r.setting) << ',' << r.algorithm.name() << ',' << r.spec.n_total << ',' << r.spec.n1
           << ',' << r.spec.n2 << ',' << r.spec.n12 << ',' << fmt(r.jaccard) << ',' << r.experiments << ','
           << r.slots << ',' << fmt(r.ettr_mean) << ',' << fmt(r.ettr_ci95) << ',' << fmt(r.mttr_mean) << ','
           << r.mttr_max << ',' << r.censored << ',' << (r.theory_ettr ? fmt(*r.theory_ettr) : std::string{})
           << '\n';
    }
}

inline std::string sweep_csv(const SweepResult& result) {
    std::ostringstream os;
    write_sweep_csv(os, result);
    return os.str();
}

inline json sweep_json(const SweepResult& result) {
    json rows = json::array();
    for (const auto& r : result.rows) {
        rows.push_back({
            {"setting", setting_name(r.setting)},
            {"algorithm", r.algorithm.name()},
            {"layout", layout_name(r.spec.layout)},
            {"N", r.spec.n_total},
            {"n1", r.spec.n1},
            {"n2", r.spec.n2},
            {"n12", r.spec.n12},
            {"jaccard", r.jaccard},
            {"experiments", r.experiments},
            {"slots", r.slots},
            {"ettr_mean", r.ettr_mean},
            {"ettr_ci95", r.ettr_ci95},
            {"mttr_mean", r.mttr_mean},
            {"mttr_max", r.mttr_max},
            {"censored", r.censored},
            {"all_censored_experiments", r.all_censored_experiments},
            {"theory_ettr", r.theory_ettr ? json(*r.theory_ettr) : json(nullptr)},
        });
    }
    return rows;
}

inline void write_theory_row(std::ostream& os, const theory::InstanceProfile& p, std::uint64_t t0, double mix) {
    using namespace theory;
    os << p.n1 << ',' << p.n2 << ',' << p.n12 << ',' << fmt(jaccard(p)) << ',' << fmt(random_ettr(p)) << ','
       << fmt(ettr_lower_bound(p)) << ',' << fmt(lsh2_limit_ettr(p)) << ',' << fmt(lsh3_prob_approx(p), 9) << ','
       << fmt(lsh3_ettr_approx(p)) << ',' << fmt(lsh4_ettr_approx(p, t0, mix)) << ',' << fmt(lsh4_t0_bound(p))
       << '\n';
}

inline json instance_json(const ProblemInstance& inst) {
    return {{"n_total", inst.n_total()}, {"c1", inst.c1().labels()}, {"c2", inst.c2().labels()}};
}

inline ProblemInstance instance_from_json(const json& j) {
    try {
        auto n = j.at("n_total").get<std::uint32_t>();
        return ProblemInstance(ChannelSet(n, j.at("c1").get<std::vector<std::uint32_t>>()),
                               ChannelSet(n, j.at("c2").get<std::vector<std::uint32_t>>()));
    } catch (const json::exception& e) {
        throw InvalidInstance(std::string("malformed instance document: ") + e.what());
    }
}

}  // namespace rendezvous::io
