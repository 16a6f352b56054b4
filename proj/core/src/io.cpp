#include "levyruin/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "levyruin/fluctuation.hpp"

namespace levyruin {

std::string config_hash(const nlohmann::json& config) {
    const std::string dump = config.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    out << content;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {
nlohmann::json summary_json(const VariableSummary& s) {
    return {{"n", s.n}, {"mean", s.mean}, {"sd", s.sd}, {"min", s.min}, {"max", s.max}};
}
} // namespace

nlohmann::json ensemble_report_json(const EnsembleReport& rep, const std::string& cfg_hash) {
    return {{"tool_version", kToolVersion},
            {"config_hash", cfg_hash},
            {"u", rep.u},
            {"cutoff", rep.cutoff},
            {"n_attempted", rep.n_attempted},
            {"n_ruined", rep.n_ruined},
            {"event_count", rep.event_count},
            {"bias_bound", rep.bias_bound},
            {"master_seed", rep.master_seed},
            {"workers", rep.workers},
            {"tau", summary_json(rep.tau)},
            {"overshoot", summary_json(rep.overshoot)},
            {"undershoot", summary_json(rep.undershoot)},
            {"max_undershoot", summary_json(rep.max_undershoot)}};
}

nlohmann::json constants_json(const ModelSpec& m, const FluctConstants& fc,
                              const std::vector<double>& phi_hat_points,
                              const std::string& cfg_hash) {
    nlohmann::json phi = nlohmann::json::array();
    LadderExponents lad(m);
    for (double a : phi_hat_points)
        phi.push_back({{"a", a}, {"phi_hat", lad.phi_hat(a)}});
    return {{"tool_version", kToolVersion},
            {"config_hash", cfg_hash},
            {"alpha", fc.alpha},
            {"q", fc.q},
            {"d_H", fc.d_H},
            {"A", fc.A},
            {"B", fc.B},
            {"C", fc.C},
            {"kappa_0_neg_alpha", lad.kappa(0.0, -fc.alpha)},
            {"phi_hat", phi}};
}

nlohmann::json comparison_reports_json(const std::vector<ComparisonReport>& reports,
                                       const std::string& cfg_hash) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json j{{"name", r.name},
                         {"category", r.category},
                         {"u_levels", r.u_levels},
                         {"n", r.n},
                         {"statistic_kind", r.statistic_kind},
                         {"statistic", r.statistic},
                         {"threshold", r.threshold},
                         {"pass", r.pass},
                         {"bias_bound", r.bias_bound},
                         {"seed", r.seed},
                         {"note", r.note}};
        if (r.wasserstein >= 0.0) j["wasserstein1"] = r.wasserstein;
        arr.push_back(j);
    }
    return {{"tool_version", kToolVersion}, {"config_hash", cfg_hash}, {"reports", arr}};
}

std::string comparison_reports_markdown(const std::vector<ComparisonReport>& reports,
                                        const std::string& cfg_hash) {
    std::ostringstream os;
    os << "# Validation report\n\n";
    os << "tool: " << kToolVersion << "  \nconfig: `" << cfg_hash << "`\n\n";
    os << "| check | category | statistic | threshold | pass |\n";
    os << "|---|---|---|---|---|\n";
    for (const auto& r : reports) {
        char stat[40], thr[40];
        std::snprintf(stat, sizeof stat, "%.6g", r.statistic);
        std::snprintf(thr, sizeof thr, "%.6g", r.threshold);
        os << "| " << r.name << " | " << r.category << " | " << stat << " | " << thr << " | "
           << (r.pass ? "yes" : "NO") << " |\n";
    }
    return os.str();
}

void write_mgf_csv(const std::string& path, const MgfEstimate& est) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    out << "t,m,se\n";
    char buf[140];
    for (std::size_t i = 0; i < est.t.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", est.t[i], est.m[i], est.se[i]);
        out << buf;
    }
}

MgfEstimate read_mgf_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,m,se", 0) != 0)
        throw IoError("running-sup artifact " + path + " has an unexpected header");
    MgfEstimate est;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double t, m, se;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &m, &se) != 3)
            throw IoError("running-sup artifact " + path + ": bad row '" + line + "'");
        est.t.push_back(t);
        est.m.push_back(m);
        est.se.push_back(se);
    }
    if (est.t.empty()) throw IoError("running-sup artifact " + path + " is empty");
    return est;
}

} // namespace levyruin
