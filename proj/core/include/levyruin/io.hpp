#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "levyruin/model.hpp"
#include "levyruin/simulate.hpp"
#include "levyruin/validate.hpp"

namespace levyruin {

inline constexpr const char* kToolVersion = "levyruin 0.1.0";

// FNV-1a 64 over the canonical (sorted-key) JSON dump; the replay key that
// every artifact embeds.
std::string config_hash(const nlohmann::json& config);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::string format_double(double x); // %.17g, locale-free

nlohmann::json ensemble_report_json(const EnsembleReport& rep, const std::string& cfg_hash);
nlohmann::json constants_json(const ModelSpec& m, const FluctConstants& fc,
                              const std::vector<double>& phi_hat_points,
                              const std::string& cfg_hash);
nlohmann::json comparison_reports_json(const std::vector<ComparisonReport>& reports,
                                       const std::string& cfg_hash);
std::string comparison_reports_markdown(const std::vector<ComparisonReport>& reports,
                                        const std::string& cfg_hash);

void write_mgf_csv(const std::string& path, const MgfEstimate& est);
MgfEstimate read_mgf_csv(const std::string& path);

} // namespace levyruin
