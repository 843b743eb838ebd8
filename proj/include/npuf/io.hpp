#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "npuf/challenge.hpp"
#include "npuf/fuzzy.hpp"
#include "npuf/keygen.hpp"
#include "npuf/metrics.hpp"
#include "npuf/photonics.hpp"
#include "npuf/randtests.hpp"
#include "npuf/readout.hpp"

namespace npuf::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kDeviceSchema = "npuf.device/1";
inline constexpr const char* kChallengeSchema = "npuf.challenge/1";
inline constexpr const char* kCalibrationSchema = "npuf.calibration/1";
inline constexpr const char* kResponseSchema = "npuf.response/1";
inline constexpr const char* kHelperSchema = "npuf.helper/1";
inline constexpr const char* kBatterySchema = "npuf.battery/1";

Json to_json(const NominalConfig& c);
NominalConfig nominal_from_json(const Json& j);
Json to_json(const DetectionConfig& c);
DetectionConfig detection_from_json(const Json& j);
Json to_json(const RidgeConfig& c);
RidgeConfig ridge_from_json(const Json& j);
Json to_json(const NarmaParams& p);
NarmaParams narma_from_json(const Json& j);
Json to_json(const ChallengeConfig& c);
ChallengeConfig challenge_config_from_json(const Json& j);
Json to_json(const PipelineConfig& c);
PipelineConfig pipeline_from_json(const Json& j);

Json to_json(const DeviceProfile& d);
DeviceProfile device_from_json(const Json& j);
Json to_json(const Challenge& c, bool inline_series);
Challenge challenge_from_json(const Json& j, const NarmaParams& params, const ChallengeConfig& cfg);
Json to_json(const CalibrationProfile& p);
CalibrationProfile calibration_from_json(const Json& j);
Json to_json(const HelperData& h);
HelperData helper_from_json(const Json& j);
Json to_json(const nist::BatteryReport& r);
Json to_json(const HammingStats& s);

// Lowercase hex SHA-256 of the compact JSON dump.
std::string config_digest(const Json& j);

Json read_json(const std::string& path);
// Pretty-printed, newline terminated; byte-stable for equal content.
void write_json(const std::string& path, const Json& j);
void write_text(const std::string& path, const std::string& text);

std::string bit_grid_csv(const std::vector<CellResult>& cells);
std::string mrr_count_csv(const std::vector<MrrCountRow>& rows);
std::string ecc_csv(const std::vector<EccSweepRow>& rows);
std::string histogram_csv(const HammingStats& s);

}  // namespace npuf::io
