#pragma once

#include <json.hpp>
#include <string>

#include "magwell/config.hpp"
#include "magwell/quasimode.hpp"
#include "magwell/spectra.hpp"

namespace magwell {

using Json = nlohmann::ordered_json;

Json to_json(const EigenResult& eig, double h, const std::string& mask);
Json to_json(const AssumptionReport& rep);
Json to_json(const WellSet& ws);
Json to_json(const ClusterReport& rep);
Json to_json(const GapCensus& g);
Json to_json(const SpacingReport& r);
Json to_json(const WeylReport& r);
Json to_json(const AwayReport& r);
Json quasimode_json(const Quasimode& q, double residual, const SpectralHit& hit);

/// header fields stamped into every report file
Json report_header(const RunConfig& cfg);

void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);

/// two-column "(x y)" plot series
void write_xy(const std::string& path, const std::vector<double>& x,
              const std::vector<double>& y);

} // namespace magwell
