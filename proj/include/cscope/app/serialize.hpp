#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cscope/cascade.hpp"
#include "cscope/covers.hpp"
#include "cscope/cutoffs.hpp"
#include "cscope/ensemble.hpp"

namespace cscope {

/// Insertion-ordered JSON, so emitted reports are byte-stable.
using Json = nlohmann::ordered_json;

/// Finite numbers as-is, non-finite values as null.
Json number(double v);

Json to_json(const Cover& cover, bool with_centers = true);
Json to_json(const CoverValidityReport& r);
Json to_json(const CutoffCheckReport& r);
Json to_json(const IntegralAverages& a);
Json to_json(const SweepResult& s);
Json to_json(const DetectorReport& r);
Json to_json(const PropagationReport& r);
Json to_json(const KStarReport& r);
Json to_json(const CoherenceReport& r);
Json to_json(const VorticityDiagnostics& d);
Json to_json(const A2Report& r);
Json to_json(const A3Report& r);
Json to_json(const FluxCurve& f);
Json to_json(const BalanceTerms& b);
Json to_json(const CascadeVerdict& v);
Json to_json(std::span<const LocalityRow> rows);

/// CSV tables; numbers use 17 significant digits.
std::string csv_number(double v);
std::string samples_csv(const std::string& xname, const std::string& yname, std::span<const double> x,
                        std::span<const double> y);
/// Columns R, min, uniform, max, F0.
std::string sweep_csv(const SweepResult& s);
/// Columns R, n, Phi, Psi.
std::string flux_csv(const FluxCurve& f);
std::string balance_csv(std::span<const BalanceTerms> rows, std::span<const double> scales);

}  // namespace cscope
