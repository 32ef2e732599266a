#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "spectradiag/association.hpp"
#include "spectradiag/composite.hpp"
#include "spectradiag/null_validation.hpp"
#include "spectradiag/selection.hpp"
#include "spectradiag/synthetic.hpp"
#include "spectradiag/temporal.hpp"
#include "spectradiag/workflow.hpp"

// JSON views of report types. Keys keep declaration order so output is
// stable byte for byte.
namespace spectradiag {

using Json = nlohmann::ordered_json;

Json to_json(const EdReport& r);
Json to_json(const NullSpectrumBand& b);
Json to_json(const AlternativeEstimates& a);
Json to_json(const CorrMatrix& c);
Json to_json(const RedundancyFlags& f);
Json to_json(const ClusterGrouping& g);
Json to_json(const StratifiedCorrelation& s);
Json to_json(const Interval& i);
Json to_json(const Ranking& r);
Json to_json(const CeilingOracle& c);
Json to_json(const FragilityReport& f);
Json to_json(const std::vector<LeaveOneOut>& rows);
Json to_json(const SubsetSearch& s);
Json to_json(const SelectionResult& r);
Json to_json(const CompressionCurve& c);
Json to_json(const SubmodularityProbe& p);
Json to_json(const std::vector<ProspectiveRow>& rows);
Json to_json(const EdSeries& s);
Json to_json(const MannKendall& m);
Json to_json(const SaturationFit& f);
Json to_json(const std::vector<SaturationPoint>& points);
Json to_json(const CohortComparison& c);
Json to_json(const DiversityProbe& d);
Json to_json(const TemporalDensity& t);
Json to_json(const RankRecoveryReport& r);
Json to_json(const WorkflowReport& r);

}  // namespace spectradiag
