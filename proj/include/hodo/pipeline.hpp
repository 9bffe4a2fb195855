#pragma once

#include "hodo/config.hpp"
#include "hodo/report.hpp"
#include "hodo/theorem12.hpp"

namespace hodo {

// Builds the Cauchy data encoded in a scenario config.
CauchyData<double> data_from_config(const ScenarioConfig& cfg);

// End-to-end run: data -> construction -> reconstruction -> verification.
// Sub-operation failures are recorded as failed checks; the report always
// comes back (the CLI maps all_pass to the exit code).
ReportDocument run_pipeline(const ScenarioConfig& cfg);

// Translation-diffeomorphism property checks (the finite-dimensional shadow
// of the infinitesimal-translation argument); appended to a report.
void diffeo_check_section(ReportDocument& doc, const Vec& a, int n, double tol);

}  // namespace hodo
