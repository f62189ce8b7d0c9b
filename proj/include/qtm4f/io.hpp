#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "qtm4f/analysis.hpp"
#include "qtm4f/model.hpp"
#include "qtm4f/relaxation.hpp"

namespace qtm4f::io {

// Shortest decimal that round-trips to the same double ('.' separator,
// independent of the global locale). Non-finite values print as nan/inf.
std::string format_double(double v);

// axis,lambda1,lambda2,lambda3,lambda4[,mx,my]
void write_sweep_csv(std::ostream& os, const SweepTable& table);
nlohmann::json sweep_to_json(const SweepTable& table);

// T_K,tau_s,sigma_ln_tau,mode. Only T_K and tau_s are required when
// reading; columns may appear in any order. Throws DomainError with the
// offending line number on malformed input.
void write_dataset_csv(std::ostream& os, const RelaxationDataset& data);
RelaxationDataset read_dataset_csv(std::istream& is, const std::string& source = {});

nlohmann::json eigensystem_to_json(const EigenSystem& es);
nlohmann::json fit_to_json(const FitResult& result);
nlohmann::json model_to_json(const RelaxationModel& model);

}  // namespace qtm4f::io
