#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "fts/expansion.hpp"
#include "fts/inference.hpp"
#include "fts/simulate.hpp"

// Serialization: CSV for grid functions, kernels, samples, eigensystems and
// expansion reports; JSON for process specs and max-deviation results.
// Numeric text is written with 17 significant digits so values round-trip.

namespace fts {

std::string format_double(double v);

void write_gridfn_csv(std::ostream& os, const GridFn& f);
GridFn read_gridfn_csv(std::istream& is);

void write_kernel_csv(std::ostream& os, const KernelOp& K);
KernelOp read_kernel_csv(std::istream& is);

nlohmann::json gridfn_to_json(const GridFn& f);
GridFn gridfn_from_json(const nlohmann::json& j);
nlohmann::json kernel_to_json(const KernelOp& K);
KernelOp kernel_from_json(const nlohmann::json& j);

// One curve per row; header line carries the grid size.
void write_sample_csv(std::ostream& os, const SamplePath& sample);
// Reads curves only; the attached spec is a minimal stub carrying the grid.
SamplePath read_sample_csv(std::istream& is);

nlohmann::json spec_to_json(const ProcessSpec& spec);
ProcessSpec spec_from_json(const nlohmann::json& j);

void write_eigensystem_csv(std::ostream& lambdas_os, std::ostream& efuns_os,
                           const EigenSystem& eig);

void write_expansion_csv(std::ostream& os, const ExpansionReport& rep);

nlohmann::json maxdev_to_json(const MaxDevResult& res);

// File-path conveniences (throw validation_error on unopenable paths).
void save_text(const std::string& path, const std::string& content);
std::string load_text(const std::string& path);

}  // namespace fts
