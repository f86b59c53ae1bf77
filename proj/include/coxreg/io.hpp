#pragma once

#include <span>
#include <string>
#include <vector>

#include "coxreg/empirical.hpp"
#include "coxreg/evaluation.hpp"
#include "coxreg/simulation.hpp"

// File formats.
//
// events.csv      header `replicate_id,t,x1..xp`, one row per arrival; the
//                 covariates repeat on every row of a replicate.
// replicates.csv  header `replicate_id,x1..xp`, one row per replicate; the
//                 only place a zero-arrival replicate appears.
// latent.csv      header `replicate_id,tau,q_1..q_nu`, the simulated truth.
// results.csv     header `generator,mode,n,alpha,replicate,ise_shape,
//                 ise_tau,wall_ms`, one row per experiment replicate.
//
// Doubles are written in shortest round-trip form. Ingestion errors carry
// the file name and 1-based row number.

namespace coxreg {

void write_events_csv(const std::string& path,
                      std::span<const PointProcessSample> samples);
void write_replicates_csv(const std::string& path,
                          std::span<const PointProcessSample> samples);
void write_latent_csv(const std::string& path, const SimulatedDataset& data);

// Reads events plus the optional replicates listing (empty path: the
// replicate set is inferred from the events and zero-arrival replicates are
// invisible). Sample order follows replicates.csv, or first appearance.
std::vector<PointProcessSample> read_events_csv(const std::string& events_path,
                                                const std::string& replicates_path,
                                                double window);

void write_results_csv(const std::string& path, const ExperimentResult& result,
                       Generator generator, FitMode mode);

// Shortest representation that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace coxreg
