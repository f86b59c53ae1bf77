#include "coxreg/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "coxreg/errors.hpp"

namespace coxreg {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);  // binary: no \r\n translation
  if (!f) throw DataError("cannot open '" + path + "' for writing");
  return f;
}

void finish(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw DataError("failed writing '" + path + "'");
}

[[noreturn]] void row_error(const std::string& path, std::size_t row,
                            const std::string& what) {
  throw DataError(path + " row " + std::to_string(row) + ": " + what);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(const std::string& s, const std::string& path, std::size_t row) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    row_error(path, row, "cannot parse number '" + s + "'");
  return v;
}

// strips a trailing \r so files written on other platforms still read
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::string covariate_header(int p) {
  std::string h;
  for (int j = 1; j <= p; ++j) h += ",x" + std::to_string(j);
  return h;
}

int parse_covariate_header(const std::vector<std::string>& fields, std::size_t from,
                           const std::string& path) {
  const int p = static_cast<int>(fields.size() - from);
  if (p < 1) row_error(path, 1, "expected at least one covariate column");
  for (int j = 0; j < p; ++j)
    if (fields[from + j] != "x" + std::to_string(j + 1))
      row_error(path, 1, "expected column 'x" + std::to_string(j + 1) + "', got '" +
                             fields[from + j] + "'");
  return p;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_events_csv(const std::string& path,
                      std::span<const PointProcessSample> samples) {
  auto f = open_out(path);
  const int p = samples.empty() ? 1 : static_cast<int>(samples[0].x.size());
  f << "replicate_id,t" << covariate_header(p) << "\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::string xs;
    for (double x : samples[i].x) xs += "," + format_double(x);
    for (double t : samples[i].arrivals)
      f << i << ',' << format_double(t) << xs << "\n";
  }
  finish(f, path);
}

void write_replicates_csv(const std::string& path,
                          std::span<const PointProcessSample> samples) {
  auto f = open_out(path);
  const int p = samples.empty() ? 1 : static_cast<int>(samples[0].x.size());
  f << "replicate_id" << covariate_header(p) << "\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    f << i;
    for (double x : samples[i].x) f << ',' << format_double(x);
    f << "\n";
  }
  finish(f, path);
}

void write_latent_csv(const std::string& path, const SimulatedDataset& data) {
  auto f = open_out(path);
  const int nu = data.latent.empty() ? 0 : data.latent[0].quantile.grid_size();
  f << "replicate_id,tau";
  for (int j = 1; j <= nu; ++j) f << ",q_" << j;
  f << "\n";
  for (std::size_t i = 0; i < data.latent.size(); ++i) {
    f << i << ',' << format_double(data.latent[i].tau);
    for (double q : data.latent[i].quantile.values()) f << ',' << format_double(q);
    f << "\n";
  }
  finish(f, path);
}

std::vector<PointProcessSample> read_events_csv(const std::string& events_path,
                                                const std::string& replicates_path,
                                                double window) {
  if (!(window > 0.0)) throw ConfigError("window must be positive");

  std::ifstream ev(events_path);
  if (!ev) throw DataError("cannot open '" + events_path + "'");
  std::string line;
  if (!next_line(ev, line)) throw DataError(events_path + ": empty file");
  auto fields = split_csv(line);
  if (fields.size() < 2 || fields[0] != "replicate_id" || fields[1] != "t")
    row_error(events_path, 1, "expected header starting 'replicate_id,t'");
  const int p = parse_covariate_header(fields, 2, events_path);

  std::vector<PointProcessSample> samples;
  std::unordered_map<std::string, std::size_t> index;  // id -> slot
  std::vector<std::string> ids;
  bool ids_fixed = false;

  if (!replicates_path.empty()) {
    std::ifstream rep(replicates_path);
    if (!rep) throw DataError("cannot open '" + replicates_path + "'");
    std::string rline;
    if (!next_line(rep, rline)) throw DataError(replicates_path + ": empty file");
    auto rfields = split_csv(rline);
    if (rfields.empty() || rfields[0] != "replicate_id")
      row_error(replicates_path, 1, "expected header starting 'replicate_id'");
    const int rp = parse_covariate_header(rfields, 1, replicates_path);
    if (rp != p)
      throw DataError(replicates_path + ": " + std::to_string(rp) +
                      " covariate columns but events file has " + std::to_string(p));
    std::size_t row = 1;
    while (next_line(rep, rline)) {
      ++row;
      if (rline.empty()) continue;
      auto cells = split_csv(rline);
      if (static_cast<int>(cells.size()) != 1 + p)
        row_error(replicates_path, row, "expected " + std::to_string(1 + p) +
                                            " fields, got " +
                                            std::to_string(cells.size()));
      if (index.count(cells[0]))
        row_error(replicates_path, row, "duplicate replicate_id '" + cells[0] + "'");
      PointProcessSample s;
      s.x.resize(p);
      for (int j = 0; j < p; ++j) {
        s.x[j] = parse_double(cells[1 + j], replicates_path, row);
        if (!std::isfinite(s.x[j]))
          row_error(replicates_path, row, "covariate is not finite");
      }
      index.emplace(cells[0], samples.size());
      ids.push_back(cells[0]);
      samples.push_back(std::move(s));
    }
    ids_fixed = true;
  }

  std::size_t row = 1;
  while (next_line(ev, line)) {
    ++row;
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (static_cast<int>(cells.size()) != 2 + p)
      row_error(events_path, row, "expected " + std::to_string(2 + p) +
                                      " fields, got " + std::to_string(cells.size()));
    const std::string& id = cells[0];
    auto it = index.find(id);
    std::size_t slot;
    if (it == index.end()) {
      if (ids_fixed)
        row_error(events_path, row,
                  "replicate_id '" + id + "' not listed in the replicates file");
      slot = samples.size();
      index.emplace(id, slot);
      ids.push_back(id);
      PointProcessSample s;
      s.x.resize(p);
      for (int j = 0; j < p; ++j) {
        s.x[j] = parse_double(cells[2 + j], events_path, row);
        if (!std::isfinite(s.x[j])) row_error(events_path, row, "covariate not finite");
      }
      samples.push_back(std::move(s));
    } else {
      slot = it->second;
      for (int j = 0; j < p; ++j) {
        const double x = parse_double(cells[2 + j], events_path, row);
        if (x != samples[slot].x[j])
          row_error(events_path, row,
                    "covariates differ from earlier rows of replicate '" + id + "'");
      }
    }
    const double t = parse_double(cells[1], events_path, row);
    if (!(t >= 0.0 && t <= window))
      row_error(events_path, row, "arrival time " + format_double(t) +
                                      " outside the window [0, " +
                                      format_double(window) + "]");
    samples[slot].arrivals.push_back(t);
  }
  return samples;
}

void write_results_csv(const std::string& path, const ExperimentResult& result,
                       Generator generator, FitMode mode) {
  auto f = open_out(path);
  f << "generator,mode,n,alpha,replicate,ise_shape,ise_tau,wall_ms\n";
  for (const auto& r : result.rows) {
    f << generator_name(generator) << ',' << fit_mode_name(mode) << ',' << r.n << ','
      << format_double(r.alpha) << ',' << r.replicate << ','
      << format_double(r.ise_shape) << ',' << format_double(r.ise_tau) << ','
      << format_double(r.wall_ms) << "\n";
  }
  finish(f, path);
}

}  // namespace coxreg
