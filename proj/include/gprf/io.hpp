#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gprf/blocks.hpp"
#include "gprf/common.hpp"
#include "gprf/datagen.hpp"
#include "gprf/mapfit.hpp"
#include "gprf/rng.hpp"

namespace gprf {

// All numeric output uses %.17g so doubles round-trip exactly and repeated
// runs produce byte-identical files.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

// ---------------------------------------------------------------------------
// key=value files (configs and dataset sidecars)

struct KeyValueFile {
  std::vector<std::pair<std::string, std::string>> entries;
  std::filesystem::path dir;  // for resolving relative paths

  bool has(const std::string& key) const {
    for (const auto& [k, v] : entries)
      if (k == key) return true;
    return false;
  }
  std::string get(const std::string& key, const std::string& fallback = "") const {
    for (const auto& [k, v] : entries)
      if (k == key) return v;
    return fallback;
  }
  std::string require(const std::string& key) const {
    if (!has(key)) throw ValidationError("config: missing required key '" + key + "'");
    return get(key);
  }
  double get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    try {
      return std::stod(get(key));
    } catch (...) {
      throw ValidationError("config: key '" + key + "' is not a number");
    }
  }
  long long get_int(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    try {
      return std::stoll(get(key));
    } catch (...) {
      throw ValidationError("config: key '" + key + "' is not an integer");
    }
  }
  unsigned long long get_u64(const std::string& key, unsigned long long fallback) const {
    if (!has(key)) return fallback;
    try {
      return std::stoull(get(key));
    } catch (...) {
      throw ValidationError("config: key '" + key + "' is not an unsigned integer");
    }
  }
  bool get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError("config: key '" + key + "' is not a boolean");
  }
  std::filesystem::path resolve(const std::string& relative) const {
    std::filesystem::path p(relative);
    return p.is_absolute() ? p : dir / p;
  }
  void reject_unknown(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : entries)
      if (!allowed.count(k))
        throw ValidationError("config: unknown key '" + k + "'");
  }
};

inline KeyValueFile parse_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  KeyValueFile kv;
  kv.dir = path.has_parent_path() ? path.parent_path() : ".";
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError("malformed line (expected key=value): " + t);
    const std::string key = trim(t.substr(0, eq));
    if (kv.has(key)) throw ValidationError("duplicate key '" + key + "'");
    kv.entries.emplace_back(key, trim(t.substr(eq + 1)));
  }
  return kv;
}

// ---------------------------------------------------------------------------
// dataset CSV + metadata sidecar

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  p.replace_extension(".meta");
  return p;
}

inline void write_dataset(const std::filesystem::path& csv_path,
                          const Dataset& data) {
  const Index n = data.X_true.rows();
  const Index d = data.X_true.cols();
  const Index D = data.Y.cols();
  std::ofstream out(csv_path);
  if (!out) throw ValidationError("cannot write " + csv_path.string());
  for (Index c = 0; c < d; ++c) out << "x" << (c + 1) << ",";
  for (Index c = 0; c < d; ++c) out << "xobs" << (c + 1) << ",";
  for (Index j = 0; j < D; ++j) out << "y" << (j + 1) << (j + 1 < D ? "," : "\n");
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < d; ++c) out << format_double(data.X_true(i, c)) << ",";
    for (Index c = 0; c < d; ++c) out << format_double(data.X_obs(i, c)) << ",";
    for (Index j = 0; j < D; ++j)
      out << format_double(data.Y(i, j)) << (j + 1 < D ? "," : "\n");
  }

  const auto& hp = data.spec.kernel.hyperparams;
  std::ofstream meta(sidecar_path(csv_path));
  meta << "n=" << n << "\n"
       << "d=" << d << "\n"
       << "D=" << D << "\n"
       << "generator=" << data.generator << "\n"
       << "rng=" << kGeneratorId << "\n"
       << "seed=" << data.spec.seed << "\n"
       << "kernel=" << kernel_family_name(data.spec.kernel.family) << "\n"
       << "sigma_f2=" << format_double(hp.signal_variance) << "\n";
  meta << "lengthscales=";
  for (size_t i = 0; i < hp.lengthscales.size(); ++i)
    meta << (i ? "," : "") << format_double(hp.lengthscales[i]);
  meta << "\n";
  meta << "sigma_n2=" << format_double(hp.noise_variance) << "\n"
       << "jitter=" << format_double(data.spec.kernel.jitter) << "\n";
  meta << "coord_groups=";
  for (Index c = 0; c < d; ++c)
    meta << (c ? "," : "") << data.spec.kernel.group_of(static_cast<int>(c));
  meta << "\n";
  meta << "sigma_obs=" << format_double(data.spec.sigma_obs) << "\n";
}

inline KernelFamily kernel_family_from_name(const std::string& name) {
  if (name == "se_half") return KernelFamily::SquaredExponentialHalf;
  if (name == "se_plain") return KernelFamily::SquaredExponentialPlain;
  if (name == "matern32") return KernelFamily::Matern32;
  if (name == "ou") return KernelFamily::OrnsteinUhlenbeck;
  throw ValidationError("unknown kernel family: " + name);
}

inline Dataset read_dataset(const std::filesystem::path& csv_path) {
  const KeyValueFile meta = parse_key_value_file(sidecar_path(csv_path));
  const Index n = static_cast<Index>(meta.get_int("n", 0));
  const Index d = static_cast<Index>(meta.get_int("d", 0));
  const Index D = static_cast<Index>(meta.get_int("D", 0));
  if (n < 1 || d < 1 || D < 1)
    throw ValidationError("dataset sidecar: bad n/d/D in " + sidecar_path(csv_path).string());

  Dataset data;
  data.generator = meta.get("generator", "unknown");
  data.spec.n = static_cast<int>(n);
  data.spec.d = static_cast<int>(d);
  data.spec.num_outputs = static_cast<int>(D);
  data.spec.seed = meta.get_u64("seed", 0);
  data.spec.sigma_obs = meta.get_double("sigma_obs", 0.0);

  KernelSpec kernel;
  kernel.family = kernel_family_from_name(meta.get("kernel", "se_plain"));
  kernel.hyperparams.signal_variance = meta.get_double("sigma_f2", 1.0);
  kernel.hyperparams.noise_variance = meta.get_double("sigma_n2", 0.0);
  kernel.hyperparams.lengthscales.clear();
  for (const auto& tok : split(meta.get("lengthscales", "1"), ','))
    kernel.hyperparams.lengthscales.push_back(std::stod(tok));
  kernel.jitter = meta.get_double("jitter", 1e-8 * kernel.hyperparams.signal_variance);
  if (meta.has("coord_groups")) {
    for (const auto& tok : split(meta.get("coord_groups", ""), ','))
      kernel.coord_groups.push_back(std::stoi(tok));
    bool all_zero = true;
    for (int g : kernel.coord_groups) all_zero = all_zero && g == 0;
    if (all_zero && kernel.hyperparams.lengthscales.size() == 1)
      kernel.coord_groups.clear();
  }
  data.spec.kernel = kernel;

  std::ifstream in(csv_path);
  if (!in) throw ValidationError("cannot open dataset: " + csv_path.string());
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("dataset CSV is empty: " + csv_path.string());
  data.X_true.resize(n, d);
  data.X_obs.resize(n, d);
  data.Y.resize(n, D);
  for (Index i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw ValidationError("dataset CSV has fewer rows than its sidecar claims");
    const auto cells = split(line, ',');
    if (static_cast<Index>(cells.size()) != 2 * d + D)
      throw ValidationError("dataset CSV row has wrong column count");
    Index k = 0;
    for (Index c = 0; c < d; ++c) data.X_true(i, c) = std::stod(cells[k++]);
    for (Index c = 0; c < d; ++c) data.X_obs(i, c) = std::stod(cells[k++]);
    for (Index j = 0; j < D; ++j) data.Y(i, j) = std::stod(cells[k++]);
  }
  return data;
}

// ---------------------------------------------------------------------------
// matrices, partitions, edge sets, trajectories

inline void write_matrix_csv(const std::filesystem::path& path, const Matrix& A,
                             const std::string& col_prefix = "x") {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (Index c = 0; c < A.cols(); ++c)
    out << col_prefix << (c + 1) << (c + 1 < A.cols() ? "," : "\n");
  for (Index i = 0; i < A.rows(); ++i)
    for (Index c = 0; c < A.cols(); ++c)
      out << format_double(A(i, c)) << (c + 1 < A.cols() ? "," : "\n");
}

inline Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty CSV: " + path.string());
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && rows.back().size() != row.size())
      throw ValidationError("ragged CSV: " + path.string());
    rows.push_back(std::move(row));
  }
  Matrix A(static_cast<Index>(rows.size()),
           rows.empty() ? 0 : static_cast<Index>(rows[0].size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t c = 0; c < rows[i].size(); ++c)
      A(static_cast<Index>(i), static_cast<Index>(c)) = rows[i][c];
  return A;
}

inline void write_partition_csv(const std::filesystem::path& path,
                                const Partition& partition) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "point_index,block_id\n";
  for (size_t i = 0; i < partition.assignment.size(); ++i)
    out << i << "," << partition.assignment[i] << "\n";
}

inline Partition read_partition_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::pair<int, int>> pairs;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 2) throw ValidationError("bad partition CSV row: " + line);
    pairs.emplace_back(std::stoi(cells[0]), std::stoi(cells[1]));
  }
  std::vector<int> assignment(pairs.size(), -1);
  for (const auto& [i, b] : pairs) {
    if (i < 0 || i >= static_cast<int>(assignment.size()))
      throw ValidationError("partition CSV: point index out of range");
    assignment[static_cast<size_t>(i)] = b;
  }
  return make_explicit_partition(std::move(assignment));
}

inline void write_edges_csv(const std::filesystem::path& path,
                            const EdgeSet& edges) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "block_i,block_j\n";
  for (const auto& [i, j] : edges.edges) out << i << "," << j << "\n";
}

inline EdgeSet read_edges_csv(const std::filesystem::path& path, int num_blocks) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::pair<int, int>> edges;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 2) throw ValidationError("bad edge CSV row: " + line);
    edges.emplace_back(std::stoi(cells[0]), std::stoi(cells[1]));
  }
  return make_edge_set(num_blocks, std::move(edges));
}

inline void write_trajectory_csv(const std::filesystem::path& path,
                                 const Trajectory& trajectory) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "step,wall_time_s,objective,grad_norm,mean_location_error\n";
  for (const auto& r : trajectory.records)
    out << r.step << "," << format_double(r.wall_time_s) << ","
        << format_double(r.objective) << "," << format_double(r.grad_norm) << ","
        << format_double(r.mean_location_error) << "\n";
}

}  // namespace gprf
