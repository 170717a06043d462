#include "jsvqa/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "jsvqa/errors.hpp"

namespace jsvqa {

namespace {

constexpr const char* kSchema = "jsvqa-trace-1";
constexpr const char* kColumns =
    "iteration,evaluations,objective,epsilon_exact,pgs_exact,mean_energy_sampled,tau,grad_norm,"
    "wall_ms";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

const char* mode_name(EstimatorMode m) { return m == EstimatorMode::Exact ? "exact" : "sampled"; }
const char* rescale_name(RescaleMode m) { return m == RescaleMode::MinMax ? "minmax" : "max"; }
const char* pattern_name(EntanglerPattern p) {
  return p == EntanglerPattern::Brickwork ? "brickwork" : "chain";
}
const char* a_mode_name(AMatrixMode m) {
  return m == AMatrixMode::Tikhonov ? "tikhonov" : "pinv";
}

}  // namespace

std::string fingerprint_bytes(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fingerprint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InstanceError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return fingerprint_bytes(buf.str());
}

std::string trace_to_csv(const Trace& trace, bool include_wall_times) {
  const RunConfig& c = trace.config;
  std::ostringstream out;
  out << "# schema=" << kSchema << "\n";
  out << "# algorithm=" << algorithm_name(c.algorithm) << "\n";
  out << "# fingerprint=" << trace.fingerprint << "\n";
  out << "# layers=" << c.layers << " shots=" << c.shots << " alpha=" << c.alpha.str()
      << " seed=" << c.seed << " max_iterations=" << c.max_iterations << "\n";
  out << "# eta=" << fmt(c.eta) << " dtau=" << fmt(c.dtau) << " lambda=" << fmt(c.lambda)
      << " gc=" << fmt(c.gc) << " tau_step=" << fmt(c.tau_grid.step)
      << " tau_max=" << fmt(c.tau_grid.max) << "\n";
  out << "# mode=" << mode_name(c.mode) << " rescale=" << rescale_name(c.rescale)
      << " pattern=" << pattern_name(c.pattern) << " a_mode=" << a_mode_name(c.a_mode) << "\n";
  out << "# iteration_unit="
      << (c.algorithm == Algorithm::Vqe || c.algorithm == Algorithm::Qaoa
              ? "objective-evaluation"
              : "parameter-update")
      << "\n";
  out << "# termination=" << trace.termination << "\n";
  out << kColumns << "\n";
  for (const auto& r : trace.records) {
    out << r.iteration << ',' << r.evaluations << ',' << fmt(r.objective) << ','
        << fmt(r.epsilon) << ',' << fmt(r.pgs) << ',' << fmt(r.mean_energy) << ','
        << fmt_opt(r.tau) << ',' << fmt_opt(r.grad_norm) << ','
        << (include_wall_times ? fmt_opt(r.wall_ms) : std::string()) << "\n";
  }
  if (!trace.truncation_error.empty()) out << "# truncated=" << trace.truncation_error << "\n";
  out << "# final_epsilon=" << fmt(trace.final_epsilon)
      << " final_pgs=" << fmt(trace.final_pgs) << "\n";
  out << "# terminal_theta=";
  for (std::size_t i = 0; i < trace.terminal_params.size(); ++i) {
    if (i) out << ',';
    out << fmt(trace.terminal_params[i]);
  }
  out << "\n";
  return out.str();
}

void write_trace_csv(const Trace& trace, const std::string& path, bool include_wall_times) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << trace_to_csv(trace, include_wall_times);
  if (!out) throw std::runtime_error(path + ": write failed");
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(line.substr(start));
      break;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::optional<double> parse_opt(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  return std::stod(cell);
}

// "key=value" pairs on a header comment line.
void parse_header_pairs(const std::string& line, Trace& trace) {
  const auto truncated = line.find("truncated=");
  if (truncated != std::string::npos) {  // message may contain spaces
    trace.truncation_error = line.substr(truncated + 10);
    return;
  }
  std::istringstream in(line);
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    RunConfig& c = trace.config;
    if (key == "algorithm") c.algorithm = parse_algorithm(value);
    else if (key == "fingerprint") trace.fingerprint = value;
    else if (key == "layers") c.layers = std::stoi(value);
    else if (key == "shots") c.shots = std::stoi(value);
    else if (key == "alpha") c.alpha = Quantile::parse(value);
    else if (key == "seed") c.seed = std::stoull(value);
    else if (key == "max_iterations") c.max_iterations = std::stoi(value);
    else if (key == "eta") c.eta = std::stod(value);
    else if (key == "dtau") c.dtau = std::stod(value);
    else if (key == "lambda") c.lambda = std::stod(value);
    else if (key == "gc") c.gc = std::stod(value);
    else if (key == "tau_step") c.tau_grid.step = std::stod(value);
    else if (key == "tau_max") c.tau_grid.max = std::stod(value);
    else if (key == "mode") c.mode = value == "exact" ? EstimatorMode::Exact : EstimatorMode::Sampled;
    else if (key == "rescale") c.rescale = value == "max" ? RescaleMode::MaxOnly : RescaleMode::MinMax;
    else if (key == "pattern")
      c.pattern = value == "chain" ? EntanglerPattern::Chain : EntanglerPattern::Brickwork;
    else if (key == "a_mode")
      c.a_mode = value == "pinv" ? AMatrixMode::PseudoInverse : AMatrixMode::Tikhonov;
    else if (key == "termination") trace.termination = value;
    else if (key == "truncated") trace.truncation_error = value;
    else if (key == "final_epsilon") trace.final_epsilon = std::stod(value);
    else if (key == "final_pgs") trace.final_pgs = std::stod(value);
    else if (key == "terminal_theta") {
      if (!value.empty())
        for (const auto& cell : split(value, ',')) trace.terminal_params.push_back(std::stod(cell));
    }
  }
}

}  // namespace

Trace trace_from_csv(const std::string& text) {
  Trace trace;
  std::istringstream in(text);
  std::string line;
  bool saw_schema = false, saw_columns = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("schema=") != std::string::npos) saw_schema = true;
      parse_header_pairs(line.substr(1), trace);
      continue;
    }
    if (!saw_columns) {
      if (line != kColumns)
        throw std::invalid_argument("trace_from_csv: unexpected column row '" + line + "'");
      saw_columns = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 9)
      throw std::invalid_argument("trace_from_csv: expected 9 cells, got row '" + line + "'");
    IterationRecord r;
    r.iteration = std::stoi(cells[0]);
    r.evaluations = std::stoll(cells[1]);
    r.objective = std::stod(cells[2]);
    r.epsilon = std::stod(cells[3]);
    r.pgs = std::stod(cells[4]);
    r.mean_energy = std::stod(cells[5]);
    r.tau = parse_opt(cells[6]);
    r.grad_norm = parse_opt(cells[7]);
    r.wall_ms = parse_opt(cells[8]);
    trace.records.push_back(r);
  }
  if (!saw_schema) throw std::invalid_argument("trace_from_csv: missing schema header");
  if (!saw_columns) throw std::invalid_argument("trace_from_csv: missing column row");
  return trace;
}

Trace read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return trace_from_csv(buf.str());
}

}  // namespace jsvqa
