#include "maxstable/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "maxstable/error.hpp"
#include "maxstable/exact_max_sampler.hpp"
#include "maxstable/oracle.hpp"
#include "maxstable/parallel.hpp"

namespace maxstable::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  const auto slash = s.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } else {
      const std::string num = s.substr(0, slash);
      const std::string den = s.substr(slash + 1);
      std::size_t used_den = 0;
      const double n = std::stod(num, &used);
      const double d = std::stod(den, &used_den);
      if (used == num.size() && used_den == den.size() && d != 0.0) return n / d;
    }
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidArgument, "not a number: '" + s + "'");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt_fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string point_label(const std::vector<double>& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + fmt(p[i]);
  return s + ")";
}

// Rows of named columns, rendered as CSV or a JSON array of objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::vector<double>> numeric;

  void add(std::vector<double> values) {
    std::vector<std::string> row;
    for (double v : values) row.push_back(fmt(v));
    rows.push_back(std::move(row));
    numeric.push_back(std::move(values));
  }

  void write(std::ostream& out, Format format) const {
    if (format == Format::json) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& row : numeric) {
        nlohmann::ordered_json obj;
        for (std::size_t c = 0; c < columns.size(); ++c) obj[columns[c]] = row[c];
        arr.push_back(obj);
      }
      out << arr.dump(2) << '\n';
      return;
    }
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
      out << '\n';
    }
  }
};

std::vector<std::string> coordinate_columns(const std::string& prefix, int d) {
  std::vector<std::string> cols;
  for (int i = 1; i <= d; ++i) cols.push_back(prefix + std::to_string(i));
  return cols;
}

CampaignConfig campaign(const Config& c) {
  CampaignConfig cc;
  cc.budget = c.budget;
  cc.unit = c.unit;
  cc.alpha = c.alpha;
  cc.seed = c.seed;
  cc.threads = c.threads;
  return cc;
}

void require_points(const Config& c, const GaussianDesign& design) {
  if (c.points.empty()) throw Error(ErrorCode::InvalidArgument, "--points is required for this mode");
  for (const auto& p : c.points) {
    if (p.size() != static_cast<std::size_t>(design.dim())) {
      throw Error(ErrorCode::DimensionMismatch, "point " + point_label(p) + " does not match the dimension");
    }
  }
}

std::int64_t sample_count(double budget) {
  if (!(budget >= 1.0) || budget > 1e12) throw Error(ErrorCode::InvalidArgument, "sample count out of range");
  return static_cast<std::int64_t>(budget);
}

void run_sample(const Config& c, const GaussianDesign& design, const SamplerParams& params, std::ostream& out) {
  const std::int64_t n = sample_count(c.budget);
  // Rows are filled by worker; each worker reuses one sample's buffers.
  const std::size_t cols = 6 + static_cast<std::size_t>(design.dim());
  std::vector<double> rows(static_cast<std::size_t>(n) * cols);
  std::vector<ExactSample> ws(static_cast<std::size_t>(std::max(c.threads, 1)));
  parallel_for(static_cast<std::size_t>(n), c.threads, [&](std::size_t worker, std::size_t i) {
    Stream rng(c.seed, i);
    ExactSample& s = ws[worker];
    algorithm_m(design, params, rng, s);
    double* row = rows.data() + i * cols;
    row[0] = static_cast<double>(i);
    row[1] = static_cast<double>(s.n);
    row[2] = static_cast<double>(s.n_walk);
    row[3] = static_cast<double>(s.n_x);
    row[4] = static_cast<double>(s.n_a);
    row[5] = static_cast<double>(s.cost);
    std::copy(s.m.begin(), s.m.end(), row + 6);
  });
  Table t;
  t.columns = {"draw_id", "N", "N_A", "N_X", "N_a", "cost"};
  for (auto& col : coordinate_columns("M_", design.dim())) t.columns.push_back(col);
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    t.add(std::vector<double>(rows.begin() + static_cast<std::ptrdiff_t>(i * cols),
                              rows.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols)));
  }
  t.write(out, c.format);
}

void write_interval_table(std::ostream& out, const std::vector<std::vector<double>>& points,
                          const std::vector<double>& f, const std::vector<double>& lo,
                          const std::vector<double>& hi) {
  out << "Values,est.density,lowerCI,upperCI,RelativeError\n";
  for (std::size_t p = 0; p < points.size(); ++p) {
    const double rel = (hi[p] - lo[p]) / (2.0 * f[p]);
    out << '"' << point_label(points[p]) << "\"," << fmt_fixed(f[p], 4) << ',' << fmt_fixed(lo[p], 4) << ','
        << fmt_fixed(hi[p], 4) << ',' << fmt_fixed(100.0 * rel, 2) << "%\n";
  }
}

void run_estimate(const Config& c, const GaussianDesign& design, const SamplerParams& params, std::ostream& out) {
  require_points(c, design);
  const CampaignResult result = run_budget(c.points, design, params, campaign(c));
  if (c.format == Format::table) {
    std::vector<double> f, lo, hi;
    for (const auto& r : result.reports) {
      f.push_back(r.f_hat);
      lo.push_back(r.ci_lo);
      hi.push_back(r.ci_hi);
    }
    write_interval_table(out, c.points, f, lo, hi);
    return;
  }
  Table t;
  t.columns = coordinate_columns("x_", design.dim());
  for (const char* col : {"f_hat", "s_hat", "ci_lo", "ci_hi", "b", "b_count", "rel_err"}) t.columns.push_back(col);
  for (const auto& r : result.reports) {
    std::vector<double> row = r.point;
    for (double v : {r.f_hat, r.s_hat, r.ci_lo, r.ci_hi, r.b, static_cast<double>(r.b_count)}) row.push_back(v);
    row.push_back(std::round(1e4 * r.rel_err()) / 1e4);
    t.add(std::move(row));
  }
  t.write(out, c.format);
}

void run_kde(const Config& c, const GaussianDesign& design, const SamplerParams& params, std::ostream& out) {
  require_points(c, design);
  const FieldSequence samples = draw_exact_samples(design, params, sample_count(c.budget), c.seed, c.threads);
  const auto reports = kde_reports(samples, c.points, c.alpha);
  if (c.format == Format::table) {
    std::vector<double> f, lo, hi;
    for (const auto& r : reports) {
      f.push_back(r.f_hat);
      lo.push_back(r.ci_lo);
      hi.push_back(r.ci_hi);
    }
    write_interval_table(out, c.points, f, lo, hi);
    return;
  }
  Table t;
  t.columns = coordinate_columns("x_", design.dim());
  for (const char* col : {"f_hat", "ci_lo", "ci_hi", "b", "rel_err"}) t.columns.push_back(col);
  for (const auto& r : reports) {
    std::vector<double> row = r.point;
    for (double v : {r.f_hat, r.ci_lo, r.ci_hi, static_cast<double>(r.b)}) row.push_back(v);
    row.push_back(std::round(1e4 * r.rel_err()) / 1e4);
    t.add(std::move(row));
  }
  t.write(out, c.format);
}

void run_oracle(const Config& c, const GaussianDesign& design, std::ostream& out) {
  require_points(c, design);
  Table t;
  t.columns = coordinate_columns("x_", design.dim());
  for (const char* col : {"cdf", "cdf_se", "density_fd", "density_fd_se"}) t.columns.push_back(col);
  std::vector<std::vector<double>> rows(c.points.size());
  parallel_for(c.points.size(), c.threads, [&](std::size_t, std::size_t p) {
    Stream cdf_rng(c.seed, 2 * p);
    Stream fd_rng(c.seed, 2 * p + 1);
    const OracleEstimate cdf = cdf_mc(c.points[p], design, c.oracle_samples, cdf_rng);
    const OracleEstimate fd = density_fd(c.points[p], design, c.fd_step, c.oracle_samples, fd_rng);
    rows[p] = c.points[p];
    for (double v : {cdf.value, cdf.std_err, fd.value, fd.std_err}) rows[p].push_back(v);
  });
  for (auto& row : rows) t.add(std::move(row));
  t.write(out, c.format);
}

void run_grid(const Config& c, const GaussianDesign& design, const SamplerParams& params, std::ostream& out) {
  const int d = design.dim();
  if (static_cast<int>(c.grid_fixed.size()) != d - 2) {
    throw Error(ErrorCode::DimensionMismatch, "--grid-fixed must give the remaining d-2 coordinates");
  }
  if (c.grid_size < 2) throw Error(ErrorCode::InvalidArgument, "--grid-size must be >= 2");
  std::vector<std::vector<double>> points;
  for (int i = 0; i < c.grid_size; ++i) {
    for (int j = 0; j < c.grid_size; ++j) {
      const double u = static_cast<double>(i) / (c.grid_size - 1);
      const double v = static_cast<double>(j) / (c.grid_size - 1);
      std::vector<double> p = {c.grid_lo1 + u * (c.grid_hi1 - c.grid_lo1), c.grid_lo2 + v * (c.grid_hi2 - c.grid_lo2)};
      p.insert(p.end(), c.grid_fixed.begin(), c.grid_fixed.end());
      points.push_back(std::move(p));
    }
  }
  const CampaignResult result = run_budget(points, design, params, campaign(c));
  Table t;
  t.columns = {"x1", "x2", "f_hat"};
  for (const auto& r : result.reports) t.add({r.point[0], r.point[1], r.f_hat});
  t.write(out, c.format == Format::table ? Format::csv : c.format);
}

bool is_config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveDefinite:
    case ErrorCode::BadGrid:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::ThresholdNonPositive:
    case ErrorCode::NoRoot:
    case ErrorCode::DomainError:
    case ErrorCode::StencilTooLarge:
    case ErrorCode::InvalidArgument:
      return true;
    default:
      return false;
  }
}

}  // namespace

CovarianceSpec parse_covariance(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::InvalidArgument, "covariance must be brownian:... or matrix:PATH");
  const std::string kind = text.substr(0, colon);
  const std::string body = text.substr(colon + 1);
  if (kind == "brownian") return CovarianceSpec::brownian(parse_vector(body));
  if (kind != "matrix") throw Error(ErrorCode::InvalidArgument, "unknown covariance kind '" + kind + "'");
  std::ifstream in(body);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read covariance file '" + body + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    for (char& ch : line) {
      if (ch == ',' || ch == ';') ch = ' ';
    }
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) row.push_back(parse_number(tok));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw Error(ErrorCode::DimensionMismatch, "covariance file is not square");
    for (std::size_t j = 0; j < rows.size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return CovarianceSpec::explicit_matrix(std::move(m));
}

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_number(tok));
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty list");
  return out;
}

std::vector<std::vector<double>> parse_points(const std::string& text) {
  std::vector<std::vector<double>> points;
  if (!text.empty() && text[0] == '@') {
    std::ifstream in(text.substr(1));
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read points file '" + text.substr(1) + "'");
    std::string line;
    while (std::getline(in, line)) {
      if (!trim(line).empty() && trim(line)[0] != '#') points.push_back(parse_vector(line));
    }
  } else {
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
      if (!trim(tok).empty()) points.push_back(parse_vector(tok));
    }
  }
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "no points given");
  return points;
}

std::optional<int> parse(int argc, const char* const* argv, Config& config, std::ostream& out,
                         std::ostream& err) {
  CLI::App app{"Exact sampling of max-stable vectors and unbiased density estimation"};
  std::string cov = "brownian:1/3,2/3,1";
  std::string mu, points, grid_rect, grid_fixed;
  const std::map<std::string, Mode> modes = {{"sample", Mode::sample}, {"estimate", Mode::estimate},
                                             {"kde", Mode::kde},       {"oracle", Mode::oracle},
                                             {"grid", Mode::grid}};
  const std::map<std::string, BudgetUnit> units = {{"draws", BudgetUnit::draws},
                                                   {"elementary", BudgetUnit::elementary}};
  const std::map<std::string, Format> formats = {{"csv", Format::csv}, {"json", Format::json},
                                                 {"table", Format::table}};
  app.add_option("--mode", config.mode, "sample | estimate | kde | oracle | grid")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  app.add_option("--cov", cov, "brownian:t1,t2,... or matrix:PATH");
  app.add_option("--mu", mu, "drift per location, comma separated");
  app.add_option("--points", points, "points 'x1,x2,x3;...' or @FILE");
  app.add_option("--grid-rect", grid_rect, "lo1,hi1,lo2,hi2 for grid mode");
  app.add_option("--grid-size", config.grid_size, "grid points per axis")->check(CLI::Range(2, 1000));
  app.add_option("--grid-fixed", grid_fixed, "remaining coordinates for grid mode");
  app.add_option("--budget", config.budget,
                 "computational budget (estimate, grid) or number of samples (sample, kde)")
      ->check(CLI::PositiveNumber);
  app.add_option("--budget-unit", config.unit, "draws | elementary")
      ->transform(CLI::CheckedTransformer(units, CLI::ignore_case));
  app.add_option("--alpha", config.alpha, "confidence level is 1 - alpha")->check(CLI::Range(1e-12, 1.0 - 1e-12));
  app.add_option("--seed", config.seed, "random seed");
  app.add_option("--a", config.a, "record-threshold slope in (0,1)")->check(CLI::Range(1e-6, 1.0 - 1e-6));
  app.add_option("--gamma", config.gamma, "walk drift in (0,1)")->check(CLI::Range(1e-6, 1.0 - 1e-6));
  app.add_option("--threads", config.threads, "worker threads")->check(CLI::Range(1, 1024));
  app.add_option("--oracle-samples", config.oracle_samples, "Monte Carlo size in oracle mode")
      ->check(CLI::Range(std::int64_t{2}, std::int64_t{1} << 40));
  app.add_option("--fd-step", config.fd_step, "finite-difference step in oracle mode")->check(CLI::PositiveNumber);
  app.add_option("--output", config.output, "output path, '-' for stdout");
  app.add_option("--format", config.format, "csv | json | table")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    config.cov = parse_covariance(cov);
    if (!mu.empty()) config.cov.mu = parse_vector(mu);
    if (!points.empty()) config.points = parse_points(points);
    if (!grid_rect.empty()) {
      const auto r = parse_vector(grid_rect);
      if (r.size() != 4) throw Error(ErrorCode::InvalidArgument, "--grid-rect needs lo1,hi1,lo2,hi2");
      config.grid_lo1 = r[0];
      config.grid_hi1 = r[1];
      config.grid_lo2 = r[2];
      config.grid_hi2 = r[3];
    }
    if (!grid_fixed.empty()) config.grid_fixed = parse_vector(grid_fixed);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return std::nullopt;
}

int run(const Config& config, std::ostream& out, std::ostream& err) {
  try {
    const GaussianDesign design = GaussianDesign::build(config.cov);
    if (config.mode == Mode::oracle) {
      run_oracle(config, design, out);
      return kExitOk;
    }
    const SamplerParams params = SamplerParams::make(design, config.a, config.gamma);
    switch (config.mode) {
      case Mode::sample: run_sample(config, design, params, out); break;
      case Mode::estimate: run_estimate(config, design, params, out); break;
      case Mode::kde: run_kde(config, design, params, out); break;
      case Mode::grid: run_grid(config, design, params, out); break;
      case Mode::oracle: break;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_config_error(e.code()) ? kExitConfig : kExitNumerical;
  }
  return kExitOk;
}

int main(int argc, const char* const* argv) {
  Config config;
  if (auto code = parse(argc, argv, config, std::cout, std::cerr)) return *code;
  if (config.output == "-") return run(config, std::cout, std::cerr);
  std::ofstream file(config.output);
  if (!file) {
    std::cerr << "error: cannot open output '" << config.output << "'\n";
    return kExitConfig;
  }
  return run(config, file, std::cerr);
}

}  // namespace maxstable::cli
