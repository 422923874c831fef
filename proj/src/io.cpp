#include "tumorfa/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace tumorfa {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && !text.empty();
}

std::string fmt(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

std::string where(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

double parse_double(const std::string& text, const fs::path& path, std::size_t line) {
  double v = 0.0;
  if (!parse_number(text, v)) throw ParseError(where(path, line) + "expected a number, got '" + text + "'");
  return v;
}

long long parse_int(const std::string& text, const fs::path& path, std::size_t line) {
  long long v = 0;
  if (!parse_number(text, v)) throw ParseError(where(path, line) + "expected an integer, got '" + text + "'");
  return v;
}

json matrix_to_json(const RealMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(std::vector<double>(m.row(r), m.row(r) + m.cols()));
  return rows;
}

RealMatrix matrix_from_json(const json& rows) {
  const std::size_t R = rows.size(), C = R ? rows.at(0).size() : 0;
  RealMatrix m(R, C);
  for (std::size_t r = 0; r < R; ++r) {
    if (rows[r].size() != C) throw ParseError("ragged matrix in JSON");
    for (std::size_t c = 0; c < C; ++c) m(r, c) = rows[r][c].get<double>();
  }
  return m;
}

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace

CountData read_counts(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError(where(path, 1) + "empty file");
  strip_cr(line);
  if (line != "snv_id\tsample_id\tn\tN") {
    throw ParseError(where(path, 1) + "expected header 'snv_id<TAB>sample_id<TAB>n<TAB>N'");
  }

  std::map<std::string, std::size_t> snv_index, sample_index;
  std::vector<std::string> snvs, samples;
  struct Cell {
    std::size_t s, t;
    long long n, N;
    std::size_t line;
  };
  std::vector<Cell> cells;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 4) {
      throw ParseError(where(path, lineno) + "expected 4 tab-separated fields, found " + std::to_string(f.size()));
    }
    if (f[0].empty() || f[1].empty()) throw ParseError(where(path, lineno) + "empty identifier");
    const long long n = parse_int(f[2], path, lineno);
    const long long N = parse_int(f[3], path, lineno);
    if (n < 0 || N < 0) throw ParseError(where(path, lineno) + "negative count");
    auto [si, snew] = snv_index.emplace(f[0], snvs.size());
    if (snew) snvs.push_back(f[0]);
    auto [ti, tnew] = sample_index.emplace(f[1], samples.size());
    if (tnew) samples.push_back(f[1]);
    if (n > N) {
      throw std::invalid_argument(where(path, lineno) + "n = " + std::to_string(n) + " exceeds N = " +
                                  std::to_string(N) + " for snv " + f[0] + ", sample " + f[1]);
    }
    cells.push_back({si->second, ti->second, n, N, lineno});
  }
  if (cells.empty()) throw ParseError(path.string() + ": no data rows");

  const std::size_t S = snvs.size(), T = samples.size();
  CountData data{CountMatrix(S, T, -1), CountMatrix(S, T, -1), snvs, samples};
  for (const Cell& c : cells) {
    if (data.n(c.s, c.t) >= 0) {
      throw std::invalid_argument(where(path, c.line) + "duplicate cell for snv " + snvs[c.s] + ", sample " +
                                  samples[c.t]);
    }
    data.n(c.s, c.t) = c.n;
    data.N(c.s, c.t) = c.N;
  }
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t t = 0; t < T; ++t) {
      if (data.n(s, t) < 0) {
        throw std::invalid_argument(path.string() + ": missing cell for snv " + snvs[s] + ", sample " + samples[t]);
      }
    }
  }
  data.validate();
  return data;
}

void write_counts(const CountData& data, const fs::path& path) {
  data.validate();
  auto out = open_out(path);
  out << "snv_id\tsample_id\tn\tN\n";
  for (std::size_t s = 0; s < data.num_snvs(); ++s) {
    for (std::size_t t = 0; t < data.num_samples(); ++t) {
      out << data.snv_ids[s] << '\t' << data.sample_ids[t] << '\t' << data.n(s, t) << '\t' << data.N(s, t) << '\n';
    }
  }
  finish(out, path);
}

void write_truth(const SimTruth& truth, const fs::path& path) {
  truth.validate();
  json j;
  json z = json::array();
  for (std::size_t s = 0; s < truth.Z_true.rows(); ++s) {
    z.push_back(std::vector<int>(truth.Z_true.row(s), truth.Z_true.row(s) + truth.Z_true.cols()));
  }
  j["Z_true"] = z;
  j["w_true"] = matrix_to_json(truth.w_true.w);
  j["p0_true"] = truth.p0_true;
  j["N_fixed"] = truth.N_fixed;
  j["per_snv_noise"] = truth.per_snv_noise ? json(*truth.per_snv_noise) : json(nullptr);
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

SimTruth read_truth(const fs::path& path) {
  const json j = read_json(path);
  SimTruth truth;
  try {
    const auto& z = j.at("Z_true");
    const std::size_t S = z.size(), C = S ? z.at(0).size() : 0;
    truth.Z_true = BinaryMatrix(S, C);
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t c = 0; c < C; ++c) truth.Z_true(s, c) = static_cast<std::uint8_t>(z.at(s).at(c).get<int>());
    truth.w_true.w = matrix_from_json(j.at("w_true"));
    truth.p0_true = j.at("p0_true").get<double>();
    truth.N_fixed = j.at("N_fixed").get<std::int64_t>();
    if (!j.at("per_snv_noise").is_null()) truth.per_snv_noise = j["per_snv_noise"].get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  truth.validate();
  return truth;
}

void write_summary(const FitSummary& summary, const CountData& data, const fs::path& dir,
                   const std::string& run_info_json) {
  if (summary.posterior_C.empty() || summary.C_star < 1) {
    throw SummaryError("refusing to write an empty summary (no retained samples)");
  }
  const auto C = static_cast<std::size_t>(summary.C_star);
  if (summary.Z_star.rows() != data.num_snvs() || summary.Z_star.cols() != C ||
      summary.w_star.w.rows() != data.num_samples() || summary.w_star.w.cols() != C + 1) {
    throw std::invalid_argument("write_summary: summary does not match the data dimensions");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  {
    const auto path = dir / "posterior_C.csv";
    auto out = open_out(path);
    out << "C,probability\n";
    for (const auto& [c, p] : summary.posterior_C) out << c << ',' << fmt(p) << '\n';
    finish(out, path);
  }
  {
    const auto path = dir / "Z_star.csv";
    auto out = open_out(path);
    out << "snv_id";
    for (std::size_t c = 1; c <= C; ++c) out << ",h" << c;
    out << '\n';
    for (std::size_t s = 0; s < data.num_snvs(); ++s) {
      out << data.snv_ids[s];
      for (std::size_t c = 0; c < C; ++c) out << ',' << int{summary.Z_star(s, c)};
      out << '\n';
    }
    finish(out, path);
  }
  {
    const auto path = dir / "w_star.csv";
    auto out = open_out(path);
    out << "sample_id";
    for (std::size_t c = 0; c <= C; ++c) out << ",h" << c;
    out << '\n';
    for (std::size_t t = 0; t < data.num_samples(); ++t) {
      out << data.sample_ids[t] << ',' << fmt(summary.w_star(t, 0) * summary.p0_star);
      for (std::size_t c = 1; c <= C; ++c) out << ',' << fmt(summary.w_star(t, c));
      out << '\n';
    }
    finish(out, path);
  }
  json j = json::parse(run_info_json);
  j["C_star"] = summary.C_star;
  j["p0_star"] = summary.p0_star;
  j["alignment_cost"] = summary.alignment_cost;
  j["samples_at_C_star"] = summary.samples_at_C_star;
  j["background_weight"] = std::vector<double>();
  for (std::size_t t = 0; t < data.num_samples(); ++t) j["background_weight"].push_back(summary.w_star(t, 0));
  json post = json::object();
  for (const auto& [c, p] : summary.posterior_C) post[std::to_string(c)] = p;
  j["posterior_C"] = post;
  const auto path = dir / "fit.json";
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

FitSummary read_summary(const fs::path& dir) {
  FitSummary out;
  const json j = read_json(dir / "fit.json");
  try {
    out.C_star = j.at("C_star").get<int>();
    out.p0_star = j.at("p0_star").get<double>();
    out.alignment_cost = j.at("alignment_cost").get<double>();
    out.samples_at_C_star = j.at("samples_at_C_star").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ParseError((dir / "fit.json").string() + ": " + e.what());
  }
  if (out.C_star < 1) throw ParseError((dir / "fit.json").string() + ": C_star must be positive");
  const auto C = static_cast<std::size_t>(out.C_star);

  auto read_rows = [](const fs::path& path, std::size_t fields) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<std::string>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      strip_cr(line);
      if (line.empty()) continue;
      auto f = split(line, ',');
      if (f.size() != fields) throw ParseError(where(path, lineno) + "expected " + std::to_string(fields) + " fields");
      rows.push_back(std::move(f));
    }
    return rows;
  };

  {
    const auto path = dir / "posterior_C.csv";
    const auto rows = read_rows(path, 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out.posterior_C[static_cast<int>(parse_int(rows[i][0], path, i + 2))] = parse_double(rows[i][1], path, i + 2);
    }
  }
  {
    const auto path = dir / "Z_star.csv";
    const auto rows = read_rows(path, C + 1);
    out.Z_star = BinaryMatrix(rows.size(), C);
    for (std::size_t s = 0; s < rows.size(); ++s) {
      for (std::size_t c = 0; c < C; ++c) {
        const auto v = parse_int(rows[s][c + 1], path, s + 2);
        if (v != 0 && v != 1) throw ParseError(where(path, s + 2) + "Z entries must be 0 or 1");
        out.Z_star(s, c) = static_cast<std::uint8_t>(v);
      }
    }
  }
  {
    const auto path = dir / "w_star.csv";
    const auto rows = read_rows(path, C + 2);
    out.w_star.w = RealMatrix(rows.size(), C + 1);
    for (std::size_t t = 0; t < rows.size(); ++t) {
      out.w_star.w(t, 0) = parse_double(rows[t][1], path, t + 2) / out.p0_star;
      for (std::size_t c = 1; c <= C; ++c) out.w_star.w(t, c) = parse_double(rows[t][c + 1], path, t + 2);
    }
  }
  return out;
}

std::string encode_z_rle(const BinaryMatrix& Z) {
  std::string out;
  std::uint8_t current = 0;
  std::size_t run = 0;
  for (std::size_t c = 0; c < Z.cols(); ++c) {
    for (std::size_t s = 0; s < Z.rows(); ++s) {
      if (Z(s, c) != current) {
        out += std::to_string(run) + '.';
        current ^= 1;
        run = 0;
      }
      ++run;
    }
  }
  out += std::to_string(run);
  return out;
}

BinaryMatrix decode_z_rle(const std::string& text, std::size_t rows, std::size_t cols) {
  BinaryMatrix Z(rows, cols);
  std::size_t pos = 0;
  std::uint8_t current = 0;
  for (const auto& token : split(text, '.')) {
    std::size_t run = 0;
    if (!parse_number(token, run)) throw ParseError("bad run length '" + token + "'");
    if (pos + run > rows * cols) throw ParseError("run lengths exceed the matrix size");
    for (std::size_t k = 0; k < run; ++k, ++pos) Z(pos % rows, pos / rows) = current;
    current ^= 1;
  }
  if (pos != rows * cols) throw ParseError("run lengths do not cover the matrix");
  return Z;
}

void write_trace(const Trace& trace, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  std::size_t S = 0, T = 0;
  if (!trace.states.empty()) {
    S = trace.states.front().num_snvs();
    T = trace.states.front().num_samples();
  }
  json meta;
  meta["seed"] = trace.meta.seed;
  meta["hyperparams_hash"] = trace.meta.hyperparams_hash;
  meta["data_hash"] = trace.meta.data_hash;
  meta["burn_in"] = trace.meta.burn_in;
  meta["thin"] = trace.meta.thin;
  meta["rj_failures"] = trace.meta.rj_failures;
  meta["num_snvs"] = S;
  meta["num_samples"] = T;
  {
    const auto path = dir / "meta.json";
    auto out = open_out(path);
    out << meta.dump(2) << '\n';
    finish(out, path);
  }
  {
    const auto path = dir / "scalars.csv";
    auto out = open_out(path);
    out << "iteration,C,log_joint,test_loglik,p0,row_accept_rate,theta_accept_rate,p0_accepted,"
           "rj_attempted,rj_accepted,rj_proposed_C\n";
    for (const auto& r : trace.scalars) {
      out << r.iteration << ',' << r.C << ',' << fmt(r.log_joint) << ',' << fmt(r.test_loglik) << ',' << fmt(r.p0)
          << ',' << fmt(r.row_accept_rate) << ',' << fmt(r.theta_accept_rate) << ',' << int{r.p0_accepted} << ','
          << int{r.rj_attempted} << ',' << int{r.rj_accepted} << ',' << r.rj_proposed_C << '\n';
    }
    finish(out, path);
  }
  const auto path = dir / "states.txt";
  auto out = open_out(path);
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    const ModelState& st = trace.states[i];
    out << trace.state_iterations[i] << '\t' << st.C << '\t' << fmt(st.p0) << '\t';
    const auto& th = st.theta.raw();
    for (std::size_t k = 0; k < th.size(); ++k) out << (k ? "," : "") << fmt(th[k]);
    out << '\t' << encode_z_rle(st.Z) << '\n';
  }
  finish(out, path);
}

Trace read_trace(const fs::path& dir) {
  Trace trace;
  const json meta = read_json(dir / "meta.json");
  std::size_t S = 0, T = 0;
  try {
    trace.meta.seed = meta.at("seed").get<std::uint64_t>();
    trace.meta.hyperparams_hash = meta.at("hyperparams_hash").get<std::string>();
    trace.meta.data_hash = meta.at("data_hash").get<std::string>();
    trace.meta.burn_in = meta.at("burn_in").get<int>();
    trace.meta.thin = meta.at("thin").get<int>();
    trace.meta.rj_failures = meta.at("rj_failures").get<int>();
    S = meta.at("num_snvs").get<std::size_t>();
    T = meta.at("num_samples").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ParseError((dir / "meta.json").string() + ": " + e.what());
  }

  {
    const auto path = dir / "scalars.csv";
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      strip_cr(line);
      if (line.empty()) continue;
      const auto f = split(line, ',');
      if (f.size() != 11) throw ParseError(where(path, lineno) + "expected 11 fields");
      ScalarRecord r;
      r.iteration = static_cast<int>(parse_int(f[0], path, lineno));
      r.C = static_cast<int>(parse_int(f[1], path, lineno));
      r.log_joint = parse_double(f[2], path, lineno);
      r.test_loglik = parse_double(f[3], path, lineno);
      r.p0 = parse_double(f[4], path, lineno);
      r.row_accept_rate = parse_double(f[5], path, lineno);
      r.theta_accept_rate = parse_double(f[6], path, lineno);
      r.p0_accepted = parse_int(f[7], path, lineno) != 0;
      r.rj_attempted = parse_int(f[8], path, lineno) != 0;
      r.rj_accepted = parse_int(f[9], path, lineno) != 0;
      r.rj_proposed_C = static_cast<int>(parse_int(f[10], path, lineno));
      trace.scalars.push_back(r);
    }
  }

  const auto path = dir / "states.txt";
  auto in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 5) throw ParseError(where(path, lineno) + "expected 5 tab-separated fields");
    ModelState st;
    trace.state_iterations.push_back(static_cast<int>(parse_int(f[0], path, lineno)));
    st.C = static_cast<int>(parse_int(f[1], path, lineno));
    if (st.C < 1) throw ParseError(where(path, lineno) + "C must be positive");
    st.p0 = parse_double(f[2], path, lineno);
    const auto th = split(f[3], ',');
    const auto C = static_cast<std::size_t>(st.C);
    if (th.size() != T * (C + 1)) throw ParseError(where(path, lineno) + "theta has the wrong length");
    st.theta = RealMatrix(T, C + 1);
    for (std::size_t k = 0; k < th.size(); ++k) st.theta.raw()[k] = parse_double(th[k], path, lineno);
    try {
      st.Z = decode_z_rle(f[4], S, C);
    } catch (const ParseError& e) {
      throw ParseError(where(path, lineno) + e.what());
    }
    trace.states.push_back(std::move(st));
  }
  return trace;
}

}  // namespace tumorfa
