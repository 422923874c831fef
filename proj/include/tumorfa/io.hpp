#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "tumorfa/sampler.hpp"
#include "tumorfa/simgen.hpp"
#include "tumorfa/summary.hpp"
#include "tumorfa/types.hpp"

namespace tumorfa {

namespace fs = std::filesystem;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Long-form TSV with header `snv_id<TAB>sample_id<TAB>n<TAB>N`, one row per
/// (SNV, sample) cell. SNV and sample order follow first appearance. Every
/// cell must be present exactly once.
CountData read_counts(const fs::path& path);
void write_counts(const CountData& data, const fs::path& path);

/// Truth sidecar written next to simulated counts (JSON).
void write_truth(const SimTruth& truth, const fs::path& path);
SimTruth read_truth(const fs::path& path);

/// Writes posterior_C.csv, Z_star.csv, w_star.csv and fit.json into dir.
/// Column h0 of w_star.csv holds w*_t0 * p0*, the background share of
/// variant reads; the remaining columns are the weights themselves.
/// `run_info` is merged into fit.json as-is.
void write_summary(const FitSummary& summary, const CountData& data, const fs::path& dir,
                   const std::string& run_info_json = "{}");
FitSummary read_summary(const fs::path& dir);

/// Per-chain persistence: scalars.csv, states.txt and meta.json.
/// states.txt holds one snapshot per line:
///   iteration <TAB> C <TAB> p0 <TAB> theta (row-major, comma separated)
///   <TAB> Z as run lengths (column-major, '.'-separated, first run is 0s)
void write_trace(const Trace& trace, const fs::path& dir);
Trace read_trace(const fs::path& dir);

std::string encode_z_rle(const BinaryMatrix& Z);
BinaryMatrix decode_z_rle(const std::string& text, std::size_t rows, std::size_t cols);

}  // namespace tumorfa
