#pragma once

#include "fusionchain/dhr.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fc {

enum class verdict { pass, fail, unstable, evidence };
std::string verdict_name(verdict v);

struct condition_entry {
    std::string name;
    verdict result = verdict::fail;
    std::map<std::string, double> constants;  // plain keys when stable, "<key>@k<window>" otherwise
    double max_defect = 0;
    std::vector<int> windows;
    std::string note;
};

struct condition_report {
    std::string category;
    int window = 0;
    std::uint64_t seed = 0;
    std::vector<condition_entry> conditions;
    bool all_pass() const;  // evidence counts as pass
};

// Single-window measurements. Each returns its constants and a pass flag.
struct measurement {
    bool ok = false;
    bool evidence_only = false;
    std::map<std::string, double> constants;  // expected to be window-independent
    std::map<std::string, double> data;       // window-dependent sizes
    double defect = 0;
    std::string note;
};

struct haag_point {
    int a = 0, b = 0;
    long commutant_dim = 0, local_dim = 0;
};
struct haag_result {
    std::vector<haag_point> points;
    int K = -1, R = -1;  // R = -1 when some tested commutant is larger than the local algebra
};
haag_result haag_duality(const chain_spec& ch, int max_length = 3, int buffer = -1);

struct covering_result {
    int L = -1;
    std::vector<std::pair<long, long>> tested;  // (generated, full) per configuration
};
covering_result covering_property(const chain_spec& ch, int max_overlap = 3);

struct half_line_centers {
    long minus = 0, plus = 0;          // with buffers
    long minus_raw = 0, plus_raw = 0;  // block counts of the truncations
};
half_line_centers half_line_center_dims(const chain_spec& ch, int buffer = -1);

int strong_generation_length(const chain_spec& ch);  // smallest length whose intervals all contain every simple, -1 if none
bool unique_trace(const chain_spec& ch);             // primitive inclusion matrix on the recurrent support

struct lr_result {
    long relative_commutant = 0, end_dim = 0;
};
lr_result lr_recognition(const chain_spec& ch, const word& Y, int buffer = -1);

struct generation_result {
    long span_dim = 0, full_dim = 0, b0_dim = 0;
    int sectors_used = 0;
};
// B0-bimodule spanned by 1 and the transporters between bases in [lo, lo+L-1] and [hi-L+1, hi].
generation_result charge_transporter_generation(const chain_spec& ch, const std::vector<center_simple>& sectors);

struct alignment_result {
    long b1_dim = 0, f_dim = 0, image_dim = 0;
    double centrality = 0, isometry = 0;  // of a e b -> a Psi b
    bool table_match = false;
    long table_entries = 0;
};
alignment_result local_alignment(const chain_spec& ch, rng_t& rng);
morphism alignment_vector(const chain_spec& ch, const center_object& Zreg);  // Psi

enum class condition { haag, covering, b0_simple, strong_generation, strong_simplicity, lr_recognition,
                       ct_generation, local_alignment, right_index, jones };
std::vector<condition> all_conditions();
std::string condition_name(condition c);
condition parse_condition(const std::string& s);

measurement measure(condition c, const chain_spec& ch, std::uint64_t seed, double tol);

// Runs each condition at k and k + 1 and merges the verdicts; jobs workers share the measurements.
condition_report check_conditions(const chain_spec& ch, const std::vector<condition>& which, std::uint64_t seed = 0,
                                  double tol = 1e-8, int jobs = 1);

}  // namespace fc
