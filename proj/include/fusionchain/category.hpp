#pragma once

#include "fusionchain/linalg.hpp"

#include <array>
#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fc {

struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct simple_label {
    int id = 0;
    std::string name;
    int dual_id = 0;
};

// One F-matrix F^{abc}_d. Row (e, alpha, beta): alpha on (a b -> e), beta on (e c -> d).
// Column (f, gamma, delta): gamma on (b c -> f), delta on (a f -> d).
struct fblock {
    std::vector<std::array<int, 3>> rows, cols;
    cmat m;
    std::vector<int> row_at, col_at;  // flattened (label, inner, outer) -> position, -1 if absent
};

class category {
public:
    std::string name;
    std::vector<simple_label> labels;
    double tolerance = 1e-9;

    int rank() const { return n_; }
    int dual(int a) const { return labels[a].dual_id; }
    int N(int a, int b, int c) const { return fusion_[(a * n_ + b) * n_ + c]; }
    int max_mult() const { return max_mult_; }
    double dim(int a) const { return dims_[a]; }
    const std::vector<double>& dims() const { return dims_; }
    double total_dim_sq() const;
    int label_of(const std::string& s) const;  // -1 if unknown

    bool admissible(int a, int b, int c, int d) const;
    const fblock& F(int a, int b, int c, int d) const { return F_[idx4(a, b, c, d)]; }
    // Entry with zero for absent indices.
    cplx F(int a, int b, int c, int d, int e, int al, int be, int f, int ga, int de) const;

    std::uint64_t uid() const { return uid_; }

    // Construction: set rules, then blocks, then finalize().
    void set_rules(std::vector<simple_label> lab, std::vector<int> fusion);
    std::vector<std::array<int, 3>> f_rows(int a, int b, int c, int d) const;
    std::vector<std::array<int, 3>> f_cols(int a, int b, int c, int d) const;
    void set_block(int a, int b, int c, int d, cmat m);
    fblock& block_ref(int a, int b, int c, int d) { return F_[idx4(a, b, c, d)]; }
    void finalize();

private:
    int idx4(int a, int b, int c, int d) const { return ((a * n_ + b) * n_ + c) * n_ + d; }
    int n_ = 0;
    int max_mult_ = 1;
    std::vector<int> fusion_;
    std::vector<fblock> F_;
    std::vector<double> dims_;
    std::uint64_t uid_ = 0;
};

struct validation_report {
    double pentagon = 0;
    double unitarity = 0;
    double dimension = 0;
    double unit = 0;  // F blocks with a unit leg must be trivial
    double fusion = 0;
    bool pass = false;
};

category load_category(const std::string& source);  // builtin name or path
category load_category(std::istream& in);
category builtin_category(const std::string& name);
std::vector<std::string> builtin_names();

validation_report validate_category(const category& cat, double tol);
std::vector<double> quantum_dimensions(int n, const std::vector<int>& fusion);

}  // namespace fc
