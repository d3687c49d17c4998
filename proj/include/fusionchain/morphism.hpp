#pragma once

#include "fusionchain/category.hpp"

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace fc {

// A site object is a direct sum of simples; repeats allowed.
using object = std::vector<int>;
using word = std::vector<object>;

word simple_word(const std::vector<int>& labels);
word concat(const word& a, const word& b);
word slice(const word& w, size_t lo, size_t hi);
double object_dim(const category& cat, const object& x);
double word_dim(const category& cat, const word& w);
std::string word_key(const word& w);

// Left-nested fusion tree: leaf[i] picks a summand of site i, lab[i] is the label after
// fusing sites 0..i (lab[0] is the first leaf label), mu[i] the vertex multiplicity.
struct fusion_tree {
    std::vector<int> leaf, lab, mu;
    int root() const { return lab.empty() ? 0 : lab.back(); }
    bool operator==(const fusion_tree&) const = default;
};

class tree_basis {
public:
    word w;
    std::vector<std::vector<fusion_tree>> trees;  // by root

    int dim(int Y) const { return static_cast<int>(trees[Y].size()); }
    int find(int Y, const fusion_tree& t) const;
    void build_index();

private:
    std::vector<std::unordered_map<std::string, int>> index_;
};

std::shared_ptr<const tree_basis> basis_of(const category& cat, const word& w);
std::vector<fusion_tree> fusion_tree_basis(const category& cat, const word& w, int root);

// Bracketing of a word: "x" for a leaf, "(LR)" for a node; "" for the empty word.
std::string left_nested(size_t n);
std::string right_nested(size_t n);
std::string join_brackets(const std::string& l, const std::string& r);

class morphism {
public:
    const category* cat = nullptr;
    word src, tgt;
    std::vector<cmat> blk;  // blk[Y]: target trees x source trees
    std::string src_br, tgt_br;  // empty string on a non-empty word means left-nested

    static morphism zero(const category& cat, const word& src, const word& tgt);
    static morphism identity(const category& cat, const word& w);

    morphism adjoint() const;
    morphism& operator+=(const morphism& o);
    morphism& operator-=(const morphism& o);
    morphism& operator*=(cplx s);
    double max_abs() const;
    double frob() const;
    cplx inner(const morphism& o) const;  // sum of conj(a) b entrywise
    Eigen::Index size() const;
    bool same_space(const morphism& o) const;
};

morphism operator+(morphism a, const morphism& b);
morphism operator-(morphism a, const morphism& b);
morphism operator*(cplx s, morphism a);
double distance(const morphism& a, const morphism& b);

morphism compose(const morphism& f, const morphism& g);  // f after g
morphism operator*(const morphism& f, const morphism& g);
morphism tensor(const morphism& f, const morphism& g);
morphism tensor_id(const morphism& f, const word& right);  // f (x) id
morphism id_tensor(const word& left, const morphism& g);   // id (x) g

// Change of bracketing on source and target.
morphism recouple(const morphism& f, const std::string& new_src_br, const std::string& new_tgt_br);
morphism recouple(const morphism& f, const std::string& new_br);

cplx categorical_trace(const morphism& f);    // normalized, tr(id) = 1
cplx unnormalized_trace(const morphism& f);   // sum_Y d_Y Tr(f_Y)

enum class side { left, right };
morphism partial_trace(const morphism& f, side s, size_t count);  // normalized

// v^Y_k : Y -> word (x) appended, one per tree.
std::vector<std::vector<morphism>> isotypic_isometries(const category& cat, const word& w, const word& appended);

// Inclusion of the unit tree: Hom([e], [e] + W2) ... helpers used by several modules.
morphism tree_vector(const category& cat, const word& w, int Y, int k);  // Hom([{Y}], w), unit vector k

// Product-basis change for the split of w at p: columns (h, mu, t2) of V(e, w[p:], Y).
struct split_entry {
    int T, t1, s;
};
struct split_info {
    std::vector<std::vector<std::vector<split_entry>>> by_root;  // [Y][e] -> entries
};
std::shared_ptr<const split_info> split_of(const category& cat, const word& w, size_t p);

struct prod_col {
    int h, mu, t2;
};
struct ext_map {
    cmat V;  // ext trees x product columns
    std::vector<prod_col> cols;
    std::vector<int> range_start;  // first column for (h, mu), flattened h * max_mult + mu, -1 if none
};
std::shared_ptr<const ext_map> ext_unitary(const category& cat, int e, const word& w2, int Y);

// Blocks stacked column-major, Y ascending.
cvec flatten(const morphism& f);
morphism unflatten(const morphism& shape, const cvec& v);

void clear_caches();

}  // namespace fc
