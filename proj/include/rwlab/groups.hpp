#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace rwlab {

enum class family { free, abelian, cyclic, lamplighter };

// Canonical encoding, family specific:
//   free        reduced word, letters +-1..+-k
//   abelian     d coordinates
//   cyclic      one residue in [0,n)
//   lamplighter d cursor coordinates, then lit lamp positions (d ints each, sorted)
using element = std::vector<int32_t>;

struct element_hash {
    size_t operator()(const element& e) const noexcept {
        uint64_t h = 0xcbf29ce484222325ULL ^ e.size();
        for (int32_t v : e) {
            h ^= static_cast<uint32_t>(v);
            h *= 0x100000001b3ULL;
            h ^= h >> 29;
        }
        return static_cast<size_t>(h);
    }
};

struct group_limits {
    long long element_cap = 5'000'000;  // enumeration cap
    int length_radius_cap = 16;         // BFS length oracle radius cap (lamplighter)
};

class length_oracle;

class group {
public:
    static group free(int k);
    static group abelian(int d);
    static group cyclic(int n);
    static group lamplighter(int d);

    family fam() const { return fam_; }
    int rank() const { return param_; }   // k or d
    int order() const { return param_; }  // cyclic only
    bool rd_capable() const { return fam_ != family::lamplighter; }
    bool amenable() const { return fam_ != family::free || param_ == 1; }

    // "free:2", "abelian:1", ...
    std::string spec() const;
    bool operator==(const group& o) const { return fam_ == o.fam_ && param_ == o.param_; }
    bool operator!=(const group& o) const { return !(*this == o); }

    element identity() const;
    bool is_identity(const element& a) const;
    element multiply(const element& a, const element& b) const;
    // a <- a*b
    void right_multiply(element& a, const element& b) const;
    element inverse(const element& a) const;
    long length(const element& a) const;
    void validate(const element& a) const;

    // symmetric standard generating set
    const std::vector<element>& generators() const { return gens_; }

    std::vector<element> sphere(long r) const;
    long long ball_size(long r) const;
    // log |sphere(r)| for free groups, closed form
    double log_sphere_size(long r) const;

    std::string format(const element& a) const;
    element parse(const std::string& text) const;

    // lamplighter accessors
    std::vector<int32_t> cursor(const element& a) const;
    size_t lamp_count(const element& a) const;

    const group_limits& limits() const { return limits_; }
    void set_limits(const group_limits& l) { limits_ = l; }

private:
    group(family f, int p);
    void build_generators();
    void lamp_multiply(const element& a, const element& b, element& out) const;

    family fam_;
    int param_;
    group_limits limits_;
    std::vector<element> gens_;
    std::shared_ptr<length_oracle> oracle_;
};

const char* family_name(family f);

}  // namespace rwlab
