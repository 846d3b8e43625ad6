#include "rwlab/groups.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "rwlab/errors.hpp"

namespace rwlab {

const char* family_name(family f) {
    switch (f) {
        case family::free: return "free";
        case family::abelian: return "abelian";
        case family::cyclic: return "cyclic";
        case family::lamplighter: return "lamplighter";
    }
    return "?";
}

// Breadth-first length oracle, grown lazily and shared by copies of the group.
class length_oracle {
public:
    long length(const group& g, const element& a) {
        std::lock_guard<std::mutex> lock(mu_);
        if (dist_.empty()) {
            element e = g.identity();
            dist_.emplace(e, 0);
            frontier_.push_back(e);
        }
        for (;;) {
            auto it = dist_.find(a);
            if (it != dist_.end()) return it->second;
            if (radius_ >= g.limits().length_radius_cap)
                throw resource_error("lamplighter length oracle: element " + g.format(a) +
                                     " lies beyond radius cap " +
                                     std::to_string(g.limits().length_radius_cap));
            grow(g);
        }
    }

    // all elements of the sphere of radius r
    std::vector<element> layer(const group& g, long r) {
        std::lock_guard<std::mutex> lock(mu_);
        if (dist_.empty()) {
            element e = g.identity();
            dist_.emplace(e, 0);
            frontier_.push_back(e);
        }
        while (radius_ < r) grow(g);
        if (r == radius_) return frontier_;
        std::vector<element> out;
        for (auto& [e, d] : dist_)
            if (d == r) out.push_back(e);
        std::sort(out.begin(), out.end());
        return out;
    }

    long long ball(const group& g, long r) {
        std::lock_guard<std::mutex> lock(mu_);
        if (dist_.empty()) {
            element e = g.identity();
            dist_.emplace(e, 0);
            frontier_.push_back(e);
        }
        while (radius_ < r) grow(g);
        long long n = 0;
        for (auto& kv : dist_)
            if (kv.second <= r) ++n;
        return n;
    }

private:
    void grow(const group& g) {
        std::vector<element> next;
        for (const auto& x : frontier_) {
            for (const auto& s : g.generators()) {
                element y = g.multiply(x, s);
                if (dist_.emplace(y, static_cast<int>(radius_ + 1)).second) next.push_back(std::move(y));
            }
            if (static_cast<long long>(dist_.size()) > g.limits().element_cap) {
                for (const auto& y : next) dist_.erase(y);  // keep the memo consistent
                throw resource_error("lamplighter length oracle: element cap " +
                                     std::to_string(g.limits().element_cap) + " exceeded at radius " +
                                     std::to_string(radius_ + 1));
            }
        }
        std::sort(next.begin(), next.end());
        frontier_ = std::move(next);
        ++radius_;
    }

    std::mutex mu_;
    std::unordered_map<element, int, element_hash> dist_;
    std::vector<element> frontier_;
    long radius_ = 0;
};

group::group(family f, int p) : fam_(f), param_(p) {
    if (p < 1) throw config_error(std::string("group parameter must be positive for family ") + family_name(f));
    build_generators();
    if (f == family::lamplighter) oracle_ = std::make_shared<length_oracle>();
}

group group::free(int k) { return group(family::free, k); }
group group::abelian(int d) { return group(family::abelian, d); }
group group::cyclic(int n) { return group(family::cyclic, n); }
group group::lamplighter(int d) { return group(family::lamplighter, d); }

std::string group::spec() const { return std::string(family_name(fam_)) + ":" + std::to_string(param_); }

void group::build_generators() {
    gens_.clear();
    switch (fam_) {
        case family::free:
            for (int i = 1; i <= param_; ++i) {
                gens_.push_back({i});
                gens_.push_back({-i});
            }
            break;
        case family::abelian:
            for (int i = 0; i < param_; ++i) {
                element e(param_, 0), f(param_, 0);
                e[i] = 1;
                f[i] = -1;
                gens_.push_back(e);
                gens_.push_back(f);
            }
            break;
        case family::cyclic:
            if (param_ == 1) {
                gens_.push_back({0});
            } else {
                gens_.push_back({1});
                if (param_ > 2) gens_.push_back({param_ - 1});
            }
            break;
        case family::lamplighter: {
            // switch-walk-switch: s^a t_i^{+-1} s^b
            const int d = param_;
            for (int i = 0; i < d; ++i) {
                for (int sign : {1, -1}) {
                    for (int a = 0; a < 2; ++a) {
                        for (int b = 0; b < 2; ++b) {
                            element g(d, 0);
                            g[i] = sign;
                            std::vector<std::vector<int32_t>> lamps;
                            if (a) lamps.push_back(std::vector<int32_t>(d, 0));
                            if (b) lamps.push_back(std::vector<int32_t>(g.begin(), g.end()));
                            std::sort(lamps.begin(), lamps.end());
                            for (auto& l : lamps) g.insert(g.end(), l.begin(), l.end());
                            gens_.push_back(g);
                        }
                    }
                }
            }
            break;
        }
    }
}

element group::identity() const {
    switch (fam_) {
        case family::free: return {};
        case family::abelian: return element(param_, 0);
        case family::cyclic: return {0};
        case family::lamplighter: return element(param_, 0);
    }
    return {};
}

bool group::is_identity(const element& a) const {
    switch (fam_) {
        case family::free: return a.empty();
        case family::cyclic: return a.size() == 1 && a[0] == 0;
        default:
            return static_cast<int>(a.size()) == param_ &&
                   std::all_of(a.begin(), a.end(), [](int32_t v) { return v == 0; });
    }
}

namespace {

// lexicographic compare of d-tuples at p and q
inline int cmp_tuple(const int32_t* p, const int32_t* q, int d) {
    for (int i = 0; i < d; ++i) {
        if (p[i] < q[i]) return -1;
        if (p[i] > q[i]) return 1;
    }
    return 0;
}

}  // namespace

void group::lamp_multiply(const element& a, const element& b, element& out) const {
    const int d = param_;
    const size_t na = (a.size() - d) / d, nb = (b.size() - d) / d;
    out.assign(d, 0);
    for (int i = 0; i < d; ++i) out[i] = a[i] + b[i];
    out.reserve(d + (na + nb) * d);
    // lamps of a, and lamps of b shifted by cursor(a); both sorted, shift keeps order
    std::vector<int32_t> shifted(nb * d);
    for (size_t j = 0; j < nb; ++j)
        for (int i = 0; i < d; ++i) shifted[j * d + i] = b[d + j * d + i] + a[i];
    size_t i = 0, j = 0;
    const int32_t* pa = a.data() + d;
    const int32_t* pb = shifted.data();
    while (i < na || j < nb) {
        int c;
        if (i == na)
            c = 1;
        else if (j == nb)
            c = -1;
        else
            c = cmp_tuple(pa + i * d, pb + j * d, d);
        if (c == 0) {
            ++i;
            ++j;
        } else if (c < 0) {
            out.insert(out.end(), pa + i * d, pa + (i + 1) * d);
            ++i;
        } else {
            out.insert(out.end(), pb + j * d, pb + (j + 1) * d);
            ++j;
        }
    }
}

element group::multiply(const element& a, const element& b) const {
    element out;
    switch (fam_) {
        case family::free: {
            out = a;
            right_multiply(out, b);
            return out;
        }
        case family::abelian:
            if (a.size() != b.size() || static_cast<int>(a.size()) != param_)
                throw domain_error("multiply: element does not belong to " + spec());
            out.resize(param_);
            for (int i = 0; i < param_; ++i) out[i] = a[i] + b[i];
            return out;
        case family::cyclic:
            if (a.size() != 1 || b.size() != 1) throw domain_error("multiply: element does not belong to " + spec());
            return {static_cast<int32_t>((static_cast<long long>(a[0]) + b[0]) % param_)};
        case family::lamplighter:
            if (a.size() < static_cast<size_t>(param_) || b.size() < static_cast<size_t>(param_) ||
                a.size() % param_ != 0 || b.size() % param_ != 0)
                throw domain_error("multiply: element does not belong to " + spec());
            lamp_multiply(a, b, out);
            return out;
    }
    return out;
}

void group::right_multiply(element& a, const element& b) const {
    if (fam_ == family::free) {
        for (int32_t x : b) {
            if (x == 0 || x > param_ || x < -param_) throw domain_error("multiply: letter outside " + spec());
            if (!a.empty() && a.back() == -x)
                a.pop_back();
            else
                a.push_back(x);
        }
        return;
    }
    if (fam_ == family::abelian) {
        if (a.size() != b.size() || static_cast<int>(a.size()) != param_)
            throw domain_error("multiply: element does not belong to " + spec());
        for (int i = 0; i < param_; ++i) a[i] += b[i];
        return;
    }
    a = multiply(a, b);
}

element group::inverse(const element& a) const {
    switch (fam_) {
        case family::free: {
            element out(a.rbegin(), a.rend());
            for (auto& x : out) x = -x;
            return out;
        }
        case family::abelian: {
            element out(a);
            for (auto& x : out) x = -x;
            return out;
        }
        case family::cyclic:
            return {static_cast<int32_t>((param_ - a.at(0) % param_) % param_)};
        case family::lamplighter: {
            const int d = param_;
            element out(a.size());
            for (int i = 0; i < d; ++i) out[i] = -a[i];
            for (size_t j = d; j < a.size(); ++j) out[j] = a[j] - a[(j - d) % d];
            return out;
        }
    }
    return {};
}

long group::length(const element& a) const {
    switch (fam_) {
        case family::free: return static_cast<long>(a.size());
        case family::abelian: {
            long s = 0;
            for (int32_t x : a) s += std::labs(x);
            return s;
        }
        case family::cyclic: {
            long r = a.at(0);
            return std::min<long>(r, param_ - r);
        }
        case family::lamplighter: return oracle_->length(*this, a);
    }
    return 0;
}

void group::validate(const element& a) const {
    switch (fam_) {
        case family::free:
            for (size_t i = 0; i < a.size(); ++i) {
                if (a[i] == 0 || a[i] > param_ || a[i] < -param_)
                    throw domain_error("invalid letter in free word for " + spec());
                if (i > 0 && a[i] == -a[i - 1]) throw domain_error("free word is not reduced");
            }
            return;
        case family::abelian:
            if (static_cast<int>(a.size()) != param_) throw domain_error("wrong dimension for " + spec());
            return;
        case family::cyclic:
            if (a.size() != 1 || a[0] < 0 || a[0] >= param_) throw domain_error("residue out of range for " + spec());
            return;
        case family::lamplighter: {
            const int d = param_;
            if (a.size() < static_cast<size_t>(d) || a.size() % d != 0)
                throw domain_error("malformed lamplighter element for " + spec());
            for (size_t j = 2 * d; j < a.size(); j += d)
                if (cmp_tuple(a.data() + j - d, a.data() + j, d) >= 0)
                    throw domain_error("lamp positions must be sorted and distinct");
            return;
        }
    }
}

double group::log_sphere_size(long r) const {
    if (r == 0) return 0.0;
    switch (fam_) {
        case family::free:
            return std::log(2.0 * param_) + static_cast<double>(r - 1) * std::log(2.0 * param_ - 1.0);
        default:
            return std::log(static_cast<double>(sphere(r).size()));
    }
}

std::vector<element> group::sphere(long r) const {
    if (r < 0) throw domain_error("sphere radius must be non-negative");
    std::vector<element> out;
    const long long cap = limits_.element_cap;
    switch (fam_) {
        case family::free: {
            if (r == 0) return {identity()};
            double lsize = log_sphere_size(r);
            if (lsize > std::log(static_cast<double>(cap)))
                throw resource_error("sphere(" + std::to_string(r) + ") of " + spec() + " exceeds element cap " +
                                     std::to_string(cap));
            element w;
            // depth-first over reduced words
            std::vector<int> choice;
            auto letters = [&](int idx) { return idx < param_ ? idx + 1 : -(idx - param_ + 1); };
            std::function<void()> rec = [&]() {
                if (static_cast<long>(w.size()) == r) {
                    out.push_back(w);
                    return;
                }
                for (int idx = 0; idx < 2 * param_; ++idx) {
                    int x = letters(idx);
                    if (!w.empty() && w.back() == -x) continue;
                    w.push_back(x);
                    rec();
                    w.pop_back();
                }
            };
            rec();
            std::sort(out.begin(), out.end());
            return out;
        }
        case family::abelian: {
            element v(param_, 0);
            std::function<void(int, long)> rec = [&](int i, long left) {
                if (i == param_ - 1) {
                    v[i] = static_cast<int32_t>(left);
                    out.push_back(v);
                    if (left != 0) {
                        v[i] = static_cast<int32_t>(-left);
                        out.push_back(v);
                    }
                    v[i] = 0;
                    if (static_cast<long long>(out.size()) > cap)
                        throw resource_error("sphere enumeration exceeds element cap");
                    return;
                }
                for (long x = -left; x <= left; ++x) {
                    v[i] = static_cast<int32_t>(x);
                    rec(i + 1, left - std::labs(x));
                }
                v[i] = 0;
            };
            rec(0, r);
            std::sort(out.begin(), out.end());
            return out;
        }
        case family::cyclic: {
            if (2 * r > param_) return {};
            out.push_back({static_cast<int32_t>(r)});
            if (2 * r != param_ && r != 0) out.push_back({static_cast<int32_t>(param_ - r)});
            std::sort(out.begin(), out.end());
            return out;
        }
        case family::lamplighter: return oracle_->layer(*this, r);
    }
    return out;
}

long long group::ball_size(long r) const {
    if (r < 0) throw domain_error("ball radius must be non-negative");
    switch (fam_) {
        case family::free: {
            long double total = 1, s = 2.0L * param_;
            for (long j = 1; j <= r; ++j) {
                total += s;
                s *= (2.0L * param_ - 1);
                if (total > 9.0e18L) throw resource_error("ball size overflows 64-bit integer");
            }
            return static_cast<long long>(total);
        }
        case family::abelian: {
            // sum_i 2^i C(d,i) C(r,i)
            long double total = 0;
            for (int i = 0; i <= std::min<long>(param_, r); ++i) {
                long double c1 = 1, c2 = 1;
                for (int j = 0; j < i; ++j) {
                    c1 = c1 * (param_ - j) / (j + 1);
                    c2 = c2 * (r - j) / (j + 1);
                }
                total += std::pow(2.0L, i) * c1 * c2;
            }
            return static_cast<long long>(std::llround(static_cast<double>(total)));
        }
        case family::cyclic: return std::min<long long>(param_, 2 * r + 1);
        case family::lamplighter: return oracle_->ball(*this, r);
    }
    return 0;
}

std::vector<int32_t> group::cursor(const element& a) const {
    if (fam_ != family::lamplighter) throw domain_error("cursor: not a lamplighter element");
    return std::vector<int32_t>(a.begin(), a.begin() + param_);
}

size_t group::lamp_count(const element& a) const {
    if (fam_ != family::lamplighter) throw domain_error("lamp_count: not a lamplighter element");
    return (a.size() - param_) / param_;
}

namespace {

std::string tuple_text(const int32_t* p, int d) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < d; ++i) os << (i ? "," : "") << p[i];
    os << ")";
    return os.str();
}

std::vector<int32_t> parse_ints(const std::string& s) {
    std::vector<int32_t> out;
    std::string cur;
    for (char c : s) {
        if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) {
            cur += c;
        } else if (c == ',' || c == ' ' || c == '(' || c == ')' || c == '[' || c == ']') {
            if (!cur.empty()) {
                out.push_back(static_cast<int32_t>(std::stol(cur)));
                cur.clear();
            }
        } else {
            throw config_error("unexpected character '" + std::string(1, c) + "' in element literal");
        }
    }
    if (!cur.empty()) out.push_back(static_cast<int32_t>(std::stol(cur)));
    return out;
}

}  // namespace

std::string group::format(const element& a) const {
    switch (fam_) {
        case family::free: {
            std::string s;
            for (int32_t x : a) s += x > 0 ? static_cast<char>('a' + x - 1) : static_cast<char>('A' - x - 1);
            return s;
        }
        case family::abelian: return tuple_text(a.data(), param_);
        case family::cyclic: return std::to_string(a.at(0));
        case family::lamplighter: {
            const int d = param_;
            std::string s = "{";
            for (size_t j = d; j < a.size(); j += d) s += (j > static_cast<size_t>(d) ? "," : "") + tuple_text(a.data() + j, d);
            s += "}@" + tuple_text(a.data(), d);
            return s;
        }
    }
    return "";
}

element group::parse(const std::string& text) const {
    switch (fam_) {
        case family::free: {
            if (param_ > 26) throw config_error("free-group literals support rank <= 26");
            element w;
            if (text == "1" || text == "id") return w;
            for (char c : text) {
                int x;
                if (c >= 'a' && c <= 'z')
                    x = c - 'a' + 1;
                else if (c >= 'A' && c <= 'Z')
                    x = -(c - 'A' + 1);
                else
                    throw config_error("invalid free-group letter '" + std::string(1, c) + "'");
                if (std::abs(x) > param_) throw config_error("letter '" + std::string(1, c) + "' outside " + spec());
                right_multiply(w, {x});
            }
            return w;
        }
        case family::abelian: {
            auto v = parse_ints(text);
            if (static_cast<int>(v.size()) != param_) throw config_error("expected " + std::to_string(param_) + " coordinates");
            return v;
        }
        case family::cyclic: {
            auto v = parse_ints(text);
            if (v.size() != 1) throw config_error("expected one residue");
            long r = ((static_cast<long>(v[0]) % param_) + param_) % param_;
            return {static_cast<int32_t>(r)};
        }
        case family::lamplighter: {
            auto at = text.find('@');
            if (at == std::string::npos) throw config_error("lamplighter literal must look like {(x),...}@(c)");
            auto lamps = parse_ints(text.substr(0, at).size() >= 2 ? text.substr(1, at - 2) : "");
            auto cur = parse_ints(text.substr(at + 1));
            if (static_cast<int>(cur.size()) != param_ || lamps.size() % param_ != 0)
                throw config_error("lamplighter literal has wrong dimension");
            // build as product: toggle each lamp, then move cursor
            element out = identity();
            for (size_t j = 0; j < lamps.size(); j += param_) {
                element toggle(param_, 0);
                toggle.insert(toggle.end(), lamps.begin() + j, lamps.begin() + j + param_);
                out = multiply(out, toggle);
            }
            element move(cur.begin(), cur.end());
            return multiply(out, move);
        }
    }
    return {};
}

}  // namespace rwlab
