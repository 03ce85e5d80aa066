#include "recsearch/hyperspace.hpp"

#include <charconv>
#include <cmath>

#include "recsearch/errors.hpp"

namespace recsearch {

std::string hp_to_string(const HpValue& v) {
    struct Visitor {
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const {
            char buf[32];
            auto [p, ec] = std::to_chars(buf, buf + sizeof buf, d);
            (void)ec;
            return std::string(buf, p);
        }
        std::string operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, v);
}

bool hp_equal(const HpValue& a, const HpValue& b) {
    return a == b;
}

std::string canonical_text(const Assignment& a) {
    std::string out;
    for (const auto& [name, value] : a) {
        if (!out.empty()) out += ";";
        out += name;
        out += "=";
        out += hp_to_string(value);
    }
    return out;
}

void HyperSpace::declare(HyperParamDecl decl) {
    if (contains(decl.name))
        throw ConfigError("duplicate hyperparameter '" + decl.name + "'");
    if (const auto& d = std::get_if<ChoiceDomain>(&decl.domain); d && d->values.empty())
        throw ConfigError("hyperparameter '" + decl.name + "': empty choice list");
    if (const auto& d = std::get_if<IntRangeDomain>(&decl.domain)) {
        if (d->hi < d->lo || d->step <= 0)
            throw ConfigError("hyperparameter '" + decl.name + "': empty integer range");
    }
    if (const auto& d = std::get_if<FloatRangeDomain>(&decl.domain)) {
        if (!(d->hi >= d->lo))
            throw ConfigError("hyperparameter '" + decl.name + "': empty float range");
        if (d->log_scale && d->lo <= 0.0)
            throw ConfigError("hyperparameter '" + decl.name +
                              "': log-scaled range requires positive bounds");
    }
    if (decl.condition) {
        if (!contains(decl.condition->parent))
            throw ConfigError("hyperparameter '" + decl.name + "': condition parent '" +
                              decl.condition->parent + "' not declared yet");
    }
    index_.emplace(decl.name, decls_.size());
    decls_.push_back(std::move(decl));
}

bool HyperSpace::contains(const std::string& name) const {
    return index_.count(name) != 0;
}

const HyperParamDecl& HyperSpace::decl(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown hyperparameter '" + name + "'");
    return decls_[it->second];
}

void HyperSpace::override_domain(const std::string& name, HpDomain domain) {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown hyperparameter '" + name + "'");
    decls_[it->second].domain = std::move(domain);
}

bool HyperSpace::is_active(const HyperParamDecl& d, const Assignment& partial) const {
    if (!d.condition) return true;
    auto it = partial.find(d.condition->parent);
    return it != partial.end() && hp_equal(it->second, d.condition->required);
}

HpValue HyperSpace::sample_value(const HyperParamDecl& d, Rng& rng) const {
    struct Visitor {
        Rng& rng;
        HpValue operator()(const ChoiceDomain& c) const {
            return c.values[rng.uniform_index(c.values.size())];
        }
        HpValue operator()(const IntRangeDomain& r) const {
            const std::uint64_t count =
                static_cast<std::uint64_t>((r.hi - r.lo) / r.step) + 1;
            return r.lo + static_cast<std::int64_t>(rng.uniform_index(count)) * r.step;
        }
        HpValue operator()(const FloatRangeDomain& r) const {
            if (r.lo == r.hi) return r.lo;
            if (r.log_scale)
                return std::exp(rng.uniform(std::log(r.lo), std::log(r.hi)));
            return rng.uniform(r.lo, r.hi);
        }
        HpValue operator()(const BoolDomain&) const { return rng.bernoulli(0.5); }
        HpValue operator()(const FixedDomain& f) const { return f.value; }
    };
    return std::visit(Visitor{rng}, d.domain);
}

Assignment HyperSpace::sample(Rng& rng) const {
    Assignment a;
    for (const auto& d : decls_) {
        if (!is_active(d, a)) continue;
        a.emplace(d.name, sample_value(d, rng));
    }
    return a;
}

namespace {

std::size_t slot_count(const HpDomain& domain) {
    struct Visitor {
        std::size_t operator()(const ChoiceDomain& c) const { return c.values.size(); }
        std::size_t operator()(const IntRangeDomain&) const { return 1; }
        std::size_t operator()(const FloatRangeDomain&) const { return 1; }
        std::size_t operator()(const BoolDomain&) const { return 1; }
        std::size_t operator()(const FixedDomain&) const { return 0; }
    };
    return std::visit(Visitor{}, domain);
}

}  // namespace

std::size_t HyperSpace::vector_width() const {
    std::size_t n = 0;
    for (const auto& d : decls_) n += slot_count(d.domain);
    return n;
}

std::vector<double> HyperSpace::vectorize(const Assignment& a) const {
    std::vector<double> out;
    out.reserve(vector_width());
    for (const auto& d : decls_) {
        const std::size_t slots = slot_count(d.domain);
        if (slots == 0) continue;
        const auto it = a.find(d.name);
        if (it == a.end()) {
            // Inactive: midpoint keeps the design matrix fixed-width.
            out.insert(out.end(), slots, 0.5);
            continue;
        }
        const HpValue& v = it->second;
        if (const auto* c = std::get_if<ChoiceDomain>(&d.domain)) {
            for (const auto& candidate : c->values)
                out.push_back(hp_equal(candidate, v) ? 1.0 : 0.0);
        } else if (const auto* r = std::get_if<IntRangeDomain>(&d.domain)) {
            const double lo = static_cast<double>(r->lo), hi = static_cast<double>(r->hi);
            const double x = static_cast<double>(std::get<std::int64_t>(v));
            out.push_back(hi > lo ? (x - lo) / (hi - lo) : 0.5);
        } else if (const auto* f = std::get_if<FloatRangeDomain>(&d.domain)) {
            double lo = f->lo, hi = f->hi, x = std::get<double>(v);
            if (f->log_scale) {
                lo = std::log(lo);
                hi = std::log(hi);
                x = std::log(x);
            }
            out.push_back(hi > lo ? (x - lo) / (hi - lo) : 0.5);
        } else if (std::holds_alternative<BoolDomain>(d.domain)) {
            out.push_back(std::get<bool>(v) ? 1.0 : 0.0);
        }
    }
    return out;
}

bool HyperSpace::in_domain(const HyperParamDecl& d, const HpValue& v) const {
    struct Visitor {
        const HpValue& v;
        bool operator()(const ChoiceDomain& c) const {
            for (const auto& candidate : c.values)
                if (hp_equal(candidate, v)) return true;
            return false;
        }
        bool operator()(const IntRangeDomain& r) const {
            const auto* i = std::get_if<std::int64_t>(&v);
            return i && *i >= r.lo && *i <= r.hi && (*i - r.lo) % r.step == 0;
        }
        bool operator()(const FloatRangeDomain& r) const {
            const auto* d = std::get_if<double>(&v);
            return d && *d >= r.lo && *d <= r.hi;
        }
        bool operator()(const BoolDomain&) const { return std::holds_alternative<bool>(v); }
        bool operator()(const FixedDomain& f) const { return hp_equal(f.value, v); }
    };
    return std::visit(Visitor{v}, d.domain);
}

}  // namespace recsearch
