#include "radshoot/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "radshoot/expr.hpp"
#include "radshoot/sampling.hpp"

namespace radshoot {

namespace {

int read_dimension(const std::map<std::string, double>& params) {
    auto it = params.find("n");
    if (it == params.end()) return 3;
    double v = it->second;
    int n = static_cast<int>(std::lround(v));
    if (n < 3 || std::fabs(v - n) > 1e-12)
        throw InvalidInput("dimension n must be an integer >= 3");
    return n;
}

double require_param(const std::map<std::string, double>& params,
                     const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) throw MissingParam(key);
    return it->second;
}

std::string fmt_exp(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", p);
    return buf;
}

}  // namespace

std::vector<double> SystemSpec::eval_f(std::span<const double> u) const {
    std::vector<double> out(static_cast<std::size_t>(L));
    eval_f_into(u, out);
    return out;
}

void SystemSpec::eval_f_into(std::span<const double> u,
                             std::span<double> out) const {
    if (static_cast<int>(u.size()) != L || static_cast<int>(out.size()) != L)
        throw InvalidInput("eval_f: state size does not match component count");
    double buf[16];
    std::vector<double> heap;
    std::span<double> clamped;
    if (L <= 16) {
        clamped = std::span<double>(buf, static_cast<std::size_t>(L));
    } else {
        heap.resize(static_cast<std::size_t>(L));
        clamped = heap;
    }
    for (int i = 0; i < L; ++i) {
        double x = u[static_cast<std::size_t>(i)];
        if (x < 0.0) {
            if (x < -kClampTol)
                throw DomainError("state component below the clamp tolerance");
            x = 0.0;
        }
        clamped[static_cast<std::size_t>(i)] = x;
    }
    f(clamped, out);
}

void SystemSpec::eval_f_projected(std::span<const double> u,
                                  std::span<double> out) const {
    double buf[16];
    std::vector<double> heap;
    std::span<double> clamped;
    if (L <= 16) {
        clamped = std::span<double>(buf, static_cast<std::size_t>(L));
    } else {
        heap.resize(static_cast<std::size_t>(L));
        clamped = heap;
    }
    for (int i = 0; i < L; ++i)
        clamped[static_cast<std::size_t>(i)] =
            std::max(0.0, u[static_cast<std::size_t>(i)]);
    f(clamped, out);
}

double SystemSpec::eval_potential(std::span<const double> u) const {
    if (!potential) throw InvalidInput("system has no declared potential");
    return potential(u);
}

double SystemSpec::param(const std::string& key) const {
    return require_param(params, key);
}

bool SystemSpec::has_param(const std::string& key) const {
    return params.count(key) != 0;
}

SystemSpec builtin(const std::string& name,
                   const std::map<std::string, double>& params) {
    SystemSpec s;
    s.name = name;
    s.params = params;
    s.n = read_dimension(params);
    s.params["n"] = s.n;

    if (name == "zero") {
        s.kind = SystemKind::Zero;
        s.L = 2;
        s.f = [](std::span<const double>, std::span<double> out) {
            out[0] = 0.0;
            out[1] = 0.0;
        };
        s.f_text = {"0", "0"};
        return s;
    }
    if (name == "lane_emden_scalar") {
        s.kind = SystemKind::LaneEmdenScalar;
        s.L = 1;
        double p = require_param(params, "p");
        s.f = [p](std::span<const double> u, std::span<double> out) {
            out[0] = std::pow(u[0], p);
        };
        s.f_text = {"u1^" + fmt_exp(p)};
        return s;
    }
    if (name == "hls") {
        s.kind = SystemKind::Hls;
        s.L = 2;
        double p = require_param(params, "p");
        double q = require_param(params, "q");
        s.f = [p, q](std::span<const double> u, std::span<double> out) {
            out[0] = std::pow(u[1], p);
            out[1] = std::pow(u[0], q);
        };
        s.f_text = {"u2^" + fmt_exp(p), "u1^" + fmt_exp(q)};
        return s;
    }
    if (name == "sign_changing") {
        s.kind = SystemKind::SignChanging;
        s.L = 2;
        double p = require_param(params, "p");
        s.f = [p](std::span<const double> u, std::span<double> out) {
            double up = std::pow(u[0], p);
            out[0] = std::pow(u[1], p) - up;
            out[1] = up;
        };
        s.f_text = {"u2^" + fmt_exp(p) + " - u1^" + fmt_exp(p),
                    "u1^" + fmt_exp(p)};
        return s;
    }
    if (name == "sign_changing_pq") {
        s.kind = SystemKind::SignChangingPq;
        s.L = 2;
        double p = require_param(params, "p");
        double q = require_param(params, "q");
        s.f = [p, q](std::span<const double> u, std::span<double> out) {
            double up = std::pow(u[0], p);
            out[0] = std::pow(u[1], p) + std::pow(u[1], q) - up;
            out[1] = up;
        };
        s.f_text = {"u2^" + fmt_exp(p) + " + u2^" + fmt_exp(q) + " - u1^" +
                        fmt_exp(p),
                    "u1^" + fmt_exp(p)};
        return s;
    }
    if (name == "potential_type1") {
        s.kind = SystemKind::PotentialType1;
        s.L = 2;
        s.potential_kind = PotentialKind::TypeI;
        double p = require_param(params, "p");
        s.f = [p](std::span<const double> u, std::span<double> out) {
            double a = u[0], b = u[1];
            out[0] = -2.0 * (a - b) + std::pow(b, p - 1) +
                     (p - 1) * std::pow(a, p - 2) * b;
            out[1] = 2.0 * (a - b) + (p - 1) * std::pow(b, p - 2) * a +
                     std::pow(a, p - 1);
        };
        s.potential = [p](std::span<const double> u) {
            double a = u[0], b = u[1];
            double d = a - b;
            return -d * d + std::pow(b, p - 1) * a + std::pow(a, p - 1) * b;
        };
        std::string pm1 = fmt_exp(p - 1), pm2 = fmt_exp(p - 2),
                    pc = fmt_exp(p - 1);
        s.f_text = {"-2*(u1 - u2) + u2^" + pm1 + " + " + pc + "*u1^" + pm2 +
                        "*u2",
                    "2*(u1 - u2) + " + pc + "*u2^" + pm2 + "*u1 + u1^" + pm1};
        s.potential_text =
            "-(u1 - u2)^2 + u2^" + pm1 + "*u1 + u1^" + pm1 + "*u2";
        return s;
    }
    if (name == "potential_type2") {
        s.kind = SystemKind::PotentialType2;
        s.L = 2;
        s.potential_kind = PotentialKind::TypeII;
        double p = require_param(params, "p");
        // cross-linked: f_1 = dF/du2, f_2 = dF/du1
        s.f = [p](std::span<const double> u, std::span<double> out) {
            double a = u[0], b = u[1];
            out[0] = 2.0 * (a - b) + p * std::pow(b, p - 1);
            out[1] = -2.0 * (a - b) + p * std::pow(a, p - 1);
        };
        s.potential = [p](std::span<const double> u) {
            double a = u[0], b = u[1];
            double d = a - b;
            return -d * d + std::pow(a, p) + std::pow(b, p);
        };
        std::string pm1 = fmt_exp(p - 1), pc = fmt_exp(p);
        s.f_text = {"2*(u1 - u2) + " + pc + "*u2^" + pm1,
                    "-2*(u1 - u2) + " + pc + "*u1^" + pm1};
        s.potential_text = "-(u1 - u2)^2 + u1^" + pc + " + u2^" + pc;
        return s;
    }
    throw UnknownSystem(name);
}

SystemSpec make_custom_system(const std::string& name, int L, int n,
                              const std::map<std::string, double>& params,
                              const std::vector<std::string>& f_exprs,
                              const std::string& potential_expr,
                              PotentialKind potential_kind) {
    if (L < 1 || L > 16) throw InvalidInput("component count must be in 1..16");
    if (n < 3) throw InvalidInput("dimension n must be an integer >= 3");
    if (static_cast<int>(f_exprs.size()) != L)
        throw InvalidInput("need exactly one f expression per component");
    if (potential_kind == PotentialKind::TypeII && L != 2)
        throw InvalidInput("cross-linked potentials require two components");
    if (potential_expr.empty() && potential_kind != PotentialKind::None)
        throw InvalidInput("potential kind declared without a potential");

    SystemSpec s;
    s.name = name;
    s.kind = SystemKind::Custom;
    s.L = L;
    s.n = n;
    s.params = params;
    s.params["n"] = n;
    s.potential_kind = potential_kind;
    s.f_text = f_exprs;
    s.potential_text = potential_expr;

    std::set<std::string> param_names;
    for (const auto& [k, v] : s.params) param_names.insert(k);

    auto exprs = std::make_shared<std::vector<expr::Expr>>();
    exprs->reserve(f_exprs.size());
    for (const auto& text : f_exprs)
        exprs->push_back(expr::Expr::parse(text, L, param_names));
    auto param_values = std::make_shared<std::map<std::string, double>>(s.params);

    s.f = [exprs, param_values](std::span<const double> u,
                                std::span<double> out) {
        for (std::size_t i = 0; i < exprs->size(); ++i)
            out[i] = (*exprs)[i].eval(u, *param_values);
    };
    if (!potential_expr.empty()) {
        auto pot = std::make_shared<expr::Expr>(
            expr::Expr::parse(potential_expr, L, param_names));
        s.potential = [pot, param_values](std::span<const double> u) {
            return pot->eval(u, *param_values);
        };
    }
    return s;
}

// --- checkers ----------------------------------------------------------------

namespace {

// all proper zero-patterns of L coordinates: subsets of {0..L-1} that are
// neither empty nor everything, plus the all-zero pattern as a single point
std::vector<std::vector<int>> proper_zero_patterns(int L) {
    std::vector<std::vector<int>> out;
    for (unsigned mask = 1; mask + 1 < (1u << L); ++mask) {
        std::vector<int> z;
        for (int i = 0; i < L; ++i)
            if (mask & (1u << i)) z.push_back(i);
        out.push_back(std::move(z));
    }
    return out;
}

struct MinSlot {
    double value = std::numeric_limits<double>::infinity();
    std::vector<double> point;
};

}  // namespace

DecayReport check_decay(const SystemSpec& spec, double box_max, long samples,
                        std::uint64_t seed, ExecPolicy policy) {
    if (box_max <= 0) throw InvalidInput("box_max must be positive");
    if (samples < 1) throw InvalidInput("sample budget must be positive");
    const int L = spec.L;

    struct Region {
        std::vector<int> zeros;  // coordinates pinned to 0
        long count;
        std::uint64_t seed;
    };
    std::vector<Region> regions;
    regions.push_back({{}, std::max<long>(samples / 2, 1), seed});
    auto patterns = proper_zero_patterns(L);
    if (!patterns.empty()) {
        long per_face =
            std::max<long>(32, samples / (2 * static_cast<long>(patterns.size())));
        for (std::size_t i = 0; i < patterns.size(); ++i)
            regions.push_back(
                {patterns[i], per_face, seed + 1000 * (static_cast<std::uint64_t>(i) + 1)});
    }

    DecayReport report;
    report.worst_value = std::numeric_limits<double>::infinity();

    std::vector<double> origin(static_cast<std::size_t>(L), 0.0);
    {
        auto fv = spec.eval_f(origin);
        double sum = 0.0;
        for (double v : fv) sum += v;
        report.worst_value = sum;
        report.worst_point = origin;
        report.sample_count = 1;
    }

    for (const auto& region : regions) {
        std::vector<MinSlot> slots(static_cast<std::size_t>(region.count));
        Halton seq(L, region.seed);
        parallel_for(
            static_cast<std::size_t>(region.count),
            [&](std::size_t i) {
                std::vector<double> x;
                seq.point_into(i, x);
                for (int d = 0; d < L; ++d) x[static_cast<std::size_t>(d)] *= box_max;
                for (int z : region.zeros) x[static_cast<std::size_t>(z)] = 0.0;
                auto fv = spec.eval_f(x);
                double sum = 0.0;
                for (double v : fv) sum += v;
                slots[i].value = sum;
                slots[i].point = std::move(x);
            },
            policy);
        for (auto& slot : slots) {
            if (slot.value < report.worst_value) {
                report.worst_value = slot.value;
                report.worst_point = slot.point;
            }
        }
        report.sample_count += region.count;
    }

    report.ok = report.worst_value >= -kAssumeTol;
    return report;
}

ControlEntry check_control_inequality(const SystemSpec& spec,
                                      std::span<const double> abar,
                                      double delta0, long samples,
                                      std::uint64_t seed, ExecPolicy policy) {
    const int L = spec.L;
    if (static_cast<int>(abar.size()) != L)
        throw InvalidInput("base point size does not match component count");
    if (delta0 <= 0) throw InvalidInput("delta0 must be positive");
    if (samples < 1) throw InvalidInput("sample budget must be positive");

    ControlEntry entry;
    entry.base_point.assign(abar.begin(), abar.end());
    entry.delta0 = delta0;
    for (int i = 0; i < L; ++i) {
        double v = abar[static_cast<std::size_t>(i)];
        if (v < 0.0) throw InvalidBoundaryPoint("base point has a negative coordinate");
        if (v <= kClampTol) entry.zero_set.push_back(i);
    }
    int m = static_cast<int>(entry.zero_set.size());
    if (m == 0 || m == L)
        throw InvalidBoundaryPoint(
            "base point must have some, but not all, coordinates zero");

    std::vector<bool> is_zero(static_cast<std::size_t>(L), false);
    for (int z : entry.zero_set) is_zero[static_cast<std::size_t>(z)] = true;

    struct Slot {
        double ratio = 0.0;   // num/den when well defined
        bool violated = false;
        std::vector<double> point;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(samples));
    Halton seq(L, seed);

    parallel_for(
        static_cast<std::size_t>(samples),
        [&](std::size_t i) {
            std::vector<double> x;
            seq.point_into(i, x);
            for (int d = 0; d < L; ++d) {
                double base = abar[static_cast<std::size_t>(d)];
                double lo = std::max(0.0, base - delta0);
                double hi = base + delta0;
                x[static_cast<std::size_t>(d)] =
                    lo + x[static_cast<std::size_t>(d)] * (hi - lo);
            }
            auto fv = spec.eval_f(x);
            double num = 0.0, den = 0.0;
            for (int d = 0; d < L; ++d) {
                if (is_zero[static_cast<std::size_t>(d)])
                    den += fv[static_cast<std::size_t>(d)];
                else
                    num += std::fabs(fv[static_cast<std::size_t>(d)]);
            }
            Slot& slot = slots[i];
            slot.point = std::move(x);
            if (den > kAssumeTol) {
                slot.ratio = num / den;
            } else if (num <= kAssumeTol && den >= -kAssumeTol) {
                slot.ratio = 0.0;  // 0 <= C*0, any C works
            } else {
                slot.violated = true;  // positive demand, vanishing supply
            }
        },
        policy);

    entry.ok = true;
    entry.worst_ratio = 0.0;
    for (auto& slot : slots) {
        if (slot.violated) {
            if (entry.ok || entry.worst_point.empty()) entry.worst_point = slot.point;
            entry.ok = false;
        } else if (slot.ratio > entry.worst_ratio) {
            entry.worst_ratio = slot.ratio;
            if (entry.ok) entry.worst_point = slot.point;
        }
    }
    entry.c_est = std::max(1.0, entry.worst_ratio);
    entry.sample_count = samples;
    return entry;
}

double certify_delta0(const SystemSpec& spec, std::span<const double> abar,
                      double delta0_start, long samples, std::uint64_t seed) {
    double d = delta0_start;
    while (d >= 1e-4) {
        auto entry = check_control_inequality(spec, abar, d, samples, seed);
        if (entry.ok) return d;
        d *= 0.5;
    }
    return 0.0;
}

PotentialCheck validate_potential(const SystemSpec& spec, long samples,
                                  std::uint64_t seed) {
    if (spec.potential_kind == PotentialKind::None || !spec.potential)
        throw InvalidInput("system has no declared potential to validate");
    const int L = spec.L;
    const double h = 1e-5;
    const double lo = 1e-2, hi = 2.0;

    PotentialCheck check;
    check.ok = true;
    Halton seq(L, seed);
    std::vector<double> x(static_cast<std::size_t>(L));
    std::vector<double> xp(x), xm(x);
    for (long s = 0; s < samples; ++s) {
        seq.next_into(x);
        for (int d = 0; d < L; ++d)
            x[static_cast<std::size_t>(d)] =
                lo + x[static_cast<std::size_t>(d)] * (hi - lo);
        auto fv = spec.eval_f(x);
        for (int i = 0; i < L; ++i) {
            // which partial should component i match?
            int j = i;
            if (spec.potential_kind == PotentialKind::TypeII) j = 1 - i;
            xp = x;
            xm = x;
            xp[static_cast<std::size_t>(j)] += h;
            xm[static_cast<std::size_t>(j)] -= h;
            double fd =
                (spec.eval_potential(xp) - spec.eval_potential(xm)) / (2.0 * h);
            double fi = fv[static_cast<std::size_t>(i)];
            double scale = std::max({1.0, std::fabs(fi), std::fabs(fd)});
            double rel = std::fabs(fi - fd) / scale;
            if (rel > check.worst_rel_err) {
                check.worst_rel_err = rel;
                check.worst_point = x;
            }
        }
    }
    check.ok = check.worst_rel_err <= 1e-5;
    check.sample_count = samples;
    return check;
}

AssumptionReport check_assumptions(const SystemSpec& spec, double box_max,
                                   double level_mass, long samples,
                                   std::uint64_t seed, ExecPolicy policy) {
    AssumptionReport report;
    report.decay = check_decay(spec, box_max, samples, seed, policy);
    report.sample_count = report.decay.sample_count;

    const int L = spec.L;
    if (L >= 2) {
        long per_entry = std::max<long>(256, samples / (4 * L));
        for (int z = 0; z < L; ++z) {
            std::vector<double> abar(static_cast<std::size_t>(L),
                                     level_mass / (L - 1));
            abar[static_cast<std::size_t>(z)] = 0.0;
            double d0 = certify_delta0(spec, abar, 0.25, per_entry,
                                       seed + 77 * (static_cast<std::uint64_t>(z) + 1));
            double use = d0 > 0 ? d0 : 1e-4;
            auto entry = check_control_inequality(
                spec, abar, use, per_entry,
                seed + 77 * (static_cast<std::uint64_t>(z) + 1), policy);
            if (d0 == 0.0) entry.ok = false;
            report.sample_count += entry.sample_count;
            report.control_entries.push_back(std::move(entry));
        }
    }
    if (spec.potential_kind != PotentialKind::None && spec.potential) {
        report.potential = validate_potential(spec, std::max<long>(128, samples / 16),
                                              seed + 999);
        report.sample_count += report.potential.sample_count;
    }
    return report;
}

}  // namespace radshoot
