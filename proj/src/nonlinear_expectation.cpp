#include "pmlab/nonlinear_expectation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "pmlab/errors.hpp"

namespace pmlab {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string action_id(const ControlAction& a) {
    std::string s = "b=(";
    for (std::size_t i = 0; i < a.drift.size(); ++i) s += (i ? "," : "") + num(a.drift[i]);
    return s + "),s=" + num(a.vol);
}

}  // namespace

void MeasureFamilySpec::validate() const {
    PMLAB_REQUIRE(L > 0.0, ConfigurationError, "measure family: L must be positive");
    PMLAB_REQUIRE(step > 0.0, ConfigurationError, "measure family: step must be positive");
    PMLAB_REQUIRE(dim >= 1, DimensionError, "measure family: dimension must be positive");
    PMLAB_REQUIRE(t_end > t_start, ConfigurationError, "measure family: empty horizon");
    PMLAB_REQUIRE(state_offset.empty() || int(state_offset.size()) == dim, DimensionError,
                  "measure family: state offset has wrong dimension");
    if (needs_wiener)
        PMLAB_REQUIRE(2.0 * L >= 1.0, ConfigurationError,
                      "measure family: the Wiener measure needs 2L >= 1");
}

std::size_t MeasureFamilySpec::steps() const {
    double r = (t_end - t_start) / step;
    auto n = std::size_t(std::ceil(r - 1e-9));
    return std::max<std::size_t>(n, 1);
}

void ControlLaw::validate(double L, int dim) const {
    PMLAB_REQUIRE(!pieces.empty(), ConfigurationError, "control law has no pieces");
    const double vmax = std::sqrt(2.0 * L);
    for (const auto& p : pieces) {
        PMLAB_REQUIRE(int(p.drift.size()) == dim, DimensionError, "control drift has wrong dimension");
        for (double b : p.drift)
            PMLAB_REQUIRE(std::fabs(b) <= L * (1 + 1e-12), BoundError, "control drift exceeds L");
        PMLAB_REQUIRE(p.vol >= 0.0 && p.vol <= vmax * (1 + 1e-12), BoundError,
                      "control volatility outside [0, sqrt(2L)]");
    }
}

std::vector<ControlAction> ControlFamily::standard_catalog(double L, int dim, bool with_zero_vol) {
    std::vector<double> vols;
    if (with_zero_vol) vols.push_back(0.0);
    vols.push_back(std::sqrt(L));
    vols.push_back(std::sqrt(2.0 * L));
    std::vector<ControlAction> out;
    std::size_t combos = 1;
    for (int i = 0; i < dim; ++i) combos *= 3;
    for (std::size_t c = 0; c < combos; ++c) {
        Point drift(static_cast<std::size_t>(dim));
        std::size_t r = c;
        for (int i = 0; i < dim; ++i) {
            drift[std::size_t(i)] = (double(r % 3) - 1.0) * L;
            r /= 3;
        }
        for (double v : vols) out.push_back({drift, v});
    }
    return out;
}

std::vector<ControlLaw> ControlFamily::feedback_laws(double L, int dim, bool with_zero_vol) {
    std::vector<double> vols;
    if (with_zero_vol) vols.push_back(0.0);
    vols.push_back(std::sqrt(L));
    vols.push_back(std::sqrt(2.0 * L));
    std::vector<ControlLaw> out;
    for (Feedback f : {Feedback::outward, Feedback::inward})
        for (double v : vols) {
            ControlLaw law;
            law.pieces = {{Point(std::size_t(dim), 0.0), v}};
            law.feedback = f;
            law.id = std::string(f == Feedback::outward ? "fb_out" : "fb_in") + "[s=" + num(v) + "]";
            out.push_back(law);
        }
    return out;
}

ControlFamily ControlFamily::constant(double L, int dim, bool with_feedback) {
    ControlFamily f;
    f.catalog = standard_catalog(L, dim);
    f.intervals = 1;
    if (with_feedback) f.extra = feedback_laws(L, dim);
    return f;
}

ControlFamily ControlFamily::piecewise(double L, int dim, int intervals, bool with_feedback) {
    ControlFamily f = constant(L, dim, with_feedback);
    f.intervals = intervals;
    return f;
}

ControlFamily ControlFamily::single(const ControlLaw& law) {
    ControlFamily f;
    f.intervals = 1;
    f.extra = {law};
    return f;
}

ControlFamily ControlFamily::wiener(int dim) {
    ControlLaw law;
    law.pieces = {{Point(std::size_t(dim), 0.0), 1.0}};
    law.id = "wiener";
    return single(law);
}

double ControlFamily::size() const {
    double n = catalog.empty() ? 0.0 : std::pow(double(catalog.size()), double(intervals));
    return n + double(extra.size());
}

ControlLaw ControlFamily::law(const std::vector<int>& choice) const {
    PMLAB_REQUIRE(int(choice.size()) == intervals, ConfigurationError, "control choice has wrong length");
    ControlLaw law;
    bool uniform = std::all_of(choice.begin(), choice.end(), [&](int c) { return c == choice[0]; });
    if (uniform) {
        law.pieces = {catalog[std::size_t(choice[0])]};
        law.id = "const[" + action_id(law.pieces[0]) + "]";
        return law;
    }
    law.id = "pw[";
    for (std::size_t j = 0; j < choice.size(); ++j) {
        law.pieces.push_back(catalog[std::size_t(choice[j])]);
        law.id += (j ? "," : "") + std::to_string(choice[j]);
    }
    law.id += "]";
    return law;
}

std::vector<ControlLaw> ControlFamily::enumerate() const {
    std::vector<ControlLaw> out;
    if (!catalog.empty()) {
        PMLAB_REQUIRE(size() <= kExhaustiveLimit, ConfigurationError, "family too large to enumerate");
        if (intervals == 1) {
            for (std::size_t c = 0; c < catalog.size(); ++c) out.push_back(law({int(c)}));
        } else {
            std::vector<int> choice(std::size_t(intervals), 0);
            for (;;) {
                out.push_back(law(choice));
                int j = 0;
                while (j < intervals && ++choice[std::size_t(j)] == int(catalog.size())) choice[std::size_t(j++)] = 0;
                if (j == intervals) break;
            }
        }
    }
    out.insert(out.end(), extra.begin(), extra.end());
    return out;
}

void draw_normals(std::uint64_t seed, std::uint64_t index, std::size_t count, double* out) {
    Rng rng = sample_rng(seed, index);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (std::size_t k = 0; k < count; ++k) out[k] = nd(rng);
}

void simulate_into(const ControlLaw& law, const MeasureFamilySpec& spec, const double* normals,
                   double* values) {
    const int d = spec.dim;
    const std::size_t steps = spec.steps();
    const double h = spec.dt();
    const double sq = std::sqrt(h);
    const std::size_t pieces = law.pieces.size();
    for (int i = 0; i < d; ++i) values[i] = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const ControlAction& a = law.pieces[std::min(pieces - 1, k * pieces / steps)];
        const double* x = values + k * std::size_t(d);
        double* xn = values + (k + 1) * std::size_t(d);
        const double* z = normals + k * std::size_t(d);
        for (int i = 0; i < d; ++i) {
            double b = a.drift[std::size_t(i)];
            if (law.feedback != Feedback::none) {
                double s = x[i] + (spec.state_offset.empty() ? 0.0 : spec.state_offset[std::size_t(i)]);
                double sgn = s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : (law.feedback == Feedback::outward ? 1.0 : 0.0));
                b = (law.feedback == Feedback::outward ? 1.0 : -1.0) * spec.L * sgn;
            }
            xn[i] = x[i] + b * h + a.vol * sq * z[i];
        }
    }
}

std::vector<SampledPath> simulate_controlled(const ControlLaw& law, const MeasureFamilySpec& spec,
                                             std::uint64_t seed, std::size_t n) {
    spec.validate();
    law.validate(spec.L, spec.dim);
    PMLAB_REQUIRE(n >= 1, ConfigurationError, "simulate_controlled: need at least one path");
    const std::size_t steps = spec.steps();
    const std::size_t d = std::size_t(spec.dim);
    std::vector<SampledPath> out(n);
    parallel_for(n, [&](std::size_t i) {
        std::vector<double> z(steps * d), values((steps + 1) * d);
        draw_normals(seed, i, z.size(), z.data());
        simulate_into(law, spec, z.data(), values.data());
        out[i] = SampledPath::from_uniform(spec.dim, spec.t_start, spec.t_end, std::move(values));
    });
    return out;
}

std::vector<Moments> evaluate_laws(const std::vector<ControlLaw>& laws,
                                   const MeasureFamilySpec& spec, std::size_t n,
                                   std::uint64_t seed, std::size_t outputs,
                                   const MultiFunctional& fn) {
    spec.validate();
    for (const auto& l : laws) l.validate(spec.L, spec.dim);
    const std::size_t steps = spec.steps();
    const std::size_t d = std::size_t(spec.dim);
    const SampledPath proto = SampledPath::from_uniform(
        spec.dim, spec.t_start, spec.t_end, std::vector<double>((steps + 1) * d, 0.0));
    return chunked_moments(n, laws.size() * outputs, [&](std::size_t i, double* out) {
        thread_local std::vector<double> z;
        thread_local SampledPath buffer;
        z.resize(steps * d);
        if (buffer.knot_count() != proto.knot_count() || buffer.dim() != proto.dim() ||
            buffer.t_start() != proto.t_start() || buffer.t_end() != proto.t_end())
            buffer = proto;
        draw_normals(seed, i, z.size(), z.data());
        for (std::size_t l = 0; l < laws.size(); ++l) {
            simulate_into(laws[l], spec, z.data(), buffer.mutable_values());
            fn(buffer, out + l * outputs);
        }
    });
}

MCEstimate FamilySearch::best(Sense sense) const {
    MCEstimate est;
    bool first = true;
    for (std::size_t l = 0; l < laws.size(); ++l)
        for (std::size_t k = 0; k < outputs; ++k) {
            const Moments& m = moments[l * outputs + k];
            double v = m.mean();
            bool better = first || (sense == Sense::maximize ? v > est.value : v < est.value);
            if (better) {
                first = false;
                est.value = v;
                est.stderr = m.stderr_of_mean();
                est.n_samples = m.n;
                est.argmax = laws[l].id + (outputs > 1 ? "|k=" + std::to_string(k) : "");
            }
        }
    return est;
}

FamilySearch search_family(const MultiFunctional& fn, std::size_t outputs,
                           const MeasureFamilySpec& spec, const ControlFamily& family,
                           std::size_t n, std::uint64_t seed, Sense sense,
                           const SearchOptions& opts) {
    PMLAB_REQUIRE(family.size() >= 1, ConfigurationError, "control family is empty");
    PMLAB_REQUIRE(n >= 2, ConfigurationError, "need at least two samples");
    FamilySearch res;
    res.outputs = outputs;
    std::map<std::string, std::size_t> seen;
    auto objective = [&](std::size_t l) {
        double best = 0.0;
        for (std::size_t k = 0; k < outputs; ++k) {
            double v = res.moments[l * outputs + k].mean();
            if (k == 0 || (sense == Sense::maximize ? v > best : v < best)) best = v;
        }
        return best;
    };
    auto batch = [&](const std::vector<ControlLaw>& laws) {
        std::vector<ControlLaw> fresh;
        for (const auto& l : laws)
            if (!seen.count(l.id) && std::none_of(fresh.begin(), fresh.end(), [&](const ControlLaw& f) { return f.id == l.id; }))
                fresh.push_back(l);
        if (!fresh.empty()) {
            auto m = evaluate_laws(fresh, spec, n, seed, outputs, fn);
            for (std::size_t l = 0; l < fresh.size(); ++l) {
                seen[fresh[l].id] = res.laws.size();
                res.laws.push_back(fresh[l]);
                res.moments.insert(res.moments.end(), m.begin() + long(l * outputs),
                                   m.begin() + long((l + 1) * outputs));
            }
        }
        std::vector<double> obj;
        for (const auto& l : laws) obj.push_back(objective(seen.at(l.id)));
        return obj;
    };
    auto better = [&](double a, double b) { return sense == Sense::maximize ? a > b : a < b; };

    if (family.size() <= kExhaustiveLimit) {
        batch(family.enumerate());
        return res;
    }
    const int J = family.intervals;
    const int C = int(family.catalog.size());
    std::vector<ControlLaw> constants;
    for (int c = 0; c < C; ++c) constants.push_back(family.law(std::vector<int>(std::size_t(J), c)));
    std::vector<ControlLaw> first = constants;
    first.insert(first.end(), family.extra.begin(), family.extra.end());
    std::vector<double> obj = batch(first);
    std::vector<int> order(static_cast<std::size_t>(C));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return better(obj[std::size_t(a)], obj[std::size_t(b)]); });
    for (int r = 0; r < std::min(opts.restarts, C); ++r) {
        std::vector<int> choice(std::size_t(J), order[std::size_t(r)]);
        double cur = obj[std::size_t(order[std::size_t(r)])];
        for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
            bool improved = false;
            for (int j = 0; j < J; ++j) {
                std::vector<ControlLaw> cands;
                std::vector<int> values;
                for (int c = 0; c < C; ++c) {
                    if (c == choice[std::size_t(j)]) continue;
                    auto alt = choice;
                    alt[std::size_t(j)] = c;
                    cands.push_back(family.law(alt));
                    values.push_back(c);
                }
                auto o = batch(cands);
                for (std::size_t k = 0; k < o.size(); ++k)
                    if (better(o[k], cur)) {
                        cur = o[k];
                        choice[std::size_t(j)] = values[k];
                        improved = true;
                    }
            }
            if (!improved) break;
        }
    }
    return res;
}

MCEstimate upper_expectation(const PathFunctional& xi, const MeasureFamilySpec& spec,
                             const ControlFamily& family, std::size_t n, std::uint64_t seed) {
    auto fn = [&](const SampledPath& p, double* out) { out[0] = xi(p); };
    return search_family(fn, 1, spec, family, n, seed, Sense::maximize).best(Sense::maximize);
}

MCEstimate lower_expectation(const PathFunctional& xi, const MeasureFamilySpec& spec,
                             const ControlFamily& family, std::size_t n, std::uint64_t seed) {
    PathFunctional neg = [&](const SampledPath& p) { return -xi(p); };
    MCEstimate e = upper_expectation(neg, spec, family, n, seed);
    e.value = -e.value;
    return e;
}

double hjb_oracle_1d(const std::function<double(double)>& terminal, double L, double T,
                     const Grid1d& space, std::size_t time_steps) {
    PMLAB_REQUIRE(L > 0.0 && T > 0.0, ConfigurationError, "hjb oracle: L and T must be positive");
    PMLAB_REQUIRE(space.nodes >= 5 && space.hi > space.lo, ConfigurationError, "hjb oracle: bad space grid");
    PMLAB_REQUIRE(space.lo < 0.0 && space.hi > 0.0, ConfigurationError, "hjb oracle: grid must contain 0");
    PMLAB_REQUIRE(time_steps >= 1, ConfigurationError, "hjb oracle: need time steps");
    const double dx = space.step();
    const double dt = T / double(time_steps);
    PMLAB_REQUIRE(dt <= dx * dx / (2.0 * L + L * dx) * (1.0 + 1e-12), ConfigurationError,
                  "hjb oracle: CFL condition violated");
    const std::size_t N = space.nodes;
    std::vector<double> v(N), w(N);
    for (std::size_t i = 0; i < N; ++i) v[i] = terminal(space.lo + double(i) * dx);
    for (std::size_t n = 0; n < time_steps; ++n) {
        for (std::size_t i = 1; i + 1 < N; ++i) {
            double fwd = (v[i + 1] - v[i]) / dx;
            double bwd = (v[i] - v[i - 1]) / dx;
            double drift = std::max({L * fwd, -L * bwd, 0.0});
            double diff = std::max((v[i + 1] - 2.0 * v[i] + v[i - 1]) / (dx * dx), 0.0);
            w[i] = v[i] + dt * (drift + L * diff);
        }
        w[0] = 2.0 * w[1] - w[2];
        w[N - 1] = 2.0 * w[N - 2] - w[N - 3];
        std::swap(v, w);
    }
    double pos = (0.0 - space.lo) / dx;
    auto i = std::size_t(std::floor(pos));
    double f = pos - double(i);
    if (i + 1 >= N) return v[N - 1];
    return v[i] + f * (v[i + 1] - v[i]);
}

}  // namespace pmlab
