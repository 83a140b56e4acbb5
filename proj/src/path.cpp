#include "pmlab/path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pmlab/errors.hpp"

namespace pmlab {

double norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

SampledPath::SampledPath(int dim, double t_start, double t_end, std::vector<double> times,
                         std::vector<double> values)
    : dim_(dim), t_start_(t_start), t_end_(t_end), times_(std::move(times)),
      values_(std::move(values)) {
    validate();
}

void SampledPath::validate() const {
    PMLAB_REQUIRE(dim_ >= 1, DimensionError, "path dimension must be positive");
    PMLAB_REQUIRE(!times_.empty(), DomainError, "path needs at least one knot");
    PMLAB_REQUIRE(times_.front() == t_start_, DomainError, "first knot must sit at t_start");
    PMLAB_REQUIRE(times_.back() <= t_end_, DomainError, "last knot after t_end");
    PMLAB_REQUIRE(values_.size() == times_.size() * std::size_t(dim_), DimensionError,
                  "knot values do not match knot count times dimension");
    for (std::size_t i = 1; i < times_.size(); ++i)
        PMLAB_REQUIRE(times_[i] > times_[i - 1], OrderingError,
                      "knot times must be strictly increasing");
    for (double v : values_)
        PMLAB_REQUIRE(std::isfinite(v), DomainError, "non-finite path value");
}

SampledPath SampledPath::zero(int dim, double t_start, double t_end) {
    return SampledPath(dim, t_start, t_end, {t_start}, std::vector<double>(std::size_t(dim), 0.0));
}

SampledPath SampledPath::from_uniform(int dim, double t_start, double t_end,
                                      std::vector<double> values) {
    std::size_t n = values.size() / std::size_t(dim);
    PMLAB_REQUIRE(n >= 1, DomainError, "uniform path needs knots");
    std::vector<double> times(n);
    double step = n > 1 ? (t_end - t_start) / double(n - 1) : 0.0;
    for (std::size_t k = 0; k < n; ++k) times[k] = t_start + double(k) * step;
    if (n > 1) times[n - 1] = t_end;
    return SampledPath(dim, t_start, t_end, std::move(times), std::move(values));
}

std::size_t SampledPath::segment_index(double t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return 0;
    return std::size_t(it - times_.begin()) - 1;
}

void SampledPath::value_into(double t, double* out) const {
    if (!(t >= t_start_)) throw DomainError("path evaluated before t_start");
    std::size_t k = segment_index(t);
    const double* a = values_.data() + k * std::size_t(dim_);
    if (k + 1 >= times_.size() || t == times_[k]) {
        std::copy(a, a + dim_, out);
        return;
    }
    const double* b = a + dim_;
    double w = (t - times_[k]) / (times_[k + 1] - times_[k]);
    for (int i = 0; i < dim_; ++i) out[i] = a[i] + w * (b[i] - a[i]);
}

Point SampledPath::value(double t) const {
    Point p(static_cast<std::size_t>(dim_));
    value_into(t, p.data());
    return p;
}

double SampledPath::value1(double t) const {
    if (dim_ == 1) {
        double v;
        value_into(t, &v);
        return v;
    }
    return value(t)[0];
}

SampledPath SampledPath::truncated(double t) const {
    PMLAB_REQUIRE(t >= t_start_ && t <= t_end_, DomainError, "truncation time outside path");
    std::vector<double> times, values;
    for (std::size_t k = 0; k < times_.size() && times_[k] < t; ++k) {
        times.push_back(times_[k]);
        auto v = knot_value(k);
        values.insert(values.end(), v.begin(), v.end());
    }
    if (times.empty() || times.back() < t) {
        Point v = value(t);
        times.push_back(t);
        values.insert(values.end(), v.begin(), v.end());
    }
    return SampledPath(dim_, t_start_, t, std::move(times), std::move(values));
}

std::string SampledPath::to_csv() const {
    std::string out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "# t_end=%.17g\n", t_end_);
    out += buf;
    out += "t";
    for (int i = 0; i < dim_; ++i) out += ",x" + std::to_string(i + 1);
    out += "\n";
    for (std::size_t k = 0; k < times_.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", times_[k]);
        out += buf;
        for (double v : knot_value(k)) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

SampledPath SampledPath::from_csv(const std::string& text, double t_end) {
    std::istringstream in(text);
    std::string line;
    std::vector<double> times, values;
    int dim = -1;
    bool have_end = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto pos = line.find("t_end=");
            if (pos != std::string::npos) {
                t_end = std::strtod(line.c_str() + pos + 6, nullptr);
                have_end = true;
            }
            continue;
        }
        if (line[0] == 't') {
            dim = int(std::count(line.begin(), line.end(), ','));
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        int col = 0;
        while (std::getline(row, cell, ',')) {
            double v = std::strtod(cell.c_str(), nullptr);
            if (col == 0)
                times.push_back(v);
            else
                values.push_back(v);
            ++col;
        }
        if (dim < 0) dim = col - 1;
        PMLAB_REQUIRE(col - 1 == dim, DimensionError, "ragged CSV row");
    }
    PMLAB_REQUIRE(dim >= 1 && !times.empty(), DomainError, "empty path CSV");
    if (!have_end && t_end < times.back()) t_end = times.back();
    double start = times.front();
    return SampledPath(dim, start, t_end, std::move(times), std::move(values));
}

nlohmann::json SampledPath::to_json() const {
    nlohmann::json knots = nlohmann::json::array();
    for (std::size_t k = 0; k < times_.size(); ++k) {
        nlohmann::json row = nlohmann::json::array();
        row.push_back(times_[k]);
        for (double v : knot_value(k)) row.push_back(v);
        knots.push_back(row);
    }
    return {{"dim", dim_}, {"t_start", t_start_}, {"t_end", t_end_}, {"knots", knots}};
}

SampledPath SampledPath::from_json(const nlohmann::json& j) {
    int dim = j.at("dim").get<int>();
    std::vector<double> times, values;
    for (const auto& row : j.at("knots")) {
        PMLAB_REQUIRE(int(row.size()) == dim + 1, DimensionError, "knot row has wrong length");
        times.push_back(row[0].get<double>());
        for (int i = 0; i < dim; ++i) values.push_back(row[std::size_t(i) + 1].get<double>());
    }
    return SampledPath(dim, j.at("t_start").get<double>(), j.at("t_end").get<double>(),
                       std::move(times), std::move(values));
}

bool SampledPath::operator==(const SampledPath& o) const {
    return dim_ == o.dim_ && t_start_ == o.t_start_ && t_end_ == o.t_end_ &&
           times_ == o.times_ && values_ == o.values_;
}

Point Partition::sum() const {
    Point s(std::size_t(dim), 0.0);
    for (const auto& p : points)
        for (int i = 0; i < dim; ++i) s[std::size_t(i)] += p.increment[std::size_t(i)];
    return s;
}

Partition Partition::prefix(std::size_t n) const {
    Partition out = *this;
    out.points.resize(std::min(n, points.size()));
    out.terminal = false;
    return out;
}

Partition Partition::extended(double time, const Point& increment) const {
    Partition out = *this;
    out.points.push_back({time, increment});
    out.terminal = false;
    return out;
}

double sup_norm(const SampledPath& path, double t) {
    if (!(t >= path.t_start() && t <= path.t_end()))
        throw DomainError("sup_norm: t outside the path domain");
    double best = 0.0;
    for (std::size_t k = 0; k < path.knot_count() && path.knot_time(k) <= t; ++k)
        best = std::max(best, norm(path.knot_value(k)));
    Point v = path.value(t);
    return std::max(best, norm(v));
}

double d_infinity(const PathPoint& a, const PathPoint& b) {
    const SampledPath& pa = a.omega;
    const SampledPath& pb = b.omega;
    PMLAB_REQUIRE(pa.dim() == pb.dim(), DimensionError, "d_infinity: dimension mismatch");
    PMLAB_REQUIRE(a.t >= pa.t_start() && a.t <= pa.t_end(), DomainError,
                  "d_infinity: first time outside its path");
    PMLAB_REQUIRE(b.t >= pb.t_start() && b.t <= pb.t_end(), DomainError,
                  "d_infinity: second time outside its path");
    PMLAB_REQUIRE(pa.t_start() == pb.t_start(), DomainError, "d_infinity: paths start apart");
    std::vector<double> grid;
    for (double s : pa.times())
        if (s <= a.t) grid.push_back(s);
    for (double s : pb.times())
        if (s <= b.t) grid.push_back(s);
    grid.push_back(a.t);
    grid.push_back(b.t);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    int d = pa.dim();
    Point va(static_cast<std::size_t>(d)), vb(static_cast<std::size_t>(d)), diff(static_cast<std::size_t>(d));
    double best = 0.0;
    for (double s : grid) {
        pa.value_into(std::min(s, a.t), va.data());
        pb.value_into(std::min(s, b.t), vb.data());
        for (int i = 0; i < d; ++i) diff[std::size_t(i)] = va[std::size_t(i)] - vb[std::size_t(i)];
        best = std::max(best, norm(diff));
    }
    return std::sqrt(std::fabs(a.t - b.t)) + best;
}

SampledPath concatenate(const SampledPath& prefix, double t, const SampledPath& suffix) {
    PMLAB_REQUIRE(prefix.dim() == suffix.dim(), DimensionError, "concatenate: dimension mismatch");
    PMLAB_REQUIRE(t >= prefix.t_start() && t <= prefix.t_end(), DomainError,
                  "concatenate: prefix does not cover t");
    PMLAB_REQUIRE(suffix.t_start() == t, DomainError, "concatenate: suffix must start at t");
    for (double v : suffix.knot_value(0))
        PMLAB_REQUIRE(v == 0.0, AnchorError, "concatenate: suffix not anchored at the origin");
    int d = prefix.dim();
    std::vector<double> times, values;
    for (std::size_t k = 0; k < prefix.knot_count() && prefix.knot_time(k) < t; ++k) {
        times.push_back(prefix.knot_time(k));
        auto v = prefix.knot_value(k);
        values.insert(values.end(), v.begin(), v.end());
    }
    Point base = prefix.value(t);
    times.push_back(t);
    values.insert(values.end(), base.begin(), base.end());
    for (std::size_t k = 1; k < suffix.knot_count(); ++k) {
        times.push_back(suffix.knot_time(k));
        auto v = suffix.knot_value(k);
        for (int i = 0; i < d; ++i) values.push_back(base[std::size_t(i)] + v[std::size_t(i)]);
    }
    return SampledPath(d, prefix.t_start(), suffix.t_end(), std::move(times), std::move(values));
}

SampledPath interpolate_partition(const Partition& pi, double t0, double T) {
    int d = pi.dim;
    std::vector<double> times{t0};
    std::vector<double> values(std::size_t(d), 0.0);
    Point acc(std::size_t(d), 0.0);
    double prev = t0;
    for (const auto& p : pi.points) {
        PMLAB_REQUIRE(p.time > prev && p.time < T, OrderingError,
                      "partition times must increase strictly inside (t0, T)");
        PMLAB_REQUIRE(p.increment.size() == std::size_t(d), DimensionError,
                      "partition increment has wrong dimension");
        for (int i = 0; i < d; ++i) acc[std::size_t(i)] += p.increment[std::size_t(i)];
        times.push_back(p.time);
        values.insert(values.end(), acc.begin(), acc.end());
        prev = p.time;
    }
    return SampledPath(d, t0, T, std::move(times), std::move(values));
}

}  // namespace pmlab
