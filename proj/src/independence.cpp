#include "xda/independence.hpp"

#include <atomic>
#include <cmath>
#include <unordered_map>

#include <boost/math/special_functions/gamma.hpp>

#include "xda/error.hpp"

namespace xda {

namespace {

std::atomic<std::uint64_t> g_ci_calls{0};

void require_categorical(const Column& c) {
    if (!c.is_dimension()) throw DataError("CI test needs categorical column, got measure " + c.name());
}

// Compact stratum id per row for the joint configuration of `z`.
std::vector<std::uint32_t> strata(std::span<const Column* const> z, std::size_t n, std::uint32_t& count) {
    std::vector<std::uint32_t> id(n, 0);
    count = 1;
    for (const Column* c : z) {
        std::unordered_map<std::uint64_t, std::uint32_t> remap;
        auto codes = c->codes();
        const std::uint64_t card = c->cardinality();
        for (std::size_t r = 0; r < n; ++r) {
            std::uint64_t key = static_cast<std::uint64_t>(id[r]) * card + codes[r];
            auto [it, fresh] = remap.emplace(key, static_cast<std::uint32_t>(remap.size()));
            id[r] = it->second;
        }
        count = static_cast<std::uint32_t>(remap.size());
    }
    return id;
}

}  // namespace

CiResult ci_test(const Column& x, const Column& y, std::span<const Column* const> z,
                 const CiOptions& options) {
    ++g_ci_calls;
    require_categorical(x);
    require_categorical(y);
    for (const Column* c : z) {
        require_categorical(*c);
        if (c->name() == x.name() || c->name() == y.name())
            throw DataError("conditioning set contains a tested variable");
    }
    if (x.name() == y.name()) throw DataError("CI test of a variable with itself");

    const std::size_t n = x.size();
    std::uint32_t ns = 0;
    auto sid = strata(z, n, ns);
    const std::size_t cx = x.cardinality(), cy = y.cardinality();
    auto xc = x.codes();
    auto yc = y.codes();

    std::vector<std::vector<std::size_t>> rows(ns);
    for (std::size_t r = 0; r < n; ++r) rows[sid[r]].push_back(r);

    CiResult res;
    double stat = 0.0;
    long dof = 0;
    double cells = 0.0;
    std::vector<double> table(cx * cy), rx(cx), ry(cy);
    for (const auto& rs : rows) {
        if (rs.empty()) continue;
        std::fill(table.begin(), table.end(), 0.0);
        std::fill(rx.begin(), rx.end(), 0.0);
        std::fill(ry.begin(), ry.end(), 0.0);
        for (auto r : rs) {
            table[xc[r] * cy + yc[r]] += 1.0;
            rx[xc[r]] += 1.0;
            ry[yc[r]] += 1.0;
        }
        long lx = 0, ly = 0;
        for (double v : rx) lx += v > 0;
        for (double v : ry) ly += v > 0;
        cells += static_cast<double>(lx * ly);
        dof += (lx - 1) * (ly - 1);
        const double total = static_cast<double>(rs.size());
        for (std::size_t i = 0; i < cx; ++i) {
            if (rx[i] == 0) continue;
            for (std::size_t j = 0; j < cy; ++j) {
                if (ry[j] == 0) continue;
                const double o = table[i * cy + j];
                const double e = rx[i] * ry[j] / total;
                if (options.statistic == CiStatistic::GSquared) {
                    if (o > 0) stat += 2.0 * o * std::log(o / e);
                } else {
                    stat += (o - e) * (o - e) / e;
                }
            }
        }
    }
    res.statistic = std::max(0.0, stat);
    res.dof = dof;
    res.insufficient_data = cells > 0 && static_cast<double>(n) / cells < options.min_avg_cell;
    res.p_value = dof > 0 ? boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * res.statistic) : 1.0;
    res.independent = res.insufficient_data || res.p_value > options.alpha;
    return res;
}

CiResult ci_test(const Dataset& d, const std::string& x, const std::string& y,
                 const std::vector<std::string>& z, const CiOptions& options) {
    std::vector<const Column*> zc;
    for (const auto& name : z) zc.push_back(&d.column(name));
    return ci_test(d.column(x), d.column(y), zc, options);
}

CiResult ci_test(const Dataset& d, const std::string& x, const std::string& y,
                 const std::vector<std::string>& z, double alpha) {
    CiOptions o;
    o.alpha = alpha;
    return ci_test(d, x, y, z, o);
}

std::uint64_t ci_test_count() { return g_ci_calls.load(); }
void reset_ci_test_count() { g_ci_calls = 0; }

}  // namespace xda
