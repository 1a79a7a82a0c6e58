#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "isac/harness.hpp"

namespace isac::harness {

namespace {

using Pred = std::function<bool(const ResultRecord&)>;

std::vector<const ResultRecord*> select(const std::vector<ResultRecord>& rs, const Pred& p) {
    std::vector<const ResultRecord*> out;
    for (const auto& r : rs)
        if (p(r)) out.push_back(&r);
    return out;
}

Pred is(const std::string& metric, const std::string& series) {
    return [=](const ResultRecord& r) { return r.metric == metric && r.series == series; };
}

double coord(const ResultRecord& r, const std::string& k) {
    const auto it = r.coords.find(k);
    return it == r.coords.end() ? NAN : it->second;
}

bool near(double a, double b) { return std::abs(a - b) < 1e-9; }

std::optional<double> value_at(const std::vector<ResultRecord>& rs, const std::string& metric, const std::string& series,
                               const std::map<std::string, double>& at) {
    for (const auto& r : rs) {
        if (r.metric != metric || r.series != series) continue;
        bool ok = true;
        for (const auto& [k, v] : at) ok = ok && near(coord(r, k), v);
        if (ok) return r.value;
    }
    return std::nullopt;
}

std::string fmt(double v) { return format_number(v); }

// Reference sidelobe levels at w = 0 and the ISLR(speed) rise at w = 0.6.
constexpr double kPslrDistance = -11.549, kPslrSpeed = -10.791, kPslrTol = 1.5;
constexpr double kIslrGapRef = -4.876 - -15.512, kIslrGapMin = 8.0, kIslrGapTol = 3.0;

void check_ambiguity(const std::vector<ResultRecord>& rs, std::vector<CheckOutcome>& out) {
    for (const auto& [cut, ref] : {std::pair{"distance", kPslrDistance}, std::pair{"speed", kPslrSpeed}}) {
        const auto v = value_at(rs, "pslr_db", cut, {{"w", 0.0}});
        if (!v) continue;
        out.push_back({std::string("PSLR ") + cut + " at w=0 within 1.5 dB of " + fmt(ref), std::abs(*v - ref) <= kPslrTol,
                       "got " + fmt(*v) + " dB"});
    }
    for (const char* metric : {"pslr_db", "islr_db"})
        for (const char* cut : {"distance", "speed"}) {
            auto s = select(rs, is(metric, cut));
            if (s.size() < 2) continue;
            std::sort(s.begin(), s.end(), [](auto* a, auto* b) { return coord(*a, "w") < coord(*b, "w"); });
            bool inc = true;
            std::string d;
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (i && !(s[i]->value > s[i - 1]->value)) inc = false;
                d += (i ? " -> " : "") + fmt(s[i]->value);
            }
            out.push_back({std::string(metric) + " " + cut + " strictly increasing in w", inc, d});
        }
    const auto i0 = value_at(rs, "islr_db", "speed", {{"w", 0.0}});
    const auto i6 = value_at(rs, "islr_db", "speed", {{"w", 0.6}});
    if (i0 && i6) {
        const double gap = *i6 - *i0;
        out.push_back({"ISLR speed gap w=0.6 vs w=0 >= 8 dB and within 3 dB of " + fmt(kIslrGapRef),
                       gap >= kIslrGapMin && std::abs(gap - kIslrGapRef) <= kIslrGapTol, "gap " + fmt(gap) + " dB"});
    }
}

void check_separation(const std::vector<ResultRecord>& rs, std::vector<CheckOutcome>& out) {
    std::ostringstream d;
    bool ok = true;
    const auto s = select(rs, [](const ResultRecord& r) { return r.metric == "correlation"; });
    for (const auto* r : s) {
        ok = ok && r->value > 0.9;
        d << r->series << "=" << fmt(r->value) << " ";
    }
    if (!s.empty()) out.push_back({"every path correlation > 0.9", ok, d.str()});
}

void check_separation_sweep(const std::vector<ResultRecord>& rs, std::vector<CheckOutcome>& out) {
    // The trend is asserted for the 20 dB scene; lower SNRs are noise-dominated.
    for (double snr : {20.0}) {
        auto s = select(rs, [&](const ResultRecord& r) { return r.metric == "correlation" && near(coord(r, "snr_db"), snr); });
        std::sort(s.begin(), s.end(), [](auto* a, auto* b) { return coord(*a, "w") < coord(*b, "w"); });
        bool mono = true;
        std::string d;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i && s[i]->value > s[i - 1]->value) mono = false;
            d += (i ? " -> " : "") + fmt(s[i]->value);
        }
        out.push_back({"correlation non-increasing in w at SNR " + fmt(snr) + " dB", mono, d});
    }
}

void check_lfm(const std::vector<ResultRecord>& rs, std::vector<CheckOutcome>& out) {
    for (const char* metric : {"nmse_f", "nmse_k"}) {
        const auto fine = select(rs, is(metric, "fine"));
        bool any = false, ok = true;
        std::string bad;
        for (const auto* f : fine) {
            const auto r = value_at(rs, metric, "revised", f->coords);
            if (!r) continue;
            any = true;
            if (*r > f->value) {
                ok = false;
                bad += "w=" + fmt(coord(*f, "w")) + ",snr=" + fmt(coord(*f, "snr_db")) + " ";
            }
        }
        if (any) out.push_back({std::string(metric) + ": revised <= fine at every point", ok, ok ? "" : "fails at " + bad});

        // Floor for w = 0.2: nothing beyond 5 dB improves by more than 20 %.
        const auto at5 = value_at(rs, metric, "revised", {{"w", 0.2}, {"snr_db", 5.0}});
        if (!at5) continue;
        bool floor = true;
        std::string d = "5 dB: " + fmt(*at5);
        for (const auto* r : select(rs, is(metric, "revised")))
            if (near(coord(*r, "w"), 0.2) && coord(*r, "snr_db") > 5.0) {
                floor = floor && r->value >= 0.8 * *at5;
                d += ", " + fmt(coord(*r, "snr_db")) + " dB: " + fmt(r->value);
            }
        out.push_back({std::string(metric) + ": w=0.2 floor reached by 5 dB", floor, d});
    }
}

void check_sa(const std::vector<ResultRecord>& rs, std::vector<CheckOutcome>& out) {
    std::set<double> ws;
    for (const auto& r : rs)
        if (r.metric == "sa_objective") ws.insert(coord(r, "w"));
    for (double w : ws) {
        auto s = select(rs, [&](const ResultRecord& r) { return r.metric == "sa_objective" && near(coord(r, "w"), w); });
        std::sort(s.begin(), s.end(), [](auto* a, auto* b) { return coord(*a, "iteration") < coord(*b, "iteration"); });
        const double fin = s.back()->value;
        const ResultRecord* at150 = nullptr;
        for (const auto* r : s)
            if (near(coord(*r, "iteration"), 150.0)) at150 = r;
        if (!at150) continue;
        out.push_back({"w=" + fmt(w) + ": median best objective within 5% of final by iteration 150",
                       std::abs(at150->value - fin) <= 0.05 * std::abs(fin),
                       "iter150 " + fmt(at150->value) + ", final " + fmt(fin)});
    }
}

void check_channel(const std::vector<ResultRecord>& rs, std::vector<CheckOutcome>& out) {
    bool above = true, below = true, any = false;
    for (const auto* c : select(rs, is("mse_h_db", "CML"))) {
        const auto lb = value_at(rs, "crlb_db", "CRLB", c->coords);
        const auto ls = value_at(rs, "mse_h_db", "TDLS", c->coords);
        if (!lb || !ls) continue;
        any = true;
        above = above && c->value >= *lb;
        below = below && c->value < *ls;
        if (near(coord(*c, "w"), 0.2) && near(coord(*c, "snr_db"), 15.0))
            out.push_back({"CML at least 1.5 dB below TDLS at w=0.2, SNR 15 dB", *ls - c->value >= 1.5,
                           "gap " + fmt(*ls - c->value) + " dB"});
    }
    if (any) {
        out.push_back({"CML MSE never below the CRLB", above, ""});
        out.push_back({"CML MSE below TDLS at every point", below, ""});
    }
}

void check_ber_weight(const std::vector<ResultRecord>& rs, std::vector<CheckOutcome>& out) {
    for (const auto* ws : select(rs, [](const ResultRecord& r) { return r.metric == "w_star"; })) {
        const double snr = coord(*ws, "snr_db");
        const ResultRecord* best = nullptr;
        for (const auto* r : select(rs, is("ber", "CML")))
            if (near(coord(*r, "snr_db"), snr) && (!best || r->value < best->value)) best = r;
        if (!best) continue;
        const double wb = coord(*best, "w");
        out.push_back({"BER-minimising w within 0.05 of w* at SNR " + fmt(snr) + " dB", std::abs(wb - ws->value) <= 0.05,
                       "argmin " + fmt(wb) + ", w* " + fmt(ws->value)});
    }
}

void check_pairwise(const std::vector<ResultRecord>& rs, const std::string& metric, const std::string& a,
                    const std::string& b, bool strict_greater, std::vector<CheckOutcome>& out) {
    bool ok = true, any = false;
    std::string bad;
    for (const auto* r : select(rs, is(metric, a))) {
        const auto o = value_at(rs, metric, b, r->coords);
        if (!o) continue;
        any = true;
        const bool pass = strict_greater ? r->value > *o : r->value <= *o;
        if (!pass) {
            ok = false;
            bad += "snr=" + fmt(coord(*r, "snr_db")) + " ";
        }
    }
    if (any)
        out.push_back({metric + ": " + a + (strict_greater ? " > " : " <= ") + b + " at every point", ok,
                       ok ? "" : "fails at " + bad});
}

void check_targets(const std::vector<ResultRecord>& rs, std::vector<CheckOutcome>& out) {
    for (const auto& r : rs)
        if (r.metric == "distance_err_pct" || r.metric == "speed_err_pct")
            out.push_back({r.series + " " + r.metric + " <= 1%", r.value <= 1.0, fmt(r.value) + " %"});
}

}  // namespace

std::vector<CheckOutcome> check_records(const std::string& scenario, const std::vector<ResultRecord>& all) {
    const ScenarioInfo& info = scenario_info(scenario);
    std::vector<ResultRecord> rs;
    for (const auto& r : all)
        if (r.scenario == scenario) rs.push_back(r);
    std::vector<CheckOutcome> out;
    switch (info.kind) {
        case ScenarioKind::Ambiguity: check_ambiguity(rs, out); break;
        case ScenarioKind::Separation: check_separation(rs, out); break;
        case ScenarioKind::SeparationSweep: check_separation_sweep(rs, out); break;
        case ScenarioKind::LfmNmse: check_lfm(rs, out); break;
        case ScenarioKind::SaConvergence: check_sa(rs, out); break;
        case ScenarioKind::ChannelMse: check_channel(rs, out); break;
        case ScenarioKind::BerWeight: check_ber_weight(rs, out); break;
        case ScenarioKind::BerSnr: check_pairwise(rs, "ber", "CML", "TDLS", false, out); break;
        case ScenarioKind::Throughput:
            check_pairwise(rs, "throughput", "CML", "TDOP-LS", true, out);
            check_pairwise(rs, "throughput", "CML", "TDOP-MMSE", true, out);
            check_pairwise(rs, "throughput", "CML", "TDLS", true, out);
            break;
        case ScenarioKind::MultiTarget: check_targets(rs, out); break;
    }
    return out;
}

}  // namespace isac::harness
