#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "qzzb/noise.hpp"
#include "qzzb/probes.hpp"

namespace qzzb_cli {

using nlohmann::json;
using namespace qzzb;

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> parse_range(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double lo = 0, hi = 0;
        long steps = -1;
        std::istringstream ss(text);
        std::string part;
        std::vector<std::string> parts;
        while (std::getline(ss, part, ':')) parts.push_back(part);
        if (parts.size() < 2 || parts.size() > 3)
            throw std::invalid_argument("range must be lo:hi[:steps]");
        lo = std::stod(parts[0]);
        hi = std::stod(parts[1]);
        steps = parts.size() == 3 ? std::stol(parts[2])
                                  : std::lround(hi - lo) + 1;  // unit steps
        if (steps < 1 || hi < lo) throw std::invalid_argument("bad range " + text);
        if (steps == 1) return {lo};
        for (long i = 0; i < steps; ++i)
            out.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                   static_cast<double>(steps - 1));
        return out;
    }
    std::istringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(std::stod(part));
    if (out.empty()) throw std::invalid_argument("empty range");
    return out;
}

std::string config_json(const RunConfig& cfg) {
    json j;
    j["probe"] = cfg.probe;
    j["noise"] = cfg.noise;
    j["d"] = cfg.d;
    j["n"] = cfg.n;
    if (!cfg.w.empty()) j["w"] = cfg.w;
    if (!cfg.eta.empty()) j["eta"] = cfg.eta;
    if (!cfg.beta.empty()) j["beta"] = cfg.beta;
    if (!cfg.r.empty()) j["r"] = cfg.r;
    j["lambda"] = cfg.lambda;
    j["quad_points"] = cfg.quad_points;
    j["valley_fill"] = cfg.valley_fill;
    j["integrate"] = cfg.integrate;
    j["format"] = cfg.format;
    if (!cfg.figure.empty()) j["figure"] = cfg.figure;
    return j.dump();
}

namespace {

struct ModeSetup {
    std::vector<GeneratorStats> stats;    // noiseless per-mode statistics
    std::vector<EnergySpectrum> spectra;  // empty when no spectrum route exists
    std::int64_t n_max = 0;               // photon cap entering the loss model
    std::optional<double> r_used;
    std::vector<std::string> warnings;
};

// Per-mode statistics for the configured probe family and noise model; all
// families here are mode-symmetric so a single stat is replicated d times.
ModeSetup build_modes(const RunConfig& cfg, double dd, double nn,
                      std::optional<double> eta, std::optional<double> beta,
                      std::optional<double> r_override) {
    const auto d = static_cast<std::int64_t>(std::llround(dd));
    if (d < 1 || std::abs(dd - static_cast<double>(d)) > 1e-9)
        throw std::invalid_argument("d must be a positive integer");

    ModeSetup out;
    double mean = 0.0, var = 0.0;
    std::int64_t n_max = 0;
    std::optional<double> alpha_sq;

    if (cfg.probe == "optimal") {
        const auto n = static_cast<std::int64_t>(std::llround(nn));
        if (n < 1 || std::abs(nn - static_cast<double>(n)) > 1e-9)
            throw std::invalid_argument("optimal probe needs integer n >= 1");
        const auto spec = OptimalProbeSpec::make(d, n);
        alpha_sq = spec.alpha * spec.alpha;
        mean = *alpha_sq * static_cast<double>(n);
        var = *alpha_sq * (1.0 - *alpha_sq) * static_cast<double>(n) * static_cast<double>(n);
        n_max = n;
    } else if (cfg.probe == "noon") {
        const auto n = static_cast<std::int64_t>(std::llround(nn));
        if (n < 1 || std::abs(nn - static_cast<double>(n)) > 1e-9)
            throw std::invalid_argument("noon probe needs integer n >= 1");
        const std::int64_t per = n / d;
        if (per < 1) throw std::invalid_argument("noon probe needs n >= d photons");
        if (per * d != n)
            out.warnings.push_back("n not divisible by d; using floor(n/d) per probe");
        alpha_sq = 0.5;
        mean = static_cast<double>(per) / 2.0;
        var = static_cast<double>(per) * static_cast<double>(per) / 4.0;
        n_max = per;
    } else if (cfg.probe == "squeezed") {
        const std::int64_t modes = d + 1;
        const double r = r_override ? *r_override : match_photon_budget(modes, nn);
        out.r_used = r;
        const auto st = squeezed_mode_stats(modes, r)[0];
        mean = st.mean;
        var = st.variance;
        n_max = 0;  // no finite photon cap; loss model unavailable
    } else {
        throw std::invalid_argument("unknown probe family: " + cfg.probe);
    }

    if (cfg.noise == "none") {
        if (cfg.probe == "optimal") {
            // Spectrum route available for the integral bound.
            const auto n = static_cast<std::int64_t>(std::llround(nn));
            out.spectra.assign(static_cast<std::size_t>(d),
                               mode_number_spectrum(optimal_probe(d, n), 1));
        } else if (cfg.probe == "noon") {
            out.spectra.assign(static_cast<std::size_t>(d),
                               mode_number_spectrum(noon_state(n_max), 0));
        }
    } else if (cfg.noise == "loss") {
        if (!eta) throw std::invalid_argument("loss noise needs --eta");
        if (!alpha_sq)
            throw std::invalid_argument("loss model needs a finite-photon probe family");
    } else if (cfg.noise == "diffusion") {
        if (!beta) throw std::invalid_argument("diffusion noise needs --beta");
    } else {
        throw std::invalid_argument("unknown noise model: " + cfg.noise);
    }

    out.n_max = n_max;
    out.stats.assign(static_cast<std::size_t>(d), GeneratorStats(mean, var, 0.0));
    return out;
}

RowResult evaluate_cell(const RunConfig& cfg, double dd, double nn, std::optional<double> w,
                        std::optional<double> eta, std::optional<double> beta,
                        std::optional<double> r_override) {
    const SpeedLimitConstants k(cfg.lambda);
    const auto d = static_cast<std::int64_t>(std::llround(dd));
    auto setup = build_modes(cfg, dd, nn, eta, beta, r_override);

    // Noise-adjusted per-mode statistics for width selection and bounds.
    std::vector<GeneratorStats> width_stats = setup.stats;
    if (cfg.noise == "loss") {
        const auto base = setup.stats[0];
        const auto opt = photon_loss_optimize(base.mean, base.variance, setup.n_max, *eta);
        width_stats.assign(static_cast<std::size_t>(d),
                           GeneratorStats(opt.ml.effective_mean, opt.mt.variance, 0.0));
    } else if (cfg.noise == "diffusion") {
        const auto base = setup.stats[0];
        const auto opt = phase_diffusion_optimize(base.mean, base.variance, *beta);
        width_stats.assign(static_cast<std::size_t>(d),
                           GeneratorStats(opt.ml.effective_mean, opt.mt.variance, 0.0));
    }

    PriorWindow prior = w ? PriorWindow(std::vector<double>(static_cast<std::size_t>(d), 0.0),
                                        std::vector<double>(static_cast<std::size_t>(d), *w))
                          : auto_prior(width_stats, k);

    RowResult row;
    row.d = dd;
    row.n = nn;
    row.w = prior.widths[0];
    row.eta = eta;
    row.beta = beta;
    row.r = setup.r_used ? setup.r_used : r_override;

    if (cfg.noise == "none") {
        if (cfg.integrate && !setup.spectra.empty()) {
            QuadratureConfig qc;
            qc.intervals = cfg.quad_points;
            qc.valley_fill = cfg.valley_fill;
            row.report = qzzb_vector_bound(setup.spectra, prior, qc, k);
        } else {
            if (cfg.integrate)
                throw std::invalid_argument(
                    "--integrate needs a spectrum route (optimal or noon probe, no noise)");
            row.report = combined_bound(setup.stats, prior, k);
        }
    } else if (cfg.noise == "loss") {
        const auto base = setup.stats[0];
        const std::vector<LossyModeInput> modes(static_cast<std::size_t>(d),
                                                {base.mean, base.variance, setup.n_max});
        row.report = photon_loss_vector_bound(
            modes, std::vector<double>(static_cast<std::size_t>(d), *eta), prior, k);
    } else {
        const auto base = setup.stats[0];
        const std::vector<DiffusedModeInput> modes(static_cast<std::size_t>(d),
                                                   {base.mean, base.variance});
        row.report = phase_diffusion_vector_bound(
            modes, std::vector<double>(static_cast<std::size_t>(d), *beta), prior, k);
    }
    for (const auto& wmsg : setup.warnings) row.report.warnings.push_back(wmsg);

    // Constant-advantage diagnostic: ratio of the NOON-IE MT bound to the
    // optimal-probe SE ML bound, evaluated at the nearest divisible budget.
    // Independent of n by construction.
    if (cfg.probe == "optimal" && cfg.noise == "none") {
        const auto n_int = static_cast<std::int64_t>(std::llround(nn));
        if (n_int >= d) {
            const std::int64_t n_div = (n_int / d) * d;
            row.advantage = advantage_ratio(d, n_div, k);
        }
    }
    return row;
}

bool all_true(const std::vector<bool>& v) {
    for (bool b : v)
        if (!b) return false;
    return true;
}

std::string join_warnings(const std::vector<std::string>& ws) {
    std::string out;
    for (const auto& w : ws) {
        if (!out.empty()) out += "; ";
        out += w;
    }
    return out;
}

class Emitter {
public:
    Emitter(const RunConfig& cfg) : cfg_(cfg) {
        if (!cfg.output.empty()) {
            file_.open(cfg.output);
            if (!file_) throw std::runtime_error("cannot open output file " + cfg.output);
        }
    }

    std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

    void emit_rows(const std::vector<RowResult>& rows) {
        if (cfg_.format == "json") {
            json doc;
            doc["config"] = json::parse(config_json(cfg_));
            doc["rows"] = json::array();
            for (const auto& r : rows) doc["rows"].push_back(row_json(r));
            out() << doc.dump(2) << "\n";
            return;
        }
        out() << "# config " << config_json(cfg_) << "\n";
        out() << "probe,noise,d,n,w,eta,beta,r,lambda,per_mode_ml,per_mode_mt,"
                 "per_mode_integral,total_ml,total_mt,total_combined,total_integral,"
                 "advantage_ratio,ml_valid,mt_valid,warnings\n";
        for (const auto& r : rows) {
            const auto& rep = r.report;
            out() << cfg_.probe << ',' << cfg_.noise << ',' << format_double(r.d) << ','
                  << format_double(r.n) << ',' << format_double(r.w) << ','
                  << (r.eta ? format_double(*r.eta) : "") << ','
                  << (r.beta ? format_double(*r.beta) : "") << ','
                  << (r.r ? format_double(*r.r) : "") << ',' << format_double(cfg_.lambda)
                  << ',' << format_double(rep.per_mode_ml.front()) << ','
                  << format_double(rep.per_mode_mt.front()) << ','
                  << (rep.per_mode_integral.empty()
                          ? ""
                          : format_double(rep.per_mode_integral.front()))
                  << ',' << format_double(rep.total_ml) << ',' << format_double(rep.total_mt)
                  << ',' << format_double(rep.total_combined) << ','
                  << (rep.total_integral ? format_double(*rep.total_integral) : "") << ','
                  << (r.advantage ? format_double(*r.advantage) : "") << ','
                  << (all_true(rep.ml_valid) ? 1 : 0) << ','
                  << (all_true(rep.mt_valid) ? 1 : 0) << ",\""
                  << join_warnings(rep.warnings) << "\"\n";
        }
    }

    json row_json(const RowResult& r) {
        const auto& rep = r.report;
        json j;
        j["d"] = r.d;
        j["n"] = r.n;
        j["w"] = r.w;
        if (r.eta) j["eta"] = *r.eta;
        if (r.beta) j["beta"] = *r.beta;
        if (r.r) j["r"] = *r.r;
        if (r.advantage) j["advantage_ratio"] = *r.advantage;
        auto sanitize = [](const std::vector<double>& v) {
            json arr = json::array();
            for (double x : v)
                arr.push_back(std::isinf(x) ? json("inf") : json(x));
            return arr;
        };
        j["per_mode_ml"] = sanitize(rep.per_mode_ml);
        j["per_mode_mt"] = sanitize(rep.per_mode_mt);
        if (!rep.per_mode_integral.empty())
            j["per_mode_integral"] = sanitize(rep.per_mode_integral);
        j["total_ml"] = std::isinf(rep.total_ml) ? json("unbounded") : json(rep.total_ml);
        j["total_mt"] = std::isinf(rep.total_mt) ? json("unbounded") : json(rep.total_mt);
        j["total_combined"] =
            std::isinf(rep.total_combined) ? json("unbounded") : json(rep.total_combined);
        if (rep.total_integral) j["total_integral"] = *rep.total_integral;
        j["ml_valid"] = rep.ml_valid;
        j["mt_valid"] = rep.mt_valid;
        j["warnings"] = rep.warnings;
        return j;
    }

private:
    const RunConfig& cfg_;
    std::ofstream file_;
};

std::optional<double> first_or_none(const std::vector<double>& v) {
    return v.empty() ? std::nullopt : std::optional<double>(v.front());
}

} // namespace

int cmd_bound(const RunConfig& cfg) {
    const auto row = evaluate_cell(cfg, cfg.d.front(), cfg.n.front(),
                                   first_or_none(cfg.w), first_or_none(cfg.eta),
                                   first_or_none(cfg.beta), first_or_none(cfg.r));
    Emitter emitter(cfg);
    emitter.emit_rows({row});
    return kOk;
}

int cmd_sweep(const RunConfig& cfg) {
    // Cartesian product in the fixed order d, n, w, eta, beta, r; singleton
    // axes collapse and absent axes pass the no-value marker through.
    const std::vector<double> ws = cfg.w.empty() ? std::vector<double>{-1} : cfg.w;
    const std::vector<double> etas = cfg.eta.empty() ? std::vector<double>{-1} : cfg.eta;
    const std::vector<double> betas = cfg.beta.empty() ? std::vector<double>{-1} : cfg.beta;
    const std::vector<double> rs = cfg.r.empty() ? std::vector<double>{-1} : cfg.r;

    const double cells = static_cast<double>(cfg.d.size()) * cfg.n.size() * ws.size() *
                         etas.size() * betas.size() * rs.size();
    if (cells > 1e7) {
        std::cerr << "sweep: cell count " << cells << " exceeds the 1e7 guard\n";
        return kUsageError;
    }

    std::vector<RowResult> rows;
    for (double d : cfg.d)
        for (double n : cfg.n)
            for (double w : ws)
                for (double eta : etas)
                    for (double beta : betas)
                        for (double r : rs)
                            rows.push_back(evaluate_cell(
                                cfg, d, n,
                                w < 0 ? std::nullopt : std::optional<double>(w),
                                eta < 0 ? std::nullopt : std::optional<double>(eta),
                                beta < 0 ? std::nullopt : std::optional<double>(beta),
                                r < 0 ? std::nullopt : std::optional<double>(r)));
    Emitter emitter(cfg);
    emitter.emit_rows(rows);
    return kOk;
}

namespace {

void emit_table(const RunConfig& cfg, const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows) {
    Emitter emitter(cfg);
    auto& out = emitter.out();
    if (cfg.format == "json") {
        json doc;
        doc["config"] = json::parse(config_json(cfg));
        doc["columns"] = header;
        doc["rows"] = json::array();
        for (const auto& r : rows) doc["rows"].push_back(r);
        out << doc.dump(2) << "\n";
        return;
    }
    out << "# config " << config_json(cfg) << "\n";
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i)
            out << format_double(r[i]) << (i + 1 < r.size() ? "," : "\n");
    }
}

std::vector<double> default_or(const std::vector<double>& given,
                               std::vector<double> fallback) {
    return given.empty() ? std::move(fallback) : given;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
    return out;
}

} // namespace

int cmd_figure(const RunConfig& cfg) {
    const SpeedLimitConstants k(cfg.lambda);

    if (cfg.figure == "fig2") {
        // Four bounds scaled by N^2/d^3 against d; N cancels.
        std::vector<std::vector<double>> rows;
        std::vector<double> ds = default_or(cfg.d, parse_range("2:100"));
        for (double dd : ds) {
            const auto d = static_cast<std::int64_t>(std::llround(dd));
            const std::int64_t n = 10 * d;
            const double scale = static_cast<double>(n) * static_cast<double>(n) /
                                 (dd * dd * dd);
            const auto se = se_bounds_optimal(d, n, k);
            const auto ie = ie_bounds_noon(d, n, k);
            rows.push_back({dd, se.ml * scale, se.mt * scale, ie.ml * scale, ie.mt * scale});
        }
        emit_table(cfg, {"d", "d1_se", "d2_se", "d1_ie", "d2_ie"}, rows);
        return kOk;
    }

    if (cfg.figure == "fig3a" || cfg.figure == "fig3b" || cfg.figure == "fig3c") {
        std::vector<double> ds = default_or(cfg.d, parse_range("2:10"));
        std::vector<double> ns = default_or(cfg.n, parse_range("1:30"));
        std::vector<std::vector<double>> rows;
        for (double dd : ds) {
            const auto d = static_cast<std::int64_t>(std::llround(dd));
            for (double nn : ns) {
                const auto cmp = se_ie_squeezed_comparison(d, nn, k);
                if (cfg.figure == "fig3a")
                    rows.push_back({dd, nn, cmp.se_r, cmp.se.total_ml, cmp.se.total_mt,
                                    cmp.se.total_combined});
                else if (cfg.figure == "fig3b")
                    rows.push_back({dd, nn, cmp.ie_r, cmp.ie.total_ml, cmp.ie.total_mt,
                                    cmp.ie.total_combined});
                else
                    rows.push_back({dd, nn, cmp.se.total_combined, cmp.ie.total_combined,
                                    cmp.ie.total_combined - cmp.se.total_combined});
            }
        }
        if (cfg.figure == "fig3c")
            emit_table(cfg, {"d", "n", "se_combined", "ie_combined", "ie_minus_se"}, rows);
        else
            emit_table(cfg, {"d", "n", "r", "ml_total", "mt_total", "combined"}, rows);
        return kOk;
    }

    if (cfg.figure == "fig4loss" || cfg.figure == "fig4diff") {
        std::vector<double> ds = default_or(cfg.d, {2, 3, 5, 8});
        std::vector<double> ns = default_or(cfg.n, parse_range("2:50:25"));
        const bool loss = cfg.figure == "fig4loss";
        std::vector<double> strengths =
            loss ? default_or(cfg.eta, linspace(0.05, 1.0, 20))
                 : default_or(cfg.beta, linspace(0.01, 2.0, 20));
        std::vector<std::vector<double>> rows;
        RunConfig cell_cfg = cfg;
        cell_cfg.probe = "optimal";
        cell_cfg.noise = loss ? "loss" : "diffusion";
        for (double dd : ds)
            for (double nn : ns)
                for (double s : strengths) {
                    const auto row = evaluate_cell(
                        cell_cfg, dd, nn, first_or_none(cfg.w),
                        loss ? std::optional<double>(s) : std::nullopt,
                        loss ? std::nullopt : std::optional<double>(s), std::nullopt);
                    rows.push_back({dd, nn, s, row.report.total_ml, row.report.total_mt,
                                    row.report.total_combined});
                }
        emit_table(cfg, {"d", "n", loss ? "eta" : "beta", "ml_total", "mt_total", "combined"},
                   rows);
        return kOk;
    }

    std::cerr << "unknown figure name: " << cfg.figure << "\n";
    return kUsageError;
}

} // namespace qzzb_cli
