#include "CLI11.hpp"

#include "gelation/connectivity.hpp"
#include "gelation/duality.hpp"
#include "gelation/ensemble.hpp"
#include "gelation/exactgraph.hpp"
#include "gelation/mdpcheck.hpp"
#include "gelation/output.hpp"
#include "gelation/panjer.hpp"
#include "gelation/rates.hpp"
#include "gelation/simulate.hpp"

#include <atomic>
#include <clocale>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace gelation;

struct IoOpts {
    std::string out_path;
    std::string format;
};

void add_io(CLI::App* cmd, const std::shared_ptr<IoOpts>& io, const char* default_format) {
    io->format = default_format;
    cmd->add_option("--out", io->out_path, "write to this file instead of stdout");
    cmd->add_option("--format", io->format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

void emit(const RunOutput& out, const IoOpts& io) {
    const std::string text = io.format == "json" ? out.render_json() : out.render_csv();
    if (io.out_path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream file(io.out_path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::invalid_argument("cannot open output file: " + io.out_path);
    file.write(text.data(), static_cast<std::streamsize>(text.size()));
    file.flush();
    if (!file) throw std::runtime_error("failed writing output file: " + io.out_path);
}

int resolve_threads(int flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("GELATION_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw std::invalid_argument("GELATION_THREADS must be a positive integer");
        return static_cast<int>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

double resolve_theta(const std::string& text, double c) {
    if (text == "auto") return choose_theta(c).theta;
    size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size())
        throw std::invalid_argument("--theta expects a number or 'auto'");
    return value;
}

// "count:3" -> {"count", "3"}; "max" -> {"max", ""}
std::pair<std::string, std::string> split_token(const std::string& token) {
    const auto colon = token.find(':');
    if (colon == std::string::npos) return {token, ""};
    return {token.substr(0, colon), token.substr(colon + 1)};
}

long parse_long(const std::string& text, const char* what) {
    size_t used = 0;
    long v = 0;
    try {
        v = std::stol(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string(what) + " expects an integer");
    }
    if (used != text.size()) throw std::invalid_argument(std::string(what) + " expects an integer");
    return v;
}

double parse_double(const std::string& text, const char* what) {
    size_t used = 0;
    double v = 0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string(what) + " expects a number");
    }
    if (used != text.size()) throw std::invalid_argument(std::string(what) + " expects a number");
    return v;
}

std::string join_longs(const std::vector<long>& xs) {
    std::string out;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(xs[i]);
    }
    return out;
}

std::string join_doubles(const std::vector<double>& xs) {
    std::string out;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += fmt17(xs[i]);
    }
    return out;
}

void setup_duality(CLI::App& app) {
    auto* cmd = app.add_subcommand("duality", "dual parameter T of the mean degree c");
    auto opts = std::make_shared<double>(0.0);
    auto io = std::make_shared<IoOpts>();
    cmd->add_option("--c", *opts, "mean degree")->required();
    add_io(cmd, io, "json");
    cmd->callback([opts, io] {
        const DualityPair d = solve_duality(*opts);
        RunOutput out;
        out.command = "duality";
        out.meta("c", num_cell(*opts));
        out.columns = {"c", "T", "t"};
        out.rows = {{num_cell(d.c), num_cell(d.T), num_cell(d.t)}};
        emit(out, *io);
    });
}

void setup_mu(CLI::App& app) {
    struct Opts {
        long n = 0;
        double c = 0.0;
        long kmax = 0;
    };
    auto* cmd = app.add_subcommand("mu", "exact connectedness probabilities of G(k, c/n)");
    auto opts = std::make_shared<Opts>();
    auto io = std::make_shared<IoOpts>();
    cmd->add_option("--n", opts->n, "system size")->required();
    cmd->add_option("--c", opts->c, "mean degree")->required();
    cmd->add_option("--kmax", opts->kmax, "largest size (default n)");
    add_io(cmd, io, "csv");
    cmd->callback([opts, io] {
        if (opts->n < 1 || opts->n > 20000)
            throw std::invalid_argument("mu: n must lie in [1, 20000]");
        const long kmax = opts->kmax > 0 ? opts->kmax : opts->n;
        if (kmax > opts->n) throw std::invalid_argument("mu: kmax must be <= n");
        const MuTable table = mu_exact(opts->c / static_cast<double>(opts->n),
                                       static_cast<int>(kmax));
        RunOutput out;
        out.command = "mu";
        out.meta("n", num_cell(opts->n));
        out.meta("c", num_cell(opts->c));
        out.meta("kmax", num_cell(kmax));
        out.meta("precision_bits", num_cell(table.precision_bits));
        out.meta("restarts", num_cell(static_cast<long>(table.restarts)));
        out.columns = {"k", "logmu"};
        for (long k = 1; k <= kmax; ++k)
            out.rows.push_back({num_cell(k), num_cell(table.logmu[static_cast<size_t>(k)])});
        emit(out, *io);
    });
}

void setup_jumplaw(CLI::App& app) {
    struct Opts {
        long n = 0;
        double c = 0.0;
        std::string theta = "auto";
    };
    auto* cmd = app.add_subcommand("jumplaw", "truncated jump law of the conditional ensemble");
    auto opts = std::make_shared<Opts>();
    auto io = std::make_shared<IoOpts>();
    cmd->add_option("--n", opts->n, "system size")->required();
    cmd->add_option("--c", opts->c, "mean degree")->required();
    cmd->add_option("--theta", opts->theta, "truncation in (0,1], or 'auto'");
    add_io(cmd, io, "csv");
    cmd->callback([opts, io] {
        if (opts->n < 1 || opts->n > 20000)
            throw std::invalid_argument("jumplaw: n must lie in [1, 20000]");
        const double theta = resolve_theta(opts->theta, opts->c);
        const JumpLaw law = jump_law(opts->n, opts->c, theta);
        RunOutput out;
        out.command = "jumplaw";
        out.meta("n", num_cell(opts->n));
        out.meta("c", num_cell(opts->c));
        out.meta("theta", num_cell(theta));
        out.meta("kmax", num_cell(static_cast<long>(law.kmax)));
        out.meta("logZ", num_cell(law.logZ));
        out.meta("mu_precision_bits", num_cell(law.mu_precision_bits));
        out.columns = {"k", "logp", "logW"};
        for (int k = 1; k <= law.kmax; ++k)
            out.rows.push_back({num_cell(static_cast<long>(k)),
                                num_cell(law.logp[static_cast<size_t>(k)]),
                                num_cell(law.logW(k))});
        emit(out, *io);
    });
}

void setup_panjer(CLI::App& app) {
    struct Opts {
        long n = 0;
        double c = 0.0;
        std::string theta = "auto";
        std::string stat;
    };
    auto* cmd = app.add_subcommand("panjer", "conditional pmf tables given S = n");
    auto opts = std::make_shared<Opts>();
    auto io = std::make_shared<IoOpts>();
    cmd->add_option("--n", opts->n, "system size")->required();
    cmd->add_option("--c", opts->c, "mean degree")->required();
    cmd->add_option("--theta", opts->theta, "truncation in (0,1], or 'auto'");
    cmd->add_option("--stat", opts->stat, "sum | max | count:<k> | N")->required();
    add_io(cmd, io, "csv");
    cmd->callback([opts, io] {
        if (opts->n < 1 || opts->n > 20000)
            throw std::invalid_argument("panjer: n must lie in [1, 20000]");
        const double theta = opts->theta == "auto" ? 0.0 : resolve_theta(opts->theta, opts->c);
        const ConditionalEnsemble ens = make_ensemble(opts->n, opts->c, theta);

        RunOutput out;
        out.command = "panjer";
        out.meta("n", num_cell(opts->n));
        out.meta("c", num_cell(opts->c));
        out.meta("theta", num_cell(ens.theta));
        out.meta("stat", text_cell(opts->stat));
        out.meta("kmax", num_cell(ens.table.kmax));
        out.meta("logZ", num_cell(ens.law.logZ));
        out.meta("logP_hit", num_cell(ens.logP_hit));

        const auto [kind, arg] = split_token(opts->stat);
        if (kind == "sum") {
            out.columns = {"m", "logp"};
            for (long m = 0; m <= opts->n; ++m)
                out.rows.push_back({num_cell(m), num_cell(ens.table.logp_S(m))});
        } else if (kind == "max") {
            const std::vector<double> pmf = conditional_max_pmf(ens);
            out.columns = {"m", "p"};
            for (size_t m = 0; m < pmf.size(); ++m)
                out.rows.push_back({num_cell(static_cast<long>(m)), num_cell(pmf[m])});
        } else if (kind == "count") {
            const long k = parse_long(arg, "--stat count:<k>");
            if (k < 1) throw std::invalid_argument("--stat count:<k> expects k >= 1");
            const std::vector<double> pmf = conditional_count_pmf(ens, k);
            out.columns = {"j", "p"};
            for (size_t j = 0; j < pmf.size(); ++j)
                out.rows.push_back({num_cell(static_cast<long>(j)), num_cell(pmf[j])});
        } else if (kind == "N") {
            const std::vector<double> pmf = conditional_N_pmf(ens);
            out.columns = {"j", "p"};
            for (size_t j = 0; j < pmf.size(); ++j)
                out.rows.push_back({num_cell(static_cast<long>(j)), num_cell(pmf[j])});
        } else {
            throw std::invalid_argument("panjer: unknown --stat " + opts->stat);
        }
        emit(out, *io);
    });
}

std::string partition_string(const std::vector<int>& gamma) {
    std::string out;
    for (size_t k = 1; k < gamma.size(); ++k)
        for (int i = 0; i < gamma[k]; ++i) {
            if (!out.empty()) out += '+';
            out += std::to_string(k);
        }
    return out;
}

void setup_exact(CLI::App& app) {
    struct Opts {
        long n = 0;
        double c = 0.0;
    };
    auto* cmd = app.add_subcommand("exact", "exact component-profile law of G(n, c/n)");
    auto opts = std::make_shared<Opts>();
    auto io = std::make_shared<IoOpts>();
    cmd->add_option("--n", opts->n, "graph size (<= 40)")->required();
    cmd->add_option("--c", opts->c, "mean degree")->required();
    add_io(cmd, io, "csv");
    cmd->callback([opts, io] {
        if (opts->n < 1 || opts->n > 40)
            throw std::invalid_argument("exact: n must lie in [1, 40]");
        const ExactLaw law = law_by_partitions(opts->n, opts->c);
        RunOutput out;
        out.command = "exact";
        out.meta("n", num_cell(opts->n));
        out.meta("c", num_cell(opts->c));
        out.columns = {"partition", "logp", "p"};
        for (const auto& [gamma, logp] : law.entries)
            out.rows.push_back({text_cell(partition_string(gamma)), num_cell(logp),
                                num_cell(std::exp(logp))});
        emit(out, *io);
    });
}

void setup_simulate(CLI::App& app) {
    struct Opts {
        long n = 0;
        double c = 0.0;
        long replicas = 1;
        std::uint64_t seed = 0;
        int threads = 0;
    };
    auto* cmd = app.add_subcommand("simulate", "component census of sampled G(n, c/n) graphs");
    auto opts = std::make_shared<Opts>();
    auto io = std::make_shared<IoOpts>();
    cmd->add_option("--n", opts->n, "graph size")->required();
    cmd->add_option("--c", opts->c, "mean degree")->required();
    cmd->add_option("--replicas", opts->replicas, "number of independent draws");
    cmd->add_option("--seed", opts->seed, "base seed; replica r uses stream (seed, r)");
    cmd->add_option("--threads", opts->threads, "worker threads (default: GELATION_THREADS or cores)");
    add_io(cmd, io, "csv");
    cmd->callback([opts, io] {
        if (opts->n < 1 || opts->n > 100000000)
            throw std::invalid_argument("simulate: n must lie in [1, 1e8]");
        if (opts->replicas < 1 || opts->replicas > 1000000)
            throw std::invalid_argument("simulate: replicas must lie in [1, 1e6]");
        const int threads = resolve_threads(opts->threads);

        std::vector<ComponentStats> stats(static_cast<size_t>(opts->replicas));
        std::atomic<long> next{0};
        auto worker = [&] {
            for (long r = next.fetch_add(1); r < opts->replicas; r = next.fetch_add(1))
                stats[static_cast<size_t>(r)] =
                    sample_graph_stats(opts->n, opts->c, opts->seed,
                                       static_cast<std::uint64_t>(r));
        };
        if (threads <= 1 || opts->replicas == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            const int used = static_cast<int>(std::min<long>(threads, opts->replicas));
            pool.reserve(static_cast<size_t>(used));
            for (int t = 0; t < used; ++t) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }

        RunOutput out;
        out.command = "simulate";
        out.seed = opts->seed;
        out.meta("n", num_cell(opts->n));
        out.meta("c", num_cell(opts->c));
        out.meta("replicas", num_cell(opts->replicas));
        out.columns = {"replica", "cmax", "cn", "t1", "t2", "t3", "t4", "t5"};
        for (long r = 0; r < opts->replicas; ++r) {
            const ComponentStats& s = stats[static_cast<size_t>(r)];
            std::vector<Cell> row = {num_cell(r), num_cell(s.cmax), num_cell(s.cn)};
            for (long k = 1; k <= 5; ++k)
                row.push_back(num_cell(k <= s.n ? s.t[static_cast<size_t>(k)] : 0L));
            out.rows.push_back(std::move(row));
        }
        emit(out, *io);
    });
}

void setup_rates(CLI::App& app) {
    struct Opts {
        double c = 0.0;
        double theta = 1.0;
        int k = 1;
        std::string what;
    };
    auto* cmd = app.add_subcommand("rates", "deviation rate constants and functions");
    auto opts = std::make_shared<Opts>();
    auto io = std::make_shared<IoOpts>();
    cmd->add_option("--c", opts->c, "mean degree")->required();
    cmd->add_option("--theta", opts->theta, "truncation for the grand rates");
    cmd->add_option("--k", opts->k, "jump size for the grand excl rate");
    cmd->add_option("--what", opts->what,
                    "mdp | grand | ldp:<x> | thresholds:<kmax> | empirical:<file>")
        ->required();
    add_io(cmd, io, "json");
    cmd->callback([opts, io] {
        RunOutput out;
        out.command = "rates";
        out.meta("c", num_cell(opts->c));
        out.meta("what", text_cell(opts->what));
        const auto [kind, arg] = split_token(opts->what);

        if (kind == "mdp") {
            out.columns = {"name", "k", "kappa", "kappa_display"};
            auto push = [&](const char* name, const QuadraticRate& r) {
                out.rows.push_back({text_cell(name), num_cell(static_cast<long>(r.k)),
                                    num_cell(r.kappa), num_cell(r.kappa_display)});
            };
            if (opts->c > 1.0) push("i_max", mdp_rate(RateName::i_max, opts->c));
            for (int k = 1; k <= 3; ++k)
                push("iota_k", mdp_rate(RateName::iota_k, opts->c, k));
            push("j_total", mdp_rate(RateName::j_total, opts->c));
        } else if (kind == "grand") {
            out.meta("theta", num_cell(opts->theta));
            out.meta("k", num_cell(static_cast<long>(opts->k)));
            const GrandRates g = grand_rates(opts->c, opts->theta, opts->k);
            out.columns = {"name", "k", "kappa"};
            out.rows.push_back({text_cell("sum"), num_cell(0L), num_cell(g.sum.kappa)});
            out.rows.push_back({text_cell("fixed"), num_cell(0L), num_cell(g.fixed.kappa)});
            out.rows.push_back({text_cell("excl_k"), num_cell(static_cast<long>(g.excl_k.k)),
                                num_cell(g.excl_k.kappa)});
        } else if (kind == "ldp") {
            const double x = parse_double(arg, "--what ldp:<x>");
            out.columns = {"x", "rate"};
            out.rows.push_back({num_cell(x), num_cell(ldp_rate(opts->c, x))});
        } else if (kind == "thresholds") {
            const long kmax = parse_long(arg, "--what thresholds:<kmax>");
            if (kmax < 1 || kmax > 1000)
                throw std::invalid_argument("--what thresholds:<kmax> expects kmax in [1, 1000]");
            const LdpRate rate = make_ldp_rate(opts->c, static_cast<int>(kmax));
            out.meta("complete", bool_cell(rate.complete));
            out.columns = {"j", "x_j"};
            for (size_t j = 0; j < rate.thresholds.size(); ++j)
                out.rows.push_back({num_cell(static_cast<long>(j)), num_cell(rate.thresholds[j])});
        } else if (kind == "empirical") {
            std::ifstream file(arg);
            if (!file) throw std::invalid_argument("rates: cannot open sigma file: " + arg);
            std::vector<double> sigma = {0.0}; // index 0 unused
            double v = 0.0;
            while (file >> v) sigma.push_back(v);
            if (!file.eof())
                throw std::invalid_argument("rates: sigma file must hold whitespace-separated numbers");
            if (sigma.size() < 2)
                throw std::invalid_argument("rates: sigma file is empty");
            const EmpiricalRates er = empirical_rates(sigma, opts->c);
            out.columns = {"lambda", "jump_rate", "component_rate"};
            out.rows.push_back({num_cell(er.lambda), num_cell(er.jump_rate),
                                num_cell(er.component_rate)});
        } else {
            throw std::invalid_argument("rates: unknown --what " + opts->what);
        }
        emit(out, *io);
    });
}

void setup_mdp_scan(CLI::App& app) {
    struct Opts {
        double c = 0.0;
        std::string stat;
        std::vector<double> betas;
        std::vector<long> n_grid;
        std::string an = "pow:0.25";
        double delta = 0.1;
        std::string theta = "auto";
        int threads = 0;
    };
    auto* cmd = app.add_subcommand("mdp-scan",
                                   "window probabilities against the quadratic rates");
    auto opts = std::make_shared<Opts>();
    auto io = std::make_shared<IoOpts>();
    cmd->add_option("--c", opts->c, "mean degree")->required();
    cmd->add_option("--stat", opts->stat, "max | count:<k> | N | sum")->required();
    cmd->add_option("--beta", opts->betas, "window centers, comma separated")
        ->required()
        ->delimiter(',');
    cmd->add_option("--n", opts->n_grid, "system sizes, comma separated")
        ->required()
        ->delimiter(',');
    cmd->add_option("--an", opts->an, "a_n schedule: pow:<rho> or sqrtlog");
    cmd->add_option("--delta", opts->delta, "window half-width in a_n sqrt(n) units");
    cmd->add_option("--theta", opts->theta, "truncation in (0,1], or 'auto'");
    cmd->add_option("--threads", opts->threads, "worker threads (default: GELATION_THREADS or cores)");
    add_io(cmd, io, "csv");
    cmd->callback([opts, io] {
        ScanSpec spec;
        spec.c = opts->c;
        spec.n_grid = opts->n_grid;
        spec.betas = opts->betas;
        spec.delta = opts->delta;
        spec.theta = opts->theta == "auto" ? 0.0 : resolve_theta(opts->theta, opts->c);

        const auto [kind, arg] = split_token(opts->stat);
        if (kind == "max") {
            spec.statistic = ScanStatistic::max;
        } else if (kind == "count") {
            spec.statistic = ScanStatistic::count_k;
            const long k = parse_long(arg, "--stat count:<k>");
            if (k < 1 || k > 1000000)
                throw std::invalid_argument("--stat count:<k> expects k >= 1");
            spec.k = static_cast<int>(k);
        } else if (kind == "N") {
            spec.statistic = ScanStatistic::N;
        } else if (kind == "sum") {
            spec.statistic = ScanStatistic::grand_sum;
        } else {
            throw std::invalid_argument("mdp-scan: unknown --stat " + opts->stat);
        }

        const auto [rule, rho_text] = split_token(opts->an);
        if (rule == "pow") {
            spec.rule = AnRule::power;
            spec.rho = parse_double(rho_text, "--an pow:<rho>");
        } else if (rule == "sqrtlog" || rule == "sqrt_log") {
            spec.rule = AnRule::sqrt_log;
        } else {
            throw std::invalid_argument("mdp-scan: unknown --an " + opts->an);
        }

        const auto rows = conditional_mdp_scan(spec, resolve_threads(opts->threads));

        RunOutput out;
        out.command = "mdp-scan";
        out.meta("c", num_cell(opts->c));
        out.meta("stat", text_cell(opts->stat));
        out.meta("beta", text_cell(join_doubles(opts->betas)));
        out.meta("n", text_cell(join_longs(opts->n_grid)));
        out.meta("an", text_cell(opts->an));
        out.meta("delta", num_cell(opts->delta));
        out.meta("theta", text_cell(opts->theta));
        out.columns = {"n", "beta", "a_n", "window_lo", "window_hi",
                       "log_prob", "scaled", "rate_value"};
        for (const auto& r : rows)
            out.rows.push_back({num_cell(r.n), num_cell(r.beta), num_cell(r.a_n),
                                num_cell(r.window_lo), num_cell(r.window_hi),
                                num_cell(r.log_prob), num_cell(r.scaled),
                                num_cell(r.rate_value)});
        emit(out, *io);
    });
}

} // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"numerical laboratory for component sizes of sparse random graphs"};
    app.require_subcommand(1);
    setup_duality(app);
    setup_mu(app);
    setup_jumplaw(app);
    setup_panjer(app);
    setup_exact(app);
    setup_simulate(app);
    setup_rates(app);
    setup_mdp_scan(app);

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "%s\nRun with --help for usage.\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}
