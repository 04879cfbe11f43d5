#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "zerocone/construct.hpp"
#include "zerocone/dataset.hpp"
#include "zerocone/json_io.hpp"
#include "zerocone/svg.hpp"
#include "zerocone/verify.hpp"

namespace {

using namespace zerocone;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_file(out_path, text);
    }
}

LabeledDataset load_dataset(const std::string& path) {
    return dataset_from_json(read_file(path));
}

int run(int argc, char** argv) {
    CLI::App app{"zerocone: explicit zero-loss ReLU classifiers from cones and truncation maps"};
    app.require_subcommand(1);

    // gen-clustered -----------------------------------------------------
    auto* gen_c = app.add_subcommand("gen-clustered", "generate a clustered dataset");
    std::uint64_t seed = 0;
    Index dim = 5, classes = 3, ppc = 50;
    double spread = 0.5;
    std::string out_path, in_path, trace_path;
    gen_c->add_option("--seed", seed, "RNG seed")->required();
    gen_c->add_option("--dim", dim, "ambient dimension M");
    gen_c->add_option("--classes", classes, "class count Q");
    gen_c->add_option("--points-per-class", ppc, "points per class");
    gen_c->add_option("--spread", spread, "relative cluster radius in (0,1)");
    gen_c->add_option("--out", out_path, "output dataset JSON");

    // gen-sls -----------------------------------------------------------
    auto* gen_s = app.add_subcommand("gen-sls", "generate a nested-shell SLS dataset");
    gen_s->add_option("--seed", seed, "RNG seed")->required();
    gen_s->add_option("--dim", dim, "ambient dimension M");
    gen_s->add_option("--classes", classes, "class count Q");
    gen_s->add_option("--points-per-class", ppc, "points per class");
    gen_s->add_option("--out", out_path, "output dataset JSON");

    // check ---------------------------------------------------------------
    auto* check = app.add_subcommand("check", "check the clustering conditions");
    double c0 = 0.125;
    check->add_option("--in", in_path, "dataset JSON")->required();
    check->add_option("--c0", c0, "cluster constant in (0, 1/4)");
    check->add_option("--out", out_path, "report JSON (stdout otherwise)");

    // certify-sls ---------------------------------------------------------
    auto* csls = app.add_subcommand("certify-sls", "search for a sequential separability certificate");
    csls->add_option("--in", in_path, "dataset JSON")->required();
    csls->add_option("--out", out_path, "certificate JSON (stdout otherwise)");

    // build -----------------------------------------------------------------
    auto* build = app.add_subcommand("build", "construct a zero-loss network");
    std::string mode;
    double mu_frac = 2.5, theta_alpha = 0.5, tol = -1.0;
    build->add_option("--mode", mode, "clustered|sls")->required()
        ->check(CLI::IsMember({"clustered", "sls"}));
    build->add_option("--in", in_path, "dataset JSON")->required();
    build->add_option("--out", out_path, "network JSON")->required();
    build->add_option("--trace", trace_path, "construction trace JSON");
    build->add_option("--c0", c0, "cluster constant (clustered mode)");
    build->add_option("--mu-frac", mu_frac, "mu/delta ratio in (2,3) (clustered mode)");
    build->add_option("--theta-alpha", theta_alpha, "aperture fraction in (0,1) (sls mode)");
    build->add_option("--tol", tol, "certification tolerance");

    // verify ----------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "certify a network against a dataset");
    std::vector<std::string> in_paths;
    verify->add_option("--in", in_paths, "dataset JSON, then network JSON (flag twice)")
        ->expected(2);
    verify->add_option("--tol", tol, "entrywise residual tolerance");
    verify->add_option("--out", out_path, "certificate JSON (stdout otherwise)");

    // probe -------------------------------------------------------------------
    auto* probe = app.add_subcommand("probe", "degeneracy probe: rebuild with random free parameters");
    Index probes = 20;
    probe->add_option("--in", in_path, "dataset JSON")->required();
    probe->add_option("--mode", mode, "clustered|sls")->required()
        ->check(CLI::IsMember({"clustered", "sls"}));
    probe->add_option("--probes", probes, "number of probes");
    probe->add_option("--seed", seed, "RNG seed");
    probe->add_option("--out", out_path, "report JSON (stdout otherwise)");

    // params --------------------------------------------------------------
    auto* params = app.add_subcommand("params", "parameter accounting for a network");
    params->add_option("--in", in_path, "network JSON")->required();
    params->add_option("--out", out_path, "breakdown JSON (stdout otherwise)");

    // plot ---------------------------------------------------------------
    auto* plot = app.add_subcommand("plot", "render dataset + truncation steps as SVG");
    plot->add_option("--in", in_path, "dataset JSON")->required();
    plot->add_option("--trace", trace_path, "trace JSON (omit for a single raw-data frame)");
    plot->add_option("--out", out_path, "output SVG")->required();

    CLI11_PARSE(app, argc, argv);

    if (gen_c->parsed()) {
        emit(dataset_to_json(gen_clustered(seed, dim, classes, ppc, spread)), out_path);
        return 0;
    }
    if (gen_s->parsed()) {
        emit(dataset_to_json(gen_sls(seed, dim, classes, ppc)), out_path);
        return 0;
    }
    if (check->parsed()) {
        ClusterReport rep = check_clustered(load_dataset(in_path), c0);
        emit(cluster_report_to_json(rep), out_path);
        if (!rep.passes) {
            for (const std::string& r : rep.failure_reasons) std::cerr << r << "\n";
            return 1;
        }
        return 0;
    }
    if (csls->parsed()) {
        SlsSearchResult res = find_sls_certificate(load_dataset(in_path));
        if (!res.certificate) {
            std::cerr << "not sequentially linearly separable; best margins per attempt:\n";
            for (const SlsAttempt& a : res.attempts) {
                std::cerr << "  prefix size " << a.prefix.size() << ", class " << a.candidate
                          << ": " << a.best_margin << "\n";
            }
            return 1;
        }
        emit(sls_certificate_to_json(*res.certificate), out_path);
        return 0;
    }
    if (build->parsed()) {
        LabeledDataset ds = load_dataset(in_path);
        LayerNet net;
        ConstructionTrace trace;
        if (mode == "clustered") {
            ClusteredOptions opts;
            opts.c0 = c0;
            opts.mu_fractions = {mu_frac};
            opts.certify_tol = tol;
            std::tie(net, trace) = build_clustered(ds, opts);
        } else {
            SlsSearchResult res = find_sls_certificate(ds);
            if (!res.certificate) {
                std::cerr << "dataset is not sequentially linearly separable\n";
                return 1;
            }
            SLSOptions opts;
            opts.theta_alphas = {theta_alpha};
            opts.certify_tol = tol;
            std::tie(net, trace) = build_sls(ds, *res.certificate, opts);
        }
        write_file(out_path, network_to_json(net));
        if (!trace_path.empty()) write_file(trace_path, trace_to_json(trace));
        ZeroLossCertificate cert = certify(net, ds, tol);
        std::cerr << "cost " << cert.cost << ", max entry residual " << cert.max_entry_residual
                  << (cert.passes ? " (passes)" : " (FAILS)") << "\n";
        return cert.passes ? 0 : 2;
    }
    if (verify->parsed()) {
        LabeledDataset ds = load_dataset(in_paths.at(0));
        LayerNet net = network_from_json(read_file(in_paths.at(1)));
        ZeroLossCertificate cert = certify(net, ds, tol);
        emit(certificate_to_json(cert), out_path);
        return cert.passes ? 0 : 1;
    }
    if (probe->parsed()) {
        ProbeReport rep = degeneracy_probe(load_dataset(in_path),
                                           mode == "clustered" ? Builder::Clustered : Builder::Sls,
                                           probes, seed);
        emit(probe_report_to_json(rep), out_path);
        return rep.passed == rep.requested ? 0 : 1;
    }
    if (params->parsed()) {
        LayerNet net = network_from_json(read_file(in_path));
        emit(params_to_json(count_params(net), net.widths()), out_path);
        return 0;
    }
    if (plot->parsed()) {
        LabeledDataset ds = load_dataset(in_path);
        TraceSummary trace;
        if (!trace_path.empty()) trace = trace_from_json(read_file(trace_path));
        write_file(out_path, plot_trace(ds, trace));
        return 0;
    }
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const zerocone::NotClusteredError& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const std::string& r : e.report.failure_reasons) std::cerr << "  " << r << "\n";
        return 1;
    } catch (const zerocone::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const zerocone::InvalidInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
